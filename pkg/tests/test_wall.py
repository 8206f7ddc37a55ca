"""Wall config parsing, per-layer numbers and the comparison report."""
import io
import math

import pytest

from hygroscale.dimensionless import (
    INSIDE_SURFACE,
    OUTSIDE_SURFACE,
    SurfaceCoefficients,
    default_frame,
    numbers,
)
from hygroscale.wall import (
    COMPARE_GROUPS,
    WallConfig,
    WallLayer,
    compare,
    layer_numbers,
    parse_wall_config,
)

# the two reference envelope stacks, outside to inside
WALL_A = """\
# structural wall
layer = Concrete, 0.20
layer = Wood Fiber 1, 0.20
layer = Gypsum Board, 0.0125
"""
WALL_B = """\
layer = Extruded Brick, 0.20
layer = Cellulose, 0.20
layer = Radial Spruce, 0.02
"""

# frozen per-layer group values at tref = 1 h (6 significant digits)
GROUPS_A = {
    "fo_m": (1.3301e-5, 0.00079229, 0.20217),
    "fo_q": (0.0801924, 0.0110295, 4.39083),
    "delta_fo_m": (3.51279e-6, 8.60007e-10, 0.000701502),
    "gamma_fo_q": (5.16769e-5, 0.0069664, 0.275935),
}
GROUPS_B = {
    "fo_m": (0.000544342, 0.00422719, 0.000454821),
    "fo_q": (0.0380043, 0.0394366, 0.923434),
    "delta_fo_m": (3.22529e-5, 2.72756e-6, 2.05356e-8),
    "gamma_fo_q": (0.000555882, 0.0456659, 0.00658029),
}
ORDERINGS = {
    "fo_m": ("B", "B", "A"),
    "fo_q": ("A", "B", "A"),
    "delta_fo_m": ("B", "B", "A"),
    "gamma_fo_q": ("B", "B", "A"),
}

FRAME = default_frame(1.0, 3600.0, "outside")


def _walls(scale=1.0):
    def scaled(text, label):
        cfg = parse_wall_config(io.StringIO(text), label=label)
        layers = tuple(WallLayer(material=l.material,
                                 thickness=l.thickness * scale)
                       for l in cfg.layers)
        return WallConfig(layers=layers, outside=cfg.outside,
                          inside=cfg.inside, label=label)
    return scaled(WALL_A, "A"), scaled(WALL_B, "B")


def test_parse_wall_config():
    cfg = parse_wall_config(io.StringIO(WALL_A), label="A")
    assert [l.material for l in cfg.layers] == \
        ["Concrete", "Wood Fiber 1", "Gypsum Board"]
    assert [l.thickness for l in cfg.layers] == [0.20, 0.20, 0.0125]
    assert cfg.outside == OUTSIDE_SURFACE
    assert cfg.inside == INSIDE_SURFACE


def test_parse_wall_config_surface_overrides():
    text = "layer = Concrete, 0.1\noutside_h = 20, 2e-7\ninside_h = 4, 4e-9\n"
    cfg = parse_wall_config(io.StringIO(text))
    assert cfg.outside == SurfaceCoefficients(hq=20.0, hm=2e-7)
    assert cfg.inside == SurfaceCoefficients(hq=4.0, hm=4e-9)


def test_parse_wall_config_material_names_may_contain_commas():
    text = "layer = Cement Flooring, Mid. Lay., 0.1\n"
    cfg = parse_wall_config(io.StringIO(text))
    assert cfg.layers[0].material == "Cement Flooring, Mid. Lay."
    assert cfg.layers[0].thickness == 0.1


@pytest.mark.parametrize("text,match", [
    ("layer = Concrete\n", "line 1"),
    ("layer = , 0.1\n", "name, thickness"),
    ("layer = Concrete, thick\n", "bad thickness"),
    ("outside_h = 15\n", "hq, hm"),
    ("inside_h = a, b\n", "bad number"),
    ("density = 2104\n", "unknown key"),
    ("Concrete 0.1\n", "key = value"),
    ("layer = Concrete, 0.0\n", "thickness"),
    ("", "at least one layer"),
])
def test_parse_wall_config_errors(text, match):
    with pytest.raises(ValueError, match=match):
        parse_wall_config(io.StringIO(text))


def test_single_layer_wall_reduces_to_plain_numbers(db, by_name):
    cfg = WallConfig(layers=(WallLayer("Granite", 0.3),))
    (ln,) = layer_numbers(cfg, FRAME, db)
    assert ln.surface == "outside"
    direct = numbers(by_name("Granite"),
                     default_frame(0.3, FRAME.tref, "outside"))
    assert ln.numbers == direct


def test_layer_surfaces_and_interior_nan(db):
    wall_a, _ = _walls()
    layers = layer_numbers(wall_a, FRAME, db)
    assert [ln.surface for ln in layers] == ["outside", None, "inside"]
    assert [ln.index for ln in layers] == [1, 2, 3]
    interior = layers[1].numbers
    assert math.isnan(interior.bi_q)
    assert math.isnan(interior.bi_m)
    assert math.isnan(interior.bi_qm)
    # the exposed layers use the respective surface sets
    assert layers[0].numbers.bi_q == pytest.approx(
        OUTSIDE_SURFACE.hq * 0.20 / 1.70234628882694, rel=1e-10)
    assert layers[2].numbers.bi_q > 0.0


def test_layer_group_values_match_frozen_table(db):
    wall_a, wall_b = _walls()
    report = compare(wall_a, wall_b, FRAME, db)
    for group in COMPARE_GROUPS:
        gc = report.groups[group]
        for got, want in zip(gc.values_a, GROUPS_A[group]):
            assert got == pytest.approx(want, rel=5e-5), f"A.{group}"
        for got, want in zip(gc.values_b, GROUPS_B[group]):
            assert got == pytest.approx(want, rel=5e-5), f"B.{group}"


def test_compare_orderings_and_flags(db):
    report = compare(*_walls(), frame=FRAME, materials=db)
    for group, want in ORDERINGS.items():
        gc = report.groups[group]
        assert gc.ordering == want, group
        assert gc.mixed == (len(set(want)) > 1), group
    assert report.needs_simulation  # the heat Fourier ordering inverts
    assert report.label_a == "A" and report.label_b == "B"


@pytest.mark.parametrize("scale", [0.5, 1.5])
def test_orderings_survive_uniform_thickness_scaling(scale, db):
    report = compare(*_walls(scale), frame=FRAME, materials=db)
    for group, want in ORDERINGS.items():
        assert report.groups[group].ordering == want, group


def test_splitting_a_layer_preserves_state_numbers(db):
    """Half-thickness halves Biot and quadruples Fourier; state numbers
    do not move at all."""
    whole = WallConfig(layers=(WallLayer("Concrete", 0.2),))
    half = WallConfig(layers=(WallLayer("Concrete", 0.1),))
    (n_whole,), (n_half,) = (layer_numbers(c, FRAME, db)
                             for c in (whole, half))
    a, b = n_whole.numbers, n_half.numbers
    assert b.fo_m == pytest.approx(4.0 * a.fo_m, rel=1e-13)
    assert b.fo_q == pytest.approx(4.0 * a.fo_q, rel=1e-13)
    assert b.bi_q == pytest.approx(a.bi_q / 2.0, rel=1e-13)
    assert b.bi_m == pytest.approx(a.bi_m / 2.0, rel=1e-13)
    assert b.bi_qm == pytest.approx(a.bi_qm / 2.0, rel=1e-13)
    for name in ("delta", "gamma", "eta"):
        assert getattr(a, name) == getattr(b, name)


def test_compare_is_antisymmetric(db):
    wall_a, wall_b = _walls()
    forward = compare(wall_a, wall_b, FRAME, db)
    backward = compare(wall_b, wall_a, FRAME, db)
    flip = {"A": "B", "B": "A", "tie": "tie"}
    for group in COMPARE_GROUPS:
        assert backward.groups[group].ordering == tuple(
            flip[o] for o in forward.groups[group].ordering)
    assert backward.needs_simulation == forward.needs_simulation


def test_compare_wall_with_itself_is_all_ties(db):
    wall_a, _ = _walls()
    report = compare(wall_a, wall_a, FRAME, db)
    for group in COMPARE_GROUPS:
        assert report.groups[group].ordering == ("tie", "tie", "tie")
        assert not report.groups[group].mixed
    assert not report.needs_simulation


def test_compare_layer_count_mismatch_raises(db):
    wall_a, _ = _walls()
    single = WallConfig(layers=(WallLayer("Concrete", 0.2),))
    with pytest.raises(ValueError, match="layer counts"):
        compare(wall_a, single, FRAME, db)
