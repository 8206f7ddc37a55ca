"""Multi-layer wall analysis: per-layer numbers and directional comparison.

A wall is an ordered stack of material layers, outside to inside.  Each
layer is reduced to its own set of dimensionless numbers with the layer
thickness as reference length; only the exposed layers carry surface
exchange, interior interfaces are assumed flux-continuous so interior
layers get Fourier and coupling numbers only.
"""
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

from hygroscale.dimensionless import (
    INSIDE_SURFACE,
    OUTSIDE_SURFACE,
    DimensionlessNumbers,
    ReferenceFrame,
    SurfaceCoefficients,
    numbers,
)
from hygroscale.materials import MaterialProperties, find, load_database
from hygroscale.thermo import DEFAULT_CONSTANTS

# groups reported by the layer-wise comparison
COMPARE_GROUPS = ("fo_m", "fo_q", "delta_fo_m", "gamma_fo_q")


@dataclass(frozen=True)
class WallLayer:
    material: str    # database id or name
    thickness: float  # m


@dataclass(frozen=True)
class WallConfig:
    layers: Tuple[WallLayer, ...]
    outside: SurfaceCoefficients = OUTSIDE_SURFACE
    inside: SurfaceCoefficients = INSIDE_SURFACE
    label: str = ""

    def validate(self):
        if not self.layers:
            raise ValueError("a wall needs at least one layer")
        for i, layer in enumerate(self.layers):
            if not layer.thickness > 0:
                raise ValueError(
                    f"layer {i + 1} ({layer.material!r}) has non-positive "
                    f"thickness {layer.thickness}")


def parse_wall_config(source: Union[str, TextIO], label: str = "") -> WallConfig:
    """Read a wall description from a path or an open text stream.

    Line format, one entry per line, '#' starts a comment:

        layer = <material name>, <thickness_m>     (outside first)
        outside_h = <hq>, <hm>
        inside_h = <hq>, <hm>

    The surface lines are optional and default to the standard sets.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
        if not label:
            label = str(source)

    layers: List[WallLayer] = []
    outside, inside = OUTSIDE_SURFACE, INSIDE_SURFACE
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"wall config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "layer":
            # the material name may itself contain a comma, the thickness not
            name, _, thick = value.rpartition(",")
            name = name.strip()
            if not name:
                raise ValueError(
                    f"wall config line {lineno}: layer needs 'name, thickness'")
            try:
                thickness = float(thick)
            except ValueError:
                raise ValueError(
                    f"wall config line {lineno}: bad thickness {thick.strip()!r}"
                ) from None
            layers.append(WallLayer(material=name, thickness=thickness))
        elif key in ("outside_h", "inside_h"):
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 2:
                raise ValueError(
                    f"wall config line {lineno}: {key} needs 'hq, hm'")
            try:
                hq, hm = float(parts[0]), float(parts[1])
            except ValueError:
                raise ValueError(
                    f"wall config line {lineno}: bad number in {key}") from None
            surface = SurfaceCoefficients(hq=hq, hm=hm)
            if key == "outside_h":
                outside = surface
            else:
                inside = surface
        else:
            raise ValueError(f"wall config line {lineno}: unknown key {key!r}")

    config = WallConfig(layers=tuple(layers), outside=outside, inside=inside,
                        label=label)
    config.validate()
    return config


@dataclass(frozen=True)
class LayerNumbers:
    """Numbers of one layer; interior layers have NaN Biot entries."""

    index: int  # 1-based, outside first
    material: MaterialProperties
    thickness: float
    surface: Optional[str]  # "outside", "inside", or None for interior
    numbers: DimensionlessNumbers


def layer_numbers(config: WallConfig, frame: ReferenceFrame,
                  materials: Optional[Sequence[MaterialProperties]] = None,
                  constants=DEFAULT_CONSTANTS) -> List[LayerNumbers]:
    """Evaluate every layer with Lref = its thickness.

    The outermost layer's Biot numbers use the config's outside surface
    set (a single-layer wall counts as outermost), the innermost the
    inside set; interior layers have no surface and their Biot entries
    are NaN.  The frame supplies the time scale and the state window.
    """
    config.validate()
    if materials is None:
        materials = load_database()
    n = len(config.layers)
    out: List[LayerNumbers] = []
    for i, layer in enumerate(config.layers):
        mat = find(materials, layer.material)
        if i == 0:
            surface, coeffs = "outside", config.outside
        elif i == n - 1:
            surface, coeffs = "inside", config.inside
        else:
            surface, coeffs = None, None
        layer_frame = replace(frame, Lref=layer.thickness,
                              hq=coeffs.hq if coeffs else frame.hq,
                              hm=coeffs.hm if coeffs else frame.hm)
        num = numbers(mat, layer_frame, constants)
        if surface is None:
            num = replace(num, bi_q=math.nan, bi_m=math.nan, bi_qm=math.nan)
        out.append(LayerNumbers(index=i + 1, material=mat,
                                thickness=layer.thickness, surface=surface,
                                numbers=num))
    return out


def _group_value(num: DimensionlessNumbers, group: str) -> float:
    if group == "fo_m":
        return num.fo_m
    if group == "fo_q":
        return num.fo_q
    if group == "delta_fo_m":
        return num.abs_delta * num.fo_m
    if group == "gamma_fo_q":
        return num.gamma * num.fo_q
    raise ValueError(f"unknown comparison group {group!r}")


@dataclass(frozen=True)
class GroupComparison:
    group: str
    values_a: Tuple[float, ...]
    values_b: Tuple[float, ...]
    ordering: Tuple[str, ...]  # per layer: "A", "B" or "tie"
    mixed: bool  # ordering direction changes across layers


@dataclass(frozen=True)
class WallComparison:
    label_a: str
    label_b: str
    layers_a: List[LayerNumbers]
    layers_b: List[LayerNumbers]
    groups: Dict[str, GroupComparison]
    needs_simulation: bool  # some group is not totally ordered across layers


def compare(config_a: WallConfig, config_b: WallConfig, frame: ReferenceFrame,
            materials: Optional[Sequence[MaterialProperties]] = None,
            constants=DEFAULT_CONSTANTS, rel_tol: float = 1e-12) -> WallComparison:
    """Layer-by-layer directional comparison of two walls.

    For each group and each layer the report states which wall has the
    larger value.  A group whose direction is not the same in every layer
    is flagged mixed; any mixed group sets needs_simulation, meaning the
    number comparison alone cannot rank the walls.
    """
    if len(config_a.layers) != len(config_b.layers):
        raise ValueError(
            f"cannot compare walls with {len(config_a.layers)} and "
            f"{len(config_b.layers)} layers; layer counts must match")
    if materials is None:
        materials = load_database()
    layers_a = layer_numbers(config_a, frame, materials, constants)
    layers_b = layer_numbers(config_b, frame, materials, constants)

    groups: Dict[str, GroupComparison] = {}
    needs_simulation = False
    for group in COMPARE_GROUPS:
        va = tuple(_group_value(la.numbers, group) for la in layers_a)
        vb = tuple(_group_value(lb.numbers, group) for lb in layers_b)
        ordering = []
        for x, y in zip(va, vb):
            if abs(x - y) <= rel_tol * max(abs(x), abs(y)):
                ordering.append("tie")
            elif x > y:
                ordering.append("A")
            else:
                ordering.append("B")
        decided = {o for o in ordering if o != "tie"}
        mixed = len(decided) > 1
        needs_simulation = needs_simulation or mixed
        groups[group] = GroupComparison(group=group, values_a=va, values_b=vb,
                                        ordering=tuple(ordering), mixed=mixed)
    return WallComparison(
        label_a=config_a.label or "A", label_b=config_b.label or "B",
        layers_a=layers_a, layers_b=layers_b, groups=groups,
        needs_simulation=needs_simulation)
