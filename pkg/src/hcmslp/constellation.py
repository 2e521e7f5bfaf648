"""HCM and square-QAM constellations on the odd-integer lattice.

An HCM constellation superposes an ASK sub-constellation on the real axis
with an ``I x J`` rectangular QAM sub-constellation.  Every ASK symbol is
pinned only by its real part; the imaginary part is left to the precoder.
ASK symbols whose real coordinate falls inside the QAM columns must be
received above ``I + 1`` in magnitude so they clear the top QAM row.

Points are addressed by integer index.  No energy normalization is applied.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hcmslp.errors import ConfigurationError


class SymbolClass(enum.Enum):
    A1_QAM = "A1"
    A2_ASK_CENTRAL = "A2"
    A3_ASK_SIDE = "A3"


class Region(enum.Enum):
    B1 = "B1"  # {0}
    B2 = "B2"  # {jz : |z| >= I + 1}
    B3 = "B3"  # {jz : z real}


@dataclass(frozen=True)
class ConstellationPoint:
    index: int
    value: complex
    symbol_class: SymbolClass


@dataclass(frozen=True)
class SymbolDecomposition:
    fixed: complex | float
    region: Region
    threshold: float = 0.0


@dataclass(frozen=True, eq=False)
class Constellation:
    kind: str
    points: tuple[ConstellationPoint, ...]
    qam_rows: int
    qam_cols: int
    # QAM only: per-point outward CI direction on the (re, im) axes, in {-1, 0, 1}
    outward: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.array([p.value for p in self.points], dtype=complex)
        classes = np.array([_CLASS_CODE[p.symbol_class] for p in self.points])
        vals.setflags(write=False)
        classes.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "class_codes", classes)

    @property
    def order(self) -> int:
        return len(self.points)

    @property
    def ci_threshold(self) -> float:
        return float(self.qam_rows + 1)

    @property
    def avg_fixed_power(self) -> float:
        """Mean squared value of the WL fixed entries, symbols drawn uniformly."""
        re2 = self.values.real**2
        im2 = self.values.imag**2
        is_a1 = self.class_codes == 1
        total = re2.sum() + im2[is_a1].sum()
        count = self.order + is_a1.sum()
        return float(total / count)

    def indices(self, symbol_class: SymbolClass) -> np.ndarray:
        return np.flatnonzero(self.class_codes == _CLASS_CODE[symbol_class])

    def position(self, index: int) -> str:
        """'interior', 'edge' or 'corner' for QAM points."""
        if self.outward is None:
            raise ConfigurationError("position labels exist only for square QAM")
        n_out = int(np.count_nonzero(self.outward[index]))
        return ("interior", "edge", "corner")[n_out]


_CLASS_CODE = {
    SymbolClass.A1_QAM: 1,
    SymbolClass.A2_ASK_CENTRAL: 2,
    SymbolClass.A3_ASK_SIDE: 3,
}

# order -> (QAM rows I, QAM columns J, ASK levels)
_HCM_LAYOUTS = {16: (2, 4, 8), 64: (6, 8, 16)}


def _odd_levels(n: int) -> np.ndarray:
    """``n`` symmetric odd-integer levels, e.g. 4 -> [-3, -1, 1, 3]."""
    return np.arange(-(n - 1), n, 2, dtype=float)


def build_hcm(order: int) -> Constellation:
    if order not in _HCM_LAYOUTS:
        raise ConfigurationError(f"HCM order must be one of {sorted(_HCM_LAYOUTS)}, got {order}")
    rows, cols, n_ask = _HCM_LAYOUTS[order]
    points = []
    qam_re = _odd_levels(cols)
    for im in _odd_levels(rows)[::-1]:
        for re in qam_re:
            points.append(ConstellationPoint(len(points), complex(re, im), SymbolClass.A1_QAM))
    half_width = qam_re.max()
    for re in _odd_levels(n_ask):
        cls = SymbolClass.A2_ASK_CENTRAL if abs(re) <= half_width else SymbolClass.A3_ASK_SIDE
        points.append(ConstellationPoint(len(points), complex(re, 0.0), cls))
    return Constellation("hcm", tuple(points), rows, cols)


def build_qam(order: int) -> Constellation:
    if order not in (16, 64):
        raise ConfigurationError(f"QAM order must be 16 or 64, got {order}")
    side = int(round(np.sqrt(order)))
    levels = _odd_levels(side)
    edge = levels.max()
    points, outward = [], []
    for im in levels[::-1]:
        for re in levels:
            points.append(ConstellationPoint(len(points), complex(re, im), SymbolClass.A1_QAM))
            outward.append((np.sign(re) * (abs(re) == edge), np.sign(im) * (abs(im) == edge)))
    outward = np.array(outward, dtype=int)
    outward.setflags(write=False)
    return Constellation("qam", tuple(points), side, side, outward=outward)


def classify(c: Constellation, index: int) -> tuple[SymbolClass, SymbolDecomposition]:
    if not 0 <= index < c.order:
        raise IndexError(f"symbol index {index} out of range for order {c.order}")
    p = c.points[index]
    if p.symbol_class is SymbolClass.A1_QAM:
        return p.symbol_class, SymbolDecomposition(p.value, Region.B1)
    if p.symbol_class is SymbolClass.A2_ASK_CENTRAL:
        return p.symbol_class, SymbolDecomposition(p.value.real, Region.B2, c.ci_threshold)
    return p.symbol_class, SymbolDecomposition(p.value.real, Region.B3)


def region_distances(c: Constellation, y) -> np.ndarray:
    """Distance from each ``y`` to every point's received region, shape ``y.shape + (order,)``."""
    y = np.asarray(y, dtype=complex)[..., None]
    v = c.values
    codes = c.class_codes
    dre = y.real - v.real
    d_point = np.abs(y - v)
    d_half = np.hypot(dre, np.maximum(0.0, c.ci_threshold - np.abs(y.imag)))
    d_line = np.abs(dre)
    return np.where(codes == 1, d_point, np.where(codes == 2, d_half, d_line))


def detect(c: Constellation, y):
    """Index of the region nearest to ``y``; ties go to the lowest index."""
    idx = np.argmin(region_distances(c, y), axis=-1)
    return int(idx) if np.ndim(idx) == 0 else idx


def to_csv(c: Constellation, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "re", "im", "class"])
            for p in c.points:
                w.writerow([p.index, repr(p.value.real), repr(p.value.imag), p.symbol_class.value])
    except OSError as exc:
        raise OSError(f"cannot write constellation to {path}: {exc}") from exc
