"""Symbolic coarse-space calculus over lattice models.

Blocky subsets of Z^n are products of four per-coordinate constraints
(zero, nonnegative ray, nonpositive ray, full line).  The module decides
flasqueness syntactically (a half-ray factor admits a shift to infinity),
looks up the K-theory of the Roe algebra for the shapes in the grammar,
generates the covers behind the worked examples, and verifies coarse
excisiveness by brute force on finite lattice boxes.

Z^n stands in for R^n throughout: the two are coarsely equivalent, and
coarse equivalence preserves the K-theory being tracked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import floor, lcm
from typing import Iterable, Sequence

import numpy as np

from .abelian import FgAbGroup
from .assembly import MvInput


class CoarseError(Exception):
    pass


class DimensionMismatch(CoarseError):
    pass


class UnknownSpace(CoarseError):
    pass


class BoxTooSmall(CoarseError):
    pass


# ---------------------------------------------------------------------------
# the blocky grammar


class Factor(enum.Enum):
    """Per-coordinate constraint on Z."""

    ZERO = "zero"
    NONNEG = "nonneg"
    NONPOS = "nonpos"
    FULL = "full"


_MEET = {
    frozenset((Factor.NONNEG, Factor.NONPOS)): Factor.ZERO,
}


def meet(a: Factor, b: Factor) -> Factor:
    if a == b:
        return a
    if a == Factor.FULL:
        return b
    if b == Factor.FULL:
        return a
    if a == Factor.ZERO or b == Factor.ZERO:
        return Factor.ZERO
    return _MEET[frozenset((a, b))]


@dataclass(frozen=True)
class BlockySpace:
    """Product of per-coordinate constraints; always contains the origin."""

    factors: tuple[Factor, ...]

    @classmethod
    def of(cls, *factors: Factor) -> "BlockySpace":
        return cls(tuple(factors))

    @property
    def dim(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        return "[" + ", ".join(f.value for f in self.factors) + "]"


def intersect(spaces: Sequence[BlockySpace]) -> BlockySpace:
    """Factorwise meet; the intersection of blocky sets is blocky."""
    if not spaces:
        raise ValueError("intersection of an empty family")
    dim = spaces[0].dim
    for s in spaces:
        if s.dim != dim:
            raise DimensionMismatch("blocky spaces of different dimensions")
    return BlockySpace(
        tuple(
            _meet_all([s.factors[i] for s in spaces])
            for i in range(dim)
        )
    )


def _meet_all(factors: Iterable[Factor]) -> Factor:
    out = Factor.FULL
    for f in factors:
        out = meet(out, f)
    return out


@dataclass(frozen=True)
class SpaceClass:
    """Flasque, or a product of lines and points (LineLike(k))."""

    flasque: bool
    lines: int = 0

    @property
    def is_point(self) -> bool:
        return not self.flasque and self.lines == 0

    def __str__(self) -> str:
        if self.flasque:
            return "Flasque"
        if self.lines == 0:
            return "PointLike"
        return f"LineLike({self.lines})"


def classify(space: BlockySpace) -> SpaceClass:
    """A retained half-ray factor makes the whole product flasque."""
    if any(f in (Factor.NONNEG, Factor.NONPOS) for f in space.factors):
        return SpaceClass(True)
    return SpaceClass(False, sum(1 for f in space.factors if f == Factor.FULL))


# ---------------------------------------------------------------------------
# wedge covers


@dataclass(frozen=True)
class WedgeCoverPiece:
    """Cover piece of a wedge of rays: the base ray, or base plus one ray."""

    label: int
    kind: str  # "base_ray" | "double_ray"

    def __post_init__(self) -> None:
        if self.kind not in ("base_ray", "double_ray"):
            raise UnknownSpace(f"unknown wedge piece kind {self.kind!r}")


def wedge_cover(k):
    """Pieces Y_0 .. Y_{k-1}; any two distinct pieces meet in the base ray.

    ``k`` may be the string "countable", returning a lazy enumeration of
    the countably many pieces (consume with islice, never list()).
    """
    if k == "countable":
        return _countable_wedge_pieces()
    if k < 1:
        raise ValueError("wedge cover needs at least one ray")
    return [WedgeCoverPiece(0, "base_ray")] + [
        WedgeCoverPiece(b, "double_ray") for b in range(1, k)
    ]


def _countable_wedge_pieces():
    from itertools import count

    yield WedgeCoverPiece(0, "base_ray")
    for b in count(1):
        yield WedgeCoverPiece(b, "double_ray")


# ---------------------------------------------------------------------------
# K-theory lookup (grading period 2)


_Z = FgAbGroup.free(1)
_0 = FgAbGroup.zero()


def roe_k_theory(space) -> dict[int, FgAbGroup]:
    """Period-2 graded K-theory of the Roe algebra of a grammar shape.

    Flasque spaces have vanishing K-theory; a product of k lines carries Z
    in degree k mod 2; a double ray is coarsely a line.
    """
    if isinstance(space, BlockySpace):
        cls = classify(space)
        if cls.flasque:
            return {0: _0, 1: _0}
        return {cls.lines % 2: _Z, (cls.lines + 1) % 2: _0}
    if isinstance(space, WedgeCoverPiece):
        if space.kind == "base_ray":
            return {0: _0, 1: _0}
        return {0: _0, 1: _Z}
    raise UnknownSpace(f"no K-theory rule for {space!r}")


# ---------------------------------------------------------------------------
# cover generators for the worked examples


def block_decomposition(n: int) -> list[BlockySpace]:
    """The n+1 overlapping blocks covering Z^n.

    >>> [str(b) for b in block_decomposition(1)]
    ['[nonpos]', '[nonneg]']
    """
    if n < 1:
        raise ValueError("block decomposition needs dimension >= 1")
    blocks = []
    for j in range(n + 1):
        if j == 0:
            fac = (Factor.NONPOS,) + (Factor.FULL,) * (n - 1)
        elif j == n:
            fac = (Factor.NONNEG,) * n
        else:
            fac = (Factor.NONNEG,) * j + (Factor.NONPOS,) + (Factor.FULL,) * (n - j - 1)
        blocks.append(BlockySpace(fac))
    return blocks


def zinf_block_family(m: int) -> list[BlockySpace]:
    """Blocks of the countable family truncated to the first m+1 coordinates.

    Every finite intersection keeps a half-ray factor, hence is flasque.
    """
    if m < 1:
        raise ValueError("truncation prefix must be >= 1")
    return [
        BlockySpace((Factor.NONNEG,) * j + (Factor.NONPOS,) + (Factor.FULL,) * (m - j))
        for j in range(m + 1)
    ]


def rn_mv_input(n: int) -> MvInput:
    """Mayer-Vietoris input for the block decomposition of Z^n."""
    blocks = block_decomposition(n)

    def rule(j: tuple) -> dict[int, FgAbGroup]:
        return roe_k_theory(intersect([blocks[i] for i in j]))

    return MvInput(labels=tuple(range(n + 1)), cap=n, rule=rule)


def zinf_mv_input(m: int, cap: int) -> MvInput:
    """Truncated input for the countable block family; exact because every
    finite intersection is provably flasque, at any cap."""
    spaces = zinf_block_family(m)

    def rule(j: tuple) -> dict[int, FgAbGroup]:
        return roe_k_theory(intersect([spaces[i] for i in j]))

    return MvInput(labels=tuple(range(m + 1)), cap=min(cap, m), rule=rule)


def wedge_mv_input(k: int, truncated: bool = False) -> MvInput:
    """Input for a wedge of k rays covered by base-plus-one-ray pieces.

    With ``truncated`` the input is marked as a finite prefix of the
    countable wedge; the first-page column keeps growing with k, so the
    answer is only exact for the finite wedge.
    """
    pieces = wedge_cover(k)

    def rule(j: tuple) -> dict[int, FgAbGroup]:
        if len(j) == 1:
            return roe_k_theory(pieces[j[0]])
        return roe_k_theory(WedgeCoverPiece(0, "base_ray"))

    return MvInput(
        labels=tuple(range(k)),
        cap=k - 1,
        rule=rule,
        mode="truncated" if truncated else "exact",
        truncated_at=k if truncated else None,
    )


# ---------------------------------------------------------------------------
# metrics and lattice boxes


@dataclass(frozen=True)
class Metric:
    """d1, sup-metric, or a weighted 1-metric with positive rational weights."""

    kind: str  # "d1" | "dinf" | "weighted"
    weights: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("d1", "dinf", "weighted"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "weighted":
            if not self.weights:
                raise ValueError("weighted metric needs weights")
            object.__setattr__(
                self, "weights", tuple(Fraction(w) for w in self.weights)
            )
            if any(w <= 0 for w in self.weights):
                raise ValueError("weights must be strictly positive")
        elif self.weights is not None:
            raise ValueError("weights only apply to the weighted metric")

    @classmethod
    def d1(cls) -> "Metric":
        return cls("d1")

    @classmethod
    def dinf(cls) -> "Metric":
        return cls("dinf")

    @classmethod
    def weighted(cls, weights: Sequence) -> "Metric":
        return cls("weighted", tuple(Fraction(w) for w in weights))


@dataclass(frozen=True)
class LatticeBox:
    """Product of integer intervals (lo, hi), None meaning unbounded.

    Blocky sets embed as boxes; boxes are closed under intersection and
    admit per-coordinate nearest-point distances, which is what makes the
    excision check exact against the untruncated sets.
    """

    intervals: tuple[tuple[int | None, int | None], ...]

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def is_empty(self) -> bool:
        return any(
            lo is not None and hi is not None and lo > hi for lo, hi in self.intervals
        )

    @classmethod
    def from_blocky(cls, space: BlockySpace) -> "LatticeBox":
        table = {
            Factor.ZERO: (0, 0),
            Factor.NONNEG: (0, None),
            Factor.NONPOS: (None, 0),
            Factor.FULL: (None, None),
        }
        return cls(tuple(table[f] for f in space.factors))

    def intersect(self, other: "LatticeBox") -> "LatticeBox":
        if self.dim != other.dim:
            raise DimensionMismatch("boxes of different dimensions")
        out = []
        for (lo1, hi1), (lo2, hi2) in zip(self.intervals, other.intervals):
            lo = lo1 if lo2 is None else (lo2 if lo1 is None else max(lo1, lo2))
            hi = hi1 if hi2 is None else (hi2 if hi1 is None else min(hi1, hi2))
            out.append((lo, hi))
        return LatticeBox(tuple(out))

    def coordinate_gap(self, i: int, x: int) -> int:
        """Distance from x to the i-th interval (0 inside)."""
        lo, hi = self.intervals[i]
        if lo is not None and x < lo:
            return lo - x
        if hi is not None and x > hi:
            return x - hi
        return 0


def as_box(space) -> LatticeBox:
    if isinstance(space, LatticeBox):
        return space
    if isinstance(space, BlockySpace):
        return LatticeBox.from_blocky(space)
    raise UnknownSpace(f"cannot view {space!r} as a lattice set")


def set_distance(point: Sequence[int], box: LatticeBox, metric: Metric) -> Fraction | None:
    """Exact distance from a lattice point to a box; None when empty.

    Nearest points of a product set are found coordinate by coordinate,
    so the per-coordinate gaps aggregate by sum (1-metrics) or max.
    """
    if box.is_empty:
        return None
    gaps = [box.coordinate_gap(i, int(point[i])) for i in range(box.dim)]
    if metric.kind == "dinf":
        return Fraction(max(gaps, default=0))
    if metric.kind == "d1":
        return Fraction(sum(gaps))
    if len(metric.weights) != box.dim:
        raise DimensionMismatch("weight count does not match dimension")
    return sum((w * g for w, g in zip(metric.weights, gaps)), Fraction(0))


# ---------------------------------------------------------------------------
# the excision oracle


@dataclass(frozen=True)
class ExcisionResult:
    ok: bool
    witness: tuple[int, ...] | None
    points_checked: int


def _scaled_tables(
    boxes: Sequence[LatticeBox], values: Sequence[int], metric: Metric, dim: int, scale: int
) -> list[list[np.ndarray]]:
    """Per-set, per-coordinate integer contribution tables over the range.

    Contributions come pre-multiplied by ``scale`` (and the weights), so
    radius comparisons happen in plain integers at numpy speed.
    """
    if metric.kind == "weighted":
        factors = [int(w * scale) for w in metric.weights]
    else:
        factors = [scale] * dim
    # int64 is plenty for sane inputs; huge weight denominators fall back
    # to exact object arrays rather than risking silent wraparound
    worst = max(abs(v) for v in values) + max(
        abs(x) for b in boxes for lo, hi in b.intervals for x in (lo or 0, hi or 0)
    )
    dtype = np.int64 if worst * max(factors) * dim < 2**62 else object
    tables = []
    for box in boxes:
        per_dim = []
        for i in range(dim):
            gaps = np.array([box.coordinate_gap(i, v) for v in values], dtype=dtype)
            per_dim.append(gaps * factors[i])
        tables.append(per_dim)
    return tables


def _distance_grid(per_dim: list[np.ndarray], metric: Metric, dim: int) -> np.ndarray:
    # every axis has the full value range, so the chain of broadcasting
    # ops below always ends at the full dim-dimensional grid
    shaped = [
        arr.reshape((1,) * i + (-1,) + (1,) * (dim - i - 1)) for i, arr in enumerate(per_dim)
    ]
    grid = shaped[0]
    for arr in shaped[1:]:
        grid = np.maximum(grid, arr) if metric.kind == "dinf" else grid + arr
    return grid


def check_excision(
    cover: Sequence,
    subset: Sequence[int],
    radius,
    s_radius,
    metric: Metric,
    box: int,
) -> ExcisionResult:
    """Brute-force test of one excision inclusion on a lattice box.

    Enumerates every lattice point x with coordinates in
    [-(box - s_radius), box - s_radius] and verifies: if x lies within
    ``radius`` of every set indexed by ``subset``, then x lies within
    ``s_radius`` of their intersection.  Distances are computed against
    the untruncated sets in closed per-coordinate form, so the box only
    bounds the enumeration, never the geometry.  The first violating
    point (lexicographically) is returned as witness.
    """
    if not subset:
        raise ValueError("subset of cover indices must be nonempty")
    boxes = [as_box(cover[j]) for j in subset]
    dim = boxes[0].dim
    for b in boxes:
        if b.dim != dim:
            raise DimensionMismatch("cover sets of different dimensions")
    radius = Fraction(radius)
    s_radius = Fraction(s_radius)
    if radius <= 0 or s_radius <= 0:
        raise ValueError("radii must be positive")
    if Fraction(box) <= s_radius + radius:
        raise BoxTooSmall("need box > S + R to keep the enumeration honest")
    inner = floor(Fraction(box) - s_radius)
    values = list(range(-inner, inner + 1))

    inter = boxes[0]
    for b in boxes[1:]:
        inter = inter.intersect(b)
    if metric.kind == "weighted" and len(metric.weights) != dim:
        raise DimensionMismatch("weight count does not match dimension")
    denoms = [w.denominator for w in metric.weights] if metric.kind == "weighted" else [1]
    scale = lcm(*denoms, radius.denominator, s_radius.denominator)
    tables = _scaled_tables(list(boxes) + [inter], values, metric, dim, scale)
    r_cut = int(radius * scale)
    s_cut = int(s_radius * scale)

    in_all_r = None
    for per_dim in tables[:-1]:
        mask = _distance_grid(per_dim, metric, dim) <= r_cut
        in_all_r = mask if in_all_r is None else (in_all_r & mask)
    if inter.is_empty:
        in_s = np.zeros_like(in_all_r)
    else:
        in_s = _distance_grid(tables[-1], metric, dim) <= s_cut
    violations = in_all_r & ~in_s
    points = len(values) ** dim
    if not violations.any():
        return ExcisionResult(True, None, points)
    idx = np.argwhere(violations)[0]
    witness = tuple(values[int(k)] for k in idx)
    return ExcisionResult(False, witness, points)


def check_cover_excision(
    cover: Sequence,
    radius,
    metric: Metric,
    box: int,
    s_radius=None,
    s_for_size=None,
) -> dict[tuple[int, ...], ExcisionResult]:
    """Run check_excision for every nonempty subset of the cover.

    ``s_for_size`` may map |J| to an S value; otherwise ``s_radius`` is
    used for all subsets (defaulting to the radius itself).
    """
    results: dict[tuple[int, ...], ExcisionResult] = {}
    n = len(cover)
    for size in range(1, n + 1):
        s_val = s_for_size(size) if s_for_size else (s_radius if s_radius is not None else radius)
        for subset in combinations(range(n), size):
            results[subset] = check_excision(cover, subset, radius, s_val, metric, box)
    return results


def disjoint_rays() -> list[LatticeBox]:
    """The classic non-example: two disjoint rays on Z cannot be excisive."""
    return [LatticeBox(((None, -5),)), LatticeBox(((5, None),))]
