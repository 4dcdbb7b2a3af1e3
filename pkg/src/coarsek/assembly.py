"""First-page builders, target assembly, and truncation sweeps.

Two input shapes produce a first page: a chain of ideals (cell (p, q) is
the K-theory of the p-th subquotient in degree p+q) and a Mayer-Vietoris
decomposition (cell (p, q) is the direct sum over all (p+1)-fold index
sets J of the K-theory of the J-fold intersection).

Differentials on the first page default to zero and that default is
marked loudly in every report: the engine never fabricates maps.  User
d1 matrices act on the concatenated summand generators, in the recorded
lexicographic-on-sorted-J order, and are induced onto the canonical cell
groups from there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping, Sequence

from .abelian import FgAbGroup, IncompatibleShapes, IntMatrix
from .pages import (
    Grading,
    Page,
    SpectralRun,
    SubquotientCell,
    _induce_hom,
    full_cell,
    run_to_infinity,
    subquotient,
)


class AssemblyError(Exception):
    pass


class MissingCell(AssemblyError):
    pass


class MissingIntersection(AssemblyError):
    pass


class CapTooSmall(AssemblyError):
    pass


# ---------------------------------------------------------------------------
# input shapes


@dataclass(frozen=True)
class IdealChainInput:
    """K-data of the successive subquotients of a chain of ideals.

    ``groups[(p, s)]`` is the degree-s K-group of the p-th subquotient,
    for 0 <= p <= length and s modulo the grading period.  Cells the user
    left out raise MissingCell unless ``default_zero`` is set.
    """

    length: int
    grading: Grading = Grading(2)
    groups: Mapping[tuple[int, int], FgAbGroup] = field(default_factory=dict)
    d1: Mapping[tuple[int, int], IntMatrix] | None = None
    default_zero: bool = False

    def group_at(self, p: int, s: int) -> FgAbGroup:
        g = self.groups.get((p, s % self.grading.period))
        if g is None:
            if self.default_zero:
                return FgAbGroup.zero()
            raise MissingCell(f"no K-group declared at (p={p}, s={s % self.grading.period})")
        return g


@dataclass(frozen=True)
class MvInput:
    """K-data of the finite intersections of a decomposition into ideals.

    ``intersections`` maps a sorted label tuple J to its graded K-groups
    {q mod period: group}; ``rule`` may generate entries for index sets
    not present in the mapping (cover generators use this).  ``cap`` caps
    the column index p, so index sets up to size cap+1 are consulted; for
    a finite family the natural cap is len(labels) - 1.

    ``mode`` is "exact" when every K-group beyond the caps is known to be
    zero, otherwise "truncated"; truncated runs carry ``truncated_at``
    into every report.
    """

    labels: tuple
    cap: int
    intersections: Mapping[tuple, Mapping[int, FgAbGroup]] = field(default_factory=dict)
    rule: Callable[[tuple], Mapping[int, FgAbGroup]] | None = None
    d1: Mapping[tuple[int, int], IntMatrix] | None = None
    grading: Grading = Grading(2)
    mode: str = "exact"
    truncated_at: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "truncated"):
            raise ValueError("mode must be 'exact' or 'truncated'")
        if not (0 <= self.cap <= max(len(self.labels) - 1, 0)):
            raise ValueError("cap must lie in 0..len(labels)-1")

    def graded_for(self, j: tuple) -> Mapping[int, FgAbGroup]:
        key = tuple(sorted(j))
        if key in self.intersections:
            return self.intersections[key]
        if self.rule is not None:
            return self.rule(key)
        raise MissingIntersection(f"no K-data for intersection J={list(key)}")


# ---------------------------------------------------------------------------
# first-page builders


def build_ideal_chain_e1(inp: IdealChainInput) -> Page:
    """Cell (p, q) carries the degree-(p+q) K-group of the p-th subquotient."""
    per = inp.grading.period
    groups: dict[tuple[int, int], FgAbGroup] = {}
    for p in range(inp.length + 1):
        for q in range(per):
            groups[(p, q)] = inp.group_at(p, p + q)
    return Page.from_groups(
        inp.length,
        inp.grading,
        groups,
        d1=inp.d1,
        d1_defaulted=inp.d1 is None,
    )


def _concatenated_cell(parts: Sequence[FgAbGroup]) -> SubquotientCell:
    """First-page cell for a direct sum, keeping summand generator blocks."""
    finite = [g for g in parts if not g.is_zero]
    if any(g.is_countable for g in finite):
        total = FgAbGroup.zero().direct_sum(*finite)
        return full_cell(total)
    m = sum(g.gen_count for g in finite)
    rel_cols: list[list[int]] = []
    offset = 0
    for g in finite:
        for i, d in enumerate(g.torsion):
            col = [0] * m
            col[offset + g.free_rank + i] = d
            rel_cols.append(col)
        offset += g.gen_count
    total = FgAbGroup.zero().direct_sum(*finite)
    return subquotient(total, IntMatrix.identity(m), IntMatrix.from_columns(rel_cols, m))


def build_mv_e1(inp: MvInput) -> Page:
    """Direct sums of intersection K-groups over |J| = p + 1, column by column.

    Summands are ordered lexicographically on the sorted index sets and the
    order is recorded on the page, so user d1 matrices (acting on the
    concatenated summand generators) are unambiguous.
    """
    per = inp.grading.period
    ordered_labels = sorted(inp.labels)
    cells: dict[tuple[int, int], SubquotientCell] = {}
    groups_seen: dict[tuple[int, int], FgAbGroup] = {}
    concat_dims: dict[tuple[int, int], int] = {}
    summands: dict[tuple[int, int], tuple] = {}
    for p in range(inp.cap + 1):
        index_sets = list(combinations(ordered_labels, p + 1))
        graded = [inp.graded_for(j) for j in index_sets]
        for q in range(per):
            parts = [g.get(q, FgAbGroup.zero()) for g in graded]
            cell = _concatenated_cell(parts)
            groups_seen[(p, q)] = cell.group
            concat_dims[(p, q)] = (
                0 if cell.cycles is None else cell.cycles.rows
            )
            summands[(p, q)] = tuple(index_sets)
            if not cell.group.is_zero:
                cells[(p, q)] = cell
    if inp.mode == "exact" and inp.cap < len(inp.labels) - 1:
        for q in range(per):
            if not groups_seen[(inp.cap, q)].is_zero:
                raise CapTooSmall(
                    f"nonzero group at the cap boundary p={inp.cap}; "
                    "raise the cap or mark the run as truncated"
                )
    page = Page(
        1,
        inp.cap,
        inp.grading,
        cells,
        {},
        d1_defaulted=inp.d1 is None,
        truncated_at=inp.truncated_at,
        summands=summands,
    )
    if inp.d1:
        for (p, q), matrix in inp.d1.items():
            key = (p, q % per)
            tkey = page.target_key(*key)
            if key not in concat_dims:
                raise IncompatibleShapes(f"d1 at {key} lies outside the support")
            if matrix.cols != concat_dims[key] or matrix.rows != concat_dims.get(tkey, 0):
                raise IncompatibleShapes(
                    f"d1 at {key}: expected {concat_dims.get(tkey, 0)}x{concat_dims[key]} "
                    f"on concatenated summand generators, got {matrix.rows}x{matrix.cols}"
                )
            src = cells.get(key)
            tgt = cells.get(tkey)
            if src is None or tgt is None:
                continue  # a map into or out of the zero group is zero
            page.diffs[key] = _induce_hom(matrix, src, tgt, key)
    return page


# ---------------------------------------------------------------------------
# assembling the convergence target


@dataclass(frozen=True)
class DegreeReport:
    """Diagonal pieces and, when extensions split, the assembled group."""

    degree: int
    pieces: tuple[tuple[int, FgAbGroup], ...]
    assembled: FgAbGroup | None
    ambiguous: bool

    @property
    def nonzero_pieces(self) -> tuple[tuple[int, FgAbGroup], ...]:
        return tuple((p, g) for p, g in self.pieces if not g.is_zero)


@dataclass(frozen=True)
class FiltrationReport:
    period: int
    cap: int
    stabilized_at: int
    d1_assumed_zero: bool
    truncated_at: int | None
    degrees: tuple[DegreeReport, ...]
    # first-page summand order per cell, when the page was a direct-sum
    # build; this is what makes user d1 matrices unambiguous
    summands: Mapping[tuple[int, int], tuple] | None = None

    def degree(self, s: int) -> DegreeReport:
        return self.degrees[s % self.period]

    @property
    def any_ambiguous(self) -> bool:
        return any(d.ambiguous for d in self.degrees)


def assemble_target(run: SpectralRun) -> FiltrationReport:
    """Stack the diagonal limit pieces bottom-up into each target degree.

    Each step is an extension of the piece at filtration level p by the
    group assembled so far; the extension is split only when the new piece
    is free, so anything else yields an AmbiguousExtension marker with the
    full piece list left to the reader.
    """
    per = run.grading.period
    degrees = []
    for s in range(per):
        pieces = tuple((p, run.e_infinity_at(p, s - p)) for p in range(run.cap + 1))
        assembled: FgAbGroup | None = FgAbGroup.zero()
        ambiguous = False
        for _, piece in pieces:
            if piece.is_zero:
                continue
            if assembled.is_zero:
                assembled = piece
            elif piece.is_free:
                assembled = assembled.direct_sum(piece)
            else:
                assembled = None
                ambiguous = True
                break
        degrees.append(DegreeReport(s, pieces, assembled, ambiguous))
    first = run.first_page
    return FiltrationReport(
        period=per,
        cap=run.cap,
        stabilized_at=run.stabilized_at,
        d1_assumed_zero=first.d1_defaulted,
        truncated_at=first.truncated_at,
        degrees=tuple(degrees),
        summands=first.summands,
    )


def run_mv(inp: MvInput) -> tuple[SpectralRun, FiltrationReport]:
    run = run_to_infinity(build_mv_e1(inp))
    return run, assemble_target(run)


# ---------------------------------------------------------------------------
# truncation sweeps: direct-limit semantics at desk scale


@dataclass(frozen=True)
class SweepReport:
    """Per-cap snapshots plus the caps at which answers stop changing.

    ``cell_stable_at[(p, q)]`` is the smallest cap from which the first-page
    cell stays the same for every later cap in the sweep (None if it never
    settles within the sweep); ``assembled_stable_at`` does the same per
    target degree.
    """

    caps: tuple[int, ...]
    e1_cells: Mapping[int, Mapping[tuple[int, int], FgAbGroup]]
    reports: Mapping[int, FiltrationReport]
    cell_stable_at: Mapping[tuple[int, int], int | None]
    assembled_stable_at: Mapping[int, int | None]


def _stable_from(values: Sequence, caps: Sequence[int]) -> int | None:
    """Smallest cap whose value persists through the end of the sweep.

    None when the value was still changing at the final cap (a single-cap
    sweep is vacuously stable at its one cap).
    """
    idx = len(values) - 1
    for i in range(len(values) - 2, -1, -1):
        if values[i] != values[-1]:
            break
        idx = i
    if idx == len(values) - 1 and len(values) > 1:
        return None
    return caps[idx]


def truncation_sweep(family: Callable[[int], MvInput], caps: Sequence[int]) -> SweepReport:
    """Run the pipeline at each cap and report where answers settle."""
    caps = tuple(sorted(caps))
    e1_cells: dict[int, dict[tuple[int, int], FgAbGroup]] = {}
    reports: dict[int, FiltrationReport] = {}
    period = None
    for cap in caps:
        inp = family(cap)
        page = build_mv_e1(inp)
        period = page.period
        cells = {key: page.cell_group(*key) for key in page.support()}
        run = run_to_infinity(page)
        e1_cells[cap] = cells
        reports[cap] = assemble_target(run)
    all_keys = sorted({k for cells in e1_cells.values() for k in cells})
    cell_stable: dict[tuple[int, int], int | None] = {}
    for key in all_keys:
        values = [e1_cells[c].get(key, FgAbGroup.zero()) for c in caps]
        cell_stable[key] = _stable_from(values, caps)
    assembled_stable: dict[int, int | None] = {}
    for s in range(period or 2):
        values = [
            (reports[c].degree(s).assembled, reports[c].degree(s).ambiguous) for c in caps
        ]
        assembled_stable[s] = _stable_from(values, caps)
    return SweepReport(caps, e1_cells, reports, cell_stable, assembled_stable)
