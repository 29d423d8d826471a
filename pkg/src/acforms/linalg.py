"""Exact affine linear algebra over the rationals.

Systems are solved by plain fraction Gauss-Jordan elimination.  The pivot
rule is deterministic: columns are scanned left to right and the first row
with a nonzero entry is used, so repeated runs produce identical solution
sets and certificates.  Infeasibility is returned as a Farkas certificate:
a rational row combination annihilating the matrix but not the right-hand
side, extracted from the tracked row operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .prng import Stream


@dataclass
class AffineSystem:
    """matrix . v = rhs with labelled columns (and optionally rows)."""

    matrix: list[list[Fraction]]
    rhs: list[Fraction]
    column_labels: list[str]
    row_labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.rhs) != len(self.matrix):
            raise ValueError(f"{len(self.matrix)} rows but {len(self.rhs)} right-hand entries")
        for row in self.matrix:
            if len(row) != len(self.column_labels):
                raise ValueError(f"row width {len(row)} != {len(self.column_labels)} labels")
        if self.row_labels and len(self.row_labels) != len(self.matrix):
            raise ValueError("row label count mismatch")

    @property
    def num_rows(self) -> int:
        return len(self.matrix)

    @property
    def num_cols(self) -> int:
        return len(self.column_labels)

    def column_index(self, label: str) -> int:
        try:
            return self.column_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown column label {label!r}") from None


@dataclass
class SolutionSet:
    """Affine solution set: particular point plus a nullspace basis.

    The basis vectors are linearly independent, so the affine dimension is
    their count.
    """

    column_labels: list[str]
    particular: list[Fraction]
    nullspace_basis: list[list[Fraction]]

    @property
    def dimension(self) -> int:
        return len(self.nullspace_basis)

    def point(self, weights: Sequence[Fraction]) -> list[Fraction]:
        if len(weights) != len(self.nullspace_basis):
            raise ValueError("one weight per basis vector required")
        out = list(self.particular)
        for w, vec in zip(weights, self.nullspace_basis):
            if w == 0:
                continue
            for i, v in enumerate(vec):
                out[i] += w * v
        return out


@dataclass
class FarkasCertificate:
    """Row combination u with u.matrix = 0 and u.rhs != 0."""

    row_combination: list[Fraction]


def solve_affine(system: AffineSystem) -> SolutionSet | FarkasCertificate:
    """Exact Gauss-Jordan with row-operation tracking.

    Returns the full solution set when consistent, otherwise the Farkas row
    combination exposing the contradiction.
    """
    m, n = system.num_rows, system.num_cols
    work = [list(row) + [b] for row, b in zip(system.matrix, system.rhs)]
    # transform[i] records how work[i] was produced from the original rows
    transform = [[Fraction(i == j) for j in range(m)] for i in range(m)]

    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        transform[r], transform[pivot] = transform[pivot], transform[r]
        pv = work[r][c]
        if pv != 1:
            inv = Fraction(1) / pv
            work[r] = [v * inv for v in work[r]]
            transform[r] = [v * inv for v in transform[r]]
        for i in range(m):
            if i == r or work[i][c] == 0:
                continue
            f = work[i][c]
            work[i] = [a - f * b for a, b in zip(work[i], work[r])]
            transform[i] = [a - f * b for a, b in zip(transform[i], transform[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break

    for i in range(r, m):
        if work[i][n] != 0:
            return FarkasCertificate(list(transform[i]))

    particular = [Fraction(0)] * n
    for idx, c in enumerate(pivot_cols):
        particular[c] = work[idx][n]

    free_cols = [c for c in range(n) if c not in set(pivot_cols)]
    basis: list[list[Fraction]] = []
    for fcol in free_cols:
        vec = [Fraction(0)] * n
        vec[fcol] = Fraction(1)
        for idx, c in enumerate(pivot_cols):
            vec[c] = -work[idx][fcol]
        basis.append(vec)
    return SolutionSet(list(system.column_labels), particular, basis)


def verify_farkas(system: AffineSystem, certificate: FarkasCertificate) -> bool:
    """Independent certificate check: plain dot products, no elimination."""
    u = certificate.row_combination
    if len(u) != system.num_rows:
        raise ValueError(f"combination length {len(u)} != {system.num_rows} rows")
    for c in range(system.num_cols):
        acc = Fraction(0)
        for i, ui in enumerate(u):
            if ui != 0:
                acc += ui * system.matrix[i][c]
        if acc != 0:
            return False
    acc = Fraction(0)
    for i, ui in enumerate(u):
        if ui != 0:
            acc += ui * system.rhs[i]
    return acc != 0


def residual(system: AffineSystem, point: Sequence[Fraction]) -> list[Fraction]:
    """matrix . point - rhs, for exactness checks."""
    if len(point) != system.num_cols:
        raise ValueError("point length mismatch")
    out = []
    for row, b in zip(system.matrix, system.rhs):
        acc = Fraction(0)
        for a, v in zip(row, point):
            if a != 0 and v != 0:
                acc += a * v
        out.append(acc - b)
    return out


def sample_generic(solution: SolutionSet, seed: int, bound: int = 9) -> list[Fraction]:
    """Deterministic pseudo-random point of the solution set.

    Basis weights are drawn from the documented SplitMix64 stream, uniformly
    in [-bound, bound], one draw per basis vector in order.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    stream = Stream(seed)
    weights = [Fraction(stream.int_between(-bound, bound))
               for _ in solution.nullspace_basis]
    return solution.point(weights)


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank by forward elimination on a working copy."""
    work = [list(r) for r in rows if any(v != 0 for v in r)]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pv = work[rank][c]
        for i in range(rank + 1, len(work)):
            if work[i][c] != 0:
                f = work[i][c] / pv
                work[i] = [a - f * b for a, b in zip(work[i], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def independent_subset(vectors: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Greedy maximal independent subfamily, preserving input order."""
    kept: list[list[Fraction]] = []
    for vec in vectors:
        if any(v != 0 for v in vec) and matrix_rank(kept + [list(vec)]) > len(kept):
            kept.append(list(vec))
    return kept


def project_solution_set(solution: SolutionSet,
                         columns: Sequence[str]) -> tuple[int, list[Fraction], list[list[Fraction]]]:
    """Project the affine set onto a coordinate subset.

    Returns (affine dimension, base point, independent direction vectors),
    all expressed in the selected coordinates in the order given.
    """
    idx = []
    for label in columns:
        try:
            idx.append(solution.column_labels.index(label))
        except ValueError:
            raise KeyError(f"unknown column label {label!r}") from None
    base = [solution.particular[i] for i in idx]
    restricted = [[vec[i] for i in idx] for vec in solution.nullspace_basis]
    dirs = independent_subset(restricted)
    return len(dirs), base, dirs


def functional_range(solution: SolutionSet,
                     weights: dict[str, Fraction]) -> tuple[bool, Fraction]:
    """Range of a linear functional sum(w_label * v_label) over the set.

    Returns (forced, value): forced means the functional is constant on the
    solution set, in which case value is that constant; otherwise value is
    the functional at the particular point.
    """
    idx = {solution.column_labels.index(lbl): w for lbl, w in weights.items()}
    at_particular = sum((w * solution.particular[i] for i, w in idx.items()), Fraction(0))
    for vec in solution.nullspace_basis:
        if sum((w * vec[i] for i, w in idx.items()), Fraction(0)) != 0:
            return False, at_particular
    return True, at_particular
