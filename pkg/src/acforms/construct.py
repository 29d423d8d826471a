"""Order-by-order construction of almost closed 1-forms in two variables.

A pair of series (A, B), both starting in degree d, is *almost closed* for
multipliers (C, D) when A_y - B_x = C*A + D*B.  The leading pair is taken
from a potential-like seed polynomial P of degree d+1 (A_d = P_x, B_d = P_y,
so the degree d-1 component of A_y - B_x vanishes).  Each later order k
solves the single graded constraint

    A_{k,y} - B_{k,x} = E_{k-1},   E_{k-1} = (C*A + D*B)_{k-1},

by choosing a free degree k-1 polynomial F and integrating: A_k is the
y-antiderivative of F plus a free multiple of x^k, B_k the x-antiderivative
of F - E_{k-1} plus a free multiple of y^k.  This parameterises the entire
affine space of solutions at each order.

In `bounded` mode the free data is rescaled so the norm recursion
||F_{k-1}|| < 4*CC*AA_{k-1} holds (CC the multiplier magnitude, AA the
running coefficient norm), which gives a geometric growth bound and hence a
positive radius of convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .poly import HomogPoly, MismatchError, OneForm, TruncSeries, monomials
from .prng import Stream

MODES = ("generic", "bounded")


class HypothesisError(ValueError):
    """Inputs violate the hypothesis of the norm/radius bound."""


@dataclass(frozen=True)
class Instance:
    """Reproducible construction request.

    N is the truncation order of the output: components of degree d..N-1
    are produced.  In bounded mode C and D must be affine linear (no
    components of degree two or higher).  `b_vanish_from`, when set, forces
    B_k = 0 for k >= that degree by spending the order-k freedom on F = E
    and zero top terms.
    """

    d: int
    N: int
    C: TruncSeries
    D: TruncSeries
    seed: int
    coeff_bound: int = 10
    mode: str = "generic"
    b_vanish_from: int | None = None

    def __post_init__(self) -> None:
        if self.d < 2:
            raise MismatchError(f"leading degree must be >= 2, got {self.d}")
        if self.N <= self.d:
            raise MismatchError(f"truncation order {self.N} must exceed leading degree {self.d}")
        if self.C.num_vars != 2 or self.D.num_vars != 2:
            raise MismatchError("multipliers must be series in two variables")
        needed = self.N - 1 - self.d
        for name, s in (("C", self.C), ("D", self.D)):
            if s.trunc_order < needed:
                raise MismatchError(
                    f"{name} is certified below degree {s.trunc_order} but the "
                    f"construction consumes its components below degree {needed}")
        if self.coeff_bound < 1:
            raise MismatchError("coefficient bound must be positive")
        if self.mode not in MODES:
            raise MismatchError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "bounded":
            _require_affine_linear(self.C, "C")
            _require_affine_linear(self.D, "D")


def _require_affine_linear(s: TruncSeries, name: str) -> None:
    for k in s.parts:
        if k >= 2:
            raise HypothesisError(
                f"{name} has a nonzero component in degree {k}; the growth bound "
                "requires multipliers with constant and linear parts only")


@dataclass
class ConstructionState:
    """Mutable scratch state while an instance is being built.

    Never shared between builds; `build` returns it alongside the finished
    form for audit (free choices and the norm log).
    """

    instance: Instance
    a_parts: dict[int, HomogPoly] = field(default_factory=dict)
    b_parts: dict[int, HomogPoly] = field(default_factory=dict)
    free_choices: dict[str, object] = field(default_factory=dict)
    norm_log: dict[int, dict[str, Fraction]] = field(default_factory=dict)

    def highest_order(self) -> int:
        return max(self.a_parts) if self.a_parts else -1

    def a_component(self, k: int) -> HomogPoly:
        return self.a_parts.get(k, HomogPoly.zero(2, k))

    def b_component(self, k: int) -> HomogPoly:
        return self.b_parts.get(k, HomogPoly.zero(2, k))

    def running_norm(self, k: int) -> Fraction:
        """max of the component norms at degrees k and k-1."""
        return max(self.a_component(k).norm(), self.b_component(k).norm(),
                   self.a_component(k - 1).norm(), self.b_component(k - 1).norm())


def init_leading(d: int, seed_poly: HomogPoly) -> tuple[HomogPoly, HomogPoly]:
    """Leading pair (A_d, B_d) = (P_x, P_y) from a degree d+1 seed P."""
    if d < 1:
        raise MismatchError(f"lowest degree must be >= 1, got {d}")
    if seed_poly.num_vars != 2:
        raise MismatchError("seed polynomial must use two variables")
    if seed_poly.degree != d + 1:
        raise MismatchError(f"seed polynomial has degree {seed_poly.degree}, expected {d + 1}")
    return seed_poly.partial(0), seed_poly.partial(1)


def defect_component(state: ConstructionState, k: int) -> HomogPoly:
    """The degree k-1 component of C*A + D*B from the data built so far."""
    inst = state.instance
    out = HomogPoly.zero(2, k - 1)
    for i in range(0, k - inst.d):
        ci = inst.C.component(i)
        di = inst.D.component(i)
        j = k - 1 - i
        if not ci.is_zero:
            out = out.add(ci.mul(state.a_component(j)))
        if not di.is_zero:
            out = out.add(di.mul(state.b_component(j)))
    return out


def extend_order(state: ConstructionState, k: int, free_poly: HomogPoly,
                 top_a: Fraction, top_b: Fraction) -> tuple[HomogPoly, HomogPoly]:
    """Append the order k pair determined by the free data.

    free_poly is the chosen value of A_{k,y}; the pair returned satisfies
    A_{k,y} - B_{k,x} = E_{k-1} exactly (asserted).
    """
    inst = state.instance
    if state.highest_order() != k - 1:
        raise MismatchError(f"orders up to {state.highest_order()} present, cannot extend to {k}")
    if free_poly.num_vars != 2 or free_poly.degree != k - 1:
        raise MismatchError(f"free polynomial must be homogeneous of degree {k - 1}")
    defect = defect_component(state, k)
    a_k = free_poly.antiderivative(1)
    if top_a != 0:
        a_k = a_k.add(HomogPoly(2, k, {(k, 0): Fraction(top_a)}))
    b_k = free_poly.sub(defect).antiderivative(0)
    if top_b != 0:
        b_k = b_k.add(HomogPoly(2, k, {(0, k): Fraction(top_b)}))
    check = a_k.partial(1).sub(b_k.partial(0)).sub(defect)
    if not check.is_zero:
        raise AssertionError(f"order {k} residual nonzero: {check}")
    if not a_k.is_zero:
        state.a_parts[k] = a_k
    if not b_k.is_zero:
        state.b_parts[k] = b_k
    state.free_choices[f"order_{k}"] = {"F": free_poly, "top_a": Fraction(top_a),
                                        "top_b": Fraction(top_b)}
    state.norm_log[k] = {"A": a_k.norm(), "B": b_k.norm(),
                         "running": state.running_norm(k)}
    return a_k, b_k


def _draw_homog(stream: Stream, degree: int, bound: int) -> HomogPoly:
    terms = {}
    for exp in monomials(2, degree):
        terms[exp] = Fraction(stream.int_between(-bound, bound))
    return HomogPoly.from_terms(2, degree, terms)


def multiplier_magnitude(C: TruncSeries, D: TruncSeries) -> Fraction:
    """max(|C_0|, |D_0|, 2*||C_1||, 2*||D_1||) for affine linear C, D."""
    for name, s in (("C", C), ("D", D)):
        if s.trunc_order < 2:
            raise HypothesisError(
                f"{name} must certify its constant and linear parts "
                f"(truncation order {s.trunc_order} < 2)")
    _require_affine_linear(C, "C")
    _require_affine_linear(D, "D")
    return max(C.component(0).norm(), D.component(0).norm(),
               2 * C.component(1).norm(), 2 * D.component(1).norm())


def convergence_bound(C: TruncSeries, D: TruncSeries) -> tuple[Fraction, Fraction, Fraction]:
    """(CC, growth ratio beta, radius lower bound 1/beta).

    Requires affine linear multipliers; coefficient growth in bounded mode is
    at most geometric with ratio beta = max(1, 8*CC), so the series converge
    on a disc of radius at least 1/beta.
    """
    cc = multiplier_magnitude(C, D)
    beta = max(Fraction(1), 8 * cc)
    return cc, beta, Fraction(1) / beta


def build(instance: Instance) -> tuple[OneForm, ConstructionState]:
    """Deterministic construction of an instance.

    Draw order (documented for reproducibility): seed polynomial coefficients
    in monomial order, then per order k the free polynomial coefficients
    followed by the two top coefficients.  Bounded mode rescales the free
    polynomial to ||F|| = 2*CC*AA < 4*CC*AA and zeroes the top terms.
    """
    inst = instance
    stream = Stream(inst.seed)
    state = ConstructionState(instance=inst)

    seed_poly = _draw_homog(stream, inst.d + 1, inst.coeff_bound)
    a_d, b_d = init_leading(inst.d, seed_poly)
    if not a_d.is_zero:
        state.a_parts[inst.d] = a_d
    if not b_d.is_zero:
        state.b_parts[inst.d] = b_d
    state.free_choices["seed_poly"] = seed_poly
    state.norm_log[inst.d] = {"A": a_d.norm(), "B": b_d.norm(),
                              "running": state.running_norm(inst.d)}

    cc = multiplier_magnitude(inst.C, inst.D) if inst.mode == "bounded" else None

    for k in range(inst.d + 1, inst.N):
        raw = _draw_homog(stream, k - 1, inst.coeff_bound)
        top_a = Fraction(stream.int_between(-inst.coeff_bound, inst.coeff_bound))
        top_b = Fraction(stream.int_between(-inst.coeff_bound, inst.coeff_bound))
        if inst.b_vanish_from is not None and k >= inst.b_vanish_from:
            # spend the order k freedom on making B_k vanish
            free = defect_component(state, k)
            extend_order(state, k, free, top_a, Fraction(0))
            continue
        if inst.mode == "bounded":
            target = 4 * cc * state.running_norm(k - 1)
            raw_norm = raw.norm()
            if target == 0 or raw_norm == 0:
                free = HomogPoly.zero(2, k - 1)
            else:
                free = raw.scale(target / (2 * raw_norm))
            extend_order(state, k, free, Fraction(0), Fraction(0))
            state.norm_log[k]["F"] = free.norm()
            state.norm_log[k]["bound"] = target
        else:
            extend_order(state, k, raw, top_a, top_b)

    a = TruncSeries(2, inst.N, dict(state.a_parts))
    b = TruncSeries(2, inst.N, dict(state.b_parts))
    return OneForm((a, b)), state


@dataclass(frozen=True)
class AlmostClosedReport:
    """Degreewise residual check of A_y - B_x = C*A + D*B."""

    ok: bool
    first_failure: int | None
    residuals: dict[int, HomogPoly]
    checked_below: int

    def failures(self) -> Iterator[int]:
        return (k for k in sorted(self.residuals) if not self.residuals[k].is_zero)


def verify_almost_closed(sigma: OneForm, C: TruncSeries, D: TruncSeries) -> AlmostClosedReport:
    """Exact residual per degree, from one below the lowest degree upward."""
    if sigma.num_vars != 2:
        raise MismatchError("almost closed verification handles two variables")
    a, b = sigma.components
    lhs = a.partial(1).sub(b.partial(0))
    rhs = C.mul(a).add(D.mul(b))
    res = lhs.sub(rhs)
    low = sigma.lowest_degree()
    start = max((low or 1) - 1, 0)
    residuals = {k: res.component(k) for k in range(start, res.trunc_order)}
    first = next((k for k in sorted(residuals) if not residuals[k].is_zero), None)
    return AlmostClosedReport(ok=first is None, first_failure=first,
                              residuals=residuals, checked_below=res.trunc_order)
