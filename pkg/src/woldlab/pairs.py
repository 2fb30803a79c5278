"""Commuting-pair analysis: the forward closure of the non-wandering core,
its iterated exhaustion, weak bi-shift classification, the four-part pair
decomposition, and the search for doubly-commuting reducing subspaces.

All pair subspaces are window bases with stabilization flags: the objects
they approximate are limits (intersections and closed spans over all powers)
and the flags say when the limit was actually reached.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg, wold
from .certificates import (
    Certificate,
    false_certificate,
    true_certificate,
    undecided_certificate,
)
from .config import DEFAULT_DEPTH, ORTHO_DROP_TOL, tolerance
from .core import (
    Closure,
    HVector,
    StructuredIsometry,
    Subspace,
    commutes,
    compose,
    doubly_commutes,
    lanes_reducing,
)
from .errors import PreconditionError


def _require_commuting(v1, v2, depth):
    cert = commutes(v1, v2, depth)
    if not cert.is_true:
        raise PreconditionError(
            "the operators do not commute", witness=cert.witness
        )


# -- forward closure of H0 ----------------------------------------------------


@dataclass(frozen=True)
class H0PlusResult:
    """Window basis of the closed span of V2^n H0, with certificates that it
    reduces both operators and that V1 acts unitarily on it."""

    subspace: Subspace
    certificate: Certificate
    v1_reducing: Certificate
    v2_reducing: Certificate
    v1_unitary_on: bool
    depth: int


def h0_plus(v1: StructuredIsometry, v2: StructuredIsometry, h0: Subspace,
            depth: int = DEFAULT_DEPTH, *, _checked: bool = False) -> H0PlusResult:
    """Span of V2^n H0 for n = 0..depth, certified V1/V2-reducing with V1
    unitary on it.  H0 must sit inside the wandering-span residual of V1."""
    _require_commuting(v1, v2, depth)
    if not _checked and h0.generators:
        wsd = wandering_residual_basis(v1, depth)
        for g in h0.generators:
            if _linalg.span_residual_norm(g, wsd) > 1e-6:
                raise PreconditionError(
                    "h0_plus input is not inside the wandering-span residual"
                )
    basis: list[HVector] = []
    stabilized = False
    vectors = list(h0.generators)
    for _ in range(depth + 1):
        grew = False
        for g in vectors:
            r = _linalg.orthogonal_residual(g, basis)
            if r.norm() >= ORTHO_DROP_TOL:
                basis.append(r.scaled(1.0 / r.norm()))
                grew = True
        if not grew:
            # V2(span) adds nothing, and the span is V2-invariant from here on
            stabilized = True
            break
        vectors = [v2.apply(g) for g in vectors]
    cert = (true_certificate(depth, exact=True) if stabilized
            else undecided_certificate(depth))
    v1_red = _window_reducing_certificate(v1, basis, depth)
    v2_red = _window_reducing_certificate(v2, basis, depth)
    unitary_on = all(
        v1.apply(v1.apply_adjoint(b)).approx_equals(b, 1e-8)
        and v1.apply_adjoint(v1.apply(b)).approx_equals(b, 1e-8)
        for b in basis
    )
    return H0PlusResult(
        Subspace(basis, Closure()), cert, v1_red, v2_red, unitary_on, depth
    )


def wandering_residual_basis(v1: StructuredIsometry, depth: int) -> list[HVector]:
    return list(wold.wandering_span_decompose(v1, depth).h0.generators)


def _window_reducing_certificate(op, basis, depth) -> Certificate:
    tol = max(tolerance(), 1e-9)
    margin = op.max_offset() + 1
    inner_depth = max(depth - margin, 1)
    for idx in op.window_indices(inner_depth):
        e = HVector([(idx, 1.0)])
        lhs = _linalg.project(op.apply(e), basis)
        rhs = op.apply(_linalg.project(e, basis))
        if (lhs - rhs).norm() > tol:
            return false_certificate(inner_depth, idx)
    return true_certificate(inner_depth, exact=False)


# -- iterated exhaustion -------------------------------------------------------


@dataclass(frozen=True)
class ExhaustResult:
    """Residual subspace on which the V1-wandering span is everything, plus
    the number of peeled layers.  Peels that are not aligned with whole
    finite lanes stop the iteration with an undecided certificate."""

    h1: Subspace
    iterations: int
    certificate: Certificate
    peeled_lanes: tuple[int, ...]


def _finite_lane_cover(op: StructuredIsometry, basis) -> set[int] | None:
    """Lane ids when the basis is exactly a union of whole finite lanes."""
    hit: dict[int, set[int]] = {}
    for g in basis:
        supp = g.support()
        if len(supp) != 1 or abs(abs(g.coefficient(supp[0])) - 1.0) > 1e-9:
            return None
        idx = supp[0]
        lane = op.lane(idx.lane)
        if not lane.is_finite:
            return None
        hit.setdefault(idx.lane, set()).add(idx.position)
    for lane_id, positions in hit.items():
        if positions != set(range(op.lane(lane_id).size)):
            return None
    return set(hit)


def exhaust_h0(v1: StructuredIsometry, v2: StructuredIsometry,
               max_iter: int = 8, depth: int = DEFAULT_DEPTH) -> ExhaustResult:
    """Repeat wandering-span decomposition + forward closure on shrinking
    complements until the closure is trivial."""
    _require_commuting(v1, v2, depth)
    current1, current2 = v1, v2
    peeled: list[int] = []
    iterations = 0
    for _ in range(max_iter):
        wsd = wold.wandering_span_decompose(current1, depth)
        if wsd.h0.dim == 0:
            if wsd.certificate.is_undecided:
                return ExhaustResult(
                    _whole_window_subspace(current1, depth),
                    iterations, undecided_certificate(depth), tuple(peeled),
                )
            return ExhaustResult(
                _whole_window_subspace(current1, depth),
                iterations, true_certificate(depth, exact=True), tuple(peeled),
            )
        plus = h0_plus(current1, current2, wsd.h0, depth, _checked=True)
        if plus.certificate.is_undecided:
            return ExhaustResult(
                _whole_window_subspace(current1, depth),
                iterations, undecided_certificate(depth), tuple(peeled),
            )
        lanes = _finite_lane_cover(current1, plus.subspace.generators)
        if lanes is None:
            # the peel is not a union of whole finite lanes, so the
            # complement is not structurally representable
            return ExhaustResult(
                _whole_window_subspace(current1, depth),
                iterations, undecided_certificate(depth), tuple(peeled),
            )
        keep = [l.lane_id for l in current1.lanes if l.lane_id not in lanes]
        if not keep:
            return ExhaustResult(
                Subspace([], Closure()), iterations + 1,
                true_certificate(depth, exact=True), tuple(peeled) + tuple(sorted(lanes)),
            )
        current1 = current1.restricted_to_lanes(keep)
        current2 = current2.restricted_to_lanes(keep)
        peeled.extend(sorted(lanes))
        iterations += 1
    return ExhaustResult(
        _whole_window_subspace(current1, depth),
        iterations, undecided_certificate(depth), tuple(peeled),
    )


def _whole_window_subspace(op, depth) -> Subspace:
    basis = [HVector([(idx, 1.0)]) for idx in op.window_indices(depth)]
    return Subspace(basis, Closure())


# -- weak bi-shift classification ----------------------------------------------


def _preimage_under(op: StructuredIsometry, basis) -> list[HVector]:
    """Orthonormal basis of {x : op(x) ∈ span(basis)}.

    Solves c = op op* c on the span (membership in the range) and pulls the
    solutions back; exact small linear algebra since the spans are the
    finite-dimensional adjoint-kernel iterates.
    """
    if not basis:
        return []
    k = len(basis)
    images = [op.apply(op.apply_adjoint(b)) for b in basis]
    m = np.zeros((k, k), dtype=complex)
    for j in range(k):
        for i in range(k):
            m[i, j] = images[j].inner(basis[i])
    _, s, vh = np.linalg.svd(m - np.eye(k))
    rank = int(np.sum(s > 1e-8))
    combos = [vh[r].conj() for r in range(rank, k)]
    out = []
    for coeffs in combos:
        c = HVector.zero()
        for a, b in zip(coeffs, basis):
            c = c + b.scaled(a)
        out.append(op.apply_adjoint(c))
    return _linalg.mgs(out)


def _joint_shift_core(inner_op: StructuredIsometry,
                      outer_op: StructuredIsometry) -> tuple[list[HVector], int]:
    """Basis of the intersection of ker(outer* inner^i) over all i >= 0.

    Uses the fixed-point iteration K <- ker(outer*) ∩ inner^{-1}(K), which is
    decreasing on finite-dimensional spaces and therefore stabilizes exactly
    within defect+1 steps.
    """
    kernel = wold.kernel_of_adjoint(outer_op).generators
    k = list(kernel)
    steps = 0
    while True:
        steps += 1
        pre = _preimage_under(inner_op, k)
        new = _linalg.intersect_spans(list(kernel), pre) if pre else []
        if len(new) == len(k):
            return new, steps
        k = new
        if not k:
            return [], steps


def weak_bishift_classify(v1: StructuredIsometry, v2: StructuredIsometry,
                          depth: int = DEFAULT_DEPTH) -> Certificate:
    """True iff V1 restricted to ∩ker(V2* V1^i), V2 restricted to
    ∩ker(V1* V2^i), and the product V1 V2 are all unilateral shifts.

    The two intersection spaces are finite dimensional here (the structured
    form has finite defect), so their restrictions are unitary whenever they
    are nonzero; being a shift then means being {0}.  The product is tested
    through its Wold decomposition.
    """
    _require_commuting(v1, v2, depth)
    k2, _ = _joint_shift_core(v1, v2)
    if k2:
        lead = k2[0].support()[0]
        return false_certificate(
            depth, ("restriction_unitary", "v1", lead)
        )
    k1, _ = _joint_shift_core(v2, v1)
    if k1:
        lead = k1[0].support()[0]
        return false_certificate(
            depth, ("restriction_unitary", "v2", lead)
        )
    product = compose(v1, v2)
    wres = wold.wold_decompose(product, depth)
    if wres.unitary_window_basis:
        lead = wres.unitary_window_basis[0].support()[0]
        return false_certificate(depth, ("product_unitary_part", lead))
    if not wres.exact:
        return undecided_certificate(depth)
    return true_certificate(depth, exact=True)


# -- pair decomposition ----------------------------------------------------------


@dataclass(frozen=True)
class PairPart:
    basis: tuple[HVector, ...]
    certificate: Certificate

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class PairReport:
    """Window bases of the four parts: both-unitary, V1-unitary/V2-shift,
    V1-shift/V2-unitary, and the wandering-span remainder, together with
    wandering generator sets covering the remainder."""

    uu: PairPart
    us: PairPart
    su: PairPart
    ws: PairPart
    depth: int
    wandering_generators: dict[str, tuple[HVector, ...]]
    exact: bool


def _shift_window_basis(op, wres, depth):
    """Basis of H_s ∩ window: window combinations fixed by the orbit-sum
    projection onto the shift part."""
    window = op.window_indices(depth)
    orbit_vectors = [
        vec
        for o in wold.shift_orbit_vectors(op, wres.shift_wandering_basis, depth)
        for vec in o.vectors
    ]
    residuals = []
    for idx in window:
        e = HVector([(idx, 1.0)])
        r = e
        for ov in orbit_vectors:
            r = r - ov.scaled(e.inner(ov))
        residuals.append(r)
    combos = _linalg.nullspace_combinations(residuals)
    vectors = []
    for coeffs in combos:
        x = HVector.zero()
        for a, idx in zip(coeffs, window):
            x = x + HVector([(idx, a)])
        vectors.append(x)
    return _linalg.mgs(vectors)


def pair_decompose(v1: StructuredIsometry, v2: StructuredIsometry,
                   depth: int = DEFAULT_DEPTH) -> PairReport:
    _require_commuting(v1, v2, depth)
    w1 = wold.wold_decompose(v1, depth)
    w2 = wold.wold_decompose(v2, depth)
    u1 = list(w1.unitary_window_basis)
    u2 = list(w2.unitary_window_basis)
    s1 = _shift_window_basis(v1, w1, depth)
    s2 = _shift_window_basis(v2, w2, depth)

    uu = _linalg.intersect_spans(u1, u2)
    us = _linalg.intersect_spans(u1, s2)
    su = _linalg.intersect_spans(s1, u2)
    window = [HVector([(idx, 1.0)]) for idx in v1.window_indices(depth)]
    ws = _linalg.complement_basis(window, uu + us + su)

    exact = w1.exact and w2.exact

    def part(basis):
        c1 = _window_reducing_certificate(v1, basis, depth)
        c2 = _window_reducing_certificate(v2, basis, depth)
        if c1.is_true and c2.is_true:
            cert = true_certificate(depth, exact=exact)
        else:
            bad = c1 if not c1.is_true else c2
            cert = bad
        return PairPart(tuple(basis), cert)

    def generators(op, wres, ws_basis):
        out = []
        for orbit in wold.shift_orbit_vectors(op, wres.shift_wandering_basis, depth):
            for vec in orbit.vectors:
                p = _linalg.project(vec, ws_basis)
                if not p.is_zero(1e-9):
                    out.append(p)
        return tuple(_linalg.mgs(out))

    gens = {
        "v1": generators(v1, w1, ws),
        "v2": generators(v2, w2, ws),
    }
    return PairReport(
        uu=part(uu), us=part(us), su=part(su), ws=part(ws),
        depth=depth, wandering_generators=gens, exact=exact,
    )


# -- completely non doubly commuting ---------------------------------------------


def _lane_subsets(lane_ids):
    ids = sorted(lane_ids)
    n = len(ids)
    for mask in range(1, 2 ** n - 1):
        yield [ids[i] for i in range(n) if mask >> i & 1]


def is_completely_non_doubly_commuting(v1: StructuredIsometry,
                                       v2: StructuredIsometry,
                                       window: int = DEFAULT_DEPTH) -> Certificate:
    """Search for a nonzero reducing subspace on which the pair doubly
    commutes: the whole space, the unitary-type parts of the pair
    decomposition (commuting with a unitary forces double commutation), and
    every lane-graded reducing subspace.

    A true verdict is a certificate relative to that family, reported with
    ``exact=False``; false verdicts carry the witnessing subspace.
    """
    _require_commuting(v1, v2, window)
    whole = doubly_commutes(v1, v2, window)
    if whole.is_true:
        return false_certificate(window, ("subspace", "whole space"))
    report = pair_decompose(v1, v2, depth=min(window, 24))
    for label in ("uu", "us", "su"):
        if getattr(report, label).dim > 0:
            return false_certificate(window, ("subspace", label))
    lane_ids = [l.lane_id for l in v1.lanes]
    if len(lane_ids) > 1:
        for subset in _lane_subsets(lane_ids):
            if lanes_reducing(v1, subset) and lanes_reducing(v2, subset):
                r1 = v1.restricted_to_lanes(subset)
                r2 = v2.restricted_to_lanes(subset)
                if doubly_commutes(r1, r2, window).is_true:
                    return false_certificate(window, ("lanes", tuple(subset)))
    return true_certificate(window, exact=False)
