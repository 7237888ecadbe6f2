"""Twisted logarithmic forms with symbolic weights and their reduction.

The complex in play is the span of wedge monomials of dlog forms of the
finite hyperplanes (plus, in family mode, the moving hyperplane ``x_s``),
with differential "wedge with omega", omega = sum a_i dlog f_i + a_h dlog x_s.
For weights satisfying the genericity conditions its cohomology sits in top
degree with the nbc monomials of the fixed arrangement as a basis.

Two reductions are implemented:

* ``reduce_rational_form`` writes a rational n-form with simple arrangement
  poles as an exact combination of dlog wedge monomials.  The loop rewrites
  numerators in an affine frame of denominator forms (splitting off constant
  terms), shortens denominators through circuits sum mu_i f_i = c with
  c != 0, and converts independent n-factor denominators by the exact
  Jacobian factor.  Each step strictly decreases (pole count, numerator
  degree), so it terminates; pieces that cannot be logarithmic on their own
  are parked and must cancel exactly, otherwise the input was not
  logarithmic and a typed error is raised.

* ``reduce_to_nbc_class`` solves g = sum c_J e_J + omega ^ xi exactly at
  numeric weights, J running over the nbc bases of the fixed arrangement,
  and returns the coordinate vector (c_J).

All computation is over exact rationals; the moving hyperplane is always
specialized at a rational parameter point off the discriminant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .arrangement import AffineForm, Arrangement, ProjForm, decone, validate
from .errors import (
    InconsistentSystemError,
    NotLogarithmicError,
    ResonantWeightsError,
    SampleRejectedError,
)
from .exactnum import (
    Rat,
    WeightExpr,
    WeightPoly,
    matrix_rank,
    solve_linear,
)
from .matroid import MatroidContext
from .osalg import ExtElem, OSContext, wedge_monomials

QQ0 = Fraction(0)
QQ1 = Fraction(1)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Weights:
    """Numeric residue data: a[i] per finite fixed hyperplane, ah for the moving one.

    The infinity residue is derived: a0 = -(sum of a_i) - ah.
    """

    a: tuple[tuple[int, Rat], ...]  # (hyperplane index, value), sorted
    ah: Rat | None = None

    @staticmethod
    def make(a: Mapping[int, Rat | int | str], ah: Rat | int | str | None = None) -> "Weights":
        def conv(v):
            return Fraction(v) if not isinstance(v, str) else Fraction(v)

        return Weights(
            tuple(sorted((i, conv(v)) for i, v in a.items())),
            None if ah is None else conv(ah),
        )

    @property
    def a_dict(self) -> dict[int, Fraction]:
        return dict(self.a)

    @property
    def a0(self) -> Fraction:
        total = -sum((v for _, v in self.a), QQ0)
        if self.ah is not None:
            total -= self.ah
        return total

    def symbol_assignment(self, finite_order: Sequence[int]) -> dict[str, Fraction]:
        """Map a1..am (in the given finite-index order) and ah to values."""
        values = self.a_dict
        out = {f"a{k}": values[idx] for k, idx in enumerate(finite_order, start=1)}
        if self.ah is not None:
            out["ah"] = self.ah
        return out


@dataclass(frozen=True)
class WeightReport:
    ok: bool
    violations: tuple[str, ...]


def validate_weights(arr: Arrangement, weights: Weights, bad_flats=None) -> WeightReport:
    """Genericity check: no residue and no bad-flat residue sum is an integer.

    Residues are a_i for every hyperplane (with a0 derived for the infinity
    one and ah for a moving hyperplane when present), and sum_{i in I_L} a_i
    for every non-normal-crossing flat L.
    """
    from .arrangement import bad_loci

    values = weights.a_dict
    violations: list[str] = []

    def residue(i: int) -> Fraction:
        return weights.a0 if i == arr.infinity_index else values[i]

    for i in range(arr.size):
        if i != arr.infinity_index and i not in values:
            raise ValueError(f"no weight assigned to hyperplane {i}")
    checks = [(f"a{i}" if i != arr.infinity_index else "a0", residue(i)) for i in range(arr.size)]
    if weights.ah is not None:
        checks.append(("ah", weights.ah))
    for name, value in checks:
        if value.denominator == 1:
            violations.append(f"{name} = {value} is an integer")
    flats = bad_loci(arr) if bad_flats is None else bad_flats
    for flat in flats:
        total = sum((residue(i) for i in flat.support), QQ0)
        if total.denominator == 1:
            violations.append(
                f"weight sum {total} over flat {set(flat.support)} is an integer"
            )
    return WeightReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# fibers: fixed arrangement, optionally extended by the moving hyperplane
# ---------------------------------------------------------------------------

def _xsym(i: int) -> str:
    return f"x{i}"


def _poly_affine(form: AffineForm) -> WeightPoly:
    terms: dict = {(): form.constant}
    for i, c in enumerate(form.lin, start=1):
        terms[((_xsym(i), 1),)] = c
    return WeightPoly.make(terms)


@dataclass(frozen=True)
class AffineCircuit:
    """Minimal set of affine forms with dependent linear parts: sum mu_i f_i = c."""

    support: tuple[int, ...]
    mu: tuple[Fraction, ...]
    c: Fraction


class FiberContext:
    """One fiber of the family: fixed arrangement plus (optionally) the moving
    hyperplane specialized at a rational parameter point.

    Carries the extended projective arrangement, exact affine forms in the
    chart of the infinity hyperplane, the rewriting context, and the affine
    circuit table used by partial fractions.
    """

    def __init__(self, base: Arrangement, params: Sequence[Rat] | None = None):
        self.base = base
        self.params = None if params is None else tuple(Fraction(v) for v in params)
        finite = base.finite_indices
        affine_fixed = decone(base)
        forms = list(base.hyperplanes)
        affine: dict[int, AffineForm] = dict(zip(finite, affine_fixed))
        if self.params is not None:
            if len(self.params) != base.n:
                raise ValueError("parameter point must have one value per dimension")
            moving = AffineForm.make(1, self.params)
            inf_coeffs = base.hyperplanes[base.infinity_index].coeffs
            drop = next(i for i, c in enumerate(inf_coeffs) if c != 0)
            proj_coeffs = [Fraction(0)] * (base.n + 1)
            proj_coeffs[drop] = Fraction(1)
            k = 0
            for j in range(base.n + 1):
                if j == drop:
                    continue
                proj_coeffs[j] = self.params[k]
                k += 1
            forms.append(ProjForm.make(proj_coeffs))
            self.moving_index: int | None = len(forms) - 1
            affine[self.moving_index] = moving
        else:
            self.moving_index = None
        try:
            self.arr = validate(forms, base.infinity_index, n=base.n)
        except Exception as exc:  # duplicate moving hyperplane etc.
            raise SampleRejectedError(f"degenerate parameter point: {exc}") from exc
        self.affine = affine
        self.matroid = MatroidContext(self.arr)
        self.os = OSContext(self.arr, self.matroid)
        self._nbc_cache: dict[int, list[tuple[int, ...]]] = {}
        self._affine_circuits: list[AffineCircuit] | None = None

    # -- basics -------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def finite_indices(self) -> list[int]:
        return self.arr.finite_indices

    def nbc(self, p: int) -> list[tuple[int, ...]]:
        if p not in self._nbc_cache:
            self._nbc_cache[p] = self.matroid.nbc_sets(p)
        return self._nbc_cache[p]

    def lin_rows(self, indices: Sequence[int]) -> list[list[Fraction]]:
        return [list(self.affine[i].lin) for i in indices]

    def jacobian_det(self, indices: Sequence[int]) -> Fraction:
        from .arrangement import _det

        return _det(self.lin_rows(indices))

    # -- affine circuits ------------------------------------------------------

    def affine_circuits(self) -> list[AffineCircuit]:
        """Minimal subsets of finite forms whose linear parts are dependent."""
        if self._affine_circuits is not None:
            return self._affine_circuits
        out: list[AffineCircuit] = []
        supports: list[set[int]] = []
        indices = self.finite_indices
        for size in range(2, self.n + 2):
            for subset in itertools.combinations(indices, size):
                sset = set(subset)
                if any(known <= sset for known in supports):
                    continue
                lin_cols = [
                    [self.affine[i].lin[j] for i in subset] for j in range(self.n)
                ]
                kernel = solve_linear(lin_cols, []).kernel
                if not kernel:
                    continue
                assert len(kernel) == 1, "minimal dependent set has a unique relation"
                mu = kernel[0]
                lead = next(x for x in mu if x != 0)
                mu = [x / lead for x in mu]
                c = sum(
                    (m * self.affine[i].constant for m, i in zip(mu, subset)), QQ0
                )
                out.append(AffineCircuit(subset, tuple(mu), c))
                supports.append(sset)
        out.sort(key=lambda circ: circ.support)
        self._affine_circuits = out
        return out

    def circuit_in(self, pole_set: frozenset[int], nonzero_c: bool) -> AffineCircuit | None:
        """Lexicographically smallest contained circuit, filtered by c != 0."""
        for circ in self.affine_circuits():
            if (circ.c != 0) == nonzero_c and set(circ.support) <= pole_set:
                return circ
        return None

    # -- omega and wedge maps -------------------------------------------------

    def weight_symbol_order(self) -> list[int]:
        """Finite fixed indices in order; the moving index is last when present."""
        fixed = [i for i in self.finite_indices if i != self.moving_index]
        return fixed

    def omega_terms(self, weights: Weights | None) -> list[tuple[int, object]]:
        """Pairs (index, coefficient) of omega; symbolic when weights is None."""
        fixed = self.weight_symbol_order()
        out: list[tuple[int, object]] = []
        if weights is None:
            for k, idx in enumerate(fixed, start=1):
                out.append((idx, WeightExpr.symbol(f"a{k}")))
            if self.moving_index is not None:
                out.append((self.moving_index, WeightExpr.symbol("ah")))
        else:
            values = weights.a_dict
            for idx in fixed:
                out.append((idx, values[idx]))
            if self.moving_index is not None:
                if weights.ah is None:
                    raise ValueError("family mode needs the moving weight ah")
                out.append((self.moving_index, weights.ah))
        return out

    def wedge_omega_matrix(self, weights: Weights | None, p: int):
        """Matrix of wedge-with-omega from nbc (p-1)-monomials to nbc p-monomials.

        Entries are ``Fraction`` for numeric weights and ``WeightExpr`` when
        ``weights`` is None (symbolic mode).
        """
        domain = self.nbc(p - 1) if p >= 1 else []
        codomain = self.nbc(p)
        if p == 0:
            return [[ ] for _ in codomain]
        row_index = {t: r for r, t in enumerate(codomain)}
        symbolic = weights is None
        zero = WeightExpr.constant(0) if symbolic else QQ0
        matrix = [[zero for _ in domain] for _ in codomain]
        for col, base_tuple in enumerate(domain):
            for idx, coeff in self.omega_terms(weights):
                merged = wedge_monomials((idx,), base_tuple)
                if merged is None:
                    continue
                sign, tup = merged
                nf = self.os.normal_form_monomial(tup)
                for out_tup, c in nf.terms:
                    r = row_index.get(out_tup)
                    if r is None:
                        raise AssertionError("normal form left the nbc span")
                    contribution = coeff.scale(sign * c) if symbolic else coeff * sign * c
                    matrix[r][col] = matrix[r][col] + contribution
        return matrix


# ---------------------------------------------------------------------------
# rational forms and partial-fraction reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatForm:
    """Rational n-form  numerator / prod_{i in poles} f_i  dx_1 ^ ... ^ dx_n.

    ``numerator`` is a polynomial in the affine coordinates (symbols x1..xn);
    ``poles`` is a squarefree set of arrangement indices (simple poles only --
    higher-order poles are unrepresentable by construction).  An optional
    ``weight_factor`` tags an overall symbolic residue factor such as ``ah``.
    """

    numerator: WeightPoly
    poles: frozenset[int]
    wedge: tuple[int, ...]
    weight_factor: str | None = None

    @staticmethod
    def make(
        numerator: WeightPoly,
        poles: Sequence[int],
        n: int,
        weight_factor: str | None = None,
    ) -> "RatForm":
        return RatForm(numerator, frozenset(poles), tuple(range(1, n + 1)), weight_factor)

    def evaluate(self, fiber: FiberContext, point: Sequence[Rat]) -> Fraction:
        """Value of the dx1..dxn coefficient at an off-pole rational point."""
        assignment = {_xsym(i): Fraction(v) for i, v in enumerate(point, start=1)}
        value = self.numerator.evaluate(assignment)
        for i in self.poles:
            fv = fiber.affine[i].evaluate(point)
            if fv == 0:
                raise ZeroDivisionError("evaluation point lies on a pole")
            value /= fv
        return value


def log_comb_evaluate(fiber: FiberContext, comb: ExtElem, point: Sequence[Rat]) -> Fraction:
    """dx1..dxn coefficient of a top-degree dlog combination at a point."""
    total = QQ0
    for tup, c in comb.terms:
        det = fiber.jacobian_det(tup)
        if det == 0:
            continue
        denom = QQ1
        for i in tup:
            fv = fiber.affine[i].evaluate(point)
            if fv == 0:
                raise ZeroDivisionError("evaluation point lies on a pole")
            denom *= fv
        total += c * det / denom
    return total


def reduce_rational_form(form: RatForm, fiber: FiberContext) -> ExtElem:
    """Exact rewriting of a rational n-form into dlog wedge monomials.

    Raises :class:`NotLogarithmicError` when the form is not a global
    logarithmic form of the (extended) arrangement, e.g. a pole of order two
    at infinity; the exact residual witnesses the failure.
    """
    if form.weight_factor is not None:
        raise ValueError("strip the symbolic weight factor before reducing")
    n = fiber.n
    unknown = [i for i in form.poles if i not in fiber.affine]
    if unknown:
        raise NotLogarithmicError(f"poles {unknown} are not arrangement hyperplanes")

    pending: dict[frozenset[int], WeightPoly] = {}
    residual: dict[frozenset[int], WeightPoly] = {}
    converted: dict[tuple[int, ...], Fraction] = {}

    def push(target: dict, poles: frozenset[int], poly: WeightPoly) -> None:
        if poly.is_zero:
            return
        existing = target.get(poles)
        total = poly if existing is None else existing + poly
        if total.is_zero:
            target.pop(poles, None)
        else:
            target[poles] = total

    push(pending, form.poles, form.numerator)

    while pending:
        poles = next(iter(pending))
        poly = pending.pop(poles)
        if poly.is_zero:
            continue
        degree = max((sum(e for _, e in mono) for mono, _ in poly.terms), default=0)
        if degree >= 1:
            frame = _frame_in(fiber, poles)
            if frame is not None:
                for new_poles, new_poly in _rewrite_in_frame(fiber, poly, poles, frame):
                    push(pending, new_poles, new_poly)
                continue
            circ = fiber.circuit_in(poles, nonzero_c=True)
            if circ is not None:
                for new_poles, new_poly in _split_by_circuit(poly, poles, circ):
                    push(pending, new_poles, new_poly)
                continue
            push(residual, poles, poly)
            continue
        # constant numerator
        if len(poles) == n:
            ordered = tuple(sorted(poles))
            det = fiber.jacobian_det(ordered)
            if det != 0:
                constant = poly.evaluate({})
                converted[ordered] = converted.get(ordered, QQ0) + constant / det
                continue
        circ = fiber.circuit_in(poles, nonzero_c=True)
        if circ is not None:
            for new_poles, new_poly in _split_by_circuit(poly, poles, circ):
                push(pending, new_poles, new_poly)
            continue
        push(residual, poles, poly)

    residual = {p: q for p, q in residual.items() if not q.is_zero}
    if residual:
        detail = "; ".join(
            f"poles {sorted(p)}" for p in sorted(residual, key=lambda s: sorted(s))
        )
        raise NotLogarithmicError(f"non-logarithmic residual remains ({detail})")
    return ExtElem.make({t: c for t, c in converted.items() if c != 0})


def _frame_in(fiber: FiberContext, poles: frozenset[int]) -> tuple[int, ...] | None:
    """Lexicographically smallest n-subset of poles with independent linear parts."""
    n = fiber.n
    if len(poles) < n:
        return None
    for subset in itertools.combinations(sorted(poles), n):
        if matrix_rank(fiber.lin_rows(subset)) == n:
            return subset
    return None


def _rewrite_in_frame(
    fiber: FiberContext,
    poly: WeightPoly,
    poles: frozenset[int],
    frame: tuple[int, ...],
) -> list[tuple[frozenset[int], WeightPoly]]:
    """Express the numerator in the affine frame and cancel pole factors.

    Returns replacement terms: the frame-constant part stays over the full
    pole set; every frame monomial with a factor g_k cancels that factor
    against the matching denominator form.
    """
    n = fiber.n
    # x_j as affine expressions of the frame forms: solve lin * x = g - const.
    lin = fiber.lin_rows(frame)  # rows: frame forms
    rhs_cols = []
    for j in range(n):
        rhs_cols.append([QQ1 if k == j else QQ0 for k in range(n)])
    solution = solve_linear(
        [[lin[i][j] for i in range(n)] for j in range(n)],  # transposed: columns are forms
        rhs_cols,
    )
    # solution.solutions[j] gives coefficients t with x_j = sum t_k (g_k - c_k)
    x_in_g: list[WeightPoly] = []
    for j in range(n):
        expr = WeightPoly.zero()
        for k, t in enumerate(solution.solutions[j]):
            if t == 0:
                continue
            gk = WeightPoly.symbol(f"g{k}") - WeightPoly.constant(
                fiber.affine[frame[k]].constant
            )
            expr = expr + gk.scale(t)
        x_in_g.append(expr)
    substituted = _substitute(poly, {_xsym(j + 1): x_in_g[j] for j in range(n)})

    out: list[tuple[frozenset[int], WeightPoly]] = []
    for mono, coeff in substituted.terms:
        exponents = dict(mono)
        active = next((k for k in range(n) if exponents.get(f"g{k}", 0) > 0), None)
        if active is None:
            out.append((poles, WeightPoly.constant(coeff)))
            continue
        remaining = WeightPoly.constant(coeff)
        for sym, e in mono:
            k = int(sym[1:])
            times = e - 1 if k == active else e
            for _ in range(times):
                remaining = remaining * _poly_affine(fiber.affine[frame[k]])
        out.append((poles - {frame[active]}, remaining))
    return out


def _substitute(poly: WeightPoly, table: Mapping[str, WeightPoly]) -> WeightPoly:
    total = WeightPoly.zero()
    for mono, coeff in poly.terms:
        term = WeightPoly.constant(coeff)
        for sym, e in mono:
            base = table[sym]
            for _ in range(e):
                term = term * base
        total = total + term
    return total


def _split_by_circuit(
    poly: WeightPoly, poles: frozenset[int], circ: AffineCircuit
) -> list[tuple[frozenset[int], WeightPoly]]:
    """Apply 1/prod = (1/c) sum_j mu_j / prod_{i != j} for a circuit with c != 0."""
    assert circ.c != 0
    out = []
    for j, mu in zip(circ.support, circ.mu):
        if mu == 0:
            continue
        out.append((poles - {j}, poly.scale(mu / circ.c)))
    return out


# ---------------------------------------------------------------------------
# reduction of top classes to the fixed nbc basis
# ---------------------------------------------------------------------------

class ClassReducer:
    """Solves g = sum c_J e_J + omega ^ xi in the top degree of one fiber.

    J runs over the nbc bases of the fixed arrangement; the solve is exact at
    numeric weights.  Inconsistency (a resonant weight or a discriminant
    parameter point) raises :class:`SampleRejectedError`.
    """

    def __init__(self, fiber: FiberContext, weights: Weights):
        self.fiber = fiber
        self.weights = weights
        n = fiber.n
        self.top_basis = fiber.nbc(n)
        fixed_nbc = _fixed_nbc(fiber)
        self.fixed_basis = fixed_nbc
        top_index = {t: i for i, t in enumerate(self.top_basis)}
        for t in fixed_nbc:
            if t not in top_index:
                raise SampleRejectedError(
                    "fixed nbc basis does not embed into the fiber basis"
                )
        wedge_cols = fiber.wedge_omega_matrix(weights, n)
        ncols = len(fixed_nbc) + len(fiber.nbc(n - 1))
        rows = []
        for r, tup in enumerate(self.top_basis):
            row = [QQ0] * ncols
            for j, t in enumerate(fixed_nbc):
                if t == tup:
                    row[j] = QQ1
            for j in range(len(fiber.nbc(n - 1))):
                row[len(fixed_nbc) + j] = wedge_cols[r][j]
            rows.append(row)
        self.rows = rows

    def reduce_batch(self, elems: Sequence[ExtElem]) -> list[list[Fraction]]:
        rhs = []
        for g in elems:
            rhs.append(self.fiber.os.nbc_coordinates(g, self.top_basis))
        try:
            solution = solve_linear(self.rows, rhs)
        except InconsistentSystemError as exc:
            raise SampleRejectedError(
                "resonance or discriminant sample: class reduction inconsistent"
            ) from exc
        nfixed = len(self.fixed_basis)
        return [sol[:nfixed] for sol in solution.solutions]

    def reduce(self, g: ExtElem) -> list[Fraction]:
        return self.reduce_batch([g])[0]


def _fixed_nbc(fiber: FiberContext) -> list[tuple[int, ...]]:
    """nbc n-sets of the fixed arrangement, in lexicographic order."""
    if fiber.moving_index is None:
        return fiber.nbc(fiber.n)
    base_ctx = MatroidContext(fiber.base)
    return base_ctx.nbc_sets(fiber.n)


def reduce_to_nbc_class(g: ExtElem, fiber: FiberContext, weights: Weights) -> list[Fraction]:
    """Coordinates of the class of g over the fixed-arrangement nbc basis."""
    return ClassReducer(fiber, weights).reduce(g)


def cohomology_dims(fiber: FiberContext, weights: Weights) -> list[int]:
    """Dimensions of the twisted cohomology by degree, computed from exact ranks.

    Requires generic numeric weights; resonance (detected either by the
    genericity report or by nonvanishing cohomology below the top degree)
    raises :class:`ResonantWeightsError`.
    """
    report = validate_weights(fiber.arr, weights_for_extended(fiber, weights))
    if not report.ok:
        raise ResonantWeightsError(
            "weights fail the genericity conditions: " + "; ".join(report.violations)
        )
    n = fiber.n
    dims_a = [len(fiber.nbc(p)) for p in range(n + 1)]
    ranks = [0] * (n + 2)  # ranks[p] = rank of wedge: A^{p-1} -> A^p
    for p in range(1, n + 1):
        matrix = fiber.wedge_omega_matrix(weights, p)
        ranks[p] = matrix_rank(matrix) if matrix and matrix[0] else 0
    out = []
    for p in range(n + 1):
        out.append(dims_a[p] - ranks[p] - ranks[p + 1])
    return out


def weights_for_extended(fiber: FiberContext, weights: Weights) -> Weights:
    """Weights keyed by the extended arrangement's finite indices.

    The moving weight moves into the per-hyperplane table (the moving
    hyperplane is an ordinary finite hyperplane of the fiber), so the derived
    a0 still counts it exactly once.
    """
    if fiber.moving_index is None:
        return weights
    if weights.ah is None:
        raise ValueError("family mode needs the moving weight ah")
    values = dict(weights.a)
    values[fiber.moving_index] = weights.ah
    return Weights.make(values, None)


# ---------------------------------------------------------------------------
# JSON views
# ---------------------------------------------------------------------------

def log_comb_to_json(fiber: FiberContext, comb: ExtElem) -> dict:
    """ExtElem JSON with the moving index rendered as "s"."""
    terms = []
    for tup, c in comb.terms:
        idx = ["s" if i == fiber.moving_index else i for i in tup]
        from .exactnum import rat_to_str

        terms.append({"idx": idx, "c": rat_to_str(c)})
    return {"terms": terms}
