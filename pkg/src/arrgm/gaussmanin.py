"""Assembly of the connection matrix of the moving-hyperplane family.

The bundle is trivialized by the nbc bases of the fixed arrangement (top
twisted cohomology of every fiber).  Differentiating a basis class e_J
against the parameter l_k produces the coefficient a_h (x_k / x_s) e_J; its
class is computed exactly at rational parameter samples, the sampled
coordinate functions are fitted as sum_p r_p dlog f_p over the affine
discriminant components, and the residues r_p are lifted to affine-linear
weight expressions by sampling weights and exact affine fitting.  The
component along h0 = 0 is not fitted: homogenizing each degree-one affine
component contributes -dlog h0, so its residue is minus the sum of all the
others.

``flatness_check`` verifies integrability, numerically at random rational
points and symbolically (as a polynomial identity in weights and parameters)
for small connections.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._sampling import RatSampler
from .arrangement import AffineForm, Arrangement, ProjForm, bad_loci, discriminant
from .errors import ArrgmError, ConnectionFitError, SampleRejectedError
from .exactnum import (
    Rat,
    WeightExpr,
    WeightPoly,
    affine_fit,
    rat_to_str,
    solve_linear,
)
from .errors import InconsistentSystemError
from .aomoto import (
    ClassReducer,
    FiberContext,
    RatForm,
    Weights,
    reduce_rational_form,
    validate_weights,
)
from .matroid import MatroidContext
from .osalg import ExtElem

QQ0 = Fraction(0)
QQ1 = Fraction(1)

DEFAULT_SEED = 987654321


# ---------------------------------------------------------------------------
# family and connection containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MovingFamily:
    """Fixed arrangement plus the moving hyperplane x_s = 1 + sum l_i x_i.

    ``weights`` carries numeric residues when the caller wants a numeric
    connection; None selects the symbolic pipeline (weights are sampled and
    entries lifted to affine-linear expressions).
    """

    base: Arrangement
    weights: Weights | None = None
    seed: int = DEFAULT_SEED

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def moving_index(self) -> int:
        return self.base.size

    def fiber(self, params: Sequence[Rat]) -> FiberContext:
        return FiberContext(self.base, params)


@dataclass(frozen=True)
class GMComponent:
    form: ProjForm  # linear form in the dual coordinates h0..hn
    residue: tuple[tuple[WeightExpr, ...], ...]


@dataclass(frozen=True)
class GMConnection:
    """Connection matrix sum_p residue_p dlog(form_p) on the nbc trivialization.

    Column j of each residue matrix holds the coordinates of the image of
    the j-th basis element.  Components are in canonical form order with the
    h0 component last; residue matrices sum to zero.
    """

    basis: tuple[tuple[int, ...], ...]
    components: tuple[GMComponent, ...]
    weight_symbol_order: tuple[int, ...]  # finite fixed indices backing a1..am

    @property
    def size(self) -> int:
        return len(self.basis)

    def component_forms(self) -> list[ProjForm]:
        return [c.form for c in self.components]

    def residue(self, form: ProjForm) -> tuple[tuple[WeightExpr, ...], ...] | None:
        for comp in self.components:
            if comp.form == form:
                return comp.residue
        return None

    def assignment_for(self, weights: Weights) -> dict[str, Fraction]:
        return weights.symbol_assignment(self.weight_symbol_order)

    def evaluate(self, weights: Weights) -> list[tuple[ProjForm, list[list[Fraction]]]]:
        assignment = self.assignment_for(weights)
        return [
            (c.form, [[e.evaluate(assignment) for e in row] for row in c.residue])
            for c in self.components
        ]

    def to_json(self) -> dict:
        return {
            "basis": [list(b) for b in self.basis],
            "components": [
                {
                    "form": comp.form.to_json(),
                    "residue": [[e.to_json() for e in row] for row in comp.residue],
                }
                for comp in self.components
            ],
        }


# ---------------------------------------------------------------------------
# raw parameter derivatives
# ---------------------------------------------------------------------------

def raw_derivative(family: MovingFamily, basis: Sequence[int], k: int) -> RatForm:
    """dl_k coefficient of the connection image of e_J: a_h (x_k / x_s) e_J.

    Expanded over the coordinate volume form, e_J contributes the constant
    Jacobian factor of its affine forms, so the result is the rational form
    (x_k * det_J) / (prod_{j in J} f_j * x_s) dx_1..dx_n tagged with the
    symbolic factor ``ah``.
    """
    n = family.n
    if not 1 <= k <= n:
        raise ValueError(f"parameter index {k} out of range 1..{n}")
    J = tuple(sorted(basis))
    fiber0 = FiberContext(family.base, None)
    det = fiber0.jacobian_det(J)
    if det == 0:
        raise ArrgmError(f"basis tuple {J} has dependent affine forms")
    numerator = WeightPoly.make({((f"x{k}", 1),): det})
    return RatForm.make(numerator, list(J) + [family.moving_index], n, weight_factor="ah")


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------

def _sample_parameter_points(
    family: MovingFamily,
    affine_components: Sequence[AffineForm],
    count: int,
    sampler: RatSampler,
) -> list[tuple[Fraction, ...]]:
    points: list[tuple[Fraction, ...]] = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 200 * count:
            raise SampleRejectedError("could not sample enough off-discriminant points")
        candidate = tuple(sampler.rational(24, 7) for _ in range(family.n))
        if candidate in points:
            continue
        if any(f.evaluate(candidate) == 0 for f in affine_components):
            continue
        points.append(candidate)
    return points


def _sample_weight_settings(family: MovingFamily, flats) -> list[Weights]:
    """m+3 affinely independent generic weight settings (deterministic).

    Base point plus one perturbation per symbol plus a diagonal perturbation;
    every setting must pass the genericity checks.
    """
    finite = family.base.finite_indices
    m = len(finite)

    def candidate_base(shift: int) -> Weights:
        values = {}
        for pos, idx in enumerate(finite):
            values[idx] = Fraction(2 * pos + 3, 2 * m + 5) + Fraction(shift, 97)
        ah = Fraction(1, 2) + Fraction(shift, 101)
        return Weights.make(values, ah)

    def is_generic(w: Weights) -> bool:
        report = validate_weights(family.base, w, bad_flats=flats)
        return report.ok and w.ah != 0

    base = None
    for shift in range(60):
        cand = candidate_base(shift)
        if is_generic(cand):
            base = cand
            break
    if base is None:
        raise SampleRejectedError("no generic base weight setting found")

    settings = [base]
    symbols: list = finite + ["ah"]
    for delta_scale in range(1, 40):
        delta = Fraction(1, 89 + 2 * delta_scale)
        trial: list[Weights] = []
        ok = True
        for sym in symbols:
            values = base.a_dict
            ah = base.ah
            if sym == "ah":
                ah = ah + delta
            else:
                values = dict(values)
                values[sym] = values[sym] + delta
            w = Weights.make(values, ah)
            if not is_generic(w):
                ok = False
                break
            trial.append(w)
        if ok:
            diag = Weights.make(
                {i: v + delta for i, v in base.a_dict.items()}, base.ah + delta
            )
            if is_generic(diag):
                settings.extend(trial)
                settings.append(diag)
                break
    if len(settings) != m + 3:
        raise SampleRejectedError("could not build affinely independent weight settings")
    return settings


# ---------------------------------------------------------------------------
# the connection matrix
# ---------------------------------------------------------------------------

def _affine_component(form: ProjForm, base: Arrangement) -> AffineForm:
    """Affine version of a dual-space component in the chart h_drop = 1."""
    inf_coeffs = base.hyperplanes[base.infinity_index].coeffs
    drop = next(i for i, c in enumerate(inf_coeffs) if c != 0)
    constant = Fraction(form.coeffs[drop])
    lin = [Fraction(c) for j, c in enumerate(form.coeffs) if j != drop]
    return AffineForm(constant, tuple(lin))


def _h0_form(base: Arrangement) -> ProjForm:
    inf_coeffs = base.hyperplanes[base.infinity_index].coeffs
    drop = next(i for i, c in enumerate(inf_coeffs) if c != 0)
    coeffs = [0] * (base.n + 1)
    coeffs[drop] = 1
    return ProjForm.make(coeffs)


def gm_matrix(family: MovingFamily) -> GMConnection:
    """Compute the full connection matrix with exact residues.

    Pipeline: reduce every raw derivative at enough parameter samples, fit
    each matrix entry as sum_p r_p dlog f_p over the affine discriminant
    components (verifying the fit exactly at two held-out samples), lift the
    residues to affine-linear weight expressions, and append the derived h0
    component.
    """
    base = family.base
    n = base.n
    components = discriminant(base)
    h0 = _h0_form(base)
    affine_all = [(form, _affine_component(form, base)) for form in components]
    visible = [(form, aff) for form, aff in affine_all if any(c != 0 for c in aff.lin)]
    flats = bad_loci(base)

    base_matroid = MatroidContext(base)
    basis = base_matroid.nbc_sets(n)
    if not basis:
        raise ArrgmError("fixed arrangement has no nbc bases in top degree")
    nbasis = len(basis)

    if family.weights is not None:
        report = validate_weights(base, family.weights, bad_flats=flats)
        if not report.ok:
            raise ArrgmError(
                "weights fail genericity: " + "; ".join(report.violations)
            )
        weight_settings = [family.weights]
    else:
        weight_settings = _sample_weight_settings(family, flats)

    nfit = len(visible) + 2
    nheld = 2
    sampler = RatSampler(family.seed)
    raw_forms = [
        [raw_derivative(family, J, k) for k in range(1, n + 1)] for J in basis
    ]

    # Evaluate the coordinate functions of every raw derivative at parameter
    # samples; retry with fresh points when a sample hits a degenerate locus
    # or the fit matrix of dlog values is rank deficient.
    max_rounds = 8
    for attempt in range(max_rounds):
        try:
            points = _sample_parameter_points(
                family, [aff for _, aff in visible], nfit + nheld, sampler
            )
            if _dlog_rank(visible, points[:nfit], n) < len(visible):
                raise SampleRejectedError("dlog sample matrix is rank deficient")
            coords = _evaluate_samples(family, basis, raw_forms, points, weight_settings)
            break
        except SampleRejectedError:
            if attempt == max_rounds - 1:
                raise

    residues_by_setting: list[dict[tuple[int, int], list[Fraction]]] = []
    for widx in range(len(weight_settings)):
        residues_by_setting.append(
            _fit_residues(
                family,
                visible,
                points,
                nfit,
                coords[widx],
                nbasis,
            )
        )

    symbol_order = tuple(base.finite_indices)
    if family.weights is not None:
        lifted = _constant_lift(residues_by_setting[0], visible, nbasis)
    else:
        lifted = _affine_lift(
            residues_by_setting, weight_settings, symbol_order, visible, nbasis
        )

    comp_list: list[GMComponent] = []
    for pidx, (form, _aff) in enumerate(visible):
        matrix = tuple(
            tuple(lifted[(i, j)][pidx] for j in range(nbasis)) for i in range(nbasis)
        )
        comp_list.append(GMComponent(form, matrix))
    # A component invisible in the affine chart has no linear part, which
    # forces it to be proportional to h0 itself; nothing else to add here.
    assert all(form == h0 for form, aff in affine_all if not any(c != 0 for c in aff.lin))
    comp_list.sort(key=lambda c: c.form.coeffs)
    h0_matrix = []
    for i in range(nbasis):
        row = []
        for j in range(nbasis):
            total = WeightExpr.constant(0)
            for comp in comp_list:
                total = total - comp.residue[i][j]
            row.append(total)
        h0_matrix.append(tuple(row))
    comp_list.append(GMComponent(h0, tuple(h0_matrix)))
    return GMConnection(tuple(basis), tuple(comp_list), symbol_order)


def _evaluate_samples(
    family: MovingFamily,
    basis: list[tuple[int, ...]],
    raw_forms: list[list[RatForm]],
    points: list[tuple[Fraction, ...]],
    weight_settings: list[Weights],
) -> list[list[list[list[Fraction]]]]:
    """coords[w][sample][flat(J,k)] = coordinate vector over the fixed basis.

    The partial-fraction reduction of each raw derivative is weight
    independent and shared across settings; only the class reduction is per
    weight setting.
    """
    n = family.n
    coords: list[list[list[list[Fraction]]]] = [
        [] for _ in weight_settings
    ]
    for point in points:
        fiber = family.fiber(point)
        reduced: list[ExtElem] = []
        for J_forms in raw_forms:
            for form in J_forms:
                bare = RatForm(form.numerator, form.poles, form.wedge, None)
                reduced.append(reduce_rational_form(bare, fiber))
        for widx, weights in enumerate(weight_settings):
            reducer = ClassReducer(fiber, weights)
            vectors = reducer.reduce_batch(reduced)
            ah = weights.ah
            coords[widx].append([[ah * c for c in vec] for vec in vectors])
    return coords


def _dlog_rank(
    visible: list[tuple[ProjForm, AffineForm]],
    points: list[tuple[Fraction, ...]],
    n: int,
) -> int:
    from .exactnum import matrix_rank

    rows = []
    for point in points:
        for k in range(n):
            rows.append([aff.lin[k] / aff.evaluate(point) for _, aff in visible])
    return matrix_rank(rows) if rows else 0


def _fit_residues(
    family: MovingFamily,
    visible: list[tuple[ProjForm, AffineForm]],
    points: list[tuple[Fraction, ...]],
    nfit: int,
    coords_by_sample: list[list[list[Fraction]]],
    nbasis: int,
) -> dict[tuple[int, int], list[Fraction]]:
    """Fit entry (i, j) as sum_p r_p dlog f_p; verify on held-out samples.

    ``coords_by_sample[sample][j * n + (k-1)][i]`` is the dl_k coordinate of
    the image of basis element j on basis element i.
    """
    n = family.n
    out: dict[tuple[int, int], list[Fraction]] = {}
    nvis = len(visible)
    dlog_rows: list[list[list[Fraction]]] = []  # [sample][k][p]
    for point in points:
        rows_k = []
        for k in range(n):
            row = []
            for _, aff in visible:
                row.append(aff.lin[k] / aff.evaluate(point))
            rows_k.append(row)
        dlog_rows.append(rows_k)
    for j in range(nbasis):
        for i in range(nbasis):
            rows = []
            values = []
            for s in range(nfit):
                for k in range(n):
                    rows.append(dlog_rows[s][k])
                    values.append(coords_by_sample[s][j * n + k][i])
            try:
                solution = solve_linear(rows, [values])
            except InconsistentSystemError as exc:
                raise ConnectionFitError() from exc
            assert solution.rank == nvis  # guaranteed by the presample rank check
            r = solution.solutions[0]
            for s in range(nfit, len(points)):
                for k in range(n):
                    predicted = sum(
                        (r[p] * dlog_rows[s][k][p] for p in range(nvis)), QQ0
                    )
                    if predicted != coords_by_sample[s][j * n + k][i]:
                        raise ConnectionFitError()
            out[(i, j)] = r
    return out


def _affine_lift(
    residues_by_setting: list[dict[tuple[int, int], list[Fraction]]],
    weight_settings: list[Weights],
    symbol_order: tuple[int, ...],
    visible: list,
    nbasis: int,
) -> dict[tuple[int, int], list[WeightExpr]]:
    assignments = [w.symbol_assignment(symbol_order) for w in weight_settings]
    out: dict[tuple[int, int], list[WeightExpr]] = {}
    for i in range(nbasis):
        for j in range(nbasis):
            fitted = []
            for p in range(len(visible)):
                samples = [
                    (assignments[widx], residues_by_setting[widx][(i, j)][p])
                    for widx in range(len(weight_settings))
                ]
                fitted.append(affine_fit(samples))
            out[(i, j)] = fitted
    return out


def _constant_lift(
    residues: dict[tuple[int, int], list[Fraction]],
    visible: list,
    nbasis: int,
) -> dict[tuple[int, int], list[WeightExpr]]:
    return {
        key: [WeightExpr.constant(v) for v in vec] for key, vec in residues.items()
    }


# ---------------------------------------------------------------------------
# flatness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatnessReport:
    ok: bool
    trials: int
    symbolic_checked: bool
    witness: str | None = None


def flatness_check(
    connection: GMConnection,
    base: Arrangement,
    trials: int = 5,
    seed: int = DEFAULT_SEED,
    symbolic: bool | None = None,
) -> FlatnessReport:
    """Verify zero curvature of M = sum_p A_p dlog f_p.

    Numerically: at random rational parameter and weight points, the matrix
    2-form coefficient sum_{p<q} [A_p, A_q] (dlog f_p ^ dlog f_q)_{uv} must
    vanish exactly for every coordinate pair (u, v).  Symbolically (default
    for connections of size <= 8): the same identity is checked as a
    polynomial in the weight and parameter symbols after clearing
    denominators.
    """
    if symbolic is None:
        symbolic = connection.size <= 8
    pairs = _component_pairs(connection, base)
    sampler = RatSampler(seed ^ 0xF1A7)
    n = base.n

    for trial in range(trials):
        point = None
        for _ in range(200):
            candidate = tuple(sampler.rational(20, 9) for _ in range(n))
            if all(aff.evaluate(candidate) != 0 for _, aff in pairs):
                point = candidate
                break
        if point is None:
            raise SampleRejectedError("no off-component point for flatness trial")
        assignment = {
            sym: sampler.rational(12, 7)
            for sym in _symbols_used(connection)
        }
        matrices = [
            (
                aff,
                [[e.evaluate(assignment) for e in row] for row in comp.residue],
            )
            for (comp, aff) in pairs
        ]
        for u in range(n):
            for v in range(u + 1, n):
                total = [[QQ0] * connection.size for _ in range(connection.size)]
                for p in range(len(matrices)):
                    fp, ap = matrices[p]
                    wp = [fp.lin[u] / fp.evaluate(point), fp.lin[v] / fp.evaluate(point)]
                    for q in range(p + 1, len(matrices)):
                        fq, aq = matrices[q]
                        wq = [
                            fq.lin[u] / fq.evaluate(point),
                            fq.lin[v] / fq.evaluate(point),
                        ]
                        cross = wp[0] * wq[1] - wp[1] * wq[0]
                        if cross == 0:
                            continue
                        comm = _commutator(ap, aq)
                        for r in range(connection.size):
                            for c in range(connection.size):
                                total[r][c] += cross * comm[r][c]
                for r in range(connection.size):
                    for c in range(connection.size):
                        if total[r][c] != 0:
                            return FlatnessReport(
                                False,
                                trial + 1,
                                False,
                                witness=f"trial {trial}: curvature[{r}][{c}] = "
                                f"{rat_to_str(total[r][c])} at l = {point}",
                            )

    if symbolic:
        witness = _flatness_symbolic(connection, base)
        if witness is not None:
            return FlatnessReport(False, trials, True, witness=witness)
    return FlatnessReport(True, trials, symbolic, None)


def _component_pairs(connection: GMConnection, base: Arrangement):
    out = []
    for comp in connection.components:
        aff = _affine_component(comp.form, base)
        if any(c != 0 for c in aff.lin):
            out.append((comp, aff))
    return out


def _symbols_used(connection: GMConnection) -> list[str]:
    syms = set()
    for comp in connection.components:
        for row in comp.residue:
            for e in row:
                for s, _ in e.coeffs:
                    syms.add(s)
    return sorted(syms)


def _commutator(a, b):
    size = len(a)
    ab = [
        [sum((a[i][t] * b[t][j] for t in range(size)), QQ0) for j in range(size)]
        for i in range(size)
    ]
    ba = [
        [sum((b[i][t] * a[t][j] for t in range(size)), QQ0) for j in range(size)]
        for i in range(size)
    ]
    return [[ab[i][j] - ba[i][j] for j in range(size)] for i in range(size)]


def _flatness_symbolic(connection: GMConnection, base: Arrangement) -> str | None:
    """Polynomial identity check of the curvature over joint weight/parameter symbols."""
    pairs = _component_pairs(connection, base)
    n = base.n
    size = connection.size
    zero = WeightPoly.zero()

    def lsym(k: int) -> str:
        return f"l{k + 1}"

    f_polys = []
    for _, aff in pairs:
        terms = {(): aff.constant}
        for k, c in enumerate(aff.lin):
            terms[((lsym(k), 1),)] = c
        f_polys.append(WeightPoly.make(terms))

    residue_polys = [
        [[e.to_poly() for e in row] for row in comp.residue] for comp, _ in pairs
    ]

    for u in range(n):
        for v in range(u + 1, n):
            total = [[zero for _ in range(size)] for _ in range(size)]
            for p in range(len(pairs)):
                for q in range(p + 1, len(pairs)):
                    cross = (
                        pairs[p][1].lin[u] * pairs[q][1].lin[v]
                        - pairs[p][1].lin[v] * pairs[q][1].lin[u]
                    )
                    if cross == 0:
                        continue
                    rest = WeightPoly.constant(cross)
                    for r in range(len(pairs)):
                        if r != p and r != q:
                            rest = rest * f_polys[r]
                    comm_pq = _poly_commutator(residue_polys[p], residue_polys[q])
                    for r in range(size):
                        for c in range(size):
                            if not comm_pq[r][c].is_zero:
                                total[r][c] = total[r][c] + comm_pq[r][c] * rest
            for r in range(size):
                for c in range(size):
                    if not total[r][c].is_zero:
                        return f"symbolic curvature[{r}][{c}] != 0 for pair ({u},{v})"
    return None


def _poly_commutator(a, b):
    size = len(a)
    zero = WeightPoly.zero()
    out = [[zero for _ in range(size)] for _ in range(size)]
    for i in range(size):
        for j in range(size):
            acc = zero
            for t in range(size):
                acc = acc + a[i][t] * b[t][j] - b[i][t] * a[t][j]
            out[i][j] = acc
    return out
