"""Connection assembly: raw derivatives, residue fitting, flatness, oracles."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from arrgm.arrangement import ProjForm, validate
from arrgm.aomoto import Weights
from arrgm.exactnum import WeightExpr, WeightPoly
from arrgm.fixtures import ceva, example1
from arrgm.gaussmanin import (
    GMComponent,
    GMConnection,
    MovingFamily,
    flatness_check,
    gm_matrix,
    raw_derivative,
)


def P(*coeffs):
    return ProjForm.make(list(coeffs))


def W(const=0, **coeffs):
    return WeightExpr.make(F(const), {k: F(v) for k, v in coeffs.items()})


def point_line_family() -> MovingFamily:
    return MovingFamily(validate([P(1, 0), P(0, 1)], 0))


def two_point_family() -> MovingFamily:
    """Fixed points x = 0 and x = 1 plus the moving point 1 + l x."""
    return MovingFamily(validate([P(1, 0), P(0, 1), P(1, -1)], 0))


class TestRawDerivative:
    def test_point_line(self):
        form = raw_derivative(point_line_family(), (1,), 1)
        assert form.weight_factor == "ah"
        assert form.poles == frozenset({1, 2})
        assert form.numerator == WeightPoly.make({(("x1", 1),): F(1)})

    def test_example1(self):
        family = MovingFamily(example1().arrangement)
        form = raw_derivative(family, (1, 2), 1)
        assert form.poles == frozenset({1, 2, family.moving_index})
        assert form.numerator == WeightPoly.make({(("x1", 1),): F(1)})

    def test_parameter_index_checked(self):
        with pytest.raises(ValueError):
            raw_derivative(point_line_family(), (1,), 2)


class TestPointLineConnection:
    def test_components_and_residues(self):
        conn = gm_matrix(point_line_family())
        forms = [c.form for c in conn.components]
        assert forms == [P(0, 1), P(1, 0)]  # h1 first, h0 last
        assert conn.components[0].residue == ((W(a1=-1),),)
        assert conn.components[1].residue == ((W(a1=1),),)

    def test_numeric_weights_variant(self):
        family = MovingFamily(
            point_line_family().base, Weights.make({1: F(1, 3)}, F(-1, 5))
        )
        conn = gm_matrix(family)
        assert conn.components[0].residue[0][0] == WeightExpr.constant(F(-1, 3))


class TestTwoPointConnection:
    """Three singular points on the line; the reduction passes through the
    circuit of the moving point against a fixed one, which is where the
    moving residue enters the diagonal."""

    def expected(self, conn: GMConnection):
        by_form = {c.form: c.residue for c in conn.components}
        assert set(by_form) == {P(0, 1), P(1, 1), P(1, 0)}
        assert by_form[P(0, 1)] == (
            (W(a1=-1), W(a1=-1)),
            (W(a2=-1), W(a2=-1)),
        )
        assert by_form[P(1, 1)] == (
            (W(), W(a1=1)),
            (W(), W(a2=1, ah=1)),
        )
        assert by_form[P(1, 0)] == (
            (W(a1=1), W()),
            (W(a2=1), W(ah=-1)),
        )

    def test_symbolic_connection(self):
        conn = gm_matrix(two_point_family())
        assert conn.basis == ((1,), (2,))
        self.expected(conn)

    def test_hypergeometric_period_oracle(self):
        """Independent check of the whole pipeline against numeric twisted
        periods P_j(l) = int_0^1 x^(a1) (1-x)^(a2) (1+lx)^(ah) dlog f_j.

        dP_j/dl must match the computed connection column; in particular the
        moving-weight term on the diagonal is decided here, not assumed.
        """
        mpmath = pytest.importorskip("mpmath")
        mp = mpmath.mp
        old_dps = mp.dps
        mp.dps = 25
        try:
            a1, a2, ah = map(mpmath.mpf, ("0.31", "0.23", "0.17"))

            def density(x, l):
                return x**a1 * (1 - x) ** a2 * (1 + l * x) ** ah

            def period(j, l):
                if j == 1:
                    return mpmath.quad(lambda x: density(x, l) / x, [0, 1])
                return -mpmath.quad(lambda x: density(x, l) / (1 - x), [0, 1])

            conn = gm_matrix(two_point_family())
            assignment = {"a1": a1, "a2": a2, "ah": ah}
            l0 = mpmath.mpf(2)

            def m_entry(i, j):
                total = mpmath.mpf(0)
                affine = {P(0, 1): (0, 1), P(1, 1): (1, 1), P(1, 0): None}
                for comp in conn.components:
                    aff = affine[comp.form]
                    if aff is None:
                        continue
                    c0, c1 = aff
                    expr = comp.residue[i][j]
                    value = mpmath.mpf(str(expr.const)) + sum(
                        mpmath.mpf(str(c)) * assignment[s] for s, c in expr.coeffs
                    )
                    total += value * c1 / (c0 + c1 * l0)
                return total

            periods = [period(1, l0), period(2, l0)]
            h = mpmath.mpf("1e-6")
            # Tolerance is limited by quadrature noise amplified through the
            # central difference; the hypotheses being discriminated (with or
            # without the moving residue on the diagonal) differ at order one.
            for j in range(2):
                derivative = (period(j + 1, l0 + h) - period(j + 1, l0 - h)) / (2 * h)
                predicted = m_entry(0, j) * periods[0] + m_entry(1, j) * periods[1]
                assert abs(derivative - predicted) <= 1e-5 * abs(derivative)
                without_ah = predicted - ah / (1 + l0) * periods[j] * (j == 1)
                if j == 1:
                    assert abs(derivative - without_ah) > 0.1 * abs(derivative)
        finally:
            mp.dps = old_dps


@pytest.fixture(scope="module")
def example1_connection():
    return gm_matrix(MovingFamily(example1().arrangement))


class TestExample1Connection:
    @pytest.fixture()
    def conn(self, example1_connection):
        return example1_connection

    def test_basis_order(self, conn):
        assert conn.basis == ((1, 2), (1, 3), (2, 3))

    def test_first_column_entry(self, conn):
        # image of e12 on e12: -a1 dlog h1 - a2 dlog h2 (+ balancing h0 part)
        by_form = {c.form: c.residue for c in conn.components}
        assert by_form[P(0, 1, 0)][0][0] == W(a1=-1)
        assert by_form[P(0, 0, 1)][0][0] == W(a2=-1)
        assert by_form[P(1, 0, 0)][0][0] == W(a1=1, a2=1)

    def test_trace_of_first_component(self, conn):
        h1 = {c.form: c.residue for c in conn.components}[P(0, 1, 0)]
        trace = h1[0][0] + h1[1][1] + h1[2][2]
        assert trace == W(a1=-1, a3=-1)

    def test_residue_sum_zero(self, conn):
        size = conn.size
        for i in range(size):
            for j in range(size):
                total = WeightExpr.constant(0)
                for comp in conn.components:
                    total = total + comp.residue[i][j]
                assert total == WeightExpr.constant(0)

    def test_components_within_discriminant(self, conn):
        from arrgm.arrangement import discriminant

        allowed = set(discriminant(example1().arrangement)) | {P(1, 0, 0)}
        assert {c.form for c in conn.components} <= allowed

    def test_scaling_fixed_forms_leaves_connection_unchanged(self, conn):
        base = example1().arrangement
        scaled = validate(
            [
                ProjForm.make([F(5, 3) * c for c in h.coeffs])
                for h in base.hyperplanes
            ],
            base.infinity_index,
        )
        conn2 = gm_matrix(MovingFamily(scaled))
        assert conn2.basis == conn.basis
        assert [(c.form, c.residue) for c in conn2.components] == [
            (c.form, c.residue) for c in conn.components
        ]

    def test_seed_changes_samples_not_result(self, conn):
        conn2 = gm_matrix(MovingFamily(example1().arrangement, seed=20240517))
        assert [(c.form, c.residue) for c in conn2.components] == [
            (c.form, c.residue) for c in conn.components
        ]


class TestFlatness:
    def test_example1_flat_symbolically(self):
        conn = gm_matrix(MovingFamily(example1().arrangement))
        report = flatness_check(conn, example1().arrangement, trials=5, symbolic=True)
        assert report.ok and report.symbolic_checked

    def test_perturbed_connection_fails(self):
        conn = gm_matrix(MovingFamily(example1().arrangement))
        tampered = []
        for idx, comp in enumerate(conn.components):
            if idx == 0:
                rows = [list(row) for row in comp.residue]
                rows[0][0] = rows[0][0] + WeightExpr.constant(1)
                tampered.append(GMComponent(comp.form, tuple(tuple(r) for r in rows)))
            else:
                tampered.append(comp)
        bad = GMConnection(conn.basis, tuple(tampered), conn.weight_symbol_order)
        report = flatness_check(bad, example1().arrangement, trials=5, symbolic=False)
        assert not report.ok and report.witness is not None

    def test_one_by_one_always_flat(self):
        conn = gm_matrix(point_line_family())
        report = flatness_check(conn, point_line_family().base, trials=3, symbolic=True)
        assert report.ok


class TestCevaConnection:
    def test_first_column(self):
        conn = gm_matrix(MovingFamily(ceva().arrangement))
        assert conn.basis == ((1, 2), (1, 4), (1, 5), (2, 3), (3, 4), (3, 5))
        by_form = {c.form: c.residue for c in conn.components}
        # first column: (-a1-a5) dlog h1 - a2 dlog h2 on e12, a5[dlog h1 - dlog h2]
        # on e15, a3 dlog h1 on e23, -a4 dlog h2 on e14, zeros below
        assert by_form[P(0, 1, 0)][0][0] == W(a1=-1, a5=-1)
        assert by_form[P(0, 0, 1)][0][0] == W(a2=-1)
        assert by_form[P(0, 0, 1)][1][0] == W(a4=-1)
        assert by_form[P(0, 1, 0)][2][0] == W(a5=1)
        assert by_form[P(0, 0, 1)][2][0] == W(a5=-1)
        assert by_form[P(0, 1, 0)][3][0] == W(a3=1)
        for i in (4, 5):
            for comp in conn.components:
                assert comp.residue[i][0] == W()
