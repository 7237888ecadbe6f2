"""Residue lookup, rank structure, and monodromy representatives."""

from __future__ import annotations

import cmath
from fractions import Fraction as F

import numpy as np
import pytest

from arrgm.arrangement import ProjForm
from arrgm.errors import ResonantResidueError, UnknownComponentError
from arrgm.exactnum import WeightExpr
from arrgm.fixtures import example1
from arrgm.gaussmanin import MovingFamily, gm_matrix
from arrgm.monodromy import monodromy, projector_structure, residue_of


def P(*coeffs):
    return ProjForm.make(list(coeffs))


def W(const=0, **coeffs):
    return WeightExpr.make(F(const), {k: F(v) for k, v in coeffs.items()})


ASSIGN = {"a1": F(1, 3), "a2": F(1, 7), "a3": F(1, 5), "ah": F(-1, 2)}


@pytest.fixture(scope="module")
def connection():
    return gm_matrix(MovingFamily(example1().arrangement))


class TestResidueOf:
    def test_lookup_published_h1(self, connection):
        # the h1 residue is unaffected by the published-table deviations
        assert residue_of(connection, P(0, 1, 0)) == example1().residue([0, 1, 0])

    def test_lookup_accepts_scaled_form(self, connection):
        scaled = [F(0), F(-2), F(0)]  # -2*h1 normalizes to h1
        assert residue_of(connection, scaled) == residue_of(connection, P(0, 1, 0))

    def test_unknown_component(self, connection):
        with pytest.raises(UnknownComponentError) as info:
            residue_of(connection, [1, 5, 0])
        assert "h0+5*h1" in str(info.value)


class TestProjectorStructure:
    def test_published_h1(self):
        t = projector_structure(example1().residue([0, 1, 0]))
        assert t == W(a1=-1, a3=-1)

    def test_published_h0_minus_h2(self):
        t = projector_structure(example1().residue([1, 0, -1]))
        assert t == W(a1=1, a3=1)

    def test_all_published_traces(self):
        fx = example1()
        for form, expected in fx.traces.items():
            assert projector_structure(fx.residues[form]) == expected

    def test_computed_connection_structure(self, connection):
        # Every visible component of the computed connection is a rank-one
        # type matrix with A^2 = tr(A) A; the derived h0 component sums two
        # of them and legitimately lacks the structure.
        for comp in connection.components[:-1]:
            assert projector_structure(comp.residue) is not None
        assert projector_structure(connection.components[-1].residue) is None

    def test_identity_fails(self):
        ident = [[W(1), W()], [W(), W(1)]]
        assert projector_structure(ident) is None


class TestMonodromy:
    def test_zero_matrix(self):
        zero = [[W(), W()], [W(), W()]]
        result = monodromy(zero, ASSIGN, mode="both")
        assert np.allclose(result.matrix, np.eye(2), atol=1e-14)

    def test_scalar_quarter(self):
        result = monodromy([[W(a1=1)]], {"a1": F(1, 4)}, mode="both")
        assert abs(result.matrix[0][0] - (-1j)) < 1e-12

    def test_closed_form_vs_numeric_on_h1(self):
        a = example1().residue([0, 1, 0])
        assign = {"a1": F(1, 3), "a2": F(0), "a3": F(1, 5), "ah": F(0)}
        both = monodromy(a, assign, mode="both")
        closed = monodromy(a, assign, mode="closed_form")
        numeric = monodromy(a, assign, mode="numeric")
        assert both.method == "both"
        assert np.max(np.abs(closed.matrix - numeric.matrix)) < 1e-10
        # T = I + (e^{-2 pi i t} - 1)/t * A with t = -a1 - a3 = -8/15
        t = float(F(-8, 15))
        a_eval = np.array(
            [[float(e.evaluate(assign)) for e in row] for row in a], dtype=complex
        )
        expected = np.eye(3) + (cmath.exp(-2j * cmath.pi * t) - 1) / t * a_eval
        assert np.max(np.abs(both.matrix - expected)) < 1e-13

    def test_determinant_identity(self):
        fx = example1()
        for form, matrix in fx.residues.items():
            result = monodromy(matrix, ASSIGN, mode="both")
            trace = float(fx.traces[form].evaluate(ASSIGN))
            det = np.linalg.det(result.matrix)
            assert abs(det - cmath.exp(-2j * cmath.pi * trace)) < 1e-9

    def test_eigenvalue_exponentials(self):
        a = example1().residue([0, 0, 1])
        result = monodromy(a, ASSIGN, mode="numeric")
        a_eval = np.array(
            [[float(e.evaluate(ASSIGN)) for e in row] for row in a], dtype=complex
        )
        expected = list(np.exp(-2j * np.pi * np.linalg.eigvals(a_eval)))
        got = list(np.linalg.eigvals(result.matrix))
        for value in expected:
            best = min(got, key=lambda z: abs(z - value))
            assert abs(best - value) < 1e-8
            got.remove(best)

    def test_resonance_detected(self):
        # eigenvalues 0 and tr = a1 + a3; a1 + a3 = 1 is a nonzero integer
        a = example1().residue([1, 0, -1])
        assign = {"a1": F(1, 2), "a2": F(1, 7), "a3": F(1, 2), "ah": F(-1, 5)}
        with pytest.raises(ResonantResidueError):
            monodromy(a, assign, mode="both")

    def test_condition_report_present(self):
        result = monodromy(example1().residue([0, 1, 0]), ASSIGN, mode="numeric")
        assert result.condition_report
        assert all("margin" in line or "integer" in line for line in result.condition_report)

    def test_json_shape(self):
        result = monodromy([[W(a1=1)]], {"a1": F(1, 4)}, mode="numeric")
        payload = result.to_json()
        assert payload["method"] == "numeric"
        assert isinstance(payload["matrix"][0][0], list)
        assert len(payload["matrix"][0][0]) == 2
