"""Monodromy representatives from residue matrices.

A loop around a discriminant component acts on the cohomology bundle, for
non-resonant residues, by a conjugacy class of exp(-2 pi i A) where A is the
component's residue matrix.  The residue matrices at hand satisfy the rank
structure A^2 = tr(A) A, which gives the closed form

    T = I + (exp(-2 pi i t) - 1) / t * A      (t = tr A != 0)
    T = I - 2 pi i A                          (t = 0, then A^2 = 0)

cross-checkable against the numeric matrix exponential.  Only the conjugacy
class is canonical; the representative returned is taken in the nbc basis.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .arrangement import ProjForm, format_linear
from .errors import ArrgmError, ResonantResidueError, UnknownComponentError
from .exactnum import WeightExpr, WeightPoly, cexp_matrix, complex_to_str_pair
from .gaussmanin import GMConnection

RESONANCE_TOL = 1e-9
CROSSCHECK_TOL = 1e-10

WeightMatrix = Sequence[Sequence[WeightExpr]]


@dataclass(frozen=True)
class MonodromyResult:
    matrix: np.ndarray
    method: str  # "closed_form" | "numeric" | "both"
    condition_report: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "matrix": [[complex_to_str_pair(z) for z in row] for row in self.matrix],
            "method": self.method,
            "conditions": list(self.condition_report),
        }


def residue_of(connection: GMConnection, component: ProjForm | Sequence) -> WeightMatrix:
    """Residue matrix stored for one discriminant component (up to scaling)."""
    form = component if isinstance(component, ProjForm) else ProjForm.make(component)
    found = connection.residue(form)
    if found is None:
        names = [
            format_linear(c.form.coeffs, [f"h{i}" for i in range(len(c.form.coeffs))])
            for c in connection.components
        ]
        requested = format_linear(form.coeffs, [f"h{i}" for i in range(len(form.coeffs))])
        raise UnknownComponentError(requested, names)
    return found


def projector_structure(matrix: WeightMatrix) -> WeightExpr | None:
    """Certificate for A * A = tr(A) * A, checked symbolically.

    Returns the trace as a weight expression when the identity holds for all
    weights, None otherwise.
    """
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ValueError("projector_structure needs a square matrix")
    trace = WeightExpr.constant(0)
    for i in range(size):
        trace = trace + matrix[i][i]
    trace_poly = trace.to_poly()
    polys = [[e.to_poly() for e in row] for row in matrix]
    for i in range(size):
        for j in range(size):
            acc = WeightPoly.zero()
            for t in range(size):
                acc = acc + polys[i][t] * polys[t][j]
            acc = acc - trace_poly * polys[i][j]
            if not acc.is_zero:
                return None
    return trace


def _evaluate_matrix(matrix: WeightMatrix, assignment: Mapping[str, Fraction]) -> np.ndarray:
    return np.array(
        [[float(e.evaluate(assignment)) for e in row] for row in matrix], dtype=complex
    )


def _resonance_report(a: np.ndarray) -> tuple[list[str], bool]:
    """Pairwise eigenvalue differences against nonzero integers."""
    eigenvalues = np.linalg.eigvals(a)
    report: list[str] = []
    resonant = False
    for i in range(len(eigenvalues)):
        for j in range(i + 1, len(eigenvalues)):
            diff = eigenvalues[i] - eigenvalues[j]
            nearest = round(diff.real)
            margin = abs(diff - nearest)
            if nearest != 0 and margin < RESONANCE_TOL:
                resonant = True
                report.append(
                    f"eigenvalue difference {diff:.6g} within {margin:.2e} of integer {nearest}"
                )
            else:
                report.append(
                    f"eigenvalue difference {diff:.6g}: margin {abs(diff - nearest):.2e} "
                    f"from nearest integer {nearest} (ok)"
                )
    return report, resonant


def monodromy(
    matrix: WeightMatrix,
    assignment: Mapping[str, Fraction],
    mode: str = "both",
) -> MonodromyResult:
    """Monodromy representative exp(-2 pi i A) at numeric weights.

    ``mode`` is "closed_form", "numeric" or "both"; the closed form needs the
    rank structure A^2 = tr(A) A.  Residues whose eigenvalues differ by a
    nonzero integer raise :class:`ResonantResidueError` (the conjugacy-class
    formula does not apply there).
    """
    if mode not in ("closed_form", "numeric", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    a = _evaluate_matrix(matrix, assignment)
    report, resonant = _resonance_report(a)
    if resonant:
        raise ResonantResidueError()

    closed = None
    if mode in ("closed_form", "both"):
        trace_expr = projector_structure(matrix)
        if trace_expr is None:
            if mode == "closed_form":
                raise ArrgmError("residue matrix lacks the rank structure A^2 = tr(A) A")
        else:
            t = trace_expr.evaluate(assignment)
            ident = np.eye(len(a), dtype=complex)
            if t != 0:
                factor = (cmath.exp(-2j * cmath.pi * float(t)) - 1) / float(t)
                closed = ident + factor * a
            else:
                closed = ident - 2j * cmath.pi * a

    numeric = None
    if mode in ("numeric", "both") or closed is None:
        numeric = cexp_matrix(-2j * np.pi * a)

    if closed is not None and numeric is not None:
        gap = np.max(np.abs(closed - numeric))
        if gap > CROSSCHECK_TOL:
            raise ArrgmError(
                f"closed-form and numeric exponentials disagree by {gap:.3e}"
            )
        return MonodromyResult(closed, "both", tuple(report))
    if closed is not None:
        return MonodromyResult(closed, "closed_form", tuple(report))
    assert numeric is not None
    return MonodromyResult(numeric, "numeric", tuple(report))
