"""Exact arithmetic kernel.

Rational scalars are ``fractions.Fraction`` (aliased ``Rat``): arbitrary
precision, always reduced, positive denominator.  On top of that this module
provides

* ``WeightExpr``  -- exact affine-linear expressions in the weight symbols
  ``a1..am, ah`` (the residue symbols).  The dependent symbol ``a0`` is
  eliminated on construction through ``a0 = -(a1 + ... + am) - ah``.
* ``WeightPoly``  -- sparse multivariate polynomials over ``Rat`` with string
  symbols (products of weight expressions live here).
* ``QMat`` + ``solve_linear`` -- dense exact matrices and a fraction-free
  (Bareiss) Gaussian elimination that returns particular solutions and a
  kernel basis, or reports the failing row of an inconsistent system.
* ``affine_fit`` -- recover a ``WeightExpr`` from exact samples.
* ``cexp_matrix`` -- complex matrix exponential by scaling-and-squaring with
  a degree-13 Pade approximant (used for monodromy representatives).

Everything here is immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import InconsistentSystemError, NonlinearFitError

Rat = Fraction

QQ0 = Fraction(0)
QQ1 = Fraction(1)


# ---------------------------------------------------------------------------
# rational literals
# ---------------------------------------------------------------------------

def rat_to_str(q: Rat) -> str:
    """Serialize a rational as ``"p/q"``, omitting the denominator when 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rat_from_str(s: str) -> Rat:
    """Parse a ``"p/q"`` or ``"p"`` literal."""
    return Fraction(s.strip())


# ---------------------------------------------------------------------------
# affine-linear weight expressions
# ---------------------------------------------------------------------------

def weight_symbols(nweights: int, moving: bool = True) -> list[str]:
    """Symbol names ``a1..am`` plus ``ah`` when a moving hyperplane is present."""
    syms = [f"a{i}" for i in range(1, nweights + 1)]
    if moving:
        syms.append("ah")
    return syms


@dataclass(frozen=True)
class WeightExpr:
    """Affine-linear expression ``const + sum coeffs[s] * s`` in weight symbols.

    Invariants: no zero coefficients are stored and the symbol ``a0`` never
    appears (use :meth:`build` to eliminate it).
    """

    const: Rat
    coeffs: tuple[tuple[str, Rat], ...]  # sorted by symbol, no zero entries

    def __post_init__(self) -> None:
        for sym, c in self.coeffs:
            if sym == "a0":
                raise ValueError("a0 must be eliminated before constructing a WeightExpr")
            if c == 0:
                raise ValueError("zero coefficient stored in WeightExpr")

    @staticmethod
    def make(const: Rat | int = 0, coeffs: Mapping[str, Rat | int] | None = None) -> "WeightExpr":
        items = tuple(
            sorted((s, Fraction(c)) for s, c in (coeffs or {}).items() if Fraction(c) != 0)
        )
        return WeightExpr(Fraction(const), items)

    @staticmethod
    def build(
        const: Rat | int,
        coeffs: Mapping[str, Rat | int],
        nweights: int,
    ) -> "WeightExpr":
        """Construct with ``a0`` allowed, eliminating it via ``a0 = -sum(a_i) - ah``."""
        work: dict[str, Fraction] = {}
        for sym, c in coeffs.items():
            work[sym] = work.get(sym, QQ0) + Fraction(c)
        c0 = work.pop("a0", QQ0)
        if c0 != 0:
            for sym in weight_symbols(nweights):
                work[sym] = work.get(sym, QQ0) - c0
        return WeightExpr.make(Fraction(const), work)

    @staticmethod
    def constant(value: Rat | int) -> "WeightExpr":
        return WeightExpr.make(value, {})

    @staticmethod
    def symbol(sym: str) -> "WeightExpr":
        return WeightExpr.make(0, {sym: 1})

    def coeff(self, sym: str) -> Rat:
        for s, c in self.coeffs:
            if s == sym:
                return c
        return QQ0

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "WeightExpr") -> "WeightExpr":
        acc = dict(self.coeffs)
        for s, c in other.coeffs:
            acc[s] = acc.get(s, QQ0) + c
        return WeightExpr.make(self.const + other.const, acc)

    def __sub__(self, other: "WeightExpr") -> "WeightExpr":
        return self + other.scale(-1)

    def __neg__(self) -> "WeightExpr":
        return self.scale(-1)

    def scale(self, factor: Rat | int) -> "WeightExpr":
        f = Fraction(factor)
        return WeightExpr.make(self.const * f, {s: c * f for s, c in self.coeffs})

    def evaluate(self, assignment: Mapping[str, Rat]) -> Rat:
        total = self.const
        for s, c in self.coeffs:
            if s not in assignment:
                raise KeyError(f"no value assigned to weight symbol {s}")
            total += c * assignment[s]
        return total

    def to_poly(self) -> "WeightPoly":
        terms: dict[tuple[tuple[str, int], ...], Fraction] = {}
        if self.const != 0:
            terms[()] = self.const
        for s, c in self.coeffs:
            terms[((s, 1),)] = c
        return WeightPoly(tuple(sorted(terms.items())))

    def to_json(self) -> dict:
        return {
            "const": rat_to_str(self.const),
            "coeffs": {s: rat_to_str(c) for s, c in self.coeffs},
        }

    @staticmethod
    def from_json(data: dict) -> "WeightExpr":
        return WeightExpr.make(
            rat_from_str(data.get("const", "0")),
            {s: rat_from_str(c) for s, c in data.get("coeffs", {}).items()},
        )

    def __str__(self) -> str:
        parts: list[str] = []
        if self.const != 0 or not self.coeffs:
            parts.append(rat_to_str(self.const))
        for s, c in self.coeffs:
            if c == 1:
                term = s
            elif c == -1:
                term = f"-{s}"
            else:
                term = f"{rat_to_str(c)}*{s}"
            if parts and not term.startswith("-"):
                parts.append(f"+{term}")
            else:
                parts.append(term)
        return "".join(parts)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials
# ---------------------------------------------------------------------------

Monomial = tuple[tuple[str, int], ...]  # sorted ((symbol, exponent), ...), exponents > 0


@dataclass(frozen=True)
class WeightPoly:
    """Sparse polynomial over ``Rat`` in named symbols, canonical form.

    Keys are sorted ``(symbol, exponent)`` tuples; no zero coefficients are
    stored; the zero polynomial has no terms.  Symbols are arbitrary strings,
    so the same type also carries polynomials in parameter symbols where a
    joint symbolic check needs them.
    """

    terms: tuple[tuple[Monomial, Rat], ...]

    @staticmethod
    def make(terms: Mapping[Monomial, Rat | int]) -> "WeightPoly":
        clean: dict[Monomial, Fraction] = {}
        for mono, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            mono = tuple(sorted((s, e) for s, e in mono if e != 0))
            clean[mono] = clean.get(mono, QQ0) + c
        return WeightPoly(tuple(sorted((m, c) for m, c in clean.items() if c != 0)))

    @staticmethod
    def zero() -> "WeightPoly":
        return WeightPoly(())

    @staticmethod
    def constant(value: Rat | int) -> "WeightPoly":
        return WeightPoly.make({(): Fraction(value)})

    @staticmethod
    def symbol(sym: str) -> "WeightPoly":
        return WeightPoly.make({((sym, 1),): QQ1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "WeightPoly") -> "WeightPoly":
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, QQ0) + c
        return WeightPoly.make(acc)

    def __sub__(self, other: "WeightPoly") -> "WeightPoly":
        return self + other.scale(-1)

    def scale(self, factor: Rat | int) -> "WeightPoly":
        f = Fraction(factor)
        if f == 0:
            return WeightPoly.zero()
        return WeightPoly(tuple((m, c * f) for m, c in self.terms))

    def __mul__(self, other: "WeightPoly") -> "WeightPoly":
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms:
            d1 = dict(m1)
            for m2, c2 in other.terms:
                merged = dict(d1)
                for s, e in m2:
                    merged[s] = merged.get(s, 0) + e
                key = tuple(sorted(merged.items()))
                acc[key] = acc.get(key, QQ0) + c1 * c2
        return WeightPoly.make(acc)

    def evaluate(self, assignment: Mapping[str, Rat]) -> Rat:
        total = QQ0
        for mono, c in self.terms:
            value = c
            for s, e in mono:
                value *= assignment[s] ** e
            total += value
        return total


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------

Vector = list[Fraction]
Matrix = list[list[Fraction]]


@dataclass(frozen=True)
class QMat:
    """Dense matrix of rationals."""

    rows: int
    cols: int
    entries: tuple[tuple[Rat, ...], ...]

    @staticmethod
    def make(entries: Sequence[Sequence[Rat | int]]) -> "QMat":
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        data = []
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            data.append(tuple(Fraction(x) for x in row))
        return QMat(rows, cols, tuple(data))

    @staticmethod
    def identity(n: int) -> "QMat":
        return QMat.make([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def row_lists(self) -> Matrix:
        return [list(r) for r in self.entries]


@dataclass
class LinearSolution:
    """Result of an exact solve: one solution per right-hand side plus a kernel basis."""

    solutions: list[Vector]
    kernel: list[Vector]
    rank: int
    pivot_cols: list[int]


def _integer_rows(rows: Matrix) -> list[list[int]]:
    out = []
    for row in rows:
        denom = 1
        for x in row:
            denom = denom * x.denominator // math.gcd(denom, x.denominator)
        out.append([int(x * denom) for x in row])
    return out


def _bareiss_echelon(aug: list[list[int]], ncols_a: int) -> tuple[list[list[int]], list[int], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    ``ncols_a`` counts the coefficient columns; pivots are only chosen there.
    Returns (echelon rows, pivot column list, original row index per row).
    """
    rows = [list(r) for r in aug]
    origin = list(range(len(rows)))
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    prev_pivot = 1
    r = 0
    for c in range(ncols_a):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        origin[r], origin[pivot_row] = origin[pivot_row], origin[r]
        piv = rows[r][c]
        for i in range(r + 1, len(rows)):
            if all(x == 0 for x in rows[i]):
                continue
            factor = rows[i][c]
            for j in range(ncols):
                rows[i][j] = (piv * rows[i][j] - factor * rows[r][j]) // prev_pivot
        prev_pivot = piv
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots, origin


def solve_linear(
    matrix: QMat | Sequence[Sequence[Rat | int]],
    rhs: Sequence[Sequence[Rat | int]] | None = None,
) -> LinearSolution:
    """Solve ``M x = b`` exactly for each right-hand side ``b`` in ``rhs``.

    Elimination is fraction-free (Bareiss) on the integer-cleared augmented
    matrix, so intermediate entries stay integral and grow polynomially.
    When the system is underdetermined, one particular solution is returned
    together with a basis of the kernel.  An unsatisfiable equation raises
    :class:`InconsistentSystemError` carrying the original row index.
    """
    rows = matrix.row_lists() if isinstance(matrix, QMat) else [
        [Fraction(x) for x in row] for row in matrix
    ]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rhs_list = [[Fraction(x) for x in b] for b in (rhs or [])]
    for b in rhs_list:
        if len(b) != nrows:
            raise ValueError("right-hand side length does not match row count")

    aug = [rows[i] + [b[i] for b in rhs_list] for i in range(nrows)]
    if not aug:
        return LinearSolution([[ ] for _ in rhs_list], [], 0, [])
    int_aug = _integer_rows(aug)
    ech, pivots, origin = _bareiss_echelon(int_aug, ncols)
    rank = len(pivots)

    nb = len(rhs_list)
    for i in range(rank, nrows):
        if any(ech[i][j] != 0 for j in range(ncols)):
            raise AssertionError("echelon rows below rank must vanish on coefficients")
        for k in range(nb):
            if ech[i][ncols + k] != 0:
                raise InconsistentSystemError(origin[i])

    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]

    def back_substitute(target: list[Fraction], free_values: Mapping[int, Fraction]) -> Vector:
        sol: list[Fraction] = [QQ0] * ncols
        for c, v in free_values.items():
            sol[c] = v
        for r in range(rank - 1, -1, -1):
            c = pivots[r]
            s = target[r]
            for j in range(c + 1, ncols):
                if ech[r][j] != 0 and sol[j] != 0:
                    s -= Fraction(ech[r][j]) * sol[j]
            sol[c] = s / Fraction(ech[r][c])
        return sol

    zero_free = {c: QQ0 for c in free_cols}
    solutions = [
        back_substitute([Fraction(ech[r][ncols + k]) for r in range(rank)], zero_free)
        for k in range(nb)
    ]
    kernel = [
        back_substitute([QQ0] * rank, {c: (QQ1 if c == fc else QQ0) for c in free_cols})
        for fc in free_cols
    ]
    return LinearSolution(solutions, kernel, rank, pivots)


def matrix_rank(matrix: Sequence[Sequence[Rat | int]]) -> int:
    if not matrix or not matrix[0]:
        return 0
    rows = [[Fraction(x) for x in row] for row in matrix]
    int_rows = _integer_rows(rows)
    _, pivots, _ = _bareiss_echelon(int_rows, len(rows[0]))
    return len(pivots)


def nullspace(matrix: Sequence[Sequence[Rat | int]]) -> list[Vector]:
    """Basis of the exact kernel of a rational matrix."""
    if not matrix:
        return []
    return solve_linear(matrix, []).kernel


# ---------------------------------------------------------------------------
# affine fitting of weight expressions
# ---------------------------------------------------------------------------

def affine_fit(samples: Sequence[tuple[Mapping[str, Rat], Rat]]) -> WeightExpr:
    """Recover the unique affine-linear expression matching exact samples.

    Each sample is ``(assignment, value)``.  The sample assignments must span
    affinely (at least k+1 of them for k active symbols); values that are not
    affine-linear in the symbols raise :class:`NonlinearFitError`.
    """
    if not samples:
        raise ValueError("affine_fit needs at least one sample")
    symbols = sorted({s for assignment, _ in samples for s in assignment})
    rows = [[QQ1] + [Fraction(assignment.get(s, QQ0)) for s in symbols] for assignment, _ in samples]
    values = [Fraction(v) for _, v in samples]
    try:
        result = solve_linear(rows, [values])
    except InconsistentSystemError:
        raise NonlinearFitError() from None
    if result.rank < len(symbols) + 1:
        raise ValueError("sample assignments do not span affinely")
    sol = result.solutions[0]
    expr = WeightExpr.make(sol[0], {s: sol[1 + i] for i, s in enumerate(symbols)})
    for assignment, value in samples:
        if expr.evaluate({s: Fraction(assignment.get(s, QQ0)) for s in symbols}) != value:
            raise NonlinearFitError()
    return expr


# ---------------------------------------------------------------------------
# complex matrix exponential
# ---------------------------------------------------------------------------

# Pade(13, 13) numerator coefficients for exp, highest order last.
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
    33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def cexp_matrix(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a square complex matrix.

    Scaling-and-squaring with the degree-13 diagonal Pade approximant; the
    scaled input has 1-norm below the standard threshold, which keeps the
    relative backward error of the approximant under 1e-13.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("cexp_matrix requires a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("cexp_matrix requires finite entries")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)

    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > _THETA13:
        squarings = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    scaled = a / (2.0 ** squarings)

    ident = np.eye(n, dtype=complex)
    a2 = scaled @ scaled
    a4 = a2 @ a2
    a6 = a2 @ a4
    b = _PADE13
    u = scaled @ (
        a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
        + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident
    )
    v = (
        a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
        + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    )
    result = np.linalg.solve(v - u, v + u)
    for _ in range(squarings):
        result = result @ result
    return result


def complex_to_str_pair(z: complex) -> list[str]:
    """Serialize a complex number as a decimal-string pair with 17 significant digits."""
    return [f"{z.real:.17g}", f"{z.imag:.17g}"]
