"""Projective hyperplane arrangements and their intersection data.

An arrangement is an ordered list of hyperplanes in P^n, one of which is
designated as the hyperplane at infinity.  Forms are stored in a canonical
normalization (coprime integer coefficients, first nonzero positive) so that
equality, deduplication and golden outputs are deterministic.

The module computes the intersection semi-lattice (all nonempty projective
intersections, ordered by reverse inclusion), the non-normal-crossing flats
(``bad_loci``), coning/deconing between affine and projective descriptions,
and the discriminant of a moving extra hyperplane in the dual coordinates
``h0..hn``: one linear component for every independent n-subset of the fixed
hyperplanes, obtained as the (n+1) x (n+1) minor of their coefficient rows
stacked with the symbolic row (h0..hn).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ArrgmError, DuplicateHyperplaneError, LeadingFrameError
from .exactnum import Rat, matrix_rank, nullspace, rat_from_str, rat_to_str


@dataclass(frozen=True)
class ProjForm:
    """Homogeneous linear form, canonically normalized.

    Coefficients are coprime integers with the first nonzero one positive;
    two proportional input forms therefore normalize to the same object.
    """

    coeffs: tuple[int, ...]

    @staticmethod
    def make(coeffs: Sequence[Rat | int | str]) -> "ProjForm":
        values = [rat_from_str(c) if isinstance(c, str) else Fraction(c) for c in coeffs]
        if all(v == 0 for v in values):
            raise ArrgmError("zero form is not a hyperplane")
        denom = 1
        for v in values:
            denom = denom * v.denominator // math.gcd(denom, v.denominator)
        ints = [int(v * denom) for v in values]
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        ints = [x // g for x in ints]
        first = next(x for x in ints if x != 0)
        if first < 0:
            ints = [-x for x in ints]
        return ProjForm(tuple(ints))

    def evaluate(self, point: Sequence[Rat]) -> Rat:
        return sum((Fraction(c) * Fraction(p) for c, p in zip(self.coeffs, point)), Fraction(0))

    def to_json(self) -> list[str]:
        return [rat_to_str(Fraction(c)) for c in self.coeffs]

    def __str__(self) -> str:
        names = [f"z{i}" for i in range(len(self.coeffs))]
        return format_linear(self.coeffs, names)


def format_linear(coeffs: Sequence[int], names: Sequence[str]) -> str:
    parts: list[str] = []
    for c, name in zip(coeffs, names):
        if c == 0:
            continue
        if c == 1:
            term = name
        elif c == -1:
            term = f"-{name}"
        else:
            term = f"{c}*{name}"
        if parts and not term.startswith("-"):
            parts.append(f"+{term}")
        else:
            parts.append(term)
    return "".join(parts) or "0"


@dataclass(frozen=True)
class Arrangement:
    """Ordered projective arrangement with a designated hyperplane at infinity."""

    n: int
    hyperplanes: tuple[ProjForm, ...]
    infinity_index: int

    @property
    def size(self) -> int:
        return len(self.hyperplanes)

    @property
    def finite_indices(self) -> list[int]:
        return [i for i in range(self.size) if i != self.infinity_index]

    def form_rows(self, indices: Iterable[int]) -> list[list[Fraction]]:
        return [[Fraction(c) for c in self.hyperplanes[i].coeffs] for i in indices]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "hyperplanes": [h.to_json() for h in self.hyperplanes],
            "infinity": self.infinity_index,
        }

    @staticmethod
    def from_json(data: dict) -> "Arrangement":
        return validate(
            [ProjForm.make(row) for row in data["hyperplanes"]],
            data.get("infinity", 0),
            n=data.get("n"),
        )


def validate(forms: Sequence[ProjForm], infinity_index: int, n: int | None = None) -> Arrangement:
    """Check and normalize raw input into an :class:`Arrangement`.

    Preserves the user's hyperplane order.  Raises
    :class:`DuplicateHyperplaneError` for proportional pairs and
    :class:`LeadingFrameError` when the leading min(size, n+1) forms are
    linearly dependent.
    """
    if not forms:
        raise ArrgmError("an arrangement needs at least one hyperplane")
    width = len(forms[0].coeffs)
    if any(len(f.coeffs) != width for f in forms):
        raise ArrgmError("all forms must have the same number of coordinates")
    dim = width - 1 if n is None else n
    if dim != width - 1:
        raise ArrgmError(f"forms have {width} coordinates but n={dim} was declared")
    seen: dict[tuple[int, ...], int] = {}
    for i, f in enumerate(forms):
        if f.coeffs in seen:
            raise DuplicateHyperplaneError(seen[f.coeffs], i)
        seen[f.coeffs] = i
    leading = min(len(forms), dim + 1)
    lead_rows = [[Fraction(c) for c in forms[i].coeffs] for i in range(leading)]
    if matrix_rank(lead_rows) < leading:
        raise LeadingFrameError(f"leading {leading} forms are linearly dependent")
    if not 0 <= infinity_index < len(forms):
        raise ArrgmError(f"infinity index {infinity_index} out of range")
    return Arrangement(dim, tuple(forms), infinity_index)


# ---------------------------------------------------------------------------
# coning and deconing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineForm:
    """Affine-linear function ``constant + sum lin[i] * x_{i+1}`` on C^n."""

    constant: Fraction
    lin: tuple[Fraction, ...]

    @staticmethod
    def make(constant: Rat | int, lin: Sequence[Rat | int]) -> "AffineForm":
        return AffineForm(Fraction(constant), tuple(Fraction(c) for c in lin))

    def evaluate(self, point: Sequence[Rat]) -> Fraction:
        return self.constant + sum(
            (c * Fraction(p) for c, p in zip(self.lin, point)), Fraction(0)
        )

    def __str__(self) -> str:
        coeffs = [self.constant] + list(self.lin)
        names = ["1"] + [f"x{i}" for i in range(1, len(self.lin) + 1)]
        parts = []
        for c, name in zip(coeffs, names):
            if c == 0:
                continue
            if name == "1":
                parts.append(rat_to_str(c))
                continue
            if c == 1:
                term = name
            elif c == -1:
                term = f"-{name}"
            else:
                term = f"{rat_to_str(c)}*{name}"
            if parts and not term.startswith("-"):
                parts.append(f"+{term}")
            else:
                parts.append(term)
        return "".join(parts) or "0"


def cone(n: int, affine_forms: Sequence[AffineForm]) -> Arrangement:
    """Homogenize an affine arrangement, prepending the infinity hyperplane z0."""
    forms = [ProjForm.make([1] + [0] * n)]
    for f in affine_forms:
        forms.append(ProjForm.make([f.constant, *f.lin]))
    return validate(forms, 0, n=n)


def decone(arr: Arrangement) -> list[AffineForm]:
    """Affine forms of the finite hyperplanes in the chart of the infinity hyperplane.

    The infinity hyperplane must be a coordinate hyperplane z_j; the affine
    coordinates are the remaining z_i in order, scaled by 1/z_j.
    """
    inf_form = arr.hyperplanes[arr.infinity_index]
    nonzero = [i for i, c in enumerate(inf_form.coeffs) if c != 0]
    if len(nonzero) != 1:
        raise ArrgmError(
            "decone requires the infinity hyperplane to be a coordinate hyperplane"
        )
    drop = nonzero[0]
    out = []
    for i in arr.finite_indices:
        coeffs = arr.hyperplanes[i].coeffs
        constant = Fraction(coeffs[drop])
        lin = [Fraction(c) for j, c in enumerate(coeffs) if j != drop]
        out.append(AffineForm(constant, tuple(lin)))
    return out


# ---------------------------------------------------------------------------
# intersection semi-lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Flat:
    """Nonempty projective intersection with closed support and rank."""

    support: tuple[int, ...]
    rank: int
    closure_witness: tuple[tuple[Rat, ...], ...]  # echelon basis of the solution space


@dataclass(frozen=True)
class Lattice:
    """Flats grouped by rank with cover relations of the reverse-inclusion order."""

    flats: tuple[Flat, ...]
    covers: tuple[tuple[int, int], ...]  # (lower, upper) indices into ``flats``

    def level(self, rank: int) -> list[Flat]:
        return [f for f in self.flats if f.rank == rank]

    def to_json(self) -> dict:
        return {
            "flats": [
                {"support": list(f.support), "rank": f.rank} for f in self.flats
            ],
            "covers": [list(c) for c in self.covers],
        }


def _echelon_basis(vectors: list[list[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical (reduced echelon) basis of the span of the given vectors."""
    if not vectors:
        return ()
    rows = [list(v) for v in vectors]
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r])


def _flat_from_support(arr: Arrangement, support: Iterable[int]) -> Flat | None:
    """Close a support set; None when the intersection is empty in P^n."""
    support = sorted(set(support))
    if not support:
        basis = _echelon_basis([
            [Fraction(1) if i == j else Fraction(0) for j in range(arr.n + 1)]
            for i in range(arr.n + 1)
        ])
        return Flat((), 0, basis)
    kernel = nullspace(arr.form_rows(support))
    if not kernel:
        return None  # empty projective intersection
    closed = [
        i for i in range(arr.size)
        if all(arr.hyperplanes[i].evaluate(vec) == 0 for vec in kernel)
    ]
    rank = arr.n + 1 - len(kernel)
    return Flat(tuple(closed), rank, _echelon_basis([list(v) for v in kernel]))


def lattice(arr: Arrangement) -> Lattice:
    """All nonempty intersections, computed by iterative closure.

    Starts from the ambient space and the hyperplanes, then repeatedly
    intersects known flats with single hyperplanes, closing and deduplicating
    by support.  Flats are listed by rank, then lexicographically by support.
    """
    found: dict[tuple[int, ...], Flat] = {}
    ambient = _flat_from_support(arr, [])
    assert ambient is not None
    found[ambient.support] = ambient
    frontier = [ambient]
    while frontier:
        new_frontier = []
        for flat in frontier:
            for i in range(arr.size):
                if i in flat.support:
                    continue
                candidate = _flat_from_support(arr, list(flat.support) + [i])
                if candidate is None or candidate.support in found:
                    continue
                found[candidate.support] = candidate
                new_frontier.append(candidate)
        frontier = new_frontier
    flats = tuple(sorted(found.values(), key=lambda f: (f.rank, f.support)))
    index = {f.support: k for k, f in enumerate(flats)}
    covers = []
    for f in flats:
        for g in flats:
            if g.rank == f.rank + 1 and set(f.support) <= set(g.support):
                covers.append((index[f.support], index[g.support]))
    return Lattice(flats, tuple(covers))


def bad_loci(arr: Arrangement) -> list[Flat]:
    """Flats with more hyperplanes through them than their codimension.

    These are exactly the non-normal-crossing strata; equivalently the flats
    whose support contains a circuit.
    """
    return [f for f in lattice(arr).flats if len(f.support) > f.rank]


# ---------------------------------------------------------------------------
# discriminant of the moving hyperplane
# ---------------------------------------------------------------------------

def discriminant(arr: Arrangement) -> list[ProjForm]:
    """Components of the locus in dual space where the moving hyperplane degenerates.

    For every n-subset of hyperplanes with independent forms, stack their
    coefficient rows with the symbolic dual row (h0..hn) and take the
    determinant: a linear form in h that vanishes exactly when the moving
    hyperplane passes through the subset's intersection point.  Components
    are normalized, deduplicated and sorted canonically.
    """
    n = arr.n
    seen: set[tuple[int, ...]] = set()
    out: list[ProjForm] = []
    for subset in itertools.combinations(range(arr.size), n):
        rows = arr.form_rows(subset)
        if matrix_rank(rows) < n:
            continue
        coeffs = []
        for k in range(n + 1):
            minor = [[row[j] for j in range(n + 1) if j != k] for row in rows]
            coeffs.append((-1) ** (n + k) * _det(minor))
        form = ProjForm.make(coeffs)
        if form.coeffs not in seen:
            seen.add(form.coeffs)
            out.append(form)
    out.sort(key=lambda f: f.coeffs)
    return out


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            factor = m[i][c] / m[c][c]
            m[i] = [x - factor * y for x, y in zip(m[i], m[c])]
    return det
