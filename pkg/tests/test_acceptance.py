"""Acceptance criteria, one test per criterion (run with -v for the per-criterion lines).

Criteria 3 and 4 compare the computed connection matrices entry by entry
against the published tables embedded in ``arrgm.fixtures``.  Independent
verification (the n = 1 period oracle of criterion 5, a two-point
hypergeometric oracle, and a 2-D quadrature oracle run during development)
shows those tables drop the moving residue ``ah`` on a few diagonal entries,
so the two comparisons fail exactly there; the failure messages list every
deviating entry.  All other criteria pass.
"""

from __future__ import annotations

import functools
import itertools
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest

from arrgm._sampling import RatSampler
from arrgm.arrangement import ProjForm, discriminant, format_linear, validate
from arrgm.aomoto import (
    FiberContext,
    RatForm,
    Weights,
    cohomology_dims,
    log_comb_evaluate,
    reduce_rational_form,
    validate_weights,
)
from arrgm.exactnum import WeightExpr, WeightPoly
from arrgm.fixtures import ceva, example1
from arrgm.gaussmanin import MovingFamily, flatness_check, gm_matrix
from arrgm.matroid import MatroidContext
from arrgm.monodromy import monodromy, projector_structure
from arrgm.osalg import ExtElem, OSContext, boundary


def criterion(number: int, label: str):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            started = time.monotonic()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {number} [{label}]: FAIL", file=sys.stderr)
                raise
            elapsed = time.monotonic() - started
            print(
                f"criterion {number} [{label}]: PASS ({elapsed:.2f}s)", file=sys.stderr
            )

        return wrapper

    return decorate


@pytest.fixture(scope="module")
def conn_example1():
    return gm_matrix(MovingFamily(example1().arrangement))


@pytest.fixture(scope="module")
def conn_ceva():
    return gm_matrix(MovingFamily(ceva().arrangement))


@criterion(1, "combinatorics goldens")
def test_criterion_1_combinatorics():
    started = time.monotonic()
    fx = ceva()
    ctx = MatroidContext(fx.arrangement)
    short_circuits = [c.support for c in ctx.circuits() if len(c.support) <= 3]
    assert short_circuits == [(0, 1, 3), (0, 2, 4), (1, 2, 5), (3, 4, 5)]
    assert tuple(ctx.nbc_sets(2)) == fx.nbc
    broken = {(b.support, b.princ) for b in ctx.broken_circuits()}
    assert ((2, 5), 1) in broken and ((4, 5), 3) in broken
    os_ctx = OSContext(fx.arrangement, ctx)
    generators = os_ctx.relation_basis()
    elements = {g.subset: g.element for g in generators}
    assert set(elements) == {(1, 3), (2, 4), (2, 5), (4, 5)}
    assert elements[(1, 3)] == ExtElem.monomial((1, 3))
    assert elements[(2, 4)] == ExtElem.monomial((2, 4))
    assert elements[(2, 5)] == boundary(ExtElem.monomial((1, 2, 5)))
    assert elements[(4, 5)] == boundary(ExtElem.monomial((3, 4, 5)))
    assert tuple(MatroidContext(example1().arrangement).nbc_sets(2)) == example1().nbc
    assert time.monotonic() - started < 1.0


@criterion(2, "discriminants")
def test_criterion_2_discriminants():
    started = time.monotonic()
    got1 = discriminant(example1().arrangement)
    assert len(got1) == 6 and set(got1) == set(example1().discriminant)
    got2 = discriminant(ceva().arrangement)
    assert len(got2) == 7 and set(got2) == set(ceva().discriminant)
    assert time.monotonic() - started < 1.0


def _connection_mismatches(fixture, conn) -> list[str]:
    names = [f"h{i}" for i in range(fixture.arrangement.n + 1)]
    lines = []
    for comp in conn.components:
        published = fixture.residues.get(comp.form)
        if published is None:
            lines.append(f"component {format_linear(comp.form.coeffs, names)} missing")
            continue
        for i in range(conn.size):
            for j in range(conn.size):
                if comp.residue[i][j] != published[i][j]:
                    lines.append(
                        f"{format_linear(comp.form.coeffs, names)}[{i + 1}][{j + 1}]: "
                        f"computed {comp.residue[i][j]} vs published {published[i][j]}"
                    )
    return lines


@criterion(3, "connection matrix, example1 vs published tables")
def test_criterion_3_gauss_manin_example1():
    started = time.monotonic()
    conn = gm_matrix(MovingFamily(example1().arrangement))
    assert time.monotonic() - started < 30.0
    assert conn.basis == example1().nbc
    mismatches = _connection_mismatches(example1(), conn)
    assert not mismatches, (
        "computed connection deviates from the published residue tables on "
        f"{len(mismatches)} entries (adjudicated against independent period "
        "oracles; see notes/decisions ledger):\n  " + "\n  ".join(mismatches)
    )


@criterion(4, "connection matrix, ceva vs published columns")
def test_criterion_4_gauss_manin_ceva():
    started = time.monotonic()
    conn = gm_matrix(MovingFamily(ceva().arrangement))
    assert time.monotonic() - started < 300.0
    assert conn.basis == ceva().nbc
    mismatches = _connection_mismatches(ceva(), conn)
    assert not mismatches, (
        "computed connection deviates from the published columns on "
        f"{len(mismatches)} entries (adjudicated against independent period "
        "oracles; see notes/decisions ledger):\n  " + "\n  ".join(mismatches)
    )


@criterion(5, "independent period oracle, n = 1")
def test_criterion_5_period_oracle():
    mpmath = pytest.importorskip("mpmath")
    started = time.monotonic()
    arr = validate([ProjForm.make([1, 0]), ProjForm.make([0, 1])], 0)
    conn = gm_matrix(MovingFamily(arr))
    # symbolic connection: -a1 dlog l + a1 dlog h0
    assert [c.form for c in conn.components] == [ProjForm.make([0, 1]), ProjForm.make([1, 0])]
    assert conn.components[0].residue == ((WeightExpr.make(0, {"a1": -1}),),)
    assert conn.components[1].residue == ((WeightExpr.make(0, {"a1": 1}),),)

    a1, ah = F(1, 3), F(-1, 5)
    entry = conn.components[0].residue[0][0].evaluate({"a1": a1, "ah": ah})

    mp = mpmath.mp
    old = mp.dps
    mp.dps = 25
    try:
        fa1, fah = mpmath.mpf(1) / 3, mpmath.mpf(-1) / 5

        def period(l):
            # cycle from x = 0 to x = -1/l, parametrized x = -t/l
            return mpmath.quad(
                lambda t: (t / l) ** fa1 * (1 - t) ** fah / t, [0, 1]
            )

        l0 = mpmath.mpf(2)
        h = mpmath.mpf("1e-5")
        dlog = (mpmath.log(period(l0 + h)) - mpmath.log(period(l0 - h))) / (2 * h)
        predicted = mpmath.mpf(entry.numerator) / entry.denominator / l0
        assert abs(dlog - predicted) <= 1e-6 * abs(dlog)
    finally:
        mp.dps = old
    assert time.monotonic() - started < 10.0


def _random_generic_weights(fixture, sampler: RatSampler) -> Weights:
    finite = fixture.arrangement.finite_indices
    from arrgm.arrangement import bad_loci

    flats = bad_loci(fixture.arrangement)
    while True:
        values = {i: sampler.rational(9, 11) for i in finite}
        ah = sampler.rational(9, 11)
        w = Weights.make(values, ah)
        if ah == 0:
            continue
        if validate_weights(fixture.arrangement, w, bad_flats=flats).ok:
            return w


@criterion(6, "structural invariants")
def test_criterion_6_structural_invariants(conn_example1, conn_ceva):
    for fixture, conn in ((example1(), conn_example1), (ceva(), conn_ceva)):
        started = time.monotonic()
        # residue matrices sum to zero
        zero = WeightExpr.constant(0)
        for i in range(conn.size):
            for j in range(conn.size):
                total = zero
                for comp in conn.components:
                    total = total + comp.residue[i][j]
                assert total == zero
        # flatness: symbolic for the small connection, numeric for the larger
        symbolic = fixture.name == "example1"
        report = flatness_check(
            conn, fixture.arrangement, trials=5, symbolic=symbolic
        )
        assert report.ok, report.witness
        # boundary squares to zero on random elements
        sampler = RatSampler(101 + conn.size)
        for _ in range(5):
            terms = {}
            for _ in range(4):
                size = sampler.integer(1, 4)
                tup = tuple(sorted(set(sampler.integer(1, 9) for _ in range(size))))
                terms[tup] = sampler.rational(9, 4)
            assert boundary(boundary(ExtElem.make(terms))).is_zero
        # normal form idempotence
        ctx = OSContext(fixture.arrangement)
        pairs = list(itertools.combinations(fixture.arrangement.finite_indices, 2))
        for _ in range(5):
            elem = ExtElem.make(
                {p: sampler.rational(9, 4) for p in pairs if sampler.integer(0, 1)}
            )
            once = ctx.normal_form(elem)
            assert ctx.normal_form(once) == once
        # relation-count identity
        import math

        m = len(fixture.arrangement.finite_indices)
        n = fixture.arrangement.n
        assert len(ctx.relation_basis()) == math.comb(m, n) - len(fixture.nbc)
        # twisted cohomology dimensions at 10 random generic weight settings
        fiber = FiberContext(fixture.arrangement, [F(9, 2), F(13, 3)])
        for _ in range(10):
            w = _random_generic_weights(fixture, sampler)
            dims = cohomology_dims(fiber, w)
            assert dims == [0] * n + [len(fixture.nbc)]
        assert time.monotonic() - started < 60.0


@criterion(7, "monodromy closed forms on the published residues")
def test_criterion_7_monodromy():
    started = time.monotonic()
    fx = example1()
    assignment = {
        "a1": F(1, 3), "a2": F(1, 7), "a3": F(1, 5), "ah": F(-1, 2),
    }
    for form, matrix in fx.residues.items():
        trace = projector_structure(matrix)
        assert trace is not None
        assert trace == fx.traces[form]
        closed = monodromy(matrix, assignment, mode="closed_form")
        numeric = monodromy(matrix, assignment, mode="numeric")
        assert np.max(np.abs(closed.matrix - numeric.matrix)) <= 1e-10
        det = np.linalg.det(numeric.matrix)
        expected = np.exp(-2j * np.pi * float(trace.evaluate(assignment)))
        assert abs(det - expected) <= 1e-9
    assert time.monotonic() - started < 5.0


@criterion(8, "randomized reduction oracle")
def test_criterion_8_reduction_oracle():
    started = time.monotonic()
    fiber = FiberContext(example1().arrangement, [F(2), F(3)])
    sampler = RatSampler(0xBEEF)
    finite = fiber.finite_indices
    n = fiber.n
    checked = 0
    while checked < 200:
        size = sampler.integer(n, len(finite))
        poles = set()
        while len(poles) < size:
            poles.add(finite[sampler.integer(0, len(finite) - 1)])
        poles = tuple(sorted(poles))
        max_degree = size - n
        terms = {}
        for e1 in range(max_degree + 1):
            for e2 in range(max_degree + 1 - e1):
                if sampler.integer(0, 2) == 0:
                    continue
                mono = tuple(
                    (sym, e) for sym, e in (("x1", e1), ("x2", e2)) if e > 0
                )
                terms[mono] = sampler.rational(9, 5)
        numerator = WeightPoly.make(terms)
        if numerator.is_zero:
            continue
        form = RatForm.make(numerator, poles, n)
        reduced = reduce_rational_form(form, fiber)
        points = 0
        while points < 3:
            point = (sampler.rational(30, 7), sampler.rational(30, 7))
            if any(fiber.affine[i].evaluate(point) == 0 for i in finite):
                continue
            assert form.evaluate(fiber, point) == log_comb_evaluate(
                fiber, reduced, point
            )
            points += 1
        checked += 1
    assert time.monotonic() - started < 30.0
