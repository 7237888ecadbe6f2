"""Batch command-line front end.

Subcommands cover every pipeline stage: ``lattice``, ``bad-loci``,
``circuits``, ``nbc``, ``os-relations``, ``aomoto-dims``, ``discriminant``,
``gauss-manin``, ``monodromy`` and ``verify-paper``.  Input files are JSON;
the arrangement argument also accepts the names of the two built-in example
families (``example1``, ``ceva``).  All sampling flows through one seeded
generator, so identical invocations produce byte-identical output.

Exit codes: 0 success, 2 validation failure, 3 resonance, 4 internal
consistency failure.  Errors are also emitted as machine-readable JSON on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from . import fixtures as fixture_mod
from .arrangement import (
    Arrangement,
    ProjForm,
    bad_loci,
    discriminant,
    format_linear,
    lattice,
)
from .aomoto import FiberContext, Weights, cohomology_dims
from .errors import (
    ArrgmError,
    ConnectionFitError,
    NotLogarithmicError,
    ResonantResidueError,
    ResonantWeightsError,
    SampleRejectedError,
)
from .exactnum import rat_from_str, rat_to_str
from .gaussmanin import DEFAULT_SEED, GMConnection, MovingFamily, flatness_check, gm_matrix
from .matroid import MatroidContext
from .monodromy import monodromy, projector_structure, residue_of
from .osalg import OSContext

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESONANCE = 3
EXIT_INTERNAL = 4


def _h_names(count: int) -> list[str]:
    return [f"h{i}" for i in range(count)]


def load_arrangement(spec: str) -> Arrangement:
    builtin = fixture_mod.fixtures()
    if spec in builtin:
        return builtin[spec].arrangement
    with open(spec, "r", encoding="utf-8") as handle:
        return Arrangement.from_json(json.load(handle))


def load_weights(spec: str) -> Weights | None:
    if spec == "symbolic":
        return None
    with open(spec, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    a = {int(k): rat_from_str(v) for k, v in data.get("a", {}).items()}
    ah = data.get("ah")
    return Weights.make(a, None if ah is None else rat_from_str(ah))


def _emit(args, payload: dict, text: str) -> None:
    content = json.dumps(payload, indent=2, sort_keys=True) if args.format == "json" else text
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(content + "\n")
    else:
        print(content)


def _connection_text(conn: GMConnection, n: int) -> str:
    """Human-readable rendering with dlog brackets [df/f - dh0/h0]."""
    names = _h_names(n + 1)
    h0 = format_linear(conn.components[-1].form.coeffs, names)
    lines = ["basis: " + ", ".join("e" + "".join(map(str, b)) for b in conn.basis)]
    size = conn.size
    for i in range(size):
        for j in range(size):
            parts = []
            for comp in conn.components[:-1]:
                entry = comp.residue[i][j]
                if entry.is_constant and entry.const == 0:
                    continue
                fname = format_linear(comp.form.coeffs, names)
                parts.append(f"({entry})[d({fname})/({fname}) - d({h0})/({h0})]")
            label = " + ".join(parts) if parts else "0"
            lines.append(f"entry[{i + 1}][{j + 1}] = {label}")
    return "\n".join(lines)


def cmd_lattice(args) -> int:
    arr = load_arrangement(args.arrangement)
    lat = lattice(arr)
    text = "\n".join(
        f"rank {f.rank}: {{{', '.join(map(str, f.support))}}}" for f in lat.flats
    )
    _emit(args, lat.to_json(), text)
    return EXIT_OK


def cmd_bad_loci(args) -> int:
    arr = load_arrangement(args.arrangement)
    flats = bad_loci(arr)
    payload = {"bad_loci": [{"support": list(f.support), "rank": f.rank} for f in flats]}
    text = "\n".join(f"rank {f.rank}: {{{', '.join(map(str, f.support))}}}" for f in flats) or "none"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_circuits(args) -> int:
    arr = load_arrangement(args.arrangement)
    ctx = MatroidContext(arr)
    payload = {"circuits": [c.to_json() for c in ctx.circuits()]}
    text = "\n".join(
        "{" + ", ".join(map(str, c.support)) + "}: "
        + " ".join(rat_to_str(d) for d in c.dependency)
        for c in ctx.circuits()
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_nbc(args) -> int:
    arr = load_arrangement(args.arrangement)
    ctx = MatroidContext(arr)
    bases = ctx.nbc_sets(arr.n)
    payload = {"nbc_bases": [list(b) for b in bases]}
    text = "\n".join("{" + ", ".join(map(str, b)) + "}" for b in bases)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_os_relations(args) -> int:
    arr = load_arrangement(args.arrangement)
    ctx = OSContext(arr)
    generators = ctx.relation_basis()
    payload = {
        "relations": [
            {"kind": g.kind, "subset": list(g.subset), "element": g.element.to_json()}
            for g in generators
        ]
    }
    text = "\n".join(f"[{g.kind}] {g.element}" for g in generators) or "none"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_discriminant(args) -> int:
    arr = load_arrangement(args.arrangement)
    comps = discriminant(arr)
    names = _h_names(arr.n + 1)
    payload = {"components": [c.to_json() for c in comps]}
    text = "\n".join(format_linear(c.coeffs, names) for c in comps)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_aomoto_dims(args) -> int:
    arr = load_arrangement(args.arrangement)
    weights = load_weights(args.weights)
    if weights is None:
        raise ArrgmError("aomoto-dims needs numeric weights")
    if weights.ah is not None:
        from ._sampling import RatSampler

        comps = discriminant(arr)
        from .gaussmanin import _affine_component

        affine = [_affine_component(c, arr) for c in comps]
        sampler = RatSampler(args.seed)
        point = None
        for _ in range(400):
            cand = tuple(sampler.rational(24, 7) for _ in range(arr.n))
            if all(f.evaluate(cand) != 0 for f in affine):
                point = cand
                break
        if point is None:
            raise SampleRejectedError("no off-discriminant parameter point found")
        fiber = FiberContext(arr, point)
    else:
        fiber = FiberContext(arr, None)
    dims = cohomology_dims(fiber, weights)
    payload = {"dims": dims}
    _emit(args, payload, " ".join(map(str, dims)))
    return EXIT_OK


def cmd_gauss_manin(args) -> int:
    arr = load_arrangement(args.arrangement)
    weights = load_weights(args.weights)
    family = MovingFamily(arr, weights, seed=args.seed)
    conn = gm_matrix(family)
    _emit(args, conn.to_json(), _connection_text(conn, arr.n))
    return EXIT_OK


def cmd_monodromy(args) -> int:
    arr = load_arrangement(args.arrangement)
    weights = load_weights(args.weights)
    if weights is None:
        raise ArrgmError("monodromy needs numeric weights")
    component = ProjForm.make([rat_from_str(c) for c in args.component.split(",")])
    family = MovingFamily(arr, None, seed=args.seed)
    conn = gm_matrix(family)
    matrix = residue_of(conn, component)
    result = monodromy(matrix, conn.assignment_for(weights), mode=args.mode)
    payload = result.to_json()
    text_rows = [
        "  ".join(f"{z.real:+.12f}{z.imag:+.12f}j" for z in row) for row in result.matrix
    ]
    _emit(args, payload, f"method: {result.method}\n" + "\n".join(text_rows))
    return EXIT_OK


def _verify_combinatorics(fixture, report: list[str]) -> int:
    arr = fixture.arrangement
    failures = 0
    ctx = MatroidContext(arr)
    nbc = tuple(ctx.nbc_sets(arr.n))
    if nbc == fixture.nbc:
        report.append(f"PASS nbc basis ({len(nbc)} elements)")
    else:
        failures += 1
        report.append(f"FAIL nbc basis: computed {nbc} expected {fixture.nbc}")
    comps = tuple(discriminant(arr))
    if set(comps) == set(fixture.discriminant):
        report.append(f"PASS discriminant ({len(comps)} components)")
    else:
        failures += 1
        report.append("FAIL discriminant component set")
    return failures


def _verify_connection(fixture, conn: GMConnection, report: list[str]) -> tuple[int, int]:
    names = _h_names(fixture.arrangement.n + 1)
    mism = 0
    known = 0
    total = 0
    for comp in conn.components:
        printed = fixture.residues.get(comp.form)
        if printed is None:
            report.append(
                f"FAIL component {format_linear(comp.form.coeffs, names)} missing in reference"
            )
            mism += 1
            continue
        size = conn.size
        for i in range(size):
            for j in range(size):
                total += 1
                if comp.residue[i][j] == printed[i][j]:
                    continue
                delta = comp.residue[i][j] - printed[i][j]
                expected = fixture.known_deviations.get((comp.form, i, j))
                tag = "known deviation" if expected == delta else "UNEXPECTED"
                report.append(
                    f"MISMATCH [{tag}] {format_linear(comp.form.coeffs, names)}"
                    f"[{i + 1}][{j + 1}]: computed {comp.residue[i][j]}"
                    f" vs published {printed[i][j]}"
                )
                if expected == delta:
                    known += 1
                else:
                    mism += 1
    return mism, known


def cmd_verify_paper(args) -> int:
    fixture = fixture_mod.fixtures()[args.fixture]
    arr = fixture.arrangement
    report: list[str] = []
    failures = _verify_combinatorics(fixture, report)

    family = MovingFamily(arr, None, seed=args.seed)
    conn = gm_matrix(family)
    unexpected, known = _verify_connection(fixture, conn, report)
    if unexpected == 0 and known == 0:
        report.append(f"PASS residue matrices ({len(conn.components)} components)")
    elif unexpected == 0:
        report.append(
            f"NOTE residue matrices: {known} entries deviate from the published tables "
            "exactly as the independent period oracle predicts (published tables drop "
            "the moving residue ah on those diagonals); all other entries match"
        )
    flat = flatness_check(conn, arr, trials=5, symbolic=conn.size <= 8)
    if flat.ok:
        report.append("PASS flatness (curvature vanishes exactly)")
    else:
        failures += 1
        report.append(f"FAIL flatness: {flat.witness}")

    assignment = conn.assignment_for(fixture.monodromy_weights)
    mono_fail = 0
    for form, matrix in fixture.residues.items():
        structure = projector_structure(matrix)
        if structure is None:
            mono_fail += 1
            report.append(
                f"FAIL projector structure on published residue {format_linear(form.coeffs, _h_names(arr.n + 1))}"
            )
            continue
        result = monodromy(matrix, assignment, mode="both")
        if result.method != "both":
            mono_fail += 1
            report.append("FAIL monodromy cross-check")
    if mono_fail == 0:
        report.append(
            f"PASS monodromy closed forms ({len(fixture.residues)} published residues)"
        )
    failures += mono_fail

    ok = failures == 0 and unexpected == 0
    header = (
        f"verify {args.fixture}: "
        + ("PASS" if ok and known == 0 else "PASS with known deviations" if ok else "FAIL")
    )
    print(header)
    for line in report:
        print("  " + line)
    if not ok:
        return EXIT_INTERNAL
    return EXIT_OK if known == 0 else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arrgm",
        description="Exact arrangement combinatorics, twisted cohomology, "
        "connection matrices and monodromy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, weights_default=None):
        p.add_argument(
            "--arrangement",
            required=True,
            help="JSON file or built-in fixture name (example1, ceva)",
        )
        if weights_default is not None:
            p.add_argument("--weights", default=weights_default, help="JSON file or 'symbolic'")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--output", default=None)

    for name, func in [
        ("lattice", cmd_lattice),
        ("bad-loci", cmd_bad_loci),
        ("circuits", cmd_circuits),
        ("nbc", cmd_nbc),
        ("os-relations", cmd_os_relations),
        ("discriminant", cmd_discriminant),
    ]:
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("aomoto-dims")
    common(p, weights_default="symbolic")
    p.set_defaults(func=cmd_aomoto_dims)

    p = sub.add_parser("gauss-manin")
    common(p, weights_default="symbolic")
    p.set_defaults(func=cmd_gauss_manin)

    p = sub.add_parser("monodromy")
    common(p, weights_default="symbolic")
    p.add_argument(
        "--component",
        required=True,
        help="dual-space form as comma-separated rationals, e.g. '1,-1,0' for h0-h1",
    )
    p.add_argument("--mode", choices=["closed_form", "numeric", "both"], default="both")
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("verify-paper")
    p.add_argument("fixture", choices=["example1", "ceva"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify_paper)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ResonantWeightsError, ResonantResidueError) as exc:
        _error(exc, EXIT_RESONANCE)
        return EXIT_RESONANCE
    except (ConnectionFitError, NotLogarithmicError, SampleRejectedError) as exc:
        _error(exc, EXIT_INTERNAL)
        return EXIT_INTERNAL
    except (ArrgmError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _error(exc, EXIT_VALIDATION)
        return EXIT_VALIDATION


def _error(exc: Exception, code: int) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit": code}
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
