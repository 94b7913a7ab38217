"""Command-line surface: one JSON report per invocation.

Every subcommand prints a single report object to stdout — schema version
1, keys sorted — so identical argv (and seed) produce byte-identical
output.  ``--format text`` renders the same report as flat ``path = value``
lines, and ``--out`` additionally writes the rendered report to a file.

Exit codes: 0 for success, 2 when a validation or a verdict-style check
fails (the report is still emitted), 1 for parse and resource failures.
"""

from __future__ import annotations

import argparse
import cmath
import dataclasses
import json
import sys
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .caps import Caps, default_caps
from .characters import (
    CharacterTriple,
    ClassFunction,
    _match_to_table,
    character_orbit,
    conjugacy_classes,
    group_from_table,
    induced_trace,
    irreducible_characters,
    recover_triple,
    sample_ball,
    subquotient_A,
    trace_checks,
    validate_triple,
    word_ball,
)
from .dual import build_model, model_ideals
from .errors import (
    CapExceeded,
    FactorizationLimit,
    InexactDivision,
    NotInvertible,
    ParseError,
    ValidationError,
)
from .finiteness import (
    commensurable,
    compute_depth,
    finite_index_test,
    quotient_structure,
)
from .groups import elementary_congruence_group, elementary_group
from .ideals import (
    Ideal,
    Ring,
    ideal_equal,
    ideal_from_dict,
    ideal_intersect,
    ideal_product,
    ideal_quotient,
    ideal_sum,
    ideal_to_dict,
    load_ideal,
    ring_from_dict,
    ring_to_dict,
)
from .matgroup import (
    center_word,
    mat_identity,
    mat_inverse_unimodular,
    mat_mul,
    q_word_matrix,
    qmat_scalar,
    sl_level,
    sltil_level,
)
from .measures import annihilator_in_dual, classify_measures, fourier, haar, translate
from .quotients import QuotientContext
from .stable import normal_form_conjugate

SCHEMA = 1


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved per-invocation settings: caps plus presentation."""

    caps: Caps
    fmt: str
    out: Optional[str]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        caps = default_caps()
        overrides = {
            "max_gb_pairs": args.max_gb_pairs,
            "max_elements": args.max_elements,
            "entry_bound": args.entry_bound,
            "seed": args.seed,
            "dixon_tol": args.tol,
        }
        for name, value in overrides.items():
            if value is None:
                continue
            if name != "seed" and value <= 0:
                raise ValidationError(f"--{name.replace('_', '-')}: "
                                      "caps must be positive")
            setattr(caps, name, value)
        return cls(caps=caps, fmt=args.format, out=args.out)


# ---------------------------------------------------------------------------
# rendering


def _text_lines(value, path: str, lines: List[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            child = f"{path}.{key}" if path else str(key)
            _text_lines(value[key], child, lines)
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _text_lines(item, f"{path}[{i}]", lines)
    else:
        lines.append(f"{path} = {json.dumps(value)}")


def render_report(report: dict, fmt: str) -> str:
    if fmt == "text":
        lines: List[str] = []
        _text_lines(report, "", lines)
        return "\n".join(lines) + "\n"
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _ideal_display(ideal: Ideal) -> str:
    if not ideal.gens:
        return "(0)"
    return "(" + ", ".join(g.format(ideal.ring.order) for g in ideal.gens) + ")"


def _status_display(status: str) -> str:
    return status.replace("_", "-").capitalize()


def _error_report(exc: Exception) -> dict:
    return {
        "schema": SCHEMA,
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }


# ---------------------------------------------------------------------------
# file inputs


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return data


def _load_matrix(path: str) -> Tuple[Ring, Tuple[tuple, ...]]:
    """A matrix file: {"ring": {...}?, "rows": [[entry, ...], ...]} with
    integer or polynomial-string entries; the ring defaults to Z."""
    data = _load_json(path)
    ring = ring_from_dict(data.get("ring", {"vars": 0}))
    rows = data.get("rows")
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{path}: 'rows' must be a non-empty list")
    d = len(rows)
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != d:
            raise ParseError(f"{path}: 'rows' must form a square matrix")
        out.append(tuple(row))
    return ring, tuple(out)


def _require_integer_rows(rows) -> Tuple[Tuple[int, ...], ...]:
    for row in rows:
        for x in row:
            if not isinstance(x, int):
                raise ValidationError(
                    "this operation needs integer matrix entries")
    return tuple(tuple(row) for row in rows)


def triple_to_dict(triple: CharacterTriple, caps: Caps | None = None) -> dict:
    """Serialize a triple: ideals in their JSON form, characters as
    class-value arrays keyed by explicit class representatives."""
    data = {
        "schema": SCHEMA,
        "level": ideal_to_dict(triple.level),
        "kernel": ideal_to_dict(triple.kernel),
    }
    group = triple.subquotient
    if group is None:
        return data
    data["d"] = group.d
    classes = conjugacy_classes(group, caps)
    data["model"] = {
        "modulus": group.ctx.size,
        "classes": [list(cls[0]) for cls in classes],
        "orbit": [
            {"degree": f.degree, "values": [_pair(z) for z in f.values]}
            for f in triple.orbit
        ],
    }
    return data


def triple_from_dict(data: dict, caps: Caps | None = None) -> CharacterTriple:
    """Rebuild a triple from its JSON form.

    The finite model is re-derived from the modulus and the two ideals;
    the file's class representatives are matched against the freshly
    computed classes, so the value arrays survive any reordering.
    """
    for key in ("level", "kernel"):
        if key not in data:
            raise ParseError(f"triple JSON needs a '{key}' ideal")
    level = ideal_from_dict(data["level"])
    kernel = ideal_from_dict(data["kernel"])
    model = data.get("model")
    if model is None:
        return CharacterTriple(level, kernel, ())
    d = data.get("d")
    if not isinstance(d, int) or d < 2:
        raise ParseError("triple JSON needs an integer dimension 'd' >= 2")
    modulus = model.get("modulus")
    if not isinstance(modulus, int) or modulus < 2:
        raise ParseError("model 'modulus' must be an integer >= 2")
    ctx = QuotientContext.integers_mod(modulus)
    group, _ = subquotient_A(ctx, d, level, kernel, caps)
    classes = conjugacy_classes(group, caps)
    reps = model.get("classes")
    if not isinstance(reps, list) or len(reps) != len(classes):
        raise ValidationError(
            f"the model has {len(classes)} conjugacy classes, the file "
            f"lists {0 if not isinstance(reps, list) else len(reps)}")
    position = []
    for rep in reps:
        if not isinstance(rep, list) or len(rep) != d * d:
            raise ParseError(
                f"class representatives must be flat lists of {d * d} entries")
        flat = tuple(ctx.reduce(x) for x in rep)
        position.append(group.class_index(group.fold_of(flat)))
    if sorted(position) != list(range(len(classes))):
        raise ValidationError(
            "class representatives do not hit every class exactly once")
    orbit = []
    for entry in model.get("orbit", ()):
        degree = entry.get("degree")
        values = entry.get("values")
        if not isinstance(degree, int) or degree <= 0:
            raise ParseError("character 'degree' must be a positive integer")
        if not isinstance(values, list) or len(values) != len(classes):
            raise ParseError(
                "character 'values' must list one [re, im] pair per class")
        ordered = [0j] * len(classes)
        for file_index, pair in enumerate(values):
            ordered[position[file_index]] = complex(pair[0], pair[1])
        orbit.append(ClassFunction(values=tuple(ordered), degree=degree))
    return CharacterTriple(level, kernel, tuple(orbit), group)


def _load_triple(path: str, caps: Caps) -> CharacterTriple:
    return triple_from_dict(_load_json(path), caps)


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (exit code, report)


def _cmd_ring_eval(args, config: RunConfig):
    ring = Ring(args.vars, args.relations)
    value = ring.coerce(args.expr)
    report = {
        "schema": SCHEMA,
        "ring": ring_to_dict(ring),
        "value": value.format(ring.order),
    }
    return 0, report


def _two_ideals(args) -> Tuple[Ideal, Ideal]:
    a = load_ideal(args.ideal)
    b = load_ideal(args.other)
    if a.ring != b.ring:
        raise ValidationError("the two ideals live over different rings")
    return a, b


def _cmd_ideal_combine(args, config: RunConfig):
    a, b = _two_ideals(args)
    if args.verb == "sum":
        result = ideal_sum(a, b)
    elif args.verb == "intersect":
        result = ideal_intersect(a, b, config.caps)
    else:
        result = ideal_quotient(a, b, config.caps)
    report = {
        "schema": SCHEMA,
        "operation": args.verb,
        "result": ideal_to_dict(result),
        "display": _ideal_display(result),
    }
    return 0, report


def _cmd_ideal_equal(args, config: RunConfig):
    a, b = _two_ideals(args)
    report = {"schema": SCHEMA, "equal": ideal_equal(a, b, config.caps)}
    return 0, report


def _cmd_ideal_structure(args, config: RunConfig):
    ideal = load_ideal(args.ideal)
    verdict = finite_index_test(ideal, config.caps)
    report = {
        "schema": SCHEMA,
        "ideal": _ideal_display(ideal),
        "finite": verdict.finite,
        "cardinality": verdict.cardinality,
        "reason": verdict.reason,
    }
    if verdict.finite:
        report["invariant_factors"] = list(
            quotient_structure(ideal, config.caps).invariant_factors)
    return 0, report


def _cmd_depth_compute(args, config: RunConfig):
    ideal = load_ideal(args.ideal)
    depth, status = compute_depth(ideal, config.caps)
    report = {
        "schema": SCHEMA,
        "ideal": _ideal_display(ideal),
        "depth": _ideal_display(depth),
        "status": _status_display(status),
    }
    return 0, report


def _cmd_depth_commensurable(args, config: RunConfig):
    a, b = _two_ideals(args)
    report = {
        "schema": SCHEMA,
        "commensurable": commensurable(a, b, config.caps),
    }
    return 0, report


def _cmd_mat_level(args, config: RunConfig):
    ring, rows = _load_matrix(args.matrix)
    level = sl_level(rows, ring) if args.kind == "identity" else \
        sltil_level(rows, ring)
    report = {
        "schema": SCHEMA,
        "kind": args.kind,
        "level": _ideal_display(level),
        "generators": [g.format(ring.order) for g in level.gens],
    }
    return 0, report


def _cmd_mat_invert(args, config: RunConfig):
    _, rows = _load_matrix(args.matrix)
    mat = _require_integer_rows(rows)
    inverse = mat_inverse_unimodular(mat, config.caps)
    report = {
        "schema": SCHEMA,
        "inverse": [list(row) for row in inverse],
    }
    return 0, report


def _cmd_mat_normal_form(args, config: RunConfig):
    _, rows = _load_matrix(args.matrix)
    g = _require_integer_rows(rows)
    nf = normal_form_conjugate(g, config.caps)
    conj = mat_mul(mat_mul(mat_inverse_unimodular(nf.conjugator, config.caps),
                           g), nf.conjugator)
    exact = conj == nf.result
    report = {
        "schema": SCHEMA,
        "conjugator": [list(row) for row in nf.conjugator],
        "conjugator_word": [[i, j, r] for i, j, r in nf.conjugator_word],
        "parts": {
            name: [list(row) for row in getattr(nf, name)]
            for name in ("h", "v", "h_prime", "v_prime", "n")
        },
        "exact": exact,
    }
    return (0 if exact else 2), report


def _cmd_group_order(args, config: RunConfig):
    ctx = QuotientContext.integers_mod(args.mod)
    if args.level is None:
        table = elementary_group(ctx, args.d, config.caps)
    else:
        table = elementary_congruence_group(
            ctx, args.d, Ideal(Ring(0), [args.level]), config.caps)
    report = {
        "schema": SCHEMA,
        "modulus": args.mod,
        "d": args.d,
        "level": args.level,
        "order": len(table.elements),
    }
    return 0, report


def _cmd_group_center_word(args, config: RunConfig):
    ctx = QuotientContext.integers_mod(args.mod)
    word = center_word(ctx, args.d, args.unit % args.mod)
    report = {
        "schema": SCHEMA,
        "modulus": args.mod,
        "d": args.d,
        "unit": args.unit % args.mod,
        "letters": [[i, j, r] for i, j, r in word],
        "length": len(word),
    }
    return 0, report


def _cmd_measures_classify(args, config: RunConfig):
    ctx = QuotientContext.integers_mod(args.mod)
    outcome = classify_measures(ctx, args.d, config.caps)
    sizes = sorted(len(m.support()) for m in outcome.ergodic_measures)
    report = {
        "schema": SCHEMA,
        "modulus": args.mod,
        "d": args.d,
        "ergodic_count": len(outcome.ergodic_measures),
        "support_sizes": sizes,
        "orbit_count": len(outcome.orbits),
        "parameter_pairs": len(outcome.entries),
        "bijection_ok": outcome.bijection_ok,
    }
    return (0 if outcome.bijection_ok else 2), report


def _cmd_char_make_triple(args, config: RunConfig):
    caps = config.caps
    ring = Ring(0)
    level = Ideal(ring, [args.level])
    kernel = Ideal(ring, [args.kernel])
    ctx = QuotientContext.integers_mod(args.mod)
    group, _ = subquotient_A(ctx, args.d, level, kernel, caps)
    table = irreducible_characters(group, caps)
    if args.index is not None:
        if not 0 <= args.index < len(table):
            raise ValidationError(
                f"--index out of range; the table has {len(table)} rows")
        start = table[args.index]
    else:
        matches = [f for f in table if f.degree == args.degree]
        if not matches:
            raise ValidationError(
                f"no irreducible character of degree {args.degree}; "
                f"available degrees: {sorted({f.degree for f in table})}")
        start = matches[0]
    orbit = character_orbit(group, start, caps)
    triple = CharacterTriple(level, kernel, orbit, group)
    return 0, triple_to_dict(triple, caps)


def _cmd_char_validate(args, config: RunConfig):
    triple = _load_triple(args.triple, config.caps)
    outcome = validate_triple(triple, config.caps)
    report = {
        "schema": SCHEMA,
        "level": _ideal_display(triple.level),
        "kernel": _ideal_display(triple.kernel),
        "orbit_size": len(triple.orbit),
        "depth_ok": outcome.depth_ok,
        "depth_status": _status_display(outcome.depth_status),
        "depth_ideal": _ideal_display(outcome.depth_ideal),
        "orbit_ok": outcome.orbit_ok,
        "essential_ok": outcome.essential_ok,
        "passed": outcome.passed,
    }
    return (0 if outcome.passed else 2), report


def _induced_from_args(args, caps: Caps):
    triple = _load_triple(args.triple, caps)
    if triple.subquotient is None:
        raise ValidationError("the triple file carries no finite model")
    ball = word_ball(triple.level.ring, triple.subquotient.d, args.ball,
                     caps=caps)
    return triple, ball, induced_trace(triple, ball, caps)


def _cmd_char_induce(args, config: RunConfig):
    caps = config.caps
    triple, ball, phi = _induced_from_args(args, caps)
    sample = sample_ball(ball, args.sample, caps.seed)
    checks = trace_checks(phi, sample, caps)
    d = triple.subquotient.d
    e12 = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    e12[0][1] = 1
    e12_sq = [row[:] for row in e12]
    e12_sq[0][1] = 2
    checks_report = {}
    for field in dataclasses.fields(checks):
        value = getattr(checks, field.name)
        checks_report[field.name] = (
            _ideal_display(value) if isinstance(value, Ideal) else value)
    report = {
        "schema": SCHEMA,
        "level": _ideal_display(triple.level),
        "kernel": _ideal_display(triple.kernel),
        "orbit_size": len(triple.orbit),
        "ball": {"radius": ball.radius, "size": len(ball.elements)},
        "sample_size": len(sample),
        "seed": caps.seed,
        "probes": {
            "identity": _pair(phi.value(mat_identity(d))),
            "e12_1": _pair(phi.value(e12)),
            "e12_2": _pair(phi.value(e12_sq)),
        },
        "checks": checks_report,
        "passed": checks.passed,
    }
    return (0 if checks.passed else 2), report


def _cmd_char_recover(args, config: RunConfig):
    caps = config.caps
    triple, ball, phi = _induced_from_args(args, caps)
    recovered = recover_triple(phi, ball, caps)
    table = irreducible_characters(triple.subquotient, caps)
    declared = _match_to_table(triple.orbit, table, caps.dixon_tol)
    matches = (
        ideal_equal(recovered.level, triple.level, caps)
        and ideal_equal(recovered.kernel, triple.kernel, caps)
        and declared is not None
        and sorted(declared) == list(recovered.orbit_indices))
    report = {
        "schema": SCHEMA,
        "level": _ideal_display(recovered.level),
        "kernel": _ideal_display(recovered.kernel),
        "orbit_indices": list(recovered.orbit_indices),
        "matches_declared": matches,
    }
    return (0 if matches else 2), report


# ---------------------------------------------------------------------------
# selftest suites


def _suite_quick(caps: Caps) -> List[Tuple[str, Callable[[], bool]]]:
    zx = Ring(1)
    zz = Ring(0)

    def depth_x_squared() -> bool:
        depth, status = compute_depth(Ideal(zx, ["x^2"]), caps)
        return status == "certified" and ideal_equal(
            depth, Ideal(zx, ["x^2"]), caps)

    def depth_two_is_unit() -> bool:
        depth, status = compute_depth(Ideal(zz, [2]), caps)
        return status == "certified" and ideal_equal(depth, Ideal(zz, [1]),
                                                     caps)

    def colon_sandwich() -> bool:
        j, i = Ideal(zx, ["x^2"]), Ideal(zx, ["x"])
        q = ideal_quotient(j, i, caps)
        return (j.contains_ideal(ideal_product(i, q), caps)
                and q.contains_ideal(j, caps))

    def el2_f2_order() -> bool:
        ctx = QuotientContext.integers_mod(2)
        return len(elementary_group(ctx, 2, caps).elements) == 6

    def measures_mod2() -> bool:
        outcome = classify_measures(QuotientContext.integers_mod(2), 2, caps)
        sizes = sorted(len(m.support()) for m in outcome.ergodic_measures)
        return outcome.bijection_ok and sizes == [1, 3]

    return [
        ("depth-x-squared", depth_x_squared),
        ("depth-two-is-unit", depth_two_is_unit),
        ("colon-sandwich", colon_sandwich),
        ("el2-f2-order", el2_f2_order),
        ("measures-mod2-d2", measures_mod2),
    ]


def _suite_examples(caps: Caps) -> List[Tuple[str, Callable[[], bool]]]:
    """The curated worked examples, one check per named fact."""
    zx = Ring(1)
    zz = Ring(0)

    def depth_x_powers() -> bool:
        for n in (1, 2, 3):
            gen = "x" if n == 1 else f"x^{n}"
            depth, status = compute_depth(Ideal(zx, [gen]), caps)
            if status != "certified" or not ideal_equal(
                    depth, Ideal(zx, [gen]), caps):
                return False
        return True

    def depth_integers_unit() -> bool:
        for m in (2, 6, 12):
            depth, status = compute_depth(Ideal(zz, [m]), caps)
            if status != "certified" or not ideal_equal(
                    depth, Ideal(zz, [1]), caps):
                return False
        return True

    def two_x_not_commensurable() -> bool:
        return not commensurable(Ideal(zx, [2]), Ideal(zx, ["x"]), caps)

    def measures_mod4() -> bool:
        outcome = classify_measures(QuotientContext.integers_mod(4), 2, caps)
        sizes = sorted(len(m.support()) for m in outcome.ergodic_measures)
        return outcome.bijection_ok and sizes == [1, 3, 12]

    def fourier_haar_mod4() -> bool:
        ctx = QuotientContext.integers_mod(4)
        model = build_model(ctx, 1)
        points = list(model.iter_points())
        characters = list(model.iter_characters())
        for ideal in model_ideals(ctx):
            subgroup = annihilator_in_dual(model, ideal)
            base = haar(model, subgroup)
            for shift in characters:
                measure = translate(model, base, shift)
                for x in points:
                    annihilated = all(
                        model.pairing_exponent(chi, x).denominator == 1
                        for chi in subgroup)
                    expected = 0j
                    if annihilated:
                        expected = cmath.exp(
                            2j * cmath.pi
                            * float(model.pairing_exponent(shift, x)))
                    if abs(fourier(model, measure, x) - expected) \
                            > caps.fourier_tol:
                        return False
        return True

    def center_words_mod7() -> bool:
        ctx = QuotientContext.integers_mod(7)
        units = [u for u in sorted(ctx.units) if ctx.power(u, 3) == ctx.one]
        if units != [1, 2, 4]:
            return False
        for u in units:
            word = center_word(ctx, 3, u)
            if q_word_matrix(ctx, word, 3) != qmat_scalar(ctx, 3, u):
                return False
        return True

    def el3_f2_degrees() -> bool:
        ctx = QuotientContext.integers_mod(2)
        group = group_from_table(elementary_group(ctx, 3, caps))
        degrees = [f.degree for f in irreducible_characters(group, caps)]
        return degrees == [1, 3, 3, 6, 7, 8] and sum(
            x * x for x in degrees) == 168

    def induced_trace_spot() -> bool:
        level, kernel = Ideal(zz, [1]), Ideal(zz, [2])
        ctx = QuotientContext.integers_mod(2)
        group, _ = subquotient_A(ctx, 3, level, kernel, caps)
        chi = irreducible_characters(group, caps)[4]
        if chi.degree != 7:
            return False
        triple = CharacterTriple(level, kernel, (chi,), group)
        if not validate_triple(triple, caps).passed:
            return False
        phi = induced_trace(triple, word_ball(zz, 3, 2, caps=caps), caps)
        e12 = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
        e12_sq = ((1, 2, 0), (0, 1, 0), (0, 0, 1))
        return (abs(phi.value(e12) - Fraction(-1, 7)) <= 1e-9
                and abs(phi.value(e12_sq) - 1) <= 1e-9)

    return [
        ("depth-x-powers", depth_x_powers),
        ("depth-integers-unit", depth_integers_unit),
        ("two-x-not-commensurable", two_x_not_commensurable),
        ("measures-mod4-d2", measures_mod4),
        ("fourier-haar-mod4", fourier_haar_mod4),
        ("center-words-mod7-d3", center_words_mod7),
        ("el3-f2-degrees", el3_f2_degrees),
        ("induced-trace-spot", induced_trace_spot),
    ]


def _cmd_selftest(args, config: RunConfig):
    suites = {"quick": _suite_quick, "paper-examples": _suite_examples}
    items = suites[args.suite](config.caps)
    results = []
    for name, check in items:
        try:
            ok = bool(check())
            entry = {"name": name, "ok": ok}
        except Exception as exc:  # a crashed check is a failed check
            entry = {"name": name, "ok": False,
                     "error": f"{type(exc).__name__}: {exc}"}
        results.append(entry)
    passed = all(entry["ok"] for entry in results)
    report = {
        "schema": SCHEMA,
        "suite": args.suite,
        "results": results,
        "passed": passed,
    }
    return (0 if passed else 2), report


# ---------------------------------------------------------------------------
# parser and dispatch


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    run = shared.add_argument_group("run configuration")
    run.add_argument("--max-gb-pairs", type=int, default=None,
                     help="Groebner S-pair budget")
    run.add_argument("--max-elements", type=int, default=None,
                     help="group and ball enumeration budget")
    run.add_argument("--bound", type=int, default=None, dest="entry_bound",
                     help="matrix entry bound")
    run.add_argument("--seed", type=int, default=None,
                     help="seed for every randomized step")
    run.add_argument("--tol", type=float, default=None,
                     help="numeric tolerance override")
    run.add_argument("--format", choices=("json", "text"), default="json",
                     help="report rendering (default json)")
    run.add_argument("--out", default=None,
                     help="also write the rendered report to this file")

    parser = argparse.ArgumentParser(
        prog="noether-el",
        description="Ideal calculus and character data for elementary "
                    "matrix groups over Noetherian rings.")
    sub = parser.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring", help="polynomial ring arithmetic")
    ring_sub = ring.add_subparsers(dest="verb", required=True)
    ring_eval = ring_sub.add_parser("eval", parents=[shared],
                                    help="canonicalize a ring expression")
    ring_eval.add_argument("--vars", type=int, required=True,
                           help="number of variables (0 means the integers)")
    ring_eval.add_argument("--relations", nargs="*", default=[],
                           help="defining relations, as polynomial strings")
    ring_eval.add_argument("--expr", required=True)
    ring_eval.set_defaults(handler=_cmd_ring_eval)

    ideal = sub.add_parser("ideal", help="ideal arithmetic and structure")
    ideal_sub = ideal.add_subparsers(dest="verb", required=True)
    for verb, blurb in (("sum", "generators of I + J"),
                        ("intersect", "generators of the intersection"),
                        ("quotient", "the colon ideal I : J")):
        p = ideal_sub.add_parser(verb, parents=[shared], help=blurb)
        p.add_argument("--ideal", required=True, help="ideal JSON file (I)")
        p.add_argument("--other", required=True, help="ideal JSON file (J)")
        p.set_defaults(handler=_cmd_ideal_combine)
    p = ideal_sub.add_parser("equal", parents=[shared],
                             help="decide equality of two ideals")
    p.add_argument("--ideal", required=True)
    p.add_argument("--other", required=True)
    p.set_defaults(handler=_cmd_ideal_equal)
    p = ideal_sub.add_parser("structure", parents=[shared],
                             help="finite-index verdict for R/I")
    p.add_argument("--ideal", required=True)
    p.set_defaults(handler=_cmd_ideal_structure)

    depth = sub.add_parser("depth", help="finiteness depth of ideals")
    depth_sub = depth.add_subparsers(dest="verb", required=True)
    p = depth_sub.add_parser("compute", parents=[shared],
                             help="the depth ideal and its status")
    p.add_argument("--ideal", required=True, help="ideal JSON file")
    p.set_defaults(handler=_cmd_depth_compute)
    p = depth_sub.add_parser("commensurable", parents=[shared],
                             help="decide commensurability of two ideals")
    p.add_argument("--ideal", required=True)
    p.add_argument("--other", required=True)
    p.set_defaults(handler=_cmd_depth_commensurable)

    mat = sub.add_parser("mat", help="single-matrix computations")
    mat_sub = mat.add_subparsers(dest="verb", required=True)
    p = mat_sub.add_parser("level", parents=[shared],
                           help="deviation ideal of a matrix")
    p.add_argument("--matrix", required=True, help="matrix JSON file")
    p.add_argument("--kind", choices=("scalar", "identity"),
                   default="scalar",
                   help="measure deviation from scalars or from the identity")
    p.set_defaults(handler=_cmd_mat_level)
    p = mat_sub.add_parser("invert", parents=[shared],
                           help="exact inverse of a unimodular matrix")
    p.add_argument("--matrix", required=True)
    p.set_defaults(handler=_cmd_mat_invert)
    p = mat_sub.add_parser("normal-form", parents=[shared],
                           help="conjugate an integer matrix into the "
                                "h v h' v' n shape")
    p.add_argument("--matrix", required=True)
    p.set_defaults(handler=_cmd_mat_normal_form)

    group = sub.add_parser("group", help="finite elementary group models")
    group_sub = group.add_subparsers(dest="verb", required=True)
    p = group_sub.add_parser("order", parents=[shared],
                             help="order of the (congruence) group")
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--level", type=int, default=None,
                   help="generator of a level ideal; when given, the order "
                        "of its elementary congruence subgroup")
    p.set_defaults(handler=_cmd_group_order)
    p = group_sub.add_parser("center-word", parents=[shared],
                             help="an elementary word for a central scalar")
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--unit", type=int, required=True)
    p.set_defaults(handler=_cmd_group_center_word)

    measures = sub.add_parser("measures",
                              help="invariant measures on dual models")
    measures_sub = measures.add_subparsers(dest="verb", required=True)
    p = measures_sub.add_parser("classify", parents=[shared],
                                help="ergodic classification over Z/m")
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(handler=_cmd_measures_classify)

    char = sub.add_parser("char", help="character triples and traces")
    char_sub = char.add_subparsers(dest="verb", required=True)
    p = char_sub.add_parser("make-triple", parents=[shared],
                            help="build a triple file for a Z-side layer")
    p.add_argument("--mod", type=int, required=True,
                   help="modulus of the finite model")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--level", type=int, required=True,
                   help="generator of the level ideal over Z")
    p.add_argument("--kernel", type=int, required=True,
                   help="generator of the kernel ideal over Z")
    pick = p.add_mutually_exclusive_group()
    pick.add_argument("--degree", type=int, default=7,
                      help="pick the first character of this degree "
                           "(default 7)")
    pick.add_argument("--index", type=int, default=None,
                      help="pick a character by table index instead")
    p.set_defaults(handler=_cmd_char_make_triple)
    p = char_sub.add_parser("validate", parents=[shared],
                            help="check the three triple conditions")
    p.add_argument("--triple", required=True, help="triple JSON file")
    p.set_defaults(handler=_cmd_char_validate)
    p = char_sub.add_parser("induce", parents=[shared],
                            help="induce the trace and run the numeric "
                                 "checks on a seeded sample")
    p.add_argument("--triple", required=True)
    p.add_argument("--ball", type=int, default=4, help="word-ball radius")
    p.add_argument("--sample", type=int, default=40)
    p.set_defaults(handler=_cmd_char_induce)
    p = char_sub.add_parser("recover", parents=[shared],
                            help="re-extract the triple from its trace")
    p.add_argument("--triple", required=True)
    p.add_argument("--ball", type=int, default=4)
    p.set_defaults(handler=_cmd_char_recover)

    selftest = sub.add_parser("selftest", parents=[shared],
                              help="run a built-in check suite")
    selftest.add_argument("--suite", choices=("quick", "paper-examples"),
                          default="quick",
                          help="quick = fast smoke subset; paper-examples = "
                               "the curated worked examples")
    selftest.set_defaults(handler=_cmd_selftest)

    return parser


def dispatch(argv: Sequence[str]) -> Tuple[int, dict]:
    """Parse argv, run the subcommand, emit its report, return the pair."""
    parser = _build_parser()
    args = parser.parse_args(list(argv))
    fmt = getattr(args, "format", "json")
    out = getattr(args, "out", None)
    try:
        config = RunConfig.from_args(args)
        code, report = args.handler(args, config)
    except (ParseError, OSError, CapExceeded, FactorizationLimit) as exc:
        code, report = 1, _error_report(exc)
    except (ValidationError, NotInvertible, InexactDivision) as exc:
        code, report = 2, _error_report(exc)
    rendered = render_report(report, fmt)
    sys.stdout.write(rendered)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(rendered)
        except OSError as exc:
            sys.stderr.write(f"cannot write report: {exc}\n")
            code = max(code, 1)
    return code, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = dispatch(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
