"""
Command-line front end.

JSON goes to stdout (sorted keys, so repeated runs give identical bytes),
progress lines go to stderr. Exit codes: 0 success, 1 a check failed,
2 malformed input or usage error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass

from operads import __version__, linalg
from operads.canon import automorphisms, canonical_form
from operads.category import (
    Flavor,
    GMorphism,
    compose,
    in_flavor,
    morphism_from_json,
    morphism_to_json,
    tensor,
    validate_morphism,
)
from operads.config import get_settings, load_settings, use_settings
from operads.corpus import CORPUS_FLAVORS, check_category_laws
from operads.endomorphism import (
    DirectedPair,
    end_action,
    end_dir_action,
    end_smodule,
    end_structure,
    space_from_json,
)
from operads.errors import GraphError, OperadError, SchemaError
from operads.free_operad import (
    DIRECTED_FLAVORS,
    FLAVORS,
    FreeOperad,
    census,
    check_algebra,
    check_monad_laws,
    enumerate_stable_graphs,
    free_structure,
    free_value,
)
from operads.graph_core import DualGraph, checked, graph_from_json, graph_to_json, validate
from operads.morita import check_1d_operad, check_morita, morita_from_json, operad_from_json
from operads.report import CheckReport
from operads.smodule import DirectedKey, GNKey, restrict_smodule, smodule_from_json, stable_keys

logger = logging.getLogger("operads")

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


@dataclass
class CommandResult:
    """Payload for stdout plus the exit code."""

    payload: object
    code: int = EXIT_OK
    table: list[str] | None = None


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(path, "file not found") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _load_graph(path: str) -> DualGraph:
    return checked(graph_from_json(_load_json(path)))


def _load_morphism(path: str, where: str = "") -> GMorphism:
    m = morphism_from_json(_load_json(path), where)
    problems = validate_morphism(m)
    if problems:
        raise GraphError(f"{path}: " + "; ".join(problems))
    return m


def _report_result(report: CheckReport) -> CommandResult:
    return CommandResult(report.to_json(), EXIT_OK if report.ok else EXIT_FAILED, [report.summary()] + [
        f"   - [{v.rule}] {v.message}" for v in report.violations])


def _key(args):
    return GNKey(args.g, args.n) if args.n_in is None else DirectedKey(args.g, args.n, args.n_in)


# ── subcommands ─────────────────────────────────────────────────────────────

def cmd_validate(args) -> CommandResult:
    data = _load_json(args.file)
    if isinstance(data, dict) and "glue" in data:
        problems = validate_morphism(morphism_from_json(data))
        kind = "morphism"
    else:
        problems = validate(graph_from_json(data))
        kind = "graph"
    for p in problems:
        logger.info("   ❌ %s", p)
    return CommandResult({"kind": kind, "valid": not problems, "problems": problems},
                         EXIT_FAILED if problems else EXIT_OK)


def cmd_canon(args) -> CommandResult:
    graph = _load_graph(args.file)
    canon, iso = canonical_form(graph, fix_legs=args.fix_legs)
    group = automorphisms(graph, fix_legs=args.fix_legs)
    return CommandResult({"graph": graph_to_json(canon), "iso": iso.to_json(), "automorphisms": len(group)})


def cmd_compose(args) -> CommandResult:
    first = _load_morphism(args.first, "/first")
    second = _load_morphism(args.second, "/second")
    return CommandResult(morphism_to_json(compose(first, second)))


def cmd_tensor(args) -> CommandResult:
    morphisms = [_load_morphism(path, f"/{i}") for i, path in enumerate(args.files)]
    return CommandResult(morphism_to_json(tensor(morphisms)))


def cmd_check_flavor(args) -> CommandResult:
    m = _load_morphism(args.file)
    inside = in_flavor(m, args.flavor)
    return CommandResult({"flavor": args.flavor, "in_flavor": inside}, EXIT_OK if inside else EXIT_FAILED)


def cmd_enumerate(args) -> CommandResult:
    classes = enumerate_stable_graphs(args.g, args.n, args.n_in, args.flavor, args.max_vertices)
    logger.info("🌳 %d class(es) of type %s", len(classes), _key(args))
    table = [f"{i:>4}  edges={c.edge_count:<3} |Aut|={c.aut_order}" for i, c in enumerate(classes)]
    return CommandResult([c.to_json() for c in classes], table=table)


def _module(args):
    module = smodule_from_json(_load_json(args.smodule))
    return restrict_smodule(module, args.flavor)


def cmd_free(args) -> CommandResult:
    value = free_value(_module(args), _key(args), args.flavor)
    table = [f"{value.key}: size {value.size}"] + [
        f"   edges={c.stable_class.edge_count} |Aut|={c.stable_class.aut_order}" for c in value.classes]
    return CommandResult(value.to_json(), table=table)


def cmd_monad_check(args) -> CommandResult:
    keys = stable_keys(args.bound, directed=args.flavor in DIRECTED_FLAVORS)
    return _report_result(check_monad_laws(_module(args), keys, args.flavor))


def cmd_end_action(args) -> CommandResult:
    space = space_from_json(_load_json(args.space), "/space")
    m = _load_morphism(args.morphism, "/morphism")
    matrix = end_dir_action(space, m) if isinstance(space, DirectedPair) else end_action(space, m)
    rows, cols = matrix.shape
    return CommandResult({"rows": rows, "cols": cols, "matrix": linalg.to_json(matrix)},
                         table=[" ".join(f"{linalg.format_rational(x):>6}" for x in row) for row in matrix])


def cmd_algebra_check(args) -> CommandResult:
    keys = stable_keys(args.bound)
    if args.space:
        space = space_from_json(_load_json(args.space), "/space")
        if isinstance(space, DirectedPair):
            raise SchemaError("/space", "algebra-check needs a symmetric bilinear space")
        report = check_algebra(end_smodule(space, keys), end_structure(space), keys)
    else:
        free = FreeOperad(_module(args))
        report = check_algebra(free, free_structure(free), keys)
    return _report_result(report)


def cmd_morita_check(args) -> CommandResult:
    data = _load_json(args.file)
    if isinstance(data, dict) and "Q" in data:
        return _report_result(check_morita(morita_from_json(data)))
    return _report_result(check_1d_operad(*operad_from_json(data)))


def cmd_census(args) -> CommandResult:
    rows = census(args.bound, args.flavor)
    head = "n_out n_in" if args.flavor in DIRECTED_FLAVORS else "n"
    table = [f"g  {head:<10} count  mass"] + [
        f"{r['g']:<2} {(str(r['n_out']) + ' ' + str(r['n_in'])) if 'n_out' in r else str(r['n']):<10} "
        f"{r['count']:<6} {r['mass']}" for r in rows]
    return CommandResult(rows, table=table)


def cmd_category_laws(args) -> CommandResult:
    seed = args.seed if args.seed is not None else get_settings().seed
    flavors = [Flavor(args.flavor)] if args.flavor else list(CORPUS_FLAVORS)
    total = CheckReport(f"category laws (seed {seed})")
    for flavor in flavors:
        report = check_category_laws(seed, flavor, args.count, args.max_flags)
        total.merge(report)
        total.details[flavor.value] = {"checked": report.checked, "ok": report.ok}
    return _report_result(total)


# ── parser ──────────────────────────────────────────────────────────────────

def _add_key_args(parser, required: bool = True):
    parser.add_argument("--g", type=int, required=required, help="genus")
    parser.add_argument("--n", type=int, required=required, help="number of legs (outgoing legs if --n-in)")
    parser.add_argument("--n-in", type=int, default=None, help="incoming legs, for directed flavors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="operads", description="Dual graphs, free modular operads and their algebras")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=None, help="dotenv-style settings file (default: operads.env if present)")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized corpora")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a graph or morphism file")
    p.add_argument("--file", required=True)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("canon", help="canonical form of a graph")
    p.add_argument("--file", required=True)
    p.add_argument("--fix-legs", action="store_true", help="keep leg names fixed")
    p.set_defaults(handler=cmd_canon)

    p = sub.add_parser("compose", help="compose two morphisms, first then second")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.set_defaults(handler=cmd_compose)

    p = sub.add_parser("tensor", help="tensor product of morphisms")
    p.add_argument("--files", nargs="+", required=True)
    p.set_defaults(handler=cmd_tensor)

    p = sub.add_parser("check-flavor", help="is a morphism in a given flavor")
    p.add_argument("--file", required=True)
    p.add_argument("--flavor", choices=[f.value for f in Flavor], required=True)
    p.set_defaults(handler=cmd_check_flavor)

    p = sub.add_parser("enumerate", help="stable graph classes of one type")
    _add_key_args(p)
    p.add_argument("--flavor", choices=FLAVORS, default="stable")
    p.add_argument("--max-vertices", type=int, default=None, help="vertex budget for unstable types")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("free", help="the free operad on an S-module at one type")
    p.add_argument("--smodule", required=True)
    _add_key_args(p)
    p.add_argument("--flavor", choices=FLAVORS, default="stable")
    p.set_defaults(handler=cmd_free)

    p = sub.add_parser("monad-check", help="unit and associativity laws of the free operad monad")
    p.add_argument("--smodule", required=True)
    p.add_argument("--bound", type=int, default=3, help="check every key with 2g-2+n at most this")
    p.add_argument("--flavor", choices=FLAVORS, default="stable")
    p.set_defaults(handler=cmd_monad_check)

    p = sub.add_parser("end-action", help="matrix of a morphism on End(M, t)")
    p.add_argument("--space", required=True)
    p.add_argument("--morphism", required=True)
    p.set_defaults(handler=cmd_end_action)

    p = sub.add_parser("algebra-check", help="algebra laws for End(M, t) or for a free operad")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--space")
    source.add_argument("--smodule")
    p.add_argument("--bound", type=int, default=1)
    p.set_defaults(handler=cmd_algebra_check, flavor="stable")

    p = sub.add_parser("morita-check", help="Morita context with trace, or algebra with trace")
    p.add_argument("--file", required=True)
    p.set_defaults(handler=cmd_morita_check)

    p = sub.add_parser("census", help="stable graph counts and masses")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--flavor", choices=FLAVORS, default="stable")
    p.set_defaults(handler=cmd_census)

    p = sub.add_parser("category-laws", help="category laws on a seeded corpus")
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--max-flags", type=int, default=8)
    p.add_argument("--flavor", choices=[f.value for f in CORPUS_FLAVORS], default=None)
    p.set_defaults(handler=cmd_category_laws)
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(stream=sys.stderr, level=level, format="%(message)s", force=True)


def _emit(result: CommandResult, fmt: str) -> None:
    if fmt == "table" and result.table is not None:
        sys.stdout.write("\n".join(result.table) + "\n")
        return
    sys.stdout.write(json.dumps(result.payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK

    try:
        settings = load_settings(args.config)
    except OperadError as exc:
        _configure_logging("INFO")
        logger.error("❌ %s", exc)
        return EXIT_INPUT
    use_settings(settings)
    _configure_logging("DEBUG" if args.verbose else settings.log_level)

    logger.info("🚀 %s", args.command)
    try:
        result = args.handler(args)
    except OperadError as exc:
        # schema errors, mismatched objects, unstable keys: all bad input
        logger.error("❌ %s", exc)
        return EXIT_INPUT
    _emit(result, args.format)
    logger.info("✅ done" if result.code == EXIT_OK else "❌ check failed")
    return result.code
