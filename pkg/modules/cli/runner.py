"""Command-line frontend: argument parsing, caching and exit codes"""
import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from modules.cli.cache import ResultCache
from modules.cli.records import JobSpec, ResultRecord, homology_record, to_csv
from modules.cli.verify import CHECKS
from modules.complex.closure import ClosedNetwork, close_braid, close_simplified, graph_network
from modules.complex.diagram import BraidDiagram, load_diagram
from modules.gornik.states import enumerate_states
from modules.homology.poincare import complex_homology
from modules.rasmussen.invariants import s_N_torus
from modules.rasmussen.recursion import s2_cable_formula, s_N_torus_recursion
from modules.ring.potential import Variant, make_spec
from modules.utils.config import configure_logging, get_settings
from modules.utils.errors import InvalidInputError, KRError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kr-twists",
                                     description="sl(N) homology of two-strand torus links and full twists")
    parser.add_argument("--cache-dir", type=Path, help="Result cache directory (default: $KR_CACHE_DIR)")
    parser.add_argument("--no-cache", action="store_true", help="Neither read nor write the result cache")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    parser.add_argument("--max-rows", type=int, help="Size guard in Koszul rows per complex")
    commands = parser.add_subparsers(dest="command", required=True)

    homology = commands.add_parser("homology", help="Bigraded homology of a closed diagram")
    source = homology.add_mutually_exclusive_group(required=True)
    source.add_argument("--link", help="Builtin torus link, torus:2:<n>")
    source.add_argument("--graph", type=Path, help="Diagram file")
    homology.add_argument("--N", dest="n", type=int, required=True)
    homology.add_argument("--potential", choices=[v.value for v in Variant], default="generic")
    homology.add_argument("--format", choices=["json", "csv"], default="json")

    rasmussen = commands.add_parser("rasmussen", help="s_N of a two-strand torus knot")
    rasmussen.add_argument("--torus", type=int, nargs=2, metavar=("TWO", "n"), required=True)
    rasmussen.add_argument("--N", dest="n", type=int, required=True)
    rasmussen.add_argument("--method", choices=["pipeline", "recursion"], default="pipeline")

    cable = commands.add_parser("cable-s2", help="s_2 of the (2, 2k+1) cable of a slice or amphicheiral knot")
    cable.add_argument("--base", choices=["slice", "amphicheiral"], required=True)
    cable.add_argument("--k", type=int, required=True)

    states = commands.add_parser("states", help="Gornik states of a diagram file")
    states.add_argument("--graph", type=Path, required=True)
    states.add_argument("--N", dest="n", type=int, required=True)

    verify = commands.add_parser("verify", help="Run one of the built-in exact checks")
    verify.add_argument("check", choices=sorted(CHECKS))
    verify.add_argument("--k", type=int)
    verify.add_argument("--N", dest="n", type=int)
    verify.add_argument("--tail", type=int, default=1, choices=[-1, 0, 1])

    table = commands.add_parser("table", help="s_N(T(2,2k+1)) next to (N-1) s_2")
    table.add_argument("--N-max", dest="n_max", type=int, default=3)
    table.add_argument("--k-max", dest="k_max", type=int, default=2)
    table.add_argument("--jobs", type=int, default=1, help="Worker processes")
    return parser


def parse_link(text: str) -> int:
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "torus" or parts[1] != "2":
        raise InvalidInputError(f"Expected torus:2:<n>, got {text!r}")
    try:
        return int(parts[2])
    except ValueError:
        raise InvalidInputError(f"Expected an integer number of crossings in {text!r}")


def _torus_network(word: int, n: int) -> ClosedNetwork:
    spec = make_spec(n, Variant.EQUIVARIANT)
    if word == 0:
        return close_simplified(0, spec)
    return close_braid(BraidDiagram(word=word), spec)


def _source(args) -> str:
    if args.graph is not None:
        try:
            return args.graph.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise InvalidInputError(f"Cannot read diagram file {args.graph}: {e}")
    return args.link


def _job(args) -> JobSpec:
    command = args.command
    if command == "homology":
        return JobSpec(command=command, source=_source(args), n=args.n, variant=args.potential)
    if command == "rasmussen":
        return JobSpec(command=command, source=f"torus:{args.torus[0]}:{args.torus[1]}", n=args.n,
                       params={"method": args.method})
    if command == "cable-s2":
        return JobSpec(command=command, n=2, params={"base": args.base, "k": args.k})
    if command == "states":
        return JobSpec(command=command, source=_source(args), n=args.n)
    if command == "verify":
        return JobSpec(command=command, n=args.n, params={"check": args.check, "k": args.k, "tail": args.tail})
    return JobSpec(command=command, params={"n_max": args.n_max, "k_max": args.k_max})


def _table_row(case: Tuple[int, int]) -> Tuple[int, int, int, int]:
    n, k = case
    s_n = s_N_torus(2 * k + 1, n).s
    s_2 = s_N_torus(2 * k + 1, 2).s
    return n, k, s_n, (n - 1) * s_2


def compute(args, job: JobSpec) -> ResultRecord:
    command = args.command
    if command == "homology":
        if args.graph is not None:
            network = graph_network(load_diagram(args.graph), make_spec(args.n, Variant.EQUIVARIANT))
        else:
            network = _torus_network(parse_link(args.link), args.n)
        return homology_record(complex_homology(network, Variant(args.potential)), job)
    if command == "rasmussen":
        if args.torus[0] != 2:
            raise InvalidInputError("Only two-strand torus knots are supported")
        method = s_N_torus if args.method == "pipeline" else s_N_torus_recursion
        result = method(args.torus[1], args.n)
        return ResultRecord(object=result.name, N=result.n, potential=Variant.EQUIVARIANT.value, s=result.s,
                            certificates=[f"{result.method}: {c}" for c in result.certificates],
                            input_hash=job.key())
    if command == "cable-s2":
        s = s2_cable_formula(args.base, args.k)
        return ResultRecord(object=f"{args.base}_(2,{2 * args.k + 1})", N=2, s=s,
                            certificates=[f"formula for a {args.base} companion"], input_hash=job.key())
    if command == "states":
        graph = load_diagram(args.graph)
        found = enumerate_states(graph, args.n)
        return ResultRecord(object=graph.name, N=args.n, potential=Variant.DEFORMED.value,
                            certificates=[f"{len(found)} states"] +
                                         [" ".join(f"{e}={k}" for e, k in sorted(s.values.items())) for s in found],
                            input_hash=job.key())
    if command == "verify":
        outcome = CHECKS[args.check](k=args.k, n=args.n, tail=args.tail)
        return ResultRecord(object=f"verify {args.check}", N=args.n, certificates=outcome.certificates,
                            holds=outcome.holds, input_hash=job.key())
    cases = [(n, k) for n in range(2, args.n_max + 1) for k in range(1, args.k_max + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_table_row, cases))
    else:
        rows = [_table_row(case) for case in cases]
    return ResultRecord(object="table", certificates=[f"N={n} k={k} s_N={s} (N-1)s_2={t}" for n, k, s, t in rows],
                        input_hash=job.key())


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)
    try:
        if args.max_rows is not None:
            os.environ["KR_MAX_ROWS"] = str(args.max_rows)
            get_settings.cache_clear()
        job = _job(args)
        cache = None if args.no_cache else ResultCache(args.cache_dir or get_settings().cache_dir)
        record = cache.lookup(job) if cache else None
        if record is None:
            record = compute(args, job)
            if cache and record.holds:
                cache.store(job, record)
    except KRError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return InvalidInputError.exit_code
    fmt = getattr(args, "format", "json")
    sys.stdout.write(to_csv(record) if fmt == "csv" else record.to_json() + "\n")
    return 0 if record.holds else 1


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))
