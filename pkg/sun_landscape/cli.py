import argparse
import sys
from typing import List, Optional

from cyy_naive_lib.log import get_logger

from critical_catalog import (catalog_to_json, enumerate_families,
                              format_real, format_table, match,
                              sample_continuum, trap_report)
from default_config import DefaultConfig
from fidelity_landscape import (TargetGate, classify, criticality_residual,
                                hessian_matrix, reduce_point)
from landscape_type import (AmbiguousMatchError, LandscapeError,
                            NotCriticalError)
from matrix_io import read_matrix
from optimizer import basin_statistics, random_starts, run_starts
from reproducible_env import global_reproducible_env
from sun_geometry import SpecialUnitaryPoint, sun_basis
from verifier import SUITES, report_to_json, run_suite


def _catalog(args, config: DefaultConfig) -> int:
    families = enumerate_families(args.n)
    print(format_table(families))
    if args.json is not None:
        with open(args.json, "wt") as f:
            f.write(catalog_to_json(families))
        get_logger().info("write catalog to %s", args.json)
    if args.mu_grid is not None:
        continuum = [f for f in families if f.is_continuum]
        if not continuum:
            get_logger().warning("n=%s has no continuum family", args.n)
        for family in continuum:
            for mu in sample_continuum(args.mu_grid):
                print(
                    "%s mu=%s value=%s"
                    % (family.label, format_real(mu), format_real(family.value))
                )
    return 0


def _classify(args, config: DefaultConfig) -> int:
    target = TargetGate(read_matrix(args.target, su_mode=True, n=args.n))
    point = SpecialUnitaryPoint(read_matrix(args.point, su_mode=True, n=args.n))
    mu_hat, residual = criticality_residual(target, point)
    print("residual", format_real(residual))
    print("mu", format_real(mu_hat))
    families = enumerate_families(args.n)
    spectrum = hessian_matrix(target, point, sun_basis(args.n))
    print("hessian", spectrum)
    try:
        nature = classify(
            target,
            point,
            spectrum,
            max(f.value for f in families),
            min(f.value for f in families),
        )
    except NotCriticalError as e:
        get_logger().error("%s", e)
        return 1
    print("nature", nature.name)
    try:
        family = match(reduce_point(target, point), families, 1e-6)
    except AmbiguousMatchError as e:
        get_logger().warning("%s", e)
        family = None
    print("family", family.label if family is not None else None)
    return 0


def _optimize(args, config: DefaultConfig) -> int:
    if args.target is None:
        target = TargetGate.identity(args.n)
    else:
        target = TargetGate(read_matrix(args.target, su_mode=True, n=args.n))
    optimizer_config = config.create_optimizer_config()
    starts = random_starts(
        args.n, args.starts, global_reproducible_env.get_generator("starts")
    )
    traces = run_starts(
        target,
        starts,
        optimizer_config,
        worker_num=config.worker_num,
        trace_path=args.trace,
    )
    print(
        "%6s %22s %22s %10s %10s"
        % ("start", "value", "family", "iterations", "converged")
    )
    for idx, trace in enumerate(traces):
        print(
            "%6d %22s %22s %10d %10s"
            % (
                idx,
                format_real(trace.final_value),
                "-" if trace.matched_family is None else trace.matched_family.label,
                trace.iterations,
                trace.converged,
            )
        )
    for label, count in sorted(basin_statistics(traces).items()):
        print("basin %s %s/%s" % (label, count, len(traces)))
    return 0


def _trap_report(args, config: DefaultConfig) -> int:
    traps = trap_report(args.n)
    if not traps:
        print("n=%s has no traps" % args.n)
    else:
        print(format_table(traps))
    return 0


def _verify(args, config: DefaultConfig) -> int:
    records = run_suite(args.suite, n_max=args.n_max, seed=config.seed)
    sys.stdout.write(report_to_json(records))
    failures = [r for r in records if not r.passed]
    if failures:
        get_logger().error("%s of %s checks failed", len(failures), len(records))
        return 1
    get_logger().info("all %s checks passed", len(records))
    return 0


def _create_parser(config: DefaultConfig) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sun_landscape")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    config.add_args(common)
    optimizer_common = argparse.ArgumentParser(add_help=False)
    config.add_args(optimizer_common, optimizer_args=True)

    catalog = subparsers.add_parser("catalog", parents=[common])
    catalog.add_argument("--n", type=int, required=True)
    catalog.add_argument("--json", type=str, default=None)
    catalog.add_argument("--mu-grid", dest="mu_grid", type=int, default=None)
    catalog.set_defaults(handler=_catalog)

    classify_parser = subparsers.add_parser("classify", parents=[common])
    classify_parser.add_argument("--n", type=int, required=True)
    classify_parser.add_argument("--target", type=str, required=True)
    classify_parser.add_argument("--point", type=str, required=True)
    classify_parser.set_defaults(handler=_classify)

    optimize = subparsers.add_parser("optimize", parents=[optimizer_common])
    optimize.add_argument("--n", type=int, required=True)
    optimize.add_argument("--target", type=str, default=None)
    optimize.add_argument("--starts", type=int, default=1)
    optimize.add_argument("--trace", type=str, default=None)
    optimize.set_defaults(handler=_optimize)

    trap = subparsers.add_parser("trap-report", parents=[common])
    trap.add_argument("--n", type=int, required=True)
    trap.set_defaults(handler=_trap_report)

    verify = subparsers.add_parser("verify", parents=[common])
    verify.add_argument("--suite", type=str, default="all", choices=("all",) + SUITES)
    verify.add_argument("--n-max", dest="n_max", type=int, default=8)
    verify.set_defaults(handler=_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    config = DefaultConfig()
    args = _create_parser(config).parse_args(argv)
    config.load_args(args)
    config.apply_global_config()
    try:
        return args.handler(args, config)
    except LandscapeError as e:
        get_logger().error("%s", e)
        return 2
    finally:
        # after the handler has drawn its streams
        config.save_reproducible_env()


if __name__ == "__main__":
    sys.exit(main())
