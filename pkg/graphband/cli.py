import argparse
import logging
import sys
import time

from graphband import graph
from graphband import harness
from graphband import selftest
from graphband.config import ConfigError, default_fields, load_config_file, resolve_config
from graphband.curve_writer import CurveWriter
from graphband.pool_store import PoolIndexParseError, PoolStore
from graphband.util import derive_rng

# Failures that come from the inputs rather than from the code.
INPUT_ERRORS = (graph.EdgeListParseError, graph.EmptyGraphError,
                graph.NoLargeComponentError, PoolIndexParseError, IOError)


def _common_options():
    common = argparse.ArgumentParser(add_help=False)

    common.add_argument(
            "--config",
            help="Flat 'key = value' file; flags override its values.")

    common.add_argument(
            "--verbose",
            action="store_true",
            default=False,
            help="Log epoch boundaries and solver fallbacks.")

    common.add_argument(
            "--dump_csv", "--dump-csv",
            action="store_true",
            default=False,
            help="Print the path of every file written.")

    common.add_argument(
            "--dry",
            action="store_true",
            default=False,
            help="Dry run.  Compute everything but do not write any files.")

    common.add_argument(
            "--dump_perf", "--dump-perf",
            action="store_true",
            default=False,
            help="Print timing and write counts on completion.")

    return common


def _add_experiment_options(parser):
    experiment_args = parser.add_argument_group("Experiment Options")
    for field in default_fields():
        experiment_args.add_argument(
                *field.flags(),
                dest=field.name,
                default=None,
                help=field.help)


def arg_parser():
    parser = argparse.ArgumentParser(
            description="Contextual bandits with graph feedback: simulations and checks.")
    common = _common_options()

    # Commands
    subparsers = parser.add_subparsers(
            title="Commands",
            dest="command")
    subparsers.required = True

    run_parser = subparsers.add_parser(
            "run",
            parents=[common],
            help="Run every configured policy and write regret curves.")
    _add_experiment_options(run_parser)

    sweep_parser = subparsers.add_parser(
            "sweep",
            parents=[common],
            help="Repeat the experiment over several action counts.")
    _add_experiment_options(sweep_parser)
    sweep_parser.add_argument(
            "--action_counts", "--action-counts",
            default=",".join(str(n) for n in harness.DEFAULT_SWEEP_ACTION_COUNTS),
            help="Comma-separated action counts.")

    pool_parser = subparsers.add_parser(
            "pool",
            parents=[common],
            help="Carve a subgraph pool from an edge list and store it.")
    _add_experiment_options(pool_parser)

    selftest_parser = subparsers.add_parser(
            "selftest",
            parents=[common],
            help="Check the greedy, LP and sampling guarantees on random instances.")
    selftest_parser.add_argument("--seed", type=int, default=0)
    selftest_parser.add_argument(
            "--greedy_count", "--greedy-count", type=int,
            default=selftest.GREEDY_SUITE_COUNT)
    selftest_parser.add_argument(
            "--lp_count", "--lp-count", type=int, default=selftest.LP_SUITE_COUNT)
    selftest_parser.add_argument(
            "--iop_count", "--iop-count", type=int, default=selftest.IOP_SUITE_COUNT)

    return parser


def build_config(args):
    file_values = load_config_file(args.config) if args.config else {}
    flag_values = dict((field.name, getattr(args, field.name))
                       for field in default_fields())
    return resolve_config(file_values, flag_values)


def parse_action_counts(text):
    try:
        counts = [int(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise ConfigError("action_counts", text, "expected comma-separated integers")
    if not counts or min(counts) < 1:
        raise ConfigError("action_counts", text, "need positive action counts")
    return counts


def print_config(config):
    print("master_seed = {}".format(config.master_seed))
    print(config.describe())


def run_command(args, writer):
    config = build_config(args)
    print_config(config)
    results = harness.Experiment(config, writer).run()
    for kind in config.policies:
        curves = results[kind]
        print("{}: final regret {:.2f} ({:.2f}), f* retained in {:.1%} of epochs".format(
            kind, curves.final_mean, curves.final_std, curves.retention))
    return 0


def sweep_command(args, writer):
    config = build_config(args)
    action_counts = parse_action_counts(args.action_counts)
    print_config(config)
    summary = harness.sweep(config, writer, action_counts)
    print(summary[["policy", "actions", "cell"]].to_string(index=False))
    for remark in harness.monotonicity_remarks(summary):
        print("note: " + remark)
    return 0


def pool_command(args, writer):
    config = build_config(args)
    if not config.edges:
        raise ConfigError("edges", config.edges, "the pool command needs an edge list")
    if not config.pool_dir:
        raise ConfigError("pool_dir", config.pool_dir, "the pool command needs a directory")
    print_config(config)
    source = graph.build_pool(
            graph.load_edge_list(config.edges),
            config.pool_size,
            config.subgraph_size,
            derive_rng(config.master_seed, harness.POOL_STREAM))
    written = PoolStore(config.pool_dir, dry=args.dry).save_source(source)
    print("{} of {} subgraphs written to {}".format(
        written, len(source.pool), config.pool_dir))
    return 0


def selftest_command(args, writer):
    results = selftest.run_selftest(
            args.seed, args.greedy_count, args.lp_count, args.iop_count)
    for result in results:
        print(result)
    return 0 if all(result.passed for result in results) else 1


COMMANDS = {
    "run": run_command,
    "sweep": sweep_command,
    "pool": pool_command,
    "selftest": selftest_command,
}


def cli_main(argv=None):
    parser = arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    started = time.time()
    writer = None
    try:
        if args.command in ("run", "sweep"):
            output_dir = build_config(args).output_dir
            writer = CurveWriter(output_dir, dump_csv=args.dump_csv, dry=args.dry)
        status = COMMANDS[args.command](args, writer)
    except ConfigError as error:
        parser.print_usage(sys.stderr)
        print("error: {}".format(error), file=sys.stderr)
        return 2
    except INPUT_ERRORS as error:
        print("error: {}".format(error), file=sys.stderr)
        return 1

    if args.dump_perf:
        print("Wall time: {:.2f}s".format(time.time() - started))
        if writer is not None:
            print("Files: writes = {}, written = {}".format(
                writer.num_writes, writer.num_written))
    return status


def main():
    sys.exit(cli_main())
