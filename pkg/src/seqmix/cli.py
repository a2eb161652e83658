"""Command-line entry points: run experiments, verify the inequality, dump tables."""

from __future__ import annotations

import argparse
import sys

from .harness import (
    BoundReport,
    ConfigError,
    ExperimentConfig,
    enumerate_rows,
    run,
    verify_inequality_suite,
)


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config_path", nargs="?", help="experiment config (YAML)")
    parser.add_argument("--config", dest="config_flag", help="experiment config (YAML)")
    parser.add_argument("--out", help="write CSV output here instead of stdout")
    parser.add_argument("--quiet", action="store_true", help="suppress summary lines")


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    path = args.config_flag or args.config_path
    if not path:
        raise ConfigError(["no config given (positional argument or --config)"])
    if args.config_flag and args.config_path and args.config_flag != args.config_path:
        raise ConfigError(["both positional config and --config given; pick one"])
    return ExperimentConfig.from_file(path)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    config = config.with_overrides(seed=args.seed, trials=args.trials)
    report: BoundReport = run(config)
    _emit(report.to_csv(), args.out)
    if not args.quiet:
        for line in report.summary_lines():
            print(line, file=sys.stderr)
    return 0 if report.all_pass else 1


def _cmd_verify_inequality(args: argparse.Namespace) -> int:
    report = verify_inequality_suite(args.samples, args.max_symbols, args.seed or 0)
    lines = [
        f"pairs checked: {report.total_pairs}",
        f"violations: {report.violations}",
        f"worst slack: {report.worst_slack:.17g}",
    ]
    text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if not args.quiet and args.out:
        print(text, end="", file=sys.stderr)
    return 0 if report.all_hold else 1


def _cmd_enumerate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    config = config.with_overrides(seed=args.seed, trials=args.trials)
    _emit(enumerate_rows(config), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqmix",
        description="Mixture sequence prediction experiments with bound verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config, emit a CSV report")
    _add_config_arguments(p_run)
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument("--trials", type=int, help="override the config trial count")
    p_run.set_defaults(handler=_cmd_run)

    p_ver = sub.add_parser(
        "verify-inequality",
        help="randomized check of the quadratic-vs-entropy inequality",
    )
    p_ver.add_argument("--samples", type=int, default=100_000, help="pairs per size")
    p_ver.add_argument("--max-symbols", type=int, default=8, help="largest vector size")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", help="write the summary here instead of stdout")
    p_ver.add_argument("--quiet", action="store_true")
    p_ver.set_defaults(handler=_cmd_verify_inequality)

    p_enum = sub.add_parser(
        "enumerate", help="dump exact per-prefix tables for a config"
    )
    _add_config_arguments(p_enum)
    p_enum.add_argument("--seed", type=int, help="override the config seed")
    p_enum.add_argument("--trials", type=int, help="override the config trial count")
    p_enum.set_defaults(handler=_cmd_enumerate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
