"""``profilecast`` command line."""

import argparse
import logging
import sys

from .config import FORMATS, resolve_config
from .errors import (
    ConfigError,
    IngestError,
    InputMismatchError,
    NumericError,
    PipelineError,
    ProfilecastError,
)
from .report import run_pipeline, write_outputs

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        exc = exc.cause
    if isinstance(exc, (IngestError, InputMismatchError, OSError)):
        return EXIT_INPUT
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="profilecast", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full profiling pipeline on a daily-activity CSV")
    run.add_argument("--input", help="daily-activity CSV (Fitbit dailyActivity layout)")
    run.add_argument("--config", help="TOML or JSON configuration file")
    run.add_argument("--seed", type=int, help="base RNG seed (overrides PROFILECAST_SEED)")
    kgroup = run.add_mutually_exclusive_group()
    kgroup.add_argument("--k", type=int, help="fixed number of k-means clusters for every module")
    kgroup.add_argument("--auto-k", action="store_true", default=None, help="choose k per module by the elbow rule")
    run.add_argument("--corr-threshold", type=float)
    run.add_argument("--pca-components", type=int)
    run.add_argument("--no-standardize", dest="standardize", action="store_false", default=None)
    run.add_argument("--modules", help="comma-separated subset of original,pca,correlation")
    run.add_argument("--format", choices=FORMATS)
    run.add_argument("--output", help="write the report here instead of stdout")
    run.add_argument("--dump-features", metavar="DIR")
    run.add_argument("--dump-profiles", metavar="DIR")
    run.add_argument("--drop-bad-rows", action="store_true", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    log = logging.getLogger("profilecast")
    try:
        overrides = dict(
            input=args.input, seed=args.seed, k=args.k, auto_k=args.auto_k,
            corr_threshold=args.corr_threshold, pca_components=args.pca_components,
            standardize=args.standardize, modules=args.modules, format=args.format,
            output=args.output, dump_features=args.dump_features,
            dump_profiles=args.dump_profiles, drop_bad_rows=args.drop_bad_rows,
        )
        if args.k is not None:
            overrides["auto_k"] = False
        config = resolve_config(args.config, **overrides)
        if config.input is None:
            raise ConfigError("no input CSV given (use --input or set 'input' in the config file)")
        report = run_pipeline(config)
        data = write_outputs(report, config)
    except (ProfilecastError, OSError) as exc:
        log.error("%s", exc)
        return exit_code_for(exc)
    for notice in report.notices:
        log.warning("%s", notice)
    if not config.output:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
