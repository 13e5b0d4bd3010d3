from __future__ import annotations

import argparse
import json
import logging
import sys
import textwrap
from typing import Any, Callable, Iterator, NoReturn

from ._cmd_utils import dump_envelope, get_default_threads, make_envelope, write_report_csv
from ._cmdata import enumerate_alphas
from ._degrees import eisenstein_coeff
from ._errors import CMIntersectError, ConfigValidationError, PrecisionExhaustedError
from ._fields import CMPairConfig, ideal_of, validate
from ._gzoracle import gz_compare
from ._hecke import HeckeIntersection
from ._logger import setup_cli_logger
from ._version import __version__

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_PRECISION = 3
EXIT_USAGE = 64


class UsageExitParser(argparse.ArgumentParser):
    """
    Argument parser that reports usage errors with exit status 64.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not an integer")
    if number < 1:
        raise argparse.ArgumentTypeError(f"{number} must be positive")
    return number


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group_general = common.add_argument_group("General Options")
    group_general.add_argument(
        "-d", "--debug", action="store_true", help="Print debugging output"
    )
    group_general.add_argument(
        "-v", "--verbose", action="store_true", help="Print verbose output"
    )
    group_general.add_argument(
        "-q", "--quiet", action="store_true", help="Only print errors in output"
    )
    group_general.add_argument(
        "-pr", "--progress", action="store_true", help="Show progress bar over the degree terms"
    )
    group_general.add_argument(
        "--json", action="store_true", help="Print the result as a JSON envelope"
    )

    group_input = common.add_argument_group("Discriminants")
    group_input.add_argument(
        "--d1", type=int, required=True, help="First negative fundamental discriminant"
    )
    group_input.add_argument(
        "--d2", type=int, required=True, help="Second negative fundamental discriminant"
    )

    level = argparse.ArgumentParser(add_help=False)
    group_level = level.add_argument_group("Level")
    group_level.add_argument(
        "--dB",
        type=int,
        default=1,
        help=textwrap.dedent(
            """\
            Discriminant of the quaternion algebra (default: 1).

            1 selects the split algebra (modular curve). Otherwise a product of
            an even number of distinct primes, each inert in both Q(sqrt(d1))
            and Q(sqrt(d2)).
            """
        ),
    )
    group_level.add_argument(
        "--m", type=int, default=1, help="Hecke index m (default: 1)"
    )

    compute = argparse.ArgumentParser(add_help=False)
    group_compute = compute.add_argument_group("Computation")
    group_compute.add_argument(
        "--threads",
        type=positive_int,
        help="Worker threads for the degree terms (default: $CM_INTERSECT_THREADS or 1)",
    )
    group_compute.add_argument(
        "--csv", metavar="PATH", help="Also write the itemized rows to a CSV file"
    )

    parser = UsageExitParser(
        prog="cm-intersect",
        description=textwrap.dedent(
            """\
            cm-intersect v{} -- arithmetic intersection numbers of CM cycles
            on modular and Shimura curves
            """.format(__version__)
        ),
        formatter_class=argparse.RawTextHelpFormatter,
        epilog=textwrap.dedent(
            """\
            Exit status: 0 ok, 1 failed comparison or other error,
            2 invalid discriminants, 3 precision exhausted, 64 usage error.

            The program additionally respects environment variables:

              - `CM_INTERSECT_THREADS`
                    Default number of worker threads for `degree`, `intersect`
                    and `gz-check`.

              - `CM_INTERSECT_MAX_PREC_BITS`
                    Precision cap in bits for `gz-check` (default: 65536).
            """
        ),
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s v{__version__}",
        help="Print version and exit",
    )

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    subparsers.add_parser(
        "validate",
        parents=[common, level],
        formatter_class=argparse.RawTextHelpFormatter,
        help="Check the discriminants, dB and m",
    )
    subparsers.add_parser(
        "alphas",
        parents=[common, level],
        formatter_class=argparse.RawTextHelpFormatter,
        help="List the totally positive elements of trace m in the inverse different",
    )
    degree = subparsers.add_parser(
        "degree",
        parents=[common, level, compute],
        formatter_class=argparse.RawTextHelpFormatter,
        help="Itemized degrees deg(X_{theta, alpha}), with Eisenstein coefficients for dB = 1",
    )
    degree.add_argument(
        "--a", type=int, help="Only the element (a + m*sqrt(D)) / (2*sqrt(D))"
    )
    subparsers.add_parser(
        "intersect",
        parents=[common, level, compute],
        formatter_class=argparse.RawTextHelpFormatter,
        help="Total intersection number as an exact combination of log(p)",
    )
    gz_check = subparsers.add_parser(
        "gz-check",
        parents=[common],
        formatter_class=argparse.RawTextHelpFormatter,
        help="Compare J(d1, d2)^2 with the intersection number (dB = 1, m = 1)",
    )
    gz_check.add_argument(
        "--prec-bits",
        type=positive_int,
        help="Starting precision in bits (default: chosen from d1 and d2)",
    )
    gz_check.add_argument(
        "--threads",
        type=positive_int,
        help="Worker threads for the formula side (default: $CM_INTERSECT_THREADS or 1)",
    )

    return parser


def _scalar(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value)
    if value is None:
        return "-"
    return str(value)


def human_lines(result: dict[str, Any]) -> Iterator[str]:
    """
    Plain-text rendering of a result payload, one field per line and one
    line per list entry.
    """
    for key, value in result.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            yield f"{key}:"
            for entry in value:
                yield "  " + "  ".join(f"{k}={_scalar(v)}" for k, v in entry.items())
        elif isinstance(value, dict) and value and not isinstance(next(iter(value.values())), dict):
            yield f"{key}: " + " ".join(f"{k}:{_scalar(v)}" for k, v in value.items())
        else:
            yield f"{key}: {_scalar(value)}"


def _inputs(cli_args: argparse.Namespace) -> dict[str, Any]:
    inputs = {"d1": cli_args.d1, "d2": cli_args.d2}
    for name in ("dB", "m", "a", "prec_bits"):
        if getattr(cli_args, name, None) is not None:
            inputs[name] = getattr(cli_args, name)
    return inputs


def _threads(cli_args: argparse.Namespace) -> int:
    return cli_args.threads or get_default_threads()


def cmd_validate(config: CMPairConfig, cli_args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    return {"valid": True, "config": config.to_dict(), "db_primes": list(config.db_primes)}, EXIT_OK


def cmd_alphas(config: CMPairConfig, cli_args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    alphas = enumerate_alphas(config)
    return {
        "count": len(alphas),
        "alphas": [
            {
                "a": alpha.a,
                "m": alpha.m,
                "companion": str(alpha.companion),
                "norm": alpha.companion_norm(),
                "ideal": str(ideal_of(alpha.companion, config)),
            }
            for alpha in alphas
        ],
    }, EXIT_OK


def _write_csv(cli_args: argparse.Namespace, rows: list[tuple[Any, ...]]) -> None:
    if cli_args.csv:
        write_report_csv(cli_args.csv, rows)


def cmd_degree(config: CMPairConfig, cli_args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    hecke = HeckeIntersection(
        config, threads=_threads(cli_args), progress=cli_args.progress, alpha_filter=cli_args.a
    )
    intersection = hecke.run()
    _write_csv(cli_args, intersection.csv_rows())

    rows = intersection.row_dicts()
    if config.dB == 1:
        eisenstein = {alpha.a: eisenstein_coeff(alpha, config).to_dict() for alpha in hecke.alphas}
        for row in rows:
            row["eisenstein"] = eisenstein[row["a"]]
    return {
        "rows": rows,
        "coeffs": intersection.total.to_dict(),
        "log_value": intersection.numeric_total,
        "log_value_is_approximation": True,
    }, EXIT_OK


def cmd_intersect(config: CMPairConfig, cli_args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    intersection = HeckeIntersection(
        config, threads=_threads(cli_args), progress=cli_args.progress
    ).run()
    _write_csv(cli_args, intersection.csv_rows())
    return {
        "terms": len(intersection.rows),
        "coeffs": intersection.total.to_dict(),
        "log_value": intersection.numeric_total,
        "log_value_is_approximation": True,
    }, EXIT_OK


def cmd_gzcheck(config: CMPairConfig, cli_args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    comparison = gz_compare(
        config.d1, config.d2, prec=cli_args.prec_bits, threads=_threads(cli_args)
    )
    return comparison.to_dict(), EXIT_OK if comparison.passed else EXIT_FAILURE


COMMANDS: dict[str, Callable[[CMPairConfig, argparse.Namespace], tuple[dict[str, Any], int]]] = {
    "validate": cmd_validate,
    "alphas": cmd_alphas,
    "degree": cmd_degree,
    "intersect": cmd_intersect,
    "gz-check": cmd_gzcheck,
}


def main() -> None:
    cli_args = create_parser().parse_args()
    setup_cli_logger(arguments=cli_args)

    def error(message: object, exit_code: int = EXIT_FAILURE) -> NoReturn:
        if _logger.getEffectiveLevel() == logging.DEBUG:
            _logger.error(f"{type(message).__name__}: {message}")
        else:
            _logger.error(message)
        sys.exit(exit_code)

    def emit(result: dict[str, Any]) -> None:
        if cli_args.json:
            print(dump_envelope(make_envelope(cli_args.command, _inputs(cli_args), result)))
        else:
            for line in human_lines(result):
                print(line)

    try:
        config = validate(
            cli_args.d1,
            cli_args.d2,
            dB=getattr(cli_args, "dB", 1),
            m=getattr(cli_args, "m", 1),
        )
    except ConfigValidationError as e:
        emit({"valid": False, "violation": e.label, "message": str(e)})
        error(e, EXIT_VALIDATION)

    try:
        result, exit_code = COMMANDS[cli_args.command](config, cli_args)
    except PrecisionExhaustedError as e:
        error(e, EXIT_PRECISION)
    except CMIntersectError as e:
        error(e)

    emit(result)
    sys.exit(exit_code)


if __name__ == "__main__":
    main()
