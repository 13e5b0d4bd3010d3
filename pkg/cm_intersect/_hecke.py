from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, TypedDict

from tqdm import tqdm

from ._cmd_utils import fraction_to_str
from ._cmdata import AlphaElement, ThetaHom, enumerate_alphas, enumerate_thetas
from ._degrees import ArithDegree, DegreeTerm, degree_term
from ._errors import CMIntersectError
from ._fields import CMPairConfig

_logger = logging.getLogger(__name__)


def check_range(number: object, min_r: int, max_r: int, name: str = "") -> int:
    """
    Checks if "number" is an int between min_r (inclusive) and max_r (inclusive).

    Args:
        number (object): Number to check
        min_r (int): Minimum range
        max_r (int): Maximum range
        name (str): Name of object being checked

    Returns:
        int: within given range

    Raises:
        CMIntersectError: If number is wrong type or not within range
    """
    if not isinstance(number, int) or isinstance(number, bool):
        raise CMIntersectError(f"{name} must be an int")
    if number < min_r or number > max_r:
        raise CMIntersectError(f"{name} must be within [{min_r},{max_r}]")
    return number


class ReportRow(TypedDict):
    a: int
    theta: int
    theta_label: str
    diff: list[str]
    L: Fraction | None
    R: int | None
    degree: ArithDegree


def _row(term: DegreeTerm) -> ReportRow:
    return {
        "a": term.alpha.a,
        "theta": term.theta.index,
        "theta_label": str(term.theta),
        "diff": [str(prime) for prime in term.diff],
        "L": term.length,
        "R": term.count,
        "degree": term.degree,
    }


@dataclass(frozen=True)
class IntersectionReport:
    """
    Itemized intersection number: one row per (alpha, theta), in canonical order.
    """

    config: CMPairConfig
    rows: tuple[ReportRow, ...]
    total: ArithDegree = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "total", ArithDegree.sum(row["degree"] for row in self.rows))

    @property
    def numeric_total(self) -> float:
        return self.total.log_value()

    def row_dicts(self) -> list[dict[str, Any]]:
        return [
            {
                "a": row["a"],
                "theta": row["theta"],
                "theta_label": row["theta_label"],
                "diff": row["diff"],
                "L": None if row["L"] is None else fraction_to_str(row["L"]),
                "R": row["R"],
                "degree": row["degree"].to_dict(),
            }
            for row in self.rows
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "rows": self.row_dicts(),
            "coeffs": self.total.to_dict(),
            "log_value": self.numeric_total,
            "log_value_is_approximation": True,
        }

    def csv_rows(self) -> list[tuple[Any, ...]]:
        """
        One CSV line per row: (a, theta, diff, L, R, p, c_p); L, R and p are
        empty for zero terms.
        """
        lines = []
        for row in self.rows:
            terms = row["degree"].terms()
            p, c_p = terms[0] if terms else ("", Fraction(0))
            lines.append(
                (
                    row["a"],
                    row["theta"],
                    " ".join(row["diff"]),
                    "" if row["L"] is None else fraction_to_str(row["L"]),
                    "" if row["R"] is None else row["R"],
                    p,
                    fraction_to_str(c_p),
                )
            )
        return lines


class HeckeIntersection:
    """
    Computes I(T_m Y1, Y2) as the sum of deg(X_{theta, alpha}) over all
    alpha of trace m and all homomorphisms theta.

    Args:
        config (CMPairConfig): Validated problem instance
        threads (int, optional): Worker threads for the (alpha, theta) map. Defaults to 1.
        progress (bool, optional): Show a progress bar. Defaults to False.
        alpha_filter (int, optional): Only consider the alpha with this value of a. Defaults to None.
    """

    def __init__(
        self,
        config: CMPairConfig,
        threads: int = 1,
        progress: bool = False,
        alpha_filter: int | None = None,
    ):
        self.config = config
        self.threads = check_range(threads, 1, 1024, name="threads")
        self.progress = progress
        self.alpha_filter = alpha_filter

        self.alphas: tuple[AlphaElement, ...] = enumerate_alphas(config)
        if alpha_filter is not None:
            self.alphas = tuple(alpha for alpha in self.alphas if alpha.a == alpha_filter)
            if not self.alphas:
                raise CMIntersectError(
                    f"a = {alpha_filter} does not give a totally positive element of trace {config.m}"
                )
        self.thetas: tuple[ThetaHom, ...] = enumerate_thetas(config)

    def _pairs(self) -> list[tuple[AlphaElement, ThetaHom]]:
        return list(product(self.alphas, self.thetas))

    def terms(self) -> list[DegreeTerm]:
        """
        All degree terms in canonical (a, theta) order.
        """
        pairs = self._pairs()
        _logger.info(
            f"Computing {len(pairs)} degree terms ({len(self.alphas)} alphas, "
            f"{len(self.thetas)} thetas) with {self.threads} thread(s)"
        )

        def compute(pair: tuple[AlphaElement, ThetaHom]) -> DegreeTerm:
            return degree_term(pair[0], pair[1], self.config)

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            # map() yields in submission order, whatever the completion order
            return list(
                tqdm(
                    executor.map(compute, pairs),
                    total=len(pairs),
                    desc="Terms",
                    disable=not self.progress,
                )
            )

    def run(self) -> IntersectionReport:
        report = IntersectionReport(self.config, tuple(_row(term) for term in self.terms()))
        _logger.info(f"Intersection number: {report.total} ~ {report.numeric_total:.6f}")
        return report


def report(config: CMPairConfig, threads: int = 1, progress: bool = False) -> IntersectionReport:
    return HeckeIntersection(config, threads=threads, progress=progress).run()


def intersection_number(config: CMPairConfig, threads: int = 1) -> ArithDegree:
    """
    The exact intersection number as a combination of log(p).
    """
    return report(config, threads=threads).total

