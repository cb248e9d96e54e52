"""Test statistics, normalization, p-values and the change-point estimate.

Four reductions of the process surface are computed:

* tn1: sup over the whole surface of |T| (marked Kolmogorov-Smirnov type),
* tn2: sup over z of the time integral of T^2 (marked Cramer-von Mises type),
* ks, cm: the same two reductions restricted to the +inf sentinel column,
  i.e. the classical CUSUM statistics.

tn1 and ks are normalized by sqrt(c), tn2 and cm by c, where c is the mean
squared windowed mark; the normalized values are referred to simulated
tables of the corresponding limit laws.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateSampleError
from .kernels import EstimatorConfig
from .models import Sample
from .nulldist import STATISTIC_KIND, NullTable
from .process import MarkVector, ProcessGrid, build_grid, cusum_profile, residual_marks

STATISTICS = ("tn1", "tn2", "ks", "cm")


def stat_tn1(grid: ProcessGrid) -> float:
    return float(np.abs(grid.values).max())


def stat_tn2(grid: ProcessGrid) -> float:
    # T(., z) is constant on [k/n, (k+1)/n), so the integral is an exact mean
    return float((grid.values[1:] ** 2).sum(axis=0).max() / grid.n)


def stat_ks(grid: ProcessGrid) -> float:
    return float(np.abs(grid.values[:, -1]).max())


def stat_cm(grid: ProcessGrid) -> float:
    return float((grid.values[1:, -1] ** 2).sum() / grid.n)


def c_hat_from_marks(marks: MarkVector) -> float:
    return float(np.mean(marks.marks ** 2))


def c_hat(sample: Sample, config: EstimatorConfig) -> float:
    """Mean squared windowed mark, the normalizing constant estimate."""
    return c_hat_from_marks(residual_marks(sample, config))


class ChangePointEstimate(NamedTuple):
    s_hat: float
    index: int
    degenerate: bool


def estimate_changepoint(grid: ProcessGrid) -> ChangePointEstimate:
    """Argmax of the CUSUM profile; ties break to the smallest index."""
    profile = cusum_profile(grid)
    if profile.max() == 0.0:
        return ChangePointEstimate(0.0, 0, True)
    k = int(np.argmax(profile))  # first maximizer
    return ChangePointEstimate(k / grid.n, k, False)


def p_value(stat_norm: float, table: NullTable) -> float:
    """Finite-sample corrected Monte Carlo p-value (1 + #{draws >= stat}) / (R + 1)."""
    R = table.replications
    count = R - int(np.searchsorted(table.draws, stat_norm, side="left"))
    return (1 + count) / (R + 1)


@dataclass
class TestReport:
    """Everything the variance-change test produces for one sample."""

    tn1: float
    tn2: float
    ks: float
    cm: float
    c_hat: float
    tn1_norm: float
    tn2_norm: float
    ks_norm: float
    cm_norm: float
    p_values: dict
    reject: dict
    alpha: float
    s_hat: float
    changepoint_index: int

    def normalized(self) -> dict:
        return {"tn1": self.tn1_norm, "tn2": self.tn2_norm,
                "ks": self.ks_norm, "cm": self.cm_norm}

    def to_dict(self) -> dict:
        return {
            "statistics": {"tn1": self.tn1, "tn2": self.tn2, "ks": self.ks, "cm": self.cm},
            "normalized": self.normalized(),
            "p_values": dict(self.p_values),
            "reject": dict(self.reject),
            "alpha": self.alpha,
            "c_hat": self.c_hat,
            "changepoint": {"s_hat": self.s_hat, "index": self.changepoint_index},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TestReport":
        stats = data["statistics"]
        norm = data["normalized"]
        return cls(
            tn1=stats["tn1"], tn2=stats["tn2"], ks=stats["ks"], cm=stats["cm"],
            c_hat=data["c_hat"],
            tn1_norm=norm["tn1"], tn2_norm=norm["tn2"],
            ks_norm=norm["ks"], cm_norm=norm["cm"],
            p_values=dict(data["p_values"]), reject=dict(data["reject"]),
            alpha=data["alpha"],
            s_hat=data["changepoint"]["s_hat"],
            changepoint_index=data["changepoint"]["index"],
        )


def _check_tables(tables) -> None:
    missing = [s for s in STATISTICS if s not in tables]
    if missing:
        raise ConfigError(f"missing null tables for: {missing}")
    for stat in STATISTICS:
        want = STATISTIC_KIND[stat]
        got = tables[stat].kind
        if got != want:
            raise ConfigError(f"table for {stat} has kind {got!r}, expected {want!r}")
        if tables[stat].replications < 1:
            raise ConfigError(f"table for {stat} is empty")


def run_test(sample: Sample, config: EstimatorConfig, tables: dict,
             alpha: float = 0.05) -> TestReport:
    """Run the full variance-change test at level alpha.

    ``tables`` maps statistic names (tn1, tn2, ks, cm) to null tables of the
    matching kind. Raises DegenerateSampleError when the sample carries no
    variance information (normalizer zero).
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1)")
    _check_tables(tables)
    marks = residual_marks(sample, config)
    c = c_hat_from_marks(marks)
    if c == 0.0:
        raise DegenerateSampleError("mean squared mark is zero; normalization undefined")
    grid = build_grid(marks, sample)
    tn1, tn2 = stat_tn1(grid), stat_tn2(grid)
    ks, cm = stat_ks(grid), stat_cm(grid)
    root_c = float(np.sqrt(c))
    norms = {"tn1": tn1 / root_c, "tn2": tn2 / c, "ks": ks / root_c, "cm": cm / c}
    p_values = {s: p_value(norms[s], tables[s]) for s in STATISTICS}
    reject = {s: p_values[s] < alpha for s in STATISTICS}
    cp = estimate_changepoint(grid)
    return TestReport(
        tn1=tn1, tn2=tn2, ks=ks, cm=cm, c_hat=c,
        tn1_norm=norms["tn1"], tn2_norm=norms["tn2"],
        ks_norm=norms["ks"], cm_norm=norms["cm"],
        p_values=p_values, reject=reject, alpha=alpha,
        s_hat=cp.s_hat, changepoint_index=cp.index,
    )
