"""Monte Carlo harness: rejection frequencies over a grid of scenarios.

Each cell (s0, n) runs ``replications`` independent generate-and-test
rounds of the chosen built-in model and tabulates the rejection frequency
of every statistic. Per-replication seeds are derived by hashing
(master_seed, model, case, s0, n, replication) so any cell is reproducible
in isolation and results do not depend on worker count.
"""

import csv
import hashlib
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import configtext
from .errors import ConfigError, DegenerateSampleError
from .kernels import default_config
from .models import gen_model1, gen_model2
from .nulldist import ensure_statistic_tables
from .stats import STATISTICS, run_test

_CASE_SLOPE = {"a": 0.5, "b": -0.5}


@dataclass(frozen=True)
class ExperimentConfig:
    model: int
    case: str = "a"
    s0_list: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    n_list: tuple = (100, 300, 500)
    replications: int = 1000
    alpha: float = 0.05
    master_seed: int = 0
    table_grid_1d: int | None = None
    table_grid_2d: int | None = None
    table_replications: int | None = None
    table_seed: int | None = None

    def __post_init__(self):
        if self.model not in (1, 2):
            raise ConfigError("model must be 1 or 2")
        if self.case not in _CASE_SLOPE:
            raise ConfigError("case must be 'a' or 'b'")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        for s0 in self.s0_list:
            if not 0.0 <= s0 <= 1.0:
                raise ConfigError("every s0 must lie in [0, 1]")
        for n in self.n_list:
            if n < 2:
                raise ConfigError("every n must be at least 2")

    @classmethod
    def from_config_text(cls, text: str) -> "ExperimentConfig":
        kv = configtext.parse_kv(text)
        known = {"model", "case", "s0_list", "n_list", "replications", "alpha",
                 "master_seed", "table_grid_1d", "table_grid_2d",
                 "table_replications", "table_seed"}
        unknown = set(kv) - known
        if unknown:
            raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
        kwargs = {}
        if "model" in kv:
            kwargs["model"] = int(kv["model"])
        if "case" in kv:
            kwargs["case"] = kv["case"]
        if "s0_list" in kv:
            kwargs["s0_list"] = configtext.parse_floats(kv["s0_list"], "s0_list")
        if "n_list" in kv:
            kwargs["n_list"] = tuple(int(v) for v in configtext.parse_floats(kv["n_list"], "n_list"))
        for key in ("replications", "master_seed", "table_grid_1d", "table_grid_2d",
                    "table_replications", "table_seed"):
            if key in kv:
                kwargs[key] = int(kv[key])
        if "alpha" in kv:
            kwargs["alpha"] = float(kv["alpha"])
        return cls(**kwargs)


@dataclass
class CellResult:
    s0: float
    n: int
    frequencies: dict
    std_errors: dict
    excluded: int = 0


@dataclass
class RejectionTable:
    config: ExperimentConfig
    cells: list = field(default_factory=list)

    def cell(self, s0: float, n: int) -> CellResult:
        for c in self.cells:
            if c.s0 == s0 and c.n == n:
                return c
        raise KeyError((s0, n))


def derive_seed(master_seed: int, model: int, case: str, s0: float, n: int, rep: int) -> int:
    """64-bit per-replication seed, a stable hash of the cell coordinates."""
    key = f"{master_seed}|{model}|{case}|{s0:.10g}|{n}|{rep}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def run_experiment(config: ExperimentConfig, tables: dict | None = None,
                   table_dir=None, workers: int = 1, progress=None) -> RejectionTable:
    """Run every (s0, n) cell of the experiment and tabulate rejections.

    ``tables`` may supply prebuilt null tables (statistic name -> table);
    otherwise they are loaded or built under ``table_dir`` with the
    config's table parameters. Replications that raise a degenerate-sample
    error are excluded and counted per cell (expected count: zero).
    """
    if tables is None:
        tables = ensure_statistic_tables(
            directory=table_dir,
            grid_m_1d=config.table_grid_1d,
            grid_m_2d=config.table_grid_2d,
            replications=config.table_replications,
            seed=config.table_seed,
            workers=workers,
            progress=progress,
        )
    gen = gen_model1 if config.model == 1 else gen_model2
    slope = _CASE_SLOPE[config.case]
    R = config.replications
    result = RejectionTable(config=config)
    for n in config.n_list:
        est = default_config(n)
        for s0 in config.s0_list:
            flags = np.zeros((R, len(STATISTICS)))
            ok = np.zeros(R, dtype=bool)

            def one(rep, *, _n=n, _s0=s0, _est=est):
                seed = derive_seed(config.master_seed, config.model, config.case, _s0, _n, rep)
                sample = gen(_n, _s0, slope, seed)
                try:
                    report = run_test(sample, _est, tables, alpha=config.alpha)
                except DegenerateSampleError:
                    return
                flags[rep] = [float(report.reject[s]) for s in STATISTICS]
                ok[rep] = True

            if workers <= 1:
                for rep in range(R):
                    one(rep)
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    list(pool.map(one, range(R)))
            used = int(ok.sum())
            if used == 0:
                raise DegenerateSampleError(f"all replications degenerate in cell (s0={s0}, n={n})")
            freq = {s: float(flags[ok, i].sum() / used) for i, s in enumerate(STATISTICS)}
            ses = {s: float(np.sqrt(freq[s] * (1.0 - freq[s]) / used)) for s in STATISTICS}
            result.cells.append(CellResult(s0=s0, n=n, frequencies=freq,
                                           std_errors=ses, excluded=R - used))
    return result


def _metadata_lines(config: ExperimentConfig) -> list:
    return [
        f"model={config.model}", f"case={config.case}",
        f"s0_list={' '.join('%g' % v for v in config.s0_list)}",
        f"n_list={' '.join(str(v) for v in config.n_list)}",
        f"replications={config.replications}", f"alpha={config.alpha}",
        f"master_seed={config.master_seed}",
    ]


def format_table(table: RejectionTable, style: str = "csv") -> str:
    """Render rejection frequencies (3 decimals) plus a metadata block."""
    if style == "csv":
        buf = io.StringIO()
        for line in _metadata_lines(table.config):
            buf.write(f"# {line}\n")
        writer = csv.writer(buf)
        header = ["s0", "n"] + list(STATISTICS) + [f"{s}_se" for s in STATISTICS] + ["excluded"]
        writer.writerow(header)
        for cell in sorted(table.cells, key=lambda c: (c.s0, c.n)):
            row = [f"{cell.s0:g}", str(cell.n)]
            row += [f"{cell.frequencies[s]:.3f}" for s in STATISTICS]
            row += [f"{cell.std_errors[s]:.4f}" for s in STATISTICS]
            row.append(str(cell.excluded))
            writer.writerow(row)
        return buf.getvalue()
    if style == "markdown":
        lines = ["| s0 | n | " + " | ".join(STATISTICS) + " |",
                 "|---" * (2 + len(STATISTICS)) + "|"]
        for cell in sorted(table.cells, key=lambda c: (c.s0, c.n)):
            vals = " | ".join(f"{cell.frequencies[s]:.3f}" for s in STATISTICS)
            lines.append(f"| {cell.s0:g} | {cell.n} | {vals} |")
        meta = ", ".join(_metadata_lines(table.config))
        return "\n".join(lines) + "\n\n" + meta + "\n"
    raise ConfigError(f"unknown table style {style!r}")


def parse_table_csv(text: str) -> list:
    """Parse ``format_table(..., 'csv')`` output back into cell dicts."""
    rows = []
    reader = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
    for rec in reader:
        rows.append({
            "s0": float(rec["s0"]), "n": int(rec["n"]),
            **{s: float(rec[s]) for s in STATISTICS},
            "excluded": int(rec["excluded"]),
        })
    return rows
