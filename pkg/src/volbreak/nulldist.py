"""Monte Carlo tables for the limiting null distributions.

Four table kinds cover the four normalized statistics:

* ``kiefer-sup`` / ``kiefer-cvm``: functionals of the two-parameter process
  K(s, t) = B(s, t) - s B(1, t) built from a Brownian sheet B on the unit
  square (a bridge in s, a Brownian motion in t). ``kiefer-sup`` reduces a
  lattice replication by sup |K|, ``kiefer-cvm`` by the sup over t of the
  mean over s of K^2.
* ``bridge-sup`` / ``bridge-cvm``: the t = 1 marginals, i.e. functionals of
  a standard Brownian bridge. ``bridge-sup`` draws are continuum suprema
  (lattice path refined with exact conditional interval extrema);
  ``bridge-cvm`` is the plain lattice mean of the squared path.

Replications are independent given per-replication seeds spawned from the
master seed, so tables are bit-identical for any worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backend import impl
from .errors import ConfigError, TableFormatError

KINDS = ("kiefer-sup", "kiefer-cvm", "bridge-sup", "bridge-cvm")
STATISTIC_KIND = {"tn1": "kiefer-sup", "tn2": "kiefer-cvm", "ks": "bridge-sup", "cm": "bridge-cvm"}

DEFAULT_GRID_1D = 1000
DEFAULT_GRID_2D = 200
DEFAULT_REPLICATIONS = 100_000
DEFAULT_SEED = 20250801

_FILE_MAGIC = "volbreak-null-table v1"
_TABLE_DIR_ENV = "VOLBREAK_TABLE_DIR"


@dataclass
class NullTable:
    """A sorted Monte Carlo sample of a limiting-law functional."""

    kind: str
    grid_m: int
    replications: int
    seed: int
    draws: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown table kind {self.kind!r}")
        self.draws = np.asarray(self.draws, dtype=float)
        if self.draws.ndim != 1 or self.draws.shape[0] != self.replications:
            raise ConfigError("draws must be 1-d with one entry per replication")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if not np.isfinite(self.draws).all():
            raise ConfigError("draws contain non-finite values")
        if (self.draws < 0).any() or (np.diff(self.draws) < 0).any():
            raise ConfigError("draws must be nonnegative and sorted ascending")


def default_grid_m(kind: str) -> int:
    return DEFAULT_GRID_2D if kind.startswith("kiefer") else DEFAULT_GRID_1D


def _rep_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))


def _run_replications(fn, replications, workers, progress):
    draws = np.empty(replications)

    def run_range(a, b):
        for r in range(a, b):
            draws[r] = fn(r)

    if workers <= 1:
        chunk = max(1, replications // 50)
        for a in range(0, replications, chunk):
            run_range(a, min(a + chunk, replications))
            if progress is not None:
                progress(min(a + chunk, replications), replications)
    else:
        chunk = max(1, -(-replications // (workers * 8)))
        ranges = [(a, min(a + chunk, replications)) for a in range(0, replications, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_range, a, b) for a, b in ranges]
            done = 0
            for fut, (a, b) in zip(futures, ranges):
                fut.result()
                done += b - a
                if progress is not None:
                    progress(done, replications)
    return draws


def simulate_kiefer(kind: str, grid_m: int, replications: int, seed: int,
                    workers: int = 1, progress=None) -> NullTable:
    """Simulate a table of sheet functionals on an (grid_m x grid_m) lattice."""
    if kind not in ("kiefer-sup", "kiefer-cvm"):
        raise ConfigError(f"kind must be kiefer-sup or kiefer-cvm, got {kind!r}")
    if grid_m < 2 or replications < 1:
        raise ConfigError("need grid_m >= 2 and replications >= 1")
    want_sup = kind == "kiefer-sup"

    def one(rep):
        zn = _rep_rng(seed, rep).standard_normal((grid_m, grid_m))
        sup, cvm, _ = impl.sheet_stats(zn)
        return sup if want_sup else cvm

    draws = _run_replications(one, replications, workers, progress)
    draws.sort()
    return NullTable(kind=kind, grid_m=grid_m, replications=replications, seed=seed, draws=draws)


def simulate_bridge(kind: str, grid_m: int, replications: int, seed: int,
                    workers: int = 1, progress=None) -> NullTable:
    """Simulate a table of Brownian-bridge functionals on a grid_m lattice."""
    if kind not in ("bridge-sup", "bridge-cvm"):
        raise ConfigError(f"kind must be bridge-sup or bridge-cvm, got {kind!r}")
    if grid_m < 2 or replications < 1:
        raise ConfigError("need grid_m >= 2 and replications >= 1")
    want_sup = kind == "bridge-sup"

    def one(rep):
        rng = _rep_rng(seed, rep)
        zn = rng.standard_normal(grid_m)
        if want_sup:
            u1 = rng.random(grid_m)
            u2 = rng.random(grid_m)
            return impl.bridge_sup_reflected(zn, u1, u2)
        return impl.bridge_lattice_stats(zn)[1]

    draws = _run_replications(one, replications, workers, progress)
    draws.sort()
    return NullTable(kind=kind, grid_m=grid_m, replications=replications, seed=seed, draws=draws)


def simulate_table(kind: str, grid_m: int, replications: int, seed: int,
                   workers: int = 1, progress=None) -> NullTable:
    if kind.startswith("kiefer"):
        return simulate_kiefer(kind, grid_m, replications, seed, workers, progress)
    return simulate_bridge(kind, grid_m, replications, seed, workers, progress)


def kiefer_lattice_values(points, grid_m: int, replications: int, seed: int,
                          workers: int = 1) -> np.ndarray:
    """Sample K(s, t) at fixed lattice points over many sheet replications.

    ``points`` is a sequence of (s, t) pairs; each coordinate must be a
    multiple of 1/grid_m in (0, 1]. Returns an array of shape
    (replications, len(points)). Used for covariance diagnostics.
    """
    idx_s = np.empty(len(points), dtype=np.int64)
    idx_t = np.empty(len(points), dtype=np.int64)
    for p, (s, t) in enumerate(points):
        i, j = round(s * grid_m), round(t * grid_m)
        if not (1 <= i <= grid_m and 1 <= j <= grid_m
                and abs(s * grid_m - i) < 1e-9 and abs(t * grid_m - j) < 1e-9):
            raise ConfigError(f"point {(s, t)} is not on the 1/{grid_m} lattice")
        idx_s[p], idx_t[p] = i, j
    out = np.empty((replications, len(points)))

    def run_range(a, b):
        for r in range(a, b):
            zn = _rep_rng(seed, r).standard_normal((grid_m, grid_m))
            out[r] = impl.sheet_values_at(zn, idx_s, idx_t)

    if workers <= 1:
        run_range(0, replications)
    else:
        chunk = max(1, -(-replications // (workers * 8)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_range, a, min(a + chunk, replications))
                       for a in range(0, replications, chunk)]
            for fut in futures:
                fut.result()
    return out


def kolmogorov_cdf(x: float) -> float:
    """Distribution function of sup |B0| via the alternating series
    1 - 2 sum_k (-1)^(k-1) exp(-2 k^2 x^2), truncated below 1e-12."""
    if not x > 0:
        raise ConfigError("kolmogorov_cdf requires x > 0")
    total = 0.0
    sign = 1.0
    for k in range(1, 100000):
        term = np.exp(-2.0 * k * k * x * x)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return float(min(max(1.0 - 2.0 * total, 0.0), 1.0))


def quantile(table: NullTable, p: float) -> float:
    """Conservative empirical quantile: the order statistic ceil(p * R)."""
    if not 0.0 < p < 1.0:
        raise ConfigError("quantile level must lie in (0, 1)")
    R = table.replications
    k = int(np.floor(p * R))
    if p * R - k > 1e-9:  # exact integers stay put despite float noise
        k += 1
    k = min(max(k, 1), R)
    return float(table.draws[k - 1])


def table_filename(kind: str, grid_m: int, replications: int, seed: int) -> str:
    return f"{kind}_m{grid_m}_r{replications}_s{seed}.txt"


def save_table(table: NullTable, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_FILE_MAGIC + "\n")
        fh.write(f"kind={table.kind}\n")
        fh.write(f"grid_m={table.grid_m}\n")
        fh.write(f"replications={table.replications}\n")
        fh.write(f"seed={table.seed}\n")
        fh.write("draws:\n")
        for v in table.draws:
            fh.write("%.17g\n" % v)


def load_table(path) -> NullTable:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise TableFormatError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != _FILE_MAGIC:
        raise TableFormatError(f"{path}: not a {_FILE_MAGIC!r} file")
    header = {}
    i = 1
    while i < len(lines) and lines[i] != "draws:":
        if "=" not in lines[i]:
            raise TableFormatError(f"{path}: malformed header line {lines[i]!r}")
        k, v = lines[i].split("=", 1)
        header[k] = v
        i += 1
    if i >= len(lines):
        raise TableFormatError(f"{path}: missing draws section")
    try:
        kind = header["kind"]
        grid_m = int(header["grid_m"])
        replications = int(header["replications"])
        seed = int(header["seed"])
    except (KeyError, ValueError) as exc:
        raise TableFormatError(f"{path}: bad header: {exc}") from exc
    body = lines[i + 1:]
    if len(body) != replications:
        raise TableFormatError(
            f"{path}: expected {replications} draws, found {len(body)} (truncated?)"
        )
    try:
        draws = np.array([float(v) for v in body])
    except ValueError as exc:
        raise TableFormatError(f"{path}: unparsable draw: {exc}") from exc
    try:
        return NullTable(kind=kind, grid_m=grid_m, replications=replications,
                         seed=seed, draws=draws)
    except ConfigError as exc:
        raise TableFormatError(f"{path}: {exc}") from exc


def default_table_dir() -> Path:
    env = os.environ.get(_TABLE_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "volbreak" / "tables"


def ensure_table(kind: str, directory=None, grid_m=None, replications=None,
                 seed=None, workers: int = 1, progress=None) -> NullTable:
    """Load the cached table for these parameters, simulating it if absent."""
    if kind not in KINDS:
        raise ConfigError(f"unknown table kind {kind!r}")
    directory = Path(directory) if directory is not None else default_table_dir()
    grid_m = grid_m if grid_m is not None else default_grid_m(kind)
    replications = replications if replications is not None else DEFAULT_REPLICATIONS
    seed = seed if seed is not None else DEFAULT_SEED
    path = directory / table_filename(kind, grid_m, replications, seed)
    if path.exists():
        return load_table(path)
    table = simulate_table(kind, grid_m, replications, seed, workers, progress)
    save_table(table, path)
    return table


def ensure_statistic_tables(directory=None, grid_m_1d=None, grid_m_2d=None,
                            replications=None, seed=None, workers: int = 1,
                            progress=None) -> dict:
    """Tables for all four statistics, keyed by statistic name."""
    tables = {}
    for stat, kind in STATISTIC_KIND.items():
        grid_m = grid_m_2d if kind.startswith("kiefer") else grid_m_1d
        tables[stat] = ensure_table(kind, directory, grid_m, replications, seed,
                                    workers, progress)
    return tables
