"""Synthetic data generators for heteroscedastic time-series regression.

The generic process is the scalar CHARN recursion

    Y_t = m(X_t) + sigma_t(X_t) eps_t,

where the covariate X_t is either an exogenous AR(1) driven by its own
innovation stream or the lagged response Y_{t-1}, and the volatility
function sigma_t switches from a pre-break to a post-break form after
observation floor(n * break_fraction). Two concrete parameterizations used
throughout the test suite and the Monte Carlo harness are exposed as
``gen_model1`` and ``gen_model2``.

All randomness flows from an integer seed: each generator owns one
``numpy.random.Generator`` per call, and for exogenous covariates the two
innovation streams are interleaved deterministically (covariate innovation
first, then response innovation, per time step).
"""

from dataclasses import dataclass, field

import numpy as np

from . import configtext
from .backend import impl
from .errors import ConfigError, SimulationDivergedError

_MEAN_KINDS = {"zero": impl.MEAN_ZERO, "linear": impl.MEAN_LINEAR}
_VOL_KINDS = {"const": impl.VOL_CONST, "exp": impl.VOL_EXP, "arch": impl.VOL_ARCH}
_COV_KINDS = {"ar1": impl.COV_AR1, "lag1": impl.COV_LAG1}
_VOL_NPARAMS = {"const": 1, "exp": 2, "arch": 2}

DEFAULT_BURN_IN = 200


@dataclass
class Sample:
    """An observed series of covariate/response pairs.

    x is (n, d), y is (n,). ``sigma`` optionally records the volatility value
    the generator applied at each step (a hook for deterministic tests);
    it is not part of the statistical payload.
    """

    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim == 1:
            self.x = self.x[:, None]
        if self.x.ndim != 2 or self.y.ndim != 1:
            raise ConfigError("sample needs x with shape (n, d) and y with shape (n,)")
        if self.x.shape[0] != self.y.shape[0]:
            raise ConfigError(
                f"x has {self.x.shape[0]} rows but y has {self.y.shape[0]} entries"
            )
        if self.x.shape[0] == 0:
            raise ConfigError("sample is empty")
        if not (np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise ConfigError("sample contains non-finite entries")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


def _check_vol(name: str, params: tuple, label: str):
    if name not in _VOL_KINDS:
        raise ConfigError(f"{label}: unknown volatility function {name!r}")
    if len(params) != _VOL_NPARAMS[name]:
        raise ConfigError(
            f"{label}: {name!r} takes {_VOL_NPARAMS[name]} parameter(s), got {len(params)}"
        )
    if name == "const" and params[0] <= 0:
        raise ConfigError(f"{label}: const level must be positive")
    if name == "exp" and params[0] <= 0:
        raise ConfigError(f"{label}: exp scale must be positive")
    if name == "arch" and (params[0] <= 0 or params[1] < 0):
        raise ConfigError(f"{label}: arch needs b0 > 0 and b1 >= 0")


@dataclass(frozen=True)
class ModelSpec:
    """Specification of a CHARN data-generating process."""

    mean_fn: str = "zero"
    mean_params: tuple = ()
    vol_pre: str = "const"
    vol_pre_params: tuple = (1.0,)
    vol_post: str = "const"
    vol_post_params: tuple = (1.0,)
    break_fraction: float = 0.0
    covariate: str = "lag1"
    covariate_params: tuple = ()
    innovation: str = "normal"
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.mean_fn not in _MEAN_KINDS:
            raise ConfigError(f"unknown mean function {self.mean_fn!r}")
        need = 1 if self.mean_fn == "linear" else 0
        if len(self.mean_params) != need:
            raise ConfigError(f"mean_fn {self.mean_fn!r} takes {need} parameter(s)")
        _check_vol(self.vol_pre, self.vol_pre_params, "vol_pre")
        _check_vol(self.vol_post, self.vol_post_params, "vol_post")
        if not 0.0 <= self.break_fraction <= 1.0:
            raise ConfigError("break_fraction must lie in [0, 1]")
        if self.covariate not in _COV_KINDS:
            raise ConfigError(f"unknown covariate kind {self.covariate!r}")
        need = 1 if self.covariate == "ar1" else 0
        if len(self.covariate_params) != need:
            raise ConfigError(f"covariate {self.covariate!r} takes {need} parameter(s)")
        if self.innovation != "normal":
            raise ConfigError("only standard-normal innovations are implemented")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be nonnegative")

    def to_config_text(self) -> str:
        fmt = lambda params: " ".join(repr(p) for p in params)
        return configtext.format_kv({
            "mean_fn": self.mean_fn,
            "mean_params": fmt(self.mean_params),
            "vol_pre": self.vol_pre,
            "vol_pre_params": fmt(self.vol_pre_params),
            "vol_post": self.vol_post,
            "vol_post_params": fmt(self.vol_post_params),
            "break_fraction": repr(self.break_fraction),
            "covariate": self.covariate,
            "covariate_params": fmt(self.covariate_params),
            "innovation": self.innovation,
            "burn_in": str(self.burn_in),
        })

    @classmethod
    def from_config_text(cls, text: str) -> "ModelSpec":
        kv = configtext.parse_kv(text)
        known = {
            "mean_fn", "mean_params", "vol_pre", "vol_pre_params", "vol_post",
            "vol_post_params", "break_fraction", "covariate", "covariate_params",
            "innovation", "burn_in",
        }
        unknown = set(kv) - known
        if unknown:
            raise ConfigError(f"unknown model keys: {sorted(unknown)}")
        kwargs = {}
        for key in ("mean_fn", "vol_pre", "vol_post", "covariate", "innovation"):
            if key in kv:
                kwargs[key] = kv[key]
        for key in ("mean_params", "vol_pre_params", "vol_post_params", "covariate_params"):
            if key in kv:
                kwargs[key] = configtext.parse_floats(kv[key], key)
        if "break_fraction" in kv:
            kwargs["break_fraction"] = float(kv["break_fraction"])
        if "burn_in" in kv:
            kwargs["burn_in"] = int(kv["burn_in"])
        return cls(**kwargs)


def check_arch_stationarity(ar_coeffs, arch_coeffs) -> bool:
    """Sufficient stationarity/mixing check for the linear AR-ARCH recursion.

    For Y_t = a_1 Y_{t-1} + ... + a_d Y_{t-d}
    + sqrt(b_0 + b_1 Y_{t-1}^2 + ... + b_d Y_{t-d}^2) eps_t with standard
    normal innovations, returns True iff (sum |a_i|)^2 + sum b_i < 1.
    """
    a = np.asarray(ar_coeffs, dtype=float)
    b = np.asarray(arch_coeffs, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ConfigError("ar_coeffs and arch_coeffs must be 1-d and of equal length")
    if (b < 0).any():
        raise ConfigError("arch_coeffs must be nonnegative")
    return float(np.abs(a).sum()) ** 2 + float(b.sum()) < 1.0


def gen_charn(spec: ModelSpec, n: int, seed: int, eps_override=None) -> Sample:
    """Simulate ``n`` observations of the process described by ``spec``.

    Burn-in steps are discarded; they run under the volatility regime of
    observation t = 1 (the pre-break function when the break index is at
    least 1, else the post-break one), so break_fraction in {0, 1} burns in
    under the single regime in force.

    ``eps_override`` replaces the response innovations of the n observed
    steps (a deterministic-test hook); the random streams are still drawn,
    so the covariate path of exogenous designs is unchanged.
    """
    if n < 1:
        raise ConfigError("n must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    total = spec.burn_in + n
    if spec.covariate == "ar1":
        z = rng.standard_normal(2 * total)
        xi = np.ascontiguousarray(z[0::2])
        eps = np.ascontiguousarray(z[1::2])
        cov_phi = float(spec.covariate_params[0])
    else:
        xi = np.empty(0)
        eps = rng.standard_normal(total)
        cov_phi = 0.0
    if eps_override is not None:
        eps_override = np.asarray(eps_override, dtype=float)
        if eps_override.shape != (n,):
            raise ConfigError(f"eps_override must have shape ({n},)")
        eps = eps.copy()
        eps[spec.burn_in:] = eps_override
    break_index = int(np.floor(n * spec.break_fraction))
    pre_p = spec.vol_pre_params + (0.0,) * (2 - len(spec.vol_pre_params))
    post_p = spec.vol_post_params + (0.0,) * (2 - len(spec.vol_post_params))
    mean_a = float(spec.mean_params[0]) if spec.mean_fn == "linear" else 0.0
    xs, ys, sig, bad = impl.charn_path(
        n, spec.burn_in, break_index,
        _MEAN_KINDS[spec.mean_fn], mean_a,
        _VOL_KINDS[spec.vol_pre], float(pre_p[0]), float(pre_p[1]),
        _VOL_KINDS[spec.vol_post], float(post_p[0]), float(post_p[1]),
        _COV_KINDS[spec.covariate], cov_phi, xi, eps,
    )
    if bad >= 0:
        raise SimulationDivergedError(bad)
    return Sample(x=xs[:, None], y=ys, sigma=sig)


def model1_spec(s0: float, slope: float, burn_in: int = DEFAULT_BURN_IN) -> ModelSpec:
    """Exogenous-design spec: AR(1) covariate, exponential volatility break."""
    return ModelSpec(
        mean_fn="linear", mean_params=(slope,),
        vol_pre="exp", vol_pre_params=(0.5, -0.2),
        vol_post="exp", vol_post_params=(0.5, 0.2),
        break_fraction=s0,
        covariate="ar1", covariate_params=(0.4,),
        burn_in=burn_in,
    )


def model2_spec(s0: float, slope: float, burn_in: int = DEFAULT_BURN_IN) -> ModelSpec:
    """AR-ARCH spec: lagged response covariate, quadratic volatility break."""
    return ModelSpec(
        mean_fn="linear", mean_params=(slope,),
        vol_pre="arch", vol_pre_params=(0.1, 0.1),
        vol_post="arch", vol_post_params=(0.1, 0.7),
        break_fraction=s0,
        covariate="lag1",
        burn_in=burn_in,
    )


def gen_model1(n: int, s0: float, slope: float, seed: int,
               burn_in: int = DEFAULT_BURN_IN, eps_override=None) -> Sample:
    """Heteroscedastic regression on an exogenous AR(1) covariate.

    X_t = 0.4 X_{t-1} + xi_t and Y_t = slope * X_t + sigma_t(X_t) eps_t with
    sigma_t(x) = 0.5 exp(-0.2 x) up to observation floor(n*s0) and
    0.5 exp(0.2 x) afterwards; xi and eps are independent standard normal
    streams interleaved per step.
    """
    return gen_charn(model1_spec(s0, slope, burn_in), n, seed, eps_override=eps_override)


def gen_model2(n: int, s0: float, slope: float, seed: int,
               burn_in: int = DEFAULT_BURN_IN, eps_override=None) -> Sample:
    """Heteroscedastic autoregression (AR-ARCH).

    Y_t = slope * Y_{t-1} + sigma_t(Y_{t-1}) eps_t with
    sigma_t(x) = sqrt(0.1 + 0.1 x^2) up to observation floor(n*s0) and
    sqrt(0.1 + 0.7 x^2) afterwards; the covariate column is Y_{t-1}.
    """
    return gen_charn(model2_spec(s0, slope, burn_in), n, seed, eps_override=eps_override)
