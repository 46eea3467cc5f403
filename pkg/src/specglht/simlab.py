"""Synthetic-data experiments: empirical size and size-adjusted power.

Builds the covariance models, one-way designs and coefficient alternatives
used in the numerical study, runs batches of seeded replicates through the
test pipeline, and persists rejection-rate tables (CSV plus a key-value
sidecar and per-test plot data).

Reproducibility contract: every random draw descends from the experiment
seed through fixed spawn keys — (0,) for the covariance rotation, (1, r) for
replicate r's data, (2, r, t, c) for bootstrap draws — so results are
bit-identical regardless of thread count.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from configparser import ConfigParser, Error as ConfigParserError
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.linalg import toeplitz as _toeplitz

from .composite import CompositeConfig, composite_from_fit
from .errors import ConfigError, IoError
from .glht import CRITERIA, FitArtifacts, GlhtProblem, fit, test_from_fit
from .selection import select_higher_order, select_ridge
from .shrinkage import Identity
from .spectrum import CANONICAL_PANEL, PriorWeights, as_prior

COV_VARIANTS = ("identity", "dense", "toeplitz", "discrete")
ALT_VARIANTS = ("null", "dense", "sparse")
SHRINKAGE_MODES = ("ridge", "identity", "higher", "composite")
_ID_CHARS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-")


# ---------------------------------------------------------------------------
# data models


@dataclass(frozen=True)
class CovModel:
    """Population covariance family, trace-normalized to p by default."""

    variant: str = "identity"
    rho: float = 0.5
    normalize_trace: bool = True

    def __post_init__(self) -> None:
        if self.variant not in COV_VARIANTS:
            raise ConfigError(f"covariance variant must be one of {COV_VARIANTS}")
        if self.variant == "toeplitz" and not 0.0 < self.rho < 1.0:
            raise ConfigError(f"toeplitz decay must lie in (0, 1), got {self.rho}")


@dataclass(frozen=True)
class CovFactor:
    """Covariance held as (eigenvalues, rotation); rotation None means axes."""

    eigenvalues: np.ndarray
    rotation: np.ndarray | None

    def matrix(self) -> np.ndarray:
        if self.rotation is None:
            return np.diag(self.eigenvalues)
        return (self.rotation * self.eigenvalues) @ self.rotation.T

    def half_apply(self, z: np.ndarray) -> np.ndarray:
        """Multiply by a square root of the covariance (columns of z i.i.d.)."""
        scaled = np.sqrt(self.eigenvalues)[:, None] * z
        if self.rotation is None:
            return scaled
        return self.rotation @ scaled


@dataclass(frozen=True)
class AlternativeModel:
    """Coefficient-matrix alternative; ``c`` is the overall signal knob."""

    variant: str = "null"
    c: float = 0.0
    density: float = 0.1
    magnitude: float = math.sqrt(10.0)

    def __post_init__(self) -> None:
        if self.variant not in ALT_VARIANTS:
            raise ConfigError(f"alternative variant must be one of {ALT_VARIANTS}")
        if self.c < 0.0:
            raise ConfigError(f"signal scale c must be nonnegative, got {self.c}")
        if not 0.0 < self.density <= 1.0:
            raise ConfigError(f"density must lie in (0, 1], got {self.density}")


@dataclass(frozen=True)
class TestSpec:
    """One test variant to evaluate per replicate."""

    test_id: str
    criterion: str = "LR"
    shrinkage: str = "ridge"
    prior: PriorWeights | None = None
    panel: tuple | None = None
    bootstrap_G: int = 10000

    def __post_init__(self) -> None:
        if not self.test_id or not set(self.test_id) <= _ID_CHARS:
            raise ConfigError(
                f"test_id must be nonempty and use only [A-Za-z0-9_.-], got {self.test_id!r}"
            )
        crit = str(self.criterion).upper()
        if crit not in CRITERIA:
            raise ConfigError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.shrinkage not in SHRINKAGE_MODES:
            raise ConfigError(
                f"shrinkage must be one of {SHRINKAGE_MODES}, got {self.shrinkage!r}"
            )
        object.__setattr__(self, "criterion", crit)
        if self.shrinkage in ("ridge", "higher"):
            object.__setattr__(self, "prior", as_prior(self.prior or (1.0, 0.0, 0.0)))
        if self.shrinkage == "composite":
            panel = tuple(as_prior(w) for w in (self.panel or CANONICAL_PANEL))
            object.__setattr__(self, "panel", panel)
            if int(self.bootstrap_G) < 1000:
                raise ConfigError(f"bootstrap_G must be >= 1000, got {self.bootstrap_G}")
        object.__setattr__(self, "bootstrap_G", int(self.bootstrap_G))

    def prior_label(self) -> str:
        if self.shrinkage == "identity":
            return "-"
        if self.shrinkage == "composite":
            return "|".join(_weights_label(w) for w in self.panel)
        return _weights_label(self.prior)


def _weights_label(w: PriorWeights) -> str:
    return f"{w.t0!r},{w.t1!r},{w.t2!r}"


@dataclass(frozen=True)
class SimConfig:
    """Full experiment description; the seed makes it a reproducible unit."""

    p: int
    N: int
    k: int
    group_sizes: tuple
    cov: CovModel
    alt: AlternativeModel
    tests: tuple
    replicates: int
    alpha: float = 0.05
    seed: int = 0
    size_adjusted: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_sizes", tuple(int(g) for g in self.group_sizes))
        object.__setattr__(self, "tests", tuple(self.tests))
        if self.p < 2:
            raise ConfigError(f"need p >= 2, got {self.p}")
        if self.k < 2:
            raise ConfigError(f"need k >= 2 groups, got {self.k}")
        if len(self.group_sizes) != self.k:
            raise ConfigError(f"{self.k} groups but {len(self.group_sizes)} sizes")
        if any(g < 1 for g in self.group_sizes):
            raise ConfigError("group sizes must be positive")
        if sum(self.group_sizes) != self.N:
            raise ConfigError(f"group sizes sum to {sum(self.group_sizes)}, not N={self.N}")
        if self.replicates < 100:
            raise ConfigError(f"need at least 100 replicates, got {self.replicates}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit an unsigned 64-bit integer")
        if not self.tests:
            raise ConfigError("at least one test spec is required")
        ids = [t.test_id for t in self.tests]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate test ids: {ids}")

    @property
    def n(self) -> int:
        return self.N - self.k

    def digest(self) -> str:
        groups = "/".join(str(g) for g in self.group_sizes)
        cov = self.cov.variant + (f"({self.cov.rho!r})" if self.cov.variant == "toeplitz" else "")
        alt = f"{self.alt.variant}(c={self.alt.c!r})"
        tests = ";".join(
            f"{t.test_id}:{t.criterion}:{t.shrinkage}:{t.prior_label()}" for t in self.tests
        )
        return (
            f"p={self.p};N={self.N};k={self.k};groups={groups};cov={cov};alt={alt};"
            f"alpha={self.alpha!r};replicates={self.replicates};seed={self.seed};"
            f"size_adjusted={int(self.size_adjusted)};tests=[{tests}]"
        )


@dataclass(frozen=True)
class SimRow:
    """One rejection-rate record."""

    test_id: str
    criterion: str
    shrinkage: str
    prior: str
    c: float
    signal: float
    rate: float
    se: float
    replicates: int
    seed: int


@dataclass(frozen=True)
class SimResult:
    """Rows plus the configuration digest and wall-clock metadata."""

    digest: str
    rows: tuple
    wall_clock: float


# ---------------------------------------------------------------------------
# generators


def _haar_orthogonal(p: int, rng: np.random.Generator) -> np.ndarray:
    """Exact Haar-distributed orthogonal matrix (QR with sign-fixed factor)."""
    a = rng.standard_normal((p, p))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * np.where(d >= 0.0, 1.0, -1.0)


def make_sigma(model: CovModel, p: int, rng: np.random.Generator) -> CovFactor:
    """Population covariance as an eigen-factor ready for sampling."""
    if p < 2:
        raise ConfigError(f"need p >= 2, got {p}")
    rotation: np.ndarray | None = None
    if model.variant == "identity":
        eigs = np.ones(p)
    elif model.variant == "dense":
        j = np.arange(1, p + 1, dtype=float)
        eigs = (0.1 + j) ** 6 + 0.05 * float(p) ** 6
        rotation = _haar_orthogonal(p, rng)
    elif model.variant == "toeplitz":
        mat = _toeplitz(model.rho ** np.arange(p))
        eigs, rotation = np.linalg.eigh(mat)
    else:  # discrete
        n_low = int(0.4 * p)
        n_mid = int(0.4 * p)
        n_high = p - n_low - n_mid
        eigs = np.concatenate([np.ones(n_low), 3.0 * np.ones(n_mid), 10.0 * np.ones(n_high)])
        rotation = _haar_orthogonal(p, rng)
    if model.normalize_trace:
        eigs = eigs * (p / eigs.sum())
    return CovFactor(eigenvalues=np.ascontiguousarray(eigs, dtype=float), rotation=rotation)


def make_design(k: int, group_sizes) -> tuple[np.ndarray, np.ndarray]:
    """One-way layout: one-hot design rows and successive-contrast columns."""
    sizes = [int(g) for g in group_sizes]
    if len(sizes) != k or any(g < 1 for g in sizes):
        raise ConfigError(f"need {k} positive group sizes, got {group_sizes}")
    N = sum(sizes)
    X = np.zeros((k, N))
    start = 0
    for g, size in enumerate(sizes):
        X[g, start : start + size] = 1.0
        start += size
    C = np.zeros((k, k - 1))
    for j in range(k - 1):
        C[j, j] = 1.0
        C[j + 1, j] = -1.0
    return X, C


def make_B(alt: AlternativeModel, p: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Coefficient matrix under the requested alternative."""
    if alt.variant == "null" or alt.c == 0.0:
        return np.zeros((p, k))
    if alt.variant == "dense":
        return alt.c * rng.standard_normal((p, k))
    nnz = int(round(alt.density * p))
    support = rng.choice(p, size=nnz, replace=False)
    B = np.zeros((p, k))
    B[support] = alt.c * alt.magnitude * rng.standard_normal((nnz, k))
    return B


def generate_Y(B: np.ndarray, X: np.ndarray, sigma_factor, rng: np.random.Generator) -> np.ndarray:
    """Signal plus covariance-shaped noise: B X + factor(Z)."""
    p = B.shape[0]
    N = X.shape[1]
    Z = rng.standard_normal((p, N))
    if isinstance(sigma_factor, CovFactor):
        noise = sigma_factor.half_apply(Z)
    elif np.ndim(sigma_factor) == 0:
        noise = float(sigma_factor) * Z
    else:
        noise = np.asarray(sigma_factor, dtype=float) @ Z
    return B @ X + noise


# ---------------------------------------------------------------------------
# experiment engine


def _data_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, r)))


def _boot_rng(seed: int, r: int, t: int, c: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2, r, t, c)))


def _eval_tests(
    cfg: SimConfig,
    artifacts: FitArtifacts,
    r: int,
    ci: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Statistic and p-value per test spec on one fitted replicate.

    Ridge selections are cached per prior and shared between plain-ridge and
    composite variants; the composite statistic reported for size adjustment
    is its max statistic.
    """
    spec = artifacts.spectrum
    selections: dict = {}
    stats = np.empty(len(cfg.tests))
    pvals = np.empty(len(cfg.tests))
    for ti, t in enumerate(cfg.tests):
        if t.shrinkage == "identity":
            out = test_from_fit(artifacts, Identity(), t.criterion)
            stats[ti], pvals[ti] = out.standardized, out.p_value
        elif t.shrinkage == "ridge":
            sel = selections.get(t.prior)
            if sel is None:
                sel = select_ridge(spec, t.prior)
                selections[t.prior] = sel
            out = test_from_fit(artifacts, sel.f_star, t.criterion)
            stats[ti], pvals[ti] = out.standardized, out.p_value
        elif t.shrinkage == "higher":
            key = ("higher", t.prior)
            sel = selections.get(key)
            if sel is None:
                sel = select_higher_order(spec, t.prior)
                selections[key] = sel
            out = test_from_fit(artifacts, sel.f_star, t.criterion)
            stats[ti], pvals[ti] = out.standardized, out.p_value
        else:  # composite
            ccfg = CompositeConfig(
                panel=t.panel, criterion=t.criterion, bootstrap_G=t.bootstrap_G
            )
            outcome = composite_from_fit(
                artifacts, ccfg, rng=_boot_rng(cfg.seed, r, ti, ci), selections=selections
            )
            stats[ti], pvals[ti] = outcome.t_max, outcome.p_value
    return stats, pvals


def _run_replicates(
    cfg: SimConfig,
    c_values: tuple,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """(tests x c x replicates) statistic and p-value arrays.

    One coefficient draw and one noise draw per replicate are shared across
    the whole c grid (common random numbers), so power curves vary only
    through the signal scale.
    """
    rot_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
    factor = make_sigma(cfg.cov, cfg.p, rot_rng)
    X, C = make_design(cfg.k, cfg.group_sizes)
    unit_alt = replace(cfg.alt, c=1.0) if cfg.alt.variant != "null" else cfg.alt

    n_tests, n_c, R = len(cfg.tests), len(c_values), cfg.replicates
    stats = np.empty((n_tests, n_c, R))
    pvals = np.empty((n_tests, n_c, R))

    def one(r: int) -> None:
        rng = _data_rng(cfg.seed, r)
        B_unit = make_B(unit_alt, cfg.p, cfg.k, rng)
        noise = generate_Y(np.zeros((cfg.p, cfg.k)), X, factor, rng)
        signal_part = B_unit @ X
        for ci, c in enumerate(c_values):
            Y = c * signal_part + noise
            artifacts = fit(GlhtProblem(Y, X, C))
            stats[:, ci, r], pvals[:, ci, r] = _eval_tests(cfg, artifacts, r, ci)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(R)))
    else:
        for r in range(R):
            one(r)
    return stats, pvals


def _row(cfg: SimConfig, t: TestSpec, c: float, rate: float) -> SimRow:
    return SimRow(
        test_id=t.test_id,
        criterion=t.criterion,
        shrinkage=t.shrinkage,
        prior=t.prior_label(),
        c=float(c),
        signal=float(cfg.n ** 0.25 * math.sqrt(cfg.p) * c),
        rate=float(rate),
        se=float(math.sqrt(rate * (1.0 - rate) / cfg.replicates)),
        replicates=cfg.replicates,
        seed=cfg.seed,
    )


def empirical_size(cfg: SimConfig, threads: int = 1) -> SimResult:
    """Null rejection rate of every test spec at level alpha."""
    if cfg.alt.variant != "null":
        raise ConfigError("empirical size requires the null alternative")
    start = time.perf_counter()
    _, pvals = _run_replicates(cfg, (0.0,), threads)
    rows = tuple(
        _row(cfg, t, 0.0, float(np.mean(pvals[ti, 0] < cfg.alpha)))
        for ti, t in enumerate(cfg.tests)
    )
    return SimResult(digest=cfg.digest(), rows=rows, wall_clock=time.perf_counter() - start)


def power_curve(cfg: SimConfig, c_grid, threads: int = 1) -> SimResult:
    """Rejection rate along a signal grid, optionally size adjusted.

    With size adjustment, each test's cutoff is the empirical (1 - alpha)
    quantile of its statistic over the c = 0 replicates and rejection means
    exceeding that cutoff, so the curve starts at alpha by construction.
    """
    c_values = tuple(float(c) for c in c_grid)
    if not c_values or c_values[0] != 0.0:
        raise ConfigError("c grid must start at 0")
    if any(b <= a for a, b in zip(c_values, c_values[1:])):
        raise ConfigError("c grid must be strictly ascending")
    start = time.perf_counter()
    stats, pvals = _run_replicates(cfg, c_values, threads)
    rows = []
    for ti, t in enumerate(cfg.tests):
        if cfg.size_adjusted:
            cutoff = np.quantile(stats[ti, 0], 1.0 - cfg.alpha)
            rates = np.mean(stats[ti] > cutoff, axis=1)
        else:
            rates = np.mean(pvals[ti] < cfg.alpha, axis=1)
        rows.extend(_row(cfg, t, c, float(rate)) for c, rate in zip(c_values, rates))
    return SimResult(digest=cfg.digest(), rows=tuple(rows), wall_clock=time.perf_counter() - start)


# ---------------------------------------------------------------------------
# persistence

_CSV_HEADER = (
    "test_id",
    "criterion",
    "shrinkage",
    "prior",
    "c",
    "signal",
    "rate",
    "se",
    "replicates",
    "seed",
)


def persist(result: SimResult, path) -> None:
    """Write the rate table (CSV), a key-value sidecar, and per-test plot data.

    The sidecar lands at <path>.cfg and each test's two-column plot file at
    <path>.plot.<test_id>.csv; numbers use shortest lossless formatting so a
    load() round-trips exactly.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_HEADER)
            for row in result.rows:
                writer.writerow(
                    (
                        row.test_id,
                        row.criterion,
                        row.shrinkage,
                        row.prior,
                        repr(row.c),
                        repr(row.signal),
                        repr(row.rate),
                        repr(row.se),
                        row.replicates,
                        row.seed,
                    )
                )
        sidecar = ConfigParser()
        sidecar["run"] = {
            "digest": result.digest,
            "wall_clock": repr(result.wall_clock),
            "rows": str(len(result.rows)),
        }
        with Path(f"{path}.cfg").open("w", encoding="utf-8") as fh:
            sidecar.write(fh)
        for test_id in dict.fromkeys(r.test_id for r in result.rows):
            with Path(f"{path}.plot.{test_id}.csv").open(
                "w", newline="", encoding="utf-8"
            ) as fh:
                writer = csv.writer(fh)
                writer.writerow(("signal", "rate"))
                for row in result.rows:
                    if row.test_id == test_id:
                        writer.writerow((repr(row.signal), repr(row.rate)))
    except OSError as exc:
        raise IoError(f"cannot write results to {path}: {exc}") from exc


def load(path) -> SimResult:
    """Read back a persisted result (CSV plus sidecar) exactly."""
    path = Path(path)
    try:
        with path.open("r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != _CSV_HEADER:
                raise IoError(f"unexpected header in {path}: {header}")
            rows = []
            for rec in reader:
                if len(rec) != len(_CSV_HEADER):
                    raise IoError(f"malformed record in {path}: {rec}")
                rows.append(
                    SimRow(
                        test_id=rec[0],
                        criterion=rec[1],
                        shrinkage=rec[2],
                        prior=rec[3],
                        c=float(rec[4]),
                        signal=float(rec[5]),
                        rate=float(rec[6]),
                        se=float(rec[7]),
                        replicates=int(rec[8]),
                        seed=int(rec[9]),
                    )
                )
        sidecar = ConfigParser()
        read = sidecar.read(f"{path}.cfg", encoding="utf-8")
        if not read:
            raise IoError(f"missing sidecar {path}.cfg")
        digest = sidecar["run"]["digest"]
        wall_clock = float(sidecar["run"]["wall_clock"])
    except OSError as exc:
        raise IoError(f"cannot read results from {path}: {exc}") from exc
    except (KeyError, ValueError, ConfigParserError) as exc:
        raise IoError(f"malformed results at {path}: {exc}") from exc
    return SimResult(digest=digest, rows=tuple(rows), wall_clock=wall_clock)
