"""Deterministic parallel Monte Carlo for tree parameters, plus the
statistics used to check linear mean growth and normal fluctuations.

Replica ``r`` at size index ``s`` always draws from the stream
``derive_seed(master, s, r)``.  Workers only decide *when* a replica runs;
values land in a preallocated slot indexed by replica, and every statistic
is computed afterwards in replica order.  Output is therefore identical for
any worker count.
"""

from __future__ import annotations

import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numba as nb
import numpy as np
from scipy.special import ndtr

from . import rng
from .constants import MU_BST, MU_RRT
from .generate import bst_arrays, rrt_parents
from .params import domination_value, independence_flags, k_domination_value
from .tree import ModelTag, _csr_children

log = logging.getLogger(__name__)

PILOT_DOMAIN = 1 << 40  # first seed-path index of pilot runs; final runs use size indices
Z95 = 1.959963984540054


class ExperimentError(RuntimeError):
    """A replica failed; the experiment is abandoned as a whole."""


class DegenerateSampleError(ValueError):
    """Statistic undefined for zero-variance samples."""


# -- parameters ------------------------------------------------------------------

_BASE = {"I": 0, "M": 0, "VC": 0, "EC": 0, "CC": 0, "D": 1}


@dataclass(frozen=True)
class Parameter:
    """A tree parameter: I, D, M, VC, EC, CC, or D<k> for k-domination."""

    name: str
    k: int | None = None

    @classmethod
    def parse(cls, text: str) -> "Parameter":
        text = text.strip()
        if text in _BASE:
            return cls(text)
        m = re.fullmatch(r"D(?:_?k?\(?)(\d+)\)?", text)
        if m and int(m.group(1)) >= 1:
            return cls("Dk", int(m.group(1)))
        raise ValueError(f"unknown parameter {text!r} (expected I, D, M, VC, EC, CC or D<k>)")

    def __str__(self) -> str:
        return f"D{self.k}" if self.name == "Dk" else self.name

    def from_independence(self, n: int, value: int) -> int:
        if self.name == "M" or self.name == "VC":
            return n - value
        return value

    def growth_constant(self, model: ModelTag) -> float | None:
        """Mean growth rate where a closed form is known (I and its affine relatives)."""
        mu = MU_BST if model is ModelTag.BST else MU_RRT
        return {"I": mu, "EC": mu, "CC": mu, "M": 1.0 - mu, "VC": 1.0 - mu}.get(self.name)


# -- replica kernels ---------------------------------------------------------------

@nb.njit(cache=True, nogil=True)
def _replica_value(model_code, param_code, k, n, stream):
    state = np.empty(1, dtype=np.uint64)
    state[0] = stream
    if model_code == 0:
        parent = bst_arrays(state, n)[0]
    else:
        parent = rrt_parents(state, n)
    if param_code == 0:
        return np.int64(independence_flags(parent).sum())
    if param_code == 1:
        child_start, child_list = _csr_children(parent)
        return domination_value(child_start, child_list)
    return k_domination_value(parent, k)


@nb.njit(cache=True, nogil=True)
def _chunk_values(model_code, param_code, k, n, streams, out):
    for i in range(streams.shape[0]):
        out[i] = _replica_value(model_code, param_code, k, n, streams[i])


def replica_values(
    model: ModelTag,
    parameter: Parameter,
    n: int,
    streams: np.ndarray,
    workers: int = 1,
) -> np.ndarray:
    """Parameter values for each stream seed, computed on ``workers`` threads."""
    model_code = 0 if model is ModelTag.BST else 1
    if parameter.name == "Dk":
        param_code, k = 2, int(parameter.k)
    else:
        param_code, k = _BASE[parameter.name], 1
    out = np.empty(streams.shape[0], dtype=np.int64)
    count = streams.shape[0]
    if count == 0:
        return out
    chunk = max(1, math.ceil(count / (4 * max(workers, 1))))
    bounds = [(a, min(a + chunk, count)) for a in range(0, count, chunk)]

    def work(lo_hi):
        lo, hi = lo_hi
        try:
            _chunk_values(model_code, param_code, k, n, streams[lo:hi], out[lo:hi])
        except MemoryError:
            raise ExperimentError(
                f"out of memory in replicas {lo}..{hi - 1} at n = {n}"
            ) from None

    if workers <= 1:
        for b in bounds:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, bounds))
    if parameter.name in ("M", "VC"):
        out = n - out
    return out


# -- streaming moments -----------------------------------------------------------

@dataclass
class Moments:
    """Exact one-pass power sums.

    Values are accumulated as rationals (integers stay integers, floats are
    taken at their exact binary value), so mean and central moments carry no
    rounding until the final conversion to float.
    """

    count: int = 0
    sums: list = field(default_factory=lambda: [Fraction(0)] * 4)

    def push(self, x) -> None:
        x = Fraction(x)
        p = x
        for i in range(4):
            self.sums[i] += p
            p *= x
        self.count += 1

    def extend(self, xs: Iterable) -> "Moments":
        for x in xs:
            self.push(int(x) if isinstance(x, (np.integer, int)) else float(x))
        return self

    def merge(self, other: "Moments") -> "Moments":
        return Moments(self.count + other.count, [a + b for a, b in zip(self.sums, other.sums)])

    def _central(self):
        N = self.count
        a1, a2, a3, a4 = (s / N for s in self.sums)
        m2 = a2 - a1**2
        m3 = a3 - 3 * a1 * a2 + 2 * a1**3
        m4 = a4 - 4 * a1 * a3 + 6 * a1**2 * a2 - 3 * a1**4
        return m2, m3, m4

    @property
    def mean(self) -> float:
        return float(self.sums[0] / self.count)

    @property
    def exact_mean(self) -> Fraction:
        return self.sums[0] / self.count

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            raise ValueError("variance needs at least two samples")
        return float(self._central()[0] * self.count / (self.count - 1))

    @property
    def skewness(self) -> float:
        """g1 = m3 / m2^(3/2) with population central moments."""
        m2, m3, _ = self._central()
        if m2 == 0:
            raise DegenerateSampleError("zero variance")
        return float(m3) / float(m2) ** 1.5

    @property
    def excess_kurtosis(self) -> float:
        """g2 = m4 / m2^2 - 3 with population central moments."""
        m2, _, m4 = self._central()
        if m2 == 0:
            raise DegenerateSampleError("zero variance")
        return float(m4 / m2**2) - 3.0


# -- statistics ------------------------------------------------------------------

@dataclass(frozen=True)
class NormalityResult:
    ks_statistic: float
    skewness: float
    kurtosis: float  # excess


def studentize(samples: Sequence, moments: Moments | None = None) -> np.ndarray:
    moments = moments or Moments().extend(samples)
    var = moments.variance
    if var == 0:
        raise DegenerateSampleError("zero variance")
    mean = moments.exact_mean
    sd = math.sqrt(var)
    return np.array([float(Fraction(x) - mean) / sd for x in _as_exact(samples)])


def _as_exact(samples):
    return [int(x) if isinstance(x, (np.integer, int)) else float(x) for x in samples]


def ks_distance_normal(z: np.ndarray) -> float:
    """sup |F_n - Phi| for the empirical CDF of ``z``.  Phi is evaluated with
    scipy.special.ndtr (double-precision erfc based)."""
    x = np.sort(np.asarray(z, dtype=np.float64))
    N = x.shape[0]
    cdf = ndtr(x)
    i = np.arange(1, N + 1)
    return float(max((i / N - cdf).max(), (cdf - (i - 1) / N).max()))


MIN_NORMALITY_SAMPLES = 100


def normality_check(samples: Sequence) -> NormalityResult:
    if len(samples) < MIN_NORMALITY_SAMPLES:
        raise ValueError(f"normality check needs at least {MIN_NORMALITY_SAMPLES} samples")
    m = Moments().extend(samples)
    z = studentize(samples, m)
    return NormalityResult(ks_distance_normal(z), m.skewness, m.excess_kurtosis)


@dataclass
class MonteCarloSummary:
    model: str
    parameter: str
    n: int
    replicas: int
    master_seed: int
    sample_mean: float
    sample_variance: float
    mean_over_n: float
    variance_over_n: float
    variance_over_n_ci: tuple[float, float]
    standard_error_of_mean: float
    ks_statistic: float | None
    sample_skewness: float | None
    excess_kurtosis: float | None
    studentized_samples: list[float] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["variance_over_n_ci"] = list(self.variance_over_n_ci)
        return d


def summarize(
    values: Sequence[int], model: ModelTag, parameter: Parameter, n: int, master_seed: int
) -> MonteCarloSummary:
    m = Moments().extend(values)
    N = m.count
    var = m.variance
    ks = skew = kurt = None
    z: list[float] = []
    if var > 0:
        z = studentize(values, m).tolist()
        skew, kurt = m.skewness, m.excess_kurtosis
        if N >= MIN_NORMALITY_SAMPLES:
            ks = ks_distance_normal(np.array(z))
    # standard error of s^2 under the observed kurtosis
    rel = math.sqrt(max(2.0 / (N - 1) + (kurt or 0.0) / N, 0.0))
    vn = var / n
    return MonteCarloSummary(
        model=model.value,
        parameter=str(parameter),
        n=n,
        replicas=N,
        master_seed=master_seed,
        sample_mean=m.mean,
        sample_variance=var,
        mean_over_n=m.mean / n,
        variance_over_n=vn,
        variance_over_n_ci=(vn * (1 - Z95 * rel), vn * (1 + Z95 * rel)),
        standard_error_of_mean=math.sqrt(var / N),
        ks_statistic=ks,
        sample_skewness=skew,
        excess_kurtosis=kurt,
        studentized_samples=z,
    )


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    intercept: float
    residual_max: float
    slope_stderr: float | None = None

    @property
    def ci(self) -> tuple[float, float] | None:
        if self.slope_stderr is None:
            return None
        return (self.slope - Z95 * self.slope_stderr, self.slope + Z95 * self.slope_stderr)


def slope_fit(
    sizes: Sequence[float],
    means: Sequence[float],
    standard_errors: Sequence[float] | None = None,
) -> SlopeEstimate:
    """Ordinary least squares of mean against n.  With per-size standard
    errors the slope's standard error is propagated linearly."""
    x = np.asarray(sizes, dtype=np.float64)
    y = np.asarray(means, dtype=np.float64)
    if len(set(x.tolist())) < 3:
        raise ValueError("slope fit needs at least three distinct sizes")
    if x.max() < 10 * x.min():
        raise ValueError("slope fit needs sizes spanning at least one decade")
    dx = x - x.mean()
    w = dx / float(dx @ dx)
    slope = float(w @ y)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    se = None
    if standard_errors is not None:
        se = math.sqrt(float((w**2) @ np.asarray(standard_errors, dtype=np.float64) ** 2))
    return SlopeEstimate(slope, intercept, float(np.abs(resid).max()), se)


def slope_from_summaries(summaries: Sequence[MonteCarloSummary]) -> SlopeEstimate:
    return slope_fit(
        [s.n for s in summaries],
        [s.sample_mean for s in summaries],
        [s.standard_error_of_mean for s in summaries],
    )


def variance_linearity(
    at_n: MonteCarloSummary, at_2n: MonteCarloSummary, min_replicas: int = 2000
) -> float:
    """Var(X_2n) / Var(X_n); linear variance growth predicts 2."""
    if at_2n.n != 2 * at_n.n:
        raise ValueError(f"sizes must be n and 2n, got {at_n.n} and {at_2n.n}")
    if min(at_n.replicas, at_2n.replicas) < min_replicas:
        raise ValueError(f"variance ratio needs at least {min_replicas} replicas per size")
    if at_n.sample_variance == 0 or at_2n.sample_variance == 0:
        raise DegenerateSampleError("zero variance")
    return at_2n.sample_variance / at_n.sample_variance


# -- experiments -----------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    model: ModelTag
    parameter: Parameter
    sizes: tuple[int, ...]
    replicas: int
    master_seed: int
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", ModelTag(self.model))
        if isinstance(self.parameter, str):
            object.__setattr__(self, "parameter", Parameter.parse(self.parameter))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if self.model is ModelTag.GENERIC:
            raise ValueError("simulation needs model bst or rrt")
        if not self.sizes:
            raise ValueError("at least one size is required")
        if min(self.sizes) < 1:
            raise ValueError("sizes must be positive")
        if self.replicas < 2:
            raise ValueError("at least two replicas are required")
        if self.workers < 1:
            raise ValueError("worker count must be positive")
        rng.check_seed(self.master_seed)
        p = self.parameter
        if p.name == "EC" and min(self.sizes) < 2:
            raise ValueError("edge cover number is undefined for n = 1")
        if p.name == "Dk" and self.model is ModelTag.BST and p.k > 3:
            raise ValueError("binary search trees admit k-domination only for k <= 3")


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    values: dict[int, np.ndarray]
    summaries: list[MonteCarloSummary]

    def csv(self) -> str:
        s = self.spec
        lines = ["model,parameter,n,master_seed,replica,value"]
        for n in s.sizes:
            prefix = f"{s.model.value},{s.parameter},{n},{s.master_seed},"
            lines.extend(f"{prefix}{r},{int(v)}" for r, v in enumerate(self.values[n]))
        return "\n".join(lines) + "\n"


def replica_streams(master: int, size_index: int, count: int, offset: int = 0) -> np.ndarray:
    return np.array(
        [rng.derive_seed(master, size_index, r) for r in range(offset, offset + count)],
        dtype=np.uint64,
    )


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    values: dict[int, np.ndarray] = {}
    summaries = []
    for size_index, n in enumerate(spec.sizes):
        streams = replica_streams(spec.master_seed, size_index, spec.replicas)
        vals = replica_values(spec.model, spec.parameter, n, streams, spec.workers)
        values[n] = vals
        summaries.append(summarize(vals, spec.model, spec.parameter, n, spec.master_seed))
        log.info("%s %s n=%d: mean/n=%.6f", spec.model.value, spec.parameter, n, summaries[-1].mean_over_n)
    return ExperimentResult(spec, values, summaries)


def plan_replicas(
    model: ModelTag,
    parameter: Parameter,
    n: int,
    target_se_over_n: float,
    master_seed: int,
    pilot: int = 50,
    workers: int = 1,
) -> int:
    """Replica count reaching a target standard error of mean/n, from a pilot
    run on seeds disjoint from every final run."""
    streams = np.array(
        [rng.derive_seed(master_seed, PILOT_DOMAIN, r) for r in range(pilot)], dtype=np.uint64
    )
    vals = replica_values(ModelTag(model), parameter, n, streams, workers)
    var = Moments().extend(vals).variance
    return max(2, math.ceil(var / (n * target_se_over_n) ** 2))


# -- pre-registered gates ----------------------------------------------------------

MEAN_TOL = 2e-3
SLOPE_TOL = 5e-3
KS_MAX = 0.05
SKEW_MAX = 0.2
KURT_MAX = 0.4
RATIO_RANGE = (1.7, 2.3)
NORMALITY_REPLICAS = 2000
MEAN_GATE_MIN_N = 1000


@dataclass(frozen=True)
class GateResult:
    name: str
    passed: bool
    detail: str


def evaluate_gates(result: ExperimentResult) -> list[GateResult]:
    """Gates applicable to this experiment's sizes and replica counts.

    * mean: |mean/n - c| <= 2e-3 where a closed-form c exists, n >= 1000
    * slope: |slope - c| <= 5e-3 over >= 3 sizes spanning a decade
    * normality: KS <= 0.05, |skew| <= 0.2, |excess kurtosis| <= 0.4 at
      >= 2000 replicas
    * variance ratio in [1.7, 2.3] for every (n, 2n) pair at >= 2000 replicas
    * positivity: the variance/n confidence interval excludes 0 (n >= 100)
    """
    spec = result.spec
    const = spec.parameter.growth_constant(spec.model)
    by_n = {s.n: s for s in result.summaries}
    gates: list[GateResult] = []
    for s in result.summaries:
        if const is not None and s.n >= MEAN_GATE_MIN_N:
            dev = abs(s.mean_over_n - const)
            gates.append(GateResult(f"mean n={s.n}", dev <= MEAN_TOL, f"|{s.mean_over_n:.6f} - {const}| = {dev:.2e}"))
        if s.replicas >= NORMALITY_REPLICAS and s.ks_statistic is not None:
            gates.append(GateResult(f"ks n={s.n}", s.ks_statistic <= KS_MAX, f"{s.ks_statistic:.4f}"))
            gates.append(GateResult(f"skewness n={s.n}", abs(s.sample_skewness) <= SKEW_MAX, f"{s.sample_skewness:.4f}"))
            gates.append(GateResult(f"kurtosis n={s.n}", abs(s.excess_kurtosis) <= KURT_MAX, f"{s.excess_kurtosis:.4f}"))
        if s.n >= 100 and s.replicas >= MIN_NORMALITY_SAMPLES:
            lo = s.variance_over_n_ci[0]
            gates.append(GateResult(f"variance>0 n={s.n}", lo > 0, f"CI low {lo:.4g}"))
        if 2 * s.n in by_n and min(s.replicas, by_n[2 * s.n].replicas) >= NORMALITY_REPLICAS:
            ratio = variance_linearity(s, by_n[2 * s.n])
            gates.append(GateResult(f"variance ratio {s.n}->{2 * s.n}", RATIO_RANGE[0] <= ratio <= RATIO_RANGE[1], f"{ratio:.4f}"))
    sizes = sorted(by_n)
    if const is not None and len(sizes) >= 3 and sizes[-1] >= 10 * sizes[0]:
        fit = slope_from_summaries([by_n[n] for n in sizes])
        dev = abs(fit.slope - const)
        gates.append(GateResult("slope", dev <= SLOPE_TOL, f"|{fit.slope:.6f} - {const}| = {dev:.2e}"))
    return gates
