"""Mean-growth constants of the independence number.

Three independent routes are computed and compared:

* the root-toll recurrences ``p_n`` (binary search tree) and ``p̂_n``
  (recursive tree), summed as series with rigorous tail bounds;
* adaptive quadrature of the two integral representations;
* the power-series coefficients of ``z / ((1-z)(1 - log(1-z)))``, which must
  reproduce ``p̂_n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .tree import ModelTag

MU_BST = 0.54287631
MU_RRT = 0.59634736  # Euler-Gompertz constant, leading digits

DEFAULT_TRUNCATION = 20000
DEFAULT_TOLERANCE = 1e-10
QUAD_LIMIT = 200  # subinterval budget for the adaptive integrator

SQRT5 = math.sqrt(5.0)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not converge within its budget."""

    def __init__(self, message: str, partial: "QuadratureResult"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    model: ModelTag
    values: np.ndarray  # p_0..p_N for BST, p̂_1..p̂_N for RRT
    N: int

    def __getitem__(self, k: int) -> float:
        """Value at index k in the model's own indexing (p_k or p̂_k)."""
        offset = 0 if self.model is ModelTag.BST else 1
        if not offset <= k <= self.N:
            raise IndexError(k)
        return float(self.values[k - offset])


@dataclass(frozen=True)
class SeriesResult:
    partial_sum: float
    N: int
    tail_bound: float


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def recurrence_bst(N: int) -> RecurrenceTable:
    """p_n = (1/n) * sum_{j<n} (1 - p_j)(1 - p_{n-1-j}), p_0 = 0."""
    if N < 0:
        raise ValueError("truncation must be non-negative")
    p = np.zeros(N + 1)
    q = np.ones(N + 1)  # q = 1 - p
    for n in range(1, N + 1):
        p[n] = float(np.dot(q[:n], q[n - 1 :: -1])) / n
        q[n] = 1.0 - p[n]
    return RecurrenceTable(ModelTag.BST, p, N)


def recurrence_rrt(N: int) -> RecurrenceTable:
    """p̂_n = (1/(n-1)) * sum_{j=1}^{n-1} (1 - p̂_j) p̂_{n-j}, p̂_1 = 1."""
    if N < 1:
        raise ValueError("truncation must be at least 1")
    # index 0 is padding so that p[k] = p̂_k
    p = np.zeros(N + 1)
    q = np.ones(N + 1)
    p[1], q[1] = 1.0, 0.0
    for n in range(2, N + 1):
        p[n] = float(np.dot(q[1:n], p[n - 1 : 0 : -1])) / (n - 1)
        q[n] = 1.0 - p[n]
    return RecurrenceTable(ModelTag.RRT, p[1:].copy(), N)


def series_mu(table: RecurrenceTable) -> SeriesResult:
    if table.model is not ModelTag.BST:
        raise ValueError("series_mu needs the binary search tree recurrence")
    k = np.arange(table.N + 1, dtype=np.float64)
    terms = 2.0 * table.values / ((k + 1.0) * (k + 2.0))
    return SeriesResult(math.fsum(terms), table.N, 2.0 / (table.N + 2))


def series_muhat(table: RecurrenceTable) -> SeriesResult:
    if table.model is not ModelTag.RRT:
        raise ValueError("series_muhat needs the recursive tree recurrence")
    k = np.arange(1, table.N + 1, dtype=np.float64)
    terms = table.values / (k * (k + 1.0))
    return SeriesResult(math.fsum(terms), table.N, 1.0 / (table.N + 1))


def mu_integrand(x):
    xs = np.power(x, SQRT5)
    return (xs - 1.0) / ((3.0 * SQRT5 - 7.0) * xs + 2.0)


def muhat_integrand(t):
    """e^{-t}/(1+t): the Euler-Gompertz integrand after x = e^{-t}."""
    return np.exp(-t) / (1.0 + t)


def _adaptive(f, a: float, b: float, tolerance: float, limit: int) -> QuadratureResult:
    # QUADPACK qags (21-point Gauss-Kronrod, Wynn epsilon extrapolation);
    # the error estimate is |K21 - G10| per subinterval, summed.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, info, *msg = integrate.quad(
            f, a, b, epsabs=tolerance, epsrel=0.0, limit=limit, full_output=1
        )
    res = QuadratureResult(float(value), float(err), int(info["neval"]))
    if msg or err > tolerance:
        raise QuadratureError(
            f"quadrature on [{a}, {b}] did not reach {tolerance:g} "
            f"(estimate {err:.3g}, {res.evaluations} evaluations)",
            res,
        )
    return res


def quadrature_mu(tolerance: float = DEFAULT_TOLERANCE, limit: int = QUAD_LIMIT) -> QuadratureResult:
    raw = _adaptive(mu_integrand, 0.0, 1.0, tolerance / (2.0 * (3.0 - SQRT5)), limit)
    scale = 2.0 * (SQRT5 - 3.0)
    return QuadratureResult(scale * raw.value, abs(scale) * raw.abs_error_estimate, raw.evaluations)


def muhat_cutoff(tail: float) -> float:
    """Smallest integer T with e^{-T}/(1+T) below ``tail``."""
    T = 0
    while math.exp(-T) / (1.0 + T) >= tail:
        T += 1
    return float(T)


def quadrature_muhat(tolerance: float = DEFAULT_TOLERANCE, limit: int = QUAD_LIMIT) -> QuadratureResult:
    """Integral of e^{-t}/(1+t) over [0, T]; the dropped tail is at most
    e^{-T}/(1+T) < 1e-12 and is added to the error estimate."""
    T = muhat_cutoff(min(1e-12, tolerance / 100.0))
    tail = math.exp(-T) / (1.0 + T)
    raw = _adaptive(muhat_integrand, 0.0, T, tolerance, limit)
    return QuadratureResult(raw.value, raw.abs_error_estimate + tail, raw.evaluations)


def gf_coefficients(N: int) -> np.ndarray:
    """Coefficients c_0..c_N of z / ((1-z)(1 - log(1-z))).

    With A(z) = (1-z)(1 - log(1-z)) = 1 + sum_{k>=2} (1/k - 1/(k-1)) z^k,
    the c_k solve sum_j a_j c_{k-j} = [k = 1] term by term.
    """
    if N < 1:
        raise ValueError("truncation must be at least 1")
    a = np.zeros(N + 1)
    a[0] = 1.0
    k = np.arange(2, N + 1, dtype=np.float64)
    a[2:] = 1.0 / k - 1.0 / (k - 1.0)
    c = np.zeros(N + 1)
    for m in range(1, N + 1):
        rhs = 1.0 if m == 1 else 0.0
        c[m] = rhs - float(np.dot(a[1 : m + 1], c[m - 1 :: -1]))
    return c


@dataclass
class ConstantsReport:
    truncation: int
    tolerance: float
    mu_series: SeriesResult | None = None
    mu_quadrature: QuadratureResult | None = None
    muhat_series: SeriesResult | None = None
    muhat_quadrature: QuadratureResult | None = None
    muhat_gf_coeffs: list[float] = field(default_factory=list)
    gf_max_deviation: float | None = None
    agreement: dict[str, bool] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and bool(self.agreement) and all(self.agreement.values())

    def to_dict(self) -> dict:
        return asdict(self) | {"ok": self.ok}


GF_COMPARE = 100
GF_TOLERANCE = 1e-10


def _agrees(series: SeriesResult, quad: QuadratureResult, slack: float = 1e-8) -> bool:
    # the partial sum undershoots by at most the tail bound
    gap = quad.value - series.partial_sum
    return -quad.abs_error_estimate - slack <= gap <= series.tail_bound + quad.abs_error_estimate + slack


def constants_report(
    truncation: int = DEFAULT_TRUNCATION, tolerance: float = DEFAULT_TOLERANCE
) -> ConstantsReport:
    """Run all three routes.  Quadrature failures are recorded in
    ``errors`` and leave the corresponding fields empty."""
    rep = ConstantsReport(truncation, tolerance)
    rep.mu_series = series_mu(recurrence_bst(truncation))
    rrt = recurrence_rrt(max(truncation, GF_COMPARE))
    rep.muhat_series = series_muhat(recurrence_rrt(truncation)) if truncation < GF_COMPARE else series_muhat(rrt)
    for name, fn in (("mu_quadrature", quadrature_mu), ("muhat_quadrature", quadrature_muhat)):
        try:
            setattr(rep, name, fn(tolerance))
        except QuadratureError as exc:
            setattr(rep, name, exc.partial)
            rep.errors.append(str(exc))
    coeffs = gf_coefficients(GF_COMPARE)
    rep.muhat_gf_coeffs = coeffs[1:].tolist()
    rep.gf_max_deviation = float(np.max(np.abs(coeffs[1:] - rrt.values[:GF_COMPARE])))
    rep.agreement = {
        "mu": _agrees(rep.mu_series, rep.mu_quadrature),
        "muhat": _agrees(rep.muhat_series, rep.muhat_quadrature),
        "gf_vs_recurrence": rep.gf_max_deviation <= GF_TOLERANCE,
    }
    return rep
