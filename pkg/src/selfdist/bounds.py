"""Explicit upper bounds on the averaged self-distance.

Covers the Rogers covering-density estimates (four variants), the covering
bound ``2 - 2(1 - r)/s`` and its self-improving fixed point, the planar
four-homothet bound, the n >= 3 covering bound and the universal function
``f(n)`` with ``Delta <= 2(1 - 2**-n f(n))``.

Bounds in high dimension sit within 2**-n of 2, which double precision
cannot resolve once n exceeds ~50. Every report therefore carries the
``deficit`` (2 minus the bound) computed directly, and ``value`` is derived
from it. High-dimensional reports also record ``log_deficit``, which stays
finite after the deficit itself underflows (n > ~1050).
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DomainError, InputError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
STATIONARITY_TOL = 1e-8
LASSAK_COUNT = 4
LASSAK_RATIO = math.sqrt(2.0) / 2.0


class ThetaVariant(enum.Enum):
    EQ1_OPTIMIZED = "eq1"
    EQ2_EXPLICIT = "eq2"
    EQ3 = "eq3"
    EQ4 = "eq4"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        for v in cls:
            if key in (v.value, v.name.lower()):
                return v
        raise InputError(f"unknown theta variant {text!r}; use eq1, eq2, eq3 or eq4")


class Ratio(enum.Enum):
    OPTIMAL = "optimal"
    SIMPLIFIED = "simplified"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise InputError(f"unknown ratio {text!r}; use optimal or simplified") from None


class Theorem(str, enum.Enum):
    TRIVIAL = "Trivial"
    DIM2_WEAK = "Dim2Weak"
    DIM2_FIXED_POINT = "Dim2FixedPoint"
    HIGH_DIM = "HighDim"
    COVERING_CERTIFICATE = "CoveringCertificate"


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound. ``params`` lists every quantity the bound used,
    plus ``strict`` (whether the theorem states ``<`` rather than ``<=``)."""

    theorem: Theorem
    n: int
    deficit: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "theorem", Theorem(self.theorem))
        if not 0.0 <= self.deficit <= 2.0:
            raise ValueError(f"deficit {self.deficit!r} outside [0, 2]")
        below_two = self.deficit > 0.0 or math.isfinite(self.params.get("log_deficit", -math.inf))
        if self.theorem is not Theorem.TRIVIAL and not below_two:
            raise ValueError(f"{self.theorem.value} bound must be below 2")

    @property
    def value(self):
        return 2.0 - self.deficit

    @property
    def strict(self):
        return bool(self.params.get("strict", False))

    def to_dict(self):
        return {
            "theorem": self.theorem.value,
            "n": self.n,
            "value": self.value,
            "deficit": self.deficit,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(Theorem(data["theorem"]), int(data["n"]), float(data["deficit"]), dict(data["params"]))


def golden_section_min(f, lo, hi, rtol=1e-12, diff=None, max_iter=1000):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns the bracket midpoint.

    ``diff(a, b)`` may supply an accurate ``f(a) - f(b)``; near a flat
    minimum the plain difference of rounded values is pure noise and limits
    the attainable accuracy to about sqrt(machine epsilon).
    """
    if not lo < hi:
        raise InputError("empty bracket")
    if diff is None:
        def diff(a, b):
            return f(a) - f(b)
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    for _ in range(max_iter):
        if b - a <= rtol * 0.5 * (abs(a) + abs(b)):
            break
        if diff(x1, x2) < 0:
            b, x2 = x2, x1
            x1 = b - INV_PHI * (b - a)
        else:
            a, x1 = x1, x2
            x2 = a + INV_PHI * (b - a)
    x = 0.5 * (a + b)
    return x, f(x)


def _require_n(n, least):
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"n must be an integer, got {n!r}")
    if n < least:
        raise DomainError(f"n must be >= {least}, got {n}")
    return int(n)


class RogersOptimum(NamedTuple):
    theta: float
    eta: float
    residual: float


def _rogers_log(n, eta):
    return n * math.log1p(eta) + math.log1p(n * -math.log(eta))


def _rogers_log_diff(n, a, b):
    # log F(a) - log F(b) without the cancellation of subtracting two logs
    first = n * math.log1p((a - b) / (1.0 + b))
    second = math.log1p(n * math.log1p((b - a) / a) / (1.0 + n * -math.log(b)))
    return first + second


@functools.lru_cache(maxsize=4096)
def rogers_eq1(n):
    """Minimize (1+eta)^n (1 + n log(1/eta)) over 0 < eta < 1/n.

    Returns the minimum, the minimizer and the residual of the stationarity
    condition ``n eta log(1/eta) = 1``.
    """
    n = _require_n(n, 3)
    nf = float(n)
    eps = 1e-12 / nf
    eta, logv = golden_section_min(
        lambda e: _rogers_log(nf, e),
        eps,
        1.0 / nf - eps,
        rtol=1e-15,
        diff=lambda a, b: _rogers_log_diff(nf, a, b),
    )
    residual = nf * eta * -math.log(eta) - 1.0
    if abs(residual) >= STATIONARITY_TOL:
        raise ArithmeticError(f"eq1 minimizer failed stationarity check at n={n}: {residual:.3g}")
    return RogersOptimum(math.exp(logv), eta, residual)


def rogers_eq1_eta_lambert(n):
    """Closed-form minimizer exp(W_{-1}(-1/n)), for cross-checking."""
    from scipy.special import lambertw

    n = _require_n(n, 3)
    return math.exp(lambertw(-1.0 / n, -1).real)


def theta_n(n, variant=ThetaVariant.EQ1_OPTIMIZED):
    """Rogers' universal upper bound on translative covering density, n >= 3."""
    n = _require_n(n, 3)
    variant = ThetaVariant.parse(variant)
    nf = float(n)
    ln = math.log(nf)
    lnln = math.log(ln)
    if variant is ThetaVariant.EQ1_OPTIMIZED:
        return rogers_eq1(n).theta
    if variant is ThetaVariant.EQ2_EXPLICIT:
        return math.exp(nf * math.log1p(1.0 / (nf * ln))) * (1.0 + nf * (ln + lnln))
    if variant is ThetaVariant.EQ3:
        return nf * ln + nf * lnln + 2.0 * nf + 1.0
    return nf * ln + nf * lnln + 5.0 * nf


def _check_ratio(r):
    if not 0.0 < r < 1.0:
        raise DomainError(f"ratio must lie in (0, 1), got {r!r}")


def covering_bound_generic(s, r):
    """2 - 2(1 - r)/s: K covered by s homothets of ratio r."""
    if s < 1:
        raise DomainError(f"homothet count must be >= 1, got {s!r}")
    _check_ratio(r)
    return 2.0 - 2.0 * (1.0 - r) / s


def fixed_point_bound(s, r):
    """Fixed point of kappa <= 2 - (2 - kappa r)/s, i.e. (2s - 2)/(s - r)."""
    if s < 2:
        raise DomainError(f"homothet count must be >= 2, got {s!r}")
    _check_ratio(r)
    return (2.0 * s - 2.0) / (s - r)


def trivial_bound(n):
    return BoundReport(Theorem.TRIVIAL, _require_n(n, 2), 0.0, {"strict": False})


def bound_dim2():
    """Planar bounds from four homothets of ratio sqrt(2)/2: (weak, fixed point)."""
    s, r = LASSAK_COUNT, LASSAK_RATIO
    weak = BoundReport(
        Theorem.DIM2_WEAK, 2, 2.0 * (1.0 - r) / s, {"s": s, "r": r, "strict": False}
    )
    kappa = fixed_point_bound(s, r)
    fixed = BoundReport(
        Theorem.DIM2_FIXED_POINT, 2, 2.0 - kappa, {"s": s, "r": r, "kappa": kappa, "strict": False}
    )
    return weak, fixed


def optimal_r(n):
    """Maximizer of (1 - r)(1 + 1/r)^-n on (0, 1)."""
    nf = float(_require_n(n, 3))
    # 0.5 (sqrt(n^2 + 6n + 1) - n - 1), rationalized
    return 2.0 * nf / (math.sqrt(nf * nf + 6.0 * nf + 1.0) + nf + 1.0)


def simplified_r(n):
    return 1.0 - 2.0 / _require_n(n, 3)


def ratio_objective(n, r):
    """(1 - r)(1 + 1/r)^-n."""
    _check_ratio(r)
    return (1.0 - r) * math.exp(-float(n) * math.log1p(1.0 / r))


def _vertex_term(n):
    # ((n - 2)/(n - 1))^n
    nf = float(n)
    return math.exp(nf * math.log1p(-1.0 / (nf - 1.0)))


def highdim_deficit_simplified(n, theta):
    """2^(1-n)/n ((n-2)/(n-1))^n / theta * 2, the second algebraic form."""
    nf = float(n)
    return 2.0 * math.exp((1.0 - nf) * math.log(2.0)) / nf * _vertex_term(n) / theta


def bound_highdim(n, variant=ThetaVariant.EQ1_OPTIMIZED, ratio=Ratio.OPTIMAL):
    """Covering bound for n >= 3 with s = (1 + 1/r)^n theta homothets."""
    n = _require_n(n, 3)
    variant = ThetaVariant.parse(variant)
    ratio = Ratio.parse(ratio)
    theta = theta_n(n, variant)
    r = optimal_r(n) if ratio is Ratio.OPTIMAL else simplified_r(n)
    log_s = float(n) * math.log1p(1.0 / r) + math.log(theta)
    # 2 (1 - r) / s
    log_deficit = math.log(2.0 * (1.0 - r)) - log_s
    deficit = 2.0 * ratio_objective(n, r) / theta
    params = {
        "r": r,
        "theta": theta,
        "variant": variant.value,
        "ratio": ratio.value,
        "s": math.exp(log_s) if log_s < 700 else math.inf,
        "log_s": log_s,
        "log_deficit": log_deficit,
        "strict": True,
    }
    return BoundReport(Theorem.HIGH_DIM, n, deficit, params)


def f_of_n(n, variant=ThetaVariant.EQ1_OPTIMIZED):
    """Universal f with Delta <= 2(1 - 2^-n f(n)).

    For n = 2 this comes from the planar fixed-point bound, giving
    (28 - 12 sqrt 2)/31; for n >= 3 it is (2/n)((n-2)/(n-1))^n / theta_n.
    """
    n = _require_n(n, 2)
    if n == 2:
        return 2.0 * (2.0 - fixed_point_bound(LASSAK_COUNT, LASSAK_RATIO))
    theta = theta_n(n, variant)
    return 2.0 / float(n) * _vertex_term(n) / theta


def best_bound(n, variant=ThetaVariant.EQ1_OPTIMIZED):
    """Tightest proven bound for dimension n."""
    n = _require_n(n, 2)
    if n == 2:
        return bound_dim2()[1]
    return bound_highdim(n, variant, Ratio.OPTIMAL)


def conjectured_deficit(n):
    """2 - 2(1 - 2^-n), the gap of the cube's vertex measure."""
    return 2.0 * 2.0 ** -_require_n(n, 2)
