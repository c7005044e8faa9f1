"""Truncated power-series engine and coefficient-level solution formulas.

Concentrations c_t(m) are Taylor coefficients of the solved generating
function, extracted by reverting the characteristic map as a formal series.
The arms variants have closed forms in terms of convolution powers of the
size-biased arm law, evaluated directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .characteristics import (
    DEFAULT_CONFIG,
    ArmsFlow,
    _h_of_u,
    bisect_increasing,
    ell_smolu,
    gel_time,
)
from .errors import DomainError, ModelError
from .measures import ArmMeasure, MassMeasure, NuMeasure, conv_power, nu_from_mu


class PowerSeries:
    """Formal power series truncated at order N (coeffs[k] multiplies x^k)."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise DomainError("coefficients must form a non-empty 1-D array")

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __repr__(self):
        return f"PowerSeries({self.coeffs.tolist()!r})"

    @classmethod
    def zero(cls, n: int) -> "PowerSeries":
        return cls(np.zeros(n + 1))

    @classmethod
    def identity(cls, n: int) -> "PowerSeries":
        c = np.zeros(n + 1)
        if n >= 1:
            c[1] = 1.0
        return cls(c)

    def __call__(self, x: float) -> float:
        # Horner evaluation of the truncated polynomial
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc


def ps_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    n = min(a.order, b.order)
    return PowerSeries(np.convolve(a.coeffs, b.coeffs)[: n + 1])


def ps_exp(a: PowerSeries) -> PowerSeries:
    """exp of a series via the b' = a' b recurrence; result scaled by e^{a0}."""
    n = a.order
    if not math.isfinite(a.coeffs[0]):
        raise DomainError("constant term must be finite for ps_exp")
    out = np.zeros(n + 1)
    out[0] = math.exp(a.coeffs[0])
    for k in range(1, n + 1):
        # k * out[k] = sum_{j=1..k} j * a[j] * out[k-j]
        acc = 0.0
        for j in range(1, k + 1):
            acc += j * a.coeffs[j] * out[k - j]
        out[k] = acc / k
    return PowerSeries(out)


def ps_compose(outer: PowerSeries, inner: PowerSeries) -> PowerSeries:
    """outer(inner(x)); inner must have zero constant term."""
    if inner.coeffs[0] != 0.0:
        raise DomainError("inner series must vanish at 0 for composition")
    n = min(outer.order, inner.order)
    acc = PowerSeries.zero(n)
    for c in outer.coeffs[n::-1]:
        acc = ps_mul(acc, PowerSeries(inner.coeffs[: n + 1]))
        acc.coeffs[0] += c
    return acc


def _ps_reciprocal(coeffs: np.ndarray) -> np.ndarray:
    if coeffs[0] == 0.0:
        raise DomainError("cannot invert a series with zero constant term")
    n = coeffs.size - 1
    out = np.zeros(n + 1)
    out[0] = 1.0 / coeffs[0]
    for k in range(1, n + 1):
        out[k] = -np.dot(coeffs[1 : k + 1], out[k - 1 :: -1]) / coeffs[0]
    return out


def ps_revert(phi: PowerSeries) -> PowerSeries:
    """Compositional inverse h with phi(h(x)) = x + O(x^{N+1}).

    Coefficient-by-coefficient Lagrange inversion:
    [x^n] h = (1/n) [x^{n-1}] (x / phi(x))^n.
    """
    n = phi.order
    if phi.coeffs[0] != 0.0:
        raise DomainError("series to revert must have zero constant term")
    if n < 1 or phi.coeffs[1] == 0.0:
        raise DomainError("series to revert must have nonzero linear term")
    recip = _ps_reciprocal(phi.coeffs[1:])  # series of x/phi(x), order n-1
    out = np.zeros(n + 1)
    power = np.zeros(n)
    power[0] = 1.0  # (x/phi)^0
    for k in range(1, n + 1):
        power = np.convolve(power, recip)[:n]
        out[k] = power[k - 1] / k
    return PowerSeries(out)


# ---------------------------------------------------------------------------
# Classic-model concentrations by series reversion

def _g0_series(measure: MassMeasure, n: int) -> PowerSeries:
    if not measure.is_lattice:
        raise DomainError(
            "series extraction needs an integer-lattice initial measure"
        )
    w = measure.lattice_weights(n)
    coeffs = w * np.arange(n + 1)  # [x^m] g0 = m * mu0({m})
    return PowerSeries(coeffs)


def concentrations(
    measure: MassMeasure,
    t: float,
    n: int,
    *,
    gel_interacting: bool = False,
    config=DEFAULT_CONFIG,
) -> np.ndarray:
    """c_t(m) for m = 0..n (index 0 unused) on an integer-lattice measure.

    gel_interacting selects the variant whose post-gel characteristic map
    keeps the full initial mass in the exponent; pre-gel both coincide.
    """
    if t < 0.0:
        raise DomainError("time must be >= 0")
    g0s = _g0_series(measure, n)
    mom = measure.moments()
    if gel_interacting or t <= gel_time(measure):
        if not math.isfinite(mom.M0):
            raise ModelError("gel-interacting series needs finite initial mass")
        amp = math.exp(t * mom.M0)
    else:
        ell = ell_smolu(t, measure, config)
        amp = math.exp(t * measure.g0(ell)) / ell
    expo = ps_exp(PowerSeries(-t * g0s.coeffs))
    phi = np.zeros(n + 1)
    phi[1:] = amp * expo.coeffs[:-1]  # phi(x) = amp * x * e^{-t g0(x)}
    h = ps_revert(PowerSeries(phi))
    gt = ps_compose(g0s, h)
    c = np.zeros(n + 1)
    c[1:] = gt.coeffs[1:] / np.arange(1, n + 1)
    # coefficients are nonnegative in exact arithmetic; forgive roundoff dust
    tiny = (c < 0.0) & (c > -1e-12)
    c[tiny] = 0.0
    return c


# ---------------------------------------------------------------------------
# Arms-model concentrations (closed forms)

def _binom_factor(a: int, m: int) -> float:
    """(a+m-2)! / (a! m!), exact integers for small arguments."""
    if a + m <= 20:
        return math.factorial(a + m - 2) / (math.factorial(a) * math.factorial(m))
    return math.exp(
        math.lgamma(a + m - 1) - math.lgamma(a + 1) - math.lgamma(m + 1)
    )


@dataclass
class ArmsConcentrations:
    """c_t(a, m) matrix (rows a, columns m) plus interpretation flags."""

    values: np.ndarray
    #: the m = 1 column holds the initial data c0(a, 1) = mu(a) untouched;
    #: the solved formulas only apply from m = 2 on.
    m1_is_initial: bool = True
    degenerate: bool = False


def arms_concentrations(
    measure: ArmMeasure,
    t: float,
    a_max: int,
    m_max: int,
    *,
    gel_interacting: bool = False,
    config=DEFAULT_CONFIG,
) -> ArmsConcentrations:
    """Closed-form c_t(a, m) on monodisperse arm data, m >= 2."""
    if not measure.is_monodisperse:
        raise DomainError("closed-form concentrations need monodisperse arm data")
    if t < 0.0:
        raise DomainError("time must be >= 0")
    mu = measure.arm_law()
    nu = nu_from_mu(mu)
    out = np.zeros((a_max + 1, m_max + 1))
    for a, w in mu.items():
        if a <= a_max and m_max >= 1:
            out[a, 1] = w
    if nu.degenerate:
        return ArmsConcentrations(out, degenerate=True)
    if gel_interacting:
        ratio_m = t / (1.0 + t * measure.A0)  # multiplies per unit mass
        ratio_a = 1.0 / (1.0 + t * measure.A0)
    else:
        flow = ArmsFlow(measure, config)
        st = flow.state(t)
        ratio_m = st.beta
        ratio_a = 1.0 / st.alpha
    a_idx = np.arange(a_max + 1)
    for m in range(2, m_max + 1):
        pw = conv_power(nu, m, a_max + m - 2)
        logbin = (
            gammaln(a_idx + m - 1) - gammaln(a_idx + 1) - math.lgamma(m + 1)
        )
        out[:, m] = (
            np.exp(logbin) * ratio_m ** (m - 1) * ratio_a**a_idx * pw[a_idx + m - 2]
        )
        # exact integer binomial path for small indices
        for a in range(0, min(a_max, 20 - m) + 1):
            out[a, m] = (
                _binom_factor(a, m)
                * ratio_m ** (m - 1)
                * ratio_a**a
                * pw[a + m - 2]
            )
    return ArmsConcentrations(out)


def arms_mass(
    measure: ArmMeasure,
    t: float,
    *,
    gel_interacting: bool = False,
    m_max: int = 150,
    config=DEFAULT_CONFIG,
) -> float:
    """Total mass sum m c_t(a, m), truncated at m_max (monodisperse data only).

    The m = 1 layer is summed exactly as mu(a) r^a with r the per-arm decay
    factor; higher masses come from the closed-form concentrations.
    """
    conc = arms_concentrations(
        measure,
        t,
        a_max=_arms_amax(measure, m_max),
        m_max=m_max,
        gel_interacting=gel_interacting,
        config=config,
    )
    mu = measure.arm_law()
    if gel_interacting:
        r = 1.0 / (1.0 + t * measure.A0)
    else:
        r = 1.0 / ArmsFlow(measure, config).state(t).alpha
    total = sum(w * r**a for a, w in mu.items())
    masses = np.arange(conc.values.shape[1])
    total += float((conc.values[:, 2:] * masses[2:]).sum())
    return total


def _arms_amax(measure: ArmMeasure, m_max: int) -> int:
    # a mass-m cluster built from particles of <= amax arms each has at most
    # m(amax - 2) + 2 free arms
    amax_particle = max(a for a, _ in measure.weights)
    return max(m_max * max(amax_particle - 2, 0) + 2, amax_particle)


# ---------------------------------------------------------------------------
# Limiting quantities (t -> infinity)

@dataclass
class LimitingConcentrations:
    """Long-time limits: c_inf[m] for m = 2..m_max, plus the scalar constants.

    p_or_c is the smallest fixed point of k0 (gel-interacting variant) or the
    tangency point k0'(c) = k0(c)/c (gel-inert variant); beta_inf is 1 for the
    gel-interacting variant by convention.
    """

    c_inf: np.ndarray
    beta_inf: float
    p_or_c: float
    M_inf: float
    degenerate: bool = False


def _p_nu(measure: ArmMeasure, config=DEFAULT_CONFIG) -> float:
    """Smallest root of k0(x, 1) = x in [0, 1]."""
    A0, K = measure.A0, measure.K
    if A0 == 1.0 and K <= A0:
        return 1.0

    def f(x):
        return measure.k0(x, 1.0) - x

    # f is convex with f(0) = k0(0) > 0; locate its minimum first
    if measure.k0(1.0, 1.0, partial="x") <= 1.0:
        xmin = 1.0
    else:
        xmin = bisect_increasing(
            lambda x: measure.k0(x, 1.0, partial="x"),
            0.0,
            1.0,
            1.0,
            tol=config.root_tol,
            max_iter=config.max_iter,
        )
    fmin = f(xmin)
    if fmin > 10.0 * config.root_tol:
        if abs(f(1.0)) <= 10.0 * config.root_tol:
            return 1.0
        raise ModelError("k0 has no fixed point in [0, 1]")
    if fmin >= 0.0:
        return xmin
    # -f is increasing on [0, xmin]
    return bisect_increasing(
        lambda x: -f(x), 0.0, xmin, 0.0, tol=config.root_tol,
        max_iter=config.max_iter,
    )


def limiting_concentrations(
    measure: ArmMeasure,
    m_max: int,
    *,
    gel_interacting: bool = False,
    config=DEFAULT_CONFIG,
) -> LimitingConcentrations:
    """Limits of c_t(0, m) as t -> infinity, for monodisperse arm data."""
    if not measure.is_monodisperse:
        raise DomainError("limiting concentrations need monodisperse arm data")
    mu = measure.arm_law()
    nu = nu_from_mu(mu)
    c_inf = np.zeros(m_max + 1)
    if nu.degenerate:
        return LimitingConcentrations(
            c_inf=c_inf, beta_inf=1.0, p_or_c=1.0,
            M_inf=measure.M0, degenerate=True,
        )
    if gel_interacting:
        p = _p_nu(measure, config)
        beta_inf = 1.0
        point = p
    else:
        if math.isinf(gel_time(measure)):
            point = 1.0
        else:
            point = _h_of_u(measure, 0.0, config)  # k0'(c) = k0(c)/c
        beta_inf = point / measure.k0(point, 1.0)
        p = point
    M_inf = sum(w * point**a for a, w in mu.items())
    for m in range(2, m_max + 1):
        pw = conv_power(nu, m, m - 2)
        c_inf[m] = beta_inf ** (m - 1) * pw[m - 2] / (m * (m - 1))
    return LimitingConcentrations(
        c_inf=c_inf, beta_inf=beta_inf, p_or_c=p, M_inf=M_inf
    )
