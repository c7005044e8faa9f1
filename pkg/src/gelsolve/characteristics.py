"""Root-finding and ODE machinery behind the method of characteristics.

Every bracketed function here is monotone on its bracket, so plain bisection
is guaranteed to converge; speed is traded for that robustness.
"""
from __future__ import annotations

import bisect as _bisect
import math
from dataclasses import dataclass

from .errors import DomainError, ModelError, SolverError
from .measures import ArmMeasure, MassMeasure

INF = math.inf


@dataclass(frozen=True)
class SolverConfig:
    root_tol: float = 1e-12
    max_iter: int = 200
    ode_dt: float = 1e-4
    ode_adaptive: bool = False

    def __post_init__(self):
        if self.root_tol <= 0.0:
            raise DomainError("root_tol must be positive")
        if self.ode_dt <= 0.0:
            raise DomainError("ode_dt must be positive")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class SolutionState:
    """Solved per-time quantities; nan marks fields a model does not carry."""

    t: float
    ell: float
    alpha: float = math.nan
    beta: float = math.nan
    M: float = math.nan
    A: float = math.nan


def bisect_increasing(f, lo, hi, target, *, tol, max_iter=200):
    """Root of f(x) = target for f nondecreasing on (lo, hi).

    Only interior points are evaluated, so f may be infinite or undefined at
    the endpoints as long as the root is bracketed.
    """
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    raise SolverError(
        f"bisection did not reach tol={tol} in {max_iter} iterations"
    )


# ---------------------------------------------------------------------------
# Gel times

def gel_time(measure) -> float:
    """Gelation time for the classic (MassMeasure) or arms (ArmMeasure) models."""
    if isinstance(measure, MassMeasure):
        K = measure.moments().K
        return 0.0 if math.isinf(K) else 1.0 / K
    if isinstance(measure, ArmMeasure):
        A0, K = measure.A0, measure.K
        if math.isinf(K):
            return 0.0
        if K <= A0:
            return INF
        return 1.0 / (K - A0)
    raise DomainError(f"unsupported measure type {type(measure).__name__}")


# ---------------------------------------------------------------------------
# Classic critical points

def ell_smolu(t, measure: MassMeasure, config=DEFAULT_CONFIG):
    """The Smoluchowski characteristic root: 1 pre-gel, else x g0'(x) = 1/t."""
    if t < 0.0:
        raise DomainError("time must be >= 0")
    if t <= gel_time(measure):
        return 1.0
    return bisect_increasing(
        lambda x: x * measure.g0(x, 1),
        0.0,
        1.0,
        1.0 / t,
        tol=config.root_tol,
        max_iter=config.max_iter,
    )


def m_crit(t, measure: MassMeasure, config=DEFAULT_CONFIG):
    """Unique maximizer of the characteristic map, defined only past the gel time."""
    if t <= gel_time(measure):
        raise DomainError(f"m_crit requires t > T_gel = {gel_time(measure)}")
    return ell_smolu(t, measure, config)


def l_flory(t, measure: MassMeasure, config=DEFAULT_CONFIG):
    """Smallest root of x = e^{-t (M0 - g0(x))}; equals 1 pre-gel."""
    mom = measure.moments()
    if math.isinf(mom.M0):
        raise ModelError("Flory's equation requires finite initial mass")
    if t < 0.0:
        raise DomainError("time must be >= 0")
    if t <= gel_time(measure):
        return 1.0
    hi = m_crit(t, measure, config)
    # phi(x) = x e^{t(M0 - g0(x))} increases from 0 to phi(m_t) > 1 on [0, m_t]
    root = bisect_increasing(
        lambda x: x * math.exp(t * (mom.M0 - measure.g0(x))),
        0.0,
        hi,
        1.0,
        tol=config.root_tol,
        max_iter=config.max_iter,
    )
    if root < 1e-3:
        # Tiny roots need relative accuracy; refine the fixed point in log
        # space, where the iteration is a strong contraction (t l g0'(l) << 1).
        y = math.log(root) if root > 0.0 else -t * mom.M0
        for _ in range(200):
            y_next = -t * (mom.M0 - measure.g0(math.exp(y)))
            if abs(y_next - y) <= 1e-14 * abs(y_next):
                y = y_next
                break
            y = y_next
        root = math.exp(y)
    return root


# ---------------------------------------------------------------------------
# Arms model: the G/H pair

def G_map(measure: ArmMeasure, x: float) -> float:
    """G(x) = x - k0(x,1)/k0'(x,1); strictly increasing when k0'' > 0."""
    if measure.k0_xx(1.0, 1.0) == 0.0:
        raise DomainError("G is degenerate when k0'' vanishes identically (no gelation)")
    if x == 1.0:
        # monotone limit G(1^-) = (K - A0)/K
        return (measure.K - measure.A0) / measure.K
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x={x} outside [0, 1)")
    kp = measure.k0(x, 1.0, partial="x")
    if kp == 0.0:
        raise DomainError(f"k0'({x}, 1) = 0: G undefined here")
    return x - measure.k0(x, 1.0) / kp


def _G_lower_limit(measure: ArmMeasure) -> float:
    kp0 = measure.k0(0.0, 1.0, partial="x")
    if kp0 == 0.0:
        return -INF
    return -measure.k0(0.0, 1.0) / kp0


def H_map(measure: ArmMeasure, u: float, config=DEFAULT_CONFIG) -> float:
    """Right inverse of G on [G(0), G(1)); errors outside that window."""
    g1 = (measure.K - measure.A0) / measure.K
    if u >= g1:
        raise DomainError(f"u={u} >= G(1) = {g1}: outside the domain of H")
    if u < _G_lower_limit(measure):
        raise DomainError(f"u={u} < G(0): outside the domain of H")
    return _h_of_u(measure, u, config)


def _h_of_u(measure: ArmMeasure, u: float, config=DEFAULT_CONFIG) -> float:
    """Like H_map but clamps u >= G(1^-) to the limit value 1 (flow-internal)."""
    if u >= (measure.K - measure.A0) / measure.K:
        return 1.0
    return bisect_increasing(
        lambda x: G_map(measure, x),
        0.0,
        1.0,
        u,
        tol=config.root_tol,
        max_iter=config.max_iter,
    )


# ---------------------------------------------------------------------------
# Arms model: alpha/beta integration

class ArmsFlow:
    """Integrating factors alpha_t, beta_t for the limited-aggregation model.

    Pre-gel both are exact closed forms; past the gel time alpha solves
    d(alpha)/dt = k0(H(1/alpha), 1) and beta accumulates 1/alpha^2, both with
    a fixed-step classical 4th-order scheme at step config.ode_dt.  Step
    endpoints are cached so repeated queries stay cheap and monotone grids
    cost a single sweep.
    """

    def __init__(self, measure: ArmMeasure, config=DEFAULT_CONFIG):
        if math.isinf(measure.A0):
            raise ModelError("arms flow requires A0 < +inf")
        self.measure = measure
        self.config = config
        self.t_gel = gel_time(measure)
        self._ts: list[float] = []
        self._ys: list[tuple[float, float]] = []
        if math.isfinite(self.t_gel):
            A0 = measure.A0
            self._ts.append(self.t_gel)
            self._ys.append(
                (1.0 + A0 * self.t_gel, self.t_gel / (1.0 + A0 * self.t_gel))
            )

    def _lam(self, alpha: float) -> float:
        return self.measure.k0(_h_of_u(self.measure, 1.0 / alpha, self.config), 1.0)

    def _rk4(self, t, y, h):
        del t  # autonomous
        a, b = y

        def f(alpha):
            return self._lam(alpha), alpha**-2

        k1a, k1b = f(a)
        k2a, k2b = f(a + 0.5 * h * k1a)
        k3a, k3b = f(a + 0.5 * h * k2a)
        k4a, k4b = f(a + h * k3a)
        return (
            a + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
            b + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
        )

    def state(self, t: float) -> SolutionState:
        if t < 0.0:
            raise DomainError("time must be >= 0")
        A0 = self.measure.A0
        if t <= self.t_gel:
            return SolutionState(
                t=t, ell=1.0, alpha=1.0 + A0 * t, beta=t / (1.0 + A0 * t)
            )
        h = self.config.ode_dt
        if h <= 0.0:
            raise SolverError("ODE step size underflow")
        idx = _bisect.bisect_right(self._ts, t) - 1
        t0, y0 = self._ts[idx], self._ys[idx]
        # extend the cache with full steps, then take one partial step
        while t - t0 > h * (1.0 + 1e-12):
            y0 = self._rk4(t0, y0, h)
            t0 += h
            if t0 > self._ts[-1]:
                self._ts.append(t0)
                self._ys.append(y0)
        rem = t - t0
        if rem > 1e-15:
            y0 = self._rk4(t0, y0, rem)
        alpha, beta = y0
        ell = _h_of_u(self.measure, 1.0 / alpha, self.config)
        return SolutionState(t=t, ell=ell, alpha=alpha, beta=beta)

    def trajectory(self, times) -> list[SolutionState]:
        return [self.state(t) for t in sorted(times)]


def alpha_beta_trajectory(
    measure: ArmMeasure, t_end: float, config=DEFAULT_CONFIG, times=None
) -> list[SolutionState]:
    """States on a time grid up to t_end (grid defaults to 101 equal steps)."""
    if times is None:
        n = 101
        times = [t_end * i / (n - 1) for i in range(n)]
    flow = ArmsFlow(measure, config)
    return flow.trajectory([t for t in times if t <= t_end])


def alpha_via_gamma(measure: ArmMeasure, t: float, config=DEFAULT_CONFIG) -> float:
    """Cross-check for alpha_t using the quadrature form of its ODE.

    Inverts Gamma(alpha) = Gamma(alpha_gel) + (t - T_gel) with
    Gamma'(r) = 1/k0(H(1/r), 1); mathematically identical to the ODE route.
    """
    from scipy.integrate import quad

    t_gel = gel_time(measure)
    A0 = measure.A0
    if t <= t_gel:
        return 1.0 + A0 * t
    a_gel = 1.0 + A0 * t_gel

    def integrand(r):
        return 1.0 / measure.k0(_h_of_u(measure, 1.0 / r, config), 1.0)

    target = t - t_gel

    def elapsed(alpha):
        val, _ = quad(integrand, a_gel, alpha, limit=200)
        return val

    hi = a_gel + A0 * (t - t_gel)  # dalpha/dt <= A0
    return bisect_increasing(
        elapsed, a_gel, hi, target, tol=config.root_tol * max(1.0, hi),
        max_iter=config.max_iter,
    )


def beta_infinity(
    measure: ArmMeasure, t_end: float = 200.0, config=DEFAULT_CONFIG
) -> float:
    """Long-time limit of beta_t: ODE up to t_end plus the analytic tail.

    The tail int_{t_end}^inf alpha^{-2} dt equals int_0^{1/alpha(t_end)}
    du / k0(H(u), 1) after substituting u = 1/alpha, which quadrature
    evaluates to near machine precision.
    """
    from scipy.integrate import quad

    if not math.isfinite(gel_time(measure)):
        # no gelation: normalized arm data has alpha = 1 + t for ever, so
        # beta -> 1 and the limiting factor is trivial
        return 1.0
    flow = ArmsFlow(measure, config)
    st = flow.state(t_end)
    tail, _ = quad(
        lambda u: 1.0 / measure.k0(_h_of_u(measure, u, config), 1.0),
        0.0,
        1.0 / st.alpha,
        limit=200,
    )
    return st.beta + tail
