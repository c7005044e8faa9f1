"""Per-model frontends: mass, arm counts, generating functions, moments.

Four models share one scheme: a characteristic map phi_t whose right inverse
h_t transports the initial generating function, so every solved quantity
reduces to root-finding on a monotone branch.
"""
from __future__ import annotations

import math

from .characteristics import (
    DEFAULT_CONFIG,
    ArmsFlow,
    SolutionState,
    bisect_increasing,
    ell_smolu,
    gel_time,
    l_flory,
)
from .errors import DomainError, ModelError
from .measures import ArmMeasure, MassMeasure

INF = math.inf


class Model:
    """Common surface of the four solved models."""

    name = "model"
    is_arms = False

    def __init__(self, measure, config=DEFAULT_CONFIG):
        self.measure = measure
        self.config = config
        self.t_gel = gel_time(measure)

    def __repr__(self):
        return f"{type(self).__name__}({self.measure!r})"

    def mass(self, t: float) -> float:
        raise NotImplementedError

    def arms_count(self, t: float) -> float:
        raise DomainError(f"{self.name} has no arm structure")

    def phi(self, t: float, x: float, y: float = 1.0) -> float:
        raise NotImplementedError

    def h_inverse(self, t: float, x: float, y: float = 1.0) -> float:
        raise NotImplementedError

    def gen_fun(self, t: float, x: float, y: float = 1.0) -> float:
        raise NotImplementedError

    def second_moment(self, t: float) -> float:
        raise NotImplementedError

    def state(self, t: float) -> SolutionState:
        raise NotImplementedError


class _Classic(Model):
    """Shared plumbing for the models driven by a univariate g0."""

    def __init__(self, measure: MassMeasure, config=DEFAULT_CONFIG):
        if not isinstance(measure, MassMeasure):
            raise ModelError(f"{type(self).__name__} needs a MassMeasure")
        super().__init__(measure, config)

    def ell(self, t: float) -> float:
        raise NotImplementedError

    def mass(self, t: float) -> float:
        return self.measure.g0(self.ell(t))

    def _phi_deriv(self, t: float, x: float) -> float:
        raise NotImplementedError

    def h_inverse(self, t: float, x: float, y: float = 1.0) -> float:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        if x == 0.0:
            return 0.0
        ell = self.ell(t)
        if x == 1.0:
            return ell
        root = bisect_increasing(
            lambda z: self.phi(t, z),
            0.0,
            ell,
            x,
            tol=self.config.root_tol,
            max_iter=self.config.max_iter,
        )
        # Newton polish: bisection controls the error in z, but steep phi
        # amplifies it in phi(z); skip where the map flattens out
        for _ in range(3):
            slope = self._phi_deriv(t, root)
            if not math.isfinite(slope) or abs(slope) < 1e-8:
                break
            nxt = root - (self.phi(t, root) - x) / slope
            if not 0.0 <= nxt <= ell:
                break
            root = nxt
        return root

    def gen_fun(self, t: float, x: float, y: float = 1.0) -> float:
        return self.measure.g0(self.h_inverse(t, x))

    def state(self, t: float) -> SolutionState:
        ell = self.ell(t)
        return SolutionState(t=t, ell=ell, M=self.measure.g0(ell))


class Smoluchowski(_Classic):
    """Gel-inert coagulation with multiplicative kernel."""

    name = "smoluchowski"

    def ell(self, t: float) -> float:
        return ell_smolu(t, self.measure, self.config)

    def phi(self, t: float, x: float, y: float = 1.0) -> float:
        # normalized so phi(ell) = 1 without integrating the mass history
        if x == 0.0:
            return 0.0
        ell = self.ell(t)
        return (x / ell) * math.exp(t * (self.measure.g0(ell) - self.measure.g0(x)))

    def _phi_deriv(self, t: float, x: float) -> float:
        ell = self.ell(t)
        return (
            math.exp(t * (self.measure.g0(ell) - self.measure.g0(x)))
            / ell
            * (1.0 - t * x * self.measure.g0(x, 1))
        )

    def second_moment(self, t: float) -> float:
        K = self.measure.moments().K
        if t >= self.t_gel:
            return INF
        return K / (1.0 - t * K)


class Flory(_Classic):
    """Gel-interacting coagulation with multiplicative kernel."""

    name = "flory"

    def __init__(self, measure: MassMeasure, config=DEFAULT_CONFIG):
        super().__init__(measure, config)
        if math.isinf(measure.moments().M0):
            raise ModelError(
                "gel-interacting model needs finite initial mass"
            )

    def ell(self, t: float) -> float:
        return l_flory(t, self.measure, self.config)

    def phi(self, t: float, x: float, y: float = 1.0) -> float:
        if x == 0.0:
            return 0.0
        M0 = self.measure.moments().M0
        return x * math.exp(t * (M0 - self.measure.g0(x)))

    def _phi_deriv(self, t: float, x: float) -> float:
        M0 = self.measure.moments().M0
        return math.exp(t * (M0 - self.measure.g0(x))) * (
            1.0 - t * x * self.measure.g0(x, 1)
        )

    def second_moment(self, t: float) -> float:
        K = self.measure.moments().K
        if t < self.t_gel:
            return K / (1.0 - t * K)
        if t == self.t_gel:
            return INF
        l = self.ell(t)
        return self.measure.g0(l, 1) / self._phi_deriv(t, l)


class _Arms(Model):
    """Shared plumbing for the bivariate (arms x mass) models."""

    is_arms = True

    def __init__(self, measure: ArmMeasure, config=DEFAULT_CONFIG):
        if not isinstance(measure, ArmMeasure):
            raise ModelError(f"{type(self).__name__} needs an ArmMeasure")
        super().__init__(measure, config)

    def _phi_x(self, t: float, x: float, y: float) -> float:
        raise NotImplementedError

    def _x_top(self, t: float, y: float) -> float:
        """Upper end of the branch where phi(., y) increases."""
        if self._phi_x(t, 1.0, y) >= 0.0:
            return 1.0
        return bisect_increasing(
            lambda x: -self._phi_x(t, x, y),
            0.0,
            1.0,
            0.0,
            tol=self.config.root_tol,
            max_iter=self.config.max_iter,
        )

    def h_inverse(self, t: float, x: float, y: float = 1.0) -> float:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        top = self._x_top(t, y)
        if x >= self.phi(t, top, y):
            return top
        return bisect_increasing(
            lambda z: self.phi(t, z, y),
            0.0,
            top,
            x,
            tol=self.config.root_tol,
            max_iter=self.config.max_iter,
        )

    def mass(self, t: float) -> float:
        from .series import arms_mass

        if not self.measure.is_monodisperse:
            return math.nan  # no closed form for general arm data
        return arms_mass(
            self.measure,
            t,
            gel_interacting=self.name == "flory-arms",
            config=self.config,
        )


class SmoluchowskiArms(_Arms):
    """Limited-aggregation model with inert gel."""

    name = "smoluchowski-arms"

    def __init__(self, measure: ArmMeasure, config=DEFAULT_CONFIG):
        super().__init__(measure, config)
        self.flow = ArmsFlow(measure, config)

    def state(self, t: float) -> SolutionState:
        st = self.flow.state(t)
        st.A = self.measure.k0(st.ell, 1.0) / st.alpha
        if self.measure.is_monodisperse:
            st.M = self.mass(t)
        return st

    def arms_count(self, t: float) -> float:
        st = self.flow.state(t)
        return self.measure.k0(st.ell, 1.0) / st.alpha

    def phi(self, t: float, x: float, y: float = 1.0) -> float:
        st = self.flow.state(t)
        return st.alpha * (x - st.beta * self.measure.k0(x, y))

    def _phi_x(self, t: float, x: float, y: float) -> float:
        st = self.flow.state(t)
        return st.alpha * (1.0 - st.beta * self.measure.k0(x, y, partial="x"))

    def gen_fun(self, t: float, x: float, y: float = 1.0) -> float:
        st = self.flow.state(t)
        return self.measure.k0(self.h_inverse(t, x, y), y) / st.alpha

    def second_moment(self, t: float) -> float:
        """<c_t, a^2> = d/dx k_t at (1,1) plus the arm count."""
        st = self.flow.state(t)
        at = self.arms_count(t)
        if t >= self.t_gel:
            return INF
        K = self.measure.K
        return K / (st.alpha**2 * (1.0 - st.beta * K)) + at


class FloryArms(_Arms):
    """Limited-aggregation model with gel still consuming arms."""

    name = "flory-arms"

    def ell(self, t: float) -> float:
        """Smallest root of phi_t(., 1) = 1; equals 1 up to the gel time."""
        if t < 0.0:
            raise DomainError("time must be >= 0")
        if t <= self.t_gel:
            return 1.0
        top = self._x_top(t, 1.0)
        return bisect_increasing(
            lambda x: self.phi(t, x, 1.0),
            0.0,
            top,
            1.0,
            tol=self.config.root_tol,
            max_iter=self.config.max_iter,
        )

    def state(self, t: float) -> SolutionState:
        A0 = self.measure.A0
        st = SolutionState(
            t=t,
            ell=self.ell(t),
            alpha=1.0 + A0 * t,
            beta=t / (1.0 + A0 * t),
        )
        st.A = self.measure.k0(st.ell, 1.0) / (1.0 + A0 * t)
        if self.measure.is_monodisperse:
            st.M = self.mass(t)
        return st

    def arms_count(self, t: float) -> float:
        return self.measure.k0(self.ell(t), 1.0) / (1.0 + self.measure.A0 * t)

    def phi(self, t: float, x: float, y: float = 1.0) -> float:
        return (1.0 + t * self.measure.A0) * x - t * self.measure.k0(x, y)

    def _phi_x(self, t: float, x: float, y: float) -> float:
        return (1.0 + t * self.measure.A0) - t * self.measure.k0(x, y, partial="x")

    def gen_fun(self, t: float, x: float, y: float = 1.0) -> float:
        return self.measure.k0(self.h_inverse(t, x, y), y) / (
            1.0 + t * self.measure.A0
        )

    def second_moment(self, t: float) -> float:
        at = self.arms_count(t)
        if t == self.t_gel:
            return INF
        l = self.ell(t) if t > self.t_gel else 1.0
        dphi = self._phi_x(t, l, 1.0)
        if dphi <= 0.0:
            return INF
        dk = self.measure.k0(l, 1.0, partial="x") / (
            (1.0 + t * self.measure.A0) * dphi
        )
        return dk + at


MODEL_NAMES = {
    "smoluchowski": Smoluchowski,
    "flory": Flory,
    "smoluchowski-arms": SmoluchowskiArms,
    "flory-arms": FloryArms,
}


def make_model(name: str, measure, config=DEFAULT_CONFIG) -> Model:
    try:
        cls = MODEL_NAMES[name]
    except KeyError:
        raise ModelError(f"unknown model {name!r}") from None
    return cls(measure, config)


# ---------------------------------------------------------------------------
# Gel-point derivative of the mass

def mass_right_derivative_at_gel(measure) -> float:
    """Right derivative of the mass at the gel time, by sequential limits.

    Evaluates r(x) = -g0'(x)^3 / (g0'(x) + x g0''(x)) at x_k = 1 - 2^{-k},
    k = 10..40.  Returns the limit if the tail stabilizes, a signed infinity
    if |r| keeps growing, and nan when neither happens.
    """
    vals = []
    for k in range(10, 41):
        x = 1.0 - 2.0**-k
        gp = measure.g0(x, 1)
        gpp = measure.g0(x, 2)
        denom = gp + x * gpp
        vals.append(-(gp**3) / denom if denom != 0.0 else -INF)
    for i in range(2, len(vals)):
        a, b, c = vals[i - 2], vals[i - 1], vals[i]
        tol = max(1e-5 * abs(c), 1e-7)
        if abs(a - b) <= tol and abs(b - c) <= tol:
            return c
    mags = [abs(v) for v in vals]
    if mags[-1] > 1e12 or all(m2 > m1 for m1, m2 in zip(mags, mags[1:])):
        return -INF if vals[-1] < 0.0 else INF
    return math.nan


# ---------------------------------------------------------------------------
# Long-time asymptotics

def asymptotics_report(model: Model) -> dict:
    """Empirical check of the decay law of the mass for large times."""
    if isinstance(model, Smoluchowski):
        m0 = model.measure.moments().m0
        grid = [10.0, 100.0, 1000.0, 10000.0]
        vals = [1.0 / (t * model.mass(t)) for t in grid]
        return {"m0": m0, "constant": vals[-1], "rate": "1/(t*M_t) -> m0"}
    if isinstance(model, Flory):
        m0 = model.measure.moments().m0
        if m0 > 0.0:
            grid = [20.0, 25.0, 30.0]
            vals = [model.mass(t) * math.exp(m0 * t) for t in grid]
            return {
                "m0": m0,
                "constant": vals[-1],
                "rate": "M_t * e^{m0 t} -> m0 * mu0({m0})",
            }
        # only a one-sided bound is available; report the empirical power
        t1, t2 = 50.0, 500.0
        slope = (math.log(model.mass(t2)) - math.log(model.mass(t1))) / (
            math.log(t2) - math.log(t1)
        )
        return {
            "m0": 0.0,
            "constant": math.nan,
            "rate": f"power-law decay, empirical exponent {slope:.3f} "
            "(super-exponential lower bound only)",
        }
    raise DomainError("asymptotics report covers the classic models only")


# ---------------------------------------------------------------------------
# Small-time mass-square integrability (infinite initial mass)

def mass_square_integral(model: Model, lo: float, hi: float) -> float:
    """int_lo^hi M_s^2 ds, substituting s = u^3 to tame the s -> 0 blow-up."""
    from scipy.integrate import quad

    if not 0.0 < lo < hi:
        raise DomainError("need 0 < lo < hi")
    val, _ = quad(
        lambda u: 3.0 * u**2 * model.mass(u**3) ** 2,
        lo ** (1.0 / 3.0),
        hi ** (1.0 / 3.0),
        limit=200,
    )
    return val
