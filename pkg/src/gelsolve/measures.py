"""Initial mass / arm distributions and their generating functions.

The mass measures expose g0(x) = <mu0, m x^m> and its first two derivatives;
the parametric families carry hand-derived closed forms so no quadrature is
needed when evaluating them.  Arm measures expose the bivariate generating
function k0(x, y) = sum_a,m a c0(a,m) x^(a-1) y^m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError

INF = math.inf


@dataclass(frozen=True)
class Moments:
    M0: float  # first moment, may be +inf
    K: float   # second moment, may be +inf
    m0: float  # infimum of the support


def _check_unit_interval(x: float, name: str = "x") -> None:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name}={x!r} outside [0, 1]")


class MassMeasure:
    """Base class for initial mass distributions."""

    #: True when the measure lives on the positive-integer lattice, which
    #: is what the truncated power-series route requires.
    is_lattice = False

    def moments(self) -> Moments:
        raise NotImplementedError

    def g0(self, x: float, order: int = 0) -> float:
        """Evaluate g0, g0' or g0'' at x in [0, 1] (may return +-inf)."""
        raise NotImplementedError

    def atom(self, m: float) -> float:
        """Weight of the atom at mass m (0 for absolutely continuous laws)."""
        return 0.0

    def lattice_weights(self, n: int) -> np.ndarray:
        """Weights on masses 1..n (index 0 unused) for lattice measures."""
        raise DomainError(f"{type(self).__name__} is not an integer-lattice measure")


class Discrete(MassMeasure):
    """Finite collection of atoms (mass, weight), masses and weights > 0."""

    def __init__(self, atoms: Sequence[tuple[float, float]]):
        atoms = tuple((float(m), float(w)) for m, w in atoms)
        if not atoms:
            raise DomainError("discrete measure must have at least one atom")
        for m, w in atoms:
            if m <= 0.0:
                raise DomainError(f"atom mass {m} must be > 0")
            if w <= 0.0:
                raise DomainError(f"atom weight {w} must be > 0")
        self.atoms = atoms

    def __repr__(self):
        return f"Discrete({list(self.atoms)!r})"

    @property
    def is_lattice(self) -> bool:
        return all(m == int(m) for m, _ in self.atoms)

    def moments(self) -> Moments:
        m0 = min(m for m, _ in self.atoms)
        M0 = sum(w * m for m, w in self.atoms)
        K = sum(w * m * m for m, w in self.atoms)
        return Moments(M0=M0, K=K, m0=m0)

    def atom(self, m: float) -> float:
        return sum(w for mm, w in self.atoms if mm == m)

    def lattice_weights(self, n: int) -> np.ndarray:
        if not self.is_lattice:
            raise DomainError("measure has non-integer atom masses")
        out = np.zeros(n + 1)
        for m, w in self.atoms:
            if int(m) <= n:
                out[int(m)] += w
        return out

    def g0(self, x: float, order: int = 0) -> float:
        _check_unit_interval(x)
        if order == 0:
            return sum(w * m * x**m for m, w in self.atoms)
        if order == 1:
            if x == 0.0:
                if any(m < 1.0 for m, _ in self.atoms):
                    return INF
                return sum(w for m, w in self.atoms if m == 1.0)
            return sum(w * m * m * x ** (m - 1.0) for m, w in self.atoms)
        if order == 2:
            if x == 0.0:
                # m^2 (m-1) x^(m-2): atoms below mass 2 blow up (signed).
                pos = any(1.0 < m < 2.0 for m, _ in self.atoms)
                neg = any(m < 1.0 for m, _ in self.atoms)
                if pos and neg:
                    return math.nan
                if pos:
                    return INF
                if neg:
                    return -INF
                return sum(
                    w * m * m * (m - 1.0) for m, w in self.atoms if m == 2.0
                )
            return sum(
                w * m * m * (m - 1.0) * x ** (m - 2.0) for m, w in self.atoms
            )
        raise DomainError(f"order must be 0, 1 or 2, got {order}")


class Monodisperse(Discrete):
    """All initial particles of unit mass (delta_1)."""

    def __init__(self):
        super().__init__([(1.0, 1.0)])

    def __repr__(self):
        return "Monodisperse()"


class ExponentialDensity(MassMeasure):
    """mu0(dm) = e^{-m} dm; g0(x) = (1 - ln x)^{-2}."""

    def __repr__(self):
        return "ExponentialDensity()"

    def moments(self) -> Moments:
        return Moments(M0=1.0, K=2.0, m0=0.0)

    def g0(self, x: float, order: int = 0) -> float:
        _check_unit_interval(x)
        if x == 0.0:
            return 0.0 if order == 0 else (INF if order == 1 else -INF)
        u = 1.0 - math.log(x)
        if order == 0:
            return u**-2
        if order == 1:
            return 2.0 / (x * u**3)
        if order == 2:
            return 2.0 * (3.0 - u) / (x * x * u**4)
        raise DomainError(f"order must be 0, 1 or 2, got {order}")


class PowerLawDensity(MassMeasure):
    """mu0(dm) = m^{-p} dm; g0(x) = Gamma(2-p) (-ln x)^{p-2}.

    Admissibility <mu0, m ^ 1> < inf forces p in (1, 2): at p = 1 the tail
    integral diverges, so that endpoint is rejected.
    """

    def __init__(self, p: float):
        p = float(p)
        if not 1.0 < p < 2.0:
            raise DomainError(
                f"power-law exponent p={p} must lie in (1, 2) for <mu0, m^1> < inf"
            )
        self.p = p

    def __repr__(self):
        return f"PowerLawDensity(p={self.p})"

    def moments(self) -> Moments:
        return Moments(M0=INF, K=INF, m0=0.0)

    def g0(self, x: float, order: int = 0) -> float:
        _check_unit_interval(x)
        p = self.p
        if x == 0.0:
            return 0.0 if order == 0 else INF
        if x == 1.0:
            # -ln x = 0 and p - 2 < 0: monotone limit is +inf for all orders
            return INF
        u = -math.log(x)
        if order == 0:
            return math.gamma(2.0 - p) * u ** (p - 2.0)
        if order == 1:
            return math.gamma(3.0 - p) * u ** (p - 3.0) / x
        if order == 2:
            return (
                math.gamma(4.0 - p) * u ** (p - 4.0)
                - math.gamma(3.0 - p) * u ** (p - 3.0)
            ) / (x * x)
        raise DomainError(f"order must be 0, 1 or 2, got {order}")


class ArmMeasure:
    """Finite-support initial concentrations c0(a, m) on arms x mass."""

    def __init__(self, weights: Mapping[tuple[int, int], float]):
        clean: dict[tuple[int, int], float] = {}
        for (a, m), w in weights.items():
            a, m, w = int(a), int(m), float(w)
            if a < 0:
                raise DomainError(f"arm count {a} must be >= 0")
            if m < 1:
                raise DomainError(f"mass {m} must be >= 1")
            if w < 0.0:
                raise DomainError(f"weight {w} must be >= 0")
            if w > 0.0:
                clean[(a, m)] = clean.get((a, m), 0.0) + w
        if not clean:
            raise DomainError("arm measure must be non-null")
        self.weights = clean
        self.A0 = sum(a * w for (a, _), w in clean.items())
        if self.A0 <= 0.0:
            raise DomainError("initial arm count A0 must be positive")
        self.K = sum(a * (a - 1) * w for (a, _), w in clean.items())
        self.M0 = sum(m * w for (_, m), w in clean.items())
        self.total = sum(clean.values())

    def __repr__(self):
        return f"ArmMeasure({self.weights!r})"

    @classmethod
    def monodisperse(cls, mu: Mapping[int, float]) -> "ArmMeasure":
        """All particles of mass 1, arms distributed by the law mu."""
        return cls({(a, 1): w for a, w in mu.items()})

    @property
    def is_monodisperse(self) -> bool:
        return all(m == 1 for _, m in self.weights)

    def arm_law(self) -> dict[int, float]:
        if not self.is_monodisperse:
            raise DomainError("arm law defined only for monodisperse initial data")
        return {a: w for (a, _), w in sorted(self.weights.items())}

    def k0(self, x: float, y: float = 1.0, partial: str | None = None) -> float:
        _check_unit_interval(x, "x")
        _check_unit_interval(y, "y")
        if partial is None:
            return sum(
                a * w * x ** (a - 1) * y**m
                for (a, m), w in self.weights.items()
                if a >= 1
            )
        if partial == "x":
            return sum(
                a * (a - 1) * w * x ** (a - 2) * y**m
                for (a, m), w in self.weights.items()
                if a >= 2
            )
        raise DomainError(f"partial must be None or 'x', got {partial!r}")

    def k0_xx(self, x: float, y: float = 1.0) -> float:
        """Second x-derivative; identically zero iff every particle has <= 2 arms."""
        _check_unit_interval(x, "x")
        _check_unit_interval(y, "y")
        return sum(
            a * (a - 1) * (a - 2) * w * x ** (a - 3) * y**m
            for (a, m), w in self.weights.items()
            if a >= 3
        )


class NuMeasure:
    """Size-biased offspring measure nu(m) = (m+1) mu(m+1) on {0, 1, ...}."""

    def __init__(self, values: Sequence[float]):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("nu must be a non-empty 1-D array of weights")
        if (arr < 0.0).any():
            raise DomainError("nu weights must be >= 0")
        self.values = arr

    def __repr__(self):
        return f"NuMeasure({self.values.tolist()!r})"

    @classmethod
    def from_arm_law(cls, mu: Mapping[int, float]) -> "NuMeasure":
        amax = max(mu) if mu else 0
        vals = np.zeros(max(amax, 1))
        for a, w in mu.items():
            if a >= 1:
                vals[a - 1] = a * w
        return cls(vals)

    @property
    def degenerate(self) -> bool:
        """nu(0) = 0: no limiting concentrations can form (all vanish)."""
        return self.values[0] == 0.0

    @property
    def mass(self) -> float:
        return float(self.values.sum())


def nu_from_mu(mu: Mapping[int, float]) -> NuMeasure:
    return NuMeasure.from_arm_law(mu)


def conv_power(nu: NuMeasure, m: int, max_index: int) -> np.ndarray:
    """nu^{*m}(0..max_index) by iterated discrete convolution; nu^{*1} = nu."""
    if m < 1:
        raise DomainError(f"convolution power m={m} must be >= 1")
    base = nu.values
    out = base.copy()
    for _ in range(m - 1):
        out = np.convolve(out, base)[: max_index + 1]
    result = np.zeros(max_index + 1)
    n = min(out.size, max_index + 1)
    result[:n] = out[:n]
    return result


# ---------------------------------------------------------------------------
# Config-file loading

def mass_measure_from_config(spec) -> MassMeasure:
    """Build a MassMeasure from a config object.

    Accepted shapes:
      {"type": "monodisperse"}
      {"type": "exponential"}
      {"type": "powerlaw", "p": 1.5}
      {"type": "discrete", "atoms": [[mass, weight], ...]}
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError(f"bad measure spec: {spec!r}")
    kind = spec["type"]
    if kind == "monodisperse":
        return Monodisperse()
    if kind == "exponential":
        return ExponentialDensity()
    if kind == "powerlaw":
        return PowerLawDensity(spec["p"])
    if kind == "discrete":
        return Discrete([(m, w) for m, w in spec["atoms"]])
    raise DomainError(f"unknown mass-measure type {kind!r}")


def arm_measure_from_config(spec) -> ArmMeasure:
    """Build an ArmMeasure from a config object.

    Accepted shapes:
      {"type": "arms", "triples": [[arms, mass, weight], ...]}
      {"type": "arm-law", "mu": {"0": 0.5, "1": 0.25, "3": 0.25}}
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError(f"bad measure spec: {spec!r}")
    kind = spec["type"]
    if kind == "arms":
        return ArmMeasure({(a, m): w for a, m, w in spec["triples"]})
    if kind == "arm-law":
        mu = {int(a): float(w) for a, w in spec["mu"].items()}
        return ArmMeasure.monodisperse(mu)
    raise DomainError(f"unknown arm-measure type {kind!r}")
