"""Global solutions of four coagulation models with gelation.

Solves the gel-inert and gel-interacting multiplicative-kernel models and
their limited-aggregation ("arms") variants via generating functions and the
method of characteristics, with an independent truncated-ODE oracle.
"""

from .characteristics import (
    ArmsFlow,
    SolutionState,
    SolverConfig,
    alpha_beta_trajectory,
    alpha_via_gamma,
    beta_infinity,
    ell_smolu,
    gel_time,
    l_flory,
    m_crit,
)
from .errors import (
    ConfigError,
    DomainError,
    GelsolveError,
    ModelError,
    SolverError,
    UsageError,
)
from .measures import (
    ArmMeasure,
    Discrete,
    ExponentialDensity,
    MassMeasure,
    Monodisperse,
    NuMeasure,
    PowerLawDensity,
    conv_power,
    nu_from_mu,
)
from .models import (
    Flory,
    FloryArms,
    Model,
    Smoluchowski,
    SmoluchowskiArms,
    asymptotics_report,
    make_model,
    mass_right_derivative_at_gel,
)
from .series import (
    LimitingConcentrations,
    PowerSeries,
    arms_concentrations,
    concentrations,
    limiting_concentrations,
    ps_compose,
    ps_exp,
    ps_mul,
    ps_revert,
)

__version__ = "0.1.0"

__all__ = [
    "ArmMeasure",
    "ArmsFlow",
    "ConfigError",
    "Discrete",
    "DomainError",
    "ExponentialDensity",
    "Flory",
    "FloryArms",
    "GelsolveError",
    "LimitingConcentrations",
    "MassMeasure",
    "Model",
    "ModelError",
    "Monodisperse",
    "NuMeasure",
    "PowerLawDensity",
    "PowerSeries",
    "Smoluchowski",
    "SmoluchowskiArms",
    "SolutionState",
    "SolverConfig",
    "SolverError",
    "UsageError",
    "alpha_beta_trajectory",
    "alpha_via_gamma",
    "arms_concentrations",
    "asymptotics_report",
    "beta_infinity",
    "concentrations",
    "conv_power",
    "ell_smolu",
    "gel_time",
    "l_flory",
    "limiting_concentrations",
    "m_crit",
    "make_model",
    "mass_right_derivative_at_gel",
    "nu_from_mu",
    "ps_compose",
    "ps_exp",
    "ps_mul",
    "ps_revert",
]
