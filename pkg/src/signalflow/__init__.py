"""Numerical toolkit for continuous-time reputation signalling with Poisson monitoring.

Submodules:

* :mod:`signalflow.model` - game primitives (rates, costs, benefit, belief updating)
* :mod:`signalflow.strategy` - Markov stationary strategy profiles as region lists
* :mod:`signalflow.dynamics` - deterministic belief flow and stochastic path simulation
* :mod:`signalflow.values` - continuation-value solvers and diagnostics
* :mod:`signalflow.equilibrium` - best-response checks, sufficient conditions, threshold search
* :mod:`signalflow.montecarlo` - simulation-based value estimates and deviation tests
* :mod:`signalflow.discrete` - the noiseless discrete-time variant
* :mod:`signalflow.cli` - config-driven command line interface
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    BAD,
    GOOD,
    BenefitFn,
    CostFn,
    CostPair,
    ModelParams,
    belief_from_log_odds,
    drift,
    jump_target,
    log_odds_from_belief,
)
from .strategy import (  # noqa: F401
    Region,
    RegionKind,
    StrategyProfile,
    effort_at,
    extremal_profile,
    pooling_profile,
    stasis_points,
    switched_profile,
    validate_profile,
)
