"""Model-selection prior: mixture-of-gammas ranges, logistic jump booleans,
exponential nugget.

Each input dimension carries a range parameter d_i with a two-component gamma
mixture prior (one population of short, wavy ranges and one of long, smooth
ones) and a latent boolean b_i whose probability of switching the dimension to
its linear limit grows logistically with d_i.  The full linear model therefore
has prior mass equal to the product of the per-dimension jump probabilities,
kept strictly below one so a genuinely nonlinear surface with an uncommonly
large range stays reachable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp


@dataclass(frozen=True)
class LLMPriorParams:
    """Parameters of the jump prior.

    gamma : logistic steepness of the jump probability in d
    theta1, theta2 : minimum / maximum jump probabilities, 0 <= t1 <= t2 < 1
    d_shapes, d_rates, d_weights : gamma mixture components for each d_i
        (shape-rate parameterization; the default mixture has means 1/20 and 1)
    g_rate : rate of the exponential nugget prior
    """

    gamma: float = 10.0
    theta1: float = 0.2
    theta2: float = 0.95
    d_shapes: tuple = (1.0, 10.0)
    d_rates: tuple = (20.0, 10.0)
    d_weights: tuple = (0.5, 0.5)
    g_rate: float = 10.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not (0.0 <= self.theta1 <= self.theta2 < 1.0):
            raise ValueError("need 0 <= theta1 <= theta2 < 1")
        if len(self.d_shapes) != len(self.d_rates) or len(self.d_shapes) != len(self.d_weights):
            raise ValueError("mixture component lists must have equal length")
        if not np.isclose(sum(self.d_weights), 1.0):
            raise ValueError("mixture weights must sum to 1")
        if any(s <= 0 for s in self.d_shapes) or any(r <= 0 for r in self.d_rates):
            raise ValueError("gamma shapes and rates must be positive")
        if any(w <= 0 for w in self.d_weights):
            raise ValueError("mixture weights must be positive")
        if not self.g_rate > 0:
            raise ValueError("g_rate must be positive")


def log_prior_d(d, pp: LLMPriorParams = LLMPriorParams()):
    """Log density of the gamma-mixture range prior, elementwise over ``d``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("range parameter d must be positive")
    comps = []
    for w, a, r in zip(pp.d_weights, pp.d_shapes, pp.d_rates):
        comps.append(np.log(w) + a * np.log(r) - gammaln(a) + (a - 1.0) * np.log(d) - r * d)
    out = logsumexp(np.stack(comps, axis=0), axis=0)
    return float(out) if out.ndim == 0 else out


def prob_b0_given_d(d, pp: LLMPriorParams = LLMPriorParams()):
    """Probability of jumping to the linear limit, given the range d.

    Logistic in d, rising from theta1 toward theta2 with midpoint at d = 0.5.
    """
    d = np.asarray(d, dtype=float)
    out = pp.theta1 + (pp.theta2 - pp.theta1) / (1.0 + np.exp(-pp.gamma * (d - 0.5)))
    return float(out) if out.ndim == 0 else out


def log_prior_linear_model(d, pp: LLMPriorParams = LLMPriorParams()) -> float:
    """Log prior probability that every dimension jumps (the full linear model)."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if np.any(d <= 0):
        raise ValueError("range parameters must be positive")
    return float(np.sum(np.log(prob_b0_given_d(d, pp))))


def log_prior_b(b, d, pp: LLMPriorParams = LLMPriorParams()) -> float:
    """Log p(b | d), independent across dimensions."""
    b = np.atleast_1d(np.asarray(b))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    p0 = np.atleast_1d(prob_b0_given_d(d, pp))
    return float(np.sum(np.where(b == 0, np.log(p0), np.log1p(-p0))))


def sample_booleans(d, pp: LLMPriorParams, rng: np.random.Generator) -> np.ndarray:
    """Draw the boolean vector from its prior conditional on d."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    p0 = np.atleast_1d(prob_b0_given_d(d, pp))
    return (rng.random(d.shape[0]) >= p0).astype(np.int8)


def log_prior_g(g: float, pp: LLMPriorParams = LLMPriorParams()) -> float:
    """Log density of the exponential nugget prior."""
    if g <= 0:
        raise ValueError("nugget g must be positive")
    return float(np.log(pp.g_rate) - pp.g_rate * g)


def sample_prior_d(pp: LLMPriorParams, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Forward draw from the range mixture (used for initialization and tests)."""
    which = rng.choice(len(pp.d_weights), size=size, p=np.asarray(pp.d_weights))
    shapes = np.asarray(pp.d_shapes)[which]
    rates = np.asarray(pp.d_rates)[which]
    return rng.gamma(shape=shapes) / rates


def sample_prior_g(pp: LLMPriorParams, rng: np.random.Generator) -> float:
    return float(rng.exponential(1.0 / pp.g_rate))
