"""Closed forms of the tunable alpha-loss family for binary classification.

The family is driven by a single parameter alpha in [1, inf].  alpha = 1 is
log-loss, alpha = inf is sigmoid loss (whose expectation is the probability of
error), and finite alpha in between interpolates continuously.  Every function
here is a pure function of its scalar inputs; :func:`margin_losses` is the
vectorized companion used by the grid searches and the regression engine.

Conventions: labels live in {-1, +1}, beliefs are probabilities of the event
{Y = +1}, margins are y * f(x) on the extended real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Raw alpha values closer to 1 than this collapse to the log-loss branch: the
# alpha/(alpha-1) prefactor amplifies rounding noise catastrophically below it.
LOG_LOSS_GAP = 1e-9


@dataclass(frozen=True)
class Alpha:
    """The tuning parameter alpha in [1, inf].

    ``Alpha(1.0)`` is the log-loss endpoint, ``Alpha(math.inf)`` the sigmoid
    (probability-of-error) endpoint.  Values below 1 and NaN are rejected;
    values within ``LOG_LOSS_GAP`` of 1 are snapped to exactly 1.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("alpha must not be NaN")
        if abs(v - 1.0) <= LOG_LOSS_GAP:
            v = 1.0
        if v < 1.0:
            raise ValueError(f"alpha must lie in [1, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def log_loss(cls) -> "Alpha":
        return cls(1.0)

    @classmethod
    def infinite(cls) -> "Alpha":
        return cls(math.inf)

    @classmethod
    def parse(cls, token: str) -> "Alpha":
        """Parse a CLI token; the literal ``inf`` means the infinite endpoint."""
        text = str(token).strip().lower()
        if text in ("inf", "infinity"):
            return cls.infinite()
        return cls(float(text))

    @property
    def is_log(self) -> bool:
        return self.value == 1.0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def exponent(self) -> float:
        """The belief power 1 - 1/alpha (1.0 at the infinite endpoint)."""
        if self.is_infinite:
            return 1.0
        return 1.0 - 1.0 / self.value

    @property
    def scale(self) -> float:
        """Prefactor alpha/(alpha - 1); also the loss supremum for alpha > 1."""
        if self.is_log:
            return math.inf
        if self.is_infinite:
            return 1.0
        return self.value / (self.value - 1.0)

    def __str__(self) -> str:
        return "inf" if self.is_infinite else f"{self.value:g}"


def check_belief(p: float) -> float:
    """Validate a probability in [0, 1].  No clamping: out of range is an error."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"belief must be a probability in [0, 1], got {p!r}")
    return p


def check_posterior(eta: float) -> float:
    """Validate a posterior strictly inside (0, 1); the endpoints diverge under logit."""
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise ValueError(f"posterior must lie strictly in (0, 1), got {eta!r}")
    return eta


def check_label(y: int) -> int:
    """Validate a binary label in {-1, +1}."""
    iy = int(y)
    if iy != y or iy not in (-1, 1):
        raise ValueError(f"label must be -1 or +1, got {y!r}")
    return iy


def check_margin(z: float) -> float:
    """Validate a margin on the extended real line (+-inf allowed, NaN rejected)."""
    z = float(z)
    if math.isnan(z):
        raise ValueError("margin must not be NaN")
    return z


def sigmoid(z: float) -> float:
    """1 / (1 + exp(-z)) on the extended reals; sigmoid(+-inf) = 1, 0."""
    z = check_margin(z)
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def logit(p: float) -> float:
    """Inverse sigmoid log(p / (1 - p)); the endpoints map to +-inf."""
    p = check_belief(p)
    if p == 0.0:
        return -math.inf
    if p == 1.0:
        return math.inf
    return math.log(p) - math.log1p(-p)


def log_sigmoid(z: float) -> float:
    """log(sigmoid(z)) without overflow for any |z|."""
    z = check_margin(z)
    if z >= 0:
        return -math.log1p(math.exp(-z))
    return z - math.log1p(math.exp(z))


def alpha_loss(alpha: Alpha, y: int, belief_in_label: float) -> float:
    """Loss of assigning probability ``belief_in_label`` to the true label ``y``.

    Branches: -log p at alpha = 1, (alpha/(alpha-1)) * (1 - p^(1-1/alpha)) for
    finite alpha > 1, and 1 - p at alpha = inf.  p = 0 under log-loss yields
    +inf, not an error.
    """
    check_label(y)
    p = check_belief(belief_in_label)
    if alpha.is_log:
        return math.inf if p == 0.0 else -math.log(p)
    if alpha.is_infinite:
        return 1.0 - p
    if p == 0.0:
        return alpha.scale
    # 1 - p^c via expm1 keeps full precision as alpha -> 1 (c -> 0).
    return -alpha.scale * math.expm1(alpha.exponent * math.log(p))


def margin_alpha_loss(alpha: Alpha, z: float) -> float:
    """Margin form of the loss: the same family evaluated at belief sigmoid(z).

    Monotone nonincreasing in z; equals ``alpha_loss`` of the matching belief
    when z = y * logit(belief of +1).
    """
    ls = log_sigmoid(z)
    if alpha.is_log:
        return -ls
    if alpha.is_infinite:
        return sigmoid(-z)
    return -alpha.scale * math.expm1(alpha.exponent * ls)


def margin_alpha_loss_d1(alpha: Alpha, z: float) -> float:
    """First z-derivative of the margin loss; strictly negative for finite z.

    Equals -sigmoid(z)^(1-1/alpha) * sigmoid(-z).
    """
    z = check_margin(z)
    smz = sigmoid(-z)
    if alpha.is_log:
        return -smz
    return -math.exp(alpha.exponent * log_sigmoid(z)) * smz


def margin_alpha_loss_d2(alpha: Alpha, z: float) -> float:
    """Second z-derivative of the margin loss.

    Equals sigmoid(z)^(1-1/alpha) * sigmoid(-z) * (sigmoid(z) - (1-1/alpha) *
    sigmoid(-z)); nonnegative everywhere iff alpha = 1, with a sign change at
    z = log((alpha-1)/alpha) for alpha > 1.
    """
    z = check_margin(z)
    sz = sigmoid(z)
    smz = sigmoid(-z)
    c = alpha.exponent
    power = 1.0 if alpha.is_log else math.exp(c * log_sigmoid(z))
    return power * smz * (sz - c * smz)


def second_deriv_sign_change(alpha: Alpha) -> float:
    """The margin below which the second derivative is negative, log((a-1)/a)."""
    if alpha.is_log:
        raise ValueError("the log-loss margin form is convex: no sign change")
    if alpha.is_infinite:
        return 0.0
    return math.log((alpha.value - 1.0) / alpha.value)


def conditional_risk(alpha: Alpha, eta: float, f: float) -> float:
    """Pointwise risk eta * loss(f) + (1 - eta) * loss(-f) at posterior eta."""
    eta = check_posterior(eta)
    return eta * margin_alpha_loss(alpha, f) + (1.0 - eta) * margin_alpha_loss(alpha, -f)


def optimal_classifier(alpha: Alpha, eta: float) -> float:
    """Minimizer of the conditional risk over classification values f.

    alpha * logit(eta) for alpha < inf; degenerate +-inf at the infinite
    endpoint (0 by convention at eta = 1/2, where any value is optimal).
    """
    eta = check_posterior(eta)
    if alpha.is_infinite:
        if eta == 0.5:
            return 0.0
        return math.copysign(math.inf, eta - 0.5)
    return alpha.value * logit(eta)


def min_conditional_risk(alpha: Alpha, eta: float) -> float:
    """Conditional risk at the optimal classifier.

    Binary entropy at alpha = 1, min(eta, 1 - eta) at alpha = inf, and
    (alpha/(alpha-1)) * (1 - (eta^alpha + (1-eta)^alpha)^(1/alpha)) for finite
    alpha > 1.  Symmetric in eta <-> 1 - eta and concave in eta.
    """
    eta = check_posterior(eta)
    if alpha.is_log:
        return -(eta * math.log(eta) + (1.0 - eta) * math.log1p(-eta))
    if alpha.is_infinite:
        return min(eta, 1.0 - eta)
    a = alpha.value
    hi = max(eta, 1.0 - eta)
    ratio = min(eta, 1.0 - eta) / hi
    # hi * (1 + ratio^a)^(1/a), stable for large alpha where ratio^a underflows.
    power_mean = hi * math.exp(math.log1p(ratio**a) / a)
    return alpha.scale * (1.0 - power_mean)


def tilted_posterior(alpha: Alpha, p: float) -> float:
    """The belief eta^alpha / (eta^alpha + (1-eta)^alpha) minimizing expected loss.

    Identity at alpha = 1; the hard indicator of p > 1/2 in the infinite limit
    (1/2 at p = 1/2).  Computed as sigmoid(alpha * logit(p)), which is exact at
    the endpoints and stable for large alpha.
    """
    p = check_belief(p)
    if alpha.is_log:
        return p
    if alpha.is_infinite:
        if p == 0.5:
            return 0.5
        return 1.0 if p > 0.5 else 0.0
    return sigmoid(alpha.value * logit(p))


def _sigmoid_array(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape, dtype=float)
    neg = z < 0
    pos = ~neg
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[neg])
    out[neg] = ez / (1.0 + ez)
    return out


def _log_sigmoid_array(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape, dtype=float)
    neg = z < 0
    pos = ~neg
    out[pos] = -np.log1p(np.exp(-z[pos]))
    out[neg] = z[neg] - np.log1p(np.exp(z[neg]))
    return out


def margin_losses(alpha: Alpha, margins: np.ndarray) -> np.ndarray:
    """Vectorized :func:`margin_alpha_loss` over an array of margins."""
    z = np.asarray(margins, dtype=float)
    if alpha.is_infinite:
        return _sigmoid_array(-z)
    ls = _log_sigmoid_array(z)
    if alpha.is_log:
        return -ls
    return -alpha.scale * np.expm1(alpha.exponent * ls)
