"""Slice activation policies.

Every agent exposes ``select(obs) -> int`` and ``update(obs, action, reward)``
and owns a seeded generator, so a run is reproducible from its seed. Calling
``freeze()`` switches an agent to its greedy evaluation behaviour.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .env import Observation
from .neural import MlpModel


def argmax_lowest(values: np.ndarray) -> int:
    """Index of the maximum; ties go to the lowest index."""
    return int(np.argmax(values))


class Agent:
    name = "agent"

    def __init__(self, n_actions: int, seed: int | None = None):
        self.n_actions = n_actions
        self.rng = np.random.default_rng(seed)
        self.frozen = False

    def select(self, obs: Observation) -> int:
        raise NotImplementedError

    def update(self, obs: Observation, action: int, reward: float) -> float | None:
        return None

    def freeze(self) -> None:
        self.frozen = True


class AllActiveAgent(Agent):
    name = "AllActive"

    def __init__(self, n_actions: int, seed: int | None = None):
        super().__init__(n_actions, seed)
        self.index = n_actions - 1

    def select(self, obs):
        return self.index


class RandomAgent(Agent):
    name = "Random"

    def select(self, obs):
        return int(self.rng.integers(self.n_actions))


class MinMaxScaler:
    """Running min/max scaling of a feature vector into [0, 1]."""

    def __init__(self, dim: int):
        self.lo = np.full(dim, np.inf)
        self.hi = np.full(dim, -np.inf)

    def observe(self, x: np.ndarray) -> None:
        np.minimum(self.lo, x, out=self.lo)
        np.maximum(self.hi, x, out=self.hi)

    def transform(self, x: np.ndarray) -> np.ndarray:
        span = self.hi - self.lo
        with np.errstate(invalid="ignore", divide="ignore"):
            z = np.where(span > 0, (x - self.lo) / np.where(span > 0, span, 1.0), 0.0)
        return np.clip(z, 0.0, 1.0)


class DcmabAgent(Agent):
    """Epsilon-greedy bandit whose per-arm reward estimates come from an MLP.

    ``state_mode="eq"`` feeds the previous SADI's (power, QoS), min-max scaled;
    ``state_mode="sadi"`` feeds a one-hot of the SADI-of-day.
    """

    def __init__(self, n_actions: int, sadis_per_day: int = 144, state_mode: str = "eq",
                 epsilon: float = 0.1, alpha: float = 1e-3, hidden=(100, 100, 100),
                 init_output: float = 0.0, seed: int | None = None):
        super().__init__(n_actions, seed)
        if state_mode not in ("eq", "sadi"):
            raise ValueError(f"state_mode must be 'eq' or 'sadi', got {state_mode!r}")
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        self.state_mode = state_mode
        self.name = "DCMAB-EQ" if state_mode == "eq" else "DCMAB-SADI"
        self.epsilon = epsilon
        self.alpha = alpha
        self.sadis_per_day = sadis_per_day
        in_dim = 2 if state_mode == "eq" else sadis_per_day
        self.model = MlpModel([in_dim, *hidden, n_actions], seed=int(self.rng.integers(2**32)))
        # optimistic start: every arm looks as good as the best possible reward
        self.model.biases[-1][:] = init_output
        self.normalizer = MinMaxScaler(2)

    def encode(self, obs: Observation) -> np.ndarray:
        if self.state_mode == "sadi":
            x = np.zeros(self.sadis_per_day)
            x[obs.sadi_of_day] = 1.0
            return x
        raw = np.array([obs.prev_power_watts, obs.prev_qos])
        self.normalizer.observe(raw)
        return self.normalizer.transform(raw)

    def select(self, obs):
        eps = 0.0 if self.frozen else self.epsilon
        # draw unconditionally so the random stream does not depend on epsilon
        u = self.rng.random()
        explore = self.rng.integers(self.n_actions)
        if u < eps:
            return int(explore)
        return argmax_lowest(self.model.forward(self.encode(obs)))

    def update(self, obs, action, reward):
        return self.model.train_step(self.encode(obs), action, reward, self.alpha)


def one_hot_contexts(n_actions: int, sadis_per_day: int):
    """Context builder: arm ``k`` at slot ``s`` is the unit vector ``k*N + s``."""
    z = n_actions * sadis_per_day

    def contexts(slot: int) -> np.ndarray:
        c = np.zeros((n_actions, z))
        c[np.arange(n_actions), np.arange(n_actions) * sadis_per_day + slot] = 1.0
        return c

    return z, contexts


def arm_slot_contexts(n_actions: int, sadis_per_day: int, arm_scale: float = 100.0,
                      slot_scale: float = 0.1):
    """Context builder with a per-arm block and a per-(arm, slot) block.

    Arm ``k`` at slot ``s`` gets ``arm_scale`` at index ``k`` and
    ``slot_scale`` at ``K + k*N + s``. Under the unit prior a large
    ``arm_scale`` leaves the per-arm effect almost unregularised, while a small
    ``slot_scale`` only lets slots deviate from it given evidence.
    """
    K, N = n_actions, sadis_per_day
    z = K + K * N
    rows = np.arange(K)

    def contexts(slot: int) -> np.ndarray:
        c = np.zeros((K, z))
        c[rows, rows] = arm_scale
        c[rows, K + rows * N + slot] = slot_scale
        return c

    return z, contexts


def chol_rank1_update(L: np.ndarray, x: np.ndarray) -> None:
    """In place: ``L L^T + x x^T`` for lower-triangular ``L``.

    Entries where the running vector is zero are no-ops and get skipped, which
    keeps sparse (e.g. one-hot) updates cheap.
    """
    x = np.array(x, dtype=float)
    n = len(x)
    for k in range(n):
        xk = x[k]
        if xk == 0.0:
            continue
        lkk = L[k, k]
        r = math.hypot(lkk, xk)
        c, s = r / lkk, xk / lkk
        L[k, k] = r
        if k + 1 < n:
            col = L[k + 1:, k]
            col += s * x[k + 1:]
            col /= c
            x[k + 1:] = c * x[k + 1:] - s * col


class ThompsonCAgent(Agent):
    """Linear-Gaussian Thompson sampling with one shared posterior.

    Keeps the Cholesky factor of the precision matrix ``D`` so both the
    posterior mean and a draw from ``N(mu_hat, sigma^2 D^-1)`` cost two
    triangular solves.
    """

    name = "Thompson-C"

    def __init__(self, n_actions: int, sadis_per_day: int = 144, M: float = 0.01,
                 phi: float = 0.5, J: int = 1000, literal_update: bool = False,
                 seed: int | None = None, contexts=None):
        super().__init__(n_actions, seed)
        if contexts is None:
            contexts = arm_slot_contexts(n_actions, sadis_per_day)
        self.z, self.contexts = contexts
        self.M, self.phi, self.J = M, phi, J
        self.sigma = M * math.sqrt(9.0 * self.z * math.log(J / phi))
        self.literal_update = literal_update
        self.L = np.eye(self.z)
        self.f_acc = np.zeros(self.z)
        self.mu_hat = np.zeros(self.z)

    @property
    def D(self) -> np.ndarray:
        return self.L @ self.L.T

    def sample_mu(self) -> np.ndarray:
        xi = self.rng.standard_normal(self.z)
        if self.sigma == 0.0:
            return self.mu_hat.copy()
        # L^-T xi has covariance (L L^T)^-1 = D^-1
        return self.mu_hat + self.sigma * solve_triangular(self.L, xi, lower=True, trans="T", check_finite=False)

    def select(self, obs):
        C = self.contexts(obs.sadi_of_day)
        mu = self.mu_hat if self.frozen else self.sample_mu()
        return argmax_lowest(C @ mu)

    def update(self, obs, action, reward):
        d = self.contexts(obs.sadi_of_day)[action]
        chol_rank1_update(self.L, d)
        if self.literal_update:
            self.f_acc = d * reward
        else:
            self.f_acc += d * reward
        self.mu_hat = cho_solve((self.L, True), self.f_acc, check_finite=False)
        return None


class ThompsonNcAgent(Agent):
    """Per-arm Gaussian Thompson sampling that ignores the context."""

    name = "Thompson-NC"

    def __init__(self, n_actions: int, prior_var: float = 1.0, seed: int | None = None):
        super().__init__(n_actions, seed)
        self.prior_var = prior_var
        self.counts = np.zeros(n_actions, dtype=np.int64)
        self.means = np.zeros(n_actions)

    def select(self, obs):
        unpulled = np.flatnonzero(self.counts == 0)
        if len(unpulled) and not self.frozen:
            return int(self.rng.choice(unpulled))
        theta = self.means + np.sqrt(self.prior_var / (1.0 + self.counts)) * self.rng.standard_normal(self.n_actions)
        return argmax_lowest(self.means if self.frozen else theta)

    def update(self, obs, action, reward):
        self.counts[action] += 1
        self.means[action] += (reward - self.means[action]) / self.counts[action]
        return None


AGENT_NAMES = ("DCMAB-EQ", "DCMAB-SADI", "Thompson-C", "Thompson-NC", "AllActive", "Random")


def make_agent(name: str, n_actions: int, sadis_per_day: int, seed: int | None = None, **params) -> Agent:
    """Build an agent by its display name; unknown ``params`` keys are ignored."""
    if name in ("DCMAB-EQ", "DCMAB-SADI"):
        keys = ("epsilon", "alpha", "hidden", "init_output")
        return DcmabAgent(n_actions, sadis_per_day, state_mode="eq" if name == "DCMAB-EQ" else "sadi",
                          seed=seed, **{k: params[k] for k in keys if k in params})
    if name == "Thompson-C":
        keys = ("M", "phi", "J", "literal_update", "contexts")
        return ThompsonCAgent(n_actions, sadis_per_day, seed=seed, **{k: params[k] for k in keys if k in params})
    if name == "Thompson-NC":
        return ThompsonNcAgent(n_actions, seed=seed, **({"prior_var": params["prior_var"]} if "prior_var" in params else {}))
    if name == "AllActive":
        return AllActiveAgent(n_actions, seed)
    if name == "Random":
        return RandomAgent(n_actions, seed)
    raise ValueError(f"unknown agent {name!r}; expected one of {AGENT_NAMES}")
