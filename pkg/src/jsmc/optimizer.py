"""Alternating minimization for the joint multi-view representation.

The model decomposes each view's self-expressive representation into a
shared part C plus a per-view inconsistency E^(v) and minimizes

    sum_v ||X^(v) - X^(v)(C + E^(v))||_F^2        reconstruction
  + alpha * sum_v tr(C L^(v) C^T)                  cross-view smoothness
  + beta  * sum_v ||E^(v)||_F^2                    inconsistency penalty
  + lambda * ||C||_*                               low-rank regularization

via an augmented Lagrangian that splits C into an auxiliary S (S = C
constraint, multiplier Y, penalty mu). Each block update is an exact
closed-form minimizer: S solves a Sylvester equation, C is a singular value
shrinkage, each E^(v) is a ridge system, and Y is the standard dual ascent
step. The update order per iteration is S, C, {E^(v)}, Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .data import MultiViewDataset
from .graphs import average_knn_graph, knn_graph
from .linalg import (
    SingularSystemError,
    SpdSolver,
    SymmetricSylvesterSolver,
    nuclear_norm,
    svd,
)

DROP_INCONSISTENCY = "drop_inconsistency"
DROP_SMOOTHNESS = "drop_smoothness"
DROP_LOWRANK = "drop_lowrank"
ABLATION_FLAGS = frozenset({DROP_INCONSISTENCY, DROP_SMOOTHNESS, DROP_LOWRANK})


@dataclass(frozen=True)
class JsmcConfig:
    """Hyperparameters and run controls for one fit.

    mu is held fixed by default; mu_growth > 1 turns on a geometric
    schedule (an extension beyond the closed-form derivation, off unless
    asked for). tol_primal bounds ||S - C||_F / max(1, ||C||_F),
    tol_objective the relative change of the augmented Lagrangian between
    consecutive iterations; both must hold to declare convergence.
    """

    alpha: float = 1.0
    beta: float = 1.0
    lambda_: float = 1.0
    mu: float = 1.0
    k_neighbors: int = 5
    max_iter: int = 100
    tol_primal: float = 1e-6
    tol_objective: float = 1e-5
    seed: int = 0
    ablation: frozenset = frozenset()
    mu_growth: float = 1.0

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        for name in ("alpha", "beta", "lambda_"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be at least 1, got {self.k_neighbors}")
        if self.tol_primal <= 0 or self.tol_objective <= 0:
            raise ValueError("tolerances must be positive")
        if self.mu_growth < 1.0:
            raise ValueError(f"mu_growth must be >= 1, got {self.mu_growth}")
        flags = frozenset(self.ablation)
        unknown = flags - ABLATION_FLAGS
        if unknown:
            raise ValueError(f"unknown ablation flags: {sorted(unknown)}")
        object.__setattr__(self, "ablation", flags)

    @property
    def drop_inconsistency(self) -> bool:
        return DROP_INCONSISTENCY in self.ablation

    @property
    def drop_smoothness(self) -> bool:
        return DROP_SMOOTHNESS in self.ablation

    @property
    def drop_lowrank(self) -> bool:
        return DROP_LOWRANK in self.ablation

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda": self.lambda_,
            "mu": self.mu,
            "k_neighbors": self.k_neighbors,
            "max_iter": self.max_iter,
            "tol_primal": self.tol_primal,
            "tol_objective": self.tol_objective,
            "seed": self.seed,
            "ablation": sorted(self.ablation),
            "mu_growth": self.mu_growth,
        }


@dataclass
class OptimizerState:
    """Mutable iterates of one fit; all matrices are n x n."""

    s: np.ndarray
    c: np.ndarray
    e: list
    y: np.ndarray
    mu: float
    iter: int = 0
    trace: list = field(default_factory=list)
    converged: bool = False


class Precomputed:
    """Immutable per-dataset quantities shared by every iteration.

    gram[v] = X^(v)^T X^(v) (symmetrized, PSD), lap[v] the unnormalized
    Laplacian of the view's K-NN graph, plus their sums. Solver
    factorizations are memoized here so repeated block updates are cheap.
    """

    def __init__(self, data: MultiViewDataset, k_neighbors: int):
        self.views = data.views
        self.gram = []
        for x in data.views:
            g = x.T @ x
            self.gram.append((g + g.T) / 2.0)
        self.gram_sum = np.sum(self.gram, axis=0)
        self.x_sq = [float(np.vdot(x, x)) for x in data.views]
        graphs = [knn_graph(x, k=k_neighbors) for x in data.views]
        self.lap = [g.laplacian() for g in graphs]
        self.lap_sum = np.sum(self.lap, axis=0)
        self._sylvester_cache: dict = {}
        self._e_solver_cache: dict = {}
        self._s_lhs_cache: dict = {}

    @property
    def n(self) -> int:
        return self.gram_sum.shape[0]

    def sylvester_solver(self, alpha: float) -> SymmetricSylvesterSolver:
        """Solver for (2*gram_sum + mu I) S + S (2*alpha*lap_sum) = q.

        The mu shift is applied at solve time, so one factorization serves
        every penalty value.
        """
        if alpha not in self._sylvester_cache:
            b = 2.0 * alpha * self.lap_sum if alpha > 0 else np.zeros_like(self.lap_sum)
            self._sylvester_cache[alpha] = SymmetricSylvesterSolver(2.0 * self.gram_sum, b)
        return self._sylvester_cache[alpha]

    def e_solver(self, view: int, beta: float) -> SpdSolver:
        """Cholesky of gram[view] + beta I, shared across iterations."""
        key = (view, beta)
        if key not in self._e_solver_cache:
            g = self.gram[view]
            self._e_solver_cache[key] = SpdSolver(g + beta * np.eye(g.shape[0]))
        return self._e_solver_cache[key]

    def s_lhs(self, mu: float) -> np.ndarray:
        """Left coefficient 2*gram_sum + mu I of the S system."""
        if mu not in self._s_lhs_cache:
            self._s_lhs_cache[mu] = 2.0 * self.gram_sum + mu * np.eye(self.n)
        return self._s_lhs_cache[mu]


class FitResult(NamedTuple):
    c: np.ndarray
    trace: list
    converged: bool
    n_iter: int
    state: OptimizerState


def objective(
    state: OptimizerState,
    data: MultiViewDataset,
    config: JsmcConfig,
    pre: Precomputed | None = None,
) -> float:
    """The model objective evaluated at (C, E); ablated terms contribute 0."""
    c = state.c
    total = 0.0
    for v, x in enumerate(data.views):
        z = c if config.drop_inconsistency else c + state.e[v]
        r = x - x @ z
        total += float(np.sum(r * r))
    if not config.drop_smoothness and config.alpha > 0:
        laps = pre.lap if pre is not None else _objective_laplacians(data, config)
        for lap in laps:
            total += config.alpha * float(np.sum((c @ lap) * c))
    if not config.drop_inconsistency:
        for e in state.e:
            total += config.beta * float(np.sum(e * e))
    if not config.drop_lowrank and config.lambda_ > 0:
        total += config.lambda_ * nuclear_norm(c)
    return total


def _objective_laplacians(data: MultiViewDataset, config: JsmcConfig) -> list:
    return [knn_graph(x, k=config.k_neighbors).laplacian() for x in data.views]


def lagrangian(
    state: OptimizerState,
    data: MultiViewDataset,
    config: JsmcConfig,
    pre: Precomputed | None = None,
) -> float:
    """Augmented Lagrangian: S carries the loss and smoothness terms, C the
    nuclear norm, and the penalty couples them through Y and mu."""
    s, c, y, mu = state.s, state.c, state.y, state.mu
    laps = pre.lap if pre is not None else _objective_laplacians(data, config)
    total = 0.0
    for v, x in enumerate(data.views):
        z = s if config.drop_inconsistency else s + state.e[v]
        r = x - x @ z
        total += float(np.sum(r * r))
    if not config.drop_smoothness and config.alpha > 0:
        for lap in laps:
            total += config.alpha * float(np.sum((s @ lap) * s))
    if not config.drop_inconsistency:
        for e in state.e:
            total += config.beta * float(np.sum(e * e))
    if not config.drop_lowrank and config.lambda_ > 0:
        total += config.lambda_ * nuclear_norm(c)
    gap = s - c + y / mu
    total += (mu / 2.0) * float(np.sum(gap * gap))
    return total


def update_s(state: OptimizerState, pre: Precomputed, config: JsmcConfig) -> np.ndarray:
    """Minimize the Lagrangian over S: a Sylvester system

        (2 sum_v G^(v) + mu I) S + S (2 alpha sum_v L^(v)) = q,
        q = sum_v 2 G^(v)(I - E^(v)) + mu C - Y.

    With the smoothness term dropped (or alpha = 0) the left coefficient on
    the right side vanishes and this is a plain SPD solve.
    """
    mu = state.mu
    q = 2.0 * pre.gram_sum + mu * state.c - state.y
    if not config.drop_inconsistency:
        for v, g in enumerate(pre.gram):
            q -= 2.0 * (g @ state.e[v])
    alpha = 0.0 if config.drop_smoothness else config.alpha
    s = pre.sylvester_solver(alpha).solve(q, shift_a=mu)

    lhs = pre.s_lhs(mu) @ s - q
    if alpha > 0:
        lhs += s @ (2.0 * alpha * pre.lap_sum)
    residual = np.linalg.norm(lhs, "fro")
    if residual > 1e-9 * max(1.0, np.linalg.norm(q, "fro")):
        raise SingularSystemError(f"S-update residual {residual:.3e} out of tolerance")
    return s


def _svt_update(state: OptimizerState, config: JsmcConfig) -> tuple[np.ndarray, float]:
    """C-update plus ||C||_* for free: the shrunk spectrum is C's spectrum."""
    m = state.s + state.y / state.mu
    if config.drop_lowrank or config.lambda_ == 0:
        return m, 0.0
    u, sigma, vt = svd(m)
    shrunk = np.maximum(sigma - config.lambda_ / state.mu, 0.0)
    return (u * shrunk) @ vt, float(shrunk.sum())


def update_c(state: OptimizerState, config: JsmcConfig) -> np.ndarray:
    """Minimize over C: singular value shrinkage of S + Y/mu by lambda/mu.

    With the low-rank term dropped the shrinkage threshold is zero and C
    equals S + Y/mu exactly.
    """
    return _svt_update(state, config)[0]


def update_e(view: int, state: OptimizerState, pre: Precomputed, config: JsmcConfig) -> np.ndarray:
    """Minimize over one view's inconsistency: (G^(v) + beta I) E = G^(v)(I - S)."""
    if config.drop_inconsistency:
        return np.zeros_like(state.s)
    g = pre.gram[view]
    rhs = g - g @ state.s
    return pre.e_solver(view, config.beta).solve(rhs)


def update_y(state: OptimizerState, config: JsmcConfig) -> np.ndarray:
    """Dual ascent on the S = C constraint: Y + mu (S - C)."""
    return state.y + state.mu * (state.s - state.c)


def primal_residual(state: OptimizerState) -> float:
    """||S - C||_F scaled by max(1, ||C||_F)."""
    return float(np.linalg.norm(state.s - state.c, "fro") / max(1.0, np.linalg.norm(state.c, "fro")))


def _recon_loss(g: np.ndarray, x_sq: float, z: np.ndarray) -> float:
    """||X - X Z||_F^2 through the Gram matrix: tr(G) - 2 tr(G Z) + tr(Z' G Z)."""
    return x_sq - 2.0 * float(np.vdot(g, z)) + float(np.vdot(g @ z, z))


def _trace_values(
    state: OptimizerState, pre: Precomputed, config: JsmcConfig, c_nuclear: float
) -> tuple[float, float]:
    """(lagrangian, objective) for the trace, off the precomputed Grams.

    c_nuclear is ||C||_* as returned by the SVT step, so no extra SVD runs.
    Equivalent to lagrangian()/objective() up to floating-point noise; the
    public functions evaluate the residuals directly from the views and
    serve as the independent route in tests.
    """
    s, c, y, mu = state.s, state.c, state.y, state.mu
    lag = 0.0
    obj = 0.0
    if config.drop_inconsistency:
        total_sq = float(sum(pre.x_sq))
        lag += _recon_loss(pre.gram_sum, total_sq, s)
        obj += _recon_loss(pre.gram_sum, total_sq, c)
    else:
        for v, g in enumerate(pre.gram):
            lag += _recon_loss(g, pre.x_sq[v], s + state.e[v])
            obj += _recon_loss(g, pre.x_sq[v], c + state.e[v])
        beta_term = config.beta * float(sum(np.vdot(e, e) for e in state.e))
        lag += beta_term
        obj += beta_term
    if not config.drop_smoothness and config.alpha > 0:
        lag += config.alpha * float(np.vdot(s @ pre.lap_sum, s))
        obj += config.alpha * float(np.vdot(c @ pre.lap_sum, c))
    if not config.drop_lowrank and config.lambda_ > 0:
        lag += config.lambda_ * c_nuclear
        obj += config.lambda_ * c_nuclear
    gap = s - c + y / mu
    lag += (mu / 2.0) * float(np.vdot(gap, gap))
    return lag, obj


def initial_state(data: MultiViewDataset, config: JsmcConfig) -> OptimizerState:
    """C starts at the views' average K-NN affinity; S, E, Y start at zero."""
    n = data.n
    c0 = average_knn_graph(data.views, k=config.k_neighbors).weights
    return OptimizerState(
        s=np.zeros((n, n)),
        c=c0,
        e=[np.zeros((n, n)) for _ in data.views],
        y=np.zeros((n, n)),
        mu=config.mu,
    )


def fit(data: MultiViewDataset, config: JsmcConfig | None = None, pre: Precomputed | None = None) -> FitResult:
    """Run the alternating updates until both tolerances hold or max_iter.

    Non-convergence within max_iter is not an error: the result is returned
    with converged=False and the trace shows where it stopped.
    """
    config = config or JsmcConfig()
    if pre is None:
        pre = Precomputed(data, config.k_neighbors)
    state = initial_state(data, config)

    prev_lagrangian = None
    for it in range(config.max_iter):
        state.s = update_s(state, pre, config)
        state.c, c_nuclear = _svt_update(state, config)
        state.e = [update_e(v, state, pre, config) for v in range(data.n_views)]
        state.y = update_y(state, config)
        state.iter = it + 1

        lag, obj = _trace_values(state, pre, config, c_nuclear)
        res = primal_residual(state)
        state.trace.append(
            {"iter": it, "lagrangian": lag, "objective": obj, "primal_residual": res}
        )

        if prev_lagrangian is not None:
            rel_change = abs(lag - prev_lagrangian) / max(1.0, abs(prev_lagrangian))
            if res <= config.tol_primal and rel_change <= config.tol_objective:
                state.converged = True
                break
        prev_lagrangian = lag

        if config.mu_growth > 1.0:
            state.mu *= config.mu_growth

    return FitResult(
        c=state.c,
        trace=state.trace,
        converged=state.converged,
        n_iter=state.iter,
        state=state,
    )
