"""Reinforcement-learning designer for parity-check matrices.

The matrix is the state of an MDP: each step, an actor network scores
every entry with a value in (0, 1), entries above a flip threshold are
toggled, and the new matrix is rewarded by validity (full rank) plus
either a decoding-BER score or a structural score (minimum distance and
4-cycle count).  Actor and critic are message-passing networks over the
matrix viewed as a toroidal lattice: every entry is a node joined to its
left/right/up/down neighbors with wrap-around, row-wise and column-wise
messages go through two distinct MLPs, and all parameters are shared
across nodes.  Training is standard deterministic-policy-gradient
off-policy learning with a replay buffer and slowly-mixed target copies.

Shift equivariance is exact here, not approximate: per-node dense layers
use a fixed-order reduction (never BLAS matmul, whose summation order can
differ between row positions), and the critic's node aggregation sorts
values before summing.  Cyclically shifting the input therefore shifts
the actor output bitwise and leaves the critic output bitwise unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel, nn, tanner
from .channel import SnrPoint, StopRule, estimate_ber
from .errors import ConfigError, Divergence
from .gf2 import BitMatrix, min_hamming_distance, rank, to_systematic


# ---------------------------------------------------------------------------
# order-stable dense kernels
# ---------------------------------------------------------------------------

_STABLE_BUDGET = 2**23  # floats per broadcast temporary


def _dense_stable(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """x @ w.T + b with a row-position-independent summation order.

    Each output element reduces over the feature axis with numpy's fixed
    pairwise scheme, so permuting input rows permutes output rows with
    bitwise-identical values.
    """
    out_dim, in_dim = w.shape
    rows = x.shape[0]
    chunk = max(1, _STABLE_BUDGET // max(1, out_dim * in_dim))
    out = np.empty((rows, out_dim))
    for s in range(0, rows, chunk):
        out[s : s + chunk] = (x[s : s + chunk, :, None] * w.T[None, :, :]).sum(axis=1)
    out += b
    return out


def _mlp_forward_stable(params: nn.MlpParams, x: np.ndarray) -> tuple[np.ndarray, list]:
    """Stable-order counterpart of nn.mlp_forward; cache format matches."""
    h = np.asarray(x, dtype=np.float64)
    cache = []
    for layer in params.layers:
        z = _dense_stable(h, layer.w, layer.b)
        cache.append((h, z))
        h = nn._apply_activation(layer.activation, layer.beta, z)
    return h, cache


# ---------------------------------------------------------------------------
# configuration and parameters
# ---------------------------------------------------------------------------


@dataclass
class DesignerConfig:
    """Lattice-network and training hyper-parameters."""

    embed_dim: int = 10       # node embedding width
    message_dim: int = 10     # neighbor message width
    passes: int = 3           # message-passing layers
    mlp_hidden: int = 40
    mlp_layers: int = 3
    agg_neighbors: str = "sum"    # sum | mean over the 4 incident messages
    agg_readout: str = "mean"     # mean | sum over all nodes (critic)
    episodes: int = 500
    steps: int = 25
    flip_threshold: float = 0.3
    action_low: float = 0.0
    action_high: float = 1.0
    noise_sigma: float = 0.3
    eps_init: float = 1.0
    eps_decay: float = 0.995
    gamma: float = 0.99
    rho: float = 0.001
    lr_actor: float = 1e-3
    lr_critic: float = 1e-3
    batch: int = 128
    buffer_capacity: int = 10_000

    def validate(self) -> None:
        problems = []
        if self.embed_dim <= 2:
            problems.append(f"embed_dim must exceed the input width 2, got {self.embed_dim}")
        if self.agg_neighbors not in ("sum", "mean"):
            problems.append(f"agg_neighbors must be sum or mean, got {self.agg_neighbors!r}")
        if self.agg_readout not in ("sum", "mean"):
            problems.append(f"agg_readout must be sum or mean, got {self.agg_readout!r}")
        if not (0.0 <= self.action_low < self.action_high <= 1.0):
            problems.append(f"action bounds must satisfy 0 <= low < high <= 1, "
                            f"got [{self.action_low}, {self.action_high}]")
        if not (0.0 < self.rho <= 1.0):
            problems.append(f"rho must be in (0, 1], got {self.rho}")
        if not (0.0 <= self.gamma <= 1.0):
            problems.append(f"gamma must be in [0, 1], got {self.gamma}")
        if self.episodes < 1 or self.steps < 1:
            problems.append("episodes and steps must be >= 1")
        if problems:
            raise ConfigError(problems)


@dataclass
class MpmnnParams:
    """Shared-weight lattice network: init map, message MLPs, update MLP."""

    f_in: nn.MlpParams    # d0 -> de linear
    f_row: nn.MlpParams   # 2*de -> dm, left/right messages
    f_col: nn.MlpParams   # 2*de -> dm, up/down messages
    f_emb: nn.MlpParams   # de+dm -> de update
    readout: nn.MlpParams  # de -> 1 (actor: per node; critic: after aggregation)

    def arrays(self) -> list[np.ndarray]:
        out = []
        for mlp in (self.f_in, self.f_row, self.f_col, self.f_emb, self.readout):
            out.extend(mlp.arrays())
        return out

    def copy(self) -> "MpmnnParams":
        return MpmnnParams(self.f_in.copy(), self.f_row.copy(), self.f_col.copy(),
                           self.f_emb.copy(), self.readout.copy())

    def count(self) -> int:
        return sum(a.size for a in self.arrays())


def _message_sizes(cfg: DesignerConfig, out_dim: int) -> tuple[list[int], list[str]]:
    hidden = [cfg.mlp_hidden] * (cfg.mlp_layers - 1)
    acts = ["relu"] * (cfg.mlp_layers - 1) + ["identity"]
    return hidden + [out_dim], acts


def init_network(cfg: DesignerConfig, d0: int, readout_activation: str,
                 rng: np.random.Generator, bias_scale: float = 0.0) -> MpmnnParams:
    """Fresh actor (d0=1, sigmoid readout) or critic (d0=2, relu readout).

    ``bias_scale`` randomizes biases; gradient-check fixtures need it
    because binary inputs with zero biases park ReLU units exactly on
    their kinks.
    """
    de, dm = cfg.embed_dim, cfg.message_dim
    msg_tail, acts = _message_sizes(cfg, dm)
    emb_tail, _ = _message_sizes(cfg, de)
    return MpmnnParams(
        f_in=nn.init_mlp([d0, de], ["identity"], rng, bias_scale=bias_scale),
        f_row=nn.init_mlp([2 * de] + msg_tail, acts, rng, bias_scale=bias_scale),
        f_col=nn.init_mlp([2 * de] + msg_tail, acts, rng, bias_scale=bias_scale),
        f_emb=nn.init_mlp([de + dm] + emb_tail, acts, rng, bias_scale=bias_scale),
        readout=nn.init_mlp([de, 1], [readout_activation], rng, bias_scale=bias_scale),
    )


# ---------------------------------------------------------------------------
# lattice message passing
# ---------------------------------------------------------------------------


def _neighbor_views(x: np.ndarray) -> tuple[np.ndarray, ...]:
    """Left/right/up/down neighbor embeddings on the torus; x is (B, m, n, d)."""
    left = np.roll(x, 1, axis=2)
    right = np.roll(x, -1, axis=2)
    up = np.roll(x, 1, axis=1)
    down = np.roll(x, -1, axis=1)
    return left, right, up, down


_SCATTER = {"left": (-1, 2), "right": (1, 2), "up": (-1, 1), "down": (1, 1)}


def mpmnn_forward(x: np.ndarray, params: MpmnnParams, cfg: DesignerConfig):
    """Node embeddings for a batch of feature matrices.

    Args:
        x: (B, m, n, d0) node features.

    Returns:
        (embeddings (B, m, n, de), caches for the backward pass).
    """
    batch, m, n, d0 = x.shape
    flat = lambda a: a.reshape(batch * m * n, a.shape[-1])
    shaped = lambda a: a.reshape(batch, m, n, a.shape[-1])

    h0, cache_in = _mlp_forward_stable(params.f_in, flat(x))
    h = shaped(h0)
    layer_caches = []
    for _ in range(cfg.passes):
        nbrs = dict(zip(("left", "right", "up", "down"), _neighbor_views(h)))
        msgs = {}
        caches = {}
        for name, mlp in (("left", params.f_row), ("right", params.f_row),
                          ("up", params.f_col), ("down", params.f_col)):
            pair = np.concatenate([flat(h), flat(nbrs[name])], axis=1)
            out, c = _mlp_forward_stable(mlp, pair)
            msgs[name] = out
            caches[name] = c
        agg = msgs["left"] + msgs["right"] + msgs["up"] + msgs["down"]
        if cfg.agg_neighbors == "mean":
            agg = agg * 0.25
        joint = np.concatenate([flat(h), agg], axis=1)
        h_new, cache_emb = _mlp_forward_stable(params.f_emb, joint)
        layer_caches.append((caches, cache_emb))
        h = shaped(h_new)
    return h, (cache_in, layer_caches, (batch, m, n, d0))


def mpmnn_backward(params: MpmnnParams, cache, g_h: np.ndarray, cfg: DesignerConfig):
    """Gradients of the lattice network.

    Args:
        g_h: (B, m, n, de) upstream gradient on the output embeddings.

    Returns:
        (grads dict keyed f_in/f_row/f_col/f_emb, g_x (B, m, n, d0)).
    """
    cache_in, layer_caches, (batch, m, n, d0) = cache
    flat = lambda a: a.reshape(batch * m * n, a.shape[-1])
    shaped = lambda a: a.reshape(batch, m, n, a.shape[-1])

    grads = {
        "f_in": [np.zeros_like(a) for a in params.f_in.arrays()],
        "f_row": [np.zeros_like(a) for a in params.f_row.arrays()],
        "f_col": [np.zeros_like(a) for a in params.f_col.arrays()],
        "f_emb": [np.zeros_like(a) for a in params.f_emb.arrays()],
    }
    de = params.f_emb.out_dim
    g = flat(g_h)

    for caches, cache_emb in reversed(layer_caches):
        emb_grads, g_joint = nn.backward(params.f_emb, cache_emb, g)
        for acc, gg in zip(grads["f_emb"], emb_grads):
            acc += gg
        g_self = g_joint[:, :de].copy()
        g_agg = g_joint[:, de:]
        if cfg.agg_neighbors == "mean":
            g_agg = g_agg * 0.25
        for name, mlp, key in (("left", params.f_row, "f_row"),
                               ("right", params.f_row, "f_row"),
                               ("up", params.f_col, "f_col"),
                               ("down", params.f_col, "f_col")):
            mgrads, g_pair = nn.backward(mlp, caches[name], g_agg)
            for acc, gg in zip(grads[key], mgrads):
                acc += gg
            g_self += g_pair[:, :de]
            shift, axis = _SCATTER[name]
            g_self += flat(np.roll(shaped(g_pair[:, de:].copy()), shift, axis=axis))
        g = g_self

    in_grads, g_x = nn.backward(params.f_in, cache_in, g)
    for acc, gg in zip(grads["f_in"], in_grads):
        acc += gg
    return grads, shaped(g_x)


def _flatten_grads(params: MpmnnParams, grads: dict, readout_grads: list) -> list:
    return (grads["f_in"] + grads["f_row"] + grads["f_col"] + grads["f_emb"]
            + readout_grads)


def actor_forward(states: np.ndarray, params: MpmnnParams, cfg: DesignerConfig):
    """Per-entry action values in (0, 1); states is (B, m, n) in {0, 1}.

    Returns (actions (B, m, n), cache).
    """
    x = np.asarray(states, dtype=np.float64)[..., None]
    emb, mp_cache = mpmnn_forward(x, params, cfg)
    batch, m, n, de = emb.shape
    out, ro_cache = _mlp_forward_stable(params.readout, emb.reshape(-1, de))
    return out.reshape(batch, m, n), (mp_cache, ro_cache, emb.shape)


def actor_backward(params: MpmnnParams, cache, g_action: np.ndarray,
                   cfg: DesignerConfig) -> list:
    """Gradients of the actor w.r.t. its parameters (flat list)."""
    mp_cache, ro_cache, (batch, m, n, de) = cache
    ro_grads, g_emb = nn.backward(params.readout, ro_cache,
                                  np.asarray(g_action).reshape(-1, 1))
    grads, _ = mpmnn_backward(params, mp_cache, g_emb.reshape(batch, m, n, de), cfg)
    return _flatten_grads(params, grads, ro_grads)


def actor(state: BitMatrix, params: MpmnnParams, cfg: DesignerConfig) -> np.ndarray:
    """Action matrix for a single state."""
    a, _ = actor_forward(state.a[None], params, cfg)
    return a[0]


def critic_forward(states: np.ndarray, actions: np.ndarray, params: MpmnnParams,
                   cfg: DesignerConfig):
    """Scalar value per (state, action) pair; both inputs (B, m, n).

    The node aggregation sorts embedding components before summing, so the
    output is exactly invariant to node permutations of the lattice.
    Returns (q (B,), cache).
    """
    x = np.stack([np.asarray(states, dtype=np.float64),
                  np.asarray(actions, dtype=np.float64)], axis=-1)
    emb, mp_cache = mpmnn_forward(x, params, cfg)
    batch, m, n, de = emb.shape
    nodes = emb.reshape(batch, m * n, de)
    agg = np.sort(nodes, axis=1).sum(axis=1)
    if cfg.agg_readout == "mean":
        agg = agg / (m * n)
    out, ro_cache = _mlp_forward_stable(params.readout, agg)
    return out[:, 0], (mp_cache, ro_cache, emb.shape)


def critic_backward(params: MpmnnParams, cache, g_q: np.ndarray, cfg: DesignerConfig):
    """Gradients of the critic; returns (flat param grads, g_action (B, m, n))."""
    mp_cache, ro_cache, (batch, m, n, de) = cache
    ro_grads, g_agg = nn.backward(params.readout, ro_cache,
                                  np.asarray(g_q).reshape(-1, 1))
    if cfg.agg_readout == "mean":
        g_agg = g_agg / (m * n)
    g_emb = np.broadcast_to(g_agg[:, None, :], (batch, m * n, de)).reshape(
        batch, m, n, de)
    grads, g_x = mpmnn_backward(params, mp_cache, g_emb, cfg)
    return _flatten_grads(params, grads, ro_grads), g_x[..., 1]


def critic(state: BitMatrix, action: np.ndarray, params: MpmnnParams,
           cfg: DesignerConfig) -> float:
    q, _ = critic_forward(state.a[None], action[None], params, cfg)
    return float(q[0])


# ---------------------------------------------------------------------------
# MDP pieces: transition, reward, exploration, replay
# ---------------------------------------------------------------------------


def transition(state: BitMatrix, action: np.ndarray, flip_threshold: float) -> BitMatrix:
    """Flip every entry whose action value exceeds the threshold."""
    if action.shape != state.shape:
        raise ConfigError([f"action shape {action.shape} != state shape {state.shape}"])
    flips = (np.asarray(action) > flip_threshold).astype(np.uint8)
    return BitMatrix(state.a ^ flips)


@dataclass
class RewardConfig:
    """Scoring of candidate matrices.

    decoding_ber mode simulates the BER of each full-rank candidate with
    the decoder built by ``decoder_factory`` and scores |ln(ber)|; the
    simulation seed is fixed so successive candidates face common noise.
    structure mode scores d_min / alpha_d + alpha_c / (cycles4 + alpha_c).
    """

    mode: str = "structure"
    validity_bonus: float = 1.0
    alpha_d: float = 8.0
    alpha_c: float = 500.0
    ber_snr_db: float = 6.0
    ber_min_errors: int = 300
    ber_max_frames: int = 200_000
    ber_seed: int = 0
    decoder_factory: object = None  # Callable[[TannerGraph], decoder]
    mhd_cap: int = 24

    def validate(self, state_shape: tuple[int, int] | None = None) -> None:
        problems = []
        if self.mode not in ("structure", "decoding_ber"):
            problems.append(f"mode must be structure or decoding_ber, got {self.mode!r}")
        if self.alpha_d <= 0 or self.alpha_c <= 0:
            problems.append("alpha_d and alpha_c must be positive")
        if self.mode == "decoding_ber" and self.decoder_factory is None:
            problems.append("decoding_ber mode needs a decoder_factory")
        if self.mode == "structure" and state_shape is not None:
            m, n = state_shape
            if n - m > self.mhd_cap:
                problems.append(f"structure mode needs k={n - m} <= mhd cap {self.mhd_cap}")
        if problems:
            raise ConfigError(problems)


@dataclass
class RewardBreakdown:
    reward: float
    rank_ok: bool
    d_min: int | None = None
    cycles4: int | None = None
    density: float | None = None


def reward_from_ber(ber: float, bits_simulated: int) -> float:
    """|ln(ber)|, flooring a zero-error estimate at half an error."""
    floor = 0.5 / max(bits_simulated, 1)
    return float(abs(np.log(max(ber, floor))))


def structure_score(d_min: int, cycles4: int, alpha_d: float, alpha_c: float) -> float:
    return d_min / alpha_d + alpha_c / (cycles4 + alpha_c)


def reward_detail(s_next: BitMatrix, cfg: RewardConfig) -> RewardBreakdown:
    """Score a candidate state; zero unless it has full row rank."""
    m = s_next.rows
    graph = tanner.build_graph(s_next)
    c4 = tanner.count_cycles(graph, 4)
    dens = tanner.density(s_next)
    if rank(s_next) < m:
        return RewardBreakdown(0.0, False, cycles4=c4, density=dens)
    pair = to_systematic(s_next)
    if cfg.mode == "structure":
        d_min = min_hamming_distance(pair.g_std, cap=cfg.mhd_cap)
        r = cfg.validity_bonus + structure_score(d_min, c4, cfg.alpha_d, cfg.alpha_c)
        return RewardBreakdown(r, True, d_min=d_min, cycles4=c4, density=dens)
    dec_graph = tanner.build_graph(pair.h_std)
    decoder = cfg.decoder_factory(dec_graph)
    est = estimate_ber(pair, decoder, SnrPoint(cfg.ber_snr_db),
                       StopRule(cfg.ber_min_errors, cfg.ber_max_frames),
                       seed=cfg.ber_seed)
    r = cfg.validity_bonus + reward_from_ber(est.ber, est.bits_simulated)
    return RewardBreakdown(r, True, cycles4=c4, density=dens)


def reward(s: BitMatrix, a: np.ndarray, s_next: BitMatrix, cfg: RewardConfig) -> float:
    return reward_detail(s_next, cfg).reward


@dataclass
class EpsilonState:
    """Exploration probability; decays each time noise is actually added."""

    value: float = 1.0
    decay: float = 0.995


def noisy_action(action: np.ndarray, eps: EpsilonState, sigma: float,
                 bounds: tuple[float, float], rng: np.random.Generator) -> np.ndarray:
    """Epsilon-greedy Gaussian exploration, clipped to the action bounds."""
    out = np.asarray(action, dtype=np.float64)
    if eps.value > 0.0 and rng.random() < eps.value:
        out = out + rng.normal(0.0, sigma, size=out.shape)
        eps.value *= eps.decay
    return np.clip(out, bounds[0], bounds[1])


@dataclass
class Transition:
    """One replay record; reward is always >= 0."""

    s: np.ndarray
    a: np.ndarray
    r: float
    s_next: np.ndarray


class ReplayBuffer:
    """Fixed-capacity FIFO with uniform sampling."""

    def __init__(self, capacity: int):
        self.capacity = int(capacity)
        self._items: list[Transition] = []
        self._head = 0

    def __len__(self) -> int:
        return len(self._items)

    def append(self, item: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._head] = item
            self._head = (self._head + 1) % self.capacity

    def sample(self, batch: int, rng: np.random.Generator) -> list[Transition]:
        idx = rng.choice(len(self._items), size=batch, replace=False)
        return [self._items[i] for i in idx]


def soft_update(target: list[np.ndarray], online: list[np.ndarray], rho: float) -> None:
    """target <- rho * online + (1 - rho) * target, in place."""
    for t, o in zip(target, online):
        t *= 1.0 - rho
        t += rho * o


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------


@dataclass
class LogRow:
    episode: int
    step: int
    reward: float
    rank_ok: bool
    d_min: int | None
    cycles4: int | None
    density: float | None

    def csv_row(self) -> str:
        d = "" if self.d_min is None else str(self.d_min)
        c4 = "" if self.cycles4 is None else str(self.cycles4)
        dens = "" if self.density is None else f"{self.density:.6f}"
        return f"{self.episode},{self.step},{self.reward:.8g},{int(self.rank_ok)},{d},{c4},{dens}"


LOG_HEADER = "episode,step,reward,rank_ok,d_min,c4,density"


@dataclass
class DesignerResult:
    best_matrix: BitMatrix
    best_reward: float
    log: list[LogRow]
    actor_params: MpmnnParams
    critic_params: MpmnnParams


def ddpg_train(init: BitMatrix, cfg: DesignerConfig, reward_cfg: RewardConfig,
               seed: int) -> DesignerResult:
    """Run the full training loop and return the best matrix visited.

    Episodes restart from ``init``; the argmax-reward state across all
    episodes is tracked.  If no step ever produces a positive reward, the
    initial matrix is returned unchanged.

    Raises:
        Divergence: if a network update produces non-finite values.
    """
    cfg.validate()
    reward_cfg.validate(init.shape)
    rng = np.random.default_rng(seed)

    actor_p = init_network(cfg, d0=1, readout_activation="sigmoid", rng=rng)
    critic_p = init_network(cfg, d0=2, readout_activation="relu", rng=rng)
    actor_t = actor_p.copy()
    critic_t = critic_p.copy()
    adam_a = nn.AdamState.for_arrays(actor_p.arrays())
    adam_c = nn.AdamState.for_arrays(critic_p.arrays())

    buffer = ReplayBuffer(cfg.buffer_capacity)
    eps = EpsilonState(cfg.eps_init, cfg.eps_decay)
    best_r = 0.0
    best_m = init.copy()
    log: list[LogRow] = []

    for episode in range(1, cfg.episodes + 1):
        s = init.copy()
        for step in range(1, cfg.steps + 1):
            a = actor(s, actor_p, cfg)
            a = noisy_action(a, eps, cfg.noise_sigma,
                             (cfg.action_low, cfg.action_high), rng)
            s_next = transition(s, a, cfg.flip_threshold)
            detail = reward_detail(s_next, reward_cfg)
            log.append(LogRow(episode, step, detail.reward, detail.rank_ok,
                              detail.d_min, detail.cycles4, detail.density))
            if detail.reward > best_r:
                best_r = detail.reward
                best_m = s_next.copy()
            buffer.append(Transition(s.a.copy(), a.copy(), detail.reward,
                                     s_next.a.copy()))
            if len(buffer) >= cfg.batch:
                _update_networks(buffer, cfg, rng, actor_p, critic_p, actor_t,
                                 critic_t, adam_a, adam_c, seed)
            s = s_next

    return DesignerResult(best_matrix=best_m, best_reward=best_r, log=log,
                          actor_params=actor_p, critic_params=critic_p)


def _update_networks(buffer, cfg, rng, actor_p, critic_p, actor_t, critic_t,
                     adam_a, adam_c, seed) -> None:
    batch = buffer.sample(cfg.batch, rng)
    s = np.stack([t.s for t in batch]).astype(np.float64)
    a = np.stack([t.a for t in batch])
    r = np.array([t.r for t in batch])
    s2 = np.stack([t.s_next for t in batch]).astype(np.float64)
    nb = len(batch)

    # Bellman targets from the slow copies.
    a2, _ = actor_forward(s2, actor_t, cfg)
    q2, _ = critic_forward(s2, a2, critic_t, cfg)
    y = r + cfg.gamma * q2

    # Critic regression toward the targets.
    q, c_cache = critic_forward(s, a, critic_p, cfg)
    c_grads, _ = critic_backward(critic_p, c_cache, 2.0 * (q - y)[:, None] / nb, cfg)
    if not all(np.isfinite(g).all() for g in c_grads):
        raise Divergence("non-finite critic gradient", seed=seed)
    nn.adam_step(critic_p.arrays(), c_grads, adam_c, cfg.lr_critic)

    # Actor ascends the critic's value of its own actions.
    a_pi, a_cache = actor_forward(s, actor_p, cfg)
    _, c_cache2 = critic_forward(s, a_pi, critic_p, cfg)
    _, g_action = critic_backward(critic_p, c_cache2,
                                  np.full((nb, 1), -1.0 / nb), cfg)
    a_grads = actor_backward(actor_p, a_cache, g_action, cfg)
    if not all(np.isfinite(g).all() for g in a_grads):
        raise Divergence("non-finite actor gradient", seed=seed)
    nn.adam_step(actor_p.arrays(), a_grads, adam_a, cfg.lr_actor)

    soft_update(critic_t.arrays(), critic_p.arrays(), cfg.rho)
    soft_update(actor_t.arrays(), actor_p.arrays(), cfg.rho)
