"""Edge-weighted iterative decoder on the Tanner graph.

Structure per iteration: every check-to-variable message is computed with
the clipped-log check update shared with plain BP, then scaled by a
weight produced by one small MLP shared across all edges and iterations.
The MLP sees four reliability features per edge: the message magnitude
and the residuals (absolute change between consecutive iterations) of the
incoming message, the outgoing message, and the node embedding.  Variable
updates and node embeddings then aggregate the weighted messages.

Because the weight network is shared, its parameter count is independent
of the graph: a model trained on one code decodes any other code without
modification.  With the weight network pinned to 1 the decoder reproduces
the clamped BP reference bit for bit (same kernels, same arithmetic).

Training is supervised: random messages are encoded, sent through BPSK/
AWGN at SNRs drawn from a configured range, and the weight MLP is fitted
by Adam on the iteration-averaged bitwise cross entropy of the node
embeddings, with backpropagation through the full unrolled recursion
(including the residual feature paths).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel, nn
from .decoders import check_messages, variable_sums
from .errors import ConfigError, Divergence
from .gf2 import SystematicPair, encode
from .tanner import TannerGraph, build_graph


@dataclass
class EwgnnConfig:
    """Hyper-parameters for training the weight network."""

    t_train: int = 8
    clip_alpha: float = 1e-7
    snr_db_range: tuple[float, float] = (1.0, 8.0)
    batch: int = 4000
    lr: float = 1e-3
    lr_min: float = 1e-5
    epochs: int = 1000
    plateau_patience: int = 50
    hidden: int = 32
    mlp_layers: int = 3
    elu_beta: float = 1.0
    micro_batch: int = 500
    val_fraction: float = 0.1

    def validate(self) -> None:
        problems = []
        if not (0.0 < self.clip_alpha <= 1e-7):
            problems.append(f"clip_alpha must be in (0, 1e-7], got {self.clip_alpha}")
        if self.t_train < 1:
            problems.append(f"t_train must be >= 1, got {self.t_train}")
        if self.batch < 2:
            problems.append(f"batch must be >= 2, got {self.batch}")
        if self.epochs < 1:
            problems.append(f"epochs must be >= 1, got {self.epochs}")
        if self.snr_db_range[0] > self.snr_db_range[1]:
            problems.append(f"empty SNR range {self.snr_db_range}")
        if not (0.0 <= self.val_fraction < 1.0):
            problems.append(f"val_fraction must be in [0, 1), got {self.val_fraction}")
        if problems:
            raise ConfigError(problems)


N_FEATURES = 4  # |msg|, residual(msg in), residual(msg out), residual(embedding)


def init_weight_mlp(rng: np.random.Generator, hidden: int = 32, layers: int = 3,
                    elu_beta: float = 1.0) -> nn.MlpParams:
    """Fresh weight network: features -> hidden ELU stack -> scalar weight."""
    sizes = [N_FEATURES] + [hidden] * (layers - 1) + [1]
    acts = ["elu"] * (layers - 1) + ["identity"]
    return nn.init_mlp(sizes, acts, rng, beta=elu_beta)


def unit_weight_params() -> nn.MlpParams:
    """Constant-1 weight network (zero weights, unit bias, identity output)."""
    return nn.MlpParams([nn.Layer(w=np.zeros((1, N_FEATURES)), b=np.ones(1),
                                  activation="identity")])


def edge_weight(params: nn.MlpParams, features: np.ndarray) -> np.ndarray:
    """Weight of one edge (or a batch of edges) from its feature vector."""
    out, _ = nn.mlp_forward(params, features)
    return out[..., 0]


def weighted_variable_update(lv: np.ndarray, c2v: np.ndarray, w: np.ndarray,
                             evar: np.ndarray, var_idx: np.ndarray,
                             var_mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Variable-to-check messages and node embeddings from weighted inputs.

    v2c_e = l_v + sum_{e' at v, e' != e} w c2v;  h_v = l_v + sum_{e' at v} w c2v.
    The identity h_v - v2c_e = w_e c2v_e holds exactly.
    """
    wm = w * c2v
    sums = variable_sums(wm, var_idx, var_mask)
    v2c = (lv[evar] + sums[evar]) - wm
    h = lv + sums
    return v2c, h


@dataclass
class _Trace:
    """Everything the backward pass needs, per micro-batch."""

    v2c: list      # t = 0..T, (E, B)
    c2v: list      # t = 0..T, (E, B); index 0 is the zero init
    h: list        # t = 0..T, (n, B)
    w: list        # t = 1..T at index t, (E, B)
    excl: list     # t = 1..T at index t, (E, B) raw check products
    feats: list    # t = 1..T at index t, (E, B, 4)
    caches: list   # t = 1..T at index t, weight-MLP forward caches


def _forward(graph: TannerGraph, params: nn.MlpParams, lv: np.ndarray, t_iters: int,
             alpha: float, keep_trace: bool = False):
    """Run the decoder on (n, B) channel LLRs.

    Returns (h_history, trace): h_history is a list of (n, B) embeddings for
    t = 1..T; trace is populated only when keep_trace is set.
    """
    evar = graph.edge_vars()
    chk_idx, chk_mask = graph.check_index()
    var_idx, var_mask = graph.var_index()
    e, b = len(evar), lv.shape[1]

    v2c = lv[evar].copy()
    c2v_prev = np.zeros((e, b))
    res_v2c = np.zeros((e, b))
    res_h = np.zeros((graph.n_var, b))
    h_prev = lv.copy()

    h_history = []
    trace = _Trace(v2c=[v2c], c2v=[c2v_prev], h=[h_prev], w=[None], excl=[None],
                   feats=[None], caches=[None]) if keep_trace else None

    for _ in range(t_iters):
        c2v, excl = check_messages(v2c, chk_idx, chk_mask, alpha)
        feats = np.stack([
            np.abs(c2v),
            np.abs(c2v - c2v_prev),
            res_v2c,
            res_h[evar],
        ], axis=-1)
        w_flat, cache = nn.mlp_forward(params, feats.reshape(e * b, N_FEATURES))
        w = w_flat.reshape(e, b)
        v2c_new, h = weighted_variable_update(lv, c2v, w, evar, var_idx, var_mask)

        res_v2c = np.abs(v2c_new - v2c)
        res_h = np.abs(h - h_prev)
        v2c, c2v_prev, h_prev = v2c_new, c2v, h
        h_history.append(h)
        if keep_trace:
            trace.v2c.append(v2c_new)
            trace.c2v.append(c2v)
            trace.h.append(h)
            trace.w.append(w)
            trace.excl.append(excl)
            trace.feats.append(feats)
            trace.caches.append(cache)

    return h_history, trace


def decode(graph: TannerGraph, llr: np.ndarray, t_iters: int, params: nn.MlpParams,
           alpha: float = 1e-7) -> tuple[np.ndarray, np.ndarray]:
    """Decode one frame; returns (bits, per-iteration embeddings (T, n)).

    The iteration count is an inference parameter and may differ from the
    count the weight network was trained with.
    """
    lv = np.asarray(llr, dtype=np.float64)[:, None]
    h_history, _ = _forward(graph, params, lv, t_iters, alpha)
    bits = (h_history[-1][:, 0] <= 0).astype(np.uint8)
    return bits, np.stack([h[:, 0] for h in h_history])


class EwgnnDecoder:
    """Batch decoding front-end compatible with the BER harness."""

    def __init__(self, graph: TannerGraph, params: nn.MlpParams, t_iters: int = 8,
                 alpha: float = 1e-7, name: str = "ewgnn"):
        self.graph = graph
        self.params = params
        self.t_iters = int(t_iters)
        self.alpha = float(alpha)
        self.decoder_id = f"{name}-t{t_iters}"

    def decode_block(self, llrs: np.ndarray) -> np.ndarray:
        lv = np.atleast_2d(np.asarray(llrs, dtype=np.float64)).T
        h_history, _ = _forward(self.graph, self.params, lv, self.t_iters, self.alpha)
        return (h_history[-1] <= 0).astype(np.uint8).T

    def decode(self, llr: np.ndarray) -> np.ndarray:
        return self.decode_block(np.asarray(llr)[None, :])[0]


def multiloss(h_history: np.ndarray, c: np.ndarray) -> float:
    """Iteration-averaged bitwise cross entropy of one frame.

    h_history is (T, n); the estimated probability of bit 1 at iteration t
    is sigmoid(-h).  Evaluated in logit form (softplus) for stability.
    """
    h = np.asarray(h_history, dtype=np.float64)
    cb = np.asarray(c, dtype=np.float64)[None, :]
    t, n = h.shape
    sp = lambda x: np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    total = (cb * sp(h) + (1.0 - cb) * sp(-h)).sum()
    return float(total / (n * t))


def _loss_terms(h_history: list, c: np.ndarray) -> np.ndarray:
    """Per-frame multiloss for a batch: list of T (n, B) arrays -> (B,)."""
    t = len(h_history)
    n = h_history[0].shape[0]
    cb = c.astype(np.float64)
    total = np.zeros(c.shape[1])
    for h in h_history:
        sp_pos = np.maximum(h, 0.0) + np.log1p(np.exp(-np.abs(h)))
        sp_neg = sp_pos - h  # softplus(-h) = softplus(h) - h
        total += (cb * sp_pos + (1.0 - cb) * sp_neg).sum(axis=0)
    return total / (n * t)


def _check_update_grad(g_excl: np.ndarray, v2c_in: np.ndarray, chk_idx: np.ndarray,
                       chk_mask: np.ndarray) -> np.ndarray:
    """Gradient through the exclusion products, back to the incoming messages.

    For a check with tanh values tau_1..tau_d and exclusion products
    P_i = prod_{l != i} tau_l, routes d(loss)/dP into d(loss)/d(v2c).
    Division-free: pair products prod_{l not in {i, j}} are rebuilt with
    prefix/suffix passes per excluded position, so exact zeros are safe.
    """
    tau = np.tanh(0.5 * v2c_in)
    tp = np.where(chk_mask[:, :, None], tau[chk_idx], 1.0)
    gp = np.zeros_like(tp)
    gp[chk_mask] = g_excl[chk_idx[chk_mask]]

    m_, d, batch = tp.shape
    ones = np.ones((m_, 1, batch))
    gtau_pad = np.zeros_like(tp)
    for i in range(d):
        tmod = tp.copy()
        tmod[:, i] = 1.0
        pre = np.concatenate([ones, np.cumprod(tmod, axis=1)[:, :-1]], axis=1)
        suf = np.concatenate(
            [np.cumprod(tmod[:, ::-1], axis=1)[:, ::-1][:, 1:], ones], axis=1)
        pair = pre * suf  # pair[:, j] = prod_{l not in {i, j}}, valid for j != i
        contrib = gp * pair
        contrib[:, i] = 0.0
        gtau_pad[:, i] = contrib.sum(axis=1)

    gtau = np.zeros_like(v2c_in)
    gtau[chk_idx[chk_mask]] = gtau_pad[chk_mask]
    return gtau * 0.5 * (1.0 - tau * tau)


def loss_and_grad(graph: TannerGraph, params: nn.MlpParams, llrs: np.ndarray,
                  codewords: np.ndarray, t_iters: int, alpha: float,
                  micro_batch: int = 500) -> tuple[float, list[np.ndarray]]:
    """Summed multiloss over a batch of frames and its gradient w.r.t. the MLP.

    Args:
        llrs: (B, n) channel LLRs.
        codewords: (B, n) transmitted bits (labels).

    Returns:
        (loss_sum, grads): grads aligned with params.arrays(); both are
        sums over frames (callers divide by the batch size).
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    codewords = np.asarray(codewords)
    total_loss = 0.0
    total_grads = [np.zeros_like(a) for a in params.arrays()]
    for s in range(0, llrs.shape[0], micro_batch):
        loss, grads = _loss_and_grad_chunk(
            graph, params, llrs[s : s + micro_batch], codewords[s : s + micro_batch],
            t_iters, alpha)
        total_loss += loss
        for acc, g in zip(total_grads, grads):
            acc += g
    return total_loss, total_grads


def _loss_and_grad_chunk(graph, params, llrs, codewords, t_iters, alpha):
    lv = llrs.T.copy()
    c = codewords.T
    n, batch = lv.shape
    evar = graph.edge_vars()
    chk_idx, chk_mask = graph.check_index()
    var_idx, var_mask = graph.var_index()
    e = len(evar)

    h_history, tr = _forward(graph, params, lv, t_iters, alpha, keep_trace=True)
    loss_sum = float(_loss_terms(h_history, c).sum())

    scale = 1.0 / (n * t_iters)
    cb = c.astype(np.float64)

    gh = [np.zeros((n, batch)) for _ in range(t_iters + 1)]
    gv2c = [np.zeros((e, batch)) for _ in range(t_iters + 1)]
    gc2v = [np.zeros((e, batch)) for _ in range(t_iters + 1)]
    gtheta = [np.zeros_like(a) for a in params.arrays()]

    for t in range(t_iters, 0, -1):
        # Loss term: d/dh of the bitwise cross entropy at iteration t.
        p1 = 1.0 / (1.0 + np.exp(tr.h[t]))
        gh[t] += (cb - p1) * scale

        # h = lv + S and v2c = lv[evar] + S[evar] - w*c2v, with
        # S_v = sum of w*c2v over the edges at v.
        g_s = gh[t].copy()
        np.add.at(g_s, evar, gv2c[t])
        g_wm = g_s[evar] - gv2c[t]
        g_w = g_wm * tr.c2v[t]
        gc2v[t] += g_wm * tr.w[t]

        # Weight MLP: parameter grads plus feature grads.
        mlp_grads, g_feat_flat = nn.backward(params, tr.caches[t],
                                             g_w.reshape(e * batch, 1))
        for acc, g in zip(gtheta, mlp_grads):
            acc += g
        g_feat = g_feat_flat.reshape(e, batch, N_FEATURES)

        # Feature 0: |c2v_t|.
        gc2v[t] += g_feat[..., 0] * np.sign(tr.c2v[t])
        # Feature 1: |c2v_t - c2v_{t-1}| (c2v_0 is the constant zero init).
        s1 = np.sign(tr.c2v[t] - tr.c2v[t - 1])
        gc2v[t] += g_feat[..., 1] * s1
        if t - 1 >= 1:
            gc2v[t - 1] -= g_feat[..., 1] * s1
        if t >= 2:
            # Feature 2: |v2c_{t-1} - v2c_{t-2}| (identically 0 at t = 1).
            s2 = np.sign(tr.v2c[t - 1] - tr.v2c[t - 2])
            gv2c[t - 1] += g_feat[..., 2] * s2
            if t - 2 >= 1:
                gv2c[t - 2] -= g_feat[..., 2] * s2
            # Feature 3: |h_{t-1} - h_{t-2}| gathered per edge.
            s3 = np.sign(tr.h[t - 1] - tr.h[t - 2])
            g_res = np.zeros((n, batch))
            np.add.at(g_res, evar, g_feat[..., 3])
            gh[t - 1] += g_res * s3
            if t - 2 >= 1:
                gh[t - 2] -= g_res * s3

        # Check update: c2v = log(clip(1+P)) - log(clip(1-P)); clipped
        # regions contribute zero gradient.
        excl = tr.excl[t]
        ind_a = (1.0 + excl >= alpha) & (1.0 + excl <= 2.0 - alpha)
        ind_b = (1.0 - excl >= alpha) & (1.0 - excl <= 2.0 - alpha)
        g_excl = gc2v[t] * (ind_a / (1.0 + excl) + ind_b / (1.0 - excl))
        if t - 1 >= 1:
            gv2c[t - 1] += _check_update_grad(g_excl, tr.v2c[t - 1], chk_idx, chk_mask)
        # At t = 1 the incoming messages are the channel LLRs (constant).

    return loss_sum, gtheta


@dataclass
class TrainResult:
    """Best parameters plus the bookkeeping needed for the manifest."""

    params: nn.MlpParams
    best_epoch: int
    best_val_loss: float
    val_history: list[float] = field(default_factory=list)
    lr_schedule: list[tuple[int, float]] = field(default_factory=list)


def _draw_frames(code: SystematicPair, rng: np.random.Generator, count: int,
                 snr_db_range: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Random messages through BPSK/AWGN at per-frame uniform SNRs."""
    msgs = rng.integers(0, 2, size=(count, code.k), dtype=np.uint8)
    cw = encode(code.g_std, msgs)
    snr_db = rng.uniform(snr_db_range[0], snr_db_range[1], size=count)
    sigma2 = 10.0 ** (-snr_db / 10.0)
    noise = rng.standard_normal((count, code.n))
    y = channel.modulate(cw) + np.sqrt(sigma2)[:, None] * noise
    llrs = 2.0 * y / sigma2[:, None]
    return llrs, cw


def train(code: SystematicPair, cfg: EwgnnConfig, seed: int,
          init_params: nn.MlpParams | None = None,
          graph: TannerGraph | None = None) -> TrainResult:
    """Fit the weight network on one code.

    One epoch draws a fresh batch of frames, takes one Adam step on the
    batch-mean multiloss, and scores a fixed validation set (drawn once
    from the reserved stream (seed, 0)); the best-validation parameters
    are returned.  The learning rate decays by 10x on validation plateau
    down to cfg.lr_min.

    Raises:
        Divergence: if the training loss becomes non-finite.
    """
    cfg.validate()
    if graph is None:
        graph = build_graph(code.h_std)
    rng0 = np.random.default_rng((seed, 0))
    params = init_params.copy() if init_params is not None else init_weight_mlp(
        rng0, hidden=cfg.hidden, layers=cfg.mlp_layers, elu_beta=cfg.elu_beta)

    n_val = max(1, int(round(cfg.batch * cfg.val_fraction)))
    val_llrs, val_cw = _draw_frames(code, rng0, n_val, cfg.snr_db_range)
    n_train = max(1, cfg.batch - n_val)

    adam = nn.AdamState.for_arrays(params.arrays())
    lr = cfg.lr
    best = TrainResult(params=params.copy(), best_epoch=0, best_val_loss=np.inf,
                       lr_schedule=[(1, lr)])
    since_improved = 0

    for epoch in range(1, cfg.epochs + 1):
        rng = np.random.default_rng((seed, epoch))
        llrs, cw = _draw_frames(code, rng, n_train, cfg.snr_db_range)
        loss_sum, grads = loss_and_grad(graph, params, llrs, cw, cfg.t_train,
                                        cfg.clip_alpha, cfg.micro_batch)
        if not np.isfinite(loss_sum):
            raise Divergence(f"non-finite training loss at epoch {epoch}",
                             seed=seed, where=epoch)
        nn.adam_step(params.arrays(), [g / n_train for g in grads], adam, lr)

        vh, _ = _forward(graph, params, val_llrs.T.copy(), cfg.t_train, cfg.clip_alpha)
        val_loss = float(_loss_terms(vh, val_cw.T).mean())
        best.val_history.append(val_loss)

        if val_loss < best.best_val_loss:
            best.best_val_loss = val_loss
            best.best_epoch = epoch
            best.params = params.copy()
            since_improved = 0
        else:
            since_improved += 1
            if since_improved >= cfg.plateau_patience and lr > cfg.lr_min:
                lr = max(lr * 0.1, cfg.lr_min)
                best.lr_schedule.append((epoch, lr))
                since_improved = 0

    return best


def save_decoder(path, params: nn.MlpParams, meta: dict) -> None:
    """Checkpoint the weight network with its run manifest."""
    tensors, structure = nn.mlp_to_tensors("g", params)
    meta = dict(meta)
    meta["g.structure"] = structure
    nn.save_checkpoint(path, tensors, meta)


def load_decoder(path) -> tuple[nn.MlpParams, dict]:
    tensors, meta = nn.load_checkpoint(path)
    params = nn.mlp_from_tensors("g", tensors, meta["g.structure"])
    return params, meta
