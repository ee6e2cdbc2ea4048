"""Reference decoders: sum-product belief propagation and exhaustive ML.

Both operate on batches of frames for throughput; single-frame wrappers
are provided to match the rest of the API.  The check-node and
variable-node kernels here are also reused by the edge-weighted decoder,
which reduces to this BP bit-for-bit when its weights are all 1.
"""

from __future__ import annotations

import numpy as np

from .errors import TooLarge
from .gf2 import BitMatrix, SystematicPair, enumerate_codewords
from .tanner import TannerGraph

#: product clamp for the atanh singularity in the check update
BP_CLAMP_EPS = 1e-12


def hard_decision(llr: np.ndarray) -> np.ndarray:
    """Bit i = 1 iff llr_i <= 0 (boundary goes to 1)."""
    return (np.asarray(llr) <= 0).astype(np.uint8)


def check_messages(v2c: np.ndarray, chk_idx: np.ndarray, chk_mask: np.ndarray,
                   eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Check-to-variable update for all edges of a batch.

    For edge e on check j the outgoing message is
        log(clip(1 + P_e, eps, 2 - eps)) - log(clip(1 - P_e, eps, 2 - eps)),
    where P_e is the product of tanh(v2c/2) over the other edges of j.
    This equals 2*atanh(P_e) with the product clamped to [-1+eps, 1-eps].
    Exclusion products are formed with prefix/suffix cumulative products,
    so zeros are exact and no division is involved.

    Args:
        v2c: (E, B) variable-to-check messages.
        chk_idx, chk_mask: padded per-check edge ids and validity mask.
        eps: clip parameter.

    Returns:
        (c2v, excl): both (E, B); excl is the raw exclusion product P.
    """
    t = np.tanh(0.5 * v2c)
    tp = np.where(chk_mask[:, :, None], t[chk_idx], 1.0)  # (m, d, B)
    m_, d, batch = tp.shape
    ones = np.ones((m_, 1, batch))
    pre = np.concatenate([ones, np.cumprod(tp, axis=1)[:, :-1]], axis=1)
    suf = np.concatenate([np.cumprod(tp[:, ::-1], axis=1)[:, ::-1][:, 1:], ones], axis=1)
    excl_pad = pre * suf
    excl = np.empty_like(v2c)
    excl[chk_idx[chk_mask]] = excl_pad[chk_mask]
    c2v = np.log(np.clip(1.0 + excl, eps, 2.0 - eps)) - np.log(np.clip(1.0 - excl, eps, 2.0 - eps))
    return c2v, excl


def variable_sums(values: np.ndarray, var_idx: np.ndarray, var_mask: np.ndarray) -> np.ndarray:
    """Per-variable sum of per-edge values: (E, B) -> (n, B).

    Summation runs over the padded adjacency in fixed edge order, so the
    result is reproducible and identical across callers.
    """
    gathered = np.where(var_mask[:, :, None], values[var_idx], 0.0)
    return gathered.sum(axis=1)


class BpDecoder:
    """LLR-domain sum-product decoder on a Tanner graph.

    Runs check updates then variable updates each iteration, starting from
    v2c messages equal to the channel LLRs.  With early_stop, a frame
    freezes as soon as the syndrome of its hard decision is zero.
    """

    def __init__(self, graph: TannerGraph, t_max: int = 8, early_stop: bool = True,
                 clamp_eps: float = BP_CLAMP_EPS):
        self.graph = graph
        self.t_max = int(t_max)
        self.early_stop = bool(early_stop)
        self.clamp_eps = float(clamp_eps)
        self._evar = graph.edge_vars()
        self._chk_idx, self._chk_mask = graph.check_index()
        self._var_idx, self._var_mask = graph.var_index()
        self._h = graph.biadjacency().astype(np.int64)
        es = "es" if early_stop else "noes"
        self.decoder_id = f"bp-t{t_max}-{es}"

    def decode_block(self, llrs: np.ndarray) -> np.ndarray:
        bits, _ = self.decode_block_iters(llrs)
        return bits

    def decode_block_iters(self, llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Decode (B, n) LLRs; returns (bits (B, n), iterations used (B,))."""
        llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
        batch, n = llrs.shape
        if n != self.graph.n_var:
            raise ValueError(f"LLR length {n} != n_var {self.graph.n_var}")
        lv = llrs.T  # (n, B)
        v2c = lv[self._evar].copy()  # (E, B)

        out = np.zeros((n, batch), dtype=np.uint8)
        iters = np.full(batch, self.t_max, dtype=np.int64)
        frozen = np.zeros(batch, dtype=bool)

        for t in range(1, self.t_max + 1):
            c2v, _ = check_messages(v2c, self._chk_idx, self._chk_mask, self.clamp_eps)
            sums = variable_sums(c2v, self._var_idx, self._var_mask)
            post = lv + sums
            v2c = (lv[self._evar] + sums[self._evar]) - c2v
            bits = (post <= 0).astype(np.uint8)

            if self.early_stop:
                synd = (self._h @ bits) & 1
                ok = ~synd.any(axis=0)
                newly = ok & ~frozen
                if newly.any():
                    out[:, newly] = bits[:, newly]
                    iters[newly] = t
                    frozen |= newly
                if frozen.all():
                    break
            if t == self.t_max:
                out[:, ~frozen] = bits[:, ~frozen]
        return out.T, iters

    def decode(self, llr: np.ndarray) -> tuple[np.ndarray, int]:
        bits, iters = self.decode_block_iters(np.asarray(llr)[None, :])
        return bits[0], int(iters[0])


def bp_decode(graph: TannerGraph, llr: np.ndarray, t_max: int,
              early_stop: bool = True) -> tuple[np.ndarray, int]:
    """One-shot BP decode of a single frame; returns (bits, iterations used)."""
    return BpDecoder(graph, t_max=t_max, early_stop=early_stop).decode(llr)


class MldDecoder:
    """Exhaustive maximum-likelihood decoder over the full codebook.

    Picks the codeword maximizing the correlation <y, 1-2c>, which is the
    nearest codeword in Euclidean distance under BPSK/AWGN.  Ties break to
    the lowest message index (argmax returns the first maximizer).  LLRs
    are a positive scaling of y, so decoding from LLRs is equivalent.
    """

    #: cap on per-chunk score matrix memory
    _SCORE_BUDGET = 2**27

    def __init__(self, g_std: BitMatrix, cap: int = 20):
        if g_std.rows > cap:
            raise TooLarge(f"k={g_std.rows} exceeds MLD cap {cap}")
        self.codebook = enumerate_codewords(g_std, cap=cap)
        self._pm1 = 1.0 - 2.0 * self.codebook.astype(np.float64)
        self.decoder_id = "mld"

    def decode_block(self, llrs: np.ndarray) -> np.ndarray:
        llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
        batch = llrs.shape[0]
        chunk = max(1, self._SCORE_BUDGET // (self._pm1.shape[0] * 8))
        out = np.empty((batch, llrs.shape[1]), dtype=np.uint8)
        for s in range(0, batch, chunk):
            scores = self._pm1 @ llrs[s : s + chunk].T  # (2^k, chunk)
            best = np.argmax(scores, axis=0)
            out[s : s + chunk] = self.codebook[best]
        return out

    def decode(self, y: np.ndarray) -> np.ndarray:
        return self.decode_block(np.asarray(y)[None, :])[0]


def mld_decode(codebook_pm1: np.ndarray, codebook_bits: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Functional ML decode of one frame given a premodulated codebook."""
    scores = codebook_pm1 @ np.asarray(y, dtype=np.float64)
    return codebook_bits[int(np.argmax(scores))]
