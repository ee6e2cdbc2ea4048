"""Brute-force reference implementations and validation suites.

Everything here is deliberately slow and independent of the production
paths it checks: cycle counting by DFS enumeration, minimum distance by
Gray-code codeword walking, bitwise-MAP decoding by posterior summation,
and ML decoding by a squared-distance scan.  The test suite and the
``oracle`` CLI command both run these against the fast implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2, tanner
from .gf2 import BitMatrix


def dfs_count_cycles(g: tanner.TannerGraph, length: int) -> int:
    """Count simple cycles by exhaustive DFS over closed paths.

    Each cycle is found once per (minimum node, direction), so the raw
    closed-path count is divided by 2.  Exponential; keep graphs small.
    """
    n_total = g.n_var + g.n_chk
    adj: list[list[int]] = [[] for _ in range(n_total)]
    for v, c in g.edges:
        adj[v].append(g.n_var + c)
        adj[g.n_var + c].append(v)

    count = 0

    def walk(start: int, node: int, depth: int, visited: set[int]) -> int:
        # depth = number of nodes on the current path; close at length.
        found = 0
        for nxt in adj[node]:
            if depth == length:
                if nxt == start:
                    found += 1
            elif nxt > start and nxt not in visited:
                visited.add(nxt)
                found += walk(start, nxt, depth + 1, visited)
                visited.remove(nxt)
        return found

    for s in range(n_total):
        count += walk(s, s, 1, {s})
    return count // 2


def gray_min_distance(g: BitMatrix) -> int:
    """Minimum distance via a Gray-code walk of the row space.

    Independent of the chunked matmul enumeration: visits codewords by
    XOR-ing one generator row at a time.
    """
    k, n = g.shape
    if k > 20:
        raise gf2.TooLarge(f"k={k} too large for the Gray-code oracle")
    cw = np.zeros(n, dtype=np.uint8)
    best = n + 1
    for i in range(1, 1 << k):
        # Bit that toggles between Gray(i-1) and Gray(i).
        bit = (i & -i).bit_length() - 1
        cw ^= g.a[bit]
        w = int(cw.sum())
        if 0 < w < best:
            best = w
    return best


def codebook_of(h: BitMatrix, cap: int = 16) -> np.ndarray:
    """All codewords of H in H's own column order (undoing the systematic
    permutation), shape (2^k, n)."""
    pair = gf2.to_systematic(h)
    cw_std = gf2.enumerate_codewords(pair.g_std, cap=cap)
    cw = np.empty_like(cw_std)
    cw[:, pair.col_perm] = cw_std
    return cw


def map_bitwise_decode(codewords: np.ndarray, llr: np.ndarray) -> np.ndarray:
    """Exact bitwise MAP decision by summing posteriors over all codewords.

    Codeword weights are w(c) = exp(sum_j (1 - 2 c_j) llr_j / 2); the bit
    decision compares the two conditional sums in a numerically safe
    log-sum-exp form.  Boundary ties go to bit 1, matching hard_decision.
    """
    scores = ((1.0 - 2.0 * codewords) @ (np.asarray(llr, dtype=np.float64) * 0.5))
    scores -= scores.max()
    w = np.exp(scores)
    n = codewords.shape[1]
    bits = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        p1 = w[codewords[:, i] == 1].sum()
        p0 = w[codewords[:, i] == 0].sum()
        bits[i] = 1 if p0 <= p1 else 0
    return bits


def mld_distance_scan(codewords: np.ndarray, y: np.ndarray) -> np.ndarray:
    """ML decoding by argmin Euclidean distance, scanning one codeword at a time."""
    y = np.asarray(y, dtype=np.float64)
    best = None
    best_d = np.inf
    for cw in codewords:
        x = 1.0 - 2.0 * cw.astype(np.float64)
        d = float(((y - x) ** 2).sum())
        if d < best_d:
            best_d = d
            best = cw
    return best.astype(np.uint8)


def random_parity_matrix(rng: np.random.Generator, m: int, n: int, p: float = 0.4) -> BitMatrix:
    """Random binary matrix with no all-zero rows or columns."""
    while True:
        a = (rng.random((m, n)) < p).astype(np.uint8)
        if a.sum() == 0:
            continue
        return BitMatrix(a)


def random_full_rank(rng: np.random.Generator, m: int, n: int, p: float = 0.4) -> BitMatrix:
    """Random (m, n) binary matrix with full row rank."""
    while True:
        h = random_parity_matrix(rng, m, n, p)
        if gf2.rank(h) == m:
            return h


@dataclass
class OracleResult:
    name: str
    instances: int
    failures: int

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        status = "pass" if self.ok else "FAIL"
        return f"[{status}] {self.name}: {self.instances} instances, {self.failures} failures"


def run_cycle_suite(seed: int, instances: int = 1000) -> OracleResult:
    """count_cycles vs DFS enumeration on random graphs with m, n <= 8."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(instances):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(2, 9))
        h = random_parity_matrix(rng, m, n, p=float(rng.uniform(0.2, 0.6)))
        g = tanner.build_graph(h)
        for length in (4, 6):
            if tanner.count_cycles(g, length) != dfs_count_cycles(g, length):
                failures += 1
    return OracleResult("cycle counts vs DFS", instances, failures)


def run_mhd_suite(seed: int, instances: int = 1000) -> OracleResult:
    """min_hamming_distance vs the Gray-code walk, k <= 12."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(instances):
        k = int(rng.integers(2, 13))
        n = k + int(rng.integers(1, 9))
        g = random_full_rank(rng, k, n, p=0.5)
        if gf2.min_hamming_distance(g) != gray_min_distance(g):
            failures += 1
    return OracleResult("min distance vs Gray-code walk", instances, failures)


def random_tree_code(rng: np.random.Generator, n_var: int, n_chk: int) -> BitMatrix | None:
    """Random bipartite tree with the requested node counts, as a matrix.

    Grows the tree by attaching each new node to a random node of the
    other type.  Returns None when the result is row-rank-deficient
    (e.g. two degree-1 checks on the same variable).
    """
    h = np.zeros((n_chk, n_var), dtype=np.uint8)
    vars_in = [0]
    chks_in: list[int] = []
    pending = [("v", i) for i in range(1, n_var)] + [("c", j) for j in range(n_chk)]
    order = rng.permutation(len(pending))
    for idx in order:
        kind, node = pending[idx]
        if kind == "v":
            if not chks_in:
                # no check yet; defer by attaching after one appears
                pending.append(("v", node))
                continue
            j = chks_in[rng.integers(len(chks_in))]
            h[j, node] = 1
            vars_in.append(node)
        else:
            i = vars_in[rng.integers(len(vars_in))]
            h[node, i] = 1
            chks_in.append(node)
    if not chks_in:
        return None
    mat = BitMatrix(h)
    if gf2.rank(mat) < n_chk:
        return None
    return mat


def run_bp_map_suite(seed: int, instances: int = 200) -> OracleResult:
    """BP on cycle-free graphs equals exact bitwise MAP decisions."""
    from . import channel
    from .decoders import BpDecoder

    rng = np.random.default_rng(seed)
    failures = 0
    done = 0
    while done < instances:
        m = int(rng.integers(1, 6))
        n = m + int(rng.integers(1, 7))
        h = random_tree_code(rng, n, m)
        if h is None:
            continue
        done += 1
        pair = gf2.to_systematic(h)
        graph = tanner.build_graph(pair.h_std)
        dec = BpDecoder(graph, t_max=n + m, early_stop=False)
        snr = channel.SnrPoint(0.0)
        msgs = rng.integers(0, 2, size=(8, pair.k), dtype=np.uint8)
        cw = gf2.encode(pair.g_std, msgs)
        y = channel.modulate(cw) + snr.sigma * rng.standard_normal(cw.shape)
        llrs = channel.llr(y, snr)
        bp_bits = dec.decode_block(llrs)
        for f in range(llrs.shape[0]):
            if not (bp_bits[f] == map_bitwise_decode(pair.g_std, llrs[f])).all():
                failures += 1
    return OracleResult("tree BP vs bitwise MAP", instances, failures)


def run_mld_scan_suite(seed: int, instances: int = 300) -> OracleResult:
    """Correlation-based ML decoder vs the squared-distance scan."""
    from .decoders import MldDecoder

    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(instances):
        k = int(rng.integers(2, 7))
        n = k + int(rng.integers(1, 6))
        g = random_full_rank(rng, k, n, p=0.5)
        dec = MldDecoder(g)
        y = rng.standard_normal(n) * 2.0
        if not (dec.decode(y) == mld_distance_scan(dec.codebook, y)).all():
            failures += 1
    return OracleResult("ML correlation vs distance scan", instances, failures)


def run_gradient_suite(seed: int, instances: int = 50,
                       tolerance: float = 1e-5,
                       actor_tolerance: float = 1e-4) -> OracleResult:
    """Finite-difference checks of every analytic gradient in the package.

    Per randomized instance: a plain MLP, the decoder multiloss w.r.t. the
    weight network through all iterations, the critic regression loss, and
    the actor objective through the critic.  Fixture biases are drawn
    nonzero so ReLU pre-activations sit off their kinks (where central
    differences disagree with any subgradient); the actor path uses a
    smaller step for the same reason.
    """
    from . import designer, ewgnn, nn
    from .tanner import build_graph

    h74 = BitMatrix([
        [1, 0, 1, 1, 1, 0, 0],
        [1, 1, 0, 1, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
    ])
    pair = gf2.to_systematic(h74)
    graph = build_graph(pair.h_std)

    failures = 0
    for inst in range(instances):
        rng = np.random.default_rng((seed, inst))
        ok = True

        # plain MLP
        mlp = nn.init_mlp([3, 6, 2], ["elu", "sigmoid"], rng, bias_scale=0.2)
        x = rng.standard_normal((4, 3))

        def mlp_loss():
            y, cache = nn.mlp_forward(mlp, x)
            grads, _ = nn.backward(mlp, cache, 2.0 * y)
            return float((y**2).sum()), grads

        ok &= nn.gradient_check(mlp_loss, mlp.arrays(), h=1e-5) < tolerance

        # decoder multiloss wrt the weight network
        wparams = ewgnn.init_weight_mlp(rng, hidden=6, layers=3)
        msgs = rng.integers(0, 2, size=(2, pair.k), dtype=np.uint8)
        cw = gf2.encode(pair.g_std, msgs)
        y = (1.0 - 2.0 * cw) + 0.8 * rng.standard_normal(cw.shape)
        llrs = 2.0 * y / 0.64

        def dec_loss():
            return ewgnn.loss_and_grad(graph, wparams, llrs, cw, t_iters=3, alpha=1e-7)

        ok &= nn.gradient_check(dec_loss, wparams.arrays(), h=1e-5) < tolerance

        # critic loss and actor objective on a 4x8 lattice
        cfg = designer.DesignerConfig(embed_dim=3, message_dim=2, passes=2,
                                      mlp_hidden=5, mlp_layers=2)
        actor_p = designer.init_network(cfg, 1, "sigmoid", rng, bias_scale=0.1)
        critic_p = designer.init_network(cfg, 2, "relu", rng, bias_scale=0.1)
        s = rng.integers(0, 2, size=(2, 4, 8)).astype(np.float64)
        a = rng.uniform(0, 1, size=(2, 4, 8))
        targets = rng.uniform(0, 3, size=2)

        def critic_loss():
            q, cache = designer.critic_forward(s, a, critic_p, cfg)
            loss = float(((targets - q) ** 2).mean())
            grads, _ = designer.critic_backward(
                critic_p, cache, (2.0 * (q - targets) / len(q))[:, None], cfg)
            return loss, grads

        ok &= nn.gradient_check(critic_loss, critic_p.arrays(), h=1e-5) < tolerance

        def actor_objective():
            api, acache = designer.actor_forward(s, actor_p, cfg)
            q, ccache = designer.critic_forward(s, api, critic_p, cfg)
            _, gact = designer.critic_backward(
                critic_p, ccache, np.full((len(q), 1), -1.0 / len(q)), cfg)
            grads = designer.actor_backward(actor_p, acache, gact, cfg)
            return float(-q.mean()), grads

        ok &= nn.gradient_check(actor_objective, actor_p.arrays(), h=1e-6) < actor_tolerance

        if not ok:
            failures += 1
    return OracleResult("gradient finite-difference suite", instances, failures)


def run_systematic_suite(seed: int, instances: int = 1000) -> OracleResult:
    """to_systematic invariants: shapes, orthogonality, rank, permutation."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(instances):
        m = int(rng.integers(1, 7))
        n = m + int(rng.integers(1, 9))
        h = random_full_rank(rng, m, n)
        pair = gf2.to_systematic(h)
        ok = True
        ok &= bool(((pair.g_std.a @ pair.h_std.a.T) % 2 == 0).all())
        ok &= (pair.h_std.a[:, n - m :] == np.eye(m, dtype=np.uint8)).all()
        ok &= gf2.rank(pair.h_std) == m and gf2.rank(pair.g_std) == n - m
        ok &= sorted(pair.col_perm.tolist()) == list(range(n))
        # Undoing the permutation must reproduce the row space of the original.
        undone = np.empty_like(pair.h_std.a)
        undone[:, pair.col_perm] = pair.h_std.a
        span_orig, _ = gf2._row_reduce(h.a.copy())
        span_undone, _ = gf2._row_reduce(undone.copy())
        ok &= bool((span_orig == span_undone).all())
        if not ok:
            failures += 1
    return OracleResult("systematic form invariants", instances, failures)


ALL_SUITES = {
    "cycles": run_cycle_suite,
    "mhd": run_mhd_suite,
    "systematic": run_systematic_suite,
    "bp-map": run_bp_map_suite,
    "mld": run_mld_scan_suite,
    "gradients": run_gradient_suite,
}
