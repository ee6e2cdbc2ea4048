"""Tanner graphs: construction, neighborhoods, cycle counts, girth, density.

The bipartite graph of a parity-check matrix H has one variable node per
column and one check node per row; edge (i, j) exists iff H[j, i] = 1.
Cycle counting is exact and closed-form (pairwise row overlaps for
4-cycles, a trace formula with degeneracy subtraction for 6-cycles); both
are validated against a brute-force DFS oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import UnsupportedLength
from .gf2 import BitMatrix, min_hamming_distance, to_systematic

#: girth value for acyclic graphs
INFINITE_GIRTH = float("inf")


@dataclass
class TannerGraph:
    """Bipartite variable/check graph with an indexed edge list.

    ``edges[e]`` is the (variable, check) pair of edge e; edges are ordered
    check-major (by check index, then variable index), matching a row-major
    scan of H.  ``var_adj[i]`` / ``chk_adj[j]`` list incident edge ids.
    """

    n_var: int
    n_chk: int
    edges: list[tuple[int, int]]
    var_adj: list[list[int]]
    chk_adj: list[list[int]]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_vars(self) -> np.ndarray:
        """Variable index of every edge, shape (E,)."""
        return self._cached("evar", lambda: np.array([v for v, _ in self.edges], dtype=np.int64))

    def edge_chks(self) -> np.ndarray:
        """Check index of every edge, shape (E,)."""
        return self._cached("echk", lambda: np.array([c for _, c in self.edges], dtype=np.int64))

    def check_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Padded per-check edge ids: (index (m, dmax), mask (m, dmax))."""
        return self._cached("chk_idx", lambda: _pad_adjacency(self.chk_adj))

    def var_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Padded per-variable edge ids: (index (n, dmax), mask (n, dmax))."""
        return self._cached("var_idx", lambda: _pad_adjacency(self.var_adj))

    def biadjacency(self) -> np.ndarray:
        """Reconstruct H as an (m, n) uint8 array from the edge list."""
        b = np.zeros((self.n_chk, self.n_var), dtype=np.uint8)
        for v, c in self.edges:
            b[c, v] = 1
        return b

    def _cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]


def _pad_adjacency(adj: list[list[int]]) -> tuple[np.ndarray, np.ndarray]:
    dmax = max((len(a) for a in adj), default=0)
    dmax = max(dmax, 1)
    idx = np.zeros((len(adj), dmax), dtype=np.int64)
    mask = np.zeros((len(adj), dmax), dtype=bool)
    for i, a in enumerate(adj):
        idx[i, : len(a)] = a
        mask[i, : len(a)] = True
    return idx, mask


def build_graph(h: BitMatrix) -> TannerGraph:
    """Tanner graph of H; edge (i, j) present iff H[j, i] = 1."""
    m, n = h.shape
    cj, vi = np.nonzero(h.a)  # row-major: check-major edge order
    edges = list(zip(vi.tolist(), cj.tolist()))
    var_adj: list[list[int]] = [[] for _ in range(n)]
    chk_adj: list[list[int]] = [[] for _ in range(m)]
    for e, (v, c) in enumerate(edges):
        var_adj[v].append(e)
        chk_adj[c].append(e)
    return TannerGraph(n_var=n, n_chk=m, edges=edges, var_adj=var_adj, chk_adj=chk_adj)


def density(h: BitMatrix) -> float:
    """Fraction of ones: ones(H) / (m * n)."""
    return h.ones() / (h.rows * h.cols)


def count_cycles(g: TannerGraph, length: int) -> int:
    """Exact number of simple cycles of the given length (4 or 6).

    Cycles are unordered: each is counted once, regardless of starting
    node or direction.
    """
    if length == 4:
        return _count_4cycles(g)
    if length == 6:
        return _count_6cycles(g)
    raise UnsupportedLength(f"cycle length {length} not supported (4 or 6 only)")


def _count_4cycles(g: TannerGraph) -> int:
    # Each unordered check pair with t shared variables closes C(t, 2) squares.
    b = g.biadjacency().astype(np.int64)
    p = b @ b.T
    iu = np.triu_indices(g.n_chk, k=1)
    t = p[iu]
    return int((t * (t - 1) // 2).sum())


def _count_6cycles(g: TannerGraph) -> int:
    # Let P = B B^T (check overlaps), q = column weights.  Closed 3-walks on
    # the check projection tr(P^3) decompose into degenerate walks plus
    # 6 * sum_{a<b<c} P_ab P_bc P_ca; hexagons are the triples with three
    # pairwise-distinct shared variables, hence the triple-overlap correction.
    b = g.biadjacency().astype(np.int64)
    m = g.n_chk
    p = b @ b.T
    d = np.diag(p).copy()
    q = b.sum(axis=0)

    tr3 = int(np.einsum("ab,bc,ca->", p, p, p))
    term_diag = int((d**3).sum())
    p2 = p * p
    term_two = int((d[:, None] * p2).sum() - (d * np.diag(p2)).sum())
    triples = (tr3 - term_diag - 3 * term_two) // 6

    # W_ab = number of (shared var x, third check) incidences for pair (a,b).
    w = (b * np.maximum(q - 2, 0)[None, :].astype(np.int64)) @ b.T
    iu = np.triu_indices(m, k=1)
    pair_third = int((p[iu] * w[iu]).sum())
    triple_overlap = int(sum(comb(int(x), 3) for x in q))

    return int(triples - pair_third + 2 * triple_overlap)


def girth(g: TannerGraph):
    """Length of the shortest cycle via BFS from every node; inf if acyclic."""
    n_total = g.n_var + g.n_chk
    adj: list[list[int]] = [[] for _ in range(n_total)]
    for v, c in g.edges:
        adj[v].append(g.n_var + c)
        adj[g.n_var + c].append(v)

    best = None
    for s in range(n_total):
        dist = [-1] * n_total
        parent = [-1] * n_total
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if best is not None and dist[u] * 2 >= best:
                break
            for w in adj[u]:
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    cand = dist[u] + dist[w] + 1
                    if best is None or cand < best:
                        best = cand
    return INFINITE_GIRTH if best is None else int(best)


@dataclass(frozen=True)
class CodeProperties:
    """Structural summary of a code: distance, short cycles, girth, density."""

    mhd: int
    cycles4: int
    cycles6: int
    girth: float
    density: float


def code_properties(h: BitMatrix, mhd_cap: int = 24) -> CodeProperties:
    """Compute the property report for a full-rank parity-check matrix."""
    pair = to_systematic(h)
    g = build_graph(h)
    return CodeProperties(
        mhd=min_hamming_distance(pair.g_std, cap=mhd_cap),
        cycles4=count_cycles(g, 4),
        cycles6=count_cycles(g, 6),
        girth=girth(g),
        density=density(h),
    )
