"""Signed interaction graphs: an attraction/repulsion partition of a
row-stochastic node pair selection matrix, plus generators for the standard
families (uniform complete, uniform ring, Erdos-Renyi repulsion).

Nodes are numbered 1..n in the public API and in the JSON file format
``{"n": n, "att": [[j, i, w], ...], "rep": [[j, i, w], ...]}``. An arc
(j, i, w) means node i picks node j with probability w = p_ij; when the arc
fires, only node i moves.

All graph objects are immutable after construction and safe to share across
threads (the derived arc tables are cached lazily, but the computation is
idempotent, so the benign race is harmless).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidPairError,
    NotRingEdgeError,
    OverlapError,
    SelfLoopError,
    StochasticityError,
)
from .rng import stream_key, uniforms

ROW_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12

ARC_ATT = 0
ARC_REP = 1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SignedGraph:
    """A validated attraction/repulsion partition with derived matrices.

    Attributes
    ----------
    n : number of nodes (>= 3)
    p, p_att, p_rep : selection matrix and its partition, p = p_att + p_rep
    d_att, d_rep : diagonal row-sum matrices of the partition
    l_att, l_rep : weighted Laplacians (d - p) of each subgraph
    att_arc_count : number of ordered attractive arcs
    min_weight, max_weight : smallest / largest positive selection weight
    """

    n: int
    p: np.ndarray
    p_att: np.ndarray
    p_rep: np.ndarray
    d_att: np.ndarray
    d_rep: np.ndarray
    l_att: np.ndarray
    l_rep: np.ndarray
    att_arc_count: int
    min_weight: float
    max_weight: float
    # 0-based internal arc arrays, attraction first, in input order
    att_src: np.ndarray
    att_dst: np.ndarray
    att_w: np.ndarray
    rep_src: np.ndarray
    rep_dst: np.ndarray
    rep_w: np.ndarray

    @property
    def att_arcs(self) -> list[tuple[int, int, float]]:
        """Attractive arcs as 1-based (source j, target i, weight) tuples."""
        return [(int(j) + 1, int(i) + 1, float(w))
                for j, i, w in zip(self.att_src, self.att_dst, self.att_w)]

    @property
    def rep_arcs(self) -> list[tuple[int, int, float]]:
        """Repulsive arcs as 1-based (source j, target i, weight) tuples."""
        return [(int(j) + 1, int(i) + 1, float(w))
                for j, i, w in zip(self.rep_src, self.rep_dst, self.rep_w)]

    @property
    def laplacian(self) -> np.ndarray:
        """Laplacian of the unpartitioned selection matrix, l_att + l_rep."""
        return self.l_att + self.l_rep

    @cached_property
    def _arc_tables(self):
        """CSR-style sampling tables keyed by the updating node.

        Returns (row_ptr, nbr, cumw, kinds): for node i, its out-arcs live at
        positions row_ptr[i]..row_ptr[i+1]-1 in stored order (attractive
        arcs in input order, then repulsive), with cumulative weights for
        inverse-CDF sampling.
        """
        n = self.n
        src = np.concatenate([self.att_src, self.rep_src])
        dst = np.concatenate([self.att_dst, self.rep_dst])
        w = np.concatenate([self.att_w, self.rep_w])
        kind = np.concatenate([
            np.zeros(len(self.att_src), dtype=np.int64),
            np.ones(len(self.rep_src), dtype=np.int64),
        ])
        order = np.argsort(dst, kind="stable")
        dst_s = dst[order]
        counts = np.bincount(dst_s, minlength=n)
        row_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=row_ptr[1:])
        nbr = src[order].astype(np.int64)
        kinds = kind[order]
        cumw = np.empty(len(w))
        ws = w[order]
        for i in range(n):
            a0, a1 = row_ptr[i], row_ptr[i + 1]
            cumw[a0:a1] = np.cumsum(ws[a0:a1])
        return (_readonly(row_ptr), _readonly(nbr), _readonly(cumw),
                _readonly(kinds))

    def arc_kind(self, j: int, i: int) -> int:
        """Kind of the 1-based arc (j, i): ARC_ATT, ARC_REP, or -1 if absent."""
        if self.p_att[i - 1, j - 1] > 0.0:
            return ARC_ATT
        if self.p_rep[i - 1, j - 1] > 0.0:
            return ARC_REP
        return -1


@dataclass(frozen=True)
class ConnectivityReport:
    """Reachability facts about the attraction and repulsion subgraphs."""

    att_has_rooted_spanning_tree: bool
    att_strongly_connected: bool
    rep_weakly_connected: bool
    rep_nonempty: bool
    bidirectional: bool


def _validate_arcs(n, arcs, label):
    if len(arcs) == 0:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
                np.empty(0))
    src = np.asarray([a[0] for a in arcs], dtype=np.int64)
    dst = np.asarray([a[1] for a in arcs], dtype=np.int64)
    w = np.asarray([a[2] for a in arcs], dtype=float)
    if np.any(src < 1) or np.any(src > n) or np.any(dst < 1) or np.any(dst > n):
        raise ValueError(f"{label} arc references a node outside 1..{n}")
    if np.any(src == dst):
        raise SelfLoopError(f"{label} arc set contains a self-loop")
    if not np.all(w > 0.0):
        raise ValueError(f"{label} arc weights must be positive")
    keys = (src - 1) * n + (dst - 1)
    if len(np.unique(keys)) != len(keys):
        raise ValueError(f"duplicate arc in the {label} set")
    return src - 1, dst - 1, w


def _from_arrays(n, att_src, att_dst, att_w, rep_src, rep_dst, rep_w):
    att_keys = att_src * n + att_dst
    rep_keys = rep_src * n + rep_dst
    if len(np.intersect1d(att_keys, rep_keys)) > 0:
        raise OverlapError("an arc appears in both the attractive and repulsive sets")

    p_att = np.zeros((n, n))
    p_att[att_dst, att_src] = att_w
    p_rep = np.zeros((n, n))
    p_rep[rep_dst, rep_src] = rep_w
    p = p_att + p_rep

    row_sums = p.sum(axis=1)
    bad = np.abs(row_sums - 1.0) > ROW_SUM_TOL
    if np.any(bad):
        node = int(np.argmax(bad)) + 1
        raise StochasticityError(
            f"row {node} of the selection matrix sums to {row_sums[node - 1]!r}, not 1"
        )

    d_att = np.diag(p_att.sum(axis=1))
    d_rep = np.diag(p_rep.sum(axis=1))
    l_att = d_att - p_att
    l_rep = d_rep - p_rep
    weights = np.concatenate([att_w, rep_w])
    return SignedGraph(
        n=n,
        p=_readonly(p),
        p_att=_readonly(p_att),
        p_rep=_readonly(p_rep),
        d_att=_readonly(d_att),
        d_rep=_readonly(d_rep),
        l_att=_readonly(l_att),
        l_rep=_readonly(l_rep),
        att_arc_count=int(len(att_w)),
        min_weight=float(weights.min()),
        max_weight=float(weights.max()),
        att_src=_readonly(att_src.astype(np.int64)),
        att_dst=_readonly(att_dst.astype(np.int64)),
        att_w=_readonly(att_w.astype(float)),
        rep_src=_readonly(rep_src.astype(np.int64)),
        rep_dst=_readonly(rep_dst.astype(np.int64)),
        rep_w=_readonly(rep_w.astype(float)),
    )


def build_partition(n: int,
                    att_arcs: Iterable[tuple[int, int, float]],
                    rep_arcs: Iterable[tuple[int, int, float]]) -> SignedGraph:
    """Build and validate a signed graph from explicit weighted arc lists.

    Arcs are 1-based (source j, target i, weight p_ij) tuples; the combined
    weights of every node's out-arcs must sum to 1 within 1e-12.

    Raises SelfLoopError, OverlapError, or StochasticityError on the
    corresponding contract violations.
    """
    if int(n) < 3:
        raise ValueError("a signed graph needs at least 3 nodes")
    n = int(n)
    att = _validate_arcs(n, list(att_arcs), "attractive")
    rep = _validate_arcs(n, list(rep_arcs), "repulsive")
    return _from_arrays(n, att[0], att[1], att[2], rep[0], rep[1], rep[2])


def _normalize_pairs(n, pairs, allow_sort=True):
    seen = set()
    out = []
    for pair in pairs:
        try:
            a, b = pair
        except (TypeError, ValueError):
            raise InvalidPairError(f"not a node pair: {pair!r}")
        a, b = int(a), int(b)
        if a == b:
            raise InvalidPairError(f"self pair {{{a},{b}}} is not allowed")
        if not (1 <= a <= n and 1 <= b <= n):
            raise InvalidPairError(f"pair {{{a},{b}}} references a node outside 1..{n}")
        key = (min(a, b), max(a, b)) if allow_sort else (a, b)
        if key in seen:
            raise InvalidPairError(f"duplicate pair {{{a},{b}}}")
        seen.add(key)
        out.append(key)
    return out


def complete_uniform(n: int, rep_pairs: Iterable = ()) -> SignedGraph:
    """Uniform complete graph, p_ij = 1/(n-1), with the listed unordered
    pairs repulsive in both directions and everything else attractive."""
    if int(n) < 3:
        raise ValueError("a signed graph needs at least 3 nodes")
    n = int(n)
    pairs = _normalize_pairs(n, rep_pairs)
    rep_set = set(pairs)
    w = 1.0 / (n - 1)
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    mask = ii != jj
    src_all = jj[mask].ravel()
    dst_all = ii[mask].ravel()
    lo = np.minimum(src_all, dst_all) + 1
    hi = np.maximum(src_all, dst_all) + 1
    is_rep = np.fromiter(((int(a), int(b)) in rep_set for a, b in zip(lo, hi)),
                         dtype=bool, count=len(lo))
    weights = np.full(len(src_all), w)
    return _from_arrays(
        n,
        src_all[~is_rep], dst_all[~is_rep], weights[~is_rep],
        src_all[is_rep], dst_all[is_rep], weights[is_rep],
    )


def ring_uniform(n: int, rep_pairs: Iterable = ()) -> SignedGraph:
    """Ring graph with both selection weights equal to 1/2; the listed pairs
    must be ring edges and become repulsive in both directions."""
    if int(n) < 3:
        raise ValueError("a signed graph needs at least 3 nodes")
    n = int(n)
    ring_edges = {(i, i + 1) for i in range(1, n)} | {(1, n)}
    pairs = _normalize_pairs(n, rep_pairs)
    for a, b in pairs:
        if (a, b) not in ring_edges:
            raise NotRingEdgeError(f"{{{a},{b}}} is not an edge of the {n}-ring")
    rep_set = set(pairs)
    att, rep = [], []
    for a, b in sorted(ring_edges):
        target = rep if (a, b) in rep_set else att
        target.append((a, b, 0.5))
        target.append((b, a, 0.5))
    return build_partition(n, att, rep)


def er_repulsive(n: int, p: float, seed: int) -> SignedGraph:
    """Uniform complete graph whose unordered pairs turn repulsive
    independently with probability p; bit-reproducible for a given seed."""
    if int(n) < 3:
        raise ValueError("a signed graph needs at least 3 nodes")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    n = int(n)
    iu, ju = np.triu_indices(n, k=1)
    key = stream_key(seed, 0)
    u = uniforms(key, 0, len(iu))
    rep_mask_pairs = u < p

    w = 1.0 / (n - 1)
    # both ordered arcs per unordered pair
    src = np.concatenate([iu, ju])
    dst = np.concatenate([ju, iu])
    is_rep = np.concatenate([rep_mask_pairs, rep_mask_pairs])
    weights = np.full(len(src), w)
    return _from_arrays(
        n,
        src[~is_rep], dst[~is_rep], weights[~is_rep],
        src[is_rep], dst[is_rep], weights[is_rep],
    )


def _successors(n, src, dst):
    adj = [[] for _ in range(n)]
    for j, i in zip(src, dst):
        adj[int(j)].append(int(i))
    return adj


def _reach(adj, start, n):
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def _has_root(adj, n):
    # classic mother-vertex scan: the last DFS start that discovers new
    # ground is the only candidate root; verify it reaches everything.
    seen = np.zeros(n, dtype=bool)
    candidate = 0
    for s in range(n):
        if not seen[s]:
            seen |= _reach(adj, s, n)
            candidate = s
    return bool(_reach(adj, candidate, n).all())


def connectivity(g: SignedGraph) -> ConnectivityReport:
    """Reachability report supporting the threshold and simulator hypotheses."""
    n = g.n
    adj_att = _successors(n, g.att_src, g.att_dst)
    adj_att_rev = _successors(n, g.att_dst, g.att_src)
    strongly = bool(_reach(adj_att, 0, n).all()
                    and _reach(adj_att_rev, 0, n).all())
    rooted = True if strongly else _has_root(adj_att, n)

    rep_nonempty = len(g.rep_src) > 0
    adj_rep = _successors(n, np.concatenate([g.rep_src, g.rep_dst]),
                          np.concatenate([g.rep_dst, g.rep_src]))
    weakly = bool(_reach(adj_rep, 0, n).all()) if rep_nonempty else False

    def _sym(m):
        return float(np.abs(m - m.T).sum(axis=1).max()) <= SYMMETRY_TOL

    return ConnectivityReport(
        att_has_rooted_spanning_tree=rooted,
        att_strongly_connected=strongly,
        rep_weakly_connected=weakly,
        rep_nonempty=rep_nonempty,
        bidirectional=_sym(g.p_att) and _sym(g.p_rep),
    )


def graph_to_dict(g: SignedGraph) -> dict:
    """JSON-ready dict in the 1-based {n, att, rep} file schema."""
    return {
        "n": g.n,
        "att": [[j, i, w] for j, i, w in g.att_arcs],
        "rep": [[j, i, w] for j, i, w in g.rep_arcs],
    }


def graph_from_dict(obj: dict) -> SignedGraph:
    """Inverse of graph_to_dict, with full validation."""
    try:
        n = obj["n"]
        att = [(a[0], a[1], a[2]) for a in obj.get("att", [])]
        rep = [(a[0], a[1], a[2]) for a in obj.get("rep", [])]
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed graph object: {exc}") from exc
    return build_partition(n, att, rep)


def save_graph(g: SignedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_graph(path) -> SignedGraph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_dict(json.load(fh))
