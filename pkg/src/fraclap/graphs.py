"""Graph container, edge-list loading, and Laplacian construction.

Graphs are loop-free weighted digraphs; undirected graphs are stored as
symmetric arc pairs.  All matrices are dense numpy arrays wrapped in
:class:`DenseOperator` together with construction metadata.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse import csgraph

from .errors import GraphFormatError

__all__ = [
    "Graph",
    "DenseOperator",
    "LaplacianKind",
    "load_edge_list",
    "largest_connected_component",
    "degree_vectors",
    "build_laplacian",
    "build_incidence",
]


@dataclass(frozen=True)
class Graph:
    """Weighted loop-free graph with contiguous 0-based node ids.

    ``edges`` holds arcs ``(src, dst, weight)``.  For undirected graphs
    every edge is stored as two arcs with equal weight.
    """

    n: int
    directed: bool
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphFormatError("graph needs at least one node")
        seen = set()
        arcs = {}
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"arc ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise GraphFormatError(f"self-loop at node {u}")
            if not (np.isfinite(w) and w > 0):
                raise GraphFormatError(f"arc ({u}, {v}) has nonpositive weight {w}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
            arcs[(u, v)] = w
        if not self.directed:
            for (u, v), w in arcs.items():
                if arcs.get((v, u)) != w:
                    raise GraphFormatError(
                        f"undirected graph needs symmetric arcs; ({u}, {v}) unmatched"
                    )

    @property
    def arc_count(self) -> int:
        return len(self.edges)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        W = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            W[u, v] = w
        return W

    def undirected_edges(self) -> list[tuple[int, int, float]]:
        """One arc per undirected edge, with src < dst."""
        if self.directed:
            raise GraphFormatError("undirected_edges requires an undirected graph")
        return [(u, v, w) for u, v, w in self.edges if u < v]


class LaplacianKind(enum.Enum):
    COMBINATORIAL = "undirected"
    RANDOM_WALK = "random-walk"
    SYMMETRIC_NORMALIZED = "symmetric-normalized"
    DIRECTED_OUT = "directed-out"
    DIRECTED_IN = "directed-in"
    DIRECTED_OUT_NORMALIZED = "directed-out-normalized"

    @classmethod
    def from_name(cls, name: str) -> "LaplacianKind":
        for kind in cls:
            if kind.value == name:
                return kind
        names = ", ".join(k.value for k in cls)
        raise ValueError(f"unknown Laplacian kind {name!r}; choose one of: {names}")


_UNDIRECTED_KINDS = (
    LaplacianKind.COMBINATORIAL,
    LaplacianKind.RANDOM_WALK,
    LaplacianKind.SYMMETRIC_NORMALIZED,
)


@dataclass(frozen=True)
class DenseOperator:
    """Dense matrix plus construction metadata.

    ``matrix`` is usually square (n x n); the incidence builder returns the
    rectangular n x m case.
    """

    matrix: np.ndarray
    kind: LaplacianKind | None = None
    alpha: float | None = None
    method: str = ""
    fixup: bool = False

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.ndim != 2:
            raise ValueError("DenseOperator needs a 2-d matrix")
        if not np.all(np.isfinite(M)):
            raise ValueError("DenseOperator entries must be finite")
        object.__setattr__(self, "matrix", M)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def load_edge_list(path, *, one_based=False, force_undirected=False,
                   return_mapping=False):
    """Read a whitespace-separated edge list.

    Each non-comment line is ``src dst [weight]`` (weight defaults to 1.0).
    Node ids may be arbitrary nonnegative integers and are remapped to
    contiguous 0-based indices in sorted order; the mapping is returned when
    ``return_mapping`` is set.  With ``force_undirected`` the symmetric
    closure is stored; a reverse arc listed explicitly must carry the same
    weight.
    """
    arcs: dict[tuple[int, int], tuple[float, int]] = {}
    least = 1 if one_based else 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 'src dst [weight]', got {len(parts)} fields"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer node id") from None
            if u < least or v < least:
                raise GraphFormatError(
                    f"{path}:{lineno}: node id below {least} "
                    f"({'one' if one_based else 'zero'}-based input)"
                )
            if u == v:
                raise GraphFormatError(f"{path}:{lineno}: self-loop at node {u}")
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise GraphFormatError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
                if not (np.isfinite(w) and w > 0):
                    raise GraphFormatError(f"{path}:{lineno}: weight must be positive and finite")
            else:
                w = 1.0
            if (u, v) in arcs:
                raise GraphFormatError(
                    f"{path}:{lineno}: duplicate edge ({u}, {v}), "
                    f"first seen on line {arcs[(u, v)][1]}"
                )
            arcs[(u, v)] = (w, lineno)
    if not arcs:
        raise GraphFormatError(f"{path}: no edges found")

    labels = sorted({u for u, _ in arcs} | {v for _, v in arcs})
    index = {orig: k for k, orig in enumerate(labels)}

    if force_undirected:
        pairs: dict[tuple[int, int], tuple[float, int]] = {}
        for (u, v), (w, lineno) in arcs.items():
            key = (min(u, v), max(u, v))
            if key in pairs:
                if pairs[key][0] != w:
                    raise GraphFormatError(
                        f"{path}:{lineno}: asymmetric weights for edge {key}, "
                        f"{pairs[key][0]} vs {w} (line {pairs[key][1]})"
                    )
                continue
            pairs[key] = (w, lineno)
        edges = []
        for (u, v), (w, _) in sorted(pairs.items()):
            edges.append((index[u], index[v], w))
            edges.append((index[v], index[u], w))
        g = Graph(n=len(labels), directed=False, edges=tuple(edges))
    else:
        edges = tuple(
            (index[u], index[v], w) for (u, v), (w, _) in sorted(arcs.items())
        )
        g = Graph(n=len(labels), directed=True, edges=edges)

    if return_mapping:
        return g, index
    return g


def largest_connected_component(g: Graph, *, strong=False, return_nodes=False):
    """Induced subgraph on the largest component, relabeled 0..k-1.

    Digraphs use weak connectivity unless ``strong`` is set.  Ties between
    equally sized components break toward the one containing the smallest
    original node id; relabeling preserves the order of the kept ids.
    """
    rows = [u for u, v, w in g.edges]
    cols = [v for u, v, w in g.edges]
    pattern = csr_array(
        (np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n)
    )
    ncomp, labels = csgraph.connected_components(
        pattern, directed=g.directed,
        connection="strong" if strong else "weak",
    )
    sizes = np.bincount(labels, minlength=ncomp)
    best = max(
        range(ncomp),
        key=lambda c: (sizes[c], -int(np.argmax(labels == c))),
    )
    keep = np.flatnonzero(labels == best)
    pos = {int(orig): k for k, orig in enumerate(keep)}
    edges = tuple(
        (pos[u], pos[v], w) for u, v, w in g.edges if u in pos and v in pos
    )
    sub = Graph(n=len(keep), directed=g.directed, edges=edges)
    if return_nodes:
        return sub, [int(i) for i in keep]
    return sub


def degree_vectors(g: Graph):
    """Return ``(d, d_in, d_out)`` weighted degree vectors.

    For undirected graphs the three coincide.  For digraphs ``d`` is the
    symmetrized total d_in + d_out; directed constructions use the split
    vectors only.
    """
    W = g.weight_matrix
    d_out = W.sum(axis=1)
    d_in = W.sum(axis=0)
    d = d_out if not g.directed else d_in + d_out
    return d, d_in, d_out


def _fix_dangling_rows(W: np.ndarray) -> tuple[np.ndarray, list[int]]:
    # PageRank-style fixup: a zero row becomes the uniform row 1/n.
    n = W.shape[0]
    fixed = [int(i) for i in np.flatnonzero(W.sum(axis=1) == 0)]
    if fixed:
        W = W.copy()
        W[fixed, :] = 1.0 / n
    return W, fixed


def build_laplacian(g: Graph, kind: LaplacianKind, *, dangling_fixup=False) -> DenseOperator:
    """Build the requested Laplacian as a :class:`DenseOperator`.

    Normalized kinds require the relevant degrees to be nonzero; with
    ``dangling_fixup`` a zero out-degree (in-degree) node gets unit degree
    and its weight row (column) replaced by the constant vector 1/n.
    """
    if kind in _UNDIRECTED_KINDS and g.directed:
        raise ValueError(f"kind {kind.value!r} requires an undirected graph")
    n = g.n
    W = g.weight_matrix
    fixed: list[int] = []

    if kind is LaplacianKind.COMBINATORIAL:
        L = np.diag(W.sum(axis=1)) - W
    elif kind in (LaplacianKind.RANDOM_WALK, LaplacianKind.SYMMETRIC_NORMALIZED,
                  LaplacianKind.DIRECTED_OUT, LaplacianKind.DIRECTED_OUT_NORMALIZED):
        if dangling_fixup:
            W, fixed = _fix_dangling_rows(W)
        d = W.sum(axis=1)
        if np.any(d == 0) and kind is not LaplacianKind.DIRECTED_OUT:
            bad = int(np.flatnonzero(d == 0)[0])
            raise ValueError(
                f"node {bad} has zero out-degree; set dangling_fixup or drop it"
            )
        if kind is LaplacianKind.DIRECTED_OUT:
            L = np.diag(d) - W
        elif kind in (LaplacianKind.RANDOM_WALK, LaplacianKind.DIRECTED_OUT_NORMALIZED):
            L = np.eye(n) - W / d[:, None]
        else:
            s = 1.0 / np.sqrt(d)
            L = np.eye(n) - (s[:, None] * W) * s[None, :]
    elif kind is LaplacianKind.DIRECTED_IN:
        if dangling_fixup:
            Wt, fixed = _fix_dangling_rows(W.T)
            W = Wt.T
        L = np.diag(W.sum(axis=0)) - W
    else:
        raise ValueError(f"unhandled kind {kind!r}")

    return DenseOperator(L, kind=kind, method="laplacian", fixup=bool(fixed))


def build_incidence(g: Graph) -> DenseOperator:
    """Weighted incidence matrix B with +sqrt(w) at the source and
    -sqrt(w) at the target of every edge.  For undirected graphs one
    column per edge (orientation src < dst); then B @ B.T equals the
    combinatorial Laplacian."""
    cols = g.undirected_edges() if not g.directed else list(g.edges)
    B = np.zeros((g.n, len(cols)))
    for j, (u, v, w) in enumerate(cols):
        r = np.sqrt(w)
        B[u, j] = r
        B[v, j] = -r
    return DenseOperator(B, method="incidence")
