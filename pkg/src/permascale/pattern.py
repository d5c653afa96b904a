"""Zero-pattern structure of nonnegative square matrices.

Positive diagonals are perfect matchings of the bipartite support graph
(rows on one side, columns on the other).  Everything here is exact: an
entry is part of the support iff it is not exactly ``0.0``.

Row and column indices are 0-based throughout.
"""
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._matrix import as_nonneg_matrix
from .errors import DimensionError

_INF = float("inf")


@dataclass(frozen=True)
class PatternReport:
    has_positive_diagonal: bool
    pi_support: np.ndarray
    in_Pn: bool
    blocks: list = field(default_factory=list)
    fk_witness: tuple | None = None


def _adjacency(mask):
    return [np.flatnonzero(row).tolist() for row in mask]


def _hopcroft_karp(adj, n_cols):
    """Maximum matching; returns (row -> col or -1, col -> row or -1)."""
    n_rows = len(adj)
    match_row = [-1] * n_rows
    match_col = [-1] * n_cols
    dist = [0.0] * n_rows

    def bfs():
        queue = deque()
        for u in range(n_rows):
            if match_row[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_col[v]
                if w < 0:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root):
        # Iterative layered DFS; the path is committed only on success.
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_col[v]
                if w < 0:
                    path.append((u, v))
                    for pu, pv in path:
                        match_row[pu] = pv
                        match_col[pv] = pu
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_rows):
            if match_row[u] < 0:
                dfs(u)
    return match_row, match_col


def max_bipartite_matching(support):
    """Perfect matching of a square boolean mask, or ``None``.

    Uses Hopcroft–Karp, O(E sqrt(V)).  The result maps row ``i`` to
    column ``result[i]``.
    """
    mask = np.asarray(support, dtype=bool)
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        raise DimensionError(f"expected a square mask, got shape {mask.shape}")
    match_row, _ = _hopcroft_karp(_adjacency(mask), mask.shape[1])
    if any(c < 0 for c in match_row):
        return None
    return match_row


def _konig_witness(mask, adj, match_row, match_col):
    n = mask.shape[0]
    # Alternating reachability from free rows: rows -> columns by any
    # edge, columns -> rows by matched edges.
    seen_rows = [match_row[u] < 0 for u in range(n)]
    seen_cols = [False] * n
    queue = deque(u for u in range(n) if seen_rows[u])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen_cols[v]:
                seen_cols[v] = True
                w = match_col[v]
                if w >= 0 and not seen_rows[w]:
                    seen_rows[w] = True
                    queue.append(w)
    rows = [u for u in range(n) if seen_rows[u]]
    cols = [v for v in range(n) if not seen_cols[v]]
    # |rows| + |cols| = 2n - (matching size) >= n + 1; trim rows, which
    # keeps the submatrix zero.
    excess = len(rows) + len(cols) - (n + 1)
    if excess > 0:
        rows = rows[: len(rows) - excess]
    return frozenset(rows), frozenset(cols)


def _analyze(A):
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    mask = M != 0.0
    adj = _adjacency(mask)
    match_row, match_col = _hopcroft_karp(adj, n)
    if any(c < 0 for c in match_row):
        witness = _konig_witness(mask, adj, match_row, match_col)
        empty = np.zeros_like(mask)
        return M, PatternReport(False, empty, False, [], witness)

    rows_i, cols_j = np.nonzero(mask)
    owners = np.asarray(match_col)[cols_j]
    graph = csr_matrix((np.ones(len(rows_i)), (rows_i, owners)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")

    pi_support = np.zeros_like(mask)
    keep = labels[rows_i] == labels[owners]
    pi_support[rows_i[keep], cols_j[keep]] = True

    groups = {}
    for i in range(n):
        groups.setdefault(labels[i], []).append(i)
    blocks = []
    for rows in sorted(groups.values(), key=lambda r: r[0]):
        cols = sorted(match_row[i] for i in rows)
        blocks.append((tuple(rows), tuple(cols)))
    in_pn = bool(np.array_equal(pi_support, mask))
    return M, PatternReport(True, pi_support, in_pn, blocks, None)


def pi_projection(A):
    """Zero every entry lying on no positive diagonal.

    An edge of the support lies on some perfect matching iff it is matched
    or closes an alternating cycle, i.e. its endpoints share a strongly
    connected component of the digraph ``row i -> row owning column j``.

    Returns ``(Pi(A), report)``; ``Pi(A)`` is the zero matrix when the
    permanent vanishes.
    """
    M, report = _analyze(A)
    return np.where(report.pi_support, M, 0.0), report


def decompose_fully_indecomposable(A):
    """Partition the support of Pi(A) into fully indecomposable blocks.

    Blocks are ``(rows, cols)`` tuples of equal length, ordered by their
    smallest row.  ``in_Pn`` is true iff Pi leaves the support unchanged.
    """
    return _analyze(A)[1]


def frobenius_konig_witness(A):
    """Return ``(R, C)`` with ``|R| + |C| = n + 1`` and ``A[R, C] == 0``,
    or ``None`` if ``A`` has a positive diagonal."""
    return _analyze(A)[1].fk_witness


def has_positive_diagonal(A):
    return max_bipartite_matching(as_nonneg_matrix(A) != 0.0) is not None
