"""Reading graph files and turning raw adjacency data into test input."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, ParseError, UnsupportedFormat
from .spectra import SymMatrix

COMMENT_PREFIXES = ("#", "%")


@dataclass(frozen=True, eq=False)
class EdgeList:
    """Edges as an ``(E, 2)`` integer array in the file's own index base."""

    edges: np.ndarray
    n: int
    directed: bool = True
    indexing_base: int = 1

    def __post_init__(self):
        e = self.edges
        if e.ndim != 2 or e.shape[1] != 2:
            raise InvalidArgument(f"edges must have shape (E, 2), got {e.shape}")
        if e.size and (e.min() < self.indexing_base or e.max() >= self.indexing_base + self.n):
            raise InvalidArgument(f"edge indices must lie in [{self.indexing_base}, {self.indexing_base + self.n})")

    def to_dense(self) -> np.ndarray:
        """Binary ``n x n`` adjacency; duplicate edges collapse to one."""
        a = np.zeros((self.n, self.n))
        if self.edges.size:
            src = self.edges[:, 0] - self.indexing_base
            dst = self.edges[:, 1] - self.indexing_base
            a[src, dst] = 1.0
            if not self.directed:
                a[dst, src] = 1.0
        return a

    def to_symmatrix(self) -> SymMatrix:
        """Undirected adjacency; for directed lists the edge directions are dropped."""
        a = self.to_dense()
        if self.directed:
            a = np.maximum(a, a.T)
        return SymMatrix(a)

    def unique_edges(self) -> set[tuple[int, int]]:
        pairs = map(tuple, self.edges.tolist())
        if self.directed:
            return set(pairs)
        return {(min(i, j), max(i, j)) for i, j in pairs}


def read_edgelist(path, base: int = 1, directed: bool = True, n: int | None = None) -> EdgeList:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` and blank lines are skipped.  Extra
    columns after the first two (weights, timestamps) are ignored.  ``n`` is
    inferred from the largest index when not given.
    """
    if base not in (0, 1):
        raise InvalidArgument(f"index base must be 0 or 1, got {base}")
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith(COMMENT_PREFIXES):
                continue
            tok = s.split()
            if len(tok) < 2:
                raise ParseError(f"expected two node indices, got {s!r}", lineno)
            try:
                i, j = int(tok[0]), int(tok[1])
            except ValueError:
                raise ParseError(f"non-integer node index in {s!r}", lineno) from None
            if i < base or j < base:
                raise ParseError(f"node index below base {base} in {s!r}", lineno)
            edges.append((i, j))
    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    inferred = int(arr.max()) - base + 1 if arr.size else 0
    if n is None:
        n = inferred
    elif n < inferred:
        raise ParseError(f"declared n={n} but an edge references node {inferred - 1 + base}")
    return EdgeList(arr, int(n), directed, base)


def write_edgelist(edges: EdgeList, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={edges.n} base={edges.indexing_base} directed={edges.directed}\n")
        for i, j in edges.edges.tolist():
            fh.write(f"{i} {j}\n")


def read_matrix_market(path):
    """Read a coordinate-format Matrix Market file.

    Symmetric files come back as :class:`SymMatrix`; general files as a
    directed :class:`EdgeList` (nonzero entries become edges).  Pattern,
    integer and real fields are accepted.
    """
    with open(path, encoding="utf-8") as fh:
        lines = iter(enumerate(fh, start=1))
        try:
            lineno, header = next(lines)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        tok = header.strip().split()
        if len(tok) != 5 or tok[0].lower() != "%%matrixmarket" or tok[1].lower() != "matrix":
            raise UnsupportedFormat(f"not a Matrix Market matrix header: {header.strip()!r}", lineno)
        fmt, field, symmetry = (t.lower() for t in tok[2:])
        if fmt != "coordinate":
            raise UnsupportedFormat(f"only coordinate format is supported, got {fmt!r}", lineno)
        if field not in ("pattern", "integer", "real"):
            raise UnsupportedFormat(f"unsupported field {field!r}", lineno)
        if symmetry not in ("symmetric", "general"):
            raise UnsupportedFormat(f"unsupported symmetry {symmetry!r}", lineno)

        size = None
        entries = []
        for lineno, line in lines:
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            tok = s.split()
            try:
                if size is None:
                    if len(tok) != 3:
                        raise ValueError
                    size = tuple(int(t) for t in tok)
                    continue
                want = 2 if field == "pattern" else 3
                if len(tok) != want:
                    raise ValueError
                i, j = int(tok[0]), int(tok[1])
                v = 1.0 if field == "pattern" else float(tok[2])
            except ValueError:
                raise ParseError(f"malformed line {s!r}", lineno) from None
            if not (1 <= i <= size[0] and 1 <= j <= size[1]):
                raise ParseError(f"entry ({i}, {j}) outside a {size[0]}x{size[1]} matrix", lineno)
            entries.append((i, j, v))
    if size is None:
        raise ParseError("missing size line")
    nrow, ncol, nnz = size
    if len(entries) != nnz:
        raise ParseError(f"header declares {nnz} entries, found {len(entries)}")

    if symmetry == "symmetric":
        if nrow != ncol:
            raise ParseError(f"symmetric matrix must be square, got {nrow}x{ncol}")
        a = np.zeros((nrow, nrow))
        for i, j, v in entries:
            a[i - 1, j - 1] = v
            a[j - 1, i - 1] = v
        return SymMatrix(a)
    n = max(nrow, ncol)
    kept = [(i, j) for i, j, v in entries if v != 0]
    return EdgeList(np.array(kept, dtype=np.int64).reshape(-1, 2), n, directed=True, indexing_base=1)


def _dense(X) -> np.ndarray:
    if isinstance(X, EdgeList):
        return X.to_dense()
    return np.asarray(X, dtype=float)


def symmetrize_sum(X) -> SymMatrix:
    """``X + X^T``; binary directed input yields entries in {0, 1, 2}."""
    a = _dense(X)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgument(f"symmetrize_sum needs a square matrix, got shape {a.shape}")
    return SymMatrix(a + a.T)


def bipartite_double(X) -> SymMatrix:
    """``[[0, X], [X^T, 0]]`` of size ``n + p``.

    The rank of the mean doubles, so a rank estimated on the output must be
    halved to describe ``X``.
    """
    a = _dense(X)
    if a.ndim != 2:
        raise InvalidArgument(f"bipartite_double needs a 2-d matrix, got shape {a.shape}")
    n, p = a.shape
    out = np.zeros((n + p, n + p))
    out[:n, n:] = a
    out[n:, :n] = a.T
    return SymMatrix(out, has_selfloops=False)


def strip_selfloops(X: SymMatrix) -> SymMatrix:
    a = np.array(X, dtype=float)
    np.fill_diagonal(a, 0.0)
    return SymMatrix(a, has_selfloops=False)


def connected_components(a: np.ndarray) -> list[list[int]]:
    """Components of the graph with edges where ``a[i, j] != 0`` (``i != j``).

    Breadth-first search from nodes in increasing index order, so components
    are listed by their smallest member.
    """
    n = a.shape[0]
    nz = a != 0
    np.fill_diagonal(nz, False)
    nbrs = [np.flatnonzero(row) for row in nz]
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(int(v))
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def largest_connected_component(X) -> tuple[SymMatrix, dict[int, int]]:
    """Induced submatrix on the largest component and the old-to-new index map.

    An :class:`EdgeList` is made undirected first.  Ties on size go to the
    component holding the smallest original index.
    """
    if isinstance(X, EdgeList):
        if X.n == 0:
            raise InvalidArgument("graph is empty")
        X = X.to_symmatrix()
    a = np.asarray(X, dtype=float)
    if a.size == 0:
        raise InvalidArgument("graph is empty")
    if not np.array_equal(a, a.T):
        raise InvalidArgument("largest_connected_component needs a symmetric matrix")
    comps = connected_components(a)
    best = max(comps, key=len)  # first maximal one, i.e. smallest index
    idx = np.array(best)
    sub = a[np.ix_(idx, idx)]
    flag = X.has_selfloops if isinstance(X, SymMatrix) else None
    return SymMatrix(sub, has_selfloops=flag), {int(o): k for k, o in enumerate(best)}
