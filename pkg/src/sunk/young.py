"""Partition labels of the level-truncated fusion rings.

Simple objects are Young diagrams fitting in an (N-1) x k box: at most
N-1 rows, every row at most k columns.  The empty diagram is the unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import ConsistencyError, ParameterError


@dataclass(frozen=True, order=True)
class YoungDiagram:
    """Weakly decreasing row lengths, trailing zeros stripped."""

    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(self.rows)
        while rows and rows[-1] == 0:
            rows = rows[:-1]
        if any(r <= 0 for r in rows):
            raise ParameterError(f"row lengths must be positive: {self.rows}")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ParameterError(f"rows must weakly decrease: {self.rows}")
        object.__setattr__(self, "rows", rows)

    @property
    def boxes(self) -> int:
        return sum(self.rows)

    def padded(self, length: int) -> list[int]:
        return list(self.rows) + [0] * (length - len(self.rows))

    def is_label(self, N: int, k: int) -> bool:
        return len(self.rows) <= N - 1 and (not self.rows or self.rows[0] <= k)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.rows)) + "]"


def _check_params(N: int, k: int) -> None:
    if N < 2 or k < 1:
        raise ParameterError(f"need N >= 2 and k >= 1, got N={N}, k={k}")


def _check_label(lam: YoungDiagram, N: int, k: int) -> None:
    if not lam.is_label(N, k):
        raise ParameterError(f"{lam} does not fit in a {N - 1}x{k} box")


def rank(N: int, k: int) -> int:
    """Number of partitions fitting in an (N-1) x k box."""
    _check_params(N, k)
    return comb(N + k - 1, N - 1)


def enumerate_labels(N: int, k: int) -> list[YoungDiagram]:
    """All labels, ordered by box count then lexicographically."""
    _check_params(N, k)
    out: list[YoungDiagram] = []

    def rec(prefix: list[int], cap: int, remaining_rows: int) -> None:
        out.append(YoungDiagram(tuple(prefix)))
        if remaining_rows == 0:
            return
        for v in range(1, cap + 1):
            rec(prefix + [v], v, remaining_rows - 1)

    rec([], k, N - 1)
    out.sort(key=lambda d: (d.boxes, d.rows))
    if len(out) != rank(N, k):  # pragma: no cover
        raise ConsistencyError(f"label count {len(out)} != rank({N},{k})")
    return out


def grade(lam: YoungDiagram, N: int) -> int:
    """Box count mod N; grades add under fusion."""
    return lam.boxes % N


def fuse_generator(mu: YoungDiagram, N: int, k: int) -> list[YoungDiagram]:
    """Decomposition of (generator) x mu, each child with multiplicity one.

    A box is added to any row keeping a valid diagram; when mu already has
    N-1 nonzero rows, the addition that would start row N instead deletes
    the first column.  Children wider than k columns are discarded.
    """
    _check_params(N, k)
    _check_label(mu, N, k)
    m = mu.padded(N - 1)
    children = []
    for i in range(N - 1):
        if i == 0 or m[i] < m[i - 1]:
            child = m.copy()
            child[i] += 1
            if child[0] <= k:
                children.append(YoungDiagram(tuple(child)))
    if m[N - 2] >= 1:
        children.append(YoungDiagram(tuple(v - 1 for v in m)))
    children.sort(key=lambda d: (d.boxes, d.rows))
    return children


def rectangle(i: int, N: int, k: int) -> YoungDiagram:
    """The i x k rectangle, 0 <= i <= N-1."""
    return YoungDiagram((k,) * i)


def rotate_label(lam: YoungDiagram, N: int, k: int) -> YoungDiagram:
    """Candidate image of lam under fusion with the 1 x k rectangle.

    Cyclic shift of the extended weight string; certified against the
    fusion rules in fusion_ring.pointed_action before any use.
    """
    m = lam.padded(N - 1)
    last = m[N - 2]
    return YoungDiagram(tuple([k - last] + [m[j] - last for j in range(N - 2)]))


def complement_label(lam: YoungDiagram, N: int) -> YoungDiagram:
    """Complement in the width-m1 strip; candidate dual label."""
    if not lam.rows:
        return lam
    m = lam.padded(N - 1) + [0]
    first = m[0]
    return YoungDiagram(tuple(first - m[N - 1 - i] for i in range(N - 1)))
