"""Exact fusion rings of SU(N)_k.

Correctness rests on a rigidity certificate for the generator digraph
(vertices are labels, edges given by the box-adding rule).  Whenever the
only label permutation that commutes with the generator matrix M_X and
fixes the unit is the identity, any permutation that fixes the required
anchors and intertwines M_X equals the corresponding true fusion map.
That certifies the rotation map (fusion with the invertible g) and the
complement map (duality) at the label level, and the matrix assembly
below only combines those two certified permutations with relations
that hold in any commutative based ring.

Note: the Krylov vectors e_unit * M_X^n do not span in general (their
span has a nonzero orthogonal complement already for N=4, k=2), so no
construction may rely on expressing labels as polynomials in M_X alone.

Convention: (N_a)[b][c] is the multiplicity of c in a (x) b, so row b of
N_a expands a (x) b and N_{a(x)b} = N_b N_a as matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ParameterError
from .young import (
    YoungDiagram,
    complement_label,
    enumerate_labels,
    fuse_generator,
    grade,
    rank,
    rectangle,
    rotate_label,
)

JSON_SCHEMA_VERSION = "1"


def _refine_colors(children: list[tuple[int, ...]], unit_index: int) -> list[int]:
    """Iterative refinement of vertex colors on the generator digraph."""
    r = len(children)
    parents: list[list[int]] = [[] for _ in range(r)]
    for b, ch in enumerate(children):
        for c in ch:
            parents[c].append(b)
    colors = [0] * r
    colors[unit_index] = 1
    while True:
        sigs = [
            (colors[i], tuple(sorted(colors[c] for c in children[i])),
             tuple(sorted(colors[p] for p in parents[i])))
            for i in range(r)
        ]
        relabel = {s: j for j, s in enumerate(sorted(set(sigs)))}
        new = [relabel[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def generator_digraph_is_unit_rigid(
    children: list[tuple[int, ...]], unit_index: int
) -> bool:
    """Whether the identity is the only unit-fixing digraph automorphism.

    Color refinement decides almost every case; a backtracking search
    over the residual color classes settles the rest.
    """
    r = len(children)
    colors = _refine_colors(children, unit_index)
    if len(set(colors)) == r:
        return True
    child_sets = [frozenset(ch) for ch in children]
    by_color: dict[int, list[int]] = {}
    for i, c in enumerate(colors):
        by_color.setdefault(c, []).append(i)
    order = sorted(range(r), key=lambda i: (len(by_color[colors[i]]), i))
    found: list[tuple[int, ...]] = []

    def backtrack(pos: int, perm: dict[int, int], used: set[int]) -> bool:
        # returns True once a nontrivial automorphism is known to exist
        if pos == r:
            if any(perm[i] != i for i in range(r)):
                found.append(tuple(perm[i] for i in range(r)))
                return True
            return False
        i = order[pos]
        if i in perm:
            return backtrack(pos + 1, perm, used)
        for j in by_color[colors[i]]:
            if j in used:
                continue
            ok = True
            for x, y in perm.items():
                if (x in child_sets[i]) != (y in child_sets[j]):
                    ok = False
                    break
                if (i in child_sets[x]) != (j in child_sets[y]):
                    ok = False
                    break
            if ok:
                perm[i] = j
                used.add(j)
                if backtrack(pos + 1, perm, used):
                    return True
                used.remove(j)
                del perm[i]
        return False

    nontrivial = backtrack(0, {unit_index: unit_index}, {unit_index})
    return not nontrivial


@dataclass(frozen=True)
class PointedAction:
    """Labels, grades, duals and the certified fusion-by-g permutation.

    rot[i] is the index of g (x) labels[i]; comp[i] the index of the dual.
    Certification: the generator digraph admits no unit-fixing automorphism
    besides the identity (rigidity), rot is a bijection sending the unit to
    g and intertwining the digraph, and comp conjugates the digraph onto
    its reverse.  Those properties are shared by the true fusion-by-g and
    duality permutations, and rigidity makes them unique.
    """

    N: int
    k: int
    labels: tuple[YoungDiagram, ...]
    index: dict
    grades: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    rot: tuple[int, ...]
    comp: tuple[int, ...]
    unit_index: int
    generator_index: int

    @property
    def size(self) -> int:
        return len(self.labels)

    def rot_power(self, idx: int, a: int) -> int:
        """Index of g^a (x) labels[idx]."""
        a %= self.N
        for _ in range(a):
            idx = self.rot[idx]
        return idx


def pointed_action(N: int, k: int) -> PointedAction:
    """Build and certify the label-level action of the invertibles."""
    labels = enumerate_labels(N, k)
    index = {lab: i for i, lab in enumerate(labels)}
    grades = tuple(grade(lab, N) for lab in labels)
    children = tuple(
        tuple(index[c] for c in fuse_generator(lab, N, k)) for lab in labels
    )
    rot = tuple(index[rotate_label(lab, N, k)] for lab in labels)
    comp = tuple(index[complement_label(lab, N)] for lab in labels)
    unit_index = index[YoungDiagram(())]
    gen_index = index[YoungDiagram((1,))]

    r = len(labels)
    if sorted(rot) != list(range(r)):
        raise ConsistencyError("rotation map is not a permutation of the labels")
    if rot[unit_index] != index[rectangle(1, N, k)]:
        raise ConsistencyError("rotation does not send the unit to g")
    for i in range(r):
        if sorted(rot[c] for c in children[i]) != sorted(children[rot[i]]):
            raise ConsistencyError(
                f"rotation does not intertwine the generator rule at {labels[i]}"
            )
    parents: list[list[int]] = [[] for _ in range(r)]
    for b, ch in enumerate(children):
        for c in ch:
            parents[c].append(b)
    for a in range(r):
        if comp[comp[a]] != a:
            raise ConsistencyError("complement is not involutive")
        # dual transposes the generator matrix: b in ch(a*) iff a in ch(b)
        if sorted(children[comp[a]]) != sorted(comp[b] for b in parents[a]):
            raise ConsistencyError("complement does not reverse the digraph")
    if not generator_digraph_is_unit_rigid(list(children), unit_index):
        raise ConsistencyError(
            f"generator digraph of ({N},{k}) is not unit-rigid; "
            "the pointed action cannot be certified"
        )
    return PointedAction(
        N, k, tuple(labels), index, grades, children, rot, comp,
        unit_index, gen_index,
    )


class FusionRing:
    """Based ring with nonnegative-integer structure constants.

    tensor[a, b, c] is the multiplicity of c in a (x) b.  Instances are
    immutable after construction and safe to share between readers.
    """

    def __init__(
        self,
        N: int,
        k: int,
        labels: tuple[YoungDiagram, ...],
        tensor: np.ndarray,
        unit_index: int,
        dual: tuple[int, ...],
        grades: tuple[int, ...],
        generator_index: int | None = None,
        rot: tuple[int, ...] | None = None,
        children: tuple[tuple[int, ...], ...] | None = None,
        subgroup_divisor: int | None = None,
    ):
        self.N = N
        self.k = k
        self.labels = labels
        self.index = {lab: i for i, lab in enumerate(labels)}
        tensor.setflags(write=False)
        self.tensor = tensor
        self.unit_index = unit_index
        self.dual = dual
        self.grades = grades
        self.generator_index = generator_index
        self.rot = rot
        self.children = children
        self.subgroup_divisor = subgroup_divisor

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def is_full(self) -> bool:
        return self.subgroup_divisor is None

    def matrix(self, a: int) -> np.ndarray:
        return self.tensor[a]

    def mult(self, a: int, b: int, c: int) -> int:
        return int(self.tensor[a, b, c])

    def fuse(self, a: int, b: int) -> list[tuple[int, int]]:
        """[(c, multiplicity)] for a (x) b."""
        row = self.tensor[a, b]
        return [(int(c), int(row[c])) for c in np.nonzero(row)[0]]

    def generator_matrix(self) -> np.ndarray:
        if self.generator_index is None:
            raise ParameterError("restricted ring has no generator")
        return self.tensor[self.generator_index]

    def pointed_indices(self) -> list[int]:
        """Labels whose matrix is a permutation matrix."""
        out = []
        for a in range(self.size):
            m = self.tensor[a]
            if (
                m.max(initial=0) == 1
                and (m.sum(axis=0) == 1).all()
                and (m.sum(axis=1) == 1).all()
            ):
                out.append(a)
        return out

    def rot_power(self, idx: int, a: int) -> int:
        if self.rot is None:
            raise ParameterError("restricted ring carries no pointed action")
        a %= self.N
        for _ in range(a):
            idx = self.rot[idx]
        return idx

    def graded_subring(self, divisor: int) -> FusionRing:
        """Restriction to the labels whose grade lies in divisor * Z_N."""
        if divisor < 1 or self.N % divisor:
            raise ParameterError(f"{divisor} does not divide N={self.N}")
        keep = [i for i in range(self.size) if self.grades[i] % divisor == 0]
        keep_set = set(keep)
        for a in keep:
            for b in keep:
                for c in np.nonzero(self.tensor[a, b])[0]:
                    if int(c) not in keep_set:
                        raise ConsistencyError("graded restriction is not closed")
        pos = {old: new for new, old in enumerate(keep)}
        sub = self.tensor[np.ix_(keep, keep, keep)].copy()
        return FusionRing(
            self.N,
            self.k,
            tuple(self.labels[i] for i in keep),
            sub,
            pos[self.unit_index],
            tuple(pos[self.dual[i]] for i in keep),
            tuple(self.grades[i] for i in keep),
            generator_index=None,
            subgroup_divisor=divisor,
        )

    def to_doc(self) -> dict:
        """Canonical JSON-ready document; byte-stable given sorted dumps."""
        doc = {
            "version": JSON_SCHEMA_VERSION,
            "N": self.N,
            "k": self.k,
            "rank": self.size,
            "labels": [list(lab.rows) for lab in self.labels],
            "matrices": self.tensor.tolist(),
            "unit_index": self.unit_index,
            "dual": list(self.dual),
            "grades": list(self.grades),
        }
        if self.generator_index is not None:
            doc["generator_index"] = self.generator_index
        if self.subgroup_divisor is not None:
            doc["subgroup_divisor"] = self.subgroup_divisor
        return doc


def generator_matrix_rows(act: PointedAction) -> np.ndarray:
    mx = np.zeros((act.size, act.size), dtype=np.int64)
    for b, ch in enumerate(act.children):
        for c in ch:
            mx[b, c] += 1
    return mx


def _perm_matrix(perm: tuple[int, ...]) -> np.ndarray:
    r = len(perm)
    p = np.zeros((r, r), dtype=np.int64)
    for b, c in enumerate(perm):
        p[b, c] = 1
    return p


def _assemble_tensor(act: PointedAction, mx: np.ndarray) -> np.ndarray:
    """Fill every multiplication matrix from the generator rule.

    Seeds: unit, the orbit of the unit under rot (permutation powers),
    and the generator itself.  Closure moves, each an identity of the
    true ring given the certified rot and comp: multiply by g either
    way, transpose onto the dual label, and peel the unique unknown
    summand off a product of two known matrices.  Assignments never
    overwrite, so a single inconsistency aborts the build.
    """
    r = act.size
    T = np.zeros((r, r, r), dtype=np.int64)
    known = [False] * r
    P = _perm_matrix(act.rot)
    rot_inv = [0] * r
    for b, c in enumerate(act.rot):
        rot_inv[c] = b

    def assign(idx: int, mat: np.ndarray) -> None:
        if mat.min(initial=0) < 0:
            raise ConsistencyError(f"negative entry while assembling {act.labels[idx]}")
        if known[idx]:
            if not np.array_equal(T[idx], mat):
                raise ConsistencyError(f"conflicting matrices for {act.labels[idx]}")
            return
        T[idx] = mat
        known[idx] = True

    cur, mat = act.unit_index, np.eye(r, dtype=np.int64)
    for i in range(act.N):
        assign(cur, mat)
        if act.labels[cur] != rectangle(i, act.N, act.k):
            raise ConsistencyError("unit orbit does not consist of rectangles")
        cur, mat = act.rot[cur], mat @ P
    if cur != act.unit_index:
        raise ConsistencyError("pointed orbit does not close after N steps")
    assign(act.generator_index, mx)

    while not all(known):
        progress = False
        for idx in range(r):
            if not known[idx]:
                continue
            if not known[act.rot[idx]]:
                # L_{g (x) a} = L_a L_g
                assign(act.rot[idx], T[idx] @ P)
                progress = True
            if not known[rot_inv[idx]]:
                assign(rot_inv[idx], T[idx] @ P.T)
                progress = True
            if not known[act.comp[idx]]:
                assign(act.comp[idx], T[idx].T.copy())
                progress = True
        known_list = [i for i in range(r) if known[i]]
        for mu in known_list:
            for nu in known_list:
                support = np.nonzero(T[nu, mu])[0]
                unknown = [int(c) for c in support if not known[c]]
                if len(unknown) != 1:
                    continue
                c_star = unknown[0]
                mult = int(T[nu, mu, c_star])
                rhs = T[mu] @ T[nu]
                for c in support:
                    if int(c) != c_star:
                        rhs = rhs - int(T[nu, mu, c]) * T[c]
                if mult != 1:
                    if (rhs % mult).any():
                        raise ConsistencyError("non-integral product relation")
                    rhs = rhs // mult
                assign(c_star, rhs)
                progress = True
                if all(known):
                    break
            if all(known):
                break
        if not progress:
            _resolve_stall(act, T, known)
    return T


def _resolve_stall(act: PointedAction, T: np.ndarray, known: list[bool]) -> None:
    """Solve the remaining entries as a sparse exact linear system.

    Unknowns are the entries (L_c)[b, d] with both c and b unresolved
    (entries on resolved rows are already forced by the symmetry
    (L_c)[b] = (L_b)[c]).  The system collects identities that hold in
    the true ring: symmetry in (c, b), right multiplication by the
    rotation, transposition onto the dual, and for every fully resolved
    nu the associativity instances sum_c (L_nu)[mu, c] (L_c)[b, d] =
    sum_e (L_mu)[b, e] (L_nu)[e, d] for arbitrary mu, b, d.  A full-rank
    solve is therefore the unique, correct completion of the ring.
    """
    from fractions import Fraction

    r = act.size
    N = act.N
    g = act.grades
    rot, comp = act.rot, act.comp
    unresolved = [c for c in range(r) if not known[c]]
    resolved = [c for c in range(r) if known[c]]
    uset = set(unresolved)
    if any(rot[c] not in uset or comp[c] not in uset for c in unresolved):
        raise ConsistencyError("unresolved set is not closed under rot and dual")

    vid: dict[tuple[int, int, int], int] = {}
    for c in unresolved:
        for b in unresolved:
            for d in range(r):
                if (g[c] + g[b] - g[d]) % N == 0:
                    vid[(c, b, d)] = len(vid)
    nv = len(vid)

    # union-find over variables, classes may carry a pinned constant
    parent = list(range(nv))
    const: list[int | None] = [None] * nv

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx == ry:
            return
        if const[rx] is not None and const[ry] is not None:
            if const[rx] != const[ry]:
                raise ConsistencyError("contradictory entries while resolving stall")
        val = const[rx] if const[rx] is not None else const[ry]
        parent[rx] = ry
        const[ry] = val

    def pin(x: int, value: int) -> None:
        rx = find(x)
        if const[rx] is not None and const[rx] != value:
            raise ConsistencyError("contradictory entries while resolving stall")
        const[rx] = value

    def entry(c: int, b: int, d: int):
        """('const', v) or ('var', id) for the entry (L_c)[b, d]."""
        if (g[c] + g[b] - g[d]) % N:
            return ("const", 0)
        if known[c]:
            return ("const", int(T[c, b, d]))
        if known[b]:
            return ("const", int(T[b, c, d]))
        return ("var", vid[(c, b, d)])

    for (c, b, d), i in vid.items():
        union(i, vid[(b, c, d)])
        union(i, vid[(rot[c], b, rot[d])])
        kind, val = entry(c, d, b)  # (L_{comp c})[b, d] = (L_c)[d, b]
        j = vid[(comp[c], b, d)]
        if kind == "const":
            pin(j, val)
        else:
            union(j, val)

    classes = sorted({find(i) for i in range(nv)})
    cpos = {root: i for i, root in enumerate(classes)}
    nclasses = len(classes)
    pinned = sum(1 for root in classes if const[root] is not None)

    pivots: dict[int, tuple[dict[int, Fraction], Fraction]] = {}

    def add_equation(terms: dict[int, Fraction], rhs: Fraction) -> None:
        terms = dict(terms)
        while terms:
            lead = min(terms)
            if lead not in pivots:
                coeff = terms.pop(lead)
                pivots[lead] = (
                    {k: v / coeff for k, v in terms.items()},
                    rhs / coeff,
                )
                return
            prow, pval = pivots[lead]
            f = terms.pop(lead)
            for k, v in prow.items():
                terms[k] = terms.get(k, Fraction(0)) + f * v
                if not terms[k]:
                    del terms[k]
            rhs = rhs - f * pval
        if rhs:
            raise ConsistencyError("inconsistent relation while resolving stall")

    def solved_enough() -> bool:
        return len(pivots) + pinned >= nclasses

    # seed pinned classes as equations so elimination can use them
    for root in classes:
        if const[root] is not None:
            add_equation({cpos[root]: Fraction(1)}, Fraction(const[root]))

    pinned = 0  # now folded into pivots
    for nu in resolved:
        for mu in list(unresolved) + resolved:
            support = [int(c) for c in np.nonzero(T[nu, mu])[0]]
            for b in unresolved:
                base = (g[mu] + g[nu] + g[b]) % N
                for d in range(r):
                    if g[d] % N != base:
                        continue
                    terms: dict[int, Fraction] = {}
                    rhs = Fraction(0)

                    def acc(c2, b2, d2, coeff):
                        nonlocal rhs
                        kind, val = entry(c2, b2, d2)
                        if kind == "const":
                            rhs -= coeff * val
                        else:
                            key = cpos[find(val)]
                            terms[key] = terms.get(key, Fraction(0)) + coeff
                            if not terms[key]:
                                del terms[key]

                    for c in support:
                        acc(c, b, d, Fraction(int(T[nu, mu, c])))
                    for e in np.nonzero(T[nu, :, d])[0]:
                        acc(mu, b, int(e), Fraction(-int(T[nu, int(e), d])))
                    add_equation(terms, -rhs)
                if solved_enough():
                    break
            if solved_enough():
                break
        if solved_enough():
            break
    if len(pivots) < nclasses:
        missing = [str(act.labels[i]) for i in unresolved]
        raise ConsistencyError(f"assembly stalled; unresolved: {missing}")

    values: dict[int, Fraction] = {}
    for lead in sorted(pivots, reverse=True):
        prow, pval = pivots[lead]
        acc_val = pval
        for k, v in prow.items():
            acc_val -= v * values[k]
        values[lead] = acc_val

    for c in unresolved:
        mat = np.zeros((r, r), dtype=np.int64)
        for b in resolved:
            mat[b, :] = T[b, c, :]
        for b in unresolved:
            for d in range(r):
                if (g[c] + g[b] - g[d]) % N:
                    continue
                val = values[cpos[find(vid[(c, b, d)])]]
                if val.denominator != 1 or val < 0:
                    raise ConsistencyError("stall solution is not a fusion matrix")
                mat[b, d] = int(val)
        T[c] = mat
        known[c] = True


def _certify(act: PointedAction, mx: np.ndarray, T: np.ndarray) -> tuple[int, ...]:
    """Prove the assembled tensor correct; return the dual permutation.

    Every assembled matrix lies in the algebra generated by M_X, M_X^T
    and the rotation matrix P (transposes stay inside because the listed
    generators pairwise commute, which is checked here).  Commutativity
    of that algebra plus the symmetry T[a,b,:] == T[b,a,:] is equivalent
    to full associativity, so only the cheap checks below are needed.
    """
    r = act.size
    P = _perm_matrix(act.rot)
    for lhs, rhs, what in (
        (mx @ mx.T, mx.T @ mx, "M_X with its transpose"),
        (mx @ P, P @ mx, "M_X with the rotation"),
        (mx.T @ P, P @ mx.T, "M_X^T with the rotation"),
    ):
        if not np.array_equal(lhs, rhs):
            raise ConsistencyError(f"generators do not commute: {what}")
    eye = np.eye(r, dtype=np.int64)
    if not np.array_equal(T[:, act.unit_index, :], eye):
        raise ConsistencyError("some a (x) unit differs from a")
    if not np.array_equal(T, T.transpose(1, 0, 2)):
        raise ConsistencyError("structure constants are not symmetric in a, b")
    if not np.array_equal(T[act.generator_index], mx):
        raise ConsistencyError("generator matrix changed during assembly")
    # independent spot check of associativity instances involving X:
    # sum_e mx[b,e] T[c,e,d] must equal sum_e mx[c,e] T[e,b,d]
    lhs = np.tensordot(mx, T, axes=([1], [1]))  # (b, c, d)
    rhs = np.tensordot(mx, T, axes=([1], [0])).transpose(1, 0, 2)  # (b, c, d)
    if not np.array_equal(lhs, rhs):
        raise ConsistencyError("associativity fails on generator instances")

    dual = [-1] * r
    for a in range(r):
        col = T[a, :, act.unit_index]
        hits = np.nonzero(col)[0]
        if len(hits) != 1 or col[hits[0]] != 1:
            raise ConsistencyError(f"dual of {act.labels[a]} is not unique")
        dual[a] = int(hits[0])
    for a in range(r):
        if dual[dual[a]] != a:
            raise ConsistencyError("duality is not involutive")
        if dual[a] != act.comp[a]:
            raise ConsistencyError("dual disagrees with the complement diagram")
        if (act.grades[a] + act.grades[dual[a]]) % act.N:
            raise ConsistencyError("grade of the dual is not the negated grade")
    ga = np.array(act.grades, dtype=np.int64)
    ok = (ga[:, None, None] + ga[None, :, None] - ga[None, None, :]) % act.N == 0
    if not bool(((T == 0) | ok).all()):
        raise ConsistencyError("a nonzero constant violates grade additivity")
    return tuple(dual)


def build_fusion_ring(N: int, k: int) -> FusionRing:
    """Construct the full ring with every multiplication matrix."""
    act = pointed_action(N, k)
    mx = generator_matrix_rows(act)
    T = _assemble_tensor(act, mx)
    dual = _certify(act, mx, T)
    ring = FusionRing(
        N,
        k,
        act.labels,
        T,
        act.unit_index,
        dual,
        act.grades,
        generator_index=act.generator_index,
        rot=act.rot,
        children=act.children,
    )
    if ring.size != rank(N, k):  # pragma: no cover
        raise ConsistencyError("rank mismatch")
    return ring


def action_of(ring_or_act) -> PointedAction:
    """PointedAction view of either a FusionRing or a PointedAction."""
    if isinstance(ring_or_act, PointedAction):
        return ring_or_act
    ring = ring_or_act
    if ring.rot is None or ring.children is None:
        raise ParameterError("restricted rings carry no pointed action")
    return PointedAction(
        ring.N,
        ring.k,
        ring.labels,
        ring.index,
        ring.grades,
        ring.children,
        ring.rot,
        ring.dual,
        ring.unit_index,
        ring.generator_index,
    )
