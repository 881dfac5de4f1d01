"""Bigraded complexes, shifts, mapping cones, and homology.

Complexes are lazy: bases and differential blocks are produced on demand
from callables and cached, since the model-building loop only ever looks
at a few homological degrees per stage.  The differential preserves
internal degree, so each (i, j) slice is finite and exact.
"""

from . import exact_linear as la
from .errors import NotChainMapError


class BigradedComplex:
    """Chain complex indexed by (homological, internal) bidegree.

    basis_fn(i, j) -> ordered list of labels, diff_fn(i, j) -> ExactMatrix
    from slice (i, j) to (i-1, j).  Valid for hmin <= i <= hmax and
    0 <= j <= dmax; outside that range dimensions read as 0 but homology
    at the boundary is flagged incomplete.
    """

    def __init__(self, field, basis_fn, diff_fn, hmin, hmax, dmax):
        self.field = field
        self._basis_fn = basis_fn
        self._diff_fn = diff_fn
        self.hmin = hmin
        self.hmax = hmax
        self.dmax = dmax
        self._bases = {}
        self._diffs = {}

    def basis(self, i, j):
        if not (self.hmin <= i <= self.hmax and 0 <= j <= self.dmax):
            return []
        key = (i, j)
        if key not in self._bases:
            self._bases[key] = list(self._basis_fn(i, j))
        return self._bases[key]

    def dim(self, i, j):
        return len(self.basis(i, j))

    def diff(self, i, j):
        key = (i, j)
        if key not in self._diffs:
            n = self.dim(i, j)
            m = self.dim(i - 1, j)
            if n == 0 or m == 0:
                M = la.ExactMatrix.zero(self.field, m, n)
            else:
                M = self._diff_fn(i, j)
                if (M.rows, M.cols) != (m, n):
                    raise ValueError(
                        f"differential block at ({i},{j}) has shape "
                        f"{M.rows}x{M.cols}, expected {m}x{n}")
            self._diffs[key] = M
        return self._diffs[key]

    def check_dd_zero(self, i, j):
        return self.diff(i - 1, j).matmul(self.diff(i, j)).is_zero()


def algebra_complex(A, hmax=None):
    """The underlying complex of a DgAlgebra."""
    hmax = A.max_hdeg if hmax is None else min(hmax, A.max_hdeg)
    return BigradedComplex(
        A.field, A.basis_of_bidegree, A.diff_matrix, 0, hmax, A.max_intdeg)


def shift(C, i):
    """Homological shift: slice (n, j) reads C at (n + i, j); the
    differential picks up the sign (-1)^i."""
    F = C.field
    if i % 2 == 0:
        dfn = lambda n, j: C.diff(n + i, j)
    else:
        dfn = lambda n, j: la.ExactMatrix(
            F, C.dim(n + i - 1, j), C.dim(n + i, j),
            {k: F.neg(v) for k, v in C.diff(n + i, j).entries.items()})
    return BigradedComplex(
        F, lambda n, j: C.basis(n + i, j), dfn,
        C.hmin - i, C.hmax - i, C.dmax)


class ChainMap:
    """f: source -> target of homological degree 0, given blockwise."""

    def __init__(self, source, target, block_fn):
        self.source = source
        self.target = target
        self._block_fn = block_fn
        self._blocks = {}

    def block(self, i, j):
        key = (i, j)
        if key not in self._blocks:
            m = self.target.dim(i, j)
            n = self.source.dim(i, j)
            if m == 0 or n == 0:
                M = la.ExactMatrix.zero(self.source.field, m, n)
            else:
                M = self._block_fn(i, j)
            self._blocks[key] = M
        return self._blocks[key]

    def check_chain_map(self, i, j):
        lhs = self.target.diff(i, j).matmul(self.block(i, j))
        rhs = self.block(i - 1, j).matmul(self.source.diff(i, j))
        return lhs == rhs


def cone(f, verify_degrees=()):
    """Mapping cone of a chain map f: C -> D, as the sum C[-1] (+) D with
    block differential ((-dC, 0), (-f, dD)).

    Slice (n, j) is C_(n-1, j) labels tagged "src" followed by D_(n, j)
    labels tagged "tgt".  verify_degrees: bidegrees at which the chain-map
    identity is checked up front (raises NotChainMapError on failure).
    """
    C, D = f.source, f.target
    F = C.field
    for (i, j) in verify_degrees:
        if not f.check_chain_map(i, j):
            raise NotChainMapError(f"not a chain map at bidegree ({i},{j})")

    def basis(n, j):
        return ([("src", lbl) for lbl in C.basis(n - 1, j)]
                + [("tgt", lbl) for lbl in D.basis(n, j)])

    def diff(n, j):
        nc = C.dim(n - 1, j)
        nd = D.dim(n, j)
        mc = C.dim(n - 2, j)
        entries = {}
        for (r, c), v in C.diff(n - 1, j).entries.items():
            entries[(r, c)] = F.neg(v)
        for (r, c), v in f.block(n - 1, j).entries.items():
            entries[(mc + r, c)] = F.neg(v)
        for (r, c), v in D.diff(n, j).entries.items():
            entries[(mc + r, nc + c)] = v
        return la.ExactMatrix(F, mc + D.dim(n - 1, j), nc + nd, entries)

    return BigradedComplex(
        F, basis, diff,
        min(C.hmin + 1, D.hmin), min(C.hmax + 1, D.hmax), min(C.dmax, D.dmax))


class HomologyClassSet:
    """Homology of one bidegree slice: dimension plus representative cycles
    (coordinate columns).  complete is False when the boundary space could
    be cut off by the homological bound."""

    __slots__ = ("hdeg", "intdeg", "dim", "reps", "complete")

    def __init__(self, hdeg, intdeg, dim, reps, complete):
        self.hdeg = hdeg
        self.intdeg = intdeg
        self.dim = dim
        self.reps = reps
        self.complete = complete

    def __repr__(self):
        return (f"HomologyClassSet(({self.hdeg},{self.intdeg}), dim={self.dim}, "
                f"complete={self.complete})")


def homology(C, i, j):
    """H_i of C in internal degree j."""
    Z = la.kernel_basis(C.diff(i, j))
    boundary_rank, _ = la.rank_and_pivots(C.diff(i + 1, j))
    dim = Z.cols - boundary_rank
    bcols = C.diff(i + 1, j).columns()
    zcols = Z.columns()
    sel = la.pick_new_generators(C.field, C.dim(i, j), bcols, zcols)
    reps = [zcols[k] for k in sel]
    complete = i + 1 <= C.hmax
    assert len(reps) == dim
    return HomologyClassSet(i, j, dim, reps, complete)


def homology_dim_transposed(C, i, j):
    """Independent route to dim H_(i,j): column ranks of the transposed
    blocks (row-space formulation)."""
    r1, _ = la.rank_and_pivots(C.diff(i, j).transpose())
    r2, _ = la.rank_and_pivots(C.diff(i + 1, j).transpose())
    return C.dim(i, j) - r1 - r2


def minimal_generators(C, i, actions, dmax=None, reverse=False):
    """Cycles descending to minimal A0-module generators of H_i(C), found
    degreewise: in internal degree j, kill boundaries and the image of the
    irrelevant maximal ideal acting on lower-internal-degree cycles, then
    greedily select completing kernel columns.

    actions(d, j) must yield the matrices of multiplication by the degree-d
    basis of the maximal ideal of A0, mapping slice (i, j) to (i, j + d).
    Returns a list of (intdeg, column dict) in selection order.
    """
    if dmax is None:
        dmax = C.dmax
    F = C.field
    kernels = {}
    gens = []
    for j in range(dmax + 1):
        Z = la.kernel_basis(C.diff(i, j)).columns()
        kernels[j] = Z
        W = C.diff(i + 1, j).columns()
        for d in range(1, j + 1):
            lower = kernels.get(j - d)
            if not lower:
                continue
            for act in actions(d, j - d):
                for z in lower:
                    col = act.mul_vec(z)
                    if col:
                        W.append(col)
        sel = la.pick_new_generators(F, C.dim(i, j), W, Z, reverse=reverse)
        for k in sel:
            gens.append((j, Z[k]))
    return gens
