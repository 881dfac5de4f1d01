"""Minimal semifree resolutions of dg-modules and their Betti numbers.

Admissible modules: the residue field k, homological shifts of k, graded
A0-modules given by a finite homogeneous presentation, and bounded
complexes of such.  The resolution is built by the same staged cone
construction as the models: at stage n, cycles in cone(q: F -> M) that
descend to minimal A0-generators of H_n become new free summands.
"""

from . import exact_linear as la
from . import homology as hml
from .dg_core import DgElement, TRIVIAL_MONOMIAL
from .errors import AdmissibilityError, HomogeneityError


class ResidueFieldModule:
    """k, concentrated in bidegree (shift, 0)."""

    def __init__(self, algebra, shift=0):
        self.algebra = algebra
        self.field = algebra.field
        self.shift = shift
        self.hmin = shift

    def basis(self, i, j):
        return ["1"] if (i, j) == (self.shift, 0) else []

    def dim(self, i, j):
        return len(self.basis(i, j))

    def complex(self, hmax, dmax):
        return hml.BigradedComplex(
            self.field, self.basis,
            lambda i, j: la.ExactMatrix.zero(self.field, 0, 0),
            self.shift, hmax, dmax)

    def act_matrices(self, d, i, j):
        # the maximal ideal acts as zero on k
        return [la.ExactMatrix.zero(self.field, self.dim(i, j + d),
                                    self.dim(i, j))
                for _ in self._mbasis(d)]

    def _mbasis(self, d):
        base = self.algebra.base
        return [b for b in range(base.dim(d)) if base.basis_hdeg(d, b) == 0]

    def act(self, a, i, j, coords):
        F = self.field
        out = {}
        if a.hdeg == 0 and a.intdeg == 0 and coords:
            c = a.terms.get((0, 0, TRIVIAL_MONOMIAL))
            if c is not None:
                for r, v in coords.items():
                    out[r] = F.mul(c, v)
        return out


class PresentedModule:
    """Cokernel of a map of graded free A0-modules, concentrated in one
    homological degree (shift).  gens: list of internal degrees.  Each
    relation: dict gen_index -> homogeneous polynomial {exponent_tuple:
    scalar} over the base presentation; all components of one relation
    must give it a single internal degree."""

    def __init__(self, algebra, gens, relations=(), shift=0):
        self.algebra = algebra
        self.field = algebra.field
        self.shift = shift
        self.hmin = shift
        self.gens = list(gens)
        base = algebra.base
        P = base.presentation
        D = base.D
        # reduce relation components to base coordinates and find degrees
        self._rels = []
        for k, rel in enumerate(relations):
            comps = {}
            degs = set()
            for g, poly in rel.items():
                j, coeffs = base.reduce_poly(poly)
                if any(base.basis_hdeg(j, b) != 0 for b in coeffs):
                    raise AdmissibilityError(
                        f"relation #{k}: coefficient outside A0")
                if coeffs:
                    comps[g] = (j, coeffs)
                    degs.add(j + self.gens[g])
            if not comps:
                raise ValueError(f"relation #{k} is zero")
            if len(degs) != 1:
                raise HomogeneityError(f"relation #{k} is not homogeneous")
            self._rels.append((degs.pop(), comps))
        # materialize per internal degree
        self._bases = {}
        self._nf = {}
        for j in range(D + 1):
            free = [(g, b) for g, dg in enumerate(self.gens) if dg <= j
                    for b in self._a0_basis(j - dg)]
            pos = {lab: n for n, lab in enumerate(free)}
            span = []
            for t, comps in self._rels:
                if t > j:
                    continue
                for r in self._a0_basis(j - t):
                    col = {}
                    for g, (jr, coeffs) in comps.items():
                        prod = base.multiply(j - t, {r: self.field.one},
                                             jr, coeffs)
                        for b, c in prod.items():
                            key = pos[(g, b)]
                            col[key] = self.field.add(
                                col.get(key, self.field.zero), c)
                    span.append({k: v for k, v in col.items()
                                 if not self.field.is_zero(v)})
            M = la.ExactMatrix.from_columns(self.field, len(free), span)
            keep = la.cokernel_complement(M)
            qbasis = [free[i] for i in keep]
            unit_cols = [{i: self.field.one} for i in keep]
            A = la.ExactMatrix.from_columns(self.field, len(free),
                                            unit_cols + span)
            sols = la.solve_many(A, [{i: self.field.one}
                                     for i in range(len(free))])
            nf = {}
            for lab, sol in zip(free, sols):
                nf[lab] = {b: v for b, v in sol.items() if b < len(qbasis)}
            self._bases[j] = qbasis
            self._nf[j] = nf

    def _a0_basis(self, d):
        base = self.algebra.base
        return [b for b in range(base.dim(d)) if base.basis_hdeg(d, b) == 0]

    def basis(self, i, j):
        return self._bases[j] if i == self.shift else []

    def dim(self, i, j):
        return len(self.basis(i, j))

    def complex(self, hmax, dmax):
        return hml.BigradedComplex(
            self.field, self.basis,
            lambda i, j: la.ExactMatrix.zero(
                self.field, self.dim(i - 1, j), self.dim(i, j)),
            self.shift, hmax, dmax)

    def _mult_by_base(self, d, bidx, j, coords):
        """coords in degree j -> coords in degree j + d, multiplication by
        base basis element (d, bidx)."""
        F = self.field
        base = self.algebra.base
        pos = {lab: n for n, lab in enumerate(self._bases[j + d])}
        out = {}
        for n, c in coords.items():
            g, b = self._bases[j][n]
            prod = base.mult_basis(d, bidx, j - self.gens[g], b)
            for b2, c2 in prod.items():
                for b3, c3 in self._nf[j + d][(g, b2)].items():
                    s = F.add(out.get(b3, F.zero), F.mul(c, F.mul(c2, c3)))
                    if F.is_zero(s):
                        out.pop(b3, None)
                    else:
                        out[b3] = s
        return out

    def act_matrices(self, d, i, j):
        mats = []
        n = self.dim(i, j)
        m = self.dim(i, j + d)
        for bidx in self._a0_basis(d):
            entries = {}
            if i == self.shift:
                for cidx in range(n):
                    for r, v in self._mult_by_base(
                            d, bidx, j, {cidx: self.field.one}).items():
                        entries[(r, cidx)] = v
            mats.append(la.ExactMatrix(self.field, m, n, entries))
        return mats

    def act(self, a, i, j, coords):
        """Action of a homogeneous algebra element on coords at (i, j).
        Only the A0-part acts; higher homological degrees act as zero on a
        module concentrated in one degree."""
        F = self.field
        if a.hdeg != 0 or not coords:
            return {}
        out = {}
        for (jb, ib, mon), c in a.terms.items():
            if not mon.is_trivial():
                continue
            prod = self._mult_by_base(jb, ib, j, coords) if jb else {
                k: v for k, v in coords.items()}
            for r, v in prod.items():
                s = F.add(out.get(r, F.zero), F.mul(c, v))
                if F.is_zero(s):
                    out.pop(r, None)
                else:
                    out[r] = s
        return out


class ComplexModule:
    """A bounded complex of presented modules: pieces[n] concentrated in
    homological degree n, with differentials given as explicit matrices
    per internal degree (diffs[(n, j)]: piece n slice j -> piece n-1 slice
    j).  The matrices are validated to square to zero."""

    def __init__(self, algebra, pieces, diffs):
        self.algebra = algebra
        self.field = algebra.field
        self.pieces = dict(pieces)
        self.diffs = dict(diffs)
        self.hmin = min(self.pieces)
        for (n, j), M in self.diffs.items():
            if n - 1 in self.pieces and (n - 1, j) in self.diffs:
                if not self.diffs[(n - 1, j)].matmul(M).is_zero():
                    raise ValueError(f"differential does not square to zero "
                                     f"at ({n},{j})")

    def basis(self, i, j):
        p = self.pieces.get(i)
        return [(i, lab) for lab in p.basis(i, j)] if p else []

    def dim(self, i, j):
        return len(self.basis(i, j))

    def _diff(self, i, j):
        M = self.diffs.get((i, j))
        if M is None:
            return la.ExactMatrix.zero(self.field, self.dim(i - 1, j),
                                       self.dim(i, j))
        return M

    def complex(self, hmax, dmax):
        return hml.BigradedComplex(self.field, self.basis, self._diff,
                                   self.hmin, hmax, dmax)

    def act_matrices(self, d, i, j):
        p = self.pieces.get(i)
        if p is None:
            base = self.algebra.base
            nm = len([b for b in range(base.dim(d))
                      if base.basis_hdeg(d, b) == 0])
            return [la.ExactMatrix.zero(self.field, 0, 0)] * nm
        return p.act_matrices(d, i, j)

    def act(self, a, i, j, coords):
        p = self.pieces.get(i)
        return p.act(a, i, j, coords) if p else {}


class SemifreeResolution:
    """Free dg-A-module on generators with prescribed boundaries, built to
    resolve a module M; carries the comparison map q and the Betti table."""

    def __init__(self, algebra, module, max_hdeg, max_intdeg):
        self.algebra = algebra
        self.module = module
        self.max_hdeg = max_hdeg
        self.max_intdeg = max_intdeg
        # generators: (hdeg, intdeg, boundary {g: DgElement}, qimg coords)
        self.generators = []
        self._bases = {}

    # --- the underlying complex -------------------------------------------

    def basis(self, i, j):
        key = (i, j)
        hit = self._bases.get(key)
        if hit is not None:
            return hit
        out = []
        for g, (h, d, _, _) in enumerate(self.generators):
            if h > i or d > j or i - h > self.algebra.max_hdeg:
                continue
            for akey in self.algebra.basis_of_bidegree(i - h, j - d):
                out.append((g, akey))
        self._bases[key] = out
        return out

    def dim(self, i, j):
        return len(self.basis(i, j))

    def element_coords(self, i, j, comps):
        """coords of {g: DgElement} in the (i, j) basis."""
        pos = {lab: n for n, lab in enumerate(self.basis(i, j))}
        out = {}
        for g, e in comps.items():
            for akey, c in e.terms.items():
                out[pos[(g, akey)]] = c
        return out

    def coords_to_components(self, i, j, coords):
        comps = {}
        basis = self.basis(i, j)
        for n, c in coords.items():
            g, akey = basis[n]
            h, d, _, _ = self.generators[g]
            e = comps.setdefault(g, DgElement(i - h, j - d))
            e.terms[akey] = c
        return comps

    def diff_components(self, g, akey, i, j):
        """Boundary of the basis element a*g as components {g': DgElement}:
        da*g + (-1)^|a| a*dg."""
        A = self.algebra
        F = A.field
        h, d, bnd, _ = self.generators[g]
        a = DgElement(i - h, j - d, {akey: F.one})
        out = {}
        da = A.differential(a)
        if not da.is_zero():
            out[g] = da
        sign = F.neg(F.one) if (i - h) % 2 == 1 else F.one
        for g2, e in bnd.items():
            prod = A.multiply(a, e)
            if prod.is_zero():
                continue
            prod = A.scale(sign, prod)
            if g2 in out:
                out[g2] = A.add(out[g2], prod)
            else:
                out[g2] = prod
        return {k: v for k, v in out.items() if not v.is_zero()}

    def diff_matrix(self, i, j):
        cols = self.basis(i, j)
        rows = self.basis(i - 1, j)
        pos = {lab: n for n, lab in enumerate(rows)}
        entries = {}
        for cidx, (g, akey) in enumerate(cols):
            for g2, e in self.diff_components(g, akey, i, j).items():
                for akey2, c in e.terms.items():
                    entries[(pos[(g2, akey2)], cidx)] = c
        return la.ExactMatrix(self.algebra.field, len(rows), len(cols), entries)

    def complex(self, hmax, dmax):
        hmin = min((h for h, _, _, _ in self.generators), default=0)
        return hml.BigradedComplex(self.algebra.field, self.basis,
                                   self.diff_matrix, hmin, hmax, dmax)

    def act_matrix(self, d, bidx, i, j):
        A = self.algebra
        F = A.field
        r = A.base_element(d, {bidx: F.one})
        cols = self.basis(i, j)
        pos = {lab: n for n, lab in enumerate(self.basis(i, j + d))}
        entries = {}
        for cidx, (g, akey) in enumerate(cols):
            h, dg, _, _ = self.generators[g]
            prod = A.multiply(r, DgElement(i - h, j - dg, {akey: F.one}))
            for akey2, c in prod.terms.items():
                entries[(pos[(g, akey2)], cidx)] = c
        return la.ExactMatrix(F, len(self.basis(i, j + d)), len(cols), entries)

    # --- the comparison map -------------------------------------------------

    def q_coords(self, i, j, fcoords):
        """Image in the module of the F-element with the given coords."""
        F = self.algebra.field
        out = {}
        for g, e in self.coords_to_components(i, j, fcoords).items():
            _, _, _, qimg = self.generators[g]
            img = self.module.act(e, self.generators[g][0],
                                  self.generators[g][1], qimg)
            for r, v in img.items():
                s = F.add(out.get(r, F.zero), v)
                if F.is_zero(s):
                    out.pop(r, None)
                else:
                    out[r] = s
        return out

    def q_block(self, i, j):
        cols = self.basis(i, j)
        m = self.module.dim(i, j)
        entries = {}
        for cidx in range(len(cols)):
            for r, v in self.q_coords(i, j, {cidx: self.algebra.field.one}).items():
                entries[(r, cidx)] = v
        return la.ExactMatrix(self.algebra.field, m, len(cols), entries)

    # --- reporting -----------------------------------------------------------

    def betti_table(self):
        table = {}
        for h, d, _, _ in self.generators:
            table[(h, d)] = table.get((h, d), 0) + 1
        return table

    def betti(self, i):
        return sum(c for (h, _), c in self.betti_table().items() if h == i)

    def is_minimal(self):
        """Every boundary entry lies in the maximal ideal: no component of
        any generator's boundary has a scalar (bidegree (0,0)) term."""
        for g, (h, d, bnd, _) in enumerate(self.generators):
            for g2, e in bnd.items():
                h2, d2, _, _ = self.generators[g2]
                if (e.hdeg, e.intdeg) == (0, 0) and not e.is_zero():
                    return False, g
        return True, None

    def check_resolves(self, through_hdeg):
        """Cone of q is exact in homological degrees <= through_hdeg."""
        Fc = self.complex(self.max_hdeg + 1, self.max_intdeg)
        Mc = self.module.complex(self.max_hdeg + 1, self.max_intdeg)
        C = hml.cone(hml.ChainMap(Fc, Mc, self.q_block))
        for i in range(self.module.hmin, through_hdeg + 1):
            for j in range(self.max_intdeg + 1):
                if hml.homology(C, i, j).dim != 0:
                    return False, (i, j)
        return True, None


def resolve_module(A, M, max_hdeg, max_intdeg, reverse=False):
    """Minimal semifree resolution of M over A up to the given bounds."""
    res = SemifreeResolution(A, M, max_hdeg, max_intdeg)
    N, D = max_hdeg, max_intdeg
    F = A.field

    def mbasis(d):
        return [b for b in range(A.base.dim(d))
                if A.base.basis_hdeg(d, b) == 0]

    for n in range(M.hmin, N + 1):
        Fc = res.complex(N + 1, D)
        Mc = M.complex(N + 1, D)
        C = hml.cone(hml.ChainMap(Fc, Mc, res.q_block))

        def actions(d, j):
            mats = []
            mm = M.act_matrices(d, n, j)
            for k, bidx in enumerate(mbasis(d)):
                fa = res.act_matrix(d, bidx, n - 1, j)
                nf, nm = Fc.dim(n - 1, j), Mc.dim(n, j)
                entries = dict(fa.entries)
                for (r, c), v in mm[k].entries.items():
                    entries[(fa.rows + r, nf + c)] = v
                mats.append(la.ExactMatrix(
                    F, fa.rows + Mc.dim(n, j + d), nf + nm, entries))
            return mats

        gens = hml.minimal_generators(C, n, actions, dmax=D, reverse=reverse)
        for j, col in gens:
            nf = Fc.dim(n - 1, j)
            fcoords = {r: v for r, v in col.items() if r < nf}
            mcoords = {r - nf: v for r, v in col.items() if r >= nf}
            bnd = res.coords_to_components(n - 1, j, fcoords)
            res.generators.append((n, j, bnd, mcoords))
            res._bases.clear()
    return res
