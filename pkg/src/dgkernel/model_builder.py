"""Models with prescribed switching degree, acyclic closures, minimal
models, Koszul complexes, and minimal semifree resolutions of modules.

The construction is the staged one: at stage i, cycles in the mapping
cone of q_i: U(i) -> B that descend to minimal A0-module generators of
its homology in degree i+1 become new variables.  Below the switching
degree s they are polynomial/exterior variables, at or above it they are
divided-power/exterior variables.  Generator selection is deterministic
(smallest internal degree first, then basis order), which makes the
uniqueness-of-counts property directly testable by reversing the order.
"""

import math

from . import dg_core
from . import exact_linear as la
from . import homology as hml
from .dg_core import DgAlgebra, DgElement, EXTERIOR, POLYNOMIAL, DIVIDED_POWER
from .errors import AdmissibilityError, BoundExceededError
from .graded_base import TruncatedBase

INFINITY = math.inf


# ---------------------------------------------------------------------------
# Targets
# ---------------------------------------------------------------------------

class TargetElement:
    """Homogeneous element of a target, in coordinates of the target's own
    bidegree basis."""

    __slots__ = ("hdeg", "intdeg", "coords")

    def __init__(self, hdeg, intdeg, coords=None):
        self.hdeg = hdeg
        self.intdeg = intdeg
        self.coords = dict(coords) if coords else {}

    def is_zero(self):
        return not self.coords


class ResidueFieldTarget:
    """The residue field k, concentrated in bidegree (0, 0)."""

    def __init__(self, field):
        self.field = field

    def complex(self, hmax, dmax):
        return hml.BigradedComplex(
            self.field,
            lambda i, j: ["1"] if (i, j) == (0, 0) else [],
            lambda i, j: la.ExactMatrix.zero(self.field, 0, 0),
            0, hmax, dmax)

    def zero(self, hdeg, intdeg):
        return TargetElement(hdeg, intdeg)

    def one(self):
        return TargetElement(0, 0, {0: self.field.one})

    def basis_size(self, i, j):
        return 1 if (i, j) == (0, 0) else 0

    def multiply(self, u, v):
        F = self.field
        if u.is_zero() or v.is_zero():
            return TargetElement(u.hdeg + v.hdeg, u.intdeg + v.intdeg)
        return TargetElement(0, 0, {0: F.mul(u.coords[0], v.coords[0])})

    def power(self, u, e):
        if e == 0:
            return self.one()
        out = u
        for _ in range(e - 1):
            out = self.multiply(out, u)
        return out


class RingTarget:
    """A truncated graded quotient ring as a dg-algebra with zero
    differential.  Generators may carry even homological degrees, so this
    covers both ordinary rings and algebras like k[x0]/(x0^m), |x0| = d."""

    def __init__(self, tbase):
        self.tbase = tbase
        self.field = tbase.field
        self._bases = {}

    def basis(self, i, j):
        key = (i, j)
        if key not in self._bases:
            if 0 <= j <= self.tbase.D:
                self._bases[key] = [
                    idx for idx in range(self.tbase.dim(j))
                    if self.tbase.basis_hdeg(j, idx) == i]
            else:
                self._bases[key] = []
        return self._bases[key]

    def basis_size(self, i, j):
        return len(self.basis(i, j))

    def complex(self, hmax, dmax):
        return hml.BigradedComplex(
            self.field,
            lambda i, j: self.basis(i, j) if i >= 0 else [],
            lambda i, j: la.ExactMatrix.zero(
                self.field, len(self.basis(i - 1, j)), len(self.basis(i, j))),
            0, hmax, min(dmax, self.tbase.D))

    def zero(self, hdeg, intdeg):
        return TargetElement(hdeg, intdeg)

    def one(self):
        return TargetElement(0, 0, {0: self.field.one})

    def element_from_ring(self, j, ring_coeffs):
        """TargetElement from {ring_basis_index: scalar} in internal degree
        j (must be homologically homogeneous)."""
        hs = {self.tbase.basis_hdeg(j, i) for i in ring_coeffs}
        if len(hs) > 1:
            raise ValueError("mixed homological degrees")
        h = hs.pop() if hs else 0
        basis = self.basis(h, j)
        pos = {idx: n for n, idx in enumerate(basis)}
        return TargetElement(h, j, {pos[i]: c for i, c in ring_coeffs.items()})

    def ring_coeffs(self, elem):
        basis = self.basis(elem.hdeg, elem.intdeg)
        return {basis[n]: c for n, c in elem.coords.items()}

    def multiply(self, u, v):
        F = self.field
        h, d = u.hdeg + v.hdeg, u.intdeg + v.intdeg
        if d > self.tbase.D:
            raise BoundExceededError("target product exceeds internal bound")
        prod = self.tbase.multiply(u.intdeg, self.ring_coeffs(u),
                                   v.intdeg, self.ring_coeffs(v))
        return self.element_from_ring(d, prod) if prod else TargetElement(h, d)

    def power(self, u, e):
        if e == 0:
            return self.one()
        out = u
        for _ in range(e - 1):
            out = self.multiply(out, u)
        return out


# ---------------------------------------------------------------------------
# Morphisms into a target
# ---------------------------------------------------------------------------

class DgMorphism:
    """Multiplicative chain map q: U -> target.  Defined by a base map
    (image of every base basis element) and an image per variable."""

    def __init__(self, algebra, target, base_map, images):
        self.algebra = algebra
        self.target = target
        self.base_map = base_map       # (jb, idx) -> TargetElement
        self.images = dict(images)    # var id -> TargetElement

    def _power_image(self, vid, e):
        var = self.algebra.variables[vid]
        img = self.images[vid]
        if e == 1:
            return img
        if img.is_zero():
            return self.target.zero(var.hdeg * e, var.intdeg * e)
        if var.kind == DIVIDED_POWER:
            F = self.algebra.field
            fact = F.one
            for n in range(2, e + 1):
                fact = F.mul(fact, F.from_int(n))
            p = self.target.power(img, e)
            if F.is_zero(fact):
                if p.is_zero():
                    return p
                raise AdmissibilityError(
                    "divided-power image not computable: e! vanishes in the field")
            return TargetElement(p.hdeg, p.intdeg,
                                 {k: F.div(v, fact) for k, v in p.coords.items()})
        return self.target.power(img, e)

    def evaluate(self, u):
        F = self.algebra.field
        T = self.target
        out = T.zero(u.hdeg, u.intdeg)
        for (jb, ib, mon), c in u.terms.items():
            img = self.base_map(jb, ib)
            if img.is_zero():
                continue
            dead = False
            for vid, e in mon.evens:
                img = T.multiply(img, self._power_image(vid, e))
                if img.is_zero():
                    dead = True
                    break
            if not dead:
                for vid in mon.odds:
                    img = T.multiply(img, self.images[vid])
                    if img.is_zero():
                        dead = True
                        break
            if dead:
                continue
            for k, v in img.coords.items():
                s = F.add(out.coords.get(k, F.zero), F.mul(c, v))
                if F.is_zero(s):
                    out.coords.pop(k, None)
                else:
                    out.coords[k] = s
        return out

    def chain_map(self, hmax, dmax):
        U = self.algebra
        Ucomp = hml.algebra_complex(U, hmax)
        Tcomp = self.target.complex(hmax, dmax)

        def block(i, j):
            cols = U.basis_of_bidegree(i, j)
            m = self.target.basis_size(i, j)
            entries = {}
            for cidx, key in enumerate(cols):
                img = self.evaluate(DgElement(i, j, {key: U.field.one}))
                for r, v in img.coords.items():
                    entries[(r, cidx)] = v
            return la.ExactMatrix(U.field, m, len(cols), entries)

        return hml.ChainMap(Ucomp, Tcomp, block)

    def check_chain_map_on_variables(self):
        """Verify d(q(v)) = q(dv) for every variable.  Supported targets
        have zero differential, so the condition is q(dv) = 0."""
        for v in self.algebra.variables:
            if not self.evaluate(v.boundary).is_zero():
                return False, v.name
        return True, None


def augmentation_base_map(tbase, field):
    """Base map of the augmentation to k: unit -> 1, positive degrees -> 0."""
    target = ResidueFieldTarget(field)

    def base_map(jb, ib):
        if jb == 0:
            return TargetElement(0, 0, {0: field.one})
        return TargetElement(tbase.basis_hdeg(jb, ib), jb)
    return target, base_map


def quotient_base_map(source_base, target):
    """Base map of a surjection S -> R: a basis monomial of S is reduced to
    normal form in the target ring.  Source generators must be a subset of
    the target presentation's generators (matched by name)."""
    sp = source_base.presentation
    tp = target.tbase.presentation
    tnames = [v.name for v in tp.variables]
    col = []
    for v in sp.variables:
        if v.name not in tnames:
            raise ValueError(f"source generator {v.name} missing from target")
        col.append(tnames.index(v.name))

    def base_map(jb, ib):
        exps = source_base.basis(jb)[ib]
        texps = [0] * len(tp.variables)
        for e, c in zip(exps, col):
            texps[c] = e
        nf = target.tbase.normal_form(jb, tuple(texps))
        return target.element_from_ring(jb, nf) if nf else TargetElement(
            tp.mono_hdeg(tuple(texps)), jb)
    return base_map


# ---------------------------------------------------------------------------
# The model construction
# ---------------------------------------------------------------------------

class ModelSpec:
    """Input of build_model.  switching_degree: 0 = acyclic closure,
    math.inf = minimal model."""

    def __init__(self, source, target, base_map, switching_degree,
                 max_hdeg, max_intdeg, var_images=None):
        if switching_degree != INFINITY and switching_degree < 0:
            raise ValueError("switching degree must be >= 0 or infinity")
        if max_hdeg < 1 or max_intdeg < 0:
            raise ValueError("bounds must be positive")
        self.source = source
        self.target = target
        self.base_map = base_map
        self.switching_degree = switching_degree
        self.max_hdeg = max_hdeg
        self.max_intdeg = max_intdeg
        self.var_images = dict(var_images or {})


class Model:
    """Output of build_model: the extension, the comparison morphism data,
    bigraded variable counts, and certification bounds."""

    def __init__(self, spec, algebra, images, source_nvars):
        self.spec = spec
        self.algebra = algebra
        self.images = images
        self.source_nvars = source_nvars
        self.n_table = {}
        self.eps_table = {}
        for v in algebra.variables[source_nvars:]:
            table = self.n_table if v.family == "X" else self.eps_table
            key = (v.hdeg, v.intdeg)
            table[key] = table.get(key, 0) + 1

    @property
    def max_hdeg(self):
        return self.spec.max_hdeg

    @property
    def max_intdeg(self):
        return self.spec.max_intdeg

    def adjoined_variables(self):
        return self.algebra.variables[self.source_nvars:]

    def n_marginal(self, i):
        return sum(c for (h, _), c in self.n_table.items() if h == i)

    def eps_marginal(self, i):
        return sum(c for (h, _), c in self.eps_table.items() if h == i)

    def count_marginal(self, i):
        return self.n_marginal(i) + self.eps_marginal(i)

    def morphism(self):
        return DgMorphism(self.algebra, self.spec.target,
                          self.spec.base_map, self.images)

    def is_minimal(self):
        return self.algebra.is_minimal(over=self.source_nvars)

    def check_quasi_iso(self, through_hdeg=None):
        """Exactness of the cone in homological degrees 0..through (so
        H_i(q) is an isomorphism for i < through and surjective at it)."""
        through = self.max_hdeg - 1 if through_hdeg is None else through_hdeg
        q = self.morphism()
        C = _cone_of(q, self.max_hdeg, self.max_intdeg)
        for i in range(0, through + 1):
            for j in range(self.max_intdeg + 1):
                if hml.homology(C, i, j).dim != 0:
                    return False, (i, j)
        return True, None

    def free_rank_table(self):
        """Ranks of the underlying free module over the source: monomials
        in the adjoined variables only, counted per bidegree."""
        table = {(0, 0): 1}
        N, D = self.max_hdeg, self.max_intdeg
        for v in self.adjoined_variables():
            add = {}
            for (h, d), cnt in table.items():
                emax = 1 if v.hdeg % 2 == 1 else 10 ** 9
                e = 1
                while e <= emax:
                    h2, d2 = h + e * v.hdeg, d + e * v.intdeg
                    if h2 > N or d2 > D:
                        break
                    add[(h2, d2)] = add.get((h2, d2), 0) + cnt
                    e += 1
            for k, c in add.items():
                table[k] = table.get(k, 0) + c
        return table


def _cone_of(q, hmax, dmax):
    f = q.chain_map(hmax, dmax)
    return hml.cone(f)


def _cone_actions(U, target, base_map, cone_complex, Ucomp):
    """A0-action on a cone of q: U -> B: block diagonal, U-side by algebra
    multiplication, B-side by multiplication with the image of the base
    element."""
    tbase = U.base
    F = U.field

    def actions(i):
        def act(d, j):
            mats = []
            for bidx in range(tbase.dim(d)):
                if tbase.basis_hdeg(d, bidx) != 0:
                    continue
                mu = U.act_matrix(d, bidx, i - 1, j) if Ucomp.dim(i - 1, j) else \
                    la.ExactMatrix.zero(F, Ucomp.dim(i - 1, j + d), Ucomp.dim(i - 1, j))
                r_img = base_map(d, bidx)
                mb = _target_mult_matrix(target, r_img, i, j)
                nu, nb = Ucomp.dim(i - 1, j), target.basis_size(i, j)
                mu_rows = Ucomp.dim(i - 1, j + d)
                entries = {}
                for (r, c), v in mu.entries.items():
                    entries[(r, c)] = v
                for (r, c), v in mb.entries.items():
                    entries[(mu_rows + r, nu + c)] = v
                mats.append(la.ExactMatrix(
                    F, mu_rows + target.basis_size(i, j + d), nu + nb, entries))
            return mats
        return act
    return actions


def _target_mult_matrix(target, elem, i, j):
    """Matrix of multiplication by elem (hdeg 0, intdeg d) from target
    slice (i, j) to (i, j + d)."""
    F = target.field
    n = target.basis_size(i, j)
    m = target.basis_size(i, j + elem.intdeg)
    if elem.is_zero() or n == 0 or m == 0:
        return la.ExactMatrix.zero(F, m, n)
    entries = {}
    for cidx in range(n):
        unit = TargetElement(i, j, {cidx: F.one})
        prod = target.multiply(elem, unit)
        for r, v in prod.coords.items():
            entries[(r, cidx)] = v
    return la.ExactMatrix(F, m, n, entries)


def build_model(spec, reverse=False, name_prefix=None):
    """Construct the minimal model with the prescribed switching degree.

    Requires H_0 of the induced map to be surjective (checked).  Raises
    AdmissibilityError otherwise."""
    U = spec.source
    if U.max_hdeg < spec.max_hdeg or U.max_intdeg < spec.max_intdeg:
        U = DgAlgebra(U.base, U.variables, spec.max_hdeg, spec.max_intdeg)
    target = spec.target
    base_map = spec.base_map
    images = dict(spec.var_images)
    for v in U.variables:
        if v.id not in images:
            raise ValueError(f"missing target image for source variable {v.name}")
    s = spec.switching_degree
    N, D = spec.max_hdeg, spec.max_intdeg
    source_nvars = len(U.variables)

    q = DgMorphism(U, target, base_map, images)
    C = _cone_of(q, N + 1, D)
    for j in range(D + 1):
        if hml.homology(C, 0, j).dim != 0:
            raise AdmissibilityError(
                f"H0 of the map is not surjective (cone H0 nonzero at intdeg {j})")

    for i in range(N):
        Ucomp = hml.algebra_complex(U, N)
        q = DgMorphism(U, target, base_map, images)
        f = q.chain_map(N + 1, D)
        C = hml.cone(f)
        actions = _cone_actions(U, target, base_map, C, Ucomp)(i + 1)
        gens = hml.minimal_generators(C, i + 1, actions, dmax=D, reverse=reverse)
        hdeg = i + 1
        odd = hdeg % 2 == 1
        if odd:
            kind = EXTERIOR
        else:
            kind = POLYNOMIAL if hdeg < s else DIVIDED_POWER
        family = "X" if hdeg < s else "Y"
        prefix = name_prefix or ("x" if family == "X" else "y")
        for k, (j, col) in enumerate(gens):
            nu = Ucomp.dim(i, j)
            ucoords = {r: v for r, v in col.items() if r < nu}
            tcoords = {r - nu: v for r, v in col.items() if r >= nu}
            a = U.element_from_coords(i, j, ucoords)
            b = TargetElement(i + 1, j, tcoords)
            name = f"{prefix}{hdeg}_{len(U.variables) - source_nvars}"
            U = U.adjoin_variable(a, kind, name=name, family=family)
            images[len(U.variables) - 1] = b
    return Model(spec, U, images, source_nvars)


# ---------------------------------------------------------------------------
# Specializations
# ---------------------------------------------------------------------------

def residue_field_spec(A, max_hdeg, max_intdeg, switching_degree=0):
    """ModelSpec for a model of k over A along the augmentation."""
    target, base_map = augmentation_base_map(A.base, A.field)
    var_images = {v.id: target.zero(v.hdeg, v.intdeg) for v in A.variables}
    return ModelSpec(A, target, base_map, switching_degree,
                     max_hdeg, max_intdeg, var_images)


def acyclic_closure(A, max_hdeg, max_intdeg, reverse=False):
    """Acyclic closure of k over A (switching degree 0)."""
    return build_model(residue_field_spec(A, max_hdeg, max_intdeg, 0),
                       reverse=reverse)


def minimal_model(spec_or_A, max_hdeg=None, max_intdeg=None, reverse=False):
    """Minimal model (switching degree infinity).  Accepts a full ModelSpec
    or a source algebra (then the target is the residue field)."""
    if isinstance(spec_or_A, ModelSpec):
        spec = spec_or_A
        spec.switching_degree = INFINITY
    else:
        spec = residue_field_spec(spec_or_A, max_hdeg, max_intdeg, INFINITY)
    return build_model(spec, reverse=reverse)


def cover_algebra(tbase, max_hdeg, max_intdeg):
    """The polynomial cover S of a truncated quotient: same homological-
    degree-0 generators, no relations, as a DgAlgebra with no variables."""
    p = tbase.presentation
    gens = [v for v in p.variables if v.hdeg == 0]
    from .graded_base import BasePresentation
    cover = BasePresentation(p.field, gens, ())
    S = TruncatedBase(cover, tbase.D)
    return DgAlgebra(S, (), max_hdeg, max_intdeg)


def model_over_cover(tbase, max_hdeg, max_intdeg, switching_degree=INFINITY,
                     reverse=False):
    """Model of the graded quotient (as a dg-algebra with zero
    differential) over its polynomial cover S.  For switching degree
    infinity this computes the counts n_i^S."""
    p = tbase.presentation
    if not p.relations_in_square():
        raise AdmissibilityError(
            "presentation is not minimal: a relation has a linear term")
    S = cover_algebra(tbase, max_hdeg, max_intdeg)
    target = RingTarget(tbase)
    base_map = quotient_base_map(S.base, target)
    spec = ModelSpec(S, target, base_map, switching_degree,
                     max_hdeg, max_intdeg, {})
    return build_model(spec, reverse=reverse)


def koszul_complex(A, elements, names=None):
    """Adjoin one exterior variable per degree-0 cycle: the Koszul complex
    on the given base elements (each is (intdeg, {basis_index: scalar}))."""
    out = A
    for k, (j, coeffs) in enumerate(elements):
        if j < 1:
            raise AdmissibilityError("Koszul input must lie in the maximal ideal")
        z = out.base_element(j, coeffs)
        if z.hdeg != 0:
            raise AdmissibilityError("Koszul input must have homological degree 0")
        name = names[k] if names else f"e{k}"
        out = out.adjoin_variable(z, EXTERIOR, name=name)
    return out


def koszul_on_maximal_ideal(A):
    """K(m_{A0}, A): Koszul complex on the degree-0 generators of the
    irrelevant maximal ideal (one per homological-degree-0 base generator)."""
    p = A.base.presentation
    elements = []
    names = []
    for v in p.variables:
        if v.hdeg != 0:
            continue
        exps = tuple(1 if w is v else 0 for w in p.variables)
        nf = A.base.normal_form(v.intdeg, exps)
        elements.append((v.intdeg, nf))
        names.append(f"e_{v.name}")
    return koszul_complex(A, elements, names)
