"""Semifree extensions: bigraded elements, Koszul signs, divided powers,
the Leibniz differential, and variable adjunction.

A DgAlgebra is a truncated base ring with an ordered list of adjoined
variables.  Every element is homogeneous for the (homological, internal)
bidegree, and both the product and the differential preserve internal
degree, so all computations are exact per bidegree inside the bounds.

Monomial normal form: base element, then even variables by id, then odd
variables by strictly increasing id.  Only odd/odd transpositions carry
signs, so the sign of any product is the inversion count of the odd id
merge.
"""

from math import comb

from .errors import BoundExceededError, NotCycleError, ParityError

EXTERIOR = "exterior"
POLYNOMIAL = "polynomial"
DIVIDED_POWER = "dividedPower"


class Monomial:
    """evens: tuple of (var_id, exponent>=1) sorted by id;
    odds: strictly increasing tuple of var ids."""

    __slots__ = ("evens", "odds", "_hash")

    def __init__(self, evens=(), odds=()):
        self.evens = tuple(sorted(evens))
        self.odds = tuple(odds)
        assert all(e >= 1 for _, e in self.evens)
        assert all(a < b for a, b in zip(self.odds, self.odds[1:]))
        self._hash = hash((self.evens, self.odds))

    def is_trivial(self):
        return not self.evens and not self.odds

    def bare_variable(self):
        """var id if this monomial is a single variable to the first power,
        else None."""
        if len(self.odds) == 1 and not self.evens:
            return self.odds[0]
        if len(self.evens) == 1 and not self.odds and self.evens[0][1] == 1:
            return self.evens[0][0]
        return None

    def key(self):
        return (self.evens, self.odds)

    def __eq__(self, other):
        return self.evens == other.evens and self.odds == other.odds

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Monomial(evens={self.evens}, odds={self.odds})"


TRIVIAL_MONOMIAL = Monomial()


class DgVariable:
    __slots__ = ("id", "name", "hdeg", "intdeg", "kind", "boundary", "family")

    def __init__(self, id, name, hdeg, intdeg, kind, boundary, family=None):
        self.id = id
        self.name = name
        self.hdeg = hdeg
        self.intdeg = intdeg
        self.kind = kind
        self.boundary = boundary
        # family: "X" (polynomial/exterior side) or "Y" (divided-power side)
        # of the model that created this variable; None for hand-declared ones
        self.family = family

    def __repr__(self):
        return f"DgVariable({self.name}, ({self.hdeg},{self.intdeg}), {self.kind})"


class DgElement:
    """Bihomogeneous element: terms maps (base_deg, base_idx, Monomial) to a
    nonzero scalar."""

    __slots__ = ("hdeg", "intdeg", "terms")

    def __init__(self, hdeg, intdeg, terms=None):
        self.hdeg = hdeg
        self.intdeg = intdeg
        self.terms = dict(terms) if terms else {}

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (self.hdeg == other.hdeg and self.intdeg == other.intdeg
                and self.terms == other.terms)

    def __repr__(self):
        return f"DgElement(({self.hdeg},{self.intdeg}), {len(self.terms)} terms)"


class DgAlgebra:
    """base ring + ordered adjoined variables, inside bounds
    (N = max homological degree, D = max internal degree)."""

    def __init__(self, base, variables=(), max_hdeg=None, max_intdeg=None):
        self.base = base
        self.field = base.field
        self.variables = tuple(variables)
        self.max_intdeg = base.D if max_intdeg is None else max_intdeg
        if self.max_intdeg > base.D:
            raise ValueError("max_intdeg exceeds the base truncation bound")
        self.max_hdeg = self.max_intdeg if max_hdeg is None else max_hdeg
        self._bases = {}
        self._vmons = None

    # --- element constructors --------------------------------------------

    def zero(self, hdeg, intdeg):
        return DgElement(hdeg, intdeg)

    def one(self):
        return DgElement(0, 0, {(0, 0, TRIVIAL_MONOMIAL): self.field.one})

    def base_element(self, intdeg, coeffs):
        """Element of the base: coeffs is {basis_index: scalar}.  The basis
        elements involved must share one homological degree."""
        hdegs = {self.base.basis_hdeg(intdeg, i) for i in coeffs}
        if len(hdegs) > 1:
            raise ValueError("mixed homological degrees in base element")
        h = hdegs.pop() if hdegs else 0
        return DgElement(h, intdeg, {
            (intdeg, i, TRIVIAL_MONOMIAL): c for i, c in coeffs.items()
            if not self.field.is_zero(c)})

    def var_element(self, vid, exp=1):
        v = self.variables[vid]
        if v.hdeg % 2 == 1:
            if exp != 1:
                raise ValueError("odd variables square to zero")
            mon = Monomial((), (vid,))
        else:
            mon = Monomial(((vid, exp),), ())
        return DgElement(v.hdeg * exp, v.intdeg * exp,
                         {(0, 0, mon): self.field.one})

    def from_terms(self, hdeg, intdeg, terms):
        return DgElement(hdeg, intdeg,
                         {k: v for k, v in terms.items()
                          if not self.field.is_zero(v)})

    # --- linear structure --------------------------------------------------

    def add(self, u, v):
        if (u.hdeg, u.intdeg) != (v.hdeg, v.intdeg):
            raise ValueError("bidegree mismatch in addition")
        F = self.field
        terms = dict(u.terms)
        for k, c in v.terms.items():
            s = F.add(terms.get(k, F.zero), c)
            if F.is_zero(s):
                terms.pop(k, None)
            else:
                terms[k] = s
        return DgElement(u.hdeg, u.intdeg, terms)

    def scale(self, c, u):
        F = self.field
        if F.is_zero(c):
            return DgElement(u.hdeg, u.intdeg)
        return DgElement(u.hdeg, u.intdeg,
                         {k: F.mul(c, v) for k, v in u.terms.items()})

    def sub(self, u, v):
        return self.add(u, self.scale(self.field.neg(self.field.one), v))

    # --- multiplication ----------------------------------------------------

    def _merge_monomials(self, m1, m2):
        """Returns (int_coefficient, Monomial) or None when the product
        vanishes (repeated odd variable, or a divided-power binomial that is
        zero in the field is handled by the caller via the int coefficient)."""
        common_odd = set(m1.odds) & set(m2.odds)
        if common_odd:
            return None
        # inversion count of the odd merge
        inv = 0
        for a in m1.odds:
            for b in m2.odds:
                if a > b:
                    inv += 1
        odds = tuple(sorted(m1.odds + m2.odds))
        evens = dict(m1.evens)
        coeff = 1
        for vid, e in m2.evens:
            if vid in evens:
                a = evens[vid]
                if self.variables[vid].kind == DIVIDED_POWER:
                    coeff *= comb(a + e, a)
                evens[vid] = a + e
            else:
                evens[vid] = e
        sign = -1 if inv % 2 else 1
        return sign * coeff, Monomial(tuple(evens.items()), odds)

    def multiply(self, u, v):
        hdeg = u.hdeg + v.hdeg
        intdeg = u.intdeg + v.intdeg
        if hdeg > self.max_hdeg or intdeg > self.max_intdeg:
            raise BoundExceededError(
                f"product bidegree ({hdeg},{intdeg}) exceeds bounds "
                f"({self.max_hdeg},{self.max_intdeg})")
        F = self.field
        out = {}
        for (j1, i1, m1), c1 in u.terms.items():
            for (j2, i2, m2), c2 in v.terms.items():
                merged = self._merge_monomials(m1, m2)
                if merged is None:
                    continue
                icoeff, mon = merged
                c = F.mul(c1, F.mul(c2, F.from_int(icoeff)))
                if F.is_zero(c):
                    continue
                for i3, c3 in self.base.mult_basis(j1, i1, j2, i2).items():
                    key = (j1 + j2, i3, mon)
                    s = F.add(out.get(key, F.zero), F.mul(c, c3))
                    if F.is_zero(s):
                        out.pop(key, None)
                    else:
                        out[key] = s
        return DgElement(hdeg, intdeg, out)

    # --- differential ------------------------------------------------------

    def differential(self, u):
        if u.hdeg == 0:
            return DgElement(u.hdeg - 1, u.intdeg)
        F = self.field
        result = DgElement(u.hdeg - 1, u.intdeg)
        for (jb, ib, mon), c in u.terms.items():
            for vid, e in mon.evens:
                var = self.variables[vid]
                if var.boundary.is_zero():
                    continue
                mult = e if var.kind == POLYNOMIAL else 1
                cc = F.mul(c, F.from_int(mult))
                if F.is_zero(cc):
                    continue
                rest_evens = tuple((w, x) if w != vid else (w, e - 1)
                                   for w, x in mon.evens if w != vid or e > 1)
                rest = DgElement(
                    u.hdeg - var.hdeg, u.intdeg - var.intdeg,
                    {(jb, ib, Monomial(rest_evens, mon.odds)): cc})
                result = self.add(result, self.multiply(var.boundary, rest))
            for k, vid in enumerate(mon.odds):
                var = self.variables[vid]
                if var.boundary.is_zero():
                    continue
                # base and even-variable factors to the left are all of even
                # homological degree; only the k earlier odd factors sign
                sign = F.neg(F.one) if k % 2 == 1 else F.one
                rest_odds = mon.odds[:k] + mon.odds[k + 1:]
                rest = DgElement(
                    u.hdeg - var.hdeg, u.intdeg - var.intdeg,
                    {(jb, ib, Monomial(mon.evens, rest_odds)): F.mul(c, sign)})
                result = self.add(result, self.multiply(var.boundary, rest))
        return result

    # --- monomial bases ----------------------------------------------------

    def _variable_monomials(self):
        """dict (hdeg, intdeg) -> ordered list of Monomials within bounds."""
        if self._vmons is not None:
            return self._vmons
        table = {(0, 0): [TRIVIAL_MONOMIAL]}
        N, D = self.max_hdeg, self.max_intdeg
        for v in self.variables:
            new = {}
            for (h, d), mons in table.items():
                emax = 1 if v.hdeg % 2 == 1 else 10 ** 9
                e = 1
                while e <= emax:
                    h2, d2 = h + e * v.hdeg, d + e * v.intdeg
                    if h2 > N or d2 > D:
                        break
                    for m in mons:
                        if v.hdeg % 2 == 1:
                            m2 = Monomial(m.evens, m.odds + (v.id,))
                        else:
                            m2 = Monomial(m.evens + ((v.id, e),), m.odds)
                        new.setdefault((h2, d2), []).append(m2)
                    e += 1
            for k, ms in new.items():
                table.setdefault(k, []).extend(ms)
        for ms in table.values():
            ms.sort(key=lambda m: m.key())
        self._vmons = table
        return table

    def basis_of_bidegree(self, i, j):
        """Ordered basis labels (base_deg, base_idx, Monomial) of bidegree
        (i, j)."""
        if i > self.max_hdeg or j > self.max_intdeg or i < 0 or j < 0:
            raise BoundExceededError(
                f"bidegree ({i},{j}) outside bounds "
                f"({self.max_hdeg},{self.max_intdeg})")
        hit = self._bases.get((i, j))
        if hit is not None:
            return hit
        vmons = self._variable_monomials()
        out = []
        for (h, d), mons in sorted(vmons.items()):
            if d > j:
                continue
            jb = j - d
            for idx in range(self.base.dim(jb)):
                if self.base.basis_hdeg(jb, idx) != i - h:
                    continue
                for m in mons:
                    out.append((jb, idx, m))
        out.sort(key=lambda t: (t[2].key(), t[0], t[1]))
        self._bases[(i, j)] = out
        return out

    def coords(self, u):
        basis = self.basis_of_bidegree(u.hdeg, u.intdeg)
        pos = {k: n for n, k in enumerate(basis)}
        return {pos[k]: c for k, c in u.terms.items()}

    def element_from_coords(self, i, j, coords):
        basis = self.basis_of_bidegree(i, j)
        return DgElement(i, j, {basis[n]: c for n, c in coords.items()
                                if not self.field.is_zero(c)})

    def diff_matrix(self, i, j):
        """Matrix of the differential from bidegree (i, j) to (i-1, j)."""
        from .exact_linear import ExactMatrix
        cols = self.basis_of_bidegree(i, j)
        if i == 0:
            return ExactMatrix.zero(self.field, 0, len(cols))
        rows = self.basis_of_bidegree(i - 1, j)
        pos = {k: n for n, k in enumerate(rows)}
        entries = {}
        for cidx, key in enumerate(cols):
            du = self.differential(DgElement(i, j, {key: self.field.one}))
            for k, c in du.terms.items():
                entries[(pos[k], cidx)] = c
        return ExactMatrix(self.field, len(rows), len(cols), entries)

    def act_matrix(self, d, bidx, i, j):
        """Matrix of left multiplication by the degree-(0, d) base basis
        element bidx, from bidegree (i, j) to (i, j + d).  The base element
        must be homologically degree 0 (it lies in A_0)."""
        from .exact_linear import ExactMatrix
        if self.base.basis_hdeg(d, bidx) != 0:
            raise ValueError("A0-action requires a homological-degree-0 element")
        r = self.base_element(d, {bidx: self.field.one})
        cols = self.basis_of_bidegree(i, j)
        rows = self.basis_of_bidegree(i, j + d)
        pos = {k: n for n, k in enumerate(rows)}
        entries = {}
        for cidx, key in enumerate(cols):
            p = self.multiply(r, DgElement(i, j, {key: self.field.one}))
            for k, c in p.terms.items():
                entries[(pos[k], cidx)] = c
        return ExactMatrix(self.field, len(rows), len(cols), entries)

    # --- adjunction --------------------------------------------------------

    def adjoin_variable(self, z, kind, name=None, family=None):
        """Adjoin one variable of bidegree (|z|+1, intdeg z) with boundary z.
        z must be a cycle; kind must match the parity of |z|+1."""
        hdeg = z.hdeg + 1
        odd = hdeg % 2 == 1
        if odd and kind != EXTERIOR:
            raise ParityError(f"odd homological degree {hdeg} requires kind exterior")
        if not odd and kind not in (POLYNOMIAL, DIVIDED_POWER):
            raise ParityError(
                f"even homological degree {hdeg} requires polynomial or dividedPower")
        if hdeg > self.max_hdeg or z.intdeg > self.max_intdeg:
            raise BoundExceededError("adjoined variable outside bounds")
        if not odd and z.intdeg < 1:
            raise ValueError("even variables need internal degree >= 1")
        if z.hdeg > 0 and not self.differential(z).is_zero():
            raise NotCycleError("boundary of an adjoined variable must be a cycle")
        vid = len(self.variables)
        var = DgVariable(vid, name or f"v{vid}", hdeg, z.intdeg, kind, z,
                         family=family)
        return DgAlgebra(self.base, self.variables + (var,),
                         self.max_hdeg, self.max_intdeg)

    # --- minimality --------------------------------------------------------

    def is_minimal(self, over=0):
        """Prop-style minimality test: no adjoined variable's boundary has a
        bare (unit base coefficient, single later-variable) term, and no
        unit-constant term.  Variables with index < over count as part of
        the coefficient algebra.  Returns (bool, witness)."""
        for v in self.variables[over:]:
            for (jb, ib, mon), c in v.boundary.terms.items():
                if jb != 0:
                    continue
                bare = mon.bare_variable()
                if mon.is_trivial() or (bare is not None and bare >= over):
                    return False, (v.name, (jb, ib, mon))
        return True, None

    # --- misc ---------------------------------------------------------------

    def variable_names(self):
        return [v.name for v in self.variables]

    def term_name(self, key):
        jb, ib, mon = key
        parts = []
        bname = self.base.basis_name(jb, ib)
        if bname != "1" or mon.is_trivial():
            parts.append(bname)
        for vid, e in mon.evens:
            v = self.variables[vid]
            if e == 1:
                parts.append(v.name)
            elif v.kind == DIVIDED_POWER:
                parts.append(f"{v.name}^({e})")
            else:
                parts.append(f"{v.name}^{e}")
        for vid in mon.odds:
            parts.append(self.variables[vid].name)
        return "*".join(parts)
