"""Differential polynomial superalgebras with exact rational coefficients.

The carrier type is ``Element``: a finite linear combination of signed jet
monomials over a fixed ``AlgebraSignature``.  Generators may be even or odd,
carry a conformal weight, and may be flagged invertible (Laurent exponents on
their order-0 jet).  An invertible generator may additionally be *defined* as
a polynomial in the other generators (used for det(x) on matrix groups), in
which case elements are kept in a localized normal form: no positive powers
of the unit, and no denominator group divisible by the defining polynomial.

Everything is immutable and exact; no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

EVEN = 0
ODD = 1

Order = Union[int, tuple]


class GeneratorSpec(NamedTuple):
    name: str
    parity: int = EVEN
    weight: int = 0
    invertible: bool = False


class JetVariable(NamedTuple):
    gen: str
    order: Order = 0


class DeformationParameter(NamedTuple):
    name: str
    parity: int
    nilpotency: int  # monomials with exponent >= nilpotency vanish


class SignatureMismatch(ValueError):
    pass


class LaurentUnsupported(ValueError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class AlgebraSignature:
    """Generators, base variables and nilpotent deformation parameters.

    ``directions`` is the number of total-derivative directions; the algebra
    layer uses 1, the two-dimensional jet calculus uses 2.  Jet orders are
    ints when ``directions == 1`` and tuples of that length otherwise.
    """

    def __init__(self, generators: Sequence[GeneratorSpec],
                 base_variables: Sequence[str] = (),
                 parameters: Sequence[DeformationParameter] = (),
                 directions: int = 1,
                 unit_definitions: Optional[Mapping[str, "Element"]] = None):
        gens = []
        for g in generators:
            if not isinstance(g, GeneratorSpec):
                g = GeneratorSpec(*g)
            gens.append(g)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for g in gens:
            if g.invertible and (g.parity == ODD or g.weight != 0):
                raise ValueError(f"invertible generator {g.name} must be even of weight 0")
        self.generators = tuple(gens)
        self.base_variables = tuple(base_variables)
        self.parameters = tuple(DeformationParameter(*p) for p in parameters)
        if set(self.base_variables) & set(names):
            raise ValueError("base variable clashes with a generator name")
        self.directions = int(directions)
        self._gen_index = {g.name: i for i, g in enumerate(gens)}
        self._base_index = {b: i for i, b in enumerate(self.base_variables)}
        self._param_index = {p.name: i for i, p in enumerate(self.parameters)}
        # definitions of localized units, keyed by generator index
        self.unit_definitions: dict[int, "Element"] = {}
        if unit_definitions:
            for name, elem in unit_definitions.items():
                gi = self._gen_index[name]
                if not self.generators[gi].invertible:
                    raise ValueError(f"{name} is not invertible")
                self.unit_definitions[gi] = elem

    def gen_index(self, name: str) -> int:
        try:
            return self._gen_index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def zero_order(self) -> Order:
        return 0 if self.directions == 1 else (0,) * self.directions

    def raise_order(self, order: Order, direction: int = 0) -> Order:
        if self.directions == 1:
            return order + 1
        return tuple(m + (1 if i == direction else 0) for i, m in enumerate(order))

    def order_weight(self, order: Order) -> int:
        return order if self.directions == 1 else sum(order)

    def jet_weight(self, gi: int, order: Order) -> int:
        return self.generators[gi].weight + self.order_weight(order)

    def __eq__(self, other):
        return self is other or (isinstance(other, AlgebraSignature)
                                 and self.generators == other.generators
                                 and self.base_variables == other.base_variables
                                 and self.parameters == other.parameters
                                 and self.directions == other.directions)

    def __hash__(self):
        return hash((self.generators, self.base_variables, self.parameters, self.directions))

    def __repr__(self):
        return (f"AlgebraSignature({[g.name for g in self.generators]}, "
                f"bases={list(self.base_variables)}, d={self.directions})")


# A monomial is (jets, bases, params):
#   jets:   tuple of ((gen_index, order), exponent), sorted by key
#   bases:  tuple of (base_index, exponent), sorted
#   params: tuple of (param_index, exponent), sorted
# The stored coefficient carries the Koszul sign of sorting odd factors into
# this canonical order (jets first, then parameters).
ONE_MON = ((), (), ())


def _mon_parity(sig: AlgebraSignature, mon) -> int:
    jets, _, params = mon
    p = 0
    for (gi, _o), e in jets:
        if sig.generators[gi].parity:
            p += e
    for pi, e in params:
        if sig.parameters[pi].parity:
            p += e
    return p & 1


def _mon_weight(sig: AlgebraSignature, mon) -> int:
    jets, _, _ = mon
    return sum(e * sig.jet_weight(gi, o) for (gi, o), e in jets)


def _odd_keys(sig: AlgebraSignature, mon):
    """Ordered odd-factor keys of a canonical monomial.

    Jets sort before parameters; within each block the canonical order is
    the storage order.  Odd exponents are 0/1 so each key appears at most
    once.
    """
    jets, _, params = mon
    out = []
    for (gi, o), e in jets:
        if sig.generators[gi].parity and e:
            out.append((0, (gi, o)))
    for pi, e in params:
        if sig.parameters[pi].parity and e:
            out.append((1, pi))
    return out


def _merge_section(sa, sb):
    """Merge two sorted (key, exp) tuples adding exponents; drop zeros."""
    out = []
    i = j = 0
    na, nb = len(sa), len(sb)
    while i < na and j < nb:
        ka, ea = sa[i]
        kb, eb = sb[j]
        if ka < kb:
            out.append(sa[i]); i += 1
        elif kb < ka:
            out.append(sb[j]); j += 1
        else:
            e = ea + eb
            if e:
                out.append((ka, e))
            i += 1; j += 1
    out.extend(sa[i:])
    out.extend(sb[j:])
    return tuple(out)


def _mul_monomials(sig: AlgebraSignature, ma, mb):
    """Product of canonical monomials.  Returns (monomial, sign) or None."""
    ja, ba, pa = ma
    jb, bb, pb = mb
    # Koszul sign: inversions between odd factors of ma and of mb
    oa = _odd_keys(sig, ma)
    ob = _odd_keys(sig, mb)
    sign = 1
    if oa and ob:
        inv = 0
        for kb in ob:
            for ka in oa:
                if kb < ka:
                    inv += 1
        if inv & 1:
            sign = -1
    jets = _merge_section(ja, jb)
    # odd square check and Laurent validation
    for (gi, o), e in jets:
        g = sig.generators[gi]
        if g.parity and e > 1:
            return None
        if e < 0 and not (g.invertible and sig.order_weight(o) == 0):
            raise LaurentUnsupported(f"negative power of non-invertible jet {g.name}")
    params = _merge_section(pa, pb)
    for pi, e in params:
        par = sig.parameters[pi]
        if par.parity and e > 1:
            return None
        if e >= par.nilpotency:
            return None
        if e < 0:
            raise ValueError("negative parameter exponent")
    bases = _merge_section(ba, bb)
    for _bi, e in bases:
        if e < 0:
            raise ValueError("negative base-variable exponent")
    return (jets, bases, params), sign


def _mon_cmp(m1, m2) -> int:
    """Graded-lex comparison of jet parts (a true monomial order, needed for
    the localization division to terminate with a unique normal form)."""
    j1, j2 = dict(m1[0]), dict(m2[0])
    d1 = sum(j1.values())
    d2 = sum(j2.values())
    if d1 != d2:
        return -1 if d1 < d2 else 1
    for k in sorted(set(j1) | set(j2)):
        e1, e2 = j1.get(k, 0), j2.get(k, 0)
        if e1 != e2:
            return 1 if e1 > e2 else -1
    return 0


def _max_mon(terms):
    best = None
    for m in terms:
        if best is None or _mon_cmp(m, best) > 0:
            best = m
    return best


def _mon_divide(mon, lt):
    """Divide the jet part of mon by the jet part of lt (a plain monomial).

    Returns the quotient monomial or None.  Base/parameter parts pass
    through untouched (the divisor has none).
    """
    jets = dict(mon[0])
    for k, e in lt[0]:
        have = jets.get(k, 0)
        if have < e:
            return None
        rest = have - e
        if rest:
            jets[k] = rest
        else:
            del jets[k]
    return (tuple(sorted(jets.items())), mon[1], mon[2])


class Element:
    """A finite rational combination of canonical jet monomials."""

    __slots__ = ("sig", "terms", "_hash")

    def __init__(self, sig: AlgebraSignature, terms: Optional[Mapping] = None):
        self.sig = sig
        self.terms = dict(terms) if terms else {}
        self._hash = None

    # -- construction -------------------------------------------------

    @classmethod
    def _new(cls, sig, terms: dict) -> "Element":
        e = cls.__new__(cls)
        e.sig = sig
        e.terms = {m: c for m, c in terms.items() if c}
        e._hash = None
        if sig.unit_definitions and e.terms:
            e._normalize_units()
        return e

    @classmethod
    def zero(cls, sig) -> "Element":
        return cls._new(sig, {})

    @classmethod
    def const(cls, sig, c) -> "Element":
        c = _as_fraction(c)
        return cls._new(sig, {ONE_MON: c} if c else {})

    @classmethod
    def one(cls, sig) -> "Element":
        return cls.const(sig, 1)

    @classmethod
    def var(cls, sig, name: str, order: Optional[Order] = None, exp: int = 1) -> "Element":
        gi = sig.gen_index(name)
        if order is None:
            order = sig.zero_order()
        g = sig.generators[gi]
        if g.parity and abs(exp) > 1:
            return cls.zero(sig)
        if exp < 0 and not (g.invertible and sig.order_weight(order) == 0):
            raise LaurentUnsupported(f"negative power of {name}")
        if exp == 0:
            return cls.one(sig)
        mon = ((((gi, order), exp),), (), ())
        return cls._new(sig, {mon: Fraction(1)})

    @classmethod
    def base(cls, sig, name: str, exp: int = 1) -> "Element":
        bi = sig._base_index[name]
        if exp < 0:
            raise ValueError("negative base exponent")
        if exp == 0:
            return cls.one(sig)
        return cls._new(sig, {((), ((bi, exp),), ()): Fraction(1)})

    @classmethod
    def param(cls, sig, name: str, exp: int = 1) -> "Element":
        pi = sig._param_index[name]
        p = sig.parameters[pi]
        if exp >= p.nilpotency or (p.parity and exp > 1):
            return cls.zero(sig)
        if exp == 0:
            return cls.one(sig)
        return cls._new(sig, {((), (), ((pi, exp),)): Fraction(1)})

    # -- localization normal form -------------------------------------

    def _normalize_units(self):
        sig = self.sig
        for gi, defn in sig.unit_definitions.items():
            if not any(k[0] == gi for m in self.terms for k, _e in m[0]):
                continue
            self._reduce_unit(gi, defn)

    def _reduce_unit(self, gi: int, defn: "Element"):
        """Eliminate positive powers of the unit and reduce denominators."""
        sig = self.sig
        zo = sig.zero_order()
        key = (gi, zo)
        # replace positive powers by the defining polynomial
        while True:
            pos = None
            for m, c in self.terms.items():
                for k, e in m[0]:
                    if k == key and e > 0:
                        pos = (m, c, e)
                        break
                if pos:
                    break
            if not pos:
                break
            m, c, e = pos
            del self.terms[m]
            stripped = (tuple(kk for kk in m[0] if kk[0] != key), m[1], m[2])
            piece = Element(sig, {stripped: c})
            add = _raw_mul(piece, _raw_pow(defn, e))
            for mm, cc in add.terms.items():
                self.terms[mm] = self.terms.get(mm, Fraction(0)) + cc
                if not self.terms[mm]:
                    del self.terms[mm]
        # group terms by denominator power and divide while possible
        lt_mon, lt_coeff = _leading_term(defn)
        changed = True
        while changed:
            changed = False
            groups: dict[int, dict] = {}
            for m, c in self.terms.items():
                k = 0
                for kk, e in m[0]:
                    if kk == key:
                        k = -e
                        break
                if k > 0:
                    stripped = (tuple(x for x in m[0] if x[0] != key), m[1], m[2])
                    groups.setdefault(k, {})[stripped] = c
            for k, grp in groups.items():
                q = _poly_divide(self.sig, grp, defn.terms, lt_mon, lt_coeff)
                if q is None:
                    continue
                for m in list(self.terms):
                    kk = 0
                    for kkk, e in m[0]:
                        if kkk == key:
                            kk = -e
                    if kk == k:
                        del self.terms[m]
                newpow = k - 1
                for m, c in q.items():
                    if newpow:
                        jets = tuple(sorted(list(m[0]) + [(key, -newpow)]))
                        m = (jets, m[1], m[2])
                    self.terms[m] = self.terms.get(m, Fraction(0)) + c
                    if not self.terms[m]:
                        del self.terms[m]
                changed = True

    # -- basic protocol -----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element.const(self.sig, other)
        if not isinstance(other, Element):
            return NotImplemented
        return self.sig == other.sig and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element.const(self.sig, other)
        if self.sig != other.sig:
            raise SignatureMismatch("operands over different signatures")
        t = dict(self.terms)
        for m, c in other.terms.items():
            nc = t.get(m, Fraction(0)) + c
            if nc:
                t[m] = nc
            else:
                t.pop(m, None)
        return Element._new(self.sig, t)

    __radd__ = __add__

    def __neg__(self):
        return Element._new(self.sig, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element.const(self.sig, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.sig != other.sig:
            raise SignatureMismatch("operands over different signatures")
        return Element._new(self.sig, _raw_mul(self, other).terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "Element":
        c = _as_fraction(c)
        if not c:
            return Element.zero(self.sig)
        return Element._new(self.sig, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Element":
        if n < 0:
            raise ValueError("negative Element power")
        out = Element.one(self.sig)
        for _ in range(n):
            out = out * self
        return out

    # -- structure queries --------------------------------------------

    def parity_components(self):
        """(even part, odd part)."""
        ev, od = {}, {}
        for m, c in self.terms.items():
            (od if _mon_parity(self.sig, m) else ev)[m] = c
        return Element._new(self.sig, ev), Element._new(self.sig, od)

    def parity(self) -> Optional[int]:
        """Parity if homogeneous, else None; zero reports even."""
        ps = {_mon_parity(self.sig, m) for m in self.terms}
        if not ps:
            return EVEN
        return ps.pop() if len(ps) == 1 else None

    def weight_component(self, w: int) -> "Element":
        return Element._new(self.sig, {m: c for m, c in self.terms.items()
                                       if _mon_weight(self.sig, m) == w})

    def weights(self):
        return sorted({_mon_weight(self.sig, m) for m in self.terms})

    def weight(self) -> Optional[int]:
        ws = self.weights()
        if not ws:
            return 0
        return ws[0] if len(ws) == 1 else None

    def jet_variables(self):
        """All (gen_index, order) keys on which a partial can be nonzero."""
        seen = set()
        unit_gis = set()
        for m in self.terms:
            for (gi, o), _e in m[0]:
                if gi in self.sig.unit_definitions:
                    unit_gis.add(gi)
                else:
                    seen.add((gi, o))
        for gi in unit_gis:
            for m in self.sig.unit_definitions[gi].terms:
                for (gj, o), _e in m[0]:
                    seen.add((gj, o))
        return sorted(seen)

    def max_jet(self):
        """Highest (order, gen_index) jet with order >= 1, or None."""
        best = None
        for m in self.terms:
            for (gi, o), _e in m[0]:
                ow = self.sig.order_weight(o)
                if ow >= 1:
                    k = (ow, gi, o)
                    if best is None or k > best:
                        best = k
        return None if best is None else (best[1], best[2])

    def constant_part(self) -> "Element":
        """Terms free of jet variables (base variables and parameters kept)."""
        return Element._new(self.sig, {m: c for m, c in self.terms.items() if not m[0]})

    def coefficient_of_jet(self, gi: int, order: Order) -> "Element":
        """Left-derivative-style linear coefficient of the given jet.

        Only valid when the jet occurs at most to the first power in every
        term (used by the exactness witness construction).
        """
        key = (gi, order)
        out = {}
        for m, c in self.terms.items():
            jets = dict(m[0])
            if key not in jets:
                continue
            if jets[key] != 1:
                raise ValueError("jet occurs nonlinearly")
            sgn = 1
            if self.sig.generators[gi].parity:
                before = 0
                for (gj, o), e in m[0]:
                    if (gj, o) == key:
                        break
                    if self.sig.generators[gj].parity and e:
                        before += 1
                if before & 1:
                    sgn = -1
            del jets[key]
            mm = (tuple(sorted(jets.items())), m[1], m[2])
            out[mm] = out.get(mm, Fraction(0)) + sgn * c
        return Element._new(self.sig, out)

    def has_laurent(self) -> bool:
        return any(e < 0 for m in self.terms for _k, e in m[0])

    def mentions_base(self, name: str) -> bool:
        bi = self.sig._base_index[name]
        return any(b == bi for m in self.terms for b, _e in m[1])

    # -- printing -------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=_mon_sort_key):
            c = self.terms[m]
            bits.append(f"{c}*{_mon_str(self.sig, m)}")
        return " + ".join(bits).replace("+ -", "- ")


def _mon_sort_key(mon):
    return (mon[0], mon[1], mon[2])


def _mon_str(sig, mon):
    jets, bases, params = mon
    if not (jets or bases or params):
        return "1"
    parts = []
    for (gi, o), e in jets:
        nm = sig.generators[gi].name
        ow = o if sig.directions == 1 else list(o)
        s = nm if not sig.order_weight(o) else f"{nm}'({ow})"
        if e != 1:
            s += f"^{e}"
        parts.append(s)
    for bi, e in bases:
        s = sig.base_variables[bi]
        if e != 1:
            s += f"^{e}"
        parts.append(s)
    for pi, e in params:
        s = sig.parameters[pi].name
        if e != 1:
            s += f"^{e}"
        parts.append(s)
    return "*".join(parts)


def _raw_mul(a: Element, b: Element) -> Element:
    terms: dict = {}
    sig = a.sig
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            r = _mul_monomials(sig, ma, mb)
            if r is None:
                continue
            mon, sgn = r
            c = ca * cb * sgn
            nc = terms.get(mon, Fraction(0)) + c
            if nc:
                terms[mon] = nc
            else:
                terms.pop(mon, None)
    out = Element(sig, terms)
    return out


def _raw_pow(a: Element, n: int) -> Element:
    out = Element.const(a.sig, 1)
    for _ in range(n):
        out = _raw_mul(out, a)
    return out


def _leading_term(defn: Element):
    lt = _max_mon(defn.terms)
    return lt, defn.terms[lt]


def _poly_divide(sig, num: dict, den: dict, lt_mon, lt_coeff):
    """Exact division of a term-dict by a plain polynomial; None if inexact."""
    rem = dict(num)
    quo: dict = {}
    while rem:
        m = _max_mon(rem)
        c = rem[m]
        qm = _mon_divide(m, lt_mon)
        if qm is None:
            return None
        qc = c / lt_coeff
        quo[qm] = quo.get(qm, Fraction(0)) + qc
        for dm, dc in den.items():
            r = _mul_monomials(sig, qm, dm)
            if r is None:
                continue
            mon, sgn = r
            nc = rem.get(mon, Fraction(0)) - qc * dc * sgn
            if nc:
                rem[mon] = nc
            else:
                rem.pop(mon, None)
    return quo


# -- public operations -------------------------------------------------

def add(a: Element, b: Element) -> Element:
    return a + b


def mul(a: Element, b: Element) -> Element:
    return a * b


def scale(c, a: Element) -> Element:
    return a.scale(c)


def _factor_derivative(sig, gi, order, exp, direction) -> Optional[Element]:
    """d/dT of a single factor (jet or unit power); None when zero."""
    if gi in sig.unit_definitions:
        dd = total_derivative(sig.unit_definitions[gi], direction)
        if dd.is_zero():
            return None
        return Element.var(sig, sig.generators[gi].name, order, exp - 1).scale(exp) * dd
    g = sig.generators[gi]
    up = sig.raise_order(order, direction)
    if g.parity:
        # exp is 1 here
        return Element.var(sig, g.name, up)
    lower = Element.var(sig, g.name, order, exp - 1) if exp != 1 else Element.one(sig)
    return lower.scale(exp) * Element.var(sig, g.name, up)


def total_derivative(a: Element, direction: int = 0) -> Element:
    """The vertical total derivative T: raises jet orders, kills bases/params."""
    sig = a.sig
    out = Element.zero(sig)
    for m, c in a.terms.items():
        jets, bases, params = m
        for idx, ((gi, o), e) in enumerate(jets):
            rest = (jets[:idx] + jets[idx + 1:], bases, params)
            sgn = 1
            if sig.generators[gi].parity:
                before = sum(1 for (gj, oo), ee in jets[:idx]
                             if sig.generators[gj].parity and ee)
                if before & 1:
                    sgn = -1
            dfac = _factor_derivative(sig, gi, o, e, direction)
            if dfac is None:
                continue
            piece = dfac * Element._new(sig, {rest: Fraction(1)})
            out = out + piece.scale(sgn * c)
    return out


def partial(a: Element, v: JetVariable) -> Element:
    """Left super-derivative with respect to a jet variable."""
    sig = a.sig
    gi = sig.gen_index(v.gen) if isinstance(v, JetVariable) else v[0]
    order = v.order if isinstance(v, JetVariable) else v[1]
    key = (gi, order)
    vpar = sig.generators[gi].parity
    out: dict = {}
    for m, c in a.terms.items():
        jets, bases, params = m
        jd = dict(jets)
        if key in jd:
            e = jd[key]
            sgn = 1
            if vpar:
                before = 0
                for (gj, o), ee in jets:
                    if (gj, o) == key:
                        break
                    if sig.generators[gj].parity and ee:
                        before += 1
                if before & 1:
                    sgn = -1
            e2 = e - 1
            if e2:
                jd[key] = e2
            else:
                del jd[key]
            mm = (tuple(sorted(jd.items())), bases, params)
            nc = out.get(mm, Fraction(0)) + sgn * c * e
            if nc:
                out[mm] = nc
            else:
                out.pop(mm, None)
    result = Element._new(sig, out)
    # chain rule through defined units (even, order-0 definitions)
    units_present = {gj for m in a.terms for (gj, _o), _e in m[0]
                     if gj in sig.unit_definitions}
    if units_present and sig.order_weight(order) == 0:
        for ugi in sorted(units_present):
            defn = sig.unit_definitions[ugi]
            ddef = partial(defn, JetVariable(sig.generators[gi].name, order))
            if ddef.is_zero():
                continue
            for m, c in a.terms.items():
                jets, bases, params = m
                for idx, ((gj, o), e) in enumerate(jets):
                    if gj != ugi:
                        continue
                    lower = Element._new(sig, {((((gj, o), e - 1),) if e != 1 else (), (), ()): Fraction(1)})
                    rest = (jets[:idx] + jets[idx + 1:], bases, params)
                    piece = ddef * lower.scale(e) * Element._new(sig, {rest: Fraction(1)})
                    for mm, cc in piece.scale(c).terms.items():
                        nc = result.terms.get(mm, Fraction(0)) + cc
                        if nc:
                            result.terms[mm] = nc
                        else:
                            result.terms.pop(mm, None)
        result = Element._new(sig, result.terms)
    return result


def partial_base(a: Element, name: str) -> Element:
    """Explicit derivative with respect to a base variable (even)."""
    sig = a.sig
    bi = sig._base_index[name]
    out: dict = {}
    for m, c in a.terms.items():
        jets, bases, params = m
        bd = dict(bases)
        if bi in bd:
            e = bd[bi]
            if e == 1:
                del bd[bi]
            else:
                bd[bi] = e - 1
            mm = (jets, tuple(sorted(bd.items())), params)
            nc = out.get(mm, Fraction(0)) + c * e
            if nc:
                out[mm] = nc
            else:
                out.pop(mm, None)
    return Element._new(sig, out)


def variational_derivative(a: Element, gen: str, direction: int = 0) -> Element:
    """Euler operator: sum over m of (-T)^m (d/d jet(gen, m))."""
    sig = a.sig
    gi = sig.gen_index(gen)
    if sig.directions != 1:
        raise ValueError("variational_derivative is one-dimensional; use jetforms for d=2")
    orders = sorted({o for m in a.terms for (gj, o), _e in m[0] if gj == gi})
    # chain-rule support: defined units contribute at order 0
    if any(gj in sig.unit_definitions for m in a.terms for (gj, _o), _e in m[0]):
        for ugi in sig.unit_definitions:
            if any(gj == ugi for m in a.terms for (gj, _o), _e in m[0]):
                if 0 not in orders and any(
                        gk == gi for mm in sig.unit_definitions[ugi].terms
                        for (gk, _oo), _ee in mm[0]):
                    orders.append(0)
    out = Element.zero(sig)
    for o in sorted(set(orders)):
        p = partial(a, JetVariable(gen, o))
        for _ in range(o):
            p = total_derivative(p, direction)
        out = out + (p if o % 2 == 0 else -p)
    return out


def is_exact(a: Element):
    """Membership in Im(T) for polynomial elements, with a witness.

    Returns (True, e) with T(e) == a, or (False, None).  Laurent input is
    rejected: the Euler criterion is incomplete on the localized ring.
    """
    sig = a.sig
    if sig.directions != 1:
        raise ValueError("is_exact is one-dimensional")
    if a.has_laurent() or any(gi in sig.unit_definitions
                              for m in a.terms for (gi, _o), _e in m[0]):
        raise LaurentUnsupported("is_exact requires polynomial coefficients")
    if a.constant_part():
        return False, None
    for g in sig.generators:
        if not variational_derivative(a, g.name).is_zero():
            return False, None
    # deterministic integration by parts: kill the maximal jet repeatedly
    rem = a
    witness = Element.zero(sig)
    while True:
        top = rem.max_jet()
        if top is None:
            break
        gi, order = top
        gname = sig.generators[gi].name
        down = order - 1
        coeff = rem.coefficient_of_jet(gi, order)  # raises if nonlinear
        if sig.generators[gi].parity:
            # for odd tops of exact elements the coefficient never contains
            # the next-lower jet; T(w*B) = v*B + w*T(B) integrates it
            piece = Element.var(sig, gname, down) * coeff
        else:
            # split by the power of the next-lower jet: B*w^k integrates to
            # B*w^(k+1)/(k+1)
            piece = Element.zero(sig)
            key = (gi, down)
            for m, c in coeff.terms.items():
                k = dict(m[0]).get(key, 0)
                mono = Element._new(sig, {m: c})
                piece = piece + (mono * Element.var(sig, gname, down)).scale(
                    Fraction(1, k + 1))
        rem = rem - total_derivative(piece)
        witness = witness + piece
        nxt = rem.max_jet()
        if nxt is not None:
            measure = (sig.order_weight(nxt[1]), nxt[0])
            if measure >= (sig.order_weight(order), gi):
                raise ArithmeticError("integration by parts failed to descend")
    if rem.is_zero():
        return True, witness
    return False, None


def substitute(a: Element, images: Mapping[str, Element],
               direction: int = 0) -> Element:
    """Substitute generators by elements, prolonged through jets by T."""
    sig = a.sig
    idx_images = {sig.gen_index(n): e for n, e in images.items()}
    for n, e in images.items():
        gi = sig.gen_index(n)
        want = sig.generators[gi].parity
        got = e.parity()
        if got is None or got != want:
            raise ValueError(f"substitution for {n} has wrong parity")
    cache: dict = {}

    def image_of(gi, order, exp):
        if gi not in idx_images:
            return Element.var(sig, sig.generators[gi].name, order, exp)
        k = (gi, order)
        if k not in cache:
            v = idx_images[gi]
            n = sig.order_weight(order)
            for _ in range(n):
                v = total_derivative(v, direction)
            cache[k] = v
        v = cache[k]
        if exp < 0:
            raise LaurentUnsupported("cannot substitute into a Laurent power")
        return v ** exp

    out = Element.zero(sig)
    for m, c in a.terms.items():
        jets, bases, params = m
        piece = Element._new(sig, {((), bases, params): c})
        for (gi, o), e in jets:
            piece = piece * image_of(gi, o, e)
        out = out + piece
    return out


# -- serialization ------------------------------------------------------

def element_to_records(a: Element) -> list:
    sig = a.sig
    recs = []
    for m in sorted(a.terms, key=_mon_sort_key):
        jets, bases, params = m
        recs.append({
            "monomial": [[sig.generators[gi].name,
                          o if sig.directions == 1 else list(o), e]
                         for (gi, o), e in jets],
            "base": [[sig.base_variables[bi], e] for bi, e in bases],
            "params": [[sig.parameters[pi].name, e] for pi, e in params],
            "coeff": f"{a.terms[m].numerator}/{a.terms[m].denominator}",
        })
    return recs


def element_from_records(sig: AlgebraSignature, recs: Iterable) -> Element:
    out = Element.zero(sig)
    for r in recs:
        c = Fraction(r["coeff"])
        piece = Element.const(sig, c)
        for name, order, e in r.get("monomial", ()):
            if sig.directions != 1:
                order = tuple(order)
            piece = piece * Element.var(sig, name, order, e)
        for name, e in r.get("base", ()):
            piece = piece * Element.base(sig, name, e)
        for name, e in r.get("params", ()):
            piece = piece * Element.param(sig, name, e)
        out = out + piece
    return out
