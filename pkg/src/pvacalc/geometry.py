"""The canonical weight-graded algebra on cotangent jets and its twists.

Weight 0 holds target coordinates x^i, weight 1 the momenta p_i together
with first jets T(x^i); the weight-one subspace is an exact Courant
algebroid for the induced operations.  Closed 3-forms twist the bracket
table, 2-forms shear the splitting.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from .diffpoly import (
    EVEN, AlgebraSignature, Element, GeneratorSpec, element_from_records,
    element_to_records, partial, JetVariable, substitute,
)
from .pva import BracketTable, LambdaPolynomial, PVA, adjoin_functions


def canonical_svdo(n: int, base: str = "sigma") -> PVA:
    """Coordinates x1..xn (weight 0) and momenta p1..pn (weight 1) with
    {p_i lam x^j} = delta, all other generator brackets zero.  The returned
    algebra carries the horizontal twist by d/d(base)."""
    if n < 1:
        raise ValueError("need at least one coordinate")
    gens = [GeneratorSpec(f"x{i}", EVEN, 0) for i in range(1, n + 1)]
    gens += [GeneratorSpec(f"p{i}", EVEN, 1) for i in range(1, n + 1)]
    sig = AlgebraSignature(gens, base_variables=[base])
    tab = BracketTable(sig)
    zero = LambdaPolynomial.zero(sig)
    one = Element.one(sig)
    names = [g.name for g in gens]
    for a in names:
        for b in names:
            tab.set(a, b, zero)
    for i in range(1, n + 1):
        tab.set(f"p{i}", f"x{i}", LambdaPolynomial.of_element(one))
        tab.set(f"x{i}", f"p{i}", LambdaPolynomial.of_element(-one))
    return adjoin_functions(PVA(sig, tab))


def svdo_dim(pva: PVA) -> int:
    return sum(1 for g in pva.sig.generators if g.name.startswith("x"))


class CourantSection:
    """A weight-1 element split into vector part sum a^i(x) p_i and form
    part sum b_i(x) T(x^i); the splitting is read off the monomials."""

    __slots__ = ("pva", "vector", "form", "element")

    def __init__(self, pva: PVA, element: Element):
        ws = element.weights()
        if ws not in ([], [1]):
            raise ValueError("Courant sections are weight-1 elements")
        self.pva = pva
        self.element = element
        n = svdo_dim(pva)
        sig = pva.sig
        vec = {}
        frm = {}
        for i in range(1, n + 1):
            pi = Element.var(sig, f"p{i}")
            dv = partial(element, JetVariable(f"p{i}", 0))
            if not dv.is_zero():
                vec[i] = dv
            df = partial(element, JetVariable(f"x{i}", 1))
            if not df.is_zero():
                frm[i] = df
        self.vector = vec
        self.form = frm
        rebuilt = Element.zero(sig)
        for i, a in vec.items():
            rebuilt = rebuilt + a * Element.var(sig, f"p{i}")
        for i, b in frm.items():
            rebuilt = rebuilt + b * Element.var(sig, f"x{i}", 1)
        if rebuilt != element:
            raise ValueError("element is not a section of the weight-1 splitting")

    def __eq__(self, other):
        return isinstance(other, CourantSection) and self.element == other.element

    def __repr__(self):
        return f"CourantSection({self.element!r})"


def dorfman(pva: PVA, a: CourantSection, b: CourantSection) -> CourantSection:
    """The 0-th product on weight-1 sections (Dorfman bracket)."""
    return CourantSection(pva, pva.nth_product(a.element, b.element, 0))


def pairing(pva: PVA, a: CourantSection, b: CourantSection) -> Element:
    """The symmetric pairing: the first product of weight-1 sections."""
    return pva.nth_product(a.element, b.element, 1)


class TargetForm:
    """A polynomial differential form on the target: components indexed by
    strictly increasing index tuples, with coefficients in the weight-0
    coordinates."""

    __slots__ = ("degree", "components", "sig")

    def __init__(self, sig: AlgebraSignature, degree: int,
                 components: Optional[Mapping[tuple, Element]] = None):
        self.sig = sig
        self.degree = degree
        self.components = {}
        if components:
            for idx, e in components.items():
                idx = tuple(idx)
                if list(idx) != sorted(set(idx)) or len(idx) != degree:
                    raise ValueError(f"indices must be strictly increasing {degree}-tuples")
                if not e.is_zero():
                    if e.weights() not in ([], [0]):
                        raise ValueError("component coefficients must be weight 0")
                    self.components[idx] = e

    @classmethod
    def zero(cls, sig, degree):
        return cls(sig, degree)

    def is_zero(self):
        return not self.components

    def __eq__(self, other):
        return (isinstance(other, TargetForm) and self.degree == other.degree
                and self.components == other.components)

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = dict(self.components)
        for idx, e in other.components.items():
            s = out.get(idx)
            v = e if s is None else s + e
            if v.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = v
        return TargetForm(self.sig, self.degree, out)

    def __neg__(self):
        return TargetForm(self.sig, self.degree,
                          {i: -e for i, e in self.components.items()})

    def scale(self, c):
        return TargetForm(self.sig, self.degree,
                          {i: e.scale(c) for i, e in self.components.items()})

    def component_signed(self, indices: tuple) -> Element:
        """Component for an arbitrary index tuple via total antisymmetry."""
        idx = tuple(indices)
        if len(set(idx)) != len(idx):
            return Element.zero(self.sig)
        order = tuple(sorted(idx))
        sign = _perm_sign(idx, order)
        e = self.components.get(order)
        if e is None:
            return Element.zero(self.sig)
        return e.scale(sign)

    def to_records(self):
        return {"degree": self.degree,
                "terms": [[list(idx), element_to_records(e)]
                          for idx, e in sorted(self.components.items())]}

    @classmethod
    def from_records(cls, sig, rec):
        return cls(sig, rec["degree"],
                   {tuple(idx): element_from_records(sig, erecs)
                    for idx, erecs in rec["terms"]})

    def __repr__(self):
        if not self.components:
            return f"0 (degree {self.degree})"
        bits = []
        for idx, e in sorted(self.components.items()):
            wedge = "^".join(f"dx{i}" for i in idx)
            bits.append(f"({e!r})*{wedge}")
        return " + ".join(bits)


def _perm_sign(src, dst) -> int:
    """Sign of the permutation carrying src to dst (both duplicate-free)."""
    src = list(src)
    sign = 1
    for i, want in enumerate(dst):
        j = src.index(want)
        if j != i:
            src[i], src[j] = src[j], src[i]
            sign = -sign
    return sign


def de_rham(omega: TargetForm, n: Optional[int] = None) -> TargetForm:
    """Exterior derivative of a polynomial target form."""
    sig = omega.sig
    if n is None:
        n = sum(1 for g in sig.generators if g.name.startswith("x"))
    out: dict = {}
    for idx, e in omega.components.items():
        for i in range(1, n + 1):
            if i in idx:
                continue
            d = partial(e, JetVariable(f"x{i}", 0))
            if d.is_zero():
                continue
            new = tuple(sorted(idx + (i,)))
            sign = _perm_sign((i,) + idx, new)
            s = out.get(new)
            v = d.scale(sign)
            out[new] = v if s is None else s + v
    return TargetForm(sig, omega.degree + 1,
                      {k: v for k, v in out.items() if not v.is_zero()})


def is_closed(omega: TargetForm, n: Optional[int] = None) -> bool:
    return de_rham(omega, n).is_zero()


def h_twist(pva: PVA, H: TargetForm) -> PVA:
    """Add the contraction of the 3-form to the momentum-momentum brackets:
    {p_i lam p_j} += sum_k H_ijk(x) T(x^k).  Closedness is not enforced;
    a non-closed H shows up as a Jacobi failure of the result."""
    if H.degree != 3:
        raise ValueError("the twist takes a 3-form")
    sig = pva.sig
    n = svdo_dim(pva)
    tab = BracketTable(sig, pva.table.entries)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            extra = Element.zero(sig)
            for k in range(1, n + 1):
                c = H.component_signed((i, j, k))
                if not c.is_zero():
                    extra = extra + c * Element.var(sig, f"x{k}", 1)
            if extra.is_zero():
                continue
            cur = tab.get(f"p{i}", f"p{j}")
            if cur is None:
                cur = LambdaPolynomial.zero(sig)
            tab.set(f"p{i}", f"p{j}", cur + LambdaPolynomial.of_element(extra))
    return PVA(sig, tab, twist=pva.twist, order_cap=pva.order_cap)


class ShearResult:
    """Outcome of a B-field shear: the substitution, whether it preserves
    every generator bracket, and the 3-form discrepancy it creates."""

    __slots__ = ("pva", "two_form", "images", "is_automorphism", "discrepancy")

    def __init__(self, pva, two_form, images, is_automorphism, discrepancy):
        self.pva = pva
        self.two_form = two_form
        self.images = images
        self.is_automorphism = is_automorphism
        self.discrepancy = discrepancy

    def apply(self, e: Element) -> Element:
        return substitute(e, self.images)

    def inverse(self) -> "ShearResult":
        return b_field_shear(self.pva, -self.two_form)

    def __repr__(self):
        tag = "automorphism" if self.is_automorphism else "twisting map"
        return f"ShearResult({tag}, discrepancy={self.discrepancy!r})"


def b_field_shear(pva: PVA, alpha: TargetForm) -> ShearResult:
    """The substitution p_i -> p_i + sum_j alpha_ij(x) T(x^j), extended
    multiplicatively, together with its bracket bookkeeping."""
    if alpha.degree != 2:
        raise ValueError("the shear takes a 2-form")
    sig = pva.sig
    n = svdo_dim(pva)
    images = {}
    for i in range(1, n + 1):
        img = Element.var(sig, f"p{i}")
        for j in range(1, n + 1):
            c = alpha.component_signed((i, j))
            if not c.is_zero():
                img = img + c * Element.var(sig, f"x{j}", 1)
        images[f"p{i}"] = img

    # discrepancy: {S(u) lam S(v)} vs S({u lam v}) on generator pairs.
    # For the canonical table only (p_i, p_j) entries can move, and each
    # failure is a 1-form whose coefficients assemble into a 3-form.
    deltas: dict = {}
    auto = True
    names = [g.name for g in sig.generators]
    for a in names:
        for b in names:
            ea, eb = Element.var(sig, a), Element.var(sig, b)
            lhs = pva.lambda_bracket(substitute(ea, images), substitute(eb, images))
            rhs_pol = pva.lambda_bracket(ea, eb)
            rhs = LambdaPolynomial(sig, {k: substitute(e, images)
                                         for k, e in rhs_pol.coeffs.items()})
            delta = lhs - rhs
            if delta.is_zero():
                continue
            auto = False
            if not (a.startswith("p") and b.startswith("p")):
                raise ArithmeticError("shear moved a non-momentum bracket")
            if set(delta.coeffs) - {(0, 0)}:
                raise ArithmeticError("shear discrepancy is not a 0-th product term")
            deltas[(int(a[1:]), int(b[1:]))] = delta.coefficient(0)
    disc: dict = {}
    for (i, j), lin in deltas.items():
        for k in range(1, n + 1):
            c = partial(lin, JetVariable(f"x{k}", 1))
            if c.is_zero() or len({i, j, k}) != 3:
                continue
            idx = tuple(sorted((i, j, k)))
            disc[idx] = c.scale(_perm_sign((i, j, k), idx))
    three = TargetForm(sig, 3, {k: v for k, v in disc.items() if not v.is_zero()})
    # the reconstruction must reproduce every delta exactly
    for (i, j), lin in deltas.items():
        rebuilt = Element.zero(sig)
        for k in range(1, n + 1):
            c = three.component_signed((i, j, k))
            if not c.is_zero():
                rebuilt = rebuilt + c * Element.var(sig, f"x{k}", 1)
        if rebuilt != lin:
            raise ArithmeticError("shear discrepancy is not a 3-form contraction")
    return ShearResult(pva, alpha, images, auto, three)


def shear_intertwines(pva: PVA, alpha: TargetForm) -> bool:
    """Does the shear by alpha carry pva onto its twist by d(alpha)?

    Checks {S(u) lam S(v)} in pva against S({u lam v}) in the twisted
    algebra, for every generator pair.
    """
    sig = pva.sig
    shear = b_field_shear(pva, alpha)
    twisted = h_twist(pva, de_rham(alpha))
    for ga in sig.generators:
        for gb in sig.generators:
            ea, eb = Element.var(sig, ga.name), Element.var(sig, gb.name)
            lhs = pva.lambda_bracket(shear.apply(ea), shear.apply(eb))
            rhs_pol = twisted.lambda_bracket(ea, eb)
            rhs = LambdaPolynomial(sig, {k: shear.apply(e)
                                         for k, e in rhs_pol.coeffs.items()})
            if lhs != rhs:
                return False
    return True
