"""Variational bicomplex on a two-dimensional jet space.

Coordinates are tau (direction 0) and sigma (direction 1); fields are even
generators whose jets x_(m0,m1) carry Element coefficients.  Forms are wedge
polynomials in d(tau), d(sigma) and the vertical differentials delta(x_(m));
all wedge factors anticommute.  The canonical monomial order is horizontal
factors first (d tau before d sigma), then vertical keys sorted by
(generator, order), with the sorting sign absorbed into the coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .diffpoly import (
    EVEN, AlgebraSignature, Element, GeneratorSpec, JetVariable, partial,
    partial_base, total_derivative,
)
from .pva import PVA
from . import geometry

TAU, SIGMA = 0, 1
BASES = ("tau", "sigma")


def jet_signature(n: int) -> AlgebraSignature:
    """Fields x1..xn over the two-dimensional base (tau, sigma)."""
    gens = [GeneratorSpec(f"x{i}", EVEN, 0) for i in range(1, n + 1)]
    return AlgebraSignature(gens, base_variables=BASES, directions=2)


def horizontal_derivative(e: Element, direction: int) -> Element:
    """The full total derivative: vertical jet part plus the explicit one."""
    return total_derivative(e, direction) + partial_base(e, BASES[direction])


# a wedge monomial is (h, v): h a sorted tuple from {TAU, SIGMA}, v a sorted
# tuple of (gen_index, order) vertical keys
def _wedge_keys(h, v):
    return [("h", x) for x in h] + [("v", x) for x in v]


def _merge_wedge(m1, m2):
    """Concatenate two canonical wedge monomials; None if a factor repeats."""
    k1 = _wedge_keys(*m1)
    k2 = _wedge_keys(*m2)
    if set(k1) & set(k2):
        return None
    inv = 0
    for b in k2:
        for a in k1:
            if b < a:
                inv += 1
    merged = sorted(k1 + k2)
    h = tuple(x for t, x in merged if t == "h")
    v = tuple(x for t, x in merged if t == "v")
    return (h, v), (-1 if inv & 1 else 1)


def _prepend_factor(key, mon):
    """key wedge mon, with key a single ('h', x) or ('v', x) factor."""
    k = _wedge_keys(*mon)
    if key in k:
        return None
    inv = sum(1 for a in k if a < key)
    merged = sorted(k + [key])
    h = tuple(x for t, x in merged if t == "h")
    v = tuple(x for t, x in merged if t == "v")
    return (h, v), (-1 if inv & 1 else 1)


class JetForm:
    """A bigraded form: mapping wedge monomials to Element coefficients."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: AlgebraSignature, terms: Optional[Mapping] = None):
        self.sig = sig
        self.terms = {}
        if terms:
            for m, e in terms.items():
                if not e.is_zero():
                    self.terms[m] = e

    @classmethod
    def zero(cls, sig):
        return cls(sig)

    @classmethod
    def of_element(cls, e: Element):
        return cls(e.sig, {((), ()): e})

    @classmethod
    def horizontal(cls, sig, direction: int):
        return cls(sig, {((direction,), ()): Element.one(sig)})

    @classmethod
    def vertical(cls, sig, gen: str, order=(0, 0)):
        gi = sig.gen_index(gen)
        return cls(sig, {((), ((gi, tuple(order)),)): Element.one(sig)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, JetForm) and self.sig == other.sig
                and self.terms == other.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for m, e in other.terms.items():
            s = out.get(m)
            v = e if s is None else s + e
            if v.is_zero():
                out.pop(m, None)
            else:
                out[m] = v
        return JetForm(self.sig, out)

    def __neg__(self):
        return JetForm(self.sig, {m: -e for m, e in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return JetForm(self.sig, {m: e.scale(c) for m, e in self.terms.items()})

    def mul_element(self, e: Element):
        return JetForm(self.sig, {m: v * e for m, v in self.terms.items()})

    def wedge(self, other: "JetForm") -> "JetForm":
        out: dict = {}
        for m1, e1 in self.terms.items():
            for m2, e2 in other.terms.items():
                r = _merge_wedge(m1, m2)
                if r is None:
                    continue
                mon, sgn = r
                v = (e1 * e2).scale(sgn)
                s = out.get(mon)
                v = v if s is None else s + v
                if v.is_zero():
                    out.pop(mon, None)
                else:
                    out[mon] = v
        return JetForm(self.sig, out)

    def bidegrees(self):
        return sorted({(len(m[0]), len(m[1])) for m in self.terms})

    def component(self, p: int, q: int) -> "JetForm":
        return JetForm(self.sig, {m: e for m, e in self.terms.items()
                                  if len(m[0]) == p and len(m[1]) == q})

    def coefficient(self, h: tuple, v: tuple = ()) -> Element:
        return self.terms.get((tuple(h), tuple(v)), Element.zero(self.sig))

    def restrict_dtau_zero(self) -> "JetForm":
        return JetForm(self.sig, {m: e for m, e in self.terms.items()
                                  if TAU not in m[0]})

    def __repr__(self):
        if not self.terms:
            return "0"
        sig = self.sig

        def wstr(m):
            h, v = m
            bits = [("dtau", "dsigma")[x] for x in h]
            bits += [f"delta({sig.generators[gi].name}{list(o)})" for gi, o in v]
            return "^".join(bits) if bits else "1"

        return " + ".join(f"({e!r})*{wstr(m)}" for m, e in sorted(
            self.terms.items(), key=lambda kv: kv[0]))


def d_rho(omega: JetForm) -> JetForm:
    """Horizontal differential: full derivatives on coefficients, the rule
    d(delta x_(m)) = -sum_p delta x_(m+e_p) ^ d sigma^p on vertical factors."""
    sig = omega.sig
    out = JetForm.zero(sig)
    for mon, coeff in omega.terms.items():
        h, v = mon
        for p in (TAU, SIGMA):
            dc = horizontal_derivative(coeff, p)
            if not dc.is_zero():
                r = _prepend_factor(("h", p), mon)
                if r is not None:
                    m2, sgn = r
                    out = out + JetForm(sig, {m2: dc.scale(sgn)})
        # derivation over vertical factors: d(w1^...^wr) picks up (-1)^(pos)
        for idx, (gi, order) in enumerate(v):
            pos_sign = (-1) ** (len(h) + idx)
            for p in (TAU, SIGMA):
                up = tuple(m + (1 if d == p else 0) for d, m in enumerate(order))
                rest = (h, v[:idx] + v[idx + 1:])
                # replace delta x_(m) -> -delta x_(m+e_p) ^ d sigma^p; bring
                # the two new factors back to the slot of the removed one
                r1 = _prepend_factor(("h", p), rest)
                if r1 is None:
                    continue
                m1, s1 = r1
                r2 = _prepend_factor(("v", (gi, up)), m1)
                if r2 is None:
                    continue
                m2, s2 = r2
                # factors at the front: delta x_(up) ^ dsigma^p ^ rest, the
                # pair must travel past the first (len(h)+idx) factors
                sgn = -1 * s1 * s2 * pos_sign * (-1) ** 0
                out = out + JetForm(sig, {m2: coeff.scale(sgn)})
    return out


def delta(omega: JetForm) -> JetForm:
    """Vertical differential: delta on coefficients only (delta^2 = 0 on
    wedge factors)."""
    sig = omega.sig
    out = JetForm.zero(sig)
    for mon, coeff in omega.terms.items():
        for (gi, order) in coeff.jet_variables():
            dc = partial(coeff, JetVariable(sig.generators[gi].name, order))
            if dc.is_zero():
                continue
            r = _prepend_factor(("v", (gi, order)), mon)
            if r is None:
                continue
            m2, sgn = r
            out = out + JetForm(sig, {m2: dc.scale(sgn)})
    return out


class SymmetryField:
    """A vector field: an evolutionary characteristic plus a horizontal part
    a0 rho(d tau) + a1 rho(d sigma) with base-variable coefficients."""

    def __init__(self, sig: AlgebraSignature,
                 characteristic: Optional[Mapping[str, Element]] = None,
                 horizontal: Optional[Sequence[Element]] = None):
        self.sig = sig
        self.char = {}
        if characteristic:
            for name, e in characteristic.items():
                self.char[sig.gen_index(name)] = e
        if horizontal is None:
            horizontal = (Element.zero(sig), Element.zero(sig))
        self.horizontal = tuple(horizontal)
        for a in self.horizontal:
            if any(m[0] for m in a.terms):
                raise ValueError("horizontal coefficients must be base-only")

    def char_at(self, gi: int, order) -> Element:
        if gi not in self.char:
            return Element.zero(self.sig)
        return _prolong_char(self.sig, self.char[gi], order)

    def lift_at(self, gi: int, order) -> Element:
        """Contraction value on delta x_(order) including horizontal lifts."""
        sig = self.sig
        out = self.char_at(gi, order)
        a0, a1 = self.horizontal
        name = sig.generators[gi].name
        if not a0.is_zero():
            up = (order[0] + 1, order[1])
            out = out + a0 * Element.var(sig, name, up)
        if not a1.is_zero():
            up = (order[0], order[1] + 1)
            out = out + a1 * Element.var(sig, name, up)
        return out

    def apply_to_element(self, e: Element) -> Element:
        """The action as a derivation on functions (0-forms)."""
        sig = self.sig
        out = Element.zero(sig)
        for (gi, order) in e.jet_variables():
            f = self.char_at(gi, order)
            if not f.is_zero():
                out = out + f * partial(e, JetVariable(sig.generators[gi].name, order))
        a0, a1 = self.horizontal
        if not a0.is_zero():
            out = out + a0 * horizontal_derivative(e, TAU)
        if not a1.is_zero():
            out = out + a1 * horizontal_derivative(e, SIGMA)
        return out

    def full_characteristic(self, gi: int) -> Element:
        """Characteristic of the evolutionary representative: the given F^j
        plus the vertical content a^p x^j_(e_p) of the horizontal part."""
        sig = self.sig
        out = self.char.get(gi, Element.zero(sig))
        a0, a1 = self.horizontal
        name = sig.generators[gi].name
        if not a0.is_zero():
            out = out + a0 * Element.var(sig, name, (1, 0))
        if not a1.is_zero():
            out = out + a1 * Element.var(sig, name, (0, 1))
        return out

    def _contract_by(self, omega: JetForm, delta_value, horiz_value) -> JetForm:
        sig = self.sig
        out = JetForm.zero(sig)
        for mon, coeff in omega.terms.items():
            h, v = mon
            keys = _wedge_keys(h, v)
            for idx, key in enumerate(keys):
                tag, val = key
                ival = horiz_value(val) if tag == "h" else delta_value(*val)
                if ival.is_zero():
                    continue
                rest_keys = keys[:idx] + keys[idx + 1:]
                hh = tuple(x for t, x in rest_keys if t == "h")
                vv = tuple(x for t, x in rest_keys if t == "v")
                sgn = (-1) ** idx
                out = out + JetForm(sig, {(hh, vv): (coeff * ival).scale(sgn)})
        return out

    def contract(self, omega: JetForm, lifted: bool = False) -> JetForm:
        """Geometric interior product: a^p on the horizontal legs.  With
        lifted=True the delta-contraction uses the horizontally lifted value
        (the Noether convention for the variational 1-form)."""
        a = self.horizontal
        dval = self.lift_at if lifted else self.char_at
        return self._contract_by(omega, dval, lambda p: a[p])

    def evolutionary_contract(self, omega: JetForm) -> JetForm:
        """Interior product with the evolutionary representative: full
        prolonged characteristic on the deltas, zero on the horizontals."""
        sig = self.sig
        zero = Element.zero(sig)

        def dval(gi, order):
            return _prolong_char(sig, self.full_characteristic(gi), order)

        return self._contract_by(omega, dval, lambda p: zero)

    def lie_derivative(self, omega: JetForm) -> JetForm:
        """Cartan formula along the evolutionary representative; this is the
        variational symmetry action, under which explicit base dependence of
        a density is detected."""
        d = lambda w: d_rho(w) + delta(w)
        return self.evolutionary_contract(d(omega)) + d(self.evolutionary_contract(omega))


def _prolong_char(sig, F: Element, order) -> Element:
    out = F
    for d, m in enumerate(order):
        for _ in range(m):
            out = horizontal_derivative(out, d)
    return out


def prolong(sig: AlgebraSignature, characteristic: Mapping[str, Element]) -> SymmetryField:
    """The evolutionary vector field of a characteristic."""
    return SymmetryField(sig, characteristic=characteristic)


class Lagrangian:
    """An order-1 density L = Ltilde d tau ^ d sigma."""

    def __init__(self, sig: AlgebraSignature, density: Element):
        self.sig = sig
        for m in density.terms:
            for (gi, order), _e in m[0]:
                if sum(order) > 1:
                    raise ValueError("only order-1 Lagrangians are supported")
        self.density = density

    def form(self) -> JetForm:
        vol = JetForm.horizontal(self.sig, TAU).wedge(
            JetForm.horizontal(self.sig, SIGMA))
        return vol.mul_element(self.density)

    def __repr__(self):
        return f"Lagrangian({self.density!r})"


def euler_lagrange(L: Lagrangian):
    """Decompose delta L = -d_rho(gamma) + sum E_j delta x^j ^ vol, exactly.

    Returns (gamma, E) with gamma a (1,1)-form and E a mapping from field
    name to Element.  The identity is re-verified before returning.
    """
    sig = L.sig
    lt = L.density
    names = [g.name for g in sig.generators]
    E = {}
    gamma = JetForm.zero(sig)
    for name in names:
        d0 = partial(lt, JetVariable(name, (1, 0)))
        d1 = partial(lt, JetVariable(name, (0, 1)))
        dx = partial(lt, JetVariable(name, (0, 0)))
        E[name] = dx - horizontal_derivative(d0, TAU) - horizontal_derivative(d1, SIGMA)
        dvar = JetForm.vertical(sig, name)
        gamma = gamma + dvar.wedge(JetForm.horizontal(sig, SIGMA)).mul_element(d0) \
            - dvar.wedge(JetForm.horizontal(sig, TAU)).mul_element(d1)
    # exact verification of the decomposition
    vol = JetForm.horizontal(sig, TAU).wedge(JetForm.horizontal(sig, SIGMA))
    rhs = -d_rho(gamma)
    for name in names:
        rhs = rhs + JetForm.vertical(sig, name).wedge(vol).mul_element(E[name])
    if delta(L.form()) != rhs:
        raise ArithmeticError("Euler-Lagrange decomposition failed to verify")
    return gamma, E


def verify_symmetry(xi: SymmetryField, L: Lagrangian, alpha: JetForm) -> bool:
    """Lie_xi L = d_rho(alpha), exactly."""
    return (xi.lie_derivative(L.form()) - d_rho(alpha)).is_zero()


class NoetherResidue(ArithmeticError):
    def __init__(self, residue):
        super().__init__(f"d_rho F does not reduce to zero on shell: {residue!r}")
        self.residue = residue


def noether(xi: SymmetryField, alpha: JetForm, gamma: JetForm,
            E: Mapping[str, Element]) -> JetForm:
    """The integral of motion alpha - iota_xi gamma, projected to (1,0).

    Confirms that d_rho of the result lies in the differential ideal of the
    equations of motion by reducing with the on-shell rewriting system.
    """
    sig = xi.sig
    F = (alpha - xi.contract(gamma, lifted=True)).component(1, 0)
    dF = d_rho(F)
    rules = onshell_rules(sig, E)
    red = JetForm(sig, {m: reduce_onshell(e, rules) for m, e in dF.terms.items()})
    if not red.is_zero():
        raise NoetherResidue(red)
    return F


def onshell_rules(sig: AlgebraSignature, E: Mapping[str, Element]):
    """Solve E_j = 0 for the second tau-jets (constant invertible leading
    matrix required)."""
    names = [g.name for g in sig.generators]
    n = len(names)
    A = [[Fraction(0)] * n for _ in range(n)]
    rest = []
    for j, nj in enumerate(names):
        e = E[nj]
        lead = Element.zero(sig)
        low = Element.zero(sig)
        for m, c in e.terms.items():
            tops = [(k, ee) for (k, ee) in m[0] if k[1][0] >= 2]
            if not tops:
                low = low + Element(sig, {m: c})
                continue
            if len(tops) != 1 or tops[0][0][1] != (2, 0) or tops[0][1] != 1 or len(m[0]) != 1:
                raise ValueError("equations are not linear in the second tau-jets")
            A[j][tops[0][0][0]] += c
        rest.append(low)
    Ainv = _mat_inverse(A)
    rules = {}
    for k, nk in enumerate(names):
        img = Element.zero(sig)
        for j in range(n):
            if Ainv[k][j]:
                img = img - rest[j].scale(Ainv[k][j])
        rules[sig.gen_index(nk)] = img
    return rules


def reduce_onshell(e: Element, rules: Mapping[int, Element],
                   fuel: int = 400) -> Element:
    """Rewrite all jets with tau-order >= 2 using the solved equations."""
    sig = e.sig
    cur = e
    while fuel:
        fuel -= 1
        target = None
        for m in cur.terms:
            for (gi, order), _e in m[0]:
                if order[0] >= 2:
                    target = (gi, order)
                    break
            if target:
                break
        if target is None:
            return cur
        gi, order = target
        img = rules[gi]
        for _ in range(order[0] - 2):
            img = horizontal_derivative(img, TAU)
        for _ in range(order[1]):
            img = horizontal_derivative(img, SIGMA)
        out = Element.zero(sig)
        key = (gi, order)
        for m, c in cur.terms.items():
            jd = dict(m[0])
            if key not in jd:
                out = out + Element(sig, {m: c})
                continue
            exp = jd.pop(key)
            base = Element(sig, {(tuple(sorted(jd.items())), m[1], m[2]): c})
            out = out + base * img ** exp
        cur = out
    raise ArithmeticError("on-shell reduction did not terminate")


class LegendreMap:
    """Substitution from on-shell (1,0)-forms into the canonical algebra.

    The momentum normalization follows the paper orientation: the momentum
    attached to x^j is minus the fiber derivative of the density in the
    tau-direction, which makes the flat model land on the standard Virasoro
    generator triple exactly.
    """

    def __init__(self, L: Lagrangian, svdo: Optional[PVA] = None):
        sig = L.sig
        names = [g.name for g in sig.generators]
        n = len(names)
        self.source_sig = sig
        self.svdo = svdo or geometry.canonical_svdo(n)
        tsig = self.svdo.sig
        # momenta: mom_j = -dL/d(x^j_(1,0)) = sum_k A_jk x^k_(1,0) + B_j
        A = [[Fraction(0)] * n for _ in range(n)]
        B = []
        for j, nj in enumerate(names):
            mom = -partial(L.density, JetVariable(nj, (1, 0)))
            lin = Element.zero(sig)
            for m, c in mom.terms.items():
                taus = [(k, e) for (k, e) in m[0] if k[1][0] >= 1]
                if not taus:
                    lin = lin + Element(sig, {m: c})
                    continue
                if (len(taus) != 1 or taus[0][0][1] != (1, 0)
                        or taus[0][1] != 1 or len(m[0]) != 1 or m[1] or m[2]):
                    raise ValueError("momenta are not affine in the tau-jets")
                A[j][taus[0][0][0]] += c
            B.append(lin)
        self.A = A
        self.Ainv = _mat_inverse(A)  # raises if the fiber metric degenerates
        self.B = B
        # x^k_(1,0) -> sum_j Ainv_kj (p_j - B_j), written in the target algebra
        self.velocity_images = []
        for k in range(n):
            img = Element.zero(tsig)
            for j in range(n):
                cjk = self.Ainv[k][j]
                if cjk:
                    img = img + (Element.var(tsig, f"p{j + 1}")
                                 - self._push_spatial(B[j])).scale(cjk)
            self.velocity_images.append(img)

    def _push_spatial(self, e: Element) -> Element:
        """Translate an element with only sigma-jets (m0 = 0) and base sigma."""
        sig, tsig = self.source_sig, self.svdo.sig
        out = Element.zero(tsig)
        for m, c in e.terms.items():
            piece = Element.const(tsig, c)
            for (gi, order), exp in m[0]:
                if order[0] != 0:
                    raise ValueError("tau-jets survived the on-shell restriction")
                piece = piece * Element.var(tsig, f"x{gi + 1}", order[1], exp)
            for bi, exp in m[1]:
                name = self.source_sig.base_variables[bi]
                if name == "tau":
                    piece = Element.zero(tsig)  # evaluated at tau = 0
                    break
                piece = piece * Element.base(tsig, "sigma", exp)
            out = out + piece
        return out

    def push_element(self, e: Element) -> Element:
        """Push a coefficient with tau-jet order at most 1."""
        sig, tsig = self.source_sig, self.svdo.sig
        out = Element.zero(tsig)
        for m, c in e.terms.items():
            piece = Element.const(tsig, c)
            for (gi, order), exp in m[0]:
                if order[0] == 0:
                    piece = piece * Element.var(tsig, f"x{gi + 1}", order[1], exp)
                elif order[0] == 1:
                    v = self.velocity_images[gi]
                    for _ in range(order[1]):
                        v = total_derivative(v, 0)
                    if exp < 0:
                        raise ValueError("negative power of a velocity")
                    piece = piece * v ** exp
                else:
                    raise ValueError("tau-order exceeds 1; reduce on shell first")
            if piece.is_zero():
                continue
            for bi, exp in m[1]:
                name = sig.base_variables[bi]
                if name == "tau":
                    piece = Element.zero(tsig)
                    break
                piece = piece * Element.base(tsig, "sigma", exp)
            out = out + piece
        return out

    def push_form(self, F: JetForm) -> Element:
        """Restrict a (1,0)-form to d tau = 0 and push the d sigma part."""
        return self.push_element(F.coefficient((SIGMA,)))


def legendre(L: Lagrangian, svdo: Optional[PVA] = None) -> LegendreMap:
    return LegendreMap(L, svdo)


def _mat_inverse(A):
    n = len(A)
    M = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        d = M[col][col]
        M[col] = [x / d for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


# -- presets -------------------------------------------------------------------


def flat_sigma_model(n: int, metric: Optional[Sequence[Fraction]] = None) -> Lagrangian:
    """Ltilde = (1/2) sum_j g_jj ((d_sigma x^j)^2 - (d_tau x^j)^2), constant
    diagonal metric (identity by default)."""
    sig = jet_signature(n)
    if metric is None:
        metric = [Fraction(1)] * n
    dens = Element.zero(sig)
    for j in range(1, n + 1):
        xs = Element.var(sig, f"x{j}", (0, 1))
        xt = Element.var(sig, f"x{j}", (1, 0))
        dens = dens + (xs * xs - xt * xt).scale(Fraction(metric[j - 1], 2))
    return Lagrangian(sig, dens)


def free_particle() -> Lagrangian:
    sig = jet_signature(1)
    xt = Element.var(sig, "x1", (1, 0))
    return Lagrangian(sig, (xt * xt).scale(Fraction(1, 2)))


def poly_of(sig: AlgebraSignature, coeffs: Sequence, combination: str) -> Element:
    """f(sigma -+ tau) for polynomial coefficient lists (constant term first)."""
    s = Element.base(sig, "sigma")
    t = Element.base(sig, "tau")
    arg = s - t if combination == "minus" else s + t
    out = Element.zero(sig)
    power = Element.one(sig)
    for c in coeffs:
        out = out + power.scale(Fraction(c))
        power = power * arg
    return out


def time_translation(sig: AlgebraSignature) -> SymmetryField:
    return SymmetryField(sig, horizontal=(Element.one(sig), Element.zero(sig)))


def mover_field(sig: AlgebraSignature, coeffs: Sequence, which: str) -> SymmetryField:
    """The conformal symmetry fields: for 'minus' the combination
    (f(sigma-tau)/2) (rho_tau - rho_sigma), for 'plus'
    -(f(sigma+tau)/2) (rho_tau + rho_sigma)."""
    f = poly_of(sig, coeffs, "minus" if which == "minus" else "plus")
    half = f.scale(Fraction(1, 2))
    if which == "minus":
        return SymmetryField(sig, horizontal=(half, -half))
    return SymmetryField(sig, horizontal=(-half, -half))


def canonical_alpha(xi: SymmetryField, L: Lagrangian) -> JetForm:
    """iota_xi L: the exactness witness for purely horizontal symmetries."""
    return xi.contract(L.form())
