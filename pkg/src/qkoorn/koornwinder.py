"""Koornwinder polynomials and their degenerations.

The polynomials are produced as unitriangular joint-eigenvector expansions in
the monomial symmetric basis (back-substitution against the rank-one operator
matrix), fully symbolically over the half-parameter field.  The same solver
drives the differential branch over the additive (g, tg0, tg1) ring, the
q -> 1 limit for integer exponent specializations, the A-type extraction and
the classical-family parameter specializations.
"""

from __future__ import annotations

import json

from .errors import NotEigenfunction, ZeroDenominator
from .laurent import LaurentPoly
from .operators import (IDENTITY, OperatorSpec, ParamMap, apply_operator,
                        operator_matrix)
from .ratfield import (JACOBI_VARS, KOORN_VARS, QQ, ParamPoly, ParamRat,
                       substitute_params)
from .spectra import (eigenvalue_An_leading, eigenvalue_Ern, eigenvalue_jacobi)
from .weights import (HYPEROCTAHEDRAL, PERMUTATIONS_ONLY, dominance_lt,
                      linear_refinement, monomial_symmetric, weights_below,
                      worbit)


class OrthoPoly:
    """Unitriangular expansion p = m_lam + sum_{mu < lam} c_mu m_mu."""

    __slots__ = ("n", "weight", "coeffs", "group", "scale")

    def __init__(self, weight, coeffs, group=HYPEROCTAHEDRAL, scale=1):
        self.n = len(weight)
        self.weight = tuple(weight)
        self.coeffs = dict(coeffs)
        self.group = group
        self.scale = scale

    def to_laurent(self, one=None):
        total = None
        for mu, c in self.coeffs.items():
            m = monomial_symmetric(mu, self.group, one, self.scale)
            m = m.map_coeff(lambda unit, c=c: c * unit)
            total = m if total is None else total + m
        return total

    def leading_is_monic(self):
        c = self.coeffs.get(self.weight)
        if c is None:
            return False
        return c == 1 if not hasattr(c, "is_one") else c.is_one()

    def to_json(self):
        coeffs = []
        for mu in sorted(self.coeffs):
            v = self.coeffs[mu]
            if isinstance(v, (ParamRat, ParamPoly)):
                text = v.render()
            else:
                text = str(v)
            coeffs.append({"weight": list(mu), "value": text})
        return {"n": self.n, "weight": list(self.weight), "basis": "monomial",
                "half_lattice": self.scale == 2, "group": self.group,
                "coeffs": coeffs}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return "OrthoPoly(%s; %d terms)" % (self.weight, len(self.coeffs))


def _solve_triangular(matrix, lam, evalue, field_one):
    """Back-substitute the unitriangular eigenproblem for the given matrix
    and target eigenvalue; entries of ``matrix`` are in the polynomial ring,
    coefficients come out in its fraction field."""
    order = linear_refinement(list(matrix), "lex")[::-1]
    coeffs = {lam: field_one}
    for mu in order:
        if mu == lam:
            continue
        num = None
        for nu, c in coeffs.items():
            entry = matrix[nu].get(mu)
            if entry is None:
                continue
            term = c * entry
            num = term if num is None else num + term
        if num is None:
            continue
        gap = evalue - matrix[mu].get(mu, 0)
        if not gap:
            raise ZeroDenominator(
                "eigenvalue collision between %s and %s" % (lam, mu))
        coeffs[mu] = num / gap
    return coeffs


def _solve_cleared(matrix, lam, evalue, one):
    """Same back-substitution, holding every coefficient over one shared
    denominator: returns (numerators, denominator), all in the polynomial
    ring.  Avoids compounding unreduced fraction denominators."""
    order = linear_refinement(list(matrix), "lex")[::-1]
    zero = evalue - evalue
    nums = {lam: one}
    den = one
    for mu in order:
        if mu == lam:
            continue
        acc = None
        for nu, nval in nums.items():
            entry = matrix[nu].get(mu)
            if entry is None or nval.is_zero():
                continue
            term = nval * entry
            acc = term if acc is None else acc + term
        if acc is None or acc.is_zero():
            nums[mu] = zero
            continue
        gap = evalue - matrix[mu].get(mu, 0)
        if not gap:
            raise ZeroDenominator(
                "eigenvalue collision between %s and %s" % (lam, mu))
        for nu in nums:
            nums[nu] = nums[nu] * gap
        nums[mu] = acc
        den = den * gap
    return nums, den


def koornwinder_triangular(lam, params=None, verify=False):
    """The Koornwinder polynomial attached to a dominant weight, by the
    triangular eigenproblem of the rank-one operator.

    With ``verify`` set, the expansion is checked to satisfy the joint
    eigen-equations for every operator order r = 1..n through the cached
    operator matrices.
    """
    params = params or IDENTITY
    n = len(lam)
    spec = OperatorSpec("koornwinder", n, 1, params)
    matrix = operator_matrix(spec, lam)
    evalue = eigenvalue_Ern(1, n, lam, params.as_subst() or None)
    nums, den = _solve_cleared(matrix, lam, evalue,
                               ParamPoly.one(KOORN_VARS))
    coeffs = {mu: ParamRat(nval, den) for mu, nval in nums.items()
              if nval or mu == lam}
    p = OrthoPoly(lam, coeffs)
    if verify:
        for r in range(1, n + 1):
            verify_joint_eigen_cleared(nums, r, lam, params)
    return p


def verify_joint_eigen(p, r, params=None):
    """Assert D_r p = E_r(lam) p through the operator matrix; returns the
    eigenvalue."""
    params = params or IDENTITY
    nums, den = _cleared_from_coeffs(p.coeffs)
    return verify_joint_eigen_cleared(nums, r, p.weight, params)


def _cleared_from_coeffs(coeffs):
    """Recover shared-denominator numerators from solved coefficients (the
    solver hands every coefficient out over one common denominator)."""
    dens = []
    for c in coeffs.values():
        if isinstance(c, ParamRat) and not c.den.is_one():
            if not any(c.den == d for d in dens):
                dens.append(c.den)
    if len(dens) > 1:
        raise ValueError("coefficients do not share a denominator")
    den = dens[0] if dens else None
    nums = {}
    for mu, c in coeffs.items():
        if isinstance(c, ParamPoly):
            num, own = c, None
        else:
            num, own = c.num, (None if c.den.is_one() else c.den)
        if den is not None and own is None:
            num = num * den
        nums[mu] = num
    return nums, den


def verify_joint_eigen_cleared(nums, r, lam, params=None):
    params = params or IDENTITY
    n = len(lam)
    spec = OperatorSpec("koornwinder", n, r, params)
    matrix = operator_matrix(spec, lam)
    ev = eigenvalue_Ern(r, n, lam, params.as_subst() or None)
    _matrix_eigen_check(matrix, nums, ev)
    return ev


def _matrix_eigen_check(matrix, nums, ev):
    """Check sum_nu N_nu M[nu][mu] = ev N_mu for every mu over the shared
    denominator, entirely in the polynomial ring."""
    zero = ParamPoly.zero(ev.vars)
    for mu in matrix:
        lhs = zero
        for nu, num in nums.items():
            entry = matrix[nu].get(mu)
            if entry is not None and num:
                lhs = lhs + num * entry
        rhs = nums.get(mu, zero) * ev
        if not (lhs == rhs):
            raise NotEigenfunction("eigen-equation fails at %s" % (mu,))


def jacobi_triangular(lam, verify=False):
    """The hypergeometric-operator eigenproblem over the additive
    (g, tg0, tg1) coefficient ring."""
    n = len(lam)
    spec = OperatorSpec("jacobi", n)
    matrix = operator_matrix(spec, lam)
    evalue = eigenvalue_jacobi(1, n, lam)
    nums, den = _solve_cleared(matrix, lam, evalue,
                               ParamPoly.one(JACOBI_VARS))
    coeffs = {mu: ParamRat(nval, den) for mu, nval in nums.items()
              if nval or mu == lam}
    p = OrthoPoly(lam, coeffs)
    if verify:
        _matrix_eigen_check(matrix, nums, evalue)
    return p


def qh1_limit(p, g, g0, g1, g0p, g1p):
    """Exact q -> 1 limit of a symbolic Koornwinder expansion at integer
    coupling exponents: substitute th = qh^g, ga = qh^g0, ..., cancel the
    shared (qh - 1) powers and evaluate at qh = 1.

    The result matches the differential-branch polynomial with
    tg0 = g0 + g0' and tg1 = g1 + g1'.
    """
    sub = {"th": ParamPoly.variable(KOORN_VARS, "qh", g),
           "ga": ParamPoly.variable(KOORN_VARS, "qh", g0),
           "gb": ParamPoly.variable(KOORN_VARS, "qh", g1),
           "gc": ParamPoly.variable(KOORN_VARS, "qh", g0p),
           "gd": ParamPoly.variable(KOORN_VARS, "qh", g1p)}
    at_one = {"qh": 1}
    out = {}
    for mu, c in p.coeffs.items():
        c1 = substitute_params(c, sub)
        c2 = substitute_params(c1, at_one)
        out[mu] = _constant_value(c2)
    return OrthoPoly(p.weight, out, p.group, p.scale)


def _constant_value(rat):
    num, den = rat.num, rat.den
    nv = QQ(0) if num.is_zero() else num.terms[(0,) * len(num.vars)]
    dv = den.terms[(0,) * len(den.vars)]
    return nv / dv


def evaluate_jacobi_coeffs(p, g, tg0, tg1):
    """Specialize a differential-branch expansion at integer couplings.

    Variables are pinned one at a time so that removable zeros of the
    shared denominator cancel before evaluation."""
    out = {}
    for mu, c in p.coeffs.items():
        for name, val in (("g", g), ("tg0", tg0), ("tg1", tg1)):
            c = substitute_params(c, {name: val})
        out[mu] = _constant_value(c)
    return OrthoPoly(p.weight, out, p.group, p.scale)


def macdonald_An_extract(p):
    """Keep the top-degree coefficients and reread them against the
    permutation-orbit monomials: the translation-reduced A-type polynomial."""
    size = sum(p.weight)
    coeffs = {mu: c for mu, c in p.coeffs.items() if sum(mu) == size}
    return OrthoPoly(p.weight, coeffs, PERMUTATIONS_ONLY, p.scale)


def a_type_eigen_check(p_lead, r, params=None):
    """Verify the plain A-type operator eigen-equation on a leading-part
    expansion; returns the eigenvalue S_r(exp(-beta(lam+rho')))."""
    params = params or IDENTITY
    n = p_lead.n
    spec = OperatorSpec("a_type", n, r, params)
    f = p_lead.to_laurent()
    img = apply_operator(spec, f, check_invariance=False)
    ev = eigenvalue_An_leading(r, n, p_lead.weight, params.as_subst() or None)
    want = f.map_coeff(lambda c: c * ParamRat.from_poly(ev))
    if not (img == want):
        raise NotEigenfunction("A-type eigen-equation fails, r=%d" % r)
    return ev


# ---------------------------------------------------------------------------
# classical families


_PAIR_TABLE = {
    ("Bn", "Bn"): {"gb": "1", "gc": "1", "gd": "1"},
    ("Bn", "Cn"): {"gb": "1", "gc": "ga", "gd": "1"},
    ("Cn", "Bn"): {"ga": "gb", "gc": "1", "gd": "1"},
    ("Cn", "Cn"): {"ga": "gb", "gc": "gb", "gd": "gb"},
    ("BCn", "Bn"): {"gc": "1", "gd": "1"},
    ("BCn", "Cn"): {"gc": "ga", "gd": "gb"},
    ("Dn", "Dn"): {"ga": "1", "gb": "1", "gc": "1", "gd": "1"},
    ("An", "An"): {},
}

FAMILY_PAIRS = tuple(sorted(_PAIR_TABLE))


def family_specialize(pair):
    """Parameter substitution realizing an admissible pair (R, S).

    The reparametrization mu_0 = nu_1 + nu_2, mu_1 = nu_2 (primed alike)
    reads multiplicatively as ga = k1*k2, gb = k2, gc = k1'*k2', gd = k2';
    the table constraints then pin the half-parameters to each other."""
    if isinstance(pair, str):
        if ":" in pair:
            pair = tuple(pair.split(":", 1))
        else:
            pair = (pair, pair)
    if pair not in _PAIR_TABLE:
        raise ValueError("unknown family pair %r" % (pair,))
    return ParamMap(_PAIR_TABLE[pair])


def anti_periodic_params(S):
    """Parameters of the Koornwinder factor of the anti-periodic sector of
    the (Bn, S) family: the second external coupling is pushed to the shift
    unit (gb = qh)."""
    if S == "Bn":
        return ParamMap({"gb": "qh", "gc": "1", "gd": "1"})
    if S == "Cn":
        return ParamMap({"gb": "qh", "gc": "ga", "gd": "1"})
    raise ValueError("S must be Bn or Cn")


def spin_monomial(n, one=None):
    """m at the spin weight (1/2, ..., 1/2): the product of the half-angle
    cosines, on the doubled exponent lattice."""
    return monomial_symmetric((1,) * n, HYPEROCTAHEDRAL, one, scale=2)


def bn_antiperiodic(lam, S, verify_lam0=True):
    """The anti-periodic member attached to lam: the spin monomial times the
    Koornwinder polynomial at the pushed parameters."""
    n = len(lam)
    params = anti_periodic_params(S)
    p = koornwinder_triangular(lam, params)
    f = p.to_laurent()
    out = spin_monomial(n) * f
    return out, p, params


def relm_constant(n, S):
    """The additive constant of the spin-conjugation identity:
    2 sum_j (ch beta(rho_j + 1/2) - ch beta rho_j) at (Bn, S) parameters."""
    fam = family_specialize(("Bn", S))
    sub = fam.as_subst()
    th = sub.get("th", ParamPoly.variable(KOORN_VARS, "th"))
    ga = sub.get("ga", ParamPoly.variable(KOORN_VARS, "ga"))
    gb = sub.get("gb", ParamPoly.one(KOORN_VARS))
    gc = sub.get("gc", ParamPoly.one(KOORN_VARS))
    gd = sub.get("gd", ParamPoly.one(KOORN_VARS))
    h = ga * gb * gc * gd
    qh = ParamPoly.variable(KOORN_VARS, "qh")
    total = ParamPoly.zero(KOORN_VARS)
    for j in range(1, n + 1):
        u = th ** (2 * (n - j)) * h
        total = total + _ch(u * qh) * 2 + (-(_ch(u) * 2))
    return total


def _ch(u):
    e, c, s = u.monomial_parts()
    inv = ParamPoly.monomial(u.vars, tuple(-x for x in e), 1 / c, s)
    return (u + inv) * QQ(1, 2)


def dn_combine(lam, delta):
    """Even combinations of the D-family polynomials: the Koornwinder
    polynomial at vanishing external couplings (delta = 0), or the spin
    monomial times the polynomial at gb = qh (delta = 1)."""
    n = len(lam)
    if delta == 0:
        p = koornwinder_triangular(lam, family_specialize(("Dn", "Dn")))
        return p.to_laurent(), p
    params = ParamMap({"ga": "1", "gb": "qh", "gc": "1", "gd": "1"})
    p = koornwinder_triangular(lam, params)
    return spin_monomial(n) * p.to_laurent(), p


def halfspin_eigencheck(which, lam, pair=None, params=None):
    """Apply a spin operator to the family polynomial of lam and assert
    proportionality; returns the eigenvalue.

    The minus/plus half-spin operators fix the even sector only for weights
    with lam_n = 0; the order-n spin operator accepts any weight at its
    S = Cn family parameters.
    """
    if params is None:
        if pair is None:
            pair = ("Cn", "Cn") if which == "c_spin" else ("Dn", "Dn")
        params = family_specialize(pair)
    n = len(lam)
    if which in ("dn_minus", "dn_plus") and lam[-1] != 0:
        raise ValueError("the split components mix unless lam_n = 0")
    p = koornwinder_triangular(lam, params)
    f = p.to_laurent()
    spec = OperatorSpec(which, n, params=params)
    img = apply_operator(spec, f, check_invariance=False)
    return proportionality_factor(img, f)


def proportionality_factor(img, f):
    """img == mu * f with mu in the coefficient field; NotEigenfunction
    otherwise."""
    if f.is_zero():
        raise ValueError("zero candidate")
    if img.is_zero():
        return ParamRat.zero(KOORN_VARS)
    s, a, b = img._common(f)
    e = max(b)
    ca = a.get(e)
    if ca is None:
        raise NotEigenfunction("supports differ")
    cb = b[e]
    ca = ca if isinstance(ca, ParamRat) else ParamRat.from_poly(ca)
    cb = cb if isinstance(cb, ParamRat) else ParamRat.from_poly(cb)
    mu = ca / cb
    want = f.map_coeff(lambda c: (
        c if isinstance(c, ParamRat) else ParamRat.from_poly(c)) * mu)
    got = img.map_coeff(lambda c: (
        c if isinstance(c, ParamRat) else ParamRat.from_poly(c)))
    if not (got == want):
        raise NotEigenfunction("image is not proportional to the input")
    return mu
