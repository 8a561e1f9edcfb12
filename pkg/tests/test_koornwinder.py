import random
from itertools import product

import pytest

from qkoorn.errors import NotEigenfunction, ZeroDenominator
from qkoorn.koornwinder import (FAMILY_PAIRS, OrthoPoly, a_type_eigen_check,
                                anti_periodic_params, bn_antiperiodic,
                                dn_combine, evaluate_jacobi_coeffs,
                                family_specialize, halfspin_eigencheck,
                                jacobi_triangular, koornwinder_triangular,
                                macdonald_An_extract, proportionality_factor,
                                qh1_limit, relm_constant, spin_monomial,
                                verify_joint_eigen)
from qkoorn.operators import (IDENTITY, OperatorSpec, ParamMap,
                              apply_operator)
from qkoorn.ratfield import JACOBI_VARS, KOORN_VARS, QQ, ParamPoly, ParamRat
from qkoorn.spectra import (ch_rho, eigenvalue_An, eigenvalue_Ern, hc_lift,
                            evaluate_generator_poly)
from qkoorn.weights import monomial_symmetric, weights_below

toR = lambda c: c if isinstance(c, ParamRat) else ParamRat.from_poly(c)


def test_p0_is_one():
    for n in (1, 2):
        p = koornwinder_triangular((0,) * n)
        assert list(p.coeffs) == [(0,) * n]
        assert p.leading_is_monic()


def test_unitriangular_and_joint_eigen():
    for lam in [(1,), (2,), (1, 0), (1, 1), (2, 1)]:
        p = koornwinder_triangular(lam, verify=True)
        assert p.leading_is_monic()
        for mu in p.coeffs:
            assert mu in weights_below(lam)


def test_rank_one_solve_matches_direct_ratio():
    # single back-substitution step: c_0 = [D]_{(1),(0)} / E(1)
    from qkoorn.operators import operator_matrix
    mat = operator_matrix(OperatorSpec("koornwinder", 1, 1), (1,))
    p = koornwinder_triangular((1,))
    ev = eigenvalue_Ern(1, 1, (1,))
    assert p.coeffs[(0,)] == ParamRat.from_poly(mat[(1,)][(0,)]) / ev


def test_decoupling_product_structure():
    # at vanishing internal coupling, p_(1,1) is the product of the two
    # one-variable polynomials
    th1 = ParamMap({"th": "1"})
    p2 = koornwinder_triangular((1, 1), th1)
    p1 = koornwinder_triangular((1,))
    c0 = p1.coeffs[(0,)]
    # (z1 + 1/z1 + c0)(z2 + 1/z2 + c0) expanded over the invariant basis:
    # m_(1,1) + c0 m_(1,0) + c0^2 m_(0,0)
    want = {(1, 1): ParamRat.one(KOORN_VARS), (1, 0): c0, (0, 0): c0 * c0}
    assert set(p2.coeffs) == set(want)
    for k, v in want.items():
        assert p2.coeffs[k] == v


def test_eigenvalue_collision_raises():
    # abcd = 1 makes the rank-one eigenvalues of (1) and (0) collide at
    # q = 1/4 (h = 2 solves q h = 1/h); the numeric solve must fail loudly
    from qkoorn.weightfn import NumericPoint, koornwinder_numeric
    pt = NumericPoint(QQ(1, 4), QQ(1, 2), 1, -1, 1, -1)
    with pytest.raises(ZeroDenominator):
        koornwinder_numeric((1,), pt)


def test_jacobi_triangular_and_moments():
    from qkoorn.weightfn import jacobi_moments, jacobi_moment_orthogonality
    moments = jacobi_moments(10)
    for m in (1, 2, 3):
        p = jacobi_triangular((m,), verify=True)
        assert jacobi_moment_orthogonality(p, moments)
    p = jacobi_triangular((1, 1), verify=True)
    assert p.leading_is_monic()


def test_qh1_limit_matches_differential_branch():
    for lam in [(0,), (1,), (2,), (1, 0), (1, 1)]:
        n = len(lam)
        psym = koornwinder_triangular(lam)
        jac = jacobi_triangular(lam)
        for exps in ((0, 1, 0, 0, 0), (1, 0, 0, 0, 1), (1, 1, 1, 0, 0)):
            g, g0, g1, g0p, g1p = exps
            lim = qh1_limit(psym, *exps)
            ref = evaluate_jacobi_coeffs(jac, g, g0 + g0p, g1 + g1p)
            assert lim.coeffs == ref.coeffs


def test_a_type_extraction():
    p0 = koornwinder_triangular((0, 0))
    assert macdonald_An_extract(p0).coeffs == {(0, 0): ParamRat.one(KOORN_VARS)}
    # single dominant weight of its size below (1,0)
    p10 = macdonald_An_extract(koornwinder_triangular((1, 0)))
    assert list(p10.coeffs) == [(1, 0)]
    for lam in [(1, 0), (2, 0), (1, 1)]:
        pa = macdonald_An_extract(koornwinder_triangular(lam))
        a_type_eigen_check(pa, 1)


def test_a_type_centered_eigen():
    pa = macdonald_An_extract(koornwinder_triangular((2, 0)))
    spec = OperatorSpec("a_type_centered", 2, 1)
    f = pa.to_laurent()
    img = apply_operator(spec, f, check_invariance=False)
    ev = eigenvalue_An(1, 2, (2, 0))
    want = f.map_coeff(lambda c: toR(c) * ev)
    assert img.map_coeff(toR) == want


def test_family_table():
    dn = family_specialize("Dn")
    assert dn.as_subst() == {k: ParamPoly.one(KOORN_VARS)
                             for k in ("ga", "gb", "gc", "gd")}
    bb = family_specialize(("Bn", "Bn"))
    assert set(bb.as_subst()) == {"gb", "gc", "gd"}
    cc = family_specialize(("Cn", "Cn"))
    sub = cc.as_subst()
    gb = ParamPoly.variable(KOORN_VARS, "gb")
    assert sub["ga"] == gb and sub["gc"] == gb and sub["gd"] == gb
    with pytest.raises(ValueError):
        family_specialize(("En", "En"))


def test_families_joint_eigenfunctions():
    for pair in FAMILY_PAIRS:
        if pair == ("An", "An"):
            continue
        fam = family_specialize(pair)
        for lam in [(1, 0), (1, 1)]:
            p = koornwinder_triangular(lam, fam)
            for r in (1, 2):
                verify_joint_eigen(p, r, fam)


def test_spin_conjugation_identity():
    # conjugating the rank-one operator by the spin monomial matches the
    # pushed-parameter operator plus the displayed additive constant
    n = 2
    for S in ("Bn", "Cn"):
        fam = family_specialize(("Bn", S))
        parcon = anti_periodic_params(S)
        spin = spin_monomial(n)
        m10 = monomial_symmetric((1, 0))
        lhs = apply_operator(OperatorSpec("koornwinder", n, 1, fam),
                             spin * m10, check_invariance=False)
        rhs_core = apply_operator(OperatorSpec("koornwinder", n, 1, parcon),
                                  m10)
        const = relm_constant(n, S)
        rhs = spin * (rhs_core + m10.map_coeff(lambda c: c * const))
        assert lhs == rhs


def test_spin_monomial_is_eigenfunction_at_zero_weight():
    n = 2
    for S in ("Bn", "Cn"):
        fam = family_specialize(("Bn", S))
        spin = spin_monomial(n)
        img = apply_operator(OperatorSpec("koornwinder", n, 1, fam), spin,
                             check_invariance=False)
        mu = proportionality_factor(img, spin)
        assert mu == ParamRat.from_poly(relm_constant(n, S))


def test_antiperiodic_member_eigen():
    out, p, params = bn_antiperiodic((1, 0), "Bn")
    assert out.scale == 2
    # the product with the spin monomial stays an eigenfunction of the
    # family operator, with the conjugation constant added
    fam = family_specialize(("Bn", "Bn"))
    img = apply_operator(OperatorSpec("koornwinder", 2, 1, fam), out,
                         check_invariance=False)
    mu = proportionality_factor(img, out)
    ev = eigenvalue_Ern(1, 2, (1, 0), params.as_subst())
    assert mu == ParamRat.from_poly(ev + relm_constant(2, "Bn"))


def test_dn_combinations():
    f0, p0 = dn_combine((1, 0), 0)
    assert p0.coeffs == koornwinder_triangular(
        (1, 0), family_specialize("Dn")).coeffs
    f0b, p0b = dn_combine((1, 1), 0)
    for r in (1, 2):
        verify_joint_eigen(p0b, r, family_specialize("Dn"))
    f1, p1 = dn_combine((1, 0), 1)
    assert f1.scale == 2
    # the spin-sector combination is an eigenfunction of the family operator
    img = apply_operator(OperatorSpec("koornwinder", 2, 1,
                                      family_specialize("Dn")), f1,
                         check_invariance=False)
    mu = proportionality_factor(img, f1)
    qh = ParamPoly.variable(KOORN_VARS, "qh")
    th = ParamPoly.variable(KOORN_VARS, "th")
    # 2 sum_j ch beta(lam_j + 1/2 + rho_j) - ch beta rho_j at vanishing
    # couplings, lam = (1,0): units qh^3 th^2 and qh
    def ch2(u):
        e, c, s = u.monomial_parts()
        return u + ParamPoly.monomial(KOORN_VARS, tuple(-x for x in e),
                                      1 / c, s)
    want = (ch2(qh ** 3 * th ** 2) + ch2(qh) - ch2(th ** 2)
            - ch2(ParamPoly.one(KOORN_VARS)))
    assert mu == ParamRat.from_poly(want)


def test_halfspin_eigenchecks():
    mu = halfspin_eigencheck("c_spin", (0, 0), ("Cn", "Cn"))
    # prod_j (w_j + 1/w_j) with w_j = th^(n-j) gb^2
    th = ParamPoly.variable(KOORN_VARS, "th")
    gb = ParamPoly.variable(KOORN_VARS, "gb")

    def inv(u):
        e, c, s = u.monomial_parts()
        return ParamPoly.monomial(KOORN_VARS, tuple(-x for x in e), 1 / c, s)

    w1 = th * gb ** 2
    w2 = gb ** 2
    want = (w1 + inv(w1)) * (w2 + inv(w2))
    assert mu == ParamRat.from_poly(want)
    # applying the operator twice scales by the square
    fam = family_specialize(("Cn", "Cn"))
    p0 = monomial_symmetric((0, 0))
    spec = OperatorSpec("c_spin", 2, params=fam)
    twice = apply_operator(spec, apply_operator(spec, p0,
                                                check_invariance=False),
                           check_invariance=False)
    assert proportionality_factor(twice, p0) == mu * mu

    mu_p = halfspin_eigencheck("dn_plus", (0, 0))
    assert mu_p == ParamRat.from_poly(th + inv(th))
    mu_m = halfspin_eigencheck("dn_minus", (1, 0))
    with pytest.raises(ValueError):
        halfspin_eigencheck("dn_plus", (1, 1))


def test_halfspin_squares_in_commuting_algebra():
    n = 2
    for which, pair, scalefac in (("c_spin", ("Cn", "Cn"), 1),
                                  ("c_spin", ("Bn", "Cn"), 1),
                                  ("dn_plus", ("Dn", "Dn"), QQ(1, 4)),
                                  ("dn_minus", ("Dn", "Dn"), QQ(1, 4))):
        fam = family_specialize(pair)
        sub = fam.as_subst()
        for lam in [(0, 0), (1, 0), (2, 0)]:
            mu = halfspin_eigencheck(which, lam, pair)
            S = {e: ParamRat.const(KOORN_VARS, QQ(2 ** n) * scalefac)
                 for e in product((0, 1), repeat=n)}
            Q = hc_lift(S, n, sub)
            evs = [ParamRat.from_poly(eigenvalue_Ern(r, n, lam, sub))
                   for r in range(1, n + 1)]
            assert evaluate_generator_poly(Q, evs) == mu * mu


def test_trivial_spin_operator_counts_sign_terms():
    triv = ParamMap({"th": "1", "ga": "1", "gb": "1", "gc": "1", "gd": "1"})
    for n in (1, 2, 3):
        one = monomial_symmetric((0,) * n)
        img = apply_operator(OperatorSpec("c_spin", n, params=triv), one,
                             check_invariance=False)
        assert img == one.map_coeff(lambda c: c * (2 ** n))


def test_ortho_poly_json():
    p = koornwinder_triangular((1,))
    data = p.to_json()
    assert data["n"] == 1 and data["weight"] == [1]
    assert data["half_lattice"] is False
    assert data["coeffs"][-1]["value"] == "1"
    assert p.dumps() == p.dumps()
