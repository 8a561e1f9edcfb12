import cmath
import math
import random
from itertools import product

import pytest

from qkoorn.errors import NotInvariant
from qkoorn.laurent import LaurentPoly, LaurentRat
from qkoorn.operators import (IDENTITY, OperatorSpec, ParamMap,
                              apply_operator, apply_operator_grouped,
                              apply_operator_nested, apply_one_var,
                              apply_to_monomial, commutator_on_basis,
                              elementary_symmetric_apply, monomial_leading,
                              operator_matrix, ordered_set_partitions,
                              va_factor, vb_factor, _engine)
from qkoorn.ratfield import JACOBI_VARS, KOORN_VARS, QQ, ParamPoly, ParamRat
from qkoorn.spectra import eigenvalue_Ern, eigenvalue_jacobi
from qkoorn.weights import (HYPEROCTAHEDRAL, PERMUTATIONS_ONLY, dominance_leq,
                            expand_in_monomials, is_invariant,
                            monomial_symmetric, weights_below)

WIDTH1 = 1 + len(KOORN_VARS)


def _rat_value(rat, zvals, pvals):
    """Evaluate a flat-coefficient LaurentRat numerically (complex)."""
    def poly_val(p):
        tot = 0j
        for e, c in p.terms.items():
            term = complex(c)
            for x, k in zip(zvals + pvals, e):
                term *= x ** (QQ(k) / p.scale)
            tot += term
        return tot

    val = poly_val(rat.num)
    for _, (b, m) in rat.den.items():
        for _ in range(m):
            val /= poly_val(b)
    return val


def test_va_trivial_and_closed_form():
    th1 = ParamMap({"th": "1"})
    one = va_factor(WIDTH1, 1, (1,), 0, th1)
    assert one.num == LaurentPoly.const(WIDTH1, QQ(1)) and not one.den
    rng = random.Random(42)
    for _ in range(20):
        beta = rng.uniform(0.2, 1.2)
        g = rng.uniform(0.1, 2.0)
        z = rng.uniform(0.2, 2.8)
        th = math.exp(-beta * g / 2)
        w = cmath.exp(1j * z)
        va = va_factor(WIDTH1, 1, (1,), 0, IDENTITY)
        got = _rat_value(va, [w], [math.exp(-beta / 2), th, 1, 1, 1, 1])
        want = cmath.sin((1j * beta * g + z) / 2) / cmath.sin(z / 2)
        assert abs(got - want) < 1e-9


def test_va_shifted_argument_is_q_times_w():
    # the half-period-shifted ratio equals the plain one at argument q*w
    va0 = va_factor(WIDTH1, 1, (1,), 0, IDENTITY)
    va1 = va_factor(WIDTH1, 1, (1,), 1, IDENTITY)
    rng = random.Random(3)
    for _ in range(10):
        beta, g, z = rng.uniform(0.2, 1.0), rng.uniform(0.1, 2.0), \
            rng.uniform(0.3, 2.5)
        qh = math.exp(-beta / 2)
        th = math.exp(-beta * g / 2)
        w = cmath.exp(1j * z)
        pv = [qh, th, 1, 1, 1, 1]
        assert abs(_rat_value(va1, [w], pv) -
                   _rat_value(va0, [qh * qh * w], pv)) < 1e-9


def test_vb_trivial_and_closed_form():
    triv = ParamMap({"ga": "1", "gb": "1", "gc": "1", "gd": "1"})
    one = vb_factor(WIDTH1, 1, 0, 1, triv)
    assert one.num == LaurentPoly.const(WIDTH1, QQ(1)) and not one.den
    rng = random.Random(7)
    for _ in range(20):
        beta = rng.uniform(0.2, 1.0)
        g0, g1, g0p, g1p = (rng.uniform(0.1, 1.5) for _ in range(4))
        z = rng.uniform(0.3, 2.7)
        pv = [math.exp(-beta / 2), 1.0, math.exp(-beta * g0 / 2),
              math.exp(-beta * g1 / 2), math.exp(-beta * g0p / 2),
              math.exp(-beta * g1p / 2)]
        vb = vb_factor(WIDTH1, 1, 0, 1, IDENTITY)
        got = _rat_value(vb, [cmath.exp(1j * z)], pv)
        gamma = 1j * beta / 2
        mus = [1j * beta * g0, 1j * beta * g1, 1j * beta * g0p,
               1j * beta * g1p]
        want = (cmath.sin((mus[0] + z) / 2) / cmath.sin(z / 2)
                * cmath.cos((mus[1] + z) / 2) / cmath.cos(z / 2)
                * cmath.sin((mus[2] + gamma + z) / 2)
                / cmath.sin((gamma + z) / 2)
                * cmath.cos((mus[3] + gamma + z) / 2)
                / cmath.cos((gamma + z) / 2))
        assert abs(got - want) < 1e-8


def test_vb_half_period_covariance():
    # w -> -w is the swap ga<->gb, gc<->gd
    vb = vb_factor(WIDTH1, 1, 0, 1, IDENTITY)

    def negate_odd(p):
        out = {}
        for e, c in p.terms.items():
            sign = -1 if e[0] % 2 else 1
            out[e] = c * sign
        return LaurentPoly(p.n, out, p.scale)

    def swap(p):
        # exchange the ga/gb and gc/gd exponent slots
        out = {}
        for e, c in p.terms.items():
            e2 = (e[0], e[1], e[2], e[4], e[3], e[6], e[5])
            out[e2] = c
        return LaurentPoly(p.n, out, p.scale)

    lhs = LaurentRat(negate_odd(vb.num),
                     dict(vb.den))
    # compare as rational functions: cross-multiply numerators against the
    # swapped denominators
    rhs_num = swap(vb.num)
    lhs_num = negate_odd(vb.num)
    den_prod = LaurentPoly.const(WIDTH1, QQ(1))
    for _, (b, m) in vb.den.items():
        for _ in range(m):
            den_prod = den_prod * b
    swapped_den = swap(den_prod)
    neg_den = negate_odd(den_prod)
    assert lhs_num * swapped_den == rhs_num * neg_den


def test_ordered_set_partitions_counts():
    assert len(ordered_set_partitions((0,))) == 1
    assert len(ordered_set_partitions((0, 1))) == 3
    assert len(ordered_set_partitions((0, 1, 2))) == 13
    assert len(ordered_set_partitions((0, 1, 2, 3))) == 75


def test_V_building_block():
    eng = _engine(2, IDENTITY)
    v_empty = eng.V((), (), (0, 1))
    assert v_empty.num == LaurentPoly.const(eng.width, QQ(1))
    triv = ParamMap({"th": "1", "ga": "1", "gb": "1", "gc": "1", "gd": "1"})
    engt = _engine(2, triv)
    v = engt.V((0, 1), (1, -1), ())
    assert v.num == LaurentPoly.const(engt.width, QQ(1)) and not v.den
    # n = 1: the cell block is the external factor itself
    eng1 = _engine(1, IDENTITY)
    assert eng1.V((0,), (1,), ()).num == vb_factor(
        eng1.width, 1, 0, 1, IDENTITY).num


def test_W_base_cases():
    eng = _engine(2, IDENTITY)
    w0 = eng.W((0, 1), 0)
    assert w0.num == LaurentPoly.const(eng.width, QQ(1)) and not w0.den
    wempty = eng.W((), 2)
    assert wempty.num.is_zero()


def test_W_reduction_at_trivial_internal_coupling():
    # at th = 1 the chain sums collapse to (-1)^p times the plain sum of
    # external products over p-subsets (the sign-sum lemma)
    th1 = ParamMap({"th": "1"})
    for n, I in ((2, (0, 1)), (3, (0, 1, 2))):
        eng = _engine(n, th1)
        for p in range(1, len(I) + 1):
            w = eng.W(I, p)
            want = None
            from itertools import combinations
            for P in combinations(I, p):
                for eps in product((1, -1), repeat=p):
                    term = LaurentRat(LaurentPoly.const(eng.width, QQ(1)))
                    for j, e in zip(P, eps):
                        term = term * vb_factor(eng.width, n, j, e, th1)
                    want = term if want is None else want + term
            if p % 2:
                want = LaurentRat(-want.num, want.den)
            assert w == want


def test_annihilates_constants():
    for n in (1, 2, 3):
        one = monomial_symmetric((0,) * n)
        for r in range(1, n + 1):
            spec = OperatorSpec("koornwinder", n, r)
            assert apply_operator(spec, one).is_zero()


def test_rank_one_eigen_n1():
    spec = OperatorSpec("koornwinder", 1, 1)
    img = apply_operator(spec, monomial_symmetric((1,)))
    exp = expand_in_monomials(img)
    assert set(exp) == {(0,), (1,)}
    assert exp[(1,)] == eigenvalue_Ern(1, 1, (1,))


def test_decoupling_to_elementary_symmetric():
    th1 = ParamMap({"th": "1"})
    n = 2
    for lam in [(1, 1), (2, 0), (2, 1)]:
        m = monomial_symmetric(lam)
        for r in (1, 2):
            lhs = apply_operator(OperatorSpec("koornwinder", n, r, th1), m)
            rhs = elementary_symmetric_apply(r, m, th1)
            assert lhs == rhs


def test_operator_matrix_shape():
    spec = OperatorSpec("koornwinder", 2, 1)
    m0 = operator_matrix(spec, (0, 0))
    assert list(m0) == [(0, 0)] and not m0[(0, 0)]
    lam = (2, 1)
    for r in (1, 2):
        mat = operator_matrix(OperatorSpec("koornwinder", 2, r), lam)
        for mu, row in mat.items():
            for nu, val in row.items():
                assert dominance_leq(nu, mu)
                if nu == mu:
                    assert val == eigenvalue_Ern(r, 2, mu)


def test_commutators_vanish():
    c = commutator_on_basis(OperatorSpec("koornwinder", 2, 1),
                            OperatorSpec("koornwinder", 2, 2), (1, 1))
    assert c.is_zero()
    c = commutator_on_basis(OperatorSpec("a_type", 3, 1),
                            OperatorSpec("a_type", 3, 2), (1, 1, 0))
    assert c.is_zero()
    c = commutator_on_basis(OperatorSpec("koornwinder", 2, 1),
                            OperatorSpec("koornwinder", 2, 1), (2, 0))
    assert c.is_zero()


def test_form_equivalence_small():
    for n in (1, 2):
        for lam in weights_below((2,) + (1,) * (n - 1)):
            m = monomial_symmetric(lam)
            for r in range(1, n + 1):
                spec = OperatorSpec("koornwinder", n, r)
                a = apply_operator(spec, m)
                assert a == apply_operator_grouped(spec, m)
                if sum(lam) <= 2:
                    assert a == apply_operator_nested(spec, m)


def test_output_invariance_and_polynomiality():
    for lam in [(2, 0), (2, 1)]:
        for r in (1, 2):
            img = apply_to_monomial(OperatorSpec("koornwinder", 2, r), lam)
            assert is_invariant(img, HYPEROCTAHEDRAL)


def test_rejects_non_invariant_input():
    z1 = LaurentPoly(2, {(1, 0): ParamPoly.one(KOORN_VARS)})
    with pytest.raises(NotInvariant):
        apply_operator(OperatorSpec("koornwinder", 2, 1), z1)


def test_a_type_top_order_is_pure_translation():
    # the order-n operator of the permutation family translates every
    # variable: the image of a degree-d leading polynomial is q^d times it
    for n, lam in ((2, (2, 1)), (3, (1, 1, 0))):
        f = monomial_leading(lam)
        img = apply_operator(OperatorSpec("a_type", n, n), f,
                             check_invariance=False)
        q_d = ParamPoly.variable(KOORN_VARS, "qh", 2 * sum(lam))
        assert img == f.map_coeff(lambda c: c * q_d)


def test_one_var_operator_matches_rank_one_at_n1():
    m = monomial_symmetric((2,))
    assert apply_one_var(m, 0) == apply_operator(
        OperatorSpec("koornwinder", 1, 1), m)


def test_jacobi_operator_n1():
    spec = OperatorSpec("jacobi", 1)
    m1 = monomial_symmetric((1,), one=ParamPoly.one(JACOBI_VARS))
    img = apply_operator(spec, m1)
    exp = expand_in_monomials(img)
    assert exp[(1,)] == eigenvalue_jacobi(1, 1, (1,))
    # theta^2 + couplings: the zero-weight coefficient is 2(tg0 - tg1)
    t0 = ParamPoly.variable(JACOBI_VARS, "tg0")
    t1 = ParamPoly.variable(JACOBI_VARS, "tg1")
    assert exp[(0,)] == (t0 - t1) * 2


def test_jacobi_matrix_diagonal():
    lam = (2, 1)
    mat = operator_matrix(OperatorSpec("jacobi", 2), lam)
    for mu in mat:
        diag = mat[mu].get(mu, ParamPoly.zero(JACOBI_VARS))
        assert diag == eigenvalue_jacobi(1, 2, mu)


def test_operator_spec_json_roundtrip():
    spec = OperatorSpec("koornwinder", 2, 2, ParamMap({"th": "1"}))
    data = spec.to_json()
    assert data["kind"] == "Dr" and data["r"] == 2 and data["group"] == "BC"
    back = OperatorSpec.from_json(data)
    assert back.key == spec.key
    spin = OperatorSpec("c_spin", 3)
    assert OperatorSpec.from_json(spin.to_json()).key == spin.key
