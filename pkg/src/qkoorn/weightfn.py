"""Truncated weight function, constant-term inner products and the
Gram-Schmidt route, at exact rational parameter points.

The torus weight is a product of q-shifted factorials; for numeric work each
infinite product is truncated to its first M factors (indices m >= 0) and
denominator factors are expanded as geometric series inside a bounded
exponent box, so inner products are exact rationals that approximate the true
pairing to q-order M.  Identical numerator/denominator factors cancel as
multisets before any expansion, which keeps degenerate specializations (all
couplings trivial) exactly 1.

Half-parameters are generally irrational at a rational (q,t,a,b,c,d) point;
they enter only through h = ga*gb*gc*gd with h^2 = abcd/q, so specialized
operator data lives in the exact quadratic extension QuadExt = Q(sqrt(abcd/q))
and all tolerance comparisons are decided exactly there.
"""

from __future__ import annotations

from math import isqrt

from .errors import DegenerateNorm, ZeroDenominator
from .laurent import LaurentPoly
from .ratfield import JACOBI_VARS, KOORN_VARS, QQ, ParamPoly, ParamRat
from .weights import HYPEROCTAHEDRAL, monomial_symmetric, weights_below, worbit
from .koornwinder import OrthoPoly, _solve_triangular
from .operators import OperatorSpec, operator_matrix
from .spectra import eigenvalue_Ern


class QuadExt:
    """x + y*sqrt(H) with rational x, y and fixed rational H > 0."""

    __slots__ = ("x", "y", "H")

    def __init__(self, x, y, H):
        self.x = QQ(x)
        self.y = QQ(y)
        self.H = H

    @classmethod
    def rational(cls, x, H):
        return cls(x, 0, H)

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    def is_rational(self):
        return not self.y

    def __add__(self, other):
        other = self._coerce(other)
        return QuadExt(self.x + other.x, self.y + other.y, self.H)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.x, -self.y, self.H)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        return QuadExt(self.x * other.x + self.y * other.y * self.H,
                       self.x * other.y + self.y * other.x, self.H)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        nrm = other.x * other.x - other.y * other.y * self.H
        if not nrm:
            raise ZeroDivisionError("division by zero in QuadExt")
        inv = QuadExt(other.x / nrm, -other.y / nrm, self.H)
        return self * inv

    def __eq__(self, other):
        other = self._coerce(other)
        return self.x == other.x and self.y == other.y

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            return other
        return QuadExt(other, 0, self.H)

    def sign(self):
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0:
            return sx
        if sx == 0:
            return sy
        if sx == sy:
            return sx
        # opposite signs: compare x^2 against y^2 H
        diff = self.x * self.x - self.y * self.y * self.H
        big = (diff > 0) - (diff < 0)
        return sx * big

    def abs_leq(self, bound):
        """|self| <= bound, decided exactly (bound rational)."""
        hi = self._coerce(bound) - self
        lo = self + self._coerce(bound)
        return hi.sign() >= 0 and lo.sign() >= 0

    def to_float(self):
        return float(self.x) + float(self.y) * float(self.H) ** 0.5

    def __repr__(self):
        if not self.y:
            return str(self.x)
        return "(%s + %s*sqrt(%s))" % (self.x, self.y, self.H)


def _sqrt_rational(v):
    """Exact square root of a nonnegative rational, or None."""
    num, den = int(v.numerator), int(v.denominator)
    if num < 0:
        return None
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return QQ(rn, rd)


class NumericPoint:
    """A rational parameter point (q, t, a, b, c, d) with 0 < |q| < 1.

    q must be a square of a rational so the shift unit qh is rational;
    everything else specializes into Q(sqrt(abcd/q)).
    """

    def __init__(self, q, t, a, b, c, d):
        self.q = QQ(q)
        self.t = QQ(t)
        self.a, self.b, self.c, self.d = QQ(a), QQ(b), QQ(c), QQ(d)
        if not 0 < self.q < 1:
            raise ValueError("need 0 < q < 1")
        # |.| <= 1 keeps the box expansion meaningful; the boundary cases
        # (trivial couplings) telescope exactly and never expand a series.
        for name, v in (("t", self.t), ("a", self.a), ("b", self.b),
                        ("c", self.c), ("d", self.d)):
            if abs(v) > 1:
                raise ValueError("|%s| must be <= 1 for the torus weight"
                                 % name)
        qh = _sqrt_rational(self.q)
        if qh is None:
            raise ValueError("numeric mode needs q to be a rational square")
        self.qh = qh
        self.H = self.a * self.b * self.c * self.d / self.q
        if not self.H:
            raise ValueError("abcd must be nonzero")

    def key(self):
        return (self.q, self.t, self.a, self.b, self.c, self.d)

    # the four squared half-parameters with their sign conventions:
    # ga^2 = a, gb^2 = -b, gc^2 = c/qh, gd^2 = -d/qh
    def _gsquares(self):
        return (self.a, -self.b, self.c / self.qh, -self.d / self.qh)

    def specialize_poly(self, poly):
        """ParamPoly (over the half-parameters) -> QuadExt."""
        if poly.scale != 1:
            raise ValueError("fractional parameter powers at a numeric point")
        gsq = self._gsquares()
        tot = QuadExt.rational(0, self.H)
        for e, coeff in poly.terms.items():
            alpha, beta = e[0], e[1]
            gexp = e[2:]
            if beta % 2:
                raise ValueError("odd power of th at a numeric point")
            par = gexp[0] % 2
            if any(x % 2 != par for x in gexp):
                raise ValueError("unmatched external half-parameter parity")
            val = QQ(coeff) * self.t ** (beta // 2)
            for gs, k in zip(gsq, gexp):
                val = val * gs ** ((k - par) // 2)
            val = val * self.qh ** alpha
            if par:
                tot = tot + QuadExt(0, val, self.H)
            else:
                tot = tot + QuadExt(val, 0, self.H)
        return tot

    def specialize(self, value):
        if isinstance(value, ParamRat):
            num = self.specialize_poly(value.num)
            den = self.specialize_poly(value.den)
            if not den:
                raise ZeroDenominator("parameter point hits a pole")
            return num / den
        return self.specialize_poly(value)


DEFAULT_POINT = NumericPoint(QQ(1, 4), QQ(1, 2), QQ(1, 2), QQ(-1, 3),
                             QQ(1, 5), QQ(-1, 7))


def tol(point, M, deg):
    """Truncation tolerance 10 |q|^(M - deg)."""
    return 10 * abs(point.q) ** (M - deg)


# ---------------------------------------------------------------------------
# the truncated weight


class WeightFunctionSpec:
    """Family, truncation order and numeric parameter point for the torus
    weight; zbox bounds the exponent box the expansion is exact on."""

    def __init__(self, n, M=16, point=DEFAULT_POINT, family="koornwinder",
                 zbox=None):
        self.n = n
        self.M = M
        self.point = point
        self.family = family
        self.zbox = zbox if zbox is not None else max(2 * M + 6, 12)

    def key(self):
        return (self.n, self.M, self.family, self.zbox, self.point.key())


def _geometric_mul(terms, coeff, step, box):
    """Multiply by the series 1/(1 - coeff z^step), truncated to the box."""
    out = dict(terms)
    for e, c in terms.items():
        cur = c
        pos = e
        while True:
            pos = tuple(x + y for x, y in zip(pos, step))
            if any(abs(x) > box for x in pos):
                break
            cur = cur * coeff
            if not cur:
                break
            out[pos] = out.get(pos, QQ(0)) + cur
    return {e: c for e, c in out.items() if c}


def _binomial_mul(terms, coeff, step, box):
    """Multiply by (1 - coeff z^step), truncated to the box."""
    out = dict(terms)
    for e, c in terms.items():
        pos = tuple(x + y for x, y in zip(e, step))
        if any(abs(x) > box for x in pos):
            continue
        v = out.get(pos, QQ(0)) - coeff * c
        if v:
            out[pos] = v
        else:
            out.pop(pos, None)
    return out


def _weight_factors(spec):
    """Numerator and denominator factor multisets (coeff, direction) of the
    truncated weight, with exact multiset cancellation and square splitting.

    Every factor means (1 - coeff * z^direction).
    """
    n, M, p = spec.n, spec.M, spec.point
    num, den = {}, {}

    def add(target, coeff, step):
        if not coeff:
            return
        key = (coeff, step)
        target[key] = target.get(key, 0) + 1

    def unit(j, s):
        e = [0] * n
        e[j] = s
        return tuple(e)

    def pair(j, k, sj, sk):
        e = [0] * n
        e[j] += sj
        e[k] += sk
        return tuple(e)

    directions = []
    if spec.family in ("koornwinder", "a_type"):
        for j in range(n):
            for k in range(j + 1, n):
                if spec.family == "koornwinder":
                    directions += [pair(j, k, 1, 1), pair(j, k, -1, -1)]
                directions += [pair(j, k, 1, -1), pair(j, k, -1, 1)]
    else:
        raise ValueError("no truncated product weight for %r" % spec.family)
    for step in directions:
        for m in range(M):
            qm = p.q ** m
            add(num, qm, step)
            add(den, p.t * qm, step)
    if spec.family == "koornwinder":
        # the external factor in its fully split form: the numerator
        # (w^2; q) appears as (w, -w, qh w, -qh w; q), which aligns the
        # truncation with the four denominator families so that trivial
        # couplings telescope to exactly 1
        for j in range(n):
            for s in (1, -1):
                e = unit(j, s)
                for m in range(M):
                    qm = p.q ** m
                    for r in (QQ(1), QQ(-1), p.qh, -p.qh):
                        add(num, r * qm, e)
                    for x in (p.a, p.b, p.c, p.d):
                        add(den, x * qm, e)
    # multiset cancellation
    for key in list(num):
        if key in den:
            m = min(num[key], den[key])
            num[key] -= m
            den[key] -= m
            if not num[key]:
                del num[key]
            if not den[key]:
                del den[key]
    return num, den


_DELTA_CACHE = {}


def _line_series(factors, box):
    """Univariate truncated product of (1 - c u^s) factors, s = +-1, with
    denominator factors expanded geometrically; support [-box, box]."""
    cur = {0: QQ(1)}
    for (coeff, s, invert), mult in sorted(factors.items()):
        for _ in range(mult):
            if not invert:
                out = dict(cur)
                for k, v in cur.items():
                    t = k + s
                    if abs(t) > box:
                        continue
                    w = out.get(t, QQ(0)) - coeff * v
                    if w:
                        out[t] = w
                    else:
                        out.pop(t, None)
                cur = out
            else:
                out = dict(cur)
                for k, v in cur.items():
                    t, c = k, v
                    while True:
                        t += s
                        if abs(t) > box:
                            break
                        c = c * coeff
                        if not c:
                            break
                        out[t] = out.get(t, QQ(0)) + c
                cur = {k: v for k, v in out.items() if v}
    return cur


def delta_truncate(spec):
    """The truncated weight as an exact Laurent polynomial on the box.

    Factors are grouped by their composite direction; each line's univariate
    series is built first and the handful of line series are then multiplied
    into the box, which is far cheaper than accumulating factor by factor in
    n dimensions."""
    key = spec.key()
    got = _DELTA_CACHE.get(key)
    if got is not None:
        return got
    num, den = _weight_factors(spec)
    lines = {}
    for source, invert in ((num, False), (den, True)):
        for (coeff, step), mult in source.items():
            prim = step
            s = 1
            if next(x for x in step if x) < 0:
                prim = tuple(-x for x in step)
                s = -1
            fac = lines.setdefault(prim, {})
            k = (coeff, s, invert)
            fac[k] = fac.get(k, 0) + mult
    box = spec.zbox
    # scale every line series to integers so the cross-line product runs in
    # integer arithmetic; one division by the collected denominator at the
    # end avoids per-operation rational normalization
    terms = {(0,) * spec.n: 1}
    total_den = QQ(1)
    for prim in sorted(lines):
        series = _line_series(lines[prim], box)
        den = QQ(1)
        for v in series.values():
            d = QQ(v.denominator)
            den = den * d / _qq_gcd(den, d)
        iser = {k: int(v * den) for k, v in series.items()}
        total_den = total_den * den
        out = {}
        for e, c in terms.items():
            for k, v in iser.items():
                t = tuple(x + k * y for x, y in zip(e, prim))
                if any(abs(x) > box for x in t):
                    continue
                w = out.get(t, 0) + c * v
                if w:
                    out[t] = w
                else:
                    out.pop(t, None)
        terms = out
    inv = QQ(1) / total_den
    got = LaurentPoly(spec.n, {e: c * inv for e, c in terms.items() if c})
    _DELTA_CACHE[key] = got
    return got


def _qq_gcd(a, b):
    from math import gcd
    return QQ(gcd(int(a.numerator) * int(b.denominator),
                  int(b.numerator) * int(a.denominator)),
              int(a.denominator) * int(b.denominator))


def inner_product(f, g, spec):
    """Constant-term pairing CT[f(z) g(1/z) Delta_M(z)], normalized by the
    torus volume; exact in the coefficient field of f and g."""
    delta = delta_truncate(spec)
    total = None
    for ef, cf in f.terms.items():
        for eg, cg in g.terms.items():
            e = tuple(y - x for x, y in zip(ef, eg))
            w = delta.terms.get(e)
            if w is None:
                continue
            term = cf * cg * w
            total = term if total is None else total + term
    if total is None:
        total = QQ(0)
    return total


def monomial_numeric(lam, group=HYPEROCTAHEDRAL):
    return monomial_symmetric(lam, group, one=QQ(1))


def gram_schmidt_oracle(lam, spec, _cache=None):
    """Orthogonalize the monomial basis below lam against the truncated
    weight; classical projection recursion, exact rational coefficients."""
    cache = _cache if _cache is not None else {}
    order = sorted(weights_below(lam), key=lambda w: (sum(w), w))
    polys = {}
    for mu in order:
        if _cache is not None and mu in _cache:
            polys[mu] = _cache[mu]
            continue
        f = monomial_numeric(mu)
        for nu in order:
            if nu == mu:
                break
            p_nu, norm = polys[nu]
            if not norm:
                raise DegenerateNorm("vanishing truncated norm at %s" % (nu,))
            c = inner_product(monomial_numeric(mu), p_nu, spec) / norm
            if c:
                f = f + p_nu.scalar_mul(-c)
        norm = inner_product(f, f, spec)
        polys[mu] = (f, norm)
        if _cache is not None:
            _cache[mu] = polys[mu]
    f, _ = polys[lam]
    coeffs = {}
    for e, c in f.terms.items():
        mu = tuple(sorted((abs(x) for x in e), reverse=True))
        if mu not in coeffs:
            coeffs[mu] = c
    return OrthoPoly(lam, coeffs)


def gram_schmidt_order_variant(lam, spec):
    """Same orthogonalization along the plain lexicographic refinement."""
    order = sorted(weights_below(lam))
    polys = {}
    for mu in order:
        f = monomial_numeric(mu)
        for nu in order:
            if nu == mu:
                break
            p_nu, norm = polys[nu]
            if not norm:
                raise DegenerateNorm("vanishing truncated norm at %s" % (nu,))
            c = inner_product(monomial_numeric(mu), p_nu, spec) / norm
            if c:
                f = f + p_nu.scalar_mul(-c)
        polys[mu] = (f, inner_product(f, f, spec))
    f, _ = polys[lam]
    coeffs = {}
    for e, c in f.terms.items():
        mu = tuple(sorted((abs(x) for x in e), reverse=True))
        if mu not in coeffs:
            coeffs[mu] = c
    return OrthoPoly(lam, coeffs)


# ---------------------------------------------------------------------------
# numeric operator work in the quadratic extension


def numeric_matrix(spec_op, lam, point):
    """Specialize the symbolic operator matrix at a numeric point."""
    sym = operator_matrix(spec_op, lam)
    out = {}
    for mu, row in sym.items():
        out[mu] = {nu: point.specialize(v) for nu, v in row.items()}
    return out


def koornwinder_numeric(lam, point):
    """Back-substituted expansion at a numeric point; raises ZeroDenominator
    on an eigenvalue collision (never perturbs silently)."""
    n = len(lam)
    spec_op = OperatorSpec("koornwinder", n, 1)
    matrix = numeric_matrix(spec_op, lam, point)
    ev = point.specialize(eigenvalue_Ern(1, n, lam))
    one = QuadExt.rational(1, point.H)
    coeffs = _solve_triangular(matrix, lam, ev, one)
    return OrthoPoly(lam, coeffs)


def numeric_apply_to_monomial(spec_op, lam, point):
    """D_r m_lam at a numeric point: specialize the cached symbolic image."""
    from .operators import apply_to_monomial
    img = apply_to_monomial(spec_op, lam)
    return img.map_coeff(point.specialize)


# ---------------------------------------------------------------------------
# exact oracles for the differential branch


def jacobi_weight_exact(n, g, tg0, tg1):
    """The q -> 1 torus weight at integer couplings as an exact Laurent
    polynomial: products of sin^2/cos^2 powers in half angles."""
    for v in (g, tg0, tg1):
        if v < 0 or int(v) != v:
            raise ValueError("exact weight needs nonnegative integers")
    quarter = QQ(1, 4)

    def sin2(step):
        # sin^2 of the half angle along z^step: (2 - w - 1/w)/4
        return {(0,) * n: 2 * quarter, step: -quarter,
                tuple(-x for x in step): -quarter}

    def cos2(step):
        return {(0,) * n: 2 * quarter, step: quarter,
                tuple(-x for x in step): quarter}

    total = LaurentPoly.const(n, QQ(1))
    for j in range(n):
        for k in range(j + 1, n):
            for sk in (1, -1):
                e = [0] * n
                e[j] = 1
                e[k] = sk
                for _ in range(g):
                    total = total * LaurentPoly(n, sin2(tuple(e)))
    for j in range(n):
        e = [0] * n
        e[j] = 1
        for _ in range(tg0):
            total = total * LaurentPoly(n, sin2(tuple(e)))
        for _ in range(tg1):
            total = total * LaurentPoly(n, cos2(tuple(e)))
    return total


def jacobi_inner_exact(f, g, weight):
    """Constant-term pairing against an exact trig-power weight."""
    total = QQ(0)
    for ef, cf in f.terms.items():
        for eg, cg in g.terms.items():
            e = tuple(y - x for x, y in zip(ef, eg))
            w = weight.terms.get(e)
            if w is not None:
                total = total + cf * cg * w
    return total


def jacobi_moments(kmax):
    """Symbolic one-variable moments of |sin(x/2)|^(2 tg0) |cos(x/2)|^(2 tg1)
    normalized to M_0 = 1, over the rational function field in (tg0, tg1).

    The recurrence (s+c+k+1) M_{k+1} + 2(s-c) M_k + (s+c-k+1) M_{k-1} = 0
    follows from integrating the derivative of weight * z^k * (z^2-1)/z.
    """
    s = ParamPoly.variable(JACOBI_VARS, "tg0")
    c = ParamPoly.variable(JACOBI_VARS, "tg1")
    one = ParamPoly.one(JACOBI_VARS)
    # with D_k = prod_{j<=k}(s+c+j) the numerators N_k = M_k D_k satisfy a
    # polynomial two-term recurrence, keeping denominators in factored form
    nums = [one, c - s]
    for k in range(1, kmax):
        nxt = -((s - c) * 2 * nums[k] + (s + c - k + 1) * (s + c + k)
                * nums[k - 1])
        nums.append(nxt)
    moments = []
    den = one
    for k in range(kmax + 1):
        if k:
            den = den * (s + c + k)
        moments.append(ParamRat(nums[k], den))
    return moments


def jacobi_moment_orthogonality(p, moments):
    """Check a one-variable differential-branch expansion against the moment
    oracle: the pairing with every lower monomial must vanish.

    Together with unitriangularity this pins the polynomial down completely,
    so it is a full independent characterization."""
    m = p.weight[0]
    zero = ParamRat.zero(JACOBI_VARS)
    for k in range(0, m):
        total = zero
        for (j,), c in p.coeffs.items():
            g_jk = moments[abs(j - k)] + moments[j + k]
            if j:
                g_jk = g_jk * 2
            total = total + c * g_jk
        if not total.is_zero():
            return False
    return True


def jacobi_gs_one_var(m, moments):
    """Gram-Schmidt for the one-variable differential branch against the
    symbolic moment oracle; returns the unitriangular coefficients."""
    def ip(fa, fb):
        total = ParamRat.zero(JACOBI_VARS)
        for i, ci in fa.items():
            for j, cj in fb.items():
                k = abs(i - j)
                total = total + ci * cj * moments[k]
        return total

    basis = {}
    for d in range(0, m + 1):
        f = {d: ParamRat.one(JACOBI_VARS)}
        if d:
            f[-d] = ParamRat.one(JACOBI_VARS)
        if d == 0:
            f = {0: ParamRat.one(JACOBI_VARS)}
        for dp in range(0, d):
            p = basis[dp]
            denom = ip(p, p)
            coeff = ip(f, p) / denom
            if coeff.is_zero():
                continue
            for e, c in p.items():
                v = f.get(e, ParamRat.zero(JACOBI_VARS)) - coeff * c
                if v.is_zero():
                    f.pop(e, None)
                else:
                    f[e] = v
        basis[d] = f
    out = {}
    f = basis[m]
    for e, c in f.items():
        out[(abs(e),)] = c
    return out
