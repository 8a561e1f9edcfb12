"""Exact coefficient field: sparse Laurent polynomials and rational functions
in a tuple of named commuting indeterminates.

The default tuple ``KOORN_VARS`` holds the six half-parameters
(qh, th, ga, gb, gc, gd).  In the multiplicative encoding

    q = qh^2,  t = th^2,  a = ga^2,  b = -gb^2,  c = gc^2*qh,  d = -gd^2*qh,

every trigonometric coefficient ratio of the difference operators becomes an
honest rational function, so no root extensions are ever needed.  ``ParamPoly``
also serves other coefficient rings (symbolic t/p vectors for eigenvalue
identities, the additive (g, tg0, tg1) ring of the differential-operator
branch) by passing a different variable tuple.

Exponents may be negative (Laurent) and may sit on a refined lattice: a poly
carries an integer ``scale`` and stores exponents multiplied by it, so e.g.
qh^(1/3) is representable exactly.  All arithmetic is exact rational.
"""

from __future__ import annotations

from math import gcd

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ

from .errors import DenominatorVanishes

KOORN_VARS = ("qh", "th", "ga", "gb", "gc", "gd")
JACOBI_VARS = ("g", "tg0", "tg1")

_ZERO = QQ(0)
_ONE = QQ(1)


def _qq(x):
    return x if isinstance(x, type(_ZERO)) else QQ(x)


def _content(coeffs):
    """gcd of a list of rationals, normalized positive."""
    num = 0
    den = 1
    for c in coeffs:
        cn, cd = int(c.numerator), int(c.denominator)
        num = gcd(num, abs(cn))
        den = den * cd // gcd(den, cd)
    if num == 0:
        return _ONE
    return QQ(num, den)


class ParamPoly:
    """Sparse Laurent polynomial over ``QQ`` in named indeterminates.

    terms: dict mapping exponent tuples (ints, in units of 1/scale) to
    nonzero rational coefficients.
    """

    __slots__ = ("vars", "scale", "terms", "_hash")

    def __init__(self, vars_, terms, scale=1):
        self.vars = vars_
        clean = {e: c for e, c in terms.items() if c}
        if scale > 1 and clean:
            g = scale
            for e in clean:
                for x in e:
                    g = gcd(g, x)
                    if g == 1:
                        break
                if g == 1:
                    break
            if g > 1:
                clean = {tuple(x // g for x in e): c for e, c in clean.items()}
                scale //= g
        self.scale = scale if clean else 1
        self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, vars_):
        return cls(vars_, {})

    @classmethod
    def const(cls, vars_, c):
        c = _qq(c)
        return cls(vars_, {(0,) * len(vars_): c} if c else {})

    @classmethod
    def one(cls, vars_):
        return cls.const(vars_, 1)

    @classmethod
    def monomial(cls, vars_, exps, coeff=1, scale=1):
        return cls(vars_, {tuple(exps): _qq(coeff)}, scale)

    @classmethod
    def variable(cls, vars_, name, power=1):
        e = [0] * len(vars_)
        if isinstance(power, tuple):
            num, den = power
        else:
            num, den = power, 1
        e[vars_.index(name)] = num
        return cls(vars_, {tuple(e): _ONE}, den)

    # -- helpers -----------------------------------------------------------

    def _lifted(self, scale):
        if scale == self.scale:
            return self.terms
        f = scale // self.scale
        return {tuple(x * f for x in e): c for e, c in self.terms.items()}

    def _common(self, other):
        s = self.scale * other.scale // gcd(self.scale, other.scale)
        return s, self._lifted(s), other._lifted(s)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_one(self):
        if len(self.terms) != 1:
            return False
        (e, c), = self.terms.items()
        return c == 1 and not any(e)

    def is_monomial(self):
        return len(self.terms) == 1

    def monomial_parts(self):
        (e, c), = self.terms.items()
        return e, c, self.scale

    def lex_leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def __len__(self):
        return len(self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, type(_ZERO))):
            other = ParamPoly.const(self.vars, other)
        elif isinstance(other, ParamRat):
            return ParamRat.from_poly(self) + other
        s, a, b = self._common(other)
        out = dict(a)
        for e, c in b.items():
            v = out.get(e, _ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return ParamPoly(self.vars, out, s)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.vars, {e: -c for e, c in self.terms.items()}, self.scale)

    def __sub__(self, other):
        if isinstance(other, (int, type(_ZERO))):
            other = ParamPoly.const(self.vars, other)
        elif isinstance(other, ParamRat):
            return ParamRat.from_poly(self) - other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, type(_ZERO))):
            c = _qq(other)
            if not c:
                return ParamPoly.zero(self.vars)
            return ParamPoly(self.vars, {e: v * c for e, v in self.terms.items()},
                             self.scale)
        if isinstance(other, ParamRat):
            return ParamRat.from_poly(self) * other
        s, a, b = self._common(other)
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e, _ZERO) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return ParamPoly(self.vars, out, s)

    __rmul__ = __mul__

    def mul_monomial(self, exps, coeff=1, scale=1):
        """Fast multiply by coeff * x^exps (exps in units of 1/scale)."""
        c = _qq(coeff)
        if not c:
            return ParamPoly.zero(self.vars)
        s = self.scale * scale // gcd(self.scale, scale)
        f = s // scale
        e0 = tuple(x * f for x in exps)
        a = self._lifted(s)
        return ParamPoly(self.vars,
                         {tuple(x + y for x, y in zip(e, e0)): v * c
                          for e, v in a.items()}, s)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial; use ParamRat")
        out = ParamPoly.one(self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, type(_ZERO))):
            other = ParamPoly.const(self.vars, other)
        if isinstance(other, ParamRat):
            return ParamRat.from_poly(self) == other
        if not isinstance(other, ParamPoly):
            return NotImplemented
        s, a, b = self._common(other)
        return a == b

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, self.scale, frozenset(self.terms.items())))
        return self._hash

    # -- structure ---------------------------------------------------------

    def eval_var(self, name, value):
        """Substitute one variable by a rational value; stays a ParamPoly."""
        i = self.vars.index(name)
        value = _qq(value)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k % self.scale:
                raise ValueError("fractional exponent in eval_var")
            v = c * value ** (k // self.scale)
            e2 = e[:i] + (0,) + e[i + 1:]
            w = out.get(e2, _ZERO) + v
            if w:
                out[e2] = w
            else:
                out.pop(e2, None)
        return ParamPoly(self.vars, out, self.scale)

    def divide_linear(self, name, root):
        """Exact division by (x_name - root); remainder must vanish."""
        i = self.vars.index(name)
        root = _qq(root)
        if any(e[i] % self.scale for e in self.terms):
            raise ValueError("fractional exponent in divide_linear")
        lo = min(e[i] for e in self.terms) // self.scale
        # strip x^lo so the poly is honest in x, divide, put x^lo back
        cols = {}
        for e, c in self.terms.items():
            k = e[i] // self.scale - lo
            rest = e[:i] + (0,) + e[i + 1:]
            cols.setdefault(k, {})[rest] = c
        deg = max(cols)
        quot = {}
        carry = {}
        for k in range(deg, 0, -1):
            cur = dict(carry)
            for rest, c in cols.get(k, {}).items():
                v = cur.get(rest, _ZERO) + c
                if v:
                    cur[rest] = v
                else:
                    cur.pop(rest, None)
            quot[k - 1] = cur
            carry = {r: c * root for r, c in cur.items()}
        rem = dict(carry)
        for rest, c in cols.get(0, {}).items():
            v = rem.get(rest, _ZERO) + c
            if v:
                rem[rest] = v
            else:
                rem.pop(rest, None)
        if rem:
            raise DenominatorVanishes("linear factor does not divide exactly")
        out = {}
        for k, col in quot.items():
            for rest, c in col.items():
                e = rest[:i] + ((k + lo) * self.scale,) + rest[i + 1:]
                out[e] = c
        return ParamPoly(self.vars, out, self.scale)

    def substitute(self, sigma):
        """Ring homomorphism sending variables to ParamRat values.

        sigma maps variable names to ParamRat (or ParamPoly / rational)
        values over the same variable tuple.  Unlisted variables map to
        themselves.  Fractional exponents require monomial images.
        """
        vals = {}
        for name, v in sigma.items():
            vals[self.vars.index(name)] = _as_rat(self.vars, v)
        out = ParamRat.zero(self.vars)
        cache = {}
        for e, c in self.terms.items():
            term = ParamRat.from_poly(ParamPoly.const(self.vars, c))
            mono = [0] * len(self.vars)
            for i, k in enumerate(e):
                if not k:
                    continue
                if i not in vals:
                    mono[i] += k
                    continue
                key = (i, k)
                if key not in cache:
                    cache[key] = _rat_power(vals[i], k, self.scale)
                term = term * cache[key]
            if any(mono):
                term = term * ParamRat.from_poly(
                    ParamPoly.monomial(self.vars, mono, 1, self.scale))
            out = out + term
        return out

    def render(self):
        """Canonical text form: sum of monomials in a fixed term order."""
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            factors = []
            for name, k in zip(self.vars, e):
                if not k:
                    continue
                if k % self.scale == 0:
                    p = k // self.scale
                    factors.append(name if p == 1 else "%s^%d" % (name, p))
                else:
                    factors.append("%s^(%d/%d)" % (name, k, self.scale))
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append("%s*%s" % (c, body))
        s = parts[0]
        for p in parts[1:]:
            s += p if p.startswith("-") else "+" + p
        return s

    def __repr__(self):
        return "ParamPoly(%s)" % self.render()


def _rat_power(v, k, scale):
    """v ** (k/scale) for ParamRat v; fractional powers need monomial v."""
    if k % scale == 0:
        return v ** (k // scale)
    num, den = v.num, v.den
    if not (num.is_monomial() and den.is_monomial()):
        raise ValueError("fractional power of a non-monomial value")
    en, cn, sn = num.monomial_parts()
    ed, cd, sd = den.monomial_parts()
    if cn != 1 or cd != 1 or sn != 1 or sd != 1:
        raise ValueError("fractional power needs a unit-coefficient monomial")
    e = tuple((a - b) * k for a, b in zip(en, ed))
    return ParamRat.from_poly(ParamPoly(v.num.vars, {e: _ONE}, scale))


def _as_rat(vars_, v):
    if isinstance(v, ParamRat):
        return v
    if isinstance(v, ParamPoly):
        return ParamRat.from_poly(v)
    return ParamRat.from_poly(ParamPoly.const(vars_, v))


class ParamRat:
    """Fraction of two ``ParamPoly`` over the same variable tuple.

    Normalization keeps a monomial-free denominator with content 1 and a
    positive lex-leading coefficient; a monomial denominator is folded into
    the numerator (monomials are units of the Laurent ring).  Full
    multivariate gcd reduction is out of scope, so equality is decided by
    cross-multiplication instead of by canonical forms.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den, _normalized=False):
        if _normalized:
            self.num, self.den = num, den
            self._hash = None
            return
        if den.is_zero():
            raise DenominatorVanishes("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = ParamPoly.one(num.vars)
            self._hash = None
            return
        if den.is_monomial():
            e, c, s = den.monomial_parts()
            num = num.mul_monomial(tuple(-x for x in e), 1 / c, s)
            den = ParamPoly.one(num.vars)
        else:
            # pull the monomial unit out of the denominator
            mins = None
            for e in den.terms:
                mins = e if mins is None else tuple(map(min, mins, e))
            lead = max(den.terms)
            c = _content(den.terms.values())
            if den.terms[lead] < 0:
                c = -c
            if any(mins) or c != 1:
                inv = tuple(-x for x in mins)
                den = den.mul_monomial(inv, 1 / c, den.scale)
                num = num.mul_monomial(inv, 1 / c, den.scale)
            if num == den:
                num = ParamPoly.one(num.vars)
                den = ParamPoly.one(num.vars)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_poly(cls, p):
        return cls(p, ParamPoly.one(p.vars), _normalized=not p.is_zero())

    @classmethod
    def zero(cls, vars_):
        return cls.from_poly(ParamPoly.zero(vars_))

    @classmethod
    def one(cls, vars_):
        return cls.from_poly(ParamPoly.one(vars_))

    @classmethod
    def const(cls, vars_, c):
        return cls.from_poly(ParamPoly.const(vars_, c))

    @property
    def vars(self):
        return self.num.vars

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def is_one(self):
        return self.num == self.den

    def is_polynomial(self):
        return self.den.is_one()

    def __add__(self, other):
        other = _as_rat(self.vars, other)
        if self.den == other.den:
            return ParamRat(self.num + other.num, self.den)
        return ParamRat(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return ParamRat(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-_as_rat(self.vars, other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rat(self.vars, other)
        return ParamRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rat(self.vars, other)
        if other.num.is_zero():
            raise DenominatorVanishes("division by zero")
        return ParamRat(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rat(self.vars, other) / self

    def __pow__(self, k):
        if k == 0:
            return ParamRat.one(self.vars)
        if k < 0:
            if self.num.is_zero():
                raise DenominatorVanishes("inverse of zero")
            return ParamRat(self.den ** (-k), self.num ** (-k))
        return ParamRat(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            other = ParamRat.from_poly(other)
        elif isinstance(other, (int, type(_ZERO))):
            other = ParamRat.const(self.vars, other)
        elif not isinstance(other, ParamRat):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        # hash only monomial-normalized values; general equal-by-crossmult
        # elements must not be used as dict keys.
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def substitute(self, sigma):
        """Apply a parameter substitution; cancels removable poles.

        When the substitution pins a single variable to a rational value,
        evaluation proceeds through exact synthetic division so that shared
        linear factors cancel first (this is how q->1 limits are taken).
        Raises DenominatorVanishes on a genuine pole.
        """
        if len(sigma) == 1:
            (name, v), = sigma.items()
            if _is_rational(self.vars, v):
                return self._pin(name, _rational_value(self.vars, v))
        den = self.den.substitute(sigma)
        if den.num.is_zero():
            raise DenominatorVanishes("substitution hits a pole")
        num = self.num.substitute(sigma)
        return num / den

    def _pin(self, name, value):
        num, den = self.num, self.den
        dv = den.eval_var(name, value)
        while dv.is_zero():
            nv = num.eval_var(name, value)
            if not nv.is_zero():
                raise DenominatorVanishes("pole at %s=%s" % (name, value))
            num = num.divide_linear(name, value)
            den = den.divide_linear(name, value)
            dv = den.eval_var(name, value)
        return ParamRat(num.eval_var(name, value), dv)

    def render(self):
        n = self.num.render()
        if self.den.is_one():
            return n
        d = self.den.render()
        if len(self.num.terms) > 1:
            n = "(%s)" % n
        if len(self.den.terms) > 1:
            d = "(%s)" % d
        return "%s/%s" % (n, d)

    def __repr__(self):
        return "ParamRat(%s)" % self.render()


def _is_rational(vars_, v):
    if isinstance(v, (int, type(_ZERO))):
        return True
    if isinstance(v, ParamPoly):
        return not v.terms or (v.is_monomial() and not any(v.lex_leading()[0]))
    if isinstance(v, ParamRat):
        return _is_rational(vars_, v.num) and _is_rational(vars_, v.den)
    return False


def _rational_value(vars_, v):
    if isinstance(v, (int, type(_ZERO))):
        return _qq(v)
    if isinstance(v, ParamPoly):
        if not v.terms:
            return _ZERO
        return v.lex_leading()[1]
    return _rational_value(vars_, v.num) / _rational_value(vars_, v.den)


def substitute_params(f, sigma):
    """Module-level entry for applying a substitution to a ParamRat."""
    return f.substitute(sigma)


def koorn_var(name, power=1):
    return ParamPoly.variable(KOORN_VARS, name, power)


def koorn_const(c):
    return ParamPoly.const(KOORN_VARS, c)
