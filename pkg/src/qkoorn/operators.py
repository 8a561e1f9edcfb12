"""The commuting difference operators, their coefficient functions, and
exact application to invariant Laurent polynomials.

Coefficient building blocks: the one-pair ratio v_a, the four-factor external
ratio v_b, the products V over index cells, and the translator-free sums W
over ordered set partitions.  Two independent evaluation routes exist for the
hyperoctahedral operators: the translator-grouped form (production path) and
the nested-chain form (a cross-check oracle); agreement of the two is one of
the acceptance checks.

Internally everything runs on flat polynomials (torus and parameter exponents
in one tuple, rational coefficients); pole cancellation is enforced by exact
binomial division of the assembled numerator over the factored common
denominator.
"""

from __future__ import annotations

from itertools import combinations, product

from .errors import NotDivisible, NotInvariant
from .laurent import (LaurentPoly, LaurentRat, canonical_binomial,
                      divide_binomial, exact_divide, flat_shift, flatten,
                      unflatten)
from .ratfield import JACOBI_VARS, KOORN_VARS, QQ, ParamPoly, ParamRat
from .weights import (EVEN_SIGNS, HYPEROCTAHEDRAL, PERMUTATIONS_ONLY,
                      expand_in_monomials, is_invariant, monomial_symmetric,
                      weights_below)

_NP = len(KOORN_VARS)
_QH, _TH, _GA, _GB, _GC, _GD = range(_NP)


class ParamMap:
    """Substitution of half-parameters by monomial values (e.g. th -> 1,
    gb -> qh, or a rational constant).  qh itself is never substituted."""

    __slots__ = ("images", "key")

    def __init__(self, mapping=None):
        images = {}
        for name, val in (mapping or {}).items():
            if name == "qh":
                raise ValueError("qh is the scale parameter; not substitutable")
            e, c = _monomial_image(val)
            if (e, c) != (_var_exps(name), QQ(1)):
                images[name] = (e, c)
        self.images = images
        self.key = tuple(sorted(images.items()))

    def image(self, name):
        """(exponent vector over parameter slots, rational coefficient)."""
        return self.images.get(name, (_var_exps(name), QQ(1)))

    def is_identity(self):
        return not self.images

    def as_subst(self):
        """The substitution as a dict name -> ParamPoly monomial."""
        return {name: ParamPoly(KOORN_VARS, {e: c})
                for name, (e, c) in self.images.items()}

    def __repr__(self):
        return "ParamMap(%r)" % dict(self.key)


def _var_exps(name):
    e = [0] * _NP
    e[KOORN_VARS.index(name)] = 1
    return tuple(e)


def _monomial_image(val):
    if isinstance(val, str):
        val = _parse_monomial(val)
    if isinstance(val, (int, type(QQ(0)))):
        if not val:
            raise ValueError("parameter images must be invertible")
        return (0,) * _NP, QQ(val)
    if isinstance(val, ParamRat):
        num_e, nc, ns = val.num.monomial_parts()
        den_e, dc, ds = val.den.monomial_parts()
        if ns != 1 or ds != 1:
            raise ValueError("parameter images must be plain monomials")
        return tuple(a - b for a, b in zip(num_e, den_e)), nc / dc
    if isinstance(val, ParamPoly):
        e, c, s = val.monomial_parts()
        if s != 1:
            raise ValueError("parameter images must be plain monomials")
        return e, c
    raise TypeError("bad parameter image %r" % (val,))


def _parse_monomial(text):
    text = text.strip()
    out = ParamPoly.one(KOORN_VARS)
    for piece in text.split("*"):
        piece = piece.strip()
        try:
            out = out * ParamPoly.const(KOORN_VARS, QQ(piece))
            continue
        except (ValueError, ZeroDivisionError):
            pass
        if "^" in piece:
            name, p = piece.split("^")
            out = out * ParamPoly.variable(KOORN_VARS, name.strip(), int(p))
        else:
            out = out * ParamPoly.variable(KOORN_VARS, piece)
    return out


IDENTITY = ParamMap()


# ---------------------------------------------------------------------------
# flat coefficient factors


def _flat_rat_one(width):
    return LaurentRat(LaurentPoly.const(width, QQ(1)))


def _neg_exps(e):
    return tuple(-x for x in e)


def va_factor(width, n, w_exps, qpow, params):
    """v_a at the composite variable w = q^qpow * z^w_exps:
    (t w - 1/th) / (w - 1) after folding the 1/th unit into the numerator.

    Collapses to 1 when the substituted th is 1.
    """
    te, tc = params.image("th")
    zero = (0,) * width
    w = list(zero)
    for j, x in enumerate(w_exps):
        w[j] = x
    w[n + _QH] += 2 * qpow
    w = tuple(w)
    if not any(te) and tc == 1:
        return _flat_rat_one(width)
    tpad = zero[: n] + te
    num = LaurentPoly(width, {_tadd(w, tpad): tc, _neg_exps(tpad): -1 / tc})
    return LaurentRat(num).with_binomial_factor(
        width, (w, QQ(1)), (zero, QQ(-1)))


def _tadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


_VB_SHAPES = (("ga", 0, -1), ("gb", 0, 1), ("gc", 1, -1), ("gd", 1, 1))


def vb_factor(width, n, j, eps, params, shapes=_VB_SHAPES):
    """v_b at w = z_j^eps: the product of four ratios
    (g^2 q^s w + sigma) / (g (q^s w + sigma)) with (g, s, sigma) running over
    (ga,0,-1), (gb,0,+1), (gc,1/2,-1), (gd,1/2,+1).  Factors with g = 1
    collapse."""
    zero = (0,) * width
    out = _flat_rat_one(width)
    for name, qh_pow, sigma in shapes:
        ge, gc_ = params.image(name)
        if not any(ge) and gc_ == 1:
            continue
        gpad = zero[: n] + ge
        w = list(zero)
        w[j] = eps
        w[n + _QH] += qh_pow
        w = tuple(w)
        num = LaurentPoly(width, {_tadd(w, gpad): gc_,
                                  _neg_exps(gpad): sigma / gc_})
        out = out * LaurentRat(num).with_binomial_factor(
            width, (w, QQ(1)), (zero, QQ(sigma)))
    return out


def vb_spin_factor(width, n, j, eps, params):
    """The external factor of the spin operator: v_b without the
    half-period-shifted pair (the first two ratios only)."""
    return vb_factor(width, n, j, eps, params, shapes=_VB_SHAPES[:2])


class _Engine:
    """Cached flat-coefficient machinery at a fixed (n, params)."""

    def __init__(self, n, params):
        self.n = n
        self.width = n + _NP
        self.params = params
        self._v = {}
        self._w = {}
        self._va = {}
        self._vb = {}
        self._couple = {}
        self._nucleus = {}

    def va(self, w_exps, qpow):
        key = (tuple(w_exps), qpow)
        got = self._va.get(key)
        if got is None:
            got = self._va[key] = va_factor(self.width, self.n, w_exps,
                                            qpow, self.params)
        return got

    def vb_split(self, j, eps):
        key = (j, eps)
        got = self._vb.get(key)
        if got is None:
            rat = vb_factor(self.width, self.n, j, eps, self.params)
            zunit, qhunit = {}, {}
            for k, bm in rat.den.items():
                kind, _ = _classify_factor(k, self.n)
                (zunit if kind == "zunit" else qhunit)[k] = bm
            got = self._vb[key] = (rat.num, zunit, qhunit)
        return got

    def couplings(self, j, eps, K):
        key = (j, eps, K)
        got = self._couple.get(key)
        if got is None:
            out = _flat_rat_one(self.width)
            for k in K:
                for sk in (1, -1):
                    w = [0] * self.n
                    w[j] += eps
                    w[k] += sk
                    out = out * self.va(w, 0)
            got = self._couple[key] = out
        return got

    def nucleus_groups(self, J, eps):
        """Chain sums of a cell grouped by nucleus, cleared over one common
        in-cell denominator: returns (den, {nucleus: numerator})."""
        key = (J, eps)
        got = self._nucleus.get(key)
        if got is not None:
            return got
        n = self.n
        emap = dict(zip(J, eps))
        by_nucleus = {}
        den = {}
        for chain in ordered_set_partitions(J):
            sign = -1 if len(chain) % 2 == 0 else 1
            coeff = _flat_rat_one(self.width)
            seen = []
            for block in chain:
                for (i1, j1) in combinations(block, 2):
                    w = [0] * n
                    w[i1] += emap[i1]
                    w[j1] += emap[j1]
                    coeff = coeff * self.va(w, 0)
                    coeff = coeff * self.va(w, 1)
                seen.extend(block)
                later = [x for x in J if x not in seen]
                for b in block:
                    for k in later:
                        for sk in (1, -1):
                            w = [0] * n
                            w[b] += emap[b]
                            w[k] += sk
                            coeff = coeff * self.va(w, 0)
            by_nucleus.setdefault(chain[0], []).append((sign, coeff))
            _merge_max(den, coeff.den)
        groups = {}
        for nucleus, signed in by_nucleus.items():
            total = None
            for sign, t in signed:
                num = _lift_to(t.num if sign > 0 else -t.num, t.den, den)
                total = num if total is None else total + num
            groups[nucleus] = total
        got = self._nucleus[key] = (den, groups)
        return got

    def V(self, J, eps, K):
        """The cell building block: externals over J, internal pairs over J
        (plain and q-shifted), and couplings of J into K."""
        key = (J, eps, K)
        got = self._v.get(key)
        if got is not None:
            return got
        n, width = self.n, self.width
        out = _flat_rat_one(width)
        for j, e in zip(J, eps):
            out = out * vb_factor(width, n, j, e, self.params)
        for (j1, e1), (j2, e2) in combinations(zip(J, eps), 2):
            w = [0] * n
            w[j1] += e1
            w[j2] += e2
            out = out * va_factor(width, n, w, 0, self.params)
            out = out * va_factor(width, n, w, 1, self.params)
        for j, e in zip(J, eps):
            for k in K:
                for sk in (1, -1):
                    w = [0] * n
                    w[j] += e
                    w[k] += sk
                    out = out * va_factor(width, n, w, 0, self.params)
        self._v[key] = out
        return out

    def W(self, I, p):
        """Translator-free coefficient W_{I,p}: the alternating sum over
        ordered set partitions of p-subsets of I, each block coupled to the
        complement of the chain inside I."""
        key = (I, p)
        got = self._w.get(key)
        if got is not None:
            return got
        if p == 0:
            out = _flat_rat_one(self.width)
        elif len(I) < p:
            out = LaurentRat(LaurentPoly.zero(self.width))
        else:
            terms = []
            for P in combinations(I, p):
                for chain in ordered_set_partitions(P):
                    sign = -1 if len(chain) % 2 else 1
                    for eps in product((1, -1), repeat=p):
                        emap = dict(zip(P, eps))
                        coeff = _flat_rat_one(self.width)
                        used = []
                        for block in chain:
                            used.extend(block)
                            rest = tuple(x for x in I if x not in used)
                            coeff = coeff * self.V(
                                block, tuple(emap[b] for b in block), rest)
                        terms.append((sign, coeff))
            out = _sum_rats(self.width, terms)
        self._w[key] = out
        return out


_ENGINES = {}


def _engine(n, params):
    key = (n, params.key)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = _ENGINES[key] = _Engine(n, params)
    return eng


def ordered_set_partitions(elems):
    """All chains of strictly increasing subsets ending at the full set,
    listed as tuples of blocks, deterministic order."""
    elems = tuple(elems)
    if not elems:
        return []
    out = []
    idx = list(range(len(elems)))

    def rec(rest, acc):
        if not rest:
            out.append(tuple(acc))
            return
        for r in range(1, len(rest) + 1):
            for block in combinations(rest, r):
                remaining = tuple(x for x in rest if x not in block)
                acc.append(block)
                rec(remaining, acc)
                acc.pop()

    rec(elems, [])
    return out


def _sum_rats(width, signed_terms):
    """Sum (sign, LaurentRat) pairs over factored denominators by balanced
    pairwise merging, so partial sums are only ever lifted to pairwise
    unions (the serial lift to the global union explodes)."""
    if not signed_terms:
        return LaurentRat(LaurentPoly.zero(width))
    items = [LaurentRat(t.num if sign > 0 else -t.num, dict(t.den))
             for sign, t in signed_terms]
    while len(items) > 1:
        merged = []
        for i in range(0, len(items) - 1, 2):
            merged.append(items[i] + items[i + 1])
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


# ---------------------------------------------------------------------------
# operator specifications and normal forms


_KINDS = {
    "koornwinder": HYPEROCTAHEDRAL,
    "a_type": PERMUTATIONS_ONLY,
    "a_type_centered": PERMUTATIONS_ONLY,
    "jacobi": HYPEROCTAHEDRAL,
    "c_spin": HYPEROCTAHEDRAL,
    "dn_minus": EVEN_SIGNS,
    "dn_plus": EVEN_SIGNS,
}

_JSON_KINDS = {
    "koornwinder": "Dr", "a_type": "A_Dr", "a_type_centered": "A_Dr_centered",
    "jacobi": "Jacobi_D10", "c_spin": "C_spin", "dn_minus": "Dn_minus",
    "dn_plus": "Dn_plus",
}
_JSON_GROUPS = {HYPEROCTAHEDRAL: "BC", PERMUTATIONS_ONLY: "A", EVEN_SIGNS: "D"}


class OperatorSpec:
    """A named operator: kind, order r where applicable, variable count and
    a parameter substitution."""

    __slots__ = ("kind", "r", "n", "params")

    def __init__(self, kind, n, r=None, params=None):
        if kind not in _KINDS:
            raise ValueError("unknown operator kind %r" % kind)
        if kind in ("koornwinder", "a_type", "a_type_centered"):
            if r is None or not 1 <= r <= n:
                raise ValueError("r must satisfy 1 <= r <= n")
        else:
            r = None
        self.kind = kind
        self.r = r
        self.n = n
        self.params = params or IDENTITY

    @property
    def group(self):
        return _KINDS[self.kind]

    @property
    def key(self):
        return (self.kind, self.r, self.n, self.params.key)

    def to_json(self):
        out = {"kind": _JSON_KINDS[self.kind], "n": self.n,
               "group": _JSON_GROUPS[self.group]}
        if self.r is not None:
            out["r"] = self.r
        if self.params.key:
            out["params"] = {k: ParamPoly(KOORN_VARS, {e: c}).render()
                             for k, (e, c) in self.params.key}
        return out

    @classmethod
    def from_json(cls, data):
        rev = {v: k for k, v in _JSON_KINDS.items()}
        kind = rev[data["kind"]]
        params = ParamMap(data.get("params") or {})
        return cls(kind, int(data["n"]), data.get("r"), params)

    def __repr__(self):
        return "OperatorSpec(%s, n=%d%s)" % (
            self.kind, self.n, "" if self.r is None else ", r=%d" % self.r)


_NORMAL_FORMS = {}


def _normal_form(spec):
    """The operator cleared to a common factored denominator: a map from
    translator steps (half-step counts per variable) to flat numerators,
    plus the shared denominator."""
    got = _NORMAL_FORMS.get(spec.key)
    if got is not None:
        return got
    n = spec.n
    eng = _engine(n, spec.params)
    width = eng.width
    terms = []
    if spec.kind == "koornwinder":
        r = spec.r
        for s in range(0, r + 1):
            for J in combinations(range(n), s):
                Jc = tuple(x for x in range(n) if x not in J)
                W = eng.W(Jc, r - s)
                if W.is_zero():
                    continue
                for eps in product((1, -1), repeat=s):
                    coeff = W * eng.V(J, eps, Jc)
                    steps = [0] * n
                    for j, e in zip(J, eps):
                        steps[j] = 2 * e
                    terms.append((tuple(steps), 1, coeff))
    elif spec.kind in ("a_type", "a_type_centered"):
        r = spec.r
        for J in combinations(range(n), r):
            Jc = tuple(x for x in range(n) if x not in J)
            coeff = _flat_rat_one(width)
            for j in J:
                for k in Jc:
                    w = [0] * n
                    w[j] += 1
                    w[k] -= 1
                    coeff = coeff * va_factor(width, n, w, 0, spec.params)
            steps = tuple(2 if j in J else 0 for j in range(n))
            terms.append((steps, 1, coeff))
    elif spec.kind in ("c_spin", "dn_minus", "dn_plus"):
        want = {"c_spin": None, "dn_plus": 1, "dn_minus": -1}[spec.kind]
        for eps in product((1, -1), repeat=n):
            par = 1
            for e in eps:
                par *= e
            if want is not None and par != want:
                continue
            coeff = _flat_rat_one(width)
            if spec.kind == "c_spin":
                for j in range(n):
                    coeff = coeff * vb_spin_factor(width, n, j, eps[j],
                                                   spec.params)
            for j1, j2 in combinations(range(n), 2):
                w = [0] * n
                w[j1] += eps[j1]
                w[j2] += eps[j2]
                coeff = coeff * va_factor(width, n, w, 0, spec.params)
            terms.append((eps, 1, coeff))
    else:
        raise ValueError("no difference normal form for %r" % spec.kind)

    den = {}
    for _, _, t in terms:
        for k, (b, m) in t.den.items():
            if k in den:
                den[k] = (b, max(den[k][1], m))
            else:
                den[k] = (b, m)
    groups = {}
    for steps, sign, t in terms:
        num = t.num if sign > 0 else -t.num
        for k, (b, m) in den.items():
            have = t.den[k][1] if k in t.den else 0
            for _ in range(m - have):
                num = num * b
        if steps in groups:
            groups[steps] = groups[steps] + num
        else:
            groups[steps] = num
    out = (groups, den)
    _NORMAL_FORMS[spec.key] = out
    return out


# ---------------------------------------------------------------------------
# staged application for the hyperoctahedral family
#
# The grouped normal form clears every term over one global denominator,
# which explodes combinatorially with n.  The staged path instead follows
# the pole-cancellation structure: for each cell the chain sum (external
# factors excluded) is already regular at the half-period-shifted poles, so
# those factors divide out while the objects are still small; sign pairs
# then cancel the unit-circle poles one variable at a time, exchange
# symmetry cancels the in-cell pair poles, and only the small cross-cell
# pair factors survive to the final division.  Every division is exact and
# raises NotDivisible if any of these cancellation claims ever failed.


def _classify_factor(key, n):
    """Sort a canonical binomial into zunit / qhunit / pair / qpair."""
    _, _, e1, e2, _ = key
    torus = set()
    qh = False
    for e in (e1, e2):
        for i in range(n):
            if e[i]:
                torus.add(i)
        if e[n + _QH]:
            qh = True
    if len(torus) == 1:
        return ("qhunit" if qh else "zunit"), torus.pop()
    return ("qpair" if qh else "pair"), tuple(sorted(torus))


def _divide_factors(num, factors):
    for _, (b, m) in sorted(factors.items()):
        for _ in range(m):
            num = divide_binomial(num, b)
    return num


def _merge_max(target, extra):
    for k, (b, m) in extra.items():
        if k in target:
            target[k] = (b, max(target[k][1], m))
        else:
            target[k] = (b, m)


def _lift_to(num, own, union):
    for k, (b, m) in union.items():
        have = own[k][1] if k in own else 0
        for _ in range(m - have):
            num = num * b
    return num


def _staged_cell(eng, J, f_flat):
    """One cell's contribution: numerator over the surviving cross-cell
    pair factors."""
    n = eng.n
    r = len(J)
    Jc = tuple(x for x in range(n) if x not in J)
    reduced = {}
    plain_union = {}
    for eps in product((1, -1), repeat=r):
        den, groups = eng.nucleus_groups(J, eps)
        emap = dict(zip(J, eps))
        num = None
        for nucleus, gnum in groups.items():
            steps = [0] * n
            for j in nucleus:
                steps[j] = 2 * emap[j]
            moved = flat_shift(f_flat, tuple(steps), n, n + _QH) + (-f_flat)
            piece = gnum * moved
            num = piece if num is None else num + piece
        plain = {}
        qpairs = {}
        for k, bm in den.items():
            kind, _ = _classify_factor(k, n)
            (qpairs if kind == "qpair" else plain)[k] = bm
        num = _divide_factors(num, qpairs)
        for j, e in zip(J, eps):
            _, _, qhunit = eng.vb_split(j, e)
            num = _divide_factors(num, qhunit)
        reduced[eps] = (num, plain)
        _merge_max(plain_union, plain)
    state = {eps: _lift_to(num, plain, plain_union)
             for eps, (num, plain) in reduced.items()}
    pending_pairs = dict(plain_union)
    cross_den = {}
    for pos, j in enumerate(J):
        couple = {}
        branches = {}
        zdiv = None
        for e in (1, -1):
            vnum, zunit, _ = eng.vb_split(j, e)
            crat = eng.couplings(j, e, Jc)
            branches[e] = (vnum, crat.num)
            if zdiv is None:
                zdiv = zunit
                couple = crat.den
            else:
                if set(zunit) != set(zdiv) or set(crat.den) != set(couple):
                    raise NotDivisible("sign-branch denominators disagree")
        _merge_max(cross_den, couple)
        # in-cell pair poles cancel by exchange symmetry once both of their
        # variables have had their signs summed out
        done = set(J[: pos + 1])
        ready = {k: bm for k, bm in pending_pairs.items()
                 if set(_classify_factor(k, n)[1]) <= done}
        for k in ready:
            del pending_pairs[k]
        newstate = {}
        for rest in product((1, -1), repeat=r - pos - 1):
            total = None
            for e in (1, -1):
                vnum, cnum = branches[e]
                piece = state[(e,) + rest] * vnum * cnum
                total = piece if total is None else total + piece
            total = _divide_factors(total, zdiv)
            total = _divide_factors(total, ready)
            newstate[rest] = total
        state = newstate
    acc = state[()]
    acc = _divide_factors(acc, pending_pairs)
    return acc, cross_den


def _apply_staged(spec, f_flat):
    n, r = spec.n, spec.r
    eng = _engine(n, spec.params)
    pieces = []
    union = {}
    for J in combinations(range(n), r):
        acc, cross = _staged_cell(eng, J, f_flat)
        pieces.append((acc, cross))
        _merge_max(union, cross)
    total = None
    for acc, cross in pieces:
        acc = _lift_to(acc, cross, union)
        total = acc if total is None else total + acc
    total = _divide_factors(total, union)
    return total


# ---------------------------------------------------------------------------
# application


def _split_rat_coeffs(f):
    """Clear ParamRat coefficients: returns (poly-coeff LaurentPoly, list of
    denominator ParamPolys whose product was cleared).

    Each coefficient is multiplied by every collected denominator except the
    single copy of its own (no gcd reduction exists in the field, so the
    cancellation is done by bookkeeping, not by division)."""
    dens = []
    for c in f.terms.values():
        if isinstance(c, ParamRat) and not c.den.is_one():
            if not any(c.den == d for d in dens):
                dens.append(c.den)
    if not dens and all(isinstance(c, ParamPoly) for c in f.terms.values()):
        return f, []
    out = {}
    for e, c in f.terms.items():
        if isinstance(c, ParamPoly):
            num, skip = c, None
        else:
            num = c.num
            skip = None if c.den.is_one() else c.den
        for d in dens:
            if skip is not None and d == skip:
                skip = None
                continue
            num = num * d
        out[e] = num
    return LaurentPoly(f.n, out, f.scale), dens


def apply_operator(spec, f, check_invariance=True):
    """Apply an operator to an invariant Laurent polynomial.

    The result is again a polynomial: the assembled numerator divides
    exactly by the factored denominator (NotDivisible would flag a violated
    pole-cancellation claim).  Coefficients of f may be ParamPoly or
    ParamRat over the half-parameter field (ParamRat denominators are
    cleared up front and restored on the result).
    """
    if spec.kind == "jacobi":
        return _apply_jacobi(spec, f, check_invariance)
    if check_invariance and not is_invariant(f, spec.group):
        raise NotInvariant("input not invariant under %s" % spec.group)
    f0, dens = _split_rat_coeffs(f)
    flat = flatten(f0, KOORN_VARS)
    n = spec.n
    if spec.kind == "koornwinder":
        quot = _apply_staged(spec, flat)
    else:
        groups, den = _normal_form(spec)
        total = None
        for steps, num in groups.items():
            moved = flat_shift(flat, steps, n, n + _QH)
            piece = num * moved
            total = piece if total is None else total + piece
        if spec.kind == "a_type_centered":
            total = _center_prefactor(total, spec, flat)
        quot = exact_divide(total, den.values())
    out = unflatten(quot, n, KOORN_VARS)
    if dens:
        inv = ParamRat.one(KOORN_VARS)
        for d in dens:
            inv = inv / ParamRat.from_poly(d)
        out = out.map_coeff(lambda c: ParamRat.from_poly(c) * inv)
    return out


def apply_operator_grouped(spec, f, check_invariance=True):
    """Evaluate a hyperoctahedral operator through the translator-grouped
    form: coefficients assembled as V times the translator-free W sums,
    everything cleared over one shared denominator.  An independent route
    kept as a cross-check against the staged evaluation."""
    if spec.kind != "koornwinder":
        raise ValueError("grouped form exists for the hyperoctahedral family")
    if check_invariance and not is_invariant(f, spec.group):
        raise NotInvariant("input not invariant under %s" % spec.group)
    flat = flatten(f, KOORN_VARS)
    n = spec.n
    groups, den = _normal_form(spec)
    total = None
    for steps, num in groups.items():
        moved = flat_shift(flat, steps, n, n + _QH)
        piece = num * moved
        total = piece if total is None else total + piece
    quot = exact_divide(total, den.values())
    return unflatten(quot, n, KOORN_VARS)


def _center_prefactor(total, spec, flat_input):
    """Multiply by q^(-r*d/n) for the center-of-mass reduced operator,
    d being the (homogeneous) degree of the input."""
    degs = {sum(e[: spec.n]) for e in flat_input.terms}
    if not degs:
        return total
    if len(degs) > 1:
        raise ValueError("centered operator needs a homogeneous input")
    d, = degs
    if flat_input.scale != total.scale and d:
        d = d * total.scale // flat_input.scale
    e = [0] * (spec.n + _NP)
    e[spec.n + _QH] = -2 * spec.r * d
    return total.mul_monomial(tuple(e), QQ(1), spec.n * total.scale)


def apply_operator_nested(spec, f, check_invariance=True):
    """Independent evaluation of the hyperoctahedral operators through the
    nested-chain form (sum over cells, sign configurations and ordered block
    chains, with the translator acting on the first block only)."""
    if spec.kind != "koornwinder":
        raise ValueError("nested form exists for the hyperoctahedral family")
    if check_invariance and not is_invariant(f, spec.group):
        raise NotInvariant("input not invariant under %s" % spec.group)
    n, r = spec.n, spec.r
    eng = _engine(n, spec.params)
    flat = flatten(f, KOORN_VARS)
    signed = []
    for J in combinations(range(n), r):
        for eps in product((1, -1), repeat=r):
            emap = dict(zip(J, eps))
            for chain in ordered_set_partitions(J):
                sign = -1 if len(chain) % 2 == 0 else 1
                coeff = _flat_rat_one(eng.width)
                seen = []
                for block in chain:
                    seen.extend(block)
                    comp = tuple(x for x in range(n) if x not in seen)
                    coeff = coeff * eng.V(
                        block, tuple(emap[b] for b in block), comp)
                steps = [0] * n
                for j in chain[0]:
                    steps[j] = 2 * emap[j]
                moved = flat_shift(flat, tuple(steps), n, n + _QH) + (-flat)
                signed.append((sign, coeff.mul_poly(moved)))
    total = _sum_rats(eng.width, signed)
    quot = total.collapse()
    return unflatten(quot, n, KOORN_VARS)


def apply_one_var(f, j, params=None):
    """The rank-one operator acting in the variable z_j alone:
    v_b(z_j) (T_j - 1) + v_b(1/z_j) (T_j^{-1} - 1)."""
    params = params or IDENTITY
    n = f.n
    eng = _engine(n, params)
    flat = flatten(f, KOORN_VARS)
    signed = []
    for eps in (1, -1):
        coeff = vb_factor(eng.width, n, j, eps, params)
        steps = tuple(2 * eps if i == j else 0 for i in range(n))
        moved = flat_shift(flat, steps, n, n + _QH) + (-flat)
        signed.append((1, coeff.mul_poly(moved)))
    total = _sum_rats(eng.width, signed)
    return unflatten(total.collapse(), n, KOORN_VARS)


def elementary_symmetric_apply(r, f, params=None):
    """S_r of the commuting one-variable operators, applied to f."""
    n = f.n
    total = None
    for J in combinations(range(n), r):
        g = f
        for j in J:
            g = apply_one_var(g, j, params)
        total = g if total is None else total + g
    return total if total is not None else LaurentPoly.zero(n)


# ---------------------------------------------------------------------------
# the differential (q -> 1) branch


def _apply_jacobi(spec, f, check_invariance=True):
    """The second-order hypergeometric operator on the torus: Euler-square
    part plus cotangent one- and two-body terms written as exact rational
    multipliers."""
    if check_invariance and not is_invariant(f, HYPEROCTAHEDRAL):
        raise NotInvariant("input not invariant under BC")
    if f.scale != 1:
        raise ValueError("the differential branch lives on the integer lattice")
    n = spec.n
    npar = len(JACOBI_VARS)
    width = n + npar
    flat = flatten(f, JACOBI_VARS)
    g_e = tuple(1 if i == n else 0 for i in range(width))
    t0_e = tuple(1 if i == n + 1 else 0 for i in range(width))
    t1_e = tuple(1 if i == n + 2 else 0 for i in range(width))
    zero = (0,) * width

    def euler(p, j):
        return LaurentPoly(p.n, {e: c * e[j] for e, c in p.terms.items()
                                 if e[j]}, p.scale)

    signed = []
    # sum_j theta_j^2
    acc = LaurentPoly.zero(width)
    for e, c in flat.terms.items():
        v = c * sum(x * x for x in e[:n])
        if v:
            acc = acc + LaurentPoly(width, {e: v})
    signed.append((1, LaurentRat(acc)))
    # pair terms: g (z_j z_k + 1)/(z_j z_k - 1) (theta_j + theta_k)
    #           + g (z_j + z_k)/(z_j - z_k)     (theta_j - theta_k)
    for j, k in combinations(range(n), 2):
        ejk = tuple((1 if i in (j, k) else 0) for i in range(width))
        ej = tuple((1 if i == j else 0) for i in range(width))
        ek = tuple((1 if i == k else 0) for i in range(width))
        tp = euler(flat, j) + euler(flat, k)
        tm = euler(flat, j) + (-euler(flat, k))
        if tp:
            num = (LaurentPoly(width, {ejk: QQ(1), zero: QQ(1)})
                   .mul_monomial(g_e, QQ(1)) * tp)
            signed.append((1, LaurentRat(num).with_binomial_factor(
                width, (ejk, QQ(1)), (zero, QQ(-1)))))
        if tm:
            num = (LaurentPoly(width, {ej: QQ(1), ek: QQ(1)})
                   .mul_monomial(g_e, QQ(1)) * tm)
            signed.append((1, LaurentRat(num).with_binomial_factor(
                width, (ej, QQ(1)), (ek, QQ(-1)))))
    # one-body terms: [tg0 (z+1)/(z-1) + tg1 (z-1)/(z+1)] theta_j
    for j in range(n):
        ej = tuple((1 if i == j else 0) for i in range(width))
        tj = euler(flat, j)
        if not tj:
            continue
        num0 = (LaurentPoly(width, {ej: QQ(1), zero: QQ(1)})
                .mul_monomial(t0_e, QQ(1)) * tj)
        signed.append((1, LaurentRat(num0).with_binomial_factor(
            width, (ej, QQ(1)), (zero, QQ(-1)))))
        num1 = (LaurentPoly(width, {ej: QQ(1), zero: QQ(-1)})
                .mul_monomial(t1_e, QQ(1)) * tj)
        signed.append((1, LaurentRat(num1).with_binomial_factor(
            width, (ej, QQ(1)), (zero, QQ(1)))))
    total = _sum_rats(width, signed)
    return unflatten(total.collapse(), n, JACOBI_VARS)


# ---------------------------------------------------------------------------
# matrices and commutators


_MONO_CACHE = {}


def apply_to_monomial(spec, lam, scale=1):
    key = (spec.key, tuple(lam), scale)
    got = _MONO_CACHE.get(key)
    if got is None:
        one = (ParamPoly.one(JACOBI_VARS) if spec.kind == "jacobi"
               else ParamPoly.one(KOORN_VARS))
        if spec.kind in ("a_type", "a_type_centered"):
            m = monomial_leading(lam, one)
        else:
            m = monomial_symmetric(lam, spec.group, one, scale)
        got = apply_operator(spec, m, check_invariance=False)
        _MONO_CACHE[key] = got
    return got


def monomial_leading(lam, one=None):
    """Permutation-orbit sum only (the top-degree part of m_lam)."""
    if one is None:
        one = ParamPoly.one(KOORN_VARS)
    return monomial_symmetric(lam, PERMUTATIONS_ONLY, one)


def operator_matrix(spec, lam):
    """Matrix of the operator on the span of m_mu, mu below lam, in the
    monomial basis: entry [mu][nu] is the m_nu coefficient of the image of
    m_mu.  Triangularity makes every entry with nu not below mu vanish."""
    below = weights_below(lam)
    matrix = {}
    for mu in below:
        img = apply_to_monomial(spec, mu)
        matrix[mu] = expand_in_monomials(img, spec.group)
    return matrix


def _apply_by_linearity(spec, coeffs):
    """Apply an operator to sum(c_mu * m_mu) through cached monomial
    applications; coeffs maps weights to ParamPoly coefficients."""
    total = None
    for mu, c in coeffs.items():
        img = apply_to_monomial(spec, mu).scalar_mul(c)
        total = img if total is None else total + img
    if total is None:
        total = LaurentPoly.zero(spec.n)
    return total


def commutator_on_basis(spec_a, spec_b, lam):
    """[A, B] m_lam, exactly.

    Both compositions expand the inner image in the monomial basis and
    reuse cached single applications (the operators are linear over the
    coefficient field)."""
    base = PERMUTATIONS_ONLY if spec_a.kind in ("a_type", "a_type_centered") \
        else spec_a.group
    a_lam = expand_in_monomials(apply_to_monomial(spec_a, lam), base)
    b_lam = expand_in_monomials(apply_to_monomial(spec_b, lam), base)
    ab = _apply_by_linearity(spec_a, b_lam)
    ba = _apply_by_linearity(spec_b, a_lam)
    return ab + (-ba)
