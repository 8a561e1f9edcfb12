"""Weight lattice P = Z^n, dominance order, Weyl orbits and the monomial
symmetric basis.

Weights are plain int tuples; spin/half-spin weights use doubled entries
together with a torus ``scale`` of 2 on the polynomials they index.  Groups
are named "BC" (permutations and sign flips), "A" (permutations only) and
"D" (permutations and even numbers of sign flips).
"""

from __future__ import annotations

from itertools import permutations

from .errors import NotInvariant
from .laurent import LaurentPoly
from .ratfield import KOORN_VARS, ParamPoly

HYPEROCTAHEDRAL = "BC"
PERMUTATIONS_ONLY = "A"
EVEN_SIGNS = "D"


def is_dominant(lam):
    return all(a >= b for a, b in zip(lam, lam[1:])) and (not lam or lam[-1] >= 0)


def dominance_leq(lam_p, lam):
    """Partial order: every leading partial sum of lam_p is bounded."""
    if len(lam_p) != len(lam):
        raise ValueError("length mismatch")
    s1 = s2 = 0
    for a, b in zip(lam_p, lam):
        s1 += a
        s2 += b
        if s1 > s2:
            return False
    return True


def dominance_lt(lam_p, lam):
    return lam_p != lam and dominance_leq(lam_p, lam)


def weights_below(lam):
    """All dominant weights below lam, ascending lexicographic order.

    Enumerates by bounded partial sums: mu_k ranges over
    0..min(mu_{k-1}, S_k - sum so far) where S_k is lam's k-th partial sum.
    """
    n = len(lam)
    bounds = []
    s = 0
    for a in lam:
        s += a
        bounds.append(s)
    out = []

    def rec(k, prefix, acc):
        if k == n:
            out.append(tuple(prefix))
            return
        hi = bounds[k] - acc
        if k > 0:
            hi = min(hi, prefix[-1])
        for v in range(0, hi + 1):
            prefix.append(v)
            rec(k + 1, prefix, acc + v)
            prefix.pop()

    rec(0, [], 0)
    out.sort()
    return out


def worbit(w, group=HYPEROCTAHEDRAL):
    """Deduplicated Weyl orbit of a weight, deterministic order."""
    seen = set()
    for p in permutations(w):
        if group == PERMUTATIONS_ONLY:
            seen.add(p)
            continue
        support = [i for i, x in enumerate(p) if x]
        for mask in range(1 << len(support)):
            v = list(p)
            flips = 0
            for b, i in enumerate(support):
                if mask >> b & 1:
                    v[i] = -v[i]
                    flips += 1
            if group == EVEN_SIGNS and flips % 2:
                continue
            seen.add(tuple(v))
    return sorted(seen)


def dominant_rep(e, group):
    if group == PERMUTATIONS_ONLY:
        return tuple(sorted(e, reverse=True))
    return tuple(sorted((abs(x) for x in e), reverse=True))


def monomial_symmetric(lam, group=HYPEROCTAHEDRAL, one=None, scale=1):
    """m_lam: the orbit sum with unit coefficients."""
    if one is None:
        one = ParamPoly.one(KOORN_VARS)
    return LaurentPoly(len(lam), {e: one for e in worbit(lam, group)}, scale)


def _generators(n, group):
    gens = []
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(("perm", tuple(perm)))
    if group == HYPEROCTAHEDRAL and n >= 1:
        gens.append(("flip", (0,)))
    elif group == EVEN_SIGNS and n >= 2:
        gens.append(("flip", (0, 1)))
    return gens


def is_invariant(f, group):
    for kind, data in _generators(f.n, group):
        g = f.permuted(data) if kind == "perm" else f.inverted(data)
        if not (f == g):
            return False
    return True


def expand_in_monomials(f, group=HYPEROCTAHEDRAL):
    """Write an invariant polynomial as sum of c_lam * m_lam.

    Peels the lexicographically maximal dominant weight of the support.
    Raises NotInvariant if the support is not a union of equal-coefficient
    orbits.
    """
    if not is_invariant(f, group):
        raise NotInvariant("input is not invariant under %s" % group)
    rem = LaurentPoly(f.n, dict(f.terms), f.scale)
    coeffs = {}
    while rem.terms:
        e = max(rem.terms)
        lam = dominant_rep(e, group)
        c = rem.terms.get(lam)
        if c is None:
            raise NotInvariant("orbit of %s missing its dominant member" % (e,))
        orbit = worbit(lam, group)
        out = dict(rem.terms)
        for o in orbit:
            v = out.get(o)
            if v is None:
                raise NotInvariant("ragged orbit at %s" % (o,))
            w = v - c
            if w:
                out[o] = w
            else:
                del out[o]
        coeffs[lam] = c
        rem = LaurentPoly(f.n, out, rem.scale)
    return coeffs


def linear_refinement(weights, style="lex"):
    """Total order extending dominance; ascending (smallest first).

    "lex" is plain lexicographic; "graded" sorts by weight size first.  Both
    refine the dominance order.
    """
    if style == "lex":
        return sorted(weights)
    if style == "graded":
        return sorted(weights, key=lambda w: (sum(w), w))
    raise ValueError("unknown refinement %r" % style)
