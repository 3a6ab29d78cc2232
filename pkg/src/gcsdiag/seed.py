"""Generalized fixed data and torus seeds.

Seed mutation, the cluster-variable exchange recursion, principal
coefficients, companion algebras, the Langlands dual and c-/g-vectors.
All indices are 0-based internally; files and the CLI use 1-based indices.
"""

from __future__ import annotations

import math
from fractions import Fraction

import sympy as sp

from .ring import CoeffPoly, ExchangeSymbol


def _pos(x):
    return x if x > 0 else 0


# ---------------------------------------------------------------------------
# fixed data and seeds


class FixedData:
    """Mutation-invariant data: rank, weights d, degrees r, skew matrix B.

    B holds the initial epsilon matrix, b_ij = {e_i, e_j} d_j.  The weights
    d may be rational (right companion data); everything downstream works in
    the integral basis {d_i e_i} so wall data stays integral.
    """

    def __init__(self, n, unfrozen, d, r, B):
        self.n = n
        self.unfrozen = tuple(unfrozen)
        self.d = tuple(Fraction(x) for x in d)
        self.r = tuple(int(x) for x in r)
        self.B = tuple(tuple(int(x) for x in row) for row in B)
        if len(self.d) != n or len(self.r) != n or len(self.B) != n:
            raise ValueError("dimension mismatch in fixed data")
        if any(x <= 0 for x in self.d) or any(x <= 0 for x in self.r):
            raise ValueError("weights and degrees must be positive")
        for i in range(n):
            for j in range(n):
                if Fraction(self.B[i][j], 1) / self.d[j] != -Fraction(self.B[j][i], 1) / self.d[i]:
                    raise ValueError("B is not skew-symmetrizable by d")

    @property
    def symbols(self):
        out = []
        for i in self.unfrozen:
            for j in range(1, self.r[i]):
                if j <= self.r[i] - j:
                    out.append(ExchangeSymbol(i, j, self.r[i]))
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, FixedData) and (
            (self.n, self.unfrozen, self.d, self.r, self.B)
            == (other.n, other.unfrozen, other.d, other.r, other.B)
        )

    def __repr__(self):
        return "FixedData(n=%d, d=%s, r=%s, B=%s)" % (self.n, self.d, self.r, self.B)


def _det(mat):
    n = len(mat)
    rows = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            det = -det
        det *= rows[c][c]
        inv = 1 / rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c] * inv
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


class GeneralizedTorusSeed:
    """A basis of N with reciprocal coefficient tuples.

    e_vectors are rows in the initial e-basis, f_vectors rows in the initial
    f-basis, a_tuples maps each unfrozen index to the full coefficient tuple
    (1, a_{i,1}, ..., a_{i,r_i-1}, 1) as CoeffPoly values.
    """

    def __init__(self, fixed, e_vectors, f_vectors, a_tuples):
        self.e_vectors = tuple(tuple(int(x) for x in v) for v in e_vectors)
        self.f_vectors = tuple(tuple(int(x) for x in v) for v in f_vectors)
        self.a_tuples = {i: tuple(t) for i, t in a_tuples.items()}
        if abs(_det(self.e_vectors)) != 1:
            raise ValueError("e-vectors must form a Z-basis of N")
        for i in self.a_tuples:
            t = self.a_tuples[i]
            if len(t) != fixed.r[i] + 1 or not t[0].is_one() or not t[-1].is_one():
                raise ValueError("coefficient tuple for direction %d is not monic" % (i + 1,))
            for j in range(len(t)):
                if t[j] != t[len(t) - 1 - j]:
                    raise ValueError("coefficient tuple for direction %d is not reciprocal" % (i + 1,))
        # duality: d_i <e_i', f_j'> = delta_ij
        n = fixed.n
        for i in range(n):
            for j in range(n):
                val = sum(
                    Fraction(self.e_vectors[i][a]) * Fraction(self.f_vectors[j][a]) / fixed.d[a]
                    for a in range(n)
                ) * fixed.d[i]
                if val != (1 if i == j else 0):
                    raise ValueError("e- and f-vectors are not dual bases")

    def __eq__(self, other):
        return isinstance(other, GeneralizedTorusSeed) and (
            (self.e_vectors, self.f_vectors, self.a_tuples)
            == (other.e_vectors, other.f_vectors, other.a_tuples)
        )

    def __repr__(self):
        return "GeneralizedTorusSeed(e=%s, f=%s)" % (self.e_vectors, self.f_vectors)


def make_initial_seed(fixed, a_names=None):
    """Identity seed; a_names optionally maps index -> tuple of symbol names."""
    n = fixed.n
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    a_tuples = {}
    for i in fixed.unfrozen:
        r = fixed.r[i]
        entries = [CoeffPoly.one()]
        for j in range(1, r):
            if a_names and i in a_names:
                name = a_names[i][j - 1]
            else:
                name = ExchangeSymbol(i, j, r).name
            entries.append(CoeffPoly.one() if name == "1" else CoeffPoly.symbol(name))
        entries.append(CoeffPoly.one())
        a_tuples[i] = tuple(entries)
    return GeneralizedTorusSeed(fixed, ident, ident, a_tuples)


# ---------------------------------------------------------------------------
# epsilon and mutation


def epsilon(fixed, seed):
    """epsilon'_ij = {e_i', e_j'} d_j for the seed's current basis."""
    n = fixed.n
    E = seed.e_vectors
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            val = Fraction(0)
            for a in range(n):
                for b in range(n):
                    if E[i][a] and E[j][b] and fixed.B[a][b]:
                        # {e_a, e_b} = B_ab / d_b
                        val += Fraction(E[i][a]) * E[j][b] * Fraction(fixed.B[a][b]) / fixed.d[b]
            val *= fixed.d[j]
            if val.denominator != 1:
                raise ValueError("non-integral epsilon entry")
            row.append(int(val))
        out.append(tuple(row))
    return tuple(out)


def mutate_seed(fixed, seed, k):
    """Seed mutation in an unfrozen direction k.

    Of the two dual branch choices the sign-coherent one is taken: the sign
    of the c-vector in direction k selects the half-space, which makes the
    mutation an involution on the basis rows and keeps the e-/f-rows equal
    to the c-/g-vectors along arbitrary mutation words.
    """
    if k not in fixed.unfrozen:
        raise ValueError("cannot mutate frozen direction %d" % (k + 1,))
    eps = epsilon(fixed, seed)
    rk = fixed.r[k]
    n = fixed.n
    delta = -1 if (any(x < 0 for x in seed.e_vectors[k])
                   and all(x <= 0 for x in seed.e_vectors[k])) else 1
    new_e = []
    for i in range(n):
        if i == k:
            new_e.append(tuple(-x for x in seed.e_vectors[k]))
        else:
            c = rk * _pos(delta * eps[i][k])
            new_e.append(tuple(x + c * y for x, y in zip(seed.e_vectors[i], seed.e_vectors[k])))
    new_f = list(seed.f_vectors)
    fk = [-x for x in seed.f_vectors[k]]
    for j in range(n):
        c = rk * _pos(-delta * eps[k][j])
        if c:
            fk = [x + c * y for x, y in zip(fk, seed.f_vectors[j])]
    new_f[k] = tuple(fk)
    # coefficient tuples are reversed in direction k; reciprocity makes this
    # the identity, which the constructor re-checks
    new_a = dict(seed.a_tuples)
    new_a[k] = tuple(reversed(seed.a_tuples[k]))
    return GeneralizedTorusSeed(fixed, new_e, tuple(new_f), new_a)


def mutate_word(fixed, seed, word):
    for k in word:
        seed = mutate_seed(fixed, seed, k)
    return seed


def c_vectors(seed):
    return seed.e_vectors


def g_vectors(seed):
    return seed.f_vectors


# ---------------------------------------------------------------------------
# cluster-variable recursion (trivial coefficients y = 1)


def _poly_to_sympy(poly):
    expr = sp.Integer(0)
    for mono, coeff in poly.terms.items():
        term = sp.Rational(coeff.numerator, coeff.denominator)
        for name, e in mono:
            term *= sp.Symbol(name) ** e
        expr += term
    return expr


class ClusterState:
    """Cluster variables as exact rational functions of the initial cluster."""

    def __init__(self, fixed, seed, exprs=None):
        self.fixed = fixed
        self.seed = seed
        self.xs = sp.symbols("x1:%d" % (fixed.n + 1))
        self.exprs = list(exprs) if exprs is not None else list(self.xs)


def mutate_cluster(state, k):
    """Exchange relation x_k' = x_k^{-1} (prod x_j^{[-b_kj]_+})^{r_k} sum_s a_{k,s} yhat_k^s."""
    fixed, seed = state.fixed, state.seed
    if k not in fixed.unfrozen:
        raise ValueError("cannot mutate frozen direction %d" % (k + 1,))
    b = epsilon(fixed, seed)[k]
    rk = fixed.r[k]
    yhat = sp.Integer(1)
    pref = sp.Integer(1)
    for j in range(fixed.n):
        yhat *= state.exprs[j] ** b[j]
        pref *= state.exprs[j] ** _pos(-b[j])
    total = sp.Integer(0)
    for s, a in enumerate(seed.a_tuples[k]):
        total += _poly_to_sympy(a) * yhat ** s
    newx = sp.cancel(pref ** rk * total / state.exprs[k])
    exprs = list(state.exprs)
    exprs[k] = newx
    if not laurent_check(newx, state.xs):
        raise ValueError("non-Laurent cluster variable; mutation data is inconsistent")
    out = ClusterState(fixed, mutate_seed(fixed, seed, k), exprs)
    return out


def laurent_check(expr, xs):
    """True iff the denominator is a monomial in the cluster variables."""
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    den = sp.expand(den)
    if not den.free_symbols <= set(xs):
        return False
    if den.is_Number:
        return True
    return len(sp.Poly(den, *xs).terms()) == 1


def laurent_dict(expr, xs):
    """Exact Laurent expansion as {exponent tuple: CoeffPoly} in the xs."""
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    num, den = sp.expand(num), sp.expand(den)
    if not laurent_check(expr, xs):
        raise ValueError("expression is not a Laurent polynomial in the cluster")
    if den.is_Number:
        shift = tuple(0 for _ in xs)
        dc = sp.Rational(den)
    else:
        ((mono, dc),) = sp.Poly(den, *xs).terms()
        shift = tuple(int(m) for m in mono)
    asyms = sorted(num.free_symbols - set(xs), key=lambda s: s.name)
    out = {}
    for mono, coeff in sp.Poly(num, *xs).terms():
        key = tuple(int(m) - s for m, s in zip(mono, shift))
        coeff = sp.expand(coeff / dc)
        terms = {}
        if asyms and coeff.free_symbols & set(asyms):
            for amono, q in sp.Poly(coeff, *asyms).terms():
                q = sp.Rational(q)
                m = tuple(sorted((s.name, int(e)) for s, e in zip(asyms, amono) if e))
                terms[m] = terms.get(m, Fraction(0)) + Fraction(q.p, q.q)
        else:
            q = sp.Rational(coeff)
            terms[()] = Fraction(q.p, q.q)
        out[key] = out.get(key, CoeffPoly.zero()) + CoeffPoly(terms)
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# derived data: principal coefficients, companions, Langlands dual


def principal_data(fixed, seed):
    """Doubled data N~ = N + M° with block epsilon [[eps, I], [-I, 0]]."""
    n = fixed.n
    eps = epsilon(fixed, seed)
    B2 = []
    for i in range(n):
        B2.append(tuple(eps[i]) + tuple(1 if j == i else 0 for j in range(n)))
    for i in range(n):
        B2.append(tuple(-1 if j == i else 0 for j in range(n)) + tuple(0 for _ in range(n)))
    fixed2 = FixedData(2 * n, fixed.unfrozen, fixed.d + fixed.d, fixed.r + fixed.r, B2)
    a_names = {
        i: tuple(_tuple_names(seed.a_tuples[i])) for i in fixed.unfrozen
    }
    return fixed2, make_initial_seed(fixed2, a_names)


def _tuple_names(a_tuple):
    names = []
    for poly in a_tuple[1:-1]:
        if poly.is_one():
            names.append("1")
        else:
            ((mono, _),) = poly.terms.items()
            names.append(mono[0][0])
    return names


def left_companion(fixed, seed):
    """Ordinary data with d_i r_i weights and exchange matrix B diag(r)."""
    n = fixed.n
    B = tuple(tuple(fixed.B[i][j] * fixed.r[j] for j in range(n)) for i in range(n))
    d = tuple(fixed.d[i] * fixed.r[i] for i in range(n))
    fixed2 = FixedData(n, fixed.unfrozen, d, (1,) * n, B)
    return fixed2, make_initial_seed(fixed2)


def right_companion(fixed, seed):
    """Ordinary data with d_i / r_i weights and exchange matrix diag(r) B."""
    n = fixed.n
    B = tuple(tuple(fixed.r[i] * fixed.B[i][j] for j in range(n)) for i in range(n))
    d = tuple(fixed.d[i] / fixed.r[i] for i in range(n))
    fixed2 = FixedData(n, fixed.unfrozen, d, (1,) * n, B)
    return fixed2, make_initial_seed(fixed2)


def langlands_dual(fixed, seed):
    """Dual data: d_i -> D/d_i, epsilon -> -epsilon^T, r_i -> lcm(r)/r_i."""
    n = fixed.n
    if any(x.denominator != 1 for x in fixed.d):
        raise ValueError("Langlands dual requires integral d")
    D = math.lcm(*[x.numerator for x in fixed.d])
    R = math.lcm(*fixed.r)
    d = tuple(Fraction(D, 1) / x for x in fixed.d)
    r = tuple(R // x for x in fixed.r)
    B = tuple(tuple(-fixed.B[j][i] for j in range(n)) for i in range(n))
    fixed2 = FixedData(n, fixed.unfrozen, d, r, B)
    return fixed2, make_initial_seed(fixed2)


# ---------------------------------------------------------------------------
# seed file grammar
#
#   rank 2
#   unfrozen 1 2
#   d 1 1
#   r 3 1
#   B 0 1 -1 0
#   a.1 1 a a 1
#   a.2 1 1
#
# B is row-major; rationals are printed as p/q; a-lines list the full
# coefficient tuple per unfrozen direction, entries are symbol names or 1.


def parse_seed_file(text):
    fields = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        fields[key] = rest.split()
    try:
        n = int(fields["rank"][0])
        unfrozen = tuple(int(x) - 1 for x in fields["unfrozen"])
        d = tuple(Fraction(x) for x in fields["d"])
        r = tuple(int(x) for x in fields["r"])
        flat = [int(x) for x in fields["B"]]
        if len(flat) != n * n:
            raise ValueError("B must have rank*rank entries")
        B = [flat[i * n:(i + 1) * n] for i in range(n)]
        a_names = {}
        for i in unfrozen:
            entries = fields["a.%d" % (i + 1,)]
            if len(entries) != r[i] + 1 or entries[0] != "1" or entries[-1] != "1":
                raise ValueError("a.%d must be a monic tuple of length r+1" % (i + 1,))
            a_names[i] = tuple(entries[1:-1])
    except KeyError as exc:
        raise ValueError("missing seed file field %s" % exc) from exc
    fixed = FixedData(n, unfrozen, d, r, B)
    return fixed, make_initial_seed(fixed, a_names)


def _frac_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


def serialize_seed_file(fixed, seed):
    lines = [
        "rank %d" % fixed.n,
        "unfrozen %s" % " ".join(str(i + 1) for i in fixed.unfrozen),
        "d %s" % " ".join(_frac_str(x) for x in fixed.d),
        "r %s" % " ".join(str(x) for x in fixed.r),
        "B %s" % " ".join(str(x) for row in fixed.B for x in row),
    ]
    for i in fixed.unfrozen:
        names = ["1"] + list(_tuple_names(seed.a_tuples[i])) + ["1"]
        lines.append("a.%d %s" % (i + 1, " ".join(names)))
    return "\n".join(lines) + "\n"
