"""Exact coefficient ring Q[a_{i,j}] and truncated Laurent series on lattice exponents.

The coefficient ring is a polynomial ring over Q in a finite set of formal
exchange symbols.  Series live on a lattice of integer exponent vectors and
carry a linear grading; terms above the truncation order are dropped eagerly
so that equal values always have identical term maps.
"""

from __future__ import annotations

import re
from fractions import Fraction


# ---------------------------------------------------------------------------
# exchange symbols


class ExchangeSymbol:
    """A formal exchange coefficient a_{i,j} for direction i, step j.

    Canonicalized under reciprocity: (i, j) and (i, r_i - j) denote the same
    generator, the stored step is min(j, r_i - j).
    """

    __slots__ = ("direction_index", "step", "name")

    def __init__(self, direction_index, step, r, name=None):
        if not 1 <= step <= r - 1:
            raise ValueError("step must satisfy 1 <= j <= r-1")
        step = min(step, r - step)
        self.direction_index = direction_index
        self.step = step
        # default display name is 1-based, matching the written convention
        self.name = name if name is not None else "a_{%d,%d}" % (direction_index + 1, step)

    def __eq__(self, other):
        return (
            isinstance(other, ExchangeSymbol)
            and self.direction_index == other.direction_index
            and self.step == other.step
            and self.name == other.name
        )

    def __hash__(self):
        return hash((self.direction_index, self.step, self.name))

    def __repr__(self):
        return "ExchangeSymbol(%r, %r, name=%r)" % (self.direction_index, self.step, self.name)


# ---------------------------------------------------------------------------
# coefficient polynomials

# A monomial key is a tuple of (symbol_name, exponent) pairs sorted by name.


def _mono_mul(m1, m2):
    d = dict(m1)
    for name, e in m2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in d.items() if e))


def _mono_degree(m):
    return sum(e for _, e in m)


class CoeffPoly:
    """Polynomial in the exchange symbols with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff:
                clean[tuple(mono)] = coeff
        self.terms = clean

    # -- constructors

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({(): Fraction(1)})

    @classmethod
    def rational(cls, q):
        return cls({(): Fraction(q)})

    @classmethod
    def symbol(cls, name):
        return cls({((name, 1),): Fraction(1)})

    # -- ring structure

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.rational(other)
        return isinstance(other, CoeffPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.rational(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coeff
        return CoeffPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return CoeffPoly.rational(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.rational(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return CoeffPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative powers of coefficient polynomials")
        out = CoeffPoly.one()
        for _ in range(e):
            out = out * self
        return out

    def scale(self, q):
        q = Fraction(q)
        return CoeffPoly({m: c * q for m, c in self.terms.items()})

    def is_one(self):
        return self.terms == {(): Fraction(1)}

    def __repr__(self):
        return "CoeffPoly(%s)" % canonical_string(self)


def _render_frac(q):
    return str(q)  # Fraction prints as "3", "-1" or "1/2"


def _poly_pieces(poly, zpart):
    """Render each monomial of a CoeffPoly as a flat product string."""
    pieces = []
    for mono in sorted(poly.terms, key=lambda m: (_mono_degree(m), m)):
        coeff = poly.terms[mono]
        factors = []
        symfactors = ["%s^%d" % (n, e) if e != 1 else n for n, e in mono]
        if coeff != 1 or (not symfactors and not zpart):
            factors.append(_render_frac(coeff))
        factors.extend(symfactors)
        if zpart:
            factors.append(zpart)
        pieces.append("*".join(factors))
    return pieces


def canonical_string(x):
    """Deterministic rendering of a CoeffPoly or TruncatedLaurent."""
    if isinstance(x, CoeffPoly):
        if not x:
            return "0"
        return " + ".join(_poly_pieces(x, ""))
    if isinstance(x, TruncatedLaurent):
        if not x.terms:
            return "0"
        zero = tuple(0 for _ in x.offset)

        def key(k):
            return (k != zero, k)

        pieces = []
        for expo in sorted(x.terms, key=key):
            zpart = "" if expo == zero else "z^(%s)" % ",".join(str(c) for c in expo)
            pieces.extend(_poly_pieces(x.terms[expo], zpart))
        return " + ".join(pieces)
    raise TypeError("unsupported value %r" % (x,))


_SYM_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_{},]*?)(?:\^(\d+))?$")
_NUM_RE = re.compile(r"^-?\d+(?:/\d+)?$")
_Z_RE = re.compile(r"^z\^\(([-0-9,]+)\)$")


def parse_canonical(text):
    """Parse the canonical_string grammar back into a term map.

    Returns a pair (dim, terms) where terms maps exponent tuples to
    CoeffPoly; values with no z part use the all-zero exponent of dimension
    dim (dim is None when no z part occurs anywhere).
    """
    text = text.strip()
    if text == "0":
        return None, {}
    dim = None
    raw = []
    for piece in text.split(" + "):
        coeff = Fraction(1)
        mono = {}
        expo = None
        for factor in piece.split("*"):
            m = _Z_RE.match(factor)
            if m:
                expo = tuple(int(c) for c in m.group(1).split(","))
                dim = len(expo)
                continue
            if _NUM_RE.match(factor):
                coeff *= Fraction(factor)
                continue
            m = _SYM_RE.match(factor)
            if not m:
                raise ValueError("bad factor %r" % factor)
            name, e = m.group(1), int(m.group(2) or 1)
            mono[name] = mono.get(name, 0) + e
        raw.append((expo, tuple(sorted(mono.items())), coeff))
    zero = tuple(0 for _ in range(dim)) if dim is not None else ()
    terms = {}
    for expo, mono, coeff in raw:
        expo = zero if expo is None else expo
        poly = terms.setdefault(expo, {})
        poly[mono] = poly.get(mono, Fraction(0)) + coeff
    return dim, {e: CoeffPoly(p) for e, p in terms.items()}


# ---------------------------------------------------------------------------
# pairing


def pairing(n, m, d):
    """Canonical pairing <n, m> = sum n_i m_i / d_i.

    n in e-basis coordinates, m in f-basis coordinates, d the lattice weights.
    """
    if not (len(n) == len(m) == len(d)):
        raise ValueError("dimension mismatch in pairing")
    return sum(Fraction(a) * Fraction(b) / Fraction(w) for a, b, w in zip(n, m, d))


# ---------------------------------------------------------------------------
# grading and truncated series


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Grading:
    """Linear grading with a fixed list of degree-1 monoid generators.

    Degrees of other exponents are obtained by exact linear solves; an
    exponent outside the rational cone of the generators has no degree.
    """

    def __init__(self, generators):
        if not generators:
            raise ValueError("need at least one generator")
        self.generators = tuple(tuple(g) for g in generators)
        self.dim = len(self.generators[0])
        self._cache = {}
        if self._solve(tuple(0 for _ in range(self.dim)), check_rank=True) is None:
            raise ValueError("grading generators must be linearly independent")

    def _solve(self, target, check_rank=False):
        cols = self.generators
        k = len(cols)
        dim = self.dim
        rows = [
            [Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])]
            for i in range(dim)
        ]
        rank = 0
        pivots = []
        for c in range(k):
            pr = next((i for i in range(rank, dim) if rows[i][c] != 0), None)
            if pr is None:
                continue
            rows[rank], rows[pr] = rows[pr], rows[rank]
            pv = rows[rank][c]
            rows[rank] = [x / pv for x in rows[rank]]
            for i in range(dim):
                if i != rank and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
            pivots.append(c)
            rank += 1
        if check_rank:
            return [] if rank == k else None
        for i in range(rank, dim):
            if rows[i][k] != 0:
                return None
        sol = [Fraction(0)] * k
        for idx, c in enumerate(pivots):
            sol[c] = rows[idx][k]
        return sol

    def coefficients(self, m):
        m = tuple(m)
        if m not in self._cache:
            self._cache[m] = self._solve(m)
        return self._cache[m]

    def degree(self, m):
        """J-adic degree of an exponent; 0 only for m = 0."""
        coeffs = self.coefficients(m)
        if coeffs is None or any(c < 0 for c in coeffs):
            raise ValueError("exponent %r outside the grading monoid" % (m,))
        return sum(coeffs, Fraction(0))


def j_degree(grading, m):
    """Linear J-adic degree of a lattice exponent under the chosen grading."""
    return grading.degree(m)


class TruncatedLaurent:
    """Finite exact Laurent series z^offset * (sum of CoeffPoly * z^u).

    Exponent keys are absolute integer tuples; the relative exponent
    key - offset must lie in the grading monoid with degree <= order.
    """

    __slots__ = ("grading", "order", "offset", "terms")

    def __init__(self, grading, order, offset, terms):
        self.grading = grading
        self.order = order
        self.offset = tuple(offset)
        clean = {}
        for expo, poly in terms.items():
            if not isinstance(poly, CoeffPoly):
                poly = CoeffPoly.rational(poly)
            if not poly:
                continue
            expo = tuple(expo)
            if grading.degree(_vsub(expo, self.offset)) <= order:
                clean[expo] = poly
        self.terms = clean

    # -- constructors

    @classmethod
    def monomial(cls, grading, order, expo, coeff=1):
        return cls(grading, order, expo, {tuple(expo): CoeffPoly.rational(coeff)
                                          if isinstance(coeff, (int, Fraction)) else coeff})

    @classmethod
    def one(cls, grading, order):
        zero = tuple(0 for _ in range(grading.dim))
        return cls.monomial(grading, order, zero)

    @classmethod
    def unit_from_terms(cls, grading, order, terms):
        """Build 1 + (terms); terms must not touch the constant."""
        zero = tuple(0 for _ in range(grading.dim))
        full = {zero: CoeffPoly.one()}
        for expo, poly in terms.items():
            if tuple(expo) == zero:
                raise ValueError("unit tail must not contain a constant term")
            full[tuple(expo)] = poly
        return cls(grading, order, zero, full)

    # -- helpers

    def rel_degree(self, expo):
        return self.grading.degree(_vsub(expo, self.offset))

    def is_unit(self):
        zero = tuple(0 for _ in range(self.grading.dim))
        return self.offset == zero and self.terms.get(zero, CoeffPoly.zero()).is_one()

    def constant(self):
        return self.terms.get(self.offset, CoeffPoly.zero())

    def truncate(self, new_order):
        if new_order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedLaurent(self.grading, new_order, self.offset, self.terms)

    def with_grading(self, grading, order=None):
        """Reinterpret the same terms in another grading (exact, may raise)."""
        return TruncatedLaurent(grading, self.order if order is None else order,
                                self.offset, self.terms)

    # -- arithmetic

    def _rebased_ok(self, offset):
        try:
            for expo in self.terms:
                self.grading.degree(_vsub(expo, offset))
            return True
        except ValueError:
            return False

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CoeffPoly)):
            other = TruncatedLaurent(
                self.grading, self.order, self.offset,
                {self.offset: other if isinstance(other, CoeffPoly) else CoeffPoly.rational(other)})
        if self.order != other.order:
            raise ValueError("mismatched truncation orders")
        if self.offset == other.offset:
            offset = self.offset
        else:
            for cand in (self.offset, other.offset):
                if self._rebased_ok(cand) and other._rebased_ok(cand):
                    offset = cand
                    break
            else:
                raise ValueError("incompatible offsets in series addition")
        out = dict(self.terms)
        for expo, poly in other.terms.items():
            out[expo] = out.get(expo, CoeffPoly.zero()) + poly
        return TruncatedLaurent(self.grading, self.order, offset, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedLaurent(self.grading, self.order, self.offset,
                                {e: -p for e, p in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CoeffPoly)):
            return self + TruncatedLaurent(
                self.grading, self.order, self.offset,
                {self.offset: -(other if isinstance(other, CoeffPoly) else CoeffPoly.rational(other))})
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CoeffPoly)):
            poly = other if isinstance(other, CoeffPoly) else CoeffPoly.rational(other)
            return TruncatedLaurent(self.grading, self.order, self.offset,
                                    {e: p * poly for e, p in self.terms.items()})
        if self.order != other.order:
            raise ValueError("mismatched truncation orders")
        if self.grading.dim != other.grading.dim:
            raise ValueError("mismatched lattices")
        offset = _vadd(self.offset, other.offset)
        a = [(e, self.rel_degree(e), p) for e, p in self.terms.items()]
        b = [(e, other.rel_degree(e), p) for e, p in other.terms.items()]
        out = {}
        for e1, d1, p1 in a:
            for e2, d2, p2 in b:
                if d1 + d2 > self.order:
                    continue
                e = _vadd(e1, e2)
                prod = p1 * p2
                if e in out:
                    out[e] = out[e] + prod
                else:
                    out[e] = prod
        return TruncatedLaurent(self.grading, self.order, offset, out)

    __rmul__ = __mul__

    def _inverse(self):
        if not self.is_unit():
            raise ValueError("only unit series can be inverted")
        zero = self.offset
        tail = {e: p for e, p in self.terms.items() if e != zero}
        if not tail:
            return self
        mindeg = min(self.grading.degree(e) for e in tail)
        g = TruncatedLaurent(self.grading, self.order, zero, tail)
        result = TruncatedLaurent.one(self.grading, self.order)
        power = TruncatedLaurent.one(self.grading, self.order)
        k = 1
        while k * mindeg <= self.order:
            power = power * (-g)
            if not power.terms:
                break
            result = result + power
            k += 1
        return result

    def __pow__(self, e):
        if e == 0:
            return TruncatedLaurent.one(self.grading, self.order)
        base = self if e > 0 else self._inverse()
        e = abs(e)
        result = None
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparison

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedLaurent)
            and self.order == other.order
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.order, frozenset(self.terms)))

    def __repr__(self):
        return "TruncatedLaurent(%s ; order=%s)" % (canonical_string(self), self.order)


def series_mul(a, b):
    """Product of two truncated series (same lattice, same order)."""
    return a * b


def series_pow_int(f, e):
    """Integer power of a series; negative powers require a unit base."""
    if e < 0 and not f.is_unit():
        raise ValueError("negative power of a non-unit series")
    return f ** e
