"""Walls, initial diagrams, wall-crossing and rank-2 consistency completion.

Diagram geometry is specialized to a 2-plane (the span of the unfrozen
directions); exponents may live in a bigger lattice (principal coefficients)
and are projected onto the plane for geometry and crossing powers.

Normals are stored in the integral basis {d_i e_i} of N°, so every crossing
power is a plain integer dot product with the projected exponent.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cmp_to_key

from .ring import CoeffPoly, Grading, TruncatedLaurent, canonical_string
from .seed import epsilon, mutate_seed, serialize_seed_file

# ---------------------------------------------------------------------------
# exact 2-plane geometry


def _prim(v):
    g = math.gcd(*[abs(int(x)) for x in v])
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(int(x) // g for x in v)


def _perp_normal(mdir):
    """Primitive plane normal of an exponent direction, first nonzero > 0."""
    n = (-mdir[1], mdir[0])
    lead = n[0] if n[0] else n[1]
    if lead < 0:
        n = (-n[0], -n[1])
    return _prim(n)


def _rot90(p):
    return (-p[1], p[0])


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _half(v):
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _ang_cmp(a, b):
    """Counterclockwise angular order starting at the positive x-axis."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = _cross(a, b)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def _parallel(a, b):
    return _cross(a, b) == 0 and _dot(a, b) > 0


def _line_rep(v):
    """Canonical direction of a full line: angle in [0, pi)."""
    v = _prim(v)
    return v if _half(v) == 0 else (-v[0], -v[1])


# ---------------------------------------------------------------------------
# walls and diagrams


class Wall:
    """Support (ray or full line in the plane), crossing normal and function.

    base is the primitive exponent step in the full lattice; function is a
    unit series whose exponents are positive multiples of base.
    """

    __slots__ = ("kind", "direction", "normal", "base", "function", "incoming")

    def __init__(self, kind, direction, normal, base, function, incoming):
        self.kind = kind
        self.direction = tuple(direction)
        self.normal = tuple(normal)
        self.base = tuple(base)
        self.function = function
        self.incoming = incoming
        if not function.is_unit():
            raise ValueError("wall function must be a unit series")
        for expo in function.terms:
            if any(expo) and not _is_pos_multiple(expo, self.base):
                raise ValueError("wall exponent %r is not a positive multiple of %r"
                                 % (expo, self.base))

    def __repr__(self):
        return "Wall(%s dir=%s normal=%s f=%s)" % (
            self.kind, self.direction, self.normal, canonical_string(self.function))


def _is_pos_multiple(expo, base):
    ks = set()
    for x, b in zip(expo, base):
        if b == 0:
            if x != 0:
                return False
        else:
            if x % b != 0:
                return False
            ks.add(x // b)
    return len(ks) == 1 and ks.pop() > 0


class ScatteringDiagram:
    """A finite wall collection with diagram-wide truncation order."""

    def __init__(self, fixed, seed, order, grading, walls, proj, kind="A"):
        self.fixed = fixed
        self.seed = seed
        self.order = order
        self.grading = grading
        self.walls = list(walls)
        self.proj = tuple(proj)
        self.kind = kind
        self.dim = grading.dim

    def project(self, expo):
        return tuple(expo[i] for i in self.proj)

    def basis_exponents(self):
        """Plane basis monom exponents: the f-lattice units of the plane."""
        out = []
        for i in self.proj:
            out.append(tuple(1 if j == i else 0 for j in range(self.dim)))
        return out

    def support_directions(self):
        dirs = []
        for w in self.walls:
            if w.kind == "line":
                dirs.append(w.direction)
                dirs.append((-w.direction[0], -w.direction[1]))
            else:
                dirs.append(w.direction)
        uniq = []
        for d in dirs:
            if not any(_parallel(d, u) for u in uniq):
                uniq.append(_prim(d))
        return sorted(uniq, key=cmp_to_key(_ang_cmp))

    def on_support(self, point):
        """Exact test whether a rational plane point lies on some wall."""
        for w in self.walls:
            c = _cross(w.direction, point)
            if c != 0:
                continue
            if w.kind == "line" or (point[0] * w.direction[0] + point[1] * w.direction[1]) >= 0:
                return True
        return False


# ---------------------------------------------------------------------------
# initial diagrams


def _v_rows(fixed, seed):
    """v_i = p1*(e_i) rows in the initial f-basis for the current seed."""
    eps = epsilon(fixed, seed)
    F = seed.f_vectors
    n = fixed.n
    rows = []
    for i in range(n):
        row = [0] * n
        for j in range(n):
            if eps[i][j]:
                row = [x + eps[i][j] * y for x, y in zip(row, F[j])]
        rows.append(tuple(row))
    return rows


def initial_diagram(fixed, seed, order, kind="A"):
    """Incoming walls (e_i^perp, 1 + a_{i,1} z^{v_i} + ... + z^{r_i v_i})."""
    uf = fixed.unfrozen
    if len(uf) != 2:
        raise ValueError("rank-2 diagrams need exactly two unfrozen directions")
    vs = _v_rows(fixed, seed)
    proj = uf
    pv = {i: tuple(vs[i][j] for j in proj) for i in uf}
    if _cross(pv[uf[0]], pv[uf[1]]) == 0:
        raise ValueError("p* is not injective on the unfrozen span; "
                         "use principal coefficients")
    grading = Grading([vs[i] for i in uf])
    walls = []
    for i in uf:
        terms = {}
        v = vs[i]
        for s in range(1, fixed.r[i] + 1):
            terms[tuple(s * x for x in v)] = seed.a_tuples[i][s]
        fn = TruncatedLaurent.unit_from_terms(grading, order, terms)
        walls.append(Wall(
            kind="line",
            direction=_line_rep(pv[i]),
            normal=_perp_normal(_prim(pv[i])),
            base=_prim(v),
            function=fn,
            incoming=True,
        ))
    return ScatteringDiagram(fixed, seed, order, grading, walls, proj, kind)


def initial_diagram_prin(fixed, seed, order):
    """Initial diagram of the principal-coefficient data (lifted exponents)."""
    from .seed import principal_data

    fixed2, seed2 = principal_data(fixed, seed)
    return initial_diagram(fixed2, seed2, order, kind="Aprin")


# ---------------------------------------------------------------------------
# wall crossing and path-ordered products


def wall_cross(wall, sign, series, proj):
    """z^m -> z^m f^{sign * <n0', m>}, extended linearly and truncated."""
    out = {}
    cache = {}
    for expo, poly in series.terms.items():
        p = sign * _dot(wall.normal, tuple(expo[i] for i in proj))
        if p == 0:
            out[expo] = out.get(expo, CoeffPoly.zero()) + poly
            continue
        if p not in cache:
            cache[p] = wall.function ** p
        for e2, p2 in cache[p].terms.items():
            key = tuple(x + y for x, y in zip(expo, e2))
            out[key] = out.get(key, CoeffPoly.zero()) + poly * p2
    return TruncatedLaurent(series.grading, series.order, series.offset, out)


def path_ordered_product(diag, path, series):
    """Apply crossings (wall, sign) in order to a series."""
    for wall, sign in path:
        series = wall_cross(wall, sign, series, diag.proj)
    return series


def _events_ccw(walls):
    """All crossing events of a ccw loop, as (direction, wall, sign)."""
    events = []
    for w in walls:
        dirs = [w.direction]
        if w.kind == "line":
            dirs.append((-w.direction[0], -w.direction[1]))
        for p in dirs:
            gp = _rot90(p)
            s = _dot(w.normal, gp)
            sign = -1 if s > 0 else (1 if s < 0 else 0)
            if sign == 0:
                raise ValueError("wall normal parallel to its own support")
            events.append((p, w, sign))
    events.sort(key=cmp_to_key(lambda a, b: _ang_cmp(a[0], b[0])))
    return events


def _strictly_between_ccw(ref, p, end):
    """True if direction p lies strictly inside the ccw arc ref -> end."""
    c = _ang_cmp(ref, end)
    pa = _ang_cmp(ref, p)
    pb = _ang_cmp(p, end)
    if c < 0:
        return pa < 0 and pb < 0
    if c > 0:
        return pa < 0 or pb < 0
    return False


def _pick_ref_direction(diag):
    """A direction off every wall (and off the outgoing cone when possible)."""
    vs = [diag.project(tuple(g)) for g in diag.grading.generators]
    candidates = []
    for q in range(1, 12):
        for p in range(1, 12):
            if math.gcd(p, q) == 1:
                candidates.append((p, q))
                candidates.append((-p, q))
                candidates.append((p, -q))
                candidates.append((-p, -q))
    dirs = diag.support_directions()
    for cand in candidates:
        if any(_cross(cand, d) == 0 for d in dirs):
            continue
        # avoid the cone of future outgoing rays -cone(v1, v2)
        neg = (-cand[0], -cand[1])
        s1, s2 = _cross(vs[0], neg), _cross(neg, vs[1])
        orient = _cross(vs[0], vs[1])
        inside = (orient > 0 and s1 >= 0 and s2 >= 0) or (orient < 0 and s1 <= 0 and s2 <= 0)
        if not inside:
            return cand
    raise RuntimeError("no generic reference direction found")


def loop_product(diag, series, ref=None):
    """Full ccw loop around the origin starting just after ref."""
    ref = ref or _pick_ref_direction(diag)
    events = _events_ccw(diag.walls)
    start = 0
    while start < len(events) and _ang_cmp(events[start][0], ref) <= 0:
        start += 1
    ordered = events[start:] + events[:start]
    for p, wall, sign in ordered:
        series = wall_cross(wall, sign, series, diag.proj)
    return series


def path_between(diag, start_dir, end_dir):
    """Crossing path along the ccw arc from start_dir to end_dir."""
    events = _events_ccw(diag.walls)
    start = 0
    while start < len(events) and _ang_cmp(events[start][0], start_dir) <= 0:
        start += 1
    ordered = events[start:] + events[:start]
    return [(w, s) for p, w, s in ordered
            if _strictly_between_ccw(start_dir, p, end_dir)]


# ---------------------------------------------------------------------------
# consistency and completion


def _loop_defects(diag, ref=None):
    """Per basis monomial, the nonzero defect terms of the loop product."""
    out = []
    for m in diag.basis_exponents():
        s = TruncatedLaurent.monomial(diag.grading, diag.order, m)
        res = loop_product(diag, s, ref)
        defect = {}
        for expo, poly in res.terms.items():
            if expo == m:
                poly = poly - CoeffPoly.one()
            if poly:
                defect[tuple(x - y for x, y in zip(expo, m))] = poly
        out.append((m, defect))
    return out


def check_consistency(diag, order=None):
    """(True, None) if every loop acts as the identity, else (False, monomial)."""
    d = diag if order is None else _reorder(diag, order)
    defects = _loop_defects(d)
    worst = None
    for bi, (m, defect) in enumerate(defects):
        for u, poly in defect.items():
            deg = d.grading.degree(u)
            key = (deg, bi, u)
            if worst is None or key < worst[0]:
                worst = (key, tuple(x + y for x, y in zip(m, u)))
    if worst is None:
        return True, None
    return False, worst[1]


def _reorder(diag, order):
    if order > diag.order:
        raise ValueError("cannot raise the order of a computed diagram")
    walls = [Wall(w.kind, w.direction, w.normal, w.base,
                  w.function.truncate(order), w.incoming)
             for w in diag.walls]
    return ScatteringDiagram(diag.fixed, diag.seed, order, diag.grading,
                             walls, diag.proj, diag.kind)


def complete_rank2(diag, order=None):
    """Order-by-order consistency completion; adds only outgoing walls."""
    order = diag.order if order is None else order
    work = _reorder(diag, order)
    rays = {}  # plane direction -> mutable [terms dict]
    last_deg = Fraction(-1)
    while True:
        cur = _assemble(work, rays)
        defects = _loop_defects(cur)
        flat = []
        for bi, (m, defect) in enumerate(defects):
            for u, poly in defect.items():
                flat.append((cur.grading.degree(u), u, bi, poly))
        if not flat:
            return _assemble(work, rays, final=True)
        dmin = min(f[0] for f in flat)
        if dmin <= last_deg:
            raise RuntimeError("completion failed to make progress at degree %s" % (dmin,))
        last_deg = dmin
        by_u = {}
        for deg, u, bi, poly in flat:
            if deg == dmin:
                by_u.setdefault(u, {})[bi] = poly
        basis = cur.basis_exponents()
        for u, per_basis in by_u.items():
            mdir = _prim(cur.project(u))
            normal = _perp_normal(mdir)
            ray_dir = (-mdir[0], -mdir[1])
            gq = _rot90(ray_dir)
            sgn = _dot(normal, gq)
            eps_w = -1 if sgn > 0 else 1
            solved = False
            for bi, poly in per_basis.items():
                pairv = _dot(normal, cur.project(basis[bi]))
                if pairv == 0:
                    continue
                coeff = poly.scale(Fraction(-1, eps_w * pairv))
                bucket = rays.setdefault(ray_dir, {})
                bucket[u] = bucket.get(u, CoeffPoly.zero()) + coeff
                solved = True
                break
            if not solved:
                raise RuntimeError("defect %r cannot be cancelled by any wall" % (u,))


def _assemble(work, rays, final=False):
    walls = list(work.walls)
    ray_walls = []
    for ray_dir, terms in rays.items():
        terms = {u: p for u, p in terms.items() if p}
        if not terms:
            continue
        base = _prim(min(terms, key=lambda u: work.grading.degree(u)))
        fn = TruncatedLaurent.unit_from_terms(work.grading, work.order, terms)
        ray_walls.append(Wall(
            kind="ray",
            direction=ray_dir,
            normal=_perp_normal(_prim(work.project(base))),
            base=base,
            function=fn,
            incoming=False,
        ))
    ray_walls.sort(key=cmp_to_key(lambda a, b: _ang_cmp(a.direction, b.direction)))
    return ScatteringDiagram(work.fixed, work.seed, work.order, work.grading,
                             walls + ray_walls, work.proj, work.kind)


# ---------------------------------------------------------------------------
# diagram mutation T_k


def apply_Tk(diag, k):
    """Piecewise-linear mutation of a completed rank-2 diagram in direction k.

    Only implemented for diagrams whose exponent lattice is the plane itself.
    """
    fixed = diag.fixed
    if k not in fixed.unfrozen:
        raise ValueError("cannot mutate frozen direction %d" % (k + 1,))
    if diag.dim != 2:
        raise ValueError("apply_Tk requires plane exponents")
    seed2 = mutate_seed(fixed, diag.seed, k)
    vs = _v_rows(fixed, diag.seed)
    vk = vs[k]
    rk = fixed.r[k]
    kk = diag.proj.index(k)

    def tplus(m):
        return tuple(x + rk * m[kk] * y for x, y in zip(m, vk))

    new_vs = _v_rows(fixed, seed2)
    grading2 = Grading([new_vs[i] for i in fixed.unfrozen])
    merged = {}

    def push(kind, direction, terms):
        key = (kind, tuple(direction))
        merged.setdefault(key, []).append(terms)

    for w in diag.walls:
        if w.kind == "line" and w.normal == tuple(1 if j == kk else 0 for j in range(2)):
            # the k-wall: function replaced by the mutated exchange polynomial
            terms = {}
            for s in range(1, rk + 1):
                terms[tuple(-s * x for x in vk)] = diag.seed.a_tuples[k][s]
            push("line", w.direction, terms)
            continue
        pieces = []
        if w.kind == "line":
            d1, d2 = w.direction, (-w.direction[0], -w.direction[1])
            pieces = [("ray", d1), ("ray", d2)]
        else:
            pieces = [("ray", w.direction)]
        for kind, pdir in pieces:
            if pdir[kk] > 0:  # H_{k,+}: map geometry and exponents
                nd = _prim(tplus(pdir))
                terms = {tplus(e): p for e, p in w.function.terms.items() if any(e)}
                push(kind, nd, terms)
            else:
                terms = {e: p for e, p in w.function.terms.items() if any(e)}
                push(kind, pdir, terms)

    walls = []
    for (kind, direction), term_dicts in merged.items():
        fn = TruncatedLaurent.one(grading2, diag.order)
        for terms in term_dicts:
            fn = fn * TruncatedLaurent.unit_from_terms(grading2, diag.order, terms)
        if fn.is_unit() and len(fn.terms) == 1:
            continue
        base = _prim(min((e for e in fn.terms if any(e)),
                         key=lambda u: grading2.degree(u)))
        pb = _prim(tuple(base))
        direction = _line_rep(direction) if kind == "line" else direction
        incoming = kind == "line" or _parallel(pb, direction)
        walls.append(Wall(kind, direction, _perp_normal(pb), base, fn, incoming))
    walls.sort(key=cmp_to_key(lambda a, b: _ang_cmp(a.direction, b.direction)))
    return ScatteringDiagram(fixed, seed2, diag.order, grading2, walls,
                             diag.proj, diag.kind)


# ---------------------------------------------------------------------------
# equivalence and chambers


def equivalence_check(d1, d2, order=None):
    """Path products between matching chamber points agree on basis monomials."""
    if order is not None:
        d1, d2 = _reorder(d1, order), _reorder(d2, order)
    dirs = []
    for d in d1.support_directions() + d2.support_directions():
        if not any(_cross(d, u) == 0 and _dot(d, u) > 0 for u in dirs):
            dirs.append(d)
    dirs.sort(key=cmp_to_key(_ang_cmp))
    if len(dirs) < 2:
        raise ValueError("too few support directions for a chamber decomposition")
    reps = []
    for i, a in enumerate(dirs):
        b = dirs[(i + 1) % len(dirs)]
        mid = (a[0] + b[0], a[1] + b[1])
        if mid == (0, 0):
            mid = _rot90(a)
        reps.append(_prim(mid))
    ref = reps[0]
    for target in reps[1:]:
        for m in d1.basis_exponents():
            s1 = TruncatedLaurent.monomial(d1.grading, d1.order, m)
            s2 = TruncatedLaurent.monomial(d2.grading, d2.order, m)
            r1 = path_ordered_product(d1, path_between(d1, ref, target), s1)
            r2 = path_ordered_product(d2, path_between(d2, ref, target), s2)
            if r1.terms != r2.terms:
                return False
    return True


def chambers(diag, depth):
    """Cluster chambers as (mutation word, g-vector cone), words up to depth."""
    fixed = diag.fixed
    uf = fixed.unfrozen
    out = []
    seen = set()
    frontier = [((), diag.seed)]
    for _ in range(depth + 1):
        nxt = []
        for word, sd in frontier:
            cone = tuple(tuple(sd.f_vectors[i][j] for j in diag.proj) for i in uf)
            key = frozenset(cone)
            if key not in seen:
                seen.add(key)
                out.append((word, cone))
            for k in uf:
                if word and word[-1] == k:
                    continue
                nxt.append((word + (k,), mutate_seed(fixed, sd, k)))
        frontier = nxt
    return out


def cone_contains(cone, m):
    """Exact membership of a plane vector in the cone spanned by two rays."""
    g1, g2 = cone
    det = _cross(g1, g2)
    if det == 0:
        raise ValueError("degenerate chamber cone")
    a = Fraction(_cross(m, g2), det)
    b = Fraction(_cross(g1, m), det)
    return a >= 0 and b >= 0


# ---------------------------------------------------------------------------
# principal slices and projections


def slice_to_X(prin_diag):
    """Restrict lifted exponents (p*(n), n) to z^n; supports in N-coordinates."""
    fixed = prin_diag.fixed
    n2 = prin_diag.dim
    n = n2 // 2
    uf = prin_diag.proj
    eps = epsilon(prin_diag.fixed, prin_diag.seed)

    def normal_x(normal):
        full = [0] * n
        for idx, i in enumerate(uf):
            full[i] = int(normal[idx] * fixed.d[i])
        return tuple(
            sum(eps[i][j] * full[j] for j in range(n)) for i in range(n)
        )[:n]

    grading = Grading([tuple(1 if j == i else 0 for j in range(n)) for i in uf])
    walls = []
    for w in prin_diag.walls:
        terms = {}
        for expo, poly in w.function.terms.items():
            if not any(expo):
                continue
            terms[tuple(expo[n:])] = poly
        nx = normal_x(w.normal)
        base = _prim(w.base[n:])
        if w.kind == "line":
            direction = _line_rep(_perp_normal_of(nx))
        else:
            direction = _prim(tuple(-x for x in w.base[n:]))
        fn = TruncatedLaurent.unit_from_terms(grading, prin_diag.order, terms)
        incoming = w.kind == "line" or _parallel(base, direction)
        walls.append(Wall(w.kind, direction, nx, base, fn, incoming))
    walls.sort(key=cmp_to_key(lambda a, b: _ang_cmp(a.direction, b.direction)))
    return ScatteringDiagram(prin_diag.fixed, prin_diag.seed, prin_diag.order,
                             grading, walls, tuple(range(2)), kind="X")


def _perp_normal_of(nx):
    return _prim((-nx[1], nx[0]))


def project_to_A(prin_diag):
    """Drop the N-component of every lifted exponent; merge equal supports."""
    n = prin_diag.dim // 2
    gens = [tuple(g)[:n] for g in prin_diag.grading.generators]
    grading = Grading(gens)
    merged = {}
    meta = {}
    for w in prin_diag.walls:
        key = (w.kind, w.direction)
        terms = {e[:n]: p for e, p in w.function.terms.items() if any(e)}
        merged.setdefault(key, []).append(terms)
        meta[key] = w
    walls = []
    for key, term_dicts in merged.items():
        kind, direction = key
        fn = TruncatedLaurent.one(grading, prin_diag.order)
        for terms in term_dicts:
            fn = fn * TruncatedLaurent.unit_from_terms(grading, prin_diag.order, terms)
        base = _prim(meta[key].base[:n])
        incoming = kind == "line" or _parallel(base, direction)
        walls.append(Wall(kind, direction, meta[key].normal, base, fn, incoming))
    walls.sort(key=cmp_to_key(lambda a, b: _ang_cmp(a.direction, b.direction)))
    return ScatteringDiagram(prin_diag.fixed, prin_diag.seed, prin_diag.order,
                             grading, walls, prin_diag.proj, kind="A")


# ---------------------------------------------------------------------------
# dumps


def dump_diagram(diag, variant="A"):
    """Deterministic text dump: seed header, order, then angular wall list."""
    lines = ["order %d" % diag.order, "variant %s" % variant]
    lines.append(serialize_seed_file(diag.fixed, diag.seed).rstrip("\n"))
    lines.append("walls:")
    walls = sorted(diag.walls, key=cmp_to_key(lambda a, b: _ang_cmp(a.direction, b.direction)))
    for w in walls:
        lines.append("%s direction=(%d,%d) normal=(%s) f=%s" % (
            w.kind, w.direction[0], w.direction[1],
            ",".join(str(x) for x in w.normal),
            canonical_string(w.function)))
    return "\n".join(lines) + "\n"
