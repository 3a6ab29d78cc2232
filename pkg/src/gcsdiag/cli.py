"""Command-line surface: mutate, complete, theta, plot, check, companions.

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 verification failure.  Completed outputs are cached by content hash in
a .gcsdiag-cache directory (override with GCSDIAG_CACHE); cache writes are
atomic renames, cache hits are byte-identical to fresh runs.
"""

from __future__ import annotations

import hashlib
import math
import os
import sys
import tempfile
from fractions import Fraction

import click

from .scatter import (
    _reorder,
    apply_Tk,
    check_consistency,
    complete_rank2,
    dump_diagram,
    equivalence_check,
    initial_diagram,
    initial_diagram_prin,
    project_to_A,
    slice_to_X,
)
from .seed import (
    ClusterState,
    c_vectors,
    epsilon,
    g_vectors,
    langlands_dual,
    laurent_check,
    left_companion,
    mutate_cluster,
    mutate_seed,
    parse_seed_file,
    right_companion,
    serialize_seed_file,
)
from .theta import sign_coherence_check, theta, theta_report


class CliError(click.ClickException):
    def __init__(self, message, code):
        super().__init__(message)
        self.exit_code = code


def _load_seed(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(str(exc), 2)
    try:
        fixed, seed = parse_seed_file(text)
    except (ValueError, KeyError) as exc:
        raise CliError("seed file parse error: %s" % exc, 2)
    return text, fixed, seed


def _parse_word(word, fixed):
    if not word:
        return ()
    try:
        out = tuple(int(x) - 1 for x in word.split(","))
    except ValueError:
        raise CliError("bad mutation word %r" % word, 2)
    for k in out:
        if k not in fixed.unfrozen:
            raise CliError("index %d is not unfrozen" % (k + 1,), 3)
    return out


def _parse_vec(text, name):
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise CliError("bad %s vector %r" % (name, text), 2)


def _cache_dir(out):
    env = os.environ.get("GCSDIAG_CACHE")
    if env:
        return env
    base = os.path.dirname(os.path.abspath(out)) if out else os.getcwd()
    return os.path.join(base, ".gcsdiag-cache")


def _cached_text(key_parts, producer, no_cache, out):
    if no_cache:
        return producer()
    key = hashlib.sha256("\x00".join(key_parts).encode("utf-8")).hexdigest()
    cdir = _cache_dir(out)
    path = os.path.join(cdir, key)
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    text = producer()
    os.makedirs(cdir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cdir)
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return text


def _emit(text, out):
    if out:
        d = os.path.dirname(os.path.abspath(out))
        fd, tmp = tempfile.mkstemp(dir=d)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    else:
        sys.stdout.write(text)


def _build_diagram(fixed, seed, order, variant):
    try:
        if variant == "A":
            return complete_rank2(initial_diagram(fixed, seed, order))
        if variant == "Aprin":
            return complete_rank2(initial_diagram_prin(fixed, seed, order))
        if variant == "X":
            return slice_to_X(complete_rank2(initial_diagram_prin(fixed, seed, order)))
        if variant == "left":
            f2, s2 = left_companion(fixed, seed)
            return complete_rank2(initial_diagram(f2, s2, order))
        if variant == "right":
            f2, s2 = right_companion(fixed, seed)
            return complete_rank2(initial_diagram(f2, s2, order))
    except ValueError as exc:
        raise CliError(str(exc), 3)
    raise CliError("unknown variant %r" % variant, 2)


@click.group()
def main():
    """Generalized cluster scattering diagrams with exact arithmetic."""


@main.command()
@click.argument("seed_file", type=click.Path())
@click.option("--word", default="", help="comma-separated 1-based mutation word")
@click.option("--out", default=None, type=click.Path())
def mutate(seed_file, word, out):
    """Mutate a seed and report basis vectors and cluster variables."""
    _, fixed, seed = _load_seed(seed_file)
    w = _parse_word(word, fixed)
    state = ClusterState(fixed, seed)
    try:
        for k in w:
            state = mutate_cluster(state, k)
    except ValueError as exc:
        raise CliError(str(exc), 4)
    sd = state.seed
    lines = [serialize_seed_file(fixed, sd).rstrip("\n")]
    lines.append("epsilon %s" % " ".join(str(x) for row in epsilon(fixed, sd) for x in row))
    lines.append("c %s" % " ".join(str(x) for row in c_vectors(sd) for x in row))
    lines.append("g %s" % " ".join(str(x) for row in g_vectors(sd) for x in row))
    for i, expr in enumerate(state.exprs):
        lines.append("x.%d %s" % (i + 1, expr))
    _emit("\n".join(lines) + "\n", out)


@main.command()
@click.argument("seed_file", type=click.Path())
@click.option("--order", default=6, type=int)
@click.option("--variant", default="A",
              type=click.Choice(["A", "Aprin", "X", "left", "right"]))
@click.option("--out", default=None, type=click.Path())
@click.option("--no-cache", is_flag=True)
def complete(seed_file, order, variant, out, no_cache):
    """Complete the scattering diagram and dump its walls."""
    text, fixed, seed = _load_seed(seed_file)
    if order < 1:
        raise CliError("order must be >= 1", 3)

    def produce():
        return dump_diagram(_build_diagram(fixed, seed, order, variant), variant)

    _emit(_cached_text(["complete", text, str(order), variant], produce, no_cache, out), out)


@main.command("theta")
@click.argument("seed_file", type=click.Path())
@click.option("--order", default=6, type=int)
@click.option("--m0", required=True, help="initial exponent, e.g. 0,-1")
@click.option("--q", "--Q", "q", required=True, help="endpoint, e.g. 3/2,1")
@click.option("--out", default=None, type=click.Path())
@click.option("--no-cache", is_flag=True)
def theta_cmd(seed_file, order, m0, q, out, no_cache):
    """Enumerate broken lines and print the theta report."""
    text, fixed, seed = _load_seed(seed_file)
    m0v = tuple(int(x) for x in _parse_vec(m0, "m0"))
    qv = _parse_vec(q, "Q")

    def produce():
        diag = _build_diagram(fixed, seed, order, "A")
        notice = ""
        point = qv
        if diag.on_support(point):
            for K in (97, 101, 103, 107, 109, 113):
                cand = (point[0] + Fraction(1, K), point[1] + Fraction(1, K * K))
                if not diag.on_support(cand):
                    point = cand
                    notice = "note: endpoint perturbed off the support to (%s,%s)\n" % cand
                    break
            else:
                raise CliError("could not perturb endpoint off the support", 3)
        try:
            res = theta(diag, point, m0v, order)
        except ValueError as exc:
            raise CliError(str(exc), 3)
        return notice + theta_report(diag, res)

    _emit(_cached_text(["theta", text, str(order), m0, q], produce, no_cache, out), out)


# ---------------------------------------------------------------------------
# plotting


def _f6(x):
    return "%.6g" % float(x)


def _svg(elements, size=640):
    head = ('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
            'viewBox="0 0 %d %d">' % (size, size, size, size))
    axes = ('<line x1="0" y1="%d" x2="%d" y2="%d" stroke="#ddd"/>'
            '<line x1="%d" y1="0" x2="%d" y2="%d" stroke="#ddd"/>'
            % (size // 2, size, size // 2, size // 2, size // 2, size))
    return head + axes + "".join(elements) + "</svg>\n"


def _to_px(p, scale, size):
    return (size / 2 + float(p[0]) * scale, size / 2 - float(p[1]) * scale)


def _parse_frac_pair(txt):
    a, b = txt.strip("()").split(",")
    return (Fraction(a), Fraction(b))


def _plot_dump(text):
    size, scale = 640, 60
    radius = size / 2
    elems = []
    for line in text.splitlines():
        head, _, label = line.partition(" f=")
        parts = head.split()
        if not parts or parts[0] not in ("line", "ray"):
            continue
        fields = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        dx, dy = _parse_frac_pair(fields["direction"])
        norm = (float(dx) ** 2 + float(dy) ** 2) ** 0.5
        ux, uy = float(dx) / norm, float(dy) / norm
        ends = [(ux * radius / scale, uy * radius / scale)]
        if parts[0] == "line":
            ends.append((-ends[0][0], -ends[0][1]))
        else:
            ends.append((0, 0))
        (x1, y1), (x2, y2) = (_to_px(e, scale, size) for e in ends)
        elems.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black"/>'
                     % (_f6(x1), _f6(y1), _f6(x2), _f6(y2)))
        lx, ly = _to_px((ux * 0.8 * radius / scale, uy * 0.8 * radius / scale), scale, size)
        elems.append('<text x="%s" y="%s" font-size="10">%s</text>'
                     % (_f6(lx), _f6(ly), label.replace("&", "&amp;").replace("<", "&lt;")))
    return _svg(elems, size)


def _plot_theta(text):
    size, scale = 640, 60
    elems = []
    colors = ["#c00", "#06c", "#080", "#a0a", "#c60", "#066"]
    header = None
    idx = 0
    for line in text.splitlines():
        if line.startswith("theta "):
            header = dict(p.split("=", 1) for p in line.split()[1:])
            continue
        if not line.startswith("line "):
            continue
        head, _, trail = line.partition(" trail=")
        fields = dict(p.split("=", 1) for p in head.split()[1:] if "=" in p)
        Q = _parse_frac_pair(header["Q"])
        pts = []
        if fields["points"] != "-":
            pts = [_parse_frac_pair(p) for p in fields["points"].split(";")]
        # trail exponents give the travel direction -m of each segment
        exps = []
        for piece in trail.split(" -> "):
            zpart = piece[piece.index("z^(") + 3:piece.index(")", piece.index("z^("))]
            exps.append(tuple(int(x) for x in zpart.split(",")))
        first_end = pts[0] if pts else Q
        m0 = exps[0]
        start = (first_end[0] + 4 * m0[0], first_end[1] + 4 * m0[1])
        poly = [start] + pts + [Q]
        px = " ".join("%s,%s" % (_f6(x), _f6(y))
                      for x, y in (_to_px(p, scale, size) for p in poly))
        elems.append('<polyline points="%s" fill="none" stroke="%s" stroke-width="1.5"/>'
                     % (px, colors[idx % len(colors)]))
        ex, ey = _to_px(poly[0], scale, size)
        elems.append('<text x="%s" y="%s" font-size="10">z^(%s)</text>'
                     % (_f6(ex), _f6(ey), ",".join(str(x) for x in exps[-1])))
        idx += 1
    return _svg(elems, size)


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--out", default=None, type=click.Path())
def plot(input_file, out):
    """Render a diagram dump or theta report as a deterministic SVG."""
    try:
        with open(input_file, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(str(exc), 2)
    body = text
    if body.startswith("note:"):
        body = body.split("\n", 1)[1]
    if body.startswith("order "):
        svg = _plot_dump(body)
    elif body.startswith("theta "):
        svg = _plot_theta(body)
    else:
        raise CliError("unrecognized input: expected a diagram dump or theta report", 2)
    _emit(svg, out)


# ---------------------------------------------------------------------------
# verification


def _tk_order_boost(diag, k):
    """Smallest factor so T_k of the boosted diagram is exact at diag.order.

    T_k rescales exponent degrees; walls mapped from the positive half-space
    may mix degrees by up to the max old/new degree ratio over wall bases.
    """
    from gcsdiag.scatter import _v_rows
    from gcsdiag.ring import Grading

    fixed = diag.fixed
    rk = fixed.r[k]
    kk = diag.proj.index(k)
    vk = _v_rows(fixed, diag.seed)[k]
    g2 = Grading([_v_rows(fixed, mutate_seed(fixed, diag.seed, k))[i]
                  for i in fixed.unfrozen])
    boost = 1
    for w in diag.walls:
        dirs = [w.direction] + ([(-w.direction[0], -w.direction[1])]
                                if w.kind == "line" else [])
        u = w.base
        if tuple(1 if j == kk else 0 for j in range(2)) == w.normal:
            continue  # the k-wall is replaced, not mapped
        old = diag.grading.degree(u)
        # walls in the positive half-space get their exponents sheared;
        # the rest keep u, but its degree can still shrink in the new grading
        if any(d[kk] > 0 for d in dirs):
            img = tuple(x + rk * u[kk] * y for x, y in zip(u, vk))
        else:
            img = u
        new = g2.degree(img)
        boost = max(boost, math.ceil(old / new))
    return boost


@main.command()
@click.argument("seed_file", type=click.Path())
@click.option("--order", default=8, type=int)
@click.option("--depth", default=5, type=int)
@click.option("--out", default=None, type=click.Path())
def check(seed_file, order, depth, out):
    """Run consistency, mutation-equivalence, sign-coherence and Laurent checks."""
    _, fixed, seed = _load_seed(seed_file)
    lines = []
    failed = False

    diag = _build_diagram(fixed, seed, order, "A")
    ok, mono = check_consistency(diag)
    lines.append("consistency: %s" % ("pass" if ok else "FAIL at z^(%s)" % (",".join(map(str, mono)))))
    failed |= not ok

    for k in fixed.unfrozen:
        try:
            boost = _tk_order_boost(diag, k)
            src = diag if boost == 1 else _build_diagram(fixed, seed, order * boost, "A")
            dk = _reorder(apply_Tk(src, k), order)
            d2 = complete_rank2(initial_diagram(fixed, mutate_seed(fixed, seed, k), order))
            ok = equivalence_check(dk, d2)
        except (ValueError, RuntimeError) as exc:
            ok = False
            lines.append("mutation-equivalence k=%d: FAIL (%s)" % (k + 1, exc))
            failed = True
            continue
        lines.append("mutation-equivalence k=%d: %s" % (k + 1, "pass" if ok else "FAIL"))
        failed |= not ok

    ok, word = sign_coherence_check(fixed, seed, depth)
    lines.append("sign-coherence depth=%d: %s" % (
        depth, "pass" if ok else "FAIL at word %s" % (",".join(str(k + 1) for k in word))))
    failed |= not ok

    words = [()]
    frontier = [()]
    for _ in range(min(depth, 4)):
        nxt = []
        for w in frontier:
            for k in fixed.unfrozen:
                if w and w[-1] == k:
                    continue
                nxt.append(w + (k,))
        words.extend(nxt)
        frontier = nxt
    ok = True
    bad = None
    for w in words:
        state = ClusterState(fixed, seed)
        try:
            for k in w:
                state = mutate_cluster(state, k)
        except ValueError:
            ok, bad = False, w
            break
        if not all(laurent_check(e, state.xs) for e in state.exprs):
            ok, bad = False, w
            break
    lines.append("laurent: %s" % (
        "pass" if ok else "FAIL at word %s" % (",".join(str(k + 1) for k in bad))))
    failed |= not ok

    _emit("\n".join(lines) + "\n", out)
    if failed:
        raise CliError("verification failed", 4)


@main.command()
@click.argument("seed_file", type=click.Path())
@click.option("--out", default=None, type=click.Path())
def companions(seed_file, out):
    """Print the left/right companion and Langlands dual data."""
    _, fixed, seed = _load_seed(seed_file)
    blocks = []
    for name, builder in (("left", left_companion), ("right", right_companion),
                          ("langlands", langlands_dual)):
        try:
            f2, s2 = builder(fixed, seed)
        except ValueError as exc:
            blocks.append("%s: unavailable (%s)" % (name, exc))
            continue
        blocks.append("%s:\n%s" % (name, serialize_seed_file(f2, s2).rstrip("\n")))
    _emit("\n".join(blocks) + "\n", out)


if __name__ == "__main__":
    main()
