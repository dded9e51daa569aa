"""Finite truncations of the infinite example digraphs and of Cayley digraphs.

Every family builds a ``BallRealization`` for a size parameter ``n``.  Vertex
labels are stable across sizes (``"x3"``, ``"y2"``, ...), so a label names the
same vertex in every truncation.  Anti-ray positions count backwards from the
anti-ray's last vertex: position ``i`` of an anti-ray is its point ``-i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .core import Digraph
from .rewriting import (DEFAULT_BUDGET, Presentation, builtin_presentation,
                        parse_presentation)


@dataclass(frozen=True)
class RaySpec:
    """A designated ray or anti-ray, given position by position."""

    name: str
    kind: str  # "ray" or "anti-ray"
    label_at: Callable[[int], str]
    geodesic: bool = True
    symbol: str = ""

    def labels(self, count: int) -> list[str]:
        return [self.label_at(i) for i in range(count)]

    def indices(self, real: "BallRealization", limit: int | None = None) -> list[int]:
        """Vertex indices of positions 0, 1, ... present in the truncation."""
        out = []
        i = 0
        while limit is None or i <= limit:
            lab = self.label_at(i)
            if not real.digraph.has_label(lab):
                break
            out.append(real.digraph.index(lab))
            i += 1
        return out

    def segment(self, real: "BallRealization", i: int, j: int) -> list[int]:
        """Walk order of positions i..j (forward for rays, backward for anti-rays)."""
        idx = [real.digraph.index(self.label_at(k)) for k in range(i, j + 1)]
        return idx if self.kind == "ray" else idx[::-1]


@dataclass
class BallRealization:
    digraph: Digraph
    radius: int
    stable_core: int
    family: str = ""
    params: dict = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.digraph.labels

    def vertex(self, label: str) -> int:
        return self.digraph.index(label)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in CATALOG:
            raise KeyError(f"unknown family {self.name!r}; known: {sorted(CATALOG)}")


class _Builder:
    """Collects labelled vertices and edges, then freezes into a Digraph."""

    def __init__(self):
        self.labels: list[str] = []
        self.pos: dict[str, int] = {}
        self.edges: list[tuple[int, int]] = []

    def v(self, label: str) -> int:
        if label not in self.pos:
            self.pos[label] = len(self.labels)
            self.labels.append(label)
        return self.pos[label]

    def e(self, a: str, b: str, times: int = 1) -> None:
        u, w = self.v(a), self.v(b)
        self.edges.extend([(u, w)] * times)

    def build(self) -> Digraph:
        return Digraph(len(self.labels), self.edges, self.labels)


# ---------------------------------------------------------------------------
# line families


def _nat_line(n, **_):
    b = _Builder()
    b.v("x0")
    for i in range(n):
        b.e(f"x{i}", f"x{i + 1}")
    return b.build(), n


def _nat_rays(**_):
    return [RaySpec("x-ray", "ray", lambda i: f"x{i}", symbol="omega")]


def _int_line(n, **_):
    b = _Builder()
    for i in range(-n, n + 1):
        b.v(f"x{i}")
    for i in range(-n, n):
        b.e(f"x{i}", f"x{i + 1}")
    return b.build(), n


def _int_rays(**_):
    return [RaySpec("x-ray", "ray", lambda i: f"x{i}", symbol="omega"),
            RaySpec("x-anti-ray", "anti-ray", lambda i: f"x{-i}", symbol="eta")]


# ---------------------------------------------------------------------------
# ladder with rungs x_i -> y_i (rungs start at i = 1 plus the extra x_0 -> y_1)


def _ex6_2(n, **_):
    b = _Builder()
    b.v("x0")
    for i in range(n):
        b.e(f"x{i}", f"x{i + 1}")
    for i in range(1, n):
        b.e(f"y{i}", f"y{i + 1}")
    if n >= 1:
        b.e("x0", "y1")
    for i in range(1, n + 1):
        b.e(f"x{i}", f"y{i}")
    return b.build(), n


def _ex6_2_rays(**_):
    return [RaySpec("x-ray", "ray", lambda i: f"x{i}", symbol="xi"),
            RaySpec("y-ray", "ray", lambda i: f"y{i + 1}", symbol="upsilon")]


# ---------------------------------------------------------------------------
# two sequences joined by single edges, with ever longer connecting paths


def _ex7_4(n, **_):
    b = _Builder()
    for i in range(n + 1):
        b.v(f"x{i}")
    for i in range(n + 1):
        b.v(f"y{i}")
    for i in range(n + 1):
        b.e(f"x{i}", f"y{i}")
    for i in range(n):
        # x_{i+1} -> x_i and y_i -> y_{i+1}, both of length i + 1
        xs = [f"x{i + 1}"] + [f"px{i}_{j}" for j in range(1, i + 1)] + [f"x{i}"]
        ys = [f"y{i}"] + [f"py{i}_{j}" for j in range(1, i + 1)] + [f"y{i + 1}"]
        for a, c in zip(xs, xs[1:]):
            b.e(a, c)
        for a, c in zip(ys, ys[1:]):
            b.e(a, c)
    return b.build(), n


def _ex7_4_anti_label(i: int) -> str:
    # positions along ... x_2 px1_1 x_1 x_0, counted from x_0
    if i == 0:
        return "x0"
    pos = 0
    k = 0
    while True:
        # block between x_k and x_{k+1} holds k interior vertices then x_{k+1}
        block = k + 1
        if i <= pos + block:
            off = i - pos
            if off == block:
                return f"x{k + 1}"
            return f"px{k}_{k + 1 - off}"
        pos += block
        k += 1


def _ex7_4_ray_label(i: int) -> str:
    if i == 0:
        return "y0"
    pos = 0
    k = 0
    while True:
        block = k + 1
        if i <= pos + block:
            off = i - pos
            if off == block:
                return f"y{k + 1}"
            return f"py{k}_{off}"
        pos += block
        k += 1


def _ex7_4_rays(**_):
    return [RaySpec("x-anti-ray", "anti-ray", _ex7_4_anti_label, symbol="R1"),
            RaySpec("y-ray", "ray", _ex7_4_ray_label, symbol="R2")]


# ---------------------------------------------------------------------------
# the two-point boundary example with the w_i bridges


def _ex12_2(n, **_):
    b = _Builder()
    for i in range(n + 1):
        for s in "uvwxy":
            b.v(f"{s}{i}")
    for i in range(n + 1):
        b.e(f"u{i}", f"v{i}")
        b.e(f"v{i}", f"w{i}")
        b.e(f"w{i}", f"x{i}")
        b.e(f"x{i}", f"y{i}")
    for i in range(n):
        b.e(f"v{i}", f"v{i + 1}")
        b.e(f"x{i + 1}", f"x{i}")
    return b.build(), n


def _ex12_2_rays(**_):
    return [RaySpec("v-ray", "ray", lambda i: f"v{i}", symbol="eta"),
            RaySpec("x-anti-ray", "anti-ray", lambda i: f"x{i}", symbol="mu")]


# ---------------------------------------------------------------------------
# 3-regular tree around an oriented double ray


def _ex13_4(n, **_):
    """Ball of tree radius n around x0.

    Ray vertices are ``x{i}``.  The off-ray neighbour of ``x{i}`` is ``h{i}``
    and its descendants append binary digits, e.g. ``h2.01``.
    """
    b = _Builder()
    for i in range(-n, n + 1):
        b.v(f"x{i}")
    for i in range(-n, n):
        b.e(f"x{i}", f"x{i + 1}")
    for i in range(-n, n + 1):
        room = n - abs(i)
        if room < 1:
            continue
        root = f"h{i}"
        b.e(f"x{i}", root)
        frontier = [root]
        for _depth in range(1, room):
            nxt = []
            for t in frontier:
                for digit in "01":
                    child = f"{t}{'.' if t == root else ''}{digit}"
                    b.e(t, child)
                    b.e(child, t)
                    nxt.append(child)
            frontier = nxt
    return b.build(), n


def _ex13_4_rays(**_):
    return [RaySpec("x-ray", "ray", lambda i: f"x{i}", symbol="omega"),
            RaySpec("x-anti-ray", "anti-ray", lambda i: f"x{-i}", symbol="alpha")]


# ---------------------------------------------------------------------------
# one ray feeding two anti-rays


def _ex14_2(n, **_):
    b = _Builder()
    for i in range(n + 1):
        b.v(f"x{i}")
    for i in range(n + 1):
        b.v(f"y{i}")
        b.v(f"z{i}")
    for i in range(n):
        b.e(f"x{i}", f"x{i + 1}")
        b.e(f"y{i + 1}", f"y{i}")
        b.e(f"z{i + 1}", f"z{i}")
    for i in range(n + 1):
        b.e(f"x{i}", f"y{i}")
        b.e(f"x{i}", f"z{i}")
    return b.build(), n


def _ex14_2_rays(**_):
    return [RaySpec("x-ray", "ray", lambda i: f"x{i}", symbol="omega"),
            RaySpec("y-anti-ray", "anti-ray", lambda i: f"y{i}", symbol="eta"),
            RaySpec("z-anti-ray", "anti-ray", lambda i: f"z{i}", symbol="mu")]


# ---------------------------------------------------------------------------
# Cayley digraphs


def cayley_ball(p: Presentation, generating_set: Sequence[str] | None, n: int,
                budget: int = DEFAULT_BUDGET) -> BallRealization:
    """Elements of word length <= n with arcs x -> x a for each generator word a.

    A monoid ball grows from the identity; a semigroup ball grows from the
    generators themselves (their word length is 1).
    """
    gens = list(generating_set) if generating_set else list(p.generators)
    gen_words = [p.normal_form(p.parse_word(g), budget) for g in gens]
    order: list[tuple[int, ...]] = []
    depth: dict[tuple[int, ...], int] = {}
    if p.kind == "monoid":
        start = [()]
        depth[()] = 0
        order.append(())
        frontier = start
        level = 0
    else:
        frontier = []
        for w in gen_words:
            if w not in depth:
                depth[w] = 1
                order.append(w)
                frontier.append(w)
        level = 1
    while level < n and frontier:
        nxt = []
        for x in frontier:
            for g in gen_words:
                y = p.multiply(x, g, budget)
                if y not in depth:
                    depth[y] = level + 1
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
        level += 1
    pos = {w: i for i, w in enumerate(order)}
    edges = []
    for x in order:
        for g in gen_words:
            y = p.multiply(x, g, budget)
            if y in pos:
                edges.append((pos[x], pos[y]))
    D = Digraph(len(order), edges, [p.show(w) for w in order])
    return BallRealization(D, n, max(n - 1, 0), "cayley",
                           {"generators": gens, "kind": p.kind})


def cayley_table_digraph(table: Sequence[Sequence[int]], generators: Sequence[int],
                         names: Sequence[str] | None = None) -> BallRealization:
    """Cayley digraph of a finite semigroup given by its multiplication table."""
    k = len(table)
    if any(len(row) != k for row in table):
        raise ValueError("multiplication table must be square")
    names = list(names) if names else [f"s{i}" for i in range(k)]
    edges = [(x, table[x][g]) for x in range(k) for g in generators]
    return BallRealization(Digraph(k, edges, names), k, k, "cayley_table",
                           {"generators": list(generators)})


def _resolve_presentation(params) -> Presentation:
    pres = params.get("presentation", "ex16_5")
    if isinstance(pres, Presentation):
        return pres
    text = str(pres)
    if "\n" in text or "->" in text:
        return parse_presentation(text, params.get("kind"))
    p = builtin_presentation(text)
    if params.get("kind"):
        p = Presentation(p.generators, p.rules, params["kind"])
    return p


def _gens_param(params):
    gs = params.get("generators")
    if gs is None:
        return None
    if isinstance(gs, str):
        return [g for g in gs.replace(",", " ").split() if g]
    return list(gs)


def _cayley(n, **params):
    p = _resolve_presentation(params)
    real = cayley_ball(p, _gens_param(params), n, int(params.get("budget", DEFAULT_BUDGET)))
    return real.digraph, real.stable_core


def _ex16_5(n, **params):
    real = cayley_ball(builtin_presentation("ex16_5"), _gens_param(params), n)
    return real.digraph, real.stable_core


def _ex16_5_rays(**_):
    # 1, a, a^2, ... and 1, a, ab, a^2 b, ... both lie in the single boundary point
    return [RaySpec("a-ray", "ray", lambda i: "1" if i == 0 else "a" * i, symbol="eta"),
            RaySpec("ab-ray", "ray", _ex16_5_zig, symbol="eta'")]


def _ex16_5_zig(i: int) -> str:
    if i == 0:
        return "1"
    return "a" * (i - 1) + "b"


def _free_monoid(n, k=2, **_):
    gens = " ".join("abcdefghijklmnopqrstuvwxyz"[: int(k)])
    real = cayley_ball(parse_presentation(gens + "\n"), None, n)
    return real.digraph, n


def _free_rays(k=2, **_):
    return [RaySpec("a-ray", "ray", lambda i: "1" if i == 0 else "a" * i, symbol="alpha")]


_Z3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


def _cayley_table(n, table=None, generators=None, **_):
    table = table or _Z3
    gens = generators if generators is not None else [1]
    if isinstance(gens, str):
        gens = [int(g) for g in gens.replace(",", " ").split()]
    real = cayley_table_digraph(table, gens)
    return real.digraph, real.stable_core


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class _Entry:
    build: Callable
    rays: Callable
    doc: str
    locally_finite: bool = True
    finitely_based: bool | None = None


CATALOG: dict[str, _Entry] = {
    "nat_line": _Entry(_nat_line, _nat_rays,
                       "directed path x0 -> x1 -> ... -> xn; stable core n"),
    "int_line": _Entry(_int_line, _int_rays,
                       "directed path x-n -> ... -> xn; stable core n"),
    "ex6_2": _Entry(_ex6_2, _ex6_2_rays,
                    "rays x0 x1 ... and y1 y2 ... with edges x0->y1 and xi->yi for i >= 1; "
                    "paths never decrease indices, so the stable core is n"),
    "ex7_4": _Entry(_ex7_4, _ex7_4_rays,
                    "edges xi->yi, a path x(i+1) -> xi of length i+1 through px{i}_{j}, "
                    "a path yi -> y(i+1) of length i+1 through py{i}_{j}; stable core n"),
    "ex12_2": _Entry(_ex12_2, _ex12_2_rays,
                     "edges ui->vi, vi->wi, wi->xi, xi->yi, vi->v(i+1), x(i+1)->xi; "
                     "stable core n"),
    "ex13_4_tree": _Entry(_ex13_4, _ex13_4_rays,
                          "3-regular tree ball of radius n around x0 of an oriented double ray; "
                          "ray edges forward, edges leaving the ray point away, the rest doubled; "
                          "the ball is convex so the stable core is n; has no finite base",
                          finitely_based=False),
    "ex14_2": _Entry(_ex14_2, _ex14_2_rays,
                     "ray x0 x1 ..., anti-rays ... y1 y0 and ... z1 z0, edges xi->yi, xi->zi; "
                     "x0 is a base; stable core n", finitely_based=True),
    "ex16_5": _Entry(_ex16_5, _ex16_5_rays,
                     "Cayley ball of <a,b | aa=bb, ab=ba> over {a,b}; stable core n-1"),
    "free_monoid": _Entry(_free_monoid, _free_rays,
                          "Cayley ball of the free monoid on k generators (param k, default 2); "
                          "a rooted out-tree"),
    "cayley": _Entry(_cayley, lambda **_: [],
                     "Cayley ball of a presentation (param presentation: built-in name or "
                     "file text; generators; kind); stable core n-1"),
    "cayley_table": _Entry(_cayley_table, lambda **_: [],
                           "Cayley digraph of a finite semigroup table (default Z/3, generator 1)"),
}


def list_families() -> dict[str, str]:
    return {name: entry.doc for name, entry in sorted(CATALOG.items())}


def _spec(f) -> FamilySpec:
    if isinstance(f, FamilySpec):
        return f
    return FamilySpec(str(f))


def realize(f: FamilySpec | str, n: int) -> BallRealization:
    f = _spec(f)
    if n < 1:
        raise ValueError("truncation size must be at least 1")
    entry = CATALOG[f.name]
    D, core = entry.build(n, **dict(f.params))
    return BallRealization(D, n, core, f.name, dict(f.params))


def rays(f: FamilySpec | str) -> list[RaySpec]:
    f = _spec(f)
    return list(CATALOG[f.name].rays(**dict(f.params)))


def family_info(f: FamilySpec | str) -> _Entry:
    return CATALOG[_spec(f).name]
