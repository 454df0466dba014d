"""Decorated multigraphs over a bigraded generator set.

A graph of degree (u, l) has u external output slots ``up:1..u``, l external
input slots ``low:1..l``, a list of typed vertices, and a total wiring map
from output slots to input slots.  Every external up slot and every native
vertex input slot receives exactly one edge; star slots absorb any number.
External low slots never wire directly to external up slots.

Slots are pairs: ``('l', k)`` / ``('u', k)`` for externals, ``(v, j)`` for
vertex slots where ``v`` is the vertex index, ``j >= 1`` a native slot and
``j == 0`` the star slot of ``v``.

Canonical forms minimise a deterministic serialisation over all vertex
relabelings combined with the declared per-generator slot symmetries, so two
graphs get the same canonical key iff they are isomorphic in the
symmetry-aware (quotient) sense, with external labels and pairings preserved.
The number of search elements hitting the minimum is the order of the
automorphism group, which doubles as the symmetry factor of tree symbols.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class StructureError(ValueError):
    """Malformed wiring: a slot has the wrong number of incoming edges."""


class DegreeError(ValueError):
    """An operation received operands of incompatible degree."""


class PairingError(ValueError):
    """A pairing constraint is violated (odd block, overlap, missing pair)."""


def _perm_closure(perms, n):
    """Close a set of permutations of 1..n (1-based tuples) under composition."""
    ident = tuple(range(1, n + 1))
    group = {ident}
    frontier = [tuple(p) for p in perms]
    for p in frontier:
        if len(p) != n or sorted(p) != list(ident):
            raise ValueError(f"{p} is not a permutation of 1..{n}")
    while frontier:
        p = frontier.pop()
        if p in group:
            continue
        group.add(p)
        for q in list(group):
            for r in (tuple(p[q[i] - 1] for i in range(n)),
                      tuple(q[p[i] - 1] for i in range(n))):
                if r not in group:
                    frontier.append(r)
    return frozenset(group)


@dataclass(frozen=True)
class GeneratorType:
    """A generator with native input/output slots and optional slot symmetry.

    ``in_sym`` / ``out_sym`` list permutations (1-based tuples) under which
    the generator is declared invariant; the stored groups are closed under
    composition and always contain the identity.
    """

    name: str
    in_arity: int
    out_arity: int
    in_sym: frozenset = field(default=())
    out_sym: frozenset = field(default=())

    def __post_init__(self):
        ins = _perm_closure(self.in_sym or (), self.in_arity)
        outs = _perm_closure(self.out_sym or (), self.out_arity)
        object.__setattr__(self, "in_sym", ins)
        object.__setattr__(self, "out_sym", outs)
        group = tuple(itertools.product(sorted(ins), sorted(outs)))
        object.__setattr__(self, "_group", group)
        object.__setattr__(self, "_in_orb",
                           tuple(min(p[j] for p in ins) for j in range(self.in_arity)))
        object.__setattr__(self, "_out_orb",
                           tuple(min(p[j] for p in outs) for j in range(self.out_arity)))

    @property
    def slot_group(self):
        """All (in_perm, out_perm) pairs; the identity pair comes first."""
        return self._group

    def in_orbit(self, j):
        return self._in_orb[j - 1]

    def out_orbit(self, j):
        return self._out_orb[j - 1]

    def __repr__(self):
        return f"GeneratorType({self.name!r}, {self.in_arity}, {self.out_arity})"


def _check_wiring(u, l, types, wiring):
    out_slots = [("l", k) for k in range(1, l + 1)]
    for v, t in enumerate(types):
        out_slots.extend((v, j) for j in range(1, t.out_arity + 1))
    if sorted(wiring, key=repr) != sorted(out_slots, key=repr):
        raise StructureError("wiring domain does not match the output slot set")
    counts = {}
    for src, dst in wiring.items():
        counts[dst] = counts.get(dst, 0) + 1
        if src[0] == "l" and dst[0] == "u":
            raise StructureError(f"low:{src[1]} wired directly to up:{dst[1]}")
        if dst[0] == "u":
            if not (1 <= dst[1] <= u):
                raise StructureError(f"edge into nonexistent up:{dst[1]}")
        else:
            v, j = dst
            if not (isinstance(v, int) and 0 <= v < len(types)):
                raise StructureError(f"edge into nonexistent vertex {v!r}")
            if not (0 <= j <= types[v].in_arity):
                raise StructureError(f"edge into nonexistent slot {v}.in:{j}")
    for k in range(1, u + 1):
        c = counts.get(("u", k), 0)
        if c != 1:
            raise StructureError(f"up:{k} has {c} incoming edges, wants exactly 1")
    for v, t in enumerate(types):
        for j in range(1, t.in_arity + 1):
            c = counts.get((v, j), 0)
            if c != 1:
                raise StructureError(f"native slot {v}.in:{j} has {c} edges, wants 1")


def _norm_src(s):
    return (-1, s[1]) if s[0] == "l" else s


def _norm_dst(d):
    return (-1, d[1]) if d[0] == "u" else d


class XGraph:
    """Immutable decorated graph; hashes and compares by canonical form."""

    __slots__ = ("u", "l", "types", "wiring", "pairing", "_canon", "_aut", "_key")

    def __init__(self, u, l, types, wiring, pairing=()):
        wiring = dict(wiring)
        types = tuple(types)
        _check_wiring(u, l, types, wiring)
        pset = frozenset(frozenset(p) for p in pairing)
        seen = set()
        for p in pset:
            if len(p) != 2 or not all(isinstance(v, int) and 0 <= v < len(types) for v in p):
                raise PairingError(f"bad pair {set(p)}")
            if p & seen:
                raise PairingError("pairing blocks overlap")
            seen |= p
        self.u = u
        self.l = l
        self.types = types
        self.wiring = wiring
        self.pairing = pset
        self._canon = None
        self._aut = None
        self._key = None

    # -- basic structure ---------------------------------------------------

    @property
    def degree(self):
        return (self.u, self.l)

    @property
    def n_vertices(self):
        return len(self.types)

    def internal_edges(self):
        """Vertex output slots whose edge lands on a vertex slot."""
        return [s for s, d in self.wiring.items()
                if isinstance(s[0], int) and d[0] != "u"]

    def star_degree(self, v):
        return sum(1 for d in self.wiring.values() if d == (v, 0))

    def vertex_components(self, with_pairing=True):
        """Weakly connected components of the vertex set (pairing as edges)."""
        parent = list(range(self.n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for src, dst in self.wiring.items():
            if isinstance(src[0], int) and isinstance(dst[0], int):
                parent[find(src[0])] = find(dst[0])
        if with_pairing:
            for p in self.pairing:
                a, b = sorted(p)
                parent[find(a)] = find(b)
        comps = {}
        for v in range(self.n_vertices):
            comps.setdefault(find(v), []).append(v)
        return sorted(comps.values())

    def is_connected(self, with_pairing=False):
        return len(self.vertex_components(with_pairing=with_pairing)) <= 1

    def has_directed_cycle(self, merge_pairs=False):
        """Directed cycle among vertices; optionally identify paired vertices."""
        n = self.n_vertices
        rep = list(range(n))
        if merge_pairs:
            for p in self.pairing:
                a, b = sorted(p)
                rep[b] = a
        adj = {v: set() for v in range(n)}
        for src, dst in self.wiring.items():
            if isinstance(src[0], int) and isinstance(dst[0], int):
                adj[rep[src[0]]].add(rep[dst[0]])
        state = {}

        def visit(v):
            state[v] = 1
            for w in adj[v]:
                if state.get(w, 0) == 1:
                    return True
                if state.get(w, 0) == 0 and visit(w):
                    return True
            state[v] = 2
            return False

        return any(state.get(v, 0) == 0 and visit(v) for v in range(n))

    # -- canonicalisation --------------------------------------------------

    def _wl_colors(self):
        """Iterated refinement of isomorphism-invariant vertex colors."""
        n = self.n_vertices
        ext = [[] for _ in range(n)]
        for src, dst in self.wiring.items():
            if isinstance(src[0], int) and dst[0] == "u":
                ext[src[0]].append((0, dst[1], self.types[src[0]].out_orbit(src[1])))
            if src[0] == "l" and isinstance(dst[0], int):
                v, j = dst
                slot = 0 if j == 0 else self.types[v].in_orbit(j)
                ext[v].append((1, src[1], slot))
        colors = [(self.types[v].name, tuple(sorted(ext[v]))) for v in range(n)]
        for _ in range(n):
            nbrs = [[] for _ in range(n)]
            for src, dst in self.wiring.items():
                if isinstance(src[0], int) and isinstance(dst[0], int):
                    a, ja = src
                    b, jb = dst
                    oa = self.types[a].out_orbit(ja)
                    ob = 0 if jb == 0 else self.types[b].in_orbit(jb)
                    nbrs[a].append((0, oa, ob, colors[b]))
                    nbrs[b].append((1, ob, oa, colors[a]))
            for p in self.pairing:
                a, b = sorted(p)
                nbrs[a].append((2, 0, 0, colors[b]))
                nbrs[b].append((2, 0, 0, colors[a]))
            new = [(colors[v], tuple(sorted(nbrs[v], key=repr))) for v in range(n)]
            ranked = {c: i for i, c in enumerate(sorted(set(new), key=repr))}
            refined = [ranked[c] for c in new]
            if len(set(refined)) == len(set(colors)):
                return refined
            colors = refined
        return colors

    def _orderings(self, colors):
        classes = {}
        for v, c in enumerate(colors):
            classes.setdefault(c, []).append(v)
        blocks = [classes[c] for c in sorted(classes)]
        for parts in itertools.product(*(itertools.permutations(b) for b in blocks)):
            yield [v for part in parts for v in part]

    def _encode(self, order, choice):
        pos = {v: i for i, v in enumerate(order)}
        entries = []
        for src, dst in self.wiring.items():
            if src[0] == "l":
                s = (-1, src[1])
            else:
                v, j = src
                s = (pos[v], choice[v][1][j - 1])
            if dst[0] == "u":
                d = (-1, dst[1])
            elif dst[1] == 0:
                d = (pos[dst[0]], 0)
            else:
                v, j = dst
                d = (pos[v], choice[v][0][j - 1])
            entries.append((s, d))
        entries.sort()
        pairs = sorted(tuple(sorted(pos[v] for v in p)) for p in self.pairing)
        return (tuple(self.types[v].name for v in order), tuple(entries), tuple(pairs))

    def canonicalize(self):
        """Return (canonical graph, automorphism count)."""
        if self._canon is not None:
            return self._canon, self._aut
        colors = self._wl_colors()
        groups = [self.types[v].slot_group for v in range(self.n_vertices)]
        best = None
        best_data = None
        hits = 0
        for order in self._orderings(colors):
            for choice in itertools.product(*groups):
                enc = self._encode(order, choice)
                if best is None or enc < best:
                    best, best_data, hits = enc, (order, choice), 1
                elif enc == best:
                    hits += 1
        order, choice = best_data
        pos = {v: i for i, v in enumerate(order)}
        wiring = {}
        for src, dst in self.wiring.items():
            s = src if src[0] == "l" else (pos[src[0]], choice[src[0]][1][src[1] - 1])
            if dst[0] == "u":
                d = dst
            elif dst[1] == 0:
                d = (pos[dst[0]], 0)
            else:
                d = (pos[dst[0]], choice[dst[0]][0][dst[1] - 1])
            wiring[s] = d
        pairing = [tuple(sorted(pos[v] for v in p)) for p in self.pairing]
        g = XGraph(self.u, self.l, [self.types[v] for v in order], wiring, pairing)
        key = (self.u, self.l, best)
        g._canon, g._aut, g._key = g, hits, key
        self._canon, self._aut, self._key = g, hits, key
        return g, hits

    def canonical_key(self):
        if self._key is None:
            self.canonicalize()
        return self._key

    def aut_count(self):
        return self.canonicalize()[1]

    def __eq__(self, other):
        if not isinstance(other, XGraph):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        names = ",".join(t.name for t in self.types)
        return f"XGraph(({self.u},{self.l}) [{names}] {len(self.pairing)}p)"


def empty_graph():
    return XGraph(0, 0, (), {})


# -- text serialisation ----------------------------------------------------

def format_graph(g):
    lines = [f"xgraph u={g.u} l={g.l}"]
    for v, t in enumerate(g.types):
        lines.append(f"v {v} {t.name}")

    def slot_src(s):
        return f"low:{s[1]}" if s[0] == "l" else f"{s[0]}.out:{s[1]}"

    def slot_dst(d):
        if d[0] == "u":
            return f"up:{d[1]}"
        return f"{d[0]}.star" if d[1] == 0 else f"{d[0]}.in:{d[1]}"

    for src in sorted(g.wiring, key=_norm_src):
        lines.append(f"e {slot_src(src)} -> {slot_dst(g.wiring[src])}")
    for p in sorted(tuple(sorted(q)) for q in g.pairing):
        lines.append(f"pair {p[0]} {p[1]}")
    return "\n".join(lines)


class ParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _parse_src(tok, lineno):
    if tok.startswith("low:"):
        return ("l", int(tok[4:]))
    if ".out:" in tok:
        v, j = tok.split(".out:")
        return (int(v), int(j))
    raise ParseError(lineno, f"bad edge source {tok!r}")


def _parse_dst(tok, lineno):
    if tok.startswith("up:"):
        return ("u", int(tok[3:]))
    if tok.endswith(".star"):
        return (int(tok[:-5]), 0)
    if ".in:" in tok:
        v, j = tok.split(".in:")
        return (int(v), int(j))
    raise ParseError(lineno, f"bad edge target {tok!r}")


def parse_graph(text, generators, offset=0):
    """Parse one graph block; ``generators`` maps type names to GeneratorType.

    ``offset`` shifts reported line numbers (for blocks inside larger files).
    """
    u = l = None
    types = []
    wiring = {}
    pairing = []
    for i, raw in enumerate(text.strip().splitlines()):
        lineno = offset + i + 1
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "xgraph":
            try:
                kv = dict(p.split("=") for p in parts[1:])
                u, l = int(kv["u"]), int(kv["l"])
            except Exception:
                raise ParseError(lineno, "expected 'xgraph u=<U> l=<L>'")
        elif parts[0] == "v":
            if len(parts) != 3:
                raise ParseError(lineno, "expected 'v <id> <typename>'")
            vid, tname = int(parts[1]), parts[2]
            if vid != len(types):
                raise ParseError(lineno, f"vertex ids must be consecutive, got {vid}")
            if tname not in generators:
                raise ParseError(lineno, f"unknown generator type {tname!r}")
            types.append(generators[tname])
        elif parts[0] == "e":
            if len(parts) != 4 or parts[2] != "->":
                raise ParseError(lineno, "expected 'e <src> -> <dst>'")
            src = _parse_src(parts[1], lineno)
            dst = _parse_dst(parts[3], lineno)
            if src in wiring:
                raise ParseError(lineno, f"duplicate edge source {parts[1]}")
            wiring[src] = dst
        else:
            if parts[0] != "pair":
                raise ParseError(lineno, f"unknown directive {parts[0]!r}")
            if len(parts) != 3:
                raise ParseError(lineno, "expected 'pair <id> <id>'")
            pairing.append((int(parts[1]), int(parts[2])))
    if u is None:
        raise ParseError(offset + 1, "missing 'xgraph' header")
    try:
        return XGraph(u, l, types, wiring, pairing)
    except (StructureError, PairingError) as exc:
        raise ParseError(offset + 1, str(exc)) from exc
