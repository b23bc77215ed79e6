"""Oriented link diagrams from PD codes.

Conventions (bit-exact; see README):

* A crossing ``X(a, b, c, d)`` lists the four incident arc ids
  counterclockwise starting at the incoming under-strand ``a``; the
  under-strand exits at ``c``.  The over-strand occupies positions 1 and
  3; its direction is inferred from global orientation consistency
  (every arc has exactly one head and one tail).  The crossing is
  positive iff the over-strand runs from position 3 to position 1.
* The 0-smoothing of any crossing joins positions 0-1 and 2-3; the
  1-smoothing joins 0-3 and 1-2.  Resolving positive crossings by 0 and
  negative ones by 1 is then the orientation-preserving smoothing.
* Crossingless unknot components cannot be expressed in PD and are
  tracked as a free-loop counter (``"U"``-terms of the text form).

Diagrams are immutable after construction; derived data is cached.
"""

import json
import re
from functools import cached_property

from .errors import BadArcError, NonPlanarError, OrientationError, PDParseError

ALPHA_COLOR = "a"
BETA_COLOR = "b"

_SMOOTH_PAIRS = {0: ((0, 1), (2, 3)), 1: ((1, 2), (3, 0))}


class _UF:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent
        if x not in p:
            p[x] = x
            return x
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the smaller representative for determinism
            if repr(ry) < repr(rx):
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self):
        out = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return out


class LinkDiagram:
    """An oriented link diagram: PD crossings plus a free-loop count."""

    def __init__(self, crossings, over_in, free_loops=0, validate=True):
        self.crossings = tuple(tuple(x) for x in crossings)
        self.over_in = tuple(over_in)
        self.free_loops = int(free_loops)
        if validate:
            self._validate()

    # -- construction --------------------------------------------------------

    def _validate(self):
        if len(self.crossings) != len(self.over_in):
            raise PDParseError("crossing/orientation length mismatch")
        if not self.crossings and self.free_loops == 0:
            raise PDParseError("empty diagram")
        count = {}
        for x in self.crossings:
            if len(x) != 4:
                raise PDParseError(f"crossing {x} does not have 4 arcs")
            for a in x:
                count[a] = count.get(a, 0) + 1
        bad = {a: k for a, k in count.items() if k != 2}
        if bad:
            raise PDParseError(f"arcs with multiplicity != 2: {bad}")
        for p in self.over_in:
            if p not in (1, 3):
                raise PDParseError("over_in positions must be 1 or 3")
        heads, tails = {}, {}
        for i, x in enumerate(self.crossings):
            for pos, arc in enumerate(x):
                if self._is_head(i, pos):
                    if arc in heads:
                        raise OrientationError(f"arc {arc} has two heads")
                    heads[arc] = (i, pos)
                else:
                    if arc in tails:
                        raise OrientationError(f"arc {arc} has two tails")
                    tails[arc] = (i, pos)
        if set(heads) != set(tails):
            raise OrientationError("arcs missing a head or a tail")
        self._euler_check()

    def _is_head(self, i, pos):
        return pos == 0 or pos == self.over_in[i]

    def _euler_check(self):
        if not self.crossings:
            return
        comp = _UF()
        for i, x in enumerate(self.crossings):
            for arc in x:
                comp.union(("c", i), ("arc", arc))
        faces = self.region_classes(None)
        counts = {}
        for key, members in faces.items():
            arc = members[0][0]
            root = comp.find(("arc", arc))
            counts[root] = counts.get(root, 0) + 1
        for root, nfaces in counts.items():
            crossings_here = sum(
                1 for i in range(self.n) if comp.find(("c", i)) == root)
            arcs_here = len({a for x in self.crossings for a in x
                             if comp.find(("arc", a)) == root})
            if crossings_here - arcs_here + nfaces != 2:
                raise NonPlanarError(
                    f"Euler check failed: V={crossings_here} E={arcs_here} F={nfaces}")

    # -- basic data -----------------------------------------------------------

    @property
    def n(self):
        return len(self.crossings)

    @cached_property
    def arcs(self):
        return sorted({a for x in self.crossings for a in x})

    @cached_property
    def head(self):
        out = {}
        for i, x in enumerate(self.crossings):
            for pos, arc in enumerate(x):
                if self._is_head(i, pos):
                    out[arc] = (i, pos)
        return out

    @cached_property
    def tail(self):
        out = {}
        for i, x in enumerate(self.crossings):
            for pos, arc in enumerate(x):
                if not self._is_head(i, pos):
                    out[arc] = (i, pos)
        return out

    @cached_property
    def signs(self):
        return tuple(1 if p == 3 else -1 for p in self.over_in)

    @property
    def n_pos(self):
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_neg(self):
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self):
        return self.n_pos - self.n_neg

    @cached_property
    def arc_components(self):
        """Arc-carrying link components, each a sorted tuple, by min arc."""
        uf = _UF()
        for x in self.crossings:
            uf.union(x[0], x[2])
            uf.union(x[1], x[3])
        comps = [tuple(sorted(v)) for v in uf.classes().values()]
        comps.sort(key=lambda c: c[0])
        return comps

    @property
    def n_components(self):
        return len(self.arc_components) + self.free_loops

    @cached_property
    def component_of_arc(self):
        return {a: k for k, comp in enumerate(self.arc_components) for a in comp}

    def next_arc(self, arc):
        """The arc following ``arc`` along its strand orientation."""
        i, pos = self.head[arc]
        out_pos = 2 if pos == 0 else (pos + 2) % 4
        return self.crossings[i][out_pos]

    # -- orientations ----------------------------------------------------------

    def orientations(self):
        """All 2**|D| component-flip sets, lexicographic in the bitmask."""
        k = self.n_components
        return [frozenset(j for j in range(k) if (m >> j) & 1)
                for m in range(1 << k)]

    def crossing_sign(self, i, orientation=frozenset()):
        s = self.signs[i]
        x = self.crossings[i]
        cu = self.component_of_arc[x[0]]
        co = self.component_of_arc[x[1]]
        if (cu in orientation) != (co in orientation):
            s = -s
        return s

    def writhe_for(self, orientation=frozenset()):
        return sum(self.crossing_sign(i, orientation) for i in range(self.n))

    def seifert_state(self, orientation=frozenset()):
        """Bit per crossing: 0 on positive, 1 on negative (w.r.t. orientation)."""
        return tuple(0 if self.crossing_sign(i, orientation) > 0 else 1
                     for i in range(self.n))

    # -- faces / regions ---------------------------------------------------------

    def region_classes(self, state=None):
        """Regions of the (optionally smoothed) diagram as classes of arc sides.

        Keys of the result are class representatives, values the lists of
        darts ``(arc, 'L'|'R')`` bounding the region; sides are taken with
        respect to the diagram's own orientation.  With ``state=None`` no
        crossing is smoothed and the classes are the faces of the
        4-valent map.
        """
        uf = _UF()
        for arc in self.arcs:
            uf.find((arc, "L"))
            uf.find((arc, "R"))
        for i, x in enumerate(self.crossings):
            quads = []
            for p in range(4):
                pn = (p + 1) % 4
                d1 = (x[p], "L" if not self._is_head(i, p) else "R")
                d2 = (x[pn], "R" if not self._is_head(i, pn) else "L")
                quads.append((p, d1, d2))
            if state is None:
                for _, d1, d2 in quads:
                    uf.union(d1, d2)
            else:
                pairs = _SMOOTH_PAIRS[state[i]]
                cut = {min(p) if (max(p) - min(p)) == 1 else 3 for p in pairs}
                for p, d1, d2 in quads:
                    uf.union(d1, d2)
                    if p not in cut:
                        uf.union(d1, ("chan", i))
        out = {}
        for root, members in uf.classes().items():
            darts = sorted(m for m in members if m[1] in ("L", "R"))
            if darts:
                out[uf.find(darts[0])] = darts
        return out

    def _region_lookup(self, state=None):
        classes = self.region_classes(state)
        where = {}
        for root, darts in classes.items():
            for d in darts:
                where[d] = root
        return classes, where

    # -- Seifert data ---------------------------------------------------------------

    def circles_of_state(self, state):
        """Arc partition of the fully smoothed diagram; loops ride along.

        Returns (circles, arc_to_index, r) where circles is a list of
        sorted arc tuples ordered by minimal arc; the free loops occupy
        indices len(circles)..r-1.
        """
        uf = _UF()
        for arc in self.arcs:
            uf.find(arc)
        for i, x in enumerate(self.crossings):
            for (p, q) in _SMOOTH_PAIRS[state[i]]:
                uf.union(x[p], x[q])
        circles = [tuple(sorted(v)) for v in uf.classes().values()]
        circles.sort(key=lambda c: c[0])
        arc_to = {a: k for k, c in enumerate(circles) for a in c}
        return circles, arc_to, len(circles) + self.free_loops

    def seifert(self, orientation=frozenset()):
        return SeifertData(self, orientation)

    # -- I/O ---------------------------------------------------------------------

    def to_pd_text(self):
        relabeled = self.canonical_relabel()
        parts = []
        if relabeled.crossings:
            inner = ",".join("X({},{},{},{})".format(*x) for x in relabeled.crossings)
            parts.append(f"PD[{inner}]")
        if relabeled.free_loops == 1:
            parts.append("U")
        elif relabeled.free_loops > 1:
            parts.append(f"U^{relabeled.free_loops}")
        text = " + ".join(parts)
        back = parse_pd(text)
        if back.crossings != relabeled.crossings or back.over_in != relabeled.over_in:
            raise OrientationError(
                "diagram orientation is not representable in PD text "
                "(fully-over component with non-canonical orientation)")
        return text

    def to_json(self, name=None):
        relabeled = self.canonical_relabel()
        obj = {"pd": [list(x) for x in relabeled.crossings],
               "loops": relabeled.free_loops}
        if name is not None:
            obj["name"] = name
        return obj

    def canonical_relabel(self):
        """Relabel arcs 1..2n increasing along each component (by min arc)."""
        mapping = {}
        nxt = 1
        for comp in self.arc_components:
            start = comp[0]
            arc = start
            while True:
                mapping[arc] = nxt
                nxt += 1
                arc = self.next_arc(arc)
                if arc == start:
                    break
        if len(mapping) != len(self.arcs):
            raise OrientationError("component traversal did not cover all arcs")
        crossings = [tuple(mapping[a] for a in x) for x in self.crossings]
        return LinkDiagram(crossings, self.over_in, self.free_loops, validate=False)

    def __repr__(self):
        return f"<LinkDiagram n={self.n} w={self.writhe} comps={self.n_components}>"


class SeifertData:
    """Orientation-preserving state, its circles and their coloring."""

    def __init__(self, diagram, orientation=frozenset()):
        self.diagram = diagram
        self.orientation = orientation
        self.state = diagram.seifert_state(orientation)
        self.circles, self.arc_to_circle, self.r = diagram.circles_of_state(self.state)
        self.colors = self._coloring()

    def _side(self, arc, side):
        """Side label of an arc w.r.t. self.orientation, as a geometric dart."""
        comp = self.diagram.component_of_arc[arc]
        if comp in self.orientation:
            side = "L" if side == "R" else "R"
        return (arc, side)

    def _coloring(self):
        D = self.diagram
        colors = []
        if D.crossings:
            classes, where = D._region_lookup(self.state)
            # 2-color region adjacency; seed: region at the lowest arc's
            # right side (geometric, orientation-independent) is white.
            color = {}
            comp_uf = _UF()
            for arc in D.arcs:
                comp_uf.union(("r", where[(arc, "L")]), ("r", where[(arc, "R")]))
            groups = {}
            for arc in D.arcs:
                root = comp_uf.find(("r", where[(arc, "L")]))
                groups.setdefault(root, []).append(arc)
            for root, arcs in sorted(groups.items(), key=lambda kv: min(kv[1])):
                seed_arc = min(arcs)
                stack = [(where[(seed_arc, "R")], False)]
                while stack:
                    region, black = stack.pop()
                    if region in color:
                        if color[region] != black:
                            raise NonPlanarError("region graph is not 2-colorable")
                        continue
                    color[region] = black
                    for arc in arcs:
                        for s1, s2 in (("L", "R"), ("R", "L")):
                            if where[(arc, s1)] == region:
                                stack.append((where[(arc, s2)], not black))
            for circle in self.circles:
                arc = circle[0]
                left = where[self._side(arc, "L")]
                colors.append(ALPHA_COLOR if color[left] else BETA_COLOR)
        loop_comp_base = len(D.arc_components)
        for k in range(D.free_loops):
            flipped = (loop_comp_base + k) in self.orientation
            colors.append(ALPHA_COLOR if flipped else BETA_COLOR)
        return tuple(colors)

    def circle_color(self, idx):
        return self.colors[idx]


# -- parsing -------------------------------------------------------------------


_X_RE = re.compile(r"[Xx]\s*[\(\[]\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*[\)\]]")
_U_RE = re.compile(r"^U(?:\^(\d+))?$")


def parse_pd(text):
    """Parse a PD expression like ``PD[X(1,4,2,5),...] + U^2`` or ``U``."""
    if not isinstance(text, str) or not text.strip():
        raise PDParseError("empty PD expression")
    loops = 0
    crossings = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise PDParseError("empty term in PD expression")
        m = _U_RE.match(chunk)
        if m:
            loops += int(m.group(1) or 1)
            continue
        if not re.match(r"^(PD)?\s*[\[\(]", chunk, re.IGNORECASE):
            raise PDParseError(f"unrecognized PD term {chunk!r}")
        body = chunk
        found = _X_RE.findall(body)
        stripped = _X_RE.sub("", body)
        if re.search(r"\d", stripped):
            raise PDParseError(f"could not parse all crossings in {chunk!r}")
        if not found:
            raise PDParseError(f"no crossings found in {chunk!r}")
        crossings.extend(tuple(int(v) for v in q) for q in found)
    if not crossings:
        if loops == 0:
            raise PDParseError("empty diagram")
        return LinkDiagram((), (), loops)
    over_in = _infer_over_directions(crossings)
    return LinkDiagram(crossings, over_in, loops)


def from_json(obj):
    """Build a diagram from ``{"pd": [[a,b,c,d],...], "loops": k}``."""
    crossings = [tuple(int(a) for a in x) for x in obj.get("pd", [])]
    loops = int(obj.get("loops", 0))
    if not crossings:
        if loops == 0:
            raise PDParseError("empty diagram")
        return LinkDiagram((), (), loops)
    return LinkDiagram(crossings, _infer_over_directions(crossings), loops)


def _infer_over_directions(crossings):
    """Head/tail roles for the over-strands: 1 or 3 per crossing.

    Under-strands fix roles at positions 0 and 2; consistency (one head,
    one tail per arc) propagates through the over-pairs.  Components that
    pass over at every crossing are oriented by convention: the lowest
    arc takes its head at its first-listed occurrence.
    """
    count = {}
    occs = {}
    for i, x in enumerate(crossings):
        for pos, arc in enumerate(x):
            count[arc] = count.get(arc, 0) + 1
            occs.setdefault(arc, []).append((i, pos))
    bad = {a: k for a, k in count.items() if k != 2}
    if bad:
        raise PDParseError(f"arcs with multiplicity != 2: {bad}")

    role = {}   # (crossing, pos) -> True if head

    def assign(occ, is_head):
        queue = [(occ, is_head)]
        while queue:
            (i, pos), h = queue.pop()
            if (i, pos) in role:
                if role[(i, pos)] != h:
                    raise OrientationError("inconsistent arc orientations")
                continue
            role[(i, pos)] = h
            arc = crossings[i][pos]
            for other in occs[arc]:
                if other != (i, pos):
                    queue.append((other, not h))
            if pos in (1, 3):
                partner = (i, 4 - pos)
                queue.append((partner, not h))

    for i, x in enumerate(crossings):
        assign((i, 0), True)
        assign((i, 2), False)

    for arc in sorted(occs):
        first = min(occs[arc])
        if first not in role:
            assign(first, True)

    over_in = []
    for i in range(len(crossings)):
        if role[(i, 1)] == role[(i, 3)]:
            raise OrientationError("over strand has two heads")
        over_in.append(1 if role[(i, 1)] else 3)
    return tuple(over_in)


# -- diagram algebra -------------------------------------------------------------


def mirror(diagram):
    """Swap every crossing's over/under strand; signs negate."""
    crossings = []
    over_in = []
    for x, s in zip(diagram.crossings, diagram.signs):
        a, b, c, d = x
        if s > 0:
            crossings.append((d, a, b, c))
            over_in.append(1)
        else:
            crossings.append((b, c, d, a))
            over_in.append(3)
    return LinkDiagram(crossings, over_in, diagram.free_loops)


def reverse(diagram):
    """Flip the orientation of every component; signs are preserved."""
    crossings = [(x[2], x[3], x[0], x[1]) for x in diagram.crossings]
    return LinkDiagram(crossings, diagram.over_in, diagram.free_loops)


def _shift(diagram, offset):
    crossings = [tuple(a + offset for a in x) for x in diagram.crossings]
    return crossings


def disjoint_union(d1, d2):
    offset = (max(d1.arcs) if d1.arcs else 0)
    crossings = list(d1.crossings) + _shift(d2, offset)
    over_in = d1.over_in + d2.over_in
    return LinkDiagram(crossings, over_in, d1.free_loops + d2.free_loops)


def connected_sum(d1, d2, arc1, arc2):
    """Join along arc1 of d1 and arc2 of d2 respecting orientations."""
    if arc1 not in d1.head:
        raise BadArcError(f"no arc {arc1} in first diagram")
    if arc2 not in d2.head:
        raise BadArcError(f"no arc {arc2} in second diagram")
    offset = max(d1.arcs)
    arc2s = arc2 + offset
    crossings = list(d1.crossings) + _shift(d2, offset)
    # arc1 keeps its tail and runs into arc2's head; arc2 keeps its tail
    # and runs into arc1's head.
    i1, p1 = d1.head[arc1]
    i2, p2 = d2.head[arc2]
    i2 += len(d1.crossings)
    x = list(crossings[i1])
    x[p1] = arc2s
    crossings[i1] = tuple(x)
    x = list(crossings[i2])
    x[p2] = arc1
    crossings[i2] = tuple(x)
    over_in = d1.over_in + d2.over_in
    return LinkDiagram(crossings, over_in, d1.free_loops + d2.free_loops)


def smooth_crossing(diagram, i):
    """Remove crossing i by its orientation-preserving smoothing."""
    if not (0 <= i < diagram.n):
        raise BadArcError(f"no crossing {i}")
    bit = 0 if diagram.signs[i] > 0 else 1
    x = diagram.crossings[i]
    uf = _UF()
    for arc in diagram.arcs:
        uf.find(arc)
    for (p, q) in _SMOOTH_PAIRS[bit]:
        uf.union(x[p], x[q])
    crossings = [diagram.crossings[j] for j in range(diagram.n) if j != i]
    over_in = [diagram.over_in[j] for j in range(diagram.n) if j != i]
    rep = {arc: min(cls) for root, cls in uf.classes().items() for arc in cls}
    crossings = [tuple(rep[a] for a in xx) for xx in crossings]
    used = {a for xx in crossings for a in xx}
    merged_classes = {min(cls) for cls in uf.classes().values() if len(cls) > 1 or cls[0] in x}
    new_loops = diagram.free_loops + sum(1 for a in merged_classes if a not in used)
    return LinkDiagram(crossings, over_in, new_loops)


def seifert_genus(diagram):
    """Genus of the Seifert surface from the orientation-preserving state."""
    sd = diagram.seifert()
    chi = sd.r - diagram.n
    twice_g = 2 - diagram.n_components - chi
    if twice_g % 2:
        raise ValueError("Euler characteristic parity violated")
    return twice_g // 2
