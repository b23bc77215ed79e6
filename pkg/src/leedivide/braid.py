"""Braid words to PD diagrams (trace closures).

A braid word is a list of nonzero integers; letter +i crosses the
strand in position i+1 over the strand in position i (all strands
oriented the same way), so positive words close up to positive
diagrams.  Untouched strands become free loops.
"""

from .diagram import LinkDiagram
from .errors import PDParseError


def braid_closure(word, strands=None):
    if strands is None:
        strands = max((abs(x) for x in word), default=0) + 1
    if strands < 1 or any(x == 0 or abs(x) >= strands for x in word):
        raise PDParseError(f"invalid braid word {word} on {strands} strands")
    current = list(range(1, strands + 1))
    nxt = strands + 1
    crossings = []
    over_in = []
    for x in word:
        idx = abs(x) - 1
        left, right = current[idx], current[idx + 1]
        u_out, o_out = nxt, nxt + 1
        nxt += 2
        if x > 0:
            crossings.append((left, o_out, u_out, right))
            over_in.append(3)
            current[idx], current[idx + 1] = o_out, u_out
        else:
            crossings.append((right, left, u_out, o_out))
            over_in.append(1)
            current[idx], current[idx + 1] = u_out, o_out
    loops = 0
    relabel = {}
    for p in range(strands):
        final, init = current[p], p + 1
        if final == init:
            loops += 1
        else:
            relabel[final] = init
    crossings = [tuple(relabel.get(a, a) for a in x) for x in crossings]
    if not crossings:
        return LinkDiagram((), (), loops)
    return LinkDiagram(crossings, over_in, loops)


def torus_word(p, q):
    """Braid word whose closure is the (p, q) torus link."""
    return list(range(1, p)) * q
