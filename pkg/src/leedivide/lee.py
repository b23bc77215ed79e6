"""Canonical cycles built from colored orientation-preserving states.

Each alternative orientation o of a diagram D produces a colored state:
every Seifert circle (w.r.t. o) carries the color a = X - u or
b = X - v assigned by the checkerboard algorithm.  Expanding the colors
over the enhanced-state basis gives a cycle sitting at homological
degree |s_o| - n^-.
"""

from itertools import product

from .cube import L1, LX, ChainSlices
from .rings import QQ
from .diagram import ALPHA_COLOR


def colored_state_vector(slices, state_bits, colors):
    """Expand a colored state over the enhanced-state basis.

    colors is a sequence of 'a'/'b' per circle of the state (loops
    included).  Returns (degree, vector).
    """
    ring = slices.ring
    state = sum(b << j for j, b in enumerate(state_bits))
    weight = sum(state_bits)
    degree = weight - slices.n_neg
    _, index = slices.basis(degree)
    # a = X - u, b = X - v
    neg_u, neg_v = ring.neg(ring.u), ring.neg(ring.v)
    factors = []
    for col in colors:
        const = neg_u if col == ALPHA_COLOR else neg_v
        factors.append(((LX, ring.one), (L1, const)))
    vec = {}
    for choice in product(*factors):
        labels = tuple(l for l, _ in choice)
        coef = ring.one
        for _, c in choice:
            coef = ring.mul(coef, c)
        if coef != ring.zero:
            vec[index[(state, labels)]] = coef
    return degree, vec


def alpha_cycle(slices, orientation=frozenset(), swap_colors=False):
    """The colored-state cycle for one alternative orientation.

    Returns (degree, vector).  The coefficient of the all-X enhanced
    state is a unit by construction; this is asserted.
    """
    D = slices.diagram
    sd = D.seifert(orientation)
    colors = sd.colors
    if swap_colors:
        colors = tuple("b" if c == "a" else "a" for c in colors)
    degree, vec = colored_state_vector(slices, sd.state, colors)
    state = sum(b << j for j, b in enumerate(sd.state))
    _, index = slices.basis(degree)
    all_x = index[(state, tuple(LX for _ in range(sd.r)))]
    assert slices.ring.is_unit(vec[all_x]), "all-X coefficient must be a unit"
    return degree, vec


def beta_cycle(slices, orientation=frozenset(), swap_colors=False):
    """beta(D, o) = alpha(D, -o)."""
    D = slices.diagram
    full = frozenset(range(D.n_components))
    return alpha_cycle(slices, frozenset(full ^ orientation), swap_colors)


def lee_class_rank_check(diagram):
    """Rank of total homology over Q (c = 2 invertible) vs 2**|D|.

    Returns (ok, total_rank, expected); ok also requires the canonical
    classes to be linearly independent in homology.
    """
    from .homology import ChainComplex

    cx = ChainComplex(diagram, QQ)
    slices = cx.slices
    by_degree = {}
    for o in diagram.orientations():
        deg, vec = alpha_cycle(slices, o)
        by_degree.setdefault(deg, []).append(vec)
    total = 0
    independent = True
    for i in range(-diagram.n_neg, diagram.n_pos + 1):
        cycles = by_degree.get(i, [])
        pres = cx.presentation(i, cycles=cycles)
        total += pres.free_rank
        if cycles:
            from .linalg import SparseMatrix, column_echelon
            coords = SparseMatrix(QQ, pres.free_rank, len(cycles))
            for k in range(len(cycles)):
                for r, val in enumerate(pres.class_free_coords(k)):
                    if val != QQ.zero:
                        coords.set(r, k, val)
            pivots, _, _ = column_echelon(coords)
            if len(pivots) != len(cycles):
                independent = False
    expected = 2 ** diagram.n_components
    return (total == expected and independent), total, expected
