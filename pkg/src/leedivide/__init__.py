"""Exact deformed Khovanov/Lee homology and canonical-class divisibility."""

from .diagram import (LinkDiagram, parse_pd, from_json, mirror, reverse,
                      disjoint_union, connected_sum, smooth_crossing,
                      seifert_genus, ALPHA_COLOR, BETA_COLOR)
from .braid import braid_closure, torus_word
from .rings import get_ring, INFINITY, Z2, QH, QQ
from .cube import ChainSlices, frobenius_apply, MINUS_INFINITY
from .lee import alpha_cycle, beta_cycle, lee_class_rank_check
from .homology import ChainComplex, HomologyPresentation
from .linalg import SparseMatrix, smith_normal_form, column_echelon
from .invariant import (k_c, k_tilde, s_bar, invariant_report, InvariantReport,
                        zeta_generator, mirror_pairing, XEndomorphism)

__all__ = [
    "LinkDiagram", "parse_pd", "from_json", "mirror", "reverse",
    "disjoint_union", "connected_sum", "smooth_crossing", "seifert_genus",
    "ALPHA_COLOR", "BETA_COLOR", "braid_closure", "torus_word",
    "get_ring", "INFINITY", "Z2", "QH", "QQ",
    "ChainSlices", "frobenius_apply", "MINUS_INFINITY",
    "alpha_cycle", "beta_cycle", "lee_class_rank_check",
    "ChainComplex", "HomologyPresentation",
    "SparseMatrix", "smith_normal_form", "column_echelon",
    "k_c", "k_tilde", "s_bar", "invariant_report", "InvariantReport",
    "zeta_generator", "mirror_pairing", "XEndomorphism",
]

__version__ = "0.1.0"
