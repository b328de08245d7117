"""Exact module theory over Euclidean domains: Smith forms, Hom and Ext,
Mittag-Leffler towers, and projectivity of direct limits of free modules."""

__version__ = "0.1.0"

from .rings import INTEGERS, PolyGF, ring_from_tag  # noqa: E402
from .linalg import Mat, snf, solve_linear, kernel_basis  # noqa: E402
from .modules import FPModule, ModuleMap, Submodule, direct_sum  # noqa: E402
from .homological import ext1, hom_module, is_pure_submodule, pure_intersection_check, finite_mu_check  # noqa: E402
from .towers import Tower, ml_check, lim_and_lim1, lifting_harness  # noqa: E402
from .dirsys import DirectSystem, Presentation, projectivity_test, ext1_colim, jensen_system  # noqa: E402
from .baer import baer_criterion, baer_projectivity_consistency, torsion_family  # noqa: E402

__all__ = [
    "INTEGERS", "PolyGF", "ring_from_tag", "Mat", "snf", "solve_linear", "kernel_basis",
    "FPModule", "ModuleMap", "Submodule", "direct_sum", "ext1", "hom_module", "is_pure_submodule",
    "pure_intersection_check", "finite_mu_check", "Tower", "ml_check", "lim_and_lim1",
    "lifting_harness", "DirectSystem", "Presentation", "projectivity_test", "ext1_colim",
    "jensen_system", "baer_criterion", "baer_projectivity_consistency", "torsion_family",
]
