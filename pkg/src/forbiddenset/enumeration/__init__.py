"""Forbidden-set construction without a closed form."""
from .cdv import CdvCurveFamily, cdv_curves, cdv_equation
from .cobweb import (
    CobwebResult,
    MonotonePoleMap,
    bijection_pole_map,
    cobweb_fs,
    cobweb_path,
    odd_power,
    power_pole_map,
    sinh_pole_map,
)
from .curves import forbidden_curves
from .grid import cell_centers, grid_classify
from .inverse import InverseOrbitTree, TreeNode, cdv_inverse, inverse_orbit, pole_roots, polynomial_preimages
from .words import (
    COMPLEX_MODE,
    REAL_MODE,
    SymbolicWord,
    evaluate_word,
    min_pairwise_distance,
    pole_hit_step,
    real_preimages_oracle,
    symbolic_words,
)
