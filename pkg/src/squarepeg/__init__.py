"""squarepeg: inscribed squares of periodic curve pairs on the square torus.

The package splits into torus arithmetic (:mod:`~squarepeg.torus_geometry`),
curve representations and geometry (:mod:`~squarepeg.curves`), the square
solver (:mod:`~squarepeg.square_finder`), machine checks of the
straight-circle model (:mod:`~squarepeg.model_verifier`), the end-to-end
reduction (:mod:`~squarepeg.pipeline`), and a CLI (:mod:`~squarepeg.cli`).
"""

from .curves import (
    CurveFormatError,
    CurveInvariants,
    DisjointnessLost,
    EmbeddingLost,
    FourierCurve,
    MollifyResult,
    PolylineCurve,
    RescaledLoop,
    check_embedded,
    hamiltonian_height,
    load_curves,
    min_distance,
    mollify,
    rescale_to_torus,
    strip_halfwidth,
)
from .model_verifier import (
    LinearCircle,
    ModelData,
    build_model,
    double_cover_check,
    geometric_intersection_count,
    hf_dimension_linear,
    lemma_report,
    product_intersection_bound,
)
from .pipeline import (
    LiftInconsistent,
    NotConverged,
    PipelineConfig,
    PipelineReport,
    lift_square,
    run,
    select_scale,
)
from .square_finder import (
    BijectionViolated,
    NoSolutions,
    SolverConfig,
    SquareParams,
    SquareSolution,
    jacobian,
    residual,
    solve_all,
    to_intersection_point,
    verify_square_planar,
)
from .torus_geometry import (
    TangentPair,
    TorusPair,
    TorusPoint,
    covering_map,
    deck_transformations,
    difference_form,
    lift_near,
    reduce_point,
    square_completion,
    square_completion_inverse,
    torus_distance,
)

__version__ = "0.1.0"
