"""tmshift: Turing machines lowered to exact area-preserving Cantor-set maps.

The pipeline compiles a machine to a conjugated generalized shift, lowers
the shift to a piecewise-affine block map on the square Cantor set with
exact rational arithmetic, and certifies that the orbit of an encoded
input enters the halting region exactly when the machine halts (with a
prescribed output window in reader mode). A separate numerical module
realizes the disk suspension flow whose first-return map is the time-one
Hamiltonian map, and the viscous time-budget formula for the decaying
solution built on it.
"""

from .cantor import (
    BlockRegion,
    CantorBlock,
    CantorPoint,
    NotCantor,
    PiecewiseBlockMap,
    apply_blockmap,
    compile_blockmap,
    decode_point,
    encode_point,
    find_fixed_region_overlap,
    find_image_overlap,
    find_piece_image_overlap,
    halt_blocks,
    halt_region,
    image_blocks_disjoint,
    verify_blockmap,
)
from .gshift import (
    BiSequence,
    Conjugation,
    GeneralizedShift,
    NotInImage,
    apply,
    compile_tm,
    decode_config,
    demo_shift,
    encode_config,
    is_bijective,
    standard_shift,
)
from .harness import (
    ExperimentSpec,
    Verdict,
    ViscousBudget,
    build_experiment,
    run_orbit,
    trace_orbit,
    verify_equivalence,
    viscous_budget,
)
from .rational import RadixRational
from .suspension import (
    AngularBump,
    HamiltonianFamily,
    RadialBump,
    ReturnMapReport,
    SuspensionProblem,
    compare_return_map,
    estimate_c0,
    hamiltonian_vector_field,
    integrate_suspension,
    reeb_field,
)
from .tm import (
    Configuration,
    ReversibilityReport,
    RunResult,
    TuringMachine,
    check_reversible,
    extend_halting,
    make_reader,
    output_window,
    reader_latency,
    run,
    step,
)

__version__ = "0.1.0"
