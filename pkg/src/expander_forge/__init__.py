"""expander-forge: towers of (q+1)-regular Ramanujan graphs, machine-checked.

Builds Schreier graphs of PSL2/PGL2(Z/q2^n) over Cartan and Borel subgroups
(and the Cayley variant) from integer quaternion generators, with verified
regularity, spectra, girth, covering maps, and stabilizer-intersection
probes.
"""

from .errors import (
    ConvergenceError,
    GraphConstructionError,
    InvalidMorphismError,
    InvalidParameterError,
    InvalidWordError,
    LiftFailureError,
    NoSquareRootError,
    NotInvertibleError,
    SingularMatrixError,
    VerificationError,
    WordLengthError,
)
from .modarith import (
    PrimePower,
    hensel_lift_sqrt,
    is_prime,
    legendre,
    sqrt_minus_one,
    sqrt_mod_prime,
    unit_inverse,
)
from .multigraph import CoveringCheck, GraphMorphism, SerreGraph, girth, is_covering
from .projgroup import (
    Mat2,
    PairCoset,
    ProjPoint,
    coset_key,
    enumerate_p1,
    is_psl,
    matrix_inverse,
    mobius,
    proj_normalize,
    proj_point,
    reduce_matrix,
    reduce_pair,
    reduce_point,
)
from .quat import (
    FreeWord,
    GeneratorSet,
    Quaternion,
    enumerate_generators,
    evaluate_word,
    split,
)
from .spectra import (
    SpectralReport,
    adjacency,
    extreme_eigenvalues,
    full_spectrum_histogram,
    ramanujan_check,
)
from .tower import (
    CoveringMap,
    LoopWitness,
    ProbeResult,
    TorusPair,
    TowerConfig,
    TowerLevel,
    TowerResult,
    TwistSequence,
    build_level,
    build_tower,
    find_torus_pair,
    intersection_probe,
    loop_witness,
    lps_girth_floor,
    natural_covering,
    probe_with_reseed,
    twist_sequence,
)

__version__ = "0.1.0"
