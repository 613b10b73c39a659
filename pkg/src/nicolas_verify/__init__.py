"""Numerical checks of the Nicolas inequality over primorials, in log space."""
from .accumulate import CompensatedSum, ThetaMertensState, extend
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .constants import EXP_NEG_GAMMA, GAMMA
from .errors import (
    BracketError,
    CheckpointError,
    ConvergenceError,
    CorruptCheckpoint,
    DomainError,
    IndexGapError,
    NicolasVerifyError,
    SieveExhausted,
    VersionMismatch,
)
from .functions import (
    FSolveResult,
    QValue,
    b_of,
    f_of,
    h_of,
    iterate_f,
    q_from_state,
    recurrence_rhs_literal,
    recurrence_rhs_simplified,
)
from .sieve import PrimeBlock, SieveConfig, SieveCursor, iter_blocks, next_block
from .verifier import (
    GapComparison,
    NicolasRecord,
    NicolasSweep,
    RecurrenceResidual,
    ResidualSample,
    gym_crossover_search,
    lemma_residuals,
    nicolas_sweep,
    pnt_ratio_sweep,
    recurrence_check_sweep,
    synth_gap_compare,
)

__version__ = "0.1.0"
