"""Energy-efficient SSK-family modulation: alphabet design, Huffman mapping and link simulation."""

__version__ = "0.1.0"

from .analysis import PepInputs, SerEstimate, pep_chernoff, pep_exact, qfunc, symbol_error_estimate
from .constellation import (Alphabet, BinarySymbol, CodePartition, alphabet_from_priors, build_code_dmin,
                            build_gssk, build_hssk, build_ssk, choose_gssk_nt, enumerate_weight_class,
                            min_distance)
from .design import DesignProblem, DesignSolution, optimum_locus, solve
from .errors import (BudgetExceededError, DegenerateAlphabetError, DimensionMismatchError, DomainError, EEHSSKError,
                     InvalidCodeError, MonotonicityError, NonConvergenceError, RateInfeasibleError,
                     UnknownSymbolError)
from .framing import FramePlan, FrameVerdict, frame_to_symbols, run_arq, symbols_to_frame
from .huffman import PrefixCodebook, achieved_stats, bits_to_symbols, build_codebook, symbols_to_bits
from .link import LinkConfig, detect_map, eb_from_es, es_from_eb
from .montecarlo import SimPoint, SimResult, SimSpec, build_scheme, qam_baseline, run_link_sim, run_power_rate_sweep
