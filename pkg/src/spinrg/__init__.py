"""Block renormalization group methods for spin-1/2 chains."""

__version__ = "1.0.0"

from .analysis import (DiscrepancyReport, FitResult, chi_squared,
                       epsilon_delta_h, fit_exponential)
from .core import (DenseCapExceededError, DimensionMismatchError, EvolveConfig,
                   KrylovConvergenceError, OperatorSum, PauliTerm, StateVector,
                   all_up_state, apply_operator, basis_state, dense_matrix,
                   evolve, expectation, neel_state, partial_trace_prefix)
from .embedding import (EmbeddingMap, TruncatedState, TruncatedToZeroError,
                        apply_T, apply_Tdagger, project_observable)
from .heisenberg_rg import (BoundaryFactorReport, HeisenbergRGResult,
                            build_embedding_heisenberg, renormalize_heisenberg,
                            rg_factors, verify_boundary_factors)
from .ising_rg import (DegenerateBlockError, RGResult, block_eigensystem,
                       build_embedding_ising, renormalize_ising)
from .models import (HeisenbergCouplings, IsingCouplings, build_heisenberg,
                     build_ising)
from .observables import (ComparisonResult, ObservableRequest, TimeGrid,
                          TimeSeries, correlation, entanglement_entropy,
                          initial_state, magnetization, run_comparison,
                          run_observable_series)
