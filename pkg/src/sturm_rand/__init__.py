"""Random Sturm-Liouville operators: Prüfer eigenvalue solver, coupling sets
and Monte Carlo experiments on shared eigenvalues."""

__version__ = "0.1.0"

from .coupling import (CouplingSetResult, DiscretenessReport, Mismatch, coupling_mismatch,
                       coupling_roots, extract_boundary_angles, verify_discreteness,
                       wronskian_dependence)
from .distributions import DistributionSpec
from .errors import (DegenerateEigenfunctionError, DomainError, EmptyExperimentError,
                     IntegrationError, InvalidBumpError, ModelSchemaError, SearchBoundError,
                     SturmRandError)
from .experiments import (ComparisonSpec, ExperimentReport, TrialRecord, gap_statistics,
                          run_experiment, run_trial)
from .model import (DIRICHLET, NEUMANN, BasePotential, BoundaryAngle, BumpFunction, Interval,
                    OmegaSample, RandomPotentialModel, RegularProblem, anderson_model,
                    build_regular_problem, eval_potential)
from .prufer import (Eigenpair, PruferState, SpectrumWindow, count_eigenvalues_below,
                     eigenvalues_in_window, kth_eigenvalue, prufer_integrate, wronskian)
from .sampling import sample_one, sample_omega
