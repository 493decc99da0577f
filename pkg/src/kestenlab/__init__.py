"""kestenlab: a computational lab for pressure, group extensions of
topological Markov chains, and amenability diagnostics (return-weight decay,
Kesten walks, co-growth, Folner certificates)."""

from .errors import (BackendMismatch, BallTooLarge, ConfigError,
                     ConnectorNotFound, EmptyWordSet, FolnerStageFailed,
                     InadmissibleContext, InadmissibleWord, InvalidInvolution,
                     InvolutionMissing, KestenLabError, NegativeInput,
                     NoConvergence, NotMixing, NotSquare, NotSymmetric,
                     TruncationDominates, ZeroRow)
from .sft import (BipReport, Involution, Shift, Word, check_bip, dagger_word,
                  enumerate_words, full_shift, validate_involution,
                  validate_shift)
from .groups import (FiniteGroup, FreeGroup, Group, GroupElement,
                     Homomorphism, LamplighterGroup, QuotientGroup, ZdGroup,
                     apply_hom, axiom_spot_check, ball, cyclic_group)
from .potentials import (ConformalReport, GibbsMeasure, Potential,
                         PressureEstimate, TransferMatrix, VariationReport,
                         birkhoff_log_weight, conformal_check,
                         constant_potential, gibbs_cylinder_measure,
                         leading_eigen, normalize, partition_function,
                         pressure_estimate, state_length, symmetry_defects,
                         transfer_matrix, validate_potential,
                         variation_constants)
from .extension import (Cocycle, ConnectorReport, ExtensionSystem,
                        ReturnSeries, SeriesFits, Verdict,
                        amenability_verdict, extension_partition_function,
                        extension_partition_spectrum, fit_series, hnorm_1,
                        lambda_k, psi_distribution, psi_n,
                        return_weight_series, trivial_connectors)
from .amenability import (FolnerCertificate, FolnerResult, KestenWalk,
                          SpectralRadiusEstimate, build_kesten_walk,
                          cogrowth_brute, cogrowth_series, default_xi_word,
                          folner_defect, folner_search, folner_sequence,
                          self_adjoint_check, spectral_radius_estimate,
                          walk_from_measure)

__version__ = "0.1.0"
