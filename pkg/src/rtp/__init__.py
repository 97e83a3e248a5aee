"""Restricted tensor products of finite-dimensional C*-algebras, Hilbert
C*-modules and C*-correspondences, verified numerically at finite truncation
levels, with a finite-group parabolic-induction instantiation."""

from .errors import (IncompatibilityError, LevelError, NotAdjointableError,
                     PreconditionError, RtpError, ValidationError)
from .report import SCHEMA, VerificationReport
from .cstar import (AlgElement, BlockAlgebra, StarHom, TensorAlgebra,
                    embed_corner, identity_hom, irreps_of, make_algebra,
                    rank_at_most_one, star_hom_defect, validate_star_hom)
from .modules import (Correspondence, HModule, InducedSpace, ModOperator,
                      adjoint, canonical_module, compact_basis,
                      correspondence_defect, exterior_tensor, interior_tensor,
                      module_norm, module_op_norm, rank_one, standard_module,
                      validate_module)
from .limits import (AlgebraFamily, CorrFamily, HilbertFamily, LevelAlgebra,
                     LevelModule, ModuleFamily, check_direct_limit_identity,
                     coherence_check, coherence_sufficient_check,
                     commutant_dim, compacts_iso_check, connecting_alg_hom,
                     connecting_map, connecting_module_matrix,
                     factorize_irrep, induction_commutes_check,
                     left_action_level, left_action_square_defect,
                     level_algebra, level_indices, level_module,
                     level_operator, level_representation, typeI_check,
                     validate_algebra_family, validate_corr_family,
                     validate_module_family)
from .families import (block_irreps_with_vectors, counterexample_family,
                       random_corr_family, random_module_family)
from .groups import (FiniteGroup, GroupAlgebraElement, GroupCStar, Rep,
                     RegularEmbedding, Subgroup, convolve, decompose_rep,
                     delta, direct_product, double_cosets,
                     frobenius_induced_character, gelfand_check,
                     group_from_table, hecke, induce, invariant_subspace,
                     proj_pK, regular_rep, regular_rep_embed,
                     regular_rep_matrix, restrict_rep, star,
                     subgroup_as_group, subgroup_generate, trivial_rep)
from .parabolic import (AdelicFamily, LocalCorrespondence, ParabolicDatum,
                        adelic_family, asspar_check, build_EGN, build_datum,
                        delta_modular, distinguished_vector, gl2_group,
                        global_induction_check, induced_rep_from_module,
                        local_induction_check)
from . import io

__version__ = "0.1.0"
