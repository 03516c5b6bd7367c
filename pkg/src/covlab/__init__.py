"""covlab: a desk-scale laboratory for covering numbers of symmetric
convex bodies and the duality between a body's metric entropy and its
polar's."""

from .geometry import (Ball, Body, BodyError, DegenerateBody,
                       DimensionMismatch, Ellipsoid, Intersect, Minkowski,
                       OracleTolerance, Polar, Scale, VPolytope,
                       body_from_json, body_to_json, circumradius_bound,
                       contains, gauge, intersect_with_ball, polar,
                       polar_polytope, support, support_refined)
from .covering import (BudgetError, Certification, CoverEstimate,
                       SeparatedSet, Staircase, covering_bounds,
                       default_budget, entropy_numbers, greedy_separated,
                       staircase, staircase_to_csv)
from .setcover import exact_cover_small, symmetric_lattice
from .functionals import (GammaValue, IterationSequence, MeanWidth,
                          PaperConstants, SequenceError, dual_sequence,
                          gamma, gamma_prime, mean_width, primal_sequence,
                          psi)
from .constructions import (CertificationError, CombinerInput,
                            diameter_realizing_separated, dual_combine,
                            dual_combine_inputs, mixed_gauge_body,
                            net_transfer_polar, primal_combine,
                            telescope_schedule)
from .duality import (ConjectureProbe, DualityReport, FamilySpec,
                      beta_summary, brackets_intersect, check_first_step,
                      check_iteration, duality_report, geometric_lemma_probe)

__version__ = "0.1.0"
