"""Control-landscape laboratory for symmetric and self-dual unitary domains."""

__version__ = "0.1.0"

from .domains import (Domain, DomainKind, DomainPoint, TangentChart, contains, curve,
                      domain_dim, principal_sqrt, renormalize, standard_tangent_chart)
from .errors import DimensionError, DomainError, InconsistencyError, NumericalError
from .hessian import (HessianSignature, QuadraticFormDiagonal, analytic_hessian,
                      closed_form_signature, grassmannian_dim, hqf_at_critical,
                      numerical_hessian, paper_signature, signature)
from .landscape import (CriticalPointSpec, classify_critical_point, critical_values,
                        gradient, gradient_canonical, j_canonical, j_metric,
                        make_critical_point, metric_distance, reduce_to_canonical)
from .linalg import (QuaternionBlockMatrix, exp_i_generator, factor_self_dual_unitary,
                     factor_symmetric_unitary, is_unitary, symplectic_dual)
from .optimizer import AscentConfig, Termination, ascent_step, run_batch, run_trial
from .sampling import (SeededStream, coe_sample, cse_sample, haar_unitary, random_rotation,
                       random_tangent)
