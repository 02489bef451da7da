"""Chart-local numeric checks of warped-product and suspension curvature formulas."""

from .angle import AngleChart, DegenerateFrame, angle_chart_check
from .checks import (PreconditionError, curvature_check, error_term_check, rescaled, rescaling_check,
                     suspension_check)
from .family import FamilyFormatError, MetricFamily, NotPositiveDefinite, load_family, parse_family
from .pregauge import NotPD, gram, pre_gauge, pre_gauge_report, random_pd
from .tensors import SingularMetric, curvature, fd_derivatives, scal_fd
from .warped import (VARIANTS, family_jet, oracle_suspension, oracle_warped, scal_direct, scal_warped,
                     warped_components, warped_terms)
