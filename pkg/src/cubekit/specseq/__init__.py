from .couple import ExactCouple, Report, Window, WindowError, validate_couple, zero_couple
from .engines import ENGINES, IllDefined, NotInImage
from .filtration import (FilteredComplex, FiltrationError, build_filtration_couple,
                         graded_homology, random_filtered_complex, to_table_couple)
from .io import (CoupleFormatError, couple_from_json, couple_to_json, filtered_from_json,
                 load_couple)
from .monoid import HypothesisError, congruence_classes, monoid_hom_theorem_check
from .nodes import FiniteNode, cyclic_node, symmetric_group_node
from .pages import (Pages, convergence_check, differential, homology_step_check, page,
                    page_checks, stabilization)
