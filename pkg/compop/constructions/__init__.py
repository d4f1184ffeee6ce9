from .peak import PeakConstruction, build_peak_symbol, peak_sequence
from .outer import (build_outer_symbol, outer_power_identity, carleson_dirichlet, check_lemma_norme,
                    check_theorem_thnorme, hardy_tube_integral, dirichlet_tube_integral)
from .rec_pipeline import RecPipeline, PsiFunction, build_psi, build_rec_pipeline, parse_growth
