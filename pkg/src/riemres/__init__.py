"""Asymptotic Riemann maps of shrinking level-set domains, Dolbeault residues
in one complex variable, and regularized divergent pairings."""

from .errors import (FitIllConditioned, InvalidEps, LevelSetNotBracketed,
                     NoContractionRadius, NotConverged, QuadratureBudgetExceeded,
                     RiemresError)
from .pairing import (PairingFit, boundary_limit, boundary_pairing, boundary_prediction,
                      divergence_fit, regularized_pairing, stokes_consistency, variation)
from .quadrature import (LevelCurve, annulus_integrate, circle_integrate, level_curve,
                         levelset_radius)
from .residue import (CutoffSpec, Form1D, FunctionWithPole, HoloForm, WindowedJet,
                      exact_form, pole_reduce, res_classical, res_dolbeault,
                      res_log_pairing)
from .riemann import (AnalyticWeight, CoeffSeq, ContractionCert, SolveOptions,
                      best_certificate, boundary_residual, fixed_point_map, limit_map,
                      radius_certificate, richardson_limit, riemann_map, solve)
from .series import (Jet2, Series1, jet_conj, jet_dz, jet_dzbar, jet_eval, jet_exp,
                     jet_mul, series_compose, series_derivative, series_eval,
                     series_mul, series_revert)
from .window import chi

__version__ = "0.1.0"
