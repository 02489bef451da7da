"""Dice functions, their sampled regular-value and support properties, and the normalized gradient flow."""

from .flow import FlowError, FlowReport, flow_decomposition_check, flow_to, rk4, velocity
from .functions import (BRANCHES, DiceConfig, OutsideDomain, VJet, aux, aux_values, branch_masks, branch_of,
                        branch_value, dfun, dfun_jet, dice, dice_jet, frak_d, frak_d_jet, smooth_ramp,
                        smooth_step, tilde_dice, tilde_dice_jet)
from .scan import ScanReport, bisect_rays, level_points, property_scan
