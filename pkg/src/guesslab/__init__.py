"""Guessing, exponential-cost coding and L_alpha geometry on finite alphabets."""

from .center import CenterNotConverged, CenterResult, FamilySpec, informativity, mixture_center, solve_center
from .families import AvsSpec, DmsSpec, avs_center_radius, avs_rate, binary_two_list, stitch_lists
from .geometry import ConvexHullSet, project, pythagorean_residual
from .guessing import arikan_sandwich, guessing_moment, optimal_campbell, redundancy
from .infomeasures import i_value, l_alpha, renyi_divergence, renyi_entropy, tilt
from .probkit import Alphabet, GuessingList, JointPmf, LogBase, OrderParam, sort_to_list

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AvsSpec",
    "CenterNotConverged",
    "CenterResult",
    "ConvexHullSet",
    "DmsSpec",
    "FamilySpec",
    "GuessingList",
    "JointPmf",
    "LogBase",
    "OrderParam",
    "arikan_sandwich",
    "avs_center_radius",
    "avs_rate",
    "binary_two_list",
    "guessing_moment",
    "i_value",
    "informativity",
    "l_alpha",
    "mixture_center",
    "optimal_campbell",
    "project",
    "pythagorean_residual",
    "redundancy",
    "renyi_divergence",
    "renyi_entropy",
    "solve_center",
    "sort_to_list",
    "stitch_lists",
    "tilt",
]
