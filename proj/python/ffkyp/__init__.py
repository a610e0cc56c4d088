"""Finite-frequency performance analysis of LTI and LPV systems."""

import json

from . import _ffkyp
from ._ffkyp import (
    InfeasibleError,
    delta_squared,
    enlarge_range,
    gramian,
    run_cli,
    simulate,
)

__all__ = [
    "InfeasibleError",
    "analyze",
    "certify_uas",
    "delta_squared",
    "enlarge",
    "enlarge_range",
    "gap_squared",
    "gramian",
    "run_cli",
    "simulate",
    "uniform_spectral_radius",
]


def _system(system):
    # dicts follow the JSON system format; strings name a built-in system
    return system if isinstance(system, str) else json.dumps(system)


def analyze(system="example1", range="low:1", mode="lpv_ff", tol=1e-4):
    return json.loads(_ffkyp.analyze(_system(system), range, mode, tol))


def enlarge(system="example1", range="low:1", stability="uas", c1=None, c2=None, c3=7.4):
    return json.loads(_ffkyp.enlarge(_system(system), range, stability, c1, c2, c3))


def certify_uas(system="example1", c3=7.4, c1=None, c2=None):
    return json.loads(_ffkyp.certify_uas(_system(system), c3, c1, c2))


def gap_squared(system="example1", range="low:1"):
    return _ffkyp.gap_squared(_system(system), range)


def uniform_spectral_radius(system="example1"):
    return _ffkyp.uniform_spectral_radius(_system(system))
