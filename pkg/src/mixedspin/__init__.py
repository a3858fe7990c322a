"""Thermal negativity and measurement-induced disturbance of a spin-1 / spin-1/2 pair."""

__version__ = "0.1.0"

from .errors import MixedSpinError  # noqa: E402
from .measures import (  # noqa: E402
    CorrelationReport,
    measurement_induced_disturbance,
    mid,
    mutual_information,
    negativity,
    negativity_closed_form,
)
from .model import ModelParams, ThermalState, build_hamiltonian, thermal_state  # noqa: E402

__all__ = [
    "CorrelationReport",
    "MixedSpinError",
    "ModelParams",
    "ThermalState",
    "build_hamiltonian",
    "measurement_induced_disturbance",
    "mid",
    "mutual_information",
    "negativity",
    "negativity_closed_form",
    "thermal_state",
]
