"""Super-Clifford circuit simulation: stabilizer tableaux on operator space,
operator entanglement entropy, OTOCs and random-circuit ensembles."""

from .entropy import Region, entropy_profile, prefix_entropy, region_entropy
from .ensembles import ConfigError, EnsembleSpec, Family
from .otoc import (
    V_CATALOG,
    OtocValue,
    echo_tableau,
    inner_product_with_basis,
    otoc_trace,
    plateau_value,
)
from .pauli import BasisOperatorLabel, DimensionError, SuperPauli
from .tableau import GateKind, GateOp, Tableau, apply_gate, apply_layer, new_computational

__version__ = "0.1.0"

__all__ = [
    "BasisOperatorLabel",
    "ConfigError",
    "DimensionError",
    "EnsembleSpec",
    "Family",
    "GateKind",
    "GateOp",
    "OtocValue",
    "Region",
    "SuperPauli",
    "Tableau",
    "V_CATALOG",
    "apply_gate",
    "apply_layer",
    "echo_tableau",
    "entropy_profile",
    "inner_product_with_basis",
    "new_computational",
    "otoc_trace",
    "plateau_value",
    "prefix_entropy",
    "region_entropy",
]
