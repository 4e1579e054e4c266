"""Parameter tables behind the preset catalog."""

from spinbattery.config.config import (
    DEFAULT_HBAR,
    DEFAULT_J,
    DEFAULT_OMEGA,
    DEFAULT_OMEGA0,
)

# Shared by every preset.
BASE_PARAMS = {
    "J": DEFAULT_J,
    "Omega": DEFAULT_OMEGA,
    "omega0": DEFAULT_OMEGA0,
    "hbar": DEFAULT_HBAR,
}

CHAIN_TOPOLOGIES = ["open", "closed", "supercube"]
LAMBDA_VALUES = [0.0, 0.5, 1.0]

# =============================================================================
# ISING (delta = 1, Delta = 0)
# =============================================================================

ISING_D_VALUES = [0.0, 5.0, 10.0]

# =============================================================================
# XXZ (delta = 0)
# =============================================================================

XXZ_DELTA = 2.0
XXZ_D_VALUES = [0.0, 1.7]

SUPERCUBE_D_SCAN = [0.0, 0.5, 1.0, 1.7, 2.5]
SUPERCUBE_J_SCAN = [0.5, 1.0, 2.0, 3.0]
SUPERCUBE_OPTIMAL_D = 1.7

DIAGONAL_PRESETS = [
    {"topology": "supercube-2body", "D": 1.7},
    {"topology": "supercube-topface", "D": 1.7},
    {"topology": "supercube-4body", "D": 1.7},
    {"topology": "supercube-allface", "D": 1.7},
    {"topology": "supercube-2body-topface", "D": 1.7},
]

TWELVE_QUBIT_PRESETS = [
    {"name": "xxz-cube-extension", "topology": "cube-extension-12", "D": 1.7},
    {"name": "xxz-cuboctahedron", "topology": "cuboctahedron-12", "D": 1.94},
    {"name": "xxz-icosahedron", "topology": "icosahedron-12", "D": 2.06},
]
