"""beamkey: erasure-based secret-key establishment over directional mmWave links.

Submodules:
    units     dB/linear arithmetic and free-space helpers
    wiretap   wiretap-code thresholds and secure-rate algebra
    gf        GF(2^k) arithmetic for the key combiner
    secrecy   the erasure key-agreement protocol and its exhaustive oracle
    antenna   element pattern, planar array factor, sector codebook
    channel   stochastic mmWave link model with spatially consistent shadowing
    raytrace  deterministic image-method tracer for the platoon showcase
    sls       transmit-side sector-level sweep with secret-bit beacons
    spatial   ENSB maps, insecure areas/volumes, region algebra
    scenarios configuration schema (TOML/JSON)
    harness   scenario runners, DH baseline, report emission
    cli       command-line interface
"""

from .wiretap import RateBreakdown, WiretapCode, code_from_rates, secure_rate, solve_th1, solve_th2

__version__ = "0.1.0"

__all__ = [
    "RateBreakdown",
    "WiretapCode",
    "code_from_rates",
    "secure_rate",
    "solve_th1",
    "solve_th2",
    "__version__",
]
