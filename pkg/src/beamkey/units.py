"""Decibel/linear conversions and free-space propagation helpers.

Power-like quantities carry a ``_db`` suffix when they are dimensionless
ratios (SNR, gains, thresholds) and ``_dbm`` when referenced to 1 mW
(transmit power, noise floor). Both live on the same 10*log10 scale, so the
conversions below apply to either; the suffix is the semantic tag.
"""

from __future__ import annotations

import numpy as np

SPEED_OF_LIGHT_M_S = 299_792_458.0


def db_to_linear(value_db):
    """dB -> linear power ratio, 10**(x/10). Works on scalars and arrays."""
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0) if np.ndim(value_db) else 10.0 ** (float(value_db) / 10.0)


def linear_to_db(ratio):
    """Linear power ratio -> dB. Rejects non-positive input."""
    arr = np.asarray(ratio, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("linear ratio must be > 0 to convert to dB")
    out = 10.0 * np.log10(arr)
    return float(out) if np.ndim(ratio) == 0 else out


def dbm_to_watts(power_dbm: float) -> float:
    return 1e-3 * 10.0 ** (float(power_dbm) / 10.0)


def watts_to_dbm(power_w: float) -> float:
    if power_w <= 0.0:
        raise ValueError("power must be > 0 to convert to dBm")
    return 10.0 * np.log10(power_w / 1e-3)


def wavelength_m(freq_hz: float) -> float:
    if freq_hz <= 0.0:
        raise ValueError("frequency must be > 0")
    return SPEED_OF_LIGHT_M_S / freq_hz


def fspl_db(distance_m, freq_hz: float):
    """Free-space path loss 20*log10(4*pi*d*f/c), distance in meters."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("distance must be > 0 for free-space path loss")
    out = 20.0 * np.log10(4.0 * np.pi * d * freq_hz / SPEED_OF_LIGHT_M_S)
    return float(out) if np.ndim(distance_m) == 0 else out


def wrap_angle_deg(angle_deg):
    """Wrap an angle (degrees) into [-180, 180)."""
    a = np.asarray(angle_deg, dtype=float)
    out = (a + 180.0) % 360.0 - 180.0
    return float(out) if np.ndim(angle_deg) == 0 else out
