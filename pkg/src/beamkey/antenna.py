"""Directional gain: standardized element pattern, planar array factor with
phase-only steering, and the sectorized codebook used during beam sweeps.

The element pattern is the usual parabolic-in-both-cuts shape with side-lobe
floors (defaults: 65 deg half-power beamwidths, 30 dB front-to-back limit,
8 dBi peak). Array gain is element gain plus 20*log10 of the normalized
array factor of a uniform planar array, so a coherently steered N-element
array peaks 10*log10(N) above a single element.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .units import wavelength_m, wrap_angle_deg


@dataclass(frozen=True)
class ElementPattern:
    peak_dbi: float = 8.0
    az_3db_deg: float = 65.0
    el_3db_deg: float = 65.0
    front_to_back_db: float = 30.0
    side_lobe_floor_db: float = 30.0

    def gain_dbi(self, az_deg, el_deg):
        """Element gain; azimuth is wrapped, elevation must lie in [-90, 90]."""
        az = wrap_angle_deg(np.asarray(az_deg, dtype=float))
        el = np.asarray(el_deg, dtype=float)
        if np.any(np.abs(el) > 90.0):
            raise ValueError("elevation must be within [-90, 90] degrees")
        att_az = np.minimum(12.0 * (az / self.az_3db_deg) ** 2, self.front_to_back_db)
        att_el = np.minimum(12.0 * (el / self.el_3db_deg) ** 2, self.side_lobe_floor_db)
        gain = self.peak_dbi - np.minimum(att_az + att_el, self.front_to_back_db)
        return float(gain) if np.ndim(gain) == 0 else gain


DEFAULT_ELEMENT = ElementPattern()


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array in the y-z plane, boresight along +x (az=0, el=0)."""

    rows: int = 6
    cols: int = 6
    spacing_wavelengths: float = 0.5
    carrier_hz: float = 73e9

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("array must have at least one element per axis")
        if self.spacing_wavelengths <= 0.0:
            raise ValueError("element spacing must be > 0")

    @property
    def n_elements(self) -> int:
        return self.rows * self.cols

    @property
    def wavelength_m(self) -> float:
        return wavelength_m(self.carrier_hz)

    def element_offsets_wl(self) -> np.ndarray:
        """(N, 2) offsets [y, z] in wavelengths, centered on the array middle."""
        ys = (np.arange(self.cols) - (self.cols - 1) / 2.0) * self.spacing_wavelengths
        zs = (np.arange(self.rows) - (self.rows - 1) / 2.0) * self.spacing_wavelengths
        yy, zz = np.meshgrid(ys, zs)
        return np.column_stack([yy.ravel(), zz.ravel()])


def _phase_terms(geom: ArrayGeometry, az_deg, el_deg) -> np.ndarray:
    """Per-element phase (radians) for plane-wave arrival from (az, el); shape (..., N)."""
    az = np.radians(np.asarray(az_deg, dtype=float))
    el = np.radians(np.asarray(el_deg, dtype=float))
    offs = geom.element_offsets_wl()
    uy = (np.cos(el) * np.sin(az))[..., None]
    uz = np.sin(el)[..., None]
    return 2.0 * np.pi * (offs[:, 0] * uy + offs[:, 1] * uz)


def steering_weights(geom: ArrayGeometry, az_deg: float, el_deg: float = 0.0) -> np.ndarray:
    """Conjugate-phase weights pointing the main lobe at (az, el); unit modulus."""
    return np.exp(-1j * _phase_terms(geom, az_deg, el_deg))


def array_factor_db(geom: ArrayGeometry, weights, az_deg, el_deg, floor_db: float = -50.0):
    """20*log10 of the array factor normalized so a coherent sum gives 10*log10(N).

    Exact pattern nulls are clamped at ``floor_db``.
    """
    w = np.asarray(weights)
    if w.shape[-1] != geom.n_elements:
        raise ValueError(
            f"got {w.shape[-1]} weights for an array of {geom.n_elements} elements"
        )
    phases = _phase_terms(geom, az_deg, el_deg)
    af = np.abs(np.sum(w * np.exp(1j * phases), axis=-1)) / np.sqrt(geom.n_elements)
    with np.errstate(divide="ignore"):
        af_db = 20.0 * np.log10(af)
    af_db = np.maximum(af_db, floor_db)
    return float(af_db) if np.ndim(af_db) == 0 else af_db


def array_gain_dbi(
    geom: ArrayGeometry,
    weights,
    az_deg,
    el_deg,
    element: ElementPattern = DEFAULT_ELEMENT,
    floor_db: float = -50.0,
):
    """Combined gain: element pattern plus array factor."""
    return element.gain_dbi(az_deg, el_deg) + array_factor_db(
        geom, weights, az_deg, el_deg, floor_db=floor_db
    )


@dataclass(frozen=True)
class SectorCodebook:
    """Azimuth sector centers; the default 36 sectors sit at 0, 10, ..., 350 deg."""

    centers_deg: tuple

    @classmethod
    def uniform(cls, n_sectors: int = 36, first_center_deg: float = 0.0) -> "SectorCodebook":
        if n_sectors < 1:
            raise ValueError("codebook needs at least one sector")
        step = 360.0 / n_sectors
        return cls(centers_deg=tuple(first_center_deg + step * i for i in range(n_sectors)))

    @property
    def n_sectors(self) -> int:
        return len(self.centers_deg)

    def center(self, sector_id: int) -> float:
        if not 0 <= sector_id < self.n_sectors:
            raise ValueError(f"sector id {sector_id} out of range 0..{self.n_sectors - 1}")
        return self.centers_deg[sector_id]


def sector_weights(
    geom: ArrayGeometry,
    codebook: SectorCodebook,
    sector_id: int,
    array_boresight_deg: float = 0.0,
) -> np.ndarray:
    """Steering weights for a sector, aimed at the sector center."""
    rel_az = wrap_angle_deg(codebook.center(sector_id) - array_boresight_deg)
    return steering_weights(geom, rel_az, 0.0)


def quasi_omni_gain_dbi(gain_dbi: float = 0.0):
    """Direction-independent reception gain used while sweeping."""
    return float(gain_dbi)


def write_pattern_csv(
    path,
    geom: ArrayGeometry,
    weights,
    az_grid_deg,
    el_grid_deg,
    element: ElementPattern = DEFAULT_ELEMENT,
):
    """Dump (az, el, dBi) over the given angular grid for external plotting."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["az_deg", "el_deg", "gain_dbi"])
        for el in el_grid_deg:
            gains = array_gain_dbi(geom, weights, np.asarray(az_grid_deg, float), np.full(len(az_grid_deg), float(el)), element)
            for az, g in zip(az_grid_deg, np.atleast_1d(gains)):
                writer.writerow([repr(float(az)), repr(float(el)), repr(float(g))])
