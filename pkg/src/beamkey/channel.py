"""Stochastic outdoor mmWave link model: distance pathloss with LOS/NLOS
states, spatially consistent shadowing, Rayleigh-derived NLOS fading, and
the dB-domain link budget.

Shadowing is a zero-mean unit-variance Gaussian random field with
exponential spatial correlation exp(-d/corr_distance), synthesized from
random Fourier features: a realization is a fixed sum of cosines whose
wavevectors are drawn from the spectral density of the exponential kernel.
That makes every realization a pure function of position (queries are
order-independent and embarrassingly parallel) while the ensemble
correlation over seeds matches the kernel exactly. LOS/NLOS states share a
second correlated field so the state is consistent in space too.

Fading and other per-point draws are derived from a splitmix64 hash of the
seed material and the position's float bit patterns, so a map cell and a
standalone query at the same coordinates see the same channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .units import fspl_db

_MIX_CONST = np.uint64(0x9E3779B97F4A7C15)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer; input/output uint64 (wrap-around is the point)."""
    with np.errstate(over="ignore"):
        z = (z + _MIX_CONST).astype(np.uint64)
        z ^= z >> np.uint64(30)
        z = (z * np.uint64(0xBF58476D1CE4E5B9)).astype(np.uint64)
        z ^= z >> np.uint64(27)
        z = (z * np.uint64(0x94D049BB133111EB)).astype(np.uint64)
        z ^= z >> np.uint64(31)
    return z


def hash_u64(*parts) -> np.ndarray:
    """Fold integers and float arrays (via bit patterns) into uint64 hashes."""
    h = np.uint64(0)
    for part in parts:
        arr = np.asarray(part)
        if arr.dtype.kind == "f":
            bits = arr.astype(np.float64).view(np.uint64)
        else:
            bits = arr.astype(np.int64).view(np.uint64)
        h = _mix64(np.bitwise_xor(h, bits))
    return h


def uniform_from_hash(h: np.ndarray) -> np.ndarray:
    """Map uint64 hashes to uniforms in the open interval (0, 1)."""
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class LinkBudgetConfig:
    tx_power_dbm: float = 30.0
    noise_floor_dbm: float = -99.0
    bandwidth_hz: float = 1e9

    def __post_init__(self):
        if self.bandwidth_hz <= 0.0:
            raise ValueError("bandwidth must be > 0")


@dataclass(frozen=True)
class ChannelParams:
    """Knobs of the stochastic model; all constants are configuration."""

    carrier_hz: float = 73e9
    pathloss_exp_los: float = 2.0
    pathloss_exp_nlos: float = 3.3
    sigma_los_db: float = 4.0
    sigma_nlos_db: float = 7.8
    corr_distance_m: float = 10.0
    n_spectral: int = 256
    reference_distance_m: float = 1.0
    shadowing: bool = True
    fading: bool = True
    force_los: bool | None = None  # None = draw from the LOS probability model


@dataclass(frozen=True)
class ChannelRealization:
    pathloss_db: float
    shadowing_db: float
    fading_db: float
    los: bool


def p_los(distance_m):
    """LOS probability: min(18/d, 1)*(1 - exp(-d/36)) + exp(-d/36)."""
    d = np.maximum(np.asarray(distance_m, dtype=float), 1e-9)
    e = np.exp(-d / 36.0)
    out = np.minimum(18.0 / d, 1.0) * (1.0 - e) + e
    return float(out) if np.ndim(distance_m) == 0 else out


def pathloss_db(distance_m, params: ChannelParams, los):
    """Reference free-space loss at 1 m plus a 10*n*log10(d) distance term.

    Distances are clamped at the reference distance so the loss never dips
    below the free-space value there.
    """
    d = np.maximum(np.asarray(distance_m, dtype=float), params.reference_distance_m)
    n_exp = np.where(np.asarray(los), params.pathloss_exp_los, params.pathloss_exp_nlos)
    ref = fspl_db(params.reference_distance_m, params.carrier_hz)
    out = ref + 10.0 * n_exp * np.log10(d / params.reference_distance_m)
    return float(out) if np.ndim(distance_m) == 0 and np.ndim(los) == 0 else out


class FieldRealization:
    """One draw of the correlated shadow/LOS fields; pure in the query point.

    Synthesis runs in float32: the fields are unit-variance and feed dB
    budgets, so seven significant digits are plenty, and float32 trig is an
    order of magnitude faster on the evaluation hot path.
    """

    def __init__(self, rng: np.random.Generator, corr_distance_m: float, n_components: int):
        self._scale = np.float32(math.sqrt(2.0 / n_components))
        self._k_shadow, self._phi_shadow = self._draw(rng, corr_distance_m, n_components)
        self._k_los, self._phi_los = self._draw(rng, corr_distance_m, n_components)

    @staticmethod
    def _draw(rng, corr_distance_m, n_components):
        u = rng.random((n_components, 3))
        # Radial inverse-CDF of the 2-D spectral density of exp(-r/d).
        radius = np.sqrt((1.0 - u[:, 0]) ** -2 - 1.0) / corr_distance_m
        theta = 2.0 * np.pi * u[:, 1]
        k = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
        phi = 2.0 * np.pi * u[:, 2]
        return k.astype(np.float32), phi.astype(np.float32)

    def _evaluate(self, k, phi, points):
        # Elementwise ops plus a last-axis reduction keep every value a pure
        # function of its own point: results are bit-identical whether a
        # point is queried alone or inside any batch.
        pts = np.atleast_2d(np.asarray(points, dtype=np.float32))[:, :2]
        phase = pts[:, 0:1] * k[None, :, 0] + pts[:, 1:2] * k[None, :, 1] + phi[None, :]
        vals = self._scale * np.cos(phase).sum(axis=1, dtype=np.float32)
        return vals.astype(np.float64)

    def shadow(self, points) -> np.ndarray:
        """Unit-variance correlated Gaussian-like field values at the points."""
        return self._evaluate(self._k_shadow, self._phi_shadow, points)

    def los_uniform(self, points) -> np.ndarray:
        """Spatially consistent uniforms in (0,1) for the LOS state draw."""
        return ndtr(self._evaluate(self._k_los, self._phi_los, points))


@dataclass(frozen=True)
class ShadowField:
    """Seeded family of correlated field realizations, one per transmitter/trial."""

    params: ChannelParams
    seed: int = 0

    def realization(self, tx_pos, trial_key) -> FieldRealization:
        tx = np.asarray(tx_pos, dtype=float)
        tx_bits = [int(b) for b in tx.astype(np.float64).view(np.uint64)]
        key = [self.seed & 0xFFFFFFFF, *tx_bits, *(int(k) for k in np.atleast_1d(trial_key))]
        rng = np.random.default_rng(key)
        return FieldRealization(rng, self.params.corr_distance_m, self.params.n_spectral)


def realize_channel(
    points,
    tx_pos,
    params: ChannelParams,
    field_real: FieldRealization | None,
    fading_key: tuple = (0,),
):
    """Vectorized channel draw toward many receiver points.

    Returns dict of arrays: pathloss_db, shadowing_db, fading_db, los.
    fading_key distinguishes frames/trials so repeated transmissions see
    fresh small-scale fading while shadowing stays put.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tx = np.asarray(tx_pos, dtype=float)
    if pts.shape[1] != tx.shape[0]:
        raise ValueError("point and transmitter dimensionality differ")
    delta = pts - tx[None, :]
    dist = np.linalg.norm(delta, axis=1)
    if np.any(dist == 0.0):
        raise ValueError("receiver coincides with the transmitter")

    if params.force_los is not None:
        los = np.full(len(pts), bool(params.force_los))
    elif field_real is None:
        los = np.full(len(pts), True)
    else:
        los = field_real.los_uniform(pts) <= p_los(dist)

    if params.shadowing and field_real is not None:
        sigma = np.where(los, params.sigma_los_db, params.sigma_nlos_db)
        shadowing = sigma * field_real.shadow(pts)
    else:
        shadowing = np.zeros(len(pts))

    if params.fading:
        h = hash_u64(*(int(k) for k in fading_key), *(pts[:, j] for j in range(pts.shape[1])))
        power = -np.log(uniform_from_hash(h))  # Exp(1) power of a Rayleigh amplitude
        fading = np.where(los, 0.0, -10.0 * np.log10(power))
    else:
        fading = np.zeros(len(pts))

    return {
        "pathloss_db": pathloss_db(dist, params, los),
        "shadowing_db": shadowing,
        "fading_db": fading,
        "los": los,
        "distance_m": dist,
    }


def sample_realization(tx_pos, rx_pos, field: ShadowField, seed) -> ChannelRealization:
    """One deterministic channel draw for a single link.

    Identical (positions, field seed, trial seed) give identical output;
    nearby receivers under the same seeds see correlated shadowing.
    """
    real = field.realization(tx_pos, np.atleast_1d(seed))
    parts = realize_channel(
        [rx_pos], tx_pos, field.params, real,
        fading_key=tuple(int(k) for k in np.atleast_1d(seed)),
    )
    return ChannelRealization(
        pathloss_db=float(parts["pathloss_db"][0]),
        shadowing_db=float(parts["shadowing_db"][0]),
        fading_db=float(parts["fading_db"][0]),
        los=bool(parts["los"][0]),
    )


def snr_db(config: LinkBudgetConfig, tx_gain_dbi, rx_gain_dbi, realization):
    """Additive dB-domain budget: tx power + gains - losses - noise floor."""
    if isinstance(realization, ChannelRealization):
        loss = realization.pathloss_db + realization.shadowing_db + realization.fading_db
    else:
        loss = (
            realization["pathloss_db"]
            + realization["shadowing_db"]
            + realization["fading_db"]
        )
    return config.tx_power_dbm + tx_gain_dbi + rx_gain_dbi - loss - config.noise_floor_dbm
