"""Spatial security metrics: expected-secret-bits maps over eavesdropper
position grids, insecure areas/volumes, and region set algebra.

The per-sweep expected number of secret bits at an eavesdropper position is

    ensb = payload_bits * (r_max / decoding_rate) * P(secure)

where the fraction is how much effective random data fits in each beacon's
secret payload and P(secure) is the probability - estimated over Monte
Carlo channel trials - that at least one transmitted frame is decoded by
the mobile (SNR >= th1) while the eavesdropper misses it (SNR <= th2). One
such frame is enough for a nonzero key, hence the existential reading.

Under the worst-case orientation assumption each station contributes
exactly one mobile-decoded frame (its best sector), and the mobile-side
condition holds by assumption; randomness then lives only in the
eavesdropper's channel.

Every cell value is a pure function of (seed, trial index, cell position):
evaluation order cannot change a map, and a standalone point query
reproduces the map value at that cell exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .channel import realize_channel, snr_db
from .sls import SweepScenario
from .wiretap import secure_rate


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell grid over a 2-D rectangle or 3-D box.

    extent is (xmin, xmax, ymin, ymax[, zmin, zmax]); values are cell
    centers, ordered x-fastest, then y, then z.
    """

    extent: tuple
    resolution: float = 0.1
    max_cells: int = 1_000_000

    def __post_init__(self):
        object.__setattr__(self, "extent", tuple(float(v) for v in self.extent))
        if len(self.extent) not in (4, 6):
            raise ValueError("extent must have 4 (2-D) or 6 (3-D) entries")
        if self.resolution <= 0.0:
            raise ValueError("resolution must be > 0")
        for lo, hi in zip(self.extent[::2], self.extent[1::2]):
            if hi <= lo:
                raise ValueError("extent bounds must be increasing")
        if self.n_cells > self.max_cells:
            raise ValueError(
                f"grid of {self.n_cells} cells exceeds the budget of {self.max_cells}"
            )

    @property
    def ndim(self) -> int:
        return len(self.extent) // 2

    @property
    def shape(self) -> tuple:
        return tuple(
            int(np.floor((hi - lo) / self.resolution + 1e-9)) or 1
            for lo, hi in zip(self.extent[::2], self.extent[1::2])
        )

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_measure(self) -> float:
        return self.resolution**self.ndim

    def cell_centers(self) -> np.ndarray:
        axes = [
            lo + (np.arange(n) + 0.5) * self.resolution
            for (lo, n) in zip(self.extent[::2], self.shape)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        # x-fastest ordering: reverse axes before raveling
        cols = [m.transpose(*reversed(range(self.ndim))).ravel() for m in mesh]
        return np.column_stack(cols)


@dataclass(frozen=True)
class EnsbMap:
    grid: GridSpec
    values: np.ndarray  # bits per cell, x-fastest order
    trials: int
    seed: int
    ensb_max: float


@dataclass(frozen=True)
class RegionResult:
    grid: GridSpec
    cells: np.ndarray  # sorted cell indices

    def __post_init__(self):
        object.__setattr__(
            self, "cells", np.unique(np.asarray(self.cells, dtype=np.int64))
        )

    @property
    def measure(self) -> float:
        return float(len(self.cells)) * self.grid.cell_measure


def ensb_fraction(code) -> float:
    rates = secure_rate(code)
    return rates.r_max_bps / rates.decoding_rate_bps


def ensb_max_bits(scenario: SweepScenario) -> float:
    return scenario.payload_bits * ensb_fraction(scenario.code)


def _station_precompute(scenario: SweepScenario, cells: np.ndarray):
    mobile = np.asarray(scenario.mobile_pos, dtype=float)
    pre = []
    for station in scenario.stations:
        best = station.best_sector_towards(mobile)
        if scenario.worst_case:
            sectors = [best]
        else:
            sectors = list(range(station.codebook.n_sectors))
        gains_eve = np.stack([station.tx_gain_dbi(s, cells) for s in sectors])
        gains_mob = np.array([station.tx_gain_dbi(s, mobile[None, :])[0] for s in sectors])
        pre.append(
            {
                "station": station,
                "skey": int(station.key()),
                "sectors": sectors,
                "gains_eve": gains_eve,  # (n_sectors_used, n_cells)
                "gains_mob": gains_mob,
            }
        )
    return pre


def _secure_counts(scenario: SweepScenario, cells: np.ndarray, trials: int, seed: int) -> np.ndarray:
    """Per-cell count of trials with at least one decoded-and-missed frame."""
    pre = _station_precompute(scenario, cells)
    field = scenario.shadow_field(seed)
    mobile = np.asarray(scenario.mobile_pos, dtype=float)
    counts = np.zeros(len(cells), dtype=np.int64)
    th1, th2 = scenario.code.th1_db, scenario.code.th2_db

    for trial in range(trials):
        secure = np.zeros(len(cells), dtype=bool)
        for p in pre:
            station = p["station"]
            real = field.realization(station.pos, (trial,))
            pos = np.asarray(station.pos, dtype=float)
            for j, s in enumerate(p["sectors"]):
                parts_e = realize_channel(
                    cells, pos, scenario.chan, real,
                    fading_key=(seed, p["skey"], trial, s),
                )
                snr_eve = snr_db(
                    scenario.budget, p["gains_eve"][j], scenario.eve_rx_gain_dbi, parts_e
                )
                missed = snr_eve <= th2
                if scenario.worst_case:
                    # Mobile decode of the one frame holds by assumption.
                    secure |= missed
                else:
                    parts_m = realize_channel(
                        mobile[None, :], pos, scenario.chan, real,
                        fading_key=(seed, p["skey"], trial, s),
                    )
                    snr_mob = snr_db(
                        scenario.budget,
                        p["gains_mob"][j],
                        scenario.mobile_rx_gain_dbi,
                        {k: v[0] for k, v in parts_m.items()},
                    )
                    if snr_mob >= th1:
                        secure |= missed
        counts += secure
    return counts


def ensb_at(eve_pos, scenario: SweepScenario, trials: int = 1000, seed: int = 0) -> float:
    """Expected secret bits per sweep against an eavesdropper at one position."""
    if trials < 1:
        raise ValueError("need at least one trial")
    counts = _secure_counts(scenario, np.atleast_2d(np.asarray(eve_pos, float)), trials, seed)
    # divide first so an all-secure cell lands exactly on ensb_max
    return float(ensb_max_bits(scenario) * (counts[0] / trials))


def ensb_map(scenario: SweepScenario, grid: GridSpec, trials: int = 1000, seed: int = 0) -> EnsbMap:
    """ensb_at evaluated at every cell center; deterministic per (seed, cell)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    cells = grid.cell_centers()
    counts = _secure_counts(scenario, cells, trials, seed)
    values = ensb_max_bits(scenario) * (counts / trials)
    return EnsbMap(grid=grid, values=values, trials=trials, seed=seed, ensb_max=ensb_max_bits(scenario))


def insecure_area(emap: EnsbMap, epsilon: float | None = None) -> RegionResult:
    """Cells where the eavesdropper broke at least one trial.

    A cell is insecure when its estimated break probability is above zero,
    i.e. its value falls below ensb_max by more than the Monte Carlo
    tolerance (default ensb_max/trials, matching a single trial).
    """
    if epsilon is None:
        epsilon = emap.ensb_max / emap.trials
    threshold = emap.ensb_max - 0.5 * epsilon
    cells = np.nonzero(emap.values < threshold)[0]
    return RegionResult(grid=emap.grid, cells=cells)


def interception_region(snr_fn, grid: GridSpec, th2_db: float) -> RegionResult:
    """Cells where a deterministic eavesdropper SNR exceeds the erasure threshold.

    ``snr_fn(points) -> dB array`` must be deterministic; cells returning
    -inf (e.g. masked positions) are never insecure.
    """
    cells = grid.cell_centers()
    snr = np.asarray(snr_fn(cells), dtype=float)
    if snr.shape != (len(cells),):
        raise ValueError("snr_fn must return one value per cell")
    return RegionResult(grid=grid, cells=np.nonzero(snr > th2_db)[0])


def insecure_volume(snr_fn, box: GridSpec, th2_db: float) -> RegionResult:
    """3-D variant of the deterministic interception region."""
    if box.ndim != 3:
        raise ValueError("insecure_volume expects a 3-D grid")
    return interception_region(snr_fn, box, th2_db)


def region_intersection(a: RegionResult, b: RegionResult) -> RegionResult:
    if a.grid != b.grid:
        raise ValueError("regions live on different grids")
    return RegionResult(grid=a.grid, cells=np.intersect1d(a.cells, b.cells))


def region_union(a: RegionResult, b: RegionResult) -> RegionResult:
    if a.grid != b.grid:
        raise ValueError("regions live on different grids")
    return RegionResult(grid=a.grid, cells=np.union1d(a.cells, b.cells))


def boundary_cell_count(region: RegionResult) -> int:
    """Cells whose axis neighborhood mixes insecure and secure status."""
    grid = region.grid
    shape = tuple(reversed(grid.shape))  # index order (z)(y)(x) for x-fastest ravel
    mask = np.zeros(grid.n_cells, dtype=bool)
    mask[region.cells] = True
    mask = mask.reshape(shape)
    boundary = np.zeros_like(mask)
    for axis in range(mask.ndim):
        inner = np.diff(mask, axis=axis) != 0
        pad_lo = [(0, 0)] * mask.ndim
        pad_lo[axis] = (1, 0)
        pad_hi = [(0, 0)] * mask.ndim
        pad_hi[axis] = (0, 1)
        boundary |= np.pad(inner, pad_lo)
        boundary |= np.pad(inner, pad_hi)
    return int(boundary.sum())


def write_map_csv(path, emap: EnsbMap) -> None:
    """CSV dump (x, y[, z], ensb_bits), stable x-fastest row order."""
    cells = emap.grid.cell_centers()
    coord_names = ["x", "y", "z"][: emap.grid.ndim]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(coord_names + ["ensb_bits"])
        for center, value in zip(cells, emap.values):
            writer.writerow([repr(float(c)) for c in center] + [repr(float(value))])


def write_region_csv(path, regions: dict) -> None:
    """CSV of insecure cell centers, one row per (region name, cell)."""
    names = sorted(regions)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        ndim = max((regions[n].grid.ndim for n in names), default=2)
        writer.writerow(["region"] + ["x", "y", "z"][:ndim])
        for name in names:
            region = regions[name]
            centers = region.grid.cell_centers()
            for idx in region.cells:
                writer.writerow([name] + [repr(float(c)) for c in centers[idx]])
