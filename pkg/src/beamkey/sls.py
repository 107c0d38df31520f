"""Transmit-side sector-level sweep with secret-bit-augmented beacons.

Protocol steps modeled:
  1. The initiator sends one beacon per sector; the responder listens
     quasi-omnidirectionally. Each beacon carries its array/sector ids and a
     secret payload of wiretap-encoded random bits.
  2. The responder reports the best observed SNR and the sector it came
     from (modeled as a single quasi-omni feedback transmission).
  3. The initiator answers on its best sector with the symmetric feedback.
  4. Both ends now know the best transmit sector.

Frames are abstract records, not bit-accurate over-the-air formats. A
responder decodes a beacon's secret bits iff its SNR is at or above th1;
an eavesdropper probe intercepts them iff its SNR is strictly above th2.
Feedback delivery is error-free and public.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import secrecy
from .antenna import (
    DEFAULT_ELEMENT,
    ArrayGeometry,
    ElementPattern,
    SectorCodebook,
    array_gain_dbi,
    sector_weights,
)
from .channel import (
    ChannelParams,
    LinkBudgetConfig,
    ShadowField,
    hash_u64,
    realize_channel,
    snr_db,
)
from .units import wrap_angle_deg
from .wiretap import WiretapCode


@dataclass(frozen=True)
class Station:
    """A transmitter with sectorized arrays; orientation is the azimuth of sector 0."""

    pos: tuple
    orientation_deg: float = 0.0
    geom: ArrayGeometry = ArrayGeometry()
    element: ElementPattern = DEFAULT_ELEMENT
    codebook: SectorCodebook = dc_field(default_factory=SectorCodebook.uniform)
    n_arrays: int = 3

    def __post_init__(self):
        if self.codebook.n_sectors % self.n_arrays != 0:
            raise ValueError("sectors must split evenly across arrays")

    @property
    def sectors_per_array(self) -> int:
        return self.codebook.n_sectors // self.n_arrays

    def array_for_sector(self, sector_id: int) -> int:
        self.codebook.center(sector_id)  # range check
        return sector_id // self.sectors_per_array

    def array_boresight_deg(self, array_id: int) -> float:
        # Each array faces the middle of its contiguous sector span.
        span = 360.0 / self.n_arrays
        step = 360.0 / self.codebook.n_sectors
        first_center = array_id * span
        return self.orientation_deg + first_center + (span - step) / 2.0

    def key(self) -> int:
        """Position-derived hash so co-located stations share channel draws."""
        return int(hash_u64(*(float(c) for c in self.pos)))

    def tx_gain_dbi(self, sector_id: int, targets) -> np.ndarray:
        """Combined gain of the given sector toward target points (vectorized)."""
        pts = np.atleast_2d(np.asarray(targets, dtype=float))
        pos = np.asarray(self.pos, dtype=float)
        delta = pts[:, :2] - pos[None, :2]
        az_global = np.degrees(np.arctan2(delta[:, 1], delta[:, 0]))
        if pts.shape[1] > 2:
            horiz = np.linalg.norm(delta, axis=1)
            dz = pts[:, 2] - (pos[2] if pos.shape[0] > 2 else 0.0)
            el = np.degrees(np.arctan2(dz, horiz))
        else:
            el = np.zeros(len(pts))
        arr = self.array_for_sector(sector_id)
        boresight = self.array_boresight_deg(arr)
        weights = sector_weights(self.geom, self.codebook, sector_id, boresight)
        rel_az = wrap_angle_deg(az_global - boresight)
        return np.atleast_1d(array_gain_dbi(self.geom, weights, rel_az, el, self.element))

    def best_sector_towards(self, target) -> int:
        """Sector with the highest gain toward a point; ties go to the lower id."""
        gains = np.array(
            [self.tx_gain_dbi(s, [target])[0] for s in range(self.codebook.n_sectors)]
        )
        return int(np.argmax(gains))


@dataclass(frozen=True)
class SweepScenario:
    """Everything a sweep or an ENSB evaluation needs to know."""

    stations: tuple
    mobile_pos: tuple
    code: WiretapCode
    budget: LinkBudgetConfig = LinkBudgetConfig()
    chan: ChannelParams = ChannelParams()
    payload_bits: int = 1000
    worst_case: bool = True
    mobile_rx_gain_dbi: float = 0.0
    eve_rx_gain_dbi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "stations", tuple(self.stations))
        if not self.stations:
            raise ValueError("need at least one station")

    def shadow_field(self, seed: int) -> ShadowField:
        return ShadowField(self.chan, seed)


@dataclass(frozen=True)
class BeaconFrame:
    frame_id: int
    station_index: int
    array_id: int
    sector_id: int
    secret_payload: np.ndarray
    tx_rate_bps: float = 27.5e6


@dataclass(frozen=True)
class FeedbackFrame:
    best_snr_db: float
    best_sector_id: int


@dataclass
class SweepOutcome:
    station_index: int
    frames: list  # BeaconFrame per sector, in sector order
    snr_mobile_db: np.ndarray
    snr_eve_db: np.ndarray
    mobile_decoded: set
    eve_intercepted: set
    responder_feedback: FeedbackFrame
    initiator_feedback: FeedbackFrame

    @property
    def best_tx_sector(self) -> int:
        return self.responder_feedback.best_sector_id


def best_sector(snr_by_sector) -> int:
    """Argmax with ties broken toward the lower sector id."""
    return int(np.argmax(np.asarray(snr_by_sector)))


def _frame_payload(scenario, station_index, sector_id, seed):
    rng = np.random.default_rng([seed, 0xFAD, station_index, sector_id])
    n_sym = max(1, scenario.payload_bits // 8)
    if scenario.payload_bits < 8:
        return rng.integers(0, 1 << scenario.payload_bits, size=1, dtype=np.uint8)
    return rng.integers(0, 256, size=n_sym, dtype=np.uint8)


def run_transmit_sls(
    scenario: SweepScenario,
    station_index: int,
    eve_pos,
    seed: int,
) -> SweepOutcome:
    """One full sweep of a station, recording per-frame SNR at the mobile and
    at an eavesdropper probe position."""
    station = scenario.stations[station_index]
    n_sectors = station.codebook.n_sectors
    field = scenario.shadow_field(seed)
    real = field.realization(station.pos, (0,))
    skey = int(station.key())

    mobile = np.asarray(scenario.mobile_pos, dtype=float)
    eve = np.asarray(eve_pos, dtype=float)
    snr_mob = np.zeros(n_sectors)
    snr_eve = np.zeros(n_sectors)
    frames = []
    for s in range(n_sectors):
        # Fresh small-scale fading per beacon; shadowing shared across the sweep.
        parts_m = realize_channel(
            mobile[None, :], np.asarray(station.pos, float), scenario.chan, real,
            fading_key=(seed, skey, 0, s),
        )
        parts_e = realize_channel(
            eve[None, :], np.asarray(station.pos, float), scenario.chan, real,
            fading_key=(seed, skey, 0, s),
        )
        g_mob = station.tx_gain_dbi(s, mobile[None, :])[0]
        g_eve = station.tx_gain_dbi(s, eve[None, :])[0]
        snr_mob[s] = snr_db(scenario.budget, g_mob, scenario.mobile_rx_gain_dbi, {k: v[0] for k, v in parts_m.items()})
        snr_eve[s] = snr_db(scenario.budget, g_eve, scenario.eve_rx_gain_dbi, {k: v[0] for k, v in parts_e.items()})
        frames.append(
            BeaconFrame(
                frame_id=s,
                station_index=station_index,
                array_id=station.array_for_sector(s),
                sector_id=s,
                secret_payload=_frame_payload(scenario, station_index, s, seed),
            )
        )

    decoded = {s for s in range(n_sectors) if snr_mob[s] >= scenario.code.th1_db}
    intercepted = {s for s in range(n_sectors) if snr_eve[s] > scenario.code.th2_db}
    best = best_sector(snr_mob)
    responder_fb = FeedbackFrame(best_snr_db=float(snr_mob[best]), best_sector_id=best)
    # The initiator replies on its best sector; the mobile is quasi-omni here,
    # so its "best sector" is reported as 0.
    initiator_fb = FeedbackFrame(best_snr_db=float(snr_mob[best]), best_sector_id=0)
    return SweepOutcome(
        station_index=station_index,
        frames=frames,
        snr_mobile_db=snr_mob,
        snr_eve_db=snr_eve,
        mobile_decoded=decoded,
        eve_intercepted=intercepted,
        responder_feedback=responder_fb,
        initiator_feedback=initiator_fb,
    )


@dataclass
class MultiSweepResult:
    outcomes: list
    log: secrecy.ReceptionLog
    packets: list  # RandomPacket per logical frame the mobile decoded


def multi_station_sweep(
    scenario: SweepScenario,
    eve_pos,
    seed: int,
    worst_case: bool | None = None,
) -> MultiSweepResult:
    """Independent sweeps of every station, merged for the key protocol.

    Every beacon frame becomes one logical packet (numbered station-major,
    then sector). Under the worst-case flag each station contributes exactly
    its best frame to the mobile's decode set.
    """
    if worst_case is None:
        worst_case = scenario.worst_case
    outcomes = []
    bob, eve_set, packets = set(), set(), []
    offset = 0
    for idx in range(len(scenario.stations)):
        out = run_transmit_sls(scenario, idx, eve_pos, seed)
        outcomes.append(out)
        n = scenario.stations[idx].codebook.n_sectors
        decoded = out.mobile_decoded
        if worst_case and decoded:
            # The best sector is the SNR argmax, so it is decoded whenever anything is.
            decoded = {out.best_tx_sector}
        for s in decoded:
            logical = offset + s
            bob.add(logical)
            packets.append(
                secrecy.RandomPacket(
                    packet_id=logical,
                    payload=out.frames[s].secret_payload,
                    payload_bits=scenario.payload_bits,
                )
            )
            if s in out.eve_intercepted:
                eve_set.add(logical)
        offset += n
    log = secrecy.ReceptionLog(
        n_sent=offset, bob_received=frozenset(bob), eve_received=frozenset(eve_set)
    )
    return MultiSweepResult(outcomes=outcomes, log=log, packets=packets)


def transcript_events(outcome: SweepOutcome) -> list:
    """Per-frame event log in a JSON-friendly shape."""
    events = []
    for f in outcome.frames:
        s = f.sector_id
        events.append(
            {
                "frame_id": f.frame_id,
                "station_index": outcome.station_index,
                "array_id": f.array_id,
                "sector_id": s,
                "snr_mobile_db": float(outcome.snr_mobile_db[s]),
                "snr_eve_db": float(outcome.snr_eve_db[s]),
                "mobile_decoded": s in outcome.mobile_decoded,
                "eve_intercepted": s in outcome.eve_intercepted,
            }
        )
    events.append(
        {
            "event": "responder_feedback",
            "best_snr_db": outcome.responder_feedback.best_snr_db,
            "best_sector_id": outcome.responder_feedback.best_sector_id,
        }
    )
    events.append(
        {
            "event": "initiator_feedback",
            "best_snr_db": outcome.initiator_feedback.best_snr_db,
            "best_sector_id": outcome.initiator_feedback.best_sector_id,
        }
    )
    return events


def write_transcript(path, outcomes) -> None:
    payload = [transcript_events(o) for o in outcomes]
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
