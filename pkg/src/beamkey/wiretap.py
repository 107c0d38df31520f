"""Threshold model of a wiretap code and its secure-rate algebra.

A code is described by two SNR thresholds: receivers at or above ``th1_db``
decode everything, receivers at or below ``th2_db`` learn nothing, and the
band in between is conservatively treated as leaked. On a Gaussian channel
the maximum rate of information delivered *securely* to a legitimate
receiver is then

    r_max = B*log2(1 + linear(th1)) - B*log2(1 + linear(th2))

where the first term is the decoding rate (raw rate at the legitimate
receiver) and the second is the secrecy overhead sacrificed to blind an
eavesdropper. Rates are in bits/s because the logarithm base is 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .units import db_to_linear

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class WiretapCode:
    """Wiretap code thresholds plus the channel bandwidth they apply to."""

    th1_db: float
    th2_db: float
    bandwidth_hz: float = 1e9

    def __post_init__(self):
        if not (math.isfinite(self.th1_db) and math.isfinite(self.th2_db)):
            raise ValueError("thresholds must be finite")
        if self.bandwidth_hz <= 0.0:
            raise ValueError("bandwidth must be > 0")
        if self.th1_db < self.th2_db:
            raise ValueError(
                f"decode threshold th1={self.th1_db} dB must be >= erasure "
                f"threshold th2={self.th2_db} dB"
            )


@dataclass(frozen=True)
class RateBreakdown:
    decoding_rate_bps: float
    secrecy_overhead_bps: float
    r_max_bps: float


def shannon_rate_bps(snr_db: float, bandwidth_hz: float) -> float:
    """B*log2(1 + SNR) for an SNR given in dB.

    log1p keeps precision at deeply negative thresholds, where the linear
    SNR is far below 1.
    """
    return bandwidth_hz * math.log1p(db_to_linear(snr_db)) / _LN2


def secure_rate(code: WiretapCode) -> RateBreakdown:
    """Evaluate decoding rate, secrecy overhead and their difference r_max."""
    decoding = shannon_rate_bps(code.th1_db, code.bandwidth_hz)
    overhead = shannon_rate_bps(code.th2_db, code.bandwidth_hz)
    return RateBreakdown(
        decoding_rate_bps=decoding,
        secrecy_overhead_bps=overhead,
        r_max_bps=decoding - overhead,
    )


def solve_th1(decoding_rate_bps: float, bandwidth_hz: float) -> float:
    """Threshold (dB) at which B*log2(1+snr) equals the given decoding rate.

    The inverse of the decoding-rate term: th1 = 10*log10(2**(r/B) - 1).
    """
    if bandwidth_hz <= 0.0:
        raise ValueError("bandwidth must be > 0")
    if decoding_rate_bps <= 0.0:
        raise ValueError(
            "decoding rate must be > 0 (zero rate has no finite threshold)"
        )
    # expm1 keeps precision when rate/B is tiny
    snr_lin = math.expm1(decoding_rate_bps / bandwidth_hz * _LN2)
    return 10.0 * math.log10(snr_lin)


def solve_th2(r_max_bps: float, th1_db: float, bandwidth_hz: float) -> float:
    """Erasure threshold (dB) that leaves ``r_max_bps`` of secure rate.

    Solves B*log2(1+linear(th1)) - B*log2(1+linear(th2)) = r_max for th2.
    """
    if bandwidth_hz <= 0.0:
        raise ValueError("bandwidth must be > 0")
    if r_max_bps < 0.0:
        raise ValueError("secure rate must be >= 0")
    decoding = shannon_rate_bps(th1_db, bandwidth_hz)
    overhead = decoding - r_max_bps
    if overhead <= 0.0:
        raise ValueError(
            f"r_max={r_max_bps:.6g} bps is not below the decoding rate "
            f"{decoding:.6g} bps; no finite th2 exists"
        )
    snr_lin = math.expm1(overhead / bandwidth_hz * _LN2)
    return 10.0 * math.log10(snr_lin)


def code_from_rates(
    decoding_rate_bps: float, r_max_bps: float, bandwidth_hz: float
) -> WiretapCode:
    """Build a code from rate targets (decode rate fixes th1, r_max fixes th2)."""
    th1 = solve_th1(decoding_rate_bps, bandwidth_hz)
    th2 = solve_th2(r_max_bps, th1, bandwidth_hz)
    return WiretapCode(th1_db=th1, th2_db=th2, bandwidth_hz=bandwidth_hz)
