import pytest
from hypothesis import given
from hypothesis import strategies as st

from beamkey.wiretap import (
    WiretapCode,
    code_from_rates,
    secure_rate,
    shannon_rate_bps,
    solve_th1,
    solve_th2,
)


def test_code_validation():
    with pytest.raises(ValueError):
        WiretapCode(th1_db=-30.0, th2_db=-20.0)  # th1 < th2
    with pytest.raises(ValueError):
        WiretapCode(th1_db=0.0, th2_db=0.0, bandwidth_hz=0.0)


def test_equal_thresholds_zero_secure_rate():
    r = secure_rate(WiretapCode(th1_db=5.0, th2_db=5.0, bandwidth_hz=2e8))
    assert r.r_max_bps == 0.0
    assert r.decoding_rate_bps == r.secrecy_overhead_bps


def test_beam_sweep_operating_point():
    r = secure_rate(WiretapCode(th1_db=-17.15, th2_db=-27.6, bandwidth_hz=1e9))
    assert r.decoding_rate_bps == pytest.approx(27.5e6, rel=0.01)
    assert r.r_max_bps == pytest.approx(25e6, rel=0.01)


def test_platoon_operating_point():
    r = secure_rate(WiretapCode(th1_db=48.0, th2_db=47.5, bandwidth_hz=1e9))
    assert r.r_max_bps == pytest.approx(166e6, rel=0.01)


def test_solve_th1_values():
    assert solve_th1(27.5e6, 1e9) == pytest.approx(-17.15, abs=0.05)
    # rate equal to bandwidth needs snr of exactly 1 (0 dB)
    assert solve_th1(5e8, 5e8) == pytest.approx(0.0, abs=1e-12)
    # invert the platoon configuration: decoding = r_max + overhead(th2=47.5)
    overhead = shannon_rate_bps(47.5, 1e9)
    assert solve_th1(166.0936e6 + overhead, 1e9) == pytest.approx(48.0, abs=0.01)


def test_solve_th1_rejects_zero_rate():
    with pytest.raises(ValueError):
        solve_th1(0.0, 1e9)
    with pytest.raises(ValueError):
        solve_th1(1e6, 0.0)


def test_solve_th2_values():
    th1 = solve_th1(27.5e6, 1e9)
    assert solve_th2(25e6, th1, 1e9) == pytest.approx(-27.6, abs=0.05)
    # with the rounded threshold the answer lands close but not inside 0.05
    assert solve_th2(25e6, -17.15, 1e9) == pytest.approx(-27.6, abs=0.1)
    # zero secrecy rate collapses th2 onto th1
    assert solve_th2(0.0, -3.0, 1e9) == pytest.approx(-3.0, abs=1e-9)
    assert solve_th2(166e6, 48.0, 1e9) == pytest.approx(47.5, abs=0.01)


def test_solve_th2_rejects_unachievable():
    with pytest.raises(ValueError):
        solve_th2(30e6, -17.15, 1e9)  # above the decoding rate


thresholds = st.floats(min_value=-60.0, max_value=60.0)
bandwidths = st.floats(min_value=1e6, max_value=1e10)


@given(thresholds, st.floats(min_value=0.01, max_value=40.0), bandwidths)
def test_round_trip_and_nonnegativity(th1, separation, bw):
    th2 = th1 - separation
    code = WiretapCode(th1_db=th1, th2_db=th2, bandwidth_hz=bw)
    r = secure_rate(code)
    assert r.decoding_rate_bps >= 0 and r.secrecy_overhead_bps >= 0 and r.r_max_bps >= 0
    assert solve_th1(r.decoding_rate_bps, bw) == pytest.approx(th1, abs=1e-9)
    assert solve_th2(r.r_max_bps, th1, bw) == pytest.approx(th2, abs=1e-9)


@given(thresholds, st.floats(min_value=40.0, max_value=80.0))
def test_round_trip_extreme_separation(th1, separation):
    # recovering th2 subtracts two nearly equal rates, so precision decays
    # roughly as 10**(separation/10) ulps; a microdecibel at 80 dB apart is
    # still far inside any physical use
    th2 = th1 - separation
    r = secure_rate(WiretapCode(th1_db=th1, th2_db=th2, bandwidth_hz=1e9))
    assert solve_th2(r.r_max_bps, th1, 1e9) == pytest.approx(th2, abs=1e-6)


@given(thresholds, thresholds, st.floats(min_value=0.1, max_value=10.0))
def test_monotonicity(a, b, step):
    th1, th2 = max(a, b), min(a, b)
    base = secure_rate(WiretapCode(th1, th2, 1e9)).r_max_bps
    up_th1 = secure_rate(WiretapCode(th1 + step, th2, 1e9)).r_max_bps
    assert up_th1 > base
    down_th2 = secure_rate(WiretapCode(th1 + step, th2 + step, 1e9)).r_max_bps
    assert down_th2 < up_th1


def test_code_from_rates_round_trip():
    code = code_from_rates(27.5e6, 25e6, 1e9)
    r = secure_rate(code)
    assert r.decoding_rate_bps == pytest.approx(27.5e6, rel=1e-12)
    assert r.r_max_bps == pytest.approx(25e6, rel=1e-9)
