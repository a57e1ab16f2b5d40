"""Key-rate bounds: information quantities, finite-size terms, reports."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest

import mwqkd
from mwqkd import security as sec
from mwqkd.devices import ChannelParams
from mwqkd.protocol import ChannelEstimate

RUN1 = mwqkd.RUN1_CHAIN
RUN2 = mwqkd.RUN2_CHAIN
QUIET = ChannelParams(0.0115, 1.7e-6)


def test_snr_and_mutual_information():
    assert sec.snr(RUN2, QUIET) == pytest.approx(2.480461077211082, rel=1e-12)
    assert sec.snr(RUN1, QUIET) == pytest.approx(2.1947256064777627, rel=1e-12)
    assert sec.mutual_information(2.480461077211082) == pytest.approx(
        0.8996392205287942, rel=1e-12
    )
    assert sec.mutual_information(0.0) == 0.0
    with pytest.raises(ValueError):
        sec.mutual_information(-0.5)


def test_holevo_pinned_values():
    assert sec.holevo_dr(RUN1, QUIET) == pytest.approx(0.08149342215643486, rel=1e-9)
    assert sec.holevo_dr(RUN2, QUIET) == pytest.approx(0.08925951730281491, rel=1e-9)
    assert sec.holevo_dr(RUN1, ChannelParams(0.0115, 0.03)) == pytest.approx(
        0.546737045389451, rel=1e-9
    )


def test_holevo_edge_cases():
    assert sec.holevo_dr(RUN1, ChannelParams(0.0, 0.0)) == 0.0
    with pytest.raises(ValueError):
        sec.holevo_dr(RUN1, ChannelParams(0.0, 0.01))
    # no modulation leaks nothing
    flat = replace(RUN1, squeezing_db=0.0, antisqueezing_db=0.0)
    assert sec.holevo_dr(flat, QUIET) == 0.0


def test_holevo_monotone_in_loss_and_noise():
    base = sec.holevo_dr(RUN1, ChannelParams(0.0115, 0.001))
    assert sec.holevo_dr(RUN1, ChannelParams(0.05, 0.001)) > base
    assert sec.holevo_dr(RUN1, ChannelParams(0.0115, 0.01)) > base


def test_asymptotic_key_value_and_sign():
    assert sec.asymptotic_key(RUN2, QUIET) == pytest.approx(
        0.8103797032259793, rel=1e-9
    )
    hot = ChannelParams(0.0115, 0.08)
    assert sec.asymptotic_key(RUN2, hot) < 0.0


def test_noise_tolerance_bisection():
    assert sec.noise_tolerance(RUN1, 0.0115) == pytest.approx(0.062379, abs=2e-5)
    assert sec.noise_tolerance(RUN2, 0.0115) == pytest.approx(0.063025, abs=2e-5)
    # a lossier channel tolerates less added noise
    assert sec.noise_tolerance(RUN2, 0.2) < sec.noise_tolerance(RUN2, 0.0115)


def test_noise_crossing_degenerate_cases():
    assert sec.noise_crossing(lambda n: -1.0) == 0.0
    assert sec.noise_crossing(lambda n: 1.0) == math.inf


def test_confidence_w():
    from scipy.special import erf

    w = sec.confidence_w(1e-10)
    assert w == pytest.approx(6.361340889697423, rel=1e-12)
    # round trip through the Gaussian tail: P(|Z| > w) = 2 e_ec
    assert 1.0 - erf(w / math.sqrt(2)) == pytest.approx(2e-10, rel=1e-6)
    assert sec.confidence_w(0.5 - 1e-12) == pytest.approx(0.0, abs=1e-5)
    for bad in (0.0, 0.5, 1.0):
        with pytest.raises(ValueError):
            sec.confidence_w(bad)


def test_confidence_w_against_bisection_oracle():
    # independent inversion of the tail probability via bisection on erf;
    # at e_ec = 1e-10 the tail slope is ~6e-10 per unit w, so the last
    # representable digits of erf limit the agreement to a few 1e-8
    from scipy.special import erf

    for e_ec in (1e-10, 1e-6, 0.01):
        want = sec.confidence_w(e_ec)
        lo, hi = 0.0, 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if 0.5 * (1.0 - erf(mid / math.sqrt(2))) > e_ec:
                lo = mid
            else:
                hi = mid
        assert want == pytest.approx(0.5 * (lo + hi), abs=5e-7)


def test_worst_case_params_widen_conservatively():
    est = ChannelEstimate(
        loss=0.0115, loss_sigma=0.002, noise_photons=0.003, noise_sigma=0.001,
        samples=5000,
    )
    w = 6.36
    eps_star, nbar_star = sec.worst_case_params(est, w)
    assert eps_star == pytest.approx(0.0115 + w * 0.002)
    assert nbar_star == pytest.approx(0.003 + w * 0.001)
    # widening can only hurt the key
    k_hat = sec.asymptotic_key(RUN1, ChannelParams(est.loss, est.noise_photons))
    k_star = sec.asymptotic_key(RUN1, ChannelParams(eps_star, nbar_star))
    assert k_star < k_hat


def test_worst_case_params_stay_in_range():
    est = ChannelEstimate(
        loss=0.99, loss_sigma=0.3, noise_photons=0.0, noise_sigma=0.0, samples=100
    )
    eps_star, nbar_star = sec.worst_case_params(est, 6.0)
    assert eps_star < 1.0
    assert nbar_star == 0.0
    est = ChannelEstimate(
        loss=-0.001, loss_sigma=0.0, noise_photons=0.0, noise_sigma=0.0, samples=100
    )
    assert sec.worst_case_params(est, 6.0)[0] == 0.0


def test_finite_size_delta_values():
    assert sec.finite_size_delta(8332) == pytest.approx(0.4565734692692913, rel=1e-12)
    assert sec.finite_size_delta(4166) == pytest.approx(0.6503633968404844, rel=1e-12)
    assert sec.finite_size_delta(250_000) == pytest.approx(
        0.08216190230095935, rel=1e-12
    )
    assert sec.finite_size_delta(10**9) < 0.002
    with pytest.raises(ValueError):
        sec.finite_size_delta(0)


def test_finite_size_delta_shrinks():
    sizes = [10**3, 10**4, 10**5, 10**6]
    deltas = [sec.finite_size_delta(n) for n in sizes]
    assert all(a > b for a, b in zip(deltas, deltas[1:]))


def test_composite_key_accounting():
    bound = sec.composite_key(RUN2, QUIET, n_raw=16665)
    assert bound.n_sifted == 8332
    assert bound.n_ec == 4166
    assert bound.prefactor == pytest.approx(4166 / 16665)
    assert bound.delta_bits == pytest.approx(sec.finite_size_delta(4166))
    assert bound.bits_per_symbol == pytest.approx(
        bound.mi_bits - bound.holevo_bits - bound.delta_bits
    )
    assert bound.bits_per_raw_symbol == pytest.approx(
        bound.prefactor * bound.bits_per_symbol
    )


def test_composite_key_ablations_reduce_to_asymptotic():
    bound = sec.composite_key(
        RUN2, QUIET, n_raw=16665, include_delta=False,
        include_estimation_penalty=False,
    )
    assert bound.delta_bits == 0.0
    assert bound.bits_per_symbol == pytest.approx(
        sec.asymptotic_key(RUN2, QUIET), rel=1e-9
    )


def test_composite_key_never_beats_asymptotic():
    for nbar in (0.0, 0.01, 0.03):
        ch = ChannelParams(0.0115, nbar)
        bound = sec.composite_key(RUN2, ch, n_raw=10**6)
        assert bound.bits_per_symbol <= sec.asymptotic_key(RUN2, ch) + 1e-12


def test_composite_key_estimation_penalty_uses_confidence_width():
    est = ChannelEstimate(
        loss=0.0115, loss_sigma=0.001, noise_photons=0.002, noise_sigma=0.0005,
        samples=4166,
    )
    bound = sec.composite_key(RUN2, estimate=est, n_raw=16665)
    assert bound.w == pytest.approx(sec.confidence_w(1e-10))
    assert bound.worst_case_loss == pytest.approx(0.0115 + bound.w * 0.001)
    assert bound.worst_case_noise == pytest.approx(0.002 + bound.w * 0.0005)
    assert bound.bits_per_symbol < sec.asymptotic_key(
        RUN2, ChannelParams(est.loss, est.noise_photons)
    )


def test_composite_key_needs_exactly_one_channel_source():
    est = ChannelEstimate(
        loss=0.01, loss_sigma=0.001, noise_photons=0.0, noise_sigma=0.001, samples=100
    )
    with pytest.raises(ValueError):
        sec.composite_key(RUN2, QUIET, estimate=est, n_raw=1000)
    with pytest.raises(ValueError):
        sec.composite_key(RUN2, n_raw=1000)


def test_composite_key_respects_beta_and_pec():
    full = sec.composite_key(RUN2, QUIET, n_raw=16665, include_delta=False,
                             include_estimation_penalty=False)
    lossy = sec.composite_key(RUN2, QUIET, n_raw=16665, beta_ec=0.95, p_ec=0.9,
                              include_delta=False, include_estimation_penalty=False)
    assert lossy.bits_per_symbol == pytest.approx(
        0.95 * full.mi_bits - full.holevo_bits
    )
    assert lossy.prefactor == pytest.approx(0.9 * full.prefactor)


def test_predicted_estimate_structure():
    pred = sec.predicted_estimate(RUN1, ChannelParams(0.0115, 0.01), samples=4166)
    assert pred.loss == pytest.approx(0.0115)
    assert pred.noise_photons == pytest.approx(0.01)
    assert pred.loss_sigma > 0 and pred.noise_sigma > 0
    wider = sec.predicted_estimate(RUN1, ChannelParams(0.0115, 0.01), samples=1000)
    assert wider.loss_sigma > pred.loss_sigma


def test_report_serializes_with_inputs(tmp_path):
    rep = sec.build_report(RUN2, QUIET, n_raw=16665, extra_inputs={"tag": 7})
    data = json.loads(rep.to_json())
    assert data["snr"] == pytest.approx(2.480461077211082)
    assert data["asymptotic_key_bits"] == pytest.approx(0.8103797032259793)
    assert data["finite_size"]["n_raw"] == 16665
    assert data["inputs"]["chain"]["quantum_efficiency"] == 0.68
    assert data["inputs"]["channel"]["loss"] == 0.0115
    assert data["inputs"]["tag"] == 7
    # serialization is stable
    assert rep.to_json() == sec.build_report(
        RUN2, QUIET, n_raw=16665, extra_inputs={"tag": 7}
    ).to_json()
