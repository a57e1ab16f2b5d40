"""Security quantities: SNR, mutual information, the eavesdropper's Holevo
bound under a collective Gaussian attack, asymptotic secret key, and the
finite-size composite bound with worst-case parameter estimation.

Threat model: the eavesdropper purifies only the untrusted channel (its
loss tap and coupled thermal noise); preparation impurity and the whole
detection chain are trusted. Reconciliation is direct: the eavesdropper's
information is bounded conditioned on the sender's classical symbols.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erfinv

from . import devices, gaussian
from .devices import ChannelParams, DeviceChainParams
from .gaussian import VACUUM_VARIANCE, GaussianState
from .protocol import ChannelEstimate

DEFAULT_CORRECTNESS_EPSILON = 1e-10  # e_ec, failure bound on estimation confidence
DEFAULT_SMOOTHING_EPSILON = 1e-10
DEFAULT_PA_EPSILON = 1e-10


def snr(chain: DeviceChainParams, channel: ChannelParams) -> float:
    """Signal-to-noise ratio of the matched receiver record.

    slope^2 * codebook variance / record variance, from the affine
    decomposition of the device chain.
    """
    slope, variance = devices.response_and_noise(chain, channel, matched=True)
    return slope * slope * chain.codebook_variance / variance


def mutual_information(snr_value: float) -> float:
    """Shannon mutual information of a Gaussian channel: log2(1 + SNR) / 2."""
    if not (snr_value >= 0.0):
        raise ValueError("snr must be >= 0")
    return 0.5 * math.log2(1.0 + snr_value)


def holevo_dr(chain: DeviceChainParams, channel: ChannelParams) -> float:
    """Eavesdropper's Holevo bound, direct reconciliation.

    The attack couples each signal to one arm of a two-mode squeezed
    state of occupation 2*nbar/loss through the channel's loss tap; the
    eavesdropper keeps both environment modes. For Gaussian modulation
    the conditional entropy does not depend on the symbol, so the bound
    is the entropy difference between the modulation-averaged and the
    conditional environment states.

    Trusted detection noise never enters the environment state. A
    lossless channel leaks nothing (0.0); a lossless channel with
    nbar > 0 has no consistent environment and raises ValueError.
    """
    eps = channel.loss
    if eps == 0.0:
        if channel.noise_photons > 0.0:
            raise ValueError(
                "noise_photons > 0 with zero loss has no environment model"
            )
        return 0.0
    modulation = chain.codebook_variance
    if modulation == 0.0:
        return 0.0

    signal = devices.channel_input_state(chain, "q")
    environment = gaussian.two_mode_squeezed_thermal(channel.environment_photons)
    joint = gaussian.tensor(signal, environment)
    out = gaussian.apply_beamsplitter(joint, channel.transmissivity, modes=(0, 1))

    # Unit symbol amplitude shifts the first environment mode's q by
    # -sqrt(eps) times the trusted pre-channel response; the second
    # environment mode is untouched by the tap.
    response = np.zeros(6)
    response[2] = -math.sqrt(eps) * devices.channel_input_response(chain)

    conditional, unconditional = gaussian.condition_on_classical_gaussian(
        out, response, modulation, keep=(1, 2)
    )
    zero = np.zeros(4)
    s_cond = gaussian.von_neumann_entropy(GaussianState(zero, conditional))
    s_uncond = gaussian.von_neumann_entropy(GaussianState(zero, unconditional))
    # the averaged state majorizes the conditional one; guard float dust
    return max(s_uncond - s_cond, 0.0)


def asymptotic_key(chain: DeviceChainParams, channel: ChannelParams) -> float:
    """Asymptotic secret key in bits per symbol; negative means insecure."""
    return mutual_information(snr(chain, channel)) - holevo_dr(chain, channel)


def confidence_w(correctness_epsilon: float) -> float:
    """Confidence factor w = sqrt(2) * erfinv(1 - 2 e).

    w standard deviations cover a Gaussian estimate up to failure
    probability e per tail.
    """
    if not 0.0 < correctness_epsilon < 0.5:
        raise ValueError("correctness_epsilon must be in (0, 0.5)")
    return math.sqrt(2.0) * float(erfinv(1.0 - 2.0 * correctness_epsilon))


def worst_case_params(
    estimate: ChannelEstimate, w: float
) -> tuple[float, float]:
    """Confidence-shifted channel parameters for the composite bound.

    Both parameters are shifted in the pessimistic direction: leakage
    grows with channel loss and with coupled noise, so the worst case
    inside the w-sigma confidence interval is loss + w*sigma and
    noise + w*sigma. The loss is clamped into [0, 1); the noise is
    clamped at 0.
    """
    if w < 0.0:
        raise ValueError("w must be >= 0")
    loss = estimate.loss + w * estimate.loss_sigma
    noise = estimate.noise_photons + w * estimate.noise_sigma
    return min(max(loss, 0.0), 1.0 - 1e-12), max(noise, 0.0)


def finite_size_delta(
    n_exp: float,
    smoothing_epsilon: float = DEFAULT_SMOOTHING_EPSILON,
    pa_epsilon: float = DEFAULT_PA_EPSILON,
) -> float:
    """Composable finite-size penalty in bits per symbol.

    Delta(n) = 7 sqrt(log2(2/eps_smooth) / n) + (2/n) log2(1/eps_pa),
    monotone decreasing in the effective key length n.
    """
    if not n_exp >= 1:
        raise ValueError("n_exp must be >= 1")
    for name, value in (("smoothing_epsilon", smoothing_epsilon), ("pa_epsilon", pa_epsilon)):
        if not 0.0 < value < 1.0:
            raise ValueError(f"{name} must be in (0, 1)")
    return 7.0 * math.sqrt(math.log2(2.0 / smoothing_epsilon) / n_exp) + (
        2.0 / n_exp
    ) * math.log2(1.0 / pa_epsilon)


def predicted_estimate(
    chain: DeviceChainParams, channel: ChannelParams, samples: int
) -> ChannelEstimate:
    """Expected channel estimate from a given number of matched pairs.

    Centers the estimate on the true parameters and attaches the
    asymptotic standard errors the regression would have at that sample
    size. Used to evaluate the composite bound without simulating data.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    slope, variance = devices.response_and_noise(chain, channel, matched=True)
    model = devices.trusted_readout_constants(chain)
    slope_sigma = math.sqrt(variance / (samples * chain.codebook_variance))
    loss_sigma = 2.0 * abs(slope) * slope_sigma / model.slope_gain
    s2_sigma = variance * math.sqrt(2.0 / (samples - 1))
    noise_sigma = math.hypot(
        s2_sigma / model.variance_gain,
        (model.channel_input_variance - VACUUM_VARIANCE) * loss_sigma,
    )
    return ChannelEstimate(
        loss=channel.loss,
        loss_sigma=loss_sigma,
        noise_photons=channel.noise_photons,
        noise_sigma=noise_sigma,
        samples=int(samples),
    )


def _point_channel(estimate: ChannelEstimate) -> ChannelParams:
    loss = min(max(estimate.loss, 0.0), 1.0 - 1e-12)
    return ChannelParams(loss, estimate.noise_photons)


@dataclass(frozen=True)
class CompositeKeyBound:
    """Finite-size secret key bound and its ingredients.

    bits_per_symbol is beta*I - chi(worst case) - Delta over the n_ec
    error-corrected symbols; bits_per_raw_symbol rescales by the
    prefactor r = n_ec * p_ec / N.
    """

    bits_per_symbol: float
    bits_per_raw_symbol: float
    prefactor: float
    n_raw: int
    n_sifted: int
    n_ec: int
    n_estimation: int
    mi_bits: float
    holevo_bits: float
    delta_bits: float
    w: float
    worst_case_loss: float | None
    worst_case_noise: float | None
    include_delta: bool
    include_estimation_penalty: bool


def composite_key(
    chain: DeviceChainParams,
    channel: ChannelParams | None = None,
    estimate: ChannelEstimate | None = None,
    *,
    n_raw: int,
    n_ec: int | None = None,
    beta_ec: float = 1.0,
    p_ec: float = 1.0,
    e_ec: float = DEFAULT_CORRECTNESS_EPSILON,
    include_delta: bool = True,
    include_estimation_penalty: bool = True,
    smoothing_epsilon: float = DEFAULT_SMOOTHING_EPSILON,
    pa_epsilon: float = DEFAULT_PA_EPSILON,
) -> CompositeKeyBound:
    """Finite-size composite secret key bound.

    Exactly one of `channel` (exact parameters) or `estimate` (measured
    parameters with standard errors) must be given. Of the N raw symbols,
    half survive sifting in expectation; `n_ec` of those carry the key
    (default: half the sifted block) and the remainder feed parameter
    estimation. The bound is r * [beta*I - chi(worst case) - Delta(n_ec)]
    with r = n_ec * p_ec / N. The two penalty flags reproduce the
    finite-size-only and estimation-only ablations; with both off the
    per-symbol bound equals the asymptotic key at the point parameters.
    """
    if (channel is None) == (estimate is None):
        raise ValueError("provide exactly one of channel or estimate")
    if n_raw < 4:
        raise ValueError("n_raw must be >= 4")
    if not 0.0 < beta_ec <= 1.0:
        raise ValueError("beta_ec must be in (0, 1]")
    if not 0.0 < p_ec <= 1.0:
        raise ValueError("p_ec must be in (0, 1]")

    n_sifted = n_raw // 2
    if n_ec is None:
        n_ec = n_sifted // 2
    if not 0 < n_ec <= n_sifted:
        raise ValueError("n_ec must be in 1..sifted length")
    n_est = n_sifted - n_ec

    point = channel if channel is not None else _point_channel(estimate)
    mi = mutual_information(snr(chain, point))

    w = 0.0
    worst_loss: float | None = None
    worst_noise: float | None = None
    if include_estimation_penalty:
        if estimate is None:
            if n_est < 2:
                raise ValueError(
                    "estimation penalty requires at least 2 estimation symbols"
                )
            estimate = predicted_estimate(chain, channel, n_est)
        w = confidence_w(e_ec)
        worst_loss, worst_noise = worst_case_params(estimate, w)
        chi = holevo_dr(chain, ChannelParams(worst_loss, worst_noise))
    else:
        chi = holevo_dr(chain, point)

    delta = (
        finite_size_delta(n_ec, smoothing_epsilon, pa_epsilon)
        if include_delta
        else 0.0
    )
    per_symbol = beta_ec * mi - chi - delta
    prefactor = n_ec * p_ec / n_raw
    return CompositeKeyBound(
        bits_per_symbol=per_symbol,
        bits_per_raw_symbol=prefactor * per_symbol,
        prefactor=prefactor,
        n_raw=int(n_raw),
        n_sifted=int(n_sifted),
        n_ec=int(n_ec),
        n_estimation=int(n_est),
        mi_bits=mi,
        holevo_bits=chi,
        delta_bits=delta,
        w=w,
        worst_case_loss=worst_loss,
        worst_case_noise=worst_noise,
        include_delta=include_delta,
        include_estimation_penalty=include_estimation_penalty,
    )


def noise_crossing(key_fn, upper: float = 1.0, tol: float = 1e-7) -> float:
    """Zero crossing of a key function decreasing in the noise photons.

    Bisection on [0, upper]; returns 0.0 if the key is not positive at 0
    and inf if it is still positive at `upper`.
    """
    if key_fn(0.0) <= 0.0:
        return 0.0
    if key_fn(upper) > 0.0:
        return math.inf
    lo, hi = 0.0, upper
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if key_fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def noise_tolerance(
    chain: DeviceChainParams, loss: float, upper: float = 1.0, tol: float = 1e-7
) -> float:
    """Largest coupled-noise level with a positive asymptotic key."""
    return noise_crossing(
        lambda nbar: asymptotic_key(chain, ChannelParams(loss, nbar)),
        upper=upper,
        tol=tol,
    )


@dataclass(frozen=True)
class SecurityReport:
    """All security figures for one parameter point, JSON-serializable."""

    snr: float
    mi_bits: float
    holevo_bits: float
    asymptotic_key_bits: float
    finite_size: CompositeKeyBound | None
    provenance: str  # "exact" or "estimated" channel parameters
    inputs: dict

    def to_dict(self) -> dict:
        data = asdict(self)
        return data

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def build_report(
    chain: DeviceChainParams,
    channel: ChannelParams | None = None,
    estimate: ChannelEstimate | None = None,
    *,
    n_raw: int | None = None,
    n_ec: int | None = None,
    beta_ec: float = 1.0,
    p_ec: float = 1.0,
    e_ec: float = DEFAULT_CORRECTNESS_EPSILON,
    include_delta: bool = True,
    include_estimation_penalty: bool = True,
    extra_inputs: dict | None = None,
) -> SecurityReport:
    """Assemble a SecurityReport, echoing every input for reproducibility.

    The asymptotic block always uses the point parameters; the
    finite-size block is included when `n_raw` is given.
    """
    if (channel is None) == (estimate is None):
        raise ValueError("provide exactly one of channel or estimate")
    point = channel if channel is not None else _point_channel(estimate)
    snr_value = snr(chain, point)
    mi = mutual_information(snr_value)
    chi = holevo_dr(chain, point)

    finite = None
    if n_raw is not None:
        finite = composite_key(
            chain,
            channel=channel,
            estimate=estimate,
            n_raw=n_raw,
            n_ec=n_ec,
            beta_ec=beta_ec,
            p_ec=p_ec,
            e_ec=e_ec,
            include_delta=include_delta,
            include_estimation_penalty=include_estimation_penalty,
        )

    inputs = {
        "chain": asdict(chain),
        "channel": asdict(point),
        "parameter_source": "estimated" if estimate is not None else "exact",
        "beta_ec": beta_ec,
        "p_ec": p_ec,
        "e_ec": e_ec,
        "n_raw": n_raw,
        "n_ec": n_ec,
        "include_delta": include_delta,
        "include_estimation_penalty": include_estimation_penalty,
    }
    if estimate is not None:
        inputs["estimate"] = asdict(estimate)
    if extra_inputs:
        inputs.update(extra_inputs)
    return SecurityReport(
        snr=snr_value,
        mi_bits=mi,
        holevo_bits=chi,
        asymptotic_key_bits=mi - chi,
        finite_size=finite,
        provenance="estimated" if estimate is not None else "exact",
        inputs=inputs,
    )
