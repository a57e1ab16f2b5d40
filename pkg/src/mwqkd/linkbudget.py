"""Physical reach of the protocol: tolerable loss versus background
occupation, loss-to-distance mapping for a transmission medium, and the
raw secret key rate over a measurement bandwidth.

The background couples in through the channel loss tap itself, so a
channel of loss eps against an environment of occupation n_th carries
nbar = n_th * eps / 2 coupled noise photons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import Boltzmann, Planck

from .devices import ChannelParams, DeviceChainParams
from .security import asymptotic_key

# Carrier used for the cryogenic medium's background occupation.
CARRIER_FREQUENCY_HZ = 5.48e9

BISECTION_TOL = 1e-6


@dataclass(frozen=True)
class MediumSpec:
    """Transmission medium: absorption per meter and background occupation."""

    attenuation_db_per_m: float
    background_photons: float
    label: str

    def __post_init__(self) -> None:
        if not self.attenuation_db_per_m > 0.0:
            raise ValueError("attenuation_db_per_m must be > 0")
        if self.background_photons < 0.0:
            raise ValueError("background_photons must be >= 0")


def thermal_occupancy(temperature_k: float, frequency_hz: float) -> float:
    """Bose-Einstein occupation of a mode at the given temperature.

    Convenience helper; medium specs take the occupation directly.
    """
    if not (temperature_k > 0.0 and frequency_hz > 0.0):
        raise ValueError("temperature and frequency must be > 0")
    x = Planck * frequency_hz / (Boltzmann * temperature_k)
    if x > 700.0:  # exp would overflow; occupation is already < 1e-300
        return 0.0
    return 1.0 / math.expm1(x)


# Superconducting cable at millikelvin temperature vs a room-temperature
# free-space path. The open-air background is the conventional value at a
# ~5 GHz carrier and 300 K.
CRYO_LINK = MediumSpec(
    attenuation_db_per_m=1.0e-3,
    background_photons=thermal_occupancy(0.015, CARRIER_FREQUENCY_HZ),
    label="cryo-15mK",
)
OPEN_AIR = MediumSpec(
    attenuation_db_per_m=6.3e-6,
    background_photons=1250.0,
    label="openair-300K",
)
MEDIA = {medium.label: medium for medium in (CRYO_LINK, OPEN_AIR)}


def max_tolerable_loss(
    chain: DeviceChainParams,
    background_photons: float,
    tol: float = BISECTION_TOL,
) -> float:
    """Largest channel loss with a positive asymptotic key.

    Bisection to `tol` absolute on the loss, with the coupled noise tied
    to the loss as nbar = background * eps / 2. Returns 0.0 when no loss
    is tolerable at all.
    """
    if background_photons < 0.0:
        raise ValueError("background_photons must be >= 0")

    def key(eps: float) -> float:
        return asymptotic_key(
            chain, ChannelParams(eps, 0.5 * background_photons * eps)
        )

    lo, hi = 1e-12, 1.0 - 1e-9
    if key(lo) <= 0.0:
        return 0.0
    if key(hi) > 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if key(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def loss_to_distance(loss: float, attenuation_db_per_m: float) -> float:
    """Distance in meters over which a medium accumulates the given loss."""
    if not 0.0 <= loss < 1.0:
        raise ValueError("loss must be in [0, 1)")
    if not attenuation_db_per_m > 0.0:
        raise ValueError("attenuation_db_per_m must be > 0")
    return -10.0 * math.log10(1.0 - loss) / attenuation_db_per_m


def distance_to_loss(distance_m: float, attenuation_db_per_m: float) -> float:
    """Inverse of :func:`loss_to_distance`."""
    if distance_m < 0.0:
        raise ValueError("distance_m must be >= 0")
    if not attenuation_db_per_m > 0.0:
        raise ValueError("attenuation_db_per_m must be > 0")
    return 1.0 - 10.0 ** (-attenuation_db_per_m * distance_m / 10.0)


def distance_limit(chain: DeviceChainParams, medium: MediumSpec) -> float:
    """Maximum reach in meters of a chain over a medium."""
    eps_max = max_tolerable_loss(chain, medium.background_photons)
    return loss_to_distance(eps_max, medium.attenuation_db_per_m)


def raw_key_rate(
    chain: DeviceChainParams,
    channel: ChannelParams,
    bandwidth_hz: float,
    key_bits: float | None = None,
) -> float:
    """Secret key rate in bits/s over a measurement bandwidth.

    Uses the asymptotic key per symbol unless a precomputed `key_bits`
    (for example a composite bound) is supplied; a non-positive key gives
    rate 0.
    """
    if not bandwidth_hz > 0.0:
        raise ValueError("bandwidth_hz must be > 0")
    key = asymptotic_key(chain, channel) if key_bits is None else key_bits
    return bandwidth_hz * max(key, 0.0)


def sweep_occupancy(
    chain: DeviceChainParams,
    occupancies,
    attenuation_db_per_m: float,
) -> list[tuple[float, float, float]]:
    """Rows (background occupation, max tolerable loss, distance limit)."""
    rows = []
    for n_th in occupancies:
        eps_max = max_tolerable_loss(chain, float(n_th))
        rows.append(
            (float(n_th), eps_max, loss_to_distance(eps_max, attenuation_db_per_m))
        )
    return rows
