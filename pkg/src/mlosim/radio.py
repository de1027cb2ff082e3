"""RF arithmetic: pathloss, received power, interference, achievable rate.

All SINR math happens in linear milliwatts; dBm appears only at the
boundaries. Rates follow the per-link Shannon form
B * log2(1 + P / (I + N)) summed over the active links, where I aggregates
the power received from every other AP transmitting on the same link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .scenario import MAX_LINKS, PhysicalConfig, Scenario


@dataclass(frozen=True)
class LinkSet:
    """A subset of the k links, packed as a bitmask (bit j <=> link j active)."""

    mask: int
    width: int

    def __post_init__(self) -> None:
        if not 1 <= self.width <= MAX_LINKS:
            raise ConfigError(f"link-set width must be in [1, {MAX_LINKS}], got {self.width}")
        if not 0 <= self.mask < (1 << self.width):
            raise ConfigError(
                f"mask {self.mask:#x} does not fit in {self.width} link bits"
            )

    @classmethod
    def full(cls, width: int) -> "LinkSet":
        return cls((1 << width) - 1, width)

    @classmethod
    def from_links(cls, links, width: int) -> "LinkSet":
        mask = 0
        for link in links:
            if not 0 <= link < width:
                raise ConfigError(f"link index {link} out of range for width {width}")
            mask |= 1 << link
        return cls(mask, width)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def num_active(self) -> int:
        return self.mask.bit_count()

    def contains(self, link: int) -> bool:
        return bool(self.mask >> link & 1)

    def active_links(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.width) if self.mask >> j & 1)

    def __str__(self) -> str:
        return format(self.mask, f"0{self.width}b")


@dataclass(frozen=True)
class ActivationProfile:
    """The joint action: one nonempty LinkSet per AP, all of equal width."""

    per_ap: tuple[LinkSet, ...]

    def __post_init__(self) -> None:
        if not self.per_ap:
            raise ConfigError("activation profile needs at least one AP entry")
        width = self.per_ap[0].width
        for i, ls in enumerate(self.per_ap):
            if ls.width != width:
                raise ConfigError(f"entry {i} has width {ls.width}, expected {width}")
            if ls.is_empty:
                raise ConfigError(f"entry {i} activates no links; actions must be nonempty")

    @property
    def n(self) -> int:
        return len(self.per_ap)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0:
        raise DomainError(f"power must be positive to express in dBm, got {mw} mW")
    return 10.0 * math.log10(mw)


def pathloss_db(d: float, physical: PhysicalConfig) -> float:
    """Pathloss over d meters: intercept + 10*gamma*log10(d) + wall term."""
    if d <= 0:
        raise DomainError(f"pathloss needs a positive distance, got {d} m")
    return (
        physical.pathloss_intercept_db
        + 10.0 * physical.attenuation_factor * math.log10(d)
        + physical.wall_attenuation_db_per_wall * physical.walls_per_meter * d
    )


def received_power_dbm(tx_dbm: float, d: float, physical: PhysicalConfig) -> float:
    return tx_dbm - pathloss_db(d, physical)


def link_budget_matrix_mw(scenario: Scenario) -> np.ndarray:
    """P[j, i]: power (mW) received at STA i from AP j at full TX power.

    The diagonal is each pair's own signal; off-diagonal entries are the
    potential interference contributions. Geometry is static, so this is
    computed once per world.
    """
    ap = scenario.ap_array()
    sta = scenario.sta_array()
    dist = np.sqrt(((ap[:, None, :] - sta[None, :, :]) ** 2).sum(axis=-1))
    if np.any(dist <= 0):
        raise DomainError("co-located AP/STA nodes have no defined pathloss")
    phys = scenario.physical
    loss = (
        phys.pathloss_intercept_db
        + 10.0 * phys.attenuation_factor * np.log10(dist)
        + phys.wall_attenuation_db_per_wall * phys.walls_per_meter * dist
    )
    return 10.0 ** ((phys.tx_power_dbm - loss) / 10.0)


def interference_mw(
    scenario: Scenario, profile: ActivationProfile, i: int, link: int
) -> float:
    """Aggregate power (mW) at STA i from every other AP active on `link`.

    Summed in linear milliwatts over all other APs, with no sensitivity
    cutoff; returns 0.0 when no other AP uses the link.
    """
    if profile.n != scenario.n:
        raise ConfigError(f"profile covers {profile.n} APs, scenario has {scenario.n}")
    if not 0 <= i < scenario.n:
        raise IndexError(f"AP index {i} out of range for n={scenario.n}")
    if not 0 <= link < scenario.num_links:
        raise IndexError(f"link index {link} out of range for k={scenario.num_links}")
    phys = scenario.physical
    sta_i = scenario.sta_positions[i]
    total = 0.0
    for j in range(scenario.n):
        if j == i or not profile.per_ap[j].contains(link):
            continue
        d = math.dist(scenario.ap_positions[j], sta_i)
        total += dbm_to_mw(received_power_dbm(phys.tx_power_dbm, d, phys))
    return total


def achieved_rate_bps(scenario: Scenario, profile: ActivationProfile, i: int) -> float:
    """Downlink rate of AP i under the joint profile, in bits/second."""
    if profile.n != scenario.n:
        raise ConfigError(f"profile covers {profile.n} APs, scenario has {scenario.n}")
    if not 0 <= i < scenario.n:
        raise IndexError(f"AP index {i} out of range for n={scenario.n}")
    own = profile.per_ap[i]
    if own.is_empty:
        raise ConfigError(f"AP {i} has no active links")
    phys = scenario.physical
    d_own = math.dist(scenario.ap_positions[i], scenario.sta_positions[i])
    signal_mw = dbm_to_mw(received_power_dbm(phys.tx_power_dbm, d_own, phys))
    noise_mw = dbm_to_mw(phys.noise_floor_dbm)
    rate = 0.0
    for link in own.active_links():
        sinr = signal_mw / (interference_mw(scenario, profile, i, link) + noise_mw)
        rate += phys.bandwidth_hz_per_link * math.log2(1.0 + sinr)
    return rate
