"""Airtime model: frame durations, per-state time and throughput."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

from .config import CoexConfig
from .solver import FixedPoint

US_PER_S = 1e6


@dataclass(frozen=True)
class FrameDurations:
    """Durations in microseconds."""

    sigma: float
    T_s_W: float
    T_s_C: float
    T_c_W: float
    T_c_C: float
    T_c_M: float


@dataclass(frozen=True)
class AirtimeShares:
    """Probability that a channel state falls into each outcome class."""

    idle: float
    wifi_success: float
    cell_success: float
    wifi_collision: float
    cell_collision: float
    mixed_collision: float

    CLASSES = ("idle", "wifi_success", "cell_success", "wifi_collision",
               "cell_collision", "mixed_collision")

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)

    def total(self) -> float:
        return sum(self.as_tuple())


@dataclass(frozen=True)
class ThroughputReport:
    """Per-node throughputs in bits/s; T_state in microseconds."""

    S_W: float
    S_C: float
    S_total: float
    T_state: float
    shares: AirtimeShares


def _tx_time_us(bits: float, rate: float) -> float:
    return bits / rate * US_PER_S


def frame_durations(config: CoexConfig) -> FrameDurations:
    """Basic-access timing: header + payload, SIFS + ACK on success, DIFS after.

    Headers and ACKs serialize at the node's own rate. A collision lasts as
    long as the longest frame involved, so the mixed case takes the larger of
    the two intra-technology collision times.
    """
    c = config
    delta = c.prop_delay_us
    hdr = c.phy_header_bits + c.mac_header_bits
    ack = c.ack_bits + c.phy_header_bits

    def pair(R: float, D: float) -> tuple[float, float]:
        frame = _tx_time_us(hdr + D, R)
        T_s = frame + c.sifs_us + delta + _tx_time_us(ack, R) + c.difs_us + delta
        T_c = frame + c.difs_us + delta
        return T_s, T_c

    T_s_W, T_c_W = pair(c.R_W, c.D_W)
    T_s_C, T_c_C = pair(c.R_C, c.D_C)
    return FrameDurations(sigma=c.sigma_us, T_s_W=T_s_W, T_s_C=T_s_C,
                          T_c_W=T_c_W, T_c_C=T_c_C, T_c_M=max(T_c_W, T_c_C))


def ptr_ps(tau: float, n: int) -> tuple[float, float]:
    """(P_tr, P_s): at least one of n nodes transmits; exactly one, given that."""
    if n <= 0 or tau <= 0.0:
        return 0.0, 0.0
    P_tr = 1.0 if tau >= 1.0 else -math.expm1(n * math.log1p(-tau))
    return P_tr, n * tau * (1.0 - tau) ** (n - 1) / P_tr


def _single(tau: float, n: int) -> float:
    # P_tr * P_s without the 0/0 at tau = 0
    if n <= 0:
        return 0.0
    return n * tau * (1.0 - tau) ** (n - 1)


def airtime_shares(fp: FixedPoint, config: CoexConfig) -> AirtimeShares:
    PtW, _ = ptr_ps(fp.tau_W, config.n_W)
    PtC, _ = ptr_ps(fp.tau_C, config.n_C)
    sW = _single(fp.tau_W, config.n_W)
    sC = _single(fp.tau_C, config.n_C)
    return AirtimeShares(
        idle=(1.0 - PtW) * (1.0 - PtC),
        wifi_success=sW * (1.0 - PtC),
        cell_success=(1.0 - PtW) * sC,
        wifi_collision=max(PtW - sW, 0.0) * (1.0 - PtC),
        cell_collision=(1.0 - PtW) * max(PtC - sC, 0.0),
        mixed_collision=PtW * PtC,
    )


def expected_slot_time(fp: FixedPoint, durations: FrameDurations,
                       config: CoexConfig) -> tuple[float, AirtimeShares]:
    sh = airtime_shares(fp, config)
    d = durations
    T = (sh.idle * d.sigma + sh.wifi_success * d.T_s_W + sh.cell_success * d.T_s_C
         + sh.wifi_collision * d.T_c_W + sh.cell_collision * d.T_c_C
         + sh.mixed_collision * d.T_c_M)
    return T, sh


def throughputs(fp: FixedPoint, durations: FrameDurations | None,
                config: CoexConfig) -> ThroughputReport:
    if durations is None:
        durations = frame_durations(config)
    T, sh = expected_slot_time(fp, durations, config)
    S_W = sh.wifi_success * config.D_W / T * US_PER_S / config.n_W if config.n_W else 0.0
    S_C = sh.cell_success * config.D_C / T * US_PER_S / config.n_C if config.n_C else 0.0
    return ThroughputReport(S_W=S_W, S_C=S_C, S_total=config.n_W * S_W + config.n_C * S_C,
                            T_state=T, shares=sh)


def analyze(config: CoexConfig, **solver_kwargs) -> tuple[FixedPoint, ThroughputReport]:
    """Solve the operating point of ``config`` and evaluate its throughputs."""
    from .solver import solve_fixed_point

    fp = solve_fixed_point(config, **solver_kwargs)
    return fp, throughputs(fp, frame_durations(config), config)
