"""Slot-level Monte Carlo of n_W Wi-Fi APs and n_C LBT base stations.

The time axis is the channel-state epoch: an idle slot or one whole
transmission (success or collision). Every node makes exactly one state
transition per epoch, following the same rules as the analytical chains:

Wi-Fi AP
    post-backoff counters and backoff counters decrement once per epoch
    (``wifi_freeze=True`` instead holds them over busy epochs);
    a packet arrives with probability q_W at each transition; at (0,0)_e a
    fresh arrival goes out immediately if the previous epoch was idle (as
    seen by this AP) and is deferred to backoff stage 0 otherwise; on a
    collision the window doubles up to stage m.
LBT base station
    counters decrement only over idle epochs; a busy epoch re-draws the
    counter uniformly from [0, Z-1]; the window is fixed; at counter 0 the
    station transmits without further sensing.

Random numbers come from one Philox stream per node per replication
(numpy SeedSequence spawning), two uniforms per node per epoch.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np
from scipy import stats

from .airtime import AirtimeShares, FrameDurations, ThroughputReport, frame_durations
from .config import CoexConfig, validate
from .parallel import ordered_map
from .solver import FixedPoint

PRNG_ALGORITHM = "numpy.random.Philox (Philox4x64-10), SeedSequence.spawn per replication and node"
MIN_MEASURED_EPOCHS = 10_000
TRACE_CAP = 100_000
CHUNK = 1 << 15

# counter columns
_EPOCHS, _TIME, _ATT_W, _COL_W, _SUC_W, _ATT_C, _COL_C, _SUC_C = range(8)
_CLASS0 = 8
_NCOUNT = _CLASS0 + 6
CLASS_NAMES = AirtimeShares.CLASSES


class SimBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    base: CoexConfig
    slots: int = 1_000_000
    warmup_slots: int = 10_000
    replications: int = 20
    seed: int = 0
    batches: int = 10
    trace_epochs: int = 0
    wifi_freeze: bool = False

    def __post_init__(self):
        validate(self.base)
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.warmup_slots < 0:
            raise ValueError("warmup_slots must be >= 0")
        if self.slots - self.warmup_slots < MIN_MEASURED_EPOCHS:
            raise SimBudgetError(
                f"simulation budget too small: slots={self.slots} with warmup_slots="
                f"{self.warmup_slots} leaves {self.slots - self.warmup_slots} measured epochs "
                f"per replication; need at least {MIN_MEASURED_EPOCHS}")
        if self.batches < 1:
            raise ValueError("batches must be >= 1")
        if not 0 <= self.trace_epochs <= TRACE_CAP:
            raise ValueError(f"trace_epochs must be in [0, {TRACE_CAP}]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width: float

    def contains(self, value: float) -> bool:
        return abs(value - self.mean) <= self.half_width


@dataclass(frozen=True)
class SimEstimates:
    tau_W: Estimate
    tau_C: Estimate
    p_W: Estimate
    p_C: Estimate
    S_W: Estimate
    S_C: Estimate
    T_state: Estimate
    airtime: dict[str, Estimate] = field(repr=False)
    measured_epochs: int = 0
    seed: int = 0
    prng: str = PRNG_ALGORITHM


@numba.njit(cache=True, nogil=True)
def _advance(U, t0, n_W, n_C, q_W, q_C, W0, m, Z, durs, warmup, measured, nb, freeze,
             stage, k, prev_busy, tx, imm, counts, tr_cls, tr_dur, tr_stage, tr_k):
    N = n_W + n_C
    n_tr = tr_cls.shape[0]
    for s in range(U.shape[0]):
        t = t0 + s
        nw = 0
        nc = 0
        for j in range(N):
            tx[j] = False
            imm[j] = False
            q = q_W if j < n_W else q_C
            if stage[j] >= 0:
                if k[j] == 0:
                    tx[j] = True
            elif k[j] == 0 and U[s, j, 0] < q and not prev_busy[j]:
                tx[j] = True
                imm[j] = True
            if tx[j]:
                if j < n_W:
                    nw += 1
                else:
                    nc += 1
        ntx = nw + nc
        if ntx == 0:
            cls = 0
        elif nc == 0:
            cls = 1 if nw == 1 else 3
        elif nw == 0:
            cls = 2 if nc == 1 else 4
        else:
            cls = 5
        dur = durs[cls]
        if t < n_tr:
            tr_cls[t] = cls
            tr_dur[t] = dur
        if t >= warmup:
            b = (t - warmup) * nb // measured
            counts[b, _EPOCHS] += 1.0
            counts[b, _TIME] += dur
            counts[b, _CLASS0 + cls] += 1.0

        for j in range(N):
            wifi = j < n_W
            q = q_W if wifi else q_C
            a = U[s, j, 0]
            u = U[s, j, 1]
            busy = (ntx - (1 if tx[j] else 0)) > 0
            if tx[j]:
                if t >= warmup:
                    base = _ATT_W if wifi else _ATT_C
                    counts[b, base] += 1.0
                    if busy:
                        counts[b, base + 1] += 1.0
                    else:
                        counts[b, base + 2] += 1.0
                if wifi:
                    if busy:
                        st = 1 if stage[j] < 0 else stage[j] + 1
                        if st > m:
                            st = m
                        stage[j] = st
                        k[j] = int(u * (W0 << st))
                    else:
                        if not imm[j] and a < q:
                            stage[j] = 0
                        else:
                            stage[j] = -1
                        k[j] = int(u * W0)
                else:
                    if busy:
                        stage[j] = 0
                    elif not imm[j] and a < q:
                        stage[j] = 0
                    else:
                        stage[j] = -1
                    k[j] = int(u * Z)
            elif wifi:
                hold = freeze and busy
                if stage[j] >= 0:
                    if not hold:
                        k[j] -= 1
                elif k[j] > 0:
                    if not hold:
                        k[j] -= 1
                    if a < q:
                        stage[j] = 0
                elif a < q:
                    # arrival at (0,0)_e with the channel sensed busy
                    stage[j] = 0
                    k[j] = int(u * W0)
            else:
                if stage[j] >= 0:
                    if busy:
                        k[j] = int(u * Z)
                    else:
                        k[j] -= 1
                elif k[j] > 0:
                    if busy:
                        k[j] = int(u * Z)
                    else:
                        k[j] -= 1
                    if a < q:
                        stage[j] = 0
                elif a < q:
                    stage[j] = 0
                    k[j] = int(u * Z)
            prev_busy[j] = busy
            if t < n_tr:
                tr_stage[t, j] = stage[j]
                tr_k[t, j] = k[j]


def _streams(seed: int, replication: int, n_nodes: int):
    root = np.random.SeedSequence(seed)
    rep_seq = root.spawn(replication + 1)[replication]
    return [np.random.Generator(np.random.Philox(s)) for s in rep_seq.spawn(n_nodes + 1)]


def _durations_array(d: FrameDurations) -> np.ndarray:
    return np.array([d.sigma, d.T_s_W, d.T_s_C, d.T_c_W, d.T_c_C, d.T_c_M])


def run_replication(sim: SimConfig, replication: int, trace: dict | None = None) -> np.ndarray:
    """Per-batch counters (batches x columns) of one replication."""
    c = sim.base
    N = c.n_W + c.n_C
    gens = _streams(sim.seed, replication, N)
    node_gens, init_gen = gens[:N], gens[N]
    stage = np.full(N, -1, dtype=np.int64)
    W_init = np.array([c.W0] * c.n_W + [c.Z] * c.n_C)
    k = (init_gen.random(N) * W_init).astype(np.int64)
    prev_busy = np.zeros(N, dtype=np.bool_)
    tx = np.zeros(N, dtype=np.bool_)
    imm = np.zeros(N, dtype=np.bool_)
    counts = np.zeros((sim.batches, _NCOUNT))
    durs = _durations_array(frame_durations(c))
    n_tr = sim.trace_epochs if trace is not None else 0
    tr_cls = np.zeros(n_tr, dtype=np.int64)
    tr_dur = np.zeros(n_tr)
    tr_stage = np.zeros((n_tr, N), dtype=np.int64)
    tr_k = np.zeros((n_tr, N), dtype=np.int64)
    measured = sim.slots - sim.warmup_slots
    t = 0
    while t < sim.slots:
        n = min(CHUNK, sim.slots - t)
        U = np.empty((n, N, 2))
        for j, g in enumerate(node_gens):
            U[:, j, :] = g.random((n, 2))
        _advance(U, t, c.n_W, c.n_C, float(c.q_W), float(c.q_C), c.W0, c.m, c.Z, durs,
                 sim.warmup_slots, measured, sim.batches, sim.wifi_freeze, stage, k, prev_busy, tx, imm,
                 counts, tr_cls, tr_dur, tr_stage, tr_k)
        t += n
    if trace is not None:
        trace.update(cls=tr_cls, dur=tr_dur, stage=tr_stage, k=tr_k)
    return counts


def _ci(values: np.ndarray, point: float) -> Estimate:
    n = len(values)
    if n < 2:
        return Estimate(point, float("inf"))
    sd = float(np.std(values, ddof=1))
    return Estimate(point, float(stats.t.ppf(0.975, n - 1) * sd / math.sqrt(n)))


def _ratio(num: np.ndarray, den: np.ndarray, scale: float = 1.0) -> Estimate:
    total = float(den.sum())
    if total == 0.0:
        return Estimate(0.0, 0.0)
    point = float(num.sum()) / total * scale
    with np.errstate(invalid="ignore", divide="ignore"):
        per = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0) * scale
    return _ci(per, point)


def estimates_from_counts(counts: np.ndarray, config: CoexConfig, seed: int = 0) -> SimEstimates:
    """Pool per-batch counters (any leading shape) into estimates with batch-means CIs."""
    C = counts.reshape(-1, _NCOUNT)
    ep, time = C[:, _EPOCHS], C[:, _TIME]
    nW, nC = config.n_W, config.n_C
    tau_W = _ratio(C[:, _ATT_W], ep * nW) if nW else Estimate(0.0, 0.0)
    tau_C = _ratio(C[:, _ATT_C], ep * nC) if nC else Estimate(0.0, 0.0)
    airtime = {name: _ratio(C[:, _CLASS0 + i], ep) for i, name in enumerate(CLASS_NAMES)}
    return SimEstimates(
        tau_W=tau_W, tau_C=tau_C,
        p_W=_ratio(C[:, _COL_W], C[:, _ATT_W]),
        p_C=_ratio(C[:, _COL_C], C[:, _ATT_C]),
        S_W=_ratio(C[:, _SUC_W] * config.D_W, time * max(nW, 1), 1e6) if nW else Estimate(0.0, 0.0),
        S_C=_ratio(C[:, _SUC_C] * config.D_C, time * max(nC, 1), 1e6) if nC else Estimate(0.0, 0.0),
        T_state=_ratio(time, ep),
        airtime=airtime,
        measured_epochs=int(ep.sum()),
        seed=seed,
    )


def simulate(sim: SimConfig, *, workers: int | None = 1, trace: dict | None = None) -> SimEstimates:
    """Run all replications (concurrently if ``workers`` > 1) and pool them.

    If ``trace`` is a dict it receives the per-epoch trace of replication 0.
    """
    def one(r: int) -> np.ndarray:
        return run_replication(sim, r, trace if r == 0 else None)

    counts = np.stack(ordered_map(one, range(sim.replications), workers=workers, threads=True))
    return estimates_from_counts(counts, sim.base, sim.seed)


@dataclass(frozen=True)
class Divergence:
    quantity: str
    analytic: float
    simulated: float
    half_width: float
    z_score: float
    rel_error: float
    within_ci: bool


DIVERGENCE_COLUMNS = ("quantity", "analytic", "simulated", "ci_half_width", "z_score",
                      "rel_error", "within_ci")


def compare(sim: SimEstimates, analytic: tuple[FixedPoint, ThroughputReport],
            config: CoexConfig) -> list[Divergence]:
    """Per-quantity z-scores and relative errors of the analytic values.

    Quantities of a technology with no nodes or no traffic are skipped.
    """
    fp, rep = analytic
    pairs = []
    if config.n_W and config.q_W > 0:
        pairs += [("tau_W", fp.tau_W, sim.tau_W), ("p_W", fp.p_W, sim.p_W),
                  ("S_W", rep.S_W, sim.S_W)]
    if config.n_C and config.q_C > 0:
        pairs += [("tau_C", fp.tau_C, sim.tau_C), ("p_C", fp.p_C, sim.p_C),
                  ("S_C", rep.S_C, sim.S_C)]
    pairs.append(("T_state", rep.T_state, sim.T_state))
    out = []
    for name, a, est in pairs:
        diff = a - est.mean
        sd = est.half_width / 1.959963984540054
        if diff == 0.0:
            z = 0.0
        else:
            z = diff / sd if sd > 0 else math.copysign(math.inf, diff)
        rel = 0.0 if diff == 0.0 else abs(diff) / abs(est.mean) if est.mean else math.inf
        out.append(Divergence(name, a, est.mean, est.half_width, z, rel, est.contains(a)))
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def write_divergence_csv(rows: list[Divergence], path=None) -> str:
    buf = io.StringIO()
    buf.write("# lbt_coex divergence csv schema v1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DIVERGENCE_COLUMNS)
    for d in rows:
        w.writerow([_fmt(v) for v in (d.quantity, d.analytic, d.simulated, d.half_width,
                                      d.z_score, d.rel_error, d.within_ci)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def write_trace_csv(trace: dict, config: CoexConfig, path=None) -> str:
    N = config.n_W + config.n_C
    names = [f"w{j}" for j in range(config.n_W)] + [f"c{j}" for j in range(config.n_C)]
    buf = io.StringIO()
    buf.write("# lbt_coex epoch-trace csv schema v1 (stage -1 = post-backoff)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epoch", "class", "duration_us"]
               + [f"{n}_{f}" for n in names for f in ("stage", "k")])
    for t in range(len(trace["cls"])):
        row = [t, CLASS_NAMES[trace["cls"][t]], repr(float(trace["dur"][t]))]
        for j in range(N):
            row += [int(trace["stage"][t, j]), int(trace["k"][t, j])]
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
