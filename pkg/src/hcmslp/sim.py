"""Monte-Carlo SER sweeps.

One trial is one channel realization (one coherence block): draw H, G, F,
choose the RIS phases once per phase option, then for every symbol slot draw
uniform symbol indices, precode, add noise at each transmit power and detect.

Random streams are keyed, not sequential: channel and phase draws use
``spawn_key=(trial, 0, ...)`` and slot ``j`` uses ``(trial, j + 1)``, so a
longer run reproduces every trial of a shorter one.  All schemes and phase
options see the same channel, symbol indices and unit noise samples.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc
from scipy.stats import binomtest

from hcmslp.channel import ChannelSet, gen_channels, total_channel
from hcmslp.config import SimConfig, dbm_to_watt
from hcmslp.constellation import Constellation, build_hcm, build_qam, detect
from hcmslp.phases import parse_phase_option, phase_for
from hcmslp.slp import hcm_slp, qam_slp, zf_precode

log = logging.getLogger(__name__)

CSV_HEADER = ("scheme", "order", "Q", "power_dbm", "symbols", "errors", "ser",
              "ci_lo", "ci_hi", "infeasible", "seed")
SCATTER_HEADER = ("user", "re", "im", "class")


@dataclass(frozen=True)
class SerRecord:
    scheme: str
    order: int
    Q: str
    power_dbm: float
    symbols: int
    errors: int
    infeasible: int
    seed: int

    @property
    def ser(self) -> float:
        return self.errors / self.symbols if self.symbols else float("nan")

    @property
    def wilson_ci_95(self) -> tuple[float, float]:
        if not self.symbols:
            return float("nan"), float("nan")
        ci = binomtest(self.errors, self.symbols).proportion_ci(0.95, method="wilson")
        return float(ci.low), float(ci.high)


def slot_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def _phase_key(option) -> int:
    mode, Q = parse_phase_option(option)
    return Q if mode == "refined" else 1000 + Q


def constellation_for(scheme: str, order: int) -> Constellation:
    return build_hcm(order) if scheme.startswith("HCM") else build_qam(order)


def precode(scheme: str, H_T: np.ndarray, s: np.ndarray, c: Constellation, exact_limit: int = 16):
    """Unscaled transmit vector ``x`` (complex) and ``xi``, or ``None`` when infeasible."""
    if scheme == "QAM-ZF":
        return zf_precode(H_T, c.values[s])
    if scheme == "QAM-SLP":
        sol = qam_slp(H_T, s, c)
    else:
        sol = hcm_slp(H_T, s, c, exact=scheme == "HCM-SLP-EXACT", limit=exact_limit)
    if sol.status == "infeasible":
        return None
    return sol.x, sol.xi


def rescaled_receive(y0, xi, P_t, sigma2, unit_noise):
    """``H x + sqrt(xi / P_t) v`` given ``unit_noise ~ CN(0, 1)``; broadcasts over powers."""
    return y0 + np.sqrt(xi * sigma2 / np.asarray(P_t))[..., None] * unit_noise


def unit_noise(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def simulate_block(H_T, schemes, order, powers_w, sigma2, n_slots, seed, key=(), exact_limit=16):
    """Errors on a fixed total channel.

    Returns ``{scheme: (symbols[P], errors[P], infeasible)}``.  Slot ``j`` draws
    from ``slot_rng(seed, *key, j + 1)``.
    """
    H_T = np.atleast_2d(H_T)
    K = H_T.shape[0]
    powers_w = np.asarray(powers_w, dtype=float)
    consts = {s: constellation_for(s, order) for s in schemes}
    out = {s: [np.zeros(powers_w.size, dtype=np.int64), np.zeros(powers_w.size, dtype=np.int64), 0]
           for s in schemes}
    for j in range(n_slots):
        rng = slot_rng(seed, *key, j + 1)
        s_idx = rng.integers(0, order, size=K)
        noise = unit_noise(rng, (powers_w.size, K))
        for scheme in schemes:
            c = consts[scheme]
            res = precode(scheme, H_T, s_idx, c, exact_limit)
            acc = out[scheme]
            if res is None:
                acc[2] += 1
                continue
            x, xi = res
            y = rescaled_receive(H_T @ x, xi, powers_w, sigma2, noise)
            acc[0] += K
            acc[1] += np.count_nonzero(detect(c, y) != s_idx, axis=1)
    return {s: (v[0], v[1], v[2]) for s, v in out.items()}


def trial_channel(cfg: SimConfig, trial: int) -> ChannelSet:
    rng = slot_rng(cfg.run.seed, trial, 0)
    geom = cfg.geometry.with_random_users(rng) if cfg.run.random_users else cfg.geometry
    return gen_channels(geom, cfg.fading, rng)


def trial_total_channel(cfg: SimConfig, trial: int, option, ch: ChannelSet | None = None):
    ch = trial_channel(cfg, trial) if ch is None else ch
    rng = slot_rng(cfg.run.seed, trial, 0, _phase_key(option))
    return total_channel(ch, phase_for(ch, option, rng, cfg.run.max_sweeps))


def run_trial(cfg: SimConfig, trial: int) -> dict:
    r = cfg.run
    ch = trial_channel(cfg, trial)
    powers_w = dbm_to_watt(r.powers_dbm)
    out = {}
    for option in r.phases:
        H_T = trial_total_channel(cfg, trial, option, ch)
        block = simulate_block(H_T, r.schemes, r.order, powers_w, cfg.sigma2,
                               r.symbols_per_trial, r.seed, key=(trial,),
                               exact_limit=r.exact_limit)
        for scheme, v in block.items():
            out[(scheme, str(option))] = v
    return out


def _run_trial_args(args):
    return run_trial(*args)


def run_sweep(cfg: SimConfig, trials: range | None = None) -> list[SerRecord]:
    r = cfg.run
    trials = range(r.trials) if trials is None else trials
    if r.workers > 1:
        with ProcessPoolExecutor(r.workers) as ex:
            results = list(ex.map(_run_trial_args, [(cfg, t) for t in trials]))
    else:
        results = []
        for t in trials:
            results.append(run_trial(cfg, t))
            log.debug("trial %d done", t)
    records = []
    for option in r.phases:
        for scheme in r.schemes:
            key = (scheme, str(option))
            sym = sum(res[key][0] for res in results)
            err = sum(res[key][1] for res in results)
            inf = sum(res[key][2] for res in results)
            for p, power in enumerate(r.powers_dbm):
                records.append(SerRecord(scheme, r.order, str(option), float(power),
                                         int(sym[p]), int(err[p]), int(inf), r.seed))
    return records


def emit_csv(records, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for rec in records:
                lo, hi = rec.wilson_ci_95
                w.writerow([rec.scheme, rec.order, rec.Q, repr(rec.power_dbm), rec.symbols,
                            rec.errors, repr(rec.ser), repr(lo), repr(hi), rec.infeasible, rec.seed])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror}") from exc


def read_csv(path) -> list[SerRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [SerRecord(r["scheme"], int(r["order"]), r["Q"], float(r["power_dbm"]),
                      int(r["symbols"]), int(r["errors"]), int(r["infeasible"]), int(r["seed"]))
            for r in rows]


def noise_free_scatter(cfg: SimConfig, n_slots: int, scheme: str = "HCM-SLP", option=None):
    """Noise-free rescaled receives ``(user, re, im, class)`` over ``n_slots`` slots.

    Slots cycle over trials, ``symbols_per_trial`` per channel realization.
    """
    r = cfg.run
    option = r.phases[0] if option is None else option
    c = constellation_for(scheme, r.order)
    rows = []
    trial, H_T = -1, None
    for j in range(n_slots):
        t, slot = divmod(j, r.symbols_per_trial)
        if t != trial:
            trial, H_T = t, trial_total_channel(cfg, t, option)
        rng = slot_rng(r.seed, t, slot + 1)
        s_idx = rng.integers(0, r.order, size=H_T.shape[0])
        res = precode(scheme, H_T, s_idx, c, r.exact_limit)
        if res is None:
            continue
        y0 = H_T @ res[0]
        for k, (yk, si) in enumerate(zip(y0, s_idx)):
            rows.append((k, float(yk.real), float(yk.imag), c.points[si].symbol_class.value))
    return rows


def emit_constellation_scatter(rows, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SCATTER_HEADER)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write scatter to {path}: {exc.strerror}") from exc


def _qfunc(x):
    return 0.5 * erfc(x / np.sqrt(2.0))


def qam_error_probability(c: Constellation, idx, sigma_dim) -> np.ndarray:
    """Exact AWGN error probability of QAM point(s) ``idx`` with per-dimension noise std."""
    edge = np.abs(c.outward[idx]) == 1
    q = _qfunc(1.0 / np.asarray(sigma_dim))
    p_re = np.where(edge[..., 0], q, 2 * q)
    p_im = np.where(edge[..., 1], q, 2 * q)
    return 1.0 - (1.0 - p_re) * (1.0 - p_im)


def calibrate_zf_power(cfg: SimConfig, target_ser: float = 1e-2, option=None,
                       pilot_trials: int = 10, pilot_slots: int = 200) -> float:
    """Transmit power (dBm) at which QAM-ZF's expected SER equals ``target_ser``.

    Uses the exact conditional AWGN error probability of each ZF slot, so no
    noise is simulated; pilot slots reuse the sweep's own random streams.
    """
    r = cfg.run
    option = r.phases[0] if option is None else option
    c = build_qam(r.order)
    xis, idxs = [], []
    for t in range(pilot_trials):
        H_T = trial_total_channel(cfg, t, option)
        for j in range(pilot_slots):
            s_idx = slot_rng(r.seed, t, j + 1).integers(0, r.order, size=H_T.shape[0])
            xis.append(zf_precode(H_T, c.values[s_idx])[1])
            idxs.append(s_idx)
    xis = np.array(xis)[:, None]
    idxs = np.array(idxs)

    def ser_minus_target(p_dbm):
        sigma_dim = np.sqrt(xis * cfg.sigma2 / (2.0 * dbm_to_watt(p_dbm)))
        return float(np.mean(qam_error_probability(c, idxs, sigma_dim))) - target_ser

    return float(brentq(ser_minus_target, -50.0, 200.0, xtol=1e-3))


__all__ = [
    "SerRecord",
    "run_sweep",
    "run_trial",
    "simulate_block",
    "emit_csv",
    "read_csv",
    "noise_free_scatter",
    "emit_constellation_scatter",
    "calibrate_zf_power",
    "qam_error_probability",
    "precode",
]
