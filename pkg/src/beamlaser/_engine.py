"""Chunked trajectory engine.

All randomness (injection counts, per-atom attributes, step noise) is drawn
up front in fixed-size chunks with a single numpy Generator, then a jitted
kernel consumes it step by step: retire -> inject -> RK4 -> record.  The
chunk size is a fixed constant, so a seed fully determines the run.  Without
numba the same kernel body runs as plain Python (slow, small runs only).
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .config import InjectionMode, SimConfig, config_hash
from .dynamics import FieldRecord
from .ensemble import PumpPhaseWalk, draw_atom_batch

CHUNK_STEPS = 65536

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


def _kernel_chunk(step0, nsteps, counts, xi_p, xi_q,
                  in_sx, in_sy, in_sz, in_eta, in_gd, in_gc, in_exit,
                  sx, sy, sz, eta, gd, gc, exit_step,
                  y0x, y0y, y0z, stx, sty, stz, kx, ky, kz, ax, ay, az,
                  head, tail, in_ptr,
                  dt, inv_sqrt_g0, paper_literal,
                  burn_steps, record_every, pref,
                  rec_jx, rec_jy, rec_n):
    rec_count = 0
    err_step = -1
    cap = sx.shape[0]
    for i in range(nsteps):
        s = step0 + i
        while head < tail and exit_step[head] <= s:
            head += 1
        m = counts[i]
        if m > 0:
            if tail + m > cap:
                na = tail - head
                for j in range(na):
                    sx[j] = sx[head + j]
                    sy[j] = sy[head + j]
                    sz[j] = sz[head + j]
                    eta[j] = eta[head + j]
                    gd[j] = gd[head + j]
                    gc[j] = gc[head + j]
                    exit_step[j] = exit_step[head + j]
                head = 0
                tail = na
            for j in range(m):
                sx[tail + j] = in_sx[in_ptr + j]
                sy[tail + j] = in_sy[in_ptr + j]
                sz[tail + j] = in_sz[in_ptr + j]
                eta[tail + j] = in_eta[in_ptr + j]
                gd[tail + j] = in_gd[in_ptr + j]
                gc[tail + j] = in_gc[in_ptr + j]
                exit_step[tail + j] = in_exit[in_ptr + j]
            tail += m
            in_ptr += m

        n_act = tail - head
        if n_act > 0:
            xp = xi_p[i]
            xq = xi_q[i]
            for j in range(n_act):
                jj = head + j
                y0x[j] = sx[jj]
                y0y[j] = sy[jj]
                y0z[j] = sz[jj]
                stx[j] = sx[jj]
                sty[j] = sy[jj]
                stz[j] = sz[jj]
            fjx = 0.0
            fjy = 0.0
            if paper_literal:
                for j in range(n_act):
                    fjx += eta[head + j] * y0x[j]
                    fjy += eta[head + j] * y0y[j]
            for stage in range(4):
                if paper_literal:
                    jx_s = fjx
                    jy_s = fjy
                else:
                    jx_s = 0.0
                    jy_s = 0.0
                    for j in range(n_act):
                        e = eta[head + j]
                        jx_s += e * stx[j]
                        jy_s += e * sty[j]
                for j in range(n_act):
                    jj = head + j
                    e = eta[jj]
                    gcj = gc[jj]
                    gdj = gd[jj]
                    x = stx[j]
                    y = sty[j]
                    z = stz[j]
                    zp1 = z + 1.0
                    hx = jx_s * z - e * x * zp1
                    hy = jy_s * z - e * y * zp1
                    u = e * inv_sqrt_g0
                    kx[j] = 0.5 * e * (gcj * hx - gdj * hy) \
                        + u * z * (gdj * xq - gcj * xp)
                    ky[j] = 0.5 * e * (gcj * hy + gdj * hx) \
                        + u * z * (gcj * xq - gdj * xp)
                    kz[j] = -0.5 * e * (gcj * (jx_s * x + jy_s * y + 2.0 * e * z)
                                        - gdj * (jy_s * x - jx_s * y)) \
                        + u * (gcj * (x * xp - y * xq) + gdj * (x * xq + y * xp))
                if stage == 0:
                    for j in range(n_act):
                        ax[j] = kx[j]
                        ay[j] = ky[j]
                        az[j] = kz[j]
                        stx[j] = y0x[j] + 0.5 * dt * kx[j]
                        sty[j] = y0y[j] + 0.5 * dt * ky[j]
                        stz[j] = y0z[j] + 0.5 * dt * kz[j]
                elif stage == 1:
                    for j in range(n_act):
                        ax[j] += 2.0 * kx[j]
                        ay[j] += 2.0 * ky[j]
                        az[j] += 2.0 * kz[j]
                        stx[j] = y0x[j] + 0.5 * dt * kx[j]
                        sty[j] = y0y[j] + 0.5 * dt * ky[j]
                        stz[j] = y0z[j] + 0.5 * dt * kz[j]
                elif stage == 2:
                    for j in range(n_act):
                        ax[j] += 2.0 * kx[j]
                        ay[j] += 2.0 * ky[j]
                        az[j] += 2.0 * kz[j]
                        stx[j] = y0x[j] + dt * kx[j]
                        sty[j] = y0y[j] + dt * ky[j]
                        stz[j] = y0z[j] + dt * kz[j]
                else:
                    for j in range(n_act):
                        ax[j] += kx[j]
                        ay[j] += ky[j]
                        az[j] += kz[j]
            sixth = dt / 6.0
            for j in range(n_act):
                jj = head + j
                sx[jj] = y0x[j] + sixth * ax[j]
                sy[jj] = y0y[j] + sixth * ay[j]
                sz[jj] = y0z[j] + sixth * az[j]

        if s >= burn_steps and (s - burn_steps) % record_every == 0:
            jx_r = 0.0
            jy_r = 0.0
            for j in range(head, tail):
                jx_r += eta[j] * sx[j]
                jy_r += eta[j] * sy[j]
            if not (np.isfinite(jx_r) and np.isfinite(jy_r)):
                err_step = s
                return head, tail, in_ptr, rec_count, err_step
            rec_jx[rec_count] = jx_r
            rec_jy[rec_count] = jy_r
            rec_n[rec_count] = pref * (jx_r * jx_r + jy_r * jy_r) * 0.25
            rec_count += 1
    return head, tail, in_ptr, rec_count, err_step


if HAVE_NUMBA:
    _kernel_jit = numba.njit(cache=True)(_kernel_chunk)
else:  # pragma: no cover
    _kernel_jit = None


def resolve_engine(requested: str) -> str:
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba engine requested but numba is not importable")
        return "numba"
    if HAVE_NUMBA:
        return "numba"
    warnings.warn("numba unavailable; falling back to the slow Python kernel")
    return "numpy"


def run(cfg: SimConfig) -> FieldRecord:
    num = cfg.numerics
    dt = num.dt
    rng = np.random.default_rng(num.seed)

    burn_steps = int(round(num.t_burn / dt))
    rec_steps = int(round(num.t_record / dt))
    total = burn_steps + rec_steps
    n_tau = max(1, int(math.ceil(cfg.tau / dt - 1e-9)))
    lam = cfg.injection_rate() * dt
    staggered = cfg.beam.injection is InjectionMode.STAGGERED
    kernel = _kernel_jit if resolve_engine(num.engine) == "numba" else _kernel_chunk

    n_records = len(range(burn_steps, total, num.record_every)) if rec_steps > 0 else 0
    out_jx = np.zeros(n_records)
    out_jy = np.zeros(n_records)
    out_n = np.zeros(n_records)
    out_filled = 0

    cap = int(3 * cfg.n_mean + 12 * math.sqrt(cfg.n_mean) + 64)
    ring = {name: np.zeros(cap) for name in ("sx", "sy", "sz", "eta", "gd", "gc")}
    exit_step = np.zeros(cap, dtype=np.int64)
    scratch = [np.zeros(cap) for _ in range(12)]
    head = tail = 0

    pref = cfg.g**2 / (cfg.delta_ca**2 + (cfg.kappa / 2.0) ** 2)
    inv_sqrt_g0 = 1.0 / math.sqrt(cfg.gamma_0())
    noise_scale = 1.0 / math.sqrt(dt)
    recent = np.zeros(n_tau, dtype=np.int64)
    stagger_carry = 0.0
    phase_walk = PumpPhaseWalk(cfg.pump.linewidth)

    step0 = 0
    while step0 < total:
        n = min(CHUNK_STEPS, total - step0)
        if staggered:
            edges = stagger_carry + lam * np.arange(n + 1, dtype=np.float64)
            fl = np.floor(edges).astype(np.int64)
            counts = fl[1:] - fl[:-1]
            stagger_carry = float(edges[-1] - fl[-1])
        else:
            counts = rng.poisson(lam, size=n).astype(np.int64)
        if num.noise_on:
            xi_p = rng.normal(0.0, noise_scale, n)
            xi_q = rng.normal(0.0, noise_scale, n)
        else:
            xi_p = np.zeros(n)
            xi_q = np.zeros(n)

        inj_steps = np.repeat(np.arange(n, dtype=np.int64), counts)
        t0 = (step0 + inj_steps) * dt - cfg.pump.tau_p
        batch = draw_atom_batch(cfg, t0, rng, phase_walk)
        in_exit = step0 + inj_steps + n_tau

        ext = np.concatenate([recent, counts])
        csum = np.concatenate([[0], np.cumsum(ext)])
        window = csum[n_tau + 1:n_tau + 1 + n] - csum[1:n + 1]
        need = int(window.max() if n > 0 else 0) + (tail - head) + 64
        if need > cap:
            new_cap = max(2 * cap, need)
            na = tail - head
            for name, arr in list(ring.items()):
                grown = np.zeros(new_cap)
                grown[:na] = arr[head:tail]
                ring[name] = grown
            grown_exit = np.zeros(new_cap, dtype=np.int64)
            grown_exit[:na] = exit_step[head:tail]
            exit_step = grown_exit
            scratch = [np.zeros(new_cap) for _ in range(12)]
            head, tail, cap = 0, na, new_cap
        recent = ext[-n_tau:].copy()

        rec_buf_len = n // num.record_every + 2
        rec_jx = np.zeros(rec_buf_len)
        rec_jy = np.zeros(rec_buf_len)
        rec_n = np.zeros(rec_buf_len)

        head, tail, _, rec_count, err_step = kernel(
            step0, n, counts, xi_p, xi_q,
            batch.sx, batch.sy, batch.sz, batch.eta,
            batch.gamma_delta, batch.gamma_c, in_exit,
            ring["sx"], ring["sy"], ring["sz"], ring["eta"], ring["gd"],
            ring["gc"], exit_step, *scratch,
            head, tail, 0,
            dt, inv_sqrt_g0, num.paper_literal,
            burn_steps, num.record_every, pref,
            rec_jx, rec_jy, rec_n)

        if err_step >= 0:
            raise RuntimeError(
                f"non-finite collective spin at step {err_step} "
                f"(t = {(err_step + 1) * dt:.3e} s, {tail - head} atoms active); "
                "reduce dt or check parameters")

        out_jx[out_filled:out_filled + rec_count] = rec_jx[:rec_count]
        out_jy[out_filled:out_filled + rec_count] = rec_jy[:rec_count]
        out_n[out_filled:out_filled + rec_count] = rec_n[:rec_count]
        out_filled += rec_count
        step0 += n

    assert out_filled == n_records
    t = (burn_steps + num.record_every * np.arange(n_records) + 1) * dt
    return FieldRecord(
        t=t, j_plus=0.5 * (out_jx + 1j * out_jy), n_phot=out_n,
        dt_record=num.record_every * dt,
        config_hash=config_hash(cfg), seed=num.seed)
