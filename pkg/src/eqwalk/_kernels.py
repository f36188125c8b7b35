"""Numba kernels for the hot loops: per-trajectory walk evolution and
classical memory-walk paths.

The walk kernel evolves the two amplitude arrays in place over a growing
occupied span inside preallocated buffers of worst-case capacity, fusing the
coin rotation with the spin-conditioned shift into a single pass.  Snapshot
observables (raw position moments, coin-density sums, optionally the full
probability rows) are accumulated inside the loop so the evolved arrays
never leave the kernel.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def evolve_walk(u, d, su, sd, lo, hi, center, deltas, cos_t, sin_t,
                snap_times, out_moments, out_coin, dist_acc, record_dist):
    """Run one trajectory; returns the final (lo, hi) buffer span.

    u, d            amplitude buffers (complex128), valid on [lo, hi]
    su, sd          scratch buffers of the same size
    center          buffer index of lattice site 0
    deltas          per-step shift magnitudes, len T
    cos_t, sin_t    per-step coin entries, len T
    snap_times      sorted step indices (>= 1) at which to record
    out_moments     (n_snap, 5) raw moments sum l^n P, n = 0..4
    out_coin        (n_snap, 3) complex sums: |up|^2, |down|^2, up*conj(down)
    dist_acc        (n_snap, buffer_len) probability accumulator
    record_dist     whether to add probability rows into dist_acc
    """
    T = deltas.shape[0]
    nsnap = snap_times.shape[0]
    isnap = 0
    while isnap < nsnap and snap_times[isnap] < 1:
        isnap += 1
    for step in range(T):
        dl = deltas[step]
        c = cos_t[step]
        s = sin_t[step]
        a = abs(dl)
        nlo = lo - a
        nhi = hi + a
        # strips of the new span that the shifted writes below do not reach
        for i in range(nlo, lo + dl):
            su[i] = 0.0
        for i in range(hi + dl + 1, nhi + 1):
            su[i] = 0.0
        for i in range(nlo, lo - dl):
            sd[i] = 0.0
        for i in range(hi - dl + 1, nhi + 1):
            sd[i] = 0.0
        for i in range(lo, hi + 1):
            au = u[i]
            ad = d[i]
            su[i + dl] = c * au + 1j * s * ad
            sd[i - dl] = 1j * s * au + c * ad
        tmp = u; u = su; su = tmp
        tmp = d; d = sd; sd = tmp
        lo = nlo
        hi = nhi
        if isnap < nsnap and snap_times[isnap] == step + 1:
            m0 = 0.0; m1 = 0.0; m2 = 0.0; m3 = 0.0; m4 = 0.0
            ruu = 0.0; rdd = 0.0
            rud = 0.0 + 0.0j
            for i in range(lo, hi + 1):
                au = u[i]
                ad = d[i]
                pu = au.real * au.real + au.imag * au.imag
                pd = ad.real * ad.real + ad.imag * ad.imag
                p = pu + pd
                l = float(i - center)
                lp = p
                m0 += lp
                lp *= l
                m1 += lp
                lp *= l
                m2 += lp
                lp *= l
                m3 += lp
                lp *= l
                m4 += lp
                ruu += pu
                rdd += pd
                rud += au * np.conj(ad)
                if record_dist:
                    dist_acc[isnap, i] += p
            out_moments[isnap, 0] += m0
            out_moments[isnap, 1] += m1
            out_moments[isnap, 2] += m2
            out_moments[isnap, 3] += m3
            out_moments[isnap, 4] += m4
            out_coin[isnap, 0] += ruu
            out_coin[isnap, 1] += rdd
            out_coin[isnap, 2] += rud
            isnap += 1
    return lo, hi


@njit(cache=True)
def snapshot_state(u, d, lo, hi, center, out_moments, out_coin, dist_row, record_dist):
    """Accumulate the time-zero observables for the initial state."""
    m0 = 0.0; m1 = 0.0; m2 = 0.0; m3 = 0.0; m4 = 0.0
    ruu = 0.0; rdd = 0.0
    rud = 0.0 + 0.0j
    for i in range(lo, hi + 1):
        au = u[i]
        ad = d[i]
        pu = au.real * au.real + au.imag * au.imag
        pd = ad.real * ad.real + ad.imag * ad.imag
        p = pu + pd
        l = float(i - center)
        lp = p
        m0 += lp
        lp *= l
        m1 += lp
        lp *= l
        m2 += lp
        lp *= l
        m3 += lp
        lp *= l
        m4 += lp
        ruu += pu
        rdd += pd
        rud += au * np.conj(ad)
        if record_dist:
            dist_row[i] += p
    out_moments[0] += m0
    out_moments[1] += m1
    out_moments[2] += m2
    out_moments[3] += m3
    out_moments[4] += m4
    out_coin[0] += ruu
    out_coin[1] += rdd
    out_coin[2] += rud


@njit(cache=True)
def erw_paths(u_pick, u_flip, p, q, snap_times, delta_buf, out_x):
    """Classical memory-walk paths for a chunk of trajectories.

    u_pick, u_flip  (n, T) uniforms per trajectory (pick entry 0 unused at t=1)
    delta_buf       (T + 1,) integer scratch for one trajectory's step history
    out_x           (n, n_snap) displacement at the snapshot times
    """
    n, T = u_pick.shape
    nsnap = snap_times.shape[0]
    for i in range(n):
        x = 0
        isnap = 0
        while isnap < nsnap and snap_times[isnap] < 1:
            isnap += 1
        for t in range(1, T + 1):
            if t == 1:
                step = 1 if u_flip[i, 0] < q else -1
            else:
                j = 1 + int(u_pick[i, t - 1] * (t - 1))
                if j > t - 1:
                    j = t - 1
                base = delta_buf[j]
                step = base if u_flip[i, t - 1] < p else -base
            delta_buf[t] = step
            x += step
            if isnap < nsnap and snap_times[isnap] == t:
                out_x[i, isnap] = x
                isnap += 1
