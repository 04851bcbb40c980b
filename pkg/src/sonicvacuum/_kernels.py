"""Compiled inner loops for chain integration.

Everything here is numba-jitted and operates on flat float64 state vectors.
A single chain with n beads is laid out as [u_1..u_n, v_1..v_n]; the twin
(driver-observer) system stacks two such blocks.  The public surface is
``eval_rhs`` (one derivative evaluation), ``rk4_chain`` / ``rk4_extended``
(recording integrators), ``flow`` (bare state advance) and ``monodromy``
(finite-difference Jacobian of the period-advance map).

The harmonic boundary motion is evaluated through a half-step rotation
recurrence for sin/cos instead of per-stage trig calls, resynchronized with
exact library trig every ``_RESYNC`` steps.  The recurrence is an exact angle
identity, so the only deviation from direct evaluation is float roundoff,
bounded by roughly _RESYNC ulps (~1e-13) in phase.

Integrators return the number of completed steps (short count means a
non-finite state was detected), the time integral of the velocity divergence
of the vector field (each closed contact's damping removes phase-space volume
at a known rate, which gives an independent check on finite-difference
monodromy determinants), and the peak wall overlap seen at step boundaries.
"""

import numpy as np
from numba import njit, prange

DRIVE_FREE = 0
DRIVE_HARMONIC = 1
DRIVE_FORCE = 2

_RESYNC = 512
_FINITE_CHECK = 256


@njit(inline="always")
def _interp(t, t0, inv_dt, vals):
    """Linear interpolation on a uniform grid, clamped at both ends."""
    x = (t - t0) * inv_dt
    if x <= 0.0:
        return vals[0]
    i = int(x)
    if i >= vals.size - 1:
        return vals[vals.size - 1]
    w = x - i
    return vals[i] + w * (vals[i + 1] - vals[i])


@njit(inline="always")
def _boundary_force(y, off, n, c_bb, damp, u0, v0):
    """Gated contact force the moving boundary exerts on bead 1 of a block."""
    d = u0 - y[off]
    if d > 0.0:
        return c_bb * d * np.sqrt(d) + damp * (v0 - y[off + n])
    return 0.0


@njit(inline="always")
def _block_rhs(y, dy, off, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f_ext):
    """Derivative of one chain block; returns its velocity divergence."""
    div = 0.0
    for i in range(n):
        dy[off + i] = y[off + n + i]
        dy[off + n + i] = -kf * y[off + i]
    if drive_kind == DRIVE_HARMONIC:
        d = u0 - y[off]
        if d > 0.0:
            dy[off + n] += c_bb * d * np.sqrt(d) + damp * (v0 - y[off + n])
            div -= damp
    elif drive_kind == DRIVE_FORCE:
        dy[off + n] += f_ext
    for i in range(n - 1):
        d = y[off + i] - y[off + i + 1]
        if d > 0.0:
            f = c_bb * d * np.sqrt(d) + damp * (y[off + n + i] - y[off + n + i + 1])
            dy[off + n + i] -= f
            dy[off + n + i + 1] += f
            div -= 2.0 * damp
    if c_w != 0.0:
        d = y[off + n - 1]
        if d > 0.0:
            dy[off + 2 * n - 1] -= c_w * d * np.sqrt(d) + damp * y[off + 2 * n - 1]
            div -= damp
    if inv_m != 1.0:
        for i in range(n):
            dy[off + n + i] *= inv_m
        div *= inv_m
    return div


@njit(inline="always")
def _stage(kind, y, dy, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f_ext):
    """Full derivative at given boundary values; kind 0 = single, 1 = twin."""
    if kind == 0:
        return _block_rhs(
            y, dy, 0, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f_ext
        )
    div = _block_rhs(
        y, dy, 0, n, inv_m, c_bb, c_w, damp, kf, DRIVE_HARMONIC, u0, v0, 0.0
    )
    f_in = _boundary_force(y, 0, n, c_bb, damp, u0, v0)
    div += _block_rhs(
        y, dy, 2 * n, n, inv_m, c_bb, c_w, damp, kf, DRIVE_FORCE, 0.0, 0.0, f_in
    )
    return div


@njit(cache=True, nogil=True)
def eval_rhs(
    kind, y, dy, t, n, inv_m, c_bb, c_w, damp, kf,
    drive_kind, amp, omega, rec_t0, rec_inv_dt, rec,
):
    """One derivative evaluation with direct (non-recurrence) trig."""
    u0 = amp * np.sin(omega * t)
    v0 = amp * omega * np.cos(omega * t)
    f_ext = 0.0
    if drive_kind == DRIVE_FORCE and rec.size > 0:
        f_ext = _interp(t, rec_t0, rec_inv_dt, rec)
    return _stage(kind, y, dy, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f_ext)


@njit(cache=True, nogil=True)
def rk4_chain(
    y, t0, dt, n_steps, stride,
    n, inv_m, c_bb, c_w, damp, kf,
    drive_kind, amp, omega, rec_t0, rec_inv_dt, rec,
    out, out_fd,
):
    """Fixed-step RK4 for a single chain, with optional sample recording.

    Mutates ``y`` to the final state.  ``out`` (rows, 2n) receives the state
    every ``stride`` steps starting with the initial one when it has rows;
    ``out_fd`` (2*n_steps+1 entries, or empty) receives the boundary force on
    the half-step grid, built so that a replay driven by linear interpolation
    of these samples reproduces the run: midpoints hold the mean of the two
    half-step stage forces and grid points the mean of the adjacent k4/k1
    stage forces, which cancels the leading-order stage mismatch.

    Returns (steps_done, divergence integral, peak wall force).
    """
    dim = 2 * n
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    ytmp = np.empty(dim)
    half = 0.5 * dt
    sixth = dt / 6.0
    sh = np.sin(omega * half)
    ch = np.cos(omega * half)
    capture = out_fd.size > 0
    rows = out.shape[0]
    if rows > 0:
        for i in range(dim):
            out[0, i] = y[i]
    divint = 0.0
    wall_d = 0.0
    if y[n - 1] > wall_d:
        wall_d = y[n - 1]
    s0 = 0.0
    c0 = 1.0
    steps_done = n_steps
    for k in range(n_steps):
        t = t0 + k * dt
        if k % _RESYNC == 0:
            s0 = np.sin(omega * t)
            c0 = np.cos(omega * t)
        s1 = s0 * ch + c0 * sh
        c1 = c0 * ch - s0 * sh
        s2 = s1 * ch + c1 * sh
        c2 = c1 * ch - s1 * sh

        f1 = 0.0
        f23 = 0.0
        f4 = 0.0
        if drive_kind == DRIVE_FORCE:
            f1 = _interp(t, rec_t0, rec_inv_dt, rec)
            f23 = _interp(t + half, rec_t0, rec_inv_dt, rec)
            f4 = _interp(t + dt, rec_t0, rec_inv_dt, rec)

        u0 = amp * s0
        v0 = amp * omega * c0
        d1 = _stage(0, y, k1, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f1)
        if capture:
            if drive_kind == DRIVE_HARMONIC:
                f1 = _boundary_force(y, 0, n, c_bb, damp, u0, v0)
            out_fd[2 * k] += 0.5 * f1

        for i in range(dim):
            ytmp[i] = y[i] + half * k1[i]
        u0 = amp * s1
        v0 = amp * omega * c1
        d2 = _stage(0, ytmp, k2, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f23)
        fc = 0.0
        if capture and drive_kind == DRIVE_HARMONIC:
            fc = _boundary_force(ytmp, 0, n, c_bb, damp, u0, v0)

        for i in range(dim):
            ytmp[i] = y[i] + half * k2[i]
        d3 = _stage(0, ytmp, k3, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f23)
        if capture:
            if drive_kind == DRIVE_HARMONIC:
                fc = 0.5 * (fc + _boundary_force(ytmp, 0, n, c_bb, damp, u0, v0))
            else:
                fc = f23
            out_fd[2 * k + 1] = fc

        for i in range(dim):
            ytmp[i] = y[i] + dt * k3[i]
        u0 = amp * s2
        v0 = amp * omega * c2
        d4 = _stage(0, ytmp, k4, n, inv_m, c_bb, c_w, damp, kf, drive_kind, u0, v0, f4)
        if capture:
            if drive_kind == DRIVE_HARMONIC:
                f4 = _boundary_force(ytmp, 0, n, c_bb, damp, u0, v0)
            out_fd[2 * k + 2] += 0.5 * f4

        for i in range(dim):
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        divint += sixth * (d1 + 2.0 * (d2 + d3) + d4)
        s0 = s2
        c0 = c2

        if y[n - 1] > wall_d:
            wall_d = y[n - 1]
        kk = k + 1
        if rows > 0 and kk % stride == 0:
            r = kk // stride
            if r < rows:
                for i in range(dim):
                    out[r, i] = y[i]
        if kk % _FINITE_CHECK == 0 or kk == n_steps:
            ok = True
            for i in range(dim):
                if not np.isfinite(y[i]):
                    ok = False
                    break
            if not ok:
                steps_done = kk
                break

    if capture and steps_done == n_steps:
        out_fd[0] *= 2.0
        out_fd[2 * n_steps] *= 2.0
    wall_max = c_w * wall_d * np.sqrt(wall_d) if wall_d > 0.0 else 0.0
    return steps_done, divint, wall_max


@njit(cache=True, nogil=True)
def rk4_extended(
    y, t0, dt, n_steps, stride,
    n, c_bb, c_w, damp, kf, amp, omega,
    out,
):
    """Fixed-step RK4 for the twin driver-observer system (dimensionless).

    Same recording contract as ``rk4_chain``.  Returns (steps_done,
    divergence integral, driver peak wall force, observer peak wall force).
    """
    dim = 4 * n
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    ytmp = np.empty(dim)
    half = 0.5 * dt
    sixth = dt / 6.0
    sh = np.sin(omega * half)
    ch = np.cos(omega * half)
    rows = out.shape[0]
    if rows > 0:
        for i in range(dim):
            out[0, i] = y[i]
    divint = 0.0
    wall_x = 0.0
    wall_y = 0.0
    if y[n - 1] > wall_x:
        wall_x = y[n - 1]
    if y[3 * n - 1] > wall_y:
        wall_y = y[3 * n - 1]
    s0 = 0.0
    c0 = 1.0
    steps_done = n_steps
    for k in range(n_steps):
        t = t0 + k * dt
        if k % _RESYNC == 0:
            s0 = np.sin(omega * t)
            c0 = np.cos(omega * t)
        s1 = s0 * ch + c0 * sh
        c1 = c0 * ch - s0 * sh
        s2 = s1 * ch + c1 * sh
        c2 = c1 * ch - s1 * sh

        d1 = _stage(1, y, k1, n, 1.0, c_bb, c_w, damp, kf,
                    DRIVE_HARMONIC, amp * s0, amp * omega * c0, 0.0)
        for i in range(dim):
            ytmp[i] = y[i] + half * k1[i]
        d2 = _stage(1, ytmp, k2, n, 1.0, c_bb, c_w, damp, kf,
                    DRIVE_HARMONIC, amp * s1, amp * omega * c1, 0.0)
        for i in range(dim):
            ytmp[i] = y[i] + half * k2[i]
        d3 = _stage(1, ytmp, k3, n, 1.0, c_bb, c_w, damp, kf,
                    DRIVE_HARMONIC, amp * s1, amp * omega * c1, 0.0)
        for i in range(dim):
            ytmp[i] = y[i] + dt * k3[i]
        d4 = _stage(1, ytmp, k4, n, 1.0, c_bb, c_w, damp, kf,
                    DRIVE_HARMONIC, amp * s2, amp * omega * c2, 0.0)
        for i in range(dim):
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        divint += sixth * (d1 + 2.0 * (d2 + d3) + d4)
        s0 = s2
        c0 = c2

        if y[n - 1] > wall_x:
            wall_x = y[n - 1]
        if y[3 * n - 1] > wall_y:
            wall_y = y[3 * n - 1]
        kk = k + 1
        if rows > 0 and kk % stride == 0:
            r = kk // stride
            if r < rows:
                for i in range(dim):
                    out[r, i] = y[i]
        if kk % _FINITE_CHECK == 0 or kk == n_steps:
            ok = True
            for i in range(dim):
                if not np.isfinite(y[i]):
                    ok = False
                    break
            if not ok:
                steps_done = kk
                break

    wx = c_w * wall_x * np.sqrt(wall_x) if wall_x > 0.0 else 0.0
    wy = c_w * wall_y * np.sqrt(wall_y) if wall_y > 0.0 else 0.0
    return steps_done, divint, wx, wy


@njit(cache=True, nogil=True)
def flow(
    kind, y, t0, dt, n_steps,
    n, inv_m, c_bb, c_w, damp, kf,
    drive_kind, amp, omega, rec_t0, rec_inv_dt, rec,
):
    """Bare state advance (no recording); returns the divergence integral.

    The caller is responsible for checking finiteness of the result; this
    loop does no mid-run checks so it can serve as the map evaluation inside
    Newton iterations and Jacobian columns.
    """
    dim = 2 * n if kind == 0 else 4 * n
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    ytmp = np.empty(dim)
    half = 0.5 * dt
    sixth = dt / 6.0
    sh = np.sin(omega * half)
    ch = np.cos(omega * half)
    s0 = 0.0
    c0 = 1.0
    divint = 0.0
    for k in range(n_steps):
        t = t0 + k * dt
        if k % _RESYNC == 0:
            s0 = np.sin(omega * t)
            c0 = np.cos(omega * t)
        s1 = s0 * ch + c0 * sh
        c1 = c0 * ch - s0 * sh
        s2 = s1 * ch + c1 * sh
        c2 = c1 * ch - s1 * sh
        f1 = 0.0
        f23 = 0.0
        f4 = 0.0
        if drive_kind == DRIVE_FORCE:
            f1 = _interp(t, rec_t0, rec_inv_dt, rec)
            f23 = _interp(t + half, rec_t0, rec_inv_dt, rec)
            f4 = _interp(t + dt, rec_t0, rec_inv_dt, rec)
        d1 = _stage(kind, y, k1, n, inv_m, c_bb, c_w, damp, kf,
                    drive_kind, amp * s0, amp * omega * c0, f1)
        for i in range(dim):
            ytmp[i] = y[i] + half * k1[i]
        d2 = _stage(kind, ytmp, k2, n, inv_m, c_bb, c_w, damp, kf,
                    drive_kind, amp * s1, amp * omega * c1, f23)
        for i in range(dim):
            ytmp[i] = y[i] + half * k2[i]
        d3 = _stage(kind, ytmp, k3, n, inv_m, c_bb, c_w, damp, kf,
                    drive_kind, amp * s1, amp * omega * c1, f23)
        for i in range(dim):
            ytmp[i] = y[i] + dt * k3[i]
        d4 = _stage(kind, ytmp, k4, n, inv_m, c_bb, c_w, damp, kf,
                    drive_kind, amp * s2, amp * omega * c2, f4)
        for i in range(dim):
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        divint += sixth * (d1 + 2.0 * (d2 + d3) + d4)
        s0 = s2
        c0 = c2
    return divint


@njit(cache=True, nogil=True, parallel=True)
def monodromy(
    kind, base, t0, dt, n_steps,
    n, inv_m, c_bb, c_w, damp, kf,
    drive_kind, amp, omega, rec_t0, rec_inv_dt, rec,
    h,
):
    """Forward-difference Jacobian of the n_steps-step advance map at base.

    Column j flows base + h[j] e_j; all columns plus the base flow run as
    independent tasks.  Returns (M, flow(base), divergence integral of the
    base flow).
    """
    dim = base.size
    flows = np.empty((dim + 1, dim))
    divs = np.empty(dim + 1)
    for j in prange(dim + 1):
        yj = base.copy()
        if j < dim:
            yj[j] += h[j]
        divs[j] = flow(
            kind, yj, t0, dt, n_steps,
            n, inv_m, c_bb, c_w, damp, kf,
            drive_kind, amp, omega, rec_t0, rec_inv_dt, rec,
        )
        for i in range(dim):
            flows[j, i] = yj[i]
    m = np.empty((dim, dim))
    for j in range(dim):
        for i in range(dim):
            m[i, j] = (flows[j, i] - flows[dim, i]) / h[j]
    return m, flows[dim], divs[dim]
