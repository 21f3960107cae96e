"""Pure-Python kernel backend.

Mirrors the compiled extension exactly (same tableau, same branch
logic), so the two backends are interchangeable up to rounding noise.
Division by zero follows C99/numpy semantics (inf/nan), never raises.
"""

import numpy as np

BACKEND_NAME = "pure"

# statuses shared with the compiled backend
OK, ESCAPE, STEP_LIMIT, NONFINITE = 0, 1, 2, 3
ITER_CONVERGED, ITER_BOUNDARY, ITER_CAP, ITER_NONFINITE = 0, 1, 2, 3

_NAN = complex(float("nan"), float("nan"))


def _ipow(base, n):
    if n < 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.complex128(1.0) / base
        n = -n
    r = np.complex128(1.0)
    b = np.complex128(base)
    while n:
        if n & 1:
            r = r * b
        b = b * b
        n >>= 1
    return r


def eval_one(ops, args, consts, stack_need, z):
    stack = [0j] * stack_need
    sp = 0
    zz = np.complex128(z)
    with np.errstate(all="ignore"):
        for op, arg in zip(ops, args):
            if op == 0:
                stack[sp] = zz
                sp += 1
            elif op == 1:
                stack[sp] = np.complex128(consts[arg])
                sp += 1
            elif op == 2:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] + stack[sp]
            elif op == 3:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] - stack[sp]
            elif op == 4:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] * stack[sp]
            elif op == 5:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] / stack[sp]
            elif op == 6:
                stack[sp - 1] = -stack[sp - 1]
            elif op == 7:
                stack[sp - 1] = np.exp(stack[sp - 1])
            else:
                stack[sp - 1] = _ipow(stack[sp - 1], int(arg))
    return complex(stack[0])


def eval_many(ops, args, consts, stack_need, zs):
    n = zs.shape[0]
    stack = np.empty((stack_need, n), dtype=np.complex128)
    sp = 0
    with np.errstate(all="ignore"):
        for op, arg in zip(ops, args):
            if op == 0:
                stack[sp] = zs
                sp += 1
            elif op == 1:
                stack[sp] = consts[arg]
                sp += 1
            elif op == 2:
                sp -= 1
                stack[sp - 1] += stack[sp]
            elif op == 3:
                sp -= 1
                stack[sp - 1] -= stack[sp]
            elif op == 4:
                sp -= 1
                stack[sp - 1] *= stack[sp]
            elif op == 5:
                sp -= 1
                stack[sp - 1] /= stack[sp]
            elif op == 6:
                np.negative(stack[sp - 1], out=stack[sp - 1])
            elif op == 7:
                np.exp(stack[sp - 1], out=stack[sp - 1])
            else:
                k = int(arg)
                if k < 0:
                    stack[sp - 1] = 1.0 / stack[sp - 1]
                    k = -k
                base = stack[sp - 1].copy()
                acc = np.ones_like(base)
                while k:
                    if k & 1:
                        acc *= base
                    base *= base
                    k >>= 1
                stack[sp - 1] = acc
    return stack[0].copy()


# Dormand-Prince 5(4) tableau
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
# b5 - b4 (error weights, applied to k1..k7)
_E = (
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
)


def _finite(c):
    return np.isfinite(c.real) and np.isfinite(c.imag)


def integrate(ops, args, consts, stack_need, g_ops, g_args, g_consts,
              g_stack_need, z0, t_end, rtol, atol, max_steps, escape_radius,
              with_cocycle):
    """Adaptive RK5(4) for u' = G(u); optionally logw' = g(u) alongside.

    Returns (u, logw, status, attempted_steps).
    """
    u = complex(z0)
    s = 0j
    if t_end == 0.0:
        return u, s, OK, 0
    if abs(u) >= escape_radius:
        return u, s, ESCAPE, 0

    def f(w):
        return eval_one(ops, args, consts, stack_need, w)

    def fg(w):
        return eval_one(g_ops, g_args, g_consts, g_stack_need, w)

    t = 0.0
    h = max(min(t_end, 0.05), 1e-12)
    n_attempt = 0
    ku = [0j] * 7
    ks = [0j] * 7
    ku[0] = f(u)
    if with_cocycle:
        ks[0] = fg(u)
    done = False
    while not done:
        if n_attempt >= max_steps:
            return u, s, STEP_LIMIT, n_attempt
        n_attempt += 1
        last = t + h >= t_end
        h_use = t_end - t if last else h
        for i in range(1, 7):
            du = 0j
            ds = 0j
            for j, aij in enumerate(_A[i]):
                du += aij * ku[j]
                ds += aij * ks[j]
            ui = u + h_use * du
            ku[i] = f(ui)
            if with_cocycle:
                ks[i] = fg(ui)
        u_new = u + h_use * (_A[6][0] * ku[0] + _A[6][2] * ku[2]
                             + _A[6][3] * ku[3] + _A[6][4] * ku[4]
                             + _A[6][5] * ku[5])
        s_new = s + h_use * (_A[6][0] * ks[0] + _A[6][2] * ks[2]
                             + _A[6][3] * ks[3] + _A[6][4] * ks[4]
                             + _A[6][5] * ks[5])
        k_last = f(u_new)
        ks_last = fg(u_new) if with_cocycle else 0j
        err_u = h_use * (_E[0] * ku[0] + _E[2] * ku[2] + _E[3] * ku[3]
                         + _E[4] * ku[4] + _E[5] * ku[5] + _E[6] * k_last)
        if not (_finite(u_new) and _finite(err_u)):
            h = h_use * 0.2
            if h < 1e-16 * max(t_end, 1.0):
                return u, s, NONFINITE, n_attempt
            continue
        sc = atol + rtol * max(abs(u), abs(u_new))
        err = abs(err_u) / sc
        if with_cocycle:
            err_s = h_use * (_E[0] * ks[0] + _E[2] * ks[2] + _E[3] * ks[3]
                             + _E[4] * ks[4] + _E[5] * ks[5] + _E[6] * ks_last)
            sc_s = atol + rtol * max(abs(s), abs(s_new))
            err = max(err, abs(err_s) / sc_s)
        if err <= 1.0:
            t += h_use
            u, s = u_new, s_new
            ku[0] = k_last  # first-same-as-last
            ks[0] = ks_last
            if abs(u) >= escape_radius:
                return u, s, ESCAPE, n_attempt
            if last:
                done = True
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = min(1.0, max(0.2, 0.9 * err ** -0.2))
        h = h_use * factor
        if not done and h < 1e-16 * max(t_end, 1.0):
            return u, s, STEP_LIMIT, n_attempt
    return u, s, OK, n_attempt


def iterate(ops, args, consts, stack_need, z0, max_iter, fp_tol,
            boundary_thresh, interior_thresh, tail_out):
    """Iterate z -> f(z), recording the chronological tail in tail_out.

    Returns (z, n_done, status, tail_count).  After the modulus first
    exceeds boundary_thresh the loop continues for len(tail_out) more
    steps so the tail samples the boundary approach.
    """
    tail_n = tail_out.shape[0]
    ring = np.zeros(tail_n, dtype=np.complex128)
    count = 0
    z = complex(z0)
    status = ITER_CAP
    n = 0
    extra = -1
    while n < max_iter:
        z_new = eval_one(ops, args, consts, stack_need, z)
        n += 1
        if not _finite(z_new):
            status = ITER_NONFINITE
            z = z_new
            break
        ring[count % tail_n] = z_new
        count += 1
        if abs(z_new - z) < fp_tol and abs(z_new) < interior_thresh:
            z = z_new
            status = ITER_CONVERGED
            break
        z = z_new
        if extra < 0 and abs(z) > boundary_thresh:
            extra = tail_n
        if extra > 0:
            extra -= 1
            if extra == 0:
                status = ITER_BOUNDARY
                break
    else:
        status = ITER_BOUNDARY if extra >= 0 else ITER_CAP
    m = min(count, tail_n)
    for i in range(m):
        tail_out[i] = ring[(count - m + i) % tail_n]
    return z, n, status, m
