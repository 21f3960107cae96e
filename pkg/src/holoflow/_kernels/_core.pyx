# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend: tape evaluation, RK5(4) integration, iteration.

Semantics mirror ``_pure`` exactly; see that module for the reference
implementation.
"""

from libc.math cimport cos, exp, hypot, isfinite, sin
from libc.stdlib cimport free, malloc

import numpy as np

BACKEND_NAME = "compiled"

OK, ESCAPE, STEP_LIMIT, NONFINITE = 0, 1, 2, 3
ITER_CONVERGED, ITER_BOUNDARY, ITER_CAP, ITER_NONFINITE = 0, 1, 2, 3

cdef int C_OK = 0, C_ESCAPE = 1, C_STEP_LIMIT = 2, C_NONFINITE = 3
cdef int C_CONVERGED = 0, C_BOUNDARY = 1, C_CAP = 2, C_IT_NONFINITE = 3


cdef inline double _cabs(double complex v) noexcept nogil:
    return hypot(v.real, v.imag)


cdef inline double complex _cexp(double complex v) noexcept nogil:
    cdef double ex = exp(v.real)
    return ex * cos(v.imag) + 1j * (ex * sin(v.imag))


cdef inline bint _finite(double complex v) noexcept nogil:
    return isfinite(v.real) and isfinite(v.imag)


cdef inline double complex _ipow(double complex base, int n) noexcept nogil:
    cdef double complex r = 1.0
    cdef double complex b = base
    cdef int m = n
    if m < 0:
        b = 1.0 / b
        m = -m
    while m:
        if m & 1:
            r = r * b
        b = b * b
        m >>= 1
    return r


cdef double complex _eval(const int* ops, const int* args,
                          const double complex* consts, int nops,
                          double complex z, double complex* stack) noexcept nogil:
    cdef int i, sp = 0, op
    for i in range(nops):
        op = ops[i]
        if op == 0:
            stack[sp] = z
            sp += 1
        elif op == 1:
            stack[sp] = consts[args[i]]
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
            stack[sp - 1] = _cexp(stack[sp - 1])
        else:
            stack[sp - 1] = _ipow(stack[sp - 1], args[i])
    return stack[0]


def eval_one(const int[:] ops, const int[:] args,
             const double complex[:] consts, int stack_need, z):
    cdef double complex zz = z
    cdef double complex out
    cdef double complex* stack = <double complex*> malloc(
        stack_need * sizeof(double complex))
    if stack == NULL:
        raise MemoryError
    try:
        with nogil:
            out = _eval(&ops[0], &args[0], &consts[0], ops.shape[0], zz, stack)
    finally:
        free(stack)
    return complex(out)


def eval_many(const int[:] ops, const int[:] args,
              const double complex[:] consts, int stack_need, zs):
    cdef double complex[:] zv = zs
    out_arr = np.empty(zs.shape[0], dtype=np.complex128)
    cdef double complex[:] ov = out_arr
    cdef Py_ssize_t i, n = zv.shape[0]
    cdef double complex* stack = <double complex*> malloc(
        stack_need * sizeof(double complex))
    if stack == NULL:
        raise MemoryError
    try:
        with nogil:
            for i in range(n):
                ov[i] = _eval(&ops[0], &args[0], &consts[0], ops.shape[0],
                              zv[i], stack)
    finally:
        free(stack)
    return out_arr


# Dormand-Prince 5(4) coefficients
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 35.0 / 384.0 - 5179.0 / 57600.0
cdef double E3 = 500.0 / 1113.0 - 7571.0 / 16695.0
cdef double E4 = 125.0 / 192.0 - 393.0 / 640.0
cdef double E5 = -2187.0 / 6784.0 + 92097.0 / 339200.0
cdef double E6 = 11.0 / 84.0 - 187.0 / 2100.0
cdef double E7 = -1.0 / 40.0


def integrate(const int[:] ops, const int[:] args,
              const double complex[:] consts, int stack_need,
              const int[:] g_ops, const int[:] g_args,
              const double complex[:] g_consts, int g_stack_need,
              z0, double t_end, double rtol, double atol, long max_steps,
              double escape_radius, bint with_cocycle):
    cdef double complex u = z0
    cdef double complex s = 0.0
    cdef double complex ku1, ku2, ku3, ku4, ku5, ku6, k_last
    cdef double complex ks1, ks2, ks3, ks4, ks5, ks6, ks_last
    cdef double complex u_new, s_new, err_u, err_s, ui
    cdef double t = 0.0, h, h_use, sc, sc_s, err, factor, stall
    cdef long n_attempt = 0
    cdef bint last, done = False
    cdef int status = C_OK
    cdef int nops = ops.shape[0], g_nops = g_ops.shape[0]
    cdef double complex* stack

    if t_end == 0.0:
        return complex(u), complex(s), OK, 0
    if _cabs(u) >= escape_radius:
        return complex(u), complex(s), ESCAPE, 0

    stack = <double complex*> malloc(
        (stack_need if stack_need > g_stack_need else g_stack_need)
        * sizeof(double complex))
    if stack == NULL:
        raise MemoryError

    h = t_end if t_end < 0.05 else 0.05
    if h < 1e-12:
        h = 1e-12
    stall = 1e-16 * (t_end if t_end > 1.0 else 1.0)
    ks1 = ks2 = ks3 = ks4 = ks5 = ks6 = ks_last = 0.0

    try:
        with nogil:
            ku1 = _eval(&ops[0], &args[0], &consts[0], nops, u, stack)
            ks1 = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops, u, stack) \
                if with_cocycle else 0.0
            while not done:
                if n_attempt >= max_steps:
                    status = C_STEP_LIMIT
                    break
                n_attempt += 1
                last = t + h >= t_end
                h_use = t_end - t if last else h

                ui = u + h_use * (A21 * ku1)
                ku2 = _eval(&ops[0], &args[0], &consts[0], nops, ui, stack)
                if with_cocycle:
                    ks2 = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops, ui, stack)
                ui = u + h_use * (A31 * ku1 + A32 * ku2)
                ku3 = _eval(&ops[0], &args[0], &consts[0], nops, ui, stack)
                if with_cocycle:
                    ks3 = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops, ui, stack)
                ui = u + h_use * (A41 * ku1 + A42 * ku2 + A43 * ku3)
                ku4 = _eval(&ops[0], &args[0], &consts[0], nops, ui, stack)
                if with_cocycle:
                    ks4 = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops, ui, stack)
                ui = u + h_use * (A51 * ku1 + A52 * ku2 + A53 * ku3 + A54 * ku4)
                ku5 = _eval(&ops[0], &args[0], &consts[0], nops, ui, stack)
                if with_cocycle:
                    ks5 = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops, ui, stack)
                ui = u + h_use * (A61 * ku1 + A62 * ku2 + A63 * ku3 + A64 * ku4
                                  + A65 * ku5)
                ku6 = _eval(&ops[0], &args[0], &consts[0], nops, ui, stack)
                if with_cocycle:
                    ks6 = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops, ui, stack)

                u_new = u + h_use * (B1 * ku1 + B3 * ku3 + B4 * ku4 + B5 * ku5
                                     + B6 * ku6)
                k_last = _eval(&ops[0], &args[0], &consts[0], nops, u_new, stack)
                if with_cocycle:
                    s_new = s + h_use * (B1 * ks1 + B3 * ks3 + B4 * ks4
                                         + B5 * ks5 + B6 * ks6)
                    ks_last = _eval(&g_ops[0], &g_args[0], &g_consts[0], g_nops,
                                    u_new, stack)
                else:
                    s_new = 0.0
                    ks_last = 0.0
                err_u = h_use * (E1 * ku1 + E3 * ku3 + E4 * ku4 + E5 * ku5
                                 + E6 * ku6 + E7 * k_last)
                if not (_finite(u_new) and _finite(err_u)):
                    h = h_use * 0.2
                    if h < stall:
                        status = C_NONFINITE
                        break
                    continue
                sc = atol + rtol * (_cabs(u) if _cabs(u) > _cabs(u_new)
                                    else _cabs(u_new))
                err = _cabs(err_u) / sc
                if with_cocycle:
                    err_s = h_use * (E1 * ks1 + E3 * ks3 + E4 * ks4 + E5 * ks5
                                     + E6 * ks6 + E7 * ks_last)
                    sc_s = atol + rtol * (_cabs(s) if _cabs(s) > _cabs(s_new)
                                          else _cabs(s_new))
                    if _cabs(err_s) / sc_s > err:
                        err = _cabs(err_s) / sc_s
                if err <= 1.0:
                    t += h_use
                    u = u_new
                    s = s_new
                    ku1 = k_last
                    ks1 = ks_last
                    if _cabs(u) >= escape_radius:
                        status = C_ESCAPE
                        break
                    if last:
                        done = True
                    if err == 0.0:
                        factor = 5.0
                    else:
                        factor = 0.9 * err ** -0.2
                        if factor > 5.0:
                            factor = 5.0
                        elif factor < 0.2:
                            factor = 0.2
                else:
                    factor = 0.9 * err ** -0.2
                    if factor > 1.0:
                        factor = 1.0
                    elif factor < 0.2:
                        factor = 0.2
                h = h_use * factor
                if not done and h < stall:
                    status = C_STEP_LIMIT
                    break
    finally:
        free(stack)
    return complex(u), complex(s), status, n_attempt


def iterate(const int[:] ops, const int[:] args,
            const double complex[:] consts, int stack_need, z0,
            long max_iter, double fp_tol, double boundary_thresh,
            double interior_thresh, double complex[:] tail_out):
    cdef Py_ssize_t tail_n = tail_out.shape[0]
    ring_arr = np.zeros(tail_n, dtype=np.complex128)
    cdef double complex[:] ring = ring_arr
    cdef long count = 0, n = 0
    cdef double complex z = z0, z_new
    cdef int status = C_CAP
    cdef long extra = -1
    cdef Py_ssize_t i, m
    cdef int nops = ops.shape[0]
    cdef double complex* stack = <double complex*> malloc(
        stack_need * sizeof(double complex))
    if stack == NULL:
        raise MemoryError
    try:
        with nogil:
            while n < max_iter:
                z_new = _eval(&ops[0], &args[0], &consts[0], nops, z, stack)
                n += 1
                if not _finite(z_new):
                    status = C_IT_NONFINITE
                    z = z_new
                    break
                ring[count % tail_n] = z_new
                count += 1
                if _cabs(z_new - z) < fp_tol and _cabs(z_new) < interior_thresh:
                    z = z_new
                    status = C_CONVERGED
                    break
                z = z_new
                if extra < 0 and _cabs(z) > boundary_thresh:
                    extra = tail_n
                if extra > 0:
                    extra -= 1
                    if extra == 0:
                        status = C_BOUNDARY
                        break
            else:
                status = C_BOUNDARY if extra >= 0 else C_CAP
    finally:
        free(stack)
    m = count if count < tail_n else tail_n
    for i in range(m):
        tail_out[i] = ring[(count - m + i) % tail_n]
    return complex(z), n, status, int(m)
