"""Kernel backend selection.

The hot loops (tape evaluation, adaptive integration, map iteration)
live in a compiled Cython extension.  When the extension is missing, or
when ``HOLOFLOW_PURE=1`` is set, the pure-Python implementation in
``_pure`` is used instead; the two are semantically identical.
"""

import os

import numpy as np

from . import _pure

if os.environ.get("HOLOFLOW_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND_NAME

OK = _impl.OK
ESCAPE = _impl.ESCAPE
STEP_LIMIT = _impl.STEP_LIMIT
NONFINITE = _impl.NONFINITE
ITER_CONVERGED = _impl.ITER_CONVERGED
ITER_BOUNDARY = _impl.ITER_BOUNDARY
ITER_CAP = _impl.ITER_CAP
ITER_NONFINITE = _impl.ITER_NONFINITE

_DUMMY = None


def _dummy_tape():
    global _DUMMY
    if _DUMMY is None:
        from ..expressions import compile_tape, Const

        _DUMMY = compile_tape(Const(0j))
    return _DUMMY


def eval_one(tape, z, impl=None):
    return (impl or _impl).eval_one(tape.ops, tape.args, tape.consts,
                                    tape.stack_need, complex(z))


def eval_many(tape, zs, impl=None):
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    return (impl or _impl).eval_many(tape.ops, tape.args, tape.consts,
                                     tape.stack_need, zs)


def integrate(tape, z0, t_end, rtol, atol, max_steps, escape_radius,
              impl=None):
    """Integrate u' = tape(u) from z0 over [0, t_end].

    Returns (u, status, attempts).
    """
    d = _dummy_tape()
    u, _, status, n = (impl or _impl).integrate(
        tape.ops, tape.args, tape.consts, tape.stack_need,
        d.ops, d.args, d.consts, d.stack_need,
        complex(z0), float(t_end), float(rtol), float(atol), int(max_steps),
        float(escape_radius), False)
    return u, status, n


def integrate_cocycle(tape_g, tape_w, z0, t_end, rtol, atol, max_steps,
                      escape_radius, impl=None):
    """Integrate u' = tape_g(u), logw' = tape_w(u) jointly.

    Returns (u, logw, status, attempts).
    """
    return (impl or _impl).integrate(
        tape_g.ops, tape_g.args, tape_g.consts, tape_g.stack_need,
        tape_w.ops, tape_w.args, tape_w.consts, tape_w.stack_need,
        complex(z0), float(t_end), float(rtol), float(atol), int(max_steps),
        float(escape_radius), True)


def iterate(tape, z0, max_iter, fp_tol, boundary_thresh, interior_thresh,
            tail_len=100, impl=None):
    """Iterate z -> tape(z).  Returns (z, n, status, tail-array)."""
    tail = np.zeros(tail_len, dtype=np.complex128)
    z, n, status, m = (impl or _impl).iterate(
        tape.ops, tape.args, tape.consts, tape.stack_need, complex(z0),
        int(max_iter), float(fp_tol), float(boundary_thresh),
        float(interior_thresh), tail)
    return z, n, status, tail[:m]
