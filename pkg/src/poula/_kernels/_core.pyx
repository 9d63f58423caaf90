# cython: language_level=3
"""Compiled chain kernel.

Operation-for-operation mirror of _ref.theopoula_chunk: identical expression
grouping, identical binary-squaring powers, and the same 80-bit extended
precision for the high-degree polynomial terms, so trajectories match the
pure-numpy backend bit for bit. Any change here must be made in lockstep
with _ref.py and poula.theopoula.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport copysign, fabs, isfinite, sqrt

cnp.import_array()

GRAD_MOTIVATING = 0
GRAD_QUADRATIC = 1

name = "cython"


cdef inline long double ipow_ld(long double base, int e) noexcept nogil:
    cdef long double acc = 1.0
    cdef long double p = base
    while e:
        if e & 1:
            acc = acc * p
        e >>= 1
        if e:
            p = p * p
    return acc


cdef inline double ipow_d(double base, int e) noexcept nogil:
    cdef double acc = 1.0
    cdef double p = base
    while e:
        if e & 1:
            acc = acc * p
        e >>= 1
        if e:
            p = p * p
    return acc


cdef inline double grad_motivating(double th, double x) noexcept nogil:
    cdef long double t = th
    cdef long double ind = 1.0 if x <= 1.0 else 0.0
    cdef long double t29 = ipow_ld(t, 29)
    cdef long double sgn
    cdef long double res
    if fabs(th) <= 1.0:
        res = 2.0 * t * (1.0 + ind) + 30.0 * t29
    else:
        sgn = 1.0 if t > 0.0 else (-1.0 if t < 0.0 else 0.0)
        res = 2.0 * (1.0 + ind) * sgn + 30.0 * t29
    return <double> res


def theopoula_chunk(
    double[::1] theta,
    xs,
    zs,
    int n_steps,
    double lam,
    double boost_floor,
    double reg_strength,
    int reg_exponent,
    double noise_scale,
    int grad_kind,
    double grad_a,
    record,
):
    """Advance all chains ``n_steps`` steps in place; see _ref.theopoula_chunk."""
    cdef Py_ssize_t m = theta.shape[0]
    cdef Py_ssize_t i, c
    cdef double s = sqrt(lam)
    cdef double inv_s = 1.0 / s
    cdef double sat = 1e300 / s
    cdef bint boost_inf = boost_floor == float("inf")
    cdef bint noise_on = zs is not None
    cdef bint has_data = xs is not None
    cdef bint has_record = record is not None
    cdef bint has_reg = reg_strength > 0.0
    cdef int two_r = 2 * reg_exponent

    cdef double[:, ::1] xs_v = xs if has_data else None
    cdef double[:, ::1] zs_v = zs if noise_on else None
    cdef double[:, ::1] rec_v = record if has_record else None

    cdef double th, g, ag, t, h, anorm, pow_norm

    with nogil:
        for i in range(n_steps):
            for c in range(m):
                th = theta[c]
                if grad_kind == 0:
                    g = grad_motivating(th, xs_v[i, c])
                else:
                    g = grad_a * th
                ag = fabs(g)
                if ag > sat:
                    h = copysign(inv_s, g)
                else:
                    t = g / (1.0 + s * ag)
                    if boost_inf:
                        h = t
                    else:
                        h = t * (1.0 + s / (boost_floor + ag))
                if has_reg:
                    anorm = fabs(th)
                    pow_norm = ipow_d(anorm, two_r)
                    if isfinite(pow_norm):
                        h = h + reg_strength * th * pow_norm / (1.0 + s * pow_norm)
                    else:
                        h = h + reg_strength * th / s
                th = th - lam * h
                if noise_on:
                    th = th + noise_scale * zs_v[i, c]
                theta[c] = th
                if has_record:
                    rec_v[i, c] = th
    return np.asarray(theta)
