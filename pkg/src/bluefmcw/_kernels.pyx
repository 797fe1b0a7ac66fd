# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled mixer-output accumulation."""

from libc.math cimport cos, floor, sin, M_PI


def accumulate_mixer(double complex[::1] out, const double[::1] delay, const double[::1] mid,
                     double amp, double f_c, double slope, const unsigned char[::1] mask=None):
    cdef Py_ssize_t i, n = out.shape[0]
    cdef double cyc, ph
    cdef bint use_mask = mask is not None
    if delay.shape[0] != n or mid.shape[0] != n:
        raise ValueError("delay/mid length does not match output")
    if mask is not None and mask.shape[0] != n:
        raise ValueError("mask length does not match output")
    with nogil:
        for i in range(n):
            if use_mask and not mask[i]:
                continue
            cyc = delay[i] * (f_c + slope * mid[i])
            ph = 2.0 * M_PI * (cyc - floor(cyc))
            out[i] = out[i] + amp * (cos(ph) + 1j * sin(ph))
