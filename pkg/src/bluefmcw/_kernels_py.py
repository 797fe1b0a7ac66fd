"""Numpy implementation of the mixer kernel, used when the extension is absent."""

import numpy as np


def accumulate_mixer(out, delay, mid, amp, f_c, slope, mask=None):
    """Add ``amp * exp(j*2*pi*delay*(f_c + slope*mid))`` to ``out`` in place.

    The cycle count is reduced modulo 1 before scaling by 2*pi so that
    phases of millions of cycles keep full precision.
    """
    n = out.shape[0]
    if delay.shape[0] != n or mid.shape[0] != n:
        raise ValueError("delay/mid length does not match output")
    cyc = delay * (f_c + slope * mid)
    cyc -= np.floor(cyc)
    tone = np.exp(2j * np.pi * cyc)
    tone *= amp
    if mask is not None:
        if mask.shape[0] != n:
            raise ValueError("mask length does not match output")
        tone[~mask.astype(bool)] = 0
    out += tone
