"""Compiled inner loops for evaluating exponential sums on uniform grids."""

import math

import numba
import numpy as np

BLOCK = 64


@numba.njit(cache=True, nogil=True)
def _exp_sum_uniform(z, wts, u0, du, count, block):
    # S_j = sum_k wts_k exp(i (u0 + j du) z_k), j < count.
    # Each term is exp(i u_b z) * exp(i r du z) with u_b the block start:
    # two directly evaluated exponentials, no running recurrence.
    nb = (count + block - 1) // block
    acc_re = np.zeros(nb * block)
    acc_im = np.zeros(nb * block)
    step_re = np.empty(block)
    step_im = np.empty(block)
    for k in range(z.size):
        zk = z[k]
        wk = wts[k]
        for r in range(block):
            a = r * du * zk
            step_re[r] = math.cos(a)
            step_im[r] = math.sin(a)
        for b in range(nb):
            a = (u0 + b * block * du) * zk
            cr = wk * math.cos(a)
            ci = wk * math.sin(a)
            off = b * block
            for r in range(block):
                acc_re[off + r] += cr * step_re[r] - ci * step_im[r]
                acc_im[off + r] += cr * step_im[r] + ci * step_re[r]
    out = np.empty(count, dtype=np.complex128)
    for j in range(count):
        out[j] = complex(acc_re[j], acc_im[j])
    return out


def exp_sum_uniform(z, wts, u0: float, du: float, count: int) -> np.ndarray:
    """sum_k wts[k] * exp(1j * (u0 + j*du) * z[k]) for j = 0..count-1."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    wts = np.ascontiguousarray(wts, dtype=np.float64)
    if count <= 0:
        return np.zeros(0, dtype=np.complex128)
    return _exp_sum_uniform(z, wts, float(u0), float(du), int(count), BLOCK)


@numba.njit(cache=True, nogil=True)
def _pair_integrals(rows_l, rows_r, wl, wr, x1, x2):
    # For every row pair i < j:
    #   I1[i, j] = sum w |row_j - row_i| x1,  I2[i, j] = sum w |row_j - row_i|^2 x2
    # over left and right one-sided values, in a fixed sequential order.
    nr, npt = rows_l.shape
    i1 = np.zeros((nr, nr))
    i2 = np.zeros((nr, nr))
    for i in range(nr):
        for j in range(i + 1, nr):
            s1 = 0.0
            s2 = 0.0
            for p in range(npt):
                dl = abs(rows_l[j, p] - rows_l[i, p])
                dr = abs(rows_r[j, p] - rows_r[i, p])
                s1 += (wl[p] * dl + wr[p] * dr) * x1[p]
                s2 += (wl[p] * dl * dl + wr[p] * dr * dr) * x2[p]
            i1[i, j] = s1
            i2[i, j] = s2
    return i1, i2


def pair_integrals(rows_l, rows_r, wl, wr, x1, x2):
    """Weighted L1 / L2 integrals of all row differences (upper triangle)."""
    c = lambda a: np.ascontiguousarray(a, dtype=np.float64)
    return _pair_integrals(c(rows_l), c(rows_r), c(wl), c(wr), c(x1), c(x2))
