"""Compiled inner loops.

Every kernel here reproduces, bit for bit, the integer mixing defined in
:mod:`sparsejl.randomness`. The pure-Python and NumPy paths in that module are
the reference; tests cross-check the three.
"""
from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_LOW32 = np.uint64(0xFFFFFFFF)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_S63 = np.uint64(63)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_INV53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * np.pi


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def raw_at(key, j):
    return mix64(key + (j + _ONE) * GOLDEN)


@njit(cache=True, inline="always")
def bucket_of(v, k):
    # high word of the 128-bit product v*k, assembled from 32-bit halves (k < 2**32)
    hi = v >> _S32
    lo = v & _LOW32
    return (hi * k + ((lo * k) >> _S32)) >> _S32


@njit(cache=True, inline="always")
def sign_of(v):
    return -1.0 if (v >> _S63) else 1.0


@njit(cache=True, inline="always")
def gaussian_at(key, j):
    a = raw_at(key, _TWO * j)
    b = raw_at(key, _TWO * j + _ONE)
    u1 = (float(a >> _S11) + 1.0) * _INV53
    u2 = float(b >> _S11) * _INV53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)


@njit(cache=True)
def signs_into(key, idx, out):
    for t in range(idx.shape[0]):
        out[t] = sign_of(raw_at(key, np.uint64(idx[t])))


@njit(cache=True)
def buckets_into(key, idx, k, out):
    kk = np.uint64(k)
    for t in range(idx.shape[0]):
        out[t] = np.int64(bucket_of(raw_at(key, np.uint64(idx[t])), kk))


@njit(cache=True)
def gaussians_into(key, idx, out):
    for t in range(idx.shape[0]):
        out[t] = gaussian_at(key, np.uint64(idx[t]))


@njit(cache=True)
def hash_scatter(sign_key, bucket_key, k, idx, vals, out):
    """out[h(j)] += r_j * x_j over the given entries."""
    kk = np.uint64(k)
    for t in range(idx.shape[0]):
        j = np.uint64(idx[t])
        row = bucket_of(raw_at(bucket_key, j), kk)
        if raw_at(sign_key, j) >> _S63:
            out[row] -= vals[t]
        else:
            out[row] += vals[t]


@njit(cache=True)
def replicated_scatter(sign_key, bucket_key, k, c, idx, vals, out):
    """Hash every replica j*c + r of each entry with weight x_j / sqrt(c)."""
    kk = np.uint64(k)
    cc = np.uint64(c)
    scale = 1.0 / np.sqrt(c)
    for t in range(idx.shape[0]):
        base = np.uint64(idx[t]) * cc
        v = vals[t] * scale
        for r in range(c):
            j = base + np.uint64(r)
            row = bucket_of(raw_at(bucket_key, j), kk)
            if raw_at(sign_key, j) >> _S63:
                out[row] -= v
            else:
                out[row] += v


@njit(cache=True)
def replicated_gauss_scatter(gauss_key, bucket_key, k, c, idx, vals, out):
    kk = np.uint64(k)
    cc = np.uint64(c)
    scale = 1.0 / np.sqrt(c)
    for t in range(idx.shape[0]):
        base = np.uint64(idx[t]) * cc
        v = vals[t] * scale
        for r in range(c):
            j = base + np.uint64(r)
            row = bucket_of(raw_at(bucket_key, j), kk)
            out[row] += v * gaussian_at(gauss_key, j)


@njit(cache=True)
def fwht_rows(mat):
    """Unnormalized Walsh-Hadamard butterflies along the last axis, in place."""
    n_rows, m = mat.shape
    for row in range(n_rows):
        h = 1
        while h < m:
            for i in range(0, m, 2 * h):
                for j in range(i, i + h):
                    a = mat[row, j]
                    b = mat[row, j + h]
                    mat[row, j] = a + b
                    mat[row, j + h] = a - b
            h *= 2


@njit(cache=True)
def block_scatter(idx, vals, b, slot_of_block, mat):
    """mat[slot_of_block[j // b], j % b] += x_j; duplicates accumulate."""
    for t in range(idx.shape[0]):
        j = idx[t]
        mat[slot_of_block[j // b], j % b] += vals[t]
