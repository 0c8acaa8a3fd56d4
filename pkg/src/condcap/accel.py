"""Hot numerical kernels: numba-jitted loops with a pure-numpy fallback.

The numpy path is selected by setting the environment variable
``CONDCAP_NO_NUMBA=1`` before import (or automatically when numba is not
installed).  Both paths compute identical quantities; see
``benchmarks/bench_kernels.py`` for a speed comparison.

The discrete operators come from the boundary values of Cauchy-type
integrals.  With g complex on the nodes and c_ij = eta'_j/(eta_j-eta_i),
the regularized principal-value integral along the whole boundary is

    I_i = w * sum_{j != i} c_ij (g_j - g_i) + i pi kappa_i g_i + w g'(t_i)

(w = 2*pi/n the trapezoidal weight, kappa_i the half-residue count of
the point's component layout, g' the derivative of the trigonometric
interpolant).  Subtracting g_i keeps the integrand bounded through the
singularity, which is what preserves accuracy on corner-graded meshes.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("CONDCAP_NO_NUMBA", "")
NUMBA_DISABLED = _flag not in ("", "0")

if not NUMBA_DISABLED:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_DISABLED = True

USING_NUMBA = not NUMBA_DISABLED

_ROW_CHUNK = 256  # keeps numpy temporaries modest at 10k+ nodes


def spectral_diff_table(n: int) -> np.ndarray:
    """First column generator of the periodic differentiation matrix:
    D_ij = dt[(i - j) mod n], dt[0] = 0, dt[d] = 0.5 (-1)^d cot(pi d / n)."""
    d = np.arange(n, dtype=np.float64)
    dt = np.zeros(n)
    dt[1:] = 0.5 * (-1.0) ** d[1:] / np.tan(np.pi * d[1:] / n)
    return dt


def spectral_derivative(values: np.ndarray, n: int) -> np.ndarray:
    """Blockwise derivative of the trigonometric interpolant (complex ok).

    Matches the cotangent differentiation matrix exactly, including the
    zeroed Nyquist mode.
    """
    values = np.asarray(values)
    out = np.empty_like(values, dtype=complex)
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0
    for b0 in range(0, values.shape[0], n):
        out[b0 : b0 + n] = np.fft.ifft(np.fft.fft(values[b0 : b0 + n]) * (1j * k))
    return out


# ----------------------------------------------------------------------
# numpy implementations
# ----------------------------------------------------------------------

def _operator_matrices_numpy(eta, deta, avals, kappa, n):
    """Real Nystrom matrices (N_w, M_w) of the kernel pair, weights folded in.

    The complex entry is T_ij = (i/pi) conj(A_i K_ij / A_j) with
    K_ij = w c_ij + w D_ij (same component) and the diagonal carrying
    i pi kappa_i minus the full off-diagonal row sum of c.  N_w = Re T,
    M_w = Im T.
    """
    total = eta.shape[0]
    w = 2.0 * np.pi / n
    dt = spectral_diff_table(n)
    nmat = np.empty((total, total))
    mmat = np.empty((total, total))
    idx = np.arange(total)
    rowsum = np.zeros(total, dtype=complex)
    for r0 in range(0, total, _ROW_CHUNK):
        r1 = min(r0 + _ROW_CHUNK, total)
        rows = idx[r0:r1]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = deta[None, :] / (eta[None, :] - eta[rows, None])
        c[rows - r0, rows] = 0.0
        rowsum[r0:r1] = c.sum(axis=1)
        same = (rows[:, None] // n) == (idx[None, :] // n)
        k_ij = w * (c + np.where(same, dt[(rows[:, None] - idx[None, :]) % n], 0.0))
        p = k_ij * (avals[rows, None] / avals[None, :])
        nmat[r0:r1] = p.imag / np.pi
        mmat[r0:r1] = p.real / np.pi
    kdiag = 1j * np.pi * kappa - w * rowsum
    nmat[idx, idx] = kdiag.imag / np.pi
    mmat[idx, idx] = kdiag.real / np.pi
    return nmat, mmat


def _cauchy_offdiag_numpy(eta, deta, v):
    """s_i = sum_{j != i} eta'_j v_j / (eta_j - eta_i) (v complex)."""
    total = eta.shape[0]
    out = np.empty(total, dtype=complex)
    idx = np.arange(total)
    for r0 in range(0, total, _ROW_CHUNK):
        r1 = min(r0 + _ROW_CHUNK, total)
        rows = idx[r0:r1]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = (deta * v)[None, :] / (eta[None, :] - eta[rows, None])
        c[rows - r0, rows] = 0.0
        out[r0:r1] = c.sum(axis=1)
    return out


def _cauchy_sums_numpy(eta, deta, fvals, z):
    """sum_j f_j eta'_j / (eta_j - z) and sum_j eta'_j / (eta_j - z)."""
    z = np.asarray(z, dtype=complex)
    num = np.empty(z.shape, dtype=complex)
    den = np.empty(z.shape, dtype=complex)
    step = max(1, (1 << 22) // max(eta.size, 1))
    for p0 in range(0, z.size, step):
        p1 = min(p0 + step, z.size)
        diff = eta[None, :] - z[p0:p1, None]
        num[p0:p1] = np.sum(fvals[None, :] * deta[None, :] / diff, axis=1)
        den[p0:p1] = np.sum(deta[None, :] / diff, axis=1)
    return num, den


# ----------------------------------------------------------------------
# numba implementations (same contracts as the numpy versions)
# ----------------------------------------------------------------------

if USING_NUMBA:

    @_njit(cache=True)
    def _operator_matrices_jit(eta, deta, avals, kappa, n):  # pragma: no cover
        total = eta.shape[0]
        w = 2.0 * np.pi / n
        inv_pi = 1.0 / np.pi
        dt = np.zeros(n)
        sign = -1.0
        for d in range(1, n):
            dt[d] = 0.5 * sign / np.tan(np.pi * d / n)
            sign = -sign
        nmat = np.empty((total, total))
        mmat = np.empty((total, total))
        for i in range(total):
            zi = eta[i]
            ai = avals[i]
            ci = i // n
            rowsum = 0.0 + 0.0j
            for j in range(total):
                if j == i:
                    continue
                c = deta[j] / (eta[j] - zi)
                rowsum += c
                k = w * c
                if j // n == ci:
                    k += w * dt[(i - j) % n]
                p = k * ai / avals[j]
                nmat[i, j] = p.imag * inv_pi
                mmat[i, j] = p.real * inv_pi
            kd = 1j * np.pi * kappa[i] - w * rowsum
            nmat[i, i] = kd.imag * inv_pi
            mmat[i, i] = kd.real * inv_pi
        return nmat, mmat

    @_njit(cache=True)
    def _cauchy_offdiag_jit(eta, deta, v):  # pragma: no cover
        total = eta.shape[0]
        out = np.empty(total, dtype=np.complex128)
        dv = deta * v
        for i in range(total):
            zi = eta[i]
            acc = 0.0 + 0.0j
            for j in range(total):
                if j != i:
                    acc += dv[j] / (eta[j] - zi)
            out[i] = acc
        return out

    @_njit(cache=True)
    def _cauchy_sums_jit(eta, deta, fvals, z):  # pragma: no cover
        npts = z.shape[0]
        nn = eta.shape[0]
        num = np.empty(npts, dtype=np.complex128)
        den = np.empty(npts, dtype=np.complex128)
        for p in range(npts):
            sn = 0.0 + 0.0j
            sd = 0.0 + 0.0j
            zp = z[p]
            for j in range(nn):
                r = deta[j] / (eta[j] - zp)
                sn += fvals[j] * r
                sd += r
            num[p] = sn
            den[p] = sd
        return num, den

    operator_matrices = _operator_matrices_jit
    cauchy_offdiag = _cauchy_offdiag_jit
    _cauchy_sums = _cauchy_sums_jit
else:
    operator_matrices = _operator_matrices_numpy
    cauchy_offdiag = _cauchy_offdiag_numpy
    _cauchy_sums = _cauchy_sums_numpy


def cauchy_sums(eta, deta, fvals, z):
    z = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=complex)))
    return _cauchy_sums(
        np.ascontiguousarray(eta),
        np.ascontiguousarray(deta),
        np.ascontiguousarray(np.asarray(fvals, dtype=complex)),
        z,
    )
