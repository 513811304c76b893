"""RK4 stepping kernels for the master equation.

Two interchangeable backends: numba @njit kernels (default) and a pure
numpy path selected with the environment flag EETSIM_NO_NUMBA=1.  Both
advance the density matrix through the identical fixed-step scheme:

    drho/dt = -i (Heff(t) rho - (Heff(t) rho)^dag) + sum_c A_c rho A_c^dag

with Heff(t) = H(t) - i/2 sum_c A_c^dag A_c folded into one matrix (the
anticommutator part of every dissipator rides along in Heff), jump
operators stored channel-wise in COO triplets with sqrt(rate) folded into
the values, and the time dependence of H carried by sparse static terms
multiplied by scalar phases:

    H(t) = Hstatic + sum_k e^{i w_k t} T_k + h.c.

The Hermitian-part trick (one gemm per right-hand side) is exact for
Hermitian rho, which RK4 preserves structurally.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("EETSIM_NO_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in ("1", "true", "yes")


def _rhs_numpy(t, rho, heff, tvals, trows, tcols, toff, tfreqs, jvals, jrows, jcols, joff):
    if toff.shape[0] > 1:
        heff = heff.copy()
        for k in range(tfreqs.shape[0]):
            z = np.exp(1j * tfreqs[k] * t)
            sl = slice(toff[k], toff[k + 1])
            heff[trows[sl], tcols[sl]] += z * tvals[sl]
            heff[tcols[sl], trows[sl]] += np.conj(z * tvals[sl])
    c = heff @ rho
    out = -1j * (c - c.conj().T)
    for ch in range(joff.shape[0] - 1):
        sl = slice(joff[ch], joff[ch + 1])
        v, r, cidx = jvals[sl], jrows[sl], jcols[sl]
        out[np.ix_(r, r)] += (v[:, None] * v.conj()[None, :]) * rho[np.ix_(cidx, cidx)]
    return out


def _advance_numpy(rho, t0, dt, nsteps, heff, tvals, trows, tcols, toff, tfreqs, jvals, jrows, jcols, joff):
    args = (heff, tvals, trows, tcols, toff, tfreqs, jvals, jrows, jcols, joff)
    for n in range(nsteps):
        t = t0 + n * dt
        k1 = _rhs_numpy(t, rho, *args)
        k2 = _rhs_numpy(t + 0.5 * dt, rho + (0.5 * dt) * k1, *args)
        k3 = _rhs_numpy(t + 0.5 * dt, rho + (0.5 * dt) * k2, *args)
        k4 = _rhs_numpy(t + dt, rho + dt * k3, *args)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _rhs(t, rho, heff0, tvals, trows, tcols, toff, tfreqs, jvals, jrows, jcols, joff):
        d = rho.shape[0]
        if toff.shape[0] > 1:
            heff = heff0.copy()
            for k in range(tfreqs.shape[0]):
                z = np.exp(1j * tfreqs[k] * t)
                for p in range(toff[k], toff[k + 1]):
                    w = z * tvals[p]
                    heff[trows[p], tcols[p]] += w
                    heff[tcols[p], trows[p]] += np.conj(w)
        else:
            heff = heff0
        c = np.dot(heff, rho)
        out = np.empty((d, d), dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                out[i, j] = -1j * (c[i, j] - np.conj(c[j, i]))
        for ch in range(joff.shape[0] - 1):
            lo, hi = joff[ch], joff[ch + 1]
            for p in range(lo, hi):
                vp = jvals[p]
                rp = jrows[p]
                cp = jcols[p]
                for q in range(lo, hi):
                    out[rp, jrows[q]] += vp * np.conj(jvals[q]) * rho[cp, jcols[q]]
        return out

    @njit(cache=True)
    def _advance(rho, t0, dt, nsteps, heff, tvals, trows, tcols, toff, tfreqs, jvals, jrows, jcols, joff):
        for n in range(nsteps):
            t = t0 + n * dt
            k1 = _rhs(t, rho, heff, tvals, trows, tcols, toff, tfreqs, jvals, jrows, jcols, joff)
            k2 = _rhs(t + 0.5 * dt, rho + (0.5 * dt) * k1, heff, tvals, trows, tcols, toff, tfreqs,
                      jvals, jrows, jcols, joff)
            k3 = _rhs(t + 0.5 * dt, rho + (0.5 * dt) * k2, heff, tvals, trows, tcols, toff, tfreqs,
                      jvals, jrows, jcols, joff)
            k4 = _rhs(t + dt, rho + dt * k3, heff, tvals, trows, tcols, toff, tfreqs,
                      jvals, jrows, jcols, joff)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return rho

    return _advance, _rhs


if NUMBA_REQUESTED:
    advance, rhs_kernel = _build_numba()
    BACKEND = "numba"
else:
    advance, rhs_kernel = _advance_numpy, _rhs_numpy
    BACKEND = "numpy"


def coo_from_dense(mat: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(values, rows, cols) of the nonzero entries, row-major order."""
    rows, cols = np.nonzero(np.abs(mat) > tol)
    return mat[rows, cols].astype(np.complex128), rows.astype(np.int64), cols.astype(np.int64)


def pack_channels(mats: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Concatenate per-channel COO triplets with an offset table."""
    vals, rows, cols, off = [], [], [], [0]
    for m in mats:
        v, r, c = coo_from_dense(m)
        vals.append(v)
        rows.append(r)
        cols.append(c)
        off.append(off[-1] + v.shape[0])
    if not mats:
        return (np.zeros(0, np.complex128), np.zeros(0, np.int64), np.zeros(0, np.int64),
                np.zeros(1, np.int64))
    return (np.concatenate(vals), np.concatenate(rows), np.concatenate(cols),
            np.asarray(off, dtype=np.int64))
