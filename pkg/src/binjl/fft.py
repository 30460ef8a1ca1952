"""Circular cross-correlation with a fixed real generator.

Two routes compute ``y[i] = sum_j xi[(j - i) mod N] x[j]`` for real ``x``:

* ``"rfft"``: ``irfft(conj(rfft(xi)) * rfft(x))``. Fastest while the transform
  fits in cache.
* ``"fourstep"``: pack ``x`` as ``N/2`` complex values (even + i*odd), run a
  transpose-based four-step FFT of length ``N/2`` (row transforms of about
  ``sqrt(N/2)`` points each), apply the correlation directly in the packed
  spectrum, and invert. Past the L2 size this keeps the ``N log N`` slope that
  a single large transform loses.

The packed spectral step is ``Z'[k] = alpha[k] Z[k] + beta[k] conj(Z[-k])``,
where ``alpha`` and ``beta`` fold together the real-FFT split, the correlation
spectrum and the real-IFFT merge.
"""

from __future__ import annotations

import numpy as np

from binjl._jit import USE_NUMBA, njit

FOURSTEP_MIN = 1 << 14


@njit(cache=True)
def _packed_combine_numba(d, alpha, beta, out):
    # d, out: (count, M1, M2) complex; alpha, beta: (M1, M2)
    count, m1, m2 = d.shape
    for c in range(count):
        for k2 in range(m2):
            out[c, 0, k2] = alpha[0, k2] * d[c, 0, k2] + beta[0, k2] * np.conj(d[c, 0, (m2 - k2) % m2])
        for k1 in range(1, m1):
            r = m1 - k1
            for k2 in range(m2):
                out[c, k1, k2] = alpha[k1, k2] * d[c, k1, k2] + beta[k1, k2] * np.conj(d[c, r, m2 - 1 - k2])
    return out


def _packed_combine_numpy(d, alpha, beta, out):
    # Z[-k] in the (k1, k2) layout, k = k1 + M1*k2: row 0 maps k2 -> -k2,
    # rows k1 > 0 map to (M1 - k1, M2 - 1 - k2).
    out[:, 0, :] = np.roll(d[:, 0, ::-1], 1, axis=-1)
    out[:, 1:, :] = d[:, :0:-1, ::-1]
    np.conjugate(out, out=out)
    out *= beta
    out += alpha * d
    return out


_packed_combine = _packed_combine_numba if USE_NUMBA else _packed_combine_numpy


class CorrelationPlan:
    """Precomputed spectra for correlating against one generator ``xi``."""

    def __init__(self, xi: np.ndarray, method: str | None = None):
        xi = np.asarray(xi, dtype=np.float64)
        n = xi.shape[0]
        if xi.ndim != 1 or n < 1 or n & (n - 1):
            raise ValueError(f"generator length must be a power of two, got shape {xi.shape}")
        if method is None:
            method = "fourstep" if n >= FOURSTEP_MIN else "rfft"
        if method not in ("rfft", "fourstep"):
            raise ValueError(f"unknown method {method!r}")
        if method == "fourstep" and n < 4:
            method = "rfft"
        self.n = n
        self.method = method
        self.spectrum = np.conj(np.fft.rfft(xi))
        if method == "fourstep":
            self._init_fourstep(xi)

    def _init_fourstep(self, xi: np.ndarray) -> None:
        n = self.n
        M = n // 2
        M1 = 1 << ((M.bit_length() - 1) // 2)
        M2 = M // M1
        self.M1, self.M2 = M1, M2
        n2 = np.arange(M2)[:, None]
        k1 = np.arange(M1)[None, :]
        self.tw_fwd = np.exp(-2j * np.pi * n2 * k1 / M)
        self.tw_inv = np.ascontiguousarray(np.conj(self.tw_fwd.T))
        S = np.conj(np.fft.fft(xi))
        w = np.exp(-2j * np.pi * np.arange(M) / n)
        p, q = 0.5 + w / 2j, 0.5 - w / 2j
        r, s = 0.5 + 0.5j / w, 0.5 - 0.5j / w
        alpha = r * S[:M] * p + s * S[M:] * q
        beta = r * S[:M] * q + s * S[M:] * p
        # spectrum index k = k1 + M1*k2 stored at [k1, k2]
        self.alpha = np.ascontiguousarray(alpha.reshape(M2, M1).T)
        self.beta = np.ascontiguousarray(beta.reshape(M2, M1).T)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n:
            raise ValueError(f"length mismatch: plan has {self.n}, x has {x.shape[-1]}")
        if self.method == "rfft":
            return np.fft.irfft(self.spectrum * np.fft.rfft(x, axis=-1), n=self.n, axis=-1)
        return self._fourstep(x)

    def _fourstep(self, x: np.ndarray) -> np.ndarray:
        M1, M2 = self.M1, self.M2
        lead = x.shape[:-1]
        z = np.ascontiguousarray(x).reshape(-1, self.n).view(np.complex128)
        b = np.fft.fft(z.reshape(-1, M1, M2).swapaxes(-1, -2), axis=-1)
        b *= self.tw_fwd
        d = np.fft.fft(b.swapaxes(-1, -2), axis=-1)
        d = _packed_combine(d, self.alpha, self.beta, np.empty_like(d))
        e = np.fft.ifft(d, axis=-1)
        e *= self.tw_inv
        f = np.fft.ifft(e.swapaxes(-1, -2), axis=-1)
        out = np.ascontiguousarray(f.swapaxes(-1, -2)).reshape(-1, self.n // 2)
        return out.view(np.float64).reshape(lead + (self.n,))
