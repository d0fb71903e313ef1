"""Quaternions and quaternionic Hermitian matrices.

A quaternion w + x i + y j + z k is held either as four reals (scalar
case) or, for matrices, in Cayley-Dickson form A + B j with A, B complex
ndarrays: q = (w + x i) + (y + z i) j.  The complex embedding used
throughout maps each entry to the 2x2 block

    [[w + x i,  y + z i],
     [-y + z i, w - x i]]

so an n x n quaternionic matrix becomes a 2n x 2n complex matrix whose
eigenvalues come in doubled pairs when the original matrix is Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        a, b = self, other
        return Quaternion(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )


class QuaternionMatrix:
    """n x n quaternionic matrix in Cayley-Dickson form M = A + B j."""

    def __init__(self, a: np.ndarray, b: np.ndarray):
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("A and B must be equal square matrices")
        self.a = a
        self.b = b

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @classmethod
    def from_components(cls, w, x, y, z) -> "QuaternionMatrix":
        return cls(np.asarray(w) + 1j * np.asarray(x), np.asarray(y) + 1j * np.asarray(z))

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion(
            float(self.a[i, j].real), float(self.a[i, j].imag),
            float(self.b[i, j].real), float(self.b[i, j].imag),
        )

    def conj_transpose(self) -> "QuaternionMatrix":
        # (A + B j)^dagger = A^dagger - B^T j
        return QuaternionMatrix(self.a.conj().T, -self.b.T)

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        # (A1 + B1 j)(A2 + B2 j) = (A1 A2 - B1 conj(B2)) + (A1 B2 + B1 conj(A2)) j
        a = self.a @ other.a - self.b @ other.b.conj()
        b = self.a @ other.b + self.b @ other.a.conj()
        return QuaternionMatrix(a, b)

    def __mul__(self, scalar: float) -> "QuaternionMatrix":
        return QuaternionMatrix(self.a * scalar, self.b * scalar)

    __rmul__ = __mul__

    def trace_real(self) -> float:
        return float(np.trace(self.a).real)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return (
            np.allclose(self.a, self.a.conj().T, atol=tol)
            and np.allclose(self.b, -self.b.T, atol=tol)
        )

    def max_abs_diff(self, other: "QuaternionMatrix") -> float:
        return max(
            float(np.max(np.abs(self.a - other.a))),
            float(np.max(np.abs(self.b - other.b))),
        )

    def embed_blockwise(self) -> np.ndarray:
        """Complex 2n x 2n embedding with per-entry 2x2 blocks (interleaved layout)."""
        n = self.n
        out = np.empty((2 * n, 2 * n), dtype=np.complex128)
        out[0::2, 0::2] = self.a
        out[0::2, 1::2] = self.b
        out[1::2, 0::2] = -self.b.conj()
        out[1::2, 1::2] = self.a.conj()
        return out

    def embed_blocked(self) -> np.ndarray:
        """Complex 2n x 2n embedding in [[A, B], [-conj(B), conj(A)]] layout.

        A permutation similarity away from :meth:`embed_blockwise`; spectra
        and determinants agree.
        """
        n = self.n
        out = np.empty((2 * n, 2 * n), dtype=np.complex128)
        out[:n, :n] = self.a
        out[:n, n:] = self.b
        out[n:, :n] = -self.b.conj()
        out[n:, n:] = self.a.conj()
        return out


def embed_blocked_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched [[A, B], [-conj(B), conj(A)]] embedding for (m, n, n) inputs."""
    m, n, _ = a.shape
    out = np.empty((m, 2 * n, 2 * n), dtype=np.complex128)
    out[:, :n, :n] = a
    out[:, :n, n:] = b
    out[:, n:, :n] = -b.conj()
    out[:, n:, n:] = a.conj()
    return out
