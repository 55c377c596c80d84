"""Compact matrix groups U(1), O(n), U(n) in their defining representations.

Group elements are plain n x n arrays (U(1) as 1 x 1 complex). Batches are
arrays of shape (..., n, n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

UNITARITY_TOL = 1e-10
REPROJECT_TOL = 1e-12

_KINDS = {"u1": "U1", "on": "On", "un": "Un"}


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def skew(m: np.ndarray) -> np.ndarray:
    """Projection onto the Lie algebra (anti-Hermitian part)."""
    return 0.5 * (m - adjoint(m))


@dataclass(frozen=True)
class Group:
    kind: str
    n: int = 1

    def __post_init__(self):
        kind = _KINDS.get(self.kind.lower())
        if kind is None:
            raise ValidationError(f"unknown group {self.kind!r}; expected U1, On or Un")
        object.__setattr__(self, "kind", kind)
        if kind == "U1" and self.n != 1:
            raise ValidationError("U1 has fibre dimension 1")
        if self.n < 1:
            raise ValidationError("fibre dimension must be positive")

    @property
    def dtype(self):
        return np.float64 if self.kind == "On" else np.complex128

    @property
    def is_abelian(self) -> bool:
        return self.kind == "U1" or (self.kind == "On" and self.n == 1)

    def identity(self, *batch: int) -> np.ndarray:
        return np.broadcast_to(np.eye(self.n, dtype=self.dtype), (*batch, self.n, self.n)).copy()

    def random(self, rng: np.random.Generator, *batch: int) -> np.ndarray:
        """Haar-distributed elements.

        U(1): uniform angle. O(n), U(n): QR of a Gaussian matrix with the
        phases of diag(R) moved into Q.
        """
        if self.kind == "U1":
            theta = rng.uniform(0.0, 2 * np.pi, size=batch)
            return np.exp(1j * theta)[..., None, None]
        shape = (*batch, self.n, self.n)
        z = rng.standard_normal(shape)
        if self.kind == "Un":
            z = (z + 1j * rng.standard_normal(shape)) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r, axis1=-2, axis2=-1)
        phase = diag / np.abs(diag)
        return q * phase[..., None, :]

    def random_tangent(self, rng: np.random.Generator, *batch: int) -> np.ndarray:
        """Random Lie-algebra elements (anti-Hermitian / antisymmetric)."""
        shape = (*batch, self.n, self.n)
        z = rng.standard_normal(shape)
        if self.kind != "On":
            z = z + 1j * rng.standard_normal(shape)
        return skew(z).astype(self.dtype)

    def unitarity_defect(self, mats: np.ndarray) -> float:
        if mats.size == 0:
            return 0.0
        prod = mats @ adjoint(mats)
        return float(np.max(np.abs(prod - np.eye(self.n))))

    def coerce(self, mats, what: str = "group element") -> np.ndarray:
        """Validate and, if slightly off the manifold, re-orthonormalize.

        Raises ValidationError beyond UNITARITY_TOL; applies the polar
        projection U (U^dagger U)^(-1/2) when the defect exceeds REPROJECT_TOL.
        """
        mats = np.asarray(mats)
        if mats.shape[-2:] != (self.n, self.n):
            raise ValidationError(f"{what} has shape {mats.shape[-2:]}, expected ({self.n}, {self.n})")
        if self.kind == "On" and np.iscomplexobj(mats):
            if np.max(np.abs(mats.imag), initial=0.0) > 0:
                raise ValidationError(f"{what} for O(n) must be real")
            mats = mats.real
        mats = mats.astype(self.dtype)
        defect = self.unitarity_defect(mats)
        if defect > UNITARITY_TOL:
            raise ValidationError(f"{what} is not orthogonal/unitary (defect {defect:.3g})")
        if defect > REPROJECT_TOL:
            mats = polar_projection(mats)
        return mats

    def exp(self, xi: np.ndarray) -> np.ndarray:
        """Matrix exponential of Lie-algebra elements via Hermitian eigendecomposition."""
        h = -1j * xi
        h = 0.5 * (h + adjoint(h))
        lam, vecs = np.linalg.eigh(h)
        out = (vecs * np.exp(1j * lam)[..., None, :]) @ adjoint(vecs)
        return out.real.copy() if self.kind == "On" else out


def polar_projection(mats: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(mats)
    return u @ vh


def u1(theta) -> np.ndarray:
    return np.exp(1j * np.asarray(theta, dtype=float))[..., None, None]
