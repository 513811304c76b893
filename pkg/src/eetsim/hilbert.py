"""Operators on finite tensor-product Hilbert spaces.

The production space is four qubits and two truncated bosonic modes
(total dimension 2^4 * (n_max+1)^2 = 144 at the default cutoff), small
enough that dense storage wins over any sparse bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

HERMITICITY_TOL = 1e-10
ANTIHERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-9
TRACE_TOL = 1e-9
IMAG_RESIDUE_TOL = 1e-9


class LayoutError(ValueError):
    """Unknown slot label, dimension mismatch, or incompatible layouts."""


class OperatorError(ValueError):
    """An operator violates a structural precondition (Hermiticity etc.)."""


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered tensor factorisation: tuple of (label, dimension) pairs."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = [lab for lab, _ in self.subsystems]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels in {labels}")
        for lab, d in self.subsystems:
            if d < 2:
                raise LayoutError(f"subsystem {lab!r} has dimension {d} < 2")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def slot(self, label: str) -> int:
        for i, (lab, _) in enumerate(self.subsystems):
            if lab == label:
                return i
        raise LayoutError(f"unknown slot label {label!r}; have {self.labels}")

    def basis_index(self, occupations: tuple[int, ...]) -> int:
        """Flat index of a product basis state, mixed-radix in layout order."""
        if len(occupations) != len(self.subsystems):
            raise LayoutError("occupation tuple length does not match layout")
        idx = 0
        for occ, d in zip(occupations, self.dims):
            if not 0 <= occ < d:
                raise LayoutError(f"occupation {occ} outside [0, {d})")
            idx = idx * d + occ
        return idx


@dataclass
class DenseOperator:
    """Complex square matrix tied to a layout.

    Units are rad/s for Hamiltonian-like operators and dimensionless for
    states and collapse operators; the carrier itself is unit-agnostic.
    """

    layout: HilbertLayout
    array: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.array = np.asarray(self.array, dtype=np.complex128)
        if self.array.ndim != 2 or self.array.shape[0] != self.array.shape[1]:
            raise LayoutError(f"operator must be square, got shape {self.array.shape}")
        if self.array.shape[0] != self.layout.dim:
            raise LayoutError(
                f"operator dimension {self.array.shape[0]} does not match "
                f"layout dimension {self.layout.dim}"
            )

    # -- small algebra helpers ------------------------------------------------
    def dagger(self) -> "DenseOperator":
        return DenseOperator(self.layout, self.array.conj().T)

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.array - self.array.conj().T).max())

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return self.hermiticity_defect() < tol

    def trace(self) -> complex:
        return complex(np.trace(self.array))

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        _require_same_layout(self, other)
        return DenseOperator(self.layout, self.array + other.array)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        _require_same_layout(self, other)
        return DenseOperator(self.layout, self.array - other.array)

    def __mul__(self, scalar: complex) -> "DenseOperator":
        return DenseOperator(self.layout, self.array * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        _require_same_layout(self, other)
        return DenseOperator(self.layout, self.array @ other.array)


def _require_same_layout(a: DenseOperator, b: DenseOperator) -> None:
    if a.layout != b.layout:
        raise LayoutError("operators live on different layouts")


# -- local building blocks ----------------------------------------------------

IDENTITY_2 = np.eye(2, dtype=np.complex128)
# qubit basis order (|g>, |e>)
SIGMA_P = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |e><g|
SIGMA_M = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |g><e|
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=np.complex128)
SIGMA_X = SIGMA_P + SIGMA_M
PROJ_E = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def boson_annihilation(n_max: int) -> np.ndarray:
    """Truncated lowering operator, sqrt(n) on the first superdiagonal."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    a = np.zeros((n_max + 1, n_max + 1), dtype=np.complex128)
    for n in range(1, n_max + 1):
        a[n - 1, n] = np.sqrt(n)
    return a


def embed(local_op: np.ndarray, slot: str, layout: HilbertLayout) -> DenseOperator:
    """Kronecker-lift a single-subsystem matrix into the full space."""
    local_op = np.asarray(local_op, dtype=np.complex128)
    k = layout.slot(slot)
    d_local = layout.dims[k]
    if local_op.shape != (d_local, d_local):
        raise LayoutError(
            f"local operator shape {local_op.shape} does not match slot "
            f"{slot!r} of dimension {d_local}"
        )
    out = np.eye(1, dtype=np.complex128)
    for i, d in enumerate(layout.dims):
        out = np.kron(out, local_op if i == k else np.eye(d, dtype=np.complex128))
    return DenseOperator(layout, out)


def basis_state(layout: HilbertLayout, occupations: tuple[int, ...]) -> int:
    return layout.basis_index(occupations)


def projector(layout: HilbertLayout, index: int) -> DenseOperator:
    arr = np.zeros((layout.dim, layout.dim), dtype=np.complex128)
    arr[index, index] = 1.0
    return DenseOperator(layout, arr)


def density_matrix(layout: HilbertLayout, array: np.ndarray) -> DenseOperator:
    """State constructor enforcing trace 1 and Hermiticity at build time."""
    rho = DenseOperator(layout, array)
    tr = rho.trace()
    if abs(tr - 1.0) > TRACE_TOL:
        raise OperatorError(f"density matrix trace {tr} deviates from 1 by > {TRACE_TOL}")
    defect = rho.hermiticity_defect()
    if defect >= 1e-12:
        raise OperatorError(f"density matrix Hermiticity defect {defect:.3e} >= 1e-12")
    return rho


def pure_state(layout: HilbertLayout, index: int) -> DenseOperator:
    return density_matrix(layout, projector(layout, index).array)


def unitary_from_generator(S: DenseOperator) -> DenseOperator:
    """exp(S) for anti-Hermitian S (scaling-and-squaring Pade under the hood)."""
    defect = float(np.abs(S.array + S.array.conj().T).max())
    if defect >= ANTIHERMITICITY_TOL:
        raise OperatorError(f"generator is not anti-Hermitian (defect {defect:.3e})")
    U = scipy.linalg.expm(S.array)
    unit_defect = float(np.abs(U.conj().T @ U - np.eye(S.layout.dim)).max())
    if unit_defect >= UNITARITY_TOL:
        raise OperatorError(f"exp(S) failed unitarity check (defect {unit_defect:.3e})")
    return DenseOperator(S.layout, U)


def conjugate(H: DenseOperator, U: DenseOperator) -> DenseOperator:
    """U^dag H U on a shared layout."""
    _require_same_layout(H, U)
    return DenseOperator(H.layout, U.array.conj().T @ H.array @ U.array)


def expectation(rho: DenseOperator, P: DenseOperator) -> float:
    """Re tr(P rho); a large imaginary residue signals a corrupted state."""
    _require_same_layout(rho, P)
    val = complex(np.trace(P.array @ rho.array))
    if abs(val.imag) >= IMAG_RESIDUE_TOL:
        raise OperatorError(
            f"tr(P rho) has imaginary residue {val.imag:.3e}; state or observable corrupted"
        )
    return val.real


def commutator(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    _require_same_layout(A, B)
    return DenseOperator(A.layout, A.array @ B.array - B.array @ A.array)
