"""
Truncated two-mode Fock basis, pure states, operators and the gamma coefficient.

Flat index convention (fixed): |n_a, n_b> -> n_a * (n_max + 1) + n_b.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .exceptions import BasisError, DensityMatrixError, IndexRangeError, InvalidStateError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-10


def log_factorial(n: int) -> float:
    """log n! via the log-gamma function."""
    if n < 0:
        raise IndexRangeError(f"log_factorial needs n >= 0, got {n}")
    return float(gammaln(n + 1))


def log_binomial(n: int, k: int) -> float:
    """log C(n, k) for 0 <= k <= n."""
    if not 0 <= k <= n:
        raise IndexRangeError(f"Binomial index out of range: C({n}, {k})")
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


@dataclass(frozen=True)
class BasisState:
    """Two-mode occupation |n_a, n_b>."""

    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 0 or self.n_b < 0:
            raise InvalidStateError(f"Photon numbers must be non-negative, got {self}")

    def swapped(self) -> "BasisState":
        return BasisState(self.n_b, self.n_a)

    @property
    def total(self) -> int:
        return self.n_a + self.n_b

    def __str__(self) -> str:
        return f"|{self.n_a},{self.n_b}>"


@dataclass(frozen=True)
class FockBasis:
    """
    Two-mode Fock basis truncated at n_max photons per mode.

    Attributes:
        n_max: Largest occupation kept in either mode
    """

    n_max: int

    MODES = 2

    def __post_init__(self):
        if self.n_max < 0:
            raise BasisError(f"n_max must be non-negative, got {self.n_max}")

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** self.MODES

    def contains(self, state: BasisState) -> bool:
        return state.n_a <= self.n_max and state.n_b <= self.n_max

    def index(self, state: BasisState) -> int:
        """Flat row-major index of a basis state."""
        if not self.contains(state):
            raise BasisError(f"{state} lies outside the basis with n_max={self.n_max}")
        return state.n_a * (self.n_max + 1) + state.n_b

    def state(self, index: int) -> BasisState:
        if not 0 <= index < self.dim:
            raise BasisError(f"Index {index} outside basis of dimension {self.dim}")
        n_a, n_b = divmod(index, self.n_max + 1)
        return BasisState(n_a, n_b)

    def states(self) -> Iterator[BasisState]:
        for index in range(self.dim):
            yield self.state(index)


def _readonly(array: np.ndarray, dtype=complex) -> np.ndarray:
    data = np.array(array, dtype=dtype, copy=True)
    data.setflags(write=False)
    return data


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Normalized two-mode pure state.

    Attributes:
        basis: Basis the amplitudes are expressed in
        amplitudes: Complex amplitude per flat basis index
    """

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _readonly(self.amplitudes)
        if amplitudes.shape != (self.basis.dim,):
            raise BasisError(
                f"Amplitude vector of shape {amplitudes.shape} does not match "
                f"basis dimension {self.basis.dim}"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"State is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amplitudes)

    def amplitude(self, state: BasisState) -> complex:
        return complex(self.amplitudes[self.basis.index(state)])

    def support(self, tol: float = 0.0) -> Dict[BasisState, complex]:
        """Nonzero amplitudes keyed by basis state."""
        return {
            self.basis.state(int(i)): complex(self.amplitudes[i])
            for i in np.flatnonzero(np.abs(self.amplitudes) > tol)
        }

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class FockOperator:
    """
    Operator on the two-mode basis stored as a dense matrix.

    Attributes:
        basis: Basis the matrix is expressed in
        matrix: Entry (i, j) is <state(i)| O |state(j)>
        hermitian: When set, Hermiticity is checked on construction
        label: Free-form name, used by metrology to recognise detection operators
    """

    basis: FockBasis
    matrix: np.ndarray
    hermitian: bool = False
    label: str = ""

    def __post_init__(self):
        matrix = _readonly(self.matrix)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise BasisError(
                f"Operator of shape {matrix.shape} does not match basis dimension {self.basis.dim}"
            )
        if self.hermitian and np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise BasisError(f"Operator {self.label or '<unnamed>'} flagged Hermitian but is not")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, basis: FockBasis) -> "FockOperator":
        return cls(basis, np.eye(basis.dim), hermitian=True, label="identity")

    @classmethod
    def projector(cls, basis: FockBasis, state: BasisState) -> "FockOperator":
        return dyad_sum([(state, state, 1.0)], basis, label=f"P{state}")

    def entry(self, ket: BasisState, bra: BasisState) -> complex:
        return complex(self.matrix[self.basis.index(ket), self.basis.index(bra)])

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.matrix))

    def dagger(self) -> "FockOperator":
        return FockOperator(self.basis, self.matrix.conj().T, self.hermitian, self.label)

    def squared(self) -> "FockOperator":
        """O @ O by explicit matrix product (no projector identities assumed)."""
        label = f"({self.label})^2" if self.label else ""
        return FockOperator(self.basis, self.matrix @ self.matrix, self.hermitian, label)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0)) <= tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Two-mode density matrix.

    Construction does not validate; call ``validate()`` where the
    invariants must be enforced (it runs an eigen-decomposition).
    """

    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _readonly(self.matrix)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise BasisError(
                f"Density matrix of shape {matrix.shape} does not match "
                f"basis dimension {self.basis.dim}"
            )
        object.__setattr__(self, "matrix", matrix)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    @property
    def min_eigenvalue(self) -> float:
        hermitian_part = (self.matrix + self.matrix.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian_part)[0])

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix, tol=1e-10))

    def element(self, ket: BasisState, bra: BasisState) -> complex:
        return complex(self.matrix[self.basis.index(ket), self.basis.index(bra)])

    def populations(self, tol: float = 0.0) -> Dict[BasisState, float]:
        diagonal = self.matrix.diagonal().real
        return {
            self.basis.state(int(i)): float(diagonal[i])
            for i in np.flatnonzero(np.abs(diagonal) > tol)
        }

    def validate(self) -> "DensityMatrix":
        """Raise DensityMatrixError unless trace, Hermiticity and positivity hold."""
        trace = self.trace
        if abs(trace - 1.0) > TRACE_TOL:
            raise DensityMatrixError(f"Trace is {trace!r}, expected 1")
        if self.hermiticity_error > HERMITIAN_TOL:
            raise DensityMatrixError(f"Not Hermitian (max deviation {self.hermiticity_error:.3e})")
        min_eig = self.min_eigenvalue
        if min_eig < -EIGENVALUE_TOL:
            raise DensityMatrixError(f"Negative eigenvalue {min_eig:.3e}")
        return self

    def to_records(self, tol: float = 0.0) -> List[Dict]:
        """Nonzero entries as flat index pairs with real and imaginary parts."""
        records = []
        rows, cols = np.nonzero(np.abs(self.matrix) > tol)
        for i, j in zip(rows.tolist(), cols.tolist()):
            ket, bra = self.basis.state(i), self.basis.state(j)
            value = self.matrix[i, j]
            records.append(
                {
                    "row": i,
                    "col": j,
                    "ket": [ket.n_a, ket.n_b],
                    "bra": [bra.n_a, bra.n_b],
                    "re": float(value.real),
                    "im": float(value.imag),
                }
            )
        return records


def make_mm_state(m: int, m_prime: int, basis: Optional[FockBasis] = None) -> PureState:
    """
    Build |m::m'> = (|m,m'> + |m',m>)/sqrt(2).

    Args:
        m: Photon number of the larger component (m > m')
        m_prime: Photon number of the smaller component (>= 0)
        basis: Basis to express the state in; defaults to n_max = m

    Raises:
        InvalidStateError: m <= m' or m' < 0
        BasisError: m exceeds the basis truncation
    """
    if m_prime < 0 or m <= m_prime:
        raise InvalidStateError(f"M&M state needs m > m' >= 0, got m={m}, m'={m_prime}")
    basis = basis or FockBasis(m)
    if m > basis.n_max:
        raise BasisError(f"m={m} overflows basis with n_max={basis.n_max}")

    amplitudes = np.zeros(basis.dim, dtype=complex)
    amplitudes[basis.index(BasisState(m, m_prime))] = 1 / math.sqrt(2)
    amplitudes[basis.index(BasisState(m_prime, m))] = 1 / math.sqrt(2)
    return PureState(basis, amplitudes)


def make_noon_state(n: int, basis: Optional[FockBasis] = None) -> PureState:
    """|N::0>, the M&M state with m' = 0."""
    return make_mm_state(n, 0, basis)


def _check_gamma_indices(m: int, m_prime: int, k: int, l: int) -> None:
    if m_prime < 0 or m < 0:
        raise InvalidStateError(f"Photon numbers must be non-negative, got m={m}, m'={m_prime}")
    if not 0 <= k <= m:
        raise IndexRangeError(f"k={k} outside [0, {m}]")
    if not 0 <= l <= m_prime:
        raise IndexRangeError(f"l={l} outside [0, {m_prime}]")


def gamma_coefficient(m: int, m_prime: int, k: int, l: int) -> float:
    """
    gamma_{k,l} = C(m,k) C(m',l) [(m-k)! k! (m'-l)! l!]^(1/2) / sqrt(2 m! m'!).

    Evaluated as a sum of log-factorials so that large m does not overflow.
    """
    _check_gamma_indices(m, m_prime, k, l)
    log_gamma = (
        log_binomial(m, k)
        + log_binomial(m_prime, l)
        + 0.5
        * (
            log_factorial(m - k)
            + log_factorial(k)
            + log_factorial(m_prime - l)
            + log_factorial(l)
            - log_factorial(m)
            - log_factorial(m_prime)
            - math.log(2.0)
        )
    )
    return math.exp(log_gamma)


def gamma_squared_exact(m: int, m_prime: int, k: int, l: int) -> Fraction:
    """Exact rational gamma_{k,l}^2 from big-integer arithmetic."""
    _check_gamma_indices(m, m_prime, k, l)
    numerator = (
        math.comb(m, k) ** 2
        * math.comb(m_prime, l) ** 2
        * math.factorial(m - k)
        * math.factorial(k)
        * math.factorial(m_prime - l)
        * math.factorial(l)
    )
    return Fraction(numerator, 2 * math.factorial(m) * math.factorial(m_prime))


DyadTerm = Tuple[BasisState, BasisState, complex]


def dyad_sum(
    terms: Iterable[DyadTerm],
    basis: FockBasis,
    hermitian: bool = False,
    label: str = "",
) -> FockOperator:
    """
    Sum weight * |ket><bra| over the given terms; coincident cells add.

    Raises:
        BasisError: a ket or bra lies outside the basis
    """
    matrix = np.zeros((basis.dim, basis.dim), dtype=complex)
    for ket, bra, weight in terms:
        matrix[basis.index(ket), basis.index(bra)] += weight
    return FockOperator(basis, matrix, hermitian=hermitian, label=label)


def expectation(op: FockOperator, rho: DensityMatrix) -> complex:
    """Tr[op rho]."""
    if op.basis != rho.basis:
        raise BasisError(f"Basis mismatch: operator {op.basis} vs density matrix {rho.basis}")
    return complex(np.einsum("ij,ji->", op.matrix, rho.matrix))
