"""Lie algebras from structure constants and quadratic Hamiltonians on the dual.

A Lie algebra is given in a basis by structure constants ``C[c][b][a]`` with
``[e_b, e_a] = C^c_{ba} e_c``; a quadratic Hamiltonian is a symmetric
positive-definite matrix ``H̃[a][b]`` defining ``H̄(y) = H̃^{ab} y_a y_b`` on
the dual.  Together they generate the Euler equations

    dy_a/ds = 2 · C^c_{ba} H̃^{bd} y_c y_d

whose flow conserves H̄ (antisymmetry of C in the lower pair).  The factor 2
is the convention under which ``rigid_body`` reproduces the classical
I₁ω̇₁ = (I₂−I₃)ω₂ω₃ in momentum variables y_a = I_a ω_a.

All types are immutable after construction and every operation is a pure
function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

__all__ = [
    "LieAlgebra",
    "QuadraticHamiltonian",
    "DualVector",
    "AlgebraValidation",
    "IdentityViolation",
    "validate_algebra",
    "euler_rhs",
    "hamiltonian_value",
    "rigid_body",
]

#: absolute tolerance for the machine-precision identities (antisymmetry,
#: Jacobi, symmetry, positive definiteness) on unit-scale constants
IDENTITY_TOL = 1e-12


def _frozen_array(values: npt.ArrayLike, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{what}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants of a Lie algebra in a fixed basis.

    ``structure[c, b, a]`` is C^c_{ba}, i.e. [e_b, e_a] = C^c_{ba} e_c
    (output index first).  Construction checks only shape and finiteness;
    the algebraic identities are checked by :func:`validate_algebra` so that
    deliberately corrupted constants can be constructed and reported.
    """

    dim: int
    structure: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        n = self.dim
        object.__setattr__(
            self, "structure", _frozen_array(self.structure, (n, n, n), "structure")
        )

    def bracket(self, x: npt.ArrayLike, y: npt.ArrayLike) -> np.ndarray:
        """[x, y]_c = C^c_{ba} x_b y_a."""
        return np.einsum("cba,b,a->c", self.structure, np.asarray(x, float), np.asarray(y, float))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "structure": self.structure.tolist(), "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "LieAlgebra":
        return cls(dim=int(d["dim"]), structure=d["structure"], label=d.get("label", ""))


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Symmetric positive-definite form H̃[a][b]; H̄(y) = H̃^{ab} y_a y_b.

    There is no 1/2 in the quadratic form itself: constructors that want the
    mechanical convention (e.g. :func:`rigid_body`) absorb it into H̃.
    """

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        n = self.dim
        mat = _frozen_array(self.matrix, (n, n), "matrix")
        if np.max(np.abs(mat - mat.T)) > IDENTITY_TOL:
            raise ValueError("matrix must be symmetric")
        if np.linalg.eigvalsh(mat)[0] <= IDENTITY_TOL:
            raise ValueError("matrix must be positive definite")
        object.__setattr__(self, "matrix", mat)

    def eigenvalue_range(self) -> tuple[float, float]:
        """(λ_min, λ_max) of H̃ — the norm-equivalence constants."""
        w = np.linalg.eigvalsh(self.matrix)
        return float(w[0]), float(w[-1])

    def norm(self, y: npt.ArrayLike) -> float:
        """H̃-norm |y|_H̃ = √H̄(y)."""
        return float(np.sqrt(hamiltonian_value(self, y)))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "hamiltonian": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadraticHamiltonian":
        return cls(dim=int(d["dim"]), matrix=d["hamiltonian"])


@dataclass(frozen=True)
class DualVector:
    """A point y_a on the dual of the algebra (coordinates at the identity)."""

    components: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.components, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("components must be a 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("components must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def dim(self) -> int:
        return self.components.size


def _components(y: "DualVector | npt.ArrayLike", dim: int, what: str) -> np.ndarray:
    arr = y.components if isinstance(y, DualVector) else np.asarray(y, dtype=float)
    if arr.shape != (dim,):
        raise ValueError(f"{what}: expected a length-{dim} vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class IdentityViolation:
    identity: str        # "antisymmetry" | "jacobi"
    index: tuple[int, ...]
    residual: float


@dataclass(frozen=True)
class AlgebraValidation:
    ok: bool
    violations: tuple[IdentityViolation, ...] = field(default=())


def validate_algebra(alg: LieAlgebra, tol: float = IDENTITY_TOL) -> AlgebraValidation:
    """Check antisymmetry C^c_{ba} = −C^c_{ab} and the Jacobi identity.

    Returns the worst residual per violated identity with the index at which
    it is attained.
    """
    C = alg.structure
    violations: list[IdentityViolation] = []

    anti = C + C.transpose(0, 2, 1)
    worst = np.max(np.abs(anti))
    if worst > tol:
        idx = np.unravel_index(np.argmax(np.abs(anti)), anti.shape)
        violations.append(IdentityViolation("antisymmetry", tuple(int(i) for i in idx), float(worst)))

    # Σ_e ( C^e_{ab} C^d_{ec} + C^e_{bc} C^d_{ea} + C^e_{ca} C^d_{eb} ) = 0,
    # i.e. the cyclic sum of [[e_a, e_b], e_c].
    jac = (
        np.einsum("eab,dec->dabc", C, C)
        + np.einsum("ebc,dea->dabc", C, C)
        + np.einsum("eca,deb->dabc", C, C)
    )
    worst = np.max(np.abs(jac))
    if worst > tol:
        idx = np.unravel_index(np.argmax(np.abs(jac)), jac.shape)
        violations.append(IdentityViolation("jacobi", tuple(int(i) for i in idx), float(worst)))

    return AlgebraValidation(ok=not violations, violations=tuple(violations))


def euler_rhs(
    alg: LieAlgebra,
    ham: QuadraticHamiltonian,
    y: "DualVector | npt.ArrayLike",
    factor: float = 2.0,
) -> np.ndarray:
    """Euler vector field dy_a/ds = factor · C^c_{ba} H̃^{bd} y_c y_d.

    The default factor 2 is the convention that makes :func:`rigid_body`
    reproduce I₁ω̇₁ = (I₂−I₃)ω₂ω₃; conservation of H̄ holds for any factor.
    """
    if alg.dim != ham.dim:
        raise ValueError(f"dimension mismatch: algebra {alg.dim} vs Hamiltonian {ham.dim}")
    yv = _components(y, alg.dim, "y")
    hy = ham.matrix @ yv                      # (H̃y)_b = H̃^{bd} y_d
    return factor * np.einsum("cba,b,c->a", alg.structure, hy, yv)


def hamiltonian_value(ham: QuadraticHamiltonian, y: "DualVector | npt.ArrayLike") -> float:
    """H̄(y) = H̃^{ab} y_a y_b (nonnegative; zero iff y = 0)."""
    yv = _components(y, ham.dim, "y")
    return float(yv @ ham.matrix @ yv)


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return eps


def rigid_body(I1: float, I2: float, I3: float) -> tuple[LieAlgebra, QuadraticHamiltonian]:
    """so(3) with H̃ = diag(1/(2I_a)): the free rigid body in momentum variables.

    With y_a = I_a ω_a, ``euler_rhs`` gives ẏ₁ = (1/I₃ − 1/I₂) y₂ y₃ and
    cyclic, the classical Euler equations.  C^c_{ba} = ε_{bac}.
    """
    inertias = (float(I1), float(I2), float(I3))
    if any(I <= 0 for I in inertias):
        raise ValueError(f"inertias must be positive, got {inertias}")
    eps = _levi_civita()
    structure = np.einsum("bac->cba", eps)    # C[c, b, a] = ε_{bac}
    alg = LieAlgebra(dim=3, structure=structure, label="so(3)")
    ham = QuadraticHamiltonian(dim=3, matrix=np.diag([1.0 / (2.0 * I) for I in inertias]))
    return alg, ham
