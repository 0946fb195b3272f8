"""Semilinear wave-system specs, the example catalogue, and the asymptotic reduction.

A system of N coupled scalar wave equations

    □φ_A = F[A][B][C] (∂_tφ_B)(∂_tφ_C) + G[A][B][C] m⁻¹(∂φ_B, ∂φ_C)

is specified by its "bad" coefficients F (products of bare time derivatives)
and null-form coefficients G, both symmetric in the trailing pair.  Writing
Φ_A = r(∂_r − ∂_t)φ_A for the radiation field and s = log r along an
outgoing null ray, the bad terms alone survive in the large-r limit and the
radiation fields obey the quadratic ODE system

    dΦ_A/ds = (1/4) F[A][B][C] Φ_B Φ_C ,

the asymptotic system.  Null-form terms are "good": they contribute only
integrable errors and are dropped by the reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .algebra import LieAlgebra, QuadraticHamiltonian, euler_rhs

__all__ = [
    "WaveSystemSpec",
    "AsymptoticSystem",
    "asymptotic_system",
    "from_hamiltonian",
    "catalogue",
    "catalogue_names",
    "hamiltonian_provenance",
]


def _coeff_array(values: npt.ArrayLike | None, n: int, what: str) -> np.ndarray:
    if values is None:
        arr = np.zeros((n, n, n))
    else:
        arr = np.array(values, dtype=float)
    if arr.shape != (n, n, n):
        raise ValueError(f"{what}: expected shape {(n, n, n)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: entries must be finite")
    if not np.array_equal(arr, arr.transpose(0, 2, 1)):
        raise ValueError(f"{what}: must be symmetric in the trailing index pair")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WaveSystemSpec:
    """Quadratic coefficients of a semilinear wave system.

    ``bad_coeffs[A, B, C]`` multiplies (∂_tφ_B)(∂_tφ_C); ``nullform_coeffs``
    multiplies m⁻¹(∂φ_B, ∂φ_C) = −(∂_tφ_B)(∂_tφ_C) + ∇φ_B·∇φ_C.  Both must
    be symmetric in (B, C).  ``source`` optionally records the
    (LieAlgebra, QuadraticHamiltonian) pair the system was built from.
    """

    n_fields: int
    bad_coeffs: np.ndarray | None = None
    nullform_coeffs: np.ndarray | None = None
    label: str = ""
    source: tuple[LieAlgebra, QuadraticHamiltonian] | None = None

    def __post_init__(self) -> None:
        if self.n_fields < 1:
            raise ValueError("n_fields must be a positive integer")
        n = self.n_fields
        object.__setattr__(self, "bad_coeffs", _coeff_array(self.bad_coeffs, n, "bad_coeffs"))
        object.__setattr__(
            self, "nullform_coeffs", _coeff_array(self.nullform_coeffs, n, "nullform_coeffs")
        )

    def to_dict(self) -> dict:
        return {
            "n_fields": self.n_fields,
            "bad_coeffs": self.bad_coeffs.tolist(),
            "nullform_coeffs": self.nullform_coeffs.tolist(),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WaveSystemSpec":
        return cls(
            n_fields=int(d["n_fields"]),
            bad_coeffs=d.get("bad_coeffs"),
            nullform_coeffs=d.get("nullform_coeffs"),
            label=d.get("label", ""),
        )


@dataclass(frozen=True)
class AsymptoticSystem:
    """The quadratic ODE dΦ_A/ds = coeffs[A, B, C] Φ_B Φ_C (coeffs = F/4)."""

    n_fields: int
    coeffs: np.ndarray
    provenance: object = None  # WaveSystemSpec or (LieAlgebra, QuadraticHamiltonian)

    def __post_init__(self) -> None:
        n = self.n_fields
        object.__setattr__(self, "coeffs", _coeff_array(self.coeffs, n, "coeffs"))
        # flattened view for the cheap rhs contraction
        object.__setattr__(self, "_flat", self.coeffs.reshape(n, n * n))

    def rhs(self, phi: np.ndarray) -> np.ndarray:
        """Evaluate dΦ/ds at phi."""
        return self._flat @ np.outer(phi, phi).ravel()

    def is_trivial(self) -> bool:
        return bool(np.all(self.coeffs == 0.0))


def asymptotic_system(spec: WaveSystemSpec) -> AsymptoticSystem:
    """Derive the asymptotic system: coeffs = F/4, null-form part dropped."""
    return AsymptoticSystem(
        n_fields=spec.n_fields, coeffs=spec.bad_coeffs / 4.0, provenance=spec
    )


def from_hamiltonian(alg: LieAlgebra, ham: QuadraticHamiltonian) -> WaveSystemSpec:
    """Wave-system spec whose asymptotic system equals ``euler_rhs(alg, ham, ·)``.

    The Euler field dy_a/ds = 2 C^c_{ba} H̃^{bd} y_c y_d is the quadratic form
    M[a, c, d] = 2 Σ_b C[c, b, a] H̃[b, d]; the bad coefficients are four
    times its symmetrization, so that asymptotic_system(·) (which divides by
    four) reproduces it exactly.
    """
    if alg.dim != ham.dim:
        raise ValueError(f"dimension mismatch: algebra {alg.dim} vs Hamiltonian {ham.dim}")
    M = 2.0 * np.einsum("cba,bd->acd", alg.structure, ham.matrix)
    F = 4.0 * 0.5 * (M + M.transpose(0, 2, 1))
    label = f"hamiltonian[{alg.label}]" if alg.label else "hamiltonian"
    return WaveSystemSpec(
        n_fields=alg.dim, bad_coeffs=F, nullform_coeffs=None, label=label, source=(alg, ham)
    )


def hamiltonian_provenance(
    obj: "AsymptoticSystem | WaveSystemSpec",
) -> tuple[LieAlgebra, QuadraticHamiltonian] | None:
    """Walk provenance back to a (LieAlgebra, QuadraticHamiltonian) pair, if any."""
    if isinstance(obj, WaveSystemSpec):
        return obj.source
    if isinstance(obj, AsymptoticSystem):
        prov = obj.provenance
        if isinstance(prov, WaveSystemSpec):
            return prov.source
        if (
            isinstance(prov, tuple)
            and len(prov) == 2
            and isinstance(prov[0], LieAlgebra)
            and isinstance(prov[1], QuadraticHamiltonian)
        ):
            return prov
    return None


_CATALOGUE_DOC = {
    "null_form": "single field, pure null form: decaying radiation, global existence",
    "john": "single field, (time derivative)^2: all nontrivial solutions blow up",
    "weak_null_chain": "two fields, one-way coupling: radiation grows linearly in s",
    "super_exponential": "three-field chain: growth like exp(exp(rate*s)), fails the weak null condition",
    "rigid_body": "rigid_body(I1,I2,I3): Euler equations; bounded, Hamiltonian-conserving radiation",
}


def catalogue_names() -> list[str]:
    return list(_CATALOGUE_DOC)


def catalogue_describe(name: str) -> str:
    return _CATALOGUE_DOC[name]


def catalogue(name: str, *params: float) -> WaveSystemSpec:
    """Built-in example systems by name.

    ``rigid_body`` takes the three inertias as parameters; the other systems
    take none.
    """
    if name == "null_form":
        _expect_params(name, params, 0)
        G = np.zeros((1, 1, 1))
        G[0, 0, 0] = -1.0
        return WaveSystemSpec(n_fields=1, nullform_coeffs=G, label="null_form")
    if name == "john":
        _expect_params(name, params, 0)
        F = np.zeros((1, 1, 1))
        F[0, 0, 0] = 1.0
        return WaveSystemSpec(n_fields=1, bad_coeffs=F, label="john")
    if name == "weak_null_chain":
        _expect_params(name, params, 0)
        F = np.zeros((2, 2, 2))
        F[1, 0, 0] = 1.0
        return WaveSystemSpec(n_fields=2, bad_coeffs=F, label="weak_null_chain")
    if name == "super_exponential":
        _expect_params(name, params, 0)
        F = np.zeros((3, 3, 3))
        F[1, 0, 1] = F[1, 1, 0] = 0.5
        F[2, 1, 2] = F[2, 2, 1] = 0.5
        return WaveSystemSpec(n_fields=3, bad_coeffs=F, label="super_exponential")
    if name == "rigid_body":
        _expect_params(name, params, 3)
        from .algebra import rigid_body as _rigid_body

        alg, ham = _rigid_body(*params)
        spec = from_hamiltonian(alg, ham)
        object.__setattr__(spec, "label", f"rigid_body({params[0]:g},{params[1]:g},{params[2]:g})")
        return spec
    raise ValueError(f"unknown catalogue system {name!r}; known: {', '.join(_CATALOGUE_DOC)}")


def _expect_params(name: str, params: tuple, n: int) -> None:
    if len(params) != n:
        raise ValueError(f"catalogue {name!r} takes {n} parameter(s), got {len(params)}")
