"""asymlab: a numerical laboratory for semilinear wave systems.

The package derives the asymptotic ODE system of a semilinear wave system
(the quadratic flow obeyed by the radiation field along outgoing null rays),
classifies its long-time behaviour, certifies boundedness for the
Hamiltonian/Euler family, and verifies the predictions by direct
spherically-symmetric double-null evolution of the wave equations.

Modules
-------
algebra     Lie algebras from structure constants, quadratic Hamiltonians,
            and the Euler-equation generator on the dual.
system      Wave-system coefficient specs, the built-in catalogue, and the
            asymptotic-system derivation.
ode         Adaptive embedded Runge-Kutta integration with blow-up detection
            and decaying-forcing samplers.
conditions  Classifiers: classical null condition, growth taxonomy,
            Monte-Carlo/adversarial boundedness testing, analytic
            Hamiltonian certificates.
wave1d      Double-null characteristic solver, radiation-trace extraction,
            asymptotic comparison, Hamiltonian drift along rays.
figures     Matplotlib renderings of the scenario outputs.
cli         Scenario runner (`asymlab run|list|validate-config`).
"""

__version__ = "0.1.0"

from . import algebra, conditions, ode, system, wave1d  # noqa: F401

__all__ = ["algebra", "system", "ode", "conditions", "wave1d", "__version__"]
