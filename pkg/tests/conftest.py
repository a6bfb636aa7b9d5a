"""Shared random-draw helpers for the test suite.

Everything is seeded; no test depends on wall-clock or machine state.
"""

import numpy as np

from cavsim import CavityParams, JointState


def random_qubit_pair(rng):
    """Normalized complex amplitude pair, bounded away from zero norm."""
    while True:
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        norm = np.linalg.norm(z)
        if norm > 1e-3:
            return tuple(z / norm)


def random_joint_state(rng) -> JointState:
    ap, bp = random_qubit_pair(rng)
    aa, ba = random_qubit_pair(rng)
    return JointState(ap, bp, aa, ba)


def random_cavity_params(rng, zeta=None) -> CavityParams:
    # covers weak to strong coupling, both detuning signs and lossy mirrors
    return CavityParams(
        c=float(10.0 ** rng.uniform(-1.0, 1.5)),
        delta_c=float(rng.uniform(-2.0, 2.0)),
        delta_a=float(rng.uniform(-2.0, 2.0)),
        kappa_ratio=float(rng.uniform(0.0, 1.0)),
        zeta=float(rng.uniform(0.0, 1.0)) if zeta is None else float(zeta),
    )
