"""Closed-form gate results: frozen reference points, internal
identities, bounds, and the Bloch-sphere averages against plain Monte
Carlo integration."""

import math

import numpy as np
import pytest

from cavsim import (
    CavityParams,
    JointState,
    ReflectionPair,
    avg_fidelity_new,
    avg_fidelity_old,
    avg_success,
    cz_new,
    cz_new_from_reflections,
    cz_old,
    cz_old_from_reflections,
    reflection_lossy,
)
from conftest import random_cavity_params, random_joint_state, random_qubit_pair

EQUAL = JointState.equal_superposition()

# frozen operating points (12 significant digits)
SINGLE_ATOM_POINT = CavityParams(c=3.0, delta_c=0.12, delta_a=0.83 * 0.12, kappa_ratio=0.92, zeta=0.92)
BALANCE_POINT = CavityParams(c=4.0, kappa_ratio=0.916)


def test_old_scheme_frozen_point():
    res = cz_old(SINGLE_ATOM_POINT, EQUAL)
    assert res.fidelity == pytest.approx(0.902190532985, abs=1e-11)
    assert res.success_probability == pytest.approx(0.694455606361, abs=1e-11)
    assert res.p_loss == pytest.approx(0.305544393639, abs=1e-11)
    assert res.p_h_reject == 0.0
    assert res.v_amplitude is None and res.h_amplitude is None


def test_new_scheme_frozen_point():
    res = cz_new(BALANCE_POINT, EQUAL)
    assert res.fidelity == pytest.approx(0.98962289297, abs=1e-11)
    assert res.success_probability == pytest.approx(0.83147891358, abs=1e-11)
    assert res.p_loss == pytest.approx(0.168363061728, abs=1e-11)
    assert res.p_h_reject == pytest.approx(0.000190016441173, abs=1e-14)
    assert res.v_amplitude == pytest.approx(0.775459966752, abs=1e-11)
    assert res.h_amplitude == pytest.approx(0.631396737373, abs=1e-11)


def test_ideal_limits():
    p = CavityParams(c=1e9)
    for res in (cz_new(p, EQUAL), cz_old(p, EQUAL)):
        assert res.fidelity == pytest.approx(1.0, abs=1e-6)
        assert res.success_probability == pytest.approx(1.0, abs=1e-6)


def test_success_factorization():
    # success = (1 - p_loss)(1 - p_h_reject) must hold exactly
    rng = np.random.default_rng(21)
    for _ in range(300):
        p = random_cavity_params(rng)
        s = random_joint_state(rng)
        res = cz_new(p, s, phi=rng.uniform(-4, 4), v_attenuation=rng.uniform(0, 1))
        expect = (1.0 - res.p_loss) * (1.0 - res.p_h_reject)
        assert res.success_probability == pytest.approx(expect, abs=1e-12)
        old = cz_old(p, s)
        assert old.success_probability == pytest.approx(1.0 - old.p_loss, abs=1e-15)


def test_new_fidelity_ignores_atomic_state():
    rng = np.random.default_rng(22)
    p = random_cavity_params(rng)
    ap, bp = random_qubit_pair(rng)
    ref = None
    for _ in range(25):
        aa, ba = random_qubit_pair(rng)
        res = cz_new(p, JointState(ap, bp, aa, ba), phi=0.3)
        if ref is None:
            ref = res
        else:
            assert abs(res.fidelity - ref.fidelity) < 1e-12
            assert abs(res.success_probability - ref.success_probability) < 1e-12


def test_branch_amplitudes_are_normalized():
    rng = np.random.default_rng(23)
    for _ in range(100):
        res = cz_new(random_cavity_params(rng), random_joint_state(rng))
        if res.no_herald:
            continue
        assert res.v_amplitude**2 + res.h_amplitude**2 == pytest.approx(1.0, abs=1e-9)


def test_phase_periodicity_is_exact():
    # 2*pi addition is exact for these dyadic phases, and the reduced
    # phase must then agree bit for bit
    refl = reflection_lossy(BALANCE_POINT)
    for k in range(0, 1024, 97):
        phi = k / 1024.0
        a = cz_new_from_reflections(refl, 1.0, EQUAL, phi=phi)
        b = cz_new_from_reflections(refl, 1.0, EQUAL, phi=phi + 2.0 * math.pi)
        assert a.fidelity == b.fidelity
        assert a.success_probability == b.success_probability


def test_phase_symmetry_on_resonance():
    refl = reflection_lossy(BALANCE_POINT)  # real reflection amplitudes
    for phi in (0.1, 0.5, 1.2, 2.9):
        a = cz_new_from_reflections(refl, 0.9, EQUAL, phi=phi)
        b = cz_new_from_reflections(refl, 0.9, EQUAL, phi=-phi)
        assert a.fidelity == pytest.approx(b.fidelity, abs=1e-15)


def test_results_stay_in_range():
    rng = np.random.default_rng(24)
    for _ in range(2000):
        p = random_cavity_params(rng)
        s = random_joint_state(rng)
        for res in (
            cz_new(p, s, phi=rng.uniform(-7, 7), v_attenuation=rng.uniform(0, 1)),
            cz_old(p, s),
        ):
            assert 0.0 <= res.success_probability <= 1.0 + 1e-12
            assert 0.0 <= res.p_loss <= 1.0 + 1e-12
            assert 0.0 <= res.p_h_reject <= 1.0 + 1e-12
            if not res.no_herald:
                assert 0.0 <= res.fidelity <= 1.0


def test_loss_grows_with_mode_matching():
    # matched light is the only light that can be lost in the cavity,
    # so p_loss rises with zeta in both schemes
    rng = np.random.default_rng(25)
    for _ in range(50):
        base = random_cavity_params(rng, zeta=1.0)
        s = random_joint_state(rng)
        zetas = np.linspace(0.0, 1.0, 11)
        for scheme in (cz_new, cz_old):
            losses = [
                scheme(CavityParams(base.c, base.delta_c, base.delta_a, base.kappa_ratio, z), s).p_loss
                for z in zetas
            ]
            assert all(b >= a - 1e-12 for a, b in zip(losses, losses[1:]))


def test_no_herald_flag_new():
    # photon entirely in the cavity arm, cavity with zero contrast:
    # nothing ever reaches the output port
    refl = ReflectionPair.from_amplitudes(1.0, 1.0)
    state = JointState(0.0, 1.0, 1.0, 0.0)
    res = cz_new_from_reflections(refl, 1.0, state)
    assert res.no_herald
    assert res.fidelity is None
    assert res.success_probability == pytest.approx(0.0, abs=1e-12)


def test_no_herald_flag_old():
    # fully absorbing cavity: the photon never comes back
    refl = ReflectionPair.from_amplitudes(0.0, 0.0)
    res = cz_old_from_reflections(refl, 1.0, EQUAL)
    assert res.no_herald
    assert res.p_loss == pytest.approx(1.0, abs=1e-15)


def test_input_validation():
    with pytest.raises(ValueError):
        JointState(1.0, 1.0, 1.0, 0.0)  # photon not normalized
    with pytest.raises(ValueError):
        cz_new_from_reflections(ReflectionPair.ideal(), 1.2, EQUAL)
    with pytest.raises(ValueError):
        cz_new_from_reflections(ReflectionPair.ideal(), 1.0, EQUAL, v_attenuation=1.5)
    with pytest.raises(ValueError):
        cz_old_from_reflections(ReflectionPair.ideal(), -0.1, EQUAL)
    with pytest.raises(ValueError):
        avg_success(CavityParams(c=1.0), "fancy")


# ---------------------------------------------------------------------------
# Bloch-sphere averages
# ---------------------------------------------------------------------------

BASELINE = CavityParams(c=4.0, kappa_ratio=0.916, zeta=0.92)


def test_average_frozen_values():
    assert avg_fidelity_new(BASELINE) == pytest.approx(0.976582996662, abs=1e-9)
    assert avg_fidelity_old(BASELINE) == pytest.approx(0.936098289627, abs=1e-9)
    assert avg_success(BASELINE, "new") == pytest.approx(0.804960600494, abs=1e-9)
    assert avg_success(BASELINE, "old") == pytest.approx(0.70352902321, abs=1e-9)


def test_average_ideal_limit():
    p = CavityParams(c=1e9)
    assert avg_fidelity_new(p) == pytest.approx(1.0, abs=1e-6)
    assert avg_fidelity_old(p) == pytest.approx(1.0, abs=1e-6)
    assert avg_success(p, "new") == pytest.approx(1.0, abs=1e-6)
    assert avg_success(p, "old") == pytest.approx(1.0, abs=1e-6)


def _sphere_populations(rng, n):
    # uniform Bloch measure: the excited-state population is uniform
    return rng.uniform(0.0, 1.0, n)


def test_average_fidelity_new_against_monte_carlo():
    rng = np.random.default_rng(26)
    n = 4000
    b2 = _sphere_populations(rng, n)
    refl = reflection_lossy(BASELINE)
    vals = np.empty(n)
    for i, x in enumerate(b2):
        bp = math.sqrt(x)
        ap = math.sqrt(1.0 - x)
        res = cz_new_from_reflections(refl, BASELINE.zeta, JointState(ap, bp, 1.0, 0.0))
        vals[i] = res.fidelity
    mc = vals.mean()
    err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(avg_fidelity_new(BASELINE) - mc) < 5.0 * err + 1e-9


def test_average_success_old_against_monte_carlo():
    rng = np.random.default_rng(27)
    n = 4000
    bp2 = _sphere_populations(rng, n)
    ba2 = _sphere_populations(rng, n)
    refl = reflection_lossy(BASELINE)
    vals = np.empty(n)
    for i in range(n):
        s = JointState(
            math.sqrt(1.0 - bp2[i]), math.sqrt(bp2[i]),
            math.sqrt(1.0 - ba2[i]), math.sqrt(ba2[i]),
        )
        vals[i] = cz_old_from_reflections(refl, BASELINE.zeta, s).success_probability
    mc = vals.mean()
    err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(avg_success(BASELINE, "old") - mc) < 5.0 * err + 1e-9


def test_average_fidelity_old_against_monte_carlo():
    rng = np.random.default_rng(28)
    n = 4000
    bp2 = _sphere_populations(rng, n)
    ba2 = _sphere_populations(rng, n)
    refl = reflection_lossy(BASELINE)
    vals = np.empty(n)
    for i in range(n):
        s = JointState(
            math.sqrt(1.0 - bp2[i]), math.sqrt(bp2[i]),
            math.sqrt(1.0 - ba2[i]), math.sqrt(ba2[i]),
        )
        vals[i] = cz_old_from_reflections(refl, BASELINE.zeta, s).fidelity
    mc = vals.mean()
    err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(avg_fidelity_old(BASELINE) - mc) < 5.0 * err + 1e-9


def test_average_is_phase_aware():
    # a large interferometer phase error must show up in the average
    good = avg_fidelity_new(BALANCE_POINT, phi=0.0)
    bad = avg_fidelity_new(BALANCE_POINT, phi=0.5)
    assert bad < good - 0.01
