"""Backend parity: the compiled core must reproduce the pure fallback."""

import numpy as np
import pytest

from chshlab._kernels import BACKEND, available_backends, load_backend
from chshlab.chsh import chsh_operator
from chshlab.entanglement import (
    CanonicalAngles,
    UnitaryParams,
    canonical_setting,
    rotated_chsh,
)

pure = load_backend("python")

HAS_COMPILED = "compiled" in available_backends()
needs_compiled = pytest.mark.skipif(not HAS_COMPILED, reason="compiled extension not built")


def _operator(theta, phi):
    s = chsh_operator(canonical_setting(CanonicalAngles(theta=theta, phi=phi)))
    assert np.max(np.abs(s.imag)) <= 1e-12
    return np.ascontiguousarray(s.real.ravel())


def _random_case(rng):
    theta = float(rng.uniform(0, np.pi / 2))
    phi = float(rng.uniform(0, np.pi / 2))
    e = float(rng.uniform(0, 0.5))
    x = rng.uniform(0, 2 * np.pi, 6)
    return _operator(theta, phi), e, x, theta, phi


def test_selected_backend_is_known():
    assert BACKEND in ("python", "compiled")


def test_pure_objective_matches_dense_route(rng):
    # kernel vs the straightforward numpy computation
    for _ in range(50):
        s, e, x, theta, phi = _random_case(rng)
        got = pure.chsh_objective(s, e, x)
        want = rotated_chsh(
            e,
            CanonicalAngles(theta=theta, phi=phi),
            UnitaryParams(*x[:3]),
            UnitaryParams(*x[3:]),
        )
        assert got == pytest.approx(want, abs=1e-10)


@needs_compiled
def test_objective_parity(rng):
    fast = load_backend("compiled")
    for _ in range(500):
        s, e, x, *_ = _random_case(rng)
        assert fast.chsh_objective(s, e, x) == pytest.approx(
            pure.chsh_objective(s, e, x), abs=1e-12
        )


@needs_compiled
def test_maximize_parity(rng):
    # objective values occasionally differ by 1-2 ulp between backends,
    # which can flip a simplex branch at a near-tie; converged values must
    # still agree even when the paths do not
    fast = load_backend("compiled")
    for _ in range(25):
        s, e, x, *_ = _random_case(rng)
        vp, xp, _ = pure.maximize_chsh(s, e, x)
        vf, xf, _ = fast.maximize_chsh(s, e, x)
        assert vf == pytest.approx(vp, abs=1e-9)
        assert fast.chsh_objective(s, e, xf) == pytest.approx(vf, abs=1e-12)
        assert pure.chsh_objective(s, e, xp) == pytest.approx(vp, abs=1e-12)


@needs_compiled
def test_dykstra_parity(rng):
    fast = load_backend("compiled")
    for _ in range(50):
        axes = rng.normal(size=(2, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        lam = float(rng.uniform(0, 1))
        m = np.array([1.0, *(lam * axes[0])])
        n = np.array([1.0, *(lam * axes[1])])
        x0 = (m + n) / 2 - np.array([0.5, 0.0, 0.0, 0.0])
        rp = pure.dykstra_feasibility(m, n, x0, 1e-9, 50_000)
        rf = fast.dykstra_feasibility(m, n, x0, 1e-9, 50_000)
        assert rf[1] == pytest.approx(rp[1], abs=1e-12)  # residual
        assert rf[2] == rp[2]  # iterations
        assert rf[3] == rp[3]  # plateau flag
        assert np.allclose(rf[0], rp[0], atol=1e-10)


def test_dykstra_feasible_point_within_tolerance(rng):
    # the x returned on success is PSD-feasible for all four blocks
    impl = load_backend(BACKEND)
    for _ in range(20):
        axes = rng.normal(size=(2, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        lam = float(rng.uniform(0, 0.6))  # safely compatible
        m = np.array([1.0, *(lam * axes[0])])
        n = np.array([1.0, *(lam * axes[1])])
        x0 = (m + n) / 2 - np.array([0.5, 0.0, 0.0, 0.0])
        x, res, _, _ = impl.dykstra_feasibility(m, n, x0, 1e-9, 200_000)
        assert res <= 1e-9

        def min_eig(c):
            return 0.5 * (c[0] - np.linalg.norm(c[1:]))

        e4 = np.array([2.0, 0.0, 0.0, 0.0])
        x = np.asarray(x)
        for block in (x, m - x, n - x, x - (m + n - e4)):
            assert min_eig(block) >= -1e-9


def test_backend_env_override(monkeypatch):
    import importlib

    import chshlab._kernels as kernels

    monkeypatch.setenv("CHSHLAB_BACKEND", "python")
    reloaded = importlib.reload(kernels)
    try:
        assert reloaded.BACKEND == "python"
    finally:
        monkeypatch.delenv("CHSHLAB_BACKEND")
        importlib.reload(kernels)
