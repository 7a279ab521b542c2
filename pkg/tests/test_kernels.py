"""Backend-agreement and numerical-contract tests for the evaluation kernels."""

import math

import numpy as np
import pytest

from concidx.kernels import BACKEND, get_backend

pure = get_backend("pure")
try:
    fast = get_backend("compiled")
except Exception:  # pragma: no cover - compiled backend optional
    fast = None

needs_fast = pytest.mark.skipif(fast is None, reason="compiled backend unavailable")


def test_active_backend_is_known():
    assert BACKEND in ("compiled", "pure")


@needs_fast
def test_scalar_backends_agree():
    rng = np.random.default_rng(5)
    for _ in range(500):
        w = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        p = int(rng.integers(0, 300))
        a = pure.log_abs_primary_scalar(w, p)
        b = fast.log_abs_primary_scalar(w, p)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-13)


@needs_fast
def test_batch_backends_agree():
    rng = np.random.default_rng(11)
    xi = (rng.uniform(1.2, 6.0, 300) * np.exp(1j * rng.uniform(0, 2 * np.pi, 300))).astype(
        np.complex128
    )
    mass = rng.uniform(0.2, 2.0, 300)
    genus = rng.integers(0, 120, 300).astype(np.int64)
    zs = (rng.uniform(0.0, 7.0, 64) * np.exp(1j * rng.uniform(0, 2 * np.pi, 64))).astype(
        np.complex128
    )
    a = pure.eval_sum_many(zs, xi, mass, genus)
    b = fast.eval_sum_many(zs, xi, mass, genus)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("backend", [b for b in (pure, fast) if b is not None])
class TestScalarContract:
    def test_zero(self, backend):
        assert backend.log_abs_primary_scalar(0.0, 17) == 0.0

    def test_singularity(self, backend):
        assert backend.log_abs_primary_scalar(1.0, 3) == float("-inf")

    def test_genus_zero_is_plain_log(self, backend):
        assert backend.log_abs_primary_scalar(-1.0, 0) == pytest.approx(math.log(2.0))

    def test_crossover_consistency(self, backend):
        # direct and series strategies must agree where both are stable
        rng = np.random.default_rng(23)
        for _ in range(300):
            aw = rng.uniform(0.45, 0.55)
            w = aw * np.exp(1j * rng.uniform(0, 2 * np.pi))
            p = int(rng.integers(0, 40))
            got = backend.log_abs_primary_scalar(complex(w), p)
            direct = math.log(abs(1 - w)) + _partial(complex(w), p)
            assert got == pytest.approx(direct, abs=1e-10)

    def test_atom_hit_in_batch(self, backend):
        xi = np.array([2.0 + 0j, 3.0 + 1j])
        out = backend.eval_sum_many(
            np.array([2.0 + 0j, 0.5 + 0.5j]),
            xi,
            np.array([1.0, 1.0]),
            np.array([0, 0], dtype=np.int64),
        )
        assert out[0] == float("-inf")
        assert np.isfinite(out[1])

    def test_underflowing_tail_is_zero(self, backend):
        # |w|^(p+1) far below double-precision tiny: the tail vanishes
        assert backend.log_abs_primary_scalar(0.3 + 0.1j, 5000) == 0.0


def _partial(w, p):
    return sum((w**j / j).real for j in range(1, p + 1))
