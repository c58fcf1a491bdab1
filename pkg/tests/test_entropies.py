import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import max_entangled
from oracles import (amplitude_damping_coherent_info, amplitude_damping_kraus, classical_cond_renyi,
                     classical_divergence, inf_form_2x2, vn_coherent_info_bruteforce)
from svv.entropies import (alpha_prime, coherent_info_alpha, cond_renyi_entropy, cond_vn_entropy,
                           continuity_bound, sandwiched_divergence, von_neumann_entropy, w_alpha)
from svv.linalg import (BipartiteOp, Channel, apply_channel, partial_trace, random_channel,
                        random_density)
from svv.schatten import INF

seeds = st.integers(0, 2**32 - 1)
OPTS = {"restarts": 3}


def rand_state(seed, dims=(2, 2)):
    return BipartiteOp(random_density(dims[0] * dims[1], seed=seed), dims)


def classical_state(p_yx):
    dy, dx = p_yx.shape
    return BipartiteOp(np.diag(p_yx.ravel()).astype(complex), (dy, dx))


class TestDivergence:
    @pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0, INF])
    def test_self_zero(self, alpha):
        r = random_density(3, seed=1)
        assert sandwiched_divergence(r, r, alpha) == pytest.approx(0, abs=1e-10)

    @pytest.mark.parametrize("alpha", [1.0, 1.3, 2.0, 5.0])
    def test_commuting_scalar_oracle(self, alpha):
        p, q = np.array([0.5, 0.3, 0.2]), np.array([0.2, 0.2, 0.6])
        got = sandwiched_divergence(np.diag(p), np.diag(q), alpha)
        assert got == pytest.approx(classical_divergence(p, q, alpha), abs=1e-12)

    def test_pure_vs_maximally_mixed(self):
        d = 3
        v = np.zeros(d)
        v[0] = 1
        assert sandwiched_divergence(np.outer(v, v), np.eye(d) / d, 2) == pytest.approx(math.log(d))

    def test_infinity(self):
        p, q = np.array([0.5, 0.5]), np.array([0.25, 0.75])
        assert sandwiched_divergence(np.diag(p), np.diag(q), INF) == pytest.approx(math.log(2))

    def test_support_mismatch(self):
        assert sandwiched_divergence(np.diag([0.5, 0.5]), np.diag([1.0, 0.0]), 2) == math.inf

    def test_nonpsd_sigma(self):
        with pytest.raises(ValueError):
            sandwiched_divergence(np.eye(2) / 2, np.diag([1.0, -0.5]), 2)

    @given(seeds, st.sampled_from([1.0, 1.5, 2.0, 4.0]))
    def test_nonnegative(self, seed, alpha):
        a, b = random_density(3, seed=seed), random_density(3, seed=seed + 1)
        assert sandwiched_divergence(a, b, alpha) >= -1e-10


class TestVonNeumann:
    def test_product(self):
        ry, rx = random_density(2, seed=1), random_density(3, seed=2)
        h = cond_vn_entropy(BipartiteOp(np.kron(ry, rx), (2, 3)))
        assert h == pytest.approx(von_neumann_entropy(rx), abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_max_entangled(self, d):
        assert cond_vn_entropy(BipartiteOp(max_entangled(d), (d, d))) == pytest.approx(-math.log(d))

    def test_classical(self):
        p = np.array([[0.1, 0.2, 0.05], [0.3, 0.15, 0.2]])
        assert cond_vn_entropy(classical_state(p)) == pytest.approx(classical_cond_renyi(p, 1), abs=1e-12)


class TestCondRenyi:
    @pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0, INF])
    def test_uncorrelated(self, alpha):
        m = BipartiteOp(np.kron(random_density(2, seed=4), np.eye(3) / 3), (2, 3))
        assert cond_renyi_entropy(m, alpha) == pytest.approx(math.log(3), abs=1e-6)

    def test_pure_x_product_grid(self):
        x = np.zeros((2, 2))
        x[1, 1] = 1
        m = np.kron(random_density(2, seed=6), x)
        assert inf_form_2x2(m, 1, 2, 2) == pytest.approx(1, abs=1e-6)
        assert cond_renyi_entropy(BipartiteOp(m, (2, 2)), 2) == pytest.approx(0, abs=1e-7)

    def test_max_entangled_alpha2_grid(self):
        oracle = -2 * math.log(inf_form_2x2(max_entangled(2), 1, 2, 2))
        assert oracle == pytest.approx(-math.log(2), abs=1e-6)
        assert cond_renyi_entropy(BipartiteOp(max_entangled(2), (2, 2)), 2) == pytest.approx(oracle, abs=1e-3)

    @pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0, INF])
    def test_classical_closed_form(self, alpha):
        p = np.array([[0.1, 0.2, 0.05], [0.3, 0.15, 0.2]])
        got = cond_renyi_entropy(classical_state(p), alpha)
        assert got == pytest.approx(classical_cond_renyi(p, alpha), abs=1e-6)

    def test_full_returns_result(self):
        h, res = cond_renyi_entropy(rand_state(1), 2, full=True)
        assert res.bound_kind == "exact"
        assert h == pytest.approx(-2 * math.log(res.value))

    @settings(max_examples=15)
    @given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 2)]), st.sampled_from([1.0, 1.5, 2.0, 5.0, INF]))
    def test_dimension_bounds(self, seed, dims, alpha):
        h = cond_renyi_entropy(rand_state(seed, dims), alpha, **OPTS)
        ld = math.log(dims[1])
        assert -ld - 5e-7 <= h <= ld + 5e-7

    @settings(max_examples=10)
    @given(seeds)
    def test_monotone(self, seed):
        rho = rand_state(seed, (2, 3))
        hs = [cond_renyi_entropy(rho, a, **OPTS) for a in (1.0, 1.2, 1.5, 2.0, 3.0, 5.0)]
        assert all(b <= a + 5e-7 for a, b in zip(hs, hs[1:]))

    @settings(max_examples=10)
    @given(seeds, st.sampled_from([1.0, 1.5, 2.0, INF]))
    def test_data_processing(self, seed, alpha):
        rho = rand_state(seed, (2, 2))
        ch = random_channel(2, 3, 2, seed=seed + 1)
        out = apply_channel(ch, rho, on="first")
        assert cond_renyi_entropy(out, alpha, **OPTS) >= cond_renyi_entropy(rho, alpha, **OPTS) - 5e-7

    def test_alpha_limit(self):
        for seed, dims in [(1, (2, 2)), (2, (2, 3)), (3, (2, 2)), (4, (2, 3))]:
            rho = rand_state(seed, dims)
            h1 = cond_vn_entropy(rho)
            devs = [abs(cond_renyi_entropy(rho, 1 + h) - h1) for h in (1e-1, 1e-2, 1e-3)]
            assert devs[0] > devs[1] > devs[2]
            assert devs[2] < 5e-3


class TestW:
    def test_uncorrelated_zero(self):
        m = BipartiteOp(np.kron(random_density(2, seed=4), np.eye(2) / 2), (2, 2))
        assert w_alpha(m, 2) == pytest.approx(0, abs=1e-12)

    def test_max_entangled_alpha1(self):
        phi = max_entangled(2)
        diff = phi - np.eye(4) / 4
        oracle = np.abs(np.linalg.eigvalsh(diff)).sum()
        assert oracle == pytest.approx(1.5)
        assert w_alpha(BipartiteOp(phi, (2, 2)), 1) == pytest.approx(oracle, abs=1e-12)

    def test_classical_alpha1(self):
        p = np.array([[0.1, 0.3], [0.45, 0.15]])
        oracle = np.abs(p - p.sum(1, keepdims=True) / 2).sum()
        assert w_alpha(classical_state(p), 1) == pytest.approx(oracle, abs=1e-12)

    @pytest.mark.parametrize("alpha", [1.5, 2.0])
    def test_classical_upper_bound(self, alpha):
        p = np.array([[0.1, 0.3], [0.45, 0.15]])
        d = p - p.sum(1, keepdims=True) / 2
        exact = sum(np.sum(np.abs(row) ** alpha) ** (1 / alpha) for row in d)
        val, res = w_alpha(classical_state(p), alpha, full=True)
        assert val >= exact - 1e-7
        assert res.bound_kind == "upper"

    @settings(max_examples=10)
    @given(seeds, st.sampled_from([1.5, 2.0, 3.0]))
    def test_relation_verifiable_branch(self, seed, alpha):
        rho = rand_state(seed)
        ap = alpha_prime(alpha)
        h = cond_renyi_entropy(rho, alpha, **OPTS)
        assert w_alpha(rho, alpha, **OPTS) >= math.exp(-h / ap) - 2 ** (-1 / ap) - 5e-7


class TestContinuityBound:
    def test_zero(self):
        assert continuity_bound(0, 3, 2) == 0

    def test_arithmetic(self):
        assert continuity_bound(0.1, 2, 2) == pytest.approx(2 * math.log(1.4))

    def test_alpha_one_diverges(self):
        # alpha' log(1 + 2 eps d^{2/alpha'}) grows without bound as alpha -> 1+
        vals = [continuity_bound(0.05, 2, 1 + h) for h in (1e-1, 1e-2, 1e-4, 1e-6)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 1e3
        assert continuity_bound(0.05, 2, 1) == math.inf

    def test_negative_eps(self):
        with pytest.raises(ValueError):
            continuity_bound(-0.1, 2, 2)

    @given(st.floats(0, 1), st.integers(2, 8), st.sampled_from([1.2, 2.0, 5.0, INF]))
    def test_nonnegative(self, eps, d, alpha):
        assert continuity_bound(eps, d, alpha) >= 0


def replacer(d, omega):
    w, v = np.linalg.eigh(omega)
    ks = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), complex)
            e[:, j] = math.sqrt(max(w[i], 0)) * v[:, i]
            ks.append(e)
    return Channel(tuple(ks))


class TestCoherent:
    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_identity(self, alpha):
        ch = Channel((np.eye(2, dtype=complex),))
        assert coherent_info_alpha(ch, alpha) == pytest.approx(math.log(2), abs=1e-6)

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_replacer(self, alpha):
        ch = replacer(2, random_density(2, seed=3))
        assert coherent_info_alpha(ch, alpha) == pytest.approx(0, abs=1e-6)

    def test_alpha1_amplitude_damping(self):
        ch = Channel(amplitude_damping_kraus(0.3))
        exact = amplitude_damping_coherent_info(0.3)
        assert vn_coherent_info_bruteforce(ch.kraus, restarts=3) == pytest.approx(exact, abs=1e-7)
        assert coherent_info_alpha(ch, 1.0) == pytest.approx(exact, abs=1e-6)

    def test_alpha1_random_channel_bruteforce(self):
        ch = random_channel(2, 2, 2, seed=11)
        oracle = vn_coherent_info_bruteforce(ch.kraus, restarts=4)
        assert coherent_info_alpha(ch, 1.0) == pytest.approx(oracle, abs=1e-5)

    def test_mixed_inputs_do_not_beat_pure(self):
        ch = Channel(amplitude_damping_kraus(0.3))
        alpha = 2.0
        best = coherent_info_alpha(ch, alpha, full=True)
        ap = alpha_prime(alpha)
        for s in range(8):
            rho = BipartiteOp(random_density(4, seed=s), (2, 2))
            out = apply_channel(ch, rho, on="first")
            val = -cond_renyi_entropy(out, alpha)
            assert val <= best.value + 1e-6
        assert best.value == pytest.approx(-cond_renyi_entropy(
            apply_channel(ch, BipartiteOp(np.outer(best.state, best.state.conj()), (2, 2)), on="first"), alpha),
            abs=1e-7)

    def test_monotone_in_alpha(self):
        ch = Channel(amplitude_damping_kraus(0.3))
        vals = [coherent_info_alpha(ch, a) for a in (1.0, 1.5, 2.0)]
        assert vals[0] <= vals[1] + 1e-6 <= vals[2] + 2e-6
