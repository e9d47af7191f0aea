import itertools

import numpy as np
import pytest

from annealbench.ising import (GridSpec, IsingProblem, as_spin_state,
                               build_2d_grid, delta_energy, energy,
                               magnetisation, normalized_energy,
                               random_spin_state)


def brute_energy(problem, state):
    """Independent oracle: evaluate the defining sum term by term."""
    e = problem.offset
    for i in range(problem.n_spins):
        e += problem.h[i] * state[i]
    for (i, j), v in problem.couplings().items():
        e += v * state[i] * state[j]
    return e


def random_problem(rng, n=20, density=0.3):
    h = rng.normal(0, 1, n)
    p = IsingProblem(n, h=h, offset=rng.normal())
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < density:
            p.add_coupling(i, j, rng.normal())
    return p


class TestProblemContainer:
    def test_canonical_pair_storage(self):
        p = IsingProblem(4)
        p.add_coupling(2, 0, -1.5)
        assert p.coupling(0, 2) == -1.5
        assert p.coupling(2, 0) == -1.5
        p.add_coupling(0, 2, -0.5)
        assert p.coupling(2, 0) == -2.0
        assert p.n_couplings == 1

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            IsingProblem(0)
        p = IsingProblem(3)
        with pytest.raises(ValueError):
            p.add_coupling(1, 1, 1.0)
        with pytest.raises(IndexError):
            p.add_coupling(0, 3, 1.0)
        with pytest.raises(ValueError):
            p.add_coupling(0, 1, float("nan"))
        with pytest.raises(ValueError):
            IsingProblem(2, h=[1.0, float("inf")])

    def test_json_round_trip_is_value_exact(self):
        rng = np.random.default_rng(3)
        p = random_problem(rng)
        q = IsingProblem.from_json(p.to_json())
        assert q.n_spins == p.n_spins
        assert q.offset == p.offset
        assert np.array_equal(q.h, p.h)
        assert q.couplings() == p.couplings()
        s = random_spin_state(p.n_spins, rng)
        assert energy(p, s) == energy(q, s)

    def test_json_schema_fields(self):
        import json
        p = build_2d_grid(GridSpec(2, 1.0))
        d = json.loads(p.to_json())
        assert set(d) == {"n_spins", "h", "j", "offset", "label"}
        assert all(i < j for i, j, _ in d["j"])


class TestGrid:
    def test_2x2_grid(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        assert p.n_spins == 4
        assert p.n_couplings == 4
        assert all(v == -1.0 for v in p.couplings().values())

    def test_3x3_scaled(self):
        p = build_2d_grid(GridSpec(3, 2.0))
        assert p.n_couplings == 12
        assert all(v == -2.0 for v in p.couplings().values())

    def test_paper_scale_grid(self):
        p = build_2d_grid(GridSpec(40, 2.0))
        assert p.n_spins == 1600
        assert p.n_couplings == 3120

    @pytest.mark.parametrize("n", range(2, 65))
    def test_edge_count(self, n):
        assert build_2d_grid(GridSpec(n, 1.0)).n_couplings == 2 * n * (n - 1)

    def test_open_boundaries_no_diagonals(self):
        p = build_2d_grid(GridSpec(4, 1.0))
        assert p.coupling(0, 3) == 0.0     # no wraparound along a row
        assert p.coupling(0, 12) == 0.0    # no wraparound along a column
        assert p.coupling(0, 5) == 0.0     # no diagonal
        assert np.all(p.h == 0.0)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            GridSpec(1, 1.0)
        with pytest.raises(ValueError):
            GridSpec(3, 0.0)


class TestEnergy:
    def test_aligned_2x2(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        assert energy(p, np.ones(4, np.int8)) == -4.0

    def test_one_flip_2x2(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        s = np.ones(4, np.int8)
        s[0] = -1
        assert energy(p, s) == 0.0

    def test_field_terms_cancel(self):
        p = IsingProblem(2, h=[1.0, -1.0])
        assert energy(p, np.array([1, 1], np.int8)) == 0.0

    def test_dimension_mismatch(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        with pytest.raises(ValueError):
            energy(p, np.ones(5, np.int8))

    def test_z2_symmetry_without_fields(self):
        p = build_2d_grid(GridSpec(5, 1.3))
        rng = np.random.default_rng(11)
        for _ in range(20):
            s = random_spin_state(p.n_spins, rng)
            assert energy(p, s) == pytest.approx(energy(p, -s), abs=1e-12)


class TestDeltaEnergy:
    def test_flip_on_aligned_grid(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        s = np.ones(4, np.int8)
        for i in range(4):
            assert delta_energy(p, s, i) == 4.0

    def test_isolated_spin_field(self):
        p = IsingProblem(1, h=[0.5])
        assert delta_energy(p, np.array([1], np.int8), 0) == -1.0

    def test_matches_recomputation_randomised(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            p = random_problem(rng, n=20)
            s = random_spin_state(20, rng)
            i = int(rng.integers(0, 20))
            flipped = s.copy()
            flipped[i] = -flipped[i]
            expect = energy(p, flipped) - energy(p, s)
            assert delta_energy(p, s, i) == pytest.approx(expect, abs=1e-12)

    def test_thousand_random_triples(self):
        rng = np.random.default_rng(17)
        checks = 0
        for _ in range(50):
            p = random_problem(rng, n=12)
            for _ in range(20):
                s = random_spin_state(12, rng)
                i = int(rng.integers(0, 12))
                flipped = s.copy()
                flipped[i] = -flipped[i]
                diff = delta_energy(p, s, i) - (energy(p, flipped) - energy(p, s))
                assert abs(diff) < 1e-10
                checks += 1
        assert checks == 1000

    def test_index_out_of_range(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        with pytest.raises(IndexError):
            delta_energy(p, np.ones(4, np.int8), 4)


class TestObservables:
    def test_eta_aligned_is_minus_one(self):
        for n in (2, 3, 8):
            p = build_2d_grid(GridSpec(n, 1.7))
            assert normalized_energy(p, np.ones(n * n, np.int8), 1.7) == -1.0

    def test_eta_one_flip_2x2(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        s = np.ones(4, np.int8)
        s[0] = -1
        assert normalized_energy(p, s, 1.0) == 0.0

    def test_eta_checkerboard_is_plus_one(self):
        n = 4
        p = build_2d_grid(GridSpec(n, 2.0))
        s = np.array([1 if (r + c) % 2 == 0 else -1
                      for r in range(n) for c in range(n)], np.int8)
        assert normalized_energy(p, s, 2.0) == 1.0

    def test_eta_bounds_random_states(self):
        p = build_2d_grid(GridSpec(6, 0.7))
        rng = np.random.default_rng(23)
        for _ in range(50):
            s = random_spin_state(36, rng)
            assert -1.0 <= normalized_energy(p, s, 0.7) <= 1.0

    def test_eta_zero_scale_rejected(self):
        p = build_2d_grid(GridSpec(2, 1.0))
        with pytest.raises(ValueError):
            normalized_energy(p, np.ones(4, np.int8), 0.0)

    def test_magnetisation(self):
        assert magnetisation(np.ones(9, np.int8)) == 1.0
        assert magnetisation(np.array([1, 1, -1, -1], np.int8)) == 0.0
        assert magnetisation(np.array([1, 1, 1, -1], np.int8)) == 0.5
        rng = np.random.default_rng(2)
        for _ in range(20):
            m = magnetisation(random_spin_state(13, rng))
            assert 0.0 <= m <= 1.0


class TestSpinState:
    def test_validation(self):
        with pytest.raises(ValueError):
            as_spin_state([1, 0, -1])
        with pytest.raises(ValueError):
            as_spin_state([1.5, -1.0])
        s = as_spin_state([1, -1, 1])
        assert s.dtype == np.int8

    def test_random_state_seeded(self):
        a = random_spin_state(50, np.random.default_rng(9))
        b = random_spin_state(50, np.random.default_rng(9))
        assert np.array_equal(a, b)
        assert set(np.unique(a)) <= {-1, 1}
