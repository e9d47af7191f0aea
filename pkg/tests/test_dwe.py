import itertools
import json

import numpy as np
import pytest

from annealbench import dwe
from annealbench.ising import IsingProblem, energy
from annealbench.potentials import u1, u2, u3


def unit_layout(n, wall=5.0, pin=10.0):
    return dwe.DwLayout(n=n, phi0=0.0, psi0=0.0, xi=1.0, zeta=1.0,
                        wall_penalty=wall, pin_field=pin)


def all_states(n_spins):
    states = np.array(list(itertools.product([-1, 1], repeat=n_spins)), np.int8)
    return states


def energies(problem, states):
    ii, jj, vv = problem.pair_arrays()
    sf = states.astype(np.float64)
    return problem.offset + sf @ problem.h + (sf[:, ii] * sf[:, jj]) @ vv


class TestChain:
    def test_chain_fields_and_couplings(self):
        p = dwe.build_chain(unit_layout(4, wall=1.0, pin=1.0))
        assert np.array_equal(p.h, [1, 0, 0, -1, 1, 0, 0, -1])
        expect = {(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)}
        assert set(p.couplings()) == expect
        assert all(v == -1.0 for v in p.couplings().values())

    def test_chain_n3_custom_penalties(self):
        p = dwe.build_chain(unit_layout(3, wall=2.0, pin=3.0))
        assert np.array_equal(p.h, [3, 0, -3, 3, 0, -3])
        assert len(p.couplings()) == 4
        assert all(v == -2.0 for v in p.couplings().values())

    def test_no_inter_block_couplings(self):
        p = dwe.build_chain(unit_layout(5))
        assert all((i < 5) == (j < 5) for i, j in p.couplings())

    def test_three_wall_gap_is_four_lambda(self):
        # exhaustive over one block's 2^6 states with correct pinned ends
        wall = 1.75
        layout = unit_layout(6, wall=wall, pin=3.0)
        p = dwe.build_chain(layout)
        by_walls = {}
        for bits in itertools.product([-1, 1], repeat=6):
            s = np.array(bits + (-1, 1, 1, 1, 1, 1), np.int8)  # psi block faithful
            if bits[0] != -1 or bits[-1] != 1:
                continue
            walls = sum(1 for a, b in zip(bits, bits[1:]) if a != b)
            by_walls.setdefault(walls, []).append(energy(p, s))
        ones = set(np.round(by_walls[1], 12))
        threes = set(np.round(by_walls[3], 12))
        assert len(ones) == 1 and len(threes) == 1
        assert threes.pop() - ones.pop() == pytest.approx(4 * wall, abs=1e-12)

    def test_chain_baseline_matches_energy(self):
        layout = unit_layout(7, wall=2.5, pin=4.0)
        p = dwe.build_chain(layout)
        for k1, k2 in ((1, 1), (3, 5), (6, 2)):
            s = dwe.plant_state(layout, k1, k2)
            assert energy(p, s) == pytest.approx(dwe.chain_baseline(layout), abs=1e-12)


class TestDecode:
    def test_single_wall_patterns(self):
        layout = unit_layout(4)
        s = np.array([-1, 1, 1, 1, -1, 1, 1, 1], np.int8)
        d = dwe.decode(s, layout)
        assert (d.phi, d.psi) == (1.0, 1.0)
        assert d.valid and d.walls_phi == 1

        s = np.array([-1, -1, -1, 1, -1, 1, 1, 1], np.int8)
        d = dwe.decode(s, layout)
        assert d.phi == 3.0 and d.valid

    def test_multi_wall_flagged(self):
        layout = unit_layout(4)
        s = np.array([-1, 1, -1, 1, -1, 1, 1, 1], np.int8)
        d = dwe.decode(s, layout)
        assert d.walls_phi == 3 and not d.valid

    def test_wrong_boundary_flagged(self):
        layout = unit_layout(4)
        s = np.array([1, 1, 1, 1, -1, 1, 1, 1], np.int8)
        assert not dwe.decode(s, layout).valid

    def test_decode_plant_round_trip(self):
        layout = dwe.layout_for(9, (-3.0, 3.0, -1.0, 2.0), 4.0, 8.0)
        for k1 in range(1, 9):
            for k2 in range(1, 9):
                d = dwe.decode(dwe.plant_state(layout, k1, k2), layout)
                assert d.valid
                assert d.phi == pytest.approx(layout.phi_value(k1), abs=1e-12)
                assert d.psi == pytest.approx(layout.psi_value(k2), abs=1e-12)

    def test_layout_grid_mapping(self):
        layout = dwe.layout_for(20, (-3.0, 3.0, -3.0, 3.0), 1.0, 2.0)
        assert layout.xi == pytest.approx(6.0 / 18)
        assert layout.phi_value(1) == pytest.approx(-3.0)
        assert layout.phi_value(19) == pytest.approx(3.0)
        assert layout.phi_index(-3.0) == 1
        assert layout.phi_index(3.0) == 19
        assert layout.phi_index(-99.0) == 1  # clamped


class Test1dEncodings:
    def test_constant_slice_gives_zero_fields(self):
        layout = unit_layout(6)
        h, off = dwe.encode_1d_into_h(layout, "phi", np.full(6, 3.25))
        assert np.all(h == 0.0)
        assert off == 3.25

    def test_unit_slope_gives_half_fields(self):
        layout = unit_layout(6)
        h, _ = dwe.encode_1d_into_h(layout, "phi", np.arange(6.0))
        assert np.all(h[:5] == -0.5)
        assert h[5] == 0.0
        h, _ = dwe.encode_1d_into_h(layout, "psi", np.arange(6.0))
        assert np.all(h[6:11] == -0.5) and h[11] == 0.0

    def test_h_encoding_reproduces_slice_exactly(self):
        # brute force over all single-wall positions, u1's phi slice at n=20
        pot = u1(0.5)
        n = 20
        layout = dwe.layout_for(n, pot.bounds, 1.0, 1.0)
        values = np.array([pot.eval(layout.phi_value(k), layout.psi0)
                           for k in range(n)])
        h, off = dwe.encode_1d_into_h(layout, "phi", values)
        for k in range(1, n):
            s = dwe.plant_state(layout, k, 1).astype(np.float64)
            assert h @ s + off == pytest.approx(values[k], abs=1e-12)

    def test_j_encoding_squares_example(self):
        layout = unit_layout(5, wall=3.0, pin=6.0)
        v = np.array([0.0, 1.0, 4.0, 9.0, 16.0])
        couplings, off = dwe.encode_1d_into_j(layout, "phi", v)
        assert set(couplings) == {(0, 1), (1, 2), (2, 3), (3, 4)}
        p = IsingProblem(10, offset=off, j=couplings)
        for k in range(1, 5):
            s = dwe.plant_state(layout, k, 1)
            assert energy(p, s) == pytest.approx(v[k], abs=1e-12)

    def test_h_and_j_modes_agree_on_faithful_states(self):
        rng = np.random.default_rng(0)
        layout = unit_layout(8)
        v = rng.normal(0, 2, 8)
        h, off_h = dwe.encode_1d_into_h(layout, "psi", v)
        cj, off_j = dwe.encode_1d_into_j(layout, "psi", v)
        pj = IsingProblem(16, offset=off_j, j=cj)
        for k in range(1, 8):
            s = dwe.plant_state(layout, 1, k)
            e_h = h @ s.astype(float) + off_h
            assert energy(pj, s) == pytest.approx(e_h, abs=1e-12)

    def test_axis_validation(self):
        layout = unit_layout(4)
        with pytest.raises(ValueError):
            dwe.encode_1d_into_h(layout, "theta", np.zeros(4))
        with pytest.raises(ValueError):
            dwe.encode_1d_into_j(layout, "phi", np.zeros(5))


class TestCross:
    def test_separable_integer_table_gives_no_couplings(self):
        layout = unit_layout(6)
        f = np.array([0.0, 2.0, 5.0, 1.0, -3.0, 4.0])
        g = np.array([1.0, -1.0, 2.0, 0.0, 3.0, -2.0])
        table = dwe.PotentialTable(values=f[:, None] + g[None, :],
                                   bounds=(0, 1, 0, 1))
        cj, ch, off = dwe.encode_cross(layout, table)
        assert cj == {}
        assert np.all(ch == 0.0) and off == 0.0

    def test_separable_float_table_gives_dust_at_most(self):
        rng = np.random.default_rng(1)
        layout = unit_layout(7)
        table = dwe.PotentialTable(
            values=rng.normal(0, 5, 7)[:, None] + rng.normal(0, 5, 7)[None, :],
            bounds=(0, 1, 0, 1))
        cj, ch, off = dwe.encode_cross(layout, table)
        assert all(abs(v) < 1e-12 for v in cj.values())
        assert np.all(np.abs(ch) < 1e-12)

    def test_product_table_constant_quarter(self):
        n = 6
        layout = unit_layout(n)
        ij = np.arange(n)[:, None] * np.arange(n)[None, :] * 1.0
        cj, _, _ = dwe.encode_cross(layout, dwe.PotentialTable(values=ij,
                                                               bounds=(0, 1, 0, 1)))
        assert len(cj) == (n - 1) * (n - 1)
        assert all(v == 0.25 for v in cj.values())
        assert all(i < n <= j for i, j in cj)

    def test_cross_energy_equals_residual(self):
        rng = np.random.default_rng(9)
        n = 7
        layout = unit_layout(n)
        values = rng.normal(0, 3, (n, n))
        table = dwe.PotentialTable(values=values, bounds=(0, 1, 0, 1))
        cj, ch, off = dwe.encode_cross(layout, table)
        p = IsingProblem(2 * n, h=ch, offset=off, j=cj)
        residual = values - values[:, :1] - values[:1, :] + values[0, 0]
        for k1 in range(1, n):
            for k2 in range(1, n):
                s = dwe.plant_state(layout, k1, k2)
                assert energy(p, s) == pytest.approx(residual[k1, k2], abs=1e-9)


class TestEncodePotential:
    def test_constant_table(self):
        layout = unit_layout(5)
        table = dwe.PotentialTable(values=np.full((5, 5), 2.5), bounds=(0, 1, 0, 1))
        p = dwe.encode_potential(layout, table)
        base = dwe.chain_baseline(layout)
        for k1 in range(1, 5):
            for k2 in range(1, 5):
                s = dwe.plant_state(layout, k1, k2)
                assert energy(p, s) == pytest.approx(base + 2.5, abs=1e-12)

    @pytest.mark.parametrize("mode", ["h", "j"])
    def test_phi_psi_squared_exact(self, mode):
        n = 8
        layout = unit_layout(n)
        grid = np.arange(n, dtype=float) / (n - 1)
        table = dwe.PotentialTable(values=grid[:, None] * grid[None, :] ** 2,
                                   bounds=(0, 1, 0, 1))
        p = dwe.encode_potential(layout, table, mode=mode)
        base = dwe.chain_baseline(layout)
        for k1 in range(1, n):
            for k2 in range(1, n):
                s = dwe.plant_state(layout, k1, k2)
                err = energy(p, s) - base - table.values[k1, k2]
                assert abs(err) < 1e-9

    @pytest.mark.parametrize("n", [6, 12])
    @pytest.mark.parametrize("mode", ["h", "j"])
    def test_random_tables_exact(self, n, mode):
        rng = np.random.default_rng(100 + n)
        for _ in range(5):
            values = rng.normal(0, 4, (n, n))
            table = dwe.PotentialTable(values=values, bounds=(0, 1, 0, 1))
            lam, pin = dwe.auto_penalties(table)
            layout = unit_layout(n, wall=lam, pin=pin)
            p = dwe.encode_potential(layout, table, mode=mode)
            base = dwe.chain_baseline(layout)
            for k1 in range(1, n):
                for k2 in range(1, n):
                    s = dwe.plant_state(layout, k1, k2)
                    err = energy(p, s) - base - values[k1, k2]
                    assert abs(err) < 1e-9

    def test_mode_equivalence_up_to_constant(self):
        rng = np.random.default_rng(31)
        n = 7
        layout = unit_layout(n)
        table = dwe.PotentialTable(values=rng.normal(0, 2, (n, n)),
                                   bounds=(0, 1, 0, 1))
        ph = dwe.encode_potential(layout, table, mode="h")
        pj = dwe.encode_potential(layout, table, mode="j")
        diffs = set()
        for k1 in range(1, n):
            for k2 in range(1, n):
                s = dwe.plant_state(layout, k1, k2)
                diffs.add(round(energy(ph, s) - energy(pj, s), 9))
        assert len(diffs) == 1  # identical landscapes up to one global constant

    def test_argmin_preserved_u1(self):
        pot = u1(0.7)
        problem, layout, table = dwe.encode(pot, 20)
        base = dwe.chain_baseline(layout)
        best = None
        for k1 in range(1, 20):
            for k2 in range(1, 20):
                s = dwe.plant_state(layout, k1, k2)
                e = energy(problem, s)
                if best is None or e < best[0]:
                    best = (e, k1, k2)
        interior = table.values[1:, 1:]
        want = np.unravel_index(np.argmin(interior), interior.shape)
        assert (best[1], best[2]) == (want[0] + 1, want[1] + 1)

    def test_label_carries_layout(self):
        pot = u3(1.7)
        problem, layout, _ = dwe.encode(pot, 6)
        parsed = json.loads(problem.label)
        assert parsed["kind"] == "dwe"
        assert dwe.layout_from_label(problem.label) == layout


class TestPenalties:
    def test_rule_on_known_range(self):
        table = dwe.PotentialTable(values=np.array([[0.0, 3.0], [1.0, 2.0]]),
                                   bounds=(0, 1, 0, 1))
        wall, pin = dwe.auto_penalties(table)
        assert wall == 6.0
        assert pin == 12.0

    def test_constant_table_floor(self):
        table = dwe.PotentialTable(values=np.zeros((4, 4)), bounds=(0, 1, 0, 1))
        assert dwe.auto_penalties(table) == (1.0, 2.0)

    def test_u3_scale(self):
        table = dwe.sample_table(u3(1.7), 20)
        wall, pin = dwe.auto_penalties(table)
        spread = table.values.max() - table.values.min()
        assert wall == pytest.approx(2 * spread)
        assert 31 < wall < 36  # landscape spread is about 17 at this scale
        assert pin == 2 * wall

    @pytest.mark.parametrize("build,lam", [(u1, 0.5), (u2, 10.0), (u3, 1.7)])
    def test_dominance_exhaustive_n6(self, build, lam):
        pot = build(lam)
        table = dwe.sample_table(pot, 6)
        wall, pin = dwe.auto_penalties(table)
        layout = dwe.layout_for(6, pot.bounds, wall, pin)
        p = dwe.encode_potential(layout, table)
        states = all_states(12)
        e = energies(p, states)
        faithful = np.array([dwe.decode(s, layout).valid for s in states])
        assert e[~faithful].min() > e[faithful].max()
