import numpy as np
import pytest

from memcap import (
    DeviceParams,
    EnergyCostModel,
    EnergyObservation,
    InvalidArgumentError,
    SegmentedCycle,
    UnderdeterminedFitError,
    VITrace,
    energy_cost,
    fit_energy_model,
    observations_from_cycles,
)
from memcap.device import conductance_denominator
from memcap.energyfit import KNOWM_SDC_A, KNOWM_SDC_B

# Frozen from a 50-digit evaluation of 0.000239506 * ln(7.1853e6 / 1e6).
COST_AT_1E6 = 0.0004723147589425431


def synthetic_observations(a, b, r_values, rng=None, noise=0.0):
    e = a * np.log(b / np.asarray(r_values))
    if noise > 0.0:
        e = e * (1.0 + noise * rng.standard_normal(len(e)))
    return [EnergyObservation(r=float(r), e=float(max(val, 0.0))) for r, val in zip(r_values, e)]


class TestEnergyCost:
    def test_zero_at_equilibrium(self):
        model = EnergyCostModel(a=3e-4, b=5e6)
        assert energy_cost(5e6, model) == 0.0

    def test_scale_at_one_log_unit(self):
        model = EnergyCostModel(a=3e-4, b=5e6)
        assert energy_cost(5e6 / np.e, model) == pytest.approx(3e-4, rel=1e-12)

    def test_matches_high_precision_reference(self):
        assert energy_cost(1e6, EnergyCostModel.knowm_sdc()) == pytest.approx(COST_AT_1E6, rel=1e-13)

    def test_symmetric_in_log_distance(self):
        model = EnergyCostModel(a=1e-4, b=1e6)
        for factor in (2.0, 5.0, 17.3):
            assert energy_cost(1e6 * factor, model) == pytest.approx(energy_cost(1e6 / factor, model), rel=1e-12)

    def test_monotone_on_each_branch(self):
        model = EnergyCostModel(a=1e-4, b=1e6)
        below = energy_cost(np.geomspace(1e4, 1e6 * 0.999, 50), model)
        above = energy_cost(np.geomspace(1e6 * 1.001, 1e8, 50), model)
        assert np.all(np.diff(below) < 0)
        assert np.all(np.diff(above) > 0)

    def test_rejects_non_positive_r(self):
        with pytest.raises(InvalidArgumentError):
            energy_cost(0.0, EnergyCostModel.knowm_sdc())

    def test_decomposition_must_match_equilibrium(self):
        from memcap.energyfit import PhysicalDecomposition

        decomp = PhysicalDecomposition(r_eq=5e6, r_final=2e5, tau_final=2e-3)
        model = EnergyCostModel(a=1e-4, b=5e6, decomposition=decomp)
        assert model.decomposition.r_eq == model.b
        with pytest.raises(InvalidArgumentError):
            EnergyCostModel(a=1e-4, b=6e6, decomposition=decomp)


class TestFitEnergyModel:
    def test_recovers_exact_parameters(self):
        r = np.geomspace(2e5, 5e6, 12)
        obs = synthetic_observations(2e-4, 7e6, r)
        model, diag = fit_energy_model(obs)
        assert model.a == pytest.approx(2e-4, rel=1e-6)
        assert model.b == pytest.approx(7e6, rel=1e-6)
        assert diag.branch_valid

    def test_two_exact_points_fit_exactly(self):
        obs = synthetic_observations(1.5e-4, 6e6, [3e5, 2e6])
        model, diag = fit_energy_model(obs)
        assert diag.rss <= 1e-20
        assert model.b == pytest.approx(6e6, rel=1e-8)

    def test_noisy_recovery_within_ten_percent(self):
        rng = np.random.default_rng(11)
        r = np.tile(np.geomspace(2e5, 5e6, 12), 4)
        obs = synthetic_observations(KNOWM_SDC_A, KNOWM_SDC_B, r, rng=rng, noise=0.05)
        model, _ = fit_energy_model(obs)
        assert model.a == pytest.approx(KNOWM_SDC_A, rel=0.1)
        assert model.b == pytest.approx(KNOWM_SDC_B, rel=0.1)

    def test_order_invariant(self):
        rng = np.random.default_rng(5)
        r = np.geomspace(1e5, 4e6, 24)
        obs = synthetic_observations(3e-4, 8e6, r, rng=rng, noise=0.03)
        model_fwd, _ = fit_energy_model(obs)
        model_rev, _ = fit_energy_model(list(reversed(obs)))
        assert model_fwd.a == pytest.approx(model_rev.a, rel=1e-9)
        assert model_fwd.b == pytest.approx(model_rev.b, rel=1e-9)

    def test_b_recovered_across_decades(self):
        for b in (1e5, 1e6, 1e7, 1e8):
            r = np.geomspace(b / 50.0, b / 1.5, 12)
            model, _ = fit_energy_model(synthetic_observations(2e-4, b, r))
            assert model.b == pytest.approx(b, rel=1e-6)

    def test_energy_scaling_homogeneity(self):
        r = np.geomspace(2e5, 5e6, 12)
        rng = np.random.default_rng(8)
        obs = synthetic_observations(2e-4, 7e6, r, rng=rng, noise=0.02)
        lam = 37.5
        scaled = [EnergyObservation(r=ob.r, e=lam * ob.e) for ob in obs]
        base, _ = fit_energy_model(obs)
        up, _ = fit_energy_model(scaled)
        assert up.a == pytest.approx(lam * base.a, rel=1e-6)
        assert up.b == pytest.approx(base.b, rel=1e-6)

    def test_underdetermined_rejected(self):
        obs = [EnergyObservation(r=1e6, e=1e-4), EnergyObservation(r=1e6, e=1.1e-4)]
        with pytest.raises(UnderdeterminedFitError):
            fit_energy_model(obs)

    def test_caller_init_is_honoured(self):
        r = np.geomspace(2e5, 5e6, 12)
        obs = synthetic_observations(2e-4, 7e6, r)
        model, _ = fit_energy_model(obs, init=EnergyCostModel(a=1e-4, b=5e6))
        assert model.b == pytest.approx(7e6, rel=1e-6)


class TestObservationsFromCycles:
    def make_cycle(self, params, x_post, power, t_set=2e-3, n=200):
        t = np.linspace(0.0, t_set, n)
        v_set = np.ones(n)
        i_set = np.full(n, power)  # v*i = power, constant
        set_segment = VITrace(t=t, v=v_set, i=i_set)
        read_t = np.arange(100) / 1e5
        phase = np.arange(100) / 100.0
        tri = np.where(phase < 0.25, 4 * phase, np.where(phase < 0.75, 2 - 4 * phase, 4 * phase - 4))
        v_read = 0.2 * tri
        read = VITrace(t=read_t, v=v_read, i=x_post * conductance_denominator(v_read, params))
        return SegmentedCycle(set_segment=set_segment, reads_post=(read, read))

    def test_known_state_and_constant_power(self):
        params = DeviceParams.knowm_sdc()
        x_post, power, t_set = 2e-6, 1e-6, 2e-3
        cycle = self.make_cycle(params, x_post, power, t_set=t_set)
        (obs,) = observations_from_cycles([cycle], params)
        assert obs.r == pytest.approx(1.0 / x_post, rel=1e-9)
        assert obs.e == pytest.approx(power * t_set, rel=1e-9)

    def test_empty_cycle_list(self):
        assert observations_from_cycles([], DeviceParams.knowm_sdc()) == []

    def test_one_observation_per_cycle(self):
        params = DeviceParams.knowm_sdc()
        cycles = [self.make_cycle(params, 1e-6 * (k + 1), 1e-6) for k in range(5)]
        assert len(observations_from_cycles(cycles, params)) == 5

    def test_missing_reads_rejected(self):
        params = DeviceParams.knowm_sdc()
        cycle = self.make_cycle(params, 1e-6, 1e-6)
        broken = SegmentedCycle(set_segment=cycle.set_segment, reads_post=())
        with pytest.raises(InvalidArgumentError):
            observations_from_cycles([broken], params)
