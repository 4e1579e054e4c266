import dataclasses
import math
import time
from unittest.mock import patch

import numpy as np
import pytest

from spinbattery.config import presets as tables
from spinbattery.config.config import (
    DEFAULT_HBAR,
    DEFAULT_J,
    DEFAULT_OMEGA,
    DEFAULT_OMEGA0,
    ISING_SAMPLES,
    XXZ_SAMPLES,
)
from spinbattery.errors import ConvergenceError, DomainError, PlanError, UnknownPresetError
from spinbattery.evolution import Backend, sample_trajectory, uncharged_state
from spinbattery.experiments import (
    PLOT_GROUPS,
    REQUIRED_GROUPS,
    Preset,
    SimulationPlan,
    SweepSpec,
    lookup_preset,
    normalize_preset_name,
    point_label,
    preset_catalog,
    run_plan,
    run_sweep,
)
from spinbattery.hamiltonian import ModelKind, ModelParams, driver_hamiltonian
from spinbattery.metrics import cycle_report
from spinbattery.topology import closed_chain, open_chain, supercube

TOPOLOGIES = ["open", "closed", "supercube"]


def _run(name):
    return run_plan(lookup_preset(name).plan)


def _small_plan():
    return SimulationPlan(
        open_chain(4), ModelParams(), ModelKind.ISING, math.pi, 41, label="small"
    )


# =============================================================================
# PLANS AND SWEEPS
# =============================================================================


def test_plan_validation():
    """Test plans reject kind mismatches and degenerate grids."""
    with pytest.raises(DomainError):
        SimulationPlan(open_chain(4), ModelParams(delta=0.0), ModelKind.ISING)
    with pytest.raises(DomainError):
        SimulationPlan(open_chain(4), ModelParams(), samples=1)
    with pytest.raises(DomainError):
        SimulationPlan(open_chain(4), ModelParams(), t_max=0.0)


def test_plan_time_grid():
    """Test the grid spans [0, t_max] with the requested samples."""
    grid = _small_plan().time_grid()
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(math.pi)
    assert len(grid) == 41


def test_run_plan_series_shape():
    """Test a run starts uncharged and fills every column."""
    series = run_plan(_small_plan())
    assert len(series) == 41
    assert series.energy[0] == pytest.approx(-4.0)
    assert series.ergotropy[0] == pytest.approx(0.0, abs=1e-12)
    assert series.power[0] == 0.0
    assert series.label == "small"
    assert series.details["topology"] == "open-4"
    assert np.all(series.ergotropy >= 0.0)
    assert np.all(series.ergotropy <= 8.0 + 1e-9)


def test_run_plan_wraps_failures():
    """Test numerical failures surface as PlanError with the cause chained."""
    with patch(
        "spinbattery.experiments.sample_trajectory",
        side_effect=ConvergenceError("no convergence"),
    ):
        with pytest.raises(PlanError, match="small") as excinfo:
            run_plan(_small_plan())
    assert isinstance(excinfo.value.__cause__, ConvergenceError)


def test_sweep_spec_canonicalizes_lambda():
    """Test the lambda alias maps to the lam field."""
    spec = SweepSpec(_small_plan(), (("lambda", (0.0, 0.5)),))
    assert spec.axes == (("lam", (0.0, 0.5)),)
    points = list(spec.points())
    assert point_label(points[1]) == "lambda=0.5"
    assert spec.plan_for(points[1]).params.lam == 0.5


@pytest.mark.parametrize(
    "axes",
    [(), (("gamma", (1.0,)),), (("D", ()),), (("D", (0.0,)), ("D", (1.0,)))],
)
def test_sweep_spec_validation(axes):
    """Test empty, unknown and repeated axes are rejected."""
    with pytest.raises(DomainError):
        SweepSpec(_small_plan(), axes)


def test_sweep_cartesian_product():
    """Test a two-axis sweep runs every combination in order."""
    spec = SweepSpec(_small_plan(), (("D", (0.0, 1.0)), ("lam", (0.0, 0.5))))
    results = run_sweep(spec, workers=2)
    assert [point_label(p) for p in results] == [
        "D=0,lambda=0",
        "D=0,lambda=0.5",
        "D=1,lambda=0",
        "D=1,lambda=0.5",
    ]
    assert all(len(series) == 41 for series in results.values())


def test_sweep_records_failed_points():
    """Test a point that breaks the model kind fails alone."""
    spec = SweepSpec(_small_plan(), (("delta", (1.0, 0.5)),))
    results = list(run_sweep(spec, workers=2).values())
    assert len(results[0]) == 41
    assert isinstance(results[1], PlanError)
    assert isinstance(results[1].__cause__, DomainError)


def test_sweep_records_convergence_failures():
    """Test a convergence failure is recorded per point."""
    spec = SweepSpec(_small_plan(), (("D", (0.0, 1.0)),))
    with patch(
        "spinbattery.experiments.sample_trajectory",
        side_effect=ConvergenceError("stalled"),
    ):
        results = run_sweep(spec, workers=1)
    for outcome in results.values():
        assert isinstance(outcome, PlanError)
        assert isinstance(outcome.__cause__, ConvergenceError)


# =============================================================================
# PRESET CATALOG
# =============================================================================


def test_every_required_group_has_a_preset():
    """Test the catalog covers every study group."""
    catalog = preset_catalog()
    for group in REQUIRED_GROUPS:
        assert any(group in preset.groups for preset in catalog.values()), group


def test_every_numbered_plot_has_a_preset():
    """Test plots 1 to 10 each map to a group with at least one preset."""
    catalog = preset_catalog()
    assert sorted(PLOT_GROUPS) == list(range(1, 11))
    assert set(PLOT_GROUPS.values()) == set(REQUIRED_GROUPS)
    for number in range(1, 11):
        group = PLOT_GROUPS[number]
        assert any(group in preset.groups for preset in catalog.values()), number


def test_presets_share_model_defaults():
    """Test preset base parameters come from the configured model defaults."""
    assert tables.BASE_PARAMS == {
        "J": DEFAULT_J,
        "Omega": DEFAULT_OMEGA,
        "omega0": DEFAULT_OMEGA0,
        "hbar": DEFAULT_HBAR,
    }
    params = lookup_preset("xxz-icosahedron-D2.06").plan.params
    assert (params.J, params.Omega, params.omega0, params.hbar) == (
        DEFAULT_J,
        DEFAULT_OMEGA,
        DEFAULT_OMEGA0,
        DEFAULT_HBAR,
    )


def test_preset_needs_plan_or_sweep():
    """Test a preset holds exactly one of plan and sweep."""
    with pytest.raises(DomainError):
        Preset("empty", frozenset())


def test_lookup_accepts_ascii_lambda():
    """Test `lambda` is an alias for `λ` in preset names."""
    assert normalize_preset_name("ising-open-D0-lambda0") == "ising-open-D0-λ0"
    assert lookup_preset("ising-open-D0-lambda0") is lookup_preset("ising-open-D0-λ0")


def test_lookup_unknown_preset():
    """Test unknown names list the available presets."""
    with pytest.raises(UnknownPresetError, match="ising-open-D0-λ0"):
        lookup_preset("ising-moebius-D0-λ0")


def test_catalog_grids_follow_model_kind():
    """Test Ising presets use the short grid and XXZ presets the long one."""
    assert lookup_preset("ising-closed-D5-λ0.5").plan.samples == ISING_SAMPLES
    xxz = lookup_preset("xxz-supercube-D1.7-λ0").plan
    assert xxz.samples == XXZ_SAMPLES
    assert (xxz.params.delta, xxz.params.Delta, xxz.params.D) == (0.0, 2.0, 1.7)


def test_sweep_presets():
    """Test the supercube scans are sweeps over D and J."""
    d_scan = lookup_preset("xxz-supercube-D-scan")
    assert d_scan.kind == "sweep"
    assert d_scan.sweep.axes[0][0] == "D"
    j_scan = lookup_preset("xxz-supercube-J-scan")
    assert j_scan.sweep.base.params.D == 1.7
    assert 3.0 in j_scan.sweep.axes[0][1]


# =============================================================================
# ACCEPTANCE
# =============================================================================


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_ising_full_charge(topology):
    """Test the Ising battery charges fully to 16 at t = pi/2."""
    series = _run(f"ising-{topology}-D0-λ0")
    report = cycle_report(series)
    assert report.peak_value == pytest.approx(16.0, abs=1e-6)
    assert report.peak_time == pytest.approx(math.pi / 2, abs=series.times[1])


def test_ising_full_charge_runs_within_ten_seconds():
    """Test the three full-charge landmark runs finish in under ten seconds together."""
    started = time.perf_counter()
    for topology in TOPOLOGIES:
        _run(f"ising-{topology}-D0-λ0")
    assert time.perf_counter() - started < 10.0


def test_parallel_charging_full_charge():
    """Test independent local fields also charge fully at t = pi/2."""
    series = _run("parallel-D0-λ0")
    assert series.ergotropy.max() == pytest.approx(16.0, abs=1e-6)


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_battery_field_suppresses_charging(topology):
    """Test peak ergotropy drops strictly as lambda grows."""
    peaks = [_run(f"ising-{topology}-D0-λ{lam}").ergotropy.max() for lam in ("0", "0.5", "1")]
    assert peaks[0] > peaks[1] > peaks[2]


def test_ising_power_ordering():
    """Test supercube > closed > open in peak power, all before pi/4."""
    reports = {t: cycle_report(_run(f"ising-{t}-D0-λ0")) for t in TOPOLOGIES}
    assert reports["supercube"].peak_power > reports["closed"].peak_power
    assert reports["closed"].peak_power > reports["open"].peak_power
    for report in reports.values():
        assert report.peak_power_time < math.pi / 4


@pytest.mark.parametrize("topology", TOPOLOGIES)
@pytest.mark.parametrize("d", ["5", "10"])
def test_dmi_suppresses_ising_ergotropy(topology, d):
    """Test strong DMI keeps the Ising battery below full charge."""
    assert _run(f"ising-{topology}-D{d}-λ0").ergotropy.max() < 16.0 - 0.1


def test_dmi_changes_ising_peak_power():
    """Test D = 10 raises peak power on the open chain and supercube but not the ring."""

    def peak_power(name):
        return cycle_report(_run(name)).peak_power

    for topology in ("open", "supercube"):
        assert peak_power(f"ising-{topology}-D10-λ0") > peak_power(f"ising-{topology}-D0-λ0")
    assert peak_power("ising-closed-D10-λ0") < peak_power("ising-closed-D0-λ0")


def test_xxz_supercube_cycle():
    """Test near-complete charge and discharge of the XXZ supercube at D = 1.7."""
    report = cycle_report(_run("xxz-supercube-D1.7-λ0"))
    assert report.peak_value >= 15.2
    assert report.residual is not None
    assert report.residual <= 0.8


def test_xxz_supercube_strong_coupling_detunes():
    """Test J = 3 at D = 1.7 leaves the battery nearly empty."""
    preset = lookup_preset("xxz-supercube-J-scan")
    point = (("J", 3.0),)
    series = run_plan(preset.sweep.plan_for(point))
    assert series.ergotropy.max() < 2.0


def test_xxz_closed_chain_drift():
    """Test the XXZ ring minima drift upwards."""
    report = cycle_report(_run("xxz-closed-D1.7-λ0"))
    assert report.drift is not None
    assert report.drift > 0


def test_body_diagonals_damp_the_cycle():
    """Test two body diagonals lower the second peak more than the bare cube."""
    bare = cycle_report(_run("xxz-supercube-D1.7-λ0"))
    dressed = cycle_report(_run("xxz-supercube-2body-D1.7"))
    assert dressed.second_peak < dressed.first_peak
    assert dressed.first_peak - dressed.second_peak > bare.first_peak - bare.second_peak


@pytest.mark.parametrize("topology", [open_chain(8), closed_chain(8), supercube()])
def test_ergotropy_invariant_under_dmi_sign(topology):
    """Test D -> -D leaves the ergotropy trajectory unchanged."""

    def trajectory(d):
        params = ModelParams(delta=0.0, Delta=2.0, D=d)
        plan = SimulationPlan(topology, params, ModelKind.XXZ, 3.0, 31)
        return run_plan(plan).ergotropy

    np.testing.assert_allclose(trajectory(1.7), trajectory(-1.7), atol=1e-8)


@pytest.mark.slow
def test_krylov_matches_spectral_on_eight_qubit_presets():
    """Test both backends agree on every eight-qubit plan preset."""
    for preset in preset_catalog().values():
        plan = preset.plan
        if plan is None or plan.topology.n != 8:
            continue
        H = driver_hamiltonian(plan.topology, plan.params, mode=plan.mode, sparse=True)
        grid = plan.time_grid()
        psi0 = uncharged_state(8)
        spectral = sample_trajectory(H, psi0, grid, Backend.SPECTRAL)
        krylov = sample_trajectory(H, psi0, grid, Backend.KRYLOV)
        for a, b in zip(spectral, krylov, strict=True):
            np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-8)


# Sample indices refer to the 1200-point XXZ grid on [0, 3*pi].
TWELVE_QUBIT_CYCLES = {
    "xxz-icosahedron-D2.06": {
        "peak_value": 23.839377,
        "peak_index": 313,
        "residual": 0.270566,
        "period_estimate": 4.881390,
        "second_peak": 23.566360,
        "peak_power": 11.170209,
        "peak_power_index": 236,
    },
    "xxz-cuboctahedron-D1.94": {
        "peak_value": 23.645267,
        "peak_index": 336,
        "residual": 0.483922,
        "period_estimate": 5.242975,
        "second_peak": 23.337355,
        "peak_power": 10.413347,
        "peak_power_index": 245,
    },
}


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(TWELVE_QUBIT_CYCLES))
def test_twelve_qubit_cycles(name):
    """Test the 12-qubit polyhedra cycle almost completely, within two minutes on Krylov."""
    expected = TWELVE_QUBIT_CYCLES[name]
    plan = dataclasses.replace(lookup_preset(name).plan, backend=Backend.KRYLOV)
    started = time.perf_counter()
    series = run_plan(plan)
    elapsed = time.perf_counter() - started
    report = cycle_report(series)

    assert elapsed < 120.0
    assert report.peak_value >= 0.95 * 24
    assert report.residual <= 0.05 * 24
    times = plan.time_grid()
    assert report.peak_value == pytest.approx(expected["peak_value"], abs=1e-4)
    assert report.peak_time == pytest.approx(times[expected["peak_index"]], abs=1e-9)
    assert report.residual == pytest.approx(expected["residual"], abs=1e-4)
    assert report.period_estimate == pytest.approx(expected["period_estimate"], abs=1e-6)
    assert report.second_peak == pytest.approx(expected["second_peak"], abs=1e-4)
    assert report.peak_power == pytest.approx(expected["peak_power"], abs=1e-4)
    assert report.peak_power_time == pytest.approx(
        times[expected["peak_power_index"]], abs=1e-9
    )


@pytest.mark.slow
def test_cube_extension_runs():
    """Test the 12-qubit cube extension runs within ergotropy bounds."""
    series = _run("xxz-cube-extension-D1.7")
    assert np.all(series.ergotropy >= 0.0)
    assert np.all(series.ergotropy <= 24.0 + 1e-9)
