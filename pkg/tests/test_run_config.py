import math
from pathlib import Path

import pytest

from spinbattery.errors import ConfigError
from spinbattery.evolution import Backend
from spinbattery.experiments import lookup_preset, preset_catalog
from spinbattery.hamiltonian import ChargingMode, ModelKind
from spinbattery.run_config import RunConfig
from spinbattery.topology import open_chain, supercube

XXZ_CONFIG = """\
[system]
topology = supercube
n = 8

[model]
kind = xxz
D = 1.7
lambda = 0

[time]
samples = 600

[output]
directory = results
emit_svg = yes
"""


def test_loads_xxz_config():
    """Test a minimal XXZ config fills in the kind defaults."""
    config = RunConfig.loads(XXZ_CONFIG)
    plan = config.to_plan()
    assert plan.topology == supercube()
    assert plan.model_kind is ModelKind.XXZ
    assert (plan.params.delta, plan.params.Delta, plan.params.D) == (0.0, 2.0, 1.7)
    assert plan.t_max == pytest.approx(3 * math.pi)
    assert plan.samples == 600
    assert config.output_dir == Path("results")
    assert config.emit_svg


def test_chain_length_from_n():
    """Test `open` with n builds a chain of that length."""
    text = "[system]\ntopology = open\nn = 5\n[model]\nkind = ising\n"
    plan = RunConfig.loads(text).to_plan()
    assert plan.topology == open_chain(5)
    assert plan.t_max == pytest.approx(math.pi)


def test_lambda_out_of_range_cites_line_and_bound():
    """Test lambda = 1.5 is reported at its own line with the bound."""
    text = "[system]\ntopology = supercube\n\n[model]\nkind = ising\nlambda = 1.5\n"
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.loads(text)
    assert excinfo.value.line == 6
    assert "[0, 1]" in str(excinfo.value)
    assert str(excinfo.value).startswith("line 6:")


@pytest.mark.parametrize(
    ("text", "line"),
    [
        ("[system]\ntopology = supercube\ncolour = blue\n", 3),
        ("[system]\ntopology = supercube\n[extras]\nx = 1\n", 3),
        ("[system]\ntopology = supercube\n[model]\nJ = strong\n", 4),
        ("[system]\ntopology = supercube\n[time]\nsamples = 1\n", 4),
        ("[system]\ntopology = supercube\n[time]\nt_max = -1\n", 4),
        ("[system]\ntopology = supercube\nn = 6\n", 3),
        ("[system]\ntopology = tesseract\n", 2),
        ("[system]\ntopology = supercube\n[model]\nkind = ising\ndelta = 0.5\n", 4),
        ("[system]\ntopology = supercube\n[model]\nmode = serial\n", 4),
        ("[system]\ntopology = supercube\n[output]\nemit_svg = maybe\n", 4),
        ("topology = supercube\n", 1),
    ],
)
def test_config_errors_carry_line_numbers(text, line):
    """Test each kind of mistake is reported at the right line."""
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.loads(text)
    assert excinfo.value.line == line


def test_system_needs_one_topology_source():
    """Test topology and edge_list are mutually exclusive and one is required."""
    with pytest.raises(ConfigError, match="exactly one"):
        RunConfig.loads("[system]\nn = 8\n")
    with pytest.raises(ConfigError, match="exactly one"):
        RunConfig.loads("[system]\ntopology = supercube\nedge_list = a.edges\n")


def test_case_sensitive_keys():
    """Test delta and Delta are distinct keys."""
    text = "[system]\ntopology = open\n[model]\ndelta = 0.3\nDelta = 1.5\n"
    params = RunConfig.loads(text).params
    assert (params.delta, params.Delta) == (0.3, 1.5)


def test_edge_list_relative_to_config(tmp_path):
    """Test edge-list paths resolve next to the config file."""
    (tmp_path / "triangle.edges").write_text("n 3\n1 2\n2 3\n1 3\n", encoding="utf-8")
    config_path = tmp_path / "run.ini"
    config_path.write_text(
        "[system]\nedge_list = triangle.edges\n[model]\nkind = ising\n", encoding="utf-8"
    )
    config = RunConfig.read(config_path)
    plan = config.to_plan()
    assert plan.topology.name == "triangle"
    assert config.output_dir == tmp_path / "out"


def test_missing_edge_list_reported(tmp_path):
    """Test a missing edge list is reported at the edge_list line."""
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.loads("[system]\nedge_list = nowhere.edges\n", base_dir=tmp_path)
    assert excinfo.value.line == 2


def test_read_missing_config(tmp_path):
    """Test an unreadable config is a config error."""
    with pytest.raises(ConfigError, match="cannot read"):
        RunConfig.read(tmp_path / "absent.ini")


def test_backend_and_mode_options():
    """Test backend, mode and Krylov options are parsed."""
    text = (
        "[system]\ntopology = supercube\n"
        "[model]\nmode = parallel\n"
        "[time]\nbackend = krylov\nkrylov_subspace = 40\nkrylov_step = 0.02\n"
    )
    plan = RunConfig.loads(text).to_plan()
    assert plan.mode is ChargingMode.PARALLEL
    assert plan.backend is Backend.KRYLOV
    assert (plan.krylov.subspace_dim, plan.krylov.step_size) == (40, 0.02)


@pytest.mark.parametrize(
    "name", [n for n, p in sorted(preset_catalog().items()) if p.plan is not None]
)
def test_round_trip_preserves_plan(name):
    """Test plan -> config text -> plan is the identity for catalog plans."""
    plan = lookup_preset(name).plan
    text = RunConfig.from_plan(plan).dumps()
    assert RunConfig.loads(text).to_plan() == plan


def test_round_trip_with_edge_list(tmp_path):
    """Test edge-list topologies round-trip through their file."""
    path = tmp_path / "ring.edges"
    path.write_text("n 4\n1 2\n2 3\n3 4\n1 4\n", encoding="utf-8")
    config = RunConfig.loads(f"[system]\nedge_list = {path}\n[model]\nkind = ising\n")
    plan = config.to_plan()
    text = RunConfig.from_plan(plan, edge_list=path).dumps()
    assert RunConfig.loads(text).to_plan() == plan


def test_from_plan_needs_edge_list_for_custom_topology(tmp_path):
    """Test a non-catalog topology cannot be referenced by name."""
    path = tmp_path / "ring.edges"
    path.write_text("n 4\n1 2\n2 3\n3 4\n1 4\n", encoding="utf-8")
    plan = RunConfig.loads(f"[system]\nedge_list = {path}\n").to_plan()
    with pytest.raises(ConfigError, match="edge-list"):
        RunConfig.from_plan(plan)
