from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memfrac import (
    ConfigError,
    ConvergenceTable,
    DomainError,
    ExperimentSpec,
    ProblemSpec,
    SignedPowerLaw,
    compute_rates,
    get_preset,
    run_study,
    spatial_error,
    temporal_error,
)
from memfrac.study import PRESETS, parse_config, spec_from_config

EX1 = ProblemSpec(0.2, SignedPowerLaw(1.0, 0.1), 1.0, 1.0, "sin_pi_x", "one")


def test_rates_trivial():
    assert compute_rates([4e-3, 2e-3]) == [None, pytest.approx(1.0, abs=1e-15)]
    assert compute_rates([4e-3, 1e-3])[1] == pytest.approx(2.0, abs=1e-15)


def test_rates_of_reference_column():
    rates = compute_rates([7.1575e-3, 3.4648e-3, 1.6736e-3, 7.8534e-4])
    assert [round(r, 2) for r in rates[1:]] == [1.05, 1.05, 1.09]


@pytest.mark.parametrize("errors", [[1e-3], [1e-3, 0.0], [1e-3, -1e-4]])
def test_rates_domain(errors):
    with pytest.raises(DomainError):
        compute_rates(errors)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(1e-150, 1e10), min_size=2, max_size=8))
def test_log2_identity_and_csv_roundtrip(errors):
    table = ConvergenceTable("N", [2 ** (i + 1) for i in range(len(errors))], errors)
    for i in range(1, len(errors)):
        assert abs(table.rates[i] - math.log2(errors[i - 1] / errors[i])) <= 1e-12
    back = ConvergenceTable.from_csv(table.to_csv())
    assert back.resolutions == table.resolutions
    assert back.errors == table.errors
    assert back.rates == table.rates


def test_csv_schema():
    text = ConvergenceTable("M", [8, 16], [0.1, 0.025]).to_csv()
    assert text.splitlines() == ["M,error,rate", "8,0.1,", "16,0.025,2.0"]


def test_zero_problem_errors_vanish():
    p = ProblemSpec(0.5, SignedPowerLaw(-1.0, 0.3))
    assert temporal_error(p, 8, 4) == 0.0
    assert spatial_error(p, 4, 8) == 0.0
    assert spatial_error(replace(p, dim=2), 4, 4) == 0.0


def test_temporal_error_one_dimensional_reference_value():
    # reference rows are labelled by the finer resolution: row N holds E_tau(N/2, M)
    e128 = temporal_error(EX1, 32, 64)
    e256 = temporal_error(EX1, 32, 128)
    assert 0.5 < e256 / 3.4648e-3 < 2.0
    assert math.log2(e128 / e256) == pytest.approx(1.05, abs=0.1)
    assert e128 == pytest.approx(7.1575e-3, rel=1e-4)


def test_temporal_error_two_dimensional_reference_value():
    p = ProblemSpec(0.6, SignedPowerLaw(-1.0, 0.6), 1.0, 0.0, "zero", "one", dim=2)
    e64 = temporal_error(p, 16, 32)
    e128 = temporal_error(p, 16, 64)
    assert 0.5 < e128 / 5.4491e-2 < 2.0
    assert math.log2(e64 / e128) == pytest.approx(0.83, abs=0.15)


def test_spatial_error_one_dimensional_reference_value():
    p = ProblemSpec(0.4, SignedPowerLaw(1.0, 0.3), 1.0, 1.0, "sin_pi_x", "one")
    e64 = spatial_error(p, 256, 32)
    e128 = spatial_error(p, 256, 64)
    assert 0.5 < e128 / 3.1470e-6 < 2.0
    assert math.log2(e64 / e128) == pytest.approx(1.99, abs=0.05)


def test_spatial_error_two_dimensional_reference_value():
    p = ProblemSpec(0.2, SignedPowerLaw(-1.0, 0.1), 1.0, 0.0, "zero", "one", dim=2)
    e8 = spatial_error(p, 32, 4)
    e16 = spatial_error(p, 32, 8)
    assert 0.5 < e16 / 4.7485e-4 < 2.0
    assert math.log2(e8 / e16) == pytest.approx(2.06, abs=0.1)


def test_preset_reproduces_first_block():
    table = run_study(get_preset("example1-t-sigma02-beta01"))
    reference = [7.1575e-3, 3.4648e-3, 1.6736e-3, 7.8534e-4]
    assert table.resolutions == [128, 256, 512, 1024]
    for ours, ref in zip(table.errors, reference):
        assert 0.5 < ours / ref < 2.0
    for ours, ref in zip(table.rates[1:], [1.05, 1.05, 1.09]):
        assert ours == pytest.approx(ref, abs=0.1)


def test_preset_tempered_rates():
    table = run_study(get_preset("example2-t-sigma07-beta08"))
    for ours, ref in zip(table.rates[1:], [0.92, 0.98, 1.02]):
        assert ours == pytest.approx(ref, abs=0.15)


def test_preset_catalogue():
    assert len(PRESETS) == 36
    assert all(s.problem.kernel.beta < min(1, 2 * s.problem.sigma) for s in PRESETS.values())
    with pytest.raises(ConfigError):
        get_preset("example9-t-sigma02-beta01")


@pytest.mark.parametrize("resolutions", [(64,), (64, 100), (3, 6), ()])
def test_bad_resolution_lists(resolutions):
    spec = ExperimentSpec(EX1, "temporal", resolutions, 8)
    with pytest.raises(ConfigError):
        run_study(spec)


def test_study_writes_output(tmp_path):
    out = tmp_path / "t.md"
    spec = ExperimentSpec(EX1, "spatial", (8, 16), 8, output=str(out), format="markdown")
    table = run_study(spec)
    assert out.read_text() == table.to_markdown()
    assert out.read_text().startswith("| M | error | rate |")


CONFIG = """
# spatial study, tempered kernel
sigma = 0.4
beta = 0.3
kernel.type = tempered
kernel.tempering = 2.0
kernel.coefficient = -1
u0 = "sin_pi_x"
f = zero
study = spatial
fixed_N = 16
resolutions = 8, 16, 32   # trailing comment
format = markdown
"""


def test_config_parsing():
    spec = spec_from_config(parse_config(CONFIG))
    assert spec.study == "spatial" and spec.fixed == 16 and spec.resolutions == (8, 16, 32)
    k = spec.problem.kernel
    assert (k.coefficient, k.beta, k.tempering) == (-1.0, 0.3, 2.0)
    assert spec.problem.u0 == "sin_pi_x" and spec.format == "markdown" and spec.gamma is None


@pytest.mark.parametrize("text", [
    CONFIG + "colour = red\n",
    CONFIG + "sigma = 0.5\n",
    CONFIG + "this line has no equals\n",
    CONFIG.replace("fixed_N = 16", "fixed_M = 16"),
    CONFIG.replace("sigma = 0.4", "sigma = zero point four"),
    CONFIG.replace("resolutions = 8, 16, 32", "resolutions = 8"),
    CONFIG.replace("kernel.type = tempered", "kernel.type = gaussian"),
    CONFIG.replace("beta = 0.3", "beta = 0.9"),
    CONFIG.replace("f = zero", "f = cosh"),
    CONFIG.replace("format = markdown", "format = xml"),
    CONFIG.replace("study = spatial", ""),
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        spec_from_config(parse_config(text))
