import json
from pathlib import Path

import numpy as np
import pytest

from kothe.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr().out.strip()
    return code, (json.loads(out) if out else None)


def test_norm_lp1(capsys):
    code, out = run(
        capsys, "norm", "--scenario", FIXTURES / "scenario_4132.csv", "--config", FIXTURES / "lp1.cfg"
    )
    assert code == 0
    assert out == {"schema": "1", "norm": 2.5}


def test_norm_marcinkiewicz(capsys):
    code, out = run(
        capsys,
        "norm",
        "--scenario",
        FIXTURES / "scenario_4132.csv",
        "--config",
        FIXTURES / "marcinkiewicz_sqrt.cfg",
    )
    assert code == 0
    assert out["norm"] == round(2.25 / np.sqrt(0.75), 9)


def test_norm_zero_column(capsys):
    code, out = run(
        capsys, "norm", "--scenario", FIXTURES / "scenario_zero.csv", "--config", FIXTURES / "lp2.cfg"
    )
    assert code == 0
    assert out["norm"] == 0.0


def test_dual_l2(capsys):
    code, out = run(
        capsys,
        "dual",
        "--scenario",
        FIXTURES / "scenario_l2unit.csv",
        "--config",
        FIXTURES / "lp2.cfg",
    )
    assert code == 0
    assert out["polar"] == 1.0
    assert out["closed_form"] == 1.0
    assert out["gap"] == 0.0


def test_dual_marcinkiewicz_indicator(capsys):
    code, out = run(
        capsys,
        "dual",
        "--scenario",
        FIXTURES / "scenario_indicator.csv",
        "--config",
        FIXTURES / "marcinkiewicz_sqrt.cfg",
    )
    assert code == 0
    assert out["polar"] == 0.5
    assert out["closed_form"] == 0.5
    assert out["gap"] == 0.0


def test_dual_l1_is_max(capsys):
    code, out = run(
        capsys, "dual", "--scenario", FIXTURES / "scenario_4132.csv", "--config", FIXTURES / "lp1.cfg"
    )
    assert code == 0
    assert out["polar"] == 4.0


def test_rearrange(capsys):
    code, out = run(capsys, "rearrange", "--scenario", FIXTURES / "scenario_4132.csv")
    assert code == 0
    assert out["breakpoints"] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert out["values"] == [4.0, 3.0, 2.0, 1.0]
    assert out["integrals"] == [0.0, 1.0, 1.75, 2.25, 2.5]


def test_rearrange_constant(capsys):
    code, out = run(capsys, "rearrange", "--scenario", FIXTURES / "scenario_zero.csv")
    assert code == 0
    assert out["values"] == [0.0]


def test_rearrange_two_point(capsys):
    code, out = run(capsys, "rearrange", "--scenario", FIXTURES / "scenario_twopoint.csv")
    assert code == 0
    assert out["breakpoints"] == [0.0, 0.25, 1.0]
    assert out["values"] == [2.0, 1.0]


def test_rearrange_round_trip(capsys):
    from kothe import FiniteProbSpace, Rv, quantile, quantile_integral

    code, out = run(capsys, "rearrange", "--scenario", FIXTURES / "scenario_4132.csv")
    assert code == 0
    space = FiniteProbSpace.uniform(4)
    q = quantile(space, Rv([4.0, 1.0, 3.0, 2.0]))
    for bp, integral in zip(out["breakpoints"], out["integrals"]):
        assert abs(quantile_integral(q, bp) - integral) <= 1e-12


def test_risk_avar(capsys):
    code, out = run(
        capsys,
        "risk",
        "--scenario",
        FIXTURES / "scenario_4132.csv",
        "--config",
        FIXTURES / "avar_half.cfg",
    )
    assert code == 0
    assert out["rho"] == 3.5
    assert out["norm"] == 3.5
    assert out["dual_norm"] == 2.5
    assert out["penalty_finite"] is False


def test_risk_avar_level_one_is_mean(capsys, tmp_path):
    cfg = tmp_path / "avar1.cfg"
    cfg.write_text("kind=avar\nlevel=1\n")
    code, out = run(
        capsys, "risk", "--scenario", FIXTURES / "scenario_4132.csv", "--config", cfg
    )
    assert code == 0
    assert out["rho"] == 2.5


def test_risk_entropic_constant(capsys, tmp_path):
    scenario = tmp_path / "const.csv"
    scenario.write_text("x\n3\n3\n3\n3\n")
    code, out = run(
        capsys, "risk", "--scenario", scenario, "--config", FIXTURES / "entropic_one.cfg"
    )
    assert code == 0
    assert out["rho"] == 3.0


def test_check_passes_on_builtins(capsys):
    for cfg in ("lp2.cfg", "marcinkiewicz_sqrt.cfg", "lorentz_sqrt.cfg", "luxemburg_power2.cfg"):
        code, out = run(
            capsys, "check", "--random", 8, "--seed", 7, "--config", FIXTURES / cfg
        )
        assert code == 0, (cfg, out)
        assert out["all_pass"] is True


def test_check_lp2_on_larger_random_scenario(capsys):
    code, out = run(
        capsys, "check", "--random", 50, "--seed", 7, "--config", FIXTURES / "lp2.cfg"
    )
    assert code == 0
    assert out["all_pass"] is True


def test_check_fails_on_broken_spec(capsys):
    code, out = run(
        capsys,
        "check",
        "--random",
        8,
        "--seed",
        7,
        "--config",
        FIXTURES / "broken_signed_mean.cfg",
    )
    assert code == 1
    assert out["all_pass"] is False
    witnesses = [c.get("witness") for c in out["checks"] if not c["passed"]]
    assert any(w for w in witnesses)


def test_exit_code_parse_error(capsys):
    code = main(["norm", "--scenario", "/nonexistent.csv", "--config", str(FIXTURES / "lp1.cfg")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_exit_code_config_error(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("kind=unheard_of\n")
    code = main(
        ["norm", "--scenario", str(FIXTURES / "scenario_4132.csv"), "--config", str(bad)]
    )
    assert code == 3


def test_exit_code_bad_column(capsys):
    code = main(
        [
            "norm",
            "--scenario",
            str(FIXTURES / "scenario_4132.csv"),
            "--config",
            str(FIXTURES / "lp1.cfg"),
            "--column",
            "missing",
        ]
    )
    assert code == 2


def test_exit_code_nonconvergence(capsys, monkeypatch):
    import kothe.cli as cli
    from kothe._optim import ConvergenceError

    def boom(*args, **kwargs):
        raise ConvergenceError("stalled")

    monkeypatch.setattr(cli, "polar", boom)
    code = main(
        ["dual", "--scenario", str(FIXTURES / "scenario_4132.csv"), "--config", str(FIXTURES / "lp2.cfg")]
    )
    assert code == 4


def test_random_scenario_requires_seed(capsys):
    code = main(["norm", "--random", "6", "--config", str(FIXTURES / "lp1.cfg")])
    assert code == 2


def test_prob_column_renormalization(capsys, tmp_path):
    scenario = tmp_path / "slightly_off.csv"
    # off by 1e-8: accepted with a warning, then renormalized
    scenario.write_text("prob,x\n0.25000001,4\n0.25,1\n0.25,3\n0.25,2\n")
    code = main(["norm", "--scenario", str(scenario), "--config", str(FIXTURES / "lp1.cfg")])
    captured = capsys.readouterr()
    assert code == 0
    assert "renormalizing" in captured.err
    assert json.loads(captured.out)["norm"] == pytest.approx(2.5, abs=1e-6)
    bad = tmp_path / "way_off.csv"
    bad.write_text("prob,x\n0.5,4\n0.1,1\n0.1,3\n0.1,2\n")
    code = main(["norm", "--scenario", str(bad), "--config", str(FIXTURES / "lp1.cfg")])
    assert code == 2


def test_config_round_trip(tmp_path):
    import math

    from kothe import MusielakFamily, avar, young_power
    from kothe.cli import config_text, parse_config
    from kothe.norms import GenOrliczNorm, LorentzNorm, LpNorm, LuxemburgNorm, phi_sqrt

    specs = [
        LpNorm(2.5),
        LpNorm(math.inf),
        LuxemburgNorm(MusielakFamily.constant(young_power(2), 4)),
        LorentzNorm(phi_sqrt()),
        GenOrliczNorm(young_power(2), LpNorm(1)),
        avar(0.25),
    ]
    for i, spec in enumerate(specs):
        path = tmp_path / f"cfg{i}.cfg"
        path.write_text(config_text(spec))
        tag, parsed = parse_config(path, 4)
        assert type(parsed) is type(spec)


def test_gen_orlicz_config(capsys):
    code, out = run(
        capsys,
        "norm",
        "--scenario",
        FIXTURES / "scenario_4132.csv",
        "--config",
        FIXTURES / "gen_orlicz_lorentz.cfg",
    )
    assert code == 0
    assert out["norm"] > 0.0
