import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from musclnu.cli import main
from musclnu.config import ConfigError, RunConfig, parse_config, render, validate
from musclnu.limiters import KIND_NAMES
from musclnu.problems import PROBLEMS


def test_minimal_config_defaults():
    cfg = parse_config("problem=sod nx=200 perturb-r=0.3 limiter=van_albada flavor=enhanced")
    assert cfg.cfl == 0.6 and cfg.seed == 0 and cfg.flavor == "enhanced"
    assert cfg.nx == 200 and cfg.ny is None and cfg.perturb_r == 0.3


def test_comments_and_lines():
    cfg = parse_config("# a run\nproblem=dmr   # 2D\nnx=48 ny=12\n\nseed=3\n")
    assert (cfg.problem, cfg.nx, cfg.ny, cfg.seed) == ("dmr", 48, 12, 3)


def test_2d_defaults_fill_ny():
    assert parse_config("problem=step").dims == (150, 50)


@pytest.mark.parametrize("text, key", [
    ("problem=sod perturb-r=0.6", "perturb-r"),
    ("", "problem"),
    ("problem=sod colour=red", "colour"),
    ("problem=sod nx=ten", "nx"),
    ("problem=sod ny=10", "ny"),
    ("problem=sod cfl=1.5", "cfl"),
    ("problem=sod limiter=koren", "limiter"),
    ("problem=sod nx=10 nx=20", "nx"),
    ("problem=sod nx", "nx"),
    ("problem=nowhere", "problem"),
])
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(text)


def test_flags_override_file():
    cfg = parse_config("problem=sod nx=100 seed=1", {"seed": "9", "nx": None})
    assert cfg.seed == 9 and cfg.nx == 100


def test_limiter_shorthand():
    cfg = parse_config("problem=sod limiter=mc:conventional")
    assert (cfg.limiter, cfg.flavor) == ("mc", "conventional")
    assert parse_config("problem=sod limiter=none").spec is None


def test_entropy_fix_toggle():
    assert parse_config("problem=sod entropy-fix=off").entropy_fix == 0.0
    assert parse_config("problem=sod entropy-fix=on").entropy_fix == 0.1
    assert parse_config("problem=sod entropy-fix=0.25").entropy_fix == 0.25


configs = st.builds(
    RunConfig,
    problem=st.sampled_from(sorted(PROBLEMS)),
    nx=st.integers(2, 5000),
    perturb_r=st.floats(0.0, 0.4999),
    seed=st.integers(0, 2**63),
    limiter=st.sampled_from(sorted(KIND_NAMES) + ["none"]),
    flavor=st.sampled_from(["conventional", "enhanced"]),
    cfl=st.floats(0.01, 1.0),
    t_end=st.one_of(st.none(), st.floats(0.0, 100.0)),
    out=st.from_regex(r"[a-z][a-z0-9_/]{0,12}", fullmatch=True),
    output_times=st.lists(st.floats(0.0, 10.0), max_size=4).map(tuple),
    entropy_fix=st.floats(0.0, 1.0),
    limit_vars=st.sampled_from(["auto", "conservative", "primitive"]),
)


@given(configs)
def test_round_trip(cfg):
    cfg = validate(cfg)
    assert parse_config(render(cfg)) == cfg


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_grid_gen(capsys):
    code, out, _ = run_cli(capsys, "grid-gen", "--nx", "100", "--perturb-r", "0.3", "--seed", "1")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "face" and len(lines) == 102
    assert float(lines[1]) == 0.0 and float(lines[-1]) == 1.0


def test_cli_grid_gen_2d(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "grid-gen", "--problem", "step", "--nx", "30", "--ny", "10",
                           "--perturb-r", "0.2", "--out", str(tmp_path / "g"))
    assert code == 0 and len(list(tmp_path.iterdir())) == 2


def test_cli_error_is_json(capsys):
    code, _, err = run_cli(capsys, "run", "--problem", "sod", "--perturb-r", "0.6")
    assert code == 2
    msg = json.loads(err.strip().splitlines()[-1])
    assert msg["error"] == "ConfigError" and "perturb-r" in msg["message"]
    code, _, err = run_cli(capsys, "run")
    assert code == 2 and "problem" in json.loads(err.strip().splitlines()[-1])["message"]


def test_cli_run_writes_tree(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "run", "--problem", "sod", "--nx", "60", "--perturb-r", "0.3",
                           "--t-end", "0.2", "--output-times", "0.1", "--out", str(tmp_path))
    assert code == 0
    [run_dir] = list(tmp_path.iterdir())
    assert run_dir.name == "sod-van_albada-enhanced-n60-r0.3-s0"
    names = sorted(p.name for p in run_dir.iterdir())
    assert names == ["config.txt", "diagnostics.csv", "t0.1.csv", "t0.2.csv"]
    assert parse_config((run_dir / "config.txt").read_text()).nx == 60


def test_cli_run_from_config_file(capsys, tmp_path):
    conf = tmp_path / "c.txt"
    conf.write_text(f"problem=blast nx=50 t-end=0.002 out={tmp_path / 'runs'}\n")
    code, _, _ = run_cli(capsys, "run", "--config", str(conf), "--seed", "4")
    assert code == 0
    assert (tmp_path / "runs" / "blast-van_albada-enhanced-n50-r0-s4" / "t0.002.csv").exists()


def test_cli_non_physical_exit_code(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "--problem", "blast", "--nx", "200", "--perturb-r", "0.3",
                           "--limiter", "mc", "--limit-vars", "conservative", "--out", str(tmp_path))
    assert code == 3
    assert json.loads(err.strip().splitlines()[-1])["error"] == "NonPhysicalStateError"


def test_cli_limiter_table(capsys):
    code, out, _ = run_cli(capsys, "limiter-table", "--limiter", "van_leer", "--A", "1.2", "--B", "1.1",
                           "--thetas", "0,1.2,3")
    rows = [line.split(",") for line in out.splitlines()]
    assert code == 0 and rows[0] == ["theta", "phi", "lower", "upper"]
    assert float(rows[2][1]) == pytest.approx(1.1, rel=1e-15)


def test_cli_advect_oracle(capsys, tmp_path):
    code, _, err = run_cli(capsys, "advect-oracle", "--trials", "20", "--seed", "3",
                           "--out", str(tmp_path / "o.csv"))
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert code == 0 and len(lines) == 1 + 20 * 7
    assert lines[0].startswith("trial,seed,tv_before,tv_after,defect")
    assert "tv violations=0" in err


def test_cli_rate_study(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "rate-study", "--problem", "smooth1d", "--limiters",
                           "mc:enhanced,van_albada:conventional", "--sizes", "50,100", "--perturb-r", "0.2",
                           "--seed", "7", "--t-end", "0.1", "--fine-n", "800", "--out", str(tmp_path))
    assert code == 0
    [d] = list(tmp_path.iterdir())
    assert sorted(p.name for p in d.iterdir()) == ["errors.csv", "rates.csv", "rates.md"]
