import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from svv.cli import ConfigError, load_config, read_config_file, run
from svv.entropies import cond_vn_entropy
from svv.io import dump_matrix
from svv.linalg import BipartiteOp, random_channel, random_density
from svv.io import channel_to_json
from svv.specfact import random_trig_poly


def call(argv, env=None):
    buf = io.StringIO()
    code = run(argv, out=buf, env=env or {})
    return code, buf.getvalue()


@pytest.fixture
def product_state(tmp_path):
    rho = np.kron(random_density(2, seed=1), np.eye(2) / 2)
    path = tmp_path / "rho.json"
    dump_matrix(rho, path, dims=(2, 2))
    return path


@pytest.fixture
def random_state(tmp_path):
    path = tmp_path / "r.json"
    dump_matrix(random_density(4, seed=3), path, dims=(2, 2))
    return path


class TestCommands:
    def test_norm_product(self, product_state):
        code, out = call(["norm", "--pq", "1,2", "--input", str(product_state), "--json"])
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["value"] == pytest.approx(2 ** -0.5, abs=1e-7)
        assert res["bound_kind"] == "exact" and "tol" in res

    def test_entropy_alpha1(self, random_state):
        code, out = call(["entropy", "--alpha", "1", "--input", str(random_state), "--json"])
        assert code == 0
        ref = cond_vn_entropy(BipartiteOp(random_density(4, seed=3), (2, 2)))
        assert json.loads(out)["results"][0]["value"] == pytest.approx(ref, abs=1e-12)

    def test_bits(self, random_state):
        _, nats = call(["entropy", "--alpha", "1,2", "--input", str(random_state), "--json"])
        _, bits = call(["entropy", "--alpha", "1,2", "--input", str(random_state), "--json", "--bits"])
        for a, b in zip(json.loads(nats)["results"], json.loads(bits)["results"]):
            assert b["value"] == pytest.approx(a["value"] / math.log(2), rel=1e-12)
            assert b["unit"] == "bits"

    def test_table_output(self, random_state):
        code, out = call(["entropy", "--alpha", "2", "--input", str(random_state)])
        assert code == 0 and out.splitlines()[0].split()[0] == "alpha"

    def test_divergence_equal_states(self, tmp_path):
        p = tmp_path / "s.json"
        dump_matrix(random_density(3, seed=2), p)
        code, out = call(["divergence", "--rho", str(p), "--sigma", str(p), "--alpha", "2", "--json"])
        assert code == 0 and json.loads(out)["results"][0]["value"] == pytest.approx(0, abs=1e-10)

    def test_coherent(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps(channel_to_json(random_channel(2, 2, 2, seed=1))))
        code, out = call(["coherent", "--channel", str(p), "--alpha", "1", "--restarts", "2", "--json"])
        assert code == 0 and "value" in json.loads(out)["results"][0]

    def test_specfact(self, tmp_path):
        p = tmp_path / "t.json"
        random_trig_poly(2, 2, seed=1).dump(p)
        code, out = call(["specfact", "--input", str(p), "--out", str(tmp_path / "a.json"), "--json"])
        res = json.loads(out)["results"][0]
        assert code == 0 and res["winding"] == 0 and res["residual"] <= 1e-9
        assert (tmp_path / "a.json").exists()

    def test_specfact_not_pd_is_numeric_or_usage(self, tmp_path):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({"d": 1, "N": 1, "coeffs": {"-1": {"rows": 1, "cols": 1, "data": [[1, 0]]},
                                                              "0": {"rows": 1, "cols": 1, "data": [[1, 0]]},
                                                              "1": {"rows": 1, "cols": 1, "data": [[1, 0]]}}}))
        code, _ = call(["specfact", "--input", str(p)])
        assert code == 2

    def test_interp(self, tmp_path):
        p = tmp_path / "x.json"
        dump_matrix(np.arange(9.0).reshape(3, 3), p)
        code, out = call(["interp", "--input", str(p), "--p0", "1", "--p1", "inf", "--theta", "0.3", "--json"])
        assert code == 0 and json.loads(out)["results"][0]["pass"]

    def test_decouple(self, product_state):
        code, out = call(["decouple", "--input", str(product_state), "--dx0", "1", "--alpha", "1.5",
                          "--samples", "50", "--json"])
        assert code == 0 and json.loads(out)["results"][0]["lhs"] == pytest.approx(0, abs=1e-12)

    def test_verify_exit_and_csv(self, tmp_path):
        out_csv = tmp_path / "r.csv"
        code, out = call(["verify", "--suite", "poisson,dim_bounds", "--trials", "2", "--restarts", "2",
                          "--out", str(out_csv), "--report-json", str(tmp_path / "r.json"), "--json"])
        assert code == 0
        assert out_csv.read_text().startswith("check,seed,lhs,rhs,margin,pass\n")
        assert json.loads((tmp_path / "r.json").read_text())["config"]["trials"] == 2

    def test_verify_failure_exit(self, tmp_path, monkeypatch):
        from svv import verify
        from svv.verify import Report, Row

        monkeypatch.setitem(verify.SUITES, "poisson", lambda cfg: Report([Row("x", 0, 1.0, 0.0, 0.0)]))
        code, _ = call(["verify", "--suite", "poisson"])
        assert code == 1


class TestErrors:
    def test_missing_subcommand(self):
        assert call([])[0] == 2

    def test_missing_required_flag(self):
        assert call(["norm"])[0] == 2

    def test_bad_pq(self, product_state):
        assert call(["norm", "--pq", "1", "--input", str(product_state)])[0] == 2

    def test_missing_file(self, tmp_path):
        assert call(["norm", "--input", str(tmp_path / "none.json")])[0] == 2

    def test_unknown_suite(self):
        assert call(["verify", "--suite", "nope"])[0] == 2

    def test_p_greater_than_q(self, product_state):
        assert call(["norm", "--pq", "3,2", "--input", str(product_state)])[0] == 2


class TestConfig:
    def test_empty_file_defaults(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("")
        assert read_config_file(p) == {}
        cfg = load_config(p, {}, {})
        assert cfg.seed == 0 and cfg.trials == 20

    def test_parse_error_line(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{\n  "seed": 1,\n  "trials": ,\n}')
        with pytest.raises(ConfigError, match=r"c\.json:3:"):
            read_config_file(p)

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{"sed": 1}')
        with pytest.raises(ConfigError):
            read_config_file(p)

    def test_cli_parse_error_exit(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{bad")
        assert call(["verify", "--suite", "poisson", "--config", str(p)])[0] == 2

    @pytest.mark.parametrize("env,file,flag,expected", [
        (None, None, None, 0),
        ("5", None, None, 5),
        (None, 6, None, 6),
        ("5", 6, None, 6),
        (None, None, 7, 7),
        ("5", None, 7, 7),
        (None, 6, 7, 7),
        ("5", 6, 7, 7),
    ])
    def test_precedence_matrix(self, tmp_path, env, file, flag, expected):
        path = None
        if file is not None:
            path = tmp_path / "c.json"
            path.write_text(json.dumps({"seed": file}))
        cfg = load_config(path, {"seed": flag}, {"SVV_SEED": env} if env else {})
        assert cfg.seed == expected

    def test_mc_samples_alias(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{"mcSamples": 17}')
        assert load_config(p, {}, {}).mc_samples == 17

    def test_bad_env(self):
        with pytest.raises(ConfigError):
            load_config(None, {}, {"SVV_SEED": "x"})

    def test_threads_from_env(self):
        assert load_config(None, {}, {"SVV_THREADS": "4"}).threads == 4


class TestDeterminism:
    def test_json_byte_identical(self, random_state):
        argv = ["entropy", "--alpha", "1.5,2,inf", "--input", str(random_state), "--json", "--seed", "3"]
        assert call(argv)[1] == call(argv)[1]

    def test_envelope_keys(self, random_state):
        obj = json.loads(call(["norm", "--input", str(random_state), "--json"])[1])
        assert list(obj) == ["command", "config", "results", "version"]
        assert obj["results"][0]["q"] == "inf"

    def test_verify_threads_identical(self, tmp_path):
        outs = []
        for t in ("1", "4"):
            path = tmp_path / f"r{t}.csv"
            call(["verify", "--suite", "dim_bounds,monotone", "--trials", "4", "--restarts", "2",
                  "--out", str(path)], env={"SVV_THREADS": t})
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_module_entry_point(self, product_state):
        proc = subprocess.run([sys.executable, "-m", "svv", "norm", "--pq", "1,2", "--input", str(product_state),
                               "--json"], capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["results"][0]["value"] == pytest.approx(2 ** -0.5, abs=1e-7)
