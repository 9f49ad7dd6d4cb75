"""End-to-end runs of the console entry point via main(argv)."""
from __future__ import annotations

import json

import numpy as np

from chaoscalc.cli import main
from chaoscalc.functionals import Functional
from chaoscalc.qms import GeneratorSpec, generator_apply, matrix_from_json, matrix_to_json
from chaoscalc.weights import Weight2D

RUNNING_WEIGHT = {
    "kind": "dense",
    "entries": [[0, 1, 2.0], [1, 1, 3.0]],
    "column_sums": "from_entries",
    "tail_bound": 0.0,
}


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


class TestVerify:
    def test_default_families_pass(self, capsys):
        code, payload, err = run_cli(capsys, "verify", "--n", "4", "--seed", "5")
        assert code == 0
        assert payload["all_ok"] is True
        assert payload["counts"]["not_ok"] == 0
        assert payload["config"]["seed"] == 5
        assert "PASS" in err and "checks ok" in err

    def test_only_comma_list(self, capsys):
        code, payload, _ = run_cli(capsys, "verify", "--n", "4", "--only", "car,hop")
        assert code == 0
        families = {c["name"].split("-")[0] for c in payload["checks"]}
        assert families == {"car", "hop", "occupation"}  # occupation rides with car

    def test_unknown_family_is_config_error(self, capsys):
        code, payload, err = run_cli(capsys, "verify", "--n", "4", "--only", "bogus")
        assert code == 2 and payload is None
        assert "unknown families" in err

    def test_reports_stable_outside_timing(self, tmp_path, capsys):
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["verify", "--n", "4", "--seed", "9", "--out", str(out_a)]) == 0
        assert main(["verify", "--n", "4", "--seed", "9", "--out", str(out_b)]) == 0
        capsys.readouterr()
        a, b = json.loads(out_a.read_text()), json.loads(out_b.read_text())
        a.pop("timing"), b.pop("timing")
        assert a == b

    def test_weight_override_file(self, tmp_path, capsys):
        path = write_json(tmp_path / "w.json", RUNNING_WEIGHT)
        code, payload, _ = run_cli(
            capsys, "verify", "--n", "4", "--only", "spectral-shift", "--weight", path
        )
        assert code == 0 and payload["all_ok"]

    def test_corrupt_weight_file(self, tmp_path, capsys):
        path = tmp_path / "w.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "verify", "--weight", str(path))
        assert code == 2 and "not valid JSON" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--weight", "/no/such/file.json")
        assert code == 2 and "cannot read" in err


class TestApply:
    def test_identity_round_trip(self, tmp_path, capsys):
        phi = Functional({0b101: 1.5 + 0.5j, 0b010: -2.0}, 3)
        f_path = write_json(tmp_path / "phi.json", phi.to_json())
        e_path = write_json(tmp_path / "id.json", {"op": "identity"})
        code, payload, _ = run_cli(capsys, "apply", "--expr", e_path, "--functional", f_path)
        assert code == 0
        payload.pop("command")
        assert Functional.from_json(payload) == phi

    def test_weighted_number_on_singleton(self, tmp_path, capsys):
        f_path = write_json(
            tmp_path / "phi.json",
            {"truncation": 3, "coefficients": [[[1], 1.0, 0.0]]},
        )
        e_path = write_json(tmp_path / "expr.json", {"op": "gwn", "weight": RUNNING_WEIGHT})
        code, payload, _ = run_cli(capsys, "apply", "--expr", e_path, "--functional", f_path)
        assert code == 0
        assert payload["coefficients"] == [[[1], 5.0, 0.0]]

    def test_out_of_range_index(self, tmp_path, capsys):
        f_path = write_json(
            tmp_path / "phi.json", {"truncation": 2, "coefficients": [[[0], 1.0, 0.0]]}
        )
        e_path = write_json(tmp_path / "expr.json", {"op": "annihilate", "k": 5})
        code, _, err = run_cli(capsys, "apply", "--expr", e_path, "--functional", f_path)
        assert code == 2 and err.startswith("error:")

    def test_malformed_expression(self, tmp_path, capsys):
        f_path = write_json(
            tmp_path / "phi.json", {"truncation": 2, "coefficients": []}
        )
        e_path = write_json(tmp_path / "expr.json", {"op": "frobnicate"})
        code, _, err = run_cli(capsys, "apply", "--expr", e_path, "--functional", f_path)
        assert code == 2 and "frobnicate" in err


class TestNorms:
    def test_vacuum_and_singleton(self, tmp_path, capsys):
        f_path = write_json(
            tmp_path / "phi.json", {"truncation": 2, "coefficients": [[[], 1.0, 0.0]]}
        )
        code, payload, _ = run_cli(capsys, "norms", "--functional", f_path, "--p", "2")
        assert code == 0
        assert payload["norms"] == [{"p": 2.0, "norm": 1.0, "dual_norm": 1.0}]

        f_path = write_json(
            tmp_path / "one.json", {"truncation": 2, "coefficients": [[[1], 1.0, 0.0]]}
        )
        code, payload, _ = run_cli(
            capsys, "norms", "--functional", f_path, "--p", "0", "2"
        )
        assert code == 0
        assert payload["norms"][0] == {"p": 0.0, "norm": 1.0, "dual_norm": 1.0}
        assert payload["norms"][1] == {"p": 2.0, "norm": 4.0, "dual_norm": 0.25}

    def test_empty_functional(self, tmp_path, capsys):
        f_path = write_json(tmp_path / "zero.json", {"truncation": 3, "coefficients": []})
        code, payload, _ = run_cli(capsys, "norms", "--functional", f_path)
        assert code == 0
        assert all(row["norm"] == 0.0 and row["dual_norm"] == 0.0 for row in payload["norms"])


class TestSimulate:
    def test_exact_default_theta(self, capsys):
        code, payload, _ = run_cli(capsys, "simulate", "--n", "5")
        assert code == 0 and payload["passed"]
        assert payload["mode"] == "exact"
        assert payload["gram_deviation"] == 0.0
        assert payload["thetas"] == [0.5] * 5

    def test_theta_file_list(self, tmp_path, capsys):
        path = write_json(tmp_path / "t.json", [0.25, 1 / 3, 2 / 3, 0.9])
        code, payload, _ = run_cli(capsys, "simulate", "--theta", path, "--n", "4")
        assert code == 0 and payload["passed"]
        assert payload["gram_deviation"] <= 1e-13

    def test_theta_file_length_mismatch(self, tmp_path, capsys):
        path = write_json(tmp_path / "t.json", {"thetas": [0.25, 0.75]})
        code, _, err = run_cli(capsys, "simulate", "--theta", path, "--n", "4")
        assert code == 2 and "steps" in err

    def test_monte_carlo(self, capsys):
        code, payload, _ = run_cli(
            capsys, "simulate", "--n", "4", "--samples", "20000", "--seed", "11"
        )
        assert code == 0 and payload["passed"]
        assert payload["mode"] == "monte-carlo"
        assert payload["worst_excess_over_4se"] <= 0.0

    def test_exact_and_samples_conflict(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--exact", "--samples", "10")
        assert code == 2 and "not both" in err

    def test_invalid_theta_literal(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--theta", "1.5", "--n", "3")
        assert code == 2 and "strictly in (0, 1)" in err


class TestQms:
    def test_matches_library_call(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        w_path = write_json(tmp_path / "w.json", RUNNING_WEIGHT)
        x_path = write_json(tmp_path / "x.json", matrix_to_json(x, 3))
        code, payload, _ = run_cli(capsys, "qms", "--weight", w_path, "--x", x_path)
        assert code == 0
        got, n = matrix_from_json(payload["result"])
        assert n == 3
        want = generator_apply(GeneratorSpec(Weight2D.from_json(RUNNING_WEIGHT), 3), x)
        assert np.abs(got - want).max() < 1e-12

    def test_custom_hamiltonian(self, tmp_path, capsys):
        x = np.eye(4, dtype=complex)
        h = np.diag([0.0, 1.0, 2.0, 3.0]).astype(complex)
        w_path = write_json(tmp_path / "w.json", RUNNING_WEIGHT)
        x_path = write_json(tmp_path / "x.json", matrix_to_json(x, 2))
        h_path = write_json(tmp_path / "h.json", matrix_to_json(h, 2))
        code, payload, _ = run_cli(
            capsys, "qms", "--weight", w_path, "--x", x_path, "--hamiltonian", h_path
        )
        assert code == 0
        got, _ = matrix_from_json(payload["result"])
        assert np.abs(got).max() == 0.0  # generator kills the identity

    def test_size_conflict(self, tmp_path, capsys):
        w_path = write_json(tmp_path / "w.json", RUNNING_WEIGHT)
        x_path = write_json(tmp_path / "x.json", matrix_to_json(np.eye(4, dtype=complex), 2))
        code, _, err = run_cli(capsys, "qms", "--weight", w_path, "--x", x_path, "--n", "3")
        assert code == 2 and "conflicts" in err
