import io
import json
import math
from contextlib import redirect_stderr, redirect_stdout

import pytest

from ccsp.cli import main


def run(args, stdin_text=None):
    import sys

    out, err = io.StringIO(), io.StringIO()
    old_stdin = sys.stdin
    if stdin_text is not None:
        sys.stdin = io.StringIO(stdin_text)
    try:
        with redirect_stdout(out), redirect_stderr(err):
            code = main(args)
    finally:
        sys.stdin = old_stdin
    return code, out.getvalue(), err.getvalue()


# -- catalog --------------------------------------------------------------


def test_catalog_all():
    code, out, _ = run(["catalog"])
    assert code == 0
    assert "FLAT_CSV" in out and "SPH_TRIVIAL" in out


def test_catalog_hyperbolic_finite_mass():
    code, out, _ = run(["catalog", "--regime", "hyperbolic", "--finite-mass", "--format", "json"])
    assert code == 0
    ids = [s["id"] for s in json.loads(out)]
    assert "HYP_U1" in ids
    assert all(s["mass"] is not None for s in json.loads(out))


def test_catalog_dim_six():
    code, out, _ = run(["catalog", "--dim", "6", "--format", "json"])
    ids = [s["id"] for s in json.loads(out)]
    assert "FLAT_CSV" in ids and "FLAT_SINGULAR_D6" in ids


def test_catalog_unknown_flag_is_usage_error():
    code, _, _ = run(["catalog", "--no-such-filter"])
    assert code == 2


# -- derive ---------------------------------------------------------------


def test_derive_flat_homogeneous():
    code, out, _ = run(
        ["derive", "--family", "flat-c", "--mode", "homogeneous", "-n", "-8..-1", "-D", "1..12"]
    )
    assert code == 0
    hits = json.loads(out)
    assert len(hits) == 1
    assert hits[0]["n"] == -4 and hits[0]["dim"] == 6
    assert hits[0]["amp_sq"] == "A^2 = 576/(-alpha)"


def test_derive_curved_s_two_hits():
    code, out, _ = run(
        ["derive", "--family", "curved-s", "--regime", "hyperbolic", "--mode", "homogeneous",
         "-n", "-8..-1", "-D", "1..12"]
    )
    hits = json.loads(out)
    assert [(h["n"], h["dim"]) for h in hits] == [(-2, 3), (-1, 4)]


def test_derive_background_includes_sech():
    code, out, _ = run(
        ["derive", "--family", "curved-c", "--regime", "hyperbolic", "--mode", "background",
         "-n", "-1..-1", "-D", "1..6"]
    )
    hits = json.loads(out)
    assert (min(h["dim"] for h in hits), max(h["dim"] for h in hits)) == (1, 6)
    d1 = [h for h in hits if h["dim"] == 1][0]
    assert d1["alpha_sign"] == "repulsive"


def test_derive_empty_is_success():
    code, out, _ = run(["derive", "--family", "flat-c", "--mode", "homogeneous", "-n", "-1..-1", "-D", "3..3"])
    assert code == 0
    assert json.loads(out) == []


def test_derive_invalid_combination():
    code, _, err = run(["derive", "--family", "flat-c", "--regime", "hyperbolic", "-n", "-4..-4", "-D", "6..6"])
    assert code == 2


# -- verify ---------------------------------------------------------------


def test_verify_catalog_entry():
    code, out, _ = run(["verify", "FLAT_CSV", "--alpha", "-1"])
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] is True
    assert rep["schrodinger_residual_max"] <= 1e-6
    assert rep["poisson_residual_max"] <= 1e-6


def test_verify_hyperbolic_entry():
    code, out, _ = run(["verify", "HYP_U1", "--kappa", "-1", "--alpha", "-1"])
    assert code == 0 and json.loads(out)["passed"]


def test_verify_sign_incompatible_is_domain_error():
    code, _, err = run(["verify", "FLAT_CSV", "--alpha", "+1"])
    assert code == 2
    assert "attractive" in err


def test_verify_unknown_id():
    code, _, _ = run(["verify", "NO_SUCH_ID"])
    assert code == 2


def test_derive_pipe_to_verify():
    # every hit from the default boxes must verify
    _, out, _ = run(
        ["derive", "--family", "curved-s", "--regime", "hyperbolic", "--mode", "homogeneous",
         "-n", "-8..-1", "-D", "1..12"]
    )
    code, out2, err = run(["verify", "--hit-file", "-", "--kappa", "-1"], stdin_text=out)
    assert code == 0, err
    reports = json.loads(out2)
    assert len(reports) == 2 and all(r["passed"] for r in reports)


# -- mass / pohozaev ---------------------------------------------------------


def test_mass_value():
    code, out, _ = run(["mass", "HYP_U1", "--kappa", "-1", "--alpha", "-1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["mass"] == pytest.approx(48 * math.pi, rel=1e-9)
    assert payload["divergent"] is None


def test_mass_divergent_is_success():
    code, out, _ = run(["mass", "HYP_U2", "--kappa", "-1", "--alpha", "-1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["mass"] is None and payload["divergent"] == "small-r"


def test_mass_radial_only():
    code, out, _ = run(["mass", "SPH_U3", "--kappa", "1", "--alpha", "1", "--radial-only"])
    payload = json.loads(out)
    assert payload["mass"] == pytest.approx(4.0, rel=1e-9)


def test_mass_r_flag_sets_curvature():
    code, out, _ = run(["mass", "BG_1D_SECH", "--R", "1", "--alpha", "1"])
    payload = json.loads(out)
    assert payload["kappa"] == -1.0
    assert payload["mass"] == pytest.approx(16.0, rel=1e-8)


def test_pohozaev_defect():
    code, out, _ = run(["pohozaev", "FLAT_CSV", "--alpha", "-1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["defect"] <= 1e-6
    assert payload["T"] == pytest.approx(payload["Q"], rel=1e-6)


# -- eval ----------------------------------------------------------------------


def test_eval_profile():
    code, out, _ = run(["eval", "FLAT_CSV", "--alpha", "-1", "--r", "0:10:101"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "r,u,V,rho"
    assert len(lines) == 102
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(24.0)


def test_eval_curved_center_amplitude():
    code, out, _ = run(["eval", "HYP_U1", "--kappa", "-1", "--alpha", "-1", "--r", "0:5:51"])
    first = out.strip().splitlines()[1].split(",")
    assert float(first[1]) == pytest.approx(6.0)


def test_eval_grid_crossing_pole_is_rejected():
    code, _, err = run(["eval", "SPH_U1", "--kappa", "1", "--alpha", "-1", "--r", "0:3.14159:100"])
    assert code == 2
    assert "singular" in err and "1.5708" in err


def test_eval_json_round_trip():
    code, out, _ = run(["eval", "FLAT_CSV", "--alpha", "-1", "--r", "1:2:3", "--format", "json"])
    payload = json.loads(out)
    assert payload["columns"] == ["r", "u", "V", "rho"]
    assert len(payload["rows"]) == 3


# -- output stability -------------------------------------------------------------


def test_json_outputs_reserialize_identically():
    for args in (
        ["catalog", "--format", "json"],
        ["derive", "--family", "flat-c", "-n", "-8..-1", "-D", "1..12"],
        ["mass", "HYP_U1", "--kappa", "-1", "--alpha", "-1"],
    ):
        _, out, _ = run(args)
        parsed = json.loads(out)
        _, out2, _ = run(args)
        assert out == out2
        assert json.loads(out2) == parsed
