import csv
import json

import numpy as np
import pytest

from horoaf import cli
from horoaf.functionals import make_report


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = cli.main([*argv, "--output", str(out)])
    return code, out


def verify_doc(tmp_path, name, *argv):
    code, out = run(tmp_path, name, "verify", *argv)
    return code, json.loads(out.read_text())


def by_name(doc):
    return {r["name"] + ("" if r.get("k") is None else f"[{r['k']}]"): r for r in doc["reports"]}


class TestVerify:
    def test_sphere(self, tmp_path):
        code, doc = verify_doc(tmp_path, "a.json", "--n", "3", "--surface", "geodesic-sphere:r=1.0", "--resolution", "64")
        assert code == 0
        reps = by_name(doc)
        assert all(r["holds"] for r in doc["reports"])
        assert abs(reps["conjecture"]["margin"]) < 1e-9
        assert {"thm2", "dLG", "thm3[0]", "GWW[1]"} <= set(reps)
        assert doc["config"]["resolution"] == 64 and doc["grid"]["n"] == 3
        assert doc["proven_failures"] == []

    def test_circle(self, tmp_path):
        code, doc = verify_doc(tmp_path, "a.json", "--n", "2", "--surface", "circle:R=0.4")
        assert code == 0
        rem = by_name(doc)["remark_n2"]
        assert rem["holds"] and rem["lhs"] == pytest.approx(1.0, abs=1e-12)
        assert rem["margin"] == pytest.approx(0.269, abs=1e-3)
        # the literal printed form fails but is never gating
        literal = by_name(doc)["remark_n2_literal"]
        assert not literal["holds"] and not literal["gating"]

    def test_certificate_violates_conjecture(self, tmp_path, certificate_run):
        code, doc = verify_doc(tmp_path, "c.json", "--surface", str(certificate_run["path"]))
        assert code == 0
        conj = by_name(doc)["conjecture"]
        assert conj["status"] == "VIOLATED" and not conj["gating"]
        assert doc["config"]["resolution"] == certificate_run["data"]["resolution"]

    def test_deterministic(self, tmp_path):
        argv = ("--n", "3", "--surface", "smoothed-simplex:default", "--resolution", "32")
        _, a = run(tmp_path, "a.json", "verify", *argv)
        _, b = run(tmp_path, "b.json", "verify", *argv)
        assert a.read_bytes() == b.read_bytes()

    def test_proven_failure_exit_code(self, tmp_path, monkeypatch):
        def broken(spec, resolution):
            return [make_report("thm2", 0.1, 0.5)], [True]

        monkeypatch.setattr(cli, "run_suite", broken)
        code, doc = verify_doc(tmp_path, "a.json", "--surface", "geodesic-sphere:r=1.0")
        assert code == cli.EXIT_VIOLATION == 2
        assert doc["proven_failures"] == ["thm2"]

    def test_conjectural_failure_does_not_fail(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "run_suite", lambda spec, res: ([make_report("conjecture", 0.9, 1.0)], [False]))
        assert verify_doc(tmp_path, "a.json", "--surface", "geodesic-sphere:r=1.0")[0] == 0

    def test_json_shape_file(self, tmp_path):
        shape = tmp_path / "shape.json"
        shape.write_text(json.dumps({"family": "ellipsoid", "n": 3, "axes": [0.4, 0.25, 0.3]}))
        code, doc = verify_doc(tmp_path, "a.json", "--surface", str(shape), "--resolution", "32")
        assert code == 0 and doc["surface"]["family"] == "ellipsoid"


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--surface", "cube:a=1"],
            ["verify", "--surface", "geodesic-sphere:r=1.0", "--resolution", "4"],
            ["flow", "--surface", "smoothed-simplex:default", "--dt", "0"],
            ["flow", "--surface", "smoothed-simplex:default", "--t-max", "-1"],
            ["search", "--budget", "10"],
            ["search", "--n", "2"],
            ["report"],
            ["report", "--inputs", "/nonexistent.json"],
            ["verify", "--surface", "/nonexistent.json"],
            ["bogus"],
            [],
        ],
    )
    def test_exit_one(self, argv, capsys):
        try:
            code = cli.main(argv)
        except SystemExit as exc:
            code = exc.code
        assert code == 1

    def test_surface_outside_ball(self, tmp_path):
        assert run(tmp_path, "a.json", "verify", "--surface", "ellipsoid:axes=1.2/0.3/0.3")[0] == 1


class TestFlow:
    def test_csv(self, tmp_path):
        code, out = run(tmp_path, "f.csv", "flow", "--surface", "smoothed-simplex:default", "--t-max", "8", "--dt", "0.05", "--resolution", "32")
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["t", "s", "area", "calI", "P", "rho_sq_integral", "min_lambda"]
        P = np.array([float(r[4]) for r in rows[1:]])
        assert len(P) == 161 and np.all(np.diff(P) < 0)

    def test_json(self, tmp_path):
        code, out = run(tmp_path, "f.json", "flow", "--surface", "geodesic-sphere:r=1.0", "--t-max", "1", "--dt", "0.5",
                        "--format", "json", "--resolution", "16")
        doc = json.loads(out.read_text())
        assert code == 0 and doc["kind"] == "flow" and doc["grid"]["resolution"] == 16
        np.testing.assert_allclose(doc["trace"]["P"], 1.0, atol=1e-9)

    def test_threads(self, tmp_path, monkeypatch):
        argv = ("flow", "--surface", "smoothed-simplex:default", "--t-max", "2", "--resolution", "24")
        monkeypatch.setenv("HOROAF_THREADS", "1")
        _, a = run(tmp_path, "a.csv", *argv)
        monkeypatch.setenv("HOROAF_THREADS", "3")
        _, b = run(tmp_path, "b.csv", *argv)
        assert a.read_bytes() == b.read_bytes()


class TestReport:
    def test_merge_idempotent(self, tmp_path):
        _, a = run(tmp_path, "a.json", "verify", "--surface", "geodesic-sphere:r=1.0", "--resolution", "16")
        _, b = run(tmp_path, "b.json", "verify", "--surface", "ellipsoid:axes=0.4/0.25/0.3", "--resolution", "16")
        assert run(tmp_path, "m1.json", "report", "--inputs", str(a), str(b))[0] == 0
        run(tmp_path, "m2.json", "report", "--inputs", str(tmp_path / "m1.json"), str(a), str(b))
        run(tmp_path, "m3.json", "report", "--inputs", str(tmp_path / "m1.json"), str(tmp_path / "m1.json"))
        m1, m2, m3 = (json.loads((tmp_path / f"m{i}.json").read_text()) for i in (1, 2, 3))
        assert m1 == m2 == m3
        summary = m1["summary"]
        assert summary["conjecture"]["count"] == 2
        assert summary["thm2"]["min_margin"] == min(by_name(json.loads(p.read_text()))["thm2"]["margin"] for p in (a, b))


class TestSearch:
    def test_certificate_file(self, certificate_run):
        d = certificate_run["data"]
        assert certificate_run["code"] == 0
        assert d["kind"] == "certificate" and d["config"]["budget"] == 400
        assert d["grid"]["resolution"] == 96 and "version" in d
