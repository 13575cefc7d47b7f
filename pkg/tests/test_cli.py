import io
import json
import math
import os
import re
import subprocess
import sys

from hypothesis import given
from hypothesis import strategies as st

from lozihom.cli import (
    EXIT_COMPUTE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    fmt_csv,
    main,
    read_config,
    read_csv,
    write_csv,
)
from lozihom.svg import DEFAULT_VIEWPORT, STABLE_COLOR, UNSTABLE_COLOR


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_round_trip(x):
    assert float(fmt_csv(x)) == x


def test_csv_format():
    assert fmt_csv(0.1) == "0.10000000000000001"
    assert fmt_csv(True) == "1" and fmt_csv(None) == "" and fmt_csv(3) == "3"
    meta, rows = read_csv(write_csv(["x", "y"], [(1.0, 2.5)], {"k": "v"}))
    assert meta == {"k": "v"} and rows == [{"x": "1", "y": "2.5"}]


class TestUsage:
    def test_no_command(self):
        assert run()[0] == EXIT_USAGE

    def test_unknown_flag(self):
        code, _, err = run("manifold", "--a", "1.4", "--b", "0.3", "--bogus")
        assert code == EXIT_USAGE and "usage error" in err

    def test_bad_format(self):
        assert run("homoclinic", "--a", "1.7", "--b", "0.5", "--format", "csv")[0] == EXIT_USAGE

    def test_missing_params(self):
        assert run("manifold")[0] == EXIT_USAGE

    def test_outside_region(self):
        assert run("manifold", "--a", "0.2", "--b", "0.3")[0] == EXIT_USAGE

    def test_bad_numbers(self):
        assert run("manifold", "--a", "x", "--b", "0.3")[0] == EXIT_USAGE
        assert run("manifold", "--a", "1.4", "--b", "0.3", "--tol", "-1")[0] == EXIT_USAGE
        assert run("scan", "--grid", "4by4")[0] == EXIT_USAGE

    def test_unknown_curve(self):
        assert run("trace", "--curve", "C9")[0] == EXIT_USAGE

    def test_version(self, capsys):
        assert run("--version")[0] == EXIT_OK

    def test_console_script(self):
        r = subprocess.run([sys.executable, "-m", "lozihom.cli", "manifold", "--depth", "0"], capture_output=True)
        assert r.returncode == EXIT_USAGE


class TestConfig:
    def test_precedence(self, tmp_path):
        cfg = tmp_path / "run.conf"
        cfg.write_text("# comment\na = 1.7\nb = 0.5\ndepth = 3\nformat = json\n")
        code, out, _ = run("manifold", "--config", str(cfg), "--depth", "2")
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["meta"]["a"] == 1.7 and doc["meta"]["depth"] == 2

    def test_flag_before_command(self, tmp_path):
        cfg = tmp_path / "run.conf"
        cfg.write_text("a=1.7\nb=0.5\n")
        code, out, _ = run("--config", str(cfg), "--format", "json", "manifold", "--depth", "2")
        assert code == EXIT_OK and json.loads(out)["meta"]["b"] == 0.5

    def test_bad_lines(self, tmp_path):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("colour = red\n")
        assert run("manifold", "--config", str(cfg))[0] == EXIT_USAGE
        cfg.write_text("just words\n")
        assert run("manifold", "--config", str(cfg))[0] == EXIT_USAGE
        assert run("manifold", "--config", str(tmp_path / "missing.conf"))[0] == EXIT_USAGE

    def test_dash_keys(self, tmp_path):
        cfg = tmp_path / "c.conf"
        cfg.write_text("--max-vertices = 100\n")
        assert read_config(str(cfg)) == {"max_vertices": "100"}


class TestManifold:
    def test_csv_files(self, tmp_path):
        stem = str(tmp_path / "fig")
        code, out, _ = run("manifold", "--a", "1.46", "--b", "0.86", "--depth", "4", "--out", stem)
        assert code == EXIT_OK and out == ""
        for part in ("stable", "unstable"):
            with open(f"{stem}_{part}.csv") as fh:
                meta, rows = read_csv(fh.read())
            assert list(rows[0]) == ["x", "y", "label", "breakpoint"]
            assert meta["arc"] == part and meta["truncated"] == "False"
            labels = [r["label"] for r in rows if r["label"]]
            assert "X" in labels
        assert {r["breakpoint"] for r in rows} <= {"0", "1"}

    def test_csv_values_round_trip(self, tmp_path):
        from lozihom.core import Params
        from lozihom.manifolds import unstable_arc

        stem = str(tmp_path / "m")
        run("manifold", "--a", "1.46", "--b", "0.86", "--depth", "4", "--out", stem + ".csv")
        with open(stem + "_unstable.csv") as fh:
            _, rows = read_csv(fh.read())
        v = unstable_arc(Params(1.46, 0.86), 2).line.vertices
        assert [(float(r["x"]), float(r["y"])) for r in rows] == [tuple(p) for p in v.tolist()]

    def test_truncation_metadata(self):
        code, out, _ = run("manifold", "--a", "1.46", "--b", "0.86", "--depth", "40",
                           "--max-vertices", "50", "--format", "json")
        meta = json.loads(out)["meta"]
        assert code == EXIT_OK and meta["truncated"] and meta["requested_depth"] == 40 and meta["depth"] < 40

    def test_svg(self):
        code, out, _ = run("manifold", "--a", "1.46", "--b", "0.86", "--depth", "4", "--format", "svg")
        assert code == EXIT_OK
        assert f'stroke="{STABLE_COLOR}"' in out and f'stroke="{UNSTABLE_COLOR}"' in out
        assert 'class="stable"' in out and 'class="unstable"' in out
        w, h = (int(x) for x in re.search(r'width="(\d+)" height="(\d+)"', out).groups())
        xmin, xmax, ymin, ymax = DEFAULT_VIEWPORT
        assert h == math.ceil((ymax - ymin) * w / (xmax - xmin))
        # the x-axis sits at y = 0, which is 6.5 units below the top edge
        y0 = 6.5 * w / 18.0
        assert re.search(rf'points="0,{y0:.3f}'.rstrip("0").rstrip(".") + " ", out)

    def test_deterministic(self, tmp_path):
        outs = []
        for k in range(2):
            stem = str(tmp_path / f"run{k}")
            run("manifold", "--a", "1.7", "--b", "0.5", "--depth", "5", "--out", stem)
            with open(stem + "_stable.csv", "rb") as fh:
                outs.append(fh.read())
        assert outs[0] == outs[1]
        assert run("manifold", "--a", "1.7", "--b", "0.5", "--format", "svg") == run(
            "manifold", "--a", "1.7", "--b", "0.5", "--format", "svg")


class TestHomoclinic:
    def test_json(self):
        code, out, _ = run("homoclinic", "--a", "1.7", "--b", "0.5", "--depth", "4")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["fundamental"]["has_homoclinic"]
        assert doc["tangency"]["n_transversal"] > 0 and doc["quoted"] is None

    def test_empty(self):
        doc = json.loads(run("homoclinic", "--a", "0.95", "--b", "0.5")[1])
        assert doc["fundamental"]["records"] == []

    def test_on_curve(self):
        code, out, _ = run("homoclinic", "--a", "1.46", "--b", "0.332873", "--on-curve", "c1")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["quoted"]["b"] == 0.332873
        assert abs(doc["b"] - 0.332873) <= 5e-7
        assert doc["tangency"]["n_transversal"] == 0 and doc["tangency"]["n_other"] == 0

    def test_on_curve_too_far(self):
        assert run("homoclinic", "--a", "1.46", "--b", "0.3", "--on-curve", "C1")[0] == EXIT_COMPUTE


class TestTrace:
    def test_csv(self):
        code, out, _ = run("trace", "--curve", "C1", "--samples", "20")
        meta, rows = read_csv(out)
        assert code == EXIT_OK and list(rows[0]) == ["a", "b", "residual", "table1_residual"]
        assert len(rows) == 20 and meta["condition"] == "ZIterOnStableSeg(1)"
        assert max(abs(float(r["residual"])) for r in rows) < 1e-10

    def test_range(self):
        code, out, _ = run("trace", "--curve", "C1", "--b-from", "0.3", "--b-to", "0.35", "--step", "0.01")
        _, rows = read_csv(out)
        assert code == EXIT_OK and [round(float(r["b"]), 12) for r in rows] == [0.3, 0.31, 0.32, 0.33, 0.34, 0.35]

    def test_wrong_sweep(self):
        assert run("trace", "--curve", "C1", "--a-from", "1.4")[0] == EXIT_USAGE

    def test_no_curve_there(self):
        assert run("trace", "--curve", "C1", "--b-from", "0.9", "--b-to", "0.95")[0] == EXIT_COMPUTE


class TestEndpoints:
    def test_all(self):
        code, out, _ = run("endpoints")
        _, rows = read_csv(out)
        assert code == EXIT_OK
        assert list(rows[0]) == ["curve", "a_n", "b_n", "abs_da", "abs_db", "status"]
        assert [r["curve"] for r in rows] == ["C1", "C2", "C3", "C4", "C5", "C6"]
        assert all(r["status"] == "ok" and float(r["abs_da"]) < 1e-6 for r in rows)

    def test_subset_json(self):
        code, out, _ = run("endpoints", "--curves", "C2,C5", "--format", "json")
        assert code == EXIT_OK and [r["curve"] for r in json.loads(out)["rows"]] == ["C2", "C5"]

    def test_bad_list(self):
        assert run("endpoints", "--curves", "C1..C9")[0] == EXIT_USAGE

    def test_mismatch_exit(self, monkeypatch):
        import lozihom.cli as cli

        monkeypatch.setattr(cli, "ENDPOINT_MATCH", 1e-15)
        assert run("endpoints", "--curves", "C1")[0] == EXIT_VERIFY


class TestScan:
    ARGS = ("scan", "--a-range", "1.2,1.7", "--b-range", "0.3,0.5", "--grid", "3x2", "--depth", "6")

    def test_csv(self):
        code, out, _ = run(*self.ARGS)
        meta, rows = read_csv(out)
        assert code == EXIT_OK and len(rows) == 6 and meta["unknown_cells"] == "0"
        assert rows[-1] == {"a": "1.7", "b": "0.5", "homoclinic": "1"}
        assert rows[0]["homoclinic"] == "0"

    def test_svg_side_file(self, tmp_path):
        svg = tmp_path / "scan.svg"
        code, out, _ = run(*self.ARGS, "--svg", str(svg), "--overlay")
        text = svg.read_text()
        assert code == EXIT_OK and out.startswith("# depth=6")
        assert text.count("<rect") == 7 and 'class="C1"' in text

    def test_svg_stdout(self):
        code, out, _ = run(*self.ARGS, "--format", "svg")
        assert code == EXIT_OK and out.startswith("<?xml")

    def test_outside_region(self):
        assert run("scan", "--a-range", "0.1,0.2", "--b-range", "0.1,0.2")[0] == EXIT_USAGE

    def test_unknown_cells_exit(self, monkeypatch):
        import lozihom.boundary as bd
        from lozihom.errors import TruncationError

        def boom(*a, **k):
            raise TruncationError("budget", completed_depth=0)

        monkeypatch.setattr(bd, "has_homoclinic", boom)
        code, out, _ = run(*self.ARGS)
        assert code == EXIT_COMPUTE and "unknown" in out


class TestVerifyTables:
    def test_table2(self):
        code, out, _ = run("verify-tables", "--table", "2")
        lines = out.splitlines()
        assert code == EXIT_OK and lines[-1] == "6/6 checks passed"
        assert all(ln.startswith("PASS") for ln in lines[:-1])

    def test_table1_reports_failures(self):
        code, out, _ = run("verify-tables", "--table", "1", "--samples", "20", "--format", "json")
        doc = json.loads(out)
        assert code == EXIT_VERIFY and not doc["pass"]
        failed = {r["check"] for r in doc["results"] if not r["pass"]}
        assert failed == {"table1 C2", "table1 C4", "table1 C6"}

    def test_bad_table(self):
        assert run("verify-tables", "--table", "3")[0] == EXIT_USAGE


def test_out_file_and_stdout_agree(tmp_path):
    p = tmp_path / "sub" / "e.csv"
    code, _, _ = run("endpoints", "--curves", "C1", "--out", str(p))
    assert code == EXIT_OK and p.read_text() == run("endpoints", "--curves", "C1")[1]
    assert os.path.isdir(tmp_path / "sub")
