import json

import numpy as np
import pytest

from cdut import Metric, PointSet, check_separation
from cdut.cli import main
from cdut.io import InstanceParseError, read_instance, write_instance


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestInstanceFiles:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        ps = PointSet(rng.uniform(-1e6, 1e6, size=(37, 3)))
        path = tmp_path / "inst.txt"
        write_instance(path, ps, Metric.from_name("linf"))
        loaded, tag = read_instance(path)
        assert tag == "linf"
        assert np.array_equal(loaded.points, ps.points)

    def test_field_count_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("d=2 n=2 metric=l2\n1.0,2.0\n3.0\n")
        with pytest.raises(InstanceParseError) as err:
            read_instance(path)
        assert err.value.line == 3

    def test_header_errors(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n=2\n1.0\n2.0\n")
        with pytest.raises(InstanceParseError, match="header"):
            read_instance(path)

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("d=1 n=3\n1.0\n2.0\n")
        with pytest.raises(InstanceParseError, match="promised"):
            read_instance(path)

    def test_bad_coordinate(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("d=1 n=1\nabc\n")
        with pytest.raises(InstanceParseError, match="bad coordinate"):
            read_instance(path)


class TestCompute:
    def test_orthogonal_gadget_files_give_zero(self, capsys, tmp_path):
        out = tmp_path / "gad"
        code, _, _ = run(capsys, ["gen", "ov-gadget", "--out", str(out), "--x", "10", "--y", "01"])
        assert code == 0
        code, text, _ = run(
            capsys, ["compute", "exact1d", f"{out}_a.txt", f"{out}_b.txt", "--json"]
        )
        assert code == 0
        record = json.loads(text)
        assert record["value"] == 0.0
        assert record["algorithm"] == "exact1d"

    def test_seeded_runs_reproduce_records(self, capsys, tmp_path):
        out = tmp_path / "uni"
        run(capsys, ["gen", "uniform", "--out", str(out), "--m", "12", "--n", "15", "--seed", "4"])
        records = []
        for _ in range(2):
            code, text, _ = run(
                capsys,
                ["compute", "approx-v2", f"{out}_a.txt", f"{out}_b.txt", "--seed", "7", "--json"],
            )
            assert code == 0
            record = json.loads(text)
            record.pop("wall_ms")
            records.append(record)
        assert records[0] == records[1]

    def test_localnet_recovers_planted_2d_shift(self, capsys, tmp_path):
        out = tmp_path / "copy"
        run(
            capsys,
            ["gen", "translated-copy", "--out", str(out), "--m", "10", "--dim", "2", "--seed", "6"],
        )
        meta = json.loads((tmp_path / "copy_meta.json").read_text())
        code, text, _ = run(
            capsys, ["compute", "localnet", f"{out}_a.txt", f"{out}_b.txt", "--json"]
        )
        assert code == 0
        record = json.loads(text)
        assert record["value"] == 0.0
        assert np.allclose(record["translation"], meta["shift"])

    def test_validation_failure_exits_2(self, capsys, tmp_path):
        out = tmp_path / "uni2"
        run(capsys, ["gen", "uniform", "--out", str(out), "--dim", "2", "--seed", "1"])
        code, _, err = run(
            capsys,
            ["compute", "exact-l1linf", f"{out}_a.txt", f"{out}_b.txt", "--metric", "l2"],
        )
        assert code == 2
        assert "l1/linf" in err

    def test_missing_file_exits_1(self, capsys, tmp_path):
        code, _, err = run(capsys, ["compute", "exact1d", str(tmp_path / "no.txt"), str(tmp_path / "no.txt")])
        assert code == 1
        assert "error" in err


class TestDecideCommand:
    def _gen(self, capsys, tmp_path, mode, seed=2):
        out = tmp_path / f"planted_{mode}"
        code, _, _ = run(
            capsys,
            [
                "gen",
                "separated-planted",
                "--out",
                str(out),
                "--m",
                "6",
                "--n",
                "12",
                "--dim",
                "2",
                "--mode",
                mode,
                "--radius",
                "1.0",
                "--seed",
                str(seed),
            ],
        )
        assert code == 0
        return out

    def test_yes_instance_exits_0(self, capsys, tmp_path):
        out = self._gen(capsys, tmp_path, "yes")
        code, text, _ = run(
            capsys, ["decide", f"{out}_a.txt", f"{out}_b.txt", "--radius", "1.0", "--json"]
        )
        assert code == 0
        assert json.loads(text)["answer"] == "YES"

    def test_no_instance_exits_3(self, capsys, tmp_path):
        out = self._gen(capsys, tmp_path, "no")
        code, text, _ = run(capsys, ["decide", f"{out}_a.txt", f"{out}_b.txt", "--radius", "1.0"])
        assert code == 3
        assert text.startswith("NO")

    def test_separation_violation_exits_2_with_certificate(self, capsys, tmp_path):
        a = PointSet(np.array([[0.0], [4.0]]))
        b = PointSet(np.array([[0.0], [0.5], [9.0]]))
        write_instance(tmp_path / "a.txt", a)
        write_instance(tmp_path / "b.txt", b)
        code, text, _ = run(
            capsys,
            ["decide", str(tmp_path / "a.txt"), str(tmp_path / "b.txt"), "--radius", "1.0"],
        )
        assert code == 2
        assert "SEPARATION-VIOLATED" in text
        assert "min_pairwise_b=0.5" in text


class TestGen:
    def test_uniform_is_byte_reproducible(self, capsys, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        run(capsys, ["gen", "uniform", "--out", str(out1), "--n", "100", "--dim", "3", "--seed", "1"])
        run(capsys, ["gen", "uniform", "--out", str(out2), "--n", "100", "--dim", "3", "--seed", "1"])
        assert (tmp_path / "r1_b.txt").read_bytes() == (tmp_path / "r2_b.txt").read_bytes()

    def test_gadget_files_match_library_constructions(self, capsys, tmp_path):
        from cdut import gadget_a, gadget_b

        out = tmp_path / "g"
        run(capsys, ["gen", "ov-gadget", "--out", str(out), "--x", "10", "--y", "01"])
        a, _ = read_instance(f"{out}_a.txt")
        b, _ = read_instance(f"{out}_b.txt")
        assert np.array_equal(a.points, gadget_a([1, 0]).points)
        assert np.array_equal(b.points, gadget_b([0, 1]).points)

    def test_separated_planted_honors_the_separation_bound(self, capsys, tmp_path):
        out = tmp_path / "sep"
        run(
            capsys,
            [
                "gen",
                "separated-planted",
                "--out",
                str(out),
                "--m",
                "8",
                "--n",
                "16",
                "--dim",
                "2",
                "--seed",
                "5",
            ],
        )
        b, _ = read_instance(f"{out}_b.txt")
        assert check_separation(b, c=2.0, radius=1.0, m=8).holds

    def test_combined_gadget_generation(self, capsys, tmp_path):
        out = tmp_path / "comb"
        code, _, _ = run(
            capsys,
            ["gen", "combined-gadget", "--out", str(out), "--x", "10,11", "--y", "01,01"],
        )
        assert code == 0
        a, _ = read_instance(f"{out}_a.txt")
        b, _ = read_instance(f"{out}_b.txt")
        assert a.dim == 1 and len(a) == 12


class TestBench:
    def test_table_and_ratios(self, capsys):
        code, text, _ = run(
            capsys,
            [
                "bench",
                "--algos",
                "exact1d,approx-v2,localnet",
                "--sizes",
                "15,20",
                "--reps",
                "2",
                "--epsilon",
                "0.25",
                "--json",
            ],
        )
        assert code == 0
        rows = [json.loads(line) for line in text.strip().splitlines()]
        assert len(rows) == 3 * 2 * 2
        v2_rows = [r for r in rows if r["algorithm"] == "approx-v2"]
        assert all(r["ratio"] >= 1.0 - 1e-9 for r in v2_rows)
        ln_rows = [r for r in rows if r["algorithm"] == "localnet"]
        within = sum(r["ratio"] <= 1.25 + 1e-9 for r in ln_rows)
        assert within >= 0.9 * len(ln_rows)

    def test_human_table_output(self, capsys):
        code, text, _ = run(capsys, ["bench", "--algos", "exact1d", "--sizes", "10", "--reps", "1"])
        assert code == 0
        assert "algorithm" in text and "exact1d" in text

    def test_unknown_algorithm_rejected(self, capsys):
        code, _, err = run(capsys, ["bench", "--algos", "quantum", "--sizes", "10"])
        assert code == 2
        assert "unknown algorithms" in err

    def test_over_budget_rows_do_not_kill_the_run(self, capsys):
        code, text, _ = run(
            capsys, ["bench", "--algos", "exact1d,oracle-1d", "--sizes", "20,200", "--json"]
        )
        assert code == 0
        rows = [json.loads(line) for line in text.strip().splitlines()]
        failed = [r for r in rows if r["error"]]
        assert len(failed) == 1 and failed[0]["algorithm"] == "oracle-1d"
        assert all(r["value"] is not None for r in rows if not r["error"])
