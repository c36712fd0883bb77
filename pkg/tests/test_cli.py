import json

import pytest

from tbntools.cli import (
    EXIT_BUDGET,
    EXIT_INPUT,
    EXIT_OK,
    CliError,
    env_budget,
    gen_gridgate,
    main,
    parse_configuration,
)
from tbntools.core import INF, parse_tbn
from tbntools.lpformat import write_solution
from tbntools.ipmodel import build
from tbntools.solver import solve_min

from conftest import GRID_TBN_TEXT, INTRO_TBN_TEXT


@pytest.fixture
def intro_file(tmp_path):
    path = tmp_path / "intro.tbn"
    path.write_text(INTRO_TBN_TEXT + "\n")
    return str(path)


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "grid.tbn"
    path.write_text(GRID_TBN_TEXT + "\n")
    return str(path)


class TestStableCommand:
    def test_text_output(self, intro_file, capsys):
        assert main(["stable", intro_file, "--all"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "optimum merge count: 1" in out
        assert out.count("configuration") == 1
        assert "m1 + m2" in out

    def test_json_report_roundtrips(self, intro_file, capsys):
        assert main(["stable", intro_file, "--format", "json"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["schema"] == "tbn-report/1"
        assert report["results"]["optimum"] == 1
        assert json.loads(json.dumps(report)) == report

    def test_nonexistent_file(self, tmp_path, capsys):
        code = main(["stable", str(tmp_path / "nope.tbn")])
        assert code == EXIT_INPUT

    def test_syntax_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.tbn"
        bad.write_text("m1: a b, nonsense\n")
        assert main(["stable", str(bad)]) == EXIT_INPUT

    def test_timeout_partial_report(self, tmp_path, capsys):
        from conftest import TRANSLATOR_TBN_TEXT

        path = tmp_path / "translator.tbn"
        path.write_text(TRANSLATOR_TBN_TEXT + "\n")
        code = main(["stable", str(path), "--timeout", "0.0000001"])
        assert code == EXIT_BUDGET
        assert "budget exhausted" in capsys.readouterr().out

    def test_solution_import(self, intro_file, tmp_path, capsys):
        t = parse_tbn(INTRO_TBN_TEXT)
        model = build(t, 1)
        assignment = solve_min(model.program).assignment
        sol = tmp_path / "intro.sol"
        sol.write_text(write_solution(assignment))
        code = main(["stable", intro_file, "--solution", str(sol),
                     "--bound", "1"])
        assert code == EXIT_OK
        assert "objective 1" in capsys.readouterr().out

    def test_bad_solution_rejected(self, intro_file, tmp_path, capsys):
        sol = tmp_path / "zero.sol"
        sol.write_text("")  # all-zero assignment drops monomer m1
        code = main(["stable", intro_file, "--solution", str(sol),
                     "--bound", "1"])
        assert code == EXIT_INPUT


class TestBasisCommand:
    def test_grid(self, grid_file, capsys):
        assert main(["basis", grid_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("6 basis elements")

    def test_single_monomer(self, tmp_path, capsys):
        path = tmp_path / "one.tbn"
        path.write_text("m: a\n")
        assert main(["basis", str(path)]) == EXIT_OK
        assert capsys.readouterr().out.startswith("1 basis element")


class TestVerifyCommand:
    def run_verify(self, intro_file, tmp_path, capsys, config_text):
        cfg = tmp_path / "config.txt"
        cfg.write_text(config_text)
        assert main(["verify", intro_file, str(cfg)]) == EXIT_OK
        out = capsys.readouterr().out
        return {
            line.split(":")[0]: line.split()[-1]
            for line in out.splitlines()
            if ":" in line
        }

    def test_stable_configuration(self, intro_file, tmp_path, capsys):
        verdicts = self.run_verify(
            intro_file, tmp_path, capsys, "m1 + m2\n...\n"
        )
        assert verdicts == {
            "valid": "true",
            "saturated": "true",
            "locally_stable": "true",
            "stable": "true",
        }

    def test_saturated_but_not_stable(self, intro_file, tmp_path, capsys):
        # two merges where one suffices
        verdicts = self.run_verify(
            intro_file, tmp_path, capsys, "m1 + m2 + m3\n...\n"
        )
        assert verdicts["valid"] == "true"
        assert verdicts["saturated"] == "true"
        assert verdicts["stable"] == "false"

    def test_all_singletons_not_saturated(
        self, intro_file, tmp_path, capsys
    ):
        verdicts = self.run_verify(
            intro_file, tmp_path, capsys, "m1\nm2\nm3\nm4\n"
        )
        assert verdicts["valid"] == "true"
        assert verdicts["saturated"] == "false"

    def test_overuse_invalid(self, intro_file, tmp_path, capsys):
        verdicts = self.run_verify(
            intro_file, tmp_path, capsys, "m1 + m2\nm1 + m2\n"
        )
        assert verdicts["valid"] == "false"

    def test_indices_accepted(self, intro_file, tmp_path, capsys):
        t = parse_tbn(INTRO_TBN_TEXT)
        i1 = t.monomer_by_label("m1") + 1
        i2 = t.monomer_by_label("m2") + 1
        verdicts = self.run_verify(
            intro_file, tmp_path, capsys, f"{i1} + {i2}\n...\n"
        )
        assert verdicts["stable"] == "true"


class TestPathwayCommand:
    def test_swap(self, tmp_path, capsys):
        tbn = tmp_path / "swap.tbn"
        tbn.write_text("x: a*\ny: a\nz: a b\n")
        src = tmp_path / "from.cfg"
        src.write_text("x + y\nz\n")
        dst = tmp_path / "to.cfg"
        dst.write_text("x + z\ny\n")
        code = main([
            "pathway", str(tbn), "--from", str(src), "--to", str(dst),
        ])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "barrier 1" in out

    def test_barrier_zero_blocks(self, tmp_path, capsys):
        tbn = tmp_path / "swap.tbn"
        tbn.write_text("x: a*\ny: a\nz: a b\n")
        src = tmp_path / "from.cfg"
        src.write_text("x + y\nz\n")
        dst = tmp_path / "to.cfg"
        dst.write_text("x + z\ny\n")
        code = main([
            "pathway", str(tbn), "--from", str(src), "--to", str(dst),
            "--max-barrier", "0",
        ])
        assert code == EXIT_OK
        assert "no pathway" in capsys.readouterr().out


class TestGridgateGenerator:
    def test_shape_invariants(self):
        for n in (1, 2, 3):
            for literal in (False, True):
                t = gen_gridgate(n, 2, caption_literal=literal)
                if n == 1 and not literal:
                    # H1 and V1 coincide at n=1; the types merge
                    assert t.n_types == 2
                else:
                    assert t.n_types == 2 * n + 1
                starred = sum(
                    mon.starred_site_count * count
                    for mon, count in zip(t.monomer_types, t.counts)
                )
                assert starred == n * n

    def test_n2_fuel2(self):
        t = gen_gridgate(2, 2)
        gate = t.monomer_types[0]
        assert gate.starred_site_count == 4
        assert sum(1 for c in t.counts if c == 2) == 4

    def test_smallest_instance(self):
        t = gen_gridgate(1, 1)
        # H1 = V1 = {x1_1}, merged into a single fuel type of count 2
        assert t.n_types == 2
        assert t.counts == (1, 2)
        literal = gen_gridgate(1, 1, caption_literal=True)
        assert literal.n_types == 3

    def test_infinite_fuel(self):
        t = gen_gridgate(3, INF)
        assert sum(1 for c in t.counts if c is INF) == 6

    def test_caption_literal_duplicates_sites(self):
        plain = gen_gridgate(2, 2)
        literal = gen_gridgate(2, 2, caption_literal=True)
        v_sites_plain = sorted(
            len(m.sites) for m in plain.monomer_types
            if m.label and m.label.startswith("V")
        )
        v_sites_literal = sorted(
            len(m.sites) for m in literal.monomer_types
            if m.label and m.label.startswith("V")
        )
        assert v_sites_plain == [2, 2]
        assert v_sites_literal == [3, 4]  # extra copies from the diagonal

    def test_rejects_n_zero(self):
        with pytest.raises(CliError):
            gen_gridgate(0, 1)


class TestBenchCommand:
    def test_csv_columns(self, capsys):
        code = main(["bench", "--n-range", "1:1", "--fuel-range", "2"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "family,n,fuel,status,optimum,nodes,millis"
        assert lines[1].startswith("gridgate,1,2,ok,1,")

    def test_infinite_fuel_row(self, capsys):
        code = main(["bench", "--n-range", "1:1", "--fuel-range", "inf"])
        assert code == EXIT_OK
        assert "gridgate,1,inf,ok" in capsys.readouterr().out

    def test_timeout_rows(self, capsys):
        code = main([
            "bench", "--n-range", "2:2", "--fuel-range", "2",
            "--timeout", "0.0000001",
        ])
        assert code == EXIT_BUDGET
        assert ",timeout," in capsys.readouterr().out

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        code = main([
            "bench", "--n-range", "1:1", "--fuel-range", "2",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        assert out.read_text().startswith("family,n,fuel")


class TestExportLp:
    def test_stdout(self, intro_file, capsys):
        assert main(["export-lp", intro_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("Minimize")
        assert "C_m0_p1" in out

    def test_to_file(self, intro_file, tmp_path):
        target = tmp_path / "model.lp"
        code = main(["export-lp", intro_file, "-o", str(target)])
        assert code == EXIT_OK
        assert target.read_text().rstrip().endswith("End")


class TestConfigurationParsing:
    def test_labels_and_remainder(self):
        t = parse_tbn(INTRO_TBN_TEXT)
        polymers, remainder = parse_configuration("m1 + m2\n...\n", t)
        assert remainder
        assert len(polymers) == 1
        assert polymers[0].size == 2

    def test_unknown_label(self):
        t = parse_tbn(INTRO_TBN_TEXT)
        with pytest.raises(Exception):
            parse_configuration("m1 + nope\n", t)


class TestEnvironmentBudget:
    def test_overrides(self, monkeypatch):
        monkeypatch.setenv("TBN_MAX_NODES", "123")
        monkeypatch.setenv("TBN_MAX_SECONDS", "4.5")
        budget = env_budget()
        assert budget.max_nodes == 123
        assert budget.max_time == 4.5

    def test_timeout_argument_wins(self, monkeypatch):
        monkeypatch.setenv("TBN_MAX_SECONDS", "4.5")
        assert env_budget(timeout=9.0).max_time == 9.0

    def test_env_limits_whole_run(self, intro_file, monkeypatch, capsys):
        monkeypatch.setenv("TBN_MAX_SECONDS", "0.0000001")
        assert main(["stable", intro_file]) == EXIT_BUDGET
