from __future__ import annotations

import json

import pytest

from persymrank.cli import main
from persymrank.enumeration import RankDistribution, store_cached


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestEnumerateCommand:
    def test_json_counts_are_decimal_strings(self, capsys):
        code, out = run_cli(capsys, "enumerate", "--n", "2", "--k", "4")
        assert code == 0
        doc = json.loads(out)
        assert doc["distribution"]["counts"] == ["1", "9", "126", "504", "384"]
        assert doc["distribution"]["total"] == str(2**10)
        assert doc["config"]["subcommand"] == "enumerate"

    def test_identical_config_byte_identical_output(self, capsys):
        _, first = run_cli(capsys, "enumerate", "--n", "2", "--k", "3", "--workers", "2")
        _, second = run_cli(capsys, "enumerate", "--n", "2", "--k", "3", "--workers", "2")
        assert first == second

    def test_cache_hit_keeps_output_identical(self, capsys, tmp_path):
        args = ("enumerate", "--n", "2", "--k", "3", "--cache-dir", str(tmp_path))
        _, first = run_cli(capsys, *args)
        assert (tmp_path / "exact_n2_k3_v0.1.0.json").exists()
        _, second = run_cli(capsys, *args)
        assert first == second

    def test_sampled_mode_echoes_seed(self, capsys):
        code, out = run_cli(capsys, "enumerate", "--n", "1", "--k", "2",
                            "--samples", "500", "--seed", "11")
        doc = json.loads(out)
        assert doc["distribution"]["method"] == "sampled"
        assert doc["distribution"]["sample_meta"] == {"samples": 500, "seed": 11}
        assert len(doc["distribution"]["frequencies"]) == 3
        assert len(doc["distribution"]["standard_errors"]) == 3

    def test_csv_format(self, capsys):
        _, out = run_cli(capsys, "enumerate", "--n", "1", "--k", "2", "--format", "csv")
        assert out.splitlines() == ["rank,count", "0,1", "1,3", "2,4"]

    def test_cap_violation_is_a_clean_error(self, capsys):
        code = main(["enumerate", "--n", "6", "--k", "5"])
        assert code == 2
        err = capsys.readouterr().err
        assert "36-bit" in err

    def test_env_var_supplies_cache_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("PERSYMRANK_CACHE", str(tmp_path))
        run_cli(capsys, "enumerate", "--n", "1", "--k", "3")
        assert (tmp_path / "exact_n1_k3_v0.1.0.json").exists()


class TestEvalCommand:
    def test_n6_k6_in_range_rows(self, capsys):
        code, out = run_cli(capsys, "eval", "--family", "n6", "--k", "6")
        rows = json.loads(out)["rows"]
        values = {r["i"]: r["value"] for r in rows}
        assert values == {
            0: "1", 1: "189", 2: "35154", 3: "5155920",
            4: "645271200", 5: str(256536315 * 2**8),
        }

    def test_below_validity_flagged(self, capsys):
        _, out = run_cli(capsys, "eval", "--family", "n6", "--k", "6",
                         "--allow-below-validity")
        rows = json.loads(out)["rows"]
        by_i = {r["i"]: r for r in rows}
        assert by_i[6]["value"] == str(2**14 * 264387375)
        assert by_i[6]["in_range"] is False
        assert by_i[12]["value"] == "0"

    def test_k_range_and_single_rank(self, capsys):
        _, out = run_cli(capsys, "eval", "--family", "n2", "--i", "4",
                         "--k", "4", "--k-max", "6")
        rows = json.loads(out)["rows"]
        assert [(r["k"], r["value"]) for r in rows] == [(4, "384"), (5, "2688"), (6, "13440")]

    def test_general_family_requires_n(self, capsys):
        with pytest.raises(SystemExit):
            main(["eval", "--family", "general", "--k", "5"])

    def test_general_family_via_cli(self, capsys):
        _, out = run_cli(capsys, "eval", "--family", "general", "--n", "6",
                         "--k", "5", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "family,i,k,value,in_range"
        assert "general(n=6),1,5,189,True" in lines


class TestVerifyCommand:
    def test_sums_pass(self, capsys):
        code, out = run_cli(capsys, "verify", "--check", "sums", "--n", "3", "--k", "5")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        names = [c["name"] for c in doc["checks"]]
        assert any("sum of counts" in n for n in names)

    def test_sums_requires_parameters(self):
        with pytest.raises(SystemExit):
            main(["verify", "--check", "sums"])

    def test_moments_pass(self, capsys):
        code, _ = run_cli(capsys, "verify", "--check", "moments", "--n", "2", "--k", "3")
        assert code == 0

    def test_fullrank_pass(self, capsys):
        code, _ = run_cli(capsys, "verify", "--check", "fullrank", "--n", "1", "--k", "3")
        assert code == 0

    def test_fullrank_needs_wide_matrix(self, capsys):
        code = main(["verify", "--check", "fullrank", "--n", "3", "--k", "4"])
        assert code == 2
        assert "2n <= k" in capsys.readouterr().err

    def test_expsum_single_pair(self, capsys):
        code, _ = run_cli(capsys, "verify", "--check", "expsum", "--n", "2", "--k", "3",
                          "--trials", "40")
        assert code == 0

    def test_solutions_single_triple(self, capsys):
        code, out = run_cli(capsys, "verify", "--check", "solutions",
                            "--q", "2", "--n", "1", "--k", "1")
        assert code == 0
        doc = json.loads(out)
        assert any(c["actual"] == "28" for c in doc["checks"])

    def test_crossform_passes_and_reports_items(self, capsys):
        code, out = run_cli(capsys, "verify", "--check", "crossform")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        names = [c["name"] for c in doc["checks"]]
        assert any("general(n=6) vs n6 table, rank 7" in n for n in names)
        assert any("vanishes at k=6" in n for n in names)
        assert any("reference column, rank 6" in n for n in names)
        for check in doc["checks"]:
            assert check["expected"] and check["actual"]

    def test_failing_check_sets_exit_status(self, capsys, tmp_path):
        # Poison the cache with a wrong (but well-formed) distribution.
        store_cached(tmp_path, RankDistribution(1, 2, (1, 3, 5)))
        code, out = run_cli(capsys, "verify", "--check", "sums", "--n", "1", "--k", "2",
                            "--cache-dir", str(tmp_path))
        assert code == 1
        assert json.loads(out)["passed"] is False

    def test_pretty_format_lines(self, capsys):
        _, out = run_cli(capsys, "verify", "--check", "sums", "--n", "1", "--k", "2",
                         "--format", "pretty")
        assert "[PASS]" in out
        assert "checks passed" in out


class TestDeriveCommand:
    def test_reports_exact_table_match(self, capsys):
        code, out = run_cli(capsys, "derive")
        assert code == 0
        doc = json.loads(out)
        assert doc["matches_table"] is True
        assert doc["diff_vs_table"] == {}
        assert doc["unknowns"]["g8_x2"] == "10416"
        assert doc["unknowns"]["g11_x0"] == "256032"


class TestCountSolutionsCommand:
    def test_brute(self, capsys):
        _, out = run_cli(capsys, "count-solutions", "--q", "2", "--n", "1", "--k", "1")
        doc = json.loads(out)
        assert doc["result"] == {"q": 2, "n": 1, "k": 1, "method": "brute", "value": "28"}

    def test_from_distribution_agrees(self, capsys):
        _, brute = run_cli(capsys, "count-solutions", "--q", "1", "--n", "2", "--k", "3")
        _, dist = run_cli(capsys, "count-solutions", "--q", "1", "--n", "2", "--k", "3",
                          "--method", "from-distribution")
        assert json.loads(brute)["result"]["value"] == json.loads(dist)["result"]["value"] == "23"

    def test_budget_violation_is_clean_error(self, capsys):
        code = main(["count-solutions", "--q", "3", "--n", "6", "--k", "2"])
        assert code == 2
        assert "budget" in capsys.readouterr().err


class TestParser:
    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit):
            main(["enumerate", "--n", "2"])
