import json

import pytest

from refmodel import cli, composition, demo, evaluator, repository, simulation


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def demo_dir(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "demo", "--out", str(tmp_path))
    assert code == 0
    return tmp_path


class TestDemoWorkflow:
    def test_demo_writes_three_artifacts(self, demo_dir):
        assert (demo_dir / "demo.refrepo.json").exists()
        assert (demo_dir / "demo.refmodel.json").exists()
        assert (demo_dir / "reference.terrain.txt").exists()

    def test_demo_then_coverage_all_covered(self, demo_dir, capsys):
        code, out, _ = run_cli(
            capsys, "coverage", "--model", str(demo_dir / "demo.refmodel.json")
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 3
        assert all(": covered" in line for line in lines)

    def test_validate_clean_model(self, demo_dir, capsys):
        code, out, _ = run_cli(capsys, "validate", "--model", str(demo_dir / "demo.refmodel.json"))
        assert code == 0
        assert "valid" in out

    def test_validate_broken_model_exits_one(self, demo_dir, capsys):
        model_path = demo_dir / "demo.refmodel.json"
        model = repository.load_model(model_path.read_text())
        broken = composition.Model(
            id=model.id,
            blocks=model.blocks,
            connections=frozenset(
                c for c in model.connections if c.target.block != "svc.object_recognition"
            ),
            traces=model.traces,
        )
        model_path.write_text(repository.save_model(broken))
        code, out, _ = run_cli(capsys, "validate", "--model", str(model_path))
        assert code == 1
        assert "unbound required port" in out

    def test_trace_text_and_dot(self, demo_dir, capsys):
        model_arg = ("--model", str(demo_dir / "demo.refmodel.json"))
        code, out, _ = run_cli(capsys, "trace", "cap.mowing", "--direction", "down", *model_arg)
        assert code == 0
        assert out.startswith("cap.mowing")
        assert "res.mowing_robot (exhibits)" in out
        code, dot, _ = run_cli(
            capsys, "trace", "cap.mowing", "--direction", "down", "--format", "dot", *model_arg
        )
        assert code == 0
        assert dot.startswith("digraph trace {")

    def test_view_matches_library(self, demo_dir, capsys):
        code, out, _ = run_cli(
            capsys,
            "view",
            "--subject", "service",
            "--aspect", "structure",
            "--format", "dot",
            "--model", str(demo_dir / "demo.refmodel.json"),
        )
        assert code == 0
        model = repository.load_model((demo_dir / "demo.refmodel.json").read_text())
        view = composition.extract_view(
            model,
            composition.Viewpoint(
                composition.ConcernLayer.SERVICE, composition.Aspect.STRUCTURE
            ),
        )
        assert out == composition.export_dot(view)

    def test_alternatives_lists_both_planners(self, demo_dir, capsys):
        code, out, _ = run_cli(
            capsys,
            "alternatives",
            "--slot", "alg.edge_follow",
            "--repo", str(demo_dir / "demo.refrepo.json"),
            "--model", str(demo_dir / "demo.refmodel.json"),
        )
        assert code == 0
        assert out.splitlines() == [
            "0: alg.edge_follow (Edge Follow Planner)",
            "1: alg.terrain_aware (Terrain Aware Planner)",
        ]


class TestRepoCommands:
    def test_init_list_add(self, tmp_path, capsys):
        repo_path = tmp_path / "team.refrepo.json"
        code, _, _ = run_cli(capsys, "repo", "init", "--repo", str(repo_path))
        assert code == 0 and repo_path.exists()

        asset_doc = {
            "id": "cap.watering",
            "asset_kind": "block",
            "block": {
                "id": "cap.watering",
                "name": "Watering",
                "layer": "strategic",
                "kind": "capability",
                "ports": [],
                "parameters": {},
                "origin": "reference_asset",
            },
        }
        asset_file = tmp_path / "asset.json"
        asset_file.write_text(json.dumps(asset_doc))
        code, out, _ = run_cli(capsys, "repo", "add", str(asset_file), "--repo", str(repo_path))
        assert code == 0
        assert "cap.watering" in out

        code, out, _ = run_cli(capsys, "repo", "list", "--repo", str(repo_path))
        assert code == 0
        assert out.strip() == "cap.watering"

    def test_init_refuses_overwrite(self, tmp_path, capsys):
        repo_path = tmp_path / "r.refrepo.json"
        run_cli(capsys, "repo", "init", "--repo", str(repo_path))
        code, _, err = run_cli(capsys, "repo", "init", "--repo", str(repo_path))
        assert code == 1
        assert "exists" in err

    def test_env_home_supplies_default_repo(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("REFMODEL_HOME", str(tmp_path))
        code, _, _ = run_cli(capsys, "repo", "init")
        assert code == 0
        assert (tmp_path / "default.refrepo.json").exists()

    def test_missing_repo_flag_is_usage_error(self, capsys, monkeypatch):
        monkeypatch.delenv("REFMODEL_HOME", raising=False)
        code, _, err = run_cli(capsys, "repo", "list")
        assert code == 2
        assert "--repo" in err


class TestModelCommands:
    def test_adopt_connect_roundtrip(self, demo_dir, capsys):
        repo_arg = ("--repo", str(demo_dir / "demo.refrepo.json"))
        model_path = demo_dir / "fresh.refmodel.json"
        for asset in ("res.camera", "res.fn.preprocess"):
            code, _, _ = run_cli(
                capsys, "model", "adopt", asset, *repo_arg, "--model", str(model_path)
            )
            assert code == 0
        code, _, _ = run_cli(
            capsys,
            "model", "connect",
            "res.camera:out", "res.fn.preprocess:in_images",
            "--model", str(model_path),
        )
        assert code == 0
        model = repository.load_model(model_path.read_text())
        assert model.id == "fresh"
        assert len(model.connections) == 1

    def test_adapt_with_overrides(self, demo_dir, capsys):
        repo_arg = ("--repo", str(demo_dir / "demo.refrepo.json"))
        model_path = demo_dir / "adapted.refmodel.json"
        code, _, _ = run_cli(
            capsys,
            "model", "adapt", "res.battery",
            "--name", "Long Range Battery",
            "--param", "capacity=250.5",
            *repo_arg, "--model", str(model_path),
        )
        assert code == 0
        block = repository.load_model(model_path.read_text()).block("res.battery")
        assert block.name == "Long Range Battery"
        assert block.parameters["capacity"] == 250.5

    def test_extend_adds_port(self, demo_dir, capsys):
        repo_arg = ("--repo", str(demo_dir / "demo.refrepo.json"))
        model_path = demo_dir / "extended.refmodel.json"
        code, _, _ = run_cli(
            capsys,
            "model", "extend", "res.mowing_robot",
            "--port", "terrainProfileIn:required:TerrainProfile",
            *repo_arg, "--model", str(model_path),
        )
        assert code == 0
        block = repository.load_model(model_path.read_text()).block("res.mowing_robot")
        assert block.find_port("terrainProfileIn") is not None

    def test_apply_pattern_via_cli(self, demo_dir, capsys):
        repo_arg = ("--repo", str(demo_dir / "demo.refrepo.json"))
        model_path = demo_dir / "patterned.refmodel.json"
        pattern = demo.services_pattern()
        for anchor in pattern.anchor_ids():
            code, _, _ = run_cli(
                capsys, "model", "adopt", anchor, *repo_arg, "--model", str(model_path)
            )
            assert code == 0
        binds = []
        for anchor in pattern.anchor_ids():
            binds.extend(["--bind", f"{anchor}={anchor}"])
        code, _, _ = run_cli(
            capsys,
            "model", "apply-pattern", demo.DEMO_PATTERN_ID,
            *binds, *repo_arg, "--model", str(model_path),
        )
        assert code == 0
        model = repository.load_model(model_path.read_text())
        assert "svc.smart_mowing" in model.blocks

    def test_domain_error_exits_one(self, demo_dir, capsys):
        repo_arg = ("--repo", str(demo_dir / "demo.refrepo.json"))
        model_path = demo_dir / "dup.refmodel.json"
        run_cli(capsys, "model", "adopt", "res.camera", *repo_arg, "--model", str(model_path))
        code, _, err = run_cli(
            capsys, "model", "adopt", "res.camera", *repo_arg, "--model", str(model_path)
        )
        assert code == 1
        assert "error:" in err


class TestEvaluationCommands:
    def test_simulate_csv_matches_library(self, demo_dir, capsys):
        map_path = demo_dir / "reference.terrain.txt"
        code, out, _ = run_cli(
            capsys,
            "simulate", "--map", str(map_path), "--planner", "terrain_aware",
            "--format", "csv",
        )
        assert code == 0
        tmap = demo.reference_map()
        expected = simulation.sim_result_to_csv(simulation.run(tmap, "terrain_aware"))
        assert out == expected

    def test_simulate_adaptive_picks_terrain_aware_on_ridge(self, demo_dir, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--map", str(demo_dir / "reference.terrain.txt"),
            "--planner", "adaptive",
        )
        assert code == 0
        assert "terrain_aware" in out

    def test_compare_csv_matches_library(self, demo_dir, capsys):
        code, out, _ = run_cli(
            capsys,
            "compare", "--map", str(demo_dir / "reference.terrain.txt"), "--format", "csv",
        )
        assert code == 0
        report = evaluator.compare(demo.reference_map(), map_label="reference.terrain.txt")
        assert out == evaluator.comparison_to_csv(report)

    def test_compare_writes_artifacts(self, demo_dir, capsys, tmp_path):
        out_dir = tmp_path / "reports"
        code, _, _ = run_cli(
            capsys,
            "compare", "--map", str(demo_dir / "reference.terrain.txt"),
            "--out", str(out_dir),
        )
        assert code == 0
        for name in ("compare.csv", "compare.txt", "remaining.svg", "paths.svg"):
            assert (out_dir / name).exists()

    def test_ensemble_summary(self, capsys):
        code, out, _ = run_cli(
            capsys, "ensemble", "--n", "3", "--seed", "5", "--format", "csv"
        )
        assert code == 0
        assert out.splitlines()[0] == "planner,mean_total,min_total,max_total,wins,n_maps"

    def test_rank_on_reference_map(self, demo_dir, capsys):
        code, out, _ = run_cli(
            capsys,
            "rank", "--slot", "alg.edge_follow",
            "--map", str(demo_dir / "reference.terrain.txt"),
            "--repo", str(demo_dir / "demo.refrepo.json"),
            "--model", str(demo_dir / "demo.refmodel.json"),
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("1. alg.terrain_aware")
        assert lines[1].startswith("2. alg.edge_follow")


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 2

    def test_no_subcommand_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 2

    def test_bad_start_format_is_usage_error(self, demo_dir, capsys):
        code, _, err = run_cli(
            capsys,
            "simulate", "--map", str(demo_dir / "reference.terrain.txt"), "--start", "oops",
        )
        assert code == 2
        assert "row,col" in err

    def test_missing_map_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "simulate")
        assert code == 2
        assert "--map" in err

    def test_nonexistent_map_file_is_domain_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "simulate", "--map", str(tmp_path / "missing.txt"))
        assert code == 1
        assert err.startswith("error:")
