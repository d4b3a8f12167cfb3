"""Tests for the command-line entry point."""

import json

from cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, build_parser, cli_main


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return str(path)


def last_document(capsys):
    return json.loads(capsys.readouterr().out)


class TestParser:
    def test_subcommands(self):
        args = build_parser().parse_args(["rate-study", "--config", "c.json", "--dry-run"])
        assert args.subcommand == "rate-study"
        assert args.dry_run

    def test_missing_config_flag(self):
        assert cli_main(["simulate"]) == EXIT_USAGE

    def test_unknown_subcommand(self):
        assert cli_main(["plot", "--config", "c.json"]) == EXIT_USAGE

    def test_help(self):
        assert cli_main(["--help"]) == EXIT_OK


class TestCliMain:
    def test_missing_file(self, tmp_path, capsys):
        code = cli_main(["simulate", "--config", str(tmp_path / "absent.json")])
        document = last_document(capsys)
        assert code == EXIT_USAGE
        assert document["success"] is False
        assert document["error"]["code"] == "CONFIG_INVALID"

    def test_invalid_config(self, tmp_path, run_config_data, capsys):
        path = write_config(tmp_path, {**run_config_data, "initial_data": {"amplitude": 0.5}})
        assert cli_main(["simulate", "--config", path]) == EXIT_USAGE
        assert last_document(capsys)["error"]["code"] == "CONFIG_INVALID"

    def test_dry_run(self, tmp_path, run_config_data, capsys):
        path = write_config(tmp_path, run_config_data)
        assert cli_main(["simulate", "--config", path, "--dry-run"]) == EXIT_OK
        document = last_document(capsys)
        assert document["success"] is True
        assert document["data"]["dry_run"] is True
        assert document["data"]["config"]["grid"]["points_per_axis"] == 32
        assert not (tmp_path / "run").exists()

    def test_simulate(self, tmp_path, run_config_data, capsys):
        path = write_config(tmp_path, run_config_data)
        out = tmp_path / "cli-out"
        assert cli_main(["simulate", "--config", path, "--output-dir", str(out)]) == EXIT_OK
        document = last_document(capsys)
        assert document["data"]["steps"] == 10
        assert (out / "manifest.json").exists()

    def test_numerical_failure(self, tmp_path, run_config_data, capsys):
        data = {**run_config_data, "step": {"dt": 1.0, "t_end": 2.0}}
        path = write_config(tmp_path, data)
        assert cli_main(["simulate", "--config", path]) == EXIT_NUMERICAL
        assert last_document(capsys)["error"]["code"] == "CFL_VIOLATION"
