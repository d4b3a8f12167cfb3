"""Tests for the logging and file helpers."""

import logging

import pytest

from utils.errors import ConfigError
from utils.file_utils import (
    FileUtilsError,
    canonical_hash,
    ensure_directory,
    read_json_file,
    validate_file_type,
)
from utils.logging_utils import HANDLER_NAME, setup_logging


@pytest.fixture
def restore_root_logger():
    root = logging.getLogger()
    level = root.level
    yield root
    root.setLevel(level)


class TestSetupLogging:
    def test_repeated_calls_replace_handlers(self, restore_root_logger, tmp_path):
        log_file = tmp_path / "logs" / "lab.log"
        setup_logging("DEBUG", str(log_file))
        setup_logging("DEBUG", str(log_file))
        ours = [h for h in restore_root_logger.handlers if h.get_name() == HANDLER_NAME]
        assert len(ours) == 2
        assert restore_root_logger.level == logging.DEBUG

        logging.getLogger("timestepper").info("step 10/100")
        for handler in ours:
            handler.flush()
        assert "timestepper - INFO - step 10/100" in log_file.read_text()

    def test_unknown_level_falls_back_to_info(self, restore_root_logger):
        setup_logging("chatty")
        assert restore_root_logger.level == logging.INFO


class TestFileUtils:
    def test_validate_file_type(self):
        assert validate_file_type("configs/Default.JSON", [".json"])
        assert not validate_file_type("configs/default.yaml", [".json"])

    def test_canonical_hash_ignores_key_order(self):
        assert canonical_hash({"a": 1, "b": [1, 2]}) == canonical_hash({"b": [1, 2], "a": 1})
        assert canonical_hash({"a": 1}) != canonical_hash({"a": 2})

    def test_ensure_directory(self, tmp_path):
        path = tmp_path / "runs" / "a"
        assert ensure_directory(str(path)) == str(path)
        assert path.is_dir()

    def test_read_json_errors_are_config_errors(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{")
        with pytest.raises(FileUtilsError) as info:
            read_json_file(str(broken))
        assert isinstance(info.value, ConfigError)
        with pytest.raises(FileUtilsError):
            read_json_file(str(tmp_path / "absent.json"))
