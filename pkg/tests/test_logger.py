"""
File:           test_logger.py
Author:         xlembed developers
Created on:     18/10/26, 4:35 pm
"""
import logging

from src import LOG_DIR
from src.utils.logger import LogFacade


class TestLogFacade:

    def test_one_instance_per_component(self):
        assert LogFacade.get_logger("test-shared") is LogFacade.get_logger("test-shared")

    def test_level_by_name_or_number(self):
        assert LogFacade.resolve_level("debug") == logging.DEBUG
        assert LogFacade.resolve_level(logging.ERROR) == logging.ERROR
        assert LogFacade.resolve_level("no-such-level") == logging.INFO
        assert LogFacade.get_logger("test-named-level", level="WARNING").level == logging.WARNING

    def test_file_created_on_first_record(self):
        path = LOG_DIR / "test-lazy-file.log"
        path.unlink(missing_ok=True)
        logger = LogFacade.get_logger("test-lazy-file")
        assert not path.exists()
        logger.warning("bank has no distractors")
        assert "test-lazy-file: bank has no distractors" in path.read_text(encoding="utf-8")

    def test_reports_stay_off_stdout(self, capsys):
        LogFacade.get_logger("test-console").warning("to stderr")
        assert capsys.readouterr().out == ""
