"""Tests for environment-driven settings."""

from unittest.mock import patch

from ringbif.config import DEFAULT_MAX_WORKERS, log_level, worker_count


class TestWorkerCount:
    def test_default(self):
        with patch.dict("os.environ", {}, clear=True):
            assert 1 <= worker_count() <= DEFAULT_MAX_WORKERS

    def test_explicit(self):
        with patch.dict("os.environ", {"RINGBIF_THREADS": "3"}, clear=True):
            assert worker_count() == 3

    def test_not_an_integer(self, caplog):
        with patch.dict("os.environ", {"RINGBIF_THREADS": "many"}, clear=True):
            assert 1 <= worker_count() <= DEFAULT_MAX_WORKERS
        assert "not an integer" in caplog.text

    def test_zero(self, caplog):
        with patch.dict("os.environ", {"RINGBIF_THREADS": "0"}, clear=True):
            assert worker_count() >= 1
        assert "must be >= 1" in caplog.text


class TestLogLevel:
    def test_default(self):
        with patch.dict("os.environ", {}, clear=True):
            assert log_level() == "WARNING"

    def test_case_insensitive(self):
        with patch.dict("os.environ", {"RINGBIF_LOG_LEVEL": "debug"}, clear=True):
            assert log_level() == "DEBUG"

    def test_invalid(self, caplog):
        with patch.dict("os.environ", {"RINGBIF_LOG_LEVEL": "LOUD"}, clear=True):
            assert log_level() == "WARNING"
        assert "LOUD" in caplog.text
