"""Tests for CSV writing, run manifests and logging setup."""

import logging
from logging.handlers import RotatingFileHandler

import pandas as pd
import pytest
from hstobit_core import PRNG_ALGORITHM, ConfigError
from hstobit_engine.logging_config import configure_logging
from hstobit_engine.output import MANIFEST_NAME, RunManifest, load_manifest, write_csv, write_manifest


class TestWriteCsv:
    def test_no_index_and_unix_newlines(self, tmp_path):
        path = write_csv(pd.DataFrame({"a": [1, 2], "b": [0.5, 1.25]}), tmp_path / "sub" / "t.csv")
        assert path.read_bytes() == b"a,b\n1,0.5\n2,1.25\n"

    def test_identical_frames_identical_bytes(self, tmp_path):
        frame = pd.DataFrame({"x": [0.1 + 0.2, 1 / 3]})
        a = write_csv(frame, tmp_path / "a.csv").read_bytes()
        b = write_csv(frame.copy(), tmp_path / "b.csv").read_bytes()
        assert a == b


class TestManifest:
    def test_defaults(self):
        manifest = RunManifest(command="fit")
        assert manifest.prng == PRNG_ALGORITHM
        assert manifest.version == "0.1.0"
        assert manifest.outputs == []

    def test_round_trip(self, tmp_path):
        manifest = RunManifest(
            command="fit",
            inputs={"data_csv": "/data/x.csv"},
            config={"chain": {"seed": 3}},
            seed=3,
            timings={"chain_seconds": 1.5},
            warnings={"lambda2": 2},
            diagnostics={"sampler_path": "direct"},
            outputs=["summary.csv"],
        )
        path = write_manifest(manifest, tmp_path)
        assert path.name == MANIFEST_NAME
        assert load_manifest(path) == manifest
        assert load_manifest(tmp_path) == manifest

    def test_unknown_field_rejected(self, tmp_path):
        (tmp_path / MANIFEST_NAME).write_text('{"command": "fit", "extra": 1}')
        with pytest.raises(ConfigError, match="Invalid manifest"):
            load_manifest(tmp_path)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read manifest"):
            load_manifest(tmp_path / "nowhere.json")


class TestConfigureLogging:
    @pytest.fixture(autouse=True)
    def restore_root(self):
        root = logging.getLogger()
        handlers, level = root.handlers[:], root.level
        yield
        for handler in root.handlers[:]:
            root.removeHandler(handler)
            handler.close()
        for handler in handlers:
            root.addHandler(handler)
        root.setLevel(level)

    def test_console_only(self):
        configure_logging("debug")
        root = logging.getLogger()
        assert root.level == logging.DEBUG
        assert len(root.handlers) == 1

    def test_rotating_files(self, tmp_path):
        configure_logging(logging.INFO, tmp_path / "logs")
        logging.getLogger("hstobit_engine.test").warning("clamped")
        files = [h for h in logging.getLogger().handlers if isinstance(h, RotatingFileHandler)]
        assert len(files) == 2
        for handler in files:
            handler.flush()
        assert "clamped" in (tmp_path / "logs" / "hstobit.log").read_text()
        assert "WARNING" in (tmp_path / "logs" / "warnings.log").read_text()
