import pytest

from phenocalc.src.config import Settings, load_settings
from phenocalc.src.errors import ConfigError


def test_missing_file_gives_defaults(tmp_path):
    loaded = load_settings(str(tmp_path / "absent.yaml"))
    assert loaded == Settings()
    assert loaded.depth == 64
    assert loaded.seed == 42


def test_reads_upper_case_keys(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("DEPTH: 12\nSEED: 7\nLOG_LEVEL: 'info'\nCHUNK_SIZE: 100\n")
    loaded = load_settings(str(path))
    assert (loaded.depth, loaded.seed, loaded.chunk_size) == (12, 7, 100)
    assert loaded.log_level == "INFO"
    assert loaded.backend == "exact"


def test_repository_config_matches_defaults():
    loaded = load_settings()
    assert loaded.precision == 6
    assert loaded.tie_tolerance == 1e-12


@pytest.mark.parametrize("text", [
    "BACKEND: 'decimal'\n",
    "DEPTH: -1\n",
    "PRECISION: 40\n",
    "LOG_LEVEL: 'LOUD'\n",
    "SEED: [1, 2]\n",
    "DEPTH: [unclosed\n",
])
def test_invalid_files_raise(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_settings(str(path))
