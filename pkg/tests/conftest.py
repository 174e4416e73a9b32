import os

import pytest

SAMPLE_DIR = os.path.join(os.path.dirname(__file__), "fixtures", "sample")


@pytest.fixture
def sample_dir():
    return SAMPLE_DIR


@pytest.fixture
def write_file(tmp_path):
    """Write text (or bytes) to a file under ``tmp_path`` and return its path."""
    def _write(name, content):
        path = tmp_path / name
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(content, encoding="utf-8")
        return str(path)
    return _write
