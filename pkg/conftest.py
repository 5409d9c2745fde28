"""
Shared pytest fixtures for the contextkit test suite.
"""

import json
import sys
from pathlib import Path

import pytest

# Add current directory to path
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def write_json(tmp_path):
    """Write a document to a JSON file under tmp_path and return its path as a string."""
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return _write
