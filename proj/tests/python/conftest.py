import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
CORPUS = ROOT / "tests" / "corpus"


@pytest.fixture
def corpus():
    def load(name):
        import qgraph

        return qgraph.Graph.from_file(str(CORPUS / f"{name}.graph"))

    return load


@pytest.fixture
def schema():
    import json

    def load(name):
        return json.loads((ROOT / "schemas" / f"{name}.schema.json").read_text())

    return load


@pytest.fixture
def cli_binary():
    path = os.environ.get("QGRAPH_CLI")
    if not path:
        pytest.skip("QGRAPH_CLI not set")
    return path
