import pathlib

import pytest

from geoprove import primitives

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def base_registry():
    return primitives.base_registry()


@pytest.fixture(scope="session")
def simson_text():
    return (CORPUS / "simson.gls").read_text()


@pytest.fixture(scope="session")
def classic_tools_text():
    return (CORPUS / "classic_tools.glt").read_text()


@pytest.fixture()
def corpus_dir():
    return CORPUS
