import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"


def read_corpus(name):
    lines = (DATA / name).read_text().splitlines()
    stripped = (line.split("#", 1)[0].strip() for line in lines)
    return [line for line in stripped if line]


@pytest.fixture
def classical_corpus():
    return read_corpus("classical_corpus.txt")


@pytest.fixture
def graph_corpus():
    return read_corpus("graph_corpus.txt")


@pytest.fixture
def monadic_corpus():
    return read_corpus("monadic_corpus.txt")
