import pytest

from modules.ring.potential import Variant, make_spec


@pytest.fixture
def generic2():
    return make_spec(2, Variant.GENERIC)


@pytest.fixture
def equivariant2():
    return make_spec(2, Variant.EQUIVARIANT)


@pytest.fixture
def equivariant3():
    return make_spec(3, Variant.EQUIVARIANT)


@pytest.fixture
def diagram_file(tmp_path):
    def write(text: str, name: str = "graph.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write
