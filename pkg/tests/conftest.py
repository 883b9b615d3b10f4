import numpy as np
import pytest

from cohgraph.corpus import EmbeddingTable


@pytest.fixture
def abc_table():
    # a and b orthogonal, c halfway between them: cos(a,c) = cos(b,c) ~ 0.7071
    inv = 1.0 / np.sqrt(2.0)
    entries = {
        "a": np.array([1.0, 0.0]),
        "b": np.array([0.0, 1.0]),
        "c": np.array([inv, inv]),
    }
    for vec in entries.values():
        vec.setflags(write=False)
    return EmbeddingTable(dimension=2, entries=entries)
