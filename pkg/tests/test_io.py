import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from condlab import build_table
from condlab.errors import ModelError
from condlab.io import (
    format_model,
    load_table,
    parse_model_text,
    read_configuration,
    save_table,
    write_configuration,
    write_tail_curve,
)
from condlab.observables import TailCurve

from conftest import geometric_model

MESO_TEXT = """
# comment line
bulk.family = geometric
bulk.p = 0.5
pert.theta = 0.1
pert.gamma = 1
pert.kappa = 0
system.L = 512
system.N = 1024
"""


def test_parse_model():
    m = parse_model_text(MESO_TEXT)
    assert m == geometric_model()
    assert parse_model_text(format_model(m)) == m


def test_parse_table_bulk():
    text = MESO_TEXT.replace("bulk.family = geometric\nbulk.p = 0.5", "bulk.family = table\nbulk.weights = 0.5, 0.25\nbulk.tail_ratio = 0.5")
    m = parse_model_text(text)
    assert m.bulk.family == "table"
    assert parse_model_text(format_model(m)) == m


@pytest.mark.parametrize("text", [
    MESO_TEXT.replace("system.N = 1024", ""),
    MESO_TEXT.replace("bulk.p = 0.5", "bulk.p = 1.5"),
    MESO_TEXT.replace("pert.kappa = 0", "pert.kappa = -2"),
    MESO_TEXT.replace("geometric", "poisson"),
    MESO_TEXT + "\nnot a pair\n",
    MESO_TEXT.replace("system.L = 512", "system.L = many"),
])
def test_parse_rejects(text):
    with pytest.raises(ModelError):
        parse_model_text(text)


def test_table_round_trip(tmp_path):
    t = build_table(geometric_model(kappa=0.5, L=20, N=40))
    path = tmp_path / "t.bin"
    save_table(t, path)
    u = load_table(path)
    assert u.log_z.tobytes() == t.log_z.tobytes()
    assert u.log_weights.tobytes() == t.log_weights.tobytes()
    assert u.model_hash == t.model_hash
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError):
        load_table(path)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=30))
def test_configuration_round_trip(tmp_path_factory, eta):
    path = tmp_path_factory.mktemp("cfg") / "c.csv"
    write_configuration(path, eta)
    assert read_configuration(path).tolist() == eta


def test_tail_csv_format():
    curve = TailCurve(np.array([0.0, 0.05]), np.array([1.0, 0.1 + 0.2]), np.array([0.5, 1 / 3]), n_realizations=48)
    buf = io.StringIO()
    write_tail_curve(buf, curve)
    assert buf.getvalue() == "s,empirical,theoretical,n_realizations\n0.0,1.0,0.5,48\n0.05,0.30000000000000004,0.3333333333333333,48\n"
