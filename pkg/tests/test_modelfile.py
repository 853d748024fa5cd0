import json

import numpy as np
import pytest

from ripe import modelfile
from ripe.core import InputError
from ripe.generate import MiningParams
from ripe.predict import fit, summarize
from ripe.significance import SignificanceSpec


@pytest.fixture(scope="module")
def model():
    rng = np.random.default_rng(12)
    X = rng.uniform(-1, 1, size=(700, 4))
    y = 2.0 * (X[:, 0] > 0.3) - 1.5 * (X[:, 1] < -0.2) + rng.normal(size=700)
    return fit(X, y, MiningParams(spec=SignificanceSpec("hoeffding", 0.1)), ["a", "b", "c", "d"])


def test_round_trip_predictions(model):
    loaded = modelfile.loads(modelfile.dumps(model))
    X = np.random.default_rng(0).uniform(-1.5, 1.5, size=(1000, 4))
    np.testing.assert_array_equal(model.predict(X), loaded.predict(X))
    assert [r.label for r in loaded.rules] == [r.label for r in model.rules]
    assert loaded.params == model.params


def test_round_trip_is_stable(model):
    text = modelfile.dumps(model)
    assert modelfile.dumps(modelfile.loads(text)) == text


def test_summary_survives(model):
    loaded = modelfile.loads(modelfile.dumps(model))
    assert summarize(loaded).to_text() == summarize(model).to_text()


def test_human_readable_schema(model):
    data = json.loads(modelfile.dumps(model))
    assert data["format_version"] == 1
    assert data["params"]["z"] == "hoeffding"
    assert all(set(c["signature"]) <= {"0", "1"} for c in data["cell_table"])
    assert sum(c["count"] for c in data["cell_table"]) == 700


def test_unknown_version_rejected(model):
    data = modelfile.to_dict(model)
    data["format_version"] = 99
    with pytest.raises(InputError):
        modelfile.from_dict(data)


def test_malformed_rejected(model):
    data = modelfile.to_dict(model)
    del data["rules"]
    with pytest.raises(InputError):
        modelfile.from_dict(data)
    with pytest.raises(InputError):
        modelfile.loads("{not json")


def test_file_io(model, tmp_path):
    path = tmp_path / "m.json"
    modelfile.save(model, path)
    assert modelfile.load(path).predict(np.zeros(4)) == model.predict(np.zeros(4))
