"""Model loading, validation, and evaluation."""

import json
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taylorpoda import (
    ExternalModel,
    MlpModel,
    PolynomialModel,
    evaluate,
    evaluate_batch,
    load_model,
)
from taylorpoda.errors import (
    DimensionError,
    NonFiniteInput,
    OracleError,
    ParseError,
    UnsupportedActivation,
)
from taylorpoda.oracle import MlpLayer

from conftest import random_mlp


def write_model(tmp_path, doc, name="model.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def mlp_doc(layers, input_dim, **extra):
    return {"type": "mlp", "input_dim": input_dim, "layers": layers, **extra}


def layer(w, b, activation="tanh", **extra):
    return {"weights": w, "bias": b, "activation": activation, **extra}


class TestLoadModel:
    def test_mlp_shapes(self, tmp_path):
        doc = mlp_doc(
            [
                layer([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]], [0, 0, 0]),
                layer([[1, 1, 1]], [0], "identity"),
            ],
            input_dim=2,
        )
        model = load_model(write_model(tmp_path, doc))
        assert isinstance(model, MlpModel)
        assert model.input_dim == 2

    def test_polynomial_product(self, tmp_path):
        doc = {
            "type": "polynomial",
            "input_dim": 2,
            "monomials": [{"coef": 1, "exps": {"0": 1, "1": 1}}],
        }
        model = load_model(write_model(tmp_path, doc))
        assert isinstance(model, PolynomialModel)
        assert evaluate(model, [2.0, 3.0]) == 6.0

    def test_layer_chain_mismatch(self, tmp_path):
        doc = mlp_doc(
            [
                layer([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]], [0, 0, 0]),
                layer([[1, 1, 1, 1]], [0], "identity"),  # expects 4 inputs
            ],
            input_dim=2,
        )
        with pytest.raises(DimensionError):
            load_model(write_model(tmp_path, doc))

    def test_declared_dim_mismatch(self, tmp_path):
        doc = mlp_doc([layer([[1, 1]], [0], "identity")], input_dim=3)
        with pytest.raises(DimensionError):
            load_model(write_model(tmp_path, doc))

    def test_unknown_activation(self, tmp_path):
        doc = mlp_doc([layer([[1, 1]], [0], "swish")], input_dim=2)
        with pytest.raises(UnsupportedActivation):
            load_model(write_model(tmp_path, doc))

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_model(path)

    def test_unknown_type(self, tmp_path):
        with pytest.raises(ParseError):
            load_model(write_model(tmp_path, {"type": "forest"}))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_model(tmp_path / "nope.json")

    def test_polynomial_bad_exponent_index(self, tmp_path):
        doc = {
            "type": "polynomial",
            "input_dim": 2,
            "monomials": [{"coef": 1, "exps": {"5": 1}}],
        }
        with pytest.raises(DimensionError):
            load_model(write_model(tmp_path, doc))

    def test_probability_kind_selects_logistic(self, tmp_path):
        doc = mlp_doc(
            [layer([[0, 0]], [0], "identity")], input_dim=2, output_kind="probability"
        )
        model = load_model(write_model(tmp_path, doc))
        assert model.final_transform == "logistic"
        assert evaluate(model, [1.0, 1.0]) == 0.5


class TestEvaluate:
    def test_zero_weights_logistic_half(self):
        model = MlpModel(
            [MlpLayer(np.zeros((1, 3)), np.zeros(1), "identity")],
            final_transform="logistic",
        )
        assert evaluate(model, [4.0, -1.0, 7.0]) == 0.5

    def test_single_linear_layer(self):
        model = MlpModel([MlpLayer(np.array([[1.0, 1.0]]), np.zeros(1), "identity")])
        assert evaluate(model, [2.0, 3.0]) == 5.0

    def test_batch_matches_singles(self):
        model = PolynomialModel([(1.0, {0: 1, 1: 1})], input_dim=2)
        xs = np.array([[2.0, 3.0], [1.0, 4.0], [0.0, 9.0]])
        out = evaluate_batch(model, xs)
        assert out.tolist() == [6.0, 4.0, 0.0]

    def test_empty_batch(self):
        model = PolynomialModel([(1.0, {0: 1})], input_dim=1)
        assert evaluate_batch(model, []).shape == (0,)

    def test_nan_row_rejected_before_evaluation(self):
        model = PolynomialModel([(1.0, {0: 1})], input_dim=2)
        xs = np.array([[1.0, 2.0], [np.nan, 0.0]])
        with pytest.raises(NonFiniteInput):
            evaluate_batch(model, xs)

    def test_wrong_width_rejected(self):
        model = PolynomialModel([(1.0, {0: 1})], input_dim=3)
        with pytest.raises(DimensionError):
            evaluate_batch(model, np.ones((2, 2)))

    def test_determinism(self):
        rng = np.random.default_rng(7)
        model = random_mlp(rng, 5)
        x = rng.normal(size=5)
        assert evaluate(model, x) == evaluate(model, x)

    def test_probability_range_warning(self):
        model = MlpModel(
            [MlpLayer(np.array([[10.0]]), np.zeros(1), "identity")],
            output_kind="probability",
        )
        with pytest.warns(RuntimeWarning):
            evaluate(model, [1.0])

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
    def test_batch_row_consistency_exact(self, seed, n):
        # bit-identical: the forward pass must not depend on batch size
        rng = np.random.default_rng(seed)
        model = random_mlp(rng, 4)
        xs = rng.normal(size=(n, 4))
        batch = evaluate_batch(model, xs)
        for i in range(n):
            assert batch[i] == evaluate(model, xs[i])

    def test_softplus_approaches_relu(self):
        rng = np.random.default_rng(3)
        w1 = rng.normal(size=(6, 3))
        b1 = rng.normal(size=6)
        w2 = rng.normal(size=(1, 6))
        b2 = rng.normal(size=1)
        x = rng.normal(size=3)

        def build(act, sharp=1.0):
            return MlpModel(
                [MlpLayer(w1, b1, act, sharpness=sharp), MlpLayer(w2, b2, "identity")]
            )

        relu_out = evaluate(build("relu"), x)
        gaps = [
            abs(evaluate(build("softplus", s), x) - relu_out) for s in (1.0, 4.0, 16.0)
        ]
        assert gaps[0] > gaps[1] > gaps[2]


ECHO_ORACLE = """\
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    outs = [sum(row) for row in req["inputs"]]
    sys.stdout.write(json.dumps({"id": req["id"], "outputs": outs}) + "\\n")
    sys.stdout.flush()
"""

BAD_ID_ORACLE = """\
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    sys.stdout.write(json.dumps({"id": -1, "outputs": [0.0] * len(req["inputs"])}) + "\\n")
    sys.stdout.flush()
"""

SLOW_ORACLE = """\
import time, sys
sys.stdin.readline()
time.sleep(60)
"""


class TestExternal:
    def make(self, tmp_path, code, name, **kwargs):
        script = tmp_path / name
        script.write_text(code)
        return ExternalModel(f"{sys.executable} {script}", **kwargs)

    def test_round_trip(self, tmp_path):
        with self.make(tmp_path, ECHO_ORACLE, "echo.py", input_dim=3) as model:
            out = evaluate_batch(model, np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 1.0]]))
            assert out.tolist() == [6.0, 1.0]
            assert evaluate(model, [1.0, 1.0, 1.0]) == 3.0

    def test_chunked_batch_exceeds_cap(self, tmp_path):
        rows = np.ones((4100, 2))
        with self.make(tmp_path, ECHO_ORACLE, "echo.py", input_dim=2) as model:
            out = evaluate_batch(model, rows)
            assert out.shape == (4100,)
            assert np.all(out == 2.0)

    def test_id_mismatch(self, tmp_path):
        with self.make(tmp_path, BAD_ID_ORACLE, "bad.py", input_dim=2) as model:
            with pytest.raises(OracleError):
                evaluate_batch(model, np.ones((1, 2)))

    def test_timeout(self, tmp_path):
        with self.make(
            tmp_path, SLOW_ORACLE, "slow.py", input_dim=2, timeout=0.5
        ) as model:
            with pytest.raises(OracleError):
                evaluate_batch(model, np.ones((1, 2)))

    def test_dead_process(self, tmp_path):
        model = ExternalModel(f"{sys.executable} -c 'pass'", input_dim=2, timeout=5.0)
        with model:
            with pytest.raises(OracleError):
                evaluate_batch(model, np.ones((1, 2)))

    def test_protocol_version_guard(self):
        with pytest.raises(ParseError):
            ExternalModel("cat", input_dim=2, protocol_version=2)

    def test_external_model_file(self, tmp_path):
        script = tmp_path / "echo.py"
        script.write_text(ECHO_ORACLE)
        doc = {
            "type": "external",
            "command": f"{sys.executable} {script}",
            "protocol_version": 1,
            "input_dim": 2,
        }
        model = load_model(write_model(tmp_path, doc))
        with model:
            assert evaluate(model, [2.0, 5.0]) == 7.0
