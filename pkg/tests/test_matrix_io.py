import json

import numpy as np
import pytest

from trotterkit.hamiltonians import build_random_hermitian
from trotterkit.matrix_io import (
    MatrixFormatError,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    save_matrix,
    vector_from_json,
    vector_to_json,
)


def test_round_trip(tmp_path):
    a = build_random_hermitian(5, 2) * np.pi
    path = tmp_path / "m.json"
    save_matrix(path, a)
    np.testing.assert_array_equal(load_matrix(path), a)


def test_vector_round_trip():
    v = np.array([0.1 + 0.2j, -1 / 3, 1e-300j])
    np.testing.assert_array_equal(vector_from_json(json.loads(json.dumps(vector_to_json(v)))), v)


def test_layout_is_row_major():
    obj = matrix_to_json([[1, 2j], [3, 4]])
    assert obj == {"dim": 2, "re": [[1.0, 0.0], [3.0, 4.0]], "im": [[0.0, 2.0], [0.0, 0.0]]}


@pytest.mark.parametrize(
    "payload",
    [
        {"dim": 2, "re": [[1, 0]], "im": [[0, 0]]},
        {"dim": 2, "re": [[1, 0], [0, 1, 2]], "im": [[0, 0], [0, 0]]},
        {"dim": 0, "re": [], "im": []},
        {"dim": 1, "re": [[float("nan")]], "im": [[0]]},
        {"dim": 1, "re": [["a"]], "im": [[0]]},
        [[1, 0], [0, 1]],
    ],
)
def test_rejects_bad_payloads(payload):
    with pytest.raises(MatrixFormatError):
        matrix_from_json(payload)


def test_rejects_nan_token(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 1, "re": [[NaN]], "im": [[0]]}')
    with pytest.raises(MatrixFormatError):
        load_matrix(path)
    path.write_text("{not json")
    with pytest.raises(MatrixFormatError):
        load_matrix(path)
