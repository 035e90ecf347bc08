import json

import pytest

from knapsack_hierarchy.numerics import DimensionError, Rat
from knapsack_hierarchy.pip_model import InstanceError, PipInstance, is_feasible_point, load_pip, subsystem


def test_validation():
    with pytest.raises(InstanceError):
        PipInstance([[-1]], [1], [1])
    with pytest.raises(InstanceError):
        PipInstance([[3]], [2], [1])
    with pytest.raises(DimensionError):
        PipInstance([[1, 1]], [2], [1])
    with pytest.raises(DimensionError):
        PipInstance([[1]], [2, 3], [1])


def test_subsystem_support_and_lift():
    pip = PipInstance([[1, 0, 2], [0, 0, 1]], [3, 1], [1, 1, 1])
    sub = subsystem(pip, [1])
    assert sub.support == (2,)
    assert sub.lift([Rat(1, 2)]) == (0, 0, Rat(1, 2))
    assert sub.restrict([1, 2, 3]) == (3,)
    assert is_feasible_point(sub, (1,))
    assert not is_feasible_point(sub, (2,))
    with pytest.raises(ValueError):
        subsystem(pip, [])
    with pytest.raises(IndexError):
        subsystem(pip, [2])


def test_json_round_trip(tmp_path):
    pip = PipInstance([[Rat(1, 2), 1]], [Rat(3, 2)], [2, Rat(1, 3)], row_labels=["e"])
    path = tmp_path / "p.json"
    path.write_text(json.dumps(pip.to_json()))
    assert load_pip(path) == pip


def test_json_errors():
    with pytest.raises(InstanceError):
        PipInstance.from_json({"kind": "tree"})
    with pytest.raises(InstanceError):
        PipInstance.from_json({"kind": "pip", "A": [["1"]], "b": ["1"]})
    with pytest.raises(InstanceError):
        PipInstance.from_json({"kind": "pip", "n": 2, "A": [["1"]], "b": ["1"], "w": ["1"]})
