import json

import pytest

import gencop


def test_tasks_listed():
    assert len(gencop.task_ids()) == 11
    assert "atsp" in gencop.task_ids()


def test_generate_is_seeded():
    a = gencop.generate("kp", 8, count=3, seed=5)
    b = gencop.generate("kp", 8, count=3, seed=5)
    assert a == b
    assert len(a) == 3


def test_exact_beats_or_ties_heuristic():
    for inst in gencop.generate("atsp", 7, count=4, seed=2):
        exact = gencop.solve(inst)
        heur = gencop.solve_heuristic(inst)
        assert exact["optimal"]
        assert exact["objective"] <= heur["objective"] + 1e-9


def test_model_roundtrip_and_decode(tmp_path):
    m = gencop.Model(tasks=["kp"])
    assert m.tasks == ["kp"]
    inst = gencop.generate("kp", 6, seed=9)[0]
    before = m.decode(inst)
    path = tmp_path / "m.ckpt"
    m.save(path)
    again = gencop.Model.load(path)
    assert again.parameter_count == m.parameter_count
    assert again.decode(inst) == before
    report = again.evaluate("kp", [inst])
    assert report["count"] == 1
    assert report["mean"] >= -1e-9


def test_short_training_runs():
    m = gencop.Model(tasks=["kp"])
    rows = m.train("kp", 6, trajectories=32, epochs=2, batch=8, seed=1)
    assert len(rows) == 2
    assert all(r["task"] == "kp" for r in rows)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        gencop.Model(preset="huge")
    with pytest.raises(ValueError):
        gencop.generate("nope", 5)
    m = gencop.Model()
    with pytest.raises(ValueError):
        m.evaluate("kp", gencop.generate("kp", 5))
