"""Python access to the gencop core: instances, oracles and the float32 model."""

import json

from . import _gencop
from ._gencop import DataError, NumericalError, UsageError, task_ids

__all__ = ["DataError", "Model", "NumericalError", "UsageError", "generate", "solve", "solve_heuristic", "task_ids"]


def generate(task, n, count=1, seed=0, machines=3, capacity=0.0):
    return [json.loads(s) for s in _gencop.generate(task, n, count, seed, machines, capacity)]


def solve(instance):
    return json.loads(_gencop.solve(json.dumps(instance)))


def solve_heuristic(instance):
    return json.loads(_gencop.solve_heuristic(json.dumps(instance)))


class Model:
    def __init__(self, preset="desk", seed=1, tasks=(), _native=None):
        self._m = _native if _native is not None else _gencop.Model(preset, seed, list(tasks))

    @classmethod
    def load(cls, path):
        return cls(_native=_gencop.Model.load(str(path)))

    def save(self, path):
        self._m.save(str(path))

    def register_task(self, task, seed=1):
        self._m.register_task(task, seed)

    @property
    def tasks(self):
        return list(self._m.tasks)

    @property
    def parameter_count(self):
        return self._m.parameter_count

    def train(self, task, n, trajectories, epochs=1, batch=32, lr=5e-4, seed=0, machines=3):
        rows = self._m.train(task, n, trajectories, epochs, batch, lr, seed, machines)
        return [json.loads(r) for r in rows]

    def evaluate(self, task, instances):
        return json.loads(self._m.evaluate(task, [json.dumps(i) for i in instances]))

    def decode(self, instance):
        return json.loads(self._m.decode(json.dumps(instance)))
