import os

import pytest

from voxelscore.parallel import effective_workers, run_tasks


def test_effective_workers():
    assert effective_workers(3) == 3
    assert effective_workers(0) == (os.cpu_count() or 1)
    with pytest.raises(ValueError):
        effective_workers(-1)


def test_run_tasks_preserves_order():
    items = list(range(20))
    for workers in (1, 2, 5):
        assert run_tasks(lambda x: x * x, items, workers) == [x * x for x in items]


def test_run_tasks_empty():
    assert run_tasks(lambda x: x, [], 4) == []


def test_run_tasks_propagates_exceptions():
    def boom(x):
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError, match="boom"):
        run_tasks(boom, [1, 2], 2)


def test_run_tasks_disjoint_writes():
    out = [None] * 50

    def write(i):
        out[i] = i + 1

    run_tasks(write, range(50), 8)
    assert out == [i + 1 for i in range(50)]
