import logging
from collections import Counter

import pytest

from coint.core.graph import AnalysisGraph, ComputedStage
from coint.core.stage import Stage


@pytest.fixture
def chain():
    """a, b -> total -> doubled, with a call counter per derived stage"""
    graph = AnalysisGraph()
    calls = Counter()
    a = ComputedStage("a", graph)
    b = ComputedStage("b", graph)
    a.set(1)
    b.set(2)

    def total():
        calls["total"] += 1
        return a.peek() + b.peek()

    def doubled():
        calls["doubled"] += 1
        return 2 * total_stage.peek()

    total_stage = ComputedStage("total", graph, total, [a, b])
    doubled_stage = ComputedStage("doubled", graph, doubled, [total_stage])
    return graph, calls, a, b, total_stage, doubled_stage


def test_derived_stages_compute_on_read(chain):
    graph, calls, a, b, total, doubled = chain
    assert calls == Counter()
    assert doubled.value() == 6
    assert calls == Counter(total=1, doubled=1)
    assert doubled.value() == 6
    assert calls == Counter(total=1, doubled=1)
    assert not graph.get_node_status("doubled").invalidated


def test_setting_a_source_invalidates_dependents(chain):
    graph, calls, a, b, total, doubled = chain
    doubled.value()
    stale = graph.invalidate_dependents("b")
    assert stale == {"total", "doubled"}
    a.set(10)
    assert graph.get_node_status("total").invalidated
    assert total.value() == 12
    assert graph.get_node_status("doubled").invalidated
    assert doubled.value() == 24
    assert calls == Counter(total=2, doubled=2)


def test_callbacks_follow_recomputation(chain):
    graph, calls, a, b, total, doubled = chain
    seen = []
    doubled.add_change_callback("watch", lambda change: seen.append(change.new_value))
    a.add_change_callback("watch", lambda change: seen.append(("a", change.new_value)))
    doubled.value()
    a.set(4)
    doubled.value()
    assert seen == [6, ("a", 4), 12]
    doubled.remove_callback("watch")
    a.set(5)
    doubled.value()
    assert seen[-1] == ("a", 5)


def test_failed_computation_stays_stale():
    graph = AnalysisGraph()
    source = ComputedStage("source", graph)
    source.set(0)
    attempts = []

    def flaky():
        attempts.append(1)
        if len(attempts) == 1:
            raise RuntimeError("first attempt fails")
        return "ok"

    derived = ComputedStage("derived", graph, flaky, [source])
    with pytest.raises(RuntimeError):
        derived.value()
    assert graph.get_node_status("derived").invalidated
    assert derived.value() == "ok"


def test_completed_stages_notify_when_a_later_stage_fails():
    graph = AnalysisGraph()
    source = ComputedStage("source", graph)
    source.set(3)
    middle = ComputedStage("middle", graph, lambda: source.peek() + 1, [source])

    def broken():
        raise ValueError("downstream failure")

    last = ComputedStage("last", graph, broken, [middle])
    seen = []
    middle.add_change_callback("watch", lambda change: seen.append(change.new_value))
    with pytest.raises(ValueError):
        last.value()
    assert seen == [4]
    assert not graph.get_node_status("middle").invalidated
    assert graph.get_node_status("last").invalidated


def test_cycles_are_reported(caplog):
    graph = AnalysisGraph()
    x = ComputedStage("x", graph, lambda: 1)
    y = ComputedStage("y", graph, lambda: 2, [x])
    graph.add_dependency(x, y)
    with caplog.at_level(logging.WARNING):
        assert x.value() == 1
    assert "Circular dependency" in caplog.text


def test_source_flags(chain):
    graph, calls, a, b, total, doubled = chain
    assert a.is_source
    assert not total.is_source
    assert graph.get_stage("total") is total
    assert total.peek() is None


def test_plain_stage_requires_a_handler():
    with pytest.raises(NotImplementedError):
        Stage("bare").set(1)
