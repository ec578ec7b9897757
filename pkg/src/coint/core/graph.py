import logging
import threading
from datetime import datetime
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .stage import Stage
from .types import V, StageChange, StageNode

logger = logging.getLogger(__name__)


class AnalysisGraph:
    """Dependency graph of stages with lazy, ordered recomputation"""

    def __init__(self):
        self._nodes: Dict[str, StageNode] = {}
        self._stages: Dict[str, ComputedStage] = {}
        self._lock = threading.RLock()
        self._computation_in_progress: Set[str] = set()

    def add_node(self, stage: "ComputedStage") -> StageNode:
        with self._lock:
            node_id = stage.name
            # Ignore repeated node
            if node_id not in self._nodes:
                self._nodes[node_id] = StageNode(id=node_id)
                self._stages[node_id] = stage
            return self._nodes[node_id]

    def add_dependency(self, dependent: "ComputedStage", dependency: "ComputedStage") -> None:
        with self._lock:
            dep_node = self._nodes[dependency.name]
            dependent_node = self._nodes[dependent.name]

            if dependent.name not in dep_node.dependents:
                dep_node.dependents.append(dependent.name)

            if dependency.name not in dependent_node.dependencies:
                dependent_node.dependencies.append(dependency.name)

    def invalidate_dependents(self, node_id: str) -> Set[str]:
        """
        Marks every transitive dependent of a node as stale.
        Returns the set of newly invalidated nodes.
        """
        with self._lock:
            invalidated: Set[str] = set()

            def _invalidate_recursive(current_id: str) -> None:
                for dependent_id in self._nodes[current_id].dependents:
                    node = self._nodes[dependent_id]
                    if not node.invalidated:
                        node.invalidated = True
                        invalidated.add(dependent_id)
                        _invalidate_recursive(dependent_id)

            _invalidate_recursive(node_id)
            if invalidated:
                logger.debug(f"{node_id} changed; stale: {sorted(invalidated)}")
            return invalidated

    def ensure_current(self, node_id: str) -> None:
        """
        Recomputes the stale ancestors of a node, then the node itself.
        1. Collect the node and its ancestors
        2. Compute the invalidated ones in a topological ordering
        3. Notify change callbacks in the same order, also for the stages
           that completed before a later one raised
        """
        with self._lock:
            sorted_nodes = self._topological_sort(self._ancestors(node_id))

            all_changes: List[Tuple[str, StageChange]] = []
            try:
                for current_id in sorted_nodes:
                    if self._nodes[current_id].invalidated:
                        change = self._compute_single_node(current_id)
                        if change is not None:
                            all_changes.append((current_id, change))
            finally:
                for current_id, change in all_changes:
                    self._stages[current_id].notify_callbacks(change)

    def _ancestors(self, node_id: str) -> Set[str]:
        result: Set[str] = set()
        pending = [node_id]
        while pending:
            current_id = pending.pop()
            if current_id in result:
                continue
            result.add(current_id)
            pending.extend(self._nodes[current_id].dependencies)
        return result

    def _topological_sort(self, node_ids: Set[str]) -> List[str]:
        """
        Returns a topologically sorted list of the nodes that need to be computed.
        Dependencies come before dependents.
        """
        result = []
        visited = set()
        temp_mark = set()

        def visit(node_id: str) -> None:
            if node_id in temp_mark:
                logger.warning(f"Circular dependency detected involving stage {node_id}")
                return
            if node_id not in visited and node_id in self._nodes:
                temp_mark.add(node_id)
                for dep_id in self._nodes[node_id].dependencies:
                    visit(dep_id)
                temp_mark.remove(node_id)
                visited.add(node_id)
                result.append(node_id)

        for node_id in sorted(node_ids):
            if node_id not in visited:
                visit(node_id)

        return result

    def _compute_single_node(self, node_id: str) -> Optional[StageChange]:
        """
        Computes a single node without recursion.
        A failing computation leaves the node invalidated.
        """
        node = self._nodes[node_id]
        stage = self._stages[node_id]

        if node_id in self._computation_in_progress:
            logger.warning(f"Circular dependency detected for stage {node_id}")
            return None

        self._computation_in_progress.add(node_id)
        try:
            change = stage.compute()
            node.invalidated = False
            node.last_computed = datetime.now()
            logger.debug(f"computed stage {node_id}")
            return change
        finally:
            self._computation_in_progress.remove(node_id)

    def get_node_status(self, node_id: str) -> StageNode:
        with self._lock:
            return self._nodes[node_id]

    def get_stage(self, node_id: str) -> "ComputedStage":
        with self._lock:
            return self._stages[node_id]


class ComputedStage(Stage[V]):
    """A stage that is either set directly (a source) or derived from others"""

    def __init__(
        self,
        name: str,
        graph: AnalysisGraph,
        func: Optional[Callable[[], V]] = None,
        dependencies: Sequence["ComputedStage"] = (),
    ):
        super().__init__(name)
        # attach itself to the graph
        self._graph = graph
        self._node = self._graph.add_node(self)
        self._compute_func = func
        for dependency in dependencies:
            self._graph.add_dependency(self, dependency)

    @property
    def is_source(self) -> bool:
        return self._compute_func is None

    def add_change_callback(
        self, subscriber_id: str, callback: Callable[[StageChange[V]], None]
    ) -> None:
        self._node.change_callbacks[subscriber_id] = callback

    def remove_callback(self, subscriber_id: str) -> None:
        if subscriber_id in self._node.change_callbacks:
            del self._node.change_callbacks[subscriber_id]

    def notify_callbacks(self, change: StageChange[V]) -> None:
        for callback in list(self._node.change_callbacks.values()):
            callback(change)

    def handle_change(self, change: StageChange[V]) -> None:
        # A source was set: it is current, everything downstream is stale
        self._node.invalidated = False
        self._node.last_computed = datetime.now()
        self._graph.invalidate_dependents(self.name)
        self.notify_callbacks(change)

    def compute(self) -> Optional[StageChange[V]]:
        if self._compute_func is None:
            return None
        new_value = self._compute_func()
        with self._lock:
            old_value = self._value
            self._value = new_value
            self._last_modified = datetime.now()
        return StageChange(stage=self.name, old_value=old_value, new_value=new_value)

    def value(self) -> V:
        """The current value, recomputing stale upstream stages first."""
        self._graph.ensure_current(self.name)
        with self._lock:
            return self._value
