import pytest

from eadarp.model import Instance, Node


def build(nodes, K=1, capacity=3, Q=14.85, alpha=0.055, beta=0.055,
          gamma=0.4, T_p=600.0, w1=0.75, w2=0.25, travel=None):
    """Shorthand Instance constructor for hand-built test fixtures."""
    return Instance(nodes, K, [capacity] * K, Q, alpha, beta, gamma, T_p,
                    w1, w2, travel=travel)


@pytest.fixture
def line_instance():
    """One request on a line: origin -1, pickup 0, dropoff 10, dest 12.

    Large battery, loose windows -- everything is trivially feasible.
    """
    nodes = [
        Node(1, "pickup", 0.0, 0.0, 2.0, 1, 0.0, 100.0, 30.0),
        Node(2, "dropoff", 10.0, 0.0, 2.0, -1, 0.0, 200.0),
        Node(3, "origin", -1.0, 0.0, 0.0, 0, 0.0, 600.0),
        Node(4, "destination", 12.0, 0.0, 0.0, 0, 0.0, 600.0),
        Node(5, "station", 5.0, 0.0, 0.0, 0, 0.0, 600.0),
    ]
    return build(nodes)
