import itertools

import pytest

from fcmtree.problems import corpus_problem
from fcmtree.trees import Tree, binary_shapes

TOKEN_ARITY = {"t": 0, "n": 0, "T": 2, "N": 2}


def labelings(shape, arity):
    """Every labeling of ``shape`` with symbols of matching arity."""
    nodes = list(shape.positions())
    choices = [[f for f, p in arity.items() if p == len(shape.at(pos).children)] for pos in nodes]
    for labels in itertools.product(*choices):
        lab = dict(zip(nodes, labels))

        def build(t, pos=()):
            return Tree(lab[pos], tuple(build(c, pos + (i,)) for i, c in enumerate(t.children)))

        yield build(shape)


def all_trees(max_nodes, arity=TOKEN_ARITY):
    arities = sorted(set(arity.values()))
    for n, shapes in binary_shapes(max_nodes, arities).items():
        for s in shapes:
            yield from labelings(s, arity)


def tokens(t, token_labels=("t", "T")):
    return sum(1 for n in t.iter_nodes() if n.label in token_labels)


@pytest.fixture(scope="session")
def rtmc():
    return corpus_problem("twoway_token_rtmc")


@pytest.fixture(scope="session")
def pts():
    return corpus_problem("twoway_token_pts")
