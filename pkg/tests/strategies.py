"""Hypothesis strategies producing random quaternion tensors from a drawn seed."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from quatsylv.qtensor import QTensor, random_qtensor

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=2).map(tuple)


def tensor(rng: np.random.Generator, rows, cols) -> QTensor:
    return random_qtensor(rng, rows, cols)


def low_rank(rng: np.random.Generator, rows, cols, rank: int) -> QTensor:
    """Product of two random factors through a rank-``rank`` middle mode."""
    from quatsylv.qtensor import einstein_product

    return einstein_product(random_qtensor(rng, rows, (rank,)), random_qtensor(rng, (rank,), cols))


@st.composite
def tensors(draw, rows=None, cols=None):
    rng = np.random.default_rng(draw(seeds))
    r = rows if rows is not None else draw(dims)
    c = cols if cols is not None else draw(dims)
    return tensor(rng, r, c)


@st.composite
def maybe_deficient(draw):
    """Random tensor that is rank deficient about half the time."""
    rng = np.random.default_rng(draw(seeds))
    r, c = draw(dims), draw(dims)
    top = min(int(np.prod(r)), int(np.prod(c)))
    if top > 1 and draw(st.booleans()):
        return low_rank(rng, r, c, draw(st.integers(1, top - 1)))
    return tensor(rng, r, c)
