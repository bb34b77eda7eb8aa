import numpy as np
import pytest

from socrec import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed tests measure compute only."""
    user_f = np.ones((2, 2))
    item_f = np.ones((2, 2))
    users = np.zeros(1, dtype=np.int64)
    items = np.zeros(1, dtype=np.int64)
    values = np.ones(1)
    src = np.array([0], dtype=np.int64)
    dst = np.array([1], dtype=np.int64)
    sim = np.ones(1)
    ptr = np.array([0, 1, 2], dtype=np.int64)
    rated = np.zeros(2, dtype=np.int64)
    rvals = np.ones(2)
    means = np.ones(2)

    _kernels.squared_error_sum(user_f, item_f, users, items, values)
    _kernels.predict_pairs(user_f, item_f, users, items)
    _kernels.rating_gradients(user_f, item_f, users, items, values)
    _kernels.social_penalty(user_f, src, dst, sim)
    _kernels.social_gradient(user_f, src, dst, sim, 0.5)
    _kernels.vss_edges(ptr, rated, rvals, src, dst)
    _kernels.pcc_edges(ptr, rated, rvals, means, src, dst)
