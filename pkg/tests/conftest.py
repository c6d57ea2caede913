import numpy as np
import pytest

from micz_lab.brackets import Curvature
from micz_lab import sampling


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def states_4c(rng, n, curvature=Curvature.FLAT, for_ks=False):
    return sampling.sample_4c(rng, n, sampling.bounds_4c(curvature, for_ks), curvature)


def states_3(rng, n, pseudo=False, s=None, off_axis=False):
    return sampling.sample_3(rng, n, sampling.bounds_3(pseudo, off_axis), s)
