import math

import numpy as np
import pytest

from trajsamp.geometry import ConvexBody
from trajsamp.trajectory import (CircleSet, HyperplaneSet, SpiralSet,
                                 UniformLines2D, UniformLinesD,
                                 UnionHyperplanes, UnionUniform2D)


@pytest.fixture
def unit_disc():
    return ConvexBody.ball([0.0, 0.0], 1.0)


@pytest.fixture
def triangle():
    # {omega_y >= 0, |omega_x| + |omega_y| <= 1}
    return ConvexBody.from_halfspaces([[0, -1], [1, 1], [-1, 1]], [0, 1, 1])


@pytest.fixture
def rectangle():
    return ConvexBody.from_vertices([[-2, -1], [2, -1], [2, 1], [-2, 1]],
                                    symmetric=True)


@pytest.fixture
def ball3():
    return ConvexBody.ball([0.0, 0.0, 0.0], 1.0)


@pytest.fixture
def cuboid123():
    A = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    b = [1, 1, 2, 2, 3, 3]
    return ConvexBody.from_halfspaces(A, b, symmetric=True)


def orthogonal_union(delta1, delta2=None, w1=None, w2=None):
    """Two axis-parallel line families, spacings delta1 (horizontal lines)
    and delta2 (vertical lines)."""
    delta2 = delta1 if delta2 is None else delta2
    w1 = np.zeros(2) if w1 is None else np.asarray(w1, float)
    w2 = np.zeros(2) if w2 is None else np.asarray(w2, float)
    return UnionUniform2D((UniformLines2D(w1, np.array([1.0, 0.0]), delta1),
                           UniformLines2D(w2, np.array([0.0, 1.0]), delta2)))


def orthogonal_planes(n, delta):
    """n mutually orthogonal plane families in R^3, all spaced delta."""
    normals = [np.array([1.0, 0, 0]), np.array([0, 0, 1.0]),
               np.array([0, 1.0, 0])]
    return UnionHyperplanes(tuple(
        HyperplaneSet(np.zeros(3), normals[i], delta) for i in range(n)))


def rectangular_lines_3d(d1, d2):
    return UniformLinesD(np.array([[d1, 0, 0], [0, d2, 0], [0, 0, 1.0]]))


def hexagonal_lines_3d(rho=1.0, shrink=1.0):
    r3 = math.sqrt(3.0)
    v1 = shrink * (math.pi / (r3 * rho)) * np.array([1.0, r3, 0.0])
    v2 = shrink * (2.0 * math.pi / (r3 * rho)) * np.array([1.0, 0.0, 0.0])
    return UniformLinesD(np.array([v1, v2, [0.0, 0.0, 1.0]]))


ORTHO_CRIT_DISC = math.sqrt(2.0) * math.pi       # unit disc, equal spacings
TRIANGLE_CRIT = 2.0 * math.pi                    # 2:1 spacings, unit triangle
PLANE_CRITS = {1: math.pi, 2: math.sqrt(2.0) * math.pi,
               3: math.sqrt(3.0) * math.pi}      # unit ball in R^3
