"""Shared mesh fixtures.

Level convention used throughout the tests: a domain's base mesh comes from
build_mesh at a fixed coarse target_h, and "level n" means n uniform
refinements of that base.
"""

import pytest

from robinspec import geometry


def refined(mesh, times):
    for _ in range(times):
        mesh = geometry.refine(mesh)
    return mesh


def square_mesh(level=0, gamma=None):
    base = geometry.build_mesh(geometry.unit_square(gamma=gamma), 0.75)
    return refined(base, level)


def interval_mesh(n_elements, a=0.0, b=1.0, gamma=None):
    dom = geometry.interval(a, b, gamma=gamma)
    return geometry.build_mesh(dom, (b - a) / n_elements)


def disk_mesh(level=0, segments=16, radius=1.0, gamma=None):
    dom = geometry.disk((0.0, 0.0), radius, segments, gamma=gamma)
    base = geometry.build_mesh(dom, radius / 2.0)
    return refined(base, level)


def triangle_mesh(level=0, gamma=None):
    dom = geometry.polygon([(0, 0), (1, 0), (0, 1)], gamma=gamma)
    base = geometry.build_mesh(dom, 1.5)
    return refined(base, level)


@pytest.fixture(scope="session")
def square_l3():
    return square_mesh(3)


@pytest.fixture(scope="session")
def square_l4():
    return square_mesh(4)


@pytest.fixture(scope="session")
def disk_l2():
    return disk_mesh(2)


@pytest.fixture(scope="session")
def triangle_l3():
    return triangle_mesh(3)
