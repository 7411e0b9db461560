from __future__ import annotations

import functools
import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tropical_period import gamma as gm  # noqa: E402
from tropical_period import plh as ph  # noqa: E402
from tropical_period.instances import GOLDEN, InstanceSpec, load_instance  # noqa: E402
from tropical_period.lattice_core import PLFunction  # noqa: E402
from tropical_period.radiance import radiance_class  # noqa: E402
from tropical_period.sphere import build_sphere  # noqa: E402
from tropical_period.toric_cohomology import ToricModel  # noqa: E402

import oracles  # noqa: E402


@dataclass
class Context:
    spec: InstanceSpec

    @functools.cached_property
    def fan(self):
        return self.spec.fan

    @functools.cached_property
    def h(self):
        return self.spec.h

    @functools.cached_property
    def B(self):
        return build_sphere(self.fan, self.h)

    @functools.cached_property
    def model(self):
        return ToricModel(self.fan)

    @functools.cached_property
    def c(self):
        return radiance_class(self.model, self.h)

    @functools.cached_property
    def plh(self):
        return ph.build_plh(self.model, self.c)

    @functools.cached_property
    def chars(self):
        return gm.characteristic_data(self.model)

    @functools.cached_property
    def gamma_hat(self):
        return gm.gamma_class_Y(self.chars)

    @functools.cached_property
    def lattice(self):
        return gm.lattice_basis(self.model, self.gamma_hat)


@functools.lru_cache(maxsize=None)
def context(name: str) -> Context:
    if name in GOLDEN:
        return Context(load_instance(name))
    return Context(EXTRA[name]())


def _product(*dims):
    pf = oracles.projective_product(*dims)
    return InstanceSpec("x".join(f"P{n}" for n in dims), pf.fan, PLFunction((1,) * pf.fan.n_rays))


EXTRA = {
    "P1xP1": lambda: _product(1, 1),
    "P1xP2": lambda: _product(1, 2),
    "quintic": lambda: _product(4),
    "hexagon": lambda: InstanceSpec("hexagon", oracles.hexagon(), PLFunction((1,) * 6)),
    # strictly convex h with h - 1 convex but not constant
    "P2_h112": lambda: InstanceSpec("P2_h112", oracles.projective_product(2).fan, PLFunction((1, 1, 2))),
}

# product-of-projective-spaces structure for instances that have one
PRODUCT_DIMS = {"cubic": (2,), "quartic": (3,), "cube": (1, 1, 1), "P1xP1": (1, 1),
                "P1xP2": (1, 2), "quintic": (4,), "P2_h112": (2,)}

K3 = ("quartic", "cube")


@pytest.fixture(params=GOLDEN)
def golden(request) -> Context:
    return context(request.param)


@pytest.fixture(params=GOLDEN + tuple(EXTRA))
def any_instance(request) -> Context:
    return context(request.param)


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
