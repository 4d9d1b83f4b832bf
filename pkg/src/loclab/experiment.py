"""Shared experiment setup: one place tying dimension, profile, coupling and
density together, so Monte Carlo drivers can sample fields and assemble box
operators with consistent truncation margins."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import disorder, operator, potential
from .lattice import Box, Region


@dataclass
class ExperimentSetup:
    d: int = 1
    lam: float = 1.0
    c: float = 1.0
    profile: str = "alt-exp"
    density: str = "uniform"
    truncation: int | None = None
    c0: float = 0.25  # Combes-Thomas prefactor
    _pot: object = dc_field(default=None, repr=False)

    def potential(self) -> potential.AlloyPotential:
        if self._pot is None or self._pot.lam != self.lam:
            ss = potential.parse_profile(self.profile, self.c, self.d)
            self._pot = potential.AlloyPotential(ss, self.lam, self.truncation)
        return self._pot

    def with_lambda(self, lam: float) -> "ExperimentSetup":
        return ExperimentSetup(self.d, lam, self.c, self.profile,
                               self.density, self.truncation, self.c0)

    def origin_box(self, radius: int) -> Box:
        return Box(tuple([0] * self.d), radius)

    def field_for(self, box: Box, seed: int) -> disorder.DisorderField:
        """Field on the box fattened by the truncation radius."""
        margin = self.potential().R_t
        support = Region.from_box(Box(box.center, box.radius + margin))
        return disorder.sample(support, seed, self.density)

    def operator_on(self, box: Box, field) -> operator.BoxOperator:
        return operator.assemble(box, self.potential(), field)

    def sample_operator(self, radius: int, seed: int):
        box = self.origin_box(radius)
        field = self.field_for(box, seed)
        return field, self.operator_on(box, field)
