"""Shared numerical configuration for discretization and spectral routines."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ValidationError


@dataclass(frozen=True)
class NumericsConfig:
    trunc_levels: tuple = (40.0, 80.0, 160.0)  # truncation half-widths X
    density: float = 10.0                      # grid cells per unit length
    eta: float | None = None                   # gap shift; None = gap midpoint
    im_tol: float | None = None                # realness threshold; None = auto
    kneser_n: int = 0                          # iterated-log depth
    margin: float = 0.02                       # decision margin around -1/4
    dense_cap: int = 3000                      # largest dense nonsymmetric solve
    k_max: int = 8                             # band search depth per side
    sweep_deltas: tuple = (0.1, 0.05, 0.025)   # edge-approach fractions
    containment_pad: float = 1e-6

    def __post_init__(self):
        if len(self.trunc_levels) < 1 or any(x <= 0 for x in self.trunc_levels):
            raise ValidationError("trunc_levels must be positive")
        if list(self.trunc_levels) != sorted(self.trunc_levels):
            raise ValidationError("trunc_levels must be increasing")
        if self.density <= 0:
            raise ValidationError("density must be positive")
        if self.kneser_n < 0:
            raise ValidationError("kneser_n must be >= 0")
        if self.margin < 0:
            raise ValidationError("margin must be >= 0")

    def with_(self, **kw):
        return replace(self, **kw)


DEFAULT = NumericsConfig()
