"""Domain tags shared by the estimators and the command line."""

from __future__ import annotations

from dataclasses import dataclass

from .domains import as_point, in_lhat, in_lie_ball, in_tetrablock

__all__ = ["DomainKind", "LIEBALL", "LHAT", "TETRABLOCK", "UNIT_DISC"]


@dataclass(frozen=True)
class DomainKind:
    """Tagged domain identifier selecting membership rule and formulas."""

    name: str  # 'lieball' | 'lhat' | 'tetra' | 'disc'

    def member(self, z) -> bool:
        z = as_point(z)
        if self.name == "lieball":
            return in_lie_ball(z)
        if self.name == "lhat":
            return in_lhat(z)
        if self.name == "tetra":
            return in_tetrablock(z)
        if self.name == "disc":
            return z.size == 1 and abs(z[0]) < 1.0
        raise ValueError(f"unknown domain kind {self.name!r}")

    @staticmethod
    def parse(name: str) -> "DomainKind":
        aliases = {
            "lieball": "lieball",
            "ball": "lieball",
            "lhat": "lhat",
            "tetra": "tetra",
            "tetrablock": "tetra",
            "disc": "disc",
        }
        if name not in aliases:
            raise ValueError(f"unknown domain {name!r} (choose from {sorted(set(aliases))})")
        return DomainKind(aliases[name])


LIEBALL = DomainKind("lieball")
LHAT = DomainKind("lhat")
TETRABLOCK = DomainKind("tetra")
UNIT_DISC = DomainKind("disc")
