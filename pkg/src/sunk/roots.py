"""Exact roots of unity represented by integer exponents.

A value is zeta_M ** e for a fixed abstract primitive M-th root zeta_M,
with the compatibility zeta_{cM} ** c == zeta_M.  No complex number is
ever materialized; all comparisons and products are integer arithmetic.
"""

from __future__ import annotations

from math import gcd, lcm


class UnitRootExp:
    """zeta_order ** exponent, stored exactly."""

    __slots__ = ("exponent", "order")

    def __init__(self, exponent: int, order: int):
        if order < 1:
            raise ValueError(f"order must be positive, got {order}")
        self.exponent = exponent % order
        self.order = order

    @classmethod
    def one(cls) -> UnitRootExp:
        return cls(0, 1)

    @classmethod
    def minus_one(cls) -> UnitRootExp:
        return cls(1, 2)

    def reduced_pair(self) -> tuple[int, int]:
        """(exponent, order) with common factors removed; (0, 1) for 1."""
        g = gcd(self.exponent, self.order)
        return self.exponent // g, self.order // g

    def rescaled(self, order: int) -> UnitRootExp:
        """The same value written as a power of zeta_order."""
        e, m = self.reduced_pair()
        if order % m:
            raise ValueError(f"value of order {m} is not a power of zeta_{order}")
        return UnitRootExp(e * (order // m), order)

    def is_one(self) -> bool:
        return self.exponent == 0

    def value_order(self) -> int:
        """Multiplicative order of the value itself."""
        return self.reduced_pair()[1]

    def inverse(self) -> UnitRootExp:
        return UnitRootExp(-self.exponent, self.order)

    def __mul__(self, other: UnitRootExp) -> UnitRootExp:
        m = lcm(self.order, other.order)
        e = self.exponent * (m // self.order) + other.exponent * (m // other.order)
        return UnitRootExp(e, m)

    def __pow__(self, n: int) -> UnitRootExp:
        return UnitRootExp(self.exponent * n, self.order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitRootExp):
            return NotImplemented
        return self.reduced_pair() == other.reduced_pair()

    def __hash__(self) -> int:
        return hash(self.reduced_pair())

    def __repr__(self) -> str:
        return f"UnitRootExp({self.exponent}, {self.order})"

    def __str__(self) -> str:
        e, m = self.reduced_pair()
        if m == 1:
            return "1"
        if m == 2:
            return "-1"
        return f"zeta_{m}^{e}"
