"""
Arithmetic over the binary extension fields GF(2^m), 1 <= m <= 8.

Elements are plain integers in [0, q-1]; bit i is the coefficient of x^i in
the polynomial basis.  A :class:`FieldSpec` is built once (log/antilog tables
included) and passed explicitly to every operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ElementOutOfRange, NotPrimePowerOfTwo, ReduciblePolynomial, ZeroInverse

# Bit e of each pattern is the x^e term.
DEFAULT_POLYNOMIALS = {
    1: 0b11,          # x + 1 (unused: GF(2) needs no reduction)
    2: 0b111,         # x^2 + x + 1
    3: 0b1011,        # x^3 + x + 1
    4: 0b10011,       # x^4 + x + 1
    5: 0b100101,      # x^5 + x^2 + 1
    6: 0b1000011,     # x^6 + x + 1
    7: 0b10000011,    # x^7 + x + 1
    8: 0b100011011,   # x^8 + x^4 + x^3 + x + 1
}


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mod(a: int, b: int) -> int:
    """Remainder of a / b for polynomials over GF(2)."""
    db = _poly_degree(b)
    while a and _poly_degree(a) >= db:
        a ^= b << (_poly_degree(a) - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..deg/2."""
    deg = _poly_degree(poly)
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for divisor in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, divisor) == 0:
                return False
    return True


def carryless_mul(a: int, b: int, poly: int, m: int) -> int:
    """Shift-and-reduce multiplication, used to build the tables."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if (a >> m) & 1:
            a ^= poly
    return result


@dataclass(frozen=True)
class FieldSpec:
    """The finite field GF(q) with q = 2**m.

    ``exp`` holds two periods of the antilog table so that
    ``exp[log[a] + log[b]]`` never needs a modulo.
    """

    order: int
    degree: int
    polynomial: int
    generator: int
    exp: tuple = field(repr=False)
    log: tuple = field(repr=False)
    mul_table: np.ndarray = field(repr=False, compare=False)
    inv_table: np.ndarray = field(repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.order

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ElementOutOfRange(f"{a} is not an element of GF({self.order})")
        return a

    def add(self, a: int, b: int) -> int:
        return self.check(a) ^ self.check(b)

    def mul(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if self.check(a) == 0:
            raise ZeroInverse("0 has no multiplicative inverse")
        return self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)]

    def __hash__(self):
        return hash((self.order, self.polynomial))


def _find_generator(poly: int, m: int) -> int:
    q = 1 << m
    for g in range(2 if q > 2 else 1, q):
        x, seen = 1, set()
        for _ in range(q - 1):
            seen.add(x)
            x = carryless_mul(x, g, poly, m)
        if len(seen) == q - 1:
            return g
    raise ReduciblePolynomial(f"no generator found for polynomial {poly:#x}")


def gf_create(order: int, reduction_polynomial: int | None = None) -> FieldSpec:
    """Build GF(order) for order = 2**m, 1 <= m <= 8.

    Without ``reduction_polynomial`` the module default for degree m is used
    (x^8+x^4+x^3+x+1 for GF(256)).
    """
    if not isinstance(order, (int, np.integer)) or order < 2 or order & (order - 1):
        raise NotPrimePowerOfTwo(f"field order {order!r} is not a power of two")
    m = int(order).bit_length() - 1
    if m > 8:
        raise NotPrimePowerOfTwo(f"field order {order} exceeds 2**8")
    order = int(order)

    poly = DEFAULT_POLYNOMIALS[m] if reduction_polynomial is None else int(reduction_polynomial)
    if m == 1:
        poly = DEFAULT_POLYNOMIALS[1]
    elif _poly_degree(poly) != m or not is_irreducible(poly):
        raise ReduciblePolynomial(
            f"polynomial {poly:#x} is not an irreducible polynomial of degree {m}"
        )

    g = _find_generator(poly, m)
    exp = [0] * (2 * (order - 1))
    log = [0] * order
    x = 1
    for i in range(order - 1):
        exp[i] = exp[i + order - 1] = x
        log[x] = i
        x = carryless_mul(x, g, poly, m)

    mul_table = np.zeros((order, order), dtype=np.uint8)
    for a in range(1, order):
        for b in range(1, order):
            mul_table[a, b] = exp[log[a] + log[b]]
    inv_table = np.zeros(order, dtype=np.uint8)
    for a in range(1, order):
        inv_table[a] = exp[(order - 1 - log[a]) % (order - 1)]
    mul_table.flags.writeable = False
    inv_table.flags.writeable = False

    return FieldSpec(order, m, poly, g, tuple(exp), tuple(log), mul_table, inv_table)


def gf_add(f: FieldSpec, a: int, b: int) -> int:
    return f.add(a, b)


def gf_mul(f: FieldSpec, a: int, b: int) -> int:
    return f.mul(a, b)


def gf_inv(f: FieldSpec, a: int) -> int:
    return f.inv(a)
