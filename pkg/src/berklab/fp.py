"""Dense univariate polynomials over the prime field F_p.

A polynomial is a tuple of ints in ``range(p)``, lowest degree first, with no
trailing zeros; ``()`` is the zero polynomial.  These helpers back both the
residue-field computations of the dynamics module and the rational function
field F_p(t).
"""

from __future__ import annotations

Fp = tuple  # alias used in annotations only


def trim(a) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def from_ints(values, p: int) -> tuple:
    return trim(v % p for v in values)


def degree(a: tuple) -> int:
    return len(a) - 1


def add(a: tuple, b: tuple, p: int) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return trim(out)


def neg(a: tuple, p: int) -> tuple:
    return tuple((-c) % p for c in a)


def sub(a: tuple, b: tuple, p: int) -> tuple:
    return add(a, neg(b, p), p)


def scale(a: tuple, c: int, p: int) -> tuple:
    c %= p
    if c == 0:
        return ()
    return tuple((x * c) % p for x in a)


def shift(a: tuple, k: int) -> tuple:
    """Multiply by x**k."""
    if not a:
        return ()
    return (0,) * k + a


def mul(a: tuple, b: tuple, p: int) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1:
        return scale(b, a[0], p)
    if len(b) == 1:
        return scale(a, b[0], p)
    if min(len(a), len(b)) < 16:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return trim(c % p for c in out)
    # Kronecker substitution: every product coefficient is < n * p**2.
    bits = (min(len(a), len(b)) * (p - 1) ** 2).bit_length() + 1
    prod = _pack(a, bits) * _pack(b, bits)
    mask = (1 << bits) - 1
    out = []
    for _ in range(len(a) + len(b) - 1):
        out.append((prod & mask) % p)
        prod >>= bits
    return trim(out)


def _pack(a: tuple, bits: int) -> int:
    n = 0
    for c in reversed(a):
        n = (n << bits) | c
    return n


def inverse(c: int, p: int) -> int:
    c %= p
    if c == 0:
        raise ZeroDivisionError("inverse of 0 in F_p")
    return pow(c, -1, p)


def monic(a: tuple, p: int) -> tuple:
    if not a:
        return ()
    return scale(a, inverse(a[-1], p), p)


def divmod_(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    inv = inverse(b[-1], p)
    r = list(a)
    q = [0] * (len(a) - len(b) + 1)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = (r[i] * inv) % p
        if c:
            q[i - db] = c
            for j, y in enumerate(b):
                r[i - db + j] = (r[i - db + j] - c * y) % p
    return trim(q), trim(r[:db])


def div_exact(a: tuple, b: tuple, p: int) -> tuple:
    q, r = divmod_(a, b, p)
    if r:
        raise ArithmeticError("inexact polynomial division over F_p")
    return q


def gcd(a: tuple, b: tuple, p: int) -> tuple:
    """Monic gcd; gcd(0, 0) = 0."""
    while b:
        a, b = b, divmod_(a, b, p)[1]
    return monic(a, p)


def evaluate(a: tuple, x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def derivative(a: tuple, p: int) -> tuple:
    return trim((i * c) % p for i, c in enumerate(a) if i)


def order_at_zero(a: tuple) -> int:
    """Multiplicity of the root x = 0; ``a`` must be nonzero."""
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("order of the zero polynomial")


def to_str(a: tuple, var: str) -> str:
    """Canonical text, highest degree first, e.g. ``t^2+2*t+1``."""
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)
