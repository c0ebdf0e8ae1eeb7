"""Third-order Taylor jets in ``n`` variables.

A :class:`Jet3` carries a value together with its first, second and third
partial derivatives with respect to ``n`` independent variables.  The
derivative arrays are kept fully symmetric.  Values may carry leading batch
dimensions, so a single jet can represent the same expression at many points
at once: ``v`` has shape ``B``, ``d1`` has shape ``B + (n,)``, ``d2`` has
shape ``B + (n, n)`` and ``d3`` has shape ``B + (n, n, n)``.

The module level functions :func:`sin`, :func:`cos`, :func:`exp`,
:func:`sqrt` and :func:`log` accept either jets or plain numbers/arrays, so a
closed-form expression written with them can be evaluated on floats or
differentiated by passing jets.
"""

from __future__ import annotations

import numpy as np


def _outer2(a, b):
    return a[..., :, None] * b[..., None, :]


def _sym3_from_2x1(m, a):
    # m_ij a_k + m_ik a_j + m_jk a_i
    return (m[..., :, :, None] * a[..., None, None, :]
            + m[..., :, None, :] * a[..., None, :, None]
            + m[..., None, :, :] * a[..., :, None, None])


class Jet3:
    __slots__ = ("v", "d1", "d2", "d3")

    # numpy defers binary operators to the jet's reflected methods
    __array_ufunc__ = None

    def __init__(self, v, d1, d2, d3):
        self.v = np.asarray(v, dtype=float)
        self.d1 = np.asarray(d1, dtype=float)
        self.d2 = np.asarray(d2, dtype=float)
        self.d3 = np.asarray(d3, dtype=float)

    @property
    def n(self) -> int:
        return self.d1.shape[-1]

    @classmethod
    def variable(cls, value, index: int, n: int) -> "Jet3":
        """The coordinate function ``y^index`` evaluated at ``value``."""
        v = np.asarray(value, dtype=float)
        d1 = np.zeros(v.shape + (n,))
        d1[..., index] = 1.0
        return cls(v, d1, np.zeros(v.shape + (n, n)), np.zeros(v.shape + (n, n, n)))

    @classmethod
    def constant(cls, value, n: int) -> "Jet3":
        v = np.asarray(value, dtype=float)
        return cls(v, np.zeros(v.shape + (n,)), np.zeros(v.shape + (n, n)),
                   np.zeros(v.shape + (n, n, n)))

    @classmethod
    def variables(cls, point, n: int | None = None) -> list["Jet3"]:
        """Independent variable jets for a point of shape ``B + (n,)``."""
        point = np.asarray(point, dtype=float)
        n = point.shape[-1] if n is None else n
        return [cls.variable(point[..., i], i, n) for i in range(n)]

    def _lift(self, other) -> "Jet3":
        if isinstance(other, Jet3):
            return other
        return Jet3.constant(other, self.n)

    def _compose(self, u0, u1, u2, u3) -> "Jet3":
        """Chain rule for a scalar function with derivatives u0..u3 at ``v``."""
        u1 = np.asarray(u1, dtype=float)
        u2 = np.asarray(u2, dtype=float)
        u3 = np.asarray(u3, dtype=float)
        f1, f2, f3 = self.d1, self.d2, self.d3
        d1 = u1[..., None] * f1
        d2 = u2[..., None, None] * _outer2(f1, f1) + u1[..., None, None] * f2
        d3 = (u3[..., None, None, None]
              * f1[..., :, None, None] * f1[..., None, :, None] * f1[..., None, None, :]
              + u2[..., None, None, None] * _sym3_from_2x1(f2, f1)
              + u1[..., None, None, None] * f3)
        return Jet3(u0, d1, d2, d3)

    def __add__(self, other):
        o = self._lift(other)
        return Jet3(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.v, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            c = np.asarray(other, dtype=float)
            return Jet3(self.v * c, self.d1 * c[..., None], self.d2 * c[..., None, None],
                        self.d3 * c[..., None, None, None])
        f, g = self, other
        fv, gv = f.v[..., None], g.v[..., None]
        d1 = f.d1 * gv + fv * g.d1
        d2 = (f.d2 * gv[..., None] + _outer2(f.d1, g.d1) + _outer2(g.d1, f.d1)
              + fv[..., None] * g.d2)
        d3 = (f.d3 * gv[..., None, None]
              + _sym3_from_2x1(f.d2, g.d1)
              + _sym3_from_2x1(g.d2, f.d1)
              + fv[..., None, None] * g.d3)
        return Jet3(f.v * g.v, d1, d2, d3)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet3":
        x = self.v
        r = 1.0 / x
        return self._compose(r, -r ** 2, 2.0 * r ** 3, -6.0 * r ** 4)

    def __truediv__(self, other):
        if not isinstance(other, Jet3):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet3):
            return exp(p * log(self))
        p = float(p)
        if p.is_integer() and p >= 0:
            k = int(p)
            out = Jet3.constant(np.ones_like(self.v), self.n)
            for _ in range(k):
                out = out * self
            return out
        x = self.v
        return self._compose(x ** p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2),
                             p * (p - 1) * (p - 2) * x ** (p - 3))

    def __repr__(self):
        return f"Jet3(v={self.v!r}, n={self.n})"


def sin(x):
    if isinstance(x, Jet3):
        s, c = np.sin(x.v), np.cos(x.v)
        return x._compose(s, c, -s, -c)
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet3):
        s, c = np.sin(x.v), np.cos(x.v)
        return x._compose(c, -s, -c, s)
    return np.cos(x)


def exp(x):
    if isinstance(x, Jet3):
        e = np.exp(x.v)
        return x._compose(e, e, e, e)
    return np.exp(x)


def log(x):
    if isinstance(x, Jet3):
        r = 1.0 / x.v
        return x._compose(np.log(x.v), r, -r ** 2, 2.0 * r ** 3)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Jet3):
        return x ** 0.5
    return np.sqrt(x)


def value(x):
    """Order-0 part of a jet, or the argument itself for plain numbers."""
    return x.v if isinstance(x, Jet3) else np.asarray(x, dtype=float)


def stack_jets(entries, n: int, batch_shape=()):
    """Assemble a nested list of jets/numbers into derivative arrays.

    Returns ``(v, d1, d2, d3)`` with shapes ``B + S``, ``B + S + (n,)``,
    ``B + S + (n, n)`` and ``B + S + (n, n, n)``, where ``S`` is the shape of
    the nested list and ``B`` the batch shape.
    """
    arr = np.empty(_nested_shape(entries), dtype=object)
    _fill(arr, entries)
    S = arr.shape
    v = np.empty(tuple(batch_shape) + S)
    d1 = np.empty(tuple(batch_shape) + S + (n,))
    d2 = np.empty(tuple(batch_shape) + S + (n, n))
    d3 = np.empty(tuple(batch_shape) + S + (n, n, n))
    for idx in np.ndindex(*S):
        e = arr[idx]
        if not isinstance(e, Jet3):
            e = Jet3.constant(np.broadcast_to(np.asarray(e, dtype=float), batch_shape), n)
        sl = (Ellipsis,) + idx
        v[sl] = e.v
        d1[sl + (slice(None),)] = e.d1
        d2[sl + (slice(None), slice(None))] = e.d2
        d3[sl + (slice(None),) * 3] = e.d3
    return v, d1, d2, d3


def _nested_shape(entries):
    shape = []
    e = entries
    while isinstance(e, (list, tuple)):
        shape.append(len(e))
        e = e[0] if len(e) else None
    return tuple(shape)


def _fill(arr, entries, prefix=()):
    if isinstance(entries, (list, tuple)):
        for i, e in enumerate(entries):
            _fill(arr, e, prefix + (i,))
    else:
        arr[prefix] = entries
