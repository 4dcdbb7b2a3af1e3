"""Floating-point checks of the affine geometry behind the first page.

The standard simplex splits into cake pieces (regions where a chosen set
of barycentric coordinates is minimal).  Two affine maps are verified
numerically: the forward/inverse pair identifying a cake piece with a
smaller simplex, and the reparametrization that exhibits the extra
coordinate gained by adjoining a zero ideal as a suspension coordinate.

The maps are affine with small integer data, so double precision is
benign: membership uses tolerance 1e-9, inverse checks 1e-12.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable

MEMBERSHIP_TOL = 1e-9
INVERSE_TOL = 1e-12


@dataclass(frozen=True)
class SimplexPoint:
    """Barycentric coordinates: nonnegative, summing to 1 (up to tolerance)."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if abs(sum(self.coords) - 1.0) > MEMBERSHIP_TOL:
            raise ValueError("coordinates must sum to 1")
        if any(x < -MEMBERSHIP_TOL for x in self.coords):
            raise ValueError("coordinates must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1


def _coords(x) -> tuple[float, ...]:
    return x.coords if isinstance(x, SimplexPoint) else tuple(float(v) for v in x)


def in_cake_piece(x, piece: Iterable[int], tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether every coordinate indexed by the piece is minimal.

    >>> in_cake_piece((1.0, 0.0, 0.0), [1])
    True
    >>> in_cake_piece((1.0, 0.0, 0.0), [0])
    False
    """
    c = _coords(x)
    return all(c[j] <= c[i] + tol for j in piece for i in range(len(c)))


def cake_affine_maps(n: int) -> tuple[Callable, Callable]:
    """The inverse pair (f, g) carrying the n-simplex onto its 0th cake piece.

    f shaves the 0th coordinate down to a 1/(n+1) share and spreads the
    rest evenly; g undoes it.  Both preserve coordinate sums.
    """
    if n < 1:
        raise ValueError("need n >= 1")

    def f(x) -> tuple[float, ...]:
        c = _coords(x)
        share = c[0] / (n + 1)
        return (share,) + tuple(c[i] + share for i in range(1, n + 1))

    def g(x) -> tuple[float, ...]:
        c = _coords(x)
        return ((n + 1) * c[0],) + tuple(c[i] - c[0] for i in range(1, n + 1))

    return f, g


def suspension_reparam(n: int) -> Callable:
    """Reparametrization adding a suspension coordinate to the n-simplex.

    phi(y, t) moves t * y_min out of every coordinate of y into a new last
    coordinate, for t in [1/(n+2), 1].  Coordinate sums are preserved; the
    new coordinate can never be the uniquely smallest, with equality
    exactly at t = 1/(n+2); boundary points (y_min = 0) stay on the
    boundary for every t.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    t_lo = 1.0 / (n + 2)

    def phi(y, t: float) -> tuple[float, ...]:
        if t < t_lo - MEMBERSHIP_TOL or t > 1.0 + MEMBERSHIP_TOL:
            raise ValueError(f"t must lie in [{t_lo}, 1]")
        c = _coords(y)
        y_min = min(c)
        return tuple(v - t * y_min for v in c) + ((n + 1) * t * y_min,)

    return phi


def sample_simplex(n: int, rng: random.Random) -> tuple[float, ...]:
    """Uniform sample of the n-simplex from normalized exponential draws."""
    draws = [rng.expovariate(1.0) for _ in range(n + 1)]
    total = sum(draws)
    return tuple(d / total for d in draws)


def sample_boundary(n: int, rng: random.Random) -> tuple[float, ...]:
    """Boundary sample: one coordinate forced to zero."""
    point = list(sample_simplex(n, rng))
    j = rng.randrange(n + 1)
    removed = point[j]
    point[j] = 0.0
    scale = 1.0 / (1.0 - removed)
    return tuple(v * scale if i != j else 0.0 for i, v in enumerate(point))


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    ok: bool
    worst: float


def verify_geometry(n: int, samples: int, seed: int) -> list[PropertyCheck]:
    """Deterministic, seeded verification of all simplex properties."""
    rng = random.Random(seed)
    f, g = cake_affine_maps(n)
    phi = suspension_reparam(n)
    checks: list[PropertyCheck] = []

    worst = 0.0
    for _ in range(samples):
        x = sample_simplex(n, rng)
        y = g(f(x))
        worst = max(worst, max(abs(a - b) for a, b in zip(x, y)))
    checks.append(PropertyCheck("inverse_pair", worst <= INVERSE_TOL, worst))

    ok = True
    for _ in range(samples):
        x = sample_simplex(n, rng)
        ok = ok and in_cake_piece(f(x), [0])
    checks.append(PropertyCheck("f_lands_in_piece_0", ok, 0.0))

    worst = 0.0
    for _ in range(samples):
        x = sample_simplex(n, rng)
        worst = max(worst, abs(sum(f(x)) - 1.0))
    checks.append(PropertyCheck("f_preserves_sum", worst <= INVERSE_TOL, worst))

    worst = 0.0
    for _ in range(samples):
        y = sample_simplex(n, rng)
        t = 1.0 / (n + 2) + rng.random() * (1.0 - 1.0 / (n + 2))
        worst = max(worst, abs(sum(phi(y, t)) - 1.0))
    checks.append(PropertyCheck("phi_preserves_sum", worst <= INVERSE_TOL, worst))

    worst = 0.0
    for _ in range(samples):
        y = sample_boundary(n, rng)
        t = 1.0 / (n + 2) + rng.random() * (1.0 - 1.0 / (n + 2))
        image = phi(y, t)
        worst = max(worst, min(image))  # some coordinate must stay ~0
    checks.append(PropertyCheck("phi_collapses_boundary", worst <= MEMBERSHIP_TOL, worst))

    ok = True
    for _ in range(samples):
        y = sample_simplex(n, rng)
        t = 1.0 / (n + 2) + (1e-6 + rng.random() * (1 - 1.0 / (n + 2) - 1e-6))
        image = phi(y, t)
        y_min = min(_coords(y))
        # the new last coordinate never becomes the uniquely smallest
        ok = ok and image[-1] >= y_min - t * y_min - MEMBERSHIP_TOL
        if t > 1.0 / (n + 2) + 1e-9 and y_min > 1e-9:
            ok = ok and image[-1] > y_min - t * y_min
    checks.append(PropertyCheck("phi_avoids_last_piece_interior", ok, 0.0))

    return checks
