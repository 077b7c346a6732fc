"""Toroidal patch grid with stochastic threat dynamics.

Patches are Calm, Active (a local threat) or Destroyed. Destroyed is
absorbing. Coordinates are ``(x, y)`` with ``x`` the column and ``y`` the
row; cells are stored row-major in a ``(height, width)`` int8 array.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

Coord = tuple[int, int]


class PatchState(enum.IntEnum):
    CALM = 0
    ACTIVE = 1
    DESTROYED = 2


SNAPSHOT_CHARS = {PatchState.CALM: ".", PatchState.ACTIVE: "o", PatchState.DESTROYED: "X"}
PPM_COLORS = {
    PatchState.CALM: (255, 255, 0),
    PatchState.ACTIVE: (255, 165, 0),
    PatchState.DESTROYED: (139, 0, 0),
}


@dataclass(frozen=True)
class EnvParams:
    attack_rate: float = 0.01
    extinction_rate: float = 0.05

    def __post_init__(self) -> None:
        for name in ("attack_rate", "extinction_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"environment.{name}", "must lie in [0,1]", value)


class Grid:
    """Dense toroidal lattice of patch states."""

    def __init__(self, width: int = 50, height: int = 50, cells: np.ndarray | None = None):
        if width < 1 or height < 1:
            raise ConfigError("environment.width/height", "must be >= 1", (width, height))
        self.width = width
        self.height = height
        if cells is None:
            cells = np.zeros((height, width), dtype=np.int8)
        else:
            cells = np.asarray(cells, dtype=np.int8)
            if cells.shape != (height, width):
                raise ValueError(f"cells shape {cells.shape} != {(height, width)}")
        self.cells = cells

    def copy(self) -> "Grid":
        return Grid(self.width, self.height, self.cells.copy())

    def __getitem__(self, xy: Coord) -> PatchState:
        x, y = xy
        return PatchState(int(self.cells[y % self.height, x % self.width]))

    def __setitem__(self, xy: Coord, state: PatchState) -> None:
        x, y = xy
        self.cells[y % self.height, x % self.width] = int(state)

    def count(self, state: PatchState) -> int:
        return int(np.count_nonzero(self.cells == state))

    def counts(self) -> dict[PatchState, int]:
        flat = np.bincount(self.cells.ravel(), minlength=3)
        return {s: int(flat[s]) for s in PatchState}

    def to_text(self, tick: int) -> str:
        lut = np.array([SNAPSHOT_CHARS[s] for s in PatchState])
        rows = ["".join(row) for row in lut[self.cells]]
        return f"tick={tick} w={self.width} h={self.height}\n" + "\n".join(rows) + "\n"

    def to_ppm(self) -> bytes:
        lut = np.array([PPM_COLORS[s] for s in PatchState], dtype=np.uint8)
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + lut[self.cells].tobytes()


def _check_radius(radius: int, width: int, height: int) -> None:
    if radius < 0:
        raise ConfigError("radius", "must be >= 0", radius)
    if 2 * radius + 1 > min(width, height):
        raise ConfigError(
            "radius", f"disc of side {2 * radius + 1} does not fit a {width}x{height} torus", radius
        )


def _wrapped_axes(center: Coord, radius: int, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    _check_radius(radius, width, height)
    x, y = center
    offsets = np.arange(-radius, radius + 1)
    return (x + offsets) % width, (y + offsets) % height


def toroidal_neighborhood(center: Coord, radius: int, width: int, height: int) -> list[Coord]:
    """Return the (2r+1)^2 wrapped coordinates of a Moore disc, row-major."""
    xs, ys = _wrapped_axes(center, radius, width, height)
    return [(int(x), int(y)) for y in ys for x in xs]


def seed_attacks(grid: Grid, attack_rate: float, rng: np.random.Generator) -> int:
    """Flip each Calm patch to Active with probability ``attack_rate``.

    One uniform is drawn for every patch, in row-major order, whatever its
    state; the stream therefore advances identically regardless of the
    grid's history, which keeps paired runs aligned.
    """
    draws = rng.random(grid.cells.shape)
    flip = (grid.cells == PatchState.CALM) & (draws < attack_rate)
    grid.cells[flip] = PatchState.ACTIVE
    return int(np.count_nonzero(flip))


def extinguish(grid: Grid, extinction_rate: float, rng: np.random.Generator) -> int:
    """Revert each Active patch to Calm with probability ``extinction_rate``."""
    draws = rng.random(grid.cells.shape)
    flip = (grid.cells == PatchState.ACTIVE) & (draws < extinction_rate)
    grid.cells[flip] = PatchState.CALM
    return int(np.count_nonzero(flip))


def local_activation_fraction(grid: Grid, center: Coord, radius: int) -> float:
    xs, ys = _wrapped_axes(center, radius, grid.width, grid.height)
    block = grid.cells[np.ix_(ys, xs)]
    return np.count_nonzero(block == PatchState.ACTIVE) / block.size


def any_active(grid: Grid, center: Coord, radius: int) -> bool:
    xs, ys = _wrapped_axes(center, radius, grid.width, grid.height)
    return bool(np.any(grid.cells[np.ix_(ys, xs)] == PatchState.ACTIVE))


def destroy_disc(grid: Grid, center: Coord, radius: int) -> int:
    """Destroy every patch in the Moore disc; return the number newly destroyed."""
    xs, ys = _wrapped_axes(center, radius, grid.width, grid.height)
    idx = np.ix_(ys, xs)
    block = grid.cells[idx]
    fresh = int(np.count_nonzero(block != PatchState.DESTROYED))
    grid.cells[idx] = PatchState.DESTROYED
    return fresh


def activation_field(grid: Grid, center: Coord, reach: int, radius: int) -> np.ndarray:
    """Activation fraction at every cell within ``reach`` of ``center``.

    Returns a ``(2*reach+1, 2*reach+1)`` array indexed ``[dy + reach, dx + reach]``,
    each entry equal to ``local_activation_fraction`` at that offset with the
    given sampling ``radius``.
    """
    _check_radius(reach, grid.width, grid.height)
    _check_radius(radius, grid.width, grid.height)
    span = reach + radius
    x, y = center
    offsets = np.arange(-span, span + 1)
    window = grid.cells[np.ix_((y + offsets) % grid.height, (x + offsets) % grid.width)]
    active = (window == PatchState.ACTIVE).astype(np.int64)
    # box sum over (2r+1)^2 via a padded 2-D prefix sum
    pref = np.zeros((active.shape[0] + 1, active.shape[1] + 1), dtype=np.int64)
    pref[1:, 1:] = active.cumsum(0).cumsum(1)
    side = 2 * radius + 1
    n = 2 * reach + 1
    sums = pref[side:side + n, side:side + n] - pref[:n, side:side + n] - pref[side:side + n, :n] + pref[:n, :n]
    return sums / side**2
