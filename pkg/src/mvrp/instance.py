"""Cities, instances, Euclidean distances and the plain-text instance format.

File layout (UTF-8, LF line endings, space separated)::

    N 3 DEPOT 1
    1 0.5 0.5
    2 12.25 3
    3 7 30.125

Coordinates are written with 9 significant digits.  Generated instances are
quantized to 9 significant digits when they are created, so writing and
re-reading them is lossless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, ParseError, UnknownCityId
from .rng import make_rng

# Full matrices are cached up to this many cities; larger instances compute
# distances on demand.
MATRIX_CACHE_LIMIT = 2000


@dataclass(frozen=True)
class City:
    id: int
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameter(f"city {self.id} has non-finite coordinates")


@dataclass(frozen=True)
class Instance:
    cities: tuple[City, ...]
    depot_id: int

    def __post_init__(self):
        object.__setattr__(self, "cities", tuple(self.cities))
        if len(self.cities) < 2:
            raise InvalidParameter("an instance needs a depot and at least one city")
        ids = [c.id for c in self.cities]
        if len(set(ids)) != len(ids):
            raise InvalidParameter("city ids must be distinct")
        if self.depot_id not in ids:
            raise InvalidParameter(f"depot {self.depot_id} is not a city of the instance")

    @property
    def n(self) -> int:
        return len(self.cities)

    @property
    def ids(self) -> list[int]:
        return [c.id for c in self.cities]

    @property
    def customer_ids(self) -> list[int]:
        """Non-depot city ids in file order."""
        return [c.id for c in self.cities if c.id != self.depot_id]

    @property
    def depot(self) -> City:
        return self.city(self.depot_id)

    def city(self, city_id: int) -> City:
        for c in self.cities:
            if c.id == city_id:
                return c
        raise UnknownCityId(city_id)

    def coords(self) -> np.ndarray:
        return np.array([(c.x, c.y) for c in self.cities], dtype=np.float64)

    def subinstance(self, city_ids: Sequence[int], relabel: bool = True) -> "Instance":
        """Depot plus ``city_ids``; with ``relabel`` the depot becomes 1 and
        the others 2..n in the given order."""
        chosen = [self.depot] + [self.city(i) for i in city_ids if i != self.depot_id]
        if not relabel:
            return Instance(tuple(chosen), self.depot_id)
        return Instance(
            tuple(City(k + 1, c.x, c.y) for k, c in enumerate(chosen)), depot_id=1
        )


def euclidean_distance(a: City, b: City) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy)


class DistanceMatrix:
    """Symmetric Euclidean distances between the cities of an instance.

    Rows and columns follow the instance's city order.  Entries are computed
    with the same floating point operations as :func:`euclidean_distance`,
    so both agree bit for bit.
    """

    def __init__(self, inst: Instance, cache: bool | None = None):
        self.ids = tuple(inst.ids)
        self.index = {cid: k for k, cid in enumerate(self.ids)}
        self.coords = inst.coords()
        self.coords.setflags(write=False)
        if cache is None:
            cache = len(self.ids) <= MATRIX_CACHE_LIMIT
        self._d = None
        if cache:
            x = self.coords[:, 0]
            y = self.coords[:, 1]
            dx = x[:, None] - x[None, :]
            dy = y[:, None] - y[None, :]
            d = np.sqrt(dx * dx + dy * dy)
            d.setflags(write=False)
            self._d = d

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def cached(self) -> bool:
        return self._d is not None

    @property
    def d(self) -> np.ndarray:
        """The full matrix (built on request when not cached)."""
        if self._d is not None:
            return self._d
        return DistanceMatrix._full(self.coords)

    @staticmethod
    def _full(coords):
        x, y = coords[:, 0], coords[:, 1]
        dx = x[:, None] - x[None, :]
        dy = y[:, None] - y[None, :]
        return np.sqrt(dx * dx + dy * dy)

    def position(self, city_id: int) -> int:
        try:
            return self.index[city_id]
        except KeyError:
            raise UnknownCityId(city_id) from None

    def dist(self, a: int, b: int) -> float:
        i, j = self.position(a), self.position(b)
        if self._d is not None:
            return float(self._d[i, j])
        dx = self.coords[i, 0] - self.coords[j, 0]
        dy = self.coords[i, 1] - self.coords[j, 1]
        return math.sqrt(dx * dx + dy * dy)

    def submatrix(self, city_ids: Sequence[int]) -> np.ndarray:
        """Distances among ``city_ids`` in the given order."""
        pos = np.array([self.position(c) for c in city_ids], dtype=np.intp)
        if self._d is not None:
            return np.ascontiguousarray(self._d[np.ix_(pos, pos)])
        return DistanceMatrix._full(self.coords[pos])


def build_distance_matrix(inst: Instance) -> DistanceMatrix:
    return DistanceMatrix(inst)


class LocalMetric:
    """Distances restricted to a depot and one cluster.

    Local index 0 is the depot; cluster city ``ids[k]`` has local index k+1.
    Used by the optimizers, which evaluate many tours over the same cluster.
    """

    def __init__(self, dm: DistanceMatrix, depot_id: int, city_ids: Sequence[int]):
        city_ids = list(city_ids)
        if depot_id in city_ids:
            raise InvalidParameter("the depot cannot be part of a tour")
        if len(set(city_ids)) != len(city_ids):
            raise InvalidParameter("duplicate city ids in cluster")
        self.depot_id = depot_id
        self.ids = city_ids
        self.local = {cid: k + 1 for k, cid in enumerate(city_ids)}
        self.matrix = dm.submatrix([depot_id] + city_ids)
        self.rows = self.matrix.tolist()

    def length(self, tour: Sequence[int]) -> float:
        if not tour:
            return 0.0
        try:
            idx = [self.local[c] for c in tour]
        except KeyError as exc:
            raise UnknownCityId(exc.args[0]) from None
        return self.local_length(idx)

    def local_length(self, idx: Sequence[int]) -> float:
        rows = self.rows
        prev = 0
        legs = []
        for k in idx:
            legs.append(rows[prev][k])
            prev = k
        legs.append(rows[prev][0])
        return math.fsum(legs)


def tour_length(tour: Sequence[int], depot_id: int, dm: DistanceMatrix) -> float:
    """Length of depot -> tour[0] -> ... -> tour[-1] -> depot.

    Legs are summed with ``math.fsum`` so the result is correctly rounded and
    therefore identical for a tour and its reversal.
    """
    if not tour:
        return 0.0
    stops = [depot_id, *tour, depot_id]
    return math.fsum(dm.dist(a, b) for a, b in zip(stops, stops[1:]))


def _quantize(values: np.ndarray) -> list[float]:
    return [float(f"{v:.9g}") for v in values]


def generate_random_instance(n: int, side: float, depot_index: int, seed: int) -> Instance:
    """``n`` cities uniform in ``[0, side]^2``; city ``depot_index`` (1-based) is the depot."""
    if n < 2:
        raise InvalidParameter("n must be at least 2")
    if not (side > 0 and math.isfinite(side)):
        raise InvalidParameter("side must be positive")
    if not 1 <= depot_index <= n:
        raise InvalidParameter("depot_index must lie in 1..n")
    rng = make_rng(seed)
    pts = rng.uniform(0.0, side, size=(n, 2))
    xs = _quantize(pts[:, 0])
    ys = _quantize(pts[:, 1])
    cities = tuple(City(k + 1, min(xs[k], side), min(ys[k], side)) for k in range(n))
    return Instance(cities, depot_id=depot_index)


def format_instance(inst: Instance) -> str:
    lines = [f"N {inst.n} DEPOT {inst.depot_id}"]
    lines += [f"{c.id} {c.x:.9g} {c.y:.9g}" for c in inst.cities]
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(format_instance(inst), encoding="utf-8", newline="\n")


def parse_instance(text: str, path=None) -> Instance:
    lines = text.split("\n")
    records = [(no, ln.strip()) for no, ln in enumerate(lines, 1)]
    records = [(no, ln) for no, ln in records if ln and not ln.startswith("#")]
    if not records:
        raise ParseError("empty instance file", path=path)
    no, header = records[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "N" or parts[2] != "DEPOT":
        raise ParseError("expected header 'N <n> DEPOT <id>'", no, path)
    try:
        n, depot = int(parts[1]), int(parts[3])
    except ValueError:
        raise ParseError("header counts must be integers", no, path) from None

    cities = []
    seen = set()
    for no, ln in records[1:]:
        fields = ln.split()
        if len(fields) != 3:
            raise ParseError(f"expected 'id x y', got {ln!r}", no, path)
        try:
            cid = int(fields[0])
            x, y = float(fields[1]), float(fields[2])
        except ValueError:
            raise ParseError(f"malformed city line {ln!r}", no, path) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"non-finite coordinate for city {cid}", no, path)
        if cid in seen:
            raise ParseError(f"duplicate city id {cid}", no, path)
        seen.add(cid)
        cities.append(City(cid, x, y))
    if len(cities) != n:
        raise ParseError(f"header declares {n} cities, found {len(cities)}", path=path)
    if depot not in seen:
        raise ParseError(f"depot {depot} is not among the cities", path=path)
    try:
        return Instance(tuple(cities), depot)
    except InvalidParameter as exc:
        raise ParseError(str(exc), path=path) from None


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), path=str(path))
