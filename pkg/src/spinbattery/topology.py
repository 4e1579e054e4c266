"""Interaction-graph catalog: chains, the supercube and 12-qubit skeletons.

Supercube vertex v is labelled by the 3-bit string binary(v - 1), most
significant bit first. Edges join labels at Hamming distance 1, face
diagonals distance 2 and body diagonals distance 3.
"""

import itertools
import math
import re
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import networkx as nx
import numpy as np

from spinbattery.errors import DomainError
from spinbattery.logger import get_logger

logger = get_logger("topology")

# Squared edge of the icosahedron inscribed in the unit sphere.
ICOSAHEDRON_EDGE_SQUARED = 2 - 2 / math.sqrt(5)


class EdgeClass(StrEnum):
    """Geometric class of an interaction edge."""

    EDGE = "edge"
    FACE_DIAGONAL = "face_diagonal"
    BODY_DIAGONAL = "body_diagonal"


@dataclass(frozen=True, order=True)
class Edge:
    """Undirected interaction between sites i < j (1-based)."""

    i: int
    j: int
    kind: EdgeClass = EdgeClass.EDGE

    def __post_init__(self):
        if self.i >= self.j:
            raise DomainError(f"Edge ({self.i}, {self.j}) is not normalized to i < j")

    @classmethod
    def between(cls, a: int, b: int, kind: EdgeClass = EdgeClass.EDGE) -> "Edge":
        """Build a normalized edge from endpoints given in either order."""
        if a == b:
            raise DomainError(f"Self-loop at site {a}")
        return cls(min(a, b), max(a, b), EdgeClass(kind))

    @property
    def pair(self) -> tuple[int, int]:
        return self.i, self.j


@dataclass(frozen=True)
class SpinTopology:
    """Qubit count plus a validated, connected set of interaction edges."""

    n: int
    edges: tuple[Edge, ...]
    name: str = "custom"
    _pairs: frozenset[tuple[int, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Topology needs at least one qubit, got n={self.n}")
        edges = tuple(sorted(self.edges))
        pairs = [edge.pair for edge in edges]
        if len(set(pairs)) != len(pairs):
            raise DomainError(f"Topology '{self.name}' has duplicate edges")
        for i, j in pairs:
            if not 1 <= i < j <= self.n:
                raise DomainError(
                    f"Edge ({i}, {j}) in '{self.name}' outside sites [1, {self.n}]"
                )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_pairs", frozenset(pairs))
        if not nx.is_connected(self.to_graph()):
            raise DomainError(f"Topology '{self.name}' is not connected")

    def __contains__(self, pair: tuple[int, int]) -> bool:
        a, b = pair
        return (min(a, b), max(a, b)) in self._pairs

    def __len__(self) -> int:
        return len(self.edges)

    def to_graph(self) -> nx.Graph:
        """Return the topology as a networkx graph with `kind` edge attributes."""
        graph = nx.Graph(name=self.name)
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from((e.i, e.j, {"kind": e.kind}) for e in self.edges)
        return graph

    def degrees(self) -> list[int]:
        """Vertex degrees in site order."""
        graph = self.to_graph()
        return [graph.degree(v) for v in range(1, self.n + 1)]

    def with_edges(self, extra: Iterable[Edge], name: str) -> "SpinTopology":
        return SpinTopology(self.n, self.edges + tuple(extra), name)

    def to_edge_list(self) -> str:
        """Serialize to the plain-text edge-list format."""
        lines = [f"n {self.n}"]
        lines.extend(f"{e.i} {e.j} {e.kind}" for e in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str, name: str = "custom") -> "SpinTopology":
        """Parse the plain-text edge-list format.

        Blank lines and lines starting with '#' are skipped. The class column
        is optional and defaults to `edge`.
        """
        n = None
        edges = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if n is None:
                    if parts[0] != "n" or len(parts) != 2:
                        raise DomainError("first line must be 'n <count>'")
                    n = int(parts[1])
                    continue
                if len(parts) not in (2, 3):
                    raise DomainError("expected 'i j [class]'")
                kind = EdgeClass(parts[2]) if len(parts) == 3 else EdgeClass.EDGE
                edges.append(Edge.between(int(parts[0]), int(parts[1]), kind))
            except (ValueError, DomainError) as e:
                raise DomainError(f"edge list line {number}: {e}") from e
        if n is None:
            raise DomainError("edge list is empty")
        return cls(n, tuple(edges), name)

    @classmethod
    def read(cls, path: str | Path) -> "SpinTopology":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise DomainError(f"Cannot read edge list {path}: {e}") from e
        return cls.from_edge_list(text, name=path.stem)


# =============================================================================
# CHAINS
# =============================================================================


def open_chain(n: int) -> SpinTopology:
    """Nearest-neighbour chain 1-2-...-n."""
    if n < 2:
        raise DomainError(f"Open chain needs n >= 2, got {n}")
    return SpinTopology(n, tuple(Edge(i, i + 1) for i in range(1, n)), f"open-{n}")


def closed_chain(n: int) -> SpinTopology:
    """Ring 1-2-...-n-1."""
    if n < 3:
        raise DomainError(f"Closed chain needs n >= 3, got {n}")
    edges = tuple(Edge(i, i + 1) for i in range(1, n)) + (Edge(1, n),)
    return SpinTopology(n, edges, f"closed-{n}")


# =============================================================================
# SUPERCUBE
# =============================================================================


def _hamming(a: int, b: int) -> int:
    return ((a - 1) ^ (b - 1)).bit_count()


def _cube_pairs(distance: int) -> tuple[tuple[int, int], ...]:
    return tuple(
        (a, b)
        for a, b in itertools.combinations(range(1, 9), 2)
        if _hamming(a, b) == distance
    )


BODY_DIAGONALS = _cube_pairs(3)
FACE_DIAGONALS = _cube_pairs(2)
TWO_BODY_DIAGONALS = ((1, 8), (2, 7))
# Face with leading bit 1, i.e. vertices {5, 6, 7, 8}.
TOP_FACE_DIAGONALS = ((5, 8), (6, 7))


def supercube() -> SpinTopology:
    """Eight qubits on the vertices of a cube, coupled along its 12 edges."""
    return SpinTopology(8, tuple(Edge(a, b) for a, b in _cube_pairs(1)), "supercube")


type DiagonalSelection = str | Iterable[tuple[int, int]]


def _select(selection: DiagonalSelection, canonical: tuple) -> Iterable[tuple[int, int]]:
    if not isinstance(selection, str):
        return selection
    named = {
        "none": (),
        "all": canonical,
        "two-body": TWO_BODY_DIAGONALS,
        "top-face": TOP_FACE_DIAGONALS,
    }
    if selection not in named:
        raise DomainError(
            f"Unknown diagonal selection '{selection}'; expected one of {', '.join(named)}"
        )
    return named[selection]


def supercube_augmented(
    body_diagonals: DiagonalSelection = (),
    face_diagonals: DiagonalSelection = (),
    name: str | None = None,
) -> SpinTopology:
    """Supercube plus the requested body and face diagonals.

    Each selection is either explicit vertex pairs or one of the names
    `none`, `all`, `two-body` and `top-face`.
    """
    extra = []
    for selection, canonical, kind in (
        (body_diagonals, BODY_DIAGONALS, EdgeClass.BODY_DIAGONAL),
        (face_diagonals, FACE_DIAGONALS, EdgeClass.FACE_DIAGONAL),
    ):
        for a, b in _select(selection, canonical):
            pair = (min(a, b), max(a, b))
            if pair not in canonical:
                raise DomainError(f"({a}, {b}) is not a canonical {kind} of the cube")
            extra.append(Edge(*pair, kind))
    if name is None:
        body = sum(e.kind is EdgeClass.BODY_DIAGONAL for e in extra)
        face = len(extra) - body
        name = f"supercube+{body}body+{face}face"
    return supercube().with_edges(extra, name)


# =============================================================================
# TWELVE-QUBIT SKELETONS
# =============================================================================


type Point = tuple[float, float, float]


def _lexicographic(point: Point) -> Point:
    return point


def ring_order(point: Point) -> tuple[float, float]:
    """Sort key: top layer first, then counterclockwise from +x within a layer.

    The numbering fixes which way every i < j edge points, and with it the sign
    pattern the DM term sees around each triangular face.
    """
    x, y, z = point
    azimuth = math.atan2(y, x) % (2 * math.pi)
    if math.isclose(azimuth, 2 * math.pi):
        azimuth = 0.0
    return round(-z, 9), round(azimuth, 9)


def _skeleton(
    name: str,
    points: Iterable[Sequence[float]],
    squared_distance: float,
    order: Callable[[Point], tuple] = _lexicographic,
) -> SpinTopology:
    """Join every pair of points at the given squared distance.

    Sites are numbered by sorting the points with `order`.
    """
    coords = sorted((tuple(float(c) for c in p) for p in points), key=order)
    coords_array = np.array(coords)
    edges = []
    for a, b in itertools.combinations(range(len(coords)), 2):
        d2 = float(np.sum((coords_array[a] - coords_array[b]) ** 2))
        if math.isclose(d2, squared_distance, rel_tol=1e-9):
            edges.append(Edge(a + 1, b + 1))
    logger.debug(f"Built skeleton {name}: {len(coords)} vertices, {len(edges)} edges")
    return SpinTopology(len(coords), tuple(edges), name)


def cube_extension_12() -> SpinTopology:
    """Two unit cubes sharing the face x = 1: the supercube plus a second cube.

    Sites 1-8 keep their supercube labels; sites 9-12 are the new face x = 2.
    """
    points = itertools.product(range(3), range(2), range(2))
    return _skeleton("cube-extension-12", points, 1.0)


def cuboctahedron_12() -> SpinTopology:
    """Cuboctahedron skeleton from the permutations of (+-1, +-1, 0).

    Numbered in three square layers along z, each counterclockwise from +x.
    """
    points = set()
    for signs in itertools.product((-1, 1), repeat=2):
        for zero_axis in range(3):
            point = list(signs)
            point.insert(zero_axis, 0)
            points.add(tuple(point))
    return _skeleton("cuboctahedron-12", points, 2.0, order=ring_order)


def icosahedron_12() -> SpinTopology:
    """Unit icosahedron with a vertex at each pole.

    Site 1 is the north pole, 2-6 the upper pentagon, 7-11 the lower pentagon
    (turned by 36 degrees) and 12 the south pole.
    """
    height, radius = 1 / math.sqrt(5), 2 / math.sqrt(5)
    points = [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]
    for k in range(5):
        upper, lower = 2 * math.pi * k / 5, 2 * math.pi * k / 5 + math.pi / 5
        points.append((radius * math.cos(upper), radius * math.sin(upper), height))
        points.append((radius * math.cos(lower), radius * math.sin(lower), -height))
    return _skeleton("icosahedron-12", points, ICOSAHEDRON_EDGE_SQUARED, order=ring_order)


# =============================================================================
# CATALOG
# =============================================================================

CATALOG: dict[str, Callable[[], SpinTopology]] = {
    "open": lambda: open_chain(8),
    "closed": lambda: closed_chain(8),
    "supercube": supercube,
    "supercube-2body": lambda: supercube_augmented(
        TWO_BODY_DIAGONALS, name="supercube-2body"
    ),
    "supercube-4body": lambda: supercube_augmented(
        BODY_DIAGONALS, name="supercube-4body"
    ),
    "supercube-topface": lambda: supercube_augmented(
        face_diagonals=TOP_FACE_DIAGONALS, name="supercube-topface"
    ),
    "supercube-allface": lambda: supercube_augmented(
        face_diagonals=FACE_DIAGONALS, name="supercube-allface"
    ),
    "supercube-2body-topface": lambda: supercube_augmented(
        TWO_BODY_DIAGONALS, TOP_FACE_DIAGONALS, name="supercube-2body-topface"
    ),
    "cube-extension-12": cube_extension_12,
    "cuboctahedron-12": cuboctahedron_12,
    "icosahedron-12": icosahedron_12,
}

_CHAIN_PATTERN = re.compile(r"^(open|closed)-(\d+)$")


def topology_by_name(name: str) -> SpinTopology:
    """Look up a catalog topology; `open-<n>` and `closed-<n>` give chains of any length."""
    if name in CATALOG:
        return CATALOG[name]()
    match = _CHAIN_PATTERN.match(name)
    if match:
        kind, n = match.group(1), int(match.group(2))
        return open_chain(n) if kind == "open" else closed_chain(n)
    available = ", ".join(sorted(CATALOG))
    raise DomainError(f"Unknown topology '{name}'. Available topologies: {available}")
