"""Lattice geometry: qubit layouts, string paths, and named region partitions.

Square lattice with edge qubits (torus or cylinder):
  * torus: edge (x, y, o) -> index 2*(y*Lx + x) + o, o=0 horizontal from
    vertex (x,y) to (x+1,y), o=1 vertical from (x,y) to (x,y+1).
  * cylinder: periodic in x, open in y; vertex rows 0..Ly, horizontal edges
    on every vertex row, vertical edges between them.  Indices are assigned
    h-edges first, row by row, then v-edges.

Honeycomb lattice with vertex qubits: unit cell (x, y) holds sublattice
sites A=(x,y,0) and B=(x,y,1); bonds are A(x,y)-B(x,y) (z type),
B(x,y)-A(x+1,y) (x type), B(x,y)-A(x,y+1) (y type).  The hexagon anchored
at (x,y) is the site cycle A(x,y), B(x,y), A(x+1,y), B(x+1,y-1),
A(x+1,y-1), B(x,y-1).

Geometric predicates use doubled integer coordinates so that edge midpoints
and plaquette centers stay integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

KINDS = ("square-edges", "honeycomb-vertices", "triangular-vertices")
BOUNDARIES = ("torus", "cylinder", "open")


@dataclass(frozen=True)
class Lattice:
    """Qubit layout with a bijective index map; immutable after build."""

    kind: str
    Lx: int
    Ly: int
    boundary: str
    n: int
    # kind-specific coordinate tables, filled by build()
    _edge_index: Dict[tuple, int] = field(default_factory=dict, repr=False)
    _edge_coords: Dict[int, tuple] = field(default_factory=dict, repr=False)

    # -- square-edge accessors -------------------------------------------

    def edge(self, x: int, y: int, o: int) -> Optional[int]:
        """Index of edge (x, y, o), or None when off-lattice (open rows)."""
        if self.kind != "square-edges":
            raise ValueError("edge() is defined for square-edges lattices")
        if self.boundary == "torus":
            return 2 * ((y % self.Ly) * self.Lx + (x % self.Lx)) + o
        key = ("h" if o == 0 else "v", x % self.Lx, y)
        return self._edge_index.get(key)

    def edge_coords(self, idx: int) -> tuple:
        """(x, y, o) of an edge index."""
        if self.kind != "square-edges":
            raise ValueError("edge_coords() is defined for square-edges lattices")
        if self.boundary == "torus":
            o = idx & 1
            cell = idx >> 1
            return (cell % self.Lx, cell // self.Lx, o)
        tag, x, y = self._edge_coords[idx]
        return (x, y, 0 if tag == "h" else 1)

    def edge_mid(self, idx: int) -> tuple:
        """Edge midpoint in doubled coordinates."""
        x, y, o = self.edge_coords(idx)
        return (2 * x + 1, 2 * y) if o == 0 else (2 * x, 2 * y + 1)

    def vertices(self):
        if self.boundary == "torus":
            ys = range(self.Ly)
        else:
            ys = range(self.Ly + 1)
        return [(x, y) for y in ys for x in range(self.Lx)]

    def plaquettes(self):
        return [(x, y) for y in range(self.Ly) for x in range(self.Lx)]

    def star_edges(self, x: int, y: int) -> list:
        """Edges meeting vertex (x, y); 3 of 4 on open boundary rows."""
        cands = [
            self.edge(x - 1, y, 0),
            self.edge(x, y, 0),
            self.edge(x, y - 1, 1),
            self.edge(x, y, 1),
        ]
        return [e for e in cands if e is not None]

    def plaquette_edges(self, x: int, y: int) -> list:
        cands = [
            self.edge(x, y, 0),
            self.edge(x, y + 1, 0),
            self.edge(x, y, 1),
            self.edge(x + 1, y, 1),
        ]
        return [e for e in cands if e is not None]

    def delta_partner(self, idx: int) -> Optional[int]:
        """The edge shifted by (-1/2, +1/2): h(x,y) <-> v(x,y) pairing.

        h(x,y) maps to v(x,y); v(x,y) maps to h(x-1, y+1).  Returns None when
        the partner falls off an open boundary.
        """
        x, y, o = self.edge_coords(idx)
        if o == 0:
            return self.edge(x, y, 1)
        return self.edge(x - 1, y + 1, 0)

    # -- honeycomb accessors ---------------------------------------------

    def site(self, x: int, y: int, s: int) -> Optional[int]:
        if self.kind not in ("honeycomb-vertices",):
            raise ValueError("site() is defined for honeycomb lattices")
        if self.boundary == "torus":
            return 2 * ((y % self.Ly) * self.Lx + (x % self.Lx)) + s
        if self.boundary == "cylinder":
            if y < 0 or y >= self.Ly:
                return None
            return 2 * (y * self.Lx + (x % self.Lx)) + s
        return self._edge_index.get(("site", x, y, s))

    def site_coords(self, idx: int) -> tuple:
        if self.boundary in ("torus", "cylinder"):
            s = idx & 1
            cell = idx >> 1
            return (cell % self.Lx, cell // self.Lx, s)
        return self._edge_coords[idx][1:]

    def hexagons(self):
        """Anchors (x, y) of the hexagons present on this lattice."""
        if self.kind != "honeycomb-vertices":
            raise ValueError("hexagons() is defined for honeycomb lattices")
        if self.boundary == "torus":
            return [(x, y) for y in range(self.Ly) for x in range(self.Lx)]
        if self.boundary == "cylinder":
            return [(x, y) for y in range(1, self.Ly) for x in range(self.Lx)]
        return [(x, y) for y in range(self.Ly) for x in range(self.Lx)]

    def hexagon_sites(self, x: int, y: int) -> list:
        """Site indices around hexagon (x, y), in cyclic order."""
        raw = [
            (x, y, 0),
            (x, y, 1),
            (x + 1, y, 0),
            (x + 1, y - 1, 1),
            (x + 1, y - 1, 0),
            (x, y - 1, 1),
        ]
        out = []
        for (sx, sy, ss) in raw:
            idx = self.site(sx, sy, ss)
            if idx is None:
                raise ValueError(f"hexagon ({x},{y}) leaves the lattice")
            out.append(idx)
        return out

    # Kitaev flux pattern around hexagon_sites order.
    HEX_PATTERN = ("X", "Y", "Z", "X", "Y", "Z")

    def site_height(self, idx: int) -> int:
        """Vertical ordering key: A sits below B within a cell row."""
        x, y, s = self.site_coords(idx)
        return 2 * y + s


def build(kind: str, Lx: int, Ly: int, boundary: str = "torus") -> Lattice:
    """Construct a lattice; unsupported (kind, boundary) pairs raise."""
    if kind not in KINDS:
        raise ValueError(f"unknown lattice kind {kind!r}")
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}")
    if Lx < 1 or Ly < 1:
        raise ValueError("Lx and Ly must be >= 1")

    if kind == "square-edges":
        if boundary == "torus":
            return Lattice(kind, Lx, Ly, boundary, 2 * Lx * Ly)
        if boundary == "cylinder":
            edge_index = {}
            edge_coords = {}
            idx = 0
            for y in range(Ly + 1):
                for x in range(Lx):
                    edge_index[("h", x, y)] = idx
                    edge_coords[idx] = ("h", x, y)
                    idx += 1
            for y in range(Ly):
                for x in range(Lx):
                    edge_index[("v", x, y)] = idx
                    edge_coords[idx] = ("v", x, y)
                    idx += 1
            return Lattice(kind, Lx, Ly, boundary, idx, edge_index, edge_coords)
        raise ValueError("square-edges supports torus and cylinder boundaries")

    if kind == "honeycomb-vertices":
        if boundary == "torus":
            return Lattice(kind, Lx, Ly, boundary, 2 * Lx * Ly)
        if boundary == "cylinder":
            return Lattice(kind, Lx, Ly, boundary, 2 * Lx * Ly)
        # open patch: sites are whatever the Lx x Ly block of hexagons touches
        index = {}
        coords = {}
        sites = set()
        for y in range(Ly):
            for x in range(Lx):
                for (sx, sy, ss) in [
                    (x, y, 0), (x, y, 1), (x + 1, y, 0),
                    (x + 1, y - 1, 1), (x + 1, y - 1, 0), (x, y - 1, 1),
                ]:
                    sites.add((sx, sy, ss))
        for i, (sx, sy, ss) in enumerate(sorted(sites)):
            index[("site", sx, sy, ss)] = i
            coords[i] = ("site", sx, sy, ss)
        return Lattice(kind, Lx, Ly, boundary, len(sites), index, coords)

    # triangular-vertices: plain vertex grid, torus only
    if boundary != "torus":
        raise ValueError("triangular-vertices supports only the torus boundary")
    return Lattice(kind, Lx, Ly, boundary, Lx * Ly)


@dataclass(frozen=True)
class Path:
    """A lattice curve: the qubits it touches plus its geometric trace.

    points are doubled coordinates of the successive path nodes (vertices for
    direct paths, plaquette centers for dual paths).  Closed paths repeat
    their first node implicitly.
    """

    qubits: tuple
    closed: bool
    kind: str  # 'direct' or 'dual'
    points: tuple = ()
    directions: tuple = ()


def _wrap_delta(a: int, b: int, period: int) -> int:
    """Shortest signed difference b - a on a ring of the given period."""
    d = (b - a) % period
    if d > period // 2:
        d -= period
    return d


def _direct_path(lat: Lattice, verts: Sequence[tuple], closed: bool) -> Path:
    pts = [(2 * (x % lat.Lx), 2 * (y % lat.Ly)) for (x, y) in verts]
    seq = list(verts) + ([verts[0]] if closed else [])
    edges = []
    dirs = []
    for (x1, y1), (x2, y2) in zip(seq, seq[1:]):
        dx = _wrap_delta(x1 % lat.Lx, x2 % lat.Lx, lat.Lx)
        dy = _wrap_delta(y1 % lat.Ly, y2 % lat.Ly, lat.Ly)
        if (abs(dx), abs(dy)) not in ((1, 0), (0, 1)):
            raise ValueError("direct path steps must join neighboring vertices")
        if dx == 1:
            edges.append(lat.edge(x1, y1, 0))
        elif dx == -1:
            edges.append(lat.edge(x2, y2, 0))
        elif dy == 1:
            edges.append(lat.edge(x1, y1, 1))
        else:
            edges.append(lat.edge(x1, y2, 1))
        dirs.append((dx, dy))
    return Path(tuple(edges), closed, "direct", tuple(pts), tuple(dirs))


def _dual_path(lat: Lattice, plaqs: Sequence[tuple], closed: bool) -> Path:
    pts = [(2 * (x % lat.Lx) + 1, 2 * (y % lat.Ly) + 1) for (x, y) in plaqs]
    seq = list(plaqs) + ([plaqs[0]] if closed else [])
    edges = []
    dirs = []
    for (x1, y1), (x2, y2) in zip(seq, seq[1:]):
        dx = _wrap_delta(x1 % lat.Lx, x2 % lat.Lx, lat.Lx)
        dy = _wrap_delta(y1 % lat.Ly, y2 % lat.Ly, lat.Ly)
        if (abs(dx), abs(dy)) not in ((1, 0), (0, 1)):
            raise ValueError("dual path steps must join neighboring plaquettes")
        if dx == 1:
            edges.append(lat.edge(x1 + 1, y1, 1))
        elif dx == -1:
            edges.append(lat.edge(x1, y1, 1))
        elif dy == 1:
            edges.append(lat.edge(x1, y1 + 1, 0))
        else:
            edges.append(lat.edge(x1, y1, 0))
        dirs.append((dx, dy))
    return Path(tuple(edges), closed, "dual", tuple(pts), tuple(dirs))


def horizontal_loop(lat: Lattice, y: int = 0, dual: bool = False) -> Path:
    """Non-contractible loop winding in x, on the direct or dual lattice."""
    if lat.boundary != "torus":
        raise ValueError("loops wind around the torus only")
    if dual:
        return _dual_path(lat, [(x, y) for x in range(lat.Lx)], closed=True)
    return _direct_path(lat, [(x, y) for x in range(lat.Lx)], closed=True)


def vertical_loop(lat: Lattice, x: int = 0, dual: bool = False) -> Path:
    if lat.boundary != "torus":
        raise ValueError("loops wind around the torus only")
    if dual:
        return _dual_path(lat, [(x, y) for y in range(lat.Ly)], closed=True)
    return _direct_path(lat, [(x, y) for y in range(lat.Ly)], closed=True)


def plaquette_loop(lat: Lattice, x: int, y: int) -> Path:
    """Contractible direct loop around plaquette (x, y)."""
    return _direct_path(lat, [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)], closed=True)


def star_loop(lat: Lattice, x: int, y: int) -> Path:
    """Contractible dual loop around vertex (x, y)."""
    return _dual_path(lat, [(x - 1, y - 1), (x, y - 1), (x, y), (x - 1, y)], closed=True)


def box_dual_loop(lat: Lattice, x0: int, y0: int, w: int, h: int) -> Path:
    """Dual loop through the plaquette ring [x0, x0+w) x [y0, y0+h)."""
    ring = []
    for x in range(x0, x0 + w):
        ring.append((x, y0))
    for y in range(y0 + 1, y0 + h):
        ring.append((x0 + w - 1, y))
    for x in range(x0 + w - 2, x0 - 1, -1):
        ring.append((x, y0 + h - 1))
    for y in range(y0 + h - 2, y0, -1):
        ring.append((x0, y))
    return _dual_path(lat, ring, closed=True)


def box_direct_loop(lat: Lattice, x0: int, y0: int, w: int, h: int) -> Path:
    """Direct loop through the vertex ring of the box [x0, x0+w] x [y0, y0+h]."""
    ring = []
    for x in range(x0, x0 + w):
        ring.append((x, y0))
    for y in range(y0, y0 + h):
        ring.append((x0 + w, y))
    for x in range(x0 + w, x0, -1):
        ring.append((x, y0 + h))
    for y in range(y0 + h, y0, -1):
        ring.append((x0, y))
    return _direct_path(lat, ring, closed=True)


def open_string(lat: Lattice, start: tuple, end: tuple, dual: bool = False) -> Path:
    """L-shaped open path from start to end (vertex or plaquette coords)."""
    x1, y1 = start
    x2, y2 = end
    pts = [(x1, y1)]
    x = x1
    while x != x2:
        x += 1 if x2 > x else -1
        pts.append((x, y1))
    y = y1
    while y != y2:
        y += 1 if y2 > y else -1
        pts.append((x2, y))
    if dual:
        return _dual_path(lat, pts, closed=False)
    return _direct_path(lat, pts, closed=False)


def standard_paths(lat: Lattice, request: str, **params):
    """Named path layouts used by the string-operator constructions."""
    if request == "horizontal-loop":
        return horizontal_loop(lat, params.get("y", 0), params.get("dual", False))
    if request == "vertical-loop":
        return vertical_loop(lat, params.get("x", 0), params.get("dual", False))
    if request == "open-string":
        return open_string(lat, params["start"], params["end"], params.get("dual", False))
    if request == "crossing-pair":
        # one transversal intersection between an x-winding and a y-winding loop
        y0 = params.get("y", lat.Ly // 2)
        x0 = params.get("x", lat.Lx // 2)
        dual_a = params.get("dual_a", False)
        dual_b = params.get("dual_b", False)
        pa = horizontal_loop(lat, y0, dual_a)
        pb = vertical_loop(lat, x0, dual_b)
        return pa, pb
    if request == "statistics-pair":
        cx = params.get("x", lat.Lx // 2)
        cy = params.get("y", lat.Ly // 2)
        if lat.Lx < 3 or lat.Ly < 3:
            raise ValueError("statistics pair needs at least a 3x3 lattice")
        gamma = _direct_path(lat, [(cx + 1, cy), (cx, cy), (cx - 1, cy)], closed=False)
        tau = _direct_path(lat, [(cx, cy + 1), (cx, cy), (cx - 1, cy)], closed=False)
        return gamma, tau
    raise ValueError(f"unknown path request {request!r}")


@dataclass(frozen=True)
class Partition:
    """Named disjoint qubit regions; anything not named is the implicit rest."""

    n: int
    regions: Dict[str, frozenset]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for name, qs in self.regions.items():
            qs = frozenset(qs)
            if any(q < 0 or q >= self.n for q in qs):
                raise ValueError(f"region {name} leaves the lattice")
            if seen & qs:
                raise ValueError(f"region {name} overlaps another region")
            seen |= qs
        object.__setattr__(self, "regions", {k: frozenset(v) for k, v in self.regions.items()})

    def region(self, name: str) -> frozenset:
        return self.regions[name]

    def union(self, names: str) -> frozenset:
        out = frozenset()
        for name in names:
            out |= self.regions.get(name, frozenset())
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "regions": {k: sorted(v) for k, v in self.regions.items()},
            "meta": dict(self.meta),
        }


def lattice_to_json(lat: Lattice) -> dict:
    return {"kind": lat.kind, "Lx": lat.Lx, "Ly": lat.Ly, "boundary": lat.boundary}


def lattice_from_json(doc: dict) -> Lattice:
    return build(doc["kind"], int(doc["Lx"]), int(doc["Ly"]), doc.get("boundary", "torus"))


def _mod_delta(val: int, origin: int, period: Optional[int]) -> int:
    if period is None:
        return val - origin
    return (val - origin) % period


def partition(lat: Lattice, scheme: str, params: dict) -> Partition:
    """Build a named partition; raises when regions would overlap or not fit."""
    if scheme == "levin-wen":
        return _levin_wen(lat, params)
    if scheme == "markov":
        return _markov(lat, params)
    if scheme in ("cylinder-cut-1", "cylinder-cut-2"):
        return _cylinder_cut(lat, scheme, params)
    raise ValueError(f"unknown partition scheme {scheme!r}")


def _levin_wen(lat: Lattice, params: dict) -> Partition:
    """Rectangular annulus split into left arc A, right arc C, and B arcs.

    The hole is the open box of w x h cells at (x0, y0); each arc has
    thickness t cells.  The outer box must fit strictly inside the torus so
    that A and C stay separated by B.
    """
    if lat.kind != "square-edges":
        raise ValueError("levin-wen partition is defined on square-edges lattices")
    x0 = int(params.get("x0", 0))
    y0 = int(params.get("y0", 0))
    w = int(params.get("hole_w", params.get("hole", 2)))
    h = int(params.get("hole_h", params.get("hole", 2)))
    t = int(params.get("thickness", 2))
    if w < 1 or h < 1 or t < 1:
        raise ValueError("hole size and thickness must be >= 1")
    width2 = 2 * (w + 2 * t)
    height2 = 2 * (h + 2 * t)
    per_x = 2 * lat.Lx if lat.boundary == "torus" else None
    per_y = 2 * lat.Ly if lat.boundary == "torus" else None
    if per_x is not None and width2 > per_x:
        raise ValueError("annulus does not fit: outer box wider than the torus")
    if per_y is not None and height2 > per_y:
        raise ValueError("annulus does not fit: outer box taller than the torus")
    ox = 2 * (x0 - t)
    oy = 2 * (y0 - t)
    a, b, c, hole = set(), set(), set(), set()
    for e in range(lat.n):
        mx, my = lat.edge_mid(e)
        dx = _mod_delta(mx, ox, per_x)
        dy = _mod_delta(my, oy, per_y)
        if not (0 <= dx <= width2 and 0 <= dy <= height2):
            continue
        in_hole = (2 * t < dx < 2 * t + 2 * w) and (2 * t < dy < 2 * t + 2 * h)
        if in_hole:
            hole.add(e)
            continue
        if 2 * t <= dy <= 2 * t + 2 * h:
            if dx < 2 * t:
                a.add(e)
                continue
            if dx > 2 * t + 2 * w:
                c.add(e)
                continue
        b.add(e)
    if not a or not c or not hole:
        raise ValueError("annulus does not fit: a region came out empty")
    meta = {
        "scheme": "levin-wen",
        "params": {"x0": x0, "y0": y0, "hole_w": w, "hole_h": h, "thickness": t},
        "hole": sorted(hole),
    }
    return Partition(lat.n, {"A": frozenset(a), "B": frozenset(b), "C": frozenset(c)}, meta)


def _markov(lat: Lattice, params: dict) -> Partition:
    """Central box A, separating band B of width d, everything else C."""
    if lat.kind != "square-edges":
        raise ValueError("markov partition is defined on square-edges lattices")
    x0 = int(params.get("x0", 0))
    y0 = int(params.get("y0", 0))
    w = int(params.get("w", 2))
    d = int(params.get("d", 2))
    if w < 1 or d < 1:
        raise ValueError("box size and separation must be >= 1")
    per_x = 2 * lat.Lx if lat.boundary == "torus" else None
    per_y = 2 * lat.Ly if lat.boundary == "torus" else None
    if per_x is not None and 2 * (w + 2 * d) >= per_x:
        raise ValueError("markov band does not fit on this torus")
    ox, oy = 2 * x0, 2 * y0
    a, b, c = set(), set(), set()
    for e in range(lat.n):
        mx, my = lat.edge_mid(e)
        dx = _mod_delta(mx, ox, per_x)
        dy = _mod_delta(my, oy, per_y)
        if 0 <= dx <= 2 * w and 0 <= dy <= 2 * w:
            a.add(e)
        elif -2 * d <= _signed(dx, per_x) <= 2 * (w + d) and -2 * d <= _signed(dy, per_y) <= 2 * (w + d):
            b.add(e)
        else:
            c.add(e)
    if not a or not b or not c:
        raise ValueError("markov partition came out degenerate")
    meta = {"scheme": "markov", "params": {"x0": x0, "y0": y0, "w": w, "d": d}}
    return Partition(lat.n, {"A": frozenset(a), "B": frozenset(b), "C": frozenset(c)}, meta)


def _signed(delta: int, period: Optional[int]) -> int:
    if period is None:
        return delta
    return delta - period if delta > period // 2 else delta


def _cylinder_cut(lat: Lattice, scheme: str, params: dict) -> Partition:
    """Bipartition of a cylinder by a horizontal cut at vertex row r.

    cut-2 slices between rows; cut-1 slices through the vertical bonds so
    twice as many straddling stabilizers see the boundary.
    """
    if lat.boundary != "cylinder":
        raise ValueError("cylinder cuts require a cylinder lattice")
    r = int(params.get("row", lat.Ly // 2))
    lower = set()
    if lat.kind == "square-edges":
        if not (1 <= r <= lat.Ly):
            raise ValueError("cut row outside the cylinder")
        for e in range(lat.n):
            x, y, o = lat.edge_coords(e)
            if o == 0:
                if y <= r - 1:
                    lower.add(e)
            else:
                if y <= (r - 2 if scheme == "cylinder-cut-1" else r - 1):
                    lower.add(e)
    elif lat.kind == "honeycomb-vertices":
        if not (1 <= r <= lat.Ly - 1):
            raise ValueError("cut row outside the cylinder")
        for idx in range(lat.n):
            x, y, s = lat.site_coords(idx)
            if y < r or (scheme == "cylinder-cut-1" and y == r and s == 0):
                lower.add(idx)
    else:
        raise ValueError("cylinder cuts are defined on square-edges and honeycomb lattices")
    upper = frozenset(range(lat.n)) - lower
    if not lower or not upper:
        raise ValueError("cut produced an empty side")
    meta = {"scheme": scheme, "params": {"row": r}}
    return Partition(lat.n, {"A": frozenset(lower), "B": upper}, meta)


__all__ = [
    "Lattice",
    "Path",
    "Partition",
    "build",
    "standard_paths",
    "partition",
    "horizontal_loop",
    "vertical_loop",
    "plaquette_loop",
    "star_loop",
    "box_dual_loop",
    "box_direct_loop",
    "open_string",
    "lattice_to_json",
    "lattice_from_json",
]
