"""Site geometry, hole placement, bonds, and spin angles for the vortex systems.

Geometry convention (config-overridable through the JSON system format):

* A single vortex is the 8 perimeter sites of a 3x3 square block with the
  center removed as the hole.  Labels a..h sweep the perimeter
  counterclockwise starting from the lower-left corner, so the hole sits at
  (1, 1) and site a at (0, 0).
* The combined system stacks two such blocks vertically so they share one
  perimeter edge; the 13 distinct sites keep the a..h labels of the lower
  block and continue i..m over the new perimeter sites of the upper block in
  the same sweep order.  The shared edge midpoint is site f = (1, 2), the
  geometric center of the 3x5 footprint.
* The XXZ chain is an open line of N sites with no holes.

Spin angles: theta_p = pi/2 everywhere (spins in the XY plane) and
xi_p = w * atan2(y_p - y_h, x_p - x_h) + chi, measured from the nearest hole
h with winding w.  Sites equidistant from two holes take the lower-indexed
hole (this covers the shared edge of the combined system, including f).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

_LABELS = "abcdefghijklmnopqrstuvwxyz"

# winding per hole: meron +1, antimeron -1
_VORTEX_WINDING = {"melon": (1,), "antimelon": (-1,), "combined": (1, -1)}


class SystemKind(str, Enum):
    MELON = "melon"
    ANTIMELON = "antimelon"
    COMBINED = "combined"
    XXZ = "xxz"


class BondKind(str, Enum):
    EXCHANGE = "exchange"
    SUPEREXCHANGE = "superexchange"


@dataclass(frozen=True)
class Site:
    label: str
    index: int
    pos: tuple[int, int]


@dataclass(frozen=True)
class Hole:
    pos: tuple[int, int]


@dataclass(frozen=True)
class Bond:
    p: int
    q: int
    kind: BondKind


@dataclass(frozen=True)
class SpinAngles:
    xi: tuple[float, ...]
    theta: tuple[float, ...]


@dataclass(frozen=True)
class SystemSpec:
    kind: SystemKind
    sites: tuple[Site, ...]
    holes: tuple[Hole, ...]
    bonds: tuple[Bond, ...]
    angles: SpinAngles
    winding: tuple[int, ...]
    chi: float = 0.0
    delta: float = 0.0

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.sites)


def _block_perimeter(x0: int, y0: int) -> list[tuple[int, int]]:
    """Perimeter of a 3x3 block, counterclockwise from the lower-left corner."""
    return [
        (x0, y0), (x0 + 1, y0), (x0 + 2, y0), (x0 + 2, y0 + 1),
        (x0 + 2, y0 + 2), (x0 + 1, y0 + 2), (x0, y0 + 2), (x0, y0 + 1),
    ]


def _vortex_positions(kind: SystemKind) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    if kind in (SystemKind.MELON, SystemKind.ANTIMELON):
        return _block_perimeter(0, 0), [(1, 1)]
    positions = _block_perimeter(0, 0)
    for p in _block_perimeter(0, 2):
        if p not in positions:
            positions.append(p)
    return positions, [(1, 1), (1, 3)]


def _enumerate_bonds(
    positions: Sequence[tuple[int, int]], holes: Sequence[tuple[int, int]]
) -> list[Bond]:
    """Exchange bonds at squared distance 1; superexchange = next-nearest pairs
    plus opposite-site pairs straddling a hole.  Deterministic (p, q) order."""
    n = len(positions)
    exchange, superex = [], set()
    for p in range(n):
        for q in range(p + 1, n):
            dx = positions[q][0] - positions[p][0]
            dy = positions[q][1] - positions[p][1]
            d2 = dx * dx + dy * dy
            if d2 == 1:
                exchange.append((p, q))
            elif d2 == 2:
                superex.add((p, q))
    for hx, hy in holes:
        for p in range(n):
            for q in range(p + 1, n):
                if (positions[p][0] + positions[q][0] == 2 * hx
                        and positions[p][1] + positions[q][1] == 2 * hy):
                    superex.add((p, q))
    bonds = [Bond(p, q, BondKind.EXCHANGE) for p, q in sorted(exchange)]
    bonds += [Bond(p, q, BondKind.SUPEREXCHANGE) for p, q in sorted(superex)]
    return bonds


def _angles(
    positions: Sequence[tuple[int, int]],
    holes: Sequence[tuple[int, int]],
    winding: Sequence[int],
    chi: float,
) -> SpinAngles:
    if not holes:
        return SpinAngles(xi=(0.0,) * len(positions), theta=(math.pi / 2,) * len(positions))
    xi = []
    for x, y in positions:
        d2 = [(x - hx) ** 2 + (y - hy) ** 2 for hx, hy in holes]
        k = d2.index(min(d2))  # ties resolve to the lower-indexed hole
        hx, hy = holes[k]
        xi.append(winding[k] * math.atan2(y - hy, x - hx) + chi)
    return SpinAngles(xi=tuple(xi), theta=(math.pi / 2,) * len(positions))


def build_system(
    kind: SystemKind | str,
    n: int | None = None,
    delta: float = 0.0,
    chi: float = 0.0,
) -> SystemSpec:
    """Build one of the four systems with bonds and spin angles populated.

    For XXZ, `n` (>= 2) and `delta` select the chain; the vortex systems
    ignore both.  `chi` is the global phase added to every xi_p.
    """
    kind = SystemKind(kind)
    if kind is SystemKind.XXZ:
        if n is None or n < 2:
            raise ValueError(f"XXZ chain needs n >= 2, got {n}")
        if n > len(_LABELS):
            raise ValueError(f"XXZ chain capped at {len(_LABELS)} sites, got {n}")
        positions = [(k, 0) for k in range(n)]
        holes: list[tuple[int, int]] = []
        winding: tuple[int, ...] = ()
    else:
        positions, holes = _vortex_positions(kind)
        winding = _VORTEX_WINDING[kind.value]
    sites = tuple(Site(_LABELS[i], i, p) for i, p in enumerate(positions))
    return SystemSpec(
        kind=kind,
        sites=sites,
        holes=tuple(Hole(p) for p in holes),
        bonds=tuple(_enumerate_bonds(positions, holes)),
        angles=_angles(positions, holes, winding, chi),
        winding=winding,
        chi=chi,
        delta=delta,
    )


def assign_angles(spec: SystemSpec) -> SpinAngles:
    """Recompute the spin angles of `spec` from its geometry."""
    return _angles([s.pos for s in spec.sites], [h.pos for h in spec.holes],
                   spec.winding, spec.chi)


# ---------------------------------------------------------------------------
# point-group symmetry analysis
# ---------------------------------------------------------------------------

# the 8 operations of the square point group, as 2x2 integer matrices
_POINT_GROUP = [
    ((1, 0), (0, 1)), ((0, -1), (1, 0)), ((-1, 0), (0, -1)), ((0, 1), (-1, 0)),
    ((-1, 0), (0, 1)), ((1, 0), (0, -1)), ((0, 1), (1, 0)), ((0, -1), (-1, 0)),
]


def _transform(pos: tuple[int, int], mat, c2: tuple[int, int]) -> tuple[int, int] | None:
    # act about the centroid, working in doubled coordinates to stay integral
    u, v = 2 * pos[0] - c2[0], 2 * pos[1] - c2[1]
    tu = mat[0][0] * u + mat[0][1] * v + c2[0]
    tv = mat[1][0] * u + mat[1][1] * v + c2[1]
    if tu % 2 or tv % 2:
        return None
    return (tu // 2, tv // 2)


def _bond_coefficients(spec: SystemSpec) -> dict[tuple[int, int], tuple[float, float]]:
    xi, th = spec.angles.xi, spec.angles.theta
    out = {}
    for b in spec.bonds:
        sx = math.cos(xi[b.p]) * math.cos(xi[b.q]) * math.sin(th[b.p]) * math.sin(th[b.q])
        sy = math.sin(xi[b.p]) * math.sin(xi[b.q]) * math.sin(th[b.p]) * math.sin(th[b.q])
        out[(b.p, b.q)] = (sx, sy)
    return out


def point_symmetries(spec: SystemSpec, tol: float = 1e-9) -> list[tuple[int, ...]]:
    """Site permutations induced by square point-group operations that preserve
    sites, holes, bonds, and the bond coupling pattern.

    An operation that swaps every bond's XX and YY couplings simultaneously is
    accepted: a quarter-turn spin rotation about z restores the Hamiltonian, so
    the permutation still acts as a dynamical symmetry on z-basis observables.
    """
    positions = [s.pos for s in spec.sites]
    pos_index = {p: i for i, p in enumerate(positions)}
    hole_set = {h.pos for h in spec.holes}
    nsites = len(positions)
    c2 = (round(2 * sum(x for x, _ in positions) / nsites),
          round(2 * sum(y for _, y in positions) / nsites))
    bond_map = {(b.p, b.q): b.kind for b in spec.bonds}
    coeff = _bond_coefficients(spec)

    perms = []
    for mat in _POINT_GROUP:
        images = [_transform(p, mat, c2) for p in positions]
        if any(im is None or im not in pos_index for im in images):
            continue
        if {_transform(h, mat, c2) for h in hole_set} != hole_set:
            continue
        perm = tuple(pos_index[im] for im in images)
        if sorted(perm) != list(range(nsites)):
            continue
        ok_exact, ok_swap = True, True
        for (p, q), kind in bond_map.items():
            ip, iq = sorted((perm[p], perm[q]))
            if bond_map.get((ip, iq)) != kind:
                ok_exact = ok_swap = False
                break
            cx, cy = coeff[(p, q)]
            tx, ty = coeff[(ip, iq)]
            if abs(tx - cx) > tol or abs(ty - cy) > tol:
                ok_exact = False
            if abs(tx - cy) > tol or abs(ty - cx) > tol:
                ok_swap = False
            if not (ok_exact or ok_swap):
                break
        if ok_exact or ok_swap:
            perms.append(perm)
    return perms


def site_equivalence_classes(spec: SystemSpec) -> list[tuple[str, ...]]:
    """Orbits of the site labels under the valid point symmetries of `spec`."""
    if spec.kind is SystemKind.XXZ:
        raise ValueError("equivalence classes are defined for the vortex systems only")
    n = spec.n_sites
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for perm in point_symmetries(spec):
        for i, j in enumerate(perm):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[rj] = ri
    orbits: dict[int, list[str]] = {}
    for s in spec.sites:
        orbits.setdefault(find(s.index), []).append(s.label)
    return sorted((tuple(sorted(v)) for v in orbits.values()), key=lambda c: c[0])


# ---------------------------------------------------------------------------
# system file format
# ---------------------------------------------------------------------------

def system_to_dict(spec: SystemSpec) -> dict:
    return {
        "kind": spec.kind.value,
        "sites": [{"label": s.label, "pos": [s.pos[0], s.pos[1]]} for s in spec.sites],
        "holes": [[h.pos[0], h.pos[1]] for h in spec.holes],
        "winding": list(spec.winding),
        "chi": spec.chi,
        "delta": spec.delta,
    }


def system_from_dict(data: dict) -> SystemSpec:
    """Rebuild a SystemSpec from the JSON system format.

    Bonds and angles are recomputed from the geometry, so a dumped built-in
    system reloads bit-identically.
    """
    kind = SystemKind(data["kind"])
    positions = [tuple(s["pos"]) for s in data["sites"]]
    labels = [s["label"] for s in data["sites"]]
    if len(set(labels)) != len(labels):
        raise ValueError("site labels must be unique")
    holes = [tuple(h) for h in data["holes"]]
    for h in holes:
        if h in positions:
            raise ValueError(f"hole {h} coincides with a site")
    winding = tuple(data.get("winding", []))
    if holes and len(winding) != len(holes):
        raise ValueError("need one winding number per hole")
    chi = float(data.get("chi", 0.0))
    delta = float(data.get("delta", 0.0))
    sites = tuple(Site(lbl, i, pos) for i, (lbl, pos) in enumerate(zip(labels, positions)))
    return SystemSpec(
        kind=kind,
        sites=sites,
        holes=tuple(Hole(p) for p in holes),
        bonds=tuple(_enumerate_bonds(positions, holes)),
        angles=_angles(positions, holes, winding, chi),
        winding=winding,
        chi=chi,
        delta=delta,
    )


def dump_system(spec: SystemSpec) -> str:
    return json.dumps(system_to_dict(spec), indent=2, sort_keys=True)


def load_system(text: str) -> SystemSpec:
    return system_from_dict(json.loads(text))
