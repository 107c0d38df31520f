"""Deterministic image-method ray tracer for the two-car platoon link.

Geometry: two cars on the x axis (front car body ending at x=0, back car
starting at x=gap), antennas on poles above the roofs. Propagation paths
are the direct ray plus single bounces off three finite reflector planes:
the front car's rear face ("back"), the back car's hood, and the front
car's roof. Each bounce costs a configurable reflection loss; paths are
summed coherently into one pathloss figure.

Car bodies occlude the direct ray. Reflected legs are tested against the
bodies with a small inset so a ray grazing its own reflector is not counted
as blocked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import wavelength_m

_EPS = 1e-3  # box inset (m) for occlusion tests on reflected legs


@dataclass(frozen=True)
class Box:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    zmin: float
    zmax: float

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return (
            (p[:, 0] > self.xmin) & (p[:, 0] < self.xmax)
            & (p[:, 1] > self.ymin) & (p[:, 1] < self.ymax)
            & (p[:, 2] > self.zmin) & (p[:, 2] < self.zmax)
        )

    def shrunk(self, eps: float) -> "Box":
        return Box(
            self.xmin + eps, self.xmax - eps,
            self.ymin + eps, self.ymax - eps,
            self.zmin + eps, self.zmax - eps,
        )

    def blocks_segment(self, a, b) -> np.ndarray:
        """Slab test: do segments a->b pass through the box? a and b broadcast (n,3)."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        b = np.atleast_2d(np.asarray(b, dtype=float))
        a, b = np.broadcast_arrays(a, b)
        d = b - a
        lo = np.array([self.xmin, self.ymin, self.zmin])
        hi = np.array([self.xmax, self.ymax, self.zmax])
        n = len(b)
        t_near = np.zeros(n)
        t_far = np.ones(n)
        hit = np.full(n, True)
        for j in range(3):
            dj = d[:, j]
            aj = a[:, j]
            parallel = np.abs(dj) < 1e-12
            outside = parallel & ((aj <= lo[j]) | (aj >= hi[j]))
            hit &= ~outside
            with np.errstate(divide="ignore", invalid="ignore"):
                t1 = (lo[j] - aj) / dj
                t2 = (hi[j] - aj) / dj
            t_lo = np.where(parallel, 0.0, np.minimum(t1, t2))
            t_hi = np.where(parallel, 1.0, np.maximum(t1, t2))
            t_near = np.maximum(t_near, t_lo)
            t_far = np.minimum(t_far, t_hi)
        return hit & (t_near <= t_far)


@dataclass(frozen=True)
class ReflectorPlane:
    """Axis-aligned finite rectangle: normal along ``axis``, at ``value``."""

    name: str
    axis: int  # 0 = x (vertical face), 2 = z (horizontal surface)
    value: float
    umin: float
    umax: float
    vmin: float
    vmax: float

    def _uv_axes(self):
        return (1, 2) if self.axis == 0 else (0, 1)

    def mirror(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float).copy()
        p[self.axis] = 2.0 * self.value - p[self.axis]
        return p

    def crossing(self, origin, targets) -> tuple[np.ndarray, np.ndarray]:
        """Where segments origin->target cross the plane, and whether that
        crossing lies strictly inside the segment and on the rectangle."""
        origin = np.asarray(origin, dtype=float)
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        d = targets - origin[None, :]
        denom = d[:, self.axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (self.value - origin[self.axis]) / denom
        valid = np.isfinite(t) & (t > 0.0) & (t < 1.0)
        t = np.where(valid, t, 0.5)  # placeholder rows are masked out below
        pts = origin[None, :] + t[:, None] * d
        ua, va = self._uv_axes()
        valid &= (pts[:, ua] >= self.umin) & (pts[:, ua] <= self.umax)
        valid &= (pts[:, va] >= self.vmin) & (pts[:, va] <= self.vmax)
        return pts, valid

    def bounce_points(self, tx, rx) -> tuple[np.ndarray, np.ndarray]:
        """Single-bounce crossing for a transmitter at ``tx`` (image method)."""
        return self.crossing(self.mirror(tx), rx)


@dataclass(frozen=True)
class PlatoonGeometry:
    """Two consecutive cars plus antenna mounts; lengths in meters.

    The front car occupies x in [-car_length, 0], the back car
    [gap, gap + car_length]. Mount heights are measured above the roof.
    """

    car_length: float = 4.5
    car_width: float = 1.8
    car_height: float = 1.5
    gap: float = 3.0
    hood_height: float = 1.0
    hood_length: float = 1.2
    mount_heights: tuple = (0.5, 1.0)
    mount_inset: float = 0.3
    reflection_loss_db: float = 6.0
    max_reflections: int = 1

    def __post_init__(self):
        if self.gap <= 0.0:
            raise ValueError("inter-vehicle gap must be > 0")
        if any(h <= 0.0 for h in self.mount_heights):
            raise ValueError("mounts must sit above the roof plane")
        if self.max_reflections not in (0, 1, 2):
            raise ValueError("reflection order is capped at 2")

    @property
    def front_car(self) -> Box:
        return Box(-self.car_length, 0.0, -self.car_width / 2, self.car_width / 2, 0.0, self.car_height)

    @property
    def back_car(self) -> Box:
        return Box(self.gap, self.gap + self.car_length, -self.car_width / 2, self.car_width / 2, 0.0, self.car_height)

    def bodies(self) -> tuple[Box, Box]:
        return (self.front_car, self.back_car)

    def planes(self) -> tuple[ReflectorPlane, ...]:
        w = self.car_width / 2
        return (
            ReflectorPlane("back", 0, 0.0, -w, w, 0.0, self.car_height),
            ReflectorPlane("hood", 2, self.hood_height, self.gap, self.gap + self.hood_length, -w, w),
            ReflectorPlane("roof", 2, self.car_height, -self.car_length, 0.0, -w, w),
        )

    def tx_mount(self, link: int) -> np.ndarray:
        """Transmit antenna of link 1 or 2, on the front car's rear roof area."""
        h = self.mount_heights[link - 1]
        return np.array([-self.mount_inset, 0.0, self.car_height + h])

    def rx_mount(self, link: int) -> np.ndarray:
        """Receive antenna of link 1 or 2, on the back car's front roof area."""
        h = self.mount_heights[link - 1]
        return np.array([self.gap + self.hood_length + self.mount_inset, 0.0, self.car_height + h])


@dataclass(frozen=True)
class RayPath:
    length_m: float
    loss_db: float  # reflection losses only; spreading handled in the sum
    bounces: tuple
    departure: np.ndarray  # unit vector leaving the transmitter

    @property
    def n_bounces(self) -> int:
        return len(self.bounces)


def _plane_sequences(planes, max_reflections: int):
    seqs = []
    if max_reflections >= 1:
        seqs.extend((p,) for p in planes)
    if max_reflections >= 2:
        seqs.extend((p, q) for p in planes for q in planes if p is not q)
    return seqs


def _chain_entry(tx, pts, seq, bodies, reflection_loss_db):
    """One bounce sequence, evaluated for every receiver point.

    Images unfold the path into a straight line; walking back from the
    receiver recovers the bounce points, each of which must land on its
    rectangle with all legs unobstructed.
    """
    images = [np.asarray(tx, dtype=float)]
    for plane in seq:
        images.append(plane.mirror(images[-1]))
    valid = np.full(len(pts), True)
    targets = pts
    bounces_rev = []
    for k in range(len(seq), 0, -1):
        b, ok = seq[k - 1].crossing(images[k], targets)
        valid &= ok
        bounces_rev.append(b)
        targets = b
    nodes = [np.broadcast_to(images[0], pts.shape)] + bounces_rev[::-1] + [pts]
    length = np.zeros(len(pts))
    for a, b in zip(nodes[:-1], nodes[1:]):
        length += np.linalg.norm(b - a, axis=1)
        for body in bodies:
            valid &= ~body.shrunk(_EPS).blocks_segment(a, b)
    dep = nodes[1] - nodes[0]
    norm = np.linalg.norm(dep, axis=1)
    valid &= norm > 0.0
    dep = dep / np.where(norm > 0.0, norm, 1.0)[:, None]
    return {
        "length": length,
        "valid": valid,
        "departure": dep,
        "loss_db": len(seq) * reflection_loss_db,
        "bounces": tuple(p.name for p in seq),
    }


def trace_field(
    tx,
    points,
    planes=(),
    bodies=(),
    reflection_loss_db: float = 6.0,
    max_reflections: int = 1,
) -> list[dict]:
    """Vectorized trace over many receiver points.

    Returns one entry per candidate path (direct, then per bounce
    sequence): dicts of ``length`` (n,), ``valid`` (n,) bool, ``departure``
    (n,3) unit vectors, ``loss_db`` scalar, ``bounces`` plane names.
    Matches :func:`trace` point-for-point.
    """
    tx = np.asarray(tx, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    entries = []

    d = pts - tx[None, :]
    length = np.linalg.norm(d, axis=1)
    valid = length > 0.0
    for body in bodies:
        valid &= ~body.shrunk(_EPS).blocks_segment(tx, pts)
    dep = np.zeros_like(d)
    nz = length > 0.0
    dep[nz] = d[nz] / length[nz, None]
    entries.append(
        {"length": length, "valid": valid, "departure": dep, "loss_db": 0.0, "bounces": ()}
    )
    for seq in _plane_sequences(planes, max_reflections):
        entries.append(_chain_entry(tx, pts, seq, bodies, reflection_loss_db))
    return entries


def trace(
    tx,
    rx,
    planes=(),
    bodies=(),
    reflection_loss_db: float = 6.0,
    max_reflections: int = 1,
) -> list[RayPath]:
    """Image-method paths from tx to a single rx (direct plus reflections)."""
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    for body in bodies:
        if body.contains(rx[None, :])[0]:
            raise ValueError("receiver position lies inside a car body")
    if np.array_equal(tx, rx):
        raise ValueError("transmitter and receiver coincide")
    entries = trace_field(
        tx, rx[None, :],
        planes=planes, bodies=bodies,
        reflection_loss_db=reflection_loss_db, max_reflections=max_reflections,
    )
    return [
        RayPath(float(e["length"][0]), e["loss_db"], e["bounces"], e["departure"][0])
        for e in entries
        if e["valid"][0]
    ]


def trace_platoon(geom: PlatoonGeometry, tx_mount, rx_pos) -> list[RayPath]:
    """Paths from a platoon transmit mount to an arbitrary receiver point."""
    return trace(
        tx_mount,
        rx_pos,
        planes=geom.planes(),
        bodies=geom.bodies(),
        reflection_loss_db=geom.reflection_loss_db,
        max_reflections=geom.max_reflections,
    )


def coherent_pathloss_db(paths: list[RayPath], carrier_hz: float, tx_gain_fn=None) -> float:
    """Coherent sum of path amplitudes into one pathloss (dB) figure.

    Each path contributes lambda/(4*pi*L) * 10**(-loss/20) * exp(-j*2*pi*L/lambda);
    ``tx_gain_fn(departure_unit_vector) -> dBi`` lets the transmit pattern
    weight each path by its departure direction. Returns +inf when no path
    survives occlusion.
    """
    if not paths:
        return float("inf")
    lam = wavelength_m(carrier_hz)
    total = 0.0 + 0.0j
    for p in paths:
        amp = lam / (4.0 * np.pi * p.length_m) * 10.0 ** (-p.loss_db / 20.0)
        if tx_gain_fn is not None:
            amp *= 10.0 ** (tx_gain_fn(p.departure) / 20.0)
        total += amp * np.exp(-2j * np.pi * p.length_m / lam)
    mag = abs(total)
    if mag == 0.0:
        return float("inf")
    return -20.0 * float(np.log10(mag))
