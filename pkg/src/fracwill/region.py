''' Planar regions and the grid quadrature behind the region-based curvature
oracle.

Every region answers :py:meth:`RegionSpec.side` with +1 in the complement,
-1 in the region and 0 on the boundary.
'''
from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
import math
from typing import List, Optional
import numpy

from fracwill.config import OracleConfig
from fracwill.curve import ArcCurve
from fracwill.error import ParameterError
from fracwill.util import parallel_map

LOGGER = logging.getLogger(__name__)


class RegionSpec(ABC):
    ''' Abstract base for a region E with boundary.
    '''

    #: True if the region is contained in a bounded set
    bounded = True

    @abstractmethod
    def side(self, points) -> numpy.ndarray:
        ''' Classify points, shape (..., 2), relative to the region. '''
        raise NotImplementedError()

    def extent(self, point) -> float:
        ''' The largest distance from a point to the region. '''
        raise NotImplementedError()

    def exit_radius(self, point, directions) -> numpy.ndarray:
        ''' For an unbounded convex region and a boundary point, the distance
        along each ray at which it leaves the region, zero for rays which
        start outside and infinity for rays which never leave.
        '''
        raise NotImplementedError()

    def tail_sign(self) -> int:
        ''' Sign applied to the far-field tail. '''
        return 1

    def complement(self):
        return Complement(self)


class Complement(RegionSpec):
    ''' The closure of the complement of another region.
    '''

    def __init__(self, inner: RegionSpec):
        self.inner = inner
        self.bounded = inner.bounded

    def side(self, points):
        return -self.inner.side(points)

    def extent(self, point):
        return self.inner.extent(point)

    def exit_radius(self, point, directions):
        return self.inner.exit_radius(point, directions)

    def tail_sign(self):
        return -self.inner.tail_sign()

    def complement(self):
        return self.inner


class HalfPlane(RegionSpec):
    ''' The half-plane ``{y : <y - point, normal> <= 0}`` with outward normal.
    '''
    bounded = False

    def __init__(self, normal=(0.0, -1.0), point=(0.0, 0.0)):
        normal = numpy.asarray(normal, dtype=float)
        self.normal = normal / numpy.linalg.norm(normal)
        self.point = numpy.asarray(point, dtype=float)

    def side(self, points):
        return numpy.sign((numpy.asarray(points) - self.point) @ self.normal).astype(int)

    def exit_radius(self, point, directions):
        inward = directions @ self.normal < 0
        return numpy.where(inward, math.inf, 0.0)


class Disk(RegionSpec):
    ''' A closed disk. '''

    def __init__(self, center=(0.0, 0.0), radius: float = 1.0):
        if not radius > 0:
            raise ParameterError('Disk radius must be positive')
        self.center = numpy.asarray(center, dtype=float)
        self.radius = float(radius)

    def side(self, points):
        rel = numpy.asarray(points) - self.center
        return numpy.sign(numpy.hypot(rel[..., 0], rel[..., 1]) - self.radius).astype(int)

    def extent(self, point):
        return float(numpy.linalg.norm(numpy.asarray(point) - self.center)) + self.radius


def _scanline_side(vertices, points):
    ''' Even-odd membership of points in a polygon, grouping points by row.
    '''
    points = numpy.asarray(points, dtype=float)
    shape = points.shape[:-1]
    flat = points.reshape(-1, 2)
    start = vertices
    end = numpy.roll(vertices, -1, axis=0)
    ylo = numpy.minimum(start[:, 1], end[:, 1])
    yhi = numpy.maximum(start[:, 1], end[:, 1])
    sloped = yhi > ylo

    out = numpy.ones(len(flat), dtype=int)
    order = numpy.argsort(flat[:, 1], kind='stable')
    rows, first = numpy.unique(flat[order, 1], return_index=True)
    bounds = list(first) + [len(order)]
    for ix, yval in enumerate(rows):
        crossing = sloped & (ylo <= yval) & (yval < yhi)
        if not numpy.any(crossing):
            continue
        sta, sto = start[crossing], end[crossing]
        xcross = numpy.sort(sta[:, 0] + (yval - sta[:, 1]) * (sto[:, 0] - sta[:, 0]) / (sto[:, 1] - sta[:, 1]))
        sel = order[bounds[ix]:bounds[ix + 1]]
        xval = flat[sel, 0]
        left = numpy.searchsorted(xcross, xval, side='left')
        right = numpy.searchsorted(xcross, xval, side='right')
        inside = left % 2 == 1
        out[sel] = numpy.where(right > left, 0, numpy.where(inside, -1, 1))
    return out.reshape(shape)


class Polygon(RegionSpec):
    ''' The interior of a simple polygon. '''

    def __init__(self, vertices):
        self.vertices = numpy.asarray(vertices, dtype=float)
        if len(self.vertices) < 3:
            raise ParameterError('A polygon needs at least three vertices')

    def side(self, points):
        return _scanline_side(self.vertices, points)

    def extent(self, point):
        return float(numpy.max(numpy.linalg.norm(self.vertices - numpy.asarray(point), axis=1)))


class CurveInterior(Polygon):
    ''' The interior of a closed sampled curve, as the polygon of its nodes. '''

    def __init__(self, curve: ArcCurve):
        if not curve.closed:
            raise ParameterError('An open curve has no interior')
        super().__init__(curve.nodes)
        self.curve = curve


@dataclass
class BarrierSpec(object):
    ''' The convex barrier graph ``g`` with slope ``-m`` left of the origin,
    a flat part of length ``t_tilde`` and slope ``m1`` after it.
    '''
    #: Magnitude of the left slope
    m: float
    #: Right slope
    m1: float
    #: Length of the flat segment
    t_tilde: float

    def __post_init__(self):
        if not (self.m > 0 and self.m1 >= 0 and self.t_tilde > 0):
            raise ParameterError('Barrier requires m > 0, m1 >= 0 and t_tilde > 0')

    def graph(self, xval) -> numpy.ndarray:
        xval = numpy.asarray(xval, dtype=float)
        return numpy.where(xval < 0, -self.m * xval,
                           numpy.where(xval < self.t_tilde, 0.0, self.m1 * (xval - self.t_tilde)))

    def slope(self, xval, direction) -> numpy.ndarray:
        ''' One-sided slope at xval, from the right when direction > 0. '''
        xval = numpy.asarray(xval, dtype=float)
        right = numpy.where(xval < 0, -self.m, numpy.where(xval < self.t_tilde, 0.0, self.m1))
        left = numpy.where(xval <= 0, -self.m, numpy.where(xval <= self.t_tilde, 0.0, self.m1))
        return numpy.where(direction > 0, right, left)

    @property
    def kinks(self) -> List[float]:
        return [0.0, self.t_tilde]


class Wedge(RegionSpec):
    ''' The epigraph of a barrier graph. '''
    bounded = False

    def __init__(self, barrier: BarrierSpec):
        self.barrier = barrier

    def side(self, points):
        points = numpy.asarray(points, dtype=float)
        return numpy.sign(self.barrier.graph(points[..., 0]) - points[..., 1]).astype(int)

    def exit_radius(self, point, directions):
        ''' Walks the convex excess ``f(r) = g(x + r e1) - y - r e2`` over
        its breakpoints to find where it turns positive.
        '''
        bar = self.barrier
        xpt, ypt = float(point[0]), float(point[1])
        radii = numpy.empty(len(directions))
        for ix, (ex, ey) in enumerate(directions):
            start_slope = ex * float(bar.slope(xpt, numpy.sign(ex))) - ey if ex != 0 else -ey
            if start_slope >= 0:
                radii[ix] = 0.0
                continue
            brk = sorted(r for r in ((k - xpt) / ex for k in bar.kinks if ex != 0) if r > 0)
            prev_r, prev_f = 0.0, float(bar.graph(xpt)) - ypt
            found = math.inf
            for rad in brk + [None]:
                if rad is None:
                    tail = ex * float(bar.slope(xpt + (prev_r + 1.0) * ex, numpy.sign(ex))) - ey if ex != 0 else -ey
                    if tail > 0:
                        found = prev_r - prev_f / tail
                    break
                fval = float(bar.graph(xpt + rad * ex)) - ypt - rad * ey
                if fval > 0:
                    found = prev_r + (rad - prev_r) * (-prev_f) / (fval - prev_f)
                    break
                prev_r, prev_f = rad, fval
            radii[ix] = found
        return radii


@dataclass
class GridSums(object):
    ''' Truncated principal-value integrals for a list of excluded radii. '''
    #: Excluded ball radii
    eps: numpy.ndarray
    #: Integral over the annulus between each radius and the outer radius
    sums: numpy.ndarray
    #: Far-field integral beyond the outer radius
    tail: float
    #: Outer radius of the gridded disk
    radius: float


def outer_radius(regions, point, config: OracleConfig) -> float:
    ''' Radius of the gridded disk around a point, covering every bounded
    region and aligned to the grid.
    '''
    need = config.box_half
    for region in regions:
        if region.bounded:
            need = max(need, region.extent(point) * (1 + 1e-9))
    cells = int(math.ceil(need / config.grid_h))
    return cells * config.grid_h


def _tail(region: RegionSpec, point, s: float, radius: float, samples: int) -> float:
    if region.bounded:
        return 2 * math.pi * radius ** -s / s
    theta = (numpy.arange(samples) + 0.5) * (2 * math.pi / samples)
    dirs = numpy.stack([numpy.cos(theta), numpy.sin(theta)], axis=1)
    exits = region.exit_radius(point, dirs)
    with numpy.errstate(divide='ignore'):
        vals = numpy.where(
            exits <= radius, radius ** -s / s,
            numpy.where(numpy.isinf(exits), -radius ** -s / s, (2 * exits ** -s - radius ** -s) / s)
        )
    return region.tail_sign() * float(numpy.sum(vals)) * (2 * math.pi / samples)


def _strip_sums(region, point, s, eps, radius, step, sub, lower, upper, ncols):
    ''' Sums for grid rows ``lower`` to ``upper`` of cells centred at
    ``point + (k + 1/2) step``.
    '''
    circles = numpy.concatenate([eps, [radius]])
    krows = numpy.arange(lower, upper)
    kcols = numpy.arange(-ncols, ncols)
    cx = point[0] + (kcols + 0.5) * step
    cy = point[1] + (krows + 0.5) * step
    gx, gy = numpy.meshgrid(cx, cy)
    centres = numpy.stack([gx, gy], axis=-1)

    corner_x = point[0] + numpy.arange(-ncols, ncols + 1) * step
    corner_y = point[1] + numpy.arange(lower, upper + 1) * step
    hx, hy = numpy.meshgrid(corner_x, corner_y)
    corner_side = region.side(numpy.stack([hx, hy], axis=-1))
    centre_side = region.side(centres)
    quad = numpy.stack([corner_side[:-1, :-1], corner_side[:-1, 1:], corner_side[1:, :-1], corner_side[1:, 1:], centre_side])
    cut = numpy.min(quad, axis=0) != numpy.max(quad, axis=0)

    # nearest and farthest cell distances from the point
    dx = numpy.maximum(numpy.abs(gx - point[0]) - step / 2, 0.0)
    dy = numpy.maximum(numpy.abs(gy - point[1]) - step / 2, 0.0)
    rmin = numpy.hypot(dx, dy)
    rmax = numpy.hypot(numpy.abs(gx - point[0]) + step / 2, numpy.abs(gy - point[1]) + step / 2)
    for circ in circles:
        cut |= (rmin < circ) & (circ < rmax)

    sums = numpy.zeros(len(eps))
    rad = numpy.hypot(gx - point[0], gy - point[1])
    whole = ~cut
    vals = centre_side[whole] * step ** 2 * rad[whole] ** (-2 - s)
    rwhole = rad[whole]
    inside = rwhole <= radius
    for ix, epsv in enumerate(eps):
        sums[ix] += numpy.sum(vals[inside & (rwhole > epsv)])

    if numpy.any(cut):
        offs = (numpy.arange(sub) + 0.5) / sub - 0.5
        ox, oy = numpy.meshgrid(offs * step, offs * step)
        subpts = centres[cut][:, None, :] + numpy.stack([ox.ravel(), oy.ravel()], axis=1)[None, :, :]
        subside = region.side(subpts)
        subrad = numpy.hypot(subpts[..., 0] - point[0], subpts[..., 1] - point[1])
        subvals = subside * (step / sub) ** 2 * subrad ** (-2 - s)
        subin = subrad <= radius
        for ix, epsv in enumerate(eps):
            sums[ix] += numpy.sum(subvals[subin & (subrad > epsv)])
    return sums


def grid_sums(region: RegionSpec, point, s: float, eps, config: OracleConfig,
              radius: Optional[float] = None, threads: Optional[int] = None) -> GridSums:
    ''' Integrate ``side(y) / |y - point|^(2+s)`` over the annuli between
    each excluded radius and the outer radius, plus the far-field tail.

    Cells cut by the region boundary or by any of the circles are
    supersampled; the cell layout is point-symmetric about the point.

    :param region: The region E.
    :param point: A boundary point of E.
    :param s: The fractional order.
    :param eps: Excluded radii.
    :param config: Grid options.
    :param radius: Outer radius, default from :py:func:`outer_radius`.
    :param threads: Worker thread cap.
    '''
    point = numpy.asarray(point, dtype=float)
    eps = numpy.asarray(eps, dtype=float)
    if radius is None:
        radius = outer_radius([region], point, config)
    step = config.grid_h
    ncols = int(round(radius / step))
    strips = [
        (lower, min(lower + config.strip_rows, ncols))
        for lower in range(-ncols, ncols, config.strip_rows)
    ]
    LOGGER.debug('Grid quadrature with step %g, radius %g, %d strips', step, radius, len(strips))

    def work(bounds):
        return _strip_sums(region, point, s, eps, radius, step, config.supersample,
                           bounds[0], bounds[1], ncols)

    parts = parallel_map(work, strips, threads)
    sums = numpy.zeros(len(eps))
    for part in parts:
        sums += part
    tail = _tail(region, point, s, radius, config.angular_samples)
    return GridSums(eps=eps, sums=sums, tail=tail, radius=radius)


def containment_violations(inner: RegionSpec, outer: RegionSpec, point, config: OracleConfig,
                           radius: float) -> int:
    ''' Count grid cell centres inside ``inner`` but outside ``outer``. '''
    point = numpy.asarray(point, dtype=float)
    step = config.grid_h
    ncols = int(round(radius / step))
    kcols = numpy.arange(-ncols, ncols)
    cx = point[0] + (kcols + 0.5) * step
    count = 0
    for lower in range(-ncols, ncols, config.strip_rows):
        krows = numpy.arange(lower, min(lower + config.strip_rows, ncols))
        gx, gy = numpy.meshgrid(cx, point[1] + (krows + 0.5) * step)
        pts = numpy.stack([gx, gy], axis=-1)
        count += int(numpy.sum((inner.side(pts) < 0) & (outer.side(pts) > 0)))
    return count
