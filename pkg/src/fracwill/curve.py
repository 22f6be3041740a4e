''' Geometry core for planar curves.

Curves are held as uniform arc-length samples with unit tangents and outward
normals ``n = (t2, -t1)``; closed curves built here are counterclockwise.
Convex curves can also be held by their support function.
'''
import dataclasses
from dataclasses import dataclass
import json
import logging
import math
from typing import List, Optional, Tuple
import numpy
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull

from fracwill.error import (
    ConstraintError, GeometryError, ParameterError,
)
from fracwill.util import row_chunks

LOGGER = logging.getLogger(__name__)

# Gauss-Legendre rule for arc-length panels
_GL_X, _GL_W = numpy.polynomial.legendre.leggauss(12)


@dataclass(frozen=True, eq=False)
class ArcCurve(object):
    ''' A curve sampled at equal arc-length spacing.
    '''

    #: Node coordinates, shape (N, 2)
    nodes: numpy.ndarray
    #: Arc length between successive nodes
    spacing: float
    #: Unit tangents, shape (N, 2), or None until filled
    tangents: Optional[numpy.ndarray] = None
    #: Outward unit normals, shape (N, 2), or None until filled
    normals: Optional[numpy.ndarray] = None
    #: Closed curves connect node N-1 to node 0
    closed: bool = True
    #: Each index c marks a corner between nodes c and c+1
    breaks: Tuple[int, ...] = ()

    @property
    def count(self) -> int:
        return len(self.nodes)

    @property
    def length(self) -> float:
        ''' Total arc length. '''
        if self.closed:
            return self.count * self.spacing
        return (self.count - 1) * self.spacing

    @property
    def params(self) -> numpy.ndarray:
        ''' Arc parameter of each node. '''
        return numpy.arange(self.count) * self.spacing

    @property
    def break_mask(self) -> numpy.ndarray:
        mask = numpy.zeros(self.count, dtype=bool)
        if self.breaks:
            mask[list(self.breaks)] = True
        return mask

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True, eq=False)
class SupportCurve(object):
    ''' A convex curve given by a truncated Fourier support function
    ``h(t) = a0 + sum_k a_k cos(kt) + b_k sin(kt)`` for k = 2..K.
    '''

    #: Mean radius
    a0: float
    #: Rows (a_k, b_k) for k = 2..K
    coeffs: numpy.ndarray

    def __post_init__(self):
        coeffs = numpy.asarray(self.coeffs, dtype=float).reshape(-1, 2)
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def order(self) -> int:
        ''' The truncation order K. '''
        return len(self.coeffs) + 1

    @property
    def modes(self) -> numpy.ndarray:
        return numpy.arange(2, self.order + 1)

    @property
    def perimeter(self) -> float:
        return 2 * math.pi * self.a0

    def _series(self, theta, weight, deriv=0):
        theta = numpy.asarray(theta, dtype=float)
        kth = numpy.multiply.outer(theta, self.modes)
        cos, sin = numpy.cos(kth), numpy.sin(kth)
        acoef = self.coeffs[:, 0] * weight
        bcoef = self.coeffs[:, 1] * weight
        if deriv == 0:
            return cos @ acoef + sin @ bcoef
        return (cos @ (bcoef * self.modes)) - (sin @ (acoef * self.modes))

    def support(self, theta) -> numpy.ndarray:
        ''' The support function h. '''
        return self.a0 + self._series(theta, 1.0)

    def support_derivative(self, theta) -> numpy.ndarray:
        ''' The derivative h'. '''
        return self._series(theta, 1.0, deriv=1)

    def radius_of_curvature(self, theta) -> numpy.ndarray:
        ''' The radius of curvature h + h''. '''
        return self.a0 + self._series(theta, 1.0 - self.modes ** 2)

    def arc_length(self, theta) -> numpy.ndarray:
        ''' Closed-form arc length from angle 0 to each angle. '''
        theta = numpy.asarray(theta, dtype=float)
        kth = numpy.multiply.outer(theta, self.modes)
        weight = (1.0 - self.modes ** 2) / self.modes
        return (
            self.a0 * theta
            + numpy.sin(kth) @ (self.coeffs[:, 0] * weight)
            + (1.0 - numpy.cos(kth)) @ (self.coeffs[:, 1] * weight)
        )

    def min_radius(self, samples: int = 4096) -> float:
        theta = numpy.arange(samples) * (2 * math.pi / samples)
        return float(numpy.min(self.radius_of_curvature(theta)))

    def vector(self) -> numpy.ndarray:
        ''' Coefficient-space vector (a0, a_2, b_2, ..., a_K, b_K). '''
        return numpy.concatenate([[self.a0], self.coeffs.ravel()])

    @classmethod
    def from_vector(cls, vec):
        vec = numpy.asarray(vec, dtype=float)
        return cls(a0=float(vec[0]), coeffs=vec[1:].reshape(-1, 2))

    def rotated(self, phi: float):
        ''' The support function of the curve rotated by angle phi,
        which is h(t - phi).
        '''
        kphi = self.modes * phi
        cos, sin = numpy.cos(kphi), numpy.sin(kphi)
        acoef, bcoef = self.coeffs[:, 0], self.coeffs[:, 1]
        coeffs = numpy.stack([acoef * cos - bcoef * sin, acoef * sin + bcoef * cos], axis=1)
        return SupportCurve(a0=self.a0, coeffs=coeffs)

    def scaled(self, rho: float):
        return SupportCurve(a0=self.a0 * rho, coeffs=self.coeffs * rho)

    @classmethod
    def circle(cls, radius: float = 1.0, order: int = 2):
        return cls(a0=radius, coeffs=numpy.zeros((order - 1, 2)))


@dataclass
class ConvexityReport(object):
    ''' Outcome of :py:func:`convexity_check`.
    '''
    #: True when the worst violation is within tolerance
    is_convex: bool
    #: Minimum over edge turns and supporting-line values, in length units
    worst_violation: float
    #: Supporting normal used at each node
    supporting_normals: numpy.ndarray


@dataclass
class GraphWindow(object):
    ''' Outcome of :py:func:`graph_window_check`.
    '''
    is_graph: bool
    #: One of 'convex', 'concave' or 'neither'
    shape: str


def signed_area(nodes) -> float:
    ''' Shoelace area, positive for counterclockwise polygons. '''
    nodes = numpy.asarray(nodes, dtype=float)
    nxt = numpy.roll(nodes, -1, axis=0)
    return 0.5 * float(numpy.sum(nodes[:, 0] * nxt[:, 1] - nxt[:, 0] * nodes[:, 1]))


def _panel_integrals(speed, lower, upper):
    mid = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    pts = mid[..., None] + half[..., None] * _GL_X
    return half * (speed(pts) @ _GL_W)


def _invert_arclength(speed, edges, targets):
    ''' Find curve parameters at given arc lengths.

    :param speed: Vectorized parameter speed, strictly positive.
    :param edges: Increasing panel edges covering the parameter range.
    :param targets: Arc lengths measured from the first edge.
    :return: Tuple of (parameters, total length).
    '''
    edges = numpy.asarray(edges, dtype=float)
    cum = numpy.concatenate([[0.0], numpy.cumsum(_panel_integrals(speed, edges[:-1], edges[1:]))])
    targets = numpy.asarray(targets, dtype=float)
    idx = numpy.clip(numpy.searchsorted(cum, targets, side='right') - 1, 0, len(edges) - 2)
    frac = (targets - cum[idx]) / (cum[idx + 1] - cum[idx])
    param = edges[idx] + frac * (edges[idx + 1] - edges[idx])
    for _ in range(8):
        resid = cum[idx] + _panel_integrals(speed, edges[idx], param) - targets
        param = param - resid / speed(param)
    return param, float(cum[-1])


def _orient_ccw(points):
    if signed_area(points) < 0:
        LOGGER.debug('Reversing clockwise input')
        return numpy.concatenate([points[:1], points[:0:-1]])
    return points


def resample_arclength(points, count: int, closed: bool = True,
                       offset: float = 0.0, kind: str = 'linear') -> ArcCurve:
    ''' Place nodes at equal arc length along a polyline or its spline.

    :param points: Input vertices, shape (M, 2), without a repeated end point.
    :param count: The number of output nodes.
    :param closed: True if the input is a closed polyline.
    :param offset: Shift of the nodes in units of the output spacing.
    :param kind: Either 'linear' (along the polyline) or 'spline'
        (along a cubic spline through the vertices).
    :return: The resampled curve without tangents.
    :raise GeometryError: For degenerate input.
    '''
    points = numpy.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise GeometryError('Points must have shape (M, 2)')
    if len(numpy.unique(points, axis=0)) < 8:
        raise GeometryError('At least 8 distinct points are required')
    if closed:
        points = _orient_ccw(points)
        ring = numpy.concatenate([points, points[:1]])
    else:
        ring = points
    seglen = numpy.hypot(*numpy.diff(ring, axis=0).T)
    keep = numpy.concatenate([[True], seglen > 0])
    ring = ring[keep]
    chord = numpy.concatenate([[0.0], numpy.cumsum(seglen[seglen > 0])])
    total = chord[-1]
    if not total > 0:
        raise GeometryError('Polyline has zero length')

    if kind == 'linear':
        length = total
        if closed:
            spacing = length / count
            targets = (numpy.arange(count) + offset) * spacing
            targets = numpy.mod(targets, length)
        else:
            spacing = length / (count - 1)
            targets = numpy.arange(count) * spacing
        nodes = numpy.stack([
            numpy.interp(targets, chord, ring[:, 0]),
            numpy.interp(targets, chord, ring[:, 1]),
        ], axis=1)
    elif kind == 'spline':
        spline = CubicSpline(chord, ring, axis=0, bc_type='periodic' if closed else 'not-a-knot')

        def speed(par):
            return numpy.linalg.norm(spline(par, 1), axis=-1)

        edges = numpy.unique(numpy.concatenate([
            numpy.linspace(chord[i], chord[i + 1], 5) for i in range(len(chord) - 1)
        ]))
        _, length = _invert_arclength(speed, edges, [0.0])
        if closed:
            spacing = length / count
            targets = numpy.mod((numpy.arange(count) + offset) * spacing, length)
        else:
            spacing = length / (count - 1)
            targets = numpy.arange(count) * spacing
        par, _ = _invert_arclength(speed, edges, targets)
        nodes = spline(par)
    else:
        raise ParameterError('Unknown resampling kind {}'.format(kind))

    LOGGER.debug('Resampled %d points to %d nodes, length %g', len(points), count, length)
    return ArcCurve(nodes=nodes, spacing=spacing, closed=closed)


def _turning_angles(nodes, closed):
    prev = nodes - numpy.roll(nodes, 1, axis=0)
    nxt = numpy.roll(nodes, -1, axis=0) - nodes
    cross = prev[:, 0] * nxt[:, 1] - prev[:, 1] * nxt[:, 0]
    dot = numpy.sum(prev * nxt, axis=1)
    angles = numpy.arctan2(cross, dot)
    if not closed:
        angles[0] = angles[-1] = 0.0
    return angles


def detect_corners(curve: ArcCurve, turn_factor: float = 10.0) -> Tuple[int, ...]:
    ''' Find corners by the tangent-jump criterion.

    A node is flagged when its turning angle exceeds ``turn_factor`` times
    the turning ``2 pi spacing / length`` of a circle of the same length.
    Each run of flagged nodes gives one corner at its middle edge.

    :return: Break indices c, each between nodes c and c+1.
    '''
    angles = numpy.abs(_turning_angles(curve.nodes, curve.closed))
    threshold = turn_factor * 2 * math.pi * curve.spacing / curve.length
    flagged = angles > threshold
    count = curve.count
    if not numpy.any(flagged):
        return ()
    if numpy.all(flagged):
        raise GeometryError('Every node is a corner')

    start = 0
    if curve.closed:
        start = int(numpy.argmin(flagged))
    order = (numpy.arange(count) + start) % count if curve.closed else numpy.arange(count)
    breaks = []
    run = []
    for idx in list(order) + [None]:
        if idx is not None and flagged[idx]:
            run.append(idx)
            continue
        if run:
            mid = run[(len(run) - 1) // 2]
            if curve.closed or mid < count - 1:
                breaks.append(int(mid))
            run = []
    LOGGER.debug('Detected %d corners with threshold %g', len(breaks), threshold)
    return tuple(sorted(breaks))


def neighbour_ok(curve: ArcCurve, reach: int):
    ''' Determine which neighbours lie on the same smooth piece.

    :return: Tuple (ahead, behind) of boolean arrays of shape (N, reach+1),
        where ``ahead[i, m]`` is true when node i+m exists and no corner lies
        between nodes i and i+m.
    '''
    count = curve.count
    brk = curve.break_mask
    idx = numpy.arange(count)
    ahead = numpy.ones((count, reach + 1), dtype=bool)
    behind = numpy.ones((count, reach + 1), dtype=bool)
    for step in range(1, reach + 1):
        ahead[:, step] = ahead[:, step - 1] & ~brk[(idx + step - 1) % count]
        behind[:, step] = behind[:, step - 1] & ~brk[(idx - step) % count]
        if not curve.closed:
            ahead[:, step] &= idx + step < count
            behind[:, step] &= idx - step >= 0
    return ahead, behind


def _spectral_derivative(nodes, spacing):
    count = len(nodes)
    wavenum = 2 * math.pi * numpy.fft.fftfreq(count, d=spacing)
    if count % 2 == 0:
        wavenum[count // 2] = 0.0
    coef = numpy.fft.fft(nodes, axis=0)
    return numpy.real(numpy.fft.ifft(1j * wavenum[:, None] * coef, axis=0))


def _difference_derivative(curve: ArcCurve):
    nodes = curve.nodes
    count = curve.count
    step = curve.spacing
    ahead, behind = neighbour_ok(curve, 2)
    idx = numpy.arange(count)
    nxt1, nxt2 = (idx + 1) % count, (idx + 2) % count
    prv1, prv2 = (idx - 1) % count, (idx - 2) % count
    deriv = numpy.empty_like(nodes)

    central = ahead[:, 1] & behind[:, 1]
    forward2 = ~central & ahead[:, 2]
    backward2 = ~central & ~forward2 & behind[:, 2]
    forward1 = ~central & ~forward2 & ~backward2 & ahead[:, 1]
    backward1 = ~(central | forward2 | backward2 | forward1)

    deriv[central] = (nodes[nxt1[central]] - nodes[prv1[central]]) / (2 * step)
    deriv[forward2] = (-3 * nodes[forward2] + 4 * nodes[nxt1[forward2]] - nodes[nxt2[forward2]]) / (2 * step)
    deriv[backward2] = (3 * nodes[backward2] - 4 * nodes[prv1[backward2]] + nodes[prv2[backward2]]) / (2 * step)
    deriv[forward1] = (nodes[nxt1[forward1]] - nodes[forward1]) / step
    deriv[backward1] = (nodes[backward1] - nodes[prv1[backward1]]) / step
    return deriv


def rotate_minus(vecs):
    ''' Rotate vectors by -pi/2, ``(v1, v2) -> (v2, -v1)``. '''
    vecs = numpy.asarray(vecs)
    return numpy.stack([vecs[..., 1], -vecs[..., 0]], axis=-1)


def tangent_normal(curve: ArcCurve, method: str = 'auto', turn_factor: float = 10.0) -> ArcCurve:
    ''' Fill unit tangents and outward normals.

    Smooth closed curves are differentiated spectrally; curves with corners
    and open curves use differences restricted to each smooth piece, which
    are one-sided next to a corner.

    :param curve: A resampled curve with at least 16 nodes.
    :param method: One of 'auto', 'spectral' or 'difference'.
    :param turn_factor: Corner detection factor for 'auto'.
    :return: A copy with tangents, normals and breaks filled.
    '''
    if curve.count < 16:
        raise GeometryError('At least 16 nodes are required, got {}'.format(curve.count))
    breaks = curve.breaks
    if method == 'auto':
        if not breaks:
            breaks = detect_corners(curve, turn_factor)
        method = 'spectral' if curve.closed and not breaks else 'difference'
    elif method not in ('spectral', 'difference'):
        raise ParameterError('Unknown tangent method {}'.format(method))
    if method == 'spectral' and not curve.closed:
        raise ParameterError('Spectral tangents require a closed curve')

    withbreaks = curve.replace(breaks=tuple(breaks))
    if method == 'spectral':
        deriv = _spectral_derivative(curve.nodes, curve.spacing)
    else:
        deriv = _difference_derivative(withbreaks)
    norm = numpy.linalg.norm(deriv, axis=1)
    if numpy.any(norm == 0):
        raise GeometryError('Vanishing tangent')
    tangents = deriv / norm[:, None]
    return withbreaks.replace(tangents=tangents, normals=rotate_minus(tangents))


def menger_curvature(curve: ArcCurve) -> numpy.ndarray:
    ''' Signed discrete curvature from node triples on one smooth piece,
    positive for counterclockwise turning.
    '''
    nodes = curve.nodes
    count = curve.count
    ahead, behind = neighbour_ok(curve, 2)
    idx = numpy.arange(count)
    first = numpy.where(behind[:, 1] & ahead[:, 1], idx - 1,
                        numpy.where(ahead[:, 2], idx, numpy.where(behind[:, 2], idx - 2, idx)))
    valid = (behind[:, 1] & ahead[:, 1]) | ahead[:, 2] | behind[:, 2]
    pa = nodes[first % count]
    pb = nodes[(first + 1) % count]
    pc = nodes[(first + 2) % count]
    e1, e2, e3 = pb - pa, pc - pb, pc - pa
    cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    denom = (numpy.linalg.norm(e1, axis=1) * numpy.linalg.norm(e2, axis=1)
             * numpy.linalg.norm(e3, axis=1))
    kappa = numpy.zeros(count)
    good = valid & (denom > 0)
    kappa[good] = 2 * cross[good] / denom[good]
    return kappa


def offset_matrix(curve: ArcCurve, rows) -> numpy.ndarray:
    ''' Signed index offsets j - i, wrapped into (-N/2, N/2] when closed. '''
    rows = numpy.asarray(rows)
    off = numpy.arange(curve.count)[None, :] - rows[:, None]
    if curve.closed:
        count = curve.count
        off = (off + (count - 1) // 2) % count - (count - 1) // 2
    return off


def arc_distance(curve: ArcCurve, i, j):
    ''' Arc-length distance between node indices. '''
    diff = numpy.abs(numpy.asarray(i) - numpy.asarray(j))
    if curve.closed:
        diff = numpy.minimum(diff, curve.count - diff)
    return diff * curve.spacing


def _with_geometry(curve, nodes, tangents=None, normals=None, spacing=None):
    return curve.replace(
        nodes=nodes,
        tangents=tangents,
        normals=normals,
        spacing=curve.spacing if spacing is None else spacing,
    )


def rotated(curve: ArcCurve, angle: float, center=(0.0, 0.0)) -> ArcCurve:
    ''' Apply the rotation R_angle about a center. '''
    rot = numpy.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    center = numpy.asarray(center, dtype=float)
    nodes = (curve.nodes - center) @ rot.T + center
    tan = None if curve.tangents is None else curve.tangents @ rot.T
    nor = None if curve.normals is None else curve.normals @ rot.T
    return _with_geometry(curve, nodes, tan, nor)


def translated(curve: ArcCurve, shift) -> ArcCurve:
    return _with_geometry(curve, curve.nodes + numpy.asarray(shift, dtype=float),
                          curve.tangents, curve.normals)


def scaled(curve: ArcCurve, rho: float) -> ArcCurve:
    ''' Dilate nodes by rho, rescaling the arc parameter with them. '''
    if not rho > 0:
        raise ParameterError('Dilation factor must be positive')
    return _with_geometry(curve, curve.nodes * rho, curve.tangents, curve.normals,
                          spacing=curve.spacing * rho)


def reversed_curve(curve: ArcCurve) -> ArcCurve:
    ''' Reverse the orientation, exchanging a set with its complement. '''
    count = curve.count
    if curve.closed:
        order = (-numpy.arange(count)) % count
        breaks = tuple(sorted(int((-c - 1) % count) for c in curve.breaks))
    else:
        order = numpy.arange(count)[::-1]
        breaks = tuple(sorted(count - 2 - c for c in curve.breaks))
    tan = None if curve.tangents is None else -curve.tangents[order]
    nor = None if curve.normals is None else -curve.normals[order]
    return curve.replace(nodes=curve.nodes[order], tangents=tan, normals=nor, breaks=breaks)


def convexity_check(curve: ArcCurve, tol_rel: float = 1e-8) -> ConvexityReport:
    ''' Check discrete convexity by edge turns and supporting lines.

    :param curve: The curve, tangents are filled if missing.
    :param tol_rel: Tolerance relative to the curve length.
    '''
    if curve.normals is None:
        curve = tangent_normal(curve)
    nodes = curve.nodes
    tol = tol_rel * curve.length

    nxt = numpy.roll(nodes, -1, axis=0) - nodes
    prev = nodes - numpy.roll(nodes, 1, axis=0)
    cross = prev[:, 0] * nxt[:, 1] - prev[:, 1] * nxt[:, 0]
    plen = numpy.linalg.norm(prev, axis=1)
    turn = numpy.where(plen > 0, cross / numpy.where(plen > 0, plen, 1.0), 0.0)
    if not curve.closed:
        turn = turn[1:-1]
    worst = float(numpy.min(turn)) if len(turn) else 0.0

    for rows in row_chunks(numpy.arange(curve.count)):
        diff = nodes[rows, None, :] - nodes[None, :, :]
        support = numpy.einsum('rk,rjk->rj', curve.normals[rows], diff)
        worst = min(worst, float(numpy.min(support)))

    LOGGER.debug('Convexity worst violation %g with tolerance %g', worst, tol)
    return ConvexityReport(
        is_convex=worst >= -tol,
        worst_violation=worst,
        supporting_normals=curve.normals.copy(),
    )


def _point_segment_distance(points, start, end):
    seg = end - start
    seglen2 = numpy.sum(seg * seg, axis=-1)
    rel = points[:, None, :] - start[None, :, :]
    par = numpy.clip(numpy.sum(rel * seg[None, :, :], axis=-1) / numpy.where(seglen2 > 0, seglen2, 1.0), 0, 1)
    near = start[None, :, :] + par[..., None] * seg[None, :, :]
    return numpy.min(numpy.linalg.norm(points[:, None, :] - near, axis=-1), axis=1)


def hull_gap(curve: ArcCurve, edge_samples: int = 16) -> float:
    ''' Two-sided Hausdorff distance between the curve and its convex hull
    boundary.

    One side is the largest distance of a node from the hull boundary, the
    other the largest distance of a hull boundary point from the node
    polyline.
    '''
    nodes = curve.nodes
    hull = ConvexHull(nodes)
    verts = nodes[hull.vertices]
    hstart, hend = verts, numpy.roll(verts, -1, axis=0)

    gap = 0.0
    for rows in row_chunks(numpy.arange(curve.count), 512):
        gap = max(gap, float(numpy.max(_point_segment_distance(nodes[rows], hstart, hend))))

    frac = numpy.arange(edge_samples) / edge_samples
    samples = (hstart[:, None, :] + frac[None, :, None] * (hend - hstart)[:, None, :]).reshape(-1, 2)
    pstart = nodes
    pend = numpy.roll(nodes, -1, axis=0) if curve.closed else nodes[1:]
    if not curve.closed:
        pstart = nodes[:-1]
    for rows in row_chunks(numpy.arange(len(samples)), 512):
        gap = max(gap, float(numpy.max(_point_segment_distance(samples[rows], pstart, pend))))
    return gap


def bilipschitz_profile(curve: ArcCurve, window: float) -> Tuple[float, float]:
    ''' Extremes of the chord-to-arc ratio over pairs with arc distance
    up to twice the window half-width.

    :return: Tuple (minimum, maximum).
    '''
    if not 0 < window < curve.length / 4:
        raise ParameterError('Window must be in (0, L/4), got {}'.format(window))
    nodes = curve.nodes
    reach = int(math.floor(2 * window / curve.spacing + 1e-9))
    low, high = math.inf, -math.inf
    for step in range(1, reach + 1):
        if curve.closed:
            chord = numpy.linalg.norm(numpy.roll(nodes, -step, axis=0) - nodes, axis=1)
        else:
            chord = numpy.linalg.norm(nodes[step:] - nodes[:-step], axis=1)
        if not len(chord):
            break
        ratio = chord / (step * curve.spacing)
        low = min(low, float(numpy.min(ratio)))
        high = max(high, float(numpy.max(ratio)))
    return low, high


def graph_window_check(curve: ArcCurve, index: int, window: float) -> GraphWindow:
    ''' Decide whether a window is a graph over the tangent line at a node,
    and whether that graph is convex or concave.

    Ordinates are measured along the outward normal, so a counterclockwise
    circle arc is concave.
    '''
    if not 0 < window < curve.length / 4:
        raise ParameterError('Window must be in (0, L/4), got {}'.format(window))
    if curve.tangents is None:
        curve = tangent_normal(curve)
    count = curve.count
    reach = int(math.floor(window / curve.spacing + 1e-9))
    offs = numpy.arange(-reach, reach + 1)
    idx = index + offs
    if curve.closed:
        idx = idx % count
    else:
        idx = idx[(idx >= 0) & (idx < count)]
    nodes = curve.nodes

    tangent = curve.tangents[index]
    at_corner = index in curve.breaks or (index - 1) % count in curve.breaks
    if at_corner:
        chord = nodes[(index + 1) % count] - nodes[(index - 1) % count]
        tangent = chord / numpy.linalg.norm(chord)
    normal = rotate_minus(tangent)
    rel = nodes[idx] - nodes[index]
    absc = rel @ tangent
    ordi = rel @ normal

    dabs = numpy.diff(absc)
    if not numpy.all(dabs > 0):
        return GraphWindow(is_graph=False, shape='neither')
    slope = numpy.diff(ordi) / dabs
    turn = numpy.diff(slope)
    tol = 1e-9 * max(1.0, float(numpy.max(numpy.abs(slope))))
    if numpy.all(turn >= -tol):
        shape = 'convex'
    elif numpy.all(turn <= tol):
        shape = 'concave'
    else:
        shape = 'neither'
    return GraphWindow(is_graph=True, shape=shape)


def self_proximity_scan(curve: ArcCurve, rho: float) -> List[Tuple[int, int]]:
    ''' Find node pairs which are close in the plane but far along the curve.

    :return: Pairs (i, j), i < j, with ``|g(i) - g(j)| < rho/10`` and arc
        distance above rho.
    '''
    if not 0 < rho < curve.length / 4:
        raise ParameterError('Radius must be in (0, L/4), got {}'.format(rho))
    nodes = curve.nodes
    allidx = numpy.arange(curve.count)
    found = []
    for rows in row_chunks(allidx):
        diff = nodes[rows, None, :] - nodes[None, :, :]
        dist = numpy.hypot(diff[..., 0], diff[..., 1])
        arc = arc_distance(curve, rows[:, None], allidx[None, :])
        hit = (dist < rho / 10) & (arc > rho) & (allidx[None, :] > rows[:, None])
        for ri, cj in zip(*numpy.nonzero(hit)):
            found.append((int(rows[ri]), int(cj)))
    LOGGER.debug('Proximity scan at scale %g found %d pairs', rho, len(found))
    return found


def support_to_curve(sc: SupportCurve, count: int, eps_kappa: Optional[float] = None,
                     offset: float = 0.0) -> ArcCurve:
    ''' Realize a support function as an arc-length curve.

    The boundary point with outer normal ``u(t) = (cos t, sin t)`` is
    ``h(t) u(t) + h'(t) u'(t)``. Nodes are placed by inverting the closed-form
    arc length, and tangents and normals are exact.

    :param sc: The support function.
    :param count: The number of nodes.
    :param eps_kappa: Radius-of-curvature floor, default 1e-3 a0.
    :param offset: Node shift in units of the spacing.
    :raise ConstraintError: If the radius of curvature dips below the floor.
    '''
    if eps_kappa is None:
        eps_kappa = 1e-3 * sc.a0
    min_rad = sc.min_radius()
    if min_rad < eps_kappa:
        raise ConstraintError('Radius of curvature {:.3g} below floor {:.3g}'.format(min_rad, eps_kappa))

    length = sc.perimeter
    spacing = length / count
    targets = (numpy.arange(count) + offset) * spacing
    theta = targets / sc.a0
    # safeguarded Newton on the monotone arc length
    lower = numpy.zeros(count)
    upper = numpy.full(count, 2 * math.pi)
    for _ in range(100):
        resid = sc.arc_length(theta) - targets
        lower = numpy.where(resid < 0, theta, lower)
        upper = numpy.where(resid > 0, theta, upper)
        step = theta - resid / sc.radius_of_curvature(theta)
        inside = (step > lower) & (step < upper)
        theta = numpy.where(inside, step, 0.5 * (lower + upper))
        if numpy.max(numpy.abs(resid)) < 1e-14 * length:
            break

    cos, sin = numpy.cos(theta), numpy.sin(theta)
    hval = sc.support(theta)
    hder = sc.support_derivative(theta)
    unit = numpy.stack([cos, sin], axis=1)
    unit_rot = numpy.stack([-sin, cos], axis=1)
    nodes = hval[:, None] * unit + hder[:, None] * unit_rot
    return ArcCurve(nodes=nodes, spacing=spacing, tangents=unit_rot, normals=unit, closed=True)


def circle(count: int, radius: float = 1.0, center=(0.0, 0.0), offset: float = 0.0) -> ArcCurve:
    ''' A counterclockwise circle with exact tangents. '''
    theta = (numpy.arange(count) + offset) * (2 * math.pi / count)
    unit = numpy.stack([numpy.cos(theta), numpy.sin(theta)], axis=1)
    tangents = numpy.stack([-unit[:, 1], unit[:, 0]], axis=1)
    return ArcCurve(
        nodes=numpy.asarray(center, dtype=float) + radius * unit,
        spacing=2 * math.pi * radius / count,
        tangents=tangents,
        normals=unit.copy(),
    )


def _parametric(count, point, deriv, span, offset=0.0, panels=None):
    def speed(par):
        return numpy.linalg.norm(deriv(par), axis=-1)

    panels = panels or 16 * count
    edges = numpy.linspace(span[0], span[1], panels + 1)
    _, length = _invert_arclength(speed, edges, [0.0])
    spacing = length / count
    targets = numpy.mod((numpy.arange(count) + offset) * spacing, length)
    par, _ = _invert_arclength(speed, edges, targets)
    vel = deriv(par)
    tangents = vel / numpy.linalg.norm(vel, axis=1)[:, None]
    return ArcCurve(nodes=point(par), spacing=spacing, tangents=tangents,
                    normals=rotate_minus(tangents))


def ellipse(count: int, semi_a: float = 1.0, semi_b: float = 0.6, offset: float = 0.0) -> ArcCurve:
    ''' An axis-aligned ellipse starting at (a, 0). '''
    return _parametric(
        count,
        lambda t: numpy.stack([semi_a * numpy.cos(t), semi_b * numpy.sin(t)], axis=-1),
        lambda t: numpy.stack([-semi_a * numpy.sin(t), semi_b * numpy.cos(t)], axis=-1),
        (0.0, 2 * math.pi), offset,
    )


def dented_circle(count: int, depth: float = 0.2, width: float = 0.05) -> ArcCurve:
    ''' A unit circle with a narrow inward Gaussian dent centred at angle 0. '''
    def radius(t):
        return 1.0 - depth * numpy.exp(-(t / width) ** 2)

    def dradius(t):
        return depth * 2 * t / width ** 2 * numpy.exp(-(t / width) ** 2)

    def point(t):
        return radius(t)[..., None] * numpy.stack([numpy.cos(t), numpy.sin(t)], axis=-1)

    def deriv(t):
        cos, sin = numpy.cos(t), numpy.sin(t)
        rad, drad = radius(t), dradius(t)
        return numpy.stack([drad * cos - rad * sin, drad * sin + rad * cos], axis=-1)

    return _parametric(count, point, deriv, (-math.pi, math.pi))


def polygon(vertices, count: int, offset: float = 0.5) -> ArcCurve:
    ''' A closed polygon sampled with corners between nodes.

    :param vertices: Polygon vertices in order, without repetition.
    :param count: The number of nodes.
    :param offset: Node shift from the first vertex, in units of the spacing.
    '''
    verts = _orient_ccw(numpy.asarray(vertices, dtype=float))
    ring = numpy.concatenate([verts, verts[:1]])
    edges = numpy.diff(ring, axis=0)
    edgelen = numpy.hypot(*edges.T)
    if numpy.any(edgelen == 0):
        raise GeometryError('Repeated polygon vertex')
    length = float(numpy.sum(edgelen))
    spacing = length / count
    dense = numpy.concatenate([
        verts[i] + numpy.linspace(0, 1, 4, endpoint=False)[:, None] * edges[i]
        for i in range(len(verts))
    ])
    curve = resample_arclength(dense, count, closed=True, offset=offset)

    turn = _turning_angles(verts, True)
    corner_arcs = numpy.concatenate([[0.0], numpy.cumsum(edgelen)[:-1]])[numpy.abs(turn) > 1e-9]
    breaks = sorted({int(math.floor(arc / spacing - offset)) % count for arc in corner_arcs})
    curve = curve.replace(spacing=spacing, breaks=tuple(breaks))
    return tangent_normal(curve, method='difference')


def square(count: int, side: float = 1.0, offset: float = 0.5) -> ArcCurve:
    ''' An axis-aligned square with its first corner at the origin. '''
    return polygon([[0, 0], [side, 0], [side, side], [0, side]], count, offset)


def star(count: int, points: int = 5, inner: float = 0.4) -> ArcCurve:
    ''' A star polygon, which is not convex. '''
    angles = numpy.arange(2 * points) * math.pi / points + math.pi / 2
    radii = numpy.where(numpy.arange(2 * points) % 2 == 0, 1.0, inner)
    return polygon(numpy.stack([radii * numpy.cos(angles), radii * numpy.sin(angles)], axis=1), count)


def rounded_square(count: int, fillet: float, side: float = 1.0, offset: float = 0.5) -> ArcCurve:
    ''' A square whose corners are replaced by circular fillets.

    A zero fillet gives the sharp square of :py:func:`square`.
    '''
    half = side / 2
    if fillet == 0:
        return polygon([[-half, -half], [half, -half], [half, half], [-half, half]], count, offset)
    if not 0 < fillet <= side / 2:
        raise ParameterError('Fillet must be in [0, side/2]')
    straight = side - 2 * fillet
    quarter = math.pi * fillet / 2
    length = 4 * (straight + quarter)
    spacing = length / count
    arcs = numpy.mod((numpy.arange(count) + offset) * spacing, length)

    nodes = numpy.empty((count, 2))
    tangents = numpy.empty((count, 2))
    # bottom, right, top, left: edge start, direction and fillet centre after it
    starts = [(-half + fillet, -half), (half, -half + fillet), (half - fillet, half), (-half, half - fillet)]
    dirs = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
    centers = [(half - fillet, -half + fillet), (half - fillet, half - fillet),
               (-half + fillet, half - fillet), (-half + fillet, -half + fillet)]
    for side_ix in range(4):
        base = side_ix * (straight + quarter)
        pos = arcs - base
        on_edge = (pos >= 0) & (pos < straight)
        on_arc = (pos >= straight) & (pos < straight + quarter)
        direction = numpy.array(dirs[side_ix])
        nodes[on_edge] = numpy.array(starts[side_ix]) + pos[on_edge, None] * direction
        tangents[on_edge] = direction
        angle = -math.pi / 2 + side_ix * math.pi / 2 + (pos[on_arc] - straight) / fillet
        unit = numpy.stack([numpy.cos(angle), numpy.sin(angle)], axis=1)
        nodes[on_arc] = numpy.array(centers[side_ix]) + fillet * unit
        tangents[on_arc] = numpy.stack([-unit[:, 1], unit[:, 0]], axis=1)
    return ArcCurve(nodes=nodes, spacing=spacing, tangents=tangents, normals=rotate_minus(tangents))


def dumbbell(count: int, gap: float = 0.01, lobe: float = 1.0, neck: float = 1.0) -> ArcCurve:
    ''' Two circular lobes joined by a thin straight neck. '''
    alpha = math.asin(gap / (2 * lobe))
    centre = neck / 2 + lobe * math.cos(alpha)
    junction = centre - lobe * math.cos(alpha)
    samples = 2000
    bottom = numpy.stack([numpy.linspace(-junction, junction, 50, endpoint=False), numpy.full(50, -gap / 2)], axis=1)
    rangle = numpy.linspace(-math.pi + alpha, math.pi - alpha, samples, endpoint=False)
    right = numpy.stack([centre + lobe * numpy.cos(rangle), lobe * numpy.sin(rangle)], axis=1)
    top = numpy.stack([numpy.linspace(junction, -junction, 50, endpoint=False), numpy.full(50, gap / 2)], axis=1)
    langle = numpy.linspace(alpha, 2 * math.pi - alpha, samples, endpoint=False)
    left = numpy.stack([-centre + lobe * numpy.cos(langle), lobe * numpy.sin(langle)], axis=1)
    curve = resample_arclength(numpy.concatenate([bottom, right, top, left]), count)
    return tangent_normal(curve)


def segment(count: int, length: float = 1.0) -> ArcCurve:
    ''' A straight open segment along the first axis. '''
    xval = numpy.linspace(0.0, length, count)
    nodes = numpy.stack([xval, numpy.zeros(count)], axis=1)
    tangents = numpy.tile([1.0, 0.0], (count, 1))
    return ArcCurve(nodes=nodes, spacing=length / (count - 1), tangents=tangents,
                    normals=rotate_minus(tangents), closed=False)


def wedge_graph(count: int, half_length: float = 1.0, slope: float = 1.0) -> ArcCurve:
    ''' The open graph of ``-slope |x|`` traversed left to right, with the
    corner at the middle node when count is odd.
    '''
    leg = numpy.linspace(0, 1, 11)
    xleft = -half_length * (1 - leg)
    xright = half_length * leg[1:]
    xval = numpy.concatenate([xleft, xright])
    points = numpy.stack([xval, -slope * numpy.abs(xval)], axis=1)
    return tangent_normal(resample_arclength(points, count, closed=False))


def support_perturbation(count: int, amplitude: float, mode: int = 5, a0: float = 1.0) -> ArcCurve:
    ''' A circle whose support function carries one cosine mode. '''
    coeffs = numpy.zeros((max(mode, 2) - 1, 2))
    coeffs[mode - 2, 0] = amplitude
    return support_to_curve(SupportCurve(a0=a0, coeffs=coeffs), count)


def load_curve(fileobj, count: Optional[int] = None) -> ArcCurve:
    ''' Read a curve file.

    The JSON object has a ``kind`` of 'arc' (nodes already at equal
    spacing), 'polyline' (resampled to ``count`` nodes) or 'support'
    (``a0`` and ``coeffs`` rows ``[k, a_k, b_k]``).

    :param fileobj: The file to read from.
    :param count: Node count; an 'arc' file with another count is
        resampled along a spline through its nodes.
    :return: The curve with tangents filled.
    '''
    data = json.load(fileobj)
    kind = data.get('kind', 'arc')
    closed = bool(data.get('closed', True))
    if kind == 'support':
        sc = support_from_dict(data)
        return support_to_curve(sc, count or 512)
    nodes = numpy.asarray(data['nodes'], dtype=float)
    if kind == 'polyline':
        return tangent_normal(resample_arclength(nodes, count or len(nodes), closed=closed))
    if kind != 'arc':
        raise GeometryError('Unknown curve kind {}'.format(kind))
    if count and count != len(nodes):
        return tangent_normal(resample_arclength(nodes, count, closed=closed, kind='spline'))
    ring = numpy.concatenate([nodes, nodes[:1]]) if closed else nodes
    total = float(numpy.sum(numpy.hypot(*numpy.diff(ring, axis=0).T)))
    spacing = total / (len(nodes) if closed else len(nodes) - 1)
    return tangent_normal(ArcCurve(nodes=nodes, spacing=spacing, closed=closed))


def support_from_dict(data) -> SupportCurve:
    rows = data.get('coeffs', [])
    order = max([int(row[0]) for row in rows] + [2])
    coeffs = numpy.zeros((order - 1, 2))
    for mode, acoef, bcoef in rows:
        if int(mode) < 2:
            raise GeometryError('Support modes start at k = 2')
        coeffs[int(mode) - 2] = (acoef, bcoef)
    return SupportCurve(a0=float(data['a0']), coeffs=coeffs)


def support_to_dict(sc: SupportCurve) -> dict:
    return {
        'kind': 'support',
        'a0': sc.a0,
        'coeffs': [[int(mode), float(row[0]), float(row[1])] for mode, row in zip(sc.modes, sc.coeffs)],
        'closed': True,
    }


def dump_curve(curve: ArcCurve, fileobj):
    ''' Write a curve file of kind 'arc'. '''
    json.dump({
        'kind': 'arc',
        'nodes': curve.nodes.tolist(),
        'closed': curve.closed,
    }, fileobj)
