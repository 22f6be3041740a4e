''' Fractional mean curvature of planar curves.

The boundary form integrates ``<n(y), g(y) - g(x)> / |g(y) - g(x)|^(2+s)``
along the curve and scales by 2/s; the diagonal band is replaced by the
local expansion ``(kappa/2) |h|^-s``.
'''
from dataclasses import dataclass
import logging
import math
from typing import Optional, Sequence
import numpy
from scipy.optimize import curve_fit
from scipy.special import beta, betainc, gamma

from fracwill.config import OracleConfig
from fracwill.curve import (
    ArcCurve, menger_curvature, neighbour_ok, offset_matrix,
    tangent_normal,
)
from fracwill.error import (
    CollisionError, InsufficientDataError, ParameterError, PreconditionError,
    UndefinedPointError,
)
from fracwill.region import (
    BarrierSpec, RegionSpec, containment_violations, grid_sums, outer_radius,
)
from fracwill.util import parallel_map, row_chunks

LOGGER = logging.getLogger(__name__)

#: Relative distance below which two off-band nodes collide
COLLISION_REL = 1e-12


@dataclass
class CurvatureSamples(object):
    ''' Fractional mean curvature values along a curve. '''
    #: One value per evaluated node
    values: numpy.ndarray
    #: Fractional order
    s: float
    #: Either 'boundary' or 'region'
    method: str
    #: Half-width of the diagonal band in arc length
    near_diag_cutoff: float
    #: Node indices of the values
    rows: Optional[numpy.ndarray] = None


@dataclass
class OracleResult(object):
    ''' Outcome of :py:func:`nmc_region_oracle`. '''
    #: Extrapolated principal value
    value: float
    #: Excluded radii used
    eps: numpy.ndarray
    #: Truncated integrals including the tail, one per radius
    truncated: numpy.ndarray
    #: Relative residual of the extrapolation fit
    residual: float
    #: False when the residual exceeds the configured tolerance
    converged: bool = True


@dataclass
class MaxPrincipleResult(object):
    ''' Outcome of :py:func:`max_principle_check`. '''
    margin: float
    value_inner: float
    value_outer: float
    #: Allowed negative slack
    tolerance: float
    #: True when the margin and convex positivity hold within tolerance
    holds: bool


@dataclass
class BarrierResult(object):
    ''' Outcome of :py:func:`barrier_curvature`. '''
    direct: float
    bound: float
    #: Estimated constant of the lower bound
    c_ms: float


@dataclass
class CornerFit(object):
    ''' Outcome of :py:func:`corner_exponent_fit`. '''
    exponent: float
    #: Probe distances which were used
    dists: numpy.ndarray
    values: numpy.ndarray
    #: Multiplier C of ``C d^exponent``
    scale: float
    #: Offset B when fitted with the offset model
    offset: float = 0.0
    model: str = 'power'


def check_order(s: float):
    if not 0 < s < 1:
        raise ParameterError('Order s must be in (0,1), got {}'.format(s))


def disk_inner_exact(radius: float, s: float) -> float:
    ''' The inner boundary integral on a circle of the given radius. '''
    check_order(s)
    return 2 ** -s * math.sqrt(math.pi) * gamma((1 - s) / 2) / gamma(1 - s / 2) * radius ** -s


def disk_nmc_exact(radius: float, s: float) -> float:
    ''' Closed-form fractional mean curvature of a disk. '''
    return 2 / s * disk_inner_exact(radius, s)


def _band_layout(curve: ArcCurve, rows, band: int):
    ''' Per-row reach of the diagonal band on each side.

    :return: Tuple of (exclude_ahead, exclude_behind, full_ahead,
        full_behind, length_ahead, length_behind) arrays, where a full side
        has the whole band on one smooth piece.
    '''
    ahead, behind = neighbour_ok(curve, band)
    ahead, behind = ahead[rows], behind[rows]
    reach_a = numpy.sum(ahead[:, 1:], axis=1)
    reach_b = numpy.sum(behind[:, 1:], axis=1)
    full_a = reach_a == band
    full_b = reach_b == band
    count = curve.count
    if curve.closed:
        more_a = numpy.ones(len(rows), dtype=bool)
        more_b = more_a
    else:
        more_a = rows + reach_a + 1 < count
        more_b = rows - reach_b - 1 >= 0
    step = curve.spacing
    # corners sit half a spacing past the last same-piece node
    len_a = numpy.where(full_a, band * step, numpy.where(more_a, (reach_a + 0.5) * step, reach_a * step))
    len_b = numpy.where(full_b, band * step, numpy.where(more_b, (reach_b + 0.5) * step, reach_b * step))
    excl_a = numpy.where(full_a, band - 1, reach_a)
    excl_b = numpy.where(full_b, band - 1, reach_b)
    return excl_a, excl_b, full_a, full_b, len_a, len_b


def inner_integrals(curve: ArcCurve, s: float, rows=None, band: int = 4,
                    absolute: bool = False, kappa=None, inner_mask=None,
                    threads: Optional[int] = None) -> numpy.ndarray:
    ''' Evaluate the inner boundary integral
    ``I(x) = int <n(y), g(y) - g(x)> / |g(y) - g(x)|^(2+s) dy`` at nodes.

    :param curve: A curve with normals.
    :param s: The fractional order.
    :param rows: Node indices to evaluate, default all.
    :param band: Band half-width in nodes.
    :param absolute: Integrate the absolute numerator and use ``|kappa|``.
    :param kappa: Precomputed discrete curvature.
    :param inner_mask: Restrict the integration variable to these nodes;
        the local term is kept only for rows inside the mask.
    :param threads: Worker thread cap.
    :return: One value per row.
    :raise CollisionError: If two nodes nearly coincide outside the band.
    '''
    check_order(s)
    if curve.normals is None:
        curve = tangent_normal(curve)
    count = curve.count
    if rows is None:
        rows = numpy.arange(count)
    rows = numpy.atleast_1d(numpy.asarray(rows, dtype=int))
    if kappa is None:
        kappa = menger_curvature(curve)
    kappa = numpy.abs(kappa) if absolute else kappa
    step = curve.spacing
    nodes, normals = curve.nodes, curve.normals
    tiny = COLLISION_REL * curve.length

    def work(chunk):
        excl_a, excl_b, full_a, full_b, len_a, len_b = _band_layout(curve, chunk, band)
        diff = nodes[None, :, :] - nodes[chunk][:, None, :]
        numer = numpy.einsum('jk,rjk->rj', normals, diff)
        if absolute:
            numer = numpy.abs(numer)
        dist = numpy.hypot(diff[..., 0], diff[..., 1])
        off = offset_matrix(curve, chunk)

        weight = numpy.ones_like(dist)
        if not curve.closed:
            weight[:, 0] = weight[:, -1] = 0.5
        skip = (off == 0) | ((off > 0) & (off <= excl_a[:, None])) | ((off < 0) & (-off <= excl_b[:, None]))
        weight[skip] = 0.0
        half_a = full_a[:, None] & (off == band)
        half_b = full_b[:, None] & (off == -band)
        weight[half_a | half_b] = 0.5
        if inner_mask is not None:
            weight[:, ~inner_mask] = 0.0

        used = weight > 0
        if numpy.any(dist[used] < tiny):
            raise CollisionError('Nodes within {:.3g} outside the diagonal band'.format(tiny))
        safe = numpy.where(used, dist, 1.0)
        far = numpy.sum(weight * numer * safe ** (-2 - s), axis=1) * step

        kap = kappa[chunk] / 2
        local = kap * (len_a ** (1 - s) + len_b ** (1 - s)) / (1 - s)
        delta = band * step
        correction = -(step ** 2 / 12) * s * kap * delta ** (-1 - s) * (full_a.astype(float) + full_b)
        near = local + correction
        if inner_mask is not None:
            near = numpy.where(inner_mask[chunk], near, 0.0)
        return far + near

    parts = parallel_map(work, list(row_chunks(rows)), threads)
    return numpy.concatenate(parts) if parts else numpy.zeros(0)


def nmc_boundary(curve: ArcCurve, s: float, index: int, band: int = 4) -> float:
    ''' Fractional mean curvature at one node by the boundary formula. '''
    return 2 / s * float(inner_integrals(curve, s, [index], band)[0])


def nmc_curve(curve: ArcCurve, s: float, band: int = 4, rows=None,
              threads: Optional[int] = None) -> CurvatureSamples:
    ''' Fractional mean curvature at all (or selected) nodes. '''
    values = 2 / s * inner_integrals(curve, s, rows, band, threads=threads)
    LOGGER.debug('Boundary curvature s=%g over %d nodes, range [%g, %g]', s, len(values),
                 numpy.min(values) if len(values) else 0, numpy.max(values) if len(values) else 0)
    return CurvatureSamples(
        values=values, s=s, method='boundary', near_diag_cutoff=band * curve.spacing,
        rows=None if rows is None else numpy.atleast_1d(rows),
    )


def delta_refinement(curve: ArcCurve, s: float, index: int, band: int = 4) -> float:
    ''' Relative change of the value at a node when the band doubles. '''
    base = nmc_boundary(curve, s, index, band)
    wide = nmc_boundary(curve, s, index, 2 * band)
    return abs(wide - base) / max(abs(base), 1e-300)


def segment_integral(start, direction, lower, upper, point, s: float) -> float:
    ''' Exact inner integral of one straight piece ``start + t direction``
    for t in [lower, upper], either bound possibly infinite.

    With ``c = <n, start - point>`` and ``W = (t - a)/|c|`` the integrand is
    ``c |c|^(-2-s) (1 + W^2)^(-1-s/2)``, integrated by the incomplete beta
    function.
    '''
    start = numpy.asarray(start, dtype=float)
    direction = numpy.asarray(direction, dtype=float)
    normal = numpy.array([direction[1], -direction[0]])
    rel = start - numpy.asarray(point, dtype=float)
    dist = float(normal @ rel)
    if dist == 0:
        return 0.0
    along = -float(direction @ rel)
    half = 0.5 * beta(0.5, (1 + s) / 2)

    def prim(tval):
        if math.isinf(tval):
            return math.copysign(half, tval)
        wval = (tval - along) / abs(dist)
        return math.copysign(half * betainc(0.5, (1 + s) / 2, wval * wval / (1 + wval * wval)), wval)

    return dist * abs(dist) ** (-2 - s) * abs(dist) * (prim(upper) - prim(lower))


def polygon_nmc_exact(vertices, point, s: float, closed: bool = True) -> float:
    ''' Exact fractional mean curvature at a boundary point of a polygon
    or of a piecewise-linear graph.

    :param vertices: Counterclockwise vertices. For an open chain the first
        and last pieces extend to infinity.
    :param point: A boundary point which is not a vertex.
    '''
    check_order(s)
    verts = numpy.asarray(vertices, dtype=float)
    if closed:
        ends = numpy.roll(verts, -1, axis=0)
        pieces = zip(verts, ends)
    else:
        pieces = zip(verts[:-1], verts[1:])
    total = 0.0
    pieces = list(pieces)
    for ix, (start, end) in enumerate(pieces):
        span = end - start
        length = float(numpy.linalg.norm(span))
        direction = span / length
        lower = -math.inf if (not closed and ix == 0) else 0.0
        upper = math.inf if (not closed and ix == len(pieces) - 1) else length
        total += segment_integral(start, direction, lower, upper, point, s)
    return 2 / s * total


def _barrier_direct(barrier: BarrierSpec, xval: float, s: float) -> float:
    point = (xval, float(barrier.graph(xval)))
    left = numpy.array([1.0, -barrier.m]) / math.hypot(1.0, barrier.m)
    right = numpy.array([1.0, barrier.m1]) / math.hypot(1.0, barrier.m1)
    total = (
        segment_integral((0.0, 0.0), left, -math.inf, 0.0, point, s)
        + segment_integral((0.0, 0.0), (1.0, 0.0), 0.0, barrier.t_tilde, point, s)
        + segment_integral((barrier.t_tilde, 0.0), right, 0.0, math.inf, point, s)
    )
    return 2 / s * total


def _barrier_valid(barrier: BarrierSpec, xval: float):
    if xval < 0:
        raise ParameterError('Barrier abscissa must be nonnegative, got {}'.format(xval))
    if xval == 0 or (barrier.m1 > 0 and xval == barrier.t_tilde):
        raise UndefinedPointError('Barrier curvature is undefined at the kink {}'.format(xval))


def barrier_curvature(barrier: BarrierSpec, xval: float, s: float, probes: int = 64) -> BarrierResult:
    ''' Curvature of the barrier epigraph at ``(x, g(x))`` and its lower
    bound ``c_ms / (|g(x)| + |x|)^s``.

    The constant is the infimum of ``direct (|g| + |x|)^s`` over a
    logarithmic probe grid.
    '''
    check_order(s)
    _barrier_valid(barrier, xval)
    direct = _barrier_direct(barrier, xval, s)

    grid = barrier.t_tilde * numpy.logspace(-3, 2, probes)
    grid = grid[numpy.abs(grid - barrier.t_tilde) > 1e-9 * barrier.t_tilde]
    scaled = [
        _barrier_direct(barrier, float(xpr), s) * (abs(float(barrier.graph(xpr))) + xpr) ** s
        for xpr in grid
    ]
    c_ms = float(min(scaled))
    bound = c_ms / (abs(float(barrier.graph(xval))) + abs(xval)) ** s
    return BarrierResult(direct=direct, bound=bound, c_ms=c_ms)


def richardson(eps, values, s: float, terms: int = 2):
    ''' Extrapolate truncated integrals to zero radius assuming
    ``V(e) = H + c1 e^(1-s) + c2 e^(3-s) + ...``.

    :return: Tuple of (limit, relative residual).
    '''
    eps = numpy.asarray(eps, dtype=float)
    values = numpy.asarray(values, dtype=float)
    terms = min(terms, len(eps) - 1)
    if terms < 1:
        return float(values[-1]), math.inf
    powers = [1 - s + 2 * k for k in range(terms)]
    design = numpy.column_stack([numpy.ones_like(eps)] + [eps ** pw for pw in powers])
    coef, _, _, _ = numpy.linalg.lstsq(design, values, rcond=None)
    limit = float(coef[0])
    if len(eps) <= terms + 1:
        return limit, 0.0
    resid = float(numpy.max(numpy.abs(design @ coef - values)))
    return limit, resid / max(abs(limit), float(numpy.max(numpy.abs(values))) * 1e-12, 1e-300)


def _check_eps(eps, step):
    eps = numpy.asarray(eps, dtype=float)
    if len(eps) < 2 or numpy.any(numpy.diff(eps) >= 0):
        raise ParameterError('Excluded radii must be strictly decreasing')
    if eps[-1] < step:
        raise ParameterError('Excluded radii must be at least the grid step')
    return eps


def nmc_region_oracle(region: RegionSpec, point, s: float, eps=None,
                      config: Optional[OracleConfig] = None, radius: Optional[float] = None,
                      threads: Optional[int] = None) -> OracleResult:
    ''' Principal-value curvature of a region at a boundary point by grid
    quadrature outside shrinking balls and extrapolation to zero radius.

    :param region: The region E.
    :param point: A point of the boundary of E.
    :param s: The fractional order.
    :param eps: Strictly decreasing excluded radii, default from config.
    :param config: Grid options.
    :param radius: Outer radius of the gridded disk.
    :return: The extrapolated value with a convergence flag.
    '''
    check_order(s)
    config = config or OracleConfig()
    eps = _check_eps(config.eps_list if eps is None else eps, config.grid_h)
    sums = grid_sums(region, point, s, eps, config, radius, threads)
    truncated = sums.sums + sums.tail
    value, resid = richardson(eps, truncated, s, config.richardson_terms)
    converged = resid <= config.residual_tol
    if not converged:
        LOGGER.warning('Extrapolation residual %.3g above tolerance %.3g', resid, config.residual_tol)
    LOGGER.debug('Region oracle s=%g at %s gives %g', s, point, value)
    return OracleResult(value=value, eps=eps, truncated=truncated, residual=resid, converged=converged)


def max_principle_check(inner: RegionSpec, outer: RegionSpec, point, s: float,
                        config: Optional[OracleConfig] = None, tol_rel: float = 1e-3,
                        outer_convex: bool = False, threads: Optional[int] = None) -> MaxPrincipleResult:
    ''' Compare curvatures of nested regions at a common boundary point.

    :param inner: The smaller region A.
    :param outer: The larger region B.
    :param outer_convex: Also require the curvature of B to be nonnegative.
    :raise PreconditionError: If A is not contained in B on the grid.
    '''
    config = config or OracleConfig()
    point = numpy.asarray(point, dtype=float)
    radius = outer_radius([inner, outer], point, config)
    bad = containment_violations(inner, outer, point, config, radius)
    if bad:
        raise PreconditionError('Inner region leaves the outer region at {} grid points'.format(bad))
    val_in = nmc_region_oracle(inner, point, s, config=config, radius=radius, threads=threads).value
    if outer is inner:
        val_out = val_in
    else:
        val_out = nmc_region_oracle(outer, point, s, config=config, radius=radius, threads=threads).value
    margin = val_in - val_out
    tol = tol_rel * max(abs(val_in), abs(val_out))
    holds = margin >= -tol and (not outer_convex or val_out >= -tol)
    LOGGER.info('Maximum principle margin %g (tolerance %g)', margin, tol)
    return MaxPrincipleResult(margin=margin, value_inner=val_in, value_outer=val_out,
                              tolerance=tol, holds=holds)


def corner_exponent_fit(curve: ArcCurve, s: float, probe_dists: Sequence[float],
                        corner: Optional[int] = None, model: str = 'power',
                        band: int = 4) -> CornerFit:
    ''' Fit ``|H(x)| ~ C |x - x0|^alpha`` on one side of a point.

    :param curve: The curve with tangents and breaks.
    :param s: The fractional order.
    :param probe_dists: Arc distances from the point, spanning a decade.
    :param corner: A node index to probe from on a smooth curve; by default
        the first detected corner, which lies half a spacing past its break.
    :param model: 'power' for the log-log slope or 'offset' for
        ``C d^alpha + B``.
    :raise InsufficientDataError: With fewer than four valid probes.
    '''
    check_order(s)
    if curve.normals is None:
        curve = tangent_normal(curve)
    dists = numpy.sort(numpy.asarray(probe_dists, dtype=float))
    if len(dists) == 0 or dists[-1] < 10 * dists[0] * (1 - 1e-9):
        raise ParameterError('Probe distances must span at least one decade')
    step = curve.spacing
    count = curve.count

    if corner is None:
        if not curve.breaks:
            raise PreconditionError('No corner was detected on the curve')
        first = curve.breaks[0] + 1
        base = 0.5
    else:
        first = int(corner)
        base = 0.0
    brk = curve.break_mask
    offs = numpy.round(dists / step - base).astype(int)
    valid = (offs * step + base * step >= 5 * step - 1e-9)
    rows, used = [], []
    for off, ok in zip(offs, valid):
        if not ok:
            continue
        idx = first + off
        if not curve.closed and idx >= count:
            continue
        # the probe must stay on the piece following the point
        span = (first + numpy.arange(off)) % count
        if numpy.any(brk[span]):
            continue
        rows.append(idx % count)
        used.append((off + base) * step)
    if len(rows) < 4:
        raise InsufficientDataError('Only {} valid probes'.format(len(rows)))

    values = 2 / s * inner_integrals(curve, s, rows, band)
    good = values > 0
    if numpy.sum(good) < 4:
        raise InsufficientDataError('Only {} positive probe values'.format(int(numpy.sum(good))))
    used = numpy.asarray(used)[good]
    values = values[good]
    slope, intercept = numpy.polyfit(numpy.log(used), numpy.log(values), 1)
    fit = CornerFit(exponent=float(slope), dists=used, values=values, scale=float(math.exp(intercept)))
    if model == 'offset':
        params, _ = curve_fit(
            lambda dist, scale, expo, offset: scale * dist ** expo + offset,
            used, values, p0=(fit.scale, fit.exponent, 0.0), maxfev=10000,
        )
        fit = CornerFit(exponent=float(params[1]), dists=used, values=values,
                        scale=float(params[0]), offset=float(params[2]), model='offset')
    elif model != 'power':
        raise ParameterError('Unknown fit model {}'.format(model))
    LOGGER.info('Corner exponent %.4f from %d probes', fit.exponent, len(used))
    return fit
