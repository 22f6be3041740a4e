''' Nonlocal Willmore energies of curves and the oscillation diagnostics
built on them.
'''
from dataclasses import dataclass
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple
import numpy
import portion

from fracwill.curvature import _band_layout, inner_integrals
from fracwill.curve import (
    ArcCurve, menger_curvature, scaled, tangent_normal,
)
from fracwill.error import ParameterError
from fracwill.fracops import GridFunction, gagliardo_seminorm
from fracwill.util import arc_window, parallel_map, row_chunks, window_mask

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class FracParams(object):
    ''' Fractional order and energy exponent. '''
    s: float
    p: float

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ParameterError('Order s must be in (0,1), got {}'.format(self.s))
        if not self.p >= 1:
            raise ParameterError('Exponent p must be at least 1, got {}'.format(self.p))

    @property
    def critical(self) -> bool:
        return abs(self.p * self.s - 1) <= 1e-12

    @classmethod
    def critical_for(cls, s: float):
        ''' The scaling-invariant exponent p = 1/s. '''
        return cls(s=s, p=1 / s)


@dataclass
class EnergyBreakdown(object):
    ''' Energy total with its per-node inner integrals. '''
    total: float
    #: Inner integral per node, NaN outside the outer window
    inner: numpy.ndarray
    params: FracParams
    window_outer: Optional[portion.Interval] = None
    window_inner: Optional[portion.Interval] = None
    absolute: bool = False
    #: Diagonal band half-width in arc length
    band_length: float = 0.0

    def transform(self, kind: str) -> float:
        ''' Presentation variants of the total: 'none', 'outer_s' for
        ``total^s`` or 'root_p' for ``total^(1/p)``. '''
        if kind == 'none':
            return self.total
        if kind == 'outer_s':
            return self.total ** self.params.s
        if kind == 'root_p':
            return self.total ** (1 / self.params.p)
        raise ParameterError('Unknown transform {}'.format(kind))


@dataclass
class ScalingResult(object):
    energy: float
    energy_scaled: float
    predicted_ratio: float

    @property
    def observed_ratio(self) -> float:
        return self.energy_scaled / self.energy


@dataclass
class BmoProfile(object):
    ''' Supremum over windows of the mean oscillation of the tangent. '''
    #: Requested window half-widths
    scales: numpy.ndarray
    #: Half-widths realized on the node grid
    radii: numpy.ndarray
    #: Supremum per scale
    values: numpy.ndarray
    #: Cumulative maximum over increasing scales
    running_sup: numpy.ndarray
    p: float


@dataclass
class VmoResult(object):
    ''' Outcome of :py:func:`vmo_bound_check`. '''
    #: Worst ratio over the scales
    ratio: float
    ratios: numpy.ndarray
    #: Largest windowed energy seen
    max_energy: float
    #: False when the energy is above the smallness threshold
    applicable: bool


@dataclass
class MeanValueResult(object):
    ''' Constants of the double mean-value estimate on a grid. '''
    #: Largest ratio seen in the random search
    c_search: float
    #: Exact supremum of the ratio by duality
    c_dual: float
    p: float
    size: int
    trials: int


def _as_window(window, curve: ArcCurve):
    if window is None or isinstance(window, portion.Interval):
        return window
    lower, upper = window
    return arc_window(float(lower), float(upper), curve.length if curve.closed else None)


def _node_weights(curve: ArcCurve) -> numpy.ndarray:
    weight = numpy.ones(curve.count)
    if not curve.closed:
        weight[0] = weight[-1] = 0.5
    return weight


def willmore_energy(curve: ArcCurve, params: FracParams, window_outer=None, window_inner=None,
                    absolute: bool = False, band: int = 4,
                    threads: Optional[int] = None) -> EnergyBreakdown:
    ''' Energy ``sum_i |I(x_i)|^p w_i h`` over the outer window, with the inner
    integral restricted to the inner window.

    :param curve: The curve, tangents filled if missing.
    :param params: Order and exponent.
    :param window_outer: Arc interval or (lower, upper) pair for the outer
        integral, default the whole curve.
    :param window_inner: Arc interval or pair for the inner integral.
    :param absolute: Use the absolute numerator.
    :param band: Diagonal band half-width in nodes.
    '''
    if curve.normals is None:
        curve = tangent_normal(curve)
    outer = _as_window(window_outer, curve)
    inner_win = _as_window(window_inner, curve)
    params_arr = curve.params
    rows = numpy.arange(curve.count)
    if outer is not None:
        rows = rows[window_mask(params_arr, outer)]
    inner_mask = None if inner_win is None else window_mask(params_arr, inner_win)

    values = numpy.full(curve.count, numpy.nan)
    if len(rows):
        values[rows] = inner_integrals(curve, params.s, rows, band, absolute=absolute,
                                       inner_mask=inner_mask, threads=threads)
    weight = _node_weights(curve)[rows]
    total = float(numpy.sum(numpy.abs(values[rows]) ** params.p * weight) * curve.spacing)
    LOGGER.debug('Energy s=%g p=%g over %d nodes: %g', params.s, params.p, len(rows), total)
    return EnergyBreakdown(
        total=total, inner=values, params=params, window_outer=outer,
        window_inner=inner_win, absolute=absolute, band_length=band * curve.spacing,
    )


def scaling_check(curve: ArcCurve, params: FracParams, rho: float) -> ScalingResult:
    ''' Compare the energy of a curve with that of its dilation. '''
    if not rho > 0:
        raise ParameterError('Dilation factor must be positive')
    if curve.normals is None:
        curve = tangent_normal(curve)
    base = willmore_energy(curve, params).total
    if rho == 1:
        dilated = base
    else:
        dilated = willmore_energy(scaled(curve, rho), params).total
    return ScalingResult(energy=base, energy_scaled=dilated,
                         predicted_ratio=rho ** (1 - params.p * params.s))


def refinement_study(factory: Callable[[int], ArcCurve], params: FracParams,
                     sizes: Sequence[int], absolute: bool = False) -> List[Tuple[int, float]]:
    ''' Energy totals for a curve family at several resolutions. '''
    rows = []
    for count in sizes:
        total = willmore_energy(factory(count), params, absolute=absolute).total
        LOGGER.info('Refinement N=%d total %.10g', count, total)
        rows.append((int(count), total))
    return rows


def windowed_energies(curve: ArcCurve, params: FracParams, radius: float,
                      absolute: bool = True, band: int = 4,
                      threads: Optional[int] = None) -> numpy.ndarray:
    ''' Energy of every window ``B_r(x0)`` centred at a node, with both the
    inner and outer integrals restricted to the window.

    :return: One energy per centre node; windows of open curves which leave
        the curve are truncated.
    '''
    if curve.normals is None:
        curve = tangent_normal(curve)
    count, step = curve.count, curve.spacing
    reach = int(round(radius / step))
    if reach < 1 or (curve.closed and 2 * reach + 1 > count):
        raise ParameterError('Window radius {} does not fit the curve'.format(radius))
    s = params.s
    nodes, normals = curve.nodes, curve.normals
    kappa = menger_curvature(curve)
    if absolute:
        kappa = numpy.abs(kappa)
    allrows = numpy.arange(count)
    span = 2 * reach

    # banded kernel for offsets -2r..2r, local terms per side
    excl_a, excl_b, full_a, full_b, len_a, len_b = _band_layout(curve, allrows, band)
    offs = numpy.arange(-span, span + 1)

    def work(rows):
        cols = rows[:, None] + offs[None, :]
        valid = numpy.ones(cols.shape, dtype=bool)
        if curve.closed:
            cols = cols % count
        else:
            valid = (cols >= 0) & (cols < count)
            cols = numpy.clip(cols, 0, count - 1)
        diff = nodes[cols] - nodes[rows][:, None, :]
        numer = numpy.einsum('rjk,rjk->rj', normals[cols], diff)
        if absolute:
            numer = numpy.abs(numer)
        dist = numpy.hypot(diff[..., 0], diff[..., 1])
        weight = valid.astype(float)
        if not curve.closed:
            weight[(cols == 0) | (cols == count - 1)] *= 0.5
        skip = (offs[None, :] == 0) | ((offs > 0) & (offs <= excl_a[rows, None])) \
            | ((offs < 0) & (-offs <= excl_b[rows, None]))
        weight[skip] = 0.0
        weight[(full_a[rows, None] & (offs == band)) | (full_b[rows, None] & (offs == -band))] = 0.5
        safe = numpy.where(weight > 0, dist, 1.0)
        return weight * numer * safe ** (-2 - s) * step

    kernel = numpy.concatenate(parallel_map(work, list(row_chunks(allrows)), threads))
    prefix = numpy.concatenate([numpy.zeros((count, 1)), numpy.cumsum(kernel, axis=1)], axis=1)

    kap = kappa / 2
    corr = (step ** 2 / 12) * s * kap * (band * step) ** (-1 - s)

    def side_local(room, length, full):
        ''' Local term on one side given the in-window room. '''
        limit = numpy.minimum(length, room * step)
        term = kap * limit ** (1 - s) / (1 - s)
        return term - numpy.where(full & (room >= band), corr, 0.0)

    centres = allrows
    energy = numpy.zeros(count)
    for k in range(-reach, reach + 1):
        idx = centres + k
        if curve.closed:
            inwin = numpy.ones(count, dtype=bool)
            idx = idx % count
        else:
            inwin = (idx >= 0) & (idx < count)
            idx = numpy.clip(idx, 0, count - 1)
        room_a = reach - k
        room_b = reach + k
        if not curve.closed:
            room_a = numpy.minimum(room_a, count - 1 - idx)
            room_b = numpy.minimum(room_b, idx)
        # kernel column of offset d is d + span
        hi = numpy.minimum(room_a, span) + span + 1
        lo = -numpy.minimum(room_b, span) + span
        inner = prefix[idx, hi] - prefix[idx, lo]
        inner = inner + side_local(room_a, len_a[idx], full_a[idx]) + side_local(room_b, len_b[idx], full_b[idx])
        weight = numpy.where(inwin, 1.0, 0.0)
        if not curve.closed:
            weight = numpy.where((idx == 0) | (idx == count - 1), 0.5 * weight, weight)
        energy += weight * numpy.abs(inner) ** params.p * step
    return energy


def bmo_profile(curve: ArcCurve, p: float, scales: Sequence[float]) -> BmoProfile:
    ''' Supremum over node-centred windows of
    ``(mean mean |t(x) - t(y)|^p)^(1/p)`` for each window half-width.
    '''
    if p < 1:
        raise ParameterError('Exponent p must be at least 1, got {}'.format(p))
    if curve.tangents is None:
        curve = tangent_normal(curve)
    count, step = curve.count, curve.spacing
    tangents = curve.tangents
    scales = numpy.asarray(scales, dtype=float)
    radii = numpy.empty(len(scales))
    values = numpy.empty(len(scales))
    for pos, scale in enumerate(scales):
        reach = max(1, int(round(scale / step)))
        radii[pos] = reach * step
        offs = numpy.arange(-reach, reach + 1)
        wts = numpy.ones(len(offs))
        wts[0] = wts[-1] = 0.5
        wts /= numpy.sum(wts)
        if curve.closed:
            centres = numpy.arange(count)
        else:
            centres = numpy.arange(reach, count - reach)
        best = 0.0
        chunk = max(1, 2 ** 21 // len(offs) ** 2)
        for rows in row_chunks(centres, chunk):
            idx = rows[:, None] + offs[None, :]
            if curve.closed:
                idx = idx % count
            win = tangents[idx]
            diff = win[:, :, None, :] - win[:, None, :, :]
            osc = numpy.hypot(diff[..., 0], diff[..., 1]) ** p
            mean = numpy.einsum('rij,i,j->r', osc, wts, wts)
            best = max(best, float(numpy.max(mean)) if len(mean) else 0.0)
        values[pos] = best ** (1 / p)
    order = numpy.argsort(radii)
    running = numpy.empty(len(values))
    running[order] = numpy.maximum.accumulate(values[order])
    return BmoProfile(scales=scales, radii=radii, values=values, running_sup=running, p=p)


def vmo_bound_check(curve: ArcCurve, s: float, p: float, scales: Sequence[float],
                    eps_vmo: float = 1e-2) -> VmoResult:
    ''' Worst ratio of the tangent oscillation at scale r to the absolute
    windowed energy at scale 2r raised to the power s.
    '''
    params = FracParams(s=s, p=p)
    if curve.normals is None:
        curve = tangent_normal(curve)
    profile = bmo_profile(curve, p, scales)
    ratios = numpy.empty(len(profile.radii))
    max_energy = 0.0
    for pos, (rad, osc) in enumerate(zip(profile.radii, profile.values)):
        energy = float(numpy.max(windowed_energies(curve, params, 2 * rad, absolute=True)))
        max_energy = max(max_energy, energy)
        if osc == 0:
            ratios[pos] = 0.0
        elif energy == 0:
            ratios[pos] = math.inf
        else:
            ratios[pos] = osc / energy ** s
    applicable = max_energy < eps_vmo
    if not applicable:
        LOGGER.warning('Windowed energy %.3g above the smallness threshold %.3g', max_energy, eps_vmo)
    return VmoResult(ratio=float(numpy.max(ratios)), ratios=ratios,
                     max_energy=max_energy, applicable=applicable)


def window_tangents(curve: ArcCurve, centre: int, radius: float) -> GridFunction:
    ''' Tangents of a node-centred window as interval samples. '''
    if curve.tangents is None:
        curve = tangent_normal(curve)
    reach = int(round(radius / curve.spacing))
    idx = centre + numpy.arange(-reach, reach + 1)
    if curve.closed:
        idx = idx % curve.count
    elif idx[0] < 0 or idx[-1] >= curve.count:
        raise ParameterError('Window leaves the open curve')
    half = (reach + 0.5) * curve.spacing
    return GridFunction(samples=curve.tangents[idx], domain='interval', lower=-half, upper=half)


def sobolev_control_ratio(curve: ArcCurve, s: float, centre: int, radius: float) -> float:
    ''' Ratio of the critical seminorm of the tangent on a window to the
    absolute windowed energy raised to the power s.
    '''
    params = FracParams.critical_for(s)
    tangents = window_tangents(curve, centre, radius)
    seminorm = gagliardo_seminorm(tangents, s, 1 / s).value
    energy = float(windowed_energies(curve, params, radius, absolute=True)[centre])
    if energy == 0:
        return 0.0 if seminorm == 0 else math.inf
    return seminorm / energy ** s


def _mean_value_kernel(size: int) -> numpy.ndarray:
    ''' Coefficients K with ``LHS(U) = sum K |U|`` for the discrete triple
    mean ``mean_{x,y} mean_{z in [x,y]} |U(y, z)|``. '''
    kernel = numpy.zeros((size, size))
    for xix in range(size):
        for yix in range(size):
            lo, hi = min(xix, yix), max(xix, yix)
            kernel[yix, lo:hi + 1] += 1.0 / (hi - lo + 1)
    return kernel / size ** 2


def mean_value_estimate(p: float, size: int = 16, trials: int = 1000,
                        seed: int = 0) -> MeanValueResult:
    ''' Search for the constant of the double mean-value estimate
    ``mean mean mean_[x,y] |U| <= C (mean mean |U|^p)^(1/p)`` on a grid.

    The random search is bounded by the dual norm of the averaging kernel,
    which is the exact supremum.
    '''
    if not p > 1:
        raise ParameterError('Exponent p must exceed 1, got {}'.format(p))
    kernel = _mean_value_kernel(size)
    conj = p / (p - 1)
    cells = size * size
    c_dual = float(numpy.sum(kernel ** conj) ** (1 / conj)) * cells ** (1 / p)

    rng = numpy.random.default_rng(seed)
    best = 0.0
    for _ in range(trials):
        field = numpy.abs(rng.standard_cauchy((size, size)))
        lhs = float(numpy.sum(kernel * field))
        rhs = float(numpy.mean(field ** p)) ** (1 / p)
        best = max(best, lhs / rhs)
    return MeanValueResult(c_search=best, c_dual=c_dual, p=p, size=size, trials=trials)


def energy_partition(curve: ArcCurve, params: FracParams, pieces: int,
                     threads: Optional[int] = None) -> List[float]:
    ''' Energies over a partition of the curve into equal arc windows. '''
    length = curve.length
    bounds = numpy.linspace(0.0, length, pieces + 1)

    def work(ix):
        return willmore_energy(curve, params, window_outer=(bounds[ix], bounds[ix + 1])).total

    return parallel_map(work, range(pieces), threads)
