''' One-dimensional fractional operators on sampled functions.

Functions live either on a circle of some period, sampled at ``k h``, or on
an interval sampled at cell centres ``a + (k + 1/2) h``. Samples may be
scalar or vector valued (shape (M,) or (M, d)).
'''
import dataclasses
from dataclasses import dataclass
import json
import logging
import math
from typing import Optional
import numpy
from scipy.interpolate import CubicSpline
from scipy.special import gamma, roots_jacobi

from fracwill.error import (
    ParameterError, PreconditionError, UnsupportedDomainError,
)
from fracwill.util import row_chunks

LOGGER = logging.getLogger(__name__)

#: Node count of the graded near-field rule
NEAR_NODES = 16
#: Near-field half-width in cells
NEAR_CELLS = 3
#: Relative change of the near-field refinement which clears the smoothness flag
NEAR_REFINE_TOL = 1e-2


@dataclass(frozen=True, eq=False)
class GridFunction(object):
    ''' Samples of a function on a circle or an interval. '''

    #: Sample values, shape (M,) or (M, d)
    samples: numpy.ndarray
    #: Either 'circle' or 'interval'
    domain: str = 'circle'
    #: Period of a circle domain
    period: float = 2 * math.pi
    #: Interval end points
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        samples = numpy.asarray(self.samples, dtype=float)
        object.__setattr__(self, 'samples', samples)
        if len(samples) < 32:
            raise ParameterError('At least 32 samples are required, got {}'.format(len(samples)))
        if self.domain not in ('circle', 'interval'):
            raise ParameterError('Unknown domain {}'.format(self.domain))
        if self.domain == 'interval' and not self.upper > self.lower:
            raise ParameterError('Empty interval')

    @classmethod
    def on_circle(cls, func, count: int, period: float = 2 * math.pi):
        points = numpy.arange(count) * (period / count)
        return cls(samples=func(points), domain='circle', period=period)

    @classmethod
    def on_interval(cls, func, lower: float, upper: float, count: int):
        points = lower + (numpy.arange(count) + 0.5) * ((upper - lower) / count)
        return cls(samples=func(points), domain='interval', lower=lower, upper=upper)

    @property
    def count(self) -> int:
        return len(self.samples)

    @property
    def spacing(self) -> float:
        if self.domain == 'circle':
            return self.period / self.count
        return (self.upper - self.lower) / self.count

    @property
    def points(self) -> numpy.ndarray:
        if self.domain == 'circle':
            return numpy.arange(self.count) * self.spacing
        return self.lower + (numpy.arange(self.count) + 0.5) * self.spacing

    @property
    def extent(self) -> float:
        return self.period if self.domain == 'circle' else self.upper - self.lower

    def replace(self, samples):
        return dataclasses.replace(self, samples=samples)

    def derivative(self):
        ''' Spectral derivative on a circle, central differences on an
        interval. '''
        if self.domain == 'circle':
            wavenum = 2 * math.pi * numpy.fft.rfftfreq(self.count, d=self.spacing)
            if self.count % 2 == 0:
                wavenum[-1] = 0.0
            coef = numpy.fft.rfft(self.samples, axis=0)
            shape = (-1,) + (1,) * (self.samples.ndim - 1)
            deriv = numpy.fft.irfft(1j * wavenum.reshape(shape) * coef, n=self.count, axis=0)
            return self.replace(deriv)
        return self.replace(numpy.gradient(self.samples, self.spacing, axis=0, edge_order=2))

    def magnitude(self) -> numpy.ndarray:
        ''' Pointwise absolute value, the Euclidean norm for vector samples. '''
        if self.samples.ndim == 1:
            return numpy.abs(self.samples)
        return numpy.linalg.norm(self.samples, axis=1)

    def lp_norm(self, power: float) -> float:
        return float(numpy.sum(self.magnitude() ** power) * self.spacing) ** (1 / power)

    def mean(self):
        return numpy.sum(self.samples, axis=0) * self.spacing / self.extent


@dataclass
class SeminormResult(object):
    ''' Value of a fractional seminorm. '''
    value: float
    order: float
    p: float
    domain: str
    #: False when the near-field refinement check moved the value too much
    smooth: bool = True
    #: Relative change in the near-field refinement check
    refinement: float = 0.0


@dataclass
class PoincareResult(object):
    ''' Outcome of :py:func:`poincare_sobolev_check`. '''
    lhs_l1t: float
    lhs_l2: float
    rhs: float
    embed_ratio: Optional[float] = None


def _check_order(order, name='t'):
    if not 0 < order < 1:
        raise ParameterError('Order {} must be in (0,1), got {}'.format(name, order))


def _shift_values(func: GridFunction, shift: float) -> numpy.ndarray:
    ''' Values of the trigonometric interpolant at every sample point plus
    a shift. '''
    wavenum = 2 * math.pi * numpy.fft.rfftfreq(func.count, d=func.spacing)
    coef = numpy.fft.rfft(func.samples, axis=0)
    shape = (-1,) + (1,) * (func.samples.ndim - 1)
    phase = numpy.exp(1j * wavenum * shift).reshape(shape)
    if func.count % 2 == 0:
        phase[-1] = math.cos(wavenum[-1] * shift)
    return numpy.fft.irfft(coef * phase, n=func.count, axis=0)


def _vector(samples):
    return samples if samples.ndim > 1 else samples[:, None]


def _inner_far(func: GridFunction, order: float, skip: int) -> numpy.ndarray:
    ''' Midpoint sums of ``|f(x) - f(y)|^2 / |x - y|^(1+2t)`` over cells
    more than ``skip`` cells away. '''
    count, step = func.count, func.spacing
    vals = _vector(func.samples)
    allidx = numpy.arange(count)
    out = numpy.empty(count)
    for rows in row_chunks(allidx):
        off = numpy.abs(allidx[None, :] - rows[:, None])
        if func.domain == 'circle':
            off = numpy.minimum(off, count - off)
        dist = off * step
        diff = vals[None, :, :] - vals[rows][:, None, :]
        sq = numpy.sum(diff * diff, axis=-1)
        use = off > skip
        out[rows] = numpy.sum(
            numpy.where(use, sq / numpy.where(use, dist, 1.0) ** (1 + 2 * order), 0.0), axis=1
        ) * step
    return out


def _near_graded(func: GridFunction, order: float, cells: int, nodes: int) -> numpy.ndarray:
    ''' Gauss-Jacobi integration of the near field ``|r| < (cells + 1/2) h``
    with weight ``r^(1-2t)``. '''
    step = func.spacing
    reach = (cells + 0.5) * step
    beta_exp = 1 - 2 * order
    xg, wg = roots_jacobi(nodes, 0.0, beta_exp)
    vals = _vector(func.samples)
    spline = None
    if func.domain == 'interval':
        spline = CubicSpline(func.points, func.samples, axis=0)
    total = numpy.zeros(func.count)
    for sign in (1.0, -1.0):
        if func.domain == 'circle':
            side = numpy.full(func.count, reach)
        else:
            room = func.upper - func.points if sign > 0 else func.points - func.lower
            side = numpy.minimum(reach, room)
        for xk, wk in zip(xg, wg):
            frac = (1 + xk) / 2
            if func.domain == 'circle':
                shifted = _vector(_shift_values(func, sign * frac * reach))
            else:
                shifted = _vector(spline(func.points + sign * frac * side))
            rad = frac * side
            sq = numpy.sum((shifted - vals) ** 2, axis=1)
            total += wk * (side / 2) ** (1 + beta_exp) * sq / numpy.where(rad > 0, rad, 1.0) ** 2
    return total


def gagliardo_seminorm(func: GridFunction, order: float, p: float = 2.0,
                       refine_check: bool = True) -> SeminormResult:
    ''' The seminorm with inner L2 and outer Lp integrals,
    ``( int ( int |f(x) - f(y)|^2 / |x - y|^(1+2t) dy )^(p/2) dx )^(1/p)``.

    For t < 1/2 the excluded diagonal cell carries the local term
    ``2 |f'(x)|^2 (h/2)^(2-2t) / (2-2t)``. For t >= 1/2 the near field is
    integrated on a graded rule and checked against a doubled near field.

    :param func: The sampled function.
    :param order: The order t in (0,1).
    :param p: The outer exponent, at least one.
    :param refine_check: Run the near-field refinement check for t >= 1/2.
    '''
    _check_order(order)
    if p < 1:
        raise ParameterError('Outer exponent must be at least 1, got {}'.format(p))
    step = func.spacing
    refinement = 0.0
    smooth = True
    if order < 0.5:
        deriv = _vector(func.derivative().samples)
        local = 2 * numpy.sum(deriv ** 2, axis=1) * (step / 2) ** (2 - 2 * order) / (2 - 2 * order)
        inner = _inner_far(func, order, 0) + local
    else:
        inner = _inner_far(func, order, NEAR_CELLS) + _near_graded(func, order, NEAR_CELLS, NEAR_NODES)
        if refine_check:
            wide = (_inner_far(func, order, 2 * NEAR_CELLS + 1)
                    + _near_graded(func, order, 2 * NEAR_CELLS + 1, 2 * NEAR_NODES))
            base = (numpy.sum(numpy.maximum(inner, 0) ** (p / 2)) * step) ** (1 / p)
            alt = (numpy.sum(numpy.maximum(wide, 0) ** (p / 2)) * step) ** (1 / p)
            refinement = abs(alt - base) / base if base > 0 else 0.0
            smooth = refinement <= NEAR_REFINE_TOL
            if not smooth:
                LOGGER.warning('Near-field refinement moved the seminorm by %.3g', refinement)
    inner = numpy.maximum(inner, 0.0)
    value = float(numpy.sum(inner ** (p / 2)) * step) ** (1 / p)
    return SeminormResult(value=value, order=order, p=p, domain=func.domain,
                          smooth=smooth, refinement=refinement)


def spectral_fractional_laplacian(func: GridFunction, sigma: float) -> GridFunction:
    ''' Apply the multiplier ``(2 pi |k| / P)^sigma`` to the Fourier
    coefficients of a periodic function; the mean mode maps to zero.

    :raise UnsupportedDomainError: For interval functions.
    '''
    if func.domain != 'circle':
        raise UnsupportedDomainError('The spectral operator needs a periodic domain')
    if sigma < 0:
        raise ParameterError('Order must be nonnegative, got {}'.format(sigma))
    freq = numpy.fft.rfftfreq(func.count, d=func.spacing)
    mult = (2 * math.pi * freq) ** sigma
    mult[0] = 0.0
    shape = (-1,) + (1,) * (func.samples.ndim - 1)
    coef = numpy.fft.rfft(func.samples, axis=0) * mult.reshape(shape)
    return func.replace(numpy.fft.irfft(coef, n=func.count, axis=0))


def stein_ratio(func: GridFunction, s: float) -> float:
    ''' Ratio of the critical seminorm to the L^(1/s) norm of the spectral
    fractional Laplacian of order s.

    :raise PreconditionError: For a constant function.
    '''
    _check_order(s, 's')
    num = gagliardo_seminorm(func, s, 1 / s).value
    den = spectral_fractional_laplacian(func, s).lp_norm(1 / s)
    scale = float(numpy.max(func.magnitude())) or 1.0
    if den <= 1e-14 * scale or num <= 1e-14 * scale:
        raise PreconditionError('Degenerate ratio for a constant function')
    return num / den


def fractional_constant(sigma: float) -> float:
    ''' Normalizing constant ``c_{1,sigma}`` of the hypersingular form of
    ``(-Laplacian)^(sigma/2)`` on the line. '''
    return sigma * 2 ** (sigma - 1) * gamma((1 + sigma) / 2) / (math.sqrt(math.pi) * gamma(1 - sigma / 2))


def t_operator_constant(s: float) -> float:
    ''' The constant C with ``T f = C (-Laplacian)^((1+s)/2) f``. '''
    return -s / fractional_constant(1 + s)


def t_operator(func: GridFunction, s: float, rows=None, band: int = 3) -> numpy.ndarray:
    ''' The tangent-subtracted operator
    ``T f(x) = int (f(x) - f(y) - f'(y)(x - y)) / |x - y|^(2+s) dy`` for a
    function vanishing near the ends of its interval.

    :param func: Interval samples.
    :param s: The order in (0,1).
    :param rows: Sample indices to evaluate, default all.
    :param band: Diagonal band half-width in cells.
    :return: One value per row.
    :raise PreconditionError: If the support reaches the interval ends.
    '''
    _check_order(s, 's')
    if func.domain != 'interval':
        raise UnsupportedDomainError('The operator is defined on interval samples')
    vals = func.samples
    if vals.ndim != 1:
        raise ParameterError('Scalar samples are required')
    scale = float(numpy.max(numpy.abs(vals)))
    if scale == 0:
        return numpy.zeros(func.count if rows is None else len(numpy.atleast_1d(rows)))
    edge = numpy.concatenate([vals[:2], vals[-2:]])
    if numpy.max(numpy.abs(edge)) > 1e-12 * scale:
        raise PreconditionError('Function support touches the interval boundary')

    step = func.spacing
    count = func.count
    points = func.points
    deriv = numpy.gradient(vals, step)
    padded = numpy.concatenate([[0.0], vals, [0.0]])
    second = (padded[2:] - 2 * padded[1:-1] + padded[:-2]) / step ** 2
    rows = numpy.arange(count) if rows is None else numpy.atleast_1d(numpy.asarray(rows, dtype=int))
    allidx = numpy.arange(count)
    delta = (band + 0.5) * step

    out = numpy.empty(len(rows))
    for chunk in row_chunks(numpy.arange(len(rows))):
        sel = rows[chunk]
        rel = points[sel][:, None] - points[None, :]
        off = numpy.abs(sel[:, None] - allidx[None, :])
        use = off > band
        numer = vals[sel][:, None] - vals[None, :] - deriv[None, :] * rel
        dist = numpy.where(use, numpy.abs(rel), 1.0)
        far = numpy.sum(numpy.where(use, numer / dist ** (2 + s), 0.0), axis=1) * step
        local = second[sel] * delta ** (1 - s) / (1 - s)
        xval = points[sel]
        tails = vals[sel] * ((xval - func.lower) ** (-1 - s) + (func.upper - xval) ** (-1 - s)) / (1 + s)
        out[chunk] = far + local + tails
    return out


def t_operator_oracle(func: GridFunction, s: float, pad: int = 8) -> numpy.ndarray:
    ''' The predicted ``C (-Laplacian)^((1+s)/2) f`` on a zero-padded
    periodic extension. '''
    padded = numpy.zeros(pad * func.count)
    padded[:func.count] = func.samples
    ext = GridFunction(samples=padded, domain='circle', period=pad * func.extent)
    return t_operator_constant(s) * spectral_fractional_laplacian(ext, 1 + s).samples[:func.count]


def poincare_sobolev_check(func: GridFunction, order: float,
                           s_target: Optional[float] = None) -> PoincareResult:
    ''' Norms of a mean-free function against its critical seminorm, and
    optionally the embedding ratio between two critical seminorms.

    :raise PreconditionError: If the function is not mean-free.
    '''
    _check_order(order)
    mean = func.mean()
    if numpy.max(numpy.abs(mean)) > 1e-10:
        raise PreconditionError('Function mean {} is not zero'.format(mean))
    rhs = gagliardo_seminorm(func, order, 1 / order).value
    result = PoincareResult(
        lhs_l1t=func.lp_norm(1 / order),
        lhs_l2=func.lp_norm(2.0),
        rhs=rhs,
    )
    if s_target is not None:
        if not 0 < s_target < order:
            raise ParameterError('Embedding requires 0 < s < t, got {} and {}'.format(s_target, order))
        lower = gagliardo_seminorm(func, s_target, 1 / s_target).value
        result.embed_ratio = lower / rhs if rhs > 0 else 0.0
    return result


def load_function(fileobj) -> GridFunction:
    ''' Read a function file, a JSON object with ``domain`` (``circle``,
    or ``interval`` with ``lower`` and ``upper``) and ``samples``.
    '''
    data = json.load(fileobj)
    domain = data.get('domain', 'circle')
    if domain == 'circle':
        return GridFunction(samples=data['samples'], domain='circle',
                            period=float(data.get('period', 2 * math.pi)))
    return GridFunction(samples=data['samples'], domain='interval',
                        lower=float(data.get('lower', -1.0)), upper=float(data.get('upper', 1.0)))


def dump_function(func: GridFunction, fileobj):
    data = {'domain': func.domain, 'samples': func.samples.tolist()}
    if func.domain == 'circle':
        data['period'] = func.period
    else:
        data['lower'] = func.lower
        data['upper'] = func.upper
    json.dump(data, fileobj)
