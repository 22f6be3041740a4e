''' Convexity-constrained descent of the critical energy over support
functions, and diagnostics for sequences of curves.
'''
import csv
from dataclasses import dataclass, field
import json
import logging
import math
import os
from typing import List, Optional, Sequence
import numpy
from scipy.optimize import nnls

from fracwill.config import DescentConfig
from fracwill.curve import (
    ArcCurve, SupportCurve, ellipse, rounded_square, support_to_curve, support_to_dict,
)
from fracwill.energy import FracParams, willmore_energy, windowed_energies
from fracwill.error import ConstraintError, ParameterError, PreconditionError, ProjectionError
from fracwill.util import count_clusters, parallel_map

LOGGER = logging.getLogger(__name__)

#: Dense angle grid of the convexity constraint
PROJECT_GRID = 4096
#: Smallest line-search step before giving up
STEP_FLOOR = 1e-12


@dataclass
class DescentStep(object):
    ''' One line-search trial of the descent. '''
    iteration: int
    support: SupportCurve
    energy: float
    grad_norm: float
    step: float
    accepted: bool


@dataclass
class DescentTrace(object):
    ''' Record of a descent run. '''
    #: The starting point after gauge fixing and projection
    initial: SupportCurve
    initial_energy: float
    #: Every line-search trial in order
    steps: List[DescentStep] = field(default_factory=list)
    final: Optional[SupportCurve] = None
    final_energy: float = math.nan
    #: One of 'grad_tol', 'max_iters' or 'step_collapse'
    reason: str = ''

    @property
    def accepted(self) -> List[DescentStep]:
        return [item for item in self.steps if item.accepted]

    @property
    def energies(self) -> List[float]:
        ''' Energies of the starting point and every accepted iterate. '''
        return [self.initial_energy] + [item.energy for item in self.accepted]


@dataclass
class LscResult(object):
    w_limit: float
    liminf_proxy: float
    energies: List[float]
    holds: bool


@dataclass
class ConcentrationReport(object):
    ''' Points where windowed energy stays large along a sequence. '''
    #: Arc positions of the concentration points on the last member
    points: List[float]
    #: Smallest windowed energy over the tail, one row per radius
    local_energies: numpy.ndarray
    radii: List[float]
    eps: float
    #: Largest global energy of the sequence
    lam: float
    #: Covering bound on the number of points
    bound: int

    @property
    def holds(self) -> bool:
        return len(self.points) <= self.bound


def energy_of_support(sc: SupportCurve, s: float, count: int,
                      eps_kappa: Optional[float] = None, threads: Optional[int] = None) -> float:
    ''' Critical energy of the curve realized from a support function.

    :raise ConstraintError: If the support function is not convex enough.
    '''
    curve = support_to_curve(sc, count, eps_kappa)
    return willmore_energy(curve, FracParams.critical_for(s), threads=threads).total


def fd_gradient(sc: SupportCurve, s: float, count: int, h_fd: float = 1e-4,
                eps_kappa: Optional[float] = None, threads: Optional[int] = None) -> numpy.ndarray:
    ''' Central-difference gradient in coefficient space, ordered as
    :py:meth:`SupportCurve.vector`.

    :param h_fd: Difference step relative to a0.
    :raise ConstraintError: If a probe is not convex even after one retry
        with a smaller step.
    '''
    step = h_fd * sc.a0
    if step < 1e-6 * sc.a0:
        raise ParameterError('Difference step {} below 1e-6 a0'.format(h_fd))
    base = sc.vector()

    def probe(arg):
        index, sign, size = arg
        vec = base.copy()
        vec[index] += sign * size
        return energy_of_support(SupportCurve.from_vector(vec), s, count, eps_kappa, threads=1)

    for attempt in range(2):
        args = [(index, sign, step) for index in range(len(base)) for sign in (1, -1)]
        try:
            values = numpy.asarray(parallel_map(probe, args, threads)).reshape(-1, 2)
        except ConstraintError:
            if attempt:
                raise
            LOGGER.warning('Gradient probe left the convex set, retrying with step %g', step / 10)
            step /= 10
            continue
        return (values[:, 0] - values[:, 1]) / (2 * step)


def _constraint_rows(order: int, grid: int):
    theta = numpy.arange(grid) * (2 * math.pi / grid)
    modes = numpy.arange(2, order + 1)
    kth = numpy.multiply.outer(theta, modes)
    weight = 1.0 - modes ** 2
    rows = numpy.empty((grid, 2 * len(modes)))
    rows[:, 0::2] = numpy.cos(kth) * weight
    rows[:, 1::2] = numpy.sin(kth) * weight
    return rows


def project_convex(sc: SupportCurve, eps_kappa: float, grid: int = PROJECT_GRID) -> SupportCurve:
    ''' Closest support function, in the coefficient norm with a0 held fixed,
    whose radius of curvature is at least ``eps_kappa`` on a dense grid.

    The least-distance problem is solved through its non-negative least
    squares dual.

    :raise ProjectionError: If no such support function is found.
    '''
    if sc.a0 <= eps_kappa:
        raise ProjectionError('Mean radius {} does not exceed the floor {}'.format(sc.a0, eps_kappa))
    rows = _constraint_rows(sc.order, grid)
    coef = sc.coeffs.ravel()
    # rows @ (coef + y) >= eps - a0
    rhs = (eps_kappa - sc.a0) - rows @ coef
    if numpy.max(rhs) <= 1e-9:
        return sc

    size = rows.shape[1]
    emat = numpy.vstack([rows.T, rhs[None, :]])
    target = numpy.zeros(size + 1)
    target[-1] = 1.0
    try:
        dual, _ = nnls(emat, target, maxiter=100 * (size + 1))
    except RuntimeError as err:
        raise ProjectionError('Projection did not converge: {}'.format(err))
    resid = emat @ dual - target
    if abs(resid[-1]) < 1e-14:
        raise ProjectionError('Convexity constraint is infeasible')
    shift = -resid[:-1] / resid[-1]
    result = SupportCurve(a0=sc.a0, coeffs=(coef + shift).reshape(-1, 2))
    worst = float(numpy.max(rhs - rows @ shift))
    if worst > 1e-9:
        raise ProjectionError('Projection leaves a violation of {:.3g}'.format(worst))
    LOGGER.debug('Projected by %.3g in coefficient norm', float(numpy.linalg.norm(shift)))
    return result


def normalize_gauge(sc: SupportCurve) -> SupportCurve:
    ''' Rescale to perimeter 2 pi. Support functions carry no first modes,
    so the curve is already centred. '''
    return sc.scaled(1.0 / sc.a0)


def random_convex(order: int, amplitude: float, seed: int = 0,
                  eps_kappa: float = 1e-3) -> SupportCurve:
    ''' A random convex support function with a0 = 1 and mode amplitudes
    decaying as ``1/k^2``. '''
    if order < 2:
        raise ParameterError('Truncation order must be at least 2')
    rng = numpy.random.default_rng(seed)
    modes = numpy.arange(2, order + 1)
    coeffs = rng.standard_normal((order - 1, 2)) * (amplitude / modes ** 2)[:, None]
    return project_convex(SupportCurve(a0=1.0, coeffs=coeffs), eps_kappa)


def minimize_descent(config: DescentConfig, init: SupportCurve,
                     threads: Optional[int] = None) -> DescentTrace:
    ''' Projected gradient descent with backtracking on the critical energy.

    The scale is fixed at a0 = 1 and never moved by a step; every trial is
    projected back onto the convex set.

    :raise ParameterError: If the starting energy is not finite.
    '''
    floor = config.eps_kappa
    # evaluation floor below the projection target so projected points realize
    eval_floor = 0.5 * floor

    def energy(sc):
        return energy_of_support(sc, config.s, config.N, eval_floor, threads)

    current = project_convex(normalize_gauge(init), floor)
    value = energy(current)
    if not math.isfinite(value):
        raise ParameterError('Initial energy is not finite')
    trace = DescentTrace(initial=current, initial_energy=value)
    step = config.step0
    iteration = 0
    while True:
        if iteration >= config.max_iters:
            trace.reason = 'max_iters'
            break
        grad = fd_gradient(current, config.s, config.N, config.h_fd, eval_floor, threads)
        grad[0] = 0.0
        gnorm = float(numpy.linalg.norm(grad[1:]))
        LOGGER.debug('Iteration %d energy %.12g gradient norm %.3g', iteration, value, gnorm)
        if gnorm < config.grad_tol:
            trace.reason = 'grad_tol'
            break

        vec = current.vector()
        while True:
            trial = project_convex(SupportCurve.from_vector(vec - step * grad), floor)
            trial_value = energy(trial)
            accepted = trial_value <= value - 1e-4 * step * gnorm ** 2
            trace.steps.append(DescentStep(
                iteration=iteration, support=trial, energy=trial_value,
                grad_norm=gnorm, step=step, accepted=accepted,
            ))
            if accepted:
                LOGGER.info('Accepted step %.3g at iteration %d, energy %.12g', step, iteration, trial_value)
                current, value = trial, trial_value
                step *= config.grow
                break
            step *= config.shrink
            if step < STEP_FLOOR:
                break
        if step < STEP_FLOOR:
            trace.reason = 'step_collapse'
            break
        iteration += 1

    trace.final = current
    trace.final_energy = value
    LOGGER.info('Descent stopped by %s after %d iterations, energy %.12g', trace.reason, iteration, value)
    return trace


def write_trace(trace: DescentTrace, outdir: str, config: Optional[DescentConfig] = None) -> List[str]:
    ''' Persist a trace as JSON, CSV and one support curve file per
    accepted iterate.

    :return: The written file paths.
    '''
    os.makedirs(outdir, exist_ok=True)
    written = []
    curve_files = []
    for pos, item in enumerate([None] + trace.accepted):
        support = trace.initial if item is None else item.support
        path = os.path.join(outdir, 'iterate_{:04d}.json'.format(pos))
        with open(path, 'w') as outfile:
            json.dump(support_to_dict(support), outfile)
        curve_files.append(os.path.basename(path))
        written.append(path)

    path = os.path.join(outdir, 'trace.csv')
    with open(path, 'w', newline='') as outfile:
        writer = csv.writer(outfile)
        writer.writerow(['iter', 'energy', 'grad_norm', 'step', 'accepted'])
        for item in trace.steps:
            writer.writerow([item.iteration, repr(item.energy), repr(item.grad_norm),
                             repr(item.step), int(item.accepted)])
    written.append(path)

    data = {
        'initial': support_to_dict(trace.initial),
        'initial_energy': trace.initial_energy,
        'steps': [
            {
                'iter': item.iteration,
                'energy': item.energy,
                'grad_norm': item.grad_norm,
                'step': item.step,
                'accepted': item.accepted,
            }
            for item in trace.steps
        ],
        'final': support_to_dict(trace.final) if trace.final is not None else None,
        'final_energy': trace.final_energy,
        'reason': trace.reason,
        'curves': curve_files,
    }
    if config is not None:
        data['config'] = config.__dict__.copy()
    path = os.path.join(outdir, 'trace.json')
    with open(path, 'w') as outfile:
        json.dump(data, outfile, indent=2)
    written.append(path)
    return written


def _tail(sequence):
    return sequence[len(sequence) // 2:]


def _check_sequence(sequence, limit=None):
    if len(sequence) < 4:
        raise PreconditionError('Sequence needs at least 4 curves, got {}'.format(len(sequence)))
    counts = {curve.count for curve in list(sequence) + ([limit] if limit is not None else [])}
    if len(counts) != 1:
        raise PreconditionError('Sequence curves differ in node count: {}'.format(sorted(counts)))


def lsc_check(sequence: Sequence[ArcCurve], limit: ArcCurve, s: float,
              tol_lsc: float = 1e-4, threads: Optional[int] = None) -> LscResult:
    ''' Compare the critical energy of a limit with a liminf proxy of the
    sequence energies.

    The proxy is the minimum over the last half of the sequence, or the last
    member when that half is nondecreasing.
    '''
    sequence = list(sequence)
    _check_sequence(sequence, limit)
    params = FracParams.critical_for(s)
    energies = [willmore_energy(curve, params, threads=threads).total for curve in sequence]
    w_limit = willmore_energy(limit, params, threads=threads).total
    tail = _tail(energies)
    if all(later >= earlier for earlier, later in zip(tail, tail[1:])):
        proxy = tail[-1]
    else:
        proxy = min(tail)
    holds = w_limit <= proxy + tol_lsc * abs(proxy)
    LOGGER.info('Limit energy %.10g against liminf proxy %.10g', w_limit, proxy)
    return LscResult(w_limit=w_limit, liminf_proxy=proxy, energies=energies, holds=holds)


def concentration_scan(sequence: Sequence[ArcCurve], s: float, eps: float,
                       radii: Sequence[float], p: Optional[float] = None,
                       threads: Optional[int] = None) -> ConcentrationReport:
    ''' Find arc positions where the absolute windowed energy exceeds
    ``eps`` for every radius and every member of the sequence tail.

    Members are compared node by node, so they share one node count and
    start point.
    '''
    if not eps > 0:
        raise ParameterError('Threshold must be positive')
    radii = [float(rad) for rad in radii]
    if any(later >= earlier for earlier, later in zip(radii, radii[1:])):
        raise ParameterError('Radii must be decreasing')
    sequence = list(sequence)
    _check_sequence(sequence)
    params = FracParams(s=s, p=p if p is not None else 1 / s)

    lam = max(willmore_energy(curve, params, absolute=True, threads=threads).total
              for curve in sequence)
    count = sequence[0].count
    local = numpy.full((len(radii), count), numpy.inf)
    for curve in _tail(sequence):
        for pos, rad in enumerate(radii):
            local[pos] = numpy.minimum(local[pos], windowed_energies(curve, params, rad, threads=threads))
    flagged = numpy.all(local > eps, axis=0)

    last = sequence[-1]
    length = last.length if last.closed else None
    clusters = count_clusters(last.params[flagged], last.spacing, length)
    points = []
    for cluster in clusters:
        centre = 0.5 * (cluster.lower + cluster.upper)
        points.append(centre % length if length else centre)
    bound = int(math.floor(2 ** params.p * lam / eps))
    LOGGER.info('Found %d concentration points, bound %d', len(points), bound)
    return ConcentrationReport(points=points, local_energies=local, radii=radii, eps=eps,
                               lam=lam, bound=bound)


def ellipse_family(count: int, minors: Sequence[float] = (0.6, 0.7, 0.8, 0.9, 0.95, 0.99)) -> List[ArcCurve]:
    ''' Ellipses with unit major semi-axis approaching the unit circle. '''
    return [ellipse(count, 1.0, minor) for minor in minors]


def rounded_square_family(count: int,
                          fillets: Sequence[float] = (0.04, 0.02, 0.01, 0.005)) -> List[ArcCurve]:
    ''' Unit squares with shrinking corner fillets. '''
    return [rounded_square(count, fillet) for fillet in fillets]
