''' Scaling and corner suites.
'''
import logging
import math
import numpy

from fracwill.curvature import barrier_curvature, corner_exponent_fit
from fracwill.curve import ellipse, square
from fracwill.energy import FracParams, scaling_check, willmore_energy
from fracwill.region import BarrierSpec
from .base import AbstractSuite, suite

LOGGER = logging.getLogger(__name__)


@suite('scaling')
class ScalingSuite(AbstractSuite):
    ''' Dilation behavior of the energy at critical and subcritical
    exponents. '''

    #: Curve resolution
    COUNT = 512

    def run(self):
        curve = ellipse(self.COUNT, 1.0, 0.6)
        band = self._config.band_nodes
        rows = []

        params = FracParams.critical_for(0.5)
        for rho in (0.5, 2.0, 10.0):
            res = scaling_check(curve, params, rho)
            err = abs(res.observed_ratio - 1)
            self.check('critical_rho_{:g}'.format(rho), err < 1e-10, error=err)
            rows.append((self.COUNT, band, params.s, params.p, rho, res.energy,
                         res.energy_scaled, res.observed_ratio, res.predicted_ratio))

        params = FracParams(s=0.25, p=2.0)
        expect = 1 - params.p * params.s
        for rho in (2.0, 4.0, 8.0):
            res = scaling_check(curve, params, rho)
            slope = math.log(res.observed_ratio) / math.log(rho)
            self.check('subcritical_rho_{:g}'.format(rho), abs(slope - expect) < 1e-6,
                       slope=slope, expected=expect)
            rows.append((self.COUNT, band, params.s, params.p, rho, res.energy,
                         res.energy_scaled, res.observed_ratio, res.predicted_ratio))

        self.write_table('scaling.csv', ['N', 'band', 's', 'p', 'rho', 'energy', 'energy_scaled',
                                         'observed', 'predicted'], rows)


@suite('corners')
class CornerSuite(AbstractSuite):
    ''' Curvature blow-up at corners and the energy dichotomy of the square.
    '''

    #: Resolution of the sharp square for exponent fits
    FIT_COUNT = 32768
    #: Probe distances in spacings, past the corner
    PROBES = (5.5, 9.5, 15.5, 25.5, 40.5, 60.5)
    #: Resolutions of the refinement study
    REFINE = (256, 512, 1024, 2048, 4096, 8192)

    def run(self):
        self._exponents()
        self._barrier()
        self._dichotomy()

    def _exponents(self):
        band = self._config.band_nodes
        curve = square(self.FIT_COUNT)
        dists = numpy.asarray(self.PROBES) * curve.spacing
        rows = []
        for s in (0.3, 0.5, 0.7):
            fit = corner_exponent_fit(curve, s, dists, band=band)
            self.check('exponent_s{:g}'.format(s), abs(fit.exponent + s) <= 0.1,
                       exponent=fit.exponent, expected=-s)
            for dist, value in zip(fit.dists, fit.values):
                rows.append((self.FIT_COUNT, band, s, math.log(dist), math.log(value)))
        self.write_table('corner_fit.csv', ['N', 'band', 's', 'log_dist', 'log_h'], rows)

    def _barrier(self):
        barrier = BarrierSpec(m=1.0, m1=1.0, t_tilde=0.5)
        # abscissae from the probe grid which defines the constant
        grid = barrier.t_tilde * numpy.logspace(-3, 2, 64)
        for xval in grid[[8, 30, 50]]:
            xval = float(xval)
            res = barrier_curvature(barrier, xval, 0.5)
            self.check('barrier_x{:.3g}'.format(xval), res.direct > 0 and res.direct >= res.bound * (1 - 1e-9),
                       direct=res.direct, bound=res.bound, c_ms=res.c_ms)

    def _dichotomy(self):
        s = 0.5
        band = self._config.band_nodes
        crit = FracParams(s=s, p=2.0)
        rows = []
        totals_crit, totals_super = [], []
        for count in self.REFINE:
            curve = square(count)
            brk = willmore_energy(curve, crit, band=band, threads=self.threads)
            super_total = float(numpy.sum(numpy.abs(brk.inner)) * curve.spacing)
            totals_crit.append(brk.total)
            totals_super.append(super_total)
            rows.append((count, band, s, brk.total, super_total))
        self.write_table('square_refinement.csv', ['N', 'band', 's', 'energy_p2', 'energy_p1'], rows)

        incr = numpy.diff(totals_crit)
        self.check('critical_divergence', bool(numpy.all(incr > 0) and numpy.min(incr) >= 0.5 * numpy.mean(incr)),
                   increments=incr.tolist())
        diffs = numpy.abs(numpy.diff(totals_super))
        shrink = diffs[:-1] / diffs[1:]
        need = 0.9 * 2 ** (1 - s)
        self.check('supercritical_finite', bool(numpy.all(shrink >= need)),
                   shrink=shrink.tolist(), required=need)
