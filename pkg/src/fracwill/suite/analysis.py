''' Fractional Sobolev and oscillation suites.
'''
import logging
import math
import numpy

from fracwill.curve import circle, rotated, support_perturbation
from fracwill.energy import bmo_profile, mean_value_estimate, sobolev_control_ratio, vmo_bound_check
from fracwill.fracops import (
    GridFunction, stein_ratio, t_operator, t_operator_constant, t_operator_oracle,
)
from .base import AbstractSuite, suite

LOGGER = logging.getLogger(__name__)


def band_limited(rng, modes: int = 8):
    ''' A random trigonometric polynomial with coefficients decaying as 1/k. '''
    kval = numpy.arange(1, modes + 1)
    acoef = rng.standard_normal(modes) / kval
    bcoef = rng.standard_normal(modes) / kval

    def func(xval):
        kx = numpy.multiply.outer(xval, kval)
        return numpy.cos(kx) @ acoef + numpy.sin(kx) @ bcoef

    return func


@suite('sobolev')
class SobolevSuite(AbstractSuite):
    ''' Stein equivalence and the potential formula of the tangent-subtracted
    operator. '''

    #: Number of random functions
    SAMPLES = 20
    #: Coarse grid, doubled for the stability check
    COUNT = 256
    ORDERS = (0.3, 0.5, 0.7)

    def run(self):
        self._stein()
        self._toperator()

    def _stein(self):
        rng = numpy.random.default_rng(self._config.seed)
        rows = []
        for sample in range(self.SAMPLES):
            func = band_limited(rng)
            coarse = GridFunction.on_circle(func, self.COUNT)
            fine = GridFunction.on_circle(func, 2 * self.COUNT)
            for s in self.ORDERS:
                rcoarse = stein_ratio(coarse, s)
                rfine = stein_ratio(fine, s)
                change = abs(rfine / rcoarse - 1)
                ok = 0.1 <= rcoarse <= 10 and 0.1 <= rfine <= 10 and change < 0.05
                self.check('stein_{}_s{:g}'.format(sample, s), ok,
                           coarse=rcoarse, fine=rfine, change=change)
                rows.append((sample, self.COUNT, s, rcoarse, rfine))
        self.write_table('stein.csv', ['sample', 'M', 's', 'ratio_M', 'ratio_2M'], rows)

    def _toperator(self):
        s = 0.5
        func = GridFunction.on_interval(lambda x: numpy.exp(-x ** 2 / (2 * 0.1 ** 2)), -1.0, 1.0, 400)
        values = t_operator(func, s)
        spectral = t_operator_oracle(func, s) / t_operator_constant(s)
        sel = (numpy.abs(func.points) <= 0.5) & (numpy.abs(spectral) > 0.1 * numpy.max(numpy.abs(spectral)))
        ratio = values[sel] / spectral[sel]
        mean = float(numpy.mean(ratio))
        spread = float(numpy.std(ratio)) / abs(mean)
        self.check('t_operator_ratio', spread < 0.02 and mean < 0,
                   mean=mean, spread=spread, predicted=t_operator_constant(s))
        rows = [(func.count, func.spacing, s, float(xval), float(val), float(ref))
                for xval, val, ref in zip(func.points[sel], values[sel], spectral[sel])]
        self.write_table('t_operator.csv', ['M', 'h', 's', 'x', 't_value', 'spectral'], rows)


@suite('bmo')
class BmoSuite(AbstractSuite):
    ''' Oscillation of the tangent controlled by windowed energy. '''

    COUNT = 4096
    AMPLITUDES = (0.005, 0.01, 0.02)

    def run(self):
        s, p = 0.5, 2.0
        step = 2 * math.pi / self.COUNT
        scales = [4 * step, 8 * step]
        rows = []
        ratios = []
        for amp in self.AMPLITUDES:
            curve = support_perturbation(self.COUNT, amp, mode=5)
            res = vmo_bound_check(curve, s, p, scales, self._config.eps_vmo)
            ratios.append(res.ratio)
            control = sobolev_control_ratio(curve, s, 0, 32 * curve.spacing)
            self.check('finite_amp{:g}'.format(amp), math.isfinite(res.ratio) and math.isfinite(control),
                       ratio=res.ratio, max_energy=res.max_energy, applicable=res.applicable,
                       sobolev_ratio=control)
            rows.append((self.COUNT, curve.spacing, amp, res.ratio, res.max_energy, control))
        self.write_table('vmo.csv', ['N', 'spacing', 'amplitude', 'ratio', 'max_energy', 'sobolev_ratio'], rows)
        self.check('ratio_band', max(ratios) <= 2 * min(ratios), ratios=ratios)

        ring = circle(self.COUNT)
        profile = bmo_profile(ring, p, [0.05, 0.1, 0.2])
        exact = numpy.sqrt(2 - 2 * (numpy.sin(profile.radii) / profile.radii) ** 2)
        err = float(numpy.max(numpy.abs(profile.values - exact)))
        self.check('circle_profile', err < 1e-4, error=err)
        turned = bmo_profile(rotated(ring, 0.7), p, [0.05, 0.1, 0.2])
        err = float(numpy.max(numpy.abs(turned.values - profile.values)))
        self.check('rotation_invariance', err < 1e-10, error=err)

        est = mean_value_estimate(p, seed=self._config.seed)
        self.check('mean_value_constant', est.c_search <= est.c_dual * (1 + 1e-12),
                   c_search=est.c_search, c_dual=est.c_dual)
