''' Descent hygiene and sequence diagnostic suites.
'''
import dataclasses
import logging
import os
import numpy

from fracwill.curve import SupportCurve, circle, convexity_check, support_to_curve
from fracwill.minimize import (
    concentration_scan, ellipse_family, fd_gradient, lsc_check, minimize_descent,
    random_convex, rounded_square_family, write_trace,
)
from .base import AbstractSuite, suite

LOGGER = logging.getLogger(__name__)


@suite('descent')
class DescentSuite(AbstractSuite):
    ''' Stationarity of the circle and monotone projected descent. '''

    #: Number of random starts
    SEEDS = 5

    def run(self):
        desc = self._config.descent
        grad = fd_gradient(SupportCurve.circle(1.0, desc.K), desc.s, desc.N, desc.h_fd,
                           threads=self.threads)
        gnorm = float(numpy.linalg.norm(grad[1:]))
        scale = float(grad[0])
        self.check('circle_stationary', gnorm < 1e-5, grad_norm=gnorm)
        self.check('circle_scale_flat', abs(scale) < 1e-8, a0_derivative=scale)

        rows = []
        for offset in range(self.SEEDS):
            seed = desc.seed + offset
            self._manifest.seeds.append(seed)
            conf = dataclasses.replace(desc, seed=seed)
            init = random_convex(conf.K, conf.amplitude, seed, conf.eps_kappa)
            trace = minimize_descent(conf, init, self.threads)
            energies = trace.energies
            monotone = all(later <= earlier for earlier, later in zip(energies, energies[1:]))
            final = support_to_curve(trace.final, conf.N, 0.5 * conf.eps_kappa)
            convex = convexity_check(final, self._config.tol_geom_rel).is_convex
            min_rad = trace.final.min_radius()
            self.check('descent_seed{}'.format(seed),
                       monotone and convex and min_rad >= conf.eps_kappa - 1e-9,
                       initial=trace.initial_energy, final=trace.final_energy,
                       reason=trace.reason, min_radius=min_rad)
            for path in write_trace(trace, os.path.join(self._outdir, 'seed_{}'.format(seed)), conf):
                self._manifest.add_output(path)
            rows.append((seed, conf.N, conf.K, conf.s, trace.initial_energy, trace.final_energy,
                         len(trace.accepted), trace.reason))
        self.write_table('descent.csv', ['seed', 'N', 'K', 's', 'initial', 'final', 'accepted', 'reason'], rows)


@suite('sequences')
class SequenceSuite(AbstractSuite):
    ''' Lower semicontinuity and energy concentration on curve families. '''

    ELLIPSE_COUNT = 1024
    SQUARE_COUNT = 2048
    RADII = (0.1, 0.05, 0.025)

    def run(self):
        s = 0.5
        tol = self._config.tol_lsc
        ellipses = ellipse_family(self.ELLIPSE_COUNT)
        squares = rounded_square_family(self.SQUARE_COUNT)
        rows = []

        res = lsc_check(ellipses, circle(self.ELLIPSE_COUNT), s, tol, self.threads)
        self.check('lsc_ellipses', res.holds, limit=res.w_limit, proxy=res.liminf_proxy)
        rows.extend(('ellipses', self.ELLIPSE_COUNT, s, pos, val) for pos, val in enumerate(res.energies))
        res = lsc_check(squares, squares[-1], s, tol, self.threads)
        self.check('lsc_rounded_squares', res.holds, limit=res.w_limit, proxy=res.liminf_proxy)
        rows.extend(('squares', self.SQUARE_COUNT, s, pos, val) for pos, val in enumerate(res.energies))
        self.write_table('lsc.csv', ['family', 'N', 's', 'member', 'energy'], rows)

        rep = concentration_scan(squares, s, 0.5, self.RADII, threads=self.threads)
        self.check('concentration_squares', len(rep.points) == 4 and rep.holds,
                   points=rep.points, bound=rep.bound, lam=rep.lam)
        rep = concentration_scan(ellipses, s, 0.1, self.RADII, threads=self.threads)
        self.check('concentration_ellipses', len(rep.points) == 0 and rep.holds,
                   points=rep.points, bound=rep.bound, lam=rep.lam)
