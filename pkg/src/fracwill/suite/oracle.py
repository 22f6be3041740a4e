''' Boundary-versus-region agreement and maximum principle suites.
'''
import logging
import numpy

from fracwill.curvature import (
    disk_nmc_exact, max_principle_check, nmc_boundary, nmc_curve, nmc_region_oracle,
)
from fracwill.curve import circle, ellipse, segment, support_to_curve
from fracwill.minimize import random_convex
from fracwill.region import CurveInterior, Disk, HalfPlane
from .base import AbstractSuite, suite

LOGGER = logging.getLogger(__name__)


@suite('oracle')
class OracleSuite(AbstractSuite):
    ''' The boundary quadrature against the region quadrature. '''

    #: Boundary curve resolution
    COUNT = 1024
    ORDERS = (0.3, 0.5, 0.7)

    def run(self):
        oconf = self._config.oracle
        band = self._config.band_nodes
        rows = []
        oval = ellipse(self.COUNT, 1.0, 0.6)
        shapes = [
            ('disk', circle(self.COUNT), Disk(), 0),
            ('ellipse', oval, CurveInterior(oval), 0),
            ('ellipse_off_axis', oval, CurveInterior(oval), self.COUNT // 8),
        ]
        for name, curve, region, node in shapes:
            point = curve.nodes[node]
            for s in self.ORDERS:
                bval = nmc_boundary(curve, s, node, band)
                res = nmc_region_oracle(region, point, s, config=oconf, threads=self.threads)
                rel = abs(bval - res.value) / abs(res.value)
                detail = dict(boundary=bval, region=res.value, relative=rel, residual=res.residual)
                if name == 'disk':
                    detail['exact'] = disk_nmc_exact(1.0, s)
                self.check('{}_s{:g}'.format(name, s), rel < 0.02, **detail)
                rows.append((name, node, self.COUNT, band * curve.spacing, oconf.grid_h, s, bval, res.value, rel))
        self.write_table('oracle.csv', ['shape', 'node_index', 'N', 'delta', 'grid_h', 's', 'boundary',
                                        'region', 'relative'], rows)

        s = 0.5
        line = segment(2049, 4.0)
        bval = nmc_boundary(line, s, 1024, band)
        res = nmc_region_oracle(HalfPlane(), (0.0, 0.0), s, config=oconf, threads=self.threads)
        self.check('halfplane_zero', abs(bval) < 1e-3 and abs(res.value) < 1e-3,
                   boundary=bval, region=res.value)


@suite('maxprinciple')
class MaxPrincipleSuite(AbstractSuite):
    ''' Ordering of curvatures of nested sets and positivity on convex
    curves. '''

    #: Number of random convex curves
    SAMPLES = 10
    COUNT = 512

    def run(self):
        oconf = self._config.oracle
        s = 0.5
        inner = Disk((0.0, 0.0), 1.0)
        outer = Disk((-1.0, 0.0), 2.0)
        res = max_principle_check(inner, outer, (1.0, 0.0), s, config=oconf,
                                  tol_rel=self._config.tol_h_rel, outer_convex=True,
                                  threads=self.threads)
        self.check('nested_disks', res.holds and res.margin > 0,
                   margin=res.margin, inner=res.value_inner, outer=res.value_outer)

        desc = self._config.descent
        rows = []
        for offset in range(self.SAMPLES):
            seed = self._config.seed + offset
            sc = random_convex(desc.K, desc.amplitude, seed, desc.eps_kappa)
            curve = support_to_curve(sc, self.COUNT, 0.5 * desc.eps_kappa)
            values = nmc_curve(curve, s, self._config.band_nodes, threads=self.threads).values
            floor = -self._config.tol_h_rel * float(numpy.max(numpy.abs(values)))
            low = float(numpy.min(values))
            self.check('convex_positive_seed{}'.format(seed), low >= floor, minimum=low, floor=floor)
            rows.append((seed, self.COUNT, s, low, float(numpy.max(values))))
        self.write_table('convex_positivity.csv', ['seed', 'N', 's', 'min_h', 'max_h'], rows)
