''' Test the module :py:mod:`fracwill.curvature`.
'''
import math
import unittest
import numpy

from fracwill.config import OracleConfig
from fracwill.curvature import (
    barrier_curvature, corner_exponent_fit, delta_refinement, disk_inner_exact,
    disk_nmc_exact, inner_integrals, max_principle_check, nmc_boundary,
    nmc_curve, nmc_region_oracle, polygon_nmc_exact, richardson,
    segment_integral,
)
from fracwill.curve import (
    ArcCurve, SupportCurve, circle, ellipse, reversed_curve, rotated, square,
    support_to_curve,
)
from fracwill.error import (
    CollisionError, InsufficientDataError, ParameterError, PreconditionError,
    UndefinedPointError,
)
from fracwill.region import BarrierSpec, Complement, Disk
from .base import BaseTestCase


class TestClosedForms(BaseTestCase):

    def testDiskScaling(self):
        self.assertAlmostEqual(disk_inner_exact(2.0, 0.3), 2 ** -0.3 * disk_inner_exact(1.0, 0.3))
        self.assertAlmostEqual(disk_nmc_exact(1.0, 0.5), 4 * disk_inner_exact(1.0, 0.5))

    def testOrderRange(self):
        with self.assertRaises(ParameterError):
            disk_inner_exact(1.0, 1.0)
        with self.assertRaises(ParameterError):
            nmc_boundary(circle(64), 0.0, 0)

    def testSegmentOnLine(self):
        self.assertEqual(segment_integral((0, 0), (1, 0), -math.inf, math.inf, (3.0, 0.0), 0.5), 0.0)

    def testSegmentSymmetry(self):
        full = segment_integral((0, -1), (1, 0), -math.inf, math.inf, (0.0, 0.0), 0.5)
        half = segment_integral((0, -1), (1, 0), 0.0, math.inf, (0.0, 0.0), 0.5)
        self.assertGreater(full, 0)
        self.assertAlmostEqual(half, full / 2)

    def testRichardsonExact(self):
        eps = numpy.array([0.4, 0.2, 0.1, 0.05])
        vals = 3.0 + 2.0 * eps ** 0.5 - 0.7 * eps ** 2.5
        limit, resid = richardson(eps, vals, 0.5, terms=2)
        self.assertAlmostEqual(limit, 3.0, places=10)
        self.assertLess(resid, 1e-10)


class TestBoundary(BaseTestCase):

    def testCircleConstant(self):
        vals = nmc_curve(circle(1024), 0.5).values
        self.assertLess(numpy.std(vals) / numpy.mean(vals), 1e-6)
        self.assertRelative(float(numpy.mean(vals)), disk_nmc_exact(1.0, 0.5), 1e-3)

    def testCircleDilation(self):
        small = nmc_boundary(circle(512), 0.5, 0)
        large = nmc_boundary(circle(512, radius=2.0), 0.5, 0)
        self.assertRelative(large / small, 2 ** -0.5, 1e-10)

    def testReversalFlipsSign(self):
        # odd mode breaks the central symmetry
        curve = support_to_curve(SupportCurve(a0=1.0, coeffs=[[0.04, 0.01], [0.02, 0.03]]), 256)
        forward = nmc_curve(curve, 0.5).values
        backward = nmc_curve(reversed_curve(curve), 0.5).values
        order = (-numpy.arange(256)) % 256
        self.assertAllClose(backward, -forward[order], atol=1e-9)

    def testRotationInvariant(self):
        curve = ellipse(256)
        plain = nmc_curve(curve, 0.5).values
        turned = nmc_curve(rotated(curve, 0.7), 0.5).values
        self.assertAllClose(turned, plain, atol=1e-10)

    def testSquareEdge(self):
        sq = square(1024)
        idx = 128
        exact = polygon_nmc_exact([[0, 0], [1, 0], [1, 1], [0, 1]], sq.nodes[idx], 0.5)
        self.assertGreater(exact, 0)
        self.assertRelative(nmc_boundary(sq, 0.5, idx), exact, 1e-2)

    def testRowsSelection(self):
        curve = ellipse(256)
        full = nmc_curve(curve, 0.4).values
        part = nmc_curve(curve, 0.4, rows=[3, 100])
        self.assertAllClose(part.values, full[[3, 100]])
        self.assertEqual(part.rows.tolist(), [3, 100])
        self.assertEqual(part.method, 'boundary')

    def testAbsoluteDominates(self):
        curve = ellipse(256)
        plain = inner_integrals(curve, 0.5)
        absolute = inner_integrals(curve, 0.5, absolute=True)
        self.assertTrue(numpy.all(absolute >= plain - 1e-12))

    def testCollision(self):
        ref = circle(64)
        nodes = ref.nodes.copy()
        nodes[32] = nodes[0]
        curve = ArcCurve(nodes=nodes, spacing=ref.spacing, tangents=ref.tangents, normals=ref.normals)
        with self.assertRaises(CollisionError):
            inner_integrals(curve, 0.5, rows=[0])

    def testBandRefinement(self):
        self.assertLess(delta_refinement(circle(1024), 0.5, 0), 1e-3)


class TestBarrierCurvature(BaseTestCase):

    def setUp(self):
        super().setUp()
        self._bar = BarrierSpec(m=1.0, m1=1.0, t_tilde=1.0)

    def testBoundOnGrid(self):
        xval = float(numpy.logspace(-3, 2, 64)[20])
        res = barrier_curvature(self._bar, xval, 0.5)
        self.assertGreater(res.direct, 0)
        self.assertLessEqual(res.bound, res.direct * (1 + 1e-12))

    def testKinks(self):
        with self.assertRaises(UndefinedPointError):
            barrier_curvature(self._bar, 0.0, 0.5)
        with self.assertRaises(UndefinedPointError):
            barrier_curvature(self._bar, 1.0, 0.5)
        with self.assertRaises(ParameterError):
            barrier_curvature(self._bar, -0.5, 0.5)


class TestRegionOracle(BaseTestCase):

    def testDecreasingRadii(self):
        with self.assertRaises(ParameterError):
            nmc_region_oracle(Disk(), (1.0, 0.0), 0.5, eps=[0.1, 0.2])
        with self.assertRaises(ParameterError):
            nmc_region_oracle(Disk(), (1.0, 0.0), 0.5, eps=[0.2, 1e-4])

    def testDisk(self):
        conf = OracleConfig(grid_h=1.0 / 200)
        res = nmc_region_oracle(Disk(), (1.0, 0.0), 0.5, config=conf)
        self.assertEqual(len(res.truncated), 4)
        self.assertRelative(res.value, disk_nmc_exact(1.0, 0.5), 5e-2)

    def testComplementNegates(self):
        conf = OracleConfig(grid_h=1.0 / 100)
        disk = Disk((0.0, 0.0), 1.0)
        inner = nmc_region_oracle(disk, (1.0, 0.0), 0.5, config=conf)
        outer = nmc_region_oracle(Complement(disk), (1.0, 0.0), 0.5, config=conf)
        self.assertGreater(inner.value, 0)
        self.assertAlmostEqual(outer.value, -inner.value, delta=1e-12 * abs(inner.value))

    def testContainmentRequired(self):
        conf = OracleConfig(grid_h=1.0 / 50)
        with self.assertRaises(PreconditionError):
            max_principle_check(Disk(), Disk((0.5, 0.0), 0.5), (1.0, 0.0), 0.5, conf)


class TestCornerFit(BaseTestCase):

    def testNoCorner(self):
        with self.assertRaises(PreconditionError):
            corner_exponent_fit(circle(256), 0.5, [0.05, 0.1, 0.5])

    def testNarrowProbes(self):
        with self.assertRaises(ParameterError):
            corner_exponent_fit(square(256), 0.5, [0.05, 0.1])

    def testTooFewProbes(self):
        sq = square(256)
        with self.assertRaises(InsufficientDataError):
            corner_exponent_fit(sq, 0.5, [sq.spacing, 10 * sq.spacing])

    def testSquareDecay(self):
        sq = square(8192)
        probes = sq.spacing * numpy.array([5.5, 9.5, 15.5, 25.5, 40.5, 60.5])
        fit = corner_exponent_fit(sq, 0.5, probes)
        self.assertEqual(len(fit.dists), 6)
        self.assertAllClose(fit.dists, probes)
        self.assertLess(fit.exponent, 0)
        self.assertEqual(fit.model, 'power')


if __name__ == '__main__':
    unittest.main()
