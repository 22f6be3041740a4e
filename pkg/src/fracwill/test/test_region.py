''' Test the module :py:mod:`fracwill.region`.
'''
import math
import unittest
import numpy

from fracwill.config import OracleConfig
from fracwill.curve import segment
from fracwill.error import ParameterError
from fracwill.region import (
    BarrierSpec, Complement, CurveInterior, Disk, HalfPlane, Polygon, Wedge,
    containment_violations, grid_sums, outer_radius,
)
from .base import BaseTestCase


class TestSides(BaseTestCase):

    def testDisk(self):
        disk = Disk((0.0, 0.0), 1.0)
        self.assertEqual(disk.side([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]).tolist(), [-1, 1, 0])
        self.assertAlmostEqual(disk.extent((1.0, 0.0)), 2.0)
        with self.assertRaises(ParameterError):
            Disk(radius=0.0)

    def testComplement(self):
        disk = Disk()
        comp = disk.complement()
        self.assertIsInstance(comp, Complement)
        self.assertEqual(comp.side([[0.0, 0.0]]).tolist(), [1])
        self.assertEqual(comp.tail_sign(), -1)
        self.assertIs(comp.complement(), disk)

    def testHalfPlane(self):
        half = HalfPlane()
        self.assertFalse(half.bounded)
        self.assertEqual(half.side([[0.0, 1.0], [0.0, -1.0], [3.0, 0.0]]).tolist(), [-1, 1, 0])
        dirs = numpy.array([[0.0, 1.0], [0.0, -1.0]])
        self.assertEqual(half.exit_radius((0.0, 0.0), dirs).tolist(), [math.inf, 0.0])

    def testPolygon(self):
        poly = Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
        self.assertEqual(poly.side([[0.5, 0.5], [2.0, 0.5], [1.0, 0.5]]).tolist(), [-1, 1, 0])
        with self.assertRaises(ParameterError):
            Polygon([[0, 0], [1, 0]])

    def testOpenCurveInterior(self):
        with self.assertRaises(ParameterError):
            CurveInterior(segment(32))


class TestBarrier(BaseTestCase):

    def setUp(self):
        super().setUp()
        self._bar = BarrierSpec(m=1.0, m1=2.0, t_tilde=1.0)

    def testInvalid(self):
        with self.assertRaises(ParameterError):
            BarrierSpec(m=0.0, m1=1.0, t_tilde=1.0)
        with self.assertRaises(ParameterError):
            BarrierSpec(m=1.0, m1=1.0, t_tilde=0.0)

    def testGraph(self):
        self.assertAllClose(self._bar.graph([-1.0, 0.5, 2.0]), [1.0, 0.0, 2.0])
        self.assertEqual(self._bar.kinks, [0.0, 1.0])
        self.assertAllClose(self._bar.slope([0.0, 1.0], 1), [0.0, 2.0])
        self.assertAllClose(self._bar.slope([0.0, 1.0], -1), [-1.0, 0.0])

    def testWedgeSide(self):
        wedge = Wedge(self._bar)
        self.assertEqual(wedge.side([[0.5, 1.0], [0.5, -1.0]]).tolist(), [-1, 1])

    def testWedgeExit(self):
        wedge = Wedge(self._bar)
        diag = 1 / math.sqrt(2)
        dirs = numpy.array([[0.0, 1.0], [0.0, -1.0], [diag, diag]])
        radii = wedge.exit_radius((0.5, 0.0), dirs)
        self.assertEqual(radii[0], math.inf)
        self.assertEqual(radii[1], 0.0)
        self.assertAlmostEqual(radii[2], math.sqrt(2))


class TestGrid(BaseTestCase):

    def testOuterRadius(self):
        conf = OracleConfig(grid_h=0.01)
        self.assertAlmostEqual(outer_radius([Disk()], (1.0, 0.0), conf), 2.01)
        self.assertAlmostEqual(outer_radius([HalfPlane()], (0.0, 0.0), conf), 1.0)

    def testHalfPlaneCancels(self):
        conf = OracleConfig(grid_h=1.0 / 50, angular_samples=256)
        res = grid_sums(HalfPlane(), (0.0, 0.0), 0.5, [0.4, 0.2], conf)
        self.assertAllClose(res.sums, 0.0, atol=1e-8)
        self.assertAlmostEqual(res.tail, 0.0)

    def testBoundedTail(self):
        conf = OracleConfig(grid_h=1.0 / 50)
        res = grid_sums(Disk(), (1.0, 0.0), 0.5, [0.4, 0.2], conf)
        self.assertAlmostEqual(res.tail, 2 * math.pi * res.radius ** -0.5 / 0.5)

    def testContainment(self):
        conf = OracleConfig(grid_h=1.0 / 50)
        inner = Disk((0.0, 0.0), 1.0)
        outer = Disk((-1.0, 0.0), 2.0)
        self.assertEqual(containment_violations(inner, outer, (1.0, 0.0), conf, 3.0), 0)
        self.assertGreater(containment_violations(outer, inner, (1.0, 0.0), conf, 3.0), 0)


if __name__ == '__main__':
    unittest.main()
