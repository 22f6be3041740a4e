''' Test the module :py:mod:`fracwill.minimize`.
'''
import csv
import json
import os
import unittest
import numpy

from fracwill.config import DescentConfig
from fracwill.curve import SupportCurve, circle, ellipse, support_from_dict
from fracwill.energy import FracParams, willmore_energy
from fracwill.error import ParameterError, PreconditionError, ProjectionError
from fracwill.minimize import (
    concentration_scan, ellipse_family, energy_of_support, fd_gradient,
    lsc_check, minimize_descent, normalize_gauge, project_convex,
    random_convex, rounded_square_family, write_trace,
)
from .base import BaseTestCase, TempDirTestCase


class TestProjection(BaseTestCase):

    def testFeasibleUnchanged(self):
        sc = SupportCurve(a0=1.0, coeffs=[[0.05, 0.0], [0.0, 0.01]])
        self.assertIs(project_convex(sc, 1e-3), sc)

    def testRestoresFloor(self):
        sc = SupportCurve(a0=1.0, coeffs=[[0.5, 0.0], [0.0, 0.1]])
        self.assertLess(sc.min_radius(), 0)
        proj = project_convex(sc, 1e-3)
        self.assertEqual(proj.a0, 1.0)
        self.assertGreaterEqual(proj.min_radius(), 1e-3 - 1e-9)
        # the projection moves no further than the known feasible point
        self.assertLessEqual(numpy.linalg.norm(proj.coeffs - sc.coeffs),
                             numpy.linalg.norm(sc.coeffs) + 1e-12)

    def testIdempotent(self):
        sc = SupportCurve(a0=1.0, coeffs=[[0.5, 0.0]])
        proj = project_convex(sc, 1e-3)
        self.assertGreaterEqual(proj.min_radius(), 1e-3 - 1e-9)
        again = project_convex(proj, 1e-3)
        self.assertEqual(again.a0, proj.a0)
        self.assertAllClose(again.coeffs, proj.coeffs, atol=1e-8)

    def testSmallMeanRadius(self):
        with self.assertRaises(ProjectionError):
            project_convex(SupportCurve(a0=1e-4, coeffs=[[0.0, 0.0]]), 1e-3)

    def testGauge(self):
        sc = normalize_gauge(SupportCurve(a0=2.0, coeffs=[[0.2, 0.0]]))
        self.assertEqual(sc.a0, 1.0)
        self.assertAllClose(sc.coeffs, [[0.1, 0.0]])

    def testRandomConvex(self):
        first = random_convex(6, 0.3, seed=4)
        again = random_convex(6, 0.3, seed=4)
        self.assertEqual(first.order, 6)
        self.assertEqual(first.a0, 1.0)
        self.assertAllClose(first.coeffs, again.coeffs)
        self.assertGreaterEqual(first.min_radius(), 1e-3 - 1e-9)
        with self.assertRaises(ParameterError):
            random_convex(1, 0.3)


class TestGradient(BaseTestCase):

    def testCircleEnergy(self):
        direct = willmore_energy(circle(256), FracParams.critical_for(0.5)).total
        self.assertRelative(energy_of_support(SupportCurve.circle(1.0, 4), 0.5, 256), direct, 1e-8)

    def testCircleStationary(self):
        grad = fd_gradient(SupportCurve.circle(1.0, 4), 0.5, 256)
        self.assertEqual(grad.shape, (7,))
        self.assertLess(numpy.linalg.norm(grad[1:]), 1e-5)

    def testScaleDirectionFlat(self):
        grad = fd_gradient(SupportCurve.circle(1.0, 4), 0.5, 256)
        self.assertLess(abs(grad[0]), 1e-8)

    def testRotationEquivariant(self):
        sc = SupportCurve(a0=1.0, coeffs=[[0.03, 0.01], [0.0, 0.02]])
        angle = 0.7
        grad = fd_gradient(sc, 0.5, 128, h_fd=1e-5)
        turned = fd_gradient(sc.rotated(angle), 0.5, 128, h_fd=1e-5)
        expect = SupportCurve.from_vector(grad).rotated(angle).vector()
        self.assertAllClose(turned, expect, atol=1e-6)

    def testTinyStep(self):
        with self.assertRaises(ParameterError):
            fd_gradient(SupportCurve.circle(1.0, 3), 0.5, 128, h_fd=1e-8)


class TestDescent(TempDirTestCase):

    def testCircleStops(self):
        conf = DescentConfig(N=256, K=4)
        trace = minimize_descent(conf, SupportCurve.circle(1.0, 4))
        self.assertEqual(trace.reason, 'grad_tol')
        self.assertEqual(trace.steps, [])
        self.assertEqual(trace.final_energy, trace.initial_energy)

    def testMonotone(self):
        conf = DescentConfig(N=128, K=4, max_iters=3, seed=2)
        init = random_convex(conf.K, conf.amplitude, conf.seed, conf.eps_kappa)
        trace = minimize_descent(conf, init)
        energies = trace.energies
        for earlier, later in zip(energies, energies[1:]):
            self.assertLessEqual(later, earlier)
        self.assertIn(trace.reason, ('grad_tol', 'max_iters', 'step_collapse'))
        self.assertGreaterEqual(trace.final.min_radius(), conf.eps_kappa - 1e-9)
        self.assertEqual(trace.final.a0, 1.0)

        paths = write_trace(trace, self._path('run'), conf)
        names = sorted(os.path.basename(path) for path in paths)
        self.assertIn('iterate_0000.json', names)
        self.assertIn('trace.csv', names)
        with open(self._path('run', 'trace.json')) as infile:
            data = json.load(infile)
        self.assertEqual(data['reason'], trace.reason)
        self.assertEqual(len(data['curves']), len(trace.accepted) + 1)
        self.assertEqual(data['config']['N'], 128)
        with open(self._path('run', 'iterate_0000.json')) as infile:
            first = support_from_dict(json.load(infile))
        self.assertAllClose(first.coeffs, trace.initial.coeffs)
        with open(self._path('run', 'trace.csv'), newline='') as infile:
            rows = list(csv.reader(infile))
        self.assertEqual(rows[0], ['iter', 'energy', 'grad_norm', 'step', 'accepted'])
        self.assertEqual(len(rows), len(trace.steps) + 1)


class TestSequences(BaseTestCase):

    def testFamilies(self):
        self.assertEqual(len(ellipse_family(64)), 6)
        self.assertEqual(len(rounded_square_family(64)), 4)

    def testShortSequence(self):
        seq = ellipse_family(128)[:3]
        with self.assertRaises(PreconditionError):
            lsc_check(seq, circle(128), 0.5)

    def testMixedCounts(self):
        with self.assertRaises(PreconditionError):
            lsc_check(ellipse_family(128), circle(256), 0.5)

    def testEllipsesToCircle(self):
        res = lsc_check(ellipse_family(256), circle(256), 0.5)
        self.assertTrue(res.holds)
        self.assertEqual(len(res.energies), 6)
        self.assertEqual(res.liminf_proxy, min(res.energies[3:]))

    def testConcentrationArguments(self):
        seq = ellipse_family(128)
        with self.assertRaises(ParameterError):
            concentration_scan(seq, 0.5, 0.0, [0.1])
        with self.assertRaises(ParameterError):
            concentration_scan(seq, 0.5, 0.1, [0.05, 0.1])

    def testSmoothFamilyQuiet(self):
        rep = concentration_scan(ellipse_family(512), 0.5, 0.1, [0.1, 0.05, 0.025])
        self.assertEqual(rep.points, [])
        self.assertTrue(rep.holds)
        self.assertEqual(rep.local_energies.shape, (3, 512))

    def testSquareCorners(self):
        rep = concentration_scan(rounded_square_family(2048), 0.5, 0.5, [0.1, 0.05, 0.025])
        self.assertEqual(len(rep.points), 4)
        self.assertTrue(rep.holds)

    def testSingleEllipseEnergy(self):
        # the flattest member carries the largest critical energy
        energies = lsc_check(ellipse_family(256), ellipse(256, 1.0, 0.99), 0.5).energies
        self.assertEqual(int(numpy.argmax(energies)), 0)


if __name__ == '__main__':
    unittest.main()
