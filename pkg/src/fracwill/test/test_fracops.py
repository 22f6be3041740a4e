''' Test the module :py:mod:`fracwill.fracops`.
'''
import io
import math
import unittest
import numpy

from fracwill.error import ParameterError, PreconditionError, UnsupportedDomainError
from fracwill.fracops import (
    GridFunction, dump_function, fractional_constant, gagliardo_seminorm,
    load_function, poincare_sobolev_check, spectral_fractional_laplacian,
    stein_ratio, t_operator, t_operator_constant, t_operator_oracle,
)
from .base import BaseTestCase


def gaussian(xval):
    return numpy.exp(-0.5 * (xval / 0.1) ** 2)


class TestGridFunction(BaseTestCase):

    def testTooFewSamples(self):
        with self.assertRaises(ParameterError):
            GridFunction(samples=numpy.zeros(16))

    def testBadDomain(self):
        with self.assertRaises(ParameterError):
            GridFunction(samples=numpy.zeros(32), domain='sphere')
        with self.assertRaises(ParameterError):
            GridFunction(samples=numpy.zeros(32), domain='interval', lower=1.0, upper=1.0)

    def testGrids(self):
        func = GridFunction.on_circle(numpy.cos, 64)
        self.assertAlmostEqual(func.spacing, 2 * math.pi / 64)
        self.assertEqual(func.points[0], 0.0)
        func = GridFunction.on_interval(numpy.sin, -1.0, 1.0, 40)
        self.assertAlmostEqual(func.spacing, 0.05)
        self.assertAlmostEqual(func.points[0], -0.975)
        self.assertAlmostEqual(func.extent, 2.0)

    def testDerivative(self):
        func = GridFunction.on_circle(numpy.sin, 64)
        self.assertAllClose(func.derivative().samples, numpy.cos(func.points), atol=1e-12)

    def testVectorMean(self):
        func = GridFunction.on_circle(lambda x: numpy.stack([numpy.cos(x), 2 + 0 * x], axis=1), 64)
        self.assertAllClose(func.mean(), [0.0, 2.0], atol=1e-14)
        self.assertAllClose(func.magnitude(), numpy.hypot(numpy.cos(func.points), 2.0))

    def testFileRoundTrip(self):
        func = GridFunction.on_interval(gaussian, -1.0, 1.0, 64)
        buf = io.StringIO()
        dump_function(func, buf)
        buf.seek(0)
        back = load_function(buf)
        self.assertEqual(back.domain, 'interval')
        self.assertEqual((back.lower, back.upper), (-1.0, 1.0))
        self.assertAllClose(back.samples, func.samples)


class TestSpectral(BaseTestCase):

    def testEigenfunctions(self):
        func = GridFunction.on_circle(lambda x: numpy.cos(3 * x), 64)
        out = spectral_fractional_laplacian(func, 0.5)
        self.assertAllClose(out.samples, math.sqrt(3) * func.samples, atol=1e-12)

    def testMeanRemoved(self):
        func = GridFunction.on_circle(lambda x: 2 + numpy.cos(x), 64)
        out = spectral_fractional_laplacian(func, 1.3)
        self.assertAllClose(out.samples, numpy.cos(func.points), atol=1e-12)

    def testPeriod(self):
        func = GridFunction.on_circle(lambda x: numpy.sin(x * math.pi), 64, period=2.0)
        out = spectral_fractional_laplacian(func, 1.0)
        self.assertAllClose(out.samples, math.pi * func.samples, atol=1e-12)

    def testIntervalUnsupported(self):
        func = GridFunction.on_interval(gaussian, -1.0, 1.0, 64)
        with self.assertRaises(UnsupportedDomainError):
            spectral_fractional_laplacian(func, 0.5)

    def testNegativeOrder(self):
        with self.assertRaises(ParameterError):
            spectral_fractional_laplacian(GridFunction.on_circle(numpy.cos, 64), -0.1)


class TestSeminorm(BaseTestCase):

    def testConstant(self):
        func = GridFunction.on_circle(lambda x: 1 + 0 * x, 64)
        self.assertAlmostEqual(gagliardo_seminorm(func, 0.3).value, 0.0)
        self.assertAlmostEqual(gagliardo_seminorm(func, 0.7).value, 0.0)

    def testRefinementStable(self):
        coarse = gagliardo_seminorm(GridFunction.on_circle(numpy.cos, 128), 0.5)
        fine = gagliardo_seminorm(GridFunction.on_circle(numpy.cos, 256), 0.5)
        self.assertTrue(fine.smooth)
        self.assertRelative(coarse.value, fine.value, 1e-2)

    def testShiftInvariant(self):
        base = gagliardo_seminorm(GridFunction.on_circle(numpy.cos, 128), 0.3, 3.0)
        shift = 2 * math.pi * 5 / 128
        moved = gagliardo_seminorm(GridFunction.on_circle(lambda x: numpy.cos(x + shift), 128), 0.3, 3.0)
        self.assertRelative(moved.value, base.value, 1e-10)

    def testHigherFrequencyLarger(self):
        low = gagliardo_seminorm(GridFunction.on_circle(numpy.cos, 128), 0.4)
        high = gagliardo_seminorm(GridFunction.on_circle(lambda x: numpy.cos(4 * x), 128), 0.4)
        self.assertGreater(high.value, low.value)

    def testInvalidParameters(self):
        func = GridFunction.on_circle(numpy.cos, 64)
        with self.assertRaises(ParameterError):
            gagliardo_seminorm(func, 1.0)
        with self.assertRaises(ParameterError):
            gagliardo_seminorm(func, 0.5, p=0.5)


class TestStein(BaseTestCase):

    def testCosineBounded(self):
        ratio = stein_ratio(GridFunction.on_circle(numpy.cos, 256), 0.5)
        self.assertGreater(ratio, 0.1)
        self.assertLess(ratio, 10.0)

    def testConstant(self):
        with self.assertRaises(PreconditionError):
            stein_ratio(GridFunction.on_circle(lambda x: 3 + 0 * x, 64), 0.5)


class TestTOperator(BaseTestCase):

    def testConstantSign(self):
        self.assertLess(t_operator_constant(0.5), 0)
        self.assertGreater(fractional_constant(1.5), 0)

    def testMatchesSpectral(self):
        func = GridFunction.on_interval(gaussian, -1.0, 1.0, 400)
        rows = numpy.arange(192, 208)
        direct = t_operator(func, 0.5, rows)
        oracle = t_operator_oracle(func, 0.5)[rows]
        self.assertTrue(numpy.all(direct < 0))
        self.assertAllClose(direct, oracle, rtol=5e-2)

    def testZero(self):
        func = GridFunction(samples=numpy.zeros(64), domain='interval', lower=-1.0, upper=1.0)
        self.assertEqual(t_operator(func, 0.5).tolist(), [0.0] * 64)

    def testSupportAtEnds(self):
        func = GridFunction.on_interval(lambda x: 1 + 0 * x, -1.0, 1.0, 64)
        with self.assertRaises(PreconditionError):
            t_operator(func, 0.5)

    def testCircleUnsupported(self):
        with self.assertRaises(UnsupportedDomainError):
            t_operator(GridFunction.on_circle(numpy.cos, 64), 0.5)


class TestPoincare(BaseTestCase):

    def testMeanFree(self):
        res = poincare_sobolev_check(GridFunction.on_circle(numpy.cos, 128), 0.5, s_target=0.3)
        self.assertGreater(res.lhs_l1t, 0)
        self.assertAlmostEqual(res.lhs_l2, math.sqrt(math.pi))
        self.assertGreater(res.rhs, 0)
        self.assertGreater(res.embed_ratio, 0)

    def testNotMeanFree(self):
        with self.assertRaises(PreconditionError):
            poincare_sobolev_check(GridFunction.on_circle(lambda x: 1 + numpy.cos(x), 64), 0.5)

    def testEmbeddingOrder(self):
        with self.assertRaises(ParameterError):
            poincare_sobolev_check(GridFunction.on_circle(numpy.cos, 64), 0.5, s_target=0.6)


if __name__ == '__main__':
    unittest.main()
