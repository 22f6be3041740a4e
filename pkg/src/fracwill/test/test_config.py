''' Test the module :py:mod:`fracwill.config`.
'''
import io
import unittest

from fracwill.config import Config, DescentConfig, OracleConfig
from fracwill.error import ParameterError


class TestConfig(unittest.TestCase):

    def testDefaults(self):
        config = Config()
        self.assertIsNone(config.log_level)
        self.assertEqual(config.band_nodes, 4)
        self.assertEqual(config.tol_lsc, 1e-4)
        self.assertEqual(config.oracle.eps_list, [0.4, 0.2, 0.1, 0.05])
        self.assertEqual(config.descent.K, 8)

    def testFromFile(self):
        config = Config()
        config.from_file(io.StringIO('''\
fracwill:
  threads: 2
  log_level: debug
  oracle:
    grid_h: 0.01
  descent:
    N: 64
    s: 0.4
'''))
        self.assertEqual(config.threads, 2)
        self.assertEqual(config.log_level, 'debug')
        self.assertIsInstance(config.oracle, OracleConfig)
        self.assertEqual(config.oracle.grid_h, 0.01)
        self.assertEqual(config.oracle.supersample, 8)
        self.assertEqual(config.descent.N, 64)
        self.assertEqual(config.descent.s, 0.4)

    def testEmptyFile(self):
        config = Config()
        config.from_file(io.StringIO(''))
        config.from_file(io.StringIO('other:\n  threads: 3\n'))
        self.assertIsNone(config.threads)

    def testDescentValidation(self):
        with self.assertRaises(ParameterError):
            DescentConfig(shrink=1.5)
        with self.assertRaises(ParameterError):
            DescentConfig(grad_tol=0.0)
        with self.assertRaises(ParameterError):
            DescentConfig(s=1.0)

    def testInvalidDescentFile(self):
        config = Config()
        with self.assertRaises(ParameterError):
            config.from_file(io.StringIO('fracwill:\n  descent:\n    grow: 0.5\n'))

    def testSnapshot(self):
        snap = Config().snapshot()
        self.assertEqual(snap['oracle']['grid_h'], 1.0 / 400)
        self.assertEqual(snap['descent']['eps_kappa'], 1e-3)


if __name__ == '__main__':
    unittest.main()
