''' Test the command entry points, suite registrar, run manifests and plot
data conversion.
'''
import argparse
import csv
import hashlib
import json
import os
import unittest
import numpy

from fracwill.cmd import float_list, interval, main
from fracwill.config import Config
from fracwill.curvature import nmc_boundary
from fracwill.curve import circle, dump_curve, ellipse, load_curve
from fracwill.energy import FracParams, willmore_energy
from fracwill.error import PreconditionError
from fracwill.fracops import GridFunction, dump_function, gagliardo_seminorm
from fracwill.manifest import RunManifest, file_digest
from fracwill.plotdata import emit_plotdata, table_to_dat
from fracwill.suite.base import SUITES, AbstractSuite, run_suite, suite
from .base import TempDirTestCase


class TestArguments(unittest.TestCase):

    def testInterval(self):
        self.assertEqual(interval('0.5,1.5'), (0.5, 1.5))
        with self.assertRaises(argparse.ArgumentTypeError):
            interval('2,1')
        with self.assertRaises(argparse.ArgumentTypeError):
            interval('a,b')

    def testFloatList(self):
        self.assertEqual(float_list('0.1,0.05,'), [0.1, 0.05])


class TestCommands(TempDirTestCase):

    def _curve_file(self, name, curve):
        path = self._path(name)
        with open(path, 'w') as outfile:
            dump_curve(curve, outfile)
        return path

    def _read(self, path):
        with open(path) as infile:
            return json.load(infile)

    def testNoAction(self):
        self.assertEqual(main([]), 2)

    def testEnergy(self):
        path = self._curve_file('circle.json', circle(128))
        out = self._path('energy.json')
        self.assertEqual(main(['energy', '--curve', path, '--s', '0.5', '--critical',
                               '--out', out, '--refine', '64,128']), 0)
        data = self._read(out)
        with open(path) as infile:
            expect = willmore_energy(load_curve(infile), FracParams.critical_for(0.5)).total
        self.assertAlmostEqual(data['total'], expect)
        self.assertTrue(data['critical'])
        self.assertEqual(len(data['inner']), 128)
        with open(self._path('energy_refine.csv')) as infile:
            lines = infile.read().splitlines()
        self.assertEqual(lines[0], 'N,total')
        self.assertEqual(len(lines), 3)

    def testEnergyNeedsExponent(self):
        path = self._curve_file('circle.json', circle(64))
        self.assertEqual(main(['energy', '--curve', path, '--s', '0.5', '--out', self._path('e.json')]), 1)

    def testMissingFile(self):
        self.assertEqual(main(['energy', '--curve', self._path('absent.json'), '--s', '0.5',
                               '--critical', '--out', self._path('e.json')]), 1)

    def testWindowedEnergy(self):
        path = self._curve_file('circle.json', circle(128))
        out = self._path('energy.json')
        self.assertEqual(main(['energy', '--curve', path, '--s', '0.5', '--p', '2',
                               '--outer', '0,1', '--out', out]), 0)
        data = self._read(out)
        self.assertEqual(data['outer'], [0.0, 1.0])
        self.assertIsNone(data['inner'][-1])

    def testNmc(self):
        path = self._curve_file('ellipse.json', ellipse(128))
        out = self._path('nmc.csv')
        self.assertEqual(main(['nmc', '--curve', path, '--s', '0.3', '--rows', '0,5', '--out', out]), 0)
        with open(out) as infile:
            rows = list(csv.DictReader(infile))
        self.assertEqual([row['node_index'] for row in rows], ['0', '5'])
        with open(path) as infile:
            curve = load_curve(infile)
        self.assertAlmostEqual(float(rows[1]['arc_param']), 5 * curve.spacing)
        self.assertAlmostEqual(float(rows[1]['H_s']), nmc_boundary(curve, 0.3, 5))
        self.assertEqual(rows[0]['method'], 'boundary')
        self.assertEqual(rows[0]['N'], '128')

    def testSeminorm(self):
        func = GridFunction.on_circle(numpy.cos, 64)
        path = self._path('func.json')
        with open(path, 'w') as outfile:
            dump_function(func, outfile)
        out = self._path('semi.json')
        self.assertEqual(main(['seminorm', '--func', path, '--t', '0.3', '--out', out]), 0)
        self.assertAlmostEqual(self._read(out)['value'], gagliardo_seminorm(func, 0.3).value)

    def testConcentration(self):
        for pos, minor in enumerate((0.8, 0.9, 0.95, 0.99)):
            self._curve_file('member_{}.json'.format(pos), ellipse(256, 1.0, minor))
        out = self._path('conc.json')
        self.assertEqual(main(['diagnose', 'concentration', '--curves', self._path('member_*.json'),
                               '--s', '0.5', '--eps', '0.1', '--out', out]), 0)
        data = self._read(out)
        self.assertEqual(data['points'], [])
        self.assertTrue(data['holds'])

    def testLscDefaultLimit(self):
        for pos, minor in enumerate((0.8, 0.9, 0.95, 0.99)):
            self._curve_file('member_{}.json'.format(pos), ellipse(128, 1.0, minor))
        out = self._path('lsc.json')
        self.assertEqual(main(['diagnose', 'lsc', '--curves', self._path('member_*.json'),
                               '--s', '0.5', '--out', out]), 0)
        data = self._read(out)
        self.assertEqual(data['w_limit'], data['energies'][-1])

    def testDiagnoseNoMatch(self):
        self.assertEqual(main(['diagnose', 'lsc', '--curves', self._path('none_*.json'), '--s', '0.5']), 1)

    def testUnknownSuite(self):
        self.assertEqual(main(['suite', 'nonesuch']), 2)


class TestSuiteRegistry(TempDirTestCase):

    def testRegistered(self):
        for name in ('scaling', 'corners', 'oracle', 'maxprinciple', 'sobolev', 'bmo',
                     'descent', 'sequences'):
            self.assertIn(name, SUITES)

    def testDuplicate(self):
        with self.assertRaises(KeyError):
            suite('scaling')(AbstractSuite)

    def testUnknown(self):
        with self.assertRaises(KeyError):
            run_suite('nonesuch', Config())

    def testRunCustom(self):

        class TableSuite(AbstractSuite):
            def run(self):
                self.check('ok', True, value=1.5)
                self.write_table('table.csv', ['N', 'total'], [(8, 0.1)])

        suite('unit_table')(TableSuite)
        try:
            config = Config(output_dir=self._tmpdir)
            manifest = run_suite('unit_table', config)
        finally:
            del SUITES['unit_table']
        self.assertTrue(manifest.passed)
        self.assertEqual(manifest.checks[0].name, 'unit_table.ok')
        outdir = self._path('unit_table')
        with open(os.path.join(outdir, 'table.csv')) as infile:
            self.assertEqual(infile.read().splitlines(), ['N,total', '8,0.1'])
        with open(os.path.join(outdir, 'manifest.json')) as infile:
            data = json.load(infile)
        self.assertTrue(data['passed'])
        self.assertIn(os.path.join(outdir, 'table.csv'), data['outputs'])


class TestManifest(TempDirTestCase):

    def testDigest(self):
        path = self._path('data.txt')
        with open(path, 'wb') as outfile:
            outfile.write(b'fractional')
        self.assertEqual(file_digest(path), hashlib.sha256(b'fractional').hexdigest())

    def testChecks(self):
        manifest = RunManifest(command=['test'], config={})
        self.assertTrue(manifest.passed)
        manifest.record('first', True)
        manifest.record('second', False, observed=2.0)
        self.assertFalse(manifest.passed)
        manifest.finish()
        self.assertGreater(manifest.peak_rss, 0)
        self.assertGreater(manifest.num_threads, 0)
        path = manifest.write('manifest.json', self._tmpdir)
        with open(path) as infile:
            data = json.load(infile)
        self.assertFalse(data['passed'])
        self.assertEqual(data['checks'][1]['detail'], {'observed': 2.0})


class TestPlotData(TempDirTestCase):

    def _table(self, name, text):
        path = self._path(name)
        with open(path, 'w') as outfile:
            outfile.write(text)
        return path

    def testGroups(self):
        path = self._table('corner_fit.csv', 's,log_dist,log_h\n0.3,-1,2\n0.3,-2,3\n0.5,-1,4\n')
        dat, script = table_to_dat(path, self._tmpdir)
        with open(dat) as infile:
            lines = infile.read().splitlines()
        self.assertIn('# s = 0.3', lines)
        self.assertIn('# s = 0.5', lines)
        self.assertIn('-2 3', lines)
        with open(script) as infile:
            self.assertIn('index 1', infile.read())

    def testAcceptedOnly(self):
        path = self._table('trace.csv', 'iter,energy,grad_norm,step,accepted\n0,5.0,1,0.1,1\n0,6.0,1,0.2,0\n')
        dat, _ = table_to_dat(path, self._tmpdir)
        with open(dat) as infile:
            text = infile.read()
        self.assertIn('0 5.0', text)
        self.assertNotIn('6.0', text)

    def testUnknownColumns(self):
        path = self._table('other.csv', 'a,b\n1,2\n')
        with self.assertRaises(PreconditionError):
            table_to_dat(path, self._tmpdir)

    def testMissingInput(self):
        with self.assertRaises(FileNotFoundError):
            emit_plotdata([self._path('absent.csv')], self._tmpdir)

    def testCommand(self):
        path = self._table('refine.csv', 'N,total\n64,1.0\n128,1.1\n')
        outdir = self._path('plots')
        self.assertEqual(main(['plotdata', path, '--out', outdir]), 0)
        self.assertTrue(os.path.isfile(os.path.join(outdir, 'refine.dat')))
        self.assertTrue(os.path.isfile(os.path.join(outdir, 'refine.gp')))


if __name__ == '__main__':
    unittest.main()
