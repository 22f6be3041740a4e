''' Base class and registrar.
'''
import csv
import logging
import os
from typing import List, Optional, Sequence

from fracwill.config import Config
from fracwill.manifest import RunManifest

LOGGER = logging.getLogger(__name__)

#: Dictionary of acceptance suites
SUITES = {}


def suite(name: str):
    ''' Decorator to register a suite class.
    :param str name: Unique suite name.
    '''

    def func(cls):
        if name in SUITES:
            raise KeyError('Duplicate suite name: {}'.format(name))
        SUITES[name] = cls
        return cls

    return func


class AbstractSuite(object):
    ''' Base class for a group of acceptance checks.

    :param suite_name: The registered name of this suite.
    :param config: The resolved configuration.
    :param manifest: The manifest receiving check outcomes and outputs.
    :param outdir: The directory for this suite's artifacts.
    '''

    def __init__(self, suite_name: str, config: Config, manifest: RunManifest, outdir: str):
        self._suite_name = suite_name
        self._config = config
        self._manifest = manifest
        self._outdir = outdir

    @property
    def threads(self) -> Optional[int]:
        return self._config.threads

    def run(self):
        ''' Execute every check of the suite. '''
        raise NotImplementedError()

    def check(self, name: str, passed: bool, **detail):
        ''' Record one check outcome in the manifest. '''
        return self._manifest.record('{}.{}'.format(self._suite_name, name), passed, **detail)

    def write_table(self, filename: str, header: Sequence[str], rows: List[Sequence]) -> str:
        ''' Write a CSV artifact and register it as a manifest output.

        Floats are written with ``repr`` so reruns compare byte for byte.
        '''
        path = os.path.join(self._outdir, filename)
        with open(path, 'w', newline='') as outfile:
            writer = csv.writer(outfile)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(val)) if isinstance(val, float) else val for val in row])
        self._manifest.add_output(path)
        return path


def run_suite(name: str, config: Config, outdir: Optional[str] = None,
              command: Optional[List[str]] = None) -> RunManifest:
    ''' Run one registered suite and write its manifest.

    :param name: The suite name.
    :param config: The resolved configuration.
    :param outdir: The artifact directory, default ``<output_dir>/<name>``.
    :param command: Command line echoed into the manifest.
    :return: The finished manifest.
    :raise KeyError: For an unknown suite name.
    '''
    if name not in SUITES:
        raise KeyError('Unknown suite: {}'.format(name))
    outdir = outdir or os.path.join(config.output_dir, name)
    os.makedirs(outdir, exist_ok=True)
    manifest = RunManifest(command=list(command or ['suite', name]), config=config.snapshot(),
                           seeds=[config.seed])
    LOGGER.info('Running suite %s into %s', name, outdir)
    SUITES[name](name, config, manifest, outdir).run()
    manifest.finish()
    manifest.write('manifest.json', outdir)
    LOGGER.info('Suite %s %s', name, 'passed' if manifest.passed else 'failed')
    return manifest
