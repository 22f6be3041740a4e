''' Run manifests recording how a set of results was produced.
'''
from dataclasses import dataclass, field, asdict
import hashlib
import json
import logging
import os
import time
from typing import Dict, List, Optional
import psutil

from fracwill import VERSION

LOGGER = logging.getLogger(__name__)


def file_digest(path: str) -> str:
    ''' SHA-256 hex digest of a file's contents. '''
    digest = hashlib.sha256()
    with open(path, 'rb') as infile:
        for chunk in iter(lambda: infile.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class CheckResult(object):
    ''' Outcome of one named check. '''
    name: str
    passed: bool
    #: Observed values and tolerances
    detail: Dict[str, object] = field(default_factory=dict)


@dataclass
class RunManifest(object):
    ''' Provenance and outcome of one command or suite run. '''
    #: The command line arguments
    command: List[str]
    #: Resolved configuration
    config: dict
    version: str = VERSION
    seeds: List[int] = field(default_factory=list)
    #: Input file path to digest
    inputs: Dict[str, str] = field(default_factory=dict)
    #: Output file path to digest
    outputs: Dict[str, str] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)
    wall_time: float = 0.0
    #: Resident memory at the end of the run, in bytes
    peak_rss: int = 0
    num_threads: int = 0

    def __post_init__(self):
        self._start = time.monotonic()

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add_input(self, path: str):
        self.inputs[path] = file_digest(path)

    def add_output(self, path: str):
        self.outputs[path] = file_digest(path)

    def record(self, name: str, passed: bool, **detail) -> CheckResult:
        ''' Add a check outcome, logging it.

        :param name: Unique check name within the run.
        :param passed: The outcome.
        :param detail: JSON-compatible observed values.
        :return: The new check.
        '''
        check = CheckResult(name=name, passed=bool(passed), detail=detail)
        self.checks.append(check)
        if check.passed:
            LOGGER.info('Check %s passed: %s', name, detail)
        else:
            LOGGER.error('Check %s failed: %s', name, detail)
        return check

    def finish(self):
        ''' Fill the timing and process statistics. '''
        self.wall_time = time.monotonic() - self._start
        proc = psutil.Process()
        self.peak_rss = int(proc.memory_info().rss)
        self.num_threads = int(proc.num_threads())

    def as_dict(self) -> dict:
        data = asdict(self)
        data['passed'] = self.passed
        return data

    def write(self, path: str, outdir: Optional[str] = None):
        ''' Write the manifest as JSON. '''
        if outdir:
            path = os.path.join(outdir, path)
        with open(path, 'w') as outfile:
            json.dump(self.as_dict(), outfile, indent=2, sort_keys=True, default=_jsonable)
        return path


def _jsonable(obj):
    ''' Fallback encoder for numpy scalars and arrays. '''
    if hasattr(obj, 'tolist'):
        return obj.tolist()
    raise TypeError('Not serializable: {!r}'.format(obj))
