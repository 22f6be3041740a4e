''' Library and runner configuration data.
'''
from dataclasses import dataclass, field, fields, asdict
from typing import List, Optional
import logging
import yaml

from fracwill.error import ParameterError

LOGGER = logging.getLogger(__name__)


@dataclass
class OracleConfig():
    ''' Quadrature parameters of the region-based curvature oracle.
    '''
    #: Cell size of the uniform grid
    grid_h: float = 1.0 / 400
    #: Subcells per axis for cells cut by a boundary or ball
    supersample: int = 8
    #: Excluded ball radii, strictly decreasing
    eps_list: List[float] = field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])
    #: Number of correction powers in the extrapolation
    richardson_terms: int = 2
    #: Relative residual above which the extrapolation is flagged
    residual_tol: float = 1e-2
    #: Minimum box half-width around the evaluation point
    box_half: float = 1.0
    #: Ray directions for the far-field tail
    angular_samples: int = 4096
    #: Grid rows processed together
    strip_rows: int = 64


@dataclass
class DescentConfig():
    ''' Convexity-constrained descent parameters.
    '''
    #: Fractional order
    s: float = 0.5
    #: Fourier truncation order of the support function
    K: int = 8
    #: Curve resolution
    N: int = 512
    #: Initial line-search step
    step0: float = 0.05
    #: Step multiplier after a rejected step
    shrink: float = 0.5
    #: Step multiplier after an accepted step
    grow: float = 1.5
    #: Iteration cap
    max_iters: int = 50
    #: Gradient norm over modes k >= 2 which terminates the descent
    grad_tol: float = 1e-5
    #: Radius-of-curvature floor relative to the mean radius
    eps_kappa: float = 1e-3
    #: Central-difference step for coefficients
    h_fd: float = 1e-4
    #: Seed of the random convex start
    seed: int = 0
    #: Amplitude of the random convex start
    amplitude: float = 0.2

    def __post_init__(self):
        if not 0 < self.shrink < 1 < self.grow:
            raise ParameterError('Line search requires 0 < shrink < 1 < grow, got {} and {}'.format(self.shrink, self.grow))
        if not self.grad_tol > 0:
            raise ParameterError('Gradient tolerance must be positive')
        if not 0 < self.s < 1:
            raise ParameterError('Order s must be in (0,1), got {}'.format(self.s))


@dataclass
class Config(object):
    ''' Library and runner configuration.
    '''

    #: Default log level when command option not provided
    log_level: Optional[str] = None
    #: Worker thread cap, None to use the CPU count
    threads: Optional[int] = None
    #: Geometric tolerance relative to curve length
    tol_geom_rel: float = 1e-8
    #: Node count of the excluded diagonal band
    band_nodes: int = 4
    #: Radius-of-curvature floor for support curves, relative to a0
    eps_kappa_rel: float = 1e-3
    #: Energy threshold below which BMO control applies
    eps_vmo: float = 1e-2
    #: Relative tolerance of the lower semicontinuity check
    tol_lsc: float = 1e-4
    #: Positivity tolerance relative to max |H|
    tol_h_rel: float = 1e-3
    #: Turning angle, in multiples of the mean turning, which marks a corner
    corner_turn_factor: float = 10.0
    #: Region oracle options
    oracle: OracleConfig = field(default_factory=OracleConfig)
    #: Descent options
    descent: DescentConfig = field(default_factory=DescentConfig)
    #: Directory for written artifacts
    output_dir: str = '.'
    #: Base random seed for suites
    seed: int = 0

    def from_file(self, fileobj):
        ''' Load configuration from a YAML file.
        :param fileobj: The file to read from.
        '''
        filedat = yaml.safe_load(fileobj)
        fwdat = filedat.get('fracwill', None) if filedat else None
        LOGGER.debug('Read config containing: %s', fwdat)
        if not fwdat:
            return

        for fld in fields(self):
            if fld.name in fwdat:
                if fld.name == 'oracle':
                    self.oracle = OracleConfig(**fwdat[fld.name])
                elif fld.name == 'descent':
                    self.descent = DescentConfig(**fwdat[fld.name])
                else:
                    setattr(self, fld.name, fwdat[fld.name])

    def snapshot(self):
        ''' Get a plain-data copy for manifests.
        '''
        return asdict(self)
