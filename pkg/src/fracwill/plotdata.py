''' Conversion of result tables into gnuplot-style data files.
'''
import csv
from collections import OrderedDict
import logging
import os
from typing import List, Sequence

from fracwill.error import PreconditionError

LOGGER = logging.getLogger(__name__)

#: Column pairs to plot, tried in order against a table header
PLOT_COLUMNS = [
    ('log_dist', 'log_h'),
    ('iter', 'energy'),
    ('N', 'total'),
    ('N', 'energy_p2'),
    ('member', 'energy'),
    ('amplitude', 'ratio'),
    ('x', 't_value'),
    ('arc_param', 'H_s'),
]

#: Columns which split a table into separate data blocks
GROUP_COLUMNS = ('s', 'family')


def _pick_columns(header: Sequence[str]):
    for xcol, ycol in PLOT_COLUMNS:
        if xcol in header and ycol in header:
            return xcol, ycol
    raise PreconditionError('No known plot columns in header {}'.format(list(header)))


def table_to_dat(path: str, outdir: str) -> List[str]:
    ''' Convert one CSV result table.

    :param path: The table to read.
    :param outdir: The directory receiving ``<name>.dat`` and ``<name>.gp``.
    :return: The written paths.
    :raise FileNotFoundError: If the table does not exist.
    '''
    with open(path, newline='') as infile:
        reader = csv.DictReader(infile)
        header = reader.fieldnames or []
        rows = list(reader)
    xcol, ycol = _pick_columns(header)
    group = next((col for col in GROUP_COLUMNS if col in header), None)
    if 'accepted' in header:
        rows = [row for row in rows if row['accepted'] == '1']

    blocks = OrderedDict()
    for row in rows:
        blocks.setdefault(row[group] if group else '', []).append(row)

    name = os.path.splitext(os.path.basename(path))[0]
    datpath = os.path.join(outdir, name + '.dat')
    with open(datpath, 'w') as outfile:
        outfile.write('# source: {}\n'.format(os.path.basename(path)))
        outfile.write('# columns: {} {}\n'.format(xcol, ycol))
        for pos, (key, items) in enumerate(blocks.items()):
            if pos:
                outfile.write('\n\n')
            if group:
                outfile.write('# {} = {}\n'.format(group, key))
            for row in items:
                outfile.write('{} {}\n'.format(row[xcol], row[ycol]))

    gppath = os.path.join(outdir, name + '.gp')
    with open(gppath, 'w') as outfile:
        outfile.write('set xlabel "{}"\nset ylabel "{}"\n'.format(xcol, ycol))
        plots = [
            '"{}" index {} using 1:2 with linespoints title "{}"'.format(
                name + '.dat', pos, '{} = {}'.format(group, key) if group else name)
            for pos, key in enumerate(blocks)
        ]
        outfile.write('plot ' + ', \\\n     '.join(plots) + '\n')
    LOGGER.info('Wrote %s with %d blocks', datpath, len(blocks))
    return [datpath, gppath]


def emit_plotdata(paths: Sequence[str], outdir: str) -> List[str]:
    ''' Convert result tables into data files and script stubs. '''
    missing = [path for path in paths if not os.path.isfile(path)]
    if missing:
        raise FileNotFoundError('Missing result files: {}'.format(', '.join(missing)))
    os.makedirs(outdir, exist_ok=True)
    written = []
    for path in paths:
        written.extend(table_to_dat(path, outdir))
    return written
