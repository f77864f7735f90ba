# Contains the readers and writers of polynomial, function and sample files
import functools
import json
import os

import jsonschema
import numpy
import pandas
from loguru import logger

from errors import InputError
from expfun import ExpPolyFunction
from fourier import Grid, SampledFunction
from poly import Poly

logger.disable(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'schemas')
SIDECAR_SUFFIX = '.json'
FLOAT_FORMAT = '%.17g'


@functools.lru_cache(maxsize=None)
def load_schema(name):
    with open(os.path.join(SCHEMA_DIR, name + '.schema.json')) as f:
        return json.load(f)


def validate(document, name):
    """Checks `document` against the shipped schema `name`

    Raises
    ------
    InputError
        If the document does not match
    """
    try:
        jsonschema.validate(document, load_schema(name))
    except jsonschema.ValidationError as e:
        raise InputError("{} document is invalid: {}".format(name, e.message)) from e


def _finite_or_none(value):
    if isinstance(value, float) and not numpy.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(v) for v in value]
    if isinstance(value, numpy.generic):
        return _finite_or_none(value.item())
    return value


def dumps(document):
    """JSON text with shortest round-trip floats; non-finite numbers become null"""
    return json.dumps(_finite_or_none(document), indent=2)


def read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError("cannot read JSON from {}: {}".format(path, e)) from e


def write_json(path, document):
    with open(path, 'w') as f:
        f.write(dumps(document) + '\n')


def poly_to_dict(p):
    return {'coeffs': [[c.real, c.imag] for c in p.coeffs]}


def poly_from_dict(document):
    """Parses ``{"coeffs": [[re, im], ...]}`` (ascending degree)

    The leading coefficient must be nonzero unless the polynomial is a constant.
    """
    validate(document, 'poly')
    coeffs = [complex(re, im) for re, im in document['coeffs']]
    if len(coeffs) > 1 and coeffs[-1] == 0:
        raise InputError("leading coefficient of a degree {} polynomial is zero".format(len(coeffs) - 1))
    return Poly(coeffs)


def read_poly(path):
    return poly_from_dict(read_json(path))


def function_from_dict(document, integrable=False):
    validate(document, 'function')
    return ExpPolyFunction.from_dict(document, integrable=integrable)


def sidecar_path(path):
    return path + SIDECAR_SUFFIX


def write_samples(path, s):
    """Writes samples as CSV (``t,re,im``) with the grid echoed in a JSON sidecar"""
    frame = pandas.DataFrame({'t': s.axis, 're': s.values.real, 'im': s.values.imag})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    sidecar = {'grid': s.grid.to_dict(), 'domain': s.domain}
    if s.right_end is not None:
        sidecar['right_end'] = [s.right_end.real, s.right_end.imag]
    write_json(sidecar_path(path), sidecar)


def read_samples(path):
    """Reads a sample CSV; the grid comes from the sidecar or, without one, from the t column

    Returns
    -------
    s : SampledFunction
    """
    try:
        frame = pandas.read_csv(path)
    except (OSError, ValueError) as e:
        raise InputError("cannot read samples from {}: {}".format(path, e)) from e
    missing = {'t', 're', 'im'} - set(frame.columns)
    if missing:
        raise InputError("{} lacks the columns {}".format(path, sorted(missing)))

    domain, right_end = 'time', None
    if os.path.exists(sidecar_path(path)):
        sidecar = read_json(sidecar_path(path))
        validate(sidecar, 'samples')
        grid = Grid(sidecar['grid']['T'], sidecar['grid']['N'])
        domain = sidecar.get('domain', 'time')
        if 'right_end' in sidecar:
            right_end = complex(*sidecar['right_end'])
    else:
        logger.debug("no sidecar next to {}, taking the grid from the t column", path)
        grid = Grid(-float(frame['t'].iloc[0]), len(frame))

    s = SampledFunction(grid, frame['re'].to_numpy() + 1j * frame['im'].to_numpy(), domain, right_end=right_end)
    if not numpy.allclose(frame['t'].to_numpy(), s.axis, rtol=0, atol=1e-9 * max(1.0, grid.T)):
        raise InputError("the t column of {} does not match {}".format(path, grid))
    return s


def read_function(path, integrable=True):
    """Reads a forcing or candidate: term JSON or sample CSV, chosen by extension"""
    if path.lower().endswith('.csv'):
        return read_samples(path)
    return function_from_dict(read_json(path), integrable=integrable)


def write_frame(path, frame):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
