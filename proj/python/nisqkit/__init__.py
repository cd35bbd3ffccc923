"""Python front end for the nisqkit C++ core.

Functions returning structured results decode the core's JSON payloads into dicts
with the same layout as the ``results`` block of a CLI report.
"""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    BudgetError,
    Circuit,
    Error,
    InputError,
    NoiseModel,
    NumericalError,
    amplitude,
    cnot_synth,
    density_expectation,
    density_probabilities,
    expectation,
    fuse,
    gradient,
    load_circuit,
    num_threads,
    parse_circuit,
    pauli_mc,
    peps_amplitude,
    random_circuit,
    route,
    sample,
    set_num_threads,
    statevector,
    zne_exponential,
    zne_polyexp,
)


def _decoded(fn):
    def wrapper(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


zne_richardson = _decoded(_core.zne_richardson)
mem_invert = _decoded(_core.mem_invert)
pec_estimate = _decoded(_core.pec_estimate)
rb = _decoded(_core.rb)
quantum_volume = _decoded(_core.quantum_volume)
linear_xeb = _decoded(_core.linear_xeb)
