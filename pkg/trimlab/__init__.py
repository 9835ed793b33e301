"""
trimlab
-------

Laboratory for comparing the TrIM (Triangular Input Movement) systolic-array dataflow with
the weight-stationary (WS) and row-stationary (RS) dataflows:

* `conv` for convolution shapes, operand grids and the golden convolution / GEMM references.
* `model` for the closed-form metrics (memory accesses, latency, throughput, registers,
  normalized energy) and the RS scratch-pad factor.
* `sim` for the cycle-accurate simulators of the three arrays and their traces.
* `dse` for design-space sweeps, CSV/JSON reports and the verification suite.

Runs are recorded as `runtrace` nodes whenever a `runtrace.FileStorage` is active.
"""

from . import conv, dse, model, sim
from .__version__ import __version__

__all__ = ["conv", "dse", "model", "sim", "__version__"]
