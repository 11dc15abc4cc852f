"""Nonparametric test for a constant ratio between a regression mean and
standard deviation, with smooth-bootstrap calibration.

The heavy lifting lives in the compiled extension ``cvtest._core``; this
package re-exports its functions.
"""

try:
    from cvtest import _core  # installed wheel layout
except ImportError:  # pragma: no cover - dev layout with _core on sys.path
    import _core

run_test = _core.run_test
generate = _core.generate
fit = _core.fit
simulate = _core.simulate
InputError = _core.InputError
CvtestError = _core.CvtestError

__all__ = [
    "run_test",
    "generate",
    "fit",
    "simulate",
    "InputError",
    "CvtestError",
]

__version__ = "0.1.0"
