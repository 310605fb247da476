"""Poisson and Newton kernels of Weyl chambers.

Kernel values come back as ``KernelValue`` objects; sweeps and exit-law tests
return plain dicts with the same layout as the command-line JSON reports.
"""

import json
import os

from ._dunklpot import (
    DegenerateWall,
    Error,
    InvalidArgument,
    KernelValue,
    NotInChamber,
    OnWall,
    PrecisionExhausted,
    QuadratureNotConverged,
    RootSystem,
    StrategyExhausted,
    UnsupportedFamily,
    UnsupportedGeometry,
    __version__,
    catalog,
    classify,
    drift,
    newton,
    newton_at_origin,
    omega_newton,
    omega_poisson,
    poisson,
    poisson_at_origin,
    poisson_density,
    product_kernel,
)
from . import _dunklpot


def _threads(threads):
    return threads if threads else (os.cpu_count() or 1)


def sweep(system, kernel="poisson", samples=1000, seed=42, strategy="mixed",
          estimator="phi", measure="omega", threads=None, target_rel_err=1e-10,
          max_bits=4096, rows=False):
    """Kernel / estimator ratio sweep; returns the bound report as a dict."""
    if isinstance(system, str):
        system = RootSystem(system)
    report = _dunklpot._sweep(system, kernel, measure, samples, seed, strategy,
                              estimator, _threads(threads), target_rel_err,
                              max_bits, rows)
    return json.loads(report)


def exit_test(system, x0, paths=100_000, bins=32, seed=1, h0=1e-3, c_w=0.05,
              c_b=0.05, delta_exit=1e-4, threads=None):
    """Monte Carlo exit histogram compared with the Poisson density."""
    if isinstance(system, str):
        system = RootSystem(system)
    out = _dunklpot._exit_test(system, list(x0), paths, bins, seed, h0, c_w,
                               c_b, delta_exit, _threads(threads))
    return json.loads(out)


__all__ = [
    "DegenerateWall", "Error", "InvalidArgument", "KernelValue", "NotInChamber",
    "OnWall", "PrecisionExhausted", "QuadratureNotConverged", "RootSystem",
    "StrategyExhausted", "UnsupportedFamily", "UnsupportedGeometry",
    "__version__", "catalog", "classify", "drift", "exit_test", "newton",
    "newton_at_origin", "omega_newton", "omega_poisson", "poisson",
    "poisson_at_origin", "poisson_density", "product_kernel", "sweep",
]
