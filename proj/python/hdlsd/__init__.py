"""Spectra of high-dimensional autocovariance matrices and their limits.

Models, tapers and experiment configs are plain dicts with the same layout as the
JSON files read by the ``hdlsd`` command-line tool.
"""

import json

from . import _hdlsd
from ._hdlsd import ConfigError, ConvergenceError, eigenvalues, ks_distance, sym_autocov

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "eigenvalues",
    "ks_distance",
    "lsd_curve",
    "run_experiment",
    "simulate",
    "solve_kernel",
    "stieltjes_lsd",
    "stieltjes_tapered",
    "sym_autocov",
    "tapered_spectral",
    "validate_model",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def validate_model(model):
    return json.loads(_hdlsd.validate_model(_text(model)))


def simulate(model, p, n, q=None, seed=0, replicate=0, circulant=False):
    """p x n data matrix, one column per time point."""
    return _hdlsd.simulate(_text(model), p, n, q, seed, replicate, circulant)


def tapered_spectral(x, taper, eta):
    return _hdlsd.tapered_spectral(x, _text(taper), eta)


def stieltjes_lsd(model, c, tau, z, grid=512, tol=1e-10, method="newton"):
    return _hdlsd.stieltjes_lsd(_text(model), c, tau, complex(z), grid, tol, method)


def solve_kernel(model, c, tau, z, grid=512, tol=1e-10, method="newton"):
    return _hdlsd.solve_kernel(_text(model), c, tau, complex(z), grid, tol, method)


def stieltjes_tapered(model, c, taper, eta, z, grid=512, tol=1e-10):
    return _hdlsd.stieltjes_tapered(_text(model), c, _text(taper), eta, complex(z), grid, tol)


def lsd_curve(model, c, tau, x_points=1024, grid=512):
    return _hdlsd.lsd_curve(_text(model), c, tau, x_points, grid)


def run_experiment(config, out, mode=""):
    """Run an experiment into directory ``out``; returns the parsed summary."""
    return json.loads(_hdlsd.run_experiment(_text(config), mode, str(out)))
