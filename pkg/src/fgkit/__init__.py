"""Transforms linking sphere kernels, Volterra kernels on the hyperboloid and their analytic interpolations in the degree."""
from . import appendix_ops, convolve, errors, kernels, numerics, special, transforms, verify

__version__ = "0.1.0"

__all__ = ["appendix_ops", "convolve", "errors", "kernels", "numerics", "special", "transforms", "verify"]
