"""Exact kernel for p-independence, lambda functions, Lambda closures,
separability, loci and Hensel lifting in rational function fields over
small finite fields."""

__version__ = "0.1.0"
