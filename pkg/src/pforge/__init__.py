"""Exact symbolic verification of Pfister-form similarity matrices,
birational substitution chains between Pfister quadrics, and split models
of the symmetric-power splitting-variety construction."""

__version__ = "0.1.0"
