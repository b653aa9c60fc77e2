"""Exact structure computations for the rank-3 permutation modules of
O(2n,2)+/- and U(m,2) acting on nonsingular points, over odd prime fields."""

__version__ = "0.1.0"
