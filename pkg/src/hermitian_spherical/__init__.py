"""Spherical functions on 2x2 Hermitian matrices over quadratic extensions of Q_p."""
