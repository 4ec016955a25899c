"""Structure-preserving one-step integrators for ODEs with first integrals."""
