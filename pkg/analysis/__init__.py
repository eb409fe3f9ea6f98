# Spectral, Hamiltonian and cohomological computations on the circle
