"""Classical simulation lab for quantum exact learning of Fourier-sparse Boolean
functions and for entropy-greedy simulation of membership-query learners."""

__version__ = "0.1.0"
