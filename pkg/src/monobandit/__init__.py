"""Online learning for monotone stochastic optimization under partial feedback."""

__version__ = "0.1.0"
