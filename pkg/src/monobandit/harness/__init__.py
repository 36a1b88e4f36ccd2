"""Experiment configuration, execution, persistence, plotting and statistical checks."""
