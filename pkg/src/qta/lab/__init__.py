"""Experiment harness, fits, rendering and the command line."""
