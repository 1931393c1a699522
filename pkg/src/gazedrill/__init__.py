"""Deterministic desk-scale simulator of gaze-aware surgeon-robot shared
control for bone drilling: attention estimation from a synthetic gaze stream,
a piecewise-linear allocation law, coupled haptic/robot impedance control, a
scripted three-mode experiment, and a live telemetry interface for a browser
console."""

__version__ = "0.1.0"
