"""Spectral computations on metric graphs."""

from ._qgraph import (
    Graph,
    QGraphError,
    check_hypotheses,
    compare_traces,
    cycles,
    eigenvalues,
    global_scattering,
    green,
    heat_kernel,
    length_spectrum,
    recover_lengths,
    scattering_matrix,
    spectral_shift,
    vertex_scattering,
)

__all__ = [
    "Graph",
    "QGraphError",
    "check_hypotheses",
    "compare_traces",
    "cycles",
    "eigenvalues",
    "global_scattering",
    "green",
    "heat_kernel",
    "length_spectrum",
    "recover_lengths",
    "scattering_matrix",
    "spectral_shift",
    "vertex_scattering",
]
