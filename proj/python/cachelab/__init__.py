"""Cache replacement and graph locality laboratory."""

from ._core import (
    CacheGeometry,
    CsrGraph,
    GraphError,
    Trace,
    TraceFormatError,
    apply_remap,
    compare,
    csr_from_edges,
    generate_pattern,
    graph_trace,
    policy_names,
    read_csr,
    read_trace,
    reorder,
    reuse_distances,
    reuse_histogram,
    simulate,
    skew_metrics,
    synth_powerlaw,
    synth_uniform,
    write_csr,
    write_trace,
)

__all__ = [
    "CacheGeometry",
    "CsrGraph",
    "GraphError",
    "Trace",
    "TraceFormatError",
    "apply_remap",
    "compare",
    "csr_from_edges",
    "generate_pattern",
    "graph_trace",
    "policy_names",
    "read_csr",
    "read_trace",
    "reorder",
    "reuse_distances",
    "reuse_histogram",
    "simulate",
    "skew_metrics",
    "synth_powerlaw",
    "synth_uniform",
    "write_csr",
    "write_trace",
]
