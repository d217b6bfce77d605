from ._pdsched import (
    Assignment,
    CostModel,
    CostModelConfig,
    Request,
    Trace,
    TraceParams,
    assign_lpt,
    export_mip,
    generate_trace,
    load_trace,
    lower_bound,
    run_batch,
    save_trace,
    simulate,
    trace_stats,
)

__all__ = [
    "Assignment",
    "CostModel",
    "CostModelConfig",
    "Request",
    "Trace",
    "TraceParams",
    "assign_lpt",
    "export_mip",
    "generate_trace",
    "load_trace",
    "lower_bound",
    "run_batch",
    "save_trace",
    "simulate",
    "trace_stats",
]
