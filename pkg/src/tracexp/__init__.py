"""tracexp: runtime verification with parametric trace expressions.

A specification is a system of equations over seven operators (empty
trace, event-type prefix, concatenation, intersection, union, shuffle,
and a runtime-instantiated binder) denoting a set of event traces.  The
engine consumes events one at a time, keeping every live derivation in
a frontier; emptiness of the frontier is a (sticky) violation.
"""

from .domains import (
    DecodeError,
    Event,
    Guard,
    MatchContext,
    SpecProgram,
    TypeClause,
    UnknownTypeName,
    decode_event,
    match,
)
from .engine import (
    DEFAULT_FRONTIER_CAP,
    FrontierOverflow,
    MonitorState,
    UnguardedRecursion,
    accepts,
    accepts_final,
    initial_state,
    nullable,
    step,
    successors,
)
from .oracle import BoundExceeded, oracle_accepts
from .parser import (
    ParseDiagnostic,
    SourceSpan,
    SpecLoadError,
    format_spec,
    parse_spec,
    parse_spec_file,
)
from .replay import (
    ReplayReport,
    TraceDecodeError,
    enumerate_accepted,
    load_trace,
    replay_events,
    replay_files,
)
from .terms import (
    EMPTY_SUBST,
    Cell,
    Ctor,
    EventType,
    Lit,
    Pattern,
    Seq,
    Subst,
    Term,
    TermStore,
    Var,
    WILD,
    Wild,
    free_vars,
    graph_equal,
    subst_expr,
    subst_type,
    value_eq,
    vars_of,
)

__version__ = "0.1.0"
