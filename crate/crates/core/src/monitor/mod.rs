//! Traces, fact bases and verdict computation.

pub mod facts;
pub mod artifact;
pub mod oracle;
pub mod session;
pub mod trace_io;
pub mod verdict;

pub use artifact::{compile, compile_cached, CompileError, CompileOptions, CompileStats, Compiled};
pub use facts::{Assignment, FactBase, Trace, Tri, Value};
pub use session::{monitor, monitor_prefixes, MonitorError, Session};
pub use verdict::Verdict;
