//! Data-oblivious equi-join.
//!
//! [`oblivious_join`] computes `T1 ⋈ T2` with a sequence of public-memory
//! accesses that depends only on the input sizes `n1`, `n2` and the output
//! size `m`. All large state lives in [`PublicArray`]s accessed through a
//! [`Tracer`], so the access sequence can be logged, hashed or counted and
//! compared across inputs (see [`harness`]).

pub mod baseline;
pub mod harness;
pub mod join;
pub mod model;
pub mod primitives;
pub mod trace;

pub use baseline::{nested_loop_join, sort_merge_join};
pub use join::{
    align_table, augment_tables, expand_for_join, fill_dimensions, oblivious_join,
    oblivious_join_traced, CountAttr, GroupDims, JoinOutput,
};
pub use model::{
    ct_select, ct_select_entry, lex_compare, Attr, AugEntry, Direction, KeySpec, Record, TableId,
};
pub use trace::{
    hash_step, AnySink, CountSink, Digest, HashSink, LogSink, NullSink, Op, Phase, PublicArray,
    TraceEvent, TraceSink, Tracer,
};
