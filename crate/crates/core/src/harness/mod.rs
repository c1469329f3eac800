//! Test-class generation, trace verification, cost accounting and timing.

pub mod bench;
pub mod cost;
pub mod gen;
pub mod verify;

pub use bench::{bench, write_csv, BenchRow, CSV_HEADER};
pub use cost::{cost_report, CostBreakdown, CostReport};
pub use gen::{gen_class_with_m, gen_test_class, GenError, Shape, TestClass};
pub use verify::{trace_digest, verify_trace_class, Verdict};
