//! Oblivious building blocks.

pub mod distribute;
pub mod expand;
#[cfg(feature = "prp")]
pub mod prp;
pub mod sort;

pub use distribute::{
    ext_oblivious_distribute, oblivious_distribute, oblivious_distribute_observed, route,
    RoutingSchedule,
};
pub use expand::oblivious_expand;
#[cfg(feature = "prp")]
pub use prp::{prp_distribute, FeistelPermutation};
pub use sort::{bitonic_sort, comparator_count, compare_exchange, for_each_comparator};
