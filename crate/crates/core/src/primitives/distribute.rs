//! Deterministic oblivious distribution.
//!
//! Entries are first sorted by destination, then pushed towards their
//! destinations through a routing network whose hop lengths halve each round
//! (`2^(ceil(log2 m) - 1), ..., 2, 1`). Within a round the array is scanned
//! from the back, so leading entries always move before the ones behind them
//! and a non-null entry only ever swaps with a null slot.

use crate::model::{ct_select_entry, Attr, AugEntry, KeySpec};
use crate::primitives::sort::bitonic_sort;
use crate::trace::{Phase, PublicArray, TraceSink, Tracer};

/// Hop schedule of the routing network for a target length `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingSchedule {
    m: usize,
}

impl RoutingSchedule {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    /// First (longest) hop, or `None` when `m <= 1`.
    pub fn first_hop(&self) -> Option<usize> {
        (self.m > 1).then(|| self.m.next_power_of_two() / 2)
    }

    /// Hop lengths in execution order.
    pub fn hops(&self) -> impl Iterator<Item = usize> {
        std::iter::successors(self.first_hop(), |&j| (j > 1).then_some(j / 2))
    }

    /// Total number of routing steps `sum_j (m - j)`.
    pub fn steps(&self) -> u64 {
        self.hops().map(|j| (self.m - j) as u64).sum()
    }
}

/// Runs the routing network over the first `m` slots of `a`.
///
/// Each step reads the pair `(i, i + j)` and writes both back; the pair is
/// exchanged exactly when the lower entry is non-null and its destination
/// `f` (1-based) is at or beyond `i + j`. `observe(lower, upper, swapped)` is
/// invoked on every step with the values read.
pub fn route<S: TraceSink>(
    t: &mut Tracer<S>,
    a: &mut PublicArray<AugEntry>,
    m: usize,
    mut observe: impl FnMut(&AugEntry, &AugEntry, bool),
) {
    for j in RoutingSchedule::new(m).hops() {
        // 1-based i from m - j down to 1
        for i in (1..=m - j).rev() {
            let lo = i - 1;
            let y = t.read(a, lo);
            let y2 = t.read(a, lo + j);
            let hop = (!y.is_null as u64) & ((y.f >= (i + j) as u64) as u64);
            t.write(a, lo, ct_select_entry(hop, &y2, &y));
            t.write(a, lo + j, ct_select_entry(hop, &y, &y2));
            observe(&y, &y2, hop == 1);
        }
    }
}

fn with_phase<S: TraceSink, R>(t: &mut Tracer<S>, phase: Phase, f: impl FnOnce(&mut Tracer<S>) -> R) -> R {
    let prev = t.set_phase(phase);
    let r = f(t);
    t.set_phase(prev);
    r
}

fn pad_nulls<S: TraceSink>(t: &mut Tracer<S>, a: &mut PublicArray<AugEntry>, from: usize, to: usize) {
    t.grow(a, to);
    for i in from..to {
        t.write(a, i, AugEntry::NULL);
    }
}

/// Places every entry `x` of `x` (all non-null, `f` injective into `1..=m`,
/// `x.len() <= m`) at slot `f(x) - 1` of a length-`m` array; other slots are
/// null. Reuses `x`'s storage.
pub fn oblivious_distribute<S: TraceSink>(
    t: &mut Tracer<S>,
    x: PublicArray<AugEntry>,
    m: usize,
) -> PublicArray<AugEntry> {
    oblivious_distribute_observed(t, x, m, |_, _, _| {})
}

/// [`oblivious_distribute`] with a routing-step observer (see [`route`]).
pub fn oblivious_distribute_observed<S: TraceSink>(
    t: &mut Tracer<S>,
    mut a: PublicArray<AugEntry>,
    m: usize,
    observe: impl FnMut(&AugEntry, &AugEntry, bool),
) -> PublicArray<AugEntry> {
    let n = a.len();
    assert!(n <= m, "distribute needs n <= m (n = {n}, m = {m})");
    with_phase(t, Phase::DistributeSort, |t| {
        bitonic_sort(t, &mut a, &KeySpec::asc(&[Attr::F]))
    });
    with_phase(t, Phase::DistributePad, |t| pad_nulls(t, &mut a, n, m));
    with_phase(t, Phase::DistributeRoute, |t| route(t, &mut a, m, observe));
    a
}

/// Distribution over the non-null subset of `x`, which must contain at most
/// `m` entries with `f` injective into `1..=m`. The result has exactly `m`
/// slots even when `m < x.len()`.
pub fn ext_oblivious_distribute<S: TraceSink>(
    t: &mut Tracer<S>,
    x: PublicArray<AugEntry>,
    m: usize,
) -> PublicArray<AugEntry> {
    ext_oblivious_distribute_observed(t, x, m, |_, _, _| {})
}

/// [`ext_oblivious_distribute`] with a routing-step observer.
pub fn ext_oblivious_distribute_observed<S: TraceSink>(
    t: &mut Tracer<S>,
    mut a: PublicArray<AugEntry>,
    m: usize,
    observe: impl FnMut(&AugEntry, &AugEntry, bool),
) -> PublicArray<AugEntry> {
    let n = a.len();
    with_phase(t, Phase::DistributeSort, |t| {
        bitonic_sort(t, &mut a, &KeySpec::asc(&[Attr::NonNull, Attr::F]))
    });
    with_phase(t, Phase::DistributePad, |t| pad_nulls(t, &mut a, n, m));
    with_phase(t, Phase::DistributeRoute, |t| route(t, &mut a, m, observe));
    t.truncate(&mut a, m);
    a
}
