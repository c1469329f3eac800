use crate::model::{ct_select, ct_select_entry, AugEntry};
use crate::primitives::distribute::ext_oblivious_distribute;
use crate::trace::{Phase, PublicArray, TraceSink, Tracer};

/// Duplicates each entry `x` of `x` `count(x)` times, preserving order.
///
/// A prefix pass assigns destinations `f(x_i) = 1 + sum_{k<i} count(x_k)` and
/// nulls out zero-count entries, the non-null entries are distributed to
/// their first slot, and a forward pass copies the last non-null entry into
/// each following null slot. Null input entries count as zero.
///
/// The output length `sum count(x)` is revealed through the trace.
pub fn oblivious_expand<S: TraceSink>(
    t: &mut Tracer<S>,
    mut x: PublicArray<AugEntry>,
    count: impl Fn(&AugEntry) -> u64,
) -> PublicArray<AugEntry> {
    let prev = t.set_phase(Phase::ExpandPrefix);
    let mut s = 1u64;
    for i in 0..x.len() {
        let mut e = t.read(&x, i);
        let g = count(&e);
        let zero = (g == 0) as u64 | e.is_null as u64;
        e.f = ct_select(zero, 0, s);
        e.is_null = zero == 1;
        s += ct_select(zero, 0, g);
        t.write(&mut x, i, e);
    }
    let m = (s - 1) as usize;
    t.set_phase(prev);

    let mut a = ext_oblivious_distribute(t, x, m);

    t.set_phase(Phase::ExpandFill);
    let mut last = AugEntry::NULL;
    for i in 0..m {
        let e = t.read(&a, i);
        let filled = ct_select_entry(e.is_null as u64, &last, &e);
        last = filled;
        t.write(&mut a, i, filled);
    }
    t.set_phase(prev);
    a
}
