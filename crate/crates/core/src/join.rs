//! The oblivious equi-join.
//!
//! 1. Concatenate both tables, sort by `(j, tid)` and compute each group's
//!    dimensions `(alpha1, alpha2)` in one forward and one backward pass.
//! 2. Re-sort by `(tid, j, d)` and split back into the two tables.
//! 3. Expand the left table by `alpha2` and the right table by `alpha1`,
//!    giving two length-`m` tables.
//! 4. Reorder the right expansion so that position `i` of both tables forms
//!    one output pair, then zip.
//!
//! The memory trace is a function of `(n1, n2, m)` only. All scalars (loop
//! counters, running counts, the previous join value) are local.

use crate::model::{ct_select, AugEntry, Attr, KeySpec, Record, TableId};
use crate::primitives::{bitonic_sort, oblivious_expand};
use crate::trace::{Phase, PublicArray, TraceSink, Tracer};

/// Result of a join: `(d1, d2)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JoinOutput {
    pub rows: Vec<(u64, u64)>,
}

impl JoinOutput {
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Rows in ascending order, for multiset comparison.
    pub fn sorted(mut self) -> Self {
        self.rows.sort_unstable();
        self
    }
}

/// Dimensions of the group sharing one join value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupDims {
    pub alpha1: u64,
    pub alpha2: u64,
}

impl GroupDims {
    pub fn of(e: &AugEntry) -> Self {
        Self { alpha1: e.alpha1, alpha2: e.alpha2 }
    }

    /// Output rows contributed by the group.
    pub fn product(&self) -> u64 {
        self.alpha1 * self.alpha2
    }
}

/// Which dimension drives an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountAttr {
    Alpha1,
    Alpha2,
}

/// Writes `(alpha1, alpha2)` into every entry of a table sorted by
/// `(j, tid)` and returns `m = sum alpha1 * alpha2` over groups.
///
/// The forward pass leaves running per-table counts in each entry, so the
/// last entry of a group holds the final dimensions; the backward pass copies
/// them to the rest of the group. Each pass reads and writes every slot once.
pub fn fill_dimensions<S: TraceSink>(t: &mut Tracer<S>, tc: &mut PublicArray<AugEntry>) -> u64 {
    let n = tc.len();
    let (mut prev_j, mut c1, mut c2) = (0u64, 0u64, 0u64);
    for i in 0..n {
        let mut e = t.read(tc, i);
        let same = ((i > 0) as u64) & ((e.j == prev_j) as u64);
        let left = (e.tid == TableId::Left as u8) as u64;
        c1 = ct_select(same, c1, 0) + left;
        c2 = ct_select(same, c2, 0) + (1 - left);
        e.alpha1 = c1;
        e.alpha2 = c2;
        prev_j = e.j;
        t.write(tc, i, e);
    }

    let (mut a1, mut a2, mut m) = (0u64, 0u64, 0u64);
    for i in (0..n).rev() {
        let mut e = t.read(tc, i);
        let last_of_group = ((i + 1 == n) as u64) | ((e.j != prev_j) as u64);
        a1 = ct_select(last_of_group, e.alpha1, a1);
        a2 = ct_select(last_of_group, e.alpha2, a2);
        m += ct_select(last_of_group, a1 * a2, 0);
        e.alpha1 = a1;
        e.alpha2 = a2;
        prev_j = e.j;
        t.write(tc, i, e);
    }
    m
}

/// Tags, concatenates and augments both tables with group dimensions.
///
/// Returns the augmented left and right tables, each sorted by `(j, d)`, and
/// the output size `m`.
pub fn augment_tables<S: TraceSink>(
    t: &mut Tracer<S>,
    t1: &[Record],
    t2: &[Record],
) -> (PublicArray<AugEntry>, PublicArray<AugEntry>, u64) {
    let n1 = t1.len();
    t.set_phase(Phase::Load);
    let mut tc = t.alloc(n1 + t2.len());
    let tagged = t1
        .iter()
        .map(|&r| AugEntry::from_record(r, TableId::Left))
        .chain(t2.iter().map(|&r| AugEntry::from_record(r, TableId::Right)));
    for (i, e) in tagged.enumerate() {
        t.write(&mut tc, i, e);
    }

    t.set_phase(Phase::InitialSort);
    bitonic_sort(t, &mut tc, &KeySpec::asc(&[Attr::J, Attr::Tid]));
    t.set_phase(Phase::FillDimensions);
    let m = fill_dimensions(t, &mut tc);
    t.set_phase(Phase::InitialSort);
    bitonic_sort(t, &mut tc, &KeySpec::asc(&[Attr::Tid, Attr::J, Attr::D]));

    let (left, right) = t.split(tc, n1);
    (left, right, m)
}

/// Expands an augmented table by the chosen dimension.
pub fn expand_for_join<S: TraceSink>(
    t: &mut Tracer<S>,
    table: PublicArray<AugEntry>,
    by: CountAttr,
) -> PublicArray<AugEntry> {
    match by {
        CountAttr::Alpha1 => oblivious_expand(t, table, |e| e.alpha1),
        CountAttr::Alpha2 => oblivious_expand(t, table, |e| e.alpha2),
    }
}

/// Alignment index of the entry at in-group position `q` of the right
/// expansion: each right entry appears `copies` (= alpha1) times in a row and
/// must land once in each left block of size `block` (= alpha2).
#[inline(always)]
pub fn alignment_index(q: u64, copies: u64, block: u64) -> u64 {
    q / copies + (q % copies) * block
}

/// Reorders the right expansion (grouped by `j`, sorted by `(j, d)`) so it
/// lines up with the left expansion.
pub fn align_table<S: TraceSink>(t: &mut Tracer<S>, s2: &mut PublicArray<AugEntry>) {
    let prev = t.set_phase(Phase::AlignIndex);
    let (mut prev_j, mut q) = (0u64, 0u64);
    for i in 0..s2.len() {
        let mut e = t.read(s2, i);
        let same = ((i > 0) as u64) & ((e.j == prev_j) as u64);
        q = ct_select(same, q + 1, 0);
        // alpha1 >= 1 for every entry that survives expansion
        let copies = e.alpha1 | (e.alpha1 == 0) as u64;
        e.ii = alignment_index(q, copies, e.alpha2);
        prev_j = e.j;
        t.write(s2, i, e);
    }
    t.set_phase(Phase::AlignSort);
    bitonic_sort(t, s2, &KeySpec::asc(&[Attr::J, Attr::Ii]));
    t.set_phase(prev);
}

/// Joins `t1` and `t2` on `j`, reporting every public access to `sink`.
pub fn oblivious_join<S: TraceSink>(t1: &[Record], t2: &[Record], sink: S) -> JoinOutput {
    let mut t = Tracer::new(sink);
    oblivious_join_traced(&mut t, t1, t2)
}

/// [`oblivious_join`] on a caller-owned tracer, so space accounting and the
/// sink stay inspectable afterwards.
pub fn oblivious_join_traced<S: TraceSink>(t: &mut Tracer<S>, t1: &[Record], t2: &[Record]) -> JoinOutput {
    let (left, right, m) = augment_tables(t, t1, t2);
    let m = m as usize;

    let s1 = expand_for_join(t, left, CountAttr::Alpha2);
    let mut s2 = expand_for_join(t, right, CountAttr::Alpha1);
    debug_assert_eq!((s1.len(), s2.len()), (m, m));
    align_table(t, &mut s2);

    t.set_phase(Phase::Zip);
    let mut out = t.alloc_output::<(u64, u64)>(m);
    for i in 0..m {
        let a = t.read(&s1, i);
        let b = t.read(&s2, i);
        t.write(&mut out, i, (a.d, b.d));
    }
    t.release(s1);
    t.release(s2);

    t.set_phase(Phase::Export);
    let rows = t.export(out);
    t.set_phase(Phase::Unlabeled);
    JoinOutput { rows }
}
