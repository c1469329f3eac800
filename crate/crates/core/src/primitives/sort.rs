//! Bitonic sorting network over public arrays of arbitrary length.

use crate::model::{ct_select, ct_select_entry, lex_bits, AugEntry, Direction, KeySpec};
use crate::trace::{PublicArray, TraceSink, Tracer};

/// Orders `a[i]`, `a[k]` by `key` in direction `dir`.
///
/// Always emits `R i, R k, W i, W k`; when no swap is needed the original
/// entries are written back unchanged. Equal keys are never swapped.
#[inline(always)]
pub fn compare_exchange<S: TraceSink>(
    t: &mut Tracer<S>,
    a: &mut PublicArray<AugEntry>,
    i: usize,
    k: usize,
    key: &KeySpec,
    dir: Direction,
) {
    debug_assert_ne!(i, k);
    let x = t.read(a, i);
    let y = t.read(a, k);
    let (lt, gt) = lex_bits(&x, &y, key);
    let swap = ct_select((dir == Direction::Desc) as u64, lt, gt);
    t.write(a, i, ct_select_entry(swap, &y, &x));
    t.write(a, k, ct_select_entry(swap, &x, &y));
}

/// Entries per cache block; stages whose comparators stay inside aligned
/// blocks of this size are run block by block.
const BLOCK: usize = 1 << 13;

/// First stage of a merge of width `size`: `i` against its mirror image.
fn mirror(n: usize, size: usize, from: usize, to: usize, f: &mut impl FnMut(usize, usize)) {
    for block in (from..to.min(n)).step_by(size) {
        for i in 0..size / 2 {
            let hi = block + size - 1 - i;
            if hi < n {
                f(block + i, hi);
            }
        }
    }
}

/// Half-cleaner with distance `stride`.
fn cleaner(n: usize, stride: usize, from: usize, to: usize, f: &mut impl FnMut(usize, usize)) {
    for block in (from..to.min(n)).step_by(2 * stride) {
        for lo in block..block + stride {
            let hi = lo + stride;
            if hi < n {
                f(lo, hi);
            }
        }
    }
}

/// Calls `f(lo, hi)` for every comparator of an ascending bitonic network on
/// `n` elements, in execution order.
///
/// The network is the one for `n.next_power_of_two()` inputs with the extra
/// inputs treated as `+inf` padding at the tail. Every comparator places its
/// minimum at `lo < hi`, so padding never moves and comparators with
/// `hi >= n` are no-ops; they are omitted. Stages confined to aligned blocks
/// of [`BLOCK`] entries are grouped per block for locality; comparators of
/// one stage are independent, so this does not change the result. The
/// schedule depends on `n` only.
pub fn for_each_comparator(n: usize, mut f: impl FnMut(usize, usize)) {
    if n < 2 {
        return;
    }
    let p = n.next_power_of_two();
    let b = BLOCK.min(p);
    let local = |f: &mut _, base: usize, mut stride: usize| {
        while stride > 0 {
            cleaner(n, stride, base, base + b, f);
            stride /= 2;
        }
    };
    for base in (0..n).step_by(b) {
        let mut size = 2;
        while size <= b {
            mirror(n, size, base, base + b, &mut f);
            local(&mut f, base, size / 4);
            size *= 2;
        }
    }
    let mut size = 2 * b;
    while size <= p {
        mirror(n, size, 0, p, &mut f);
        let mut stride = size / 4;
        while stride >= b {
            cleaner(n, stride, 0, p, &mut f);
            stride /= 2;
        }
        for base in (0..n).step_by(b) {
            local(&mut f, base, stride);
        }
        size *= 2;
    }
}

/// Number of comparators [`bitonic_sort`] executes on `n` elements.
pub fn comparator_count(n: usize) -> u64 {
    let mut c = 0u64;
    for_each_comparator(n, |_, _| c += 1);
    c
}

/// Sorts `a` ascending under `key` (descending attributes are encoded in the
/// key itself). The access sequence depends only on `a.len()`.
pub fn bitonic_sort<S: TraceSink>(t: &mut Tracer<S>, a: &mut PublicArray<AugEntry>, key: &KeySpec) {
    for_each_comparator(a.len(), |lo, hi| {
        compare_exchange(t, a, lo, hi, key, Direction::Asc)
    });
}
