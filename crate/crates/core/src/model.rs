//! Entry representation, lexicographic key specifications and branch-free
//! selection.
//!
//! Everything in this module operates on values held in local memory
//! (registers); nothing here touches a [`PublicArray`](crate::trace::PublicArray).

use std::cmp::Ordering;

/// A plaintext table row: join value `j` and data value `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Record {
    pub j: u64,
    pub d: u64,
}

impl Record {
    pub const fn new(j: u64, d: u64) -> Self {
        Self { j, d }
    }
}

/// Identifies which input table an entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum TableId {
    Left = 1,
    Right = 2,
}

/// Fixed-width working entry moved through public memory.
///
/// `f` is a 1-based destination index; null entries always carry `f == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AugEntry {
    pub j: u64,
    pub d: u64,
    pub tid: u8,
    pub alpha1: u64,
    pub alpha2: u64,
    pub f: u64,
    pub ii: u64,
    pub is_null: bool,
}

impl AugEntry {
    /// Serialized width in bytes; identical for every entry.
    pub const WIDTH: usize = 8 * 6 + 2;

    /// The null placeholder.
    pub const NULL: AugEntry = AugEntry {
        j: 0,
        d: 0,
        tid: 0,
        alpha1: 0,
        alpha2: 0,
        f: 0,
        ii: 0,
        is_null: true,
    };

    pub fn from_record(r: Record, tid: TableId) -> Self {
        Self {
            j: r.j,
            d: r.d,
            tid: tid as u8,
            ..Self::default()
        }
    }

    pub fn record(&self) -> Record {
        Record::new(self.j, self.d)
    }

    /// Reads the attribute named by `attr` as an unsigned sort key.
    #[inline(always)]
    pub fn attr(&self, attr: Attr) -> u64 {
        match attr {
            // non-null entries sort before null ones when ascending
            Attr::NonNull => self.is_null as u64,
            Attr::J => self.j,
            Attr::D => self.d,
            Attr::Tid => self.tid as u64,
            Attr::Alpha1 => self.alpha1,
            Attr::Alpha2 => self.alpha2,
            Attr::F => self.f,
            Attr::Ii => self.ii,
        }
    }

    /// Big-endian fixed-width encoding.
    pub fn encode(&self) -> [u8; Self::WIDTH] {
        let mut out = [0u8; Self::WIDTH];
        let words = [self.j, self.d, self.alpha1, self.alpha2, self.f, self.ii];
        for (chunk, w) in out.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_be_bytes());
        }
        out[48] = self.tid;
        out[49] = self.is_null as u8;
        out
    }
}

/// Sortable entry attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attr {
    /// The `≠∅` predicate: non-null entries order first when ascending.
    NonNull,
    J,
    D,
    Tid,
    Alpha1,
    Alpha2,
    F,
    Ii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Asc,
    Desc,
}

/// An ordered list of `(attribute, direction)` pairs inducing a
/// lexicographic total preorder on entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeySpec(Vec<(Attr, Direction)>);

impl KeySpec {
    pub fn new(keys: impl IntoIterator<Item = (Attr, Direction)>) -> Self {
        Self(keys.into_iter().collect())
    }

    /// All attributes ascending.
    pub fn asc(attrs: &[Attr]) -> Self {
        Self::new(attrs.iter().map(|&a| (a, Direction::Asc)))
    }

    pub fn keys(&self) -> &[(Attr, Direction)] {
        &self.0
    }
}

/// Returns `a` when `cond == 1` and `b` when `cond == 0`, without branching.
#[inline(always)]
pub fn ct_select(cond: u64, a: u64, b: u64) -> u64 {
    debug_assert!(cond <= 1);
    let mask = std::hint::black_box(cond).wrapping_neg();
    (a & mask) | (b & !mask)
}

/// Field-wise [`ct_select`] over every field of an entry.
#[inline(always)]
pub fn ct_select_entry(cond: u64, a: &AugEntry, b: &AugEntry) -> AugEntry {
    AugEntry {
        j: ct_select(cond, a.j, b.j),
        d: ct_select(cond, a.d, b.d),
        tid: ct_select(cond, a.tid as u64, b.tid as u64) as u8,
        alpha1: ct_select(cond, a.alpha1, b.alpha1),
        alpha2: ct_select(cond, a.alpha2, b.alpha2),
        f: ct_select(cond, a.f, b.f),
        ii: ct_select(cond, a.ii, b.ii),
        is_null: ct_select(cond, a.is_null as u64, b.is_null as u64) != 0,
    }
}

/// Branch-free lexicographic comparison. Returns `(lt, gt)` as 0/1 words;
/// both are 0 when the entries compare equal under `key`.
#[inline(always)]
pub fn lex_bits(a: &AugEntry, b: &AugEntry, key: &KeySpec) -> (u64, u64) {
    let mut lt = 0u64;
    let mut gt = 0u64;
    let mut undecided = 1u64;
    for &(attr, dir) in key.keys() {
        let x = a.attr(attr);
        let y = b.attr(attr);
        let (l, g) = ((x < y) as u64, (x > y) as u64);
        let desc = (dir == Direction::Desc) as u64;
        let (l, g) = (ct_select(desc, g, l), ct_select(desc, l, g));
        lt |= undecided & l;
        gt |= undecided & g;
        undecided &= !(l | g) & 1;
    }
    (lt, gt)
}

/// Lexicographic comparison of `a` and `b` under `key`.
pub fn lex_compare(a: &AugEntry, b: &AugEntry, key: &KeySpec) -> Ordering {
    match lex_bits(a, b, key) {
        (1, _) => Ordering::Less,
        (_, 1) => Ordering::Greater,
        _ => Ordering::Equal,
    }
}
