//! Public memory and access tracing.
//!
//! Every table that grows with the input lives in a [`PublicArray`]. Arrays
//! expose no element accessors of their own: reads and writes go through a
//! [`Tracer`], which forwards one [`TraceEvent`] per access to its
//! [`TraceSink`]. Scalars held in local variables are local memory and are
//! never traced.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use sha2::{Digest as _, Sha256};

/// Access kind. The discriminant is the byte fed to the trace hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Op {
    Read = 0,
    Write = 1,
}

/// One access to public memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub array_id: u64,
    pub op: Op,
    pub index: u64,
}

impl TraceEvent {
    pub const fn read(array_id: u64, index: u64) -> Self {
        Self { array_id, op: Op::Read, index }
    }

    pub const fn write(array_id: u64, index: u64) -> Self {
        Self { array_id, op: Op::Write, index }
    }

    /// Hash preimage: 8-byte big-endian array id, 1-byte op, 8-byte
    /// big-endian index.
    pub fn encode(&self) -> [u8; 17] {
        let mut out = [0u8; 17];
        out[..8].copy_from_slice(&self.array_id.to_be_bytes());
        out[8] = self.op as u8;
        out[9..].copy_from_slice(&self.index.to_be_bytes());
        out
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            Op::Read => 'R',
            Op::Write => 'W',
        };
        write!(f, "{op} {} {}", self.array_id, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed trace event {0:?}")]
pub struct ParseEventError(String);

impl FromStr for TraceEvent {
    type Err = ParseEventError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseEventError(s.to_owned());
        let mut parts = s.split_whitespace();
        let op = match parts.next() {
            Some("R") => Op::Read,
            Some("W") => Op::Write,
            _ => return Err(err()),
        };
        let array_id = parts.next().and_then(|p| p.parse().ok()).ok_or_else(err)?;
        let index = parts.next().and_then(|p| p.parse().ok()).ok_or_else(err)?;
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(Self { array_id, op, index })
    }
}

/// Writes a trace log: one `R|W <array_id> <index>` line per event.
pub fn write_log<W: Write>(mut w: W, events: &[TraceEvent]) -> io::Result<()> {
    for ev in events {
        writeln!(w, "{ev}")?;
    }
    w.flush()
}

/// Reads a trace log produced by [`write_log`].
pub fn read_log<R: BufRead>(r: R) -> io::Result<Vec<TraceEvent>> {
    r.lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| {
            l?.parse()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
        })
        .collect()
}

/// A 32-byte chained trace digest.
pub type Digest = [u8; 32];

/// The digest of the empty trace.
pub const EMPTY_DIGEST: Digest = [0u8; 32];

/// `H' = SHA-256(H || encode(ev))`.
pub fn hash_step(h: &Digest, ev: &TraceEvent) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update(h);
    hasher.update(ev.encode());
    hasher.finalize().into()
}

/// Folds a whole event sequence through [`hash_step`].
pub fn hash_events<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> Digest {
    events
        .into_iter()
        .fold(EMPTY_DIGEST, |h, ev| hash_step(&h, ev))
}

/// Pipeline stage label attached to events, used for cost breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Phase {
    #[default]
    Unlabeled,
    Load,
    InitialSort,
    FillDimensions,
    ExpandPrefix,
    DistributeSort,
    DistributePad,
    DistributeRoute,
    ExpandFill,
    AlignIndex,
    AlignSort,
    Zip,
    Export,
}

impl Phase {
    pub const ALL: [Phase; 13] = [
        Phase::Unlabeled,
        Phase::Load,
        Phase::InitialSort,
        Phase::FillDimensions,
        Phase::ExpandPrefix,
        Phase::DistributeSort,
        Phase::DistributePad,
        Phase::DistributeRoute,
        Phase::ExpandFill,
        Phase::AlignIndex,
        Phase::AlignSort,
        Phase::Zip,
        Phase::Export,
    ];
}

/// Receiver of trace events.
pub trait TraceSink {
    fn record(&mut self, phase: Phase, ev: TraceEvent);
}

impl<S: TraceSink + ?Sized> TraceSink for &mut S {
    #[inline(always)]
    fn record(&mut self, phase: Phase, ev: TraceEvent) {
        (**self).record(phase, ev)
    }
}

/// Discards every event.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TraceSink for NullSink {
    #[inline(always)]
    fn record(&mut self, _: Phase, _: TraceEvent) {}
}

/// Keeps the full event list plus the positions where the phase label changed.
#[derive(Debug, Default, Clone)]
pub struct LogSink {
    pub events: Vec<TraceEvent>,
    /// `(first event index, phase)` for each maximal run of one phase.
    pub phases: Vec<(usize, Phase)>,
}

impl LogSink {
    pub fn new() -> Self {
        Self::default()
    }

    /// Events grouped by contiguous phase runs.
    pub fn runs(&self) -> impl Iterator<Item = (Phase, &[TraceEvent])> {
        self.phases.iter().enumerate().map(|(k, &(start, phase))| {
            let end = self
                .phases
                .get(k + 1)
                .map_or(self.events.len(), |&(s, _)| s);
            (phase, &self.events[start..end])
        })
    }

    pub fn digest(&self) -> Digest {
        hash_events(&self.events)
    }
}

impl TraceSink for LogSink {
    fn record(&mut self, phase: Phase, ev: TraceEvent) {
        if self.phases.last().map(|&(_, p)| p) != Some(phase) {
            self.phases.push((self.events.len(), phase));
        }
        self.events.push(ev);
    }
}

/// Keeps only the chained SHA-256 digest of the trace.
#[derive(Debug, Clone)]
pub struct HashSink {
    digest: Digest,
}

impl Default for HashSink {
    fn default() -> Self {
        Self { digest: EMPTY_DIGEST }
    }
}

impl HashSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn digest(&self) -> Digest {
        self.digest
    }
}

impl TraceSink for HashSink {
    #[inline]
    fn record(&mut self, _: Phase, ev: TraceEvent) {
        self.digest = hash_step(&self.digest, &ev);
    }
}

/// Per-phase read and write counters.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct CountSink {
    counts: [(u64, u64); Phase::ALL.len()],
}

impl CountSink {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(reads, writes)` recorded under `phase`.
    pub fn get(&self, phase: Phase) -> (u64, u64) {
        self.counts[phase as usize]
    }

    pub fn events(&self, phase: Phase) -> u64 {
        let (r, w) = self.get(phase);
        r + w
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|(r, w)| r + w).sum()
    }
}

impl TraceSink for CountSink {
    #[inline]
    fn record(&mut self, phase: Phase, ev: TraceEvent) {
        let c = &mut self.counts[phase as usize];
        match ev.op {
            Op::Read => c.0 += 1,
            Op::Write => c.1 += 1,
        }
    }
}

/// Runtime-selected sink.
#[derive(Debug, Clone)]
pub enum AnySink {
    Null(NullSink),
    Log(LogSink),
    Hash(HashSink),
    Count(CountSink),
}

impl TraceSink for AnySink {
    #[inline]
    fn record(&mut self, phase: Phase, ev: TraceEvent) {
        match self {
            AnySink::Null(s) => s.record(phase, ev),
            AnySink::Log(s) => s.record(phase, ev),
            AnySink::Hash(s) => s.record(phase, ev),
            AnySink::Count(s) => s.record(phase, ev),
        }
    }
}

/// A fixed-length array in public memory.
///
/// The backing store is private; the only access path is
/// [`Tracer::read`] / [`Tracer::write`].
#[derive(Debug)]
pub struct PublicArray<T> {
    id: u64,
    data: Vec<T>,
    counted: bool,
}

impl<T> PublicArray<T> {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Owner of a trace sink, the array-id counter and space accounting.
///
/// A tracer and the arrays it allocates belong to a single thread of
/// execution; events reach the sink in program order.
#[derive(Debug)]
pub struct Tracer<S> {
    sink: S,
    next_id: u64,
    phase: Phase,
    live: usize,
    peak: usize,
}

impl<S: TraceSink> Tracer<S> {
    pub fn new(sink: S) -> Self {
        Self {
            sink,
            next_id: 0,
            phase: Phase::Unlabeled,
            live: 0,
            peak: 0,
        }
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }

    pub fn into_sink(self) -> S {
        self.sink
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Labels subsequent events; returns the previous label.
    pub fn set_phase(&mut self, phase: Phase) -> Phase {
        std::mem::replace(&mut self.phase, phase)
    }

    /// Entries currently allocated in counted (working) arrays.
    pub fn live_entries(&self) -> usize {
        self.live
    }

    /// High-water mark of [`live_entries`](Self::live_entries).
    pub fn peak_entries(&self) -> usize {
        self.peak
    }

    fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn account(&mut self, counted: bool, added: usize) {
        if counted {
            self.live += added;
            self.peak = self.peak.max(self.live);
        }
    }

    /// Allocates a working array. Emits no event.
    pub fn alloc<T: Copy + Default>(&mut self, len: usize) -> PublicArray<T> {
        self.account(true, len);
        PublicArray {
            id: self.fresh_id(),
            data: vec![T::default(); len],
            counted: true,
        }
    }

    /// Allocates an array excluded from working-space accounting (for
    /// results handed back to the caller).
    pub fn alloc_output<T: Copy + Default>(&mut self, len: usize) -> PublicArray<T> {
        PublicArray {
            id: self.fresh_id(),
            data: vec![T::default(); len],
            counted: false,
        }
    }

    /// Returns an array's space to the allocator.
    pub fn release<T>(&mut self, a: PublicArray<T>) {
        if a.counted {
            self.live -= a.data.len();
        }
    }

    /// Extends `a` in place to `new_len` slots (no-op if already that long).
    /// New slots hold `T::default()` until written.
    pub fn grow<T: Copy + Default>(&mut self, a: &mut PublicArray<T>, new_len: usize) {
        if new_len > a.data.len() {
            let added = new_len - a.data.len();
            a.data.resize(new_len, T::default());
            self.account(a.counted, added);
        }
    }

    /// Drops trailing slots beyond `new_len`.
    pub fn truncate<T>(&mut self, a: &mut PublicArray<T>, new_len: usize) {
        if new_len < a.data.len() {
            if a.counted {
                self.live -= a.data.len() - new_len;
            }
            a.data.truncate(new_len);
        }
    }

    /// Reinterprets `a` as two adjacent arrays `[0, mid)` and `[mid, len)`,
    /// each with a fresh id. Emits no event.
    pub fn split<T>(&mut self, mut a: PublicArray<T>, mid: usize) -> (PublicArray<T>, PublicArray<T>) {
        let tail = a.data.split_off(mid);
        let head = PublicArray {
            id: self.fresh_id(),
            data: a.data,
            counted: a.counted,
        };
        let tail = PublicArray {
            id: self.fresh_id(),
            data: tail,
            counted: a.counted,
        };
        (head, tail)
    }

    /// Traced load of `a[i]`. Out-of-bounds access panics.
    #[inline(always)]
    pub fn read<T: Copy>(&mut self, a: &PublicArray<T>, i: usize) -> T {
        let v = a.data[i];
        self.sink.record(self.phase, TraceEvent::read(a.id, i as u64));
        v
    }

    /// Traced store of `v` into `a[i]`. Out-of-bounds access panics.
    #[inline(always)]
    pub fn write<T>(&mut self, a: &mut PublicArray<T>, i: usize, v: T) {
        a.data[i] = v;
        self.sink.record(self.phase, TraceEvent::write(a.id, i as u64));
    }

    /// Allocates a working array and stores `values` into it with one traced
    /// write per slot.
    pub fn load<T: Copy + Default>(&mut self, values: &[T]) -> PublicArray<T> {
        let mut a = self.alloc(values.len());
        for (i, &v) in values.iter().enumerate() {
            self.write(&mut a, i, v);
        }
        a
    }

    /// Reads every slot of `a` in order and releases it.
    pub fn export<T: Copy>(&mut self, a: PublicArray<T>) -> Vec<T> {
        let out = (0..a.len()).map(|i| self.read(&a, i)).collect();
        self.release(a);
        out
    }
}
