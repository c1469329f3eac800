//! Randomized distribution through a keyed pseudorandom permutation.
//!
//! The permutation is a balanced Feistel network over the smallest even-bit
//! domain covering `1..=m`, restricted to `1..=m` by cycle walking. It is
//! evaluated in local memory, so looking up `pi(f(x))` touches no public
//! array; the scatter writes then land on a uniformly random `n`-subset of
//! slots and everything else is a fixed sorting network.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ct_select, Attr, AugEntry, KeySpec};
use crate::primitives::sort::bitonic_sort;
use crate::trace::{Phase, PublicArray, TraceSink, Tracer};

const ROUNDS: usize = 8;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A seeded permutation of `1..=m`.
#[derive(Debug, Clone)]
pub struct FeistelPermutation {
    m: u64,
    half_bits: u32,
    keys: [u64; ROUNDS],
}

impl FeistelPermutation {
    pub fn new(m: u64, seed: u64) -> Self {
        let bits = if m <= 1 { 2 } else { 64 - (m - 1).leading_zeros() };
        let half_bits = bits.div_ceil(2).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keys = [0u64; ROUNDS];
        keys.iter_mut().for_each(|k| *k = rng.next_u64());
        Self { m, half_bits, keys }
    }

    fn mask(&self) -> u64 {
        (1u64 << self.half_bits) - 1
    }

    fn encrypt(&self, x: u64) -> u64 {
        let mask = self.mask();
        let (mut l, mut r) = (x >> self.half_bits, x & mask);
        for &k in &self.keys {
            (l, r) = (r, l ^ (mix64(k ^ r) & mask));
        }
        (l << self.half_bits) | r
    }

    fn decrypt(&self, y: u64) -> u64 {
        let mask = self.mask();
        let (mut l, mut r) = (y >> self.half_bits, y & mask);
        for &k in self.keys.iter().rev() {
            (l, r) = (r ^ (mix64(k ^ l) & mask), l);
        }
        (l << self.half_bits) | r
    }

    /// `pi(v)` for `v` in `1..=m`.
    pub fn apply(&self, v: u64) -> u64 {
        debug_assert!((1..=self.m).contains(&v));
        let mut x = self.encrypt(v - 1);
        while x >= self.m {
            x = self.encrypt(x);
        }
        x + 1
    }

    /// `pi^-1(v)` for `v` in `1..=m`.
    pub fn invert(&self, v: u64) -> u64 {
        debug_assert!((1..=self.m).contains(&v));
        let mut x = self.decrypt(v - 1);
        while x >= self.m {
            x = self.decrypt(x);
        }
        x + 1
    }
}

/// Same contract as
/// [`oblivious_distribute`](crate::primitives::distribute::oblivious_distribute),
/// realized by scattering `x` to `pi(f(x))` and sorting by `pi^-1` of the
/// slot index. The scatter writes are labelled [`Phase::DistributeRoute`].
pub fn prp_distribute<S: TraceSink>(
    t: &mut Tracer<S>,
    x: PublicArray<AugEntry>,
    m: usize,
    seed: u64,
) -> PublicArray<AugEntry> {
    let n = x.len();
    assert!(n <= m, "distribute needs n <= m (n = {n}, m = {m})");
    let prev = t.phase();
    let pi = FeistelPermutation::new(m as u64, seed);
    let mut a = t.alloc(m);

    // slot s carries sort key pi^-1(s); a scattered x at pi(f(x)) carries f(x)
    t.set_phase(Phase::DistributePad);
    for s in 0..m {
        let mut e = AugEntry::NULL;
        e.f = pi.invert(s as u64 + 1);
        t.write(&mut a, s, e);
    }
    t.set_phase(Phase::DistributeRoute);
    for i in 0..n {
        let e = t.read(&x, i);
        t.write(&mut a, pi.apply(e.f) as usize - 1, e);
    }
    t.release(x);

    t.set_phase(Phase::DistributeSort);
    bitonic_sort(t, &mut a, &KeySpec::asc(&[Attr::F]));

    t.set_phase(Phase::DistributePad);
    for s in 0..m {
        let mut e = t.read(&a, s);
        e.f = ct_select(e.is_null as u64, 0, e.f);
        t.write(&mut a, s, e);
    }
    t.set_phase(prev);
    a
}
