//! Wall-clock comparison against the sort-merge baseline.

use std::io::{self, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baseline::sort_merge_join;
use crate::harness::gen::{realize, GroupPlan, Instance};
use crate::join::oblivious_join;
use crate::trace::{CountSink, NullSink};

pub const CSV_HEADER: &str = "n,m,oblivious_s,sortmerge_s,events";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub oblivious_s: f64,
    pub sortmerge_s: f64,
    pub events: u64,
}

/// Input with `n1 = n2 = n / 2` joined through 1×1 groups, so `m = n / 2`.
pub fn balanced_instance(n: usize, seed: u64) -> Instance {
    let half = n / 2;
    let plan = GroupPlan {
        n1: half,
        n2: n - half,
        groups: vec![(1, 1); half],
    };
    realize(&plan, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        0.0
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn time<R>(mut f: impl FnMut() -> R) -> f64 {
    let start = Instant::now();
    std::hint::black_box(f());
    start.elapsed().as_secs_f64()
}

/// Median timings over `reps` runs per size (null sink, so no tracing
/// overhead) and the event count of one traced run.
///
/// Each size gets one untimed warm-up. Repetitions are interleaved across
/// sizes, so a transient slowdown of the machine affects every size alike
/// instead of skewing one median.
pub fn bench(sizes: &[usize], reps: usize) -> Vec<BenchRow> {
    let inputs: Vec<Instance> = sizes.iter().map(|&n| balanced_instance(n, n as u64)).collect();
    for (t1, t2) in &inputs {
        oblivious_join(t1, t2, NullSink);
    }
    let mut obl = vec![Vec::new(); sizes.len()];
    let mut sm = vec![Vec::new(); sizes.len()];
    for _ in 0..reps.max(1) {
        for (k, (t1, t2)) in inputs.iter().enumerate() {
            obl[k].push(time(|| oblivious_join(t1, t2, NullSink)));
            sm[k].push(time(|| sort_merge_join(t1, t2)));
        }
    }
    sizes
        .iter()
        .zip(&inputs)
        .zip(obl.into_iter().zip(sm))
        .map(|((&n, (t1, t2)), (obl, sm))| {
            let mut counts = CountSink::new();
            let m = oblivious_join(t1, t2, &mut counts).m();
            BenchRow {
                n,
                m,
                oblivious_s: median(obl),
                sortmerge_s: median(sm),
                events: counts.total(),
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.6},{:.6},{}",
            r.n, r.m, r.oblivious_s, r.sortmerge_s, r.events
        )?;
    }
    w.flush()
}
