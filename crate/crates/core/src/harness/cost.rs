//! Operation counts per pipeline stage, measured and predicted.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::harness::gen::{plan_with_m, realize, GenError};
use crate::join::oblivious_join;
use crate::primitives::{comparator_count, RoutingSchedule};
use crate::trace::{CountSink, Phase};

/// Compare-exchanges (sorting stages) and routing steps (route stage) of one
/// join, plus the events of every remaining linear pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub initial_sorts: f64,
    pub distribute_sort: f64,
    pub distribute_route: f64,
    pub align_sort: f64,
}

impl CostBreakdown {
    pub fn stages(&self) -> [(&'static str, f64); 4] {
        [
            ("initial_sorts", self.initial_sorts),
            ("distribute_sort", self.distribute_sort),
            ("distribute_route", self.distribute_route),
            ("align_sort", self.align_sort),
        ]
    }

    /// Counts from a count-mode run. Each compare-exchange and each routing
    /// step is two reads and two writes.
    pub fn from_counts(c: &CountSink) -> Self {
        let ops = |p| (c.events(p) / 4) as f64;
        Self {
            initial_sorts: ops(Phase::InitialSort),
            distribute_sort: ops(Phase::DistributeSort),
            distribute_route: ops(Phase::DistributeRoute),
            align_sort: ops(Phase::AlignSort),
        }
    }

    /// Exact counts implied by the network schedules.
    pub fn exact(n1: usize, n2: usize, m: usize) -> Self {
        let cc = |n| comparator_count(n) as f64;
        Self {
            initial_sorts: 2.0 * cc(n1 + n2),
            distribute_sort: cc(n1) + cc(n2),
            distribute_route: 2.0 * RoutingSchedule::new(m).steps() as f64,
            align_sort: cc(m),
        }
    }

    /// Leading-order approximations: a bitonic sort of `n` costs about
    /// `n log2(n)^2 / 4` comparisons and a route over `m` about `m log2 m`
    /// steps.
    pub fn approximate(n1: usize, n2: usize, m: usize) -> Self {
        let lg = |x: usize| if x == 0 { 0.0 } else { (x as f64).log2() };
        let sort = |x: usize| x as f64 * lg(x) * lg(x) / 4.0;
        Self {
            initial_sorts: 2.0 * sort(n1 + n2),
            distribute_sort: sort(n1) + sort(n2),
            distribute_route: 2.0 * m as f64 * lg(m),
            align_sort: sort(m),
        }
    }
}

/// Measured counts for one `(n1, n2, m)` with both predictions.
#[derive(Debug, Clone)]
pub struct CostReport {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub measured: CostBreakdown,
    pub exact: CostBreakdown,
    pub approximate: CostBreakdown,
    /// Events outside the four stages (loads, fills, prefix sums, zip...).
    pub linear_events: u64,
    pub total_events: u64,
}

impl CostReport {
    /// Relative deviation of each measured stage from the approximation.
    pub fn deviations(&self) -> [(&'static str, f64); 4] {
        let mut out = self.measured.stages();
        for (o, (_, a)) in out.iter_mut().zip(self.approximate.stages()) {
            o.1 = if a == 0.0 { 0.0 } else { (o.1 - a) / a };
        }
        out
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n1={} n2={} m={}", self.n1, self.n2, self.m)?;
        writeln!(
            f,
            "{:<18} {:>14} {:>14} {:>16} {:>9}",
            "stage", "measured", "exact", "approximate", "dev"
        )?;
        let rows = self
            .measured
            .stages()
            .into_iter()
            .zip(self.exact.stages())
            .zip(self.approximate.stages())
            .zip(self.deviations());
        for ((((name, meas), (_, ex)), (_, ap)), (_, dev)) in rows {
            writeln!(
                f,
                "{name:<18} {meas:>14.0} {ex:>14.0} {ap:>16.1} {:>8.2}%",
                dev * 100.0
            )?;
        }
        writeln!(f, "{:<18} {:>14}", "linear_events", self.linear_events)?;
        write!(f, "{:<18} {:>14}", "total_events", self.total_events)
    }
}

/// Runs one join of class `(n1, n2, m)` in count mode.
pub fn cost_report(n1: usize, n2: usize, m: usize) -> Result<CostReport, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let plan = plan_with_m(n1, n2, m, &mut rng)?;
    let (t1, t2) = realize(&plan, &mut rng);
    let mut sink = CountSink::new();
    oblivious_join(&t1, &t2, &mut sink);
    let staged: u64 = [
        Phase::InitialSort,
        Phase::DistributeSort,
        Phase::DistributeRoute,
        Phase::AlignSort,
    ]
    .into_iter()
    .map(|p| sink.events(p))
    .sum();
    Ok(CostReport {
        n1,
        n2,
        m,
        measured: CostBreakdown::from_counts(&sink),
        exact: CostBreakdown::exact(n1, n2, m),
        approximate: CostBreakdown::approximate(n1, n2, m),
        linear_events: sink.total() - staged,
        total_events: sink.total(),
    })
}
