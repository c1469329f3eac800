//! Seeded generation of join inputs grouped into trace classes.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index::sample, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::model::Record;

/// Default exponent of the discrete Zipf law for group widths and heights.
pub const DEFAULT_ZIPF_EXPONENT: f64 = 1.5;

/// Group-structure family of a generated input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `min(n1, n2)` groups of dimensions 1×1.
    AllOneByOne,
    /// One left row matching every right row.
    SingleOneByN,
    /// Every left row matching one right row.
    SingleNByOne,
    /// Group widths and heights drawn from a truncated Zipf law.
    PowerLaw(f64),
    /// A large group, a few power-law groups and some 1×1 groups.
    Mixed,
    /// No matching join values.
    Disjoint,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::AllOneByOne => f.write_str("all-1x1"),
            Shape::SingleOneByN => f.write_str("single-1xn"),
            Shape::SingleNByOne => f.write_str("single-nx1"),
            Shape::PowerLaw(s) => write!(f, "power-law:{s}"),
            Shape::Mixed => f.write_str("mixed"),
            Shape::Disjoint => f.write_str("disjoint"),
        }
    }
}

impl FromStr for Shape {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "all-1x1" => Shape::AllOneByOne,
            "single-1xn" => Shape::SingleOneByN,
            "single-nx1" => Shape::SingleNByOne,
            "power-law" => Shape::PowerLaw(DEFAULT_ZIPF_EXPONENT),
            "mixed" => Shape::Mixed,
            "disjoint" => Shape::Disjoint,
            _ => match s.strip_prefix("power-law:").map(str::parse::<f64>) {
                Some(Ok(e)) if e > 0.0 => Shape::PowerLaw(e),
                _ => return Err(GenError::UnknownShape(s.to_owned())),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("shape {shape} is infeasible for n1 = {n1}, n2 = {n2}")]
    InfeasibleShape { shape: Shape, n1: usize, n2: usize },
    #[error("no group structure with n1 = {n1}, n2 = {n2} yields m = {m}")]
    InfeasibleSize { n1: usize, n2: usize, m: usize },
    #[error("unknown shape {0:?}")]
    UnknownShape(String),
}

/// Group dimensions of one input; rows not covered by a group are unmatched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPlan {
    pub n1: usize,
    pub n2: usize,
    pub groups: Vec<(usize, usize)>,
}

impl GroupPlan {
    pub fn m(&self) -> usize {
        self.groups.iter().map(|&(a, b)| a * b).sum()
    }

    fn is_valid(&self) -> bool {
        let (s1, s2) = self
            .groups
            .iter()
            .fold((0, 0), |(x, y), &(a, b)| (x + a, y + b));
        s1 <= self.n1 && s2 <= self.n2 && self.groups.iter().all(|&(a, b)| a > 0 && b > 0)
    }
}

/// One join input.
pub type Instance = (Vec<Record>, Vec<Record>);

/// Inputs sharing `(n1, n2, m)`, which must all produce the same trace.
#[derive(Debug, Clone)]
pub struct TestClass {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub instances: Vec<Instance>,
}

fn zipf(rng: &mut impl Rng, max: usize, exponent: f64) -> usize {
    if max <= 1 {
        return max;
    }
    let z = Zipf::new(max as u64, exponent).expect("valid zipf parameters");
    (z.sample(rng) as usize).clamp(1, max)
}

/// Natural group structure for `shape`.
pub fn plan_for_shape(n1: usize, n2: usize, shape: Shape, rng: &mut impl Rng) -> Result<GroupPlan, GenError> {
    let infeasible = || GenError::InfeasibleShape { shape, n1, n2 };
    let groups = match shape {
        Shape::AllOneByOne => vec![(1, 1); n1.min(n2)],
        Shape::SingleOneByN if n2 == 0 => vec![],
        Shape::SingleOneByN if n1 == 0 => return Err(infeasible()),
        Shape::SingleOneByN => vec![(1, n2)],
        Shape::SingleNByOne if n1 == 0 => vec![],
        Shape::SingleNByOne if n2 == 0 => return Err(infeasible()),
        Shape::SingleNByOne => vec![(n1, 1)],
        Shape::Disjoint => vec![],
        Shape::PowerLaw(exponent) => {
            let (mut r1, mut r2) = (n1, n2);
            let mut groups = Vec::new();
            while r1 > 0 && r2 > 0 {
                if rng.gen_bool(0.15) {
                    // leave a row unmatched
                    if rng.gen_bool(0.5) {
                        r1 -= 1;
                    } else {
                        r2 -= 1;
                    }
                    continue;
                }
                let a = zipf(rng, r1, exponent);
                let b = zipf(rng, r2, exponent);
                groups.push((a, b));
                r1 -= a;
                r2 -= b;
            }
            groups
        }
        Shape::Mixed => {
            let (mut r1, mut r2) = (n1, n2);
            let mut groups = Vec::new();
            if r1 > 0 && r2 > 0 {
                let a = rng.gen_range(1..=r1.div_ceil(3));
                let b = rng.gen_range(1..=r2.div_ceil(3));
                groups.push((a, b));
                r1 -= a;
                r2 -= b;
            }
            while r1 > 0 && r2 > 0 {
                let (a, b) = match rng.gen_range(0..3) {
                    0 => (1, 1),
                    1 => (zipf(rng, r1, DEFAULT_ZIPF_EXPONENT), zipf(rng, r2, DEFAULT_ZIPF_EXPONENT)),
                    _ => {
                        r1 -= 1;
                        continue;
                    }
                };
                groups.push((a, b));
                r1 -= a;
                r2 -= b;
            }
            groups
        }
    };
    Ok(GroupPlan { n1, n2, groups })
}

/// At most one group that yields exactly `m` rows from `r1` and `r2` spare rows.
fn finish(m: usize, r1: usize, r2: usize) -> Option<Option<(usize, usize)>> {
    if m == 0 {
        return Some(None);
    }
    if r1 >= 1 && r2 >= m {
        return Some(Some((1, m)));
    }
    if r2 >= 1 && r1 >= m {
        return Some(Some((m, 1)));
    }
    (1..=r1.min(m))
        .filter(|a| m % a == 0)
        .map(|a| (a, m / a))
        .find(|&(_, b)| b <= r2)
        .map(Some)
}

/// Structure family used when targeting a fixed `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    OneByOne,
    Wide,
    Tall,
    PowerLaw,
    Blend,
}

const FAMILIES: [Family; 5] = [
    Family::OneByOne,
    Family::Wide,
    Family::Tall,
    Family::PowerLaw,
    Family::Blend,
];

fn plan_with_m_family(
    n1: usize,
    n2: usize,
    m: usize,
    family: Family,
    rng: &mut impl Rng,
) -> Result<GroupPlan, GenError> {
    let (mut r1, mut r2, mut rest) = (n1, n2, m);
    let mut groups = Vec::new();
    let mut failures = 0;
    while rest > 0 && failures < 64 {
        let family = match family {
            Family::Blend => FAMILIES[rng.gen_range(0..4)],
            f => f,
        };
        let (a, b) = match family {
            Family::OneByOne => (1, 1),
            Family::Wide => (1, rng.gen_range(1..=rest.min(r2).max(1))),
            Family::Tall => (rng.gen_range(1..=rest.min(r1).max(1)), 1),
            _ => {
                let a = zipf(rng, r1.min(rest), DEFAULT_ZIPF_EXPONENT);
                let b = zipf(rng, r2.min(rest / a.max(1)), DEFAULT_ZIPF_EXPONENT);
                (a, b)
            }
        };
        let ok = a >= 1
            && b >= 1
            && a <= r1
            && b <= r2
            && a * b <= rest
            && finish(rest - a * b, r1 - a, r2 - b).is_some();
        if ok {
            groups.push((a, b));
            r1 -= a;
            r2 -= b;
            rest -= a * b;
        } else {
            failures += 1;
        }
    }
    let last = finish(rest, r1, r2).ok_or(GenError::InfeasibleSize { n1, n2, m })?;
    groups.extend(last);
    groups.shuffle(rng);
    let plan = GroupPlan { n1, n2, groups };
    debug_assert!(plan.is_valid() && plan.m() == m);
    Ok(plan)
}

/// A random group structure with exactly `m` output rows.
pub fn plan_with_m(n1: usize, n2: usize, m: usize, rng: &mut impl Rng) -> Result<GroupPlan, GenError> {
    let family = FAMILIES[rng.gen_range(0..FAMILIES.len())];
    plan_with_m_family(n1, n2, m, family, rng)
}

/// Materializes a plan: fresh random join values per group, unmatched rows
/// on keys private to their table, random data values (sometimes from a tiny
/// range so that duplicate rows occur), rows shuffled.
pub fn realize(plan: &GroupPlan, rng: &mut impl Rng) -> Instance {
    let used1: usize = plan.groups.iter().map(|g| g.0).sum();
    let used2: usize = plan.groups.iter().map(|g| g.1).sum();
    let (u1, u2) = (plan.n1 - used1, plan.n2 - used2);
    let nkeys = plan.groups.len() + u1 + u2;
    let key_space = if rng.gen_bool(0.5) { 4 * nkeys + 8 } else { 1 << 40 };
    let keys: Vec<u64> = sample(rng, key_space, nkeys)
        .iter()
        .map(|k| k as u64)
        .collect();
    let d_space: u64 = if rng.gen_bool(0.3) { 3 } else { u64::MAX };
    let d = |rng: &mut dyn rand::RngCore| rng.gen_range(0..d_space);

    let mut t1 = Vec::with_capacity(plan.n1);
    let mut t2 = Vec::with_capacity(plan.n2);
    for (&(a, b), &k) in plan.groups.iter().zip(&keys) {
        t1.extend((0..a).map(|_| Record::new(k, d(rng))));
        t2.extend((0..b).map(|_| Record::new(k, d(rng))));
    }
    let rest = &keys[plan.groups.len()..];
    t1.extend(rest[..u1].iter().map(|&k| Record::new(k, d(rng))));
    t2.extend(rest[u1..].iter().map(|&k| Record::new(k, d(rng))));
    t1.shuffle(rng);
    t2.shuffle(rng);
    (t1, t2)
}

/// Builds a class from `shape`'s natural structure; the remaining
/// `count - 1` instances use randomly chosen structures of the same
/// `(n1, n2, m)`.
pub fn gen_test_class(n1: usize, n2: usize, shape: Shape, seed: u64, count: usize) -> Result<TestClass, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = plan_for_shape(n1, n2, shape, &mut rng)?;
    let m = first.m();
    let mut instances = Vec::with_capacity(count);
    if count > 0 {
        instances.push(realize(&first, &mut rng));
    }
    for k in 1..count {
        // the natural plan witnesses feasibility when random search fails
        let plan = plan_with_m_family(n1, n2, m, FAMILIES[k % FAMILIES.len()], &mut rng).unwrap_or_else(|_| {
            let mut p = first.clone();
            p.groups.shuffle(&mut rng);
            p
        });
        instances.push(realize(&plan, &mut rng));
    }
    Ok(TestClass { n1, n2, m, instances })
}

/// Builds a class for an explicit `(n1, n2, m)`, cycling structure families.
pub fn gen_class_with_m(n1: usize, n2: usize, m: usize, seed: u64, count: usize) -> Result<TestClass, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..count)
        .map(|k| {
            plan_with_m_family(n1, n2, m, FAMILIES[k % FAMILIES.len()], &mut rng)
                .map(|p| realize(&p, &mut rng))
        })
        .collect::<Result<_, _>>()?;
    Ok(TestClass { n1, n2, m, instances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::nested_loop_join;

    fn check_class(tc: &TestClass) {
        for (t1, t2) in &tc.instances {
            assert_eq!((t1.len(), t2.len()), (tc.n1, tc.n2));
            assert_eq!(nested_loop_join(t1, t2).m(), tc.m);
        }
    }

    #[test]
    fn shape_examples() {
        let tc = gen_test_class(4, 4, Shape::AllOneByOne, 1, 5).unwrap();
        assert_eq!(tc.m, 4);
        check_class(&tc);
        let tc = gen_test_class(4, 4, Shape::SingleOneByN, 1, 5).unwrap();
        assert_eq!(tc.m, 4);
        check_class(&tc);
        let tc = gen_test_class(1, 1, Shape::Disjoint, 1, 3).unwrap();
        assert_eq!(tc.m, 0);
        check_class(&tc);
        assert!(matches!(
            gen_test_class(0, 3, Shape::SingleOneByN, 1, 2),
            Err(GenError::InfeasibleShape { .. })
        ));
    }

    #[test]
    fn every_shape_and_size_is_consistent() {
        let shapes = [
            Shape::AllOneByOne,
            Shape::SingleOneByN,
            Shape::SingleNByOne,
            Shape::PowerLaw(1.5),
            Shape::PowerLaw(2.5),
            Shape::Mixed,
            Shape::Disjoint,
        ];
        for (k, shape) in shapes.into_iter().enumerate() {
            for (n1, n2) in [(1, 1), (3, 7), (10, 10), (25, 9), (40, 60)] {
                let tc = gen_test_class(n1, n2, shape, k as u64, 12).unwrap();
                check_class(&tc);
            }
        }
    }

    #[test]
    fn explicit_m_classes() {
        for (n1, n2, m) in [(5, 5, 5), (5, 5, 25), (10, 3, 7), (8, 8, 0), (6, 6, 9)] {
            check_class(&gen_class_with_m(n1, n2, m, 3, 10).unwrap());
        }
        assert!(gen_class_with_m(2, 2, 5, 0, 1).is_err());
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = gen_test_class(20, 30, Shape::Mixed, 99, 4).unwrap();
        let b = gen_test_class(20, 30, Shape::Mixed, 99, 4).unwrap();
        assert_eq!(a.instances, b.instances);
    }

    #[test]
    fn shape_names_round_trip() {
        for s in ["all-1x1", "single-1xn", "single-nx1", "mixed", "disjoint", "power-law:2"] {
            assert_eq!(s.parse::<Shape>().unwrap().to_string(), s);
        }
        assert_eq!("power-law".parse::<Shape>().unwrap(), Shape::PowerLaw(1.5));
        assert!("power-law:-1".parse::<Shape>().is_err());
        assert!("square".parse::<Shape>().is_err());
    }
}
