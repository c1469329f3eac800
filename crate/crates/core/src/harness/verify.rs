use crate::harness::gen::{Instance, TestClass};
use crate::join::oblivious_join;
use crate::trace::{Digest, HashSink};

/// Outcome of comparing trace digests within a class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass { digest: Digest },
    /// Instance `first` and instance `second` produced different digests.
    Fail { first: usize, second: usize },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Trace digest of one join run.
pub fn trace_digest((t1, t2): &Instance) -> Digest {
    let mut sink = HashSink::new();
    oblivious_join(t1, t2, &mut sink);
    sink.digest()
}

/// Runs every instance in hash mode; passes iff all digests are equal.
/// An empty class passes with the empty digest.
pub fn verify_trace_class(tc: &TestClass) -> Verdict {
    verify_instances(&tc.instances)
}

pub fn verify_instances(instances: &[Instance]) -> Verdict {
    let mut digests = instances.iter().map(trace_digest);
    let Some(first) = digests.next() else {
        return Verdict::Pass { digest: crate::trace::EMPTY_DIGEST };
    };
    for (k, d) in digests.enumerate() {
        if d != first {
            return Verdict::Fail { first: 0, second: k + 1 };
        }
    }
    Verdict::Pass { digest: first }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{gen_class_with_m, gen_test_class, Shape};

    #[test]
    fn same_class_passes() {
        let tc = gen_class_with_m(4, 4, 8, 1, 20).unwrap();
        assert!(verify_trace_class(&tc).passed());
    }

    #[test]
    fn mixed_classes_fail() {
        let mut a = gen_class_with_m(4, 4, 8, 1, 3).unwrap();
        let b = gen_class_with_m(4, 4, 7, 1, 1).unwrap();
        a.instances.extend(b.instances);
        assert_eq!(verify_trace_class(&a), Verdict::Fail { first: 0, second: 3 });
    }

    #[test]
    fn single_instance_passes() {
        let tc = gen_test_class(3, 5, Shape::Mixed, 4, 1).unwrap();
        assert!(verify_trace_class(&tc).passed());
    }
}
