//! Non-oblivious reference joins. These branch on data freely.

use crate::join::JoinOutput;
use crate::model::Record;

/// All `(d1, d2)` with matching join values, by double loop.
pub fn nested_loop_join(t1: &[Record], t2: &[Record]) -> JoinOutput {
    let mut rows = Vec::new();
    for a in t1 {
        for b in t2 {
            if a.j == b.j {
                rows.push((a.d, b.d));
            }
        }
    }
    JoinOutput { rows }
}

/// Textbook sort-merge join: sort both sides by `(j, d)`, then for each run
/// of equal `j` emit the product of the two runs.
pub fn sort_merge_join(t1: &[Record], t2: &[Record]) -> JoinOutput {
    let mut a = t1.to_vec();
    let mut b = t2.to_vec();
    a.sort_unstable();
    b.sort_unstable();

    let mut rows = Vec::new();
    let (mut i, mut k) = (0, 0);
    while i < a.len() && k < b.len() {
        match a[i].j.cmp(&b[k].j) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => k += 1,
            std::cmp::Ordering::Equal => {
                let j = a[i].j;
                let run_start = k;
                while i < a.len() && a[i].j == j {
                    // backtrack over the right run for every left row
                    k = run_start;
                    while k < b.len() && b[k].j == j {
                        rows.push((a[i].d, b[k].d));
                        k += 1;
                    }
                    i += 1;
                }
            }
        }
    }
    JoinOutput { rows }
}
