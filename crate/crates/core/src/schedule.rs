//! Finite level schedules below an ordinal bound, and the pairing function
//! used to dovetail enumerations.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::ordinal::Ordinal;

/// Levels needed below `bound`: closed under predecessors and under the
/// first `span` ladder entries of each limit.
pub fn level_schedule(bound: &Ordinal, span: usize) -> Result<BTreeSet<Ordinal>> {
    let mut out = BTreeSet::new();
    let mut todo = vec![bound.clone(), Ordinal::zero()];
    while let Some(a) = todo.pop() {
        if !out.insert(a.clone()) {
            continue;
        }
        if let Some(p) = a.predecessor() {
            todo.push(p);
        } else if a.is_limit() {
            for n in 0..span.max(1) {
                todo.push(a.ladder_element(n)?);
            }
        }
    }
    Ok(out)
}

/// The `n`-th pair of naturals in Cantor order.
pub fn cantor_unpair(n: u64) -> (u64, u64) {
    let mut w = ((((8 * n + 1) as f64).sqrt() - 1.0) / 2.0).floor() as u64;
    while w * (w + 1) / 2 > n {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= n {
        w += 1;
    }
    let y = n - w * (w + 1) / 2;
    (w - y, y)
}
