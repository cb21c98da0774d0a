//! Optimal slot choice along a fixed cyclic circle order.

use super::{tie_eps, NodeGraph};

/// Chain dynamic program around the cycle. `fixed[c]` pins the slot of
/// circle `c`. Returns the optimal cyclic length and, when `want_slots`, the
/// per-circle slots attaining it.
fn chain(
    graph: &NodeGraph,
    order: &[usize],
    fixed: &[Option<usize>],
    want_slots: bool,
) -> (f64, Option<Vec<usize>>) {
    let n = order.len();
    let k = graph.k;
    let allowed = |c: usize, s: usize| fixed[c].is_none_or(|f| f == s);
    let first = order[0];

    let mut best = f64::INFINITY;
    let mut best_slots = None;
    // back[i][l]: best slot of order[i - 1] when order[i] uses slot l
    let mut back = vec![vec![0usize; k]; n];
    let mut cost = vec![f64::INFINITY; k];
    let mut next = vec![f64::INFINITY; k];

    for s0 in (0..k).filter(|&s| allowed(first, s)) {
        cost.fill(f64::INFINITY);
        cost[s0] = 0.0;
        for i in 1..n {
            let (prev_c, c) = (order[i - 1], order[i]);
            for (l, nx) in next.iter_mut().enumerate() {
                *nx = f64::INFINITY;
                if !allowed(c, l) {
                    continue;
                }
                for (lp, &cl) in cost.iter().enumerate() {
                    let v = cl + graph.slot_dist(prev_c, lp, c, l);
                    if v < *nx {
                        *nx = v;
                        back[i][l] = lp;
                    }
                }
            }
            std::mem::swap(&mut cost, &mut next);
        }
        let last = order[n - 1];
        let mut end = 0;
        let mut total = f64::INFINITY;
        for (l, &cl) in cost.iter().enumerate() {
            let v = cl + graph.slot_dist(last, l, first, s0);
            if v < total {
                total = v;
                end = l;
            }
        }
        if total < best {
            best = total;
            if want_slots {
                let mut slots = vec![0; graph.n];
                let mut l = end;
                for i in (1..n).rev() {
                    slots[order[i]] = l;
                    l = back[i][l];
                }
                slots[first] = s0;
                best_slots = Some(slots);
            }
        }
    }
    (best, best_slots)
}

/// Optimal slots for a fixed cyclic order in `O(N k^3)`; no tie-breaking guarantee.
pub fn optimal_slots(graph: &NodeGraph, order: &[usize]) -> (Vec<usize>, f64) {
    let fixed = vec![None; graph.n];
    let (len, slots) = chain(graph, order, &fixed, true);
    (slots.expect("at least one slot per circle"), len)
}

/// Optimal slots for a fixed cyclic order. Among optimal assignments (up to a
/// relative tie tolerance) returns the lexicographically smallest slot vector,
/// indexed by circle. The returned length is recomputed along `order`.
pub fn reoptimize_slots(graph: &NodeGraph, order: &[usize]) -> (Vec<usize>, f64) {
    let mut fixed = vec![None; graph.n];
    let (target, _) = chain(graph, order, &fixed, false);
    let limit = target + tie_eps(target);
    for c in 0..graph.n {
        let mut chosen = None;
        for s in 0..graph.k {
            fixed[c] = Some(s);
            if chain(graph, order, &fixed, false).0 <= limit {
                chosen = Some(s);
                break;
            }
        }
        // Rounding could in principle reject every slot; fall back to the plain argmin.
        if chosen.is_none() {
            return optimal_slots(graph, order);
        }
    }
    let slots: Vec<usize> = fixed.into_iter().map(|s| s.unwrap()).collect();
    let length = graph.tour_length(order, &slots);
    (slots, length)
}
