//! Dense Hungarian algorithm (shortest augmenting paths with potentials).
//!
//! Costs may be `f64::INFINITY` to forbid a pairing.

/// Minimum-cost perfect assignment of rows to columns of a square matrix.
/// Returns `(row_to_col, cost)`, or `None` when every perfect assignment uses
/// a forbidden entry.
pub fn solve_assignment(cost: &[Vec<f64>]) -> Option<(Vec<usize>, f64)> {
    let n = cost.len();
    debug_assert!(cost.iter().all(|row| row.len() == n));
    let flat: Vec<f64> = cost.concat();
    let at = |i: usize, j: usize| flat[i * n + j];
    let state = AssignmentState::solve(at, n)?;
    let total = state.cost(at);
    Some((state.row_to_col(), total))
}

/// Optimal assignment together with its dual potentials, so that a problem
/// differing in one row can be re-solved with a single augmentation.
#[derive(Debug, Clone)]
pub(crate) struct AssignmentState {
    n: usize,
    // 1-based potentials and column owners; column 0 is the virtual start
    u: Vec<f64>,
    v: Vec<f64>,
    p: Vec<usize>,
}

impl AssignmentState {
    /// Solves the `n x n` problem with entries `cost(row, col)` from scratch.
    pub(crate) fn solve(cost: impl Fn(usize, usize) -> f64, n: usize) -> Option<Self> {
        let mut state = AssignmentState {
            n,
            u: vec![0.0; n + 1],
            v: vec![0.0; n + 1],
            p: vec![0; n + 1],
        };
        for i in 1..=n {
            if !state.augment(&cost, i) {
                return None;
            }
        }
        Some(state)
    }

    /// Re-solves after entries of the cost matrix were raised: rows whose
    /// current pairing became forbidden are freed and augmented again.
    pub(crate) fn repair(&self, cost: impl Fn(usize, usize) -> f64) -> Option<Self> {
        let mut next = self.clone();
        let mut freed = Vec::new();
        for j in 1..=next.n {
            let r = next.p[j];
            if cost(r - 1, j - 1).is_infinite() {
                next.p[j] = 0;
                freed.push(r);
            }
        }
        for r in freed {
            if !next.augment(&cost, r) {
                return None;
            }
        }
        Some(next)
    }

    /// One shortest augmenting path from 1-based row `i`.
    fn augment(&mut self, cost: &impl Fn(usize, usize) -> f64, i: usize) -> bool {
        let n = self.n;
        let (u, v, p) = (&mut self.u, &mut self.v, &mut self.p);
        let mut way = vec![0usize; n + 1];
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        p[0] = i;
        let mut j0 = 0usize;
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                p[0] = 0;
                return false;
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
        true
    }

    pub(crate) fn row_to_col(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for j in 1..=self.n {
            out[self.p[j] - 1] = j - 1;
        }
        out
    }

    pub(crate) fn cost(&self, cost: impl Fn(usize, usize) -> f64) -> f64 {
        (1..=self.n).map(|j| cost(self.p[j] - 1, j - 1)).sum()
    }
}
