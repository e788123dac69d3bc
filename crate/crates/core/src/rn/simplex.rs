//! Transportation simplex on the bipartite support graph.
//!
//! The basis is a spanning tree of `m + n − 1` cells of the `m × n` cost matrix,
//! seeded by the north-west corner rule. Each pivot prices the non-basic cells with
//! the tree potentials and pushes flow around the cycle the entering cell closes.
//! Entering and leaving cells follow Bland's smallest-index rule, so degenerate
//! pivots cannot cycle.

use super::{sq_dist, Coupling, CouplingSolver, MeasureRn, PlanEntry};
use crate::error::{Error, Result};
use crate::registry::Named;

/// Default bound on either side of the transportation problem.
pub const DEFAULT_SIZE_CAP: usize = 64;

#[derive(Clone, Copy, Debug)]
pub struct NetworkSimplex {
    pub size_cap: usize,
    pub max_pivots: usize,
}

impl Default for NetworkSimplex {
    fn default() -> Self {
        Self {
            size_cap: DEFAULT_SIZE_CAP,
            max_pivots: 1_000_000,
        }
    }
}

impl Named for NetworkSimplex {
    fn name(&self) -> &'static str {
        "simplex"
    }
}

impl CouplingSolver for NetworkSimplex {
    fn solve(&self, mu: &MeasureRn, nu: &MeasureRn) -> Result<Coupling> {
        if mu.dim() != nu.dim() {
            return Err(Error::DimensionMismatch(mu.dim(), nu.dim()));
        }
        let (m, n) = (mu.len(), nu.len());
        if m > self.size_cap || n > self.size_cap {
            return Err(Error::SizeCap {
                rows: m,
                cols: n,
                cap: self.size_cap,
            });
        }
        let cost: Vec<f64> = mu
            .points()
            .iter()
            .flat_map(|x| nu.points().iter().map(move |y| sq_dist(x, y)))
            .collect();
        let flow = Transport::new(mu.weights(), nu.weights(), cost).solve(self.max_pivots)?;
        let entries = flow
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > 1e-15)
            .map(|(idx, &mass)| PlanEntry {
                source: idx / n,
                target: idx % n,
                mass,
            })
            .collect();
        Coupling::new(mu.clone(), nu.clone(), entries)
    }
}

struct Transport {
    m: usize,
    n: usize,
    cost: Vec<f64>,
    flow: Vec<f64>,
    basic: Vec<bool>,
}

impl Transport {
    fn new(supply: &[f64], demand: &[f64], cost: Vec<f64>) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut flow = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        let mut a = supply.to_vec();
        let mut b = demand.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let q = a[i].min(b[j]);
            flow[i * n + j] = q;
            basic[i * n + j] = true;
            a[i] -= q;
            b[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self {
            m,
            n,
            cost,
            flow,
            basic,
        }
    }

    /// Node ids: rows `0..m`, columns `m..m+n`. Each adjacency item is `(node, cell)`.
    fn tree(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (cell, _) in self.basic.iter().enumerate().filter(|(_, &b)| b) {
            let (i, j) = (cell / self.n, cell % self.n);
            adj[i].push((self.m + j, cell));
            adj[self.m + j].push((i, cell));
        }
        adj
    }

    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let mut pot = vec![f64::NAN; self.m + self.n];
        pot[0] = 0.0;
        let mut stack = vec![0];
        while let Some(node) = stack.pop() {
            for &(next, cell) in &adj[node] {
                if pot[next].is_nan() {
                    // u_i + v_j = c_ij along basic cells
                    pot[next] = self.cost[cell] - pot[node];
                    stack.push(next);
                }
            }
        }
        let (u, v) = pot.split_at(self.m);
        (u.to_vec(), v.to_vec())
    }

    /// Basic cells on the tree path from row `i` to column `j`, in order from row `i`.
    fn path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let goal = self.m + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[i] = true;
        let mut queue = std::collections::VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            for &(next, cell) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, cell));
                    queue.push_back(next);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = goal;
        while let Some((prev, cell)) = parent[node] {
            cells.push(cell);
            node = prev;
        }
        cells.reverse();
        cells
    }

    fn solve(mut self, max_pivots: usize) -> Result<Vec<f64>> {
        let scale = self.cost.iter().fold(1f64, |acc, c| acc.max(c.abs()));
        let tol = 1e-12 * scale;
        for _ in 0..max_pivots {
            let adj = self.tree();
            let (u, v) = self.potentials(&adj);
            let entering = (0..self.m * self.n).find(|&cell| {
                !self.basic[cell] && self.cost[cell] - u[cell / self.n] - v[cell % self.n] < -tol
            });
            let Some(entering) = entering else {
                return Ok(self.flow);
            };
            let path = self.path(&adj, entering / self.n, entering % self.n);
            // cells at even positions of the path lose flow
            let theta = path
                .iter()
                .step_by(2)
                .map(|&c| self.flow[c])
                .fold(f64::INFINITY, f64::min);
            let leaving = path
                .iter()
                .step_by(2)
                .copied()
                .filter(|&c| self.flow[c] == theta)
                .min()
                .expect("non-empty cycle");
            for (pos, &cell) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    self.flow[cell] = (self.flow[cell] - theta).max(0.0);
                } else {
                    self.flow[cell] += theta;
                }
            }
            self.flow[entering] = theta;
            self.flow[leaving] = 0.0;
            self.basic[leaving] = false;
            self.basic[entering] = true;
        }
        Err(Error::InvalidArgument(format!(
            "transportation simplex did not converge in {max_pivots} pivots"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> MeasureRn {
        MeasureRn::uniform_on(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn northwest_corner_is_spanning() {
        let t = Transport::new(&[0.5, 0.5], &[0.25, 0.25, 0.5], vec![0.0; 6]);
        assert_eq!(t.basic.iter().filter(|&&b| b).count(), 4);
        let (u, v) = t.potentials(&t.tree());
        assert!(u.iter().chain(&v).all(|p| p.is_finite()));
    }

    #[test]
    fn reverses_crossed_start() {
        // the north-west start matches 0→3, 1→2 in reverse order
        let a = line(&[0.0, 1.0]);
        let b = MeasureRn::new(1, vec![vec![3.0], vec![2.0]], vec![0.5, 0.5]).unwrap();
        let plan = NetworkSimplex::default().solve(&a, &b).unwrap();
        assert!((plan.cost() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_sizes() {
        let a = line(&[0.0, 1.0, 2.0]);
        let b = MeasureRn::new(1, vec![vec![0.5], vec![1.5]], vec![0.5, 0.5]).unwrap();
        let plan = NetworkSimplex::default().solve(&a, &b).unwrap();
        // monotone plan: 1/3 of 0→.5, 1/6 of 1→.5, 1/6 of 1→1.5, 1/3 of 2→1.5
        let want = (0.25 / 3.0) + (0.25 / 6.0) * 2.0 + (0.25 / 3.0);
        assert!((plan.cost() - want).abs() < 1e-12);
        assert!(plan.entries().len() <= 4);
    }

    #[test]
    fn size_cap() {
        let xs: Vec<f64> = (0..5).map(f64::from).collect();
        let s = NetworkSimplex {
            size_cap: 4,
            ..Default::default()
        };
        assert!(matches!(
            s.solve(&line(&xs), &line(&xs)),
            Err(Error::SizeCap { rows: 5, .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let a = line(&[0.0]);
        let b = MeasureRn::dirac(vec![0.0, 0.0]);
        assert!(matches!(
            NetworkSimplex::default().solve(&a, &b),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }
}
