//! Interchangeable exact solvers for the discrete transport problem.

use super::{dot, sq_dist, sub, Coupling, MeasureRn, NetworkSimplex, PlanEntry};
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub trait CouplingSolver: Named + Send + Sync {
    /// An optimal plan between `mu` and `nu` for the squared Euclidean cost.
    fn solve(&self, mu: &MeasureRn, nu: &MeasureRn) -> Result<Coupling>;
}

/// All solvers, keyed by name: `assignment`, `line`, `simplex`.
pub fn solvers() -> Registry<dyn CouplingSolver> {
    let mut r: Registry<dyn CouplingSolver> = Registry::new();
    r.register(Box::new(NetworkSimplex::default()))
        .register(Box::new(AssignmentEnumeration::default()))
        .register(Box::new(MonotoneLine));
    r
}

/// Brute force over all permutations; equal-size, equal-weight inputs only.
#[derive(Clone, Copy, Debug)]
pub struct AssignmentEnumeration {
    pub max_size: usize,
}

impl Default for AssignmentEnumeration {
    fn default() -> Self {
        Self { max_size: 8 }
    }
}

impl Named for AssignmentEnumeration {
    fn name(&self) -> &'static str {
        "assignment"
    }
}

fn equal_weights(m: &MeasureRn) -> bool {
    let w = 1.0 / m.len() as f64;
    m.weights().iter().all(|x| (x - w).abs() <= 1e-12)
}

impl CouplingSolver for AssignmentEnumeration {
    fn solve(&self, mu: &MeasureRn, nu: &MeasureRn) -> Result<Coupling> {
        if mu.dim() != nu.dim() {
            return Err(Error::DimensionMismatch(mu.dim(), nu.dim()));
        }
        let n = mu.len();
        if nu.len() != n || !equal_weights(mu) || !equal_weights(nu) {
            return Err(Error::Unsupported {
                solver: "assignment",
                reason: "needs equal sizes and equal weights".into(),
            });
        }
        if n > self.max_size {
            return Err(Error::SizeCap {
                rows: n,
                cols: n,
                cap: self.max_size,
            });
        }
        let cost: Vec<Vec<f64>> = mu
            .points()
            .iter()
            .map(|x| nu.points().iter().map(|y| sq_dist(x, y)).collect())
            .collect();
        let total = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>();

        // Heap's algorithm
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = perm.clone();
        let mut best_cost = total(&perm);
        let mut c = vec![0; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                let cur = total(&perm);
                if cur < best_cost {
                    best_cost = cur;
                    best.clone_from(&perm);
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        Coupling::from_map(mu.clone(), nu.clone(), &best)
    }
}

/// Monotone rearrangement for measures supported on one common line.
#[derive(Clone, Copy, Debug, Default)]
pub struct MonotoneLine;

impl Named for MonotoneLine {
    fn name(&self) -> &'static str {
        "line"
    }
}

impl CouplingSolver for MonotoneLine {
    fn solve(&self, mu: &MeasureRn, nu: &MeasureRn) -> Result<Coupling> {
        if mu.dim() != nu.dim() {
            return Err(Error::DimensionMismatch(mu.dim(), nu.dim()));
        }
        let all: Vec<&Vec<f64>> = mu.points().iter().chain(nu.points()).collect();
        let origin = all[0].clone();
        let far = all
            .iter()
            .map(|p| sub(p, &origin))
            .max_by(|a, b| dot(a, a).total_cmp(&dot(b, b)))
            .unwrap();
        let len = dot(&far, &far).sqrt();
        let dir: Vec<f64> = if len > 0.0 {
            far.iter().map(|c| c / len).collect()
        } else {
            far
        };
        let scale = 1f64.max(len);
        let coord = |p: &[f64]| -> Result<f64> {
            let d = sub(p, &origin);
            let s = dot(&d, &dir);
            let off: f64 = d
                .iter()
                .zip(&dir)
                .map(|(a, b)| (a - s * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if off > 1e-9 * scale {
                return Err(Error::Unsupported {
                    solver: "line",
                    reason: "supports are not collinear".into(),
                });
            }
            Ok(s)
        };
        let order = |m: &MeasureRn| -> Result<Vec<(f64, usize)>> {
            let mut v = m
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| Ok((coord(p)?, i)))
                .collect::<Result<Vec<_>>>()?;
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok(v)
        };
        let (xs, ys) = (order(mu)?, order(nu)?);
        let mut a: Vec<f64> = xs.iter().map(|&(_, i)| mu.weights()[i]).collect();
        let mut b: Vec<f64> = ys.iter().map(|&(_, j)| nu.weights()[j]).collect();
        let mut entries = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let q = a[i].min(b[j]);
            if q > 1e-15 {
                entries.push(PlanEntry {
                    source: xs[i].1,
                    target: ys[j].1,
                    mass: q,
                });
            }
            a[i] -= q;
            b[j] -= q;
            if i + 1 < a.len() && (a[i] <= b[j] || j + 1 == b.len()) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Coupling::new(mu.clone(), nu.clone(), entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(xs: &[[f64; 2]]) -> MeasureRn {
        MeasureRn::uniform_on(xs.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn registry_names() {
        assert_eq!(solvers().names(), vec!["assignment", "line", "simplex"]);
    }

    #[test]
    fn solvers_agree_on_collinear_equal_weights() {
        let a = pts(&[[0.0, 0.0], [1.0, 1.0], [3.0, 3.0]]);
        let b = pts(&[[-1.0, -1.0], [2.0, 2.0], [5.0, 5.0]]);
        let costs: Vec<f64> = solvers()
            .iter()
            .map(|s| s.solve(&a, &b).unwrap().cost())
            .collect();
        for c in &costs {
            assert!((c - costs[0]).abs() < 1e-12, "{costs:?}");
        }
    }

    #[test]
    fn assignment_rejects_unequal() {
        let a = pts(&[[0.0, 0.0], [1.0, 0.0]]);
        let b = pts(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert!(matches!(
            AssignmentEnumeration::default().solve(&a, &b),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn line_rejects_planar() {
        let a = pts(&[[0.0, 0.0], [1.0, 0.0]]);
        let b = pts(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(matches!(
            MonotoneLine.solve(&a, &b),
            Err(Error::Unsupported { .. })
        ));
    }
}
