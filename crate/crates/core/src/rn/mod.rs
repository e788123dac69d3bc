//! Discrete quadratic optimal transport between atomic measures in ℝⁿ.

mod certify;
mod simplex;
mod solvers;

pub use certify::{
    cyclical_monotonicity_check, dilate, dilation_distance, geodesic_inequality_witness,
    independent_coupling_cost, is_translation_coupling, rotate_about_barycenter, translate,
    GeodesicWitness, MonotonicityViolation,
};
pub use simplex::{NetworkSimplex, DEFAULT_SIZE_CAP};
pub use solvers::{solvers, AssignmentEnumeration, CouplingSolver, MonotoneLine};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{close, Measure1D, CANON_TOL};

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Finitely atomic probability measure in ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureRn {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl MeasureRn {
    /// Canonical measure: points sorted lexicographically, coincident points merged.
    pub fn new(dim: usize, points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(dim, p.len()));
            }
            if let Some(&bad) = p.iter().find(|c| !c.is_finite()) {
                return Err(Error::NonFinite(bad));
            }
        }
        if let Some(&bad) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::NonPositiveWeight(bad));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > CANON_TOL {
            return Err(Error::MassNotNormalized(total));
        }
        let mut pairs: Vec<(Vec<f64>, f64)> = points.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut merged: Vec<(Vec<f64>, f64)> = Vec::with_capacity(pairs.len());
        for (p, w) in pairs {
            match merged.last_mut() {
                Some((q, v)) if q.iter().zip(&p).all(|(a, b)| close(*a, *b, CANON_TOL)) => *v += w,
                _ => merged.push((p, w)),
            }
        }
        let (points, weights) = merged.into_iter().unzip();
        Ok(Self {
            dim,
            points,
            weights,
        })
    }

    pub fn dirac(point: Vec<f64>) -> Self {
        Self {
            dim: point.len(),
            points: vec![point],
            weights: vec![1.0],
        }
    }

    /// Equal weights on the given points.
    pub fn uniform_on(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::EmptyMeasure)?;
        let n = points.len();
        let mut weights = vec![1.0 / n as f64; n];
        let drift = 1.0 - weights.iter().sum::<f64>();
        weights[n - 1] += drift;
        Self::new(dim, points, weights)
    }

    /// Embeds a finitely atomic measure on the line along the unit vector `dir`.
    pub fn from_line(mu: &Measure1D, origin: &[f64], dir: &[f64]) -> Result<Self> {
        if !mu.is_atomic() {
            return Err(Error::NonAtomic);
        }
        if origin.len() != dir.len() {
            return Err(Error::DimensionMismatch(origin.len(), dir.len()));
        }
        let points = mu
            .atoms()
            .iter()
            .map(|a| origin.iter().zip(dir).map(|(o, d)| o + a.x * d).collect())
            .collect();
        Self::new(
            origin.len(),
            points,
            mu.atoms().iter().map(|a| a.w).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (gi, pi) in g.iter_mut().zip(p) {
                *gi += w * pi;
            }
        }
        g
    }

    /// Distance to the Dirac mass at `x`.
    pub fn distance_to_point(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * sq_dist(p, x))
            .sum::<f64>()
            .sqrt()
    }

    pub fn deviation(&self) -> f64 {
        self.distance_to_point(&self.barycenter())
    }

    /// Image under an arbitrary point map.
    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let points: Vec<Vec<f64>> = self.points.iter().map(|p| f(p)).collect();
        let dim = points[0].len();
        Self::new(dim, points, self.weights.clone())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(p, q)| p.iter().zip(q).all(|(a, b)| close(*a, *b, tol)))
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureRnJson {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Serialize for MeasureRn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRnJson {
            dim: self.dim,
            points: self.points.clone(),
            weights: self.weights.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasureRn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasureRnJson::deserialize(d)?;
        MeasureRn::new(raw.dim, raw.points, raw.weights).map_err(serde::de::Error::custom)
    }
}

impl MeasureRn {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }
}

/// One support pair of a transport plan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

/// A transport plan between two atomic measures, stored on its support.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    source: MeasureRn,
    target: MeasureRn,
    entries: Vec<PlanEntry>,
}

/// Marginal tolerance for couplings.
pub const MARGINAL_TOL: f64 = 1e-10;

impl Coupling {
    /// Validates marginals and positivity.
    pub fn new(source: MeasureRn, target: MeasureRn, entries: Vec<PlanEntry>) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch(source.dim(), target.dim()));
        }
        let mut rows = vec![0.0; source.len()];
        let mut cols = vec![0.0; target.len()];
        for e in &entries {
            if e.source >= source.len() || e.target >= target.len() || !(e.mass > 0.0) {
                return Err(Error::InvalidCoupling);
            }
            rows[e.source] += e.mass;
            cols[e.target] += e.mass;
        }
        let ok = rows
            .iter()
            .zip(source.weights())
            .all(|(r, w)| (r - w).abs() <= MARGINAL_TOL)
            && cols
                .iter()
                .zip(target.weights())
                .all(|(c, w)| (c - w).abs() <= MARGINAL_TOL);
        if !ok {
            return Err(Error::InvalidCoupling);
        }
        Ok(Self {
            source,
            target,
            entries,
        })
    }

    /// Deterministic plan sending `source[i]` to `target[map[i]]`.
    pub fn from_map(source: MeasureRn, target: MeasureRn, map: &[usize]) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::InvalidCoupling);
        }
        let entries = map
            .iter()
            .enumerate()
            .map(|(i, &j)| PlanEntry {
                source: i,
                target: j,
                mass: source.weights()[i],
            })
            .collect();
        Self::new(source, target, entries)
    }

    /// Product coupling `μ ⊗ ν`.
    pub fn independent(source: MeasureRn, target: MeasureRn) -> Result<Self> {
        let mut entries = Vec::with_capacity(source.len() * target.len());
        for (i, wi) in source.weights().iter().enumerate() {
            for (j, wj) in target.weights().iter().enumerate() {
                entries.push(PlanEntry {
                    source: i,
                    target: j,
                    mass: wi * wj,
                });
            }
        }
        Self::new(source, target, entries)
    }

    pub fn source(&self) -> &MeasureRn {
        &self.source
    }

    pub fn target(&self) -> &MeasureRn {
        &self.target
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    /// `(x, y)` coordinates of each support pair.
    pub fn support_pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> + '_ {
        self.entries.iter().map(|e| {
            (
                self.source.points()[e.source].as_slice(),
                self.target.points()[e.target].as_slice(),
            )
        })
    }

    pub fn cost(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                e.mass
                    * sq_dist(
                        &self.source.points()[e.source],
                        &self.target.points()[e.target],
                    )
            })
            .sum()
    }

    /// Law of `(1 − t)X + tY` for `(X, Y)` distributed by the plan.
    pub fn interpolate(&self, t: f64) -> MeasureRn {
        let points = self
            .support_pairs()
            .map(|(x, y)| {
                x.iter()
                    .zip(y)
                    .map(|(a, b)| (1.0 - t) * a + t * b)
                    .collect()
            })
            .collect();
        let weights: Vec<f64> = self.entries.iter().map(|e| e.mass).collect();
        let total: f64 = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / total).collect();
        MeasureRn::new(self.source.dim(), points, weights).expect("interpolation of a valid plan")
    }
}

/// Serializable form of a solved plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub cost: f64,
    pub entries: Vec<(usize, usize, f64)>,
}

impl From<&Coupling> for PlanReport {
    fn from(c: &Coupling) -> Self {
        Self {
            cost: c.cost(),
            entries: c
                .entries()
                .iter()
                .map(|e| (e.source, e.target, e.mass))
                .collect(),
        }
    }
}

/// Optimal plan and its cost, by the default exact solver.
pub fn discrete_ot(mu: &MeasureRn, nu: &MeasureRn) -> Result<(Coupling, f64)> {
    let plan = NetworkSimplex::default().solve(mu, nu)?;
    let cost = plan.cost();
    Ok((plan, cost))
}

/// `d_W(μ, ν)` by the default exact solver.
pub fn wasserstein2_rn(mu: &MeasureRn, nu: &MeasureRn) -> Result<f64> {
    Ok(discrete_ot(mu, nu)?.1.max(0.0).sqrt())
}
