//! Certificates about couplings: monotonicity, translations, extendability, and the
//! closed forms for a few special pairs of measures.

use serde::Serialize;

use super::{dot, sq_dist, sub, Coupling, MeasureRn};
use crate::error::{Error, Result};

/// Two support pairs `(x₀, x₁)`, `(y₀, y₁)` with `(y₀ − x₀)·(y₁ − x₁) < 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub first: (Vec<f64>, Vec<f64>),
    pub second: (Vec<f64>, Vec<f64>),
    pub product: f64,
}

/// Scans every pair of support pairs; `None` means the plan is monotone within `1e-9`.
pub fn cyclical_monotonicity_check(plan: &Coupling) -> Option<MonotonicityViolation> {
    let pairs: Vec<(&[f64], &[f64])> = plan.support_pairs().collect();
    for (a, &(x0, x1)) in pairs.iter().enumerate() {
        for &(y0, y1) in &pairs[a + 1..] {
            let product = dot(&sub(y0, x0), &sub(y1, x1));
            if product < -1e-9 {
                return Some(MonotonicityViolation {
                    first: (x0.to_vec(), x1.to_vec()),
                    second: (y0.to_vec(), y1.to_vec()),
                    product,
                });
            }
        }
    }
    None
}

/// The common displacement `u` if every support pair satisfies `x₁ − x₀ = u`.
pub fn is_translation_coupling(plan: &Coupling) -> Option<Vec<f64>> {
    let mut pairs = plan.support_pairs();
    let (x0, x1) = pairs.next()?;
    let u = sub(x1, x0);
    let scale = 1f64.max(dot(&u, &u).sqrt());
    pairs
        .all(|(y0, y1)| sq_dist(&sub(y1, y0), &u).sqrt() <= 1e-9 * scale)
        .then_some(u)
}

/// Times `r < s` at which the restricted plan would violate monotonicity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicWitness {
    pub r: f64,
    pub s: f64,
    /// Value of `|u|² + (r + s)u·v + rs|v|²` at the witness; negative.
    pub value: f64,
    pub first: (Vec<f64>, Vec<f64>),
    pub second: (Vec<f64>, Vec<f64>),
}

/// For each pair of support pairs, with `u = y₀ − x₀` and `v = (y₁ − x₁) − u`,
/// looks for `r < s` making `|u|² + (r + s)u·v + rs|v|²` negative. Such times exist
/// iff `v ≠ 0`; `None` means every pair moves by the same vector.
pub fn geodesic_inequality_witness(plan: &Coupling) -> Option<GeodesicWitness> {
    let pairs: Vec<(&[f64], &[f64])> = plan.support_pairs().collect();
    for (i, &(x0, x1)) in pairs.iter().enumerate() {
        for &(y0, y1) in &pairs[i + 1..] {
            let u = sub(y0, x0);
            let v = sub(&sub(y1, x1), &u);
            let (a, b, c) = (dot(&v, &v), dot(&u, &v), dot(&u, &u));
            if a.sqrt() <= 1e-9 * 1f64.max(c.sqrt()) {
                continue;
            }
            // r, s = −b/a ∓ h gives c − b²/a − a·h², negative once h² > (c − b²/a)/a
            let gap = (c - b * b / a).max(0.0);
            let h = (2.0 * (gap / a).sqrt()).max(1.0);
            let center = -b / a;
            let (r, s) = (center - h, center + h);
            let value = c + (r + s) * b + r * s * a;
            return Some(GeodesicWitness {
                r,
                s,
                value,
                first: (x0.to_vec(), x1.to_vec()),
                second: (y0.to_vec(), y1.to_vec()),
            });
        }
    }
    None
}

/// Cost of the product coupling: `|g − h|² + σ² + ρ²`.
pub fn independent_coupling_cost(mu: &MeasureRn, nu: &MeasureRn) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch(mu.dim(), nu.dim()));
    }
    Ok(sq_dist(&mu.barycenter(), &nu.barycenter())
        + mu.deviation().powi(2)
        + nu.deviation().powi(2))
}

/// Image of `μ` under the dilation of center `x` and ratio `λ`.
pub fn dilate(mu: &MeasureRn, center: &[f64], lambda: f64) -> Result<MeasureRn> {
    if center.len() != mu.dim() {
        return Err(Error::DimensionMismatch(mu.dim(), center.len()));
    }
    mu.map_points(|p| {
        p.iter()
            .zip(center)
            .map(|(pi, ci)| ci + lambda * (pi - ci))
            .collect()
    })
}

pub fn translate(mu: &MeasureRn, v: &[f64]) -> Result<MeasureRn> {
    if v.len() != mu.dim() {
        return Err(Error::DimensionMismatch(mu.dim(), v.len()));
    }
    mu.map_points(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
}

/// `d_W(μ, D_x^λ μ) = |1 − λ|·d_W(μ, δₓ)`.
pub fn dilation_distance(mu: &MeasureRn, center: &[f64], lambda: f64) -> Result<f64> {
    if center.len() != mu.dim() {
        return Err(Error::DimensionMismatch(mu.dim(), center.len()));
    }
    Ok((1.0 - lambda).abs() * mu.distance_to_point(center))
}

/// `μ ↦ φ#(μ − g) + g` for a linear isometry `φ` given as a row-major orthogonal
/// matrix, with `g` the barycenter of `μ`.
pub fn rotate_about_barycenter(mu: &MeasureRn, matrix: &[Vec<f64>]) -> Result<MeasureRn> {
    let n = mu.dim();
    if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(n, matrix.len()));
    }
    for i in 0..n {
        for j in 0..n {
            let gram: f64 = (0..n).map(|k| matrix[k][i] * matrix[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (gram - want).abs() > 1e-9 {
                return Err(Error::InvalidArgument("matrix is not orthogonal".into()));
            }
        }
    }
    let g = mu.barycenter();
    mu.map_points(|p| {
        let d = sub(p, &g);
        matrix
            .iter()
            .zip(&g)
            .map(|(row, gi)| gi + dot(row, &d))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rn::discrete_ot;

    fn pair(a: [f64; 2], b: [f64; 2]) -> MeasureRn {
        MeasureRn::uniform_on(vec![a.to_vec(), b.to_vec()]).unwrap()
    }

    #[test]
    fn crossed_matching_is_caught() {
        let mu = pair([0.0, 0.0], [1.0, 0.0]);
        let nu = pair([0.0, 1.0], [1.0, 1.0]);
        let straight = Coupling::from_map(mu.clone(), nu.clone(), &[0, 1]).unwrap();
        assert!(cyclical_monotonicity_check(&straight).is_none());
        let crossed = Coupling::from_map(mu, nu, &[1, 0]).unwrap();
        let w = cyclical_monotonicity_check(&crossed).unwrap();
        assert!((w.product + 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_entry_passes() {
        let a = MeasureRn::dirac(vec![0.0, 0.0]);
        let b = MeasureRn::dirac(vec![3.0, 4.0]);
        let plan = Coupling::from_map(a, b, &[0]).unwrap();
        assert!(cyclical_monotonicity_check(&plan).is_none());
        assert_eq!(is_translation_coupling(&plan), Some(vec![3.0, 4.0]));
        assert!(geodesic_inequality_witness(&plan).is_none());
    }

    #[test]
    fn translation_detected() {
        let mu = pair([0.0, 0.0], [1.0, 2.0]);
        let nu = translate(&mu, &[0.5, -1.0]).unwrap();
        let (plan, cost) = discrete_ot(&mu, &nu).unwrap();
        assert_eq!(is_translation_coupling(&plan), Some(vec![0.5, -1.0]));
        assert!((cost - 1.25).abs() < 1e-12);
        assert!(geodesic_inequality_witness(&plan).is_none());
    }

    #[test]
    fn dilation_has_witness() {
        let mu = pair([-1.0, 0.0], [1.0, 0.0]);
        let nu = dilate(&mu, &[0.0, 0.0], 2.0).unwrap();
        let (plan, cost) = discrete_ot(&mu, &nu).unwrap();
        assert!((cost - 1.0).abs() < 1e-12);
        assert!(is_translation_coupling(&plan).is_none());
        let w = geodesic_inequality_witness(&plan).unwrap();
        assert!(w.r < w.s && w.value < 0.0);
        assert_eq!((w.r, w.s), (-2.0, 0.0));
    }

    #[test]
    fn witness_skips_parallel_pairs() {
        // pairs 0,1 translate together; pair 2 moves differently
        let mu =
            MeasureRn::uniform_on(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![5.0, 0.0]]).unwrap();
        let nu =
            MeasureRn::uniform_on(vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![5.0, 3.0]]).unwrap();
        let plan = Coupling::from_map(mu, nu, &[0, 1, 2]).unwrap();
        let w = geodesic_inequality_witness(&plan).unwrap();
        assert_eq!(w.first.0, vec![0.0, 0.0]);
        assert_eq!(w.second.0, vec![5.0, 0.0]);
        assert!(w.value < 0.0);
    }

    #[test]
    fn dilation_closed_form() {
        let mu = pair([-1.0, 0.0], [1.0, 0.0]);
        assert_eq!(dilation_distance(&mu, &[0.0, 0.0], 1.0).unwrap(), 0.0);
        assert_eq!(dilation_distance(&mu, &[0.0, 0.0], 0.0).unwrap(), 1.0);
        assert_eq!(dilation_distance(&mu, &[0.0, 0.0], 2.0).unwrap(), 1.0);
        assert_eq!(dilation_distance(&mu, &[0.0, 0.0], -1.0).unwrap(), 2.0);
    }

    #[test]
    fn independent_cost_bounds() {
        let mu = pair([-1.0, 0.0], [1.0, 0.0]);
        assert_eq!(independent_coupling_cost(&mu, &mu).unwrap(), 2.0);
        let nu = pair([0.0, -1.0], [0.0, 1.0]);
        let (_, cost) = discrete_ot(&mu, &nu).unwrap();
        assert!((independent_coupling_cost(&mu, &nu).unwrap() - cost).abs() < 1e-12);
    }

    #[test]
    fn rotation_checks_orthogonality() {
        let mu = pair([0.0, 0.0], [1.0, 0.0]);
        assert!(rotate_about_barycenter(&mu, &[vec![1.0, 1.0], vec![0.0, 1.0]]).is_err());
        let quarter = vec![vec![0.0, -1.0], vec![1.0, 0.0]];
        let r = rotate_about_barycenter(&mu, &quarter).unwrap();
        assert!(r.approx_eq(&pair([0.5, -0.5], [0.5, 0.5]), 1e-15));
    }
}
