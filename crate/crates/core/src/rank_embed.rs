//! Isometric copies of the ordered cone `{x₁ ≤ … ≤ x_k}` inside the Wasserstein
//! space of the line.
//!
//! `(x₁, …, x_k) ↦ (1/k) Σ δ_{√k·xᵢ}` is an isometry for the Euclidean metric: the
//! quantile difference on each slot of mass `1/k` is `√k(xᵢ − yᵢ)`. Without the `√k`
//! the map only scales distances by `1/√k`.

use crate::error::{Error, Result};
use crate::measures::Measure1D;

fn check_sorted(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    match x.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(Error::UnsortedTuple(i + 1)),
        None => Ok(()),
    }
}

pub fn embed_sorted_tuple(x: &[f64]) -> Result<Measure1D> {
    check_sorted(x)?;
    let scale = (x.len() as f64).sqrt();
    Measure1D::empirical(&x.iter().map(|v| scale * v).collect::<Vec<_>>())
}

/// The same map without the `√k` factor; distances come out divided by `√k`.
pub fn embed_sorted_tuple_unscaled(x: &[f64]) -> Result<Measure1D> {
    check_sorted(x)?;
    Measure1D::empirical(x)
}

/// Vertices of a planar equilateral triangle of side `side`, placed in the interior
/// of the sorted cone of ℝᵏ.
pub fn flat_triangle_tuples(k: usize, side: f64) -> Result<[Vec<f64>; 3]> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "flat triangles need k >= 2, got {k}"
        )));
    }
    if !(side >= 0.0) || !side.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "side must be finite and non-negative, got {side}"
        )));
    }
    // gaps of 2·side + 1 between coordinates absorb offsets of size at most side
    let gap = 2.0 * side + 1.0;
    let base: Vec<f64> = (0..k).map(|i| i as f64 * gap).collect();
    let offsets = [
        (0.0, 0.0),
        (side, 0.0),
        (0.5 * side, 0.5 * 3f64.sqrt() * side),
    ];
    Ok(offsets.map(|(a, b)| {
        let mut v = base.clone();
        v[0] += a;
        v[1] += b;
        v
    }))
}

/// Three measures at pairwise distance `side`.
pub fn flat_triangle(k: usize, side: f64) -> Result<[Measure1D; 3]> {
    let [a, b, c] = flat_triangle_tuples(k, side)?;
    Ok([
        embed_sorted_tuple(&a)?,
        embed_sorted_tuple(&b)?,
        embed_sorted_tuple(&c)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport1d::wasserstein2;

    #[test]
    fn k1_is_the_dirac_embedding() {
        let a = embed_sorted_tuple(&[2.0]).unwrap();
        assert_eq!(a, Measure1D::dirac(2.0));
        assert_eq!(wasserstein2(&a, &embed_sorted_tuple(&[-1.0]).unwrap()), 3.0);
    }

    #[test]
    fn k2_example() {
        let a = embed_sorted_tuple(&[0.0, 1.0]).unwrap();
        let b = embed_sorted_tuple(&[1.0, 2.0]).unwrap();
        assert!((wasserstein2(&a, &b) - 2f64.sqrt()).abs() < 1e-15);
        let ua = embed_sorted_tuple_unscaled(&[0.0, 1.0]).unwrap();
        let ub = embed_sorted_tuple_unscaled(&[1.0, 2.0]).unwrap();
        assert!((wasserstein2(&ua, &ub) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unsorted_rejected() {
        assert!(matches!(
            embed_sorted_tuple(&[0.0, 2.0, 1.0]),
            Err(Error::UnsortedTuple(2))
        ));
        assert!(embed_sorted_tuple(&[]).is_err());
    }

    #[test]
    fn triangles() {
        let [a, b, c] = flat_triangle(2, 1.0).unwrap();
        for d in [
            wasserstein2(&a, &b),
            wasserstein2(&b, &c),
            wasserstein2(&a, &c),
        ] {
            assert!((d - 1.0).abs() < 1e-12);
        }
        let [a, b, c] = flat_triangle(3, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert!(flat_triangle(1, 1.0).is_err());
    }
}
