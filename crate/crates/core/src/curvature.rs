//! Comparison-triangle diagnostics.
//!
//! For a triangle `x, y, z` and the point `γ(t)` of a geodesic from `x` to `z`, the
//! defect is `d²(y, γ(t)) − [(1 − t)d²(y, x) + t·d²(y, z) − t(1 − t)d²(x, z)]`. It is
//! zero in a flat space, non-positive in a CAT(0) space, and a positive value is a
//! witness of non-CAT(0) behaviour.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::Measure1D;
use crate::rn::{discrete_ot, wasserstein2_rn, Coupling, MeasureRn};
use crate::transport1d::{geodesic, wasserstein2_squared};

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t = {t} is outside [0, 1]")))
    }
}

fn defect(d2_y_gamma: f64, d2_yx: f64, d2_yz: f64, d2_xz: f64, t: f64) -> f64 {
    d2_y_gamma - ((1.0 - t) * d2_yx + t * d2_yz - t * (1.0 - t) * d2_xz)
}

/// Defect on the line, along the unique geodesic from `x` to `z`.
pub fn comparison_defect(x: &Measure1D, y: &Measure1D, z: &Measure1D, t: f64) -> Result<f64> {
    check_t(t)?;
    let gamma_t = geodesic(x, z).eval(t)?;
    Ok(defect(
        wasserstein2_squared(y, &gamma_t),
        wasserstein2_squared(y, x),
        wasserstein2_squared(y, z),
        wasserstein2_squared(x, z),
        t,
    ))
}

/// Defect in ℝⁿ along the displacement curve of `plan` (from its source `x` to its
/// target `z`); geodesics are plan-dependent there. The length term uses the plan's
/// cost, which is `d²(x, z)` when the plan is optimal.
pub fn comparison_defect_rn(y: &MeasureRn, plan: &Coupling, t: f64) -> Result<f64> {
    check_t(t)?;
    let gamma_t = plan.interpolate(t);
    Ok(defect(
        discrete_ot(y, &gamma_t)?.1,
        discrete_ot(y, plan.source())?.1,
        discrete_ot(y, plan.target())?.1,
        plan.cost(),
        t,
    ))
}

/// Two distinct geodesics with the same endpoints.
#[derive(Clone, Debug, Serialize)]
pub struct BranchingWitness {
    pub x: MeasureRn,
    pub z: MeasureRn,
    #[serde(skip)]
    pub plan_a: Coupling,
    #[serde(skip)]
    pub plan_b: Coupling,
    pub cost_a: f64,
    pub cost_b: f64,
    pub optimal_cost: f64,
    pub midpoint_a: MeasureRn,
    pub midpoint_b: MeasureRn,
    pub midpoint_gap: f64,
    /// Defect of the triangle `x, midpoint_a, z` measured along plan B at `t = ½`.
    pub defect: f64,
}

/// Balanced two-point measures on the two coordinate axes of ℝ²: any coupling is
/// optimal, and the two deterministic ones give different midpoints.
pub fn branching_witness() -> Result<BranchingWitness> {
    let x = MeasureRn::uniform_on(vec![vec![-1.0, 0.0], vec![1.0, 0.0]])?;
    let z = MeasureRn::uniform_on(vec![vec![0.0, -1.0], vec![0.0, 1.0]])?;
    let plan_a = Coupling::from_map(x.clone(), z.clone(), &[0, 1])?;
    let plan_b = Coupling::from_map(x.clone(), z.clone(), &[1, 0])?;
    let midpoint_a = plan_a.interpolate(0.5);
    let midpoint_b = plan_b.interpolate(0.5);
    let midpoint_gap = wasserstein2_rn(&midpoint_a, &midpoint_b)?;
    let defect = comparison_defect_rn(&midpoint_a, &plan_b, 0.5)?;
    Ok(BranchingWitness {
        cost_a: plan_a.cost(),
        cost_b: plan_b.cost(),
        optimal_cost: discrete_ot(&x, &z)?.1,
        x,
        z,
        plan_a,
        plan_b,
        midpoint_a,
        midpoint_b,
        midpoint_gap,
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rn::discrete_ot;

    #[test]
    fn flat_on_the_line() {
        let x = Measure1D::from_atoms(&[(0.0, 0.3), (2.0, 0.7)]).unwrap();
        let y = Measure1D::uniform(-1.0, 4.0).unwrap();
        let z = Measure1D::from_atoms(&[(-3.0, 0.5), (1.0, 0.25), (5.0, 0.25)]).unwrap();
        for t in [0.0, 0.37, 0.5, 1.0] {
            assert!(comparison_defect(&x, &y, &z, t).unwrap().abs() < 1e-12);
        }
        assert!(comparison_defect(&x, &y, &z, 1.5).is_err());
    }

    #[test]
    fn point_on_the_geodesic() {
        let x = MeasureRn::uniform_on(vec![vec![0.0, 0.0], vec![1.0, 3.0]]).unwrap();
        let z = MeasureRn::uniform_on(vec![vec![2.0, 1.0], vec![4.0, 2.0]]).unwrap();
        let (plan, _) = discrete_ot(&x, &z).unwrap();
        let y = plan.interpolate(0.3);
        assert!(comparison_defect_rn(&y, &plan, 0.6).unwrap().abs() < 1e-12);
    }

    #[test]
    fn branching() {
        let w = branching_witness().unwrap();
        assert!((w.cost_a - w.cost_b).abs() <= 1e-10);
        assert!((w.cost_a - w.optimal_cost).abs() <= 1e-10);
        assert!((w.midpoint_gap - 1.0).abs() < 1e-12);
        assert!((w.defect - 1.0).abs() < 1e-12);
    }
}
