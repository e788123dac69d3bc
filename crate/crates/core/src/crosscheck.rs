//! Numerical cross-checks of three closed forms that circulate for this geometry
//! and do not survive contact with an exact oracle.
//!
//! * Two-atom distance: `(x − y)² + σ² + ρ² − 2σρ·e^{+|p−q|}` goes negative; the
//!   quantile integral agrees with the `e^{−|p−q|}` version.
//! * Dilations: `d_W(μ, D_x^λ μ) = |1 − λ²|^{1/2}·d_W(μ, δₓ)` disagrees with the
//!   transport solver; `|1 − λ|·d_W(μ, δₓ)` agrees.
//! * Uniform three-atom flow: the candidate formula below fixes `⅓(δ₀ + δ₁ + δ₂)`
//!   at `t = 1` but moves it at `t = 2`, which no flow can do.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::isometry1d::{delta2_distance, exotic_flow, measure_from_params, Delta2Params};
use crate::measures::{Atom, Measure1D};
use crate::rn::{dilate, dilation_distance, wasserstein2_rn, MeasureRn};
use crate::transport1d::{wasserstein2, wasserstein2_squared};

/// Candidate closed form for the flow on `⅓(δ_{x₁} + δ_{x₂} + δ_{x₃})`, `x₁ ≤ x₂ ≤ x₃`.
/// Undefined at `t = 0`.
pub fn candidate_uniform_triple(x1: f64, x2: f64, x3: f64, t: f64) -> Result<Measure1D> {
    if t == 0.0 {
        return Err(Error::InvalidArgument(
            "candidate formula is undefined at t = 0".into(),
        ));
    }
    let t2 = t * t;
    let (d31, d21) = (x3 - x1, x2 - x1);
    let a = 1.0 + 2.0 * t2;
    let b = 1.0 + 0.5 * t2;
    let atoms = vec![
        Atom {
            x: x1 + (1.0 - t) * d31 / 3.0 + (1.0 - t) * d21 / 3.0,
            w: 1.0 / a,
        },
        Atom {
            x: x1 + (1.0 - t) * d31 / 3.0 + (1.0 + 1.0 / t + t) * d21 / 3.0,
            w: 1.5 * t2 / (b * a),
        },
        Atom {
            x: x1 + (1.0 + 2.0 / t) * d31 / 3.0 + (1.0 - 1.0 / t) * d21 / 3.0,
            w: 0.5 * t2 / b,
        },
    ];
    Measure1D::new(atoms, Vec::new())
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentCheck {
    pub a: Delta2Params,
    pub b: Delta2Params,
    /// `d²` from the quantile integral of the reconstructed measures.
    pub oracle_sq: f64,
    pub negative_exponent_sq: f64,
    pub positive_exponent_sq: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationCheck {
    pub lambda: f64,
    pub oracle: f64,
    pub linear_factor: f64,
    pub square_root_factor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleCheck {
    pub t: f64,
    pub recursion: Measure1D,
    pub candidate: Measure1D,
    /// `d_W` between the two images.
    pub disagreement: f64,
    /// `d_W` between the candidate image and the input.
    pub candidate_displacement: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub exponent: ExponentCheck,
    pub dilation: DilationCheck,
    pub triple: Vec<TripleCheck>,
}

pub fn exponent_check() -> Result<ExponentCheck> {
    let a = Delta2Params::new(0.0, 1.0, 0.0);
    let b = Delta2Params::new(0.0, 1.0, 2f64.ln());
    let oracle_sq = wasserstein2_squared(&measure_from_params(&a)?, &measure_from_params(&b)?);
    let gap = (a.p - b.p).abs();
    Ok(ExponentCheck {
        a,
        b,
        oracle_sq,
        negative_exponent_sq: delta2_distance(&a, &b).powi(2),
        positive_exponent_sq: a.sigma.powi(2) + b.sigma.powi(2)
            - 2.0 * a.sigma * b.sigma * gap.exp(),
    })
}

pub fn dilation_check() -> Result<DilationCheck> {
    let mu = MeasureRn::uniform_on(vec![vec![-1.0, 0.0], vec![1.0, 0.0]])?;
    let origin = [0.0, 0.0];
    let lambda = 2.0;
    let oracle = wasserstein2_rn(&mu, &dilate(&mu, &origin, lambda)?)?;
    Ok(DilationCheck {
        lambda,
        oracle,
        linear_factor: dilation_distance(&mu, &origin, lambda)?,
        square_root_factor: (1.0 - lambda * lambda).abs().sqrt() * mu.distance_to_point(&origin),
    })
}

pub fn triple_check(ts: &[f64]) -> Result<Vec<TripleCheck>> {
    let mu = Measure1D::empirical(&[0.0, 1.0, 2.0])?;
    ts.iter()
        .map(|&t| {
            let recursion = exotic_flow(&mu, t)?;
            let candidate = candidate_uniform_triple(0.0, 1.0, 2.0, t)?;
            Ok(TripleCheck {
                t,
                disagreement: wasserstein2(&recursion, &candidate),
                candidate_displacement: wasserstein2(&candidate, &mu),
                recursion,
                candidate,
            })
        })
        .collect()
}

pub fn report() -> Result<CrossCheckReport> {
    Ok(CrossCheckReport {
        exponent: exponent_check()?,
        dilation: dilation_check()?,
        triple: triple_check(&[1.0, 2.0])?,
    })
}

fn fmt_atoms(m: &Measure1D) -> String {
    let parts: Vec<String> = m
        .atoms()
        .iter()
        .map(|a| format!("{:.6}@{:.6}", a.w, a.x))
        .collect();
    parts.join(" + ")
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.exponent;
        writeln!(
            f,
            "two-atom distance (0,1,0) vs (0,1,ln 2): oracle d² = {:.12}, e^-|p-q| form = {:.12}, e^+|p-q| form = {:.12}",
            e.oracle_sq, e.negative_exponent_sq, e.positive_exponent_sq
        )?;
        let d = &self.dilation;
        writeln!(
            f,
            "dilation lambda = {}: oracle d = {:.12}, |1-lambda| form = {:.12}, |1-lambda^2|^(1/2) form = {:.12}",
            d.lambda, d.oracle, d.linear_factor, d.square_root_factor
        )?;
        for c in &self.triple {
            writeln!(
                f,
                "uniform triple at t = {}: recursion {} | candidate {} | disagreement {:.12} | candidate moved input by {:.12}",
                c.t,
                fmt_atoms(&c.recursion),
                fmt_atoms(&c.candidate),
                c.disagreement,
                c.candidate_displacement
            )?;
        }
        Ok(())
    }
}
