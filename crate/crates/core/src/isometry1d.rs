//! Isometries of the Wasserstein space of the line.
//!
//! Every isometry has a normal form `(ε, v, η, t)`: first reflect each measure about
//! its barycenter when `η = −1`, then run the exotic flow for time `t`, then push
//! forward by `x ↦ εx + v`. On two-atom measures, written `μ(x, σ, p)` with
//! barycenter `x`, deviation `σ` and shape `p`, the element acts as
//! `(x, σ, p) ↦ (εx + v, σ, ε(ηp + t))`.
//!
//! The exotic flow is only explicit on two-atom measures (`p ↦ p + t`). It is
//! extended to `n`-atom measures by writing the measure as a point on a geodesic
//! segment between two `(n − 1)`-atom measures, flowing the endpoints, and taking
//! the point at the same fraction of the image segment. Flat triangles make this
//! independent of the chosen segment; [`SegmentRule`] lets callers pick one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Atom, Measure1D};
use crate::registry::{Named, Registry};
use crate::transport1d::{geodesic, wasserstein2};

/// Largest atom count accepted by the exotic flow.
pub const FLOW_ATOM_CAP: usize = 14;

/// Coordinates `(x, σ, p)` of a two-atom measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta2Params {
    pub x: f64,
    pub sigma: f64,
    pub p: f64,
}

impl Delta2Params {
    pub fn new(x: f64, sigma: f64, p: f64) -> Self {
        Self { x, sigma, p }
    }
}

pub fn delta2_params(mu: &Measure1D) -> Result<Delta2Params> {
    if !mu.is_atomic() || mu.num_atoms() != 2 {
        return Err(Error::AtomCount(if mu.is_atomic() {
            mu.num_atoms()
        } else {
            usize::MAX
        }));
    }
    let left = mu.atoms()[0];
    let right = mu.atoms()[1];
    let x = mu.barycenter();
    // σ² = a(1−a)(y−z)² for weights a, 1−a at z < y
    let sigma = (left.w * right.w).sqrt() * (right.x - left.x);
    let p = 0.5 * (right.w / left.w).ln();
    Ok(Delta2Params { x, sigma, p })
}

/// Left atom `x − σeᵖ` with weight `e⁻ᵖ/(e⁻ᵖ + eᵖ)`, right atom `x + σe⁻ᵖ`.
pub fn measure_from_params(params: &Delta2Params) -> Result<Measure1D> {
    let Delta2Params { x, sigma, p } = *params;
    if sigma < 0.0 {
        return Err(Error::NegativeDeviation(sigma));
    }
    if sigma == 0.0 {
        return Ok(Measure1D::dirac(x));
    }
    let left_w = 1.0 / (1.0 + (2.0 * p).exp());
    let right_w = 1.0 / (1.0 + (-2.0 * p).exp());
    if !(left_w > 0.0 && right_w > 0.0) {
        return Err(Error::ShapeOverflow(p));
    }
    let left = x - sigma * p.exp();
    let right = x + sigma * (-p).exp();
    if !(left < right) {
        return Err(Error::ShapeOverflow(p));
    }
    // weights are built to sum to one; absorb rounding in the heavier atom
    let (lw, rw) = if left_w < right_w {
        (left_w, 1.0 - left_w)
    } else {
        (1.0 - right_w, right_w)
    };
    Measure1D::new(
        vec![Atom { x: left, w: lw }, Atom { x: right, w: rw }],
        Vec::new(),
    )
}

/// `d² = (x − y)² + σ² + ρ² − 2σρ·e^{−|p−q|}`.
pub fn delta2_distance(a: &Delta2Params, b: &Delta2Params) -> f64 {
    let dx = a.x - b.x;
    (dx * dx + a.sigma * a.sigma + b.sigma * b.sigma
        - 2.0 * a.sigma * b.sigma * (-(a.p - b.p).abs()).exp())
    .max(0.0)
    .sqrt()
}

/// Mirror image of `μ` about its own barycenter.
pub fn reflect_about_barycenter(mu: &Measure1D) -> Measure1D {
    mu.pushforward_affine(-1.0, 2.0 * mu.barycenter())
}

/// A choice of geodesic segment through an atomic measure with both endpoints
/// having one atom fewer.
pub trait SegmentRule: Named + Send + Sync {
    /// Endpoints `(μ₋, μ₊)` of a segment containing `μ`. `μ` has at least three atoms.
    fn endpoints(&self, mu: &Measure1D) -> Result<(Measure1D, Measure1D)>;
}

/// Merges the second-to-last atom into its left neighbour for `μ₋` and into its
/// right neighbour for `μ₊`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeighborMerge;

impl Named for NeighborMerge {
    fn name(&self) -> &'static str {
        "merge"
    }
}

impl SegmentRule for NeighborMerge {
    fn endpoints(&self, mu: &Measure1D) -> Result<(Measure1D, Measure1D)> {
        let atoms = mu.atoms();
        let k = atoms.len() - 2;
        let mut minus = atoms.to_vec();
        minus[k - 1].w += minus[k].w;
        minus.remove(k);
        let mut plus = atoms.to_vec();
        plus[k + 1].w += plus[k].w;
        plus.remove(k);
        Ok((
            Measure1D::new(minus, Vec::new())?,
            Measure1D::new(plus, Vec::new())?,
        ))
    }
}

/// Moves the second-to-last atom by `τ` and the last by `−ατ` with
/// `α = aₙ/aₙ₊₁`, keeping the barycenter fixed; the endpoints are where the moving
/// atom hits its left neighbour or meets the last atom.
#[derive(Clone, Copy, Debug, Default)]
pub struct BarycentricSlide;

impl Named for BarycentricSlide {
    fn name(&self) -> &'static str {
        "barycentric"
    }
}

impl SegmentRule for BarycentricSlide {
    fn endpoints(&self, mu: &Measure1D) -> Result<(Measure1D, Measure1D)> {
        let atoms = mu.atoms();
        let k = atoms.len() - 2;
        let alpha = atoms[k].w / atoms[k + 1].w;
        let slide = |tau: f64| {
            let mut a = atoms.to_vec();
            a[k].x += tau;
            a[k + 1].x -= alpha * tau;
            a
        };
        let tau_minus = atoms[k - 1].x - atoms[k].x;
        let tau_plus = (atoms[k + 1].x - atoms[k].x) / (1.0 + alpha);
        let mut minus = slide(tau_minus);
        minus[k].x = minus[k - 1].x;
        let mut plus = slide(tau_plus);
        plus[k + 1].x = plus[k].x;
        Ok((
            Measure1D::new(minus, Vec::new())?,
            Measure1D::new(plus, Vec::new())?,
        ))
    }
}

/// All segment rules, keyed by name.
pub fn segment_rules() -> Registry<dyn SegmentRule> {
    let mut r: Registry<dyn SegmentRule> = Registry::new();
    r.register(Box::new(NeighborMerge))
        .register(Box::new(BarycentricSlide));
    r
}

fn cache_key(mu: &Measure1D) -> Vec<u64> {
    mu.atoms()
        .iter()
        .flat_map(|a| [a.x.to_bits(), a.w.to_bits()])
        .collect()
}

/// The flow `Φᵗ` for a fixed time, with a per-instance memo of sub-measures.
pub struct ExoticFlow<'r> {
    t: f64,
    rule: &'r dyn SegmentRule,
    memo: HashMap<Vec<u64>, Measure1D>,
}

impl ExoticFlow<'static> {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            rule: &NeighborMerge,
            memo: HashMap::new(),
        }
    }
}

impl<'r> ExoticFlow<'r> {
    pub fn with_rule(t: f64, rule: &'r dyn SegmentRule) -> Self {
        Self {
            t,
            rule,
            memo: HashMap::new(),
        }
    }

    pub fn apply(&mut self, mu: &Measure1D) -> Result<Measure1D> {
        if self.t == 0.0 {
            return Ok(mu.clone());
        }
        if !mu.is_atomic() {
            return Err(Error::NonAtomic);
        }
        if mu.num_atoms() > FLOW_ATOM_CAP {
            return Err(Error::TooManyAtoms {
                atoms: mu.num_atoms(),
                cap: FLOW_ATOM_CAP,
            });
        }
        self.flow(mu)
    }

    fn flow(&mut self, mu: &Measure1D) -> Result<Measure1D> {
        match mu.num_atoms() {
            0 | 1 => Ok(mu.clone()),
            2 => {
                let mut params = delta2_params(mu)?;
                params.p += self.t;
                measure_from_params(&params)
            }
            _ => {
                let key = cache_key(mu);
                if let Some(hit) = self.memo.get(&key) {
                    return Ok(hit.clone());
                }
                let (minus, plus) = self.rule.endpoints(mu)?;
                let s = wasserstein2(&minus, mu) / wasserstein2(&minus, &plus);
                let image_minus = self.flow(&minus)?;
                let image_plus = self.flow(&plus)?;
                let out = geodesic(&image_minus, &image_plus).eval(s.clamp(0.0, 1.0))?;
                self.memo.insert(key, out.clone());
                Ok(out)
            }
        }
    }
}

/// `Φᵗ(μ)` for a finitely atomic `μ` with at most [`FLOW_ATOM_CAP`] atoms.
pub fn exotic_flow(mu: &Measure1D, t: f64) -> Result<Measure1D> {
    ExoticFlow::new(t).apply(mu)
}

pub fn exotic_flow_with(mu: &Measure1D, t: f64, rule: &dyn SegmentRule) -> Result<Measure1D> {
    ExoticFlow::with_rule(t, rule).apply(mu)
}

/// Flow of a quantized measure together with an a-priori error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedFlow {
    pub measure: Measure1D,
    /// `2·d(μ, μₙ)`: the quantization error carried to the output by an isometry,
    /// counted twice to cover the comparison back to `Φᵗ(μ)`.
    pub error_bound: f64,
}

/// Quantizes `μ` to `n` equal-mass atoms, then flows.
pub fn exotic_flow_quantized(mu: &Measure1D, t: f64, n: usize) -> Result<QuantizedFlow> {
    let q = mu.quantize(n)?;
    let error_bound = 2.0 * wasserstein2(mu, &q);
    Ok(QuantizedFlow {
        measure: exotic_flow(&q, t)?,
        error_bound,
    })
}

/// `+1` or `−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i32(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!(
                "sign must be +1 or -1, got {s}"
            ))),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Normal form `(ε, v, η, t)` of `#(x ↦ εx + v) ∘ Φ(p ↦ ηp + t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryElement {
    pub eps: Sign,
    pub v: f64,
    pub eta: Sign,
    pub t: f64,
}

impl IsometryElement {
    pub fn new(eps: Sign, v: f64, eta: Sign, t: f64) -> Self {
        Self { eps, v, eta, t }
    }

    pub fn identity() -> Self {
        Self::new(Sign::Plus, 0.0, Sign::Plus, 0.0)
    }

    /// Induced by the isometry `x ↦ εx + v` of the line.
    pub fn trivial(eps: Sign, v: f64) -> Self {
        Self::new(eps, v, Sign::Plus, 0.0)
    }

    /// Fixes every Dirac mass; acts on shapes by `p ↦ ηp + t`.
    pub fn shape(eta: Sign, t: f64) -> Self {
        Self::new(Sign::Plus, 0.0, eta, t)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            eps: self.eps * other.eps,
            v: self.eps.value() * other.v + self.v,
            eta: self.eta * other.eta,
            t: self.eta.value() * other.t + other.eps.value() * self.t,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            eps: self.eps,
            v: -self.eps.value() * self.v,
            eta: self.eta,
            t: -(self.eta * self.eps).value() * self.t,
        }
    }

    /// Action on two-atom coordinates.
    pub fn act_on_params(&self, a: &Delta2Params) -> Delta2Params {
        Delta2Params {
            x: self.eps.value() * a.x + self.v,
            sigma: a.sigma,
            p: self.eps.value() * (self.eta.value() * a.p + self.t),
        }
    }

    pub fn apply(&self, mu: &Measure1D) -> Result<Measure1D> {
        let reflected = match self.eta {
            Sign::Plus => mu.clone(),
            Sign::Minus => reflect_about_barycenter(mu),
        };
        let flowed = exotic_flow(&reflected, self.t)?;
        Ok(flowed.pushforward_affine(self.eps.value(), self.v))
    }
}

pub fn compose(g1: &IsometryElement, g2: &IsometryElement) -> IsometryElement {
    g1.compose(g2)
}

pub fn apply_isometry(g: &IsometryElement, mu: &Measure1D) -> Result<Measure1D> {
    g.apply(mu)
}

impl fmt::Display for IsometryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.eps.as_i32(),
            self.v,
            self.eta.as_i32(),
            self.t
        )
    }
}

impl Serialize for IsometryElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.eps.as_i32(), self.v, self.eta.as_i32(), self.t).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsometryElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (eps, v, eta, t) = <(i32, f64, i32, f64)>::deserialize(d)?;
        let eps = Sign::from_i32(eps).map_err(serde::de::Error::custom)?;
        let eta = Sign::from_i32(eta).map_err(serde::de::Error::custom)?;
        Ok(Self { eps, v, eta, t })
    }
}

/// One sample of the weak-convergence profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowSample {
    pub t: f64,
    pub mass_in_window: f64,
    pub distance_to_barycenter: f64,
}

/// Mass that `Φᵗ(μ)` puts within `width` of the barycenter of `μ`, for each `t`.
pub fn weak_convergence_profile(
    mu: &Measure1D,
    ts: &[f64],
    width: f64,
) -> Result<Vec<WindowSample>> {
    if !(width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "window width must be positive, got {width}"
        )));
    }
    let c = mu.barycenter();
    let center = Measure1D::dirac(c);
    ts.iter()
        .map(|&t| {
            let image = exotic_flow(mu, t)?;
            Ok(WindowSample {
                t,
                mass_in_window: image.mass_in(c - width, c + width),
                distance_to_barycenter: wasserstein2(&image, &center),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(f64, f64)]) -> Measure1D {
        Measure1D::from_atoms(pairs).unwrap()
    }

    #[test]
    fn balanced_pair_params() {
        let p = delta2_params(&m(&[(-1.0, 0.5), (1.0, 0.5)])).unwrap();
        assert_eq!(p, Delta2Params::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn params_instantiated() {
        let e = std::f64::consts::E;
        let mu = measure_from_params(&Delta2Params::new(0.0, 1.0, 1.0)).unwrap();
        let a = mu.atoms();
        assert!((a[0].x + e).abs() < 1e-15);
        assert!((a[0].w - 1.0 / (1.0 + e * e)).abs() < 1e-15);
        assert!((a[1].x - 1.0 / e).abs() < 1e-15);
        assert!((a[1].w - e * e / (1.0 + e * e)).abs() < 1e-15);
    }

    #[test]
    fn params_errors() {
        assert!(matches!(
            delta2_params(&Measure1D::dirac(0.0)),
            Err(Error::AtomCount(1))
        ));
        assert!(delta2_params(&m(&[(0.0, 0.3), (1.0, 0.3), (2.0, 0.4)])).is_err());
        assert_eq!(
            measure_from_params(&Delta2Params::new(2.0, 0.0, 5.0)).unwrap(),
            Measure1D::dirac(2.0)
        );
        assert!(measure_from_params(&Delta2Params::new(0.0, -1.0, 0.0)).is_err());
        assert!(matches!(
            measure_from_params(&Delta2Params::new(0.0, 1.0, 400.0)),
            Err(Error::ShapeOverflow(_))
        ));
    }

    #[test]
    fn closed_form_distance() {
        let a = Delta2Params::new(0.0, 1.0, 0.0);
        assert_eq!(delta2_distance(&a, &a), 0.0);
        let b = Delta2Params::new(0.0, 1.0, 2f64.ln());
        assert!((delta2_distance(&a, &b) - 1.0).abs() < 1e-15);
        let c = Delta2Params::new(3.5, 1.0, 0.0);
        assert!((delta2_distance(&a, &c) - 3.5).abs() < 1e-15);
    }

    #[test]
    fn reflection() {
        let sym = m(&[(-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(reflect_about_barycenter(&sym), sym);
        let skew = m(&[(0.0, 0.75), (4.0, 0.25)]);
        assert_eq!(
            reflect_about_barycenter(&skew),
            m(&[(-2.0, 0.25), (2.0, 0.75)])
        );
    }

    #[test]
    fn flow_on_pairs_shifts_shape() {
        let mu = measure_from_params(&Delta2Params::new(0.0, 1.0, 0.0)).unwrap();
        for t in [-2.0, 0.5, 1.0, 3.0] {
            let want = measure_from_params(&Delta2Params::new(0.0, 1.0, t)).unwrap();
            assert!(exotic_flow(&mu, t).unwrap().approx_eq(&want, 1e-14));
        }
        assert_eq!(exotic_flow(&mu, 0.0).unwrap(), mu);
    }

    #[test]
    fn flow_fixes_diracs() {
        assert_eq!(
            exotic_flow(&Measure1D::dirac(4.0), 2.0).unwrap(),
            Measure1D::dirac(4.0)
        );
    }

    #[test]
    fn flow_rejects_non_atomic_and_large() {
        let u = Measure1D::uniform(0.0, 1.0).unwrap();
        assert!(matches!(exotic_flow(&u, 1.0), Err(Error::NonAtomic)));
        let big = Measure1D::empirical(&(0..15).map(f64::from).collect::<Vec<_>>()).unwrap();
        assert!(matches!(
            exotic_flow(&big, 1.0),
            Err(Error::TooManyAtoms { atoms: 15, .. })
        ));
    }

    #[test]
    fn quantized_flow_reports_bound() {
        let u = Measure1D::uniform(0.0, 1.0).unwrap();
        let q = exotic_flow_quantized(&u, 0.5, 8).unwrap();
        assert!(q.error_bound > 0.0 && q.error_bound < 0.1);
        assert!((q.measure.barycenter() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn three_atoms_preserve_moments() {
        let mu = m(&[(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]);
        let out = exotic_flow(&mu, 1.3).unwrap();
        assert!(out.num_atoms() <= 3);
        assert!((out.barycenter() - mu.barycenter()).abs() < 1e-12);
        assert!((out.deviation() - mu.deviation()).abs() < 1e-12);
    }

    #[test]
    fn rules_agree_on_three_atoms() {
        let mu = m(&[(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]);
        let a = exotic_flow_with(&mu, 0.8, &NeighborMerge).unwrap();
        let b = exotic_flow_with(&mu, 0.8, &BarycentricSlide).unwrap();
        assert!(wasserstein2(&a, &b) < 1e-10);
    }

    #[test]
    fn barycentric_endpoints_keep_center() {
        let mu = m(&[(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]);
        let (lo, hi) = BarycentricSlide.endpoints(&mu).unwrap();
        assert_eq!(lo.num_atoms(), 2);
        assert_eq!(hi.num_atoms(), 2);
        assert!((lo.barycenter() - mu.barycenter()).abs() < 1e-15);
        assert!((hi.barycenter() - mu.barycenter()).abs() < 1e-15);
    }

    #[test]
    fn registry_lists_rules() {
        let r = segment_rules();
        assert_eq!(r.names(), vec!["barycentric", "merge"]);
        assert!(r.get("merge").is_some());
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn group_laws() {
        let g = IsometryElement::new(Sign::Minus, 1.5, Sign::Minus, -0.25);
        let id = IsometryElement::identity();
        assert_eq!(g.compose(&id), g);
        assert_eq!(id.compose(&g), g);
        assert_eq!(g.compose(&g.inverse()), id);
        assert_eq!(g.inverse().compose(&g), id);

        let s = IsometryElement::shape(Sign::Plus, 0.5);
        let t = IsometryElement::shape(Sign::Plus, 1.25);
        assert_eq!(s.compose(&t), IsometryElement::shape(Sign::Plus, 1.75));
    }

    #[test]
    fn conjugation() {
        for (eps, eta) in [
            (Sign::Plus, Sign::Plus),
            (Sign::Minus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
        ] {
            let psi = IsometryElement::trivial(eps, 2.0);
            let phi = IsometryElement::shape(eta, 0.75);
            let c = psi.compose(&phi.compose(&psi.inverse()));
            assert_eq!(c, IsometryElement::shape(eta, eps.value() * 0.75));
        }
    }

    #[test]
    fn element_json() {
        let g = IsometryElement::new(Sign::Minus, 1.0, Sign::Plus, 2.5);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, "[-1,1.0,1,2.5]");
        assert_eq!(serde_json::from_str::<IsometryElement>(&s).unwrap(), g);
        assert!(serde_json::from_str::<IsometryElement>("[2,0.0,1,0.0]").is_err());
    }

    #[test]
    fn window_profile() {
        let mu = measure_from_params(&Delta2Params::new(0.0, 1.0, 0.0)).unwrap();
        let prof = weak_convergence_profile(&mu, &[0.0, 1.0, 10.0], 0.1).unwrap();
        assert_eq!(prof[0].mass_in_window, 0.0);
        assert_eq!(prof[1].mass_in_window, 0.0);
        let want = 1.0 / (1.0 + (-20f64).exp());
        assert!((prof[2].mass_in_window - want).abs() < 1e-15);
        for s in &prof {
            assert!((s.distance_to_barycenter - 1.0).abs() < 1e-9);
        }
        let dirac = weak_convergence_profile(&Measure1D::dirac(1.0), &[0.0, 5.0], 0.1).unwrap();
        assert!(dirac.iter().all(|s| s.mass_in_window == 1.0));
        assert!(weak_convergence_profile(&mu, &[1.0], 0.0).is_err());
    }
}
