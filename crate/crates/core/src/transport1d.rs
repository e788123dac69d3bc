//! Quadratic optimal transport on the line.
//!
//! Optimal plans on ℝ are monotone rearrangements, so everything reduces to the
//! quantile functions: the distance is the L² distance between them and the
//! geodesic interpolates them slot by slot. A geodesic keeps being a geodesic for as
//! long as the interpolated quantile stays non-decreasing, which gives the maximal
//! extension interval in closed form.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::{align, Aligned, Measure1D, QuantilePieces, Segment, CANON_TOL};

/// Squared distance between two aligned quantile rows.
fn aligned_sq_distance(al: &Aligned) -> f64 {
    al.left
        .iter()
        .zip(&al.right)
        .enumerate()
        .map(|(k, (p, q))| {
            let d0 = p.start - q.start;
            let d1 = p.end - q.end;
            al.width(k) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0
        })
        .sum::<f64>()
}

/// `d²(μ₀, μ₁) = ∫₀¹ (F₀⁻¹ − F₁⁻¹)²`, integrated exactly slot by slot.
pub fn wasserstein2_squared(mu0: &Measure1D, mu1: &Measure1D) -> f64 {
    aligned_sq_distance(&align(&mu0.quantile_pieces(), &mu1.quantile_pieces()))
}

pub fn wasserstein2(mu0: &Measure1D, mu1: &Measure1D) -> f64 {
    wasserstein2_squared(mu0, mu1).sqrt()
}

/// One end of an [`Interval`]; infinite values serialize as `"inf"` / `"-inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Bound(x)),
            Raw::Str(s) if s == "inf" => Ok(Bound(f64::INFINITY)),
            Raw::Str(s) if s == "-inf" => Ok(Bound(f64::NEG_INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad bound `{s}`"))),
        }
    }
}

/// Closed interval of times, possibly unbounded on either side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        // adding 0.0 turns -0.0 into 0.0
        Self {
            lo: Bound(lo + 0.0),
            hi: Bound(hi + 0.0),
        }
    }

    pub fn full() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn lo(&self) -> f64 {
        self.lo.0
    }

    pub fn hi(&self) -> f64 {
        self.hi.0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo() && t <= self.hi()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo().is_finite() {
            write!(f, "[{}, ", self.lo())?;
        } else {
            write!(f, "(-inf, ")?;
        }
        if self.hi().is_finite() {
            write!(f, "{}]", self.hi())
        } else {
            write!(f, "inf)")
        }
    }
}

/// Constraint `(1 − t)·g₀ + t·g₁ ≥ 0` from one jump or slope, folded into `iv`.
fn tighten(iv: &mut Interval, g0: f64, g1: f64) {
    let (g0, g1) = (g0.max(0.0), g1.max(0.0));
    let diff = g1 - g0;
    if diff.abs() <= CANON_TOL * 1f64.max(g0).max(g1) {
        return;
    }
    if diff > 0.0 {
        // g₀ + t·diff ≥ 0  ⇔  t ≥ −g₀/diff
        let lo = -g0 / diff;
        if lo > iv.lo() {
            iv.lo = Bound(lo + 0.0);
        }
    } else {
        let hi = g0 / -diff;
        if hi < iv.hi() {
            iv.hi = Bound(hi + 0.0);
        }
    }
}

fn extension_of(al: &Aligned) -> Interval {
    let mut iv = Interval::full();
    for k in 0..al.left.len() {
        tighten(&mut iv, al.left[k].slope(), al.right[k].slope());
        if k > 0 {
            tighten(
                &mut iv,
                al.left[k].start - al.left[k - 1].end,
                al.right[k].start - al.right[k - 1].end,
            );
        }
    }
    iv
}

/// Maximal closed interval of times on which the geodesic from `μ₀` to `μ₁` extends.
pub fn extension_interval(mu0: &Measure1D, mu1: &Measure1D) -> Interval {
    extension_of(&align(&mu0.quantile_pieces(), &mu1.quantile_pieces()))
}

/// The displacement geodesic between two measures, stored as aligned quantile rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geodesic1D {
    pub breakpoints: Vec<f64>,
    pub q0: Vec<[f64; 2]>,
    pub q1: Vec<[f64; 2]>,
    pub speed: f64,
    pub extension: Interval,
}

pub fn geodesic(mu0: &Measure1D, mu1: &Measure1D) -> Geodesic1D {
    let al = align(&mu0.quantile_pieces(), &mu1.quantile_pieces());
    let speed = aligned_sq_distance(&al).sqrt();
    let extension = extension_of(&al);
    Geodesic1D {
        q0: al.left.iter().map(|s| [s.start, s.end]).collect(),
        q1: al.right.iter().map(|s| [s.start, s.end]).collect(),
        breakpoints: al.breaks,
        speed,
        extension,
    }
}

impl Geodesic1D {
    /// Interpolated quantile at time `t`, without the extension check.
    pub fn quantile_at(&self, t: f64) -> QuantilePieces {
        let lerp = |a: f64, b: f64| (1.0 - t) * a + t * b;
        let segs = self
            .q0
            .iter()
            .zip(&self.q1)
            .map(|(a, b)| Segment {
                start: lerp(a[0], b[0]),
                end: lerp(a[1], b[1]),
            })
            .collect();
        QuantilePieces::from_parts_unchecked(self.breakpoints.clone(), segs)
    }

    /// The measure at time `t`; errors outside the extension interval.
    pub fn eval(&self, t: f64) -> Result<Measure1D> {
        if !t.is_finite() || !self.extension.contains(t) {
            return Err(Error::OutsideExtension {
                t,
                interval: self.extension.to_string(),
            });
        }
        Ok(Measure1D::from_quantile(&self.quantile_at(t)))
    }

    /// Length of the restriction to `[0, 1]`.
    pub fn length(&self) -> f64 {
        self.speed
    }
}

pub fn geodesic_eval(g: &Geodesic1D, t: f64) -> Result<Measure1D> {
    g.eval(t)
}
