//! Probability measures on the line and their inverse distribution functions.
//!
//! A [`Measure1D`] is a finite mixture of Dirac masses and uniform densities. Every
//! computation in the crate goes through its quantile function, a
//! [`QuantilePieces`]: a non-decreasing function on `(0, 1)` that is constant on the
//! mass slot of each atom and affine on the mass slot of each uniform piece.
//!
//! Canonical forms are defined by the quantile function: atoms sorted by position
//! with coincident positions merged, uniform pieces disjoint and sorted, adjacent
//! pieces of equal density fused. Two measures are equal as measures iff their
//! canonical forms agree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for merging positions and mass levels during canonicalization.
pub const CANON_TOL: f64 = 1e-12;

/// Tolerance for comparing derived quantities (distances, moments).
pub const CMP_TOL: f64 = 1e-9;

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformPiece {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
}

impl UniformPiece {
    fn density(&self) -> f64 {
        self.mass / (self.b - self.a)
    }
}

/// Values of the quantile function at the two ends of one mass slot.
///
/// `start == end` for an atom; `start < end` for a uniform density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
}

impl Segment {
    pub fn constant(x: f64) -> Self {
        Self { start: x, end: x }
    }

    pub fn slope(&self) -> f64 {
        self.end - self.start
    }

    /// Value at fraction `u` in `[0, 1]` of the slot.
    pub fn at(&self, u: f64) -> f64 {
        self.start + (self.end - self.start) * u
    }
}

/// A left-continuous non-decreasing piecewise-affine function on `(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantilePieces {
    breaks: Vec<f64>,
    segments: Vec<Segment>,
}

impl QuantilePieces {
    /// Builds a quantile function from mass breakpoints `0 = m_0 < … < m_K = 1` and
    /// one segment per slot. Monotonicity is checked up to [`CANON_TOL`].
    pub fn new(breaks: Vec<f64>, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() || breaks.len() != segments.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints for {} segments",
                breaks.len(),
                segments.len()
            )));
        }
        if breaks[0] != 0.0 || !close(*breaks.last().unwrap(), 1.0, CANON_TOL) {
            return Err(Error::MassNotNormalized(*breaks.last().unwrap()));
        }
        for w in breaks.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidArgument(
                    "mass breakpoints must increase".into(),
                ));
            }
        }
        for (k, s) in segments.iter().enumerate() {
            if !s.start.is_finite() || !s.end.is_finite() {
                return Err(Error::NonFinite(if s.start.is_finite() {
                    s.end
                } else {
                    s.start
                }));
            }
            if s.end < s.start && !close(s.start, s.end, CANON_TOL) {
                return Err(Error::InvalidArgument(format!("segment {k} decreases")));
            }
            if k > 0 {
                let prev = segments[k - 1].end;
                if s.start < prev && !close(s.start, prev, CANON_TOL) {
                    return Err(Error::InvalidArgument(format!(
                        "jump before segment {k} is negative"
                    )));
                }
            }
        }
        let mut breaks = breaks;
        *breaks.last_mut().unwrap() = 1.0;
        Ok(Self { breaks, segments })
    }

    pub(crate) fn from_parts_unchecked(breaks: Vec<f64>, segments: Vec<Segment>) -> Self {
        Self { breaks, segments }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Width of slot `k`.
    pub fn width(&self, k: usize) -> f64 {
        self.breaks[k + 1] - self.breaks[k]
    }

    /// Left-continuous evaluation: at a breakpoint the value of the slot to the left.
    pub fn eval(&self, m: f64) -> Result<f64> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::MassLevelOutOfRange(m));
        }
        // first k with breaks[k + 1] >= m
        let k = self.breaks[1..]
            .partition_point(|&b| b < m)
            .min(self.len() - 1);
        let u = (m - self.breaks[k]) / self.width(k);
        Ok(self.segments[k].at(u.clamp(0.0, 1.0)))
    }

    /// Affine restriction of the function to `[lo, hi]`, which must lie inside slot `k`.
    pub(crate) fn restrict(&self, k: usize, lo: f64, hi: f64) -> Segment {
        let w = self.width(k);
        let s = self.segments[k];
        if !(w > 0.0) {
            return s;
        }
        let u0 = ((lo - self.breaks[k]) / w).clamp(0.0, 1.0);
        let u1 = ((hi - self.breaks[k]) / w).clamp(0.0, 1.0);
        Segment {
            start: s.at(u0),
            end: s.at(u1),
        }
    }

    /// `∫₀¹ F⁻¹(m) dm`.
    pub fn integral(&self) -> f64 {
        (0..self.len())
            .map(|k| self.width(k) * 0.5 * (self.segments[k].start + self.segments[k].end))
            .sum()
    }

    /// `∫₀¹ (F⁻¹(m) − c)² dm`.
    pub fn centered_square_integral(&self, c: f64) -> f64 {
        (0..self.len())
            .map(|k| {
                let s = self.segments[k].start - c;
                let e = self.segments[k].end - c;
                self.width(k) * (s * s + s * e + e * e) / 3.0
            })
            .sum()
    }
}

/// Two quantile functions restricted to the common refinement of their breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Aligned {
    pub breaks: Vec<f64>,
    pub left: Vec<Segment>,
    pub right: Vec<Segment>,
}

impl Aligned {
    pub fn width(&self, k: usize) -> f64 {
        self.breaks[k + 1] - self.breaks[k]
    }
}

/// Merges the breakpoints of `q0` and `q1`; breakpoints within [`CANON_TOL`] coincide.
pub fn align(q0: &QuantilePieces, q1: &QuantilePieces) -> Aligned {
    let (b0, b1) = (q0.breakpoints(), q1.breakpoints());
    let mut breaks = vec![0.0];
    let mut left = Vec::with_capacity(q0.len() + q1.len());
    let mut right = Vec::with_capacity(q0.len() + q1.len());
    let (mut i, mut j) = (0, 0);
    let mut lo = 0.0;
    while i < q0.len() && j < q1.len() {
        let (n0, n1) = (b0[i + 1], b1[j + 1]);
        let hi;
        let (adv_i, adv_j);
        if (n0 - n1).abs() <= CANON_TOL {
            hi = if i + 1 == q0.len() { 1.0 } else { n0.min(n1) };
            adv_i = true;
            adv_j = true;
        } else if n0 < n1 {
            hi = n0;
            adv_i = true;
            adv_j = false;
        } else {
            hi = n1;
            adv_i = false;
            adv_j = true;
        }
        if hi - lo > 0.0 {
            left.push(q0.restrict(i, lo, hi));
            right.push(q1.restrict(j, lo, hi));
            breaks.push(hi);
            lo = hi;
        }
        if adv_i {
            i += 1;
        }
        if adv_j {
            j += 1;
        }
    }
    *breaks.last_mut().unwrap() = 1.0;
    Aligned {
        breaks,
        left,
        right,
    }
}

/// A Borel probability measure on the line made of atoms and uniform densities.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure1D {
    atoms: Vec<Atom>,
    uniform: Vec<UniformPiece>,
}

impl Measure1D {
    /// Canonical measure from atoms and uniform pieces.
    ///
    /// Uniform pieces may overlap; their densities add. Total mass must be 1 within
    /// `1e-12`.
    pub fn new(atoms: Vec<Atom>, uniform: Vec<UniformPiece>) -> Result<Self> {
        if atoms.is_empty() && uniform.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for a in &atoms {
            if !a.x.is_finite() {
                return Err(Error::NonFinite(a.x));
            }
            if !(a.w > 0.0) || !a.w.is_finite() {
                return Err(Error::NonPositiveWeight(a.w));
            }
        }
        for u in &uniform {
            if !u.a.is_finite() || !u.b.is_finite() {
                return Err(Error::NonFinite(if u.a.is_finite() { u.b } else { u.a }));
            }
            if !(u.b > u.a) {
                return Err(Error::BadUniformPiece { a: u.a, b: u.b });
            }
            if !(u.mass > 0.0) || !u.mass.is_finite() {
                return Err(Error::NonPositiveWeight(u.mass));
            }
        }
        let total: f64 =
            atoms.iter().map(|a| a.w).sum::<f64>() + uniform.iter().map(|u| u.mass).sum::<f64>();
        if (total - 1.0).abs() > CANON_TOL {
            return Err(Error::MassNotNormalized(total));
        }
        Ok(Self::from_quantile(&sweep(&atoms, &uniform)))
    }

    /// Finitely atomic measure `Σ wᵢ δ_{xᵢ}`.
    pub fn from_atoms(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|&(x, w)| Atom { x, w }).collect(),
            Vec::new(),
        )
    }

    pub fn dirac(x: f64) -> Self {
        Self {
            atoms: vec![Atom { x, w: 1.0 }],
            uniform: Vec::new(),
        }
    }

    /// Uniform probability on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![UniformPiece { a, b, mass: 1.0 }])
    }

    /// Equal-weight empirical measure `(1/k) Σ δ_{xᵢ}`.
    pub fn empirical(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = 1.0 / xs.len() as f64;
        let mut atoms: Vec<Atom> = xs.iter().map(|&x| Atom { x, w }).collect();
        // the k copies of 1/k need not sum to 1 exactly
        let drift = 1.0 - atoms.iter().map(|a| a.w).sum::<f64>();
        atoms.last_mut().unwrap().w += drift;
        Self::new(atoms, Vec::new())
    }

    /// Rebuilds the canonical measure whose inverse distribution function is `q`.
    ///
    /// Slots whose two end values agree within [`CANON_TOL`] become atoms, so
    /// quantiles produced by interpolation collapse cleanly.
    pub fn from_quantile(q: &QuantilePieces) -> Self {
        let mut atoms: Vec<Atom> = Vec::new();
        let mut uniform: Vec<UniformPiece> = Vec::new();
        for (k, seg) in q.segments().iter().enumerate() {
            let w = q.width(k);
            if close(seg.start, seg.end, CANON_TOL) {
                let x = 0.5 * (seg.start + seg.end);
                match atoms.last_mut() {
                    Some(last) if close(last.x, x, CANON_TOL) => {
                        last.x = (last.x * last.w + x * w) / (last.w + w);
                        last.w += w;
                    }
                    _ => atoms.push(Atom { x, w }),
                }
            } else {
                let piece = UniformPiece {
                    a: seg.start,
                    b: seg.end,
                    mass: w,
                };
                match uniform.last_mut() {
                    Some(last)
                        if close(last.b, piece.a, CANON_TOL)
                            && close(last.density(), piece.density(), CANON_TOL) =>
                    {
                        last.b = piece.b;
                        last.mass += piece.mass;
                    }
                    _ => uniform.push(piece),
                }
            }
        }
        Self { atoms, uniform }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn uniform_pieces(&self) -> &[UniformPiece] {
        &self.uniform
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_atomic(&self) -> bool {
        self.uniform.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.uniform.is_empty() && self.atoms.len() == 1
    }

    pub fn quantile_pieces(&self) -> QuantilePieces {
        sweep(&self.atoms, &self.uniform)
    }

    /// Left-continuous inverse distribution function at mass level `m ∈ (0, 1)`.
    pub fn quantile(&self, m: f64) -> Result<f64> {
        self.quantile_pieces().eval(m)
    }

    /// Center of mass.
    pub fn barycenter(&self) -> f64 {
        self.atoms.iter().map(|a| a.x * a.w).sum::<f64>()
            + self
                .uniform
                .iter()
                .map(|u| 0.5 * (u.a + u.b) * u.mass)
                .sum::<f64>()
    }

    /// Distance to the Dirac mass at the barycenter (the standard deviation).
    pub fn deviation(&self) -> f64 {
        let c = self.barycenter();
        self.quantile_pieces()
            .centered_square_integral(c)
            .max(0.0)
            .sqrt()
    }

    /// Image under `x ↦ a·x + b`.
    pub fn pushforward_affine(&self, a: f64, b: f64) -> Self {
        if a == 0.0 {
            return Self::dirac(b);
        }
        let q = self.quantile_pieces();
        let segs = q.segments().iter().map(|s| Segment {
            start: a * s.start + b,
            end: a * s.end + b,
        });
        if a > 0.0 {
            Self::from_quantile(&QuantilePieces::from_parts_unchecked(
                q.breakpoints().to_vec(),
                segs.collect(),
            ))
        } else {
            // reversing the slot order keeps the function non-decreasing
            let mut segs: Vec<Segment> = segs
                .map(|s| Segment {
                    start: s.end,
                    end: s.start,
                })
                .collect();
            segs.reverse();
            let breaks = q.breakpoints().iter().rev().map(|m| 1.0 - m).collect();
            Self::from_quantile(&QuantilePieces::from_parts_unchecked(breaks, segs))
        }
    }

    /// `n` equal-mass atoms at the quantile midpoints `F⁻¹((i − ½)/n)`.
    pub fn quantize(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "quantization needs at least one atom".into(),
            ));
        }
        let q = self.quantile_pieces();
        let xs = (0..n)
            .map(|i| q.eval((i as f64 + 0.5) / n as f64))
            .collect::<Result<Vec<_>>>()?;
        Self::empirical(&xs)
    }

    /// Structural comparison of canonical forms up to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self.uniform.len() == other.uniform.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(p, q)| close(p.x, q.x, tol) && (p.w - q.w).abs() <= tol)
            && self.uniform.iter().zip(&other.uniform).all(|(p, q)| {
                close(p.a, q.a, tol) && close(p.b, q.b, tol) && (p.mass - q.mass).abs() <= tol
            })
    }

    /// Mass carried by the closed interval `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.x >= lo && a.x <= hi)
            .map(|a| a.w)
            .sum();
        let dens: f64 = self
            .uniform
            .iter()
            .map(|u| {
                let overlap = (u.b.min(hi) - u.a.max(lo)).max(0.0);
                overlap * u.density()
            })
            .sum();
        atoms + dens
    }
}

/// Appends a slot ending at mass `cum`, unless rounding left it with zero width.
fn push_slot(breaks: &mut Vec<f64>, segments: &mut Vec<Segment>, cum: f64, seg: Segment) {
    if cum > *breaks.last().unwrap() {
        breaks.push(cum);
        segments.push(seg);
    }
}

/// Quantile function of a mixture of atoms and possibly overlapping uniform pieces.
fn sweep(atoms: &[Atom], uniform: &[UniformPiece]) -> QuantilePieces {
    let mut atoms = atoms.to_vec();
    atoms.sort_by(|p, q| p.x.total_cmp(&q.x));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if close(last.x, a.x, CANON_TOL) => last.w += a.w,
            _ => merged.push(a),
        }
    }

    let mut events: Vec<f64> = merged.iter().map(|a| a.x).collect();
    for u in uniform {
        events.push(u.a);
        events.push(u.b);
    }
    events.sort_by(f64::total_cmp);
    events.dedup();

    let mut breaks = vec![0.0];
    let mut segments = Vec::new();
    let mut cum = 0.0;
    let mut next_atom = 0;
    for (e, &x) in events.iter().enumerate() {
        if next_atom < merged.len() && merged[next_atom].x == x {
            cum += merged[next_atom].w;
            push_slot(&mut breaks, &mut segments, cum, Segment::constant(x));
            next_atom += 1;
        }
        if let Some(&y) = events.get(e + 1) {
            let density: f64 = uniform
                .iter()
                .filter(|u| u.a <= x && u.b >= y)
                .map(|u| u.density())
                .sum();
            if density > 0.0 {
                cum += density * (y - x);
                push_slot(
                    &mut breaks,
                    &mut segments,
                    cum,
                    Segment { start: x, end: y },
                );
            }
        }
    }
    *breaks.last_mut().unwrap() = 1.0;
    QuantilePieces::from_parts_unchecked(breaks, segments)
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    uniform: Vec<UniformPiece>,
}

impl Serialize for Measure1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson {
            atoms: self.atoms.clone(),
            uniform: self.uniform.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measure1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasureJson::deserialize(d)?;
        Measure1D::new(raw.atoms, raw.uniform).map_err(serde::de::Error::custom)
    }
}

impl Measure1D {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }
}
