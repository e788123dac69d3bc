//! Seeded property batches, shared by the `check` and `curvature` commands.

use rand::Rng;
use serde::Serialize;

use crate::curvature::comparison_defect;
use crate::error::Result;
use crate::isometry1d::{
    exotic_flow, exotic_flow_with, BarycentricSlide, IsometryElement, NeighborMerge, Sign,
};
use crate::measures::Measure1D;
use crate::rank_embed::embed_sorted_tuple;
use crate::rn::{cyclical_monotonicity_check, discrete_ot, solvers, MeasureRn, MARGINAL_TOL};
use crate::sampling::{self, SeededRng};
use crate::transport1d::{geodesic, wasserstein2, wasserstein2_squared};

/// Worst observed error of one property over a batch.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

struct Batch {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
}

impl Batch {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        // NaN counts as a failure
        self.worst = if err.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(err)
        };
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name,
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
        }
    }
}

fn sign(rng: &mut SeededRng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn as_line(mu: &Measure1D) -> Result<MeasureRn> {
    MeasureRn::from_line(mu, &[0.0], &[1.0])
}

/// Runs every property batch with the given seed.
pub fn run_suite(seed: u64) -> Result<Vec<PropertyOutcome>> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::new();
    let registry = solvers();
    let assignment = registry.get("assignment").expect("registered");

    let mut b = Batch::new("distance equals assignment optimum", 1e-9);
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let x = Measure1D::empirical(&sampling::equal_weight(&mut rng, n))?;
        let y = Measure1D::empirical(&sampling::equal_weight(&mut rng, n))?;
        if x.num_atoms() != n || y.num_atoms() != n {
            continue;
        }
        let oracle = assignment.solve(&as_line(&x)?, &as_line(&y)?)?.cost();
        b.record((wasserstein2_squared(&x, &y) - oracle).abs());
    }
    out.push(b.finish());

    let mut sym = Batch::new("symmetry", 1e-12);
    let mut tri = Batch::new("triangle inequality", 1e-9);
    let mut dev = Batch::new("deviation is distance to barycenter", 1e-9);
    for _ in 0..200 {
        let (x, y, z) = (
            sampling::mixed(&mut rng),
            sampling::mixed(&mut rng),
            sampling::mixed(&mut rng),
        );
        let (xy, yz, xz) = (
            wasserstein2(&x, &y),
            wasserstein2(&y, &z),
            wasserstein2(&x, &z),
        );
        sym.record((xy - wasserstein2(&y, &x)).abs());
        tri.record((xz - xy - yz).max(0.0));
        dev.record((wasserstein2(&x, &Measure1D::dirac(x.barycenter())) - x.deviation()).abs());
    }
    out.extend([sym.finish(), tri.finish(), dev.finish()]);

    let mut speed = Batch::new("constant speed along geodesics", 1e-9);
    for _ in 0..100 {
        let (x, y) = (sampling::mixed(&mut rng), sampling::mixed(&mut rng));
        let g = geodesic(&x, &y);
        let (s, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let d = wasserstein2(&g.eval(s)?, &g.eval(t)?);
        speed.record((d - (s - t).abs() * g.speed).abs());
    }
    out.push(speed.finish());

    let mut flat = Batch::new("vanishing comparison defect", 1e-8);
    for _ in 0..250 {
        let (x, y, z) = (
            sampling::mixed(&mut rng),
            sampling::mixed(&mut rng),
            sampling::mixed(&mut rng),
        );
        for t in [0.25, 0.37, 0.5, 0.9] {
            flat.record(comparison_defect(&x, &y, &z, t)?.abs());
        }
    }
    out.push(flat.finish());

    let mut iso = Batch::new("exotic flow preserves distances", 1e-7);
    let mut law = Batch::new("flow law", 1e-7);
    let mut moments = Batch::new("flow preserves barycenter and deviation", 1e-9);
    let mut rules = Batch::new("segment rules agree", 1e-7);
    let mut action = Batch::new("action respects composition", 1e-7);
    for _ in 0..40 {
        let (x, y) = (sampling::atomic(&mut rng, 6), sampling::atomic(&mut rng, 6));
        let (s, t) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (fx, fy) = (exotic_flow(&x, t)?, exotic_flow(&y, t)?);
        iso.record((wasserstein2(&fx, &fy) - wasserstein2(&x, &y)).abs());
        law.record(wasserstein2(
            &exotic_flow(&fx, s)?,
            &exotic_flow(&x, s + t)?,
        ));
        moments.record(
            (fx.barycenter() - x.barycenter())
                .abs()
                .max((fx.deviation() - x.deviation()).abs()),
        );
        rules.record(wasserstein2(
            &exotic_flow_with(&x, t, &NeighborMerge)?,
            &exotic_flow_with(&x, t, &BarycentricSlide)?,
        ));

        let g1 = IsometryElement::new(sign(&mut rng), rng.gen_range(-2.0..2.0), sign(&mut rng), s);
        let g2 = IsometryElement::new(sign(&mut rng), rng.gen_range(-2.0..2.0), sign(&mut rng), t);
        action.record(wasserstein2(
            &g1.apply(&g2.apply(&x)?)?,
            &g1.compose(&g2).apply(&x)?,
        ));
    }
    out.extend([
        iso.finish(),
        law.finish(),
        moments.finish(),
        rules.finish(),
        action.finish(),
    ]);

    let mut mono = Batch::new("optimal plans are cyclically monotone", 0.0);
    let mut marg = Batch::new("plan marginals", MARGINAL_TOL);
    let mut line = Batch::new("plans on a line match the quantile distance", 1e-8);
    for _ in 0..50 {
        let dim = rng.gen_range(1..=3);
        let (x, y) = (
            sampling::atomic_rn(&mut rng, dim, 8),
            sampling::atomic_rn(&mut rng, dim, 8),
        );
        let (plan, _) = discrete_ot(&x, &y)?;
        mono.record(if cyclical_monotonicity_check(&plan).is_some() {
            1.0
        } else {
            0.0
        });
        let mut rows = vec![0.0; x.len()];
        let mut cols = vec![0.0; y.len()];
        for e in plan.entries() {
            rows[e.source] += e.mass;
            cols[e.target] += e.mass;
        }
        let err = rows
            .iter()
            .zip(x.weights())
            .chain(cols.iter().zip(y.weights()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        marg.record(err);

        let (a, c) = (sampling::atomic(&mut rng, 8), sampling::atomic(&mut rng, 8));
        let dir = [0.6, 0.8];
        let (_, cost) = discrete_ot(
            &MeasureRn::from_line(&a, &[1.0, -1.0], &dir)?,
            &MeasureRn::from_line(&c, &[1.0, -1.0], &dir)?,
        )?;
        line.record((cost - wasserstein2_squared(&a, &c)).abs());
    }
    out.extend([mono.finish(), marg.finish(), line.finish()]);

    let mut embed = Batch::new("sorted-tuple embedding is isometric", 1e-9);
    for _ in 0..100 {
        let k = rng.gen_range(1..=10);
        let mut x: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut y: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        let euclid = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        embed.record(
            (wasserstein2(&embed_sorted_tuple(&x)?, &embed_sorted_tuple(&y)?) - euclid).abs(),
        );
    }
    out.push(embed.finish());

    Ok(out)
}

/// One row of the `curvature` command's CSV.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DefectRow {
    pub index: usize,
    pub t: f64,
    pub defect: f64,
}

/// Comparison defects of `count` random triangles on the line, at random `t`.
pub fn random_defects(count: usize, seed: u64) -> Result<Vec<DefectRow>> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|index| {
            let (x, y, z) = (
                sampling::mixed(&mut rng),
                sampling::mixed(&mut rng),
                sampling::mixed(&mut rng),
            );
            let t = rng.gen_range(0.0..=1.0);
            Ok(DefectRow {
                index,
                t,
                defect: comparison_defect(&x, &y, &z, t)?,
            })
        })
        .collect()
}
