//! Seeded random instances for property batches.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::measures::{Atom, Measure1D, UniformPiece};
use crate::rn::MeasureRn;

pub use rand::SeedableRng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normalized(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let drift = 1.0 - w.iter().sum::<f64>();
    let last = w.len() - 1;
    w[last] += drift;
    w
}

/// `1..=max_atoms` distinct atoms in `[-5, 5]` with random weights.
pub fn atomic(rng: &mut SeededRng, max_atoms: usize) -> Measure1D {
    let n = rng.gen_range(1..=max_atoms);
    atomic_exact(rng, n)
}

/// Exactly `n` atoms in `[-5, 5]` with random weights bounded away from zero.
pub fn atomic_exact(rng: &mut SeededRng, n: usize) -> Measure1D {
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let ws = normalized((0..n).map(|_| rng.gen_range(0.1..1.0)).collect());
    Measure1D::new(
        xs.into_iter().zip(ws).map(|(x, w)| Atom { x, w }).collect(),
        Vec::new(),
    )
    .expect("valid random measure")
}

/// `n` equal-weight atoms in `[-5, 5]`.
pub fn equal_weight(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()
}

/// A mixture of up to four atoms and up to two uniform pieces.
pub fn mixed(rng: &mut SeededRng) -> Measure1D {
    let n_atoms = rng.gen_range(0..=4);
    let n_unif = if n_atoms == 0 {
        rng.gen_range(1..=2)
    } else {
        rng.gen_range(0..=2)
    };
    let ws = normalized(
        (0..n_atoms + n_unif)
            .map(|_| rng.gen_range(0.1..1.0))
            .collect(),
    );
    let atoms = (0..n_atoms)
        .map(|i| Atom {
            x: rng.gen_range(-5.0..5.0),
            w: ws[i],
        })
        .collect();
    let uniform = (0..n_unif)
        .map(|i| {
            let a = rng.gen_range(-5.0..4.0);
            UniformPiece {
                a,
                b: a + rng.gen_range(0.1..3.0),
                mass: ws[n_atoms + i],
            }
        })
        .collect();
    Measure1D::new(atoms, uniform).expect("valid random measure")
}

/// `1..=max_points` points in `[-3, 3]ⁿ` with random weights.
pub fn atomic_rn(rng: &mut SeededRng, dim: usize, max_points: usize) -> MeasureRn {
    let n = rng.gen_range(1..=max_points);
    let points = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    let weights = normalized((0..n).map(|_| rng.gen_range(0.1..1.0)).collect());
    MeasureRn::new(dim, points, weights).expect("valid random measure")
}
