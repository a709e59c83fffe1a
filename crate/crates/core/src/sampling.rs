//! Seeded sampling: sphere directions, quasi-uniform S³ lattices, moduli.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`; used to give each parallel
/// task its own generator.
pub fn rng_stream(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_c(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| gaussian_c(rng)).collect()
}

pub fn norm2(z: &[Complex64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Uniform point on the Euclidean unit sphere of C^n.
pub fn unit_sphere(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v = gaussian_vec(rng, n);
        let r = norm2(&v);
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

pub fn unimodular(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// Quasi-uniform lattice on the unit sphere S³ ⊂ C²: `|w|² = (i + ½)/n`,
/// phases advanced by golden-ratio and plastic-number rotations from a seeded
/// offset.
pub fn fibonacci_s3(n: usize, seed: u64) -> Vec<[Complex64; 2]> {
    let mut r = rng(seed);
    let off1: f64 = r.random();
    let off2: f64 = r.random();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let plastic = 1.324_717_957_244_746_f64;
    (0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) / n as f64;
            let a = 2.0 * PI * (off1 + i as f64 / phi).fract();
            let b = 2.0 * PI * (off2 + i as f64 / (plastic * plastic)).fract();
            [
                Complex64::from_polar((1.0 - s).sqrt(), a),
                Complex64::from_polar(s.sqrt(), b),
            ]
        })
        .collect()
}

/// Direction grid for C^n: the S³ lattice for n = 2, seeded Gaussian directions otherwise.
pub fn direction_grid(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    if n == 2 {
        return fibonacci_s3(count, seed)
            .into_iter()
            .map(|p| p.to_vec())
            .collect();
    }
    let mut r = rng(seed);
    (0..count).map(|_| unit_sphere(&mut r, n)).collect()
}

/// Radial parameter in [0, 1): a mix of volume-like draws and draws that
/// accumulate at the boundary.
pub fn radial_parameter(rng: &mut impl Rng, dim: usize) -> f64 {
    let u: f64 = rng.random();
    if rng.random_bool(0.3) {
        1.0 - 10f64.powf(-1.0 - 8.0 * u)
    } else {
        u.powf(1.0 / (2 * dim) as f64)
    }
}
