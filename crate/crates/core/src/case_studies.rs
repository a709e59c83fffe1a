//! Worked domains: the nonconvex polyhedron `D_h = {|z² − w²| < 1, |zw| < 2}`,
//! decoupled eggs with exponents below one, rib genericity of polynomial
//! polyhedra and the share of directions admitting linear retracts.
//!
//! On the rib `H = {|z² − w²| = 1, |zw| = 2}` write `z = r e^{iα}`,
//! `w = (2/r) e^{iβ}` and `θ = β − α`. Then `r² + 4/r² = Q(θ) = √(1 + 16cos²θ)`
//! and `r² − 4/r² = ±S(θ)` with `S(θ) = √(1 − 16sin²θ)`, so real points exist
//! only for `sin²θ ≤ 1/16`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::domains::{BalancedDomain, CVec, StratumKind};
use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::geometry::{self, ProbeOptions};
use crate::linalg::{self, ExactMatrix};
use crate::lp::{LinearProjection, LinearSubspace, ProjectionFamily};
use crate::poly::MultiPoly;
use crate::region::Region;
use crate::retraction::verify_self_map;
use crate::sampling;
use crate::verdict::{Decision, Verdict};

/// Tolerance for the modulus and argument conditions of a retract direction.
pub const DIRECTION_TOL: f64 = 1e-8;
/// Tolerance for the rib invariants of [`DhPoint`].
pub const RIB_TOL: f64 = 1e-10;
pub const GENERICITY_THRESHOLD: f64 = 1e-6;
/// Grid size of the rib optimizer before golden-section refinement.
pub const DH_GRID: usize = 4096;

/// `ε₀ ∈ (0, π/2)` with `sin²ε₀ = 1/16`; the admissible angles are
/// `[−π, −π+ε₀] ∪ [−ε₀, ε₀] ∪ [π−ε₀, π]`.
pub fn eps0() -> f64 {
    0.25f64.asin()
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

pub fn dh_admissible(theta: f64) -> bool {
    let s = theta.sin();
    16.0 * s * s <= 1.0 + 1e-12
}

fn check_admissible(theta: f64) -> Result<()> {
    if dh_admissible(theta) {
        Ok(())
    } else {
        Err(RetractError::Domain(format!(
            "angle {theta} has sin² > 1/16; no real rib point"
        )))
    }
}

pub fn dh_q(theta: f64) -> f64 {
    (1.0 + 16.0 * theta.cos().powi(2)).sqrt()
}

pub fn dh_s(theta: f64) -> Result<f64> {
    check_admissible(theta)?;
    Ok((1.0 - 16.0 * theta.sin().powi(2)).max(0.0).sqrt())
}

/// The larger root `r² = (Q + S)/2` of `r² + 4/r² = Q(θ)`.
pub fn dh_r2(theta: f64) -> Result<f64> {
    Ok((dh_q(theta) + dh_s(theta)?) / 2.0)
}

fn branch_r2(theta: f64, plus: bool) -> Result<f64> {
    let (q, s) = (dh_q(theta), dh_s(theta)?);
    Ok(if plus { (q + s) / 2.0 } else { (q - s) / 2.0 })
}

/// `|p̄₁z + p̄₂w|²` along the rib, in closed form: with `A = r₁² + 4/r₁²` and
/// `B = r₁² − 4/r₁²`, `h(θ) = ½[A·Q(θ) + B·S(θ)] + 8cos(θ − θ₀)` on the `+` branch.
///
/// `r1_sq` must satisfy `r₁² + 4/r₁² = Q(θ₀)`.
pub fn dh_h(theta: f64, theta0: f64, r1_sq: f64) -> Result<f64> {
    check_admissible(theta0)?;
    if !(r1_sq > 0.0) || (r1_sq + 4.0 / r1_sq - dh_q(theta0)).abs() > 1e-9 {
        return Err(RetractError::Domain(format!(
            "r₁² = {r1_sq} is not on the rib over θ₀ = {theta0}"
        )));
    }
    closed_form_objective(theta, theta0, r1_sq, true)
}

fn closed_form_objective(theta: f64, theta0: f64, r1_sq: f64, plus: bool) -> Result<f64> {
    let a = r1_sq + 4.0 / r1_sq;
    let b = r1_sq - 4.0 / r1_sq;
    let sign = if plus { 1.0 } else { -1.0 };
    Ok(0.5 * (a * dh_q(theta) + sign * b * dh_s(theta)?) + 8.0 * (theta - theta0).cos())
}

/// The rib point with angle difference `θ`, phase `α` and branch `r² = (Q ± S)/2`.
pub fn rib_point(theta: f64, alpha: f64, plus: bool) -> Result<CVec> {
    let r = branch_r2(theta, plus)?.sqrt();
    Ok(vec![
        Complex64::from_polar(r, alpha),
        Complex64::from_polar(2.0 / r, alpha + theta),
    ])
}

/// A rib point `p = (r₁e^{it₁}, r₂e^{it₂})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DhPoint {
    pub r1: f64,
    pub r2: f64,
    pub t1: f64,
    pub t2: f64,
}

impl DhPoint {
    pub fn new(r1: f64, r2: f64, t1: f64, t2: f64) -> Result<Self> {
        let p = Self { r1, r2, t1, t2 };
        p.validate()?;
        Ok(p)
    }

    pub fn on_rib(theta0: f64, t1: f64, plus: bool) -> Result<Self> {
        let r1 = branch_r2(theta0, plus)?.sqrt();
        Self::new(r1, 2.0 / r1, t1, t1 + theta0)
    }

    pub fn from_point(p: &[Complex64]) -> Result<Self> {
        if p.len() != 2 {
            return Err(RetractError::DimensionMismatch { expected: 2, got: p.len() });
        }
        Self::new(p[0].norm(), p[1].norm(), p[0].arg(), p[1].arg())
    }

    /// The exact rib point with the arguments of `p` and the branch of its larger modulus.
    pub fn nearest(p: &[Complex64]) -> Result<Self> {
        if p.len() != 2 {
            return Err(RetractError::DimensionMismatch { expected: 2, got: p.len() });
        }
        Self::on_rib(wrap(p[1].arg() - p[0].arg()), p[0].arg(), p[0].norm() >= p[1].norm())
    }

    fn validate(&self) -> Result<()> {
        let t0 = self.theta0();
        if !(self.r1 > 0.0 && self.r2 > 0.0) || !dh_admissible(t0) {
            return Err(RetractError::Domain(format!("{self:?} is not on the rib")));
        }
        let prod = (self.r1 * self.r2 - 2.0).abs();
        let sum = (self.r1 * self.r1 + self.r2 * self.r2 - dh_q(t0)).abs();
        if prod > RIB_TOL || sum > RIB_TOL {
            return Err(RetractError::Domain(format!(
                "{self:?} misses the rib: |r₁r₂ − 2| = {prod:e}, |r₁² + r₂² − Q| = {sum:e}"
            )));
        }
        Ok(())
    }

    /// `t₂ − t₁` wrapped to `(−π, π]`.
    pub fn theta0(&self) -> f64 {
        wrap(self.t2 - self.t1)
    }

    pub fn point(&self) -> CVec {
        vec![
            Complex64::from_polar(self.r1, self.t1),
            Complex64::from_polar(self.r2, self.t2),
        ]
    }

    pub fn norm_sq(&self) -> f64 {
        self.r1 * self.r1 + self.r2 * self.r2
    }
}

fn objective(p: &[Complex64], z: &[Complex64]) -> f64 {
    (p[0].conj() * z[0] + p[1].conj() * z[1]).norm_sqr()
}

#[derive(Clone, Debug, Serialize)]
pub struct DhMax {
    pub max: f64,
    pub theta: f64,
    pub plus_branch: bool,
    pub argmax: CVec,
    /// `(|p₁|² + |p₂|²)²`, the value at `z = p`.
    pub value_at_p: f64,
    /// Cauchy–Schwarz cap `|p|² · max_H |z|² = |p|² √17`.
    pub cap: f64,
    pub evaluations: usize,
}

fn admissible_intervals() -> [(f64, f64, usize); 3] {
    let e = eps0();
    let q = DH_GRID / 4;
    [(-PI, -PI + e, q), (-e, e, DH_GRID - 2 * q), (PI - e, PI, q)]
}

/// Maximizes `|p̄₁z + p̄₂w|²` over the rib. The objective does not depend on
/// `α`, so the search runs over `θ` in the admissible set on both branches: a
/// 4096-point grid, then golden-section refinement in the bracketing cell.
pub fn dh_max_objective(p: &DhPoint) -> Result<DhMax> {
    p.validate()?;
    let pv = p.point();
    let f = |theta: f64, plus: bool| -> f64 {
        rib_point(theta, 0.0, plus).map(|z| objective(&pv, &z)).unwrap_or(f64::NEG_INFINITY)
    };
    let mut evals = 0;
    let mut best = (f64::NEG_INFINITY, 0.0, true, 0.0, 0.0);
    for (lo, hi, m) in admissible_intervals() {
        let step = (hi - lo) / (m - 1) as f64;
        for i in 0..m {
            let t = lo + step * i as f64;
            for plus in [true, false] {
                let v = f(t, plus);
                evals += 1;
                if v > best.0 {
                    best = (v, t, plus, (t - step).max(lo), (t + step).min(hi));
                }
            }
        }
    }
    let (mut vbest, mut tbest, plus, mut a, mut b) = best;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c, plus), f(d, plus));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c, plus);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d, plus);
        }
        evals += 1;
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v > vbest {
            vbest = v;
            tbest = t;
        }
    }
    let ns = p.norm_sq();
    Ok(DhMax {
        max: vbest,
        theta: tbest,
        plus_branch: plus,
        argmax: rib_point(tbest, 0.0, plus)?,
        value_at_p: ns * ns,
        cap: ns * 17f64.sqrt(),
        evaluations: evals + 2,
    })
}

/// Largest `max_H |p̄·z|² − |p|²√17` over `n` random rib base points.
pub fn dh_cap_sweep(n: usize, seed: u64) -> Result<f64> {
    let mut r = sampling::rng(seed);
    let e = eps0();
    let bases: Vec<DhPoint> = (0..n)
        .map(|_| {
            let t0 = r.random_range(-e..e) + if r.random_bool(0.5) { 0.0 } else { PI };
            DhPoint::on_rib(wrap(t0), r.random_range(-PI..PI), r.random_bool(0.5))
        })
        .collect::<Result<_>>()?;
    let excess = bases
        .par_iter()
        .map(|p| dh_max_objective(p).map(|m| m.max - m.cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(excess.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionReason {
    Convexity,
    HullObstruction,
    RibClassification,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionVerdict {
    pub direction: CVec,
    pub admits_linear_retract: Decision,
    pub reason: DirectionReason,
    pub verdict: Verdict,
}

/// The modulus and argument conditions `r₁r₂ = 2`, `r₁² − r₂² = ±1`,
/// `t₂ − t₁ ∈ {0, π}`, each within [`DIRECTION_TOL`].
pub fn dh_direction_conditions(p: &[Complex64]) -> bool {
    let (r1, r2) = (p[0].norm(), p[1].norm());
    let t0 = wrap(p[1].arg() - p[0].arg()).abs();
    (r1 * r2 - 2.0).abs() <= DIRECTION_TOL
        && ((r1 * r1 - r2 * r2).abs() - 1.0).abs() <= DIRECTION_TOL
        && (t0.min(PI - t0)) <= DIRECTION_TOL
}

/// The orthogonal projection `z ↦ (⟨z, p⟩/|p|²) p` onto `C·p`, exact in the
/// binary expansion of `p`.
pub fn line_projection(p: &[Complex64]) -> LinearProjection {
    let pe: Vec<ExactComplex> = p.iter().map(|c| ExactComplex::from_c64(*c)).collect();
    let n2 = pe.iter().fold(ExactComplex::zero(), |acc, x| &acc + &ExactComplex::real(x.norm_sqr()));
    let inv = n2.inv().expect("nonzero point");
    let m: ExactMatrix = pe
        .iter()
        .map(|pi| pe.iter().map(|pj| &(pi * &pj.conj()) * &inv).collect())
        .collect();
    LinearProjection::new(m)
}

/// Decides whether the complex line through the boundary point `p` of `D_h`
/// is the image of a linear retraction.
pub fn dh_direction_test(p: &[Complex64], nsamples: usize, seed: u64) -> Result<DirectionVerdict> {
    let d = BalancedDomain::dh();
    let stratum = d.classify_boundary(p, DIRECTION_TOL)?;
    let norm = sampling::norm2(p);
    let direction: CVec = p.iter().map(|x| x / norm).collect();
    let show = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let done = |verdict: Verdict| DirectionVerdict {
        direction: direction.clone(),
        admits_linear_retract: verdict.decision,
        reason: DirectionReason::RibClassification,
        verdict,
    };
    if stratum.kind == StratumKind::OpenFace {
        return Ok(done(Verdict::no(
            "dh.open_face",
            format!("point lies on the open face {}; no linear retract", stratum.active[0]),
            json!({ "point": show(p), "face": stratum.active[0] }),
        )));
    }
    let rib = DhPoint::nearest(p)?;
    if dh_direction_conditions(p) {
        let pr = line_projection(p);
        if !pr.is_idempotent() {
            return Err(RetractError::InternalContradiction("line projection is not idempotent".into()));
        }
        let check = verify_self_map(&pr.to_map(), &Region::from(d), nsamples, seed);
        let evidence = json!({
            "rib_point": rib,
            "projection": pr,
            "self_map": check,
        });
        let verdict = if check.passed() {
            Verdict::yes("dh.retract_direction", "rib conditions hold; λ(z,w)·p maps D_h into itself", evidence)
        } else {
            Verdict::inconclusive("dh.retract_direction", "rib conditions hold but the projection left D_h on samples", evidence)
        };
        return Ok(done(verdict));
    }
    let m = dh_max_objective(&rib)?;
    let threshold = m.value_at_p * (1.0 + 1e-9);
    let evidence = json!({ "rib_point": rib, "optimizer": m, "threshold": threshold });
    let verdict = if m.max > threshold {
        Verdict::no(
            "dh.rib_constraint",
            format!("|p̄·z|² reaches {:.9} > |p|⁴ = {:.9} on the rib", m.max, m.value_at_p),
            evidence,
        )
    } else {
        Verdict::inconclusive("dh.rib_constraint", "optimizer found no excess over |p|⁴", evidence)
    };
    Ok(done(verdict))
}

/// Boundary points of `D_h`: mostly radial projections of sphere samples
/// (open faces), with rib points mixed in, a share of them over `θ₀ ∈ {0, π}`.
pub fn dh_boundary_samples(n: usize, seed: u64) -> Vec<CVec> {
    let d = BalancedDomain::dh();
    let mut r = sampling::rng(seed);
    let e = eps0();
    (0..n)
        .map(|i| {
            let alpha = r.random_range(-PI..PI);
            let plus = r.random_bool(0.5);
            match i % 10 {
                0 => {
                    let t0 = if r.random_bool(0.5) { 0.0 } else { PI };
                    rib_point(t0, alpha, plus).expect("admissible")
                }
                1 | 2 => {
                    let t = r.random_range(-e..e) + if r.random_bool(0.5) { 0.0 } else { PI };
                    rib_point(wrap(t), alpha, plus).expect("admissible")
                }
                _ => d.sample_boundary(&mut r),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HullObstruction {
    pub verdict: Verdict,
    /// Coordinates spanning `L` when it is a coordinate subspace.
    pub coordinates: Option<Vec<usize>>,
    pub projections_tested: usize,
    pub projections_falsified: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct HullOptions {
    pub grid_points: usize,
    pub random_samples: usize,
    pub self_map_samples: usize,
    pub seed: u64,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self {
            grid_points: 2500,
            random_samples: 512,
            self_map_samples: 10_000,
            seed: 0,
        }
    }
}

/// Coordinates `S` with `L = span{e_i : i ∈ S}`, if any.
pub fn coordinate_support(l: &LinearSubspace) -> Option<Vec<usize>> {
    let (rr, pivots) = linalg::rref(&l.basis().to_vec());
    rr.iter()
        .take(l.dim())
        .all(|row| row.iter().filter(|x| !x.is_zero()).count() == 1)
        .then_some(pivots)
}

/// For an egg with all exponents below one, `∂D` meets the boundary of its
/// convex hull only in unimodular multiples of `e_i`, so a linear retract
/// onto `L` exists exactly when `L` is a coordinate subspace. Other subspaces
/// are falsified on a grid of all projections onto `L` with the points
/// `(1−ε)e_i` and random interior samples.
pub fn hull_obstruction_test(d: &BalancedDomain, l: &LinearSubspace, opts: &HullOptions) -> Result<HullObstruction> {
    let BalancedDomain::DecoupledEgg { q } = d else {
        return Err(RetractError::Unsupported("hull obstruction needs a decoupled egg".into()));
    };
    if q.iter().any(|&x| x >= 1.0) {
        return Err(RetractError::Invalid(format!("egg exponents must all be below 1, got {q:?}")));
    }
    let n = q.len();
    if l.ambient() != n {
        return Err(RetractError::DimensionMismatch { expected: n, got: l.ambient() });
    }
    let anchor = "egg.hull_obstruction";
    if let Some(s) = coordinate_support(l) {
        let mut m = linalg::zeros(n, n);
        for &i in &s {
            m[i][i] = ExactComplex::one();
        }
        let pr = LinearProjection::new(m);
        let check = verify_self_map(&pr.to_map(), &Region::from(d.clone()), opts.self_map_samples, opts.seed);
        let evidence = json!({
            "coordinates": s,
            "projection": pr,
            "certificate": "coordinate projection; the egg gauge is nondecreasing in each |z_i|, so h(Pz) ≤ h(z)",
            "sampled_self_map": check,
        });
        let verdict = if check.passed() {
            Verdict::yes(anchor, "coordinate subspace; the coordinate projection is a retraction", evidence)
        } else {
            return Err(RetractError::InternalContradiction(
                "coordinate projection left the egg on samples".into(),
            ));
        };
        return Ok(HullObstruction {
            verdict,
            coordinates: Some(s),
            projections_tested: 0,
            projections_falsified: 0,
        });
    }
    let mut witnesses: Vec<CVec> = Vec::new();
    for i in 0..n {
        for eps in [1e-3, 1e-5, 1e-7] {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[i] = Complex64::new(1.0 - eps, 0.0);
            witnesses.push(e);
        }
    }
    let mut r = sampling::rng(opts.seed);
    witnesses.extend(d.sample_interior(&mut r, opts.random_samples));
    let fam = ProjectionFamily::new(l);
    let grid = fam.grid(opts.grid_points, 3.0);
    // per projection: the witness pushed farthest outside, or None
    let found: Vec<Option<(f64, usize)>> = grid
        .par_iter()
        .map(|params| {
            let phi = fam.coordinates(params);
            witnesses
                .iter()
                .enumerate()
                .map(|(i, z)| (d.gauge(&fam.apply(&phi, z)), i))
                .filter(|(g, _)| *g > 1.0 + 1e-12)
                .fold(None, |acc: Option<(f64, usize)>, x| match acc {
                    Some(a) if a.0 >= x.0 => Some(a),
                    _ => Some(x),
                })
        })
        .collect();
    let falsified = found.iter().filter(|x| x.is_some()).count();
    let hardest = found
        .iter()
        .enumerate()
        .filter_map(|(k, x)| x.map(|(g, i)| (g, i, k)))
        .fold(None, |acc: Option<(f64, usize, usize)>, x| match acc {
            Some(a) if a.0 <= x.0 => Some(a),
            _ => Some(x),
        });
    let show = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let evidence = json!({
        "projections_tested": grid.len(),
        "projections_falsified": falsified,
        "hardest": hardest.map(|(g, i, k)| json!({
            "parameters": grid[k],
            "witness": show(&witnesses[i]),
            "image_gauge": g,
        })),
    });
    let verdict = if falsified == grid.len() {
        Verdict::no(anchor, "not a coordinate subspace; every grid projection maps a domain point outside", evidence)
    } else {
        Verdict::inconclusive(
            anchor,
            format!("not a coordinate subspace, but {} grid projections found no witness", grid.len() - falsified),
            evidence,
        )
    };
    Ok(HullObstruction {
        verdict,
        coordinates: None,
        projections_tested: grid.len(),
        projections_falsified: falsified,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RibProbe {
    pub verdict: Verdict,
    pub points: usize,
    pub min_singular: f64,
}

/// Levenberg–Marquardt on `|f_j|² = |f_k|² = 1` from `z`.
fn project_to_rib(fs: [&crate::poly::FloatPoly; 2], grads: [&[crate::poly::FloatPoly]; 2], z0: CVec) -> Option<CVec> {
    let mut z = z0;
    for _ in 0..100 {
        let vals: Vec<Complex64> = fs.iter().map(|f| f.eval(&z)).collect();
        let g: Vec<f64> = vals.iter().map(|v| v.norm_sqr() - 1.0).collect();
        if g.iter().all(|x| x.abs() < 1e-14) {
            return Some(z);
        }
        // d|f|² along dz is 2 Re⟨dz, c⟩ with c = f·conj(∇f)
        let c: Vec<CVec> = (0..2)
            .map(|m| grads[m].iter().map(|gp| vals[m] * gp.eval(&z).conj()).collect())
            .collect();
        let ip = |a: &CVec, b: &CVec| -> f64 { 2.0 * a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>() };
        let (g00, g01, g11) = (ip(&c[0], &c[0]), ip(&c[0], &c[1]), ip(&c[1], &c[1]));
        let mu = 1e-12 * (g00 + g11);
        let (a, b, dd) = (g00 + mu, g01, g11 + mu);
        let det = a * dd - b * b;
        if !(det.abs() > 0.0) {
            return None;
        }
        let m0 = (-g[0] * dd + g[1] * b) / det;
        let m1 = (-g[1] * a + g[0] * b) / det;
        for (i, zi) in z.iter_mut().enumerate() {
            *zi += c[0][i] * m0 + c[1][i] * m1;
        }
        if z.iter().any(|x| !x.is_finite()) {
            return None;
        }
    }
    None
}

/// Samples the rib `{|f_j| = |f_k| = 1} ∩ ∂D` and reports the smallest
/// singular value of the row-normalized complex Jacobian of `(f_j, f_k)`.
pub fn rib_genericity_probe(d: &BalancedDomain, j: usize, k: usize, nsamples: usize, seed: u64) -> Result<RibProbe> {
    let BalancedDomain::PolyPolyhedron(ph) = d else {
        return Err(RetractError::Unsupported("rib probes need a polynomial polyhedron".into()));
    };
    let m = ph.defs().len();
    if j == k || j >= m || k >= m {
        return Err(RetractError::Invalid(format!("need two distinct faces below {m}, got {j}, {k}")));
    }
    let fs = [&ph.shadows()[j], &ph.shadows()[k]];
    let gj: Vec<_> = ph.defs()[j].gradient().iter().map(MultiPoly::to_float).collect();
    let gk: Vec<_> = ph.defs()[k].gradient().iter().map(MultiPoly::to_float).collect();
    let mut r = sampling::rng(seed);
    let mut min_sv = f64::INFINITY;
    let mut worst: Option<CVec> = None;
    let mut points = 0;
    let mut attempts = 0;
    while points < nsamples && attempts < 50 * nsamples + 100 {
        attempts += 1;
        let start = d.sample_boundary(&mut r);
        let Some(z) = project_to_rib(fs, [&gj, &gk], start) else { continue };
        if ph.face_levels(&z).iter().any(|&l| l > 1.0 + 1e-9) {
            continue;
        }
        let rows: Vec<CVec> = [&gj, &gk]
            .iter()
            .map(|g| g.iter().map(|p| p.eval(&z)).collect())
            .collect();
        let norms: Vec<f64> = rows.iter().map(|v| sampling::norm2(v)).collect();
        if norms.iter().any(|&x| x < 1e-9) {
            continue;
        }
        let unit: Vec<CVec> = rows
            .iter()
            .zip(&norms)
            .map(|(v, &nv)| v.iter().map(|x| x / nv).collect())
            .collect();
        let sv = linalg::smallest_singular_2xn([&unit[0], &unit[1]]);
        if sv < min_sv {
            min_sv = sv;
            worst = Some(z.clone());
        }
        points += 1;
    }
    if points == 0 {
        return Err(RetractError::Domain(format!("no rib points found for faces {j}, {k}")));
    }
    let show = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let evidence = json!({
        "faces": [j, k],
        "points": points,
        "min_singular": min_sv,
        "threshold": GENERICITY_THRESHOLD,
        "worst_point": worst.as_deref().map(show),
    });
    let anchor = "polyhedron.rib_genericity";
    let verdict = if min_sv > GENERICITY_THRESHOLD {
        Verdict::yes(anchor, format!("gradients independent on {points} rib points (min σ = {min_sv:.3e})"), evidence)
    } else {
        Verdict::no(anchor, format!("degenerate rib: σ = {min_sv:.3e}"), evidence)
    };
    Ok(RibProbe {
        verdict,
        points,
        min_singular: min_sv,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OpenPieceMeasure {
    pub fraction: f64,
    pub directions: usize,
    pub hits: usize,
    pub criterion: DirectionReason,
    /// Boundary points of the first few passing directions.
    pub sample_hits: Vec<CVec>,
}

/// Whether `d` is `D_h` with its standard defining functions.
pub fn is_dh(d: &BalancedDomain) -> bool {
    match (d, BalancedDomain::dh()) {
        (BalancedDomain::PolyPolyhedron(a), BalancedDomain::PolyPolyhedron(b)) => a.defs() == b.defs(),
        _ => false,
    }
}

fn on_axis(b: &[Complex64]) -> bool {
    let m = sampling::norm2(b);
    b.iter().filter(|x| x.norm() > 1e-12 * m).count() == 1
}

/// Share of grid directions whose boundary point passes the retract test
/// for the domain's kind: coordinate axes for eggs with exponents below
/// one, the rib conditions for `D_h`, and supporting functionals otherwise.
pub fn open_piece_measure(d: &BalancedDomain, ndirs: usize, seed: u64, probe: &ProbeOptions) -> Result<OpenPieceMeasure> {
    let egg_below_one = matches!(d, BalancedDomain::DecoupledEgg { q } if q.iter().all(|&x| x < 1.0));
    let dh = is_dh(d);
    let criterion = if egg_below_one {
        DirectionReason::HullObstruction
    } else if dh {
        DirectionReason::RibClassification
    } else {
        DirectionReason::Convexity
    };
    let grid = sampling::direction_grid(d.dim(), ndirs, seed);
    let convex = |b: &CVec| -> Result<bool> { Ok(geometry::convexity_at(d, b, probe)?.decision == Decision::Yes) };
    let hits: Vec<Option<CVec>> = grid
        .par_iter()
        .map(|u| -> Result<Option<CVec>> {
            let b = d.radial_boundary(u)?;
            let pass = match criterion {
                DirectionReason::HullObstruction => on_axis(&b) && convex(&b)?,
                DirectionReason::RibClassification => {
                    let s = d.classify_boundary(&b, DIRECTION_TOL)?;
                    s.kind == StratumKind::Rib && dh_direction_conditions(&b) && convex(&b)?
                }
                DirectionReason::Convexity => convex(&b)?,
            };
            Ok(pass.then_some(b))
        })
        .collect::<Result<_>>()?;
    let passing: Vec<CVec> = hits.into_iter().flatten().collect();
    Ok(OpenPieceMeasure {
        fraction: passing.len() as f64 / grid.len().max(1) as f64,
        directions: grid.len(),
        hits: passing.len(),
        criterion,
        sample_hits: passing.into_iter().take(8).collect(),
    })
}

fn binomial(n: u32, k: u32) -> ExactComplex {
    let mut b = BigInt::from(1);
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    ExactComplex::real(b.into())
}

/// Decides exactly whether a binary form is `(az + bw)^d`.
pub fn line_power_test(f: &MultiPoly) -> Result<Verdict> {
    if f.nvars() != 2 {
        return Err(RetractError::DimensionMismatch { expected: 2, got: f.nvars() });
    }
    let Some(d) = f.degree() else {
        return Err(RetractError::Invalid("zero polynomial".into()));
    };
    if !f.is_homogeneous() {
        return Err(RetractError::Invalid(format!("{f} is not homogeneous")));
    }
    let anchor = "polyhedron.power_of_linear";
    let c = |k: u32| f.coeff(&[k, d - k]);
    let cd = c(d);
    let (holds, form) = if d == 0 {
        (true, None)
    } else if cd.is_zero() {
        // a = 0 forces f = c₀ w^d
        (f.num_terms() == 1 && !c(0).is_zero(), Some((ExactComplex::zero(), ExactComplex::one())))
    } else {
        // f(x, 1) = c_d (x − ρ)^d with ρ = −c_{d−1} / (d c_d)
        let rho = -(&c(d - 1) / &(&cd * &ExactComplex::from_int(d as i64)));
        let neg = -rho.clone();
        let ok = (0..=d).all(|k| c(k) == &(&cd * &binomial(d, k)) * &neg.pow(d - k));
        (ok, Some((ExactComplex::one(), neg)))
    };
    let evidence = json!({
        "degree": d,
        "linear_form": form.filter(|_| holds).map(|(a, b)| [a.to_string(), b.to_string()]),
    });
    Ok(if holds {
        Verdict::yes(anchor, format!("{f} is a power of a linear form"), evidence)
    } else {
        Verdict::no(anchor, format!("{f} has more than one distinct root"), evidence)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegerGate {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// `8⁶ · 15 > 1921²`, in exact integers.
pub fn integer_gate() -> IntegerGate {
    let lhs = BigInt::from(8).pow(6) * BigInt::from(15);
    let rhs = BigInt::from(1921).pow(2);
    IntegerGate {
        holds: lhs > rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// `|cos²(ε₀/2) − (1 + √15/4)/2|`.
pub fn half_angle_defect() -> f64 {
    ((eps0() / 2.0).cos().powi(2) - (1.0 + 15f64.sqrt() / 4.0) / 2.0).abs()
}

#[derive(Clone, Debug, Serialize)]
pub struct DhConstant {
    pub anchor: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tol: f64,
    pub holds: bool,
}

fn constant(anchor: &'static str, value: f64, expected: f64, tol: f64) -> DhConstant {
    DhConstant {
        anchor,
        value,
        expected,
        tol,
        holds: (value - expected).abs() <= tol,
    }
}

/// The closed-form constants of `D_h` against their expected values.
pub fn dh_constants() -> Result<Vec<DhConstant>> {
    let e = eps0();
    let s17 = 17f64.sqrt();
    let max0 = dh_max_objective(&DhPoint::on_rib(0.0, 0.0, true)?)?.max;
    let max_pi = dh_max_objective(&DhPoint::on_rib(PI, 0.0, true)?)?.max;
    let h_half = dh_h(e / 2.0, e, dh_r2(e)?)?;
    Ok(vec![
        constant("dh.q_at_zero", dh_q(0.0), s17, 1e-12),
        constant("dh.r1_squared", dh_r2(0.0)?, (1.0 + s17) / 2.0, 1e-12),
        constant("dh.h_at_eps0", dh_h(e, e, dh_r2(e)?)?, 16.0, 1e-10),
        DhConstant {
            anchor: "dh.h_at_half_eps0",
            value: h_half,
            expected: 16.0,
            tol: 0.0,
            holds: h_half > 16.0,
        },
        constant("dh.max_at_theta0_zero", max0, 17.0, 1e-6),
        constant("dh.max_at_theta0_pi", max_pi, 17.0, 1e-6),
        constant("dh.half_angle", half_angle_defect(), 0.0, 1e-12),
    ])
}
