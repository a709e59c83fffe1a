//! Boundary geometry probes: supporting functionals, face probes, the real
//! Hessian of defining functions, and orthogonality relations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::domains::{BalancedDomain, CVec};
use crate::error::{Result, RetractError};
use crate::poly::{FloatPoly, MultiPoly};
use crate::sampling::{self, unit_sphere};
use crate::verdict::Decision;

const ON_BOUNDARY_TOL: f64 = 1e-8;

fn check_boundary(d: &BalancedDomain, p: &[Complex64]) -> Result<()> {
    let h = d.minkowski(p)?.value;
    if (h - 1.0).abs() > ON_BOUNDARY_TOL {
        return Err(RetractError::NotOnBoundary { gauge: h });
    }
    Ok(())
}

/// Wirtinger gradient `∂h/∂z_j` of the gauge by central differences.
pub fn gauge_dz(d: &BalancedDomain, p: &[Complex64]) -> CVec {
    let scale = sampling::norm2(p).max(1.0);
    let eps = 1e-6 * scale;
    let mut out = Vec::with_capacity(p.len());
    let mut q = p.to_vec();
    for j in 0..p.len() {
        let mut partial = |delta: Complex64| {
            q[j] = p[j] + delta;
            let a = d.gauge(&q);
            q[j] = p[j] - delta;
            let b = d.gauge(&q);
            q[j] = p[j];
            (a - b) / (2.0 * eps)
        };
        let dx = partial(Complex64::new(eps, 0.0));
        let dy = partial(Complex64::new(0.0, eps));
        out.push(Complex64::new(dx, -dy) / 2.0);
    }
    out
}

/// `L(z) = Σ c_j z_j`.
pub fn apply(c: &[Complex64], z: &[Complex64]) -> Complex64 {
    c.iter().zip(z).map(|(a, b)| a * b).sum()
}

fn normalize_at(c: &[Complex64], p: &[Complex64]) -> Option<CVec> {
    let v = apply(c, p);
    (v.norm() > 1e-12).then(|| c.iter().map(|x| x / v).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityCertificate {
    pub functional: CVec,
    /// Largest `|L(b)|` over the boundary check points.
    pub max_ratio: f64,
    pub check_points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityResult {
    pub decision: Decision,
    pub smooth: bool,
    pub certificate: Option<ConvexityCertificate>,
    /// Boundary point where the best functional exceeds 1 the most.
    pub worst_point: Option<CVec>,
    pub worst_ratio: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 0,
            tol: 1e-6,
        }
    }
}

fn check_points(d: &BalancedDomain, p: &[Complex64], opts: &ProbeOptions) -> Vec<CVec> {
    let mut r = sampling::rng(opts.seed);
    let n = d.dim();
    let mut pts: Vec<CVec> = (0..opts.samples).map(|_| d.sample_boundary(&mut r)).collect();
    for i in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[i] = Complex64::new(1.0, 0.0);
        if let Ok(b) = d.radial_boundary(&e) {
            pts.push(b);
        }
    }
    for eps in [1e-1, 3e-2, 1e-2] {
        for _ in 0..(opts.samples / 8).max(16) {
            let u = unit_sphere(&mut r, n);
            let q: CVec = p.iter().zip(&u).map(|(a, b)| a + b * eps).collect();
            if let Ok(b) = d.radial_boundary(&q) {
                pts.push(b);
            }
        }
    }
    pts
}

fn worst(c: &[Complex64], pts: &[CVec]) -> (f64, usize) {
    pts.iter()
        .enumerate()
        .map(|(i, b)| (apply(c, b).norm(), i))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Decides whether some complex linear functional `L` with `L(p) = 1`
/// satisfies `|L| ≤ h` on the domain.
pub fn convexity_at(d: &BalancedDomain, p: &[Complex64], opts: &ProbeOptions) -> Result<ConvexityResult> {
    check_boundary(d, p)?;
    let smooth = d.is_smooth_at(p);
    let pts = check_points(d, p, opts);
    let grad: CVec = gauge_dz(d, p).into_iter().map(|g| g * 2.0).collect();
    let mut candidates: Vec<CVec> = Vec::new();
    if let Some(c) = normalize_at(&grad, p) {
        candidates.push(c);
    }
    if !smooth {
        let n = p.len();
        let mut normals: Vec<CVec> = candidates.clone();
        for (j, pj) in p.iter().enumerate() {
            if pj.norm() > 1e-9 {
                let mut c = vec![Complex64::new(0.0, 0.0); n];
                c[j] = pj.inv();
                normals.push(c);
            }
        }
        let mut r = sampling::rng(opts.seed ^ 0x9e37_79b9);
        for _ in 0..32 {
            let u = unit_sphere(&mut r, n);
            let q: CVec = p.iter().zip(&u).map(|(a, b)| a + b * 1e-4).collect();
            if let Ok(b) = d.radial_boundary(&q) {
                if d.is_smooth_at(&b) {
                    let g: CVec = gauge_dz(d, &b).into_iter().map(|x| x * 2.0).collect();
                    if let Some(c) = normalize_at(&g, p) {
                        normals.push(c);
                    }
                }
            }
        }
        candidates.extend(normals.iter().cloned());
        for _ in 0..256 {
            let w: Vec<f64> = normals.iter().map(|_| r.random::<f64>().powi(3)).collect();
            let total: f64 = w.iter().sum();
            let mut c = vec![Complex64::new(0.0, 0.0); n];
            for (wi, nv) in w.iter().zip(&normals) {
                for (a, b) in c.iter_mut().zip(nv) {
                    *a += b * (wi / total);
                }
            }
            if let Some(c) = normalize_at(&c, p) {
                candidates.push(c);
            }
        }
    }
    let mut best: Option<(f64, usize, CVec)> = None;
    for c in candidates {
        let (m, i) = worst(&c, &pts);
        if best.as_ref().is_none_or(|b| m < b.0) {
            best = Some((m, i, c));
        }
    }
    let Some((m, i, c)) = best else {
        return Ok(ConvexityResult {
            decision: Decision::Inconclusive,
            smooth,
            certificate: None,
            worst_point: None,
            worst_ratio: f64::NAN,
        });
    };
    let decision = if m <= 1.0 + opts.tol {
        Decision::Yes
    } else if smooth {
        Decision::No
    } else {
        Decision::Inconclusive
    };
    Ok(ConvexityResult {
        decision,
        smooth,
        certificate: (decision == Decision::Yes).then(|| ConvexityCertificate {
            functional: c.clone(),
            max_ratio: m,
            check_points: pts.len(),
        }),
        worst_point: Some(pts[i].clone()),
        worst_ratio: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceProbeMode {
    ComplexDisc,
    RealSegment,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceProbeResult {
    pub point: CVec,
    pub directions_in_face: Vec<CVec>,
    pub radius: f64,
    pub mode: FaceProbeMode,
    pub directions_tried: usize,
}

fn candidate_directions(d: &BalancedDomain, p: &[Complex64], nsamples: usize, seed: u64) -> Vec<CVec> {
    let n = p.len();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut dirs = Vec::new();
    for i in 0..n {
        let mut e = vec![zero; n];
        e[i] = one;
        dirs.push(e);
        for j in i + 1..n {
            for s in [one, -one, Complex64::i(), -Complex64::i()] {
                let mut e = vec![zero; n];
                e[i] = one;
                e[j] = s;
                dirs.push(e);
            }
        }
    }
    // complex tangent directions: kernel of the supporting covector
    let g = gauge_dz(d, p);
    if let Some((k, _)) = g.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())) {
        if g[k].norm() > 1e-12 {
            for j in (0..n).filter(|&j| j != k) {
                let mut e = vec![zero; n];
                e[j] = one;
                e[k] = -g[j] / g[k];
                dirs.push(e);
            }
        }
    }
    let mut r = sampling::rng(seed);
    for _ in 0..nsamples {
        dirs.push(unit_sphere(&mut r, n));
    }
    dirs.into_iter()
        .map(|v| {
            let s = sampling::norm2(&v);
            v.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Searches for analytic (or real) segments through `p` that stay in the boundary.
pub fn c_extremality_probe(
    d: &BalancedDomain,
    p: &[Complex64],
    nsamples: usize,
    radius: f64,
    mode: FaceProbeMode,
    seed: u64,
) -> Result<FaceProbeResult> {
    check_boundary(d, p)?;
    let tol = 1e-9;
    let offsets: Vec<Complex64> = match mode {
        FaceProbeMode::ComplexDisc => [1.0, 0.5, 0.25]
            .iter()
            .flat_map(|&s| (0..16).map(move |k| Complex64::from_polar(radius * s, 2.0 * PI * k as f64 / 16.0)))
            .collect(),
        FaceProbeMode::RealSegment => (1..=8)
            .flat_map(|k| {
                let t = radius * k as f64 / 8.0;
                [Complex64::new(t, 0.0), Complex64::new(-t, 0.0)]
            })
            .collect(),
    };
    let dirs = candidate_directions(d, p, nsamples, seed);
    let tried = dirs.len();
    let in_face: Vec<CVec> = dirs
        .into_iter()
        .filter(|u| {
            offsets.iter().all(|t| {
                let q: CVec = p.iter().zip(u).map(|(a, b)| a + b * t).collect();
                (d.gauge(&q) - 1.0).abs() <= tol
            })
        })
        .collect();
    Ok(FaceProbeResult {
        point: p.to_vec(),
        directions_in_face: in_face,
        radius,
        mode,
        directions_tried: tried,
    })
}

/// Real-valued defining function `r` with the domain `{r < 0}` near the boundary.
#[derive(Clone, Debug)]
pub enum DefiningFunction {
    /// `Σ |z_i|^{q_i} − 1`.
    Egg(Vec<f64>),
    /// `|f|² − 1`.
    PolyModulus(MultiPoly),
}

impl DefiningFunction {
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        match self {
            Self::Egg(q) => z.iter().zip(q).map(|(x, qi)| x.norm().powf(*qi)).sum::<f64>() - 1.0,
            Self::PolyModulus(f) => f.eval_f64(z).norm_sqr() - 1.0,
        }
    }
}

/// `d²/dt² r(p + t v)` at `t = 0`, from exact second partials:
/// `2 (Σ r_{j k̄} v_j v̄_k + Re Σ r_{jk} v_j v_k)`.
pub fn real_hessian(r: &DefiningFunction, p: &[Complex64], v: &[Complex64]) -> Result<f64> {
    if p.len() != v.len() {
        return Err(RetractError::DimensionMismatch {
            expected: p.len(),
            got: v.len(),
        });
    }
    match r {
        DefiningFunction::Egg(q) => {
            if q.len() != p.len() {
                return Err(RetractError::DimensionMismatch {
                    expected: q.len(),
                    got: p.len(),
                });
            }
            let mut herm = 0.0;
            let mut sym = Complex64::new(0.0, 0.0);
            for ((z, vv), &qi) in p.iter().zip(v).zip(q) {
                let a = z.norm();
                if a == 0.0 && qi < 2.0 {
                    return Err(RetractError::Domain(
                        "egg defining function is not C² where a coordinate with exponent < 2 vanishes".into(),
                    ));
                }
                if a == 0.0 {
                    // qi ≥ 2: only the pure |z|² term survives when qi = 2
                    if qi == 2.0 {
                        herm += vv.norm_sqr();
                    }
                    continue;
                }
                herm += qi * qi / 4.0 * a.powf(qi - 2.0) * vv.norm_sqr();
                sym += (qi / 2.0) * (qi / 2.0 - 1.0) * z.conj().powi(2) * a.powf(qi - 4.0) * vv * vv;
            }
            Ok(2.0 * (herm + sym.re))
        }
        DefiningFunction::PolyModulus(f) => {
            let grad: Vec<FloatPoly> = f.gradient().iter().map(MultiPoly::to_float).collect();
            let fp = f.eval_f64(p);
            let df: CVec = grad.iter().map(|g| g.eval(p)).collect();
            if df.iter().all(|x| x.norm() < 1e-12) {
                return Err(RetractError::Domain("gradient vanishes: singular boundary point".into()));
            }
            let dv: Complex64 = df.iter().zip(v).map(|(a, b)| a * b).sum();
            let mut second = Complex64::new(0.0, 0.0);
            for (j, gj) in f.gradient().iter().enumerate() {
                for (k, gjk) in gj.gradient().iter().enumerate() {
                    if !gjk.is_zero() {
                        second += gjk.eval_f64(p) * v[j] * v[k];
                    }
                }
            }
            Ok(2.0 * (dv.norm_sqr() + (fp.conj() * second).re))
        }
    }
}

/// Second central difference of `t ↦ r(p + t v)` at 0.
pub fn finite_difference_hessian(r: &DefiningFunction, p: &[Complex64], v: &[Complex64], step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(RetractError::Invalid(format!("step must be positive, got {step}")));
    }
    let at = |t: f64| -> f64 {
        let q: CVec = p.iter().zip(v).map(|(a, b)| a + b * t).collect();
        r.eval(&q)
    };
    Ok((at(step) - 2.0 * at(0.0) + at(-step)) / (step * step))
}

fn support_sets(vectors: &[Vec<bool>]) -> Option<Vec<Vec<usize>>> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in vectors {
        let s: Vec<usize> = (0..n).filter(|&i| v[i]).collect();
        if s.iter().any(|&i| seen[i]) {
            return None;
        }
        s.iter().for_each(|&i| seen[i] = true);
        out.push(s);
    }
    Some(out)
}

/// Coordinate supports if they are pairwise disjoint.
pub fn disjoint_support(vectors: &[CVec]) -> Result<Option<Vec<Vec<usize>>>> {
    if vectors.iter().any(|v| v.iter().all(|x| *x == Complex64::new(0.0, 0.0))) {
        return Err(RetractError::Invalid("zero vector".into()));
    }
    let masks: Vec<Vec<bool>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| *x != Complex64::new(0.0, 0.0)).collect())
        .collect();
    Ok(support_sets(&masks))
}

pub fn lp_norm(z: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        z.iter().map(|x| x.norm()).fold(0.0, f64::max)
    } else {
        z.iter().map(|x| x.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// The orthogonality grid: 64 angles × moduli {1/4, 1/2, 1, 2}.
pub fn lambda_grid() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(256);
    for m in [0.25, 0.5, 1.0, 2.0] {
        for k in 0..64 {
            out.push(Complex64::from_polar(m, 2.0 * PI * k as f64 / 64.0));
        }
    }
    out
}

/// Checks `‖u + λv‖_p^p = ‖u‖_p^p + |λ|^p ‖v‖_p^p` on the grid (max form for `p = ∞`).
pub fn p_orthogonal(u: &[Complex64], v: &[Complex64], p: f64) -> bool {
    let tol = 1e-10;
    lambda_grid().into_iter().all(|lam| {
        let s: CVec = u.iter().zip(v).map(|(a, b)| a + lam * b).collect();
        if p.is_infinite() {
            let lhs = lp_norm(&s, p);
            let rhs = lp_norm(u, p).max(lam.norm() * lp_norm(v, p));
            (lhs - rhs).abs() <= tol * rhs.max(1.0)
        } else {
            let pow = |z: &[Complex64]| z.iter().map(|x| x.norm().powf(p)).sum::<f64>();
            let lhs = pow(&s);
            let rhs = pow(u) + lam.norm().powf(p) * pow(v);
            (lhs - rhs).abs() <= tol * rhs.max(1.0)
        }
    })
}

/// Minimizes `‖u + λv‖` over λ and reports the minimizer and value.
pub fn bj_minimum(u: &[Complex64], v: &[Complex64], norm: impl Fn(&[Complex64]) -> f64) -> (Complex64, f64) {
    let f = |lam: Complex64| -> f64 {
        let s: CVec = u.iter().zip(v).map(|(a, b)| a + lam * b).collect();
        norm(&s)
    };
    let nv = norm(v);
    if nv == 0.0 {
        return (Complex64::new(0.0, 0.0), norm(u));
    }
    let scale = norm(u) / nv;
    let mut best = (Complex64::new(0.0, 0.0), f(Complex64::new(0.0, 0.0)));
    for m in [1e-3, 1e-2, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0] {
        for k in 0..64 {
            let lam = Complex64::from_polar(m * scale, 2.0 * PI * k as f64 / 64.0);
            let val = f(lam);
            if val < best.1 {
                best = (lam, val);
            }
        }
    }
    // compass search; the objective is convex in λ
    let mut step = 0.1 * scale.max(1e-12);
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(1.0, 1.0) / 2f64.sqrt(),
        Complex64::new(-1.0, 1.0) / 2f64.sqrt(),
        Complex64::new(1.0, -1.0) / 2f64.sqrt(),
        Complex64::new(-1.0, -1.0) / 2f64.sqrt(),
    ];
    while step > 1e-14 * scale.max(1.0) {
        let mut moved = false;
        for d in dirs {
            let lam = best.0 + d * step;
            let val = f(lam);
            if val < best.1 {
                best = (lam, val);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// Birkhoff–James: `‖u + λv‖ ≥ ‖u‖` for every λ.
pub fn bj_orthogonal(u: &[Complex64], v: &[Complex64], p: f64) -> bool {
    let (_, m) = bj_minimum(u, v, |z| lp_norm(z, p));
    m >= lp_norm(u, p) - 1e-9
}

pub fn random_unit_lp(rng: &mut impl Rng, n: usize, p: f64) -> CVec {
    let v = sampling::gaussian_vec(rng, n);
    let s = lp_norm(&v, p);
    v.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::sampling::rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cv(v: &[f64]) -> CVec {
        v.iter().map(|&x| c(x)).collect()
    }

    #[test]
    fn l1_ball_is_convex_at_the_diagonal_point() {
        let d = BalancedDomain::lp(1.0, 2).unwrap();
        let r = convexity_at(&d, &cv(&[0.5, 0.5]), &ProbeOptions::default()).unwrap();
        assert_eq!(r.decision, Decision::Yes);
        let l = r.certificate.unwrap().functional;
        assert!((l[0] - c(1.0)).norm() < 1e-6 && (l[1] - c(1.0)).norm() < 1e-6);
    }

    #[test]
    fn egg_is_not_convex_at_positive_points() {
        let d = BalancedDomain::egg(vec![0.5, 0.5]).unwrap();
        let p = d.radial_boundary(&cv(&[0.3, 0.7])).unwrap();
        let r = convexity_at(&d, &p, &ProbeOptions::default()).unwrap();
        assert_eq!(r.decision, Decision::No);
        assert!(r.worst_ratio > 1.0 + 1e-3);
    }

    #[test]
    fn ball_is_convex_with_the_conjugate_point() {
        let d = BalancedDomain::ball(3);
        let mut g = rng(3);
        for _ in 0..5 {
            let p = d.sample_boundary(&mut g);
            let r = convexity_at(&d, &p, &ProbeOptions::default()).unwrap();
            assert_eq!(r.decision, Decision::Yes);
            let l = r.certificate.unwrap().functional;
            for (a, b) in l.iter().zip(&p) {
                assert!((a - b.conj()).norm() < 1e-6);
            }
        }
        assert!(convexity_at(&d, &cv(&[0.1, 0.0, 0.0]), &ProbeOptions::default()).is_err());
    }

    #[test]
    fn polydisc_corner_is_convex() {
        let d = BalancedDomain::polydisc(2);
        let r = convexity_at(&d, &cv(&[1.0, 1.0]), &ProbeOptions::default()).unwrap();
        assert!(!r.smooth);
        assert_eq!(r.decision, Decision::Yes);
    }

    #[test]
    fn face_probes() {
        let l1 = BalancedDomain::lp(1.0, 2).unwrap();
        let p = cv(&[0.5, 0.5]);
        let r = c_extremality_probe(&l1, &p, 200, 0.1, FaceProbeMode::ComplexDisc, 1).unwrap();
        assert!(r.directions_in_face.is_empty());
        let r = c_extremality_probe(&l1, &p, 200, 0.1, FaceProbeMode::RealSegment, 1).unwrap();
        let s = 0.5f64.sqrt();
        assert!(r
            .directions_in_face
            .iter()
            .any(|u| (u[0] - c(s)).norm() < 1e-12 && (u[1] + c(s)).norm() < 1e-12));
        let pd = BalancedDomain::polydisc(2);
        let r = c_extremality_probe(&pd, &cv(&[1.0, 0.0]), 50, 0.5, FaceProbeMode::ComplexDisc, 1).unwrap();
        assert!(r
            .directions_in_face
            .iter()
            .any(|u| u[0].norm() < 1e-12 && (u[1] - c(1.0)).norm() < 1e-12));
    }

    #[test]
    fn hessian_examples_match_finite_differences() {
        let egg = DefiningFunction::Egg(vec![0.5, 0.5]);
        let p = cv(&[0.25, 0.25]);
        let real = real_hessian(&egg, &p, &cv(&[1.0, -1.0])).unwrap();
        assert!(real < 0.0);
        let imag = real_hessian(&egg, &p, &[Complex64::i(), Complex64::i()]).unwrap();
        assert!(imag > 0.0);
        for (v, h) in [(cv(&[1.0, -1.0]), real), (vec![Complex64::i(), Complex64::i()], imag)] {
            let fd = finite_difference_hessian(&egg, &p, &v, 1e-4).unwrap();
            assert!((fd - h).abs() <= 1e-5 * h.abs(), "{fd} vs {h}");
        }
        let ball = DefiningFunction::Egg(vec![2.0, 2.0]);
        let v = [Complex64::new(0.3, -0.1), Complex64::new(0.2, 0.5)];
        let h = real_hessian(&ball, &cv(&[0.6, 0.8]), &v).unwrap();
        assert!(h > 0.0);
        let fd = finite_difference_hessian(&ball, &cv(&[0.6, 0.8]), &v, 1e-4).unwrap();
        assert!((fd - h).abs() <= 1e-5 * h);
        assert!(finite_difference_hessian(&ball, &p, &v, 0.0).is_err());
        assert!(real_hessian(&egg, &cv(&[1.0, 0.0]), &v).is_err());
    }

    #[test]
    fn polynomial_hessian_matches_finite_differences() {
        let f = parse_poly("z^2 - w^2", 2).unwrap();
        let r = DefiningFunction::PolyModulus(f);
        let p = [Complex64::new(0.9, 0.2), Complex64::new(0.1, -0.3)];
        let v = [Complex64::new(0.4, 0.1), Complex64::new(-0.7, 0.2)];
        let h = real_hessian(&r, &p, &v).unwrap();
        let fd = finite_difference_hessian(&r, &p, &v, 1e-4).unwrap();
        assert!((fd - h).abs() <= 1e-5 * h.abs());
        let r = DefiningFunction::PolyModulus(parse_poly("z*w", 2).unwrap());
        assert!(real_hessian(&r, &cv(&[0.0, 0.0]), &v).is_err());
    }

    #[test]
    fn disjoint_support_examples() {
        let s = disjoint_support(&[cv(&[1.0, 0.0, 0.0]), cv(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(s, Some(vec![vec![0], vec![1]]));
        assert_eq!(disjoint_support(&[cv(&[1.0, -1.0, 1.0]), cv(&[0.0, 1.0, 1.0])]).unwrap(), None);
        assert_eq!(disjoint_support(&[cv(&[0.0, 2.0, 3.0])]).unwrap(), Some(vec![vec![1, 2]]));
        assert!(disjoint_support(&[cv(&[0.0, 0.0])]).is_err());
    }

    #[test]
    fn orthogonality_examples() {
        let u = cv(&[1.0, 0.0, 2.0]);
        let v = cv(&[0.0, 3.0, 0.0]);
        assert!(p_orthogonal(&u, &v, 3.0));
        let a = cv(&[1.0, -1.0, 1.0]);
        let b = cv(&[0.0, 1.0, 1.0]);
        assert!(!p_orthogonal(&a, &b, 3.0));
        // the λ = 1 value, computed independently: 1 + 0 + 8 = 9 versus 3 + 2 = 5
        let s: CVec = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        assert!((s.iter().map(|x| x.norm().powi(3)).sum::<f64>() - 9.0).abs() < 1e-12);
        assert!(p_orthogonal(&a, &cv(&[0.0, 0.0, 0.0]), 3.0));
        assert!(bj_orthogonal(&a, &b, 3.0));
        assert!(bj_orthogonal(&b, &a, 3.0));
        let e1 = cv(&[1.0, 0.0]);
        assert!(!bj_orthogonal(&e1, &e1, 3.0));
    }

    #[test]
    fn lamperti_equivalence_on_random_pairs() {
        let mut g = rng(17);
        for p in [1.0, 3.0, 4.0] {
            for _ in 0..300 {
                let mut u = sampling::gaussian_vec(&mut g, 4);
                let mut v = sampling::gaussian_vec(&mut g, 4);
                for i in 0..4 {
                    match g.random_range(0..3) {
                        0 => u[i] = c(0.0),
                        1 => v[i] = c(0.0),
                        _ => {}
                    }
                }
                if u.iter().all(|x| x.norm() == 0.0) || v.iter().all(|x| x.norm() == 0.0) {
                    continue;
                }
                let disjoint = disjoint_support(&[u.clone(), v.clone()]).unwrap().is_some();
                assert_eq!(p_orthogonal(&u, &v, p), disjoint, "p={p} u={u:?} v={v:?}");
            }
        }
    }
}
