//! Retraction maps: exact idempotency, sampled self-map checks, and the
//! standard constructions (graphs over linear retracts, the bidisc family with
//! a line image, extension across analytic sets, hyperbola slices).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::domains::{BalancedDomain, CVec};
use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::linalg::{self, ExactMatrix};
use crate::lp::LinearProjection;
use crate::poly::MultiPoly;
use crate::polymap::PolyMap;
use crate::region::{NamedRegion, Region};
use crate::sampling::{self, gaussian_vec};
use crate::verdict::Verdict;

/// `F ∘ F = F`, decided exactly. Non-square maps are never idempotent.
pub fn verify_idempotent(f: &PolyMap) -> bool {
    if !f.is_square() || crate::modular::idempotency_screen(f, 4, 0) == Some(false) {
        return false;
    }
    f.compose(f).is_ok_and(|ff| &ff == f)
}

#[derive(Clone, Debug, Serialize)]
pub struct RetractionCandidate {
    pub map: PolyMap,
    #[serde(serialize_with = "region_name")]
    pub region: Region,
}

fn region_name<S: serde::Serializer>(r: &Region, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl RetractionCandidate {
    pub fn new(map: PolyMap, region: impl Into<Region>) -> Result<Self> {
        let region = region.into();
        if !map.is_square() || map.domain_dim() != region.dim() {
            return Err(RetractError::DimensionMismatch {
                expected: region.dim(),
                got: map.target_dim(),
            });
        }
        Ok(Self { map, region })
    }

    pub fn is_idempotent(&self) -> bool {
        verify_idempotent(&self.map)
    }

    pub fn verify_self_map(&self, nsamples: usize, seed: u64) -> Verdict {
        verify_self_map(&self.map, &self.region, nsamples, seed)
    }
}

/// Images within this distance of the boundary are flagged as accumulating there.
pub const BOUNDARY_MARGIN: f64 = 1e-6;
pub const SELF_MAP_TOL: f64 = 1e-9;

/// Largest level of `F(z)` over seeded interior samples, with the worst witness.
pub fn verify_self_map(f: &PolyMap, region: &Region, nsamples: usize, seed: u64) -> Verdict {
    let anchor = "retraction.self_map";
    if f.domain_dim() != region.dim() || f.target_dim() != region.dim() {
        return Verdict::no(anchor, "map dimension does not match the region", json!({}));
    }
    let fm = f.to_float();
    let mut r = sampling::rng(seed);
    let samples = region.sample_interior(&mut r, nsamples);
    let (worst, z, img) = samples
        .par_iter()
        .map(|z| {
            let img = fm.eval(z);
            let mut lvl = region.level(&img);
            if !lvl.is_finite() || (lvl < 1.0 && !region.contains(&img)) {
                lvl = f64::INFINITY;
            }
            (lvl, z.clone(), img)
        })
        .reduce(
            || (f64::NEG_INFINITY, vec![], vec![]),
            |a, b| if b.0 > a.0 { b } else { a },
        );
    let show = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let evidence = json!({
        "samples": nsamples,
        "seed": seed,
        "sup_level": if worst.is_finite() { json!(worst) } else { json!("inf") },
        "witness": show(&z),
        "witness_image": show(&img),
        "boundary_accumulation": worst > 1.0 - BOUNDARY_MARGIN,
    });
    if worst <= 1.0 + SELF_MAP_TOL {
        let note = if worst > 1.0 - BOUNDARY_MARGIN {
            " (images accumulate at the boundary)"
        } else {
            ""
        };
        Verdict::yes(anchor, format!("maps {region} into itself on samples{note}"), evidence)
    } else {
        Verdict::no(anchor, format!("sample leaves {region}: level {worst:.6}"), evidence)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphRetract {
    pub projection: LinearProjection,
    pub graph_map: PolyMap,
    /// `ψ(z) = P z + (I − P) φ(P z)`.
    pub map: PolyMap,
}

/// Retraction onto the graph of `φ` over the image of `P`.
///
/// Only the part of `φ` lying in `ker P` is used, which makes the assembled map
/// idempotent for every polynomial `φ`.
pub fn graph_retraction(
    p: &LinearProjection,
    phi: &PolyMap,
    d: &Region,
    nsamples: usize,
    seed: u64,
) -> Result<(GraphRetract, Verdict)> {
    let n = p.dim();
    if !p.is_idempotent() {
        return Err(RetractError::Invalid("projection is not idempotent".into()));
    }
    if phi.domain_dim() != n || phi.target_dim() != n || d.dim() != n {
        return Err(RetractError::DimensionMismatch {
            expected: n,
            got: phi.target_dim(),
        });
    }
    let pm = p.to_map();
    let comp = linalg::sub(&linalg::identity(n), p.matrix());
    let vertical = PolyMap::linear(&comp).compose(phi)?.compose(&pm)?;
    let map = PolyMap::new(
        n,
        pm.components()
            .iter()
            .zip(vertical.components())
            .map(|(a, b)| a + b)
            .collect(),
    )?;
    if !verify_idempotent(&map) {
        return Err(RetractError::InternalContradiction("assembled graph map is not idempotent".into()));
    }
    let verdict = verify_self_map(&map, d, nsamples, seed);
    Ok((
        GraphRetract {
            projection: p.clone(),
            graph_map: phi.clone(),
            map,
        },
        verdict,
    ))
}

/// Exactly unimodular rational point near `e^{iθ}`: exact at multiples of π/2,
/// otherwise the stereographic image of a rational `tan(θ/2)`.
pub fn unimodular_exact(theta: f64) -> ExactComplex {
    let quarter = theta / std::f64::consts::FRAC_PI_2;
    if (quarter - quarter.round()).abs() < 1e-12 {
        return match (quarter.round() as i64).rem_euclid(4) {
            0 => ExactComplex::one(),
            1 => ExactComplex::i(),
            2 => ExactComplex::from_int(-1),
            _ => -ExactComplex::i(),
        };
    }
    let s = ExactComplex::from_f64((theta / 2.0).tan(), 0.0);
    let s2 = &s * &s;
    let one = ExactComplex::one();
    let num = &(&one - &s2) + &(&(&s * &ExactComplex::i()) * &ExactComplex::from_int(2));
    &num / &(&one + &s2)
}

/// Best-fit complex line through the origin and the largest relative distance
/// of a point from it. The direction is scaled to first coordinate 1 when possible.
pub fn fit_line(points: &[CVec]) -> (CVec, f64) {
    let n = points.first().map_or(0, Vec::len);
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for p in points {
        for i in 0..n {
            for j in 0..n {
                m[i][j] += p[i] * p[j].conj();
            }
        }
    }
    let mut d: CVec = (0..n).map(|i| Complex64::new(1.0 + i as f64 * 0.37, 0.11 * i as f64)).collect();
    for _ in 0..500 {
        let nd = linalg::cmat_vec(&m, &d);
        let s = sampling::norm2(&nd);
        if s == 0.0 {
            break;
        }
        d = nd.into_iter().map(|x| x / s).collect();
    }
    let residual = points
        .iter()
        .map(|p| {
            let c: Complex64 = p.iter().zip(&d).map(|(a, b)| a * b.conj()).sum();
            let r: CVec = p.iter().zip(&d).map(|(a, b)| a - c * b).collect();
            sampling::norm2(&r) / sampling::norm2(p).max(1.0)
        })
        .fold(0.0, f64::max);
    if d[0].norm() > 1e-12 {
        let d0 = d[0];
        d = d.into_iter().map(|x| x / d0).collect();
    }
    (d, residual)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeathSuffridge {
    pub candidate: RetractionCandidate,
    pub sup_f: f64,
    pub bound: f64,
    pub fitted_direction: [[f64; 2]; 2],
    pub line_residual: f64,
}

/// `F(z, w) = [(1−t) z + t u w + (z − u w)² f(z, w)] (1, ū)` on the bidisc, with
/// `u` exactly unimodular. The image is the line through `(1, ū)` for every `f`.
pub fn heath_suffridge(t: &ExactComplex, u: &ExactComplex, f: &MultiPoly, nsamples: usize, seed: u64) -> Result<HeathSuffridge> {
    let tf = t.to_c64();
    if !t.is_real() || !(tf.re > 0.0 && tf.re < 1.0) {
        return Err(RetractError::Invalid("t must be real in (0, 1)".into()));
    }
    if !u.norm_sqr().is_integer() || u.norm_sqr() != num_rational::BigRational::from_integer(1.into()) {
        return Err(RetractError::Invalid("u must be unimodular".into()));
    }
    if f.nvars() != 2 {
        return Err(RetractError::DimensionMismatch {
            expected: 2,
            got: f.nvars(),
        });
    }
    let bound = tf.re * (1.0 - tf.re) / 2.0;
    let ff = f.to_float();
    let mut r = sampling::rng(seed);
    let bidisc = BalancedDomain::polydisc(2);
    let mut sup_f: f64 = 0.0;
    for k in 0..nsamples {
        let p = if k % 2 == 0 {
            vec![sampling::unimodular(&mut r), sampling::unimodular(&mut r)]
        } else {
            bidisc.sample_interior(&mut r, 1).remove(0)
        };
        sup_f = sup_f.max(ff.eval(&p).norm());
    }
    if sup_f > bound + 1e-12 {
        return Err(RetractError::Invalid(format!(
            "sup |f| ≈ {sup_f:.6} exceeds t(1−t)/2 = {bound:.6}"
        )));
    }
    let z = MultiPoly::var(2, 0);
    let w = MultiPoly::var(2, 1);
    let one = ExactComplex::one();
    let uw = w.scale(u);
    let diff = &z - &uw;
    let g = &(&z.scale(&(&one - t)) + &uw.scale(t)) + &(&(&diff * &diff) * f);
    let map = PolyMap::new(2, vec![g.clone(), g.scale(&u.conj())])?;
    if !verify_idempotent(&map) {
        return Err(RetractError::InternalContradiction("bidisc family map is not idempotent".into()));
    }
    let fm = map.to_float();
    let imgs: Vec<CVec> = (0..nsamples.max(16))
        .map(|_| fm.eval(&bidisc.sample_interior(&mut r, 1)[0]))
        .filter(|p| sampling::norm2(p) > 1e-8)
        .collect();
    let (dir, line_residual) = fit_line(&imgs);
    Ok(HeathSuffridge {
        candidate: RetractionCandidate::new(map, bidisc)?,
        sup_f,
        bound,
        fitted_direction: [[dir[0].re, dir[0].im], [dir[1].re, dir[1].im]],
        line_residual,
    })
}

/// Points in `D` on or near the zero set of `a`, found by Newton steps along
/// random complex lines.
fn samples_near_zero_set(a: &MultiPoly, d: &BalancedDomain, n: usize, seed: u64) -> Vec<CVec> {
    let fa = a.to_float();
    let grad: Vec<_> = a.gradient().iter().map(MultiPoly::to_float).collect();
    let mut r = sampling::rng(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n && attempts < 20 * n {
        attempts += 1;
        let mut z = d.sample_interior(&mut r, 1).remove(0);
        let v = gaussian_vec(&mut r, z.len());
        for _ in 0..40 {
            let val = fa.eval(&z);
            let dv: Complex64 = grad.iter().zip(&v).map(|(g, vi)| g.eval(&z) * vi).sum();
            if dv.norm() < 1e-14 {
                break;
            }
            let s = val / dv;
            z.iter_mut().zip(&v).for_each(|(x, vi)| *x -= s * vi);
            if s.norm() < 1e-15 {
                break;
            }
        }
        if fa.eval(&z).norm() < 1e-10 && d.gauge(&z) < 1.0 {
            for eps in [0.0, 1e-8, 1e-4] {
                let e = gaussian_vec(&mut r, z.len());
                let p: CVec = z.iter().zip(&e).map(|(x, y)| x + y * eps).collect();
                if d.gauge(&p) < 1.0 {
                    out.push(p);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Extension {
    pub candidate: RetractionCandidate,
    pub verdict: Verdict,
    pub points_near_set: usize,
}

/// Extends a polynomial retraction of `D ∖ {a = 0}` across the analytic set.
/// The extension is the same polynomial; what is checked is that it still maps
/// `D` into `D`, including near the removed set.
pub fn extend_from_complement(f: &PolyMap, d: &BalancedDomain, a: &MultiPoly, nsamples: usize, seed: u64) -> Result<Extension> {
    if a.nvars() != d.dim() {
        return Err(RetractError::DimensionMismatch {
            expected: d.dim(),
            got: a.nvars(),
        });
    }
    if a.is_constant() {
        return Err(RetractError::Invalid("removed set must be a proper analytic subset".into()));
    }
    let candidate = RetractionCandidate::new(f.clone(), d.clone())?;
    if !candidate.is_idempotent() {
        return Err(RetractError::Invalid("map is not idempotent".into()));
    }
    let fm = f.to_float();
    let near = samples_near_zero_set(a, d, nsamples.div_ceil(4).max(8), seed ^ 0x5eed);
    let worst_near = near
        .iter()
        .map(|z| (d.gauge(&fm.eval(z)), z))
        .max_by(|x, y| x.0.total_cmp(&y.0));
    if let Some((lvl, z)) = worst_near {
        if lvl > 1.0 + SELF_MAP_TOL {
            return Err(RetractError::Domain(format!(
                "map leaves the domain near the removed set (level {lvl:.6} at {z:?}); a bounded self-map of the complement is required"
            )));
        }
    }
    let verdict = candidate.verify_self_map(nsamples, seed);
    if !verdict.passed() {
        return Err(RetractError::Domain(format!(
            "map is not a self-map of the domain: {}",
            verdict.summary
        )));
    }
    Ok(Extension {
        candidate,
        verdict,
        points_near_set: near.len(),
    })
}

/// `(zw/b, b)` on `{|zw| < c}`; for `b = 0` the coordinate projection `(z, 0)`.
pub fn hyperbola_retraction(b: &ExactComplex, c: f64) -> Result<RetractionCandidate> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(RetractError::Invalid("hyperbola level must be positive".into()));
    }
    let z = MultiPoly::var(2, 0);
    let w = MultiPoly::var(2, 1);
    let map = match b.inv() {
        None => PolyMap::new(2, vec![z, MultiPoly::zero(2)])?,
        Some(binv) => PolyMap::new(2, vec![(&z * &w).scale(&binv), MultiPoly::constant(2, b.clone())])?,
    };
    RetractionCandidate::new(map, NamedRegion::HyperbolaRegion { c })
}

/// Jacobian of `f` at `p`.
pub fn jacobian_at(f: &PolyMap, p: &[ExactComplex]) -> Result<ExactMatrix> {
    f.jacobian()
        .iter()
        .map(|row| row.iter().map(|g| g.eval(p)).collect())
        .collect()
}

/// Rank of the derivative at `p`, compared with the rank at a generic point of
/// the image; a drop certifies the retraction is not a submersion there.
pub fn is_submersive_at(f: &PolyMap, p: &[ExactComplex]) -> Result<bool> {
    let generic: Vec<ExactComplex> = (0..f.domain_dim())
        .map(|i| ExactComplex::rational(3 + 2 * i as i64, 7 + i as i64))
        .collect();
    let image_rank = linalg::rank(&jacobian_at(f, &generic)?);
    Ok(linalg::rank(&jacobian_at(f, p)?) == image_rank)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum CxDeltaClass {
    Identity,
    Constant,
    /// `(z + w h(z, w), 0)`.
    FormA { h: MultiPoly },
    /// `(h(w), w)`.
    FormB { h: MultiPoly },
}

/// Classifies a polynomial retraction of `C × Δ` fixing the origin.
pub fn cxdelta_normal_form_check(f: &PolyMap) -> Result<CxDeltaClass> {
    if f.domain_dim() != 2 || !f.is_square() {
        return Err(RetractError::DimensionMismatch {
            expected: 2,
            got: f.target_dim(),
        });
    }
    if f.constant_part().iter().any(|c| !c.is_zero()) {
        return Err(RetractError::Invalid("map does not fix the origin".into()));
    }
    if !verify_idempotent(f) {
        return Err(RetractError::Invalid("map is not idempotent".into()));
    }
    if f.is_identity() {
        return Ok(CxDeltaClass::Identity);
    }
    if f.is_constant() {
        return Ok(CxDeltaClass::Constant);
    }
    let (f1, f2) = (f.component(0), f.component(1));
    let z = MultiPoly::var(2, 0);
    let w = MultiPoly::var(2, 1);
    if f2.is_zero() {
        let rest = f1 - &z;
        let by_w = rest.coefficients_in(1);
        if by_w.first().is_none_or(MultiPoly::is_zero) {
            // rest = w·h
            let mut h = MultiPoly::zero(2);
            for (e, c) in rest.terms() {
                h.add_term(vec![e[0], e[1] - 1], c.clone());
            }
            return Ok(CxDeltaClass::FormA { h });
        }
    }
    if *f2 == w && f1.is_free_of(0) {
        return Ok(CxDeltaClass::FormB { h: f1.clone() });
    }
    Err(RetractError::Domain(format!(
        "{f} fits neither (z + w·h, 0) nor (h(w), w): it cannot be a retraction of C × Δ"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::tests::arb_poly;
    use proptest::prelude::*;

    fn pm(s: &str) -> PolyMap {
        PolyMap::parse(s, 2).unwrap()
    }

    #[test]
    fn idempotency_examples() {
        assert!(verify_idempotent(&pm("z + w^2; 0")));
        assert!(verify_idempotent(&pm("z; z^2")));
        assert!(!verify_idempotent(&pm("w; z")));
        assert!(!verify_idempotent(&PolyMap::parse("z", 2).unwrap()));
    }

    #[test]
    fn self_map_examples() {
        let bidisc: Region = BalancedDomain::polydisc(2).into();
        let v = verify_self_map(&pm("z; 0"), &bidisc, 2000, 0);
        assert!(v.passed());
        assert!(v.evidence["sup_level"].as_f64().unwrap() < 1.0);
        let v = verify_self_map(&pm("z; 2z"), &bidisc, 2000, 0);
        assert!(!v.passed());
        let wz = v.evidence["witness"][0].as_array().unwrap();
        assert!(wz[0].as_f64().unwrap().hypot(wz[1].as_f64().unwrap()) > 0.5);
    }

    #[test]
    fn graph_examples() {
        let bidisc: Region = BalancedDomain::polydisc(2).into();
        let p = LinearProjection::new(pm("z; 0").linear_part());
        let (g, v) = graph_retraction(&p, &pm("0; z^2"), &bidisc, 1000, 1).unwrap();
        assert_eq!(g.map, pm("z; z^2"));
        assert!(v.passed());
        let (g, _) = graph_retraction(&p, &pm("0; 0"), &bidisc, 10, 1).unwrap();
        assert_eq!(g.map, p.to_map());
        let (g, v) = graph_retraction(&p, &pm("0; z^3"), &bidisc, 1000, 2).unwrap();
        assert_eq!(g.map, pm("z; z^3"));
        assert!(v.passed());
        let bad = LinearProjection::new(pm("2z; 0").linear_part());
        assert!(graph_retraction(&bad, &pm("0; 0"), &bidisc, 10, 0).is_err());
    }

    #[test]
    fn bidisc_family_examples() {
        let half = ExactComplex::rational(1, 2);
        let zero = MultiPoly::zero(2);
        let hs = heath_suffridge(&half, &ExactComplex::one(), &zero, 500, 0).unwrap();
        assert_eq!(hs.candidate.map, pm("1/2*z + 1/2*w; 1/2*z + 1/2*w"));
        let eighth = MultiPoly::constant(2, ExactComplex::rational(1, 8));
        let hs = heath_suffridge(&half, &ExactComplex::one(), &eighth, 500, 0).unwrap();
        assert!(hs.line_residual <= 1e-10);
        assert!((hs.fitted_direction[1][0] - 1.0).abs() < 1e-9);
        assert!(hs.candidate.verify_self_map(2000, 3).passed());
        let third = ExactComplex::rational(1, 3);
        let hs = heath_suffridge(&third, &unimodular_exact(std::f64::consts::PI), &zero, 500, 0).unwrap();
        assert!((hs.fitted_direction[1][0] + 1.0).abs() < 1e-9);
        assert!(heath_suffridge(&half, &ExactComplex::one(), &MultiPoly::one(2), 100, 0).is_err());
    }

    #[test]
    fn extension_examples() {
        let bidisc = BalancedDomain::polydisc(2);
        let w = parse_poly("w", 2).unwrap();
        let e = extend_from_complement(&pm("z; z/4 + 1/2"), &bidisc, &w, 1000, 0).unwrap();
        assert_eq!(e.candidate.map, pm("z; z/4 + 1/2"));
        assert!(e.points_near_set > 0);
        assert!(extend_from_complement(&pm("z; 0"), &bidisc, &w, 500, 0).is_ok());
        assert!(extend_from_complement(&pm("z; 2*z"), &bidisc, &w, 500, 0).is_err());
        assert!(matches!(
            PolyMap::parse("z; 1/z", 2),
            Err(RetractError::NotPolynomial(_))
        ));
    }

    #[test]
    fn hyperbola_examples() {
        let r = hyperbola_retraction(&ExactComplex::one(), 1.0).unwrap();
        assert_eq!(r.map, pm("z*w; 1"));
        assert!(r.is_idempotent());
        assert!(r.verify_self_map(2000, 0).passed());
        let r = hyperbola_retraction(&ExactComplex::zero(), 1.0).unwrap();
        assert_eq!(r.map, pm("z; 0"));
        let r = hyperbola_retraction(&ExactComplex::from_int(2), 3.0).unwrap();
        assert!(r.verify_self_map(2000, 0).passed());
        let origin = vec![ExactComplex::zero(); 2];
        assert!(jacobian_at(&r.map, &origin).unwrap().iter().flatten().all(ExactComplex::is_zero));
        assert!(!is_submersive_at(&r.map, &origin).unwrap());
    }

    #[test]
    fn cxdelta_examples() {
        assert_eq!(
            cxdelta_normal_form_check(&pm("z + z*w; 0")).unwrap(),
            CxDeltaClass::FormA { h: parse_poly("z", 2).unwrap() }
        );
        assert_eq!(
            cxdelta_normal_form_check(&pm("w^3; w")).unwrap(),
            CxDeltaClass::FormB { h: parse_poly("w^3", 2).unwrap() }
        );
        assert_eq!(cxdelta_normal_form_check(&pm("z; w")).unwrap(), CxDeltaClass::Identity);
        assert!(cxdelta_normal_form_check(&pm("z; z^2")).is_err());
        assert!(cxdelta_normal_form_check(&pm("w; z")).is_err());
    }

    /// `S D S⁻¹` with `S` a product of integer shears, so entries stay integral.
    fn random_idempotent(seed: u64, n: usize) -> LinearProjection {
        use rand::Rng;
        let mut r = sampling::rng(seed);
        let mut s = linalg::identity(n);
        let mut si = linalg::identity(n);
        for _ in 0..3 {
            let (i, j) = (r.random_range(0..n), r.random_range(0..n));
            if i == j {
                continue;
            }
            let c = ExactComplex::gaussian(r.random_range(-2..=2), r.random_range(-2..=2));
            let mut e = linalg::identity(n);
            e[i][j] = c.clone();
            let mut ei = linalg::identity(n);
            ei[i][j] = -c;
            s = linalg::mat_mul(&s, &e);
            si = linalg::mat_mul(&ei, &si);
        }
        let mut dg = linalg::zeros(n, n);
        for (i, row) in dg.iter_mut().enumerate() {
            if r.random_bool(0.5) || i == 0 {
                row[i] = ExactComplex::one();
            }
        }
        LinearProjection::new(linalg::mat_mul(&linalg::mat_mul(&s, &dg), &si))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn graph_retracts_are_idempotent(seed in any::<u64>(), a in arb_poly(2), b in arb_poly(2)) {
            let p = random_idempotent(seed, 2);
            let phi = PolyMap::new(2, vec![a, b]).unwrap();
            prop_assume!(phi.degree().unwrap_or(0) <= 4);
            let bidisc: Region = BalancedDomain::polydisc(2).into();
            let (g, _) = graph_retraction(&p, &phi, &bidisc, 1, seed).unwrap();
            prop_assert!(verify_idempotent(&g.map));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn bidisc_family_image_is_the_line(num in 1i64..10, theta in 0.0..std::f64::consts::TAU, c in -8i64..=8, seed in any::<u64>()) {
            let t = ExactComplex::rational(num, 10);
            let tf = num as f64 / 10.0;
            let u = unimodular_exact(theta);
            // f = c/64 · z w stays below t(1−t)/2 on the bidisc when |c|/64 ≤ 0.045
            let f = MultiPoly::from_terms(2, [(vec![1, 1], ExactComplex::rational(c, 64))]);
            prop_assume!((c.abs() as f64) / 64.0 <= tf * (1.0 - tf) / 2.0);
            let hs = heath_suffridge(&t, &u, &f, 300, seed).unwrap();
            let ub = u.conj().to_c64();
            prop_assert!(hs.line_residual <= 1e-9);
            prop_assert!((Complex64::new(hs.fitted_direction[1][0], hs.fitted_direction[1][1]) - ub).norm() <= 1e-9);
        }
    }

    #[test]
    fn tangent_projections_of_retractions_preserve_the_domain() {
        let bidisc = BalancedDomain::polydisc(2);
        let maps = [pm("z; z^2"), pm("w; w"), pm("1/2*z + 1/2*w + (z-w)^2/8; 1/2*z + 1/2*w + (z-w)^2/8")];
        for f in maps {
            assert!(verify_idempotent(&f));
            assert!(verify_self_map(&f, &bidisc.clone().into(), 1000, 0).passed());
            let t = crate::lp::tangent_projection(&f, &bidisc, 1000, 7).unwrap();
            assert!(t.max_gauge < 1.0, "{f}");
        }
    }
}
