//! Rectification of polynomial retracts of C².
//!
//! A nontrivial polynomial retraction `F` of C² is conjugated by an explicit
//! chain of elementary automorphisms `Φ` until `Φ ∘ F ∘ Φ⁻¹ = (z + w Q, 0)`,
//! whose image is the first axis. Every stage is checked in exact arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::linalg::{self, ExactMatrix};
use crate::modular::idempotency_screen;
use crate::poly::MultiPoly;
use crate::polymap::PolyMap;
use crate::retraction::verify_idempotent;

/// Largest total degree accepted as input.
pub const MAX_INPUT_DEGREE: u32 = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum ElementaryAutomorphism {
    /// `x ↦ x + v`.
    AffineTranslate(Vec<ExactComplex>),
    /// `x ↦ M x`.
    LinearInvertible(ExactMatrix),
    /// `(z, w) ↦ (z − c w^k, w)`.
    ShearUp { c: ExactComplex, k: u32 },
    /// `(z, w) ↦ (z, w − p(z))`.
    ShearDown(MultiPoly),
    SwapAxes,
}

use ElementaryAutomorphism as Elem;

impl ElementaryAutomorphism {
    pub fn validate(&self) -> Result<()> {
        match self {
            Elem::AffineTranslate(v) if v.len() != 2 => Err(RetractError::DimensionMismatch {
                expected: 2,
                got: v.len(),
            }),
            Elem::LinearInvertible(m) => {
                if m.len() != 2 || m.iter().any(|r| r.len() != 2) {
                    return Err(RetractError::DimensionMismatch {
                        expected: 2,
                        got: m.len(),
                    });
                }
                let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
                if det.is_zero() {
                    return Err(RetractError::Invalid("singular linear step".into()));
                }
                Ok(())
            }
            Elem::ShearDown(p) if p.nvars() != 2 || !p.is_free_of(1) => {
                Err(RetractError::Invalid("shear polynomial must depend on z only".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Elem::AffineTranslate(v) => Elem::AffineTranslate(v.iter().map(|x| -x).collect()),
            Elem::LinearInvertible(m) => Elem::LinearInvertible(linalg::inverse(m).expect("validated step")),
            Elem::ShearUp { c, k } => Elem::ShearUp { c: -c, k: *k },
            Elem::ShearDown(p) => Elem::ShearDown(-p),
            Elem::SwapAxes => Elem::SwapAxes,
        }
    }

    pub fn to_map(&self) -> PolyMap {
        let z = MultiPoly::var(2, 0);
        let w = MultiPoly::var(2, 1);
        match self {
            Elem::AffineTranslate(v) => PolyMap::translation(v),
            Elem::LinearInvertible(m) => PolyMap::linear(m),
            Elem::ShearUp { c, k } => PolyMap::new(2, vec![&z - &w.pow(*k).scale(c), w]).unwrap(),
            Elem::ShearDown(p) => PolyMap::new(2, vec![z, &w - p]).unwrap(),
            Elem::SwapAxes => PolyMap::new(2, vec![w, z]).unwrap(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Elem::ShearUp { k, .. } => (*k).max(1),
            Elem::ShearDown(p) => p.degree().unwrap_or(0).max(1),
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        let s = |x: &ExactComplex| x.to_string();
        match self {
            Elem::AffineTranslate(v) => json!({"step": "translate", "by": v.iter().map(s).collect::<Vec<_>>()}),
            Elem::LinearInvertible(m) => json!({
                "step": "linear",
                "matrix": m.iter().map(|r| r.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            Elem::ShearUp { c, k } => json!({"step": "shear-up", "c": s(c), "k": k}),
            Elem::ShearDown(p) => json!({"step": "shear-down", "p": p.to_string()}),
            Elem::SwapAxes => json!({"step": "swap"}),
        }
    }
}

impl Serialize for ElementaryAutomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for ElementaryAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::AffineTranslate(v) => write!(f, "translate({}, {})", v[0], v[1]),
            Elem::LinearInvertible(m) => write!(f, "linear[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1]),
            Elem::ShearUp { c, k } => write!(f, "(z - {c}*w^{k}, w)"),
            Elem::ShearDown(p) => write!(f, "(z, w - ({p}))"),
            Elem::SwapAxes => write!(f, "(w, z)"),
        }
    }
}

/// `Φ = s_n ∘ … ∘ s_1`, applied first step first.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AutomorphismChain {
    pub steps: Vec<ElementaryAutomorphism>,
}

impl AutomorphismChain {
    pub fn new(steps: Vec<ElementaryAutomorphism>) -> Result<Self> {
        for s in &steps {
            s.validate()?;
        }
        Ok(Self { steps })
    }

    pub fn push(&mut self, s: ElementaryAutomorphism) {
        self.steps.push(s);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            steps: self.steps.iter().rev().map(Elem::inverse).collect(),
        }
    }

    /// Post-composes `m` with every step in order: `Φ ∘ m`.
    pub fn apply_after(&self, m: &PolyMap) -> PolyMap {
        self.steps
            .iter()
            .fold(m.clone(), |acc, s| s.to_map().compose(&acc).expect("planar maps"))
    }

    pub fn to_map(&self) -> PolyMap {
        self.apply_after(&PolyMap::identity(2))
    }

    /// `Φ ∘ F ∘ Φ⁻¹`, one elementary conjugation at a time.
    pub fn conjugate(&self, f: &PolyMap) -> PolyMap {
        self.steps.iter().fold(f.clone(), |g, s| {
            s.to_map()
                .compose(&g.compose(&s.inverse().to_map()).expect("planar maps"))
                .expect("planar maps")
        })
    }

    /// Composes the chain with its inverse as full polynomial maps.
    pub fn inverse_is_exact(&self) -> bool {
        self.apply_after(&self.inverse().to_map()).is_identity()
    }

    /// An upper bound for the degree of the composed map: consecutive shears
    /// of one kind (translations in between) only contribute their largest degree.
    pub fn degree_bound(&self) -> u32 {
        let mut total = 1u32;
        let mut run: Option<(bool, u32)> = None;
        for s in &self.steps {
            match s {
                Elem::AffineTranslate(_) => {}
                Elem::ShearUp { .. } | Elem::ShearDown(_) => {
                    let up = matches!(s, Elem::ShearUp { .. });
                    run = match run {
                        Some((u, d)) if u == up => Some((u, d.max(s.degree()))),
                        Some((_, d)) => {
                            total = total.saturating_mul(d);
                            Some((up, s.degree()))
                        }
                        None => Some((up, s.degree())),
                    };
                }
                _ => {
                    if let Some((_, d)) = run.take() {
                        total = total.saturating_mul(d);
                    }
                }
            }
        }
        if let Some((_, d)) = run {
            total = total.saturating_mul(d);
        }
        total
    }
}

impl fmt::Display for AutomorphismChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.steps.iter().rev().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" ∘ "))
    }
}

/// Maps up to this degree are checked for idempotency by exact composition
/// before straightening; above it the straightening certificate is the proof.
const EAGER_IDEMPOTENCY_DEGREE: u32 = 4;

fn check_input(f: &PolyMap) -> Result<()> {
    if f.domain_dim() != 2 || !f.is_square() {
        return Err(RetractError::DimensionMismatch {
            expected: 2,
            got: f.target_dim(),
        });
    }
    let d = f.degree().unwrap_or(0);
    if d > MAX_INPUT_DEGREE {
        return Err(RetractError::Unsupported(format!(
            "input degree exceeds {MAX_INPUT_DEGREE}"
        )));
    }
    if f.is_identity() {
        return Err(RetractError::TrivialInput("identity map".into()));
    }
    if f.is_constant() {
        return Err(RetractError::TrivialInput("constant map".into()));
    }
    let idempotent = if d <= EAGER_IDEMPOTENCY_DEGREE {
        verify_idempotent(f)
    } else {
        idempotency_screen(f, 16, 0x1de).unwrap_or_else(|| verify_idempotent(f))
    };
    if !idempotent {
        return Err(RetractError::Invalid("map is not idempotent".into()));
    }
    Ok(())
}

fn integral(v: &[ExactComplex]) -> Vec<ExactComplex> {
    let l = v
        .iter()
        .flat_map(|c| [c.re.denom(), c.im.denom()])
        .fold(BigInt::one(), |a, b| a.lcm(b));
    let l = ExactComplex::real(BigRational::from_integer(l));
    v.iter().map(|c| c * &l).collect()
}

/// Moves the fixed point `F(0)` to the origin and brings `DF(0)` to `diag(1, 0)`.
pub fn normalize_retraction(f: &PolyMap) -> Result<(PolyMap, AutomorphismChain)> {
    check_input(f)?;
    let mut chain = AutomorphismChain::default();
    let f0 = f.constant_part();
    if f0.iter().any(|c| !c.is_zero()) {
        chain.push(Elem::AffineTranslate(f0.iter().map(|x| -x).collect()));
    }
    let g = chain.conjugate(f);
    let d = g.linear_part();
    if !linalg::is_idempotent(&d) {
        return Err(RetractError::InternalContradiction("derivative at a fixed point is not idempotent".into()));
    }
    match linalg::rank(&d) {
        1 => {}
        r => {
            return Err(RetractError::TrivialInput(format!(
                "derivative at the fixed point has rank {r}"
            )))
        }
    }
    let target = vec![
        vec![ExactComplex::one(), ExactComplex::zero()],
        vec![ExactComplex::zero(), ExactComplex::zero()],
    ];
    if d == target {
        return Ok((g, chain));
    }
    let col = if d.iter().any(|r| !r[0].is_zero()) { 0 } else { 1 };
    // Gaussian-integer columns keep the expensive inner substitution exact
    // without rational normalization
    let image = integral(&[d[0][col].clone(), d[1][col].clone()]);
    let kernel = integral(&linalg::null_space(&d, 2).remove(0));
    let b = vec![vec![image[0].clone(), kernel[0].clone()], vec![image[1].clone(), kernel[1].clone()]];
    let s = linalg::inverse(&b)?;
    let step = Elem::LinearInvertible(s);
    let g = AutomorphismChain { steps: vec![step.clone()] }.conjugate(&g);
    chain.push(step);
    if g.linear_part() != target {
        return Err(RetractError::InternalContradiction("linear normalization failed".into()));
    }
    Ok((g, chain))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormTag {
    /// `(z + w Q(z, w), 0)` with `Q ≢ 0`.
    ProjectionWithShear,
    /// A graph over a line, finalized to `(z, 0)`.
    GraphOverAxis,
}

#[derive(Clone, Debug, Serialize)]
pub struct StraighteningCertificate {
    pub second_component_vanishes: bool,
    pub fixes_first_axis: bool,
    pub normal_form_idempotent: bool,
    pub chain_inverse_is_identity: bool,
    /// `F = Φ⁻¹(r, 0)` with `r` the generator.
    pub replay_matches_input: bool,
    /// `(deg a, deg b)` of the image parametrization before each reduction.
    pub degree_trace: Vec<(Option<u32>, Option<u32>)>,
}

impl StraighteningCertificate {
    pub fn all_hold(&self) -> bool {
        self.second_component_vanishes
            && self.fixes_first_axis
            && self.normal_form_idempotent
            && self.chain_inverse_is_identity
            && self.replay_matches_input
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StraighteningResult {
    pub chain: AutomorphismChain,
    pub normal_form: PolyMap,
    pub form_tag: FormTag,
    /// `r = (Φ ∘ F)₁`, so that `F = Φ⁻¹(r, 0)`.
    pub generator: MultiPoly,
    /// `t ↦ Φ⁻¹(t, 0)`, a parametrization of the image.
    pub image_parametrization: Vec<MultiPoly>,
    pub certificate: StraighteningCertificate,
}

fn lc(p: &MultiPoly) -> ExactComplex {
    p.coeff(&[p.degree().unwrap_or(0)])
}

/// Applies an elementary step to a curve `t ↦ (a(t), b(t))`.
fn push_curve(s: &Elem, gamma: &[MultiPoly; 2]) -> Result<[MultiPoly; 2]> {
    let out = s.to_map().components().iter().map(|c| c.substitute(gamma, 1)).collect::<Result<Vec<_>>>()?;
    Ok([out[0].clone(), out[1].clone()])
}

fn deg(p: &MultiPoly) -> Option<u32> {
    p.degree()
}

/// Conjugates `F` to `(z + w Q, 0)`.
///
/// After normalization the image is the curve `γ(t) = F(t, 0)`, which passes
/// through 0 tangent to the first axis. Polynomial lines in the plane have
/// coordinate degrees one dividing the other, so a shear cancelling the
/// leading term of the higher-degree coordinate always exists; it lowers
/// `deg a + deg b` strictly until `b ≡ 0`.
pub fn straighten(f: &PolyMap) -> Result<StraighteningResult> {
    let (g0, mut chain) = normalize_retraction(f)?;
    let zero2 = [MultiPoly::var(1, 0), MultiPoly::zero(1)];
    let mut gamma = g0
        .components()
        .iter()
        .map(|c| c.substitute(&zero2, 1))
        .collect::<Result<Vec<_>>>()?;
    let mut gamma: [MultiPoly; 2] = [gamma.remove(0), gamma.remove(0)];
    if gamma[0].coeff(&[1]) != ExactComplex::one() || !gamma[1].coeff(&[1]).is_zero() {
        return Err(RetractError::InternalContradiction("image curve is not tangent to the first axis".into()));
    }
    let mut trace = Vec::new();
    loop {
        let (a, b) = (&gamma[0], &gamma[1]);
        trace.push((deg(a), deg(b)));
        if b.is_zero() {
            if a.is_zero() {
                return Err(RetractError::InternalContradiction("image curve collapsed to a point".into()));
            }
            break;
        }
        let step = if a.is_zero() {
            Elem::SwapAxes
        } else {
            let (da, db) = (deg(a).unwrap(), deg(b).unwrap());
            if da == 0 || db == 0 {
                return Err(RetractError::InternalContradiction("image curve leaves the origin".into()));
            }
            if da <= db {
                if db % da != 0 {
                    return Err(RetractError::InternalContradiction(format!(
                        "image curve degrees ({da}, {db}) are not divisible"
                    )));
                }
                let m = db / da;
                let c = &lc(b) / &lc(a).pow(m);
                Elem::ShearDown(MultiPoly::var(2, 0).pow(m).scale(&c))
            } else {
                if da % db != 0 {
                    return Err(RetractError::InternalContradiction(format!(
                        "image curve degrees ({da}, {db}) are not divisible"
                    )));
                }
                let k = da / db;
                Elem::ShearUp {
                    c: &lc(a) / &lc(b).pow(k),
                    k,
                }
            }
        };
        let before = deg(a).unwrap_or(0) + deg(b).unwrap_or(0);
        let next = push_curve(&step, &gamma)?;
        let after = deg(&next[0]).unwrap_or(0) + deg(&next[1]).unwrap_or(0);
        if !matches!(step, Elem::SwapAxes) && after >= before {
            return Err(RetractError::InternalContradiction("degree reduction stalled".into()));
        }
        gamma = next;
        chain.push(step);
    }
    certify(f, chain, trace)
}

/// Builds the normal form `G = Φ ∘ F ∘ Φ⁻¹` and its certificate.
///
/// With `s = Φ ∘ F`: `s₂ ≡ 0` puts the image on the first axis, `G₁ = s₁ ∘ Φ⁻¹`
/// and `G₁(z, 0) = z` makes `G`, hence `F`, idempotent.
fn certify(f: &PolyMap, chain: AutomorphismChain, trace: Vec<(Option<u32>, Option<u32>)>) -> Result<StraighteningResult> {
    let s = chain.apply_after(f);
    let generator = s.component(0).clone();
    let inverse = chain.inverse();
    let phi_inv = inverse.to_map();
    // G₁ = s₁ ∘ s_1⁻¹ ∘ … ∘ s_n⁻¹, innermost step last
    let g1 = inverse
        .steps
        .iter()
        .rev()
        .try_fold(generator.clone(), |acc, st| acc.substitute(st.to_map().components(), 2))?;
    let normal_form = PolyMap::new(2, vec![g1.clone(), MultiPoly::zero(2)])?;
    let axis = [MultiPoly::var(1, 0), MultiPoly::zero(1)];
    let parametrization = phi_inv
        .components()
        .iter()
        .map(|c| c.substitute(&axis, 1))
        .collect::<Result<Vec<_>>>()?;
    let replay = f
        .components()
        .iter()
        .zip(&parametrization)
        .map(|(fc, u)| u.substitute(std::slice::from_ref(&generator), 2).map(|v| v == *fc))
        .collect::<Result<Vec<_>>>()?;
    let axis2 = [MultiPoly::var(2, 0), MultiPoly::zero(2)];
    let certificate = StraighteningCertificate {
        second_component_vanishes: s.component(1).is_zero(),
        fixes_first_axis: g1.substitute(&axis, 1)? == MultiPoly::var(1, 0),
        normal_form_idempotent: g1.substitute(&[g1.clone(), MultiPoly::zero(2)], 2)? == g1
            && g1.substitute(&axis2, 2)? == MultiPoly::var(2, 0),
        chain_inverse_is_identity: chain.apply_after(&phi_inv).is_identity(),
        replay_matches_input: replay.iter().all(|&b| b),
        degree_trace: trace,
    };
    if !certificate.all_hold() {
        return Err(RetractError::InternalContradiction(format!(
            "straightening certificate failed: {}",
            serde_json::to_string(&certificate).unwrap_or_default()
        )));
    }
    let form_tag = if g1 == MultiPoly::var(2, 0) {
        FormTag::GraphOverAxis
    } else {
        FormTag::ProjectionWithShear
    };
    Ok(StraighteningResult {
        chain,
        normal_form,
        form_tag,
        generator,
        image_parametrization: parametrization,
        certificate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RingRetract {
    pub generator: MultiPoly,
    /// `F_i = u_i(r)`, as univariate polynomials in `r`.
    pub components_in_generator: Vec<MultiPoly>,
    pub straightening: StraighteningResult,
}

/// Writes `f` as a univariate polynomial in `r` by cancelling leading terms:
/// the leading term of `r^k` is the `k`-th power of that of `r`.
pub fn express_in(f: &MultiPoly, r: &MultiPoly) -> Option<MultiPoly> {
    let (er, cr) = r.leading_term().map(|(e, c)| (e.clone(), c.clone()))?;
    if er.iter().all(|&x| x == 0) {
        return None;
    }
    let mut rest = f.clone();
    let mut out = MultiPoly::zero(1);
    while let Some((e, c)) = rest.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
        let k = er.iter().zip(&e).find(|(a, _)| **a > 0).map(|(a, b)| b / a)?;
        if er.iter().map(|x| x * k).collect::<Vec<_>>() != e {
            return None;
        }
        let coef = &c / &cr.pow(k);
        rest = &rest - &r.pow(k).scale(&coef);
        out.add_term(vec![k], coef);
    }
    Some(out)
}

/// Generator `r` of the retract subalgebra `F^*(C[z, w]) = C[r]`, with the
/// components of `F` expressed in it.
pub fn ring_retract_generator(f: &PolyMap) -> Result<RingRetract> {
    let st = straighten(f)?;
    let generator = st.generator.clone();
    let mut comps = Vec::new();
    for (c, u) in f.components().iter().zip(&st.image_parametrization) {
        let e = express_in(c, &generator).ok_or_else(|| {
            RetractError::InternalContradiction(format!("{c} is not a polynomial in {generator}"))
        })?;
        if &e != u {
            return Err(RetractError::InternalContradiction("elimination disagrees with the image parametrization".into()));
        }
        comps.push(e);
    }
    Ok(RingRetract {
        generator,
        components_in_generator: comps,
        straightening: st,
    })
}

fn small_gaussian(rng: &mut impl Rng, nonzero: bool) -> ExactComplex {
    loop {
        let c = ExactComplex::gaussian(rng.random_range(-3..=3), rng.random_range(-3..=3));
        if !nonzero || !c.is_zero() {
            return c;
        }
    }
}

fn random_step(rng: &mut impl Rng, max_shear_degree: u32) -> ElementaryAutomorphism {
    match rng.random_range(0..5) {
        0 => Elem::AffineTranslate(vec![small_gaussian(rng, false), small_gaussian(rng, false)]),
        1 => loop {
            let m: ExactMatrix = (0..2).map(|_| (0..2).map(|_| small_gaussian(rng, false)).collect()).collect();
            let s = Elem::LinearInvertible(m);
            if s.validate().is_ok() {
                return s;
            }
        },
        2 => Elem::ShearUp {
            c: small_gaussian(rng, true),
            k: rng.random_range(1..=max_shear_degree),
        },
        3 => {
            let d = rng.random_range(1..=max_shear_degree);
            let p = MultiPoly::from_terms(2, (0..=d).map(|i| (vec![i, 0], small_gaussian(rng, i == d))));
            Elem::ShearDown(p)
        }
        _ => Elem::SwapAxes,
    }
}

/// A retraction `Ψ ∘ B ∘ Ψ⁻¹` with `B` the axis projection or a graph
/// retraction `(z, φ(z))`, for a random chain `Ψ` of at most `max_len` steps.
/// Chains whose conjugate could exceed the input degree cap are redrawn.
#[derive(Clone, Debug)]
pub struct RoundTripCase {
    pub base: PolyMap,
    pub chain: AutomorphismChain,
    pub map: PolyMap,
}

pub fn random_round_trip(rng: &mut impl Rng, max_len: usize, max_shear_degree: u32, graph: bool) -> RoundTripCase {
    let z = MultiPoly::var(2, 0);
    loop {
        let base = if graph {
            let d = rng.random_range(1..=3u32);
            let phi = MultiPoly::from_terms(2, (0..=d).map(|i| (vec![i, 0], small_gaussian(rng, i == d))));
            PolyMap::new(2, vec![z.clone(), phi]).unwrap()
        } else {
            PolyMap::new(2, vec![z.clone(), MultiPoly::zero(2)]).unwrap()
        };
        let len = rng.random_range(1..=max_len);
        let chain = AutomorphismChain {
            steps: (0..len).map(|_| random_step(rng, max_shear_degree)).collect(),
        };
        let b = chain.degree_bound();
        let base_deg = base.degree().unwrap_or(1).max(1);
        if b.saturating_mul(b).saturating_mul(base_deg) > MAX_INPUT_DEGREE {
            continue;
        }
        let map = chain.conjugate(&base);
        if map.is_constant() || map.is_identity() {
            continue;
        }
        return RoundTripCase { base, chain, map };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::sampling;

    fn pm(s: &str) -> PolyMap {
        PolyMap::parse(s, 2).unwrap()
    }

    #[test]
    fn elementary_inverses() {
        let steps = vec![
            Elem::AffineTranslate(vec![ExactComplex::gaussian(1, 2), ExactComplex::from_int(-3)]),
            Elem::LinearInvertible(vec![
                vec![ExactComplex::from_int(1), ExactComplex::from_int(2)],
                vec![ExactComplex::i(), ExactComplex::from_int(3)],
            ]),
            Elem::ShearUp { c: ExactComplex::gaussian(0, 2), k: 3 },
            Elem::ShearDown(parse_poly("z^2 - 1", 2).unwrap()),
            Elem::SwapAxes,
        ];
        for s in &steps {
            assert!(s.to_map().compose(&s.inverse().to_map()).unwrap().is_identity(), "{s}");
        }
        let chain = AutomorphismChain::new(steps).unwrap();
        assert!(chain.inverse_is_exact());
        assert!(Elem::LinearInvertible(linalg::zeros(2, 2)).validate().is_err());
        assert!(Elem::ShearDown(parse_poly("w", 2).unwrap()).validate().is_err());
    }

    #[test]
    fn normalization_examples() {
        let (g, c) = normalize_retraction(&pm("z; z^2")).unwrap();
        assert!(c.is_empty());
        assert_eq!(g, pm("z; z^2"));
        let (g, c) = normalize_retraction(&pm("z/2 + w/2; z/2 + w/2")).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(g, pm("z; 0"));
        assert!(matches!(normalize_retraction(&pm("z; w")), Err(RetractError::TrivialInput(_))));
        assert!(matches!(normalize_retraction(&pm("1; 2")), Err(RetractError::TrivialInput(_))));
        assert!(matches!(normalize_retraction(&pm("w; z")), Err(RetractError::Invalid(_))));
        let (g, _) = normalize_retraction(&pm("z; 3")).unwrap();
        assert_eq!(g.linear_part(), pm("z; 0").linear_part());
    }

    #[test]
    fn straighten_examples() {
        let r = straighten(&pm("z; z^2")).unwrap();
        assert_eq!(r.chain.steps, vec![Elem::ShearDown(parse_poly("z^2", 2).unwrap())]);
        assert_eq!(r.normal_form, pm("z; 0"));
        assert_eq!(r.form_tag, FormTag::GraphOverAxis);

        let r = straighten(&pm("z + z^2*w; 0")).unwrap();
        assert!(r.chain.is_empty());
        assert_eq!(r.normal_form, pm("z + z^2*w; 0"));
        assert_eq!(r.form_tag, FormTag::ProjectionWithShear);

        // both components nonzero after normalization
        let f = AutomorphismChain::new(vec![Elem::ShearDown(parse_poly("z^2", 2).unwrap())])
            .unwrap()
            .inverse()
            .conjugate(&pm("z - w^2; 0"));
        assert!(verify_idempotent(&f));
        let r = straighten(&f).unwrap();
        assert!(r.certificate.all_hold());
        assert!(r.normal_form.component(1).is_zero());

        assert!(straighten(&pm("w; z")).is_err());
    }

    #[test]
    fn ring_generator_examples() {
        let g = ring_retract_generator(&pm("z + z^2*w; 0")).unwrap();
        assert_eq!(g.generator, parse_poly("z + z^2*w", 2).unwrap());
        assert_eq!(g.components_in_generator[0], MultiPoly::var(1, 0));
        assert!(g.components_in_generator[1].is_zero());

        let g = ring_retract_generator(&pm("z; 0")).unwrap();
        assert_eq!(g.generator, MultiPoly::var(2, 0));

        let g = ring_retract_generator(&pm("z; z^2")).unwrap();
        assert_eq!(g.generator, MultiPoly::var(2, 0));
        assert_eq!(g.components_in_generator[1], MultiPoly::var(1, 0).pow(2));

        let g = ring_retract_generator(&pm("z/2 + w/2 + 1/2; z/2 + w/2 - 1/2")).unwrap();
        for (c, u) in pm("z/2 + w/2 + 1/2; z/2 + w/2 - 1/2").components().iter().zip(&g.components_in_generator) {
            assert_eq!(&u.substitute(std::slice::from_ref(&g.generator), 2).unwrap(), c);
        }
    }

    #[test]
    fn express_in_rejects_non_members() {
        let r = parse_poly("z + w^2", 2).unwrap();
        assert!(express_in(&parse_poly("z", 2).unwrap(), &r).is_none());
        let f = parse_poly("(z + w^2)^3 - 2*(z + w^2) + 5", 2).unwrap();
        let u = express_in(&f, &r).unwrap();
        assert_eq!(u, parse_poly("z^3 - 2z + 5", 1).unwrap());
    }

    #[test]
    fn round_trips() {
        let mut rng = sampling::rng(11);
        for i in 0..100 {
            let case = random_round_trip(&mut rng, 4, 3, i % 2 == 1);
            assert_eq!(idempotency_screen(&case.map, 8, i), Some(true));
            assert!(case.map.degree().unwrap() <= MAX_INPUT_DEGREE);
            let r = straighten(&case.map).unwrap_or_else(|e| panic!("{} via {}: {e}", case.map, case.chain));
            assert!(r.certificate.all_hold());
            assert!(r.normal_form.component(1).is_zero());
            let gen = ring_retract_generator(&case.map).unwrap();
            assert_eq!(gen.components_in_generator.len(), 2);
        }
    }
}
