//! Balanced domains, their Minkowski gauges and boundary strata.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RetractError};
use crate::parse::{infer_nvars, parse_poly};
use crate::poly::{FloatPoly, MultiPoly};
use crate::sampling::{self, radial_parameter, unit_sphere};

pub type CVec = Vec<Complex64>;

/// JSON description of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Lp {
        #[serde(with = "extended_real")]
        p: f64,
        dim: usize,
    },
    Egg {
        q: Vec<f64>,
    },
    Polyhedron {
        defs: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Product {
        factors: Vec<DomainSpec>,
    },
    Intersection {
        members: Vec<DomainSpec>,
    },
}

mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| serde::de::Error::custom(format!("bad exponent `{t}`"))),
            },
        }
    }
}

/// `{|f_j| < 1}` for homogeneous, nonconstant `f_j`.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    defs: Vec<MultiPoly>,
    degrees: Vec<u32>,
    shadows: Vec<FloatPoly>,
    dim: usize,
    bounded: bool,
}

impl Polyhedron {
    pub fn new(defs: Vec<MultiPoly>) -> Result<Self> {
        let dim = defs
            .first()
            .map(MultiPoly::nvars)
            .ok_or_else(|| RetractError::Invalid("polyhedron needs at least one defining polynomial".into()))?;
        let mut degrees = Vec::with_capacity(defs.len());
        for f in &defs {
            if f.nvars() != dim {
                return Err(RetractError::DimensionMismatch {
                    expected: dim,
                    got: f.nvars(),
                });
            }
            if !f.is_homogeneous() || f.is_constant() {
                return Err(RetractError::Invalid(format!(
                    "defining polynomial `{f}` must be homogeneous and nonconstant"
                )));
            }
            degrees.push(f.degree().expect("nonzero"));
        }
        let shadows = defs.iter().map(MultiPoly::to_float).collect();
        let mut p = Self {
            defs,
            degrees,
            shadows,
            dim,
            bounded: true,
        };
        p.bounded = p.probe_boundedness(512, 0x5eed);
        Ok(p)
    }

    pub fn defs(&self) -> &[MultiPoly] {
        &self.defs
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Advisory flag: no common zero of the `f_j` was seen on sphere samples.
    pub fn bounded(&self) -> bool {
        self.bounded
    }

    /// `|f_j(z)|^{1/d_j}` for every face.
    pub fn face_levels(&self, z: &[Complex64]) -> Vec<f64> {
        self.shadows
            .iter()
            .zip(&self.degrees)
            .map(|(f, &d)| f.eval(z).norm().powf(1.0 / d as f64))
            .collect()
    }

    pub fn face_values(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.shadows.iter().map(|f| f.eval(z)).collect()
    }

    pub fn shadows(&self) -> &[FloatPoly] {
        &self.shadows
    }

    fn probe_boundedness(&self, n: usize, seed: u64) -> bool {
        let mut r = sampling::rng(seed);
        let size = |u: &[Complex64]| -> f64 {
            self.shadows.iter().map(|f| f.eval(u).norm()).fold(0.0, f64::max)
        };
        let mut starts: Vec<(f64, CVec)> = (0..n)
            .map(|_| {
                let u = unit_sphere(&mut r, self.dim);
                (size(&u), u)
            })
            .collect();
        starts.sort_by(|a, b| a.0.total_cmp(&b.0));
        // random descent on the sphere from the smallest samples
        for (best, u) in starts.iter_mut().take(8) {
            let mut step = 0.1;
            while step > 1e-13 {
                let mut improved = false;
                for _ in 0..20 {
                    let mut v: CVec = u
                        .iter()
                        .map(|x| x + sampling::gaussian_c(&mut r) * step)
                        .collect();
                    let nv = sampling::norm2(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    let s = size(&v);
                    if s < *best {
                        *best = s;
                        *u = v;
                        improved = true;
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            if *best < 1e-8 {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub enum BalancedDomain {
    LpBall { p: f64, dim: usize },
    DecoupledEgg { q: Vec<f64> },
    PolyPolyhedron(Polyhedron),
    Product(Vec<BalancedDomain>),
    Intersection(Vec<BalancedDomain>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeMethod {
    ClosedForm,
    RadialBisection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinkowskiValue {
    pub value: f64,
    pub method: GaugeMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StratumKind {
    OpenFace,
    Rib,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryStratum {
    pub point: CVec,
    pub active: Vec<usize>,
    pub kind: StratumKind,
}

pub const BOUNDARY_TOL: f64 = 1e-9;

fn lp_norm(z: &[Complex64], p: f64) -> f64 {
    let m = z.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    let s: f64 = z.iter().map(|x| (x.norm() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Solves `Σ (a_i/t)^{q_i} = 1` for `t`.
fn egg_gauge(a: &[f64], q: &[f64]) -> f64 {
    let amax = a.iter().cloned().fold(0.0, f64::max);
    if amax == 0.0 {
        return 0.0;
    }
    if q.windows(2).all(|w| w[0] == w[1]) {
        let qq = q[0];
        let s: f64 = a.iter().map(|x| (x / amax).powf(qq)).sum();
        return amax * s.powf(1.0 / qq);
    }
    let la: Vec<Option<f64>> = a.iter().map(|&x| (x > 0.0).then(|| x.ln())).collect();
    let g = |s: f64| -> (f64, f64) {
        let mut v = -1.0;
        let mut dv = 0.0;
        for (l, &qi) in la.iter().zip(q) {
            if let Some(l) = l {
                let t = (qi * (l - s)).exp();
                v += t;
                dv -= qi * t;
            }
        }
        (v, dv)
    };
    // g is convex and decreasing in s, so Newton from the left stays left of the root
    let mut s = amax.ln();
    for _ in 0..200 {
        let (v, dv) = g(s);
        if v <= 0.0 || dv == 0.0 {
            break;
        }
        let next = s - v / dv;
        if (next - s).abs() <= 1e-16 * (1.0 + s.abs()) {
            s = next;
            break;
        }
        s = next;
    }
    s.exp()
}

impl BalancedDomain {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p > 0.0) || dim == 0 {
            return Err(RetractError::Invalid(format!("ℓ^p ball needs p > 0 and dim ≥ 1, got p={p}, dim={dim}")));
        }
        Ok(Self::LpBall { p, dim })
    }

    pub fn polydisc(dim: usize) -> Self {
        Self::LpBall {
            p: f64::INFINITY,
            dim,
        }
    }

    pub fn ball(dim: usize) -> Self {
        Self::LpBall { p: 2.0, dim }
    }

    pub fn egg(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() || q.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(RetractError::Invalid(format!("egg exponents must be positive and finite, got {q:?}")));
        }
        Ok(Self::DecoupledEgg { q })
    }

    pub fn polyhedron(defs: &[&str]) -> Result<Self> {
        let n = defs.iter().map(|d| infer_nvars(d)).max().unwrap_or(1);
        let polys = defs
            .iter()
            .map(|d| parse_poly(d, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::PolyPolyhedron(Polyhedron::new(polys)?))
    }

    /// `{|z² − w²| < 1, |zw| < 2}`.
    pub fn dh() -> Self {
        static DH: std::sync::LazyLock<BalancedDomain> = std::sync::LazyLock::new(|| {
            BalancedDomain::polyhedron(&["z^2 - w^2", "1/2*z*w"]).expect("valid definition")
        });
        DH.clone()
    }

    pub fn product(factors: Vec<BalancedDomain>) -> Result<Self> {
        if factors.is_empty() {
            return Err(RetractError::Invalid("empty product".into()));
        }
        Ok(Self::Product(factors))
    }

    pub fn intersection(members: Vec<BalancedDomain>) -> Result<Self> {
        let d = members
            .first()
            .map(BalancedDomain::dim)
            .ok_or_else(|| RetractError::Invalid("empty intersection".into()))?;
        if let Some(m) = members.iter().find(|m| m.dim() != d) {
            return Err(RetractError::DimensionMismatch {
                expected: d,
                got: m.dim(),
            });
        }
        Ok(Self::Intersection(members))
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Lp { p, dim } => Self::lp(*p, *dim),
            DomainSpec::Egg { q } => Self::egg(q.clone()),
            DomainSpec::Polyhedron { defs, dim } => {
                let n = dim.unwrap_or_else(|| defs.iter().map(|d| infer_nvars(d)).max().unwrap_or(1));
                let polys = defs
                    .iter()
                    .map(|d| parse_poly(d, n))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::PolyPolyhedron(Polyhedron::new(polys)?))
            }
            DomainSpec::Product { factors } => {
                Self::product(factors.iter().map(Self::from_spec).collect::<Result<_>>()?)
            }
            DomainSpec::Intersection { members } => {
                Self::intersection(members.iter().map(Self::from_spec).collect::<Result<_>>()?)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text).map_err(|e| RetractError::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> DomainSpec {
        match self {
            Self::LpBall { p, dim } => DomainSpec::Lp { p: *p, dim: *dim },
            Self::DecoupledEgg { q } => DomainSpec::Egg { q: q.clone() },
            Self::PolyPolyhedron(ph) => DomainSpec::Polyhedron {
                defs: ph.defs.iter().map(|d| d.to_string()).collect(),
                dim: Some(ph.dim),
            },
            Self::Product(f) => DomainSpec::Product {
                factors: f.iter().map(Self::to_spec).collect(),
            },
            Self::Intersection(m) => DomainSpec::Intersection {
                members: m.iter().map(Self::to_spec).collect(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::LpBall { dim, .. } => *dim,
            Self::DecoupledEgg { q } => q.len(),
            Self::PolyPolyhedron(p) => p.dim,
            Self::Product(f) => f.iter().map(Self::dim).sum(),
            Self::Intersection(m) => m[0].dim(),
        }
    }

    fn check_dim(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(RetractError::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    /// Gauge by the family's closed form (egg with unequal exponents solves
    /// its one-variable gauge equation).
    pub fn gauge(&self, z: &[Complex64]) -> f64 {
        match self {
            Self::LpBall { p, .. } => lp_norm(z, *p),
            Self::DecoupledEgg { q } => {
                let a: Vec<f64> = z.iter().map(|x| x.norm()).collect();
                egg_gauge(&a, q)
            }
            Self::PolyPolyhedron(ph) => ph.face_levels(z).into_iter().fold(0.0, f64::max),
            Self::Product(f) => {
                let mut off = 0;
                let mut best: f64 = 0.0;
                for d in f {
                    let n = d.dim();
                    best = best.max(d.gauge(&z[off..off + n]));
                    off += n;
                }
                best
            }
            Self::Intersection(m) => m.iter().map(|d| d.gauge(z)).fold(0.0, f64::max),
        }
    }

    pub fn minkowski(&self, z: &[Complex64]) -> Result<MinkowskiValue> {
        self.check_dim(z)?;
        let method = match self {
            Self::DecoupledEgg { q } if q.windows(2).any(|w| w[0] != w[1]) => {
                GaugeMethod::RadialBisection
            }
            _ => GaugeMethod::ClosedForm,
        };
        Ok(MinkowskiValue {
            value: self.gauge(z),
            method,
        })
    }

    /// Membership from the defining inequalities alone, without the gauge.
    pub fn raw_contains(&self, z: &[Complex64]) -> bool {
        match self {
            Self::LpBall { p, .. } => {
                if p.is_infinite() {
                    z.iter().all(|x| x.norm() < 1.0)
                } else {
                    z.iter().map(|x| x.norm().powf(*p)).sum::<f64>() < 1.0
                }
            }
            Self::DecoupledEgg { q } => {
                z.iter().zip(q).map(|(x, qi)| x.norm().powf(*qi)).sum::<f64>() < 1.0
            }
            Self::PolyPolyhedron(ph) => ph.shadows.iter().all(|f| f.eval(z).norm() < 1.0),
            Self::Product(f) => {
                let mut off = 0;
                f.iter().all(|d| {
                    let n = d.dim();
                    let ok = d.raw_contains(&z[off..off + n]);
                    off += n;
                    ok
                })
            }
            Self::Intersection(m) => m.iter().all(|d| d.raw_contains(z)),
        }
    }

    /// Gauge by bisection on `t` of `z/t ∈ D`; balancedness makes the set of
    /// admissible `t` an up-ray.
    pub fn minkowski_bisection(&self, z: &[Complex64]) -> Result<MinkowskiValue> {
        self.check_dim(z)?;
        let scaled = |t: f64| -> Vec<Complex64> { z.iter().map(|x| x / t).collect() };
        if z.iter().all(|x| x.norm() == 0.0) {
            return Ok(MinkowskiValue {
                value: 0.0,
                method: GaugeMethod::RadialBisection,
            });
        }
        let mut hi = 1.0;
        while !self.raw_contains(&scaled(hi)) {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(RetractError::Domain("ray never enters the domain".into()));
            }
        }
        let mut lo = hi / 2.0;
        while self.raw_contains(&scaled(lo)) {
            hi = lo;
            lo /= 2.0;
            if lo < 1e-300 {
                return Ok(MinkowskiValue {
                    value: 0.0,
                    method: GaugeMethod::RadialBisection,
                });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.raw_contains(&scaled(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(MinkowskiValue {
            value: 0.5 * (lo + hi),
            method: GaugeMethod::RadialBisection,
        })
    }

    pub fn contains(&self, z: &[Complex64], tol_open: f64) -> Result<bool> {
        Ok(self.minkowski(z)?.value < 1.0 - tol_open)
    }

    pub fn radial_boundary(&self, z: &[Complex64]) -> Result<CVec> {
        let h = self.minkowski(z)?.value;
        if !(h > 0.0) || !h.is_finite() {
            return Err(RetractError::UnboundedDirection);
        }
        Ok(z.iter().map(|x| x / h).collect())
    }

    pub fn classify_boundary(&self, p: &[Complex64], tol: f64) -> Result<BoundaryStratum> {
        let Self::PolyPolyhedron(ph) = self else {
            return Err(RetractError::Unsupported(
                "boundary strata are defined for polynomial polyhedra".into(),
            ));
        };
        self.check_dim(p)?;
        let levels = ph.face_levels(p);
        let h = levels.iter().cloned().fold(0.0, f64::max);
        if (h - 1.0).abs() > tol {
            return Err(RetractError::NotOnBoundary { gauge: h });
        }
        let active: Vec<usize> = levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l >= 1.0 - tol)
            .map(|(j, _)| j)
            .collect();
        let kind = if active.len() >= 2 {
            StratumKind::Rib
        } else {
            StratumKind::OpenFace
        };
        Ok(BoundaryStratum {
            point: p.to_vec(),
            active,
            kind,
        })
    }

    /// Whether the boundary is a C¹ real hypersurface near the boundary point `p`.
    pub fn is_smooth_at(&self, p: &[Complex64]) -> bool {
        let tiny = 1e-9;
        match self {
            Self::LpBall { p: e, .. } => {
                if e.is_infinite() {
                    let m = p.iter().map(|x| x.norm()).fold(0.0, f64::max);
                    p.iter().filter(|x| x.norm() >= m - tiny).count() == 1
                } else if *e > 1.0 {
                    true
                } else {
                    p.iter().all(|x| x.norm() > tiny)
                }
            }
            Self::DecoupledEgg { q } => p
                .iter()
                .zip(q)
                .all(|(x, &qi)| qi > 1.0 || x.norm() > tiny),
            Self::PolyPolyhedron(ph) => {
                let levels = ph.face_levels(p);
                let h = levels.iter().cloned().fold(0.0, f64::max);
                let active: Vec<usize> = (0..levels.len())
                    .filter(|&j| levels[j] >= h - BOUNDARY_TOL)
                    .collect();
                if active.len() != 1 {
                    return false;
                }
                let grad = ph.defs[active[0]].gradient();
                grad.iter().any(|g| g.eval_f64(p).norm() > tiny)
            }
            Self::Product(f) => {
                let mut off = 0;
                let mut on = Vec::new();
                for d in f {
                    let n = d.dim();
                    let s = &p[off..off + n];
                    if d.gauge(s) >= 1.0 - tiny {
                        on.push(d.is_smooth_at(s));
                    }
                    off += n;
                }
                on.len() == 1 && on[0]
            }
            Self::Intersection(m) => {
                let on: Vec<bool> = m
                    .iter()
                    .filter(|d| d.gauge(p) >= 1.0 - tiny)
                    .map(|d| d.is_smooth_at(p))
                    .collect();
                on.len() == 1 && on[0]
            }
        }
    }

    /// Interior samples `t·z/h(z)` along random directions.
    pub fn sample_interior(&self, rng: &mut impl Rng, n: usize) -> Vec<CVec> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(n);
        let mut guard = 0;
        while out.len() < n && guard < 100 * n + 100 {
            guard += 1;
            let u = unit_sphere(rng, dim);
            let h = self.gauge(&u);
            if !(h > 1e-12) {
                continue;
            }
            let t = radial_parameter(rng, dim);
            out.push(u.iter().map(|x| x * (t / h)).collect());
        }
        out
    }

    pub fn sample_boundary(&self, rng: &mut impl Rng) -> CVec {
        loop {
            let u = unit_sphere(rng, self.dim());
            let h = self.gauge(&u);
            if h > 1e-12 {
                return u.iter().map(|x| x / h).collect();
            }
        }
    }
}

impl fmt::Display for BalancedDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LpBall { p, dim } if p.is_infinite() => write!(f, "polydisc Δ^{dim}"),
            Self::LpBall { p, dim } => write!(f, "ℓ^{p} ball in C^{dim}"),
            Self::DecoupledEgg { q } => write!(f, "egg domain q={q:?}"),
            Self::PolyPolyhedron(ph) => {
                let parts: Vec<String> = ph.defs.iter().map(|d| format!("|{d}| < 1")).collect();
                write!(f, "polyhedron {{{}}}", parts.join(", "))
            }
            Self::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|d| d.to_string()).collect();
                write!(f, "{}", parts.join(" × "))
            }
            Self::Intersection(ms) => {
                let parts: Vec<String> = ms.iter().map(|d| d.to_string()).collect();
                write!(f, "{}", parts.join(" ∩ "))
            }
        }
    }
}
