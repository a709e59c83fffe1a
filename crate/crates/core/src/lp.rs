//! Linear retracts of ℓ^p balls and polydiscs.

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{BalancedDomain, CVec};
use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::geometry::{bj_minimum, lp_norm};
use crate::linalg::{self, ExactMatrix};
use crate::polymap::PolyMap;
use crate::retraction::verify_idempotent;
use crate::sampling::{self, gaussian_vec};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSubspace {
    ambient: usize,
    basis: Vec<Vec<ExactComplex>>,
}

impl LinearSubspace {
    pub fn new(ambient: usize, basis: Vec<Vec<ExactComplex>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(RetractError::Invalid("zero subspace".into()));
        }
        if let Some(v) = basis.iter().find(|v| v.len() != ambient) {
            return Err(RetractError::DimensionMismatch {
                expected: ambient,
                got: v.len(),
            });
        }
        if linalg::rank(&basis) != basis.len() {
            return Err(RetractError::Invalid("basis vectors are linearly dependent".into()));
        }
        Ok(Self { ambient, basis })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        Self::new(
            n,
            rows.iter()
                .map(|r| r.iter().map(|&x| ExactComplex::from_int(x)).collect())
                .collect(),
        )
    }

    /// `{z : φ_i(z) = 0 for all i}`.
    pub fn kernel_of(functionals: &[Vec<ExactComplex>], ambient: usize) -> Result<Self> {
        Self::new(ambient, linalg::null_space(&functionals.to_vec(), ambient))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<ExactComplex>] {
        &self.basis
    }

    pub fn float_basis(&self) -> Vec<CVec> {
        self.basis
            .iter()
            .map(|v| v.iter().map(ExactComplex::to_c64).collect())
            .collect()
    }

    /// Annihilator: functionals vanishing on the subspace.
    pub fn annihilator(&self) -> Vec<Vec<ExactComplex>> {
        linalg::null_space(&self.basis, self.ambient)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            ambient: self.ambient,
            basis: self
                .basis
                .iter()
                .map(|v| perm.iter().map(|&i| v[i].clone()).collect())
                .collect(),
        }
    }

    pub fn contains(&self, v: &[ExactComplex]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(&rows) == self.dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProjection {
    matrix: ExactMatrix,
    shadow: Vec<CVec>,
}

impl LinearProjection {
    pub fn new(matrix: ExactMatrix) -> Self {
        let shadow = linalg::to_float(&matrix);
        Self { matrix, shadow }
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_idempotent(&self) -> bool {
        linalg::is_idempotent(&self.matrix)
    }

    pub fn apply(&self, z: &[Complex64]) -> CVec {
        linalg::cmat_vec(&self.shadow, z)
    }

    pub fn apply_exact(&self, z: &[ExactComplex]) -> Vec<ExactComplex> {
        linalg::mat_vec(&self.matrix, z)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix)
    }

    pub fn to_map(&self) -> PolyMap {
        PolyMap::linear(&self.matrix)
    }

    pub fn float_matrix(&self) -> &[CVec] {
        &self.shadow
    }
}

impl Serialize for LinearProjection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

#[derive(Clone, Debug)]
pub struct DisjointBasis {
    /// Exact generators with pairwise disjoint supports.
    pub exact: Vec<Vec<ExactComplex>>,
    pub supports: Vec<Vec<usize>>,
}

impl DisjointBasis {
    /// The generators scaled to unit ℓ^p norm.
    pub fn normalized(&self, p: f64) -> Vec<CVec> {
        self.exact
            .iter()
            .map(|v| {
                let f: CVec = v.iter().map(ExactComplex::to_c64).collect();
                let s = lp_norm(&f, p);
                f.into_iter().map(|x| x / s).collect()
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        let n = self.exact.first().map_or(0, Vec::len);
        let mut seen = vec![false; n];
        for s in &self.supports {
            for &i in s {
                if seen[i] {
                    return Err(RetractError::Invalid("basis supports overlap".into()));
                }
                seen[i] = true;
            }
        }
        for (v, s) in self.exact.iter().zip(&self.supports) {
            let actual: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
            if &actual != s {
                return Err(RetractError::Invalid("recorded support does not match vector".into()));
            }
        }
        Ok(())
    }
}

/// Decides whether the subspace is spanned by vectors with pairwise disjoint
/// supports.
///
/// The reduced echelon form is unique, and rescaling a disjointly supported
/// basis by its leading entries already yields it; so such a basis exists
/// exactly when the echelon rows themselves are disjointly supported.
pub fn disjoint_basis_search(l: &LinearSubspace) -> Option<DisjointBasis> {
    let (rows, _) = linalg::rref(&l.basis.to_vec());
    let supports: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| (0..r.len()).filter(|&i| !r[i].is_zero()).collect())
        .collect();
    let mut seen = vec![false; l.ambient];
    for s in &supports {
        for &i in s {
            if seen[i] {
                return None;
            }
            seen[i] = true;
        }
    }
    Some(DisjointBasis {
        exact: rows,
        supports,
    })
}

/// Hölder-dual functional of `u` on its support, as an exact binary rational vector.
fn dual_functional(u: &[Complex64], p: f64) -> Vec<ExactComplex> {
    u.iter()
        .map(|x| {
            let a = x.norm();
            if a == 0.0 {
                return ExactComplex::zero();
            }
            let c = if p == 1.0 {
                x.conj() / a
            } else {
                x.conj() * a.powf(p - 2.0)
            };
            ExactComplex::from_c64(c)
        })
        .collect()
}

/// `P = Σ_j u_j c_jᵀ / c_j(u_j)` with `c_j` the Hölder dual of `u_j`.
///
/// Disjoint supports make `c_j(u_k) = 0` for `j ≠ k`, so `P` is idempotent
/// exactly even though `c_j` is a rounded copy of the dual.
pub fn lp_norm_one_projection(p: f64, b: &DisjointBasis) -> Result<LinearProjection> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(RetractError::Invalid(format!("exponent must lie in [1, ∞), got {p}")));
    }
    b.check()?;
    let n = b.exact.first().map_or(0, Vec::len);
    let mut m = linalg::zeros(n, n);
    for (u_exact, u) in b.exact.iter().zip(b.normalized(p)) {
        let c = dual_functional(&u, p);
        let cu = c
            .iter()
            .zip(u_exact)
            .fold(ExactComplex::zero(), |acc, (x, y)| &acc + &(x * y));
        let inv = cu
            .inv()
            .ok_or_else(|| RetractError::InternalContradiction("dual functional vanishes on its vector".into()))?;
        for i in 0..n {
            if u_exact[i].is_zero() {
                continue;
            }
            let ui = &u_exact[i] * &inv;
            for j in 0..n {
                if !c[j].is_zero() {
                    m[i][j] += &(&ui * &c[j]);
                }
            }
        }
    }
    Ok(LinearProjection::new(m))
}

fn unit_lp_sample(rng: &mut impl Rng, n: usize, p: f64) -> CVec {
    let mut v = gaussian_vec(rng, n);
    match rng.random_range(0..4) {
        0 => {
            // torus-like point
            v.iter_mut().for_each(|x| *x /= x.norm().max(1e-300));
        }
        1 => {
            // sparse point
            for x in v.iter_mut() {
                if rng.random_bool(0.5) {
                    *x = Complex64::zero();
                }
            }
            if v.iter().all(|x| x.is_zero()) {
                v[0] = Complex64::new(1.0, 0.0);
            }
        }
        _ => {}
    }
    let s = lp_norm(&v, p);
    v.into_iter().map(|x| x / s).collect()
}

fn ratio(pz: &[Complex64], z: &[Complex64], p: f64) -> f64 {
    lp_norm(pz, p) / lp_norm(z, p)
}

/// Structured test vectors: coordinate vectors, pairwise sums with unimodular
/// weights, torus corners with ± signs.
fn structured_vectors(n: usize) -> Vec<CVec> {
    let zero = Complex64::zero();
    let one = Complex64::new(1.0, 0.0);
    let units = [one, -one, Complex64::i(), -Complex64::i()];
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![zero; n];
        e[i] = one;
        out.push(e);
        for j in i + 1..n {
            for s in units {
                let mut e = vec![zero; n];
                e[i] = one;
                e[j] = s;
                out.push(e);
            }
        }
    }
    if n <= 8 {
        for mask in 0..(1usize << n) {
            out.push((0..n).map(|i| if mask >> i & 1 == 1 { -one } else { one }).collect());
        }
    }
    out
}

/// Lower bound on `sup ‖Pz‖_p / ‖z‖_p` from structured vectors, seeded random
/// samples and a stochastic hill climb. Stops early once `stop_above` is exceeded.
pub fn operator_norm_search(
    apply: impl Fn(&[Complex64]) -> CVec,
    n: usize,
    p: f64,
    nsamples: usize,
    seed: u64,
    stop_above: Option<f64>,
) -> (f64, CVec) {
    let mut r = sampling::rng(seed);
    let mut pool: Vec<(f64, CVec)> = Vec::new();
    let done = |v: f64| stop_above.is_some_and(|s| v > s);
    for z in structured_vectors(n) {
        let v = ratio(&apply(&z), &z, p);
        if done(v) {
            return (v, z);
        }
        pool.push((v, z));
    }
    for _ in 0..nsamples {
        let z = unit_lp_sample(&mut r, n, p);
        let v = ratio(&apply(&z), &z, p);
        if done(v) {
            return (v, z);
        }
        pool.push((v, z));
    }
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    pool.truncate(4);
    let mut best = pool[0].clone();
    for (mut val, mut z) in pool {
        let mut step = 0.3;
        while step > 1e-9 {
            let mut improved = false;
            for _ in 0..12 {
                let cand: CVec = z
                    .iter()
                    .map(|x| x + sampling::gaussian_c(&mut r) * step)
                    .collect();
                let v = ratio(&apply(&cand), &cand, p);
                if v > val {
                    val = v;
                    z = cand;
                    improved = true;
                    if done(val) {
                        return (val, z);
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if val > best.0 {
            best = (val, z);
        }
    }
    let s = lp_norm(&best.1, p);
    (best.0, best.1.into_iter().map(|x| x / s).collect())
}

pub fn sampled_operator_norm(pr: &LinearProjection, p: f64, nsamples: usize, seed: u64) -> f64 {
    operator_norm_search(|z| pr.apply(z), pr.dim(), p, nsamples.max(1), seed, None).0
}

/// `U (U* U)^{-1} U*`, the ℓ² norm-one projection onto `l`.
pub fn orthogonal_projection(l: &LinearSubspace) -> LinearProjection {
    let inner = |a: &[ExactComplex], b: &[ExactComplex]| {
        a.iter().zip(b).fold(ExactComplex::zero(), |acc, (x, y)| &acc + &(&x.conj() * y))
    };
    let gram: ExactMatrix = l.basis.iter().map(|a| l.basis.iter().map(|b| inner(a, b)).collect()).collect();
    let ginv = linalg::inverse(&gram).expect("independent basis");
    let u = linalg::transpose(&l.basis);
    let ustar: ExactMatrix = l.basis.iter().map(|row| row.iter().map(ExactComplex::conj).collect()).collect();
    LinearProjection::new(linalg::mat_mul(&linalg::mat_mul(&u, &ginv), &ustar))
}

/// Birkhoff–James orthogonality of image samples against kernel samples.
pub fn image_kernel_bj_orthogonal(pr: &LinearProjection, p: f64, samples: usize, seed: u64) -> bool {
    let n = pr.dim();
    let mut r = sampling::rng(seed);
    (0..samples).all(|_| {
        let z = gaussian_vec(&mut r, n);
        let u = pr.apply(&z);
        let y = gaussian_vec(&mut r, n);
        let py = pr.apply(&y);
        let k: CVec = y.iter().zip(&py).map(|(a, b)| a - b).collect();
        let nu = lp_norm(&u, p);
        if nu < 1e-12 || lp_norm(&k, p) < 1e-12 {
            return true;
        }
        let (_, m) = bj_minimum(&u, &k, |x| lp_norm(x, p));
        m >= nu * (1.0 - 1e-9)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PolydiscAcceptance {
    /// Zero-based coordinate indices.
    pub index_set: Vec<usize>,
    /// `v_k = e_{j_k} + Σ_{i∉J} c_{i,j_k} e_i`.
    pub normalized_basis: Vec<Vec<String>>,
    pub row_sums: Vec<(usize, f64)>,
    pub retraction: PolyMap,
    pub projection: LinearProjection,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolydiscTest {
    pub accepted: Option<PolydiscAcceptance>,
    pub index_sets_tried: usize,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

const ROW_SUM_TOL: f64 = 1e-12;

/// Searches index sets `J` with `Σ_{j∈J} |c_{m,j}| ≤ 1` for every `m ∉ J`.
pub fn polydisc_retract_test(l: &LinearSubspace) -> Result<PolydiscTest> {
    let n = l.ambient;
    let k = l.dim();
    if n > 12 {
        return Err(RetractError::Unsupported("index-set search supports ambient dimension ≤ 12".into()));
    }
    let b = &l.basis;
    let mut tried = 0;
    for j in combinations(n, k) {
        tried += 1;
        let bj: ExactMatrix = b.iter().map(|row| j.iter().map(|&c| row[c].clone()).collect()).collect();
        let Ok(inv) = linalg::inverse(&bj) else {
            continue;
        };
        // rows of V are the normalized basis vectors
        let v = linalg::mat_mul(&inv, b);
        let mut ok = true;
        let mut sums = Vec::new();
        for m in (0..n).filter(|m| !j.contains(m)) {
            let s: f64 = v.iter().map(|row| row[m].to_c64().norm()).sum();
            sums.push((m, s));
            if s > 1.0 + ROW_SUM_TOL {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let mut mat = linalg::zeros(n, n);
        for (kk, &jk) in j.iter().enumerate() {
            for i in 0..n {
                mat[i][jk] = v[kk][i].clone();
            }
        }
        let proj = LinearProjection::new(mat);
        return Ok(PolydiscTest {
            accepted: Some(PolydiscAcceptance {
                index_set: j,
                normalized_basis: v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
                row_sums: sums,
                retraction: proj.to_map(),
                projection: proj,
            }),
            index_sets_tried: tried,
        });
    }
    if linalg::rank(b) < k {
        return Err(RetractError::Invalid("rank deficiency".into()));
    }
    Ok(PolydiscTest {
        accepted: None,
        index_sets_tried: tried,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LinftyIsometry {
    /// `S(v) = (v_{j_1}, …, v_{j_k})`.
    pub index_set: Vec<usize>,
    pub sampled_defect: f64,
}

pub fn linfty_isometry(l: &LinearSubspace, samples: usize, seed: u64) -> Result<LinftyIsometry> {
    let test = polydisc_retract_test(l)?;
    let acc = test
        .accepted
        .ok_or_else(|| RetractError::Invalid("subspace does not pass the polydisc test".into()))?;
    let basis = l.float_basis();
    let mut r = sampling::rng(seed);
    let mut defect: f64 = 0.0;
    for _ in 0..samples {
        let a = gaussian_vec(&mut r, basis.len());
        let mut v = vec![Complex64::zero(); l.ambient];
        for (ai, bi) in a.iter().zip(&basis) {
            for (x, y) in v.iter_mut().zip(bi) {
                *x += ai * y;
            }
        }
        let sv: CVec = acc.index_set.iter().map(|&i| v[i]).collect();
        defect = defect.max((lp_norm(&sv, f64::INFINITY) - lp_norm(&v, f64::INFINITY)).abs());
    }
    Ok(LinftyIsometry {
        index_set: acc.index_set,
        sampled_defect: defect,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentProjection {
    pub projection: LinearProjection,
    /// Largest gauge of `P z` over interior samples.
    pub max_gauge: f64,
}

/// The derivative at the origin of a retraction fixing 0, checked to be an
/// idempotent mapping samples of `d` into `d`.
pub fn tangent_projection(f: &PolyMap, d: &BalancedDomain, samples: usize, seed: u64) -> Result<TangentProjection> {
    if !f.is_square() || f.domain_dim() != d.dim() {
        return Err(RetractError::DimensionMismatch {
            expected: d.dim(),
            got: f.target_dim(),
        });
    }
    if f.constant_part().iter().any(|c| !c.is_zero()) {
        return Err(RetractError::Invalid("map does not fix the origin".into()));
    }
    if !verify_idempotent(f) {
        return Err(RetractError::Invalid("map is not idempotent".into()));
    }
    let pr = LinearProjection::new(f.linear_part());
    if !pr.is_idempotent() {
        return Err(RetractError::InternalContradiction("derivative at 0 is not idempotent".into()));
    }
    let mut r = sampling::rng(seed);
    let max_gauge = d
        .sample_interior(&mut r, samples)
        .iter()
        .map(|z| d.gauge(&pr.apply(z)))
        .fold(0.0, f64::max);
    Ok(TangentProjection {
        projection: pr,
        max_gauge,
    })
}

/// Random `k`-dimensional subspace of C^n with Gaussian-integer entries in
/// `[-3, 3]`; when `disjoint` is set the span is built from disjointly
/// supported blocks and then mixed by an invertible matrix.
pub fn random_subspace(rng: &mut impl Rng, n: usize, k: usize, disjoint: bool) -> LinearSubspace {
    let gint = |rng: &mut dyn rand::RngCore, nonzero: bool| loop {
        let c = ExactComplex::gaussian(rng.random_range(-3..=3), rng.random_range(-3..=3));
        if !nonzero || !c.is_zero() {
            return c;
        }
    };
    loop {
        let basis: Vec<Vec<ExactComplex>> = if disjoint {
            let mut block: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                block.swap(i, j);
            }
            let gens: Vec<Vec<ExactComplex>> = (0..k)
                .map(|b| {
                    (0..n)
                        .map(|i| if block[i] == b { gint(rng, true) } else { ExactComplex::zero() })
                        .collect()
                })
                .collect();
            let mix: ExactMatrix = (0..k).map(|_| (0..k).map(|_| gint(rng, false)).collect()).collect();
            if linalg::rank(&mix) < k {
                continue;
            }
            linalg::mat_mul(&mix, &gens)
        } else {
            (0..k).map(|_| (0..n).map(|_| gint(rng, false)).collect()).collect()
        };
        if let Ok(l) = LinearSubspace::new(n, basis) {
            return l;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSearch {
    pub projections_tested: usize,
    /// Projections whose sampled norm stayed at or below the threshold.
    pub norm_one_candidates: usize,
    /// Smallest lower bound met across the grid.
    pub smallest_lower_bound: f64,
}

/// All projections onto a subspace `L = span U`: the affine family
/// `U (Φ₀ + Ψ)` with `Φ₀ U = I` and `Ψ U = 0`.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    n: usize,
    u: Vec<CVec>,
    phi0: Vec<CVec>,
    ann: Vec<CVec>,
}

impl ProjectionFamily {
    pub fn new(l: &LinearSubspace) -> Self {
        let n = l.ambient;
        let k = l.dim();
        let u: Vec<CVec> = l.float_basis();
        let ann: Vec<CVec> = l
            .annihilator()
            .iter()
            .map(|a| a.iter().map(ExactComplex::to_c64).collect())
            .collect();
        let gram: ExactMatrix = l
            .basis
            .iter()
            .map(|a| {
                l.basis
                    .iter()
                    .map(|b| a.iter().zip(b).fold(ExactComplex::zero(), |acc, (x, y)| &acc + &(&x.conj() * y)))
                    .collect()
            })
            .collect();
        let ginv = linalg::to_float(&linalg::inverse(&gram).expect("independent basis"));
        // Φ₀ = (U* U)^{-1} U*, row r = Σ_s ginv[r][s] conj(u_s)
        let phi0: Vec<CVec> = (0..k)
            .map(|r| {
                (0..n)
                    .map(|i| (0..k).map(|s| ginv[r][s] * u[s][i].conj()).sum())
                    .collect()
            })
            .collect();
        Self { n, u, phi0, ann }
    }

    /// Number of real parameters of `Ψ`.
    pub fn nparams(&self) -> usize {
        2 * self.u.len() * self.ann.len()
    }

    /// Coordinate rows `Φ₀ + Ψ(params)`; `params` pairs are (re, im) per entry.
    pub fn coordinates(&self, params: &[f64]) -> Vec<CVec> {
        let mut phi = self.phi0.clone();
        let mut it = params.chunks(2);
        for row in phi.iter_mut() {
            for (a, annv) in self.ann.iter().enumerate() {
                let c = it.next().expect("parameter count");
                let coef = Complex64::new(c[0], c[1]) * 0.5 / sampling::norm2(annv) * ((a + 1) as f64).sqrt();
                for i in 0..self.n {
                    row[i] += coef * annv[i];
                }
            }
        }
        phi
    }

    /// `U Φ z`.
    pub fn apply(&self, phi: &[CVec], z: &[Complex64]) -> CVec {
        let coords: CVec = phi.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect();
        (0..self.n)
            .map(|i| self.u.iter().zip(&coords).map(|(us, c)| us[i] * c).sum())
            .collect()
    }

    /// Parameter vectors on the uniform grid over `[−r, r]^nparams` with at least `min_points` entries.
    pub fn grid(&self, min_points: usize, r: f64) -> Vec<Vec<f64>> {
        let np = self.nparams();
        if np == 0 {
            return vec![vec![]];
        }
        let mut per = 2usize;
        while per.pow(np as u32) < min_points {
            per += 1;
        }
        let vals: Vec<f64> = (0..per).map(|i| -r + 2.0 * r * i as f64 / (per - 1) as f64).collect();
        (0..per.pow(np as u32))
            .map(|idx| {
                let mut rem = idx;
                (0..np)
                    .map(|_| {
                        let v = vals[rem % per];
                        rem /= per;
                        v
                    })
                    .collect()
            })
            .collect()
    }
}

/// Walks a grid of the projection family onto `l` and bounds each operator norm from below.
pub fn projection_grid_search(l: &LinearSubspace, p: f64, min_points: usize, threshold: f64, seed: u64) -> GridSearch {
    let fam = ProjectionFamily::new(l);
    if fam.nparams() == 0 {
        return GridSearch {
            projections_tested: 0,
            norm_one_candidates: 0,
            smallest_lower_bound: f64::INFINITY,
        };
    }
    let grid = fam.grid(min_points, 1.5);
    let n = l.ambient;
    let results: Vec<f64> = grid
        .par_iter()
        .enumerate()
        .map(|(idx, params)| {
            let phi = fam.coordinates(params);
            operator_norm_search(|z| fam.apply(&phi, z), n, p, 64, seed ^ idx as u64, Some(threshold)).0
        })
        .collect();
    GridSearch {
        projections_tested: grid.len(),
        norm_one_candidates: results.iter().filter(|&&v| v <= threshold).count(),
        smallest_lower_bound: results.iter().cloned().fold(f64::INFINITY, f64::min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_vector;

    fn sub(vs: &[&str]) -> LinearSubspace {
        let b: Vec<Vec<ExactComplex>> = vs.iter().map(|v| parse_vector(v).unwrap()).collect();
        LinearSubspace::new(b[0].len(), b).unwrap()
    }

    #[test]
    fn disjoint_basis_examples() {
        let b = disjoint_basis_search(&sub(&["(1,0,0)", "(0,1,1/2)"])).unwrap();
        assert_eq!(b.supports, vec![vec![0], vec![1, 2]]);
        assert!(disjoint_basis_search(&sub(&["(1,1,2)"])).is_some());
        let l = LinearSubspace::kernel_of(&[parse_vector("(2,1,-1)").unwrap()], 3).unwrap();
        assert!(disjoint_basis_search(&l).is_none());
        assert!(LinearSubspace::new(3, vec![]).is_err());
    }

    #[test]
    fn mixed_disjoint_span_is_recognized() {
        // span{(1,1,0), (0,0,1)} written with a mixed basis
        let l = sub(&["(1,1,1)", "(2,2,-1)"]);
        let b = disjoint_basis_search(&l).unwrap();
        assert_eq!(b.supports, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn norm_one_projection_examples() {
        let b = disjoint_basis_search(&sub(&["(1,0,0)"])).unwrap();
        let p = lp_norm_one_projection(1.0, &b).unwrap();
        assert_eq!(p.matrix()[0][0], ExactComplex::one());
        assert!(p.matrix().iter().flatten().filter(|x| !x.is_zero()).count() == 1);

        let b = disjoint_basis_search(&sub(&["(2,1+i,0)", "(0,0,1)"])).unwrap();
        let pr = lp_norm_one_projection(3.0, &b).unwrap();
        assert!(pr.is_idempotent());
        assert!(sampled_operator_norm(&pr, 3.0, 2000, 1) <= 1.0 + 1e-10);
        for u in &b.exact {
            assert_eq!(&pr.apply_exact(u), u);
        }

        let b = disjoint_basis_search(&sub(&["(1/2,1/2,0)"])).unwrap();
        let pr = lp_norm_one_projection(1.0, &b).unwrap();
        assert!(pr.is_idempotent());
        assert!(image_kernel_bj_orthogonal(&pr, 1.0, 50, 2));
        assert!(lp_norm_one_projection(f64::INFINITY, &b).is_err());
    }

    #[test]
    fn orthogonal_projection_is_norm_one_in_l2() {
        let l = LinearSubspace::kernel_of(&[parse_vector("(2,1,-1)").unwrap()], 3).unwrap();
        let pr = orthogonal_projection(&l);
        assert!(pr.is_idempotent());
        assert_eq!(pr.rank(), 2);
        assert!(sampled_operator_norm(&pr, 2.0, 500, 4) <= 1.0 + 1e-10);
    }

    #[test]
    fn operator_norm_examples() {
        let id = LinearProjection::new(linalg::identity(3));
        assert!((sampled_operator_norm(&id, 3.0, 100, 0) - 1.0).abs() < 1e-12);
        let half = ExactComplex::rational(1, 2);
        let t = LinearProjection::new(vec![
            vec![ExactComplex::one(), ExactComplex::zero(), ExactComplex::zero()],
            vec![ExactComplex::zero(), ExactComplex::one(), ExactComplex::zero()],
            vec![half.clone(), half.clone(), ExactComplex::zero()],
        ]);
        assert!(t.is_idempotent());
        assert!((sampled_operator_norm(&t, f64::INFINITY, 2000, 0) - 1.0).abs() <= 1e-10);
        let o = LinearProjection::new(vec![vec![half.clone(), half.clone()], vec![half.clone(), half]]);
        assert!((sampled_operator_norm(&o, 1.0, 2000, 0) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn polydisc_examples() {
        let l = sub(&["(1,1/2,1/4,0)", "(0,1/2,3/4,1)"]);
        let t = polydisc_retract_test(&l).unwrap();
        let acc = t.accepted.unwrap();
        assert_eq!(acc.index_set, vec![0, 3]);
        let expected = PolyMap::parse("z1; 1/2*z1 + 1/2*z4; 1/4*z1 + 3/4*z4; z4", 4).unwrap();
        assert_eq!(acc.retraction, expected);

        let t = polydisc_retract_test(&sub(&["(1,0,0)"])).unwrap();
        assert_eq!(t.accepted.unwrap().index_set, vec![0]);

        let l = LinearSubspace::kernel_of(&[parse_vector("(1,1,-2)").unwrap()], 3).unwrap();
        assert!(disjoint_basis_search(&l).is_none());
        let acc = polydisc_retract_test(&l).unwrap().accepted.unwrap();
        assert_eq!(acc.index_set, vec![0, 1]);
        assert!(acc.row_sums.iter().all(|&(_, s)| (s - 1.0).abs() < 1e-15));

        let l = sub(&["(1,1,1)"]);
        assert!(polydisc_retract_test(&l).unwrap().accepted.is_some());
        let l = sub(&["(1,2,0)", "(0,1,2)"]);
        assert_eq!(polydisc_retract_test(&l).unwrap().accepted.unwrap().index_set, vec![1, 2]);
        let l = LinearSubspace::kernel_of(&[parse_vector("(1,1,1)").unwrap()], 3).unwrap();
        let t = polydisc_retract_test(&l).unwrap();
        assert!(t.accepted.is_none());
        assert_eq!(t.index_sets_tried, 3);
    }

    #[test]
    fn linfty_isometry_examples() {
        let l = sub(&["(1,1/2,1/4,0)", "(0,1/2,3/4,1)"]);
        let s = linfty_isometry(&l, 2000, 4).unwrap();
        assert_eq!(s.index_set, vec![0, 3]);
        assert!(s.sampled_defect <= 1e-10);
        let s = linfty_isometry(&sub(&["(1/2,1,-1/3)"]), 100, 4).unwrap();
        assert_eq!(s.index_set, vec![1]);
        let l = LinearSubspace::kernel_of(&[parse_vector("(1,1,1)").unwrap()], 3).unwrap();
        assert!(linfty_isometry(&l, 10, 0).is_err());
    }

    #[test]
    fn tangent_projection_examples() {
        let bidisc = BalancedDomain::polydisc(2);
        let f = PolyMap::parse("z + w^2; 0", 2).unwrap();
        let t = tangent_projection(&f, &bidisc, 200, 0).unwrap();
        assert_eq!(t.projection.matrix(), &PolyMap::parse("z; 0", 2).unwrap().linear_part());
        let f = PolyMap::parse("z/2 + w/2; z/2 + w/2", 2).unwrap();
        let t = tangent_projection(&f, &bidisc, 500, 0).unwrap();
        assert!(t.max_gauge < 1.0);
        assert!(tangent_projection(&PolyMap::parse("w; z", 2).unwrap(), &bidisc, 10, 0).is_err());
    }

    #[test]
    fn grid_search_rejects_the_kernel_example() {
        let l = LinearSubspace::kernel_of(&[parse_vector("(2,1,-1)").unwrap()], 3).unwrap();
        let g = projection_grid_search(&l, 3.0, 2000, 1.0 + 1e-6, 9);
        assert!(g.projections_tested >= 2000);
        assert_eq!(g.norm_one_candidates, 0);
    }
}
