//! Sparse multivariate polynomials over exact complex rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;

pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, ExactComplex>,
}

/// Homogeneous constituents; `parts[d]` holds the degree-`d` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousDecomposition {
    pub parts: Vec<MultiPoly>,
}

impl HomogeneousDecomposition {
    pub fn degrees(&self) -> Vec<u32> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(d, _)| d as u32)
            .collect()
    }

    pub fn part(&self, d: u32) -> Option<&MultiPoly> {
        self.parts.get(d as usize).filter(|p| !p.is_zero())
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(MultiPoly::is_zero)
    }

    pub fn sum(&self, nvars: usize) -> MultiPoly {
        self.parts
            .iter()
            .fold(MultiPoly::zero(nvars), |acc, p| &acc + p)
    }
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Graded-lex order, largest first.
pub(crate) fn grlex_desc(a: &[u32], b: &[u32]) -> Ordering {
    total(b).cmp(&total(a)).then_with(|| b.cmp(a))
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: ExactComplex) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ExactComplex::one())
    }

    /// The coordinate function `z_{index}`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(e, ExactComplex::one())
    }

    pub fn monomial(exp: Exponent, c: ExactComplex) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, ExactComplex)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, ExactComplex> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex order, largest first.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &ExactComplex)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_desc(a.0, b.0));
        v
    }

    pub fn add_term(&mut self, exp: Exponent, c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn coeff(&self, exp: &[u32]) -> ExactComplex {
        self.terms.get(exp).cloned().unwrap_or_else(ExactComplex::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Smallest total degree of a stored term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).min()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn constant_term(&self) -> ExactComplex {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| total(e));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// True when no stored term involves `var`.
    pub fn is_free_of(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] == 0)
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * &ExactComplex::from_int(k as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|v| self.partial(v)).collect()
    }

    pub fn homogeneous_parts(&self) -> HomogeneousDecomposition {
        let top = match self.degree() {
            None => return HomogeneousDecomposition { parts: Vec::new() },
            Some(d) => d as usize,
        };
        let mut parts = vec![Self::zero(self.nvars); top + 1];
        for (e, c) in &self.terms {
            parts[total(e) as usize].add_term(e.clone(), c.clone());
        }
        HomogeneousDecomposition { parts }
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|(e, _)| total(e) == d)
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Leading term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Exponent, &ExactComplex)> {
        self.terms.iter().min_by(|a, b| grlex_desc(a.0, b.0))
    }

    pub fn eval(&self, point: &[ExactComplex]) -> Result<ExactComplex> {
        if point.len() != self.nvars {
            return Err(RetractError::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = ExactComplex::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Substitute `vals[i]` for variable `i`; the results live in `target_nvars` variables.
    pub fn substitute(&self, vals: &[MultiPoly], target_nvars: usize) -> Result<MultiPoly> {
        if vals.len() != self.nvars {
            return Err(RetractError::DimensionMismatch {
                expected: self.nvars,
                got: vals.len(),
            });
        }
        let mut cache: Vec<Vec<MultiPoly>> = vals
            .iter()
            .map(|v| vec![MultiPoly::one(target_nvars), v.clone()])
            .collect();
        let mut out = MultiPoly::zero(target_nvars);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(target_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                while powers.len() <= k as usize {
                    let next = &powers[powers.len() - 1] * &powers[1];
                    powers.push(next);
                }
                t = &t * &powers[k as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Float shadow for fast evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(self)
    }

    pub fn eval_f64(&self, point: &[Complex64]) -> Complex64 {
        self.to_float().eval(point)
    }

    /// Returns `λ` with `q = λ·p`.
    ///
    /// `Ok(Some(0))` when `q = 0` and `p ≠ 0`; `Err` when both vanish.
    pub fn proportionality(p: &MultiPoly, q: &MultiPoly) -> Result<Option<ExactComplex>> {
        match (p.is_zero(), q.is_zero()) {
            (true, true) => Err(RetractError::Indeterminate(
                "both polynomials are zero".into(),
            )),
            (true, false) => Ok(None),
            (false, true) => Ok(Some(ExactComplex::zero())),
            (false, false) => {
                let (e, c) = p.leading_term().expect("nonzero");
                let lambda = &q.coeff(e) / c;
                if &p.scale(&lambda) == q {
                    Ok(Some(lambda))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Reinterpret in a larger ambient space by appending unused variables.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = e.clone();
                e2.resize(nvars, 0);
                (e2, c.clone())
            }),
        )
    }

    pub fn conj_coeffs(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    /// Coefficients as a polynomial in `var`: `result[k]` is the coefficient of `var^k`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = match self.degree_in(var) {
            None => return Vec::new(),
            Some(d) => d as usize,
        };
        let mut out = vec![MultiPoly::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut e2 = e.clone();
            e2[var] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    pub fn variable_name(nvars: usize, index: usize) -> String {
        match (nvars, index) {
            (1, 0) | (2, 0) => "z".to_string(),
            (2, 1) => "w".to_string(),
            _ => format!("z{}", index + 1),
        }
    }
}

impl fmt::Display for MultiPoly {
    /// Canonical form: graded-lex descending, `" + "`/`" - "` separators, unit
    /// coefficients elided, e.g. `(1/2+3i)*z^2*w - w^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_real() && c.re.is_negative()
                || c.re.is_zero() && c.im.is_negative();
            let mag = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = MultiPoly::variable_name(self.nvars, i);
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn check_vars(a: &MultiPoly, b: &MultiPoly) {
    assert_eq!(a.nvars, b.nvars, "polynomials live in different rings");
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        check_vars(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        check_vars(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        check_vars(self, rhs);
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&ExactComplex::from_int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Double-precision copy of a polynomial, evaluated with cached powers.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    nvars: usize,
    max_exp: Vec<u32>,
    terms: Vec<(Exponent, Complex64)>,
}

impl FloatPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let mut max_exp = vec![0; p.nvars];
        for e in p.terms.keys() {
            for (m, &k) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
        }
        Self {
            nvars: p.nvars,
            max_exp,
            terms: p.terms.iter().map(|(e, c)| (e.clone(), c.to_c64())).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.nvars);
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .zip(&self.max_exp)
            .map(|(&x, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                v.push(acc);
                for _ in 0..m {
                    acc *= x;
                    v.push(acc);
                }
                v
            })
            .collect();
        let mut sum = Complex64::zero();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= powers[i][k as usize];
                }
            }
            sum += t;
        }
        sum
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    fn p2(s: &str) -> MultiPoly {
        parse_poly(s, 2).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = p2("z^2 - w^2");
        let one = ExactComplex::one();
        assert_eq!(f.eval(&[one.clone(), ExactComplex::zero()]).unwrap(), one);
        let g = p2("z*w");
        let pt = [ExactComplex::from_int(2), ExactComplex::rational(1, 2)];
        assert_eq!(g.eval(&pt).unwrap(), ExactComplex::one());
        assert!(g.eval(&pt[..1]).is_err());
    }

    #[test]
    fn float_eval_on_rib_point() {
        let r1 = ((1.0 + 17f64.sqrt()) / 2.0).sqrt();
        let r2 = 2.0 / r1;
        let f = p2("z^2 - w^2");
        let v = f.eval_f64(&[Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]);
        assert!((v.norm() - 1.0).abs() < 1e-9);
        // rotating w by i turns the difference into r1² + r2² = √17
        let v = f.eval_f64(&[Complex64::new(r1, 0.0), Complex64::new(0.0, r2)]);
        assert!((v.norm() - 17f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn homogeneous_parts_examples() {
        let h = p2("z + z*w + w^3").homogeneous_parts();
        assert_eq!(h.degrees(), vec![1, 2, 3]);
        assert_eq!(p2("z^2*w").homogeneous_parts().degrees(), vec![3]);
        assert!(MultiPoly::zero(2).homogeneous_parts().is_empty());
        assert_eq!(MultiPoly::zero(2).degree(), None);
    }

    #[test]
    fn gradient_examples() {
        let f = parse_poly("z1*z2*z3", 3).unwrap();
        let g = f.gradient();
        assert_eq!(g[0], parse_poly("z2*z3", 3).unwrap());
        assert_eq!(g[1], parse_poly("z1*z3", 3).unwrap());
        assert_eq!(g[2], parse_poly("z1*z2", 3).unwrap());
        assert!(p2("7").gradient().iter().all(MultiPoly::is_zero));
        let g = p2("z^2 - w^2").gradient();
        assert_eq!(g, vec![p2("2*z"), p2("-2*w")]);
    }

    #[test]
    fn proportionality_examples() {
        let p = p2("z^2 - w^2");
        let lam = MultiPoly::proportionality(&p, &p2("3*z^2 - 3*w^2")).unwrap();
        assert_eq!(lam, Some(ExactComplex::from_int(3)));
        assert_eq!(MultiPoly::proportionality(&p2("z*w"), &p2("z^2")).unwrap(), None);
        let z = MultiPoly::zero(2);
        assert!(MultiPoly::proportionality(&z, &z).is_err());
        assert_eq!(
            MultiPoly::proportionality(&p, &z).unwrap(),
            Some(ExactComplex::zero())
        );
    }

    #[test]
    fn display_is_graded_lex() {
        let p = p2("-w^3 + (1/2+3i)*z^2*w");
        assert_eq!(p.to_string(), "(1/2+3i)*z^2*w - w^3");
        assert_eq!(p2("-z + 1").to_string(), "-z + 1");
        assert_eq!(p2("-2i*w").to_string(), "-2i*w");
    }

    pub(crate) fn arb_coeff() -> impl Strategy<Value = ExactComplex> {
        (-5i64..=5, -5i64..=5, 1i64..=4).prop_map(|(a, b, d)| {
            &ExactComplex::gaussian(a, b) / &ExactComplex::from_int(d)
        })
    }

    pub(crate) fn arb_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..=3, nvars), arb_coeff()), 0..6)
            .prop_map(move |terms| MultiPoly::from_terms(nvars, terms))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn parts_round_trip(a in arb_poly(3)) {
            let h = a.homogeneous_parts();
            for (d, part) in h.parts.iter().enumerate() {
                prop_assert!(part.is_zero() || part.degree() == Some(d as u32));
                prop_assert!(part.is_homogeneous());
            }
            prop_assert_eq!(h.sum(3), a);
        }

        #[test]
        fn float_eval_matches_exact(
            a in arb_poly(2),
            pts in prop::collection::vec((-1000i64..=1000, -1000i64..=1000, 1i64..=50), 2),
        ) {
            let exact: Vec<ExactComplex> = pts
                .iter()
                .map(|&(r, i, d)| &ExactComplex::gaussian(r, i) / &ExactComplex::from_int(d))
                .collect();
            let floats: Vec<Complex64> = exact.iter().map(ExactComplex::to_c64).collect();
            let ve = a.eval(&exact).unwrap().to_c64();
            let vf = a.to_float().eval(&floats);
            let scale: f64 = a
                .terms()
                .iter()
                .map(|(e, c)| {
                    c.to_c64().norm()
                        * e.iter().zip(&floats).map(|(&k, x)| x.norm().powi(k as i32)).product::<f64>()
                })
                .sum::<f64>()
                .max(1.0);
            prop_assert!((ve - vf).norm() <= 1e-12 * scale);
        }
    }
}
