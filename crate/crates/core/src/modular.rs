//! Reduction of Gaussian-rational polynomial maps modulo `p = 2^61 − 1`.
//!
//! `p ≡ 3 (mod 4)`, so `GF(p)[i]/(i² + 1)` is the field with `p²` elements and
//! every Gaussian rational whose denominators avoid `p` has an image there.
//! Disagreement of two maps after reduction proves they differ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::exact::ExactComplex;
use crate::poly::MultiPoly;
use crate::polymap::PolyMap;

pub const P: u64 = (1 << 61) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2 {
    pub re: u64,
    pub im: u64,
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_int(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(P)).to_u64().expect("reduced below p")
}

fn reduce_rat(r: &BigRational) -> Option<u64> {
    let d = reduce_int(r.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(reduce_int(r.numer()), powmod(d, P - 2)))
}

impl Fp2 {
    pub const ZERO: Fp2 = Fp2 { re: 0, im: 0 };
    pub const ONE: Fp2 = Fp2 { re: 1, im: 0 };

    pub fn reduce(c: &ExactComplex) -> Option<Fp2> {
        Some(Fp2 {
            re: reduce_rat(&c.re)?,
            im: reduce_rat(&c.im)?,
        })
    }

    pub fn random(rng: &mut impl Rng) -> Fp2 {
        Fp2 {
            re: rng.random_range(0..P),
            im: rng.random_range(0..P),
        }
    }

    pub fn add(self, o: Fp2) -> Fp2 {
        Fp2 {
            re: addmod(self.re, o.re),
            im: addmod(self.im, o.im),
        }
    }

    pub fn sub(self, o: Fp2) -> Fp2 {
        Fp2 {
            re: submod(self.re, o.re),
            im: submod(self.im, o.im),
        }
    }

    pub fn mul(self, o: Fp2) -> Fp2 {
        Fp2 {
            re: submod(mulmod(self.re, o.re), mulmod(self.im, o.im)),
            im: addmod(mulmod(self.re, o.im), mulmod(self.im, o.re)),
        }
    }

    pub fn pow(self, mut e: u32) -> Fp2 {
        let (mut a, mut r) = (self, Fp2::ONE);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(a);
            }
            a = a.mul(a);
            e >>= 1;
        }
        r
    }
}

/// A polynomial with coefficients reduced into `GF(p²)`.
#[derive(Clone, Debug)]
pub struct ModPoly {
    terms: Vec<(Vec<u32>, Fp2)>,
}

impl ModPoly {
    pub fn reduce(p: &MultiPoly) -> Option<ModPoly> {
        let terms = p
            .terms()
            .iter()
            .map(|(e, c)| Some((e.clone(), Fp2::reduce(c)?)))
            .collect::<Option<Vec<_>>>()?;
        Some(ModPoly { terms })
    }

    pub fn eval(&self, x: &[Fp2]) -> Fp2 {
        self.terms.iter().fold(Fp2::ZERO, |acc, (e, c)| {
            let t = e.iter().zip(x).fold(*c, |t, (&k, xi)| if k == 0 { t } else { t.mul(xi.pow(k)) });
            acc.add(t)
        })
    }
}

pub fn reduce_map(f: &PolyMap) -> Option<Vec<ModPoly>> {
    f.components().iter().map(ModPoly::reduce).collect()
}

pub fn eval_map(f: &[ModPoly], x: &[Fp2]) -> Vec<Fp2> {
    f.iter().map(|c| c.eval(x)).collect()
}

/// Compares `F(F(x))` with `F(x)` at `trials` random points of `GF(p²)^n`.
///
/// `Some(false)` proves `F ∘ F ≠ F`; `Some(true)` means no disagreement was
/// seen; `None` when a coefficient denominator is divisible by `p`.
pub fn idempotency_screen(f: &PolyMap, trials: usize, seed: u64) -> Option<bool> {
    if !f.is_square() {
        return Some(false);
    }
    let m = reduce_map(f)?;
    let mut r = crate::sampling::rng(seed);
    for _ in 0..trials {
        let x: Vec<Fp2> = (0..f.domain_dim()).map(|_| Fp2::random(&mut r)).collect();
        let y = eval_map(&m, &x);
        if eval_map(&m, &y) != y {
            return Some(false);
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let i = Fp2 { re: 0, im: 1 };
        assert_eq!(i.mul(i), Fp2 { re: P - 1, im: 0 });
        let half = Fp2::reduce(&ExactComplex::rational(1, 2)).unwrap();
        assert_eq!(half.add(half), Fp2::ONE);
        let c = Fp2::reduce(&ExactComplex::gaussian(3, -4)).unwrap();
        assert_eq!(c.pow(3), c.mul(c).mul(c));
        assert!(Fp2::reduce(&ExactComplex::real(BigRational::new(1.into(), BigInt::from(P)))).is_none());
    }

    #[test]
    fn screen_examples() {
        let pm = |s: &str| PolyMap::parse(s, 2).unwrap();
        assert_eq!(idempotency_screen(&pm("z + w^2; 0"), 8, 0), Some(true));
        assert_eq!(idempotency_screen(&pm("z; z^2"), 8, 0), Some(true));
        assert_eq!(idempotency_screen(&pm("w; z"), 8, 0), Some(false));
        assert_eq!(idempotency_screen(&pm("z/3 + w; 0"), 8, 0), Some(false));
    }
}
