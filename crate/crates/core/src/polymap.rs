//! Polynomial self-maps and maps between affine spaces.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::linalg::ExactMatrix;
use crate::parse::parse_poly;
use crate::poly::{FloatPoly, MultiPoly};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMap {
    domain_dim: usize,
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(domain_dim: usize, components: Vec<MultiPoly>) -> Result<Self> {
        if let Some(c) = components.iter().find(|c| c.nvars() != domain_dim) {
            return Err(RetractError::DimensionMismatch {
                expected: domain_dim,
                got: c.nvars(),
            });
        }
        Ok(Self {
            domain_dim,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            domain_dim: n,
            components: (0..n).map(|i| MultiPoly::var(n, i)).collect(),
        }
    }

    /// `z ↦ A z`.
    pub fn linear(a: &ExactMatrix) -> Self {
        let n = a.first().map_or(0, Vec::len);
        let comps = a
            .iter()
            .map(|row| {
                let mut p = MultiPoly::zero(n);
                for (j, c) in row.iter().enumerate() {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    p.add_term(e, c.clone());
                }
                p
            })
            .collect();
        Self {
            domain_dim: n,
            components: comps,
        }
    }

    /// `z ↦ z + v`.
    pub fn translation(v: &[ExactComplex]) -> Self {
        let n = v.len();
        Self {
            domain_dim: n,
            components: v
                .iter()
                .enumerate()
                .map(|(i, c)| &MultiPoly::var(n, i) + &MultiPoly::constant(n, c.clone()))
                .collect(),
        }
    }

    /// One component per line (or separated by `;`).
    pub fn parse(src: &str, domain_dim: usize) -> Result<Self> {
        let comps = src
            .split(['\n', ';'])
            .map(str::trim)
            .filter(|s| !s.is_empty() && !s.starts_with('#'))
            .map(|s| parse_poly(s, domain_dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain_dim, comps)
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    pub fn is_square(&self) -> bool {
        self.domain_dim == self.components.len()
    }

    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(MultiPoly::degree).max()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.domain_dim)
    }

    pub fn is_constant(&self) -> bool {
        self.components.iter().all(MultiPoly::is_constant)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if self.domain_dim != inner.target_dim() {
            return Err(RetractError::DimensionMismatch {
                expected: self.domain_dim,
                got: inner.target_dim(),
            });
        }
        let n = inner.domain_dim;
        let mut cache: Vec<Vec<MultiPoly>> = inner
            .components
            .iter()
            .map(|c| vec![MultiPoly::one(n), c.clone()])
            .collect();
        let comps = self
            .components
            .iter()
            .map(|f| {
                let mut out = MultiPoly::zero(n);
                for (e, c) in f.terms() {
                    let mut t = MultiPoly::constant(n, c.clone());
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
                out
            })
            .collect();
        Ok(PolyMap {
            domain_dim: n,
            components: comps,
        })
    }

    pub fn eval(&self, point: &[ExactComplex]) -> Result<Vec<ExactComplex>> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    pub fn to_float(&self) -> FloatMap {
        FloatMap {
            components: self.components.iter().map(MultiPoly::to_float).collect(),
        }
    }

    pub fn constant_part(&self) -> Vec<ExactComplex> {
        self.components.iter().map(MultiPoly::constant_term).collect()
    }

    /// Jacobian at the origin: `m[i][j] = ∂F_i/∂z_j (0)`.
    pub fn linear_part(&self) -> ExactMatrix {
        let n = self.domain_dim;
        self.components
            .iter()
            .map(|c| {
                (0..n)
                    .map(|j| {
                        let mut e = vec![0; n];
                        e[j] = 1;
                        c.coeff(&e)
                    })
                    .collect()
            })
            .collect()
    }

    /// Symbolic Jacobian matrix.
    pub fn jacobian(&self) -> Vec<Vec<MultiPoly>> {
        self.components.iter().map(MultiPoly::gradient).collect()
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap{self}")
    }
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        strs.serialize(s)
    }
}

#[derive(Clone, Debug)]
pub struct FloatMap {
    components: Vec<FloatPoly>,
}

impl FloatMap {
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }
}
