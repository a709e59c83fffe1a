//! Domains that self-maps are checked against: the balanced zoo plus a few
//! named non-balanced regions in C².

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::domains::{BalancedDomain, CVec};
use crate::sampling::{gaussian_c, radial_parameter};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NamedRegion {
    /// `{|w| < |z| < 1}`.
    HartogsTriangle,
    /// `Δ × Δ*`.
    DiscTimesPuncturedDisc,
    /// `C × Δ`.
    PlaneTimesDisc,
    /// `{|zw| < c}`.
    HyperbolaRegion { c: f64 },
}

#[derive(Clone, Debug)]
pub enum Region {
    Balanced(BalancedDomain),
    Named(NamedRegion),
}

/// Sampling radius used for the unbounded `z` factor of `C × Δ`.
const PLANE_RADIUS: f64 = 50.0;

impl NamedRegion {
    /// A function with the region equal to `{level < 1}` (plus the puncture
    /// for `Δ × Δ*`, handled in `contains`).
    pub fn level(&self, p: &[Complex64]) -> f64 {
        let (z, w) = (p[0].norm(), p[1].norm());
        match self {
            Self::HartogsTriangle => {
                if z == 0.0 {
                    f64::INFINITY
                } else {
                    z.max(w / z)
                }
            }
            Self::DiscTimesPuncturedDisc => z.max(w),
            Self::PlaneTimesDisc => w,
            Self::HyperbolaRegion { c } => z * w / c,
        }
    }

    pub fn contains(&self, p: &[Complex64]) -> bool {
        if matches!(self, Self::DiscTimesPuncturedDisc) && p[1].norm() == 0.0 {
            return false;
        }
        self.level(p) < 1.0
    }

    pub fn sample(&self, rng: &mut impl Rng) -> CVec {
        let phase = |rng: &mut dyn rand::RngCore| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        match self {
            Self::HartogsTriangle => {
                let z = radial_parameter(rng, 1).max(1e-12);
                let w = z * radial_parameter(rng, 1);
                vec![z * phase(rng), w * phase(rng)]
            }
            Self::DiscTimesPuncturedDisc => {
                let z = radial_parameter(rng, 1);
                let w = radial_parameter(rng, 1).max(1e-300);
                vec![z * phase(rng), w * phase(rng)]
            }
            Self::PlaneTimesDisc => {
                let z = gaussian_c(rng) * (PLANE_RADIUS / 3.0);
                vec![z, radial_parameter(rng, 1) * phase(rng)]
            }
            Self::HyperbolaRegion { c } => {
                let z = gaussian_c(rng) * 3.0;
                let m = c * radial_parameter(rng, 1);
                let w = if z.norm() > 0.0 { m / z.norm() } else { rng.random::<f64>() };
                vec![z, w * phase(rng)]
            }
        }
    }
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Self::Balanced(d) => d.dim(),
            Self::Named(_) => 2,
        }
    }

    pub fn level(&self, p: &[Complex64]) -> f64 {
        match self {
            Self::Balanced(d) => d.gauge(p),
            Self::Named(n) => n.level(p),
        }
    }

    pub fn contains(&self, p: &[Complex64]) -> bool {
        match self {
            Self::Balanced(d) => d.gauge(p) < 1.0,
            Self::Named(n) => n.contains(p),
        }
    }

    pub fn sample_interior(&self, rng: &mut impl Rng, n: usize) -> Vec<CVec> {
        match self {
            Self::Balanced(d) => d.sample_interior(rng, n),
            Self::Named(r) => (0..n).map(|_| r.sample(rng)).collect(),
        }
    }
}

impl From<BalancedDomain> for Region {
    fn from(d: BalancedDomain) -> Self {
        Region::Balanced(d)
    }
}

impl From<NamedRegion> for Region {
    fn from(d: NamedRegion) -> Self {
        Region::Named(d)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Balanced(d) => write!(f, "{d}"),
            Self::Named(NamedRegion::HartogsTriangle) => write!(f, "Hartogs triangle"),
            Self::Named(NamedRegion::DiscTimesPuncturedDisc) => write!(f, "Δ × Δ*"),
            Self::Named(NamedRegion::PlaneTimesDisc) => write!(f, "C × Δ"),
            Self::Named(NamedRegion::HyperbolaRegion { c }) => write!(f, "{{|zw| < {c}}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    #[test]
    fn samples_lie_inside() {
        let mut r = rng(5);
        for reg in [
            NamedRegion::HartogsTriangle,
            NamedRegion::DiscTimesPuncturedDisc,
            NamedRegion::PlaneTimesDisc,
            NamedRegion::HyperbolaRegion { c: 2.0 },
        ] {
            for _ in 0..2000 {
                let p = reg.sample(&mut r);
                assert!(reg.contains(&p), "{reg:?} {p:?}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        let c = |a: f64, b: f64| [Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
        assert!(NamedRegion::HartogsTriangle.contains(&c(0.5, 0.4)));
        assert!(!NamedRegion::HartogsTriangle.contains(&c(0.4, 0.5)));
        assert!(!NamedRegion::DiscTimesPuncturedDisc.contains(&c(0.5, 0.0)));
        assert!(NamedRegion::PlaneTimesDisc.contains(&c(1e6, 0.5)));
        assert!(!NamedRegion::HyperbolaRegion { c: 1.0 }.contains(&c(2.0, 0.5)));
    }
}
