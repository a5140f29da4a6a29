//! The emulated Banach space `(R^n, ‖·‖_s)`, its dual `(R^n, ‖·‖_{s'})`, and
//! the generalized duality map `J_p` with gauge `t ↦ t^{p-1}`.
//!
//! On `ℓ_s` the duality map is single valued and has the closed form
//!
//! ```text
//! J_p x = ‖x‖_s^{p-s} · (|x_i|^{s-2} x_i)_i
//! ```
//!
//! and its inverse is the duality map of the dual space with gauge exponent
//! `q = p/(p-1)`. All exponent expressions are continued by 0 at the origin.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! coord_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(coords: Vec<f64>) -> Self {
                Self(coords)
            }

            pub fn zeros(n: usize) -> Self {
                Self(vec![0.0; n])
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn iter(&self) -> std::slice::Iter<'_, f64> {
                self.0.iter()
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&v| v == 0.0)
            }

            /// `self + alpha * other`, coordinatewise.
            pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
                Self(
                    self.0
                        .iter()
                        .zip(&other.0)
                        .map(|(a, b)| a + alpha * b)
                        .collect(),
                )
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
            }

            pub fn add(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
            }

            pub fn scale(&self, c: f64) -> Self {
                Self(self.0.iter().map(|a| c * a).collect())
            }

            /// Largest absolute coordinate.
            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl<const N: usize> From<[f64; N]> for $name {
            fn from(v: [f64; N]) -> Self {
                Self(v.to_vec())
            }
        }

        impl Index<usize> for $name {
            type Output = f64;

            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

coord_vector!(
    /// A point of the primal space `(R^n, ‖·‖_s)`.
    PrimalVector
);

coord_vector!(
    /// A functional in the dual space `(R^n, ‖·‖_{s'})`.
    DualCovector
);

/// Dimension, norm exponent `s` and gauge exponent `p` of the emulated space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    n: usize,
    s: f64,
    p: f64,
}

impl SpaceSpec {
    pub fn new(n: usize, s: f64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if !(s.is_finite() && s > 1.0) {
            return Err(Error::invalid("s", format!("norm exponent must be > 1, got {s}")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::invalid("p", format!("gauge exponent must be > 1, got {p}")));
        }
        Ok(Self { n, s, p })
    }

    /// `ℓ_s^n` with the gauge exponent tied to the norm exponent (`p = s`).
    pub fn lp(n: usize, p: f64) -> Result<Self> {
        Self::new(n, p, p)
    }

    /// Euclidean `R^n` with the normalized duality map (the identity).
    pub fn hilbert(n: usize) -> Result<Self> {
        Self::new(n, 2.0, 2.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Norm exponent of the dual space, `s' = s/(s-1)`.
    pub fn s_dual(&self) -> f64 {
        self.s / (self.s - 1.0)
    }

    /// Conjugate gauge exponent `q = p/(p-1)`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn is_hilbert(&self) -> bool {
        self.s == 2.0 && self.p == 2.0
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.n, self.s, p)
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }

    pub fn norm(&self, x: &PrimalVector) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(lp_norm(x.as_slice(), self.s))
    }

    pub fn dual_norm(&self, f: &DualCovector) -> Result<f64> {
        self.check_len(f.len())?;
        Ok(lp_norm(f.as_slice(), self.s_dual()))
    }

    /// `J_p x`. The zero vector maps to the zero covector.
    pub fn duality_map(&self, x: &PrimalVector) -> DualCovector {
        DualCovector(gauge_map(x.as_slice(), self.s, self.p))
    }

    /// `J_p^{-1} f`, the duality map of the dual space with gauge `q`.
    pub fn inverse_duality_map(&self, f: &DualCovector) -> PrimalVector {
        PrimalVector(gauge_map(f.as_slice(), self.s_dual(), self.q()))
    }

    pub(crate) fn norm_unchecked(&self, x: &PrimalVector) -> f64 {
        lp_norm(x.as_slice(), self.s)
    }

    pub(crate) fn dual_norm_unchecked(&self, f: &DualCovector) -> f64 {
        lp_norm(f.as_slice(), self.s_dual())
    }
}

/// The duality pairing `⟨f, x⟩ = Σ f_i x_i`.
pub fn pair(f: &DualCovector, x: &PrimalVector) -> Result<f64> {
    if f.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: x.len(),
        });
    }
    Ok(dot(f.as_slice(), x.as_slice()))
}

/// `t/(t-1)`, the Hölder conjugate of `t > 1`.
pub fn conjugate_exponent(t: f64) -> Result<f64> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::invalid("t", format!("conjugate exponent needs t > 1, got {t}")));
    }
    Ok(t / (t - 1.0))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    lp_norm(v, 2.0)
}

/// `(Σ|v_i|^s)^{1/s}`, evaluated after scaling by the largest coordinate so
/// that large or tiny entries do not overflow.
pub(crate) fn lp_norm(v: &[f64], s: f64) -> f64 {
    let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return if v.iter().any(|x| x.is_nan()) { f64::NAN } else { m };
    }
    if s == 2.0 {
        let sum: f64 = v.iter().map(|x| (x / m) * (x / m)).sum();
        m * sum.sqrt()
    } else {
        let sum: f64 = v.iter().map(|x| (x.abs() / m).powf(s)).sum();
        m * sum.powf(1.0 / s)
    }
}

/// `‖v‖_s^{g-s} (|v_i|^{s-2} v_i)_i`, the duality map of `ℓ_s` with gauge
/// exponent `g`.
fn gauge_map(v: &[f64], s: f64, g: f64) -> Vec<f64> {
    if s == 2.0 && g == 2.0 {
        return v.to_vec();
    }
    if s == g {
        return v.iter().map(|&x| signed_pow(x, s - 1.0)).collect();
    }
    let r = lp_norm(v, s);
    if r == 0.0 {
        return vec![0.0; v.len()];
    }
    // ‖v‖^{g-1} · sign(v_i)(|v_i|/‖v‖)^{s-1}: bounded factors, same value.
    let outer = r.powf(g - 1.0);
    v.iter()
        .map(|&x| outer * signed_pow(x / r, s - 1.0))
        .collect()
}

/// `sign(x)|x|^e`, with 0 ↦ 0.
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if e == 1.0 {
        x
    } else {
        x.signum() * x.abs().powf(e)
    }
}
