//! Lyapunov functionals `φ_p`, `V_p` and executable residual forms of the
//! supporting inequalities used by the convergence analysis.
//!
//! `φ_p` is evaluated in its Bregman-consistent form
//!
//! ```text
//! φ_p(x, y) = ‖x‖^p − p⟨x, J_p y⟩ + (p/q)‖y‖^p
//! ```
//!
//! which is `p` times the Bregman distance of `‖·‖^p / p`. It vanishes exactly
//! on the diagonal and reduces to `‖x‖² − 2⟨x, y⟩ + ‖y‖²` for `p = 2`. The
//! historical printed form with a leading `(p/q)‖x‖^q` is kept as
//! [`phi_p_verbatim`] for comparison only.

use crate::error::{Error, Result};
use crate::sampling::{log_uniform, seeded_rng, uniform_cube, unit_direction};
use crate::space::{dot, DualCovector, PrimalVector, SpaceSpec};

/// Value of `φ_p` or `V_p` with its three additive terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalValue {
    pub value: f64,
    pub components: [f64; 3],
}

impl FunctionalValue {
    fn from_terms(components: [f64; 3]) -> Self {
        Self {
            value: components.iter().sum(),
            components,
        }
    }
}

/// Signed slack of an inequality `lhs ≥ rhs`, reported as `lhs − rhs`, with
/// the magnitude scale used for the relative tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityResidual {
    pub residual: f64,
    pub scale: f64,
}

impl InequalityResidual {
    fn new(residual: f64, terms: &[f64]) -> Self {
        let largest = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        Self {
            residual,
            scale: 1.0 + largest,
        }
    }

    /// `residual ≥ −rel_tol · scale`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.residual >= -rel_tol * self.scale
    }
}

fn check2(space: &SpaceSpec, a: usize, b: usize) -> Result<()> {
    space.check_len(a)?;
    space.check_len(b)
}

pub fn phi_p_terms(space: &SpaceSpec, x: &PrimalVector, y: &PrimalVector) -> Result<FunctionalValue> {
    check2(space, x.len(), y.len())?;
    let p = space.p();
    let jy = space.duality_map(y);
    let nx = space.norm_unchecked(x);
    let ny = space.norm_unchecked(y);
    Ok(FunctionalValue::from_terms([
        nx.powf(p),
        -p * dot(jy.as_slice(), x.as_slice()),
        (p - 1.0) * ny.powf(p),
    ]))
}

/// `φ_p(x, y)`; nonnegative, zero exactly when `x = y`.
pub fn phi_p(space: &SpaceSpec, x: &PrimalVector, y: &PrimalVector) -> Result<f64> {
    phi_p_terms(space, x, y).map(|v| v.value)
}

/// The printed form `(p/q)‖x‖^q − p⟨x, J_p y⟩ + ‖y‖^p`. Not a distance for
/// `p ≠ 2` (it is nonzero on the diagonal); exposed for documentation and
/// for the counterexample tests.
pub fn phi_p_verbatim(space: &SpaceSpec, x: &PrimalVector, y: &PrimalVector) -> Result<f64> {
    check2(space, x.len(), y.len())?;
    let (p, q) = (space.p(), space.q());
    let jy = space.duality_map(y);
    Ok((p / q) * space.norm_unchecked(x).powf(q) - p * dot(jy.as_slice(), x.as_slice())
        + space.norm_unchecked(y).powf(p))
}

pub fn v_p_terms(space: &SpaceSpec, x: &PrimalVector, f: &DualCovector) -> Result<FunctionalValue> {
    check2(space, x.len(), f.len())?;
    let (p, q) = (space.p(), space.q());
    Ok(FunctionalValue::from_terms([
        space.norm_unchecked(x).powf(p),
        -p * dot(f.as_slice(), x.as_slice()),
        (p - 1.0) * space.dual_norm_unchecked(f).powf(q),
    ]))
}

/// `V_p(x, f) = ‖x‖^p − p⟨f, x⟩ + (p/q)‖f‖_*^q`, equal to `φ_p(x, J_p^{-1} f)`.
pub fn v_p(space: &SpaceSpec, x: &PrimalVector, f: &DualCovector) -> Result<f64> {
    v_p_terms(space, x, f).map(|v| v.value)
}

/// `V_p` evaluated through `φ_p` and the inverse duality map.
pub fn v_p_via_phi(space: &SpaceSpec, x: &PrimalVector, f: &DualCovector) -> Result<f64> {
    space.check_len(f.len())?;
    phi_p(space, x, &space.inverse_duality_map(f))
}

/// `V_p(x, x*+y*) − V_p(x, x*) − p⟨y*, J_p^{-1}x* − x⟩ ≥ 0`.
pub fn shift_residual(
    space: &SpaceSpec,
    x: &PrimalVector,
    xstar: &DualCovector,
    ystar: &DualCovector,
) -> Result<InequalityResidual> {
    space.check_len(ystar.len())?;
    let upper = v_p(space, x, &xstar.add(ystar))?;
    let base = v_p(space, x, xstar)?;
    let lin = space.p() * dot(ystar.as_slice(), space.inverse_duality_map(xstar).sub(x).as_slice());
    Ok(InequalityResidual::new(upper - base - lin, &[upper, base, lin]))
}

/// `‖x − y‖^p − ‖y‖^p + p⟨J_p y, x⟩ ≥ 0`: the supporting-hyperplane bound for
/// `‖·‖^p` at `y`.
pub fn power_gap_residual(space: &SpaceSpec, x: &PrimalVector, y: &PrimalVector) -> Result<InequalityResidual> {
    check2(space, x.len(), y.len())?;
    let p = space.p();
    let a = space.norm_unchecked(&x.sub(y)).powf(p);
    let b = space.norm_unchecked(y).powf(p);
    let c = p * dot(space.duality_map(y).as_slice(), x.as_slice());
    Ok(InequalityResidual::new(a - b + c, &[a, b, c]))
}

/// `[φ_p(y, x) − φ_p(y, z)] − p⟨J_p x − J_p z, z − y⟩ ≥ 0`.
pub fn three_point_residual(
    space: &SpaceSpec,
    x: &PrimalVector,
    y: &PrimalVector,
    z: &PrimalVector,
) -> Result<InequalityResidual> {
    space.check_len(z.len())?;
    let a = phi_p(space, y, x)?;
    let b = phi_p(space, y, z)?;
    let jdiff = space.duality_map(x).sub(&space.duality_map(z));
    let c = space.p() * dot(jdiff.as_slice(), z.sub(y).as_slice());
    Ok(InequalityResidual::new(a - b - c, &[a, b, c]))
}

/// Outcome of the sandwich `|‖x‖ − ‖y‖|^p ≤ φ_p(x, y) ≤ (‖x‖ + ‖y‖)^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiBounds {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub lower: f64,
    pub phi: f64,
    pub upper: f64,
}

/// Checks both sides of the `φ_p` sandwich within `1e-9 · scale`. Only defined
/// for `p ≥ 2`.
///
/// The lower side always holds. The upper side holds for `p = 2` but fails
/// for `p > 2` whenever `‖x‖` is small against `‖y‖`: at `x = 0` the middle
/// term is `(p-1)‖y‖^p`.
pub fn phi_bounds_check(space: &SpaceSpec, x: &PrimalVector, y: &PrimalVector) -> Result<PhiBounds> {
    if space.p() < 2.0 {
        return Err(Error::invalid("p", format!("phi sandwich is stated for p >= 2, got {}", space.p())));
    }
    let phi = phi_p(space, x, y)?;
    let (nx, ny) = (space.norm_unchecked(x), space.norm_unchecked(y));
    let p = space.p();
    let lower = (nx - ny).abs().powf(p);
    let upper = (nx + ny).powf(p);
    let tol = 1e-9 * (1.0 + phi.abs().max(upper));
    Ok(PhiBounds {
        lower_ok: lower <= phi + tol,
        upper_ok: phi <= upper + tol,
        lower,
        phi,
        upper,
    })
}

/// One row of [`phi_distance_table`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhiDistanceRow {
    pub threshold: f64,
    pub count: usize,
    pub max_distance: Option<f64>,
}

/// Tabulates `max ‖x − y‖` over sampled pairs with `φ_p(y, x) ≤ ε`, for each
/// threshold `ε`. Pairs are drawn as `y` in `[-2, 2]^n` and `x = y + δ u` with
/// `δ` log-uniform in `[1e-6, 1]`.
pub fn phi_distance_table(
    space: &SpaceSpec,
    thresholds: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<PhiDistanceRow>> {
    let mut rng = seeded_rng(seed);
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let y = uniform_cube(&mut rng, space.n(), 2.0);
        let delta = log_uniform(&mut rng, -6.0, 0.0);
        let x = y.axpy(delta, &unit_direction(&mut rng, space));
        let phi = phi_p(space, &y, &x)?;
        pairs.push((phi, space.norm_unchecked(&x.sub(&y))));
    }
    Ok(thresholds
        .iter()
        .map(|&eps| {
            let hits = pairs.iter().filter(|(phi, _)| *phi <= eps);
            let (count, max) = hits.fold((0, None::<f64>), |(c, m), (_, d)| {
                (c + 1, Some(m.map_or(*d, |m| m.max(*d))))
            });
            PhiDistanceRow {
                threshold: eps,
                count,
                max_distance: max,
            }
        })
        .collect())
}
