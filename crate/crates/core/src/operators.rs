//! Single-valued operators `T: B → B*` with a declared `(p, η)` strong
//! monotonicity claim, the stock example operators, gradient wrappers, and
//! empirical certification sweeps.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sampling::{in_ball, seeded_rng, unit_direction};
use crate::space::{dot, euclidean_norm, DualCovector, PrimalVector, SpaceSpec};

pub type OperatorFn = dyn Fn(&PrimalVector) -> DualCovector + Send + Sync;
pub type Functional = Arc<dyn Fn(&PrimalVector) -> f64 + Send + Sync>;
pub type GradientFn = Arc<OperatorFn>;

/// An operator `x ↦ Tx` together with the exponent and modulus it claims in
/// `⟨x − y, Tx − Ty⟩ ≥ η‖x − y‖^p`.
///
/// The claim is metadata: solvers run regardless of it, and
/// [`certify_strong_monotonicity`] is the empirical check.
#[derive(Clone)]
pub struct MonotoneOperator {
    apply: Arc<OperatorFn>,
    space: SpaceSpec,
    p_claim: f64,
    eta_claim: f64,
    label: String,
}

impl fmt::Debug for MonotoneOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneOperator")
            .field("label", &self.label)
            .field("space", &self.space)
            .field("p_claim", &self.p_claim)
            .field("eta_claim", &self.eta_claim)
            .finish()
    }
}

impl MonotoneOperator {
    pub fn new<F>(space: SpaceSpec, p_claim: f64, eta_claim: f64, label: impl Into<String>, apply: F) -> Result<Self>
    where
        F: Fn(&PrimalVector) -> DualCovector + Send + Sync + 'static,
    {
        if !(p_claim > 1.0) {
            return Err(Error::invalid("p_claim", format!("must be > 1, got {p_claim}")));
        }
        if !(eta_claim > 0.0) {
            return Err(Error::invalid("eta_claim", format!("must be > 0, got {eta_claim}")));
        }
        Ok(Self {
            apply: Arc::new(apply),
            space,
            p_claim,
            eta_claim,
            label: label.into(),
        })
    }

    pub fn apply(&self, x: &PrimalVector) -> DualCovector {
        (self.apply)(x)
    }

    /// Applies the operator, checking dimensions and finiteness of the output.
    pub fn try_apply(&self, x: &PrimalVector) -> Result<DualCovector> {
        self.space.check_len(x.len())?;
        let out = self.apply(x);
        self.space.check_len(out.len())?;
        if !out.is_finite() {
            return Err(Error::non_finite(format!("operator `{}`", self.label)));
        }
        Ok(out)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn p_claim(&self) -> f64 {
        self.p_claim
    }

    pub fn eta_claim(&self) -> f64 {
        self.eta_claim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_claim(mut self, p_claim: f64, eta_claim: f64) -> Result<Self> {
        if !(p_claim > 1.0 && eta_claim > 0.0) {
            return Err(Error::invalid("claim", format!("need p > 1 and eta > 0, got ({p_claim}, {eta_claim})")));
        }
        self.p_claim = p_claim;
        self.eta_claim = eta_claim;
        Ok(self)
    }

    /// Human-readable note when the claimed modulus lies outside `(1, ∞)`,
    /// the range the convergence analysis assumes.
    pub fn eta_note(&self) -> Option<String> {
        (self.eta_claim <= 1.0).then(|| {
            format!(
                "operator `{}` claims eta = {} <= 1; convergence theory assumes eta > 1, running anyway",
                self.label, self.eta_claim
            )
        })
    }
}

/// `Tx = ‖x‖₂^{p−2} x` with `η = 2^{2−p}`, for `p ≥ 2`.
pub fn power_map(space: SpaceSpec) -> Result<MonotoneOperator> {
    let p = space.p();
    if p < 2.0 {
        return Err(Error::invalid("p", format!("power map needs p >= 2, got {p}")));
    }
    MonotoneOperator::new(space, p, 2f64.powf(2.0 - p), format!("power(p={p})"), move |x| {
        let r = euclidean_norm(x.as_slice());
        if r == 0.0 {
            return DualCovector::zeros(x.len());
        }
        let c = if p == 2.0 { 1.0 } else { r.powf(p - 2.0) };
        DualCovector::new(x.iter().map(|v| c * v).collect())
    })
}

/// The 2×2 matrix of the standard linear example, whose symmetric part is
/// `diag(8, 13)`.
pub fn coupled_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[8.0, -5.0, 5.0, 13.0])
}

/// Smallest eigenvalue of `(G + Gᵀ)/2`.
pub fn symmetric_part_min_eigenvalue(g: &DMatrix<f64>) -> f64 {
    let sym = (g + g.transpose()) * 0.5;
    sym.symmetric_eigen().eigenvalues.min()
}

/// `Tx = Gx − b`. Rejected unless the symmetric part of `G` is positive
/// definite; the claimed modulus is its smallest eigenvalue.
pub fn linear_map(space: SpaceSpec, g: DMatrix<f64>, b: DualCovector) -> Result<MonotoneOperator> {
    let n = space.n();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if g.nrows() != n { g.nrows() } else { g.ncols() },
        });
    }
    space.check_len(b.len())?;
    let eta = symmetric_part_min_eigenvalue(&g);
    if !(eta > 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: eta });
    }
    let rows: Vec<Vec<f64>> = g.row_iter().map(|r| r.iter().copied().collect()).collect();
    MonotoneOperator::new(space, 2.0, eta, "linear", move |x| {
        DualCovector::new(
            rows.iter()
                .zip(b.iter())
                .map(|(row, bi)| dot(row, x.as_slice()) - bi)
                .collect(),
        )
    })
}

/// `Tx = x − c`, the shifted identity.
pub fn shifted_identity(space: SpaceSpec, c: DualCovector) -> Result<MonotoneOperator> {
    linear_map(space, DMatrix::identity(space.n(), space.n()), c)
}

/// Default central-difference step at `x`.
pub fn default_fd_step(x: &PrimalVector) -> f64 {
    1e-6 * (1.0 + x.max_abs())
}

/// Central finite-difference gradient of `f` at `x`. Non-finite function
/// values propagate into the result.
pub fn finite_difference_gradient(f: &(dyn Fn(&PrimalVector) -> f64 + Send + Sync), x: &PrimalVector, h: Option<f64>) -> DualCovector {
    let h = h.unwrap_or_else(|| default_fd_step(x));
    let mut probe = x.clone().into_vec();
    let mut g = Vec::with_capacity(probe.len());
    for i in 0..probe.len() {
        let xi = probe[i];
        probe[i] = xi + h;
        let fp = f(&PrimalVector::new(probe.clone()));
        probe[i] = xi - h;
        let fm = f(&PrimalVector::new(probe.clone()));
        probe[i] = xi;
        g.push((fp - fm) / (2.0 * h));
    }
    DualCovector::new(g)
}

/// The operator `dφ`: wraps an analytic gradient when given, otherwise uses
/// central finite differences with step `h` (default `1e-6·(1 + ‖x‖∞)`).
///
/// Gradients carry a nominal claim `(p, η) = (2, 1)`; override it with
/// [`MonotoneOperator::with_claim`] when a better modulus is known.
pub fn gradient_of(space: SpaceSpec, f: Functional, grad: Option<GradientFn>, h: Option<f64>) -> Result<MonotoneOperator> {
    if let Some(h) = h {
        if !(h > 0.0) {
            return Err(Error::invalid("h", format!("finite-difference step must be > 0, got {h}")));
        }
    }
    match grad {
        Some(g) => MonotoneOperator::new(space, 2.0, 1.0, "gradient(analytic)", move |x| g(x)),
        None => MonotoneOperator::new(space, 2.0, 1.0, "gradient(central-difference)", move |x| {
            finite_difference_gradient(f.as_ref(), x, h)
        }),
    }
}

/// A smooth test functional with its analytic gradient.
#[derive(Clone)]
pub struct TestFunctional {
    pub name: String,
    pub f: Functional,
    pub grad: GradientFn,
}

impl fmt::Debug for TestFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunctional").field("name", &self.name).finish()
    }
}

impl TestFunctional {
    /// `½‖x − c‖₂²`.
    pub fn half_squared_distance(c: Vec<f64>) -> Self {
        let c2 = c.clone();
        Self {
            name: "quadratic".into(),
            f: Arc::new(move |x| 0.5 * x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()),
            grad: Arc::new(move |x| DualCovector::new(x.iter().zip(&c2).map(|(a, b)| a - b).collect())),
        }
    }

    /// `¼Σ(x_i − c_i)⁴ + ½‖x − c‖₂²`, strictly convex with minimizer `c`.
    pub fn quartic_quadratic(c: Vec<f64>) -> Self {
        let c2 = c.clone();
        Self {
            name: "quartic".into(),
            f: Arc::new(move |x| {
                x.iter()
                    .zip(&c)
                    .map(|(a, b)| {
                        let d = a - b;
                        0.25 * d.powi(4) + 0.5 * d * d
                    })
                    .sum()
            }),
            grad: Arc::new(move |x| {
                DualCovector::new(
                    x.iter()
                        .zip(&c2)
                        .map(|(a, b)| {
                            let d = a - b;
                            d * d * d + d
                        })
                        .collect(),
                )
            }),
        }
    }

    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            name: "constant".into(),
            f: Arc::new(move |_| value),
            grad: Arc::new(move |_| DualCovector::zeros(n)),
        }
    }
}

/// Empirical witness for `⟨x − y, Tx − Ty⟩ ≥ η‖x − y‖^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityCertificate {
    pub eta_hat: f64,
    pub worst_pair: (PrimalVector, PrimalVector),
    pub p: f64,
    pub samples: usize,
    pub region_radius: f64,
    pub seed: u64,
}

/// `⟨Tx − Ty, x − y⟩ / ‖x − y‖^p`.
pub fn monotonicity_quotient(op: &MonotoneOperator, p: f64, x: &PrimalVector, y: &PrimalVector) -> Result<f64> {
    let d = x.sub(y);
    let tx = op.try_apply(x)?;
    let ty = op.try_apply(y)?;
    let num = dot(tx.sub(&ty).as_slice(), d.as_slice());
    Ok(num / op.space().norm(&d)?.powf(p))
}

/// Minimum of the monotonicity quotient over `samples` seeded pairs drawn
/// from the ball of radius `radius`.
pub fn certify_strong_monotonicity(
    op: &MonotoneOperator,
    p: f64,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<MonotonicityCertificate> {
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid("radius", format!("must be > 0, got {radius}")));
    }
    let space = *op.space();
    let mut rng = seeded_rng(seed);
    let mut best: Option<(f64, PrimalVector, PrimalVector)> = None;
    let mut taken = 0;
    while taken < samples {
        let x = in_ball(&mut rng, &space, radius);
        let y = in_ball(&mut rng, &space, radius);
        if space.norm_unchecked(&x.sub(&y)) <= 1e-9 * radius {
            continue;
        }
        taken += 1;
        let qv = monotonicity_quotient(op, p, &x, &y)?;
        if !qv.is_finite() {
            return Err(Error::non_finite(format!("monotonicity quotient of `{}`", op.label())));
        }
        if best.as_ref().is_none_or(|(b, _, _)| qv < *b) {
            best = Some((qv, x, y));
        }
    }
    let (eta_hat, x, y) = best.expect("at least one sample");
    Ok(MonotonicityCertificate {
        eta_hat,
        worst_pair: (x, y),
        p,
        samples,
        region_radius: radius,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoercivityRow {
    pub radius: f64,
    pub min_quotient: f64,
}

/// For each radius `r`, the minimum of `⟨x, Tx⟩/‖x‖` over `directions`
/// seeded unit directions scaled to norm `r`. The same directions are used
/// at every radius.
pub fn coercivity_probe(op: &MonotoneOperator, radii: &[f64], directions: usize, seed: u64) -> Result<Vec<CoercivityRow>> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii", "must be positive and strictly increasing"));
    }
    if directions == 0 {
        return Err(Error::invalid("directions", "need at least one direction"));
    }
    let space = *op.space();
    let mut rng = seeded_rng(seed);
    let dirs: Vec<PrimalVector> = (0..directions).map(|_| unit_direction(&mut rng, &space)).collect();
    radii
        .iter()
        .map(|&r| {
            let mut min = f64::INFINITY;
            for u in &dirs {
                let x = u.scale(r);
                let tx = op.try_apply(&x)?;
                min = min.min(dot(tx.as_slice(), x.as_slice()) / space.norm_unchecked(&x));
            }
            Ok(CoercivityRow { radius: r, min_quotient: min })
        })
        .collect()
}

/// Dense `G⁻¹ b` used by tests and oracles.
pub fn dense_solve(g: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    g.clone().lu().solve(&DVector::from_column_slice(b)).map(|v| v.iter().copied().collect())
}
