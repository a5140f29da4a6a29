//! Euclidean metric projections onto simple convex sets and cyclic families
//! of self-maps with a common fixed-point set.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::phi_p;
use crate::sampling::{seeded_rng, uniform_cube};
use crate::space::{dot, euclidean_norm, PrimalVector, SpaceSpec};

/// A closed convex set with a closed-form Euclidean projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConvexSet {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// `{y : ⟨normal, y⟩ ≤ offset}`
    Halfspace { normal: Vec<f64>, offset: f64 },
}

impl ConvexSet {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let set = ConvexSet::Box { lo, hi };
        set.validate()?;
        Ok(set)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let set = ConvexSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let set = ConvexSet::Halfspace { normal, offset };
        set.validate()?;
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSet::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lo.len(),
                        found: hi.len(),
                    });
                }
                if lo.is_empty() {
                    return Err(Error::invalid("box", "empty bounds"));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                    return Err(Error::invalid("box", "need lo <= hi componentwise"));
                }
            }
            ConvexSet::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::invalid("ball", "empty center"));
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid("ball", format!("radius must be > 0, got {radius}")));
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                if normal.iter().all(|&a| a == 0.0) || !offset.is_finite() {
                    return Err(Error::invalid("halfspace", "normal must be nonzero and offset finite"));
                }
            }
        }
        Ok(())
    }

    /// Whether `x` lies in the set up to `tol`.
    pub fn contains(&self, x: &PrimalVector, tol: f64) -> bool {
        match self.project(x) {
            Ok(px) => euclidean_norm(px.sub(x).as_slice()) <= tol,
            Err(_) => false,
        }
    }

    /// The unique Euclidean-nearest point of the set to `x`.
    pub fn project(&self, x: &PrimalVector) -> Result<PrimalVector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(match self {
            ConvexSet::Box { lo, hi } => PrimalVector::new(
                x.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            ),
            ConvexSet::Ball { center, radius } => {
                let c = PrimalVector::new(center.clone());
                let d = x.sub(&c);
                let r = euclidean_norm(d.as_slice());
                if r <= *radius {
                    x.clone()
                } else {
                    c.axpy(radius / r, &d)
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = dot(normal, x.as_slice()) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    let nn = dot(normal, normal);
                    x.axpy(-excess / nn, &PrimalVector::new(normal.clone()))
                }
            }
        })
    }

    pub fn as_map(&self) -> SelfMap {
        let set = self.clone();
        Arc::new(move |x| set.project(x).expect("dimension checked by the family"))
    }

    pub fn label(&self) -> String {
        match self {
            ConvexSet::Box { .. } => "box".into(),
            ConvexSet::Ball { .. } => "ball".into(),
            ConvexSet::Halfspace { .. } => "halfspace".into(),
        }
    }
}

/// Free-function form of [`ConvexSet::project`].
pub fn project(set: &ConvexSet, x: &PrimalVector) -> Result<PrimalVector> {
    set.project(x)
}

/// 1-based cyclic selector: `((n − 1) mod N) + 1`, so `n = 1` picks the
/// first map.
pub fn cyclic_index(n: u64, count: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::invalid("n", "iteration index starts at 1"));
    }
    if count < 1 {
        return Err(Error::invalid("N", "family must contain at least one map"));
    }
    Ok(((n - 1) % count as u64) as usize + 1)
}

pub type SelfMap = Arc<dyn Fn(&PrimalVector) -> PrimalVector + Send + Sync>;

/// Tolerance for declaring a witness point fixed by a map.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// An ordered family `φ_1, …, φ_N` of self-maps applied cyclically, with
/// witness points certifying that the common fixed-point set is nonempty.
#[derive(Clone)]
pub struct CyclicFamily {
    maps: Vec<SelfMap>,
    labels: Vec<String>,
    witnesses: Vec<PrimalVector>,
    sets: Option<Vec<ConvexSet>>,
}

impl fmt::Debug for CyclicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclicFamily")
            .field("labels", &self.labels)
            .field("witnesses", &self.witnesses)
            .finish()
    }
}

impl CyclicFamily {
    pub fn new(maps: Vec<SelfMap>, labels: Vec<String>, witnesses: Vec<PrimalVector>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::invalid("family", "at least one map is required"));
        }
        if labels.len() != maps.len() {
            return Err(Error::invalid("family", "one label per map"));
        }
        if witnesses.is_empty() {
            return Err(Error::invalid("family", "at least one common fixed point must be declared"));
        }
        for u in &witnesses {
            for m in &maps {
                let displacement = euclidean_norm(m(u).sub(u).as_slice());
                if !(displacement <= FIXED_POINT_TOL) {
                    return Err(Error::NotFixedPoint { displacement });
                }
            }
        }
        Ok(Self {
            maps,
            labels,
            witnesses,
            sets: None,
        })
    }

    /// Projections onto `sets`, applied in order; `witness` must lie in every set.
    pub fn from_sets(sets: Vec<ConvexSet>, witness: PrimalVector) -> Result<Self> {
        for s in &sets {
            s.validate()?;
            if s.dim() != witness.len() {
                return Err(Error::DimensionMismatch {
                    expected: witness.len(),
                    found: s.dim(),
                });
            }
        }
        let maps = sets.iter().map(ConvexSet::as_map).collect();
        let labels = sets.iter().map(ConvexSet::label).collect();
        let mut family = Self::new(maps, labels, vec![witness])?;
        family.sets = Some(sets);
        Ok(family)
    }

    /// The single-map family `{id}`; every point is fixed.
    pub fn identity(n: usize) -> Self {
        Self {
            maps: vec![Arc::new(|x: &PrimalVector| x.clone())],
            labels: vec!["identity".into()],
            witnesses: vec![PrimalVector::zeros(n)],
            sets: None,
        }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn witnesses(&self) -> &[PrimalVector] {
        &self.witnesses
    }

    pub fn sets(&self) -> Option<&[ConvexSet]> {
        self.sets.as_deref()
    }

    /// `φ_i` for a 1-based index.
    pub fn map(&self, index: usize) -> &SelfMap {
        &self.maps[index - 1]
    }

    pub fn maps(&self) -> &[SelfMap] {
        &self.maps
    }

    /// `φ_{[n]} x`.
    pub fn apply_cyclic(&self, n: u64, x: &PrimalVector) -> PrimalVector {
        let i = cyclic_index(n, self.len()).expect("n >= 1 and nonempty family");
        self.map(i)(x)
    }

    /// `max_i ‖x − φ_i x‖₂`, a computable surrogate for distance to the
    /// common fixed-point set.
    pub fn feasibility_gap(&self, x: &PrimalVector) -> f64 {
        self.maps
            .iter()
            .map(|m| euclidean_norm(m(x).sub(x).as_slice()))
            .fold(0.0, f64::max)
    }
}

/// Result of [`check_quasi_phi_nonexpansive`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiNonexpansiveCheck {
    /// `max_x φ_p(u, φx) − φ_p(u, x)` over the samples.
    pub worst_residual: f64,
    pub worst_point: PrimalVector,
    /// Every sample satisfied `residual ≤ 1e-9 · (1 + φ_p(u, x))`.
    pub holds: bool,
    pub samples: usize,
}

/// Empirical check of `φ_p(u, φx) ≤ φ_p(u, x)` for a fixed point `u` of `map`,
/// with `x` drawn from the cube of half-width `5(1 + ‖u‖∞)` around `u`.
pub fn check_quasi_phi_nonexpansive(
    space: &SpaceSpec,
    map: &(dyn Fn(&PrimalVector) -> PrimalVector + Send + Sync),
    u: &PrimalVector,
    samples: usize,
    seed: u64,
) -> Result<QuasiNonexpansiveCheck> {
    space.check_len(u.len())?;
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let displacement = euclidean_norm(map(u).sub(u).as_slice());
    if !(displacement <= FIXED_POINT_TOL) {
        return Err(Error::NotFixedPoint { displacement });
    }
    let half_width = 5.0 * (1.0 + u.max_abs());
    let mut rng = seeded_rng(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = u.clone();
    let mut holds = true;
    for _ in 0..samples {
        let x = u.add(&uniform_cube(&mut rng, space.n(), half_width));
        let before = phi_p(space, u, &x)?;
        let after = phi_p(space, u, &map(&x))?;
        let r = after - before;
        if r > 1e-9 * (1.0 + before.abs()) {
            holds = false;
        }
        if r > worst {
            worst = r;
            worst_point = x;
        }
    }
    Ok(QuasiNonexpansiveCheck {
        worst_residual: worst,
        worst_point,
        holds,
        samples,
    })
}
