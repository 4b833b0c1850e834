//! Virtual potential field emitted by stuck robots.
//!
//! Each source contributes `c / r²`; contributions superpose. The squared
//! distance is clamped below by [`SINGULARITY_CLAMP`]² so strengths stay
//! finite on top of a source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

pub const SINGULARITY_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSource {
    pub position: Vec2,
    pub strength_c: f64,
}

impl FieldSource {
    pub fn new(position: Vec2, strength_c: f64) -> Self {
        debug_assert!(strength_c > 0.0);
        Self {
            position,
            strength_c,
        }
    }

    pub fn strength_at(&self, p: Vec2) -> f64 {
        let d2 = (p - self.position)
            .norm_sq()
            .max(SINGULARITY_CLAMP * SINGULARITY_CLAMP);
        self.strength_c / d2
    }

    /// ∇(c/r²) = −2c (p − s) / r⁴, which points at the source.
    fn gradient_unchecked(&self, p: Vec2) -> Vec2 {
        let d = p - self.position;
        let r2 = d.norm_sq();
        d * (-2.0 * self.strength_c / (r2 * r2))
    }
}

/// Sources in deployment order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldSet {
    sources: Vec<FieldSource>,
}

impl FieldSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, source: FieldSource) {
        assert!(
            source.strength_c > 0.0 && source.strength_c.is_finite(),
            "source strength must be positive"
        );
        self.sources.push(source);
    }

    pub fn sources(&self) -> &[FieldSource] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn strength_at(&self, p: Vec2) -> f64 {
        self.sources.iter().map(|s| s.strength_at(p)).sum()
    }

    /// Analytic gradient of [`FieldSet::strength_at`].
    pub fn gradient_at(&self, p: Vec2) -> Result<Vec2> {
        let mut g = Vec2::ZERO;
        for s in &self.sources {
            if (p - s.position).norm() <= SINGULARITY_CLAMP {
                return Err(Error::DegeneratePoint(p));
            }
            g = g + s.gradient_unchecked(p);
        }
        Ok(g)
    }
}

impl FromIterator<FieldSource> for FieldSet {
    fn from_iter<I: IntoIterator<Item = FieldSource>>(iter: I) -> Self {
        let mut fs = FieldSet::new();
        for s in iter {
            fs.push(s);
        }
        fs
    }
}

/// Strength threshold whose single-source level set is the circle of
/// radius `epsilon`.
pub fn epsilon_to_threshold(epsilon: f64, c: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "circumferential radius must be positive, got {epsilon}"
        )));
    }
    Ok(c / (epsilon * epsilon))
}

pub fn threshold_to_epsilon(g_th: f64, c: f64) -> Result<f64> {
    if !(g_th > 0.0 && g_th.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be positive, got {g_th}"
        )));
    }
    Ok((c / g_th).sqrt())
}
