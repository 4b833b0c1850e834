//! Single-octave 2D gradient-lattice (Perlin) noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{SQRT_2, TAU};

use crate::error::{Error, Result};

const TABLE_SIZE: usize = 256;

/// Parameters of the noise function and of the passability threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerlinConfig {
    pub seed: u64,
    /// Lattice spacing in grid units.
    pub lattice_cell_size: f64,
    /// Cells whose noise value exceeds this are impassable. Drawn uniformly
    /// from [-1, 1] when `None`.
    pub threshold_a: Option<f64>,
}

impl Default for PerlinConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            lattice_cell_size: 10.0,
            threshold_a: None,
        }
    }
}

impl PerlinConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_cell_size > 0.0 && self.lattice_cell_size.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lattice_cell_size must be positive, got {}",
                self.lattice_cell_size
            )));
        }
        if let Some(a) = self.threshold_a {
            if !(-1.0..=1.0).contains(&a) {
                return Err(Error::InvalidConfig(format!(
                    "threshold_a must lie in [-1, 1], got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Seeded noise source. Building the permutation and gradient tables is the
/// expensive part, so terrain generation constructs one of these and
/// samples it many times.
#[derive(Debug, Clone)]
pub struct PerlinNoise {
    perm: [u8; TABLE_SIZE],
    gradients: [(f64, f64); TABLE_SIZE],
}

impl PerlinNoise {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm = [0u8; TABLE_SIZE];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        perm.shuffle(&mut rng);
        let mut gradients = [(0.0, 0.0); TABLE_SIZE];
        for g in gradients.iter_mut() {
            let (s, c) = rng.gen_range(0.0..TAU).sin_cos();
            *g = (c, s);
        }
        Self { perm, gradients }
    }

    fn gradient(&self, ix: i64, iy: i64) -> (f64, f64) {
        let hx = self.perm[ix.rem_euclid(TABLE_SIZE as i64) as usize] as usize;
        let h = self.perm[(hx + iy.rem_euclid(TABLE_SIZE as i64) as usize) % TABLE_SIZE];
        self.gradients[h as usize]
    }

    /// Raw noise in lattice coordinates. With unit gradients the output is
    /// bounded by ±√2/2.
    pub fn raw(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let ix = x0 as i64;
        let iy = y0 as i64;

        let corner = |dx: i64, dy: i64| {
            let (gx, gy) = self.gradient(ix + dx, iy + dy);
            gx * (fx - dx as f64) + gy * (fy - dy as f64)
        };
        let n00 = corner(0, 0);
        let n10 = corner(1, 0);
        let n01 = corner(0, 1);
        let n11 = corner(1, 1);

        let u = fade(fx);
        let v = fade(fy);
        let nx0 = lerp(n00, n10, u);
        let nx1 = lerp(n01, n11, u);
        lerp(nx0, nx1, v)
    }

    /// Noise at grid coordinates `(x, y)`, rescaled to [-1, 1].
    pub fn value(&self, x: f64, y: f64, lattice_cell_size: f64) -> f64 {
        let n = self.raw(x / lattice_cell_size, y / lattice_cell_size) * SQRT_2;
        n.clamp(-1.0, 1.0)
    }
}

fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Evaluates the rescaled noise at one point. Prefer [`PerlinNoise`] when
/// sampling repeatedly with the same seed.
pub fn perlin_value(x: f64, y: f64, cfg: &PerlinConfig) -> f64 {
    PerlinNoise::new(cfg.seed).value(x, y, cfg.lattice_cell_size)
}
