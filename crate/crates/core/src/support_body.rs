//! Smooth strictly convex planar bodies given by truncated Fourier series of
//! their support functions.
//!
//! `h(theta) = a0 + sum_k (cos_k cos k theta + sin_k sin k theta)`. The first
//! harmonic is a translation, `h + h''` is the radius of curvature of the
//! boundary at normal angle `theta`, and Minkowski combinations are linear in
//! the coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::trig::{pow2_at_least, Grid, TrigPoly};

/// Convexity margin for user-supplied bodies.
pub const DEFAULT_EPS_CONVEX: f64 = 1e-8;
/// Convexity margin guaranteed by [`random_body`].
pub const CORPUS_EPS_CONVEX: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct SupportBody {
    h: TrigPoly,
}

/// Samples of a periodic function at `theta_j = 2 pi j / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridProfile {
    values: Vec<f64>,
}

impl GridProfile {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn angle(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.values.len() as f64
    }
}

/// Accepted convexity check: the smallest grid value of `h + h''`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Convexity {
    pub min: f64,
    pub node: usize,
    pub theta: f64,
}

impl SupportBody {
    /// Builds a body from its coefficients. Missing trailing harmonics are
    /// zero and the degree is at least one. Convexity is checked separately by
    /// [`SupportBody::validate`].
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let mut h = TrigPoly::new(a0, cos, sin);
        if !h.is_finite() {
            return Err(Error::InvalidBody("non-finite coefficient".into()));
        }
        if h.degree() == 0 {
            h = TrigPoly::new(a0, vec![0.0], vec![0.0]);
        }
        Ok(Self { h })
    }

    pub fn disk(radius: f64) -> Self {
        Self {
            h: TrigPoly::new(radius, vec![0.0], vec![0.0]),
        }
    }

    pub(crate) fn from_poly(h: TrigPoly) -> Self {
        if h.degree() == 0 {
            Self {
                h: TrigPoly::new(h.a0(), vec![0.0], vec![0.0]),
            }
        } else {
            Self { h }
        }
    }

    pub fn a0(&self) -> f64 {
        self.h.a0()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        self.h.cos_coeffs()
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        self.h.sin_coeffs()
    }

    pub fn degree(&self) -> usize {
        self.h.degree()
    }

    pub fn support(&self) -> &TrigPoly {
        &self.h
    }

    /// `h + h''` as a trigonometric polynomial.
    pub fn curvature_poly(&self) -> TrigPoly {
        self.h.curvature()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.h.eval(theta)
    }

    pub fn derivative_at(&self, theta: f64) -> f64 {
        self.h.derivative().eval(theta)
    }

    /// Radius of curvature `h + h''` at normal angle `theta`.
    pub fn curvature_radius(&self, theta: f64) -> f64 {
        self.h.curvature().eval(theta)
    }

    /// Boundary point with outward normal `u(theta)`: `h u + h' u'`.
    pub fn boundary_point(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        let h = self.eval(theta);
        let dh = self.derivative_at(theta);
        [h * c - dh * s, h * s + dh * c]
    }

    pub fn support_profile(&self, n: usize) -> Result<GridProfile> {
        let grid = Grid::new(n)?;
        Ok(GridProfile::new(grid.sample(&self.h)))
    }

    /// Samples of `h + h''` on the `n`-node grid, differentiated coefficient-wise.
    pub fn curvature_profile(&self, n: usize) -> Result<GridProfile> {
        if n <= 4 * self.degree() {
            return Err(Error::InsufficientNodes {
                nodes: n,
                degree: self.degree(),
            });
        }
        let grid = Grid::new(n)?;
        Ok(GridProfile::new(grid.sample(&self.curvature_poly())))
    }

    pub fn translate(&self, v: [f64; 2]) -> Self {
        let mut cos = self.cos_coeffs().to_vec();
        let mut sin = self.sin_coeffs().to_vec();
        cos[0] += v[0];
        sin[0] += v[1];
        Self {
            h: TrigPoly::new(self.a0(), cos, sin),
        }
    }

    pub fn scale(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidBody(format!(
                "scale factor {t} is not positive"
            )));
        }
        Ok(Self {
            h: self.h.scaled(t),
        })
    }

    pub fn minkowski_sum(&self, other: &Self) -> Self {
        Self {
            h: self.h.add_scaled(&other.h, 1.0),
        }
    }

    /// Accepts iff `min_j (h + h'')(theta_j) >= eps_convex` on the `n`-node grid.
    pub fn validate(&self, n: usize, eps_convex: f64) -> Result<Convexity> {
        if n < 4 * self.degree() {
            return Err(Error::InsufficientNodes {
                nodes: n,
                degree: self.degree(),
            });
        }
        let grid = Grid::new(n)?;
        let profile = grid.sample(&self.curvature_poly());
        let (node, min) = profile
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("grid is nonempty");
        let theta = grid.angle(node);
        if min >= eps_convex {
            Ok(Convexity { min, node, theta })
        } else {
            Err(Error::NotConvex { min, node, theta })
        }
    }

    /// Validation on the default grid for this body's degree.
    pub fn validate_default(&self, eps_convex: f64) -> Result<Convexity> {
        self.validate(validation_nodes(self.degree()), eps_convex)
    }
}

/// Default validation grid: 4x oversampled, never below 256 nodes.
pub fn validation_nodes(degree: usize) -> usize {
    pow2_at_least(4 * degree + 1).max(256)
}

/// Deterministic random body of the given degree with zero first harmonics.
///
/// Harmonic `k` is drawn uniformly from `[-k^-p, k^-p]` for both the cosine
/// and sine coefficient, `a0 = 1`, and all harmonics are then shrunk by one
/// common factor so that `min(h + h'') >= 0.1`.
pub fn random_body(seed: u64, degree: usize, decay: f64) -> Result<SupportBody> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_body_with(&mut rng, degree, decay)
}

pub fn random_body_with<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    decay: f64,
) -> Result<SupportBody> {
    body_from_draws(degree, decay, || rng.gen_range(-1.0..1.0))
}

pub(crate) fn body_from_draws(
    degree: usize,
    decay: f64,
    mut draw: impl FnMut() -> f64,
) -> Result<SupportBody> {
    if degree < 2 {
        return Err(Error::InvalidBody(format!("random degree {degree} < 2")));
    }
    if !(decay >= 2.0) {
        return Err(Error::InvalidBody(format!("random decay {decay} < 2")));
    }
    let mut cos = vec![0.0; degree];
    let mut sin = vec![0.0; degree];
    for k in 2..=degree {
        let amplitude = (k as f64).powf(-decay);
        cos[k - 1] = amplitude * draw();
        sin[k - 1] = amplitude * draw();
    }
    let harmonics = TrigPoly::new(0.0, cos, sin);
    // min of the harmonic part of h + h''; the constant part contributes 1
    let (_, lowest) = harmonics.curvature().minimum();
    let margin = 1.0 - CORPUS_EPS_CONVEX;
    let factor = if 1.0 + lowest >= CORPUS_EPS_CONVEX + 1e-9 {
        1.0
    } else {
        margin / -lowest * (1.0 - 1e-9)
    };
    let h = TrigPoly::constant(1.0).add_scaled(&harmonics, factor);
    Ok(SupportBody::from_poly(h))
}
