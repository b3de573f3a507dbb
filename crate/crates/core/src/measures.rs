//! Areas, mixed areas and the relative Steiner polynomial.
//!
//! Every integrand here is a product of two trigonometric polynomials, so the
//! uniform trapezoidal rule on `n > 2 (deg K + deg L)` nodes is exact up to
//! rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::support_body::{GridProfile, SupportBody};
use crate::trig::{pow2_at_least, Grid};

/// Radicands above `-DISCRIMINANT_CLAMP * max(1, V(K,L)^2)` are rounding noise.
pub const DISCRIMINANT_CLAMP: f64 = 1e-12;

/// Quadrature node count for a pair: `max(1024, 8 (deg K + deg L))`, rounded
/// up to a power of two.
pub fn node_count(k: &SupportBody, l: &SupportBody) -> usize {
    pow2_at_least((8 * (k.degree() + l.degree())).max(1024))
}

/// Uniform trapezoidal rule over one period.
pub fn integrate_periodic(profile: &GridProfile) -> f64 {
    let n = profile.node_count();
    assert!(n > 0, "empty profile");
    std::f64::consts::TAU / n as f64 * profile.values().iter().sum::<f64>()
}

fn quadrature(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    std::f64::consts::TAU / n as f64 * (0..n).map(f).sum::<f64>()
}

/// `V(K) = 1/2 int h (h + h'')`.
pub fn area(k: &SupportBody) -> f64 {
    mixed_area(k, k)
}

/// `V(K, L) = 1/2 int h_K (h_L + h_L'')`.
pub fn mixed_area(k: &SupportBody, l: &SupportBody) -> f64 {
    let n = node_count(k, l);
    let value = mixed_area_on(k, l, n);
    debug_assert!(
        (value - mixed_area_gradient_form(k, l)).abs() <= 1e-10 * value.abs().max(1.0),
        "mixed area forms disagree"
    );
    value
}

/// `V(K, L)` on an explicit power-of-two node count.
pub fn mixed_area_on(k: &SupportBody, l: &SupportBody, n: usize) -> f64 {
    let grid = Grid::new(n).expect("power-of-two node count");
    let hk = grid.sample(k.support());
    let rl = grid.sample(&l.curvature_poly());
    0.5 * quadrature(n, |j| hk[j] * rl[j])
}

/// `V(K, L) = 1/2 int (h_K h_L - h_K' h_L')`.
pub fn mixed_area_gradient_form(k: &SupportBody, l: &SupportBody) -> f64 {
    let n = node_count(k, l);
    let grid = Grid::new(n).expect("power-of-two node count");
    let hk = grid.sample(k.support());
    let hl = grid.sample(l.support());
    let dk = grid.sample(&k.support().derivative());
    let dl = grid.sample(&l.support().derivative());
    0.5 * quadrature(n, |j| hk[j] * hl[j] - dk[j] * dl[j])
}

/// Coefficients and roots of `V(K + tL) = V(K) + 2 V(K,L) t + V(L) t^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerData {
    pub v_k: f64,
    pub v_l: f64,
    pub v_kl: f64,
    /// `sqrt(V(K,L)^2 - V(K) V(L))`
    pub delta: f64,
    /// Larger root.
    pub t1: f64,
    /// Smaller root.
    pub t2: f64,
}

impl SteinerData {
    pub fn eval(&self, t: f64) -> f64 {
        self.v_k + 2.0 * self.v_kl * t + self.v_l * t * t
    }

    /// `V(K,L)^2 - V(K) V(L)` evaluated directly from the three areas.
    pub fn discriminant(&self) -> f64 {
        self.v_kl * self.v_kl - self.v_k * self.v_l
    }

    /// `V(K,L) / V(L)`, the midpoint of `-t1` and `-t2`.
    pub fn ratio(&self) -> f64 {
        self.v_kl / self.v_l
    }

    /// `delta / V(L)`, the half-gap between `-t2` and `-t1`.
    pub fn half_gap(&self) -> f64 {
        self.delta / self.v_l
    }
}

/// Areas, discriminant and roots of the relative Steiner polynomial.
///
/// The radicand is evaluated as `-V(L) V(D, D)` with `D = h_K - (V(K,L)/V(L)) h_L`,
/// which equals `V(K,L)^2 - V(K) V(L)` but stays accurate when `K` and `L` are
/// nearly homothetic.
pub fn steiner_data(k: &SupportBody, l: &SupportBody) -> Result<SteinerData> {
    let n = node_count(k, l);
    let v_k = mixed_area_on(k, k, n);
    let v_l = mixed_area_on(l, l, n);
    let v_kl = mixed_area_on(k, l, n);
    if !(v_k > 0.0 && v_l > 0.0 && v_kl > 0.0) {
        return Err(Error::Domain(format!(
            "non-positive area: V(K) = {v_k}, V(L) = {v_l}, V(K,L) = {v_kl}"
        )));
    }
    let ratio = v_kl / v_l;
    let deviation = SupportBody::from_poly(k.support().add_scaled(l.support(), -ratio));
    let radicand = -v_l * mixed_area_on(&deviation, &deviation, n);
    let delta = if radicand >= 0.0 {
        radicand.sqrt()
    } else if radicand >= -DISCRIMINANT_CLAMP * v_kl.powi(2).max(1.0) {
        0.0
    } else {
        return Err(Error::NegativeDiscriminant(radicand));
    };
    Ok(SteinerData {
        v_k,
        v_l,
        v_kl,
        delta,
        t1: -ratio + delta / v_l,
        t2: -ratio - delta / v_l,
    })
}

/// `V(K) + 2 V(K,L) t + V(L) t^2`; any real `t`.
pub fn steiner_eval(k: &SupportBody, l: &SupportBody, t: f64) -> f64 {
    let n = node_count(k, l);
    mixed_area_on(k, k, n) + 2.0 * mixed_area_on(k, l, n) * t + mixed_area_on(l, l, n) * t * t
}
