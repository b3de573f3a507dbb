//! Brute-force reference geometry that shares no code with the library:
//! support functions are evaluated straight from their coefficients and areas
//! come from the shoelace formula on densely sampled boundaries.
#![allow(dead_code)]

use std::f64::consts::TAU;

use greenosher::support_body::SupportBody;

/// `(h(θ), h'(θ))` summed directly from the Fourier coefficients.
pub fn support_and_slope(body: &SupportBody, theta: f64) -> (f64, f64) {
    let mut h = body.a0();
    let mut dh = 0.0;
    for (i, (&c, &s)) in body.cos_coeffs().iter().zip(body.sin_coeffs()).enumerate() {
        let k = (i + 1) as f64;
        let (sn, cs) = (k * theta).sin_cos();
        h += c * cs + s * sn;
        dh += k * (s * cs - c * sn);
    }
    (h, dh)
}

/// Boundary point with outward normal `(cos θ, sin θ)`.
pub fn boundary(body: &SupportBody, theta: f64) -> [f64; 2] {
    let (h, dh) = support_and_slope(body, theta);
    let (s, c) = theta.sin_cos();
    [h * c - dh * s, h * s + dh * c]
}

/// Vertices of the `n`-gon through boundary points at equally spaced normals.
pub fn polygon(body: &SupportBody, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|j| boundary(body, TAU * j as f64 / n as f64))
        .collect()
}

pub fn shoelace(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
}

/// Boundary samples of `K + tL` sharing normals: `x_K(θ) + t x_L(θ)`.
pub fn sum_polygon(k: &[[f64; 2]], l: &[[f64; 2]], t: f64) -> Vec<[f64; 2]> {
    k.iter()
        .zip(l)
        .map(|(p, q)| [p[0] + t * q[0], p[1] + t * q[1]])
        .collect()
}

pub fn polygon_area(body: &SupportBody, n: usize) -> f64 {
    shoelace(&polygon(body, n))
}

/// `½ [V(P_K + P_L) - V(P_K) - V(P_L)]`
pub fn polygon_mixed_area(k: &SupportBody, l: &SupportBody, n: usize) -> f64 {
    let (pk, pl) = (polygon(k, n), polygon(l, n));
    0.5 * (shoelace(&sum_polygon(&pk, &pl, 1.0)) - shoelace(&pk) - shoelace(&pl))
}

/// Midpoint rule over `[0, 2π)`.
pub fn midpoint(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let step = TAU / n as f64;
    step * (0..n).map(|j| f((j as f64 + 0.5) * step)).sum::<f64>()
}
