//! Relative inradius and outradius, and translation of a pair into dilation
//! position.
//!
//! Containment `x + tL ⊆ K` is pointwise domination of support functions,
//! `t h_L(θ) + <x, u(θ)> <= h_K(θ)`. It is imposed on grid nodes as a linear
//! program in `(t, x)`. The gap `h_K - t h_L - <x, u>` is itself a
//! trigonometric polynomial, so its local minima between nodes are found
//! exactly; any below `-contain_tol` are added as rows and the program is
//! solved again.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::InequalityLp;
use crate::support_body::SupportBody;
use crate::trig::{Grid, TrigPoly};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationConfig {
    /// Allowed containment violation between grid nodes before adding rows.
    pub contain_tol: f64,
    /// Cap on cutting-plane rounds per radius.
    pub max_rounds: usize,
    /// Relaxation of the positioning constraints.
    pub slack: f64,
    /// Second, looser relaxation tried before giving up.
    pub relaxed_slack: f64,
    /// Containment tolerance used for the certificate flag.
    pub position_tol: f64,
    /// Support values within this distance of zero count as on the boundary.
    pub boundary_tol: f64,
}

impl Default for DilationConfig {
    fn default() -> Self {
        Self {
            contain_tol: 1e-11,
            max_rounds: 40,
            slack: 1e-9,
            relaxed_slack: 1e-6,
            position_tol: 1e-8,
            boundary_tol: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginClass {
    Interior,
    Tangent,
    Invalid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationCertificate {
    #[serde(rename = "r")]
    pub inradius: f64,
    #[serde(rename = "R")]
    pub outradius: f64,
    /// `x_in + r L ⊆ K`
    pub x_in: [f64; 2],
    /// `K ⊆ x_out + R L`
    pub x_out: [f64; 2],
    pub origin_class: OriginClass,
    pub at_dilation_position: bool,
    /// Largest violation of `r h_L <= h_K <= R h_L` and `h_K, h_L >= 0` on the grid.
    pub max_violation: f64,
}

/// Optimal scale with its witness translation and the number of constraint
/// rows in the final program.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radius {
    pub value: f64,
    pub witness: [f64; 2],
    pub nodes: usize,
    /// Continuum containment violation of the returned pair.
    pub violation: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Inner,
    Outer,
}

/// `r(K, L) = max { t : x + tL ⊆ K }` with its witness `x`.
pub fn inradius(k: &SupportBody, l: &SupportBody, n: usize) -> Result<(f64, [f64; 2])> {
    let r = inradius_with(k, l, n, &DilationConfig::default())?;
    Ok((r.value, r.witness))
}

/// Minimal covering scale `R(K, L) = min { t : K ⊆ x + tL }` with its witness `x`.
pub fn outradius(k: &SupportBody, l: &SupportBody, n: usize) -> Result<(f64, [f64; 2])> {
    let r = outradius_with(k, l, n, &DilationConfig::default())?;
    Ok((r.value, r.witness))
}

pub fn inradius_with(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    cfg: &DilationConfig,
) -> Result<Radius> {
    solve_radius(k, l, n, cfg, Side::Inner)
}

pub fn outradius_with(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    cfg: &DilationConfig,
) -> Result<Radius> {
    solve_radius(k, l, n, cfg, Side::Outer)
}

fn solve_radius(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    cfg: &DilationConfig,
    side: Side,
) -> Result<Radius> {
    let grid = Grid::new(n)?;
    let mut rows = Rows::from_grid(k, l, &grid);
    let check = Grid::new(4 * n)?;
    let mut rounds = 0;
    loop {
        let (value, witness) = radius_on_rows(k, l, &rows, side)?;
        let gap = gap_poly(k, l, value, witness, side);
        let minima = violated_minima(&gap, &check, cfg.contain_tol);
        let violation = minima
            .iter()
            .map(|&(_, v)| -v)
            .fold(-sampled_min(&gap, &check), f64::max)
            .max(0.0);
        rounds += 1;
        if minima.is_empty() || rounds >= cfg.max_rounds {
            return Ok(Radius {
                value,
                witness,
                nodes: rows.len(),
                violation,
            });
        }
        for (theta, _) in minima {
            rows.push(k, l, theta);
        }
    }
}

/// Containment rows `t h_L(θ) + <x, u(θ)> <= h_K(θ)` at a set of normals.
struct Rows {
    normals: Vec<[f64; 2]>,
    hk: Vec<f64>,
    hl: Vec<f64>,
}

impl Rows {
    fn from_grid(k: &SupportBody, l: &SupportBody, grid: &Grid) -> Self {
        Self {
            normals: (0..grid.len()).map(|j| grid.normal(j)).collect(),
            hk: grid.sample(k.support()),
            hl: grid.sample(l.support()),
        }
    }

    fn push(&mut self, k: &SupportBody, l: &SupportBody, theta: f64) {
        self.normals.push([theta.cos(), theta.sin()]);
        self.hk.push(k.eval(theta));
        self.hl.push(l.eval(theta));
    }

    fn len(&self) -> usize {
        self.normals.len()
    }
}

/// `h_K - t h_L - <x, u>` for the inner side, its negation for the outer.
/// Containment holds exactly where this is non-negative.
fn gap_poly(k: &SupportBody, l: &SupportBody, t: f64, x: [f64; 2], side: Side) -> TrigPoly {
    let shift = TrigPoly::new(0.0, vec![x[0]], vec![x[1]]);
    let gap = k
        .support()
        .add_scaled(l.support(), -t)
        .add_scaled(&shift, -1.0);
    match side {
        Side::Inner => gap,
        Side::Outer => gap.scaled(-1.0),
    }
}

fn sampled_min(p: &TrigPoly, grid: &Grid) -> f64 {
    grid.sample(p).into_iter().fold(f64::INFINITY, f64::min)
}

/// Local minima of `p` below `-tol`, located on `grid` and polished by Newton
/// steps on `p'`.
fn violated_minima(p: &TrigPoly, grid: &Grid, tol: f64) -> Vec<(f64, f64)> {
    let values = grid.sample(p);
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let m = values.len();
    let step = std::f64::consts::TAU / m as f64;
    let mut found = Vec::new();
    for j in 0..m {
        let v = values[j];
        if v >= -tol || v > values[(j + m - 1) % m] || v > values[(j + 1) % m] {
            continue;
        }
        let mut theta = grid.angle(j);
        for _ in 0..8 {
            let curv = d2.eval(theta);
            if !(curv > 0.0) {
                break;
            }
            let next = theta - d1.eval(theta) / curv;
            if (next - grid.angle(j)).abs() > step {
                break;
            }
            theta = next;
        }
        let value = p.eval(theta).min(v);
        if value < -tol {
            found.push((theta, value));
        }
    }
    found
}

fn radius_on_rows(
    k: &SupportBody,
    l: &SupportBody,
    rows: &Rows,
    side: Side,
) -> Result<(f64, [f64; 2])> {
    let sign = match side {
        Side::Inner => 1.0,
        Side::Outer => -1.0,
    };
    let mut lp = InequalityLp::new(vec![sign, 0.0, 0.0]);
    for j in 0..rows.len() {
        let [c, s] = rows.normals[j];
        lp.push(&[sign * rows.hl[j], sign * c, sign * s], sign * rows.hk[j]);
    }
    let sol = lp.solve()?;
    let t = sol.z[0];
    if !(t > 0.0) {
        return Err(Error::SolverFailure(format!(
            "non-positive optimal scale {t}"
        )));
    }
    let witness = centred_witness(k, l, rows, t, side).unwrap_or([sol.z[1], sol.z[2]]);
    Ok((t, witness))
}

/// With finitely many rows the optimal translations form a small polygon
/// rather than a point. Pick the one nearest (in max-norm) to `s(K) - t s(L)`,
/// where `s` is the Steiner point, so the witness moves with translations of
/// either body.
fn centred_witness(
    k: &SupportBody,
    l: &SupportBody,
    rows: &Rows,
    t: f64,
    side: Side,
) -> Option<[f64; 2]> {
    let steiner = |b: &SupportBody| [b.cos_coeffs()[0], b.sin_coeffs()[0]];
    let (sk, sl) = (steiner(k), steiner(l));
    let reference = [sk[0] - t * sl[0], sk[1] - t * sl[1]];
    let scale = rows
        .hk
        .iter()
        .chain(&rows.hl)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * scale;
    let sign = match side {
        Side::Inner => 1.0,
        Side::Outer => -1.0,
    };
    let mut lp = InequalityLp::new(vec![0.0, 0.0, -1.0]);
    for j in 0..rows.len() {
        let [c, s] = rows.normals[j];
        lp.push(
            &[sign * c, sign * s, 0.0],
            sign * (rows.hk[j] - t * rows.hl[j]) + eps,
        );
    }
    lp.push(&[1.0, 0.0, -1.0], reference[0]);
    lp.push(&[-1.0, 0.0, -1.0], -reference[0]);
    lp.push(&[0.0, 1.0, -1.0], reference[1]);
    lp.push(&[0.0, -1.0, -1.0], -reference[1]);
    let sol = lp.solve().ok()?;
    Some([sol.z[0], sol.z[1]])
}

/// Translates `K` and `L` so that `r L ⊆ K ⊆ R L` with the origin in both.
pub fn to_dilation_position(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
) -> Result<(SupportBody, SupportBody, DilationCertificate)> {
    to_dilation_position_with(k, l, n, &DilationConfig::default())
}

/// As [`to_dilation_position`], with explicit tolerances.
pub fn to_dilation_position_with(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    cfg: &DilationConfig,
) -> Result<(SupportBody, SupportBody, DilationCertificate)> {
    let inner = inradius_with(k, l, n, cfg)?;
    let outer = outradius_with(k, l, n, cfg)?;
    let (r, big_r) = ordered_radii(inner.value, outer.value);

    let grid = Grid::new(n)?;
    let hk = grid.sample(k.support());
    let hl = grid.sample(l.support());

    let mut placement = None;
    for slack in [cfg.slack, cfg.relaxed_slack] {
        if let Some(z) = place(&grid, &hk, &hl, r, big_r, slack) {
            placement = Some(z);
            break;
        }
    }
    let z = placement.ok_or_else(|| {
        Error::Infeasible(format!("no common translation for r = {r}, R = {big_r}"))
    })?;
    let (u_k, v_l) = ([z[0], z[1]], [z[2], z[3]]);
    let k_moved = k.translate(u_k);
    let l_moved = l.translate(v_l);

    let shift = |x: [f64; 2], t: f64| [x[0] + u_k[0] - t * v_l[0], x[1] + u_k[1] - t * v_l[1]];
    let certificate = build_certificate(
        &k_moved,
        &l_moved,
        &grid,
        r,
        big_r,
        shift(inner.witness, r),
        shift(outer.witness, big_r),
        cfg,
    );
    Ok((k_moved, l_moved, certificate))
}

/// Solves for `(u_K, v_L)` in two stages: the deepest achievable origin depth
/// `s*` inside both translated bodies, then the translation pair of least
/// max-norm that keeps the depth at least `s*/2`.
fn place(grid: &Grid, hk: &[f64], hl: &[f64], r: f64, big_r: f64, slack: f64) -> Option<Vec<f64>> {
    let band = |lp: &mut InequalityLp| {
        for j in 0..grid.len() {
            let [c, s] = grid.normal(j);
            lp.push(&[-c, -s, r * c, r * s, 0.0], hk[j] - r * hl[j] + slack);
            lp.push(
                &[c, s, -big_r * c, -big_r * s, 0.0],
                big_r * hl[j] - hk[j] + slack,
            );
        }
    };

    let mut deepest = InequalityLp::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    band(&mut deepest);
    for j in 0..grid.len() {
        let [c, s] = grid.normal(j);
        deepest.push(&[-c, -s, 0.0, 0.0, 1.0], hk[j]);
        deepest.push(&[0.0, 0.0, -c, -s, 1.0], hl[j]);
    }
    let sol = deepest.solve().ok()?;
    let depth = sol.value;
    if depth < -slack || deepest.max_violation(&sol.z) > slack {
        return None;
    }
    let required = if depth > 0.0 {
        0.5 * depth
    } else {
        depth - slack
    };

    let mut nearest = InequalityLp::new(vec![0.0, 0.0, 0.0, 0.0, -1.0]);
    band(&mut nearest);
    for j in 0..grid.len() {
        let [c, s] = grid.normal(j);
        nearest.push(&[-c, -s, 0.0, 0.0, 0.0], hk[j] - required);
        nearest.push(&[0.0, 0.0, -c, -s, 0.0], hl[j] - required);
    }
    for i in 0..4 {
        let mut row = [0.0; 5];
        row[4] = -1.0;
        row[i] = 1.0;
        nearest.push(&row, 0.0);
        row[i] = -1.0;
        nearest.push(&row, 0.0);
    }
    match nearest.solve() {
        Ok(near) if nearest.max_violation(&near.z) <= slack => Some(near.z),
        _ => Some(sol.z),
    }
}

/// Certificate for the pair as given, without translating anything.
pub fn certify(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    cfg: &DilationConfig,
) -> Result<DilationCertificate> {
    let inner = inradius_with(k, l, n, cfg)?;
    let outer = outradius_with(k, l, n, cfg)?;
    let (r, big_r) = ordered_radii(inner.value, outer.value);
    let grid = Grid::new(n)?;
    Ok(build_certificate(
        k,
        l,
        &grid,
        r,
        big_r,
        inner.witness,
        outer.witness,
        cfg,
    ))
}

fn ordered_radii(r: f64, big_r: f64) -> (f64, f64) {
    // homothetic pairs can come back with r exceeding R by rounding
    if r > big_r {
        let mid = 0.5 * (r + big_r);
        (mid, mid)
    } else {
        (r, big_r)
    }
}

#[allow(clippy::too_many_arguments)]
fn build_certificate(
    k: &SupportBody,
    l: &SupportBody,
    grid: &Grid,
    r: f64,
    big_r: f64,
    x_in: [f64; 2],
    x_out: [f64; 2],
    cfg: &DilationConfig,
) -> DilationCertificate {
    let hk = grid.sample(k.support());
    let hl = grid.sample(l.support());
    let max_violation = hk
        .iter()
        .zip(&hl)
        .map(|(&a, &b)| (r * b - a).max(a - big_r * b).max(-a).max(-b))
        .fold(f64::NEG_INFINITY, f64::max);
    DilationCertificate {
        inradius: r,
        outradius: big_r,
        x_in,
        x_out,
        origin_class: classify_origin_with(k, l, grid.len(), cfg.boundary_tol),
        at_dilation_position: max_violation <= cfg.position_tol,
        max_violation,
    }
}

/// Where the origin sits relative to a pair at dilation position.
pub fn classify_origin(k: &SupportBody, l: &SupportBody, n: usize) -> OriginClass {
    classify_origin_with(k, l, n, DilationConfig::default().boundary_tol)
}

pub fn classify_origin_with(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    boundary_tol: f64,
) -> OriginClass {
    let (theta_k, min_k) = k.support().minimum();
    let (theta_l, min_l) = l.support().minimum();
    if min_k > boundary_tol && min_l > boundary_tol {
        return OriginClass::Interior;
    }
    let gap = (theta_k - theta_l).rem_euclid(std::f64::consts::TAU);
    let gap = gap.min(std::f64::consts::TAU - gap);
    let adjacent = gap <= std::f64::consts::TAU / n as f64 + 1e-12;
    if min_k.abs() <= boundary_tol && min_l.abs() <= boundary_tol && adjacent {
        OriginClass::Tangent
    } else {
        OriginClass::Invalid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example_body() -> SupportBody {
        SupportBody::new(1.0, vec![0.0, 0.2], vec![]).unwrap()
    }

    #[test]
    fn radii_of_disks() {
        let (r, x) = inradius(&SupportBody::disk(2.0), &SupportBody::disk(1.0), 256).unwrap();
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-12);
        assert!(x[0].abs() < 1e-10 && x[1].abs() < 1e-10);
        let (big_r, _) = outradius(&SupportBody::disk(2.0), &SupportBody::disk(1.0), 256).unwrap();
        assert_abs_diff_eq!(big_r, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn radii_of_example_pair() {
        let (k, l) = (example_body(), SupportBody::disk(1.0));
        let (r, x) = inradius(&k, &l, 1024).unwrap();
        assert_abs_diff_eq!(r, 0.8, epsilon = 1e-12);
        assert!(x[0].abs() < 1e-10 && x[1].abs() < 1e-10);
        let (big_r, x) = outradius(&k, &l, 1024).unwrap();
        assert_abs_diff_eq!(big_r, 1.2, epsilon = 1e-12);
        assert!(x[0].abs() < 1e-10 && x[1].abs() < 1e-10);
    }

    #[test]
    fn inradius_is_translation_equivariant() {
        let k = SupportBody::new(1.0, vec![0.0, 0.1, 0.03], vec![0.0, -0.05, 0.02]).unwrap();
        let l = SupportBody::new(0.8, vec![0.0, 0.0, -0.02], vec![0.0, 0.04]).unwrap();
        let (r0, x0) = inradius(&k, &l, 1024).unwrap();
        let v = [0.4, -0.25];
        let (r1, x1) = inradius(&k.translate(v), &l, 1024).unwrap();
        assert_abs_diff_eq!(r0, r1, epsilon = 1e-10);
        assert_abs_diff_eq!(x1[0], x0[0] + v[0], epsilon = 1e-8);
        assert_abs_diff_eq!(x1[1], x0[1] + v[1], epsilon = 1e-8);
    }

    #[test]
    fn centred_example_pair_is_already_positioned() {
        let (k, l) = (example_body(), SupportBody::disk(1.0));
        let (k2, l2, cert) = to_dilation_position(&k, &l, 1024).unwrap();
        assert!(cert.at_dilation_position);
        assert_eq!(cert.origin_class, OriginClass::Interior);
        assert_abs_diff_eq!(cert.inradius, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.outradius, 1.2, epsilon = 1e-12);
        assert!(k2.cos_coeffs()[0].abs() < 1e-8 && l2.sin_coeffs()[0].abs() < 1e-8);
    }

    #[test]
    fn pre_translated_pair_is_repositioned() {
        let (k, l) = (example_body().translate([0.3, 0.1]), SupportBody::disk(1.0));
        let (k2, l2, cert) = to_dilation_position(&k, &l, 1024).unwrap();
        assert!(cert.at_dilation_position);
        let grid = Grid::new(1024).unwrap();
        let (hk, hl) = (grid.sample(k2.support()), grid.sample(l2.support()));
        for j in 0..1024 {
            assert!(cert.inradius * hl[j] <= hk[j] + 1e-8);
            assert!(hk[j] <= cert.outradius * hl[j] + 1e-8);
            assert!(hk[j] >= -1e-8 && hl[j] >= -1e-8);
        }
    }

    #[test]
    fn identical_disks() {
        let d = SupportBody::disk(1.0);
        let (_, _, cert) = to_dilation_position(&d, &d, 256).unwrap();
        assert_abs_diff_eq!(cert.inradius, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.outradius, 1.0, epsilon = 1e-12);
        assert_eq!(cert.origin_class, OriginClass::Interior);
    }

    #[test]
    fn origin_classification() {
        let (k, l) = (example_body(), SupportBody::disk(1.0));
        assert_eq!(classify_origin(&k, &l, 1024), OriginClass::Interior);

        let k = SupportBody::disk(1.0).translate([1.0, 0.0]);
        let l = SupportBody::disk(2.0).translate([2.0, 0.0]);
        assert_eq!(classify_origin(&k, &l, 1024), OriginClass::Tangent);

        let k = SupportBody::disk(1.0);
        let l = SupportBody::disk(1.0).translate([1.5, 0.0]);
        assert_eq!(classify_origin(&k, &l, 1024), OriginClass::Invalid);
    }

    #[test]
    fn certify_rejects_displaced_pair() {
        let (k, l) = (example_body().translate([0.3, 0.1]), SupportBody::disk(1.0));
        let cert = certify(&k, &l, 1024, &DilationConfig::default()).unwrap();
        assert!(!cert.at_dilation_position);
    }
}
