//! Relative curvature radius, the half-measure partition of the circle, and
//! the verifier for
//!
//! ```text
//!   (1/V(L)) ∫ F(ρ) h_L (h_L + h_L'') dθ  >=  F(ρ1) + F(ρ2)  >=  F(-t1) + F(-t2)
//! ```
//!
//! for strictly convex `F` and a pair at dilation position. The measure
//! `dμ = h_L (h_L + h_L'') dθ` has total mass `2 V(L)`; `I1` is the superlevel
//! set `{ρ >= a}` of mass `V(L)` and `ρ1`, `ρ2` are the `μ`-averages of `ρ` on
//! `I1` and its complement.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dilation::{certify, DilationCertificate, DilationConfig};
use crate::error::{Error, Result};
use crate::measures::{node_count, steiner_data, SteinerData};
use crate::support_body::{GridProfile, SupportBody};
use crate::trig::{Grid, TrigPoly};

/// A strictly convex function on `(0, ∞)`.
#[derive(Clone)]
pub enum ConvexFunctional {
    /// `x^2`; second derivative 2.
    Square,
    /// `1/x`; second derivative `2/x^3 > 0`.
    Reciprocal,
    /// `e^-x`; second derivative `e^-x > 0`.
    ExpNeg,
    /// `x ln x`; second derivative `1/x > 0`.
    XLogX,
    /// `x^p` for `p > 1`; second derivative `p (p-1) x^(p-2) > 0`.
    Power(f64),
    /// User supplied; convexity is not checked.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// Exponent of the `power_p` registry entry.
pub const DEFAULT_POWER: f64 = 1.5;

impl ConvexFunctional {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// The built-in functionals, in report order.
    pub fn registry() -> Vec<Self> {
        vec![
            Self::Square,
            Self::Reciprocal,
            Self::ExpNeg,
            Self::XLogX,
            Self::Power(DEFAULT_POWER),
        ]
    }

    /// Parses a registry name: `square`, `reciprocal`, `expNeg`, `xLogX`,
    /// or `power_<p>` with `p > 1`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "square" => Ok(Self::Square),
            "reciprocal" => Ok(Self::Reciprocal),
            "expNeg" => Ok(Self::ExpNeg),
            "xLogX" => Ok(Self::XLogX),
            _ => {
                let p = name
                    .strip_prefix("power_")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::UnknownFunctional(name.to_string()))?;
                if p > 1.0 && p.is_finite() {
                    Ok(Self::Power(p))
                } else {
                    Err(Error::UnknownFunctional(name.to_string()))
                }
            }
        }
    }

    /// `all` selects the registry; otherwise a comma-separated list of names.
    pub fn parse_list(names: &str) -> Result<Vec<Self>> {
        if names == "all" {
            return Ok(Self::registry());
        }
        names.split(',').map(|s| Self::parse(s.trim())).collect()
    }

    pub fn name(&self) -> String {
        match self {
            Self::Square => "square".into(),
            Self::Reciprocal => "reciprocal".into(),
            Self::ExpNeg => "expNeg".into(),
            Self::XLogX => "xLogX".into(),
            Self::Power(p) => format!("power_{p}"),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Square => x * x,
            Self::Reciprocal => 1.0 / x,
            Self::ExpNeg => (-x).exp(),
            Self::XLogX => x * x.ln(),
            Self::Power(p) => x.powf(*p),
            Self::Custom { f, .. } => f(x),
        }
    }

    pub fn convexity_checked(&self) -> bool {
        !matches!(self, Self::Custom { .. })
    }
}

impl fmt::Debug for ConvexFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `ρ = (h_K + h_K'') / (h_L + h_L'')` on the `n`-node grid.
pub fn relative_curvature_radius(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
) -> Result<GridProfile> {
    let rk = k.curvature_profile(n)?;
    let rl = l.curvature_profile(n)?;
    let values = rk
        .values()
        .iter()
        .zip(rl.values())
        .map(|(&num, &den)| {
            if den > 0.0 {
                Ok(num / den)
            } else {
                Err(Error::Domain(format!(
                    "h_L + h_L'' = {den} is not positive"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridProfile::new(values))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    /// Threshold with `μ({ρ >= a}) = V(L)`, located on the continuum.
    pub a: f64,
    /// Threshold found by the grid prefix construction.
    pub grid_a: f64,
    /// Per-node membership in `I1`; fractional only at the straddling node.
    #[serde(skip)]
    pub weights: Vec<f64>,
    pub rho1: f64,
    pub rho2: f64,
    /// `ρ1 = V(K,L)/V(L) + b`
    pub b: f64,
    /// `Σ weights_j w_j` for the grid construction.
    pub grid_measure: f64,
    /// `μ(I1)` over the continuum arcs.
    pub arc_measure: f64,
    /// `I1` as angle intervals; empty when `ρ` is constant.
    pub arcs: Vec<[f64; 2]>,
}

/// Splits the circle into `I1 = {ρ >= a}` and its complement, each of
/// `μ`-measure `V(L)`.
///
/// The grid construction sorts nodes by descending `ρ` (ties by index),
/// accumulates node masses `w_j = (2π/n) h_L (h_L + h_L'')` up to `V(L)` and
/// gives the straddling node a fractional weight. The threshold is then
/// located on the continuum: crossings of `ρ = a` are bracketed on an 8x finer
/// grid and solved, and `μ` and `ρ dμ = h_L (h_K + h_K'') dθ`, both
/// trigonometric polynomials, are integrated exactly over the resulting arcs.
pub fn partition(k: &SupportBody, l: &SupportBody, n: usize) -> Result<PartitionResult> {
    let steiner = steiner_data(k, l)?;
    partition_with(k, l, n, &steiner)
}

pub fn partition_with(
    k: &SupportBody,
    l: &SupportBody,
    n: usize,
    steiner: &SteinerData,
) -> Result<PartitionResult> {
    let rho = relative_curvature_radius(k, l, n)?;
    let grid = Grid::new(n)?;
    let hl = grid.sample(l.support());
    let rl = grid.sample(&l.curvature_poly());
    let step = TAU / n as f64;
    let masses: Vec<f64> = hl.iter().zip(&rl).map(|(h, r)| step * h * r).collect();
    let target = steiner.v_l;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| rho.values()[j].total_cmp(&rho.values()[i]).then(i.cmp(&j)));
    let mut weights = vec![0.0; n];
    let mut total = 0.0;
    let mut grid_a = rho.values()[order[0]];
    for &j in &order {
        let w = masses[j];
        if w <= 0.0 {
            continue;
        }
        grid_a = rho.values()[j];
        if total + w >= target {
            weights[j] = (target - total) / w;
            break;
        }
        weights[j] = 1.0;
        total += w;
    }
    let grid_measure: f64 = weights.iter().zip(&masses).map(|(a, w)| a * w).sum();

    let curv_k = k.curvature_poly();
    let curv_l = l.curvature_poly();
    let density = l.support().mul(&curv_l);
    let weighted = l.support().mul(&curv_k);
    let ratio = steiner.ratio();

    let fine = Grid::new(8 * n)?;
    let fine_k = fine.sample(&curv_k);
    let fine_l = fine.sample(&curv_l);
    let fine_rho: Vec<f64> = fine_k.iter().zip(&fine_l).map(|(a, b)| a / b).collect();
    let (lo, hi) = fine_rho
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });

    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Ok(PartitionResult {
            a: ratio,
            grid_a,
            weights,
            rho1: ratio,
            rho2: ratio,
            b: 0.0,
            grid_measure,
            arc_measure: target,
            arcs: Vec::new(),
        });
    }

    let level = LevelSets {
        fine: &fine,
        fine_rho: &fine_rho,
        curv_k: &curv_k,
        curv_l: &curv_l,
    };
    let measure_at = |a: f64| -> f64 {
        level
            .arcs(a)
            .iter()
            .map(|[from, to]| density.integral(*from, *to))
            .sum()
    };
    let (mut a_lo, mut a_hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a_lo + a_hi);
        if mid <= a_lo || mid >= a_hi {
            break;
        }
        if measure_at(mid) >= target {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
    }
    let a = 0.5 * (a_lo + a_hi);
    let arcs = level.arcs(a);
    let arc_measure: f64 = arcs.iter().map(|[f, t]| density.integral(*f, *t)).sum();
    let arc_weighted: f64 = arcs.iter().map(|[f, t]| weighted.integral(*f, *t)).sum();
    let total_measure = density.period_integral();
    let total_weighted = weighted.period_integral();

    // Both averages are stationary in `a` at the true threshold, so a residual
    // error in `a` enters only at second order.
    let rho1 = a + (arc_weighted - a * arc_measure) / target;
    let rho2 = a - (a * (total_measure - arc_measure) - (total_weighted - arc_weighted)) / target;

    Ok(PartitionResult {
        a,
        grid_a,
        weights,
        rho1,
        rho2,
        b: rho1 - ratio,
        grid_measure,
        arc_measure,
        arcs,
    })
}

struct LevelSets<'a> {
    fine: &'a Grid,
    fine_rho: &'a [f64],
    curv_k: &'a TrigPoly,
    curv_l: &'a TrigPoly,
}

impl LevelSets<'_> {
    /// Arcs where `ρ >= a`, as `[from, to]` with `from < to <= from + 2π`.
    fn arcs(&self, a: f64) -> Vec<[f64; 2]> {
        let m = self.fine.len();
        let above = |i: usize| self.fine_rho[i % m] >= a;
        // sign of h_K'' + h_K - a (h_L'' + h_L) matches that of ρ - a
        let g = |t: f64| self.curv_k.eval(t) - a * self.curv_l.eval(t);
        let mut ups = Vec::new();
        let mut downs = Vec::new();
        for i in 0..m {
            let (now, next) = (above(i), above(i + 1));
            if now == next {
                continue;
            }
            let from = self.fine.angle(i);
            let to = from + TAU / m as f64;
            let root = bracketed_root(g, from, to);
            if next {
                ups.push(root);
            } else {
                downs.push(root);
            }
        }
        if ups.is_empty() {
            return if above(0) {
                vec![[0.0, TAU]]
            } else {
                Vec::new()
            };
        }
        ups.iter()
            .map(|&up| {
                let down = downs
                    .iter()
                    .copied()
                    .filter(|&d| d > up)
                    .fold(f64::INFINITY, f64::min);
                let down = if down.is_finite() {
                    down
                } else {
                    downs.iter().copied().fold(f64::INFINITY, f64::min) + TAU
                };
                [up, down]
            })
            .collect()
    }
}

/// Root of `f` in `[lo, hi]` given a sign change, by Illinois false position.
fn bracketed_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for _ in 0..100 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let fx = f(x);
        if fx == 0.0 || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return x;
        }
        if (fx > 0.0) == (fhi > 0.0) {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (lo + hi)
}

/// `(1/V(L)) ∫ F(ρ) h_L (h_L + h_L'') dθ` by the trapezoidal rule.
pub fn lhs_functional(
    k: &SupportBody,
    l: &SupportBody,
    f: &ConvexFunctional,
    n: usize,
) -> Result<f64> {
    let rho = relative_curvature_radius(k, l, n)?;
    lhs_on_grid(l, &rho, f)
}

fn lhs_on_grid(l: &SupportBody, rho: &GridProfile, f: &ConvexFunctional) -> Result<f64> {
    let n = rho.node_count();
    let grid = Grid::new(n)?;
    let hl = grid.sample(l.support());
    let rl = grid.sample(&l.curvature_poly());
    let mut weighted = 0.0;
    let mut mass = 0.0;
    for j in 0..n {
        let r = rho.values()[j];
        if !(r > 0.0) {
            return Err(Error::Domain(format!("ρ = {r} at node {j}")));
        }
        let w = hl[j] * rl[j];
        weighted += f.value(r) * w;
        mass += w;
    }
    // mass is ∫ h_L (h_L + h_L'') = 2 V(L), exact on the grid
    Ok(2.0 * weighted / mass)
}

/// `F(-t1) + F(-t2)`.
pub fn rhs_bound(steiner: &SteinerData, f: &ConvexFunctional) -> Result<f64> {
    if !(-steiner.t1 > 0.0) {
        return Err(Error::Domain(format!(
            "-t1 = {} is not positive",
            -steiner.t1
        )));
    }
    Ok(f.value(-steiner.t1) + f.value(-steiner.t2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Homothety {
    pub homothetic: bool,
    /// Max node deviation of the least-squares fit.
    pub residual: f64,
    pub lambda: f64,
    pub centre: [f64; 2],
}

/// Least-squares fit `h_K ≈ λ h_L + <c, u>`; homothetic iff the max node
/// deviation is below `1e-8 (1 + max h_K)`.
pub fn homothety_test(k: &SupportBody, l: &SupportBody, n: usize) -> Result<Homothety> {
    let grid = Grid::new(n)?;
    let hk = grid.sample(k.support());
    let hl = grid.sample(l.support());
    let design = DMatrix::from_fn(n, 3, |j, col| match col {
        0 => hl[j],
        1 => grid.normal(j)[0],
        _ => grid.normal(j)[1],
    });
    let rhs = DVector::from_column_slice(&hk);
    let fit = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Domain(format!("homothety fit failed: {e}")))?;
    let residual = (&design * &fit - &rhs).amax();
    let max_hk = hk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Homothety {
        homothetic: residual < 1e-8 * (1.0 + max_hk),
        residual,
        lambda: fit[0],
        centre: [fit[1], fit[2]],
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Quadrature nodes; defaults to [`node_count`] for the pair.
    pub nodes: Option<usize>,
    /// Absolute tolerance on slacks, bounds and the chain.
    pub tol: f64,
    /// Pairs whose homothety residual exceeds this must show strict slack.
    pub strict_residual: f64,
    /// Minimum slack demanded of non-homothetic pairs.
    pub strict_tol: f64,
    pub dilation: DilationConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            nodes: None,
            tol: 1e-9,
            strict_residual: 1e-3,
            strict_tol: 1e-6,
            dilation: DilationConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalOutcome {
    pub name: String,
    pub lhs: f64,
    /// `F(ρ1) + F(ρ2)`
    pub mid: f64,
    pub rhs: f64,
    pub slack: f64,
    /// `lhs >= mid >= rhs` within tolerance.
    pub chain_ok: bool,
    /// False only when strictness was required and the slack fell short.
    pub strict_ok: bool,
    pub convexity_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenOsherReport {
    pub nodes: usize,
    pub steiner: SteinerData,
    pub certificate: DilationCertificate,
    pub partition: PartitionResult,
    pub functionals: Vec<FunctionalOutcome>,
    /// `ρ1 - (-t2)`
    pub rho1_bound: f64,
    /// `b - δ/V(L)`
    pub b_bound: f64,
    pub homothetic: bool,
    pub residual: f64,
    /// Whether the strict inequality was demanded of this pair.
    pub strict_required: bool,
}

impl GreenOsherReport {
    pub fn min_slack(&self) -> f64 {
        self.functionals
            .iter()
            .map(|f| f.slack)
            .fold(f64::INFINITY, f64::min)
    }

    /// All slacks and bounds at least `-tol`, chains ordered, strictness met.
    pub fn passes(&self, tol: f64) -> bool {
        self.functionals
            .iter()
            .all(|f| f.slack >= -tol && f.chain_ok && f.strict_ok)
            && self.rho1_bound >= -tol
            && self.b_bound >= -tol
    }

    /// `|ρ1 + ρ2 - 2 V(K,L)/V(L)|`
    pub fn partition_identity_error(&self) -> f64 {
        (self.partition.rho1 + self.partition.rho2 - 2.0 * self.steiner.ratio()).abs()
    }
}

/// Certifies the pair as given and verifies the inequality chain.
pub fn verify(
    k: &SupportBody,
    l: &SupportBody,
    functionals: &[ConvexFunctional],
    cfg: &VerifyConfig,
) -> Result<GreenOsherReport> {
    let n = cfg.nodes.unwrap_or_else(|| node_count(k, l));
    let certificate = certify(k, l, n, &cfg.dilation)?;
    verify_certified(k, l, &certificate, functionals, cfg)
}

/// As [`verify`] with a certificate already in hand, e.g. from
/// [`crate::dilation::to_dilation_position`].
pub fn verify_certified(
    k: &SupportBody,
    l: &SupportBody,
    certificate: &DilationCertificate,
    functionals: &[ConvexFunctional],
    cfg: &VerifyConfig,
) -> Result<GreenOsherReport> {
    if !certificate.at_dilation_position {
        return Err(Error::NotAtDilationPosition);
    }
    let n = cfg.nodes.unwrap_or_else(|| node_count(k, l));
    let steiner = steiner_data(k, l)?;
    let partition = partition_with(k, l, n, &steiner)?;
    let identity = (partition.rho1 + partition.rho2 - 2.0 * steiner.ratio()).abs();
    if identity > 1e-8 * steiner.ratio().max(1.0) {
        return Err(Error::Domain(format!(
            "ρ1 + ρ2 misses 2 V(K,L)/V(L) by {identity:e}"
        )));
    }
    let rho = relative_curvature_radius(k, l, n)?;
    let homothety = homothety_test(k, l, n)?;
    let strict_required = homothety.residual > cfg.strict_residual;

    let outcomes = functionals
        .iter()
        .map(|f| {
            let lhs = lhs_on_grid(l, &rho, f)?;
            let mid = f.value(partition.rho1) + f.value(partition.rho2);
            let rhs = rhs_bound(&steiner, f)?;
            let slack = lhs - rhs;
            Ok(FunctionalOutcome {
                name: f.name(),
                lhs,
                mid,
                rhs,
                slack,
                chain_ok: lhs >= mid - cfg.tol && mid >= rhs - cfg.tol,
                strict_ok: !strict_required || slack > cfg.strict_tol,
                convexity_checked: f.convexity_checked(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GreenOsherReport {
        nodes: n,
        rho1_bound: partition.rho1 + steiner.t2,
        b_bound: partition.b - steiner.half_gap(),
        steiner,
        certificate: *certificate,
        partition,
        functionals: outcomes,
        homothetic: homothety.homothetic,
        residual: homothety.residual,
        strict_required,
    })
}
