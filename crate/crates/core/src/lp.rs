//! Dense simplex solver for linear programs with a handful of free variables
//! and many inequality rows:
//!
//! ```text
//!     maximize  c . z   subject to   a_i . z <= b_i   (i = 0..m),   z in R^n
//! ```
//!
//! The solver runs a two-phase revised simplex on the dual
//! `minimize b . y  s.t.  sum_i y_i a_i = c,  y >= 0`, whose basis is only
//! `n x n`. Pricing costs `O(m n)` per pivot, which keeps containment problems
//! with tens of thousands of rows cheap. The primal optimum is read off as the
//! simplex multipliers of the final dual basis.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-10;
const DEGENERATE_STREAK: usize = 30;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct InequalityLp {
    objective: Vec<f64>,
    coeffs: Vec<f64>,
    rhs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub z: Vec<f64>,
    pub value: f64,
    /// Rows in the final basis (tight at `z` up to rounding).
    pub active: Vec<usize>,
    pub pivots: usize,
}

impl InequalityLp {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            coeffs: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    /// Adds the row `coeffs . z <= rhs`.
    pub fn push(&mut self, coeffs: &[f64], rhs: f64) {
        assert_eq!(coeffs.len(), self.dim(), "row length mismatch");
        self.coeffs.extend_from_slice(coeffs);
        self.rhs.push(rhs);
    }

    fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.coeffs[i * n..(i + 1) * n]
    }

    /// Largest violation `max_i (a_i . z - b_i)`, or `-inf` without rows.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        (0..self.rows())
            .map(|i| dot(self.row(i), z) - self.rhs[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn solve(&self) -> Result<LpSolution> {
        DualSimplex::new(self).run()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    Feasibility,
    Optimality,
}

struct DualSimplex<'a> {
    lp: &'a InequalityLp,
    n: usize,
    m: usize,
    /// Equality rows are negated where `c_k < 0` so the dual right-hand side is nonnegative.
    sign: Vec<f64>,
    target: DVector<f64>,
    /// Variables `0..m` are dual multipliers, `m..m+n` are artificials.
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    pivots: usize,
}

impl<'a> DualSimplex<'a> {
    fn new(lp: &'a InequalityLp) -> Self {
        let n = lp.dim();
        let m = lp.rows();
        let sign: Vec<f64> = lp
            .objective
            .iter()
            .map(|&c| if c < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let target = DVector::from_iterator(n, lp.objective.iter().zip(&sign).map(|(c, s)| c * s));
        let basis: Vec<usize> = (m..m + n).collect();
        let mut in_basis = vec![false; m + n];
        for &j in &basis {
            in_basis[j] = true;
        }
        Self {
            lp,
            n,
            m,
            sign,
            target,
            basis,
            in_basis,
            pivots: 0,
        }
    }

    fn column(&self, j: usize, k: usize) -> f64 {
        if j < self.m {
            self.sign[k] * self.lp.row(j)[k]
        } else if j - self.m == k {
            1.0
        } else {
            0.0
        }
    }

    fn cost(&self, phase: Phase, j: usize) -> f64 {
        match (phase, j < self.m) {
            (Phase::Feasibility, true) => 0.0,
            (Phase::Feasibility, false) => 1.0,
            (Phase::Optimality, true) => self.lp.rhs[j],
            (Phase::Optimality, false) => 0.0,
        }
    }

    fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |k, col| self.column(self.basis[col], k))
    }

    fn run(mut self) -> Result<LpSolution> {
        if self.n == 0 {
            return Err(Error::SolverFailure("no variables".into()));
        }
        self.iterate(Phase::Feasibility)?;
        let lu = self.basis_matrix().lu();
        let x = lu
            .solve(&self.target)
            .ok_or_else(|| Error::SolverFailure("singular basis".into()))?;
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(x.iter())
            .filter(|(&j, _)| j >= self.m)
            .map(|(_, &v)| v.max(0.0))
            .sum();
        let scale = self.target.amax().max(1.0);
        if infeasibility > FEAS_TOL * scale {
            return Err(Error::SolverFailure("objective is unbounded".into()));
        }
        self.drive_out_artificials()?;
        self.iterate(Phase::Optimality)?;

        let lu = self.basis_matrix().transpose().lu();
        let costs = DVector::from_iterator(
            self.n,
            self.basis.iter().map(|&j| self.cost(Phase::Optimality, j)),
        );
        let pi = lu
            .solve(&costs)
            .ok_or_else(|| Error::SolverFailure("singular basis".into()))?;
        let z: Vec<f64> = pi.iter().zip(&self.sign).map(|(p, s)| p * s).collect();
        let value = dot(&z, &self.lp.objective);
        let active = self.basis.iter().copied().filter(|&j| j < self.m).collect();
        Ok(LpSolution {
            z,
            value,
            active,
            pivots: self.pivots,
        })
    }

    fn drive_out_artificials(&mut self) -> Result<()> {
        for pos in 0..self.n {
            if self.basis[pos] < self.m {
                continue;
            }
            let lu = self.basis_matrix().transpose().lu();
            let mut unit = DVector::zeros(self.n);
            unit[pos] = 1.0;
            let row = lu
                .solve(&unit)
                .ok_or_else(|| Error::SolverFailure("singular basis".into()))?;
            let best = (0..self.m)
                .filter(|&j| !self.in_basis[j])
                .map(|j| {
                    let v: f64 = (0..self.n).map(|k| row[k] * self.column(j, k)).sum();
                    (j, v.abs())
                })
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            if let Some((j, v)) = best {
                if v > 1e-9 {
                    self.swap(pos, j);
                }
            }
        }
        Ok(())
    }

    fn swap(&mut self, pos: usize, entering: usize) {
        self.in_basis[self.basis[pos]] = false;
        self.in_basis[entering] = true;
        self.basis[pos] = entering;
        self.pivots += 1;
    }

    fn iterate(&mut self, phase: Phase) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::SolverFailure("pivot limit exceeded".into()));
            }
            let basis = self.basis_matrix();
            let lu = basis.clone().lu();
            let x = lu
                .solve(&self.target)
                .ok_or_else(|| Error::SolverFailure("singular basis".into()))?;
            let costs =
                DVector::from_iterator(self.n, self.basis.iter().map(|&j| self.cost(phase, j)));
            let pi = basis
                .transpose()
                .lu()
                .solve(&costs)
                .ok_or_else(|| Error::SolverFailure("singular basis".into()))?;

            let cost_scale = pi.amax().max(1.0);
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.m {
                if self.in_basis[j] {
                    continue;
                }
                let row = self.lp.row(j);
                let mut reduced = self.cost(phase, j);
                for k in 0..self.n {
                    reduced -= pi[k] * self.sign[k] * row[k];
                }
                if reduced < -PRICE_TOL * cost_scale {
                    if bland {
                        entering = Some((j, reduced));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| reduced < best) {
                        entering = Some((j, reduced));
                    }
                }
            }
            let Some((enter, _)) = entering else {
                return Ok(());
            };

            let column = DVector::from_fn(self.n, |k, _| self.column(enter, k));
            let direction = lu
                .solve(&column)
                .ok_or_else(|| Error::SolverFailure("singular basis".into()))?;
            let mut leaving: Option<(usize, f64)> = None;
            for pos in 0..self.n {
                let w = direction[pos];
                if w <= PIVOT_TOL {
                    continue;
                }
                let ratio = x[pos].max(0.0) / w;
                let better = match leaving {
                    None => true,
                    Some((best_pos, best)) => {
                        if ratio < best - 1e-15 {
                            true
                        } else if ratio <= best + 1e-15 {
                            // ties: artificials first, then lowest index
                            let (a, b) = (self.basis[pos], self.basis[best_pos]);
                            (a >= self.m && b < self.m) || ((a >= self.m) == (b >= self.m) && a < b)
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leaving = Some((pos, ratio));
                }
            }
            let Some((pos, step)) = leaving else {
                return match phase {
                    Phase::Optimality => {
                        Err(Error::SolverFailure("constraints are infeasible".into()))
                    }
                    Phase::Feasibility => {
                        Err(Error::SolverFailure("unbounded feasibility phase".into()))
                    }
                };
            };
            if step <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.swap(pos, enter);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_two_variable_program() {
        let mut lp = InequalityLp::new(vec![1.0, 1.0]);
        lp.push(&[1.0, 0.0], 1.0);
        lp.push(&[0.0, 1.0], 2.0);
        lp.push(&[1.0, 1.0], 2.5);
        lp.push(&[-1.0, 0.0], 0.0);
        lp.push(&[0.0, -1.0], 0.0);
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.value, 2.5, epsilon = 1e-12);
        assert!(lp.max_violation(&sol.z) < 1e-12);
    }

    #[test]
    fn negative_objective_components() {
        // minimize x + 2y over the triangle x >= 1, y >= -3, x + y <= 4
        let mut lp = InequalityLp::new(vec![-1.0, -2.0]);
        lp.push(&[-1.0, 0.0], -1.0);
        lp.push(&[0.0, -1.0], 3.0);
        lp.push(&[1.0, 1.0], 4.0);
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.z[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.z[1], -3.0, epsilon = 1e-12);
    }

    #[test]
    fn detects_unbounded_and_infeasible() {
        let mut lp = InequalityLp::new(vec![1.0]);
        lp.push(&[-1.0], 0.0);
        assert!(lp.solve().is_err());

        let mut lp = InequalityLp::new(vec![1.0]);
        lp.push(&[1.0], -1.0);
        lp.push(&[-1.0], -1.0);
        assert!(lp.solve().is_err());
    }

    #[test]
    fn chebyshev_centre_of_square() {
        // maximize r such that the disk (x, y, r) fits in [0, 2] x [0, 1]
        let mut lp = InequalityLp::new(vec![0.0, 0.0, 1.0]);
        lp.push(&[1.0, 0.0, 1.0], 2.0);
        lp.push(&[-1.0, 0.0, 1.0], 0.0);
        lp.push(&[0.0, 1.0, 1.0], 1.0);
        lp.push(&[0.0, -1.0, 1.0], 0.0);
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.value, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.z[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn highly_degenerate_polygon() {
        // all 720 tangent lines of the unit circle are tight at the optimum
        let n = 720;
        let mut lp = InequalityLp::new(vec![0.0, 0.0, 1.0]);
        for j in 0..n {
            let (s, c) = (std::f64::consts::TAU * j as f64 / n as f64).sin_cos();
            lp.push(&[c, s, 1.0], 1.0);
        }
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.value, 1.0, epsilon = 1e-12);
        assert!(sol.z[0].abs() < 1e-12 && sol.z[1].abs() < 1e-12);
    }
}
