//! Collocation solution of the coupled Cauchy/logarithmic singular integral
//! equations for the dislocation and disclination densities of a crack
//! `|x| < a` under remote tension.
//!
//! The densities are written as `B = f/sqrt(a^2 - xi^2)` and
//! `W = g/sqrt(a^2 - xi^2)`. Unknowns are the nodal values of
//! `f/a` and `g/a` at the zeros of `T_n`; equations are imposed at the zeros
//! of `U_{n-1}` plus the two closure conditions. The system is assembled
//! with `mu = a = sigma0 = 1` and rescaled by `sigma0/mu` afterwards, so its
//! only parameters are `nu` and `p = a/l`.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::greens::MaterialParams;
use crate::specfun::unit;

/// Default number of integration nodes.
pub const DEFAULT_NODES: usize = 128;

/// Largest accepted 1-norm condition estimate of the row-equilibrated matrix.
pub const CONDITION_LIMIT: f64 = 1e13;

/// Below this `a/l` the continuum description is stretched; the solver warns.
pub const SMALL_P_WARNING: f64 = 0.1;

/// Crack half-length, remote tension and material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrackProblem {
    pub half_length: f64,
    pub remote_tension: f64,
    pub material: MaterialParams,
}

impl CrackProblem {
    pub fn new(half_length: f64, remote_tension: f64, material: MaterialParams) -> Result<Self> {
        let pb = Self {
            half_length,
            remote_tension,
            material,
        };
        pb.validate()?;
        Ok(pb)
    }

    /// Problem with `a = 1`, `sigma0 = 1`, `mu = 1` at the given `nu` and `p = a/l`.
    pub fn normalized(nu: f64, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("a/l must be positive, got {p}")));
        }
        let ell = if p.is_infinite() { 0.0 } else { 1.0 / p };
        Self::new(1.0, 1.0, MaterialParams::new(1.0, nu, ell)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if !(self.half_length > 0.0) || !self.half_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "crack half-length must be positive, got {}",
                self.half_length
            )));
        }
        if !self.remote_tension.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "remote tension must be finite, got {}",
                self.remote_tension
            )));
        }
        Ok(())
    }

    /// `p = a/l`; infinite for a classical material (`l = 0`).
    pub fn p(&self) -> f64 {
        self.half_length / self.material.char_length
    }

    /// Whether the material has no characteristic length.
    pub fn is_classical(&self) -> bool {
        self.material.char_length == 0.0
    }
}

/// Integration nodes `s_i` (zeros of `T_n`) and collocation points `t_k`
/// (zeros of `U_{n-1}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub collocation: Vec<f64>,
}

impl Discretization {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 nodes, got {n}")));
        }
        let nf = n as f64;
        let nodes = (1..=n)
            .map(|i| ((2 * i - 1) as f64 * PI / (2.0 * nf)).cos())
            .collect();
        let collocation = (1..n).map(|k| (k as f64 * PI / nf).cos()).collect();
        Ok(Self {
            n,
            nodes,
            collocation,
        })
    }

    /// Angle `theta_i` with `s_i = cos(theta_i)`.
    pub fn node_angle(&self, i: usize) -> f64 {
        (2 * i + 1) as f64 * PI / (2.0 * self.n as f64)
    }

    /// `t_k - s_i` for 0-based indices, free of cancellation near the ends.
    pub fn gap(&self, k: usize, i: usize) -> f64 {
        let a = (k + 1) as f64 * PI / self.n as f64;
        let b = self.node_angle(i);
        -2.0 * (0.5 * (a + b)).sin() * (0.5 * (a - b)).sin()
    }

    /// `T_n(t_k)` for the 0-based collocation index `k`.
    fn t_n_at_collocation(k: usize) -> f64 {
        if k % 2 == 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// `T_n'(s_i)` for the 0-based node index `i`.
    fn t_n_prime_at_node(&self, i: usize) -> f64 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.n as f64 / self.node_angle(i).sin()
    }
}

/// Solved nodal values of `f/a` and `g/a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySolution {
    pub f_vals: Vec<f64>,
    pub g_vals: Vec<f64>,
    pub problem: CrackProblem,
    pub disc: Discretization,
    /// 1-norm condition estimate of the row-equilibrated matrix.
    pub condition: f64,
    /// `|A x - b| / (|A| |x| + |b|)` in the infinity norm.
    pub residual: f64,
}

/// Square collocation system.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// `k1(x, xi) = a/(x - xi) [2l^2/(x-xi)^2 - K2(|x-xi|/l) - 1/2]`, zero at `x = xi`.
pub fn kernel_k1(x: f64, xi: f64, a: f64, ell: f64) -> f64 {
    let d = x - xi;
    if d == 0.0 {
        return 0.0;
    }
    a / d * unit::k2_reg_minus_half(d.abs() / ell)
}

/// `k2(x, xi) = [2l^2/(x-xi)^2 - K2] + [K0 + ln(|x-xi|/l)]`, equal to
/// `1/2 + ln 2 - gamma` at `x = xi`.
pub fn kernel_k2(x: f64, xi: f64, ell: f64) -> f64 {
    let z = (x - xi).abs() / ell;
    unit::k2_reg(z) + unit::k0_log_reg(z)
}

/// `k3(x, xi)`: the disclination kernel with its Cauchy part removed.
pub fn kernel_k3(x: f64, xi: f64, ell: f64) -> f64 {
    unit::k3_reg((x - xi) / ell)
}

/// `G_n(t) = -(pi/n) sum ln(p |t - s_i|) + pi ln(p/2)`.
pub fn log_quadrature_weight(t: f64, disc: &Discretization, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(domain("log_quadrature_weight", format!("p must be positive and finite, got {p}")));
    }
    let mut sum = 0.0;
    for &s in &disc.nodes {
        let d = (t - s).abs();
        if d == 0.0 {
            return Err(domain("log_quadrature_weight", format!("t = {t} is an integration node")));
        }
        sum += (p * d).ln();
    }
    Ok(-PI / disc.n as f64 * sum + PI * (p / 2.0).ln())
}

/// Log-kernel rule: `int_{-1}^{1} f(s) ln(p|t-s|) / sqrt(1-s^2) ds` from nodal values,
/// with the `G_n` correction applied through the Lagrange interpolant of `f`.
pub fn log_quadrature(values: &[f64], t: f64, disc: &Discretization, p: f64) -> Result<f64> {
    let g = log_quadrature_weight(t, disc, p)?;
    let nf = disc.n as f64;
    let t_n = (nf * t.clamp(-1.0, 1.0).acos()).cos();
    let mut plain = 0.0;
    let mut lagrange = 0.0;
    for (i, (&s, &v)) in disc.nodes.iter().zip(values).enumerate() {
        plain += v * (p * (t - s).abs()).ln();
        lagrange += v / ((t - s) * disc.t_n_prime_at_node(i));
    }
    Ok(PI / nf * plain + g * t_n * lagrange)
}

fn assemble_rows(problem: &CrackProblem, disc: &Discretization) -> Vec<(Vec<f64>, f64)> {
    let n = disc.n;
    let nf = n as f64;
    let nu = problem.material.poisson_ratio;
    if problem.is_classical() {
        let coef = 1.0 / (2.0 * (1.0 - nu) * nf);
        let mut rows: Vec<(Vec<f64>, f64)> = disc
            .collocation
            .par_iter()
            .enumerate()
            .map(|(k, _)| {
                let mut row = vec![0.0; 2 * n];
                for i in 0..n {
                    row[i] = coef / disc.gap(k, i);
                }
                (row, -1.0)
            })
            .collect();
        for i in 0..n - 1 {
            let mut row = vec![0.0; 2 * n];
            row[n + i] = 1.0;
            rows.push((row, 0.0));
        }
        push_closure(&mut rows, n);
        return rows;
    }

    let p = problem.p();
    let cauchy = (3.0 - 2.0 * nu) / (2.0 * (1.0 - nu) * nf);
    let g_n = -PI * LN_2 / nf;
    let t_n_prime: Vec<f64> = (0..n).map(|i| disc.t_n_prime_at_node(i)).collect();

    let pairs: Vec<(Vec<f64>, Vec<f64>)> = disc
        .collocation
        .par_iter()
        .enumerate()
        .map(|(k, _)| {
            let mut row_a = vec![0.0; 2 * n];
            let mut row_b = vec![0.0; 2 * n];
            let t_n = Discretization::t_n_at_collocation(k);
            for i in 0..n {
                let d = disc.gap(k, i);
                let z = p * d.abs();
                let log = z.ln() / nf;
                let k1 = unit::k2_reg_minus_half(z) / d;
                let k2 = (unit::k2_reg(z) + unit::k0_log_reg(z)) / nf;
                let k3 = unit::k3_reg(p * d);
                let lagrange = g_n * t_n / (PI * d * t_n_prime[i]);
                let mixed = log - k2 + lagrange;
                row_a[i] = cauchy / d + 2.0 * k1 / nf;
                row_a[n + i] = mixed;
                row_b[i] = mixed;
                row_b[n + i] = -2.0 / (p * p * nf * d) + k3 / (2.0 * p * nf);
            }
            (row_a, row_b)
        })
        .collect();

    let mut rows = Vec::with_capacity(2 * n);
    let (a_rows, b_rows): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    rows.extend(a_rows.into_iter().map(|r| (r, -1.0)));
    rows.extend(b_rows.into_iter().map(|r| (r, 0.0)));
    push_closure(&mut rows, n);
    rows
}

fn push_closure(rows: &mut Vec<(Vec<f64>, f64)>, n: usize) {
    let mut f_row = vec![0.0; 2 * n];
    let mut g_row = vec![0.0; 2 * n];
    f_row[..n].fill(1.0);
    g_row[n..].fill(1.0);
    rows.push((f_row, 0.0));
    rows.push((g_row, 0.0));
}

/// Builds the `2n x 2n` system in normalized units (`mu = a = sigma0 = 1`).
///
/// Row order: the tension equation at `t_1..t_{n-1}`, the couple-stress
/// equation at `t_1..t_{n-1}`, closure of `f`, closure of `g`. Unknown order:
/// `f(s_1)..f(s_n), g(s_1)..g(s_n)`. For `l = 0` the couple-stress rows are
/// replaced by `g(s_i) = 0` and the tension rows carry the classical
/// coefficient `1/(2(1 - nu))`.
pub fn assemble(problem: &CrackProblem, disc: &Discretization) -> Result<LinearSystem> {
    problem.validate()?;
    let n = disc.n;
    if n < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 nodes, got {n}")));
    }
    let rows = assemble_rows(problem, disc);
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    let mut rhs = DVector::zeros(2 * n);
    for (r, (row, b)) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            matrix[(r, c)] = v;
        }
        rhs[r] = b;
    }
    Ok(LinearSystem { matrix, rhs })
}

fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager-Higham lower bound for the 1-norm of the inverse, from an existing LU.
fn inverse_norm_1_estimate(lu: &LU<f64, Dyn, Dyn>) -> Option<f64> {
    let m = lu.l().nrows();
    let l = lu.l();
    let u = lu.u();
    let solve_t = |c: &DVector<f64>| -> Option<DVector<f64>> {
        let z = u.tr_solve_upper_triangular(c)?;
        let mut w = l.tr_solve_lower_triangular(&z)?;
        lu.p().inv_permute_rows(&mut w);
        Some(w)
    };
    let mut x = DVector::from_element(m, 1.0 / m as f64);
    let mut estimate = 0.0_f64;
    let mut last = usize::MAX;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        let norm = y.lp_norm(1);
        if !norm.is_finite() {
            return None;
        }
        if norm <= estimate {
            break;
        }
        estimate = norm;
        let sign = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve_t(&sign)?;
        let j = z.iamax();
        if j == last || z[j].abs() <= z.dot(&x) {
            break;
        }
        last = j;
        x = DVector::zeros(m);
        x[j] = 1.0;
    }
    let alt = DVector::from_fn(m, |i, _| {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        s * (1.0 + i as f64 / (m.max(2) - 1) as f64)
    });
    let y = lu.solve(&alt)?;
    Some(estimate.max(2.0 * y.lp_norm(1) / (3.0 * m as f64)))
}

/// Assembles and solves by LU with partial pivoting after scaling every row
/// to unit max-norm.
pub fn solve(problem: &CrackProblem, disc: &Discretization) -> Result<DensitySolution> {
    let sys = assemble(problem, disc)?;
    let n = disc.n;
    let p = problem.p();
    let nu = problem.material.poisson_ratio;
    if p < SMALL_P_WARNING {
        log::warn!("a/l = {p} is small; the crack is shorter than the material length");
    }

    let mut a = sys.matrix.clone();
    let mut b = sys.rhs.clone();
    for r in 0..2 * n {
        let scale = a.row(r).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale > 0.0 {
            a.row_mut(r).scale_mut(1.0 / scale);
            b[r] /= scale;
        }
    }

    let ill = |condition: f64| Error::IllConditioned {
        n,
        p,
        nu,
        condition,
    };
    let norm_a = norm_1(&a);
    let lu = a.lu();
    let inverse_norm = inverse_norm_1_estimate(&lu).ok_or_else(|| ill(f64::INFINITY))?;
    let condition = norm_a * inverse_norm;
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(ill(condition));
    }
    let x = lu.solve(&b).ok_or_else(|| ill(f64::INFINITY))?;

    let r = &sys.matrix * &x - &sys.rhs;
    let denom = sys.matrix.abs().row_sum().max() * x.amax() + sys.rhs.amax();
    let residual = r.amax() / denom;
    log::debug!("solved n = {n}, p = {p}, nu = {nu}: condition {condition:e}, residual {residual:e}");

    let load = problem.remote_tension / problem.material.shear_modulus;
    let f_vals = x.rows(0, n).iter().map(|v| v * load).collect();
    let g_vals = x.rows(n, n).iter().map(|v| v * load).collect();
    Ok(DensitySolution {
        f_vals,
        g_vals,
        problem: *problem,
        disc: disc.clone(),
        condition,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::EULER_GAMMA;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_norm_estimate_matches_exact() {
        for seed in 1..6u64 {
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let m = 12;
            let a = DMatrix::from_fn(m, m, |i, j| next() + if i == j { 0.3 } else { 0.0 });
            let exact = norm_1(&a.clone().try_inverse().unwrap());
            let est = inverse_norm_1_estimate(&a.lu()).unwrap();
            assert!(est <= exact * (1.0 + 1e-12) && est >= exact / 3.0, "{est} {exact}");
        }
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(inverse_norm_1_estimate(&singular.lu()).is_none());
    }

    #[test]
    fn nodes_interlace() {
        let d = Discretization::new(16).unwrap();
        for (k, &t) in d.collocation.iter().enumerate() {
            assert!(d.nodes[k] > t && t > d.nodes[k + 1]);
        }
        assert!(Discretization::new(7).is_err());
    }

    #[test]
    fn chebyshev_values_at_points() {
        let d = Discretization::new(20).unwrap();
        let nf = 20.0;
        for (k, &t) in d.collocation.iter().enumerate() {
            let tn = (nf * t.acos()).cos();
            assert!((tn - Discretization::t_n_at_collocation(k)).abs() < 1e-12);
        }
        for (i, &s) in d.nodes.iter().enumerate() {
            let th: f64 = s.acos();
            let deriv = nf * (nf * th).sin() / th.sin();
            assert_relative_eq!(deriv, d.t_n_prime_at_node(i), max_relative = 1e-10);
        }
    }

    #[test]
    fn kernel_limits() {
        assert_eq!(kernel_k1(0.3, 0.3, 1.0, 0.1), 0.0);
        let near = kernel_k1(0.3 + 1e-9, 0.3, 1.0, 0.1);
        assert!(near.abs() < 1e-6);
        let k2 = kernel_k2(0.4, 0.4, 0.2);
        assert_relative_eq!(k2, 0.5 + LN_2 - EULER_GAMMA, max_relative = 1e-15);
        assert_eq!(kernel_k3(0.2, 0.2, 0.5), 0.0);
    }

    #[test]
    fn kernels_far_apart() {
        let (a, ell) = (1.0, 0.01);
        let (x, xi) = (0.6, -0.4);
        let d: f64 = x - xi;
        let k1 = kernel_k1(x, xi, a, ell);
        assert!((k1 - a / d * (2.0 * ell * ell / (d * d) - 0.5)).abs() < 1e-10);
        let k2 = kernel_k2(x, xi, ell);
        assert!((k2 - (2.0 * ell * ell / (d * d) + (d / ell).ln())).abs() < 1e-10);
        assert_relative_eq!(kernel_k1(x, xi, a, ell), -kernel_k1(xi, x, a, ell), max_relative = 1e-15);
    }

    #[test]
    fn log_weight_matches_closed_form_at_collocation() {
        let d = Discretization::new(32).unwrap();
        for &t in &d.collocation {
            let g = log_quadrature_weight(t, &d, 7.0).unwrap();
            assert!((g + PI * LN_2 / 32.0).abs() < 1e-12);
        }
        assert!(log_quadrature_weight(d.nodes[3], &d, 7.0).is_err());
    }

    #[test]
    fn log_rule_exact_for_constants() {
        let d = Discretization::new(24).unwrap();
        let ones = vec![1.0; 24];
        for &t in &[0.13, -0.77, d.collocation[0]] {
            let v = log_quadrature(&ones, t, &d, 5.0).unwrap();
            assert!((v - PI * (2.5f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_rule_error_for_linear_density() {
        // exact value of int s ln|t-s| / sqrt(1-s^2) ds is -pi t; the rule
        // converges like n^-3 near the end points
        let mut last = f64::INFINITY;
        for &n in &[32usize, 64, 128] {
            let d = Discretization::new(n).unwrap();
            let t = d.collocation[0];
            let v = log_quadrature(&d.nodes, t, &d, 10.0).unwrap();
            let err = (v + PI * t).abs();
            assert!(err < 4e-5 * (32.0 / n as f64).powi(3), "n = {n}: {err}");
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn classical_system_solves_with_zero_rotation_density() {
        let pb = CrackProblem::normalized(0.3, f64::INFINITY).unwrap();
        let sol = solve(&pb, &Discretization::new(32).unwrap()).unwrap();
        assert!(sol.g_vals.iter().all(|g| *g == 0.0));
        // f(s) = 2 (1 - nu) s
        for (f, s) in sol.f_vals.iter().zip(&sol.disc.nodes) {
            assert!((f - 1.4 * s).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_problems() {
        let m = MaterialParams::new(1.0, 0.3, 1.0).unwrap();
        assert!(CrackProblem::new(0.0, 1.0, m).is_err());
        assert!(CrackProblem::new(1.0, f64::NAN, m).is_err());
        assert!(CrackProblem::normalized(0.3, -1.0).is_err());
    }
}
