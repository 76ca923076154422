//! Observables from solved densities: crack-face profiles, tip values of the
//! density regular parts, fields ahead of the tip, stress intensity factor
//! and J-integral, plus the classical-elasticity baseline.
//!
//! Nodal values are expanded as `f(s) = sum c_j T_j(s)` with the discrete
//! cosine relation `c_j = (2/n) sum_i f(s_i) cos(j theta_i)` (halved for
//! `j = 0`), which is the degree `n - 1` interpolant through the nodes.
//!
//! Outside the crack (`|t| > 1`, `w = t - sgn(t) sqrt(t^2 - 1)`):
//!
//! ```text
//! int T_j(s) / (sqrt(1-s^2) (t-s)) ds = pi w^j / (sgn(t) sqrt(t^2-1))
//! int T_j(s) ln|t-s| / sqrt(1-s^2) ds = -(pi/j) w^j,   pi ln(|t| + sqrt(t^2-1)) - pi ln 2 for j = 0
//! ```
//!
//! The stress intensity factor follows from the tip expansion of the
//! dominant Cauchy term: `K_I = sqrt(pi a) mu (3 - 2 nu) f(1) / (2 (1 - nu))`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad;
use crate::sie::{self, CrackProblem, DensitySolution, Discretization};
use crate::specfun::unit;

/// Relative opening and rotation of the crack faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackProfiles {
    pub x_samples: Vec<f64>,
    pub delta_uy: Vec<f64>,
    pub delta_omega: Vec<f64>,
}

/// Density regular parts at the tips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointValues {
    pub f1: f64,
    pub g1: f64,
    pub f_minus1: f64,
    pub g_minus1: f64,
}

/// Tip quantities with their classical counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipQuantities {
    pub f1: f64,
    pub g1: f64,
    pub k_i: f64,
    pub j: f64,
    pub k_ratio: f64,
    pub j_ratio: f64,
}

/// Closed-form and discretized classical crack results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBaseline {
    pub k_closed: f64,
    pub k_discrete: f64,
    pub j_closed: f64,
    pub j_discrete: f64,
    pub x_samples: Vec<f64>,
    pub cod_closed: Vec<f64>,
    pub cod_discrete: Vec<f64>,
}

/// Chebyshev coefficients of `f/a` and `g/a`.
#[derive(Debug, Clone)]
pub struct DensityExpansion {
    pub f_coeffs: Vec<f64>,
    pub g_coeffs: Vec<f64>,
}

/// Discrete cosine coefficients of nodal values at the zeros of `T_n`.
pub fn chebyshev_coefficients(values: &[f64], disc: &Discretization) -> Vec<f64> {
    let n = disc.n;
    let theta: Vec<f64> = (0..n).map(|i| disc.node_angle(i)).collect();
    (0..n)
        .map(|j| {
            let s: f64 = values
                .iter()
                .zip(&theta)
                .map(|(v, th)| v * (j as f64 * th).cos())
                .sum();
            let c = 2.0 * s / n as f64;
            if j == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

impl DensityExpansion {
    pub fn new(sol: &DensitySolution) -> Self {
        Self {
            f_coeffs: chebyshev_coefficients(&sol.f_vals, &sol.disc),
            g_coeffs: chebyshev_coefficients(&sol.g_vals, &sol.disc),
        }
    }
}

fn cos_series(c: &[f64], theta: f64) -> f64 {
    // sum c_j cos(j theta) by the Chebyshev three-term recurrence
    let x = theta.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for &cj in c.iter().skip(1).rev() {
        let b0 = cj + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

fn sin_over_j_series(c: &[f64], theta: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(j, cj)| cj * (j as f64 * theta).sin() / j as f64)
        .sum()
}

/// `(f(1), g(1), f(-1), g(-1))` from the Chebyshev interpolant.
pub fn endpoint_values(sol: &DensitySolution) -> EndpointValues {
    let e = DensityExpansion::new(sol);
    let alt = |c: &[f64]| {
        c.iter()
            .enumerate()
            .map(|(j, v)| if j % 2 == 0 { *v } else { -v })
            .sum::<f64>()
    };
    EndpointValues {
        f1: e.f_coeffs.iter().sum(),
        g1: e.g_coeffs.iter().sum(),
        f_minus1: alt(&e.f_coeffs),
        g_minus1: alt(&e.g_coeffs),
    }
}

/// `(delta u_y, delta omega)` at `x` in `[-a, a]`.
pub fn profile_at(sol: &DensitySolution, e: &DensityExpansion, x: f64) -> (f64, f64) {
    let a = sol.problem.half_length;
    let theta = (x / a).clamp(-1.0, 1.0).acos();
    (
        a * sin_over_j_series(&e.f_coeffs, theta),
        -sin_over_j_series(&e.g_coeffs, theta),
    )
}

/// Profiles at `m_samples` evenly spaced points strictly inside the crack.
pub fn crack_profiles(sol: &DensitySolution, m_samples: usize) -> CrackProfiles {
    let a = sol.problem.half_length;
    let e = DensityExpansion::new(sol);
    let x_samples: Vec<f64> = (0..m_samples)
        .map(|k| -a + 2.0 * a * (k + 1) as f64 / (m_samples + 1) as f64)
        .collect();
    let (delta_uy, delta_omega) = x_samples.iter().map(|&x| profile_at(sol, &e, x)).unzip();
    CrackProfiles {
        x_samples,
        delta_uy,
        delta_omega,
    }
}

/// `int_{-1}^{1} F(s) / (sqrt(1-s^2)(t-s)) ds` for `|t| > 1`.
fn exterior_cauchy(c: &[f64], t: f64) -> f64 {
    let root = (t * t - 1.0).sqrt();
    let w = t - t.signum() * root;
    let mut wj = 1.0;
    let mut s = 0.0;
    for &cj in c {
        s += cj * wj;
        wj *= w;
    }
    PI * s / (t.signum() * root)
}

/// `int_{-1}^{1} F(s) ln|t-s| / sqrt(1-s^2) ds` for `|t| > 1`.
fn exterior_log(c: &[f64], t: f64) -> f64 {
    let root = (t * t - 1.0).sqrt();
    let w = t - t.signum() * root;
    let mut s = c[0] * PI * ((t.abs() + root).ln() - std::f64::consts::LN_2);
    let mut wj = 1.0;
    for (j, &cj) in c.iter().enumerate().skip(1) {
        wj *= w;
        s -= cj * PI / j as f64 * wj;
    }
    s
}

/// Weighted integral `int_{-1}^{1} h(s) / sqrt(1-s^2) ds` of a bounded
/// integrand, in the angle variable.
fn angular_integral(h: impl Fn(f64) -> f64) -> f64 {
    let breaks = [0.0, 0.01, 0.1, 0.5, PI / 2.0, PI - 0.5, PI - 0.1, PI - 0.01, PI];
    quad::integrate_pieces(|th: f64| h(th), &breaks, 1e-13, 1e-12)
}

/// Normal stress and couple stress on the crack line outside the crack.
pub fn stress_ahead(sol: &DensitySolution, x: f64) -> Result<(f64, f64)> {
    let e = DensityExpansion::new(sol);
    stress_ahead_with(sol, &e, x)
}

/// [`stress_ahead`] at many points, reusing the expansion.
pub fn stress_ahead_many(sol: &DensitySolution, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let e = DensityExpansion::new(sol);
    xs.par_iter().map(|&x| stress_ahead_with(sol, &e, x)).collect()
}

fn stress_ahead_with(sol: &DensitySolution, e: &DensityExpansion, x: f64) -> Result<(f64, f64)> {
    let pb = &sol.problem;
    let a = pb.half_length;
    let t = x / a;
    if !(t.abs() > 1.0) || !t.is_finite() {
        return Err(domain("stress_ahead", format!("requires |x| > a, got x = {x}, a = {a}")));
    }
    let mu = pb.material.shear_modulus;
    let nu = pb.material.poisson_ratio;
    let sigma0 = pb.remote_tension;
    let (fc, gc) = (&e.f_coeffs, &e.g_coeffs);
    let cauchy_f = exterior_cauchy(fc, t);

    if pb.is_classical() {
        let s = sigma0 + mu / (2.0 * PI * (1.0 - nu)) * cauchy_f;
        return Ok((s, 0.0));
    }

    let p = pb.p();
    let lnp = p.ln();
    let c = (3.0 - 2.0 * nu) / (2.0 * (1.0 - nu));
    let cauchy_g = exterior_cauchy(gc, t);
    let log_f = exterior_log(fc, t) + lnp * PI * fc[0];
    let log_g = exterior_log(gc, t) + lnp * PI * gc[0];

    let sigma_regular = angular_integral(|th| {
        let s = th.cos();
        let d = t - s;
        let z = p * d.abs();
        let k1 = unit::k2_reg_minus_half(z) / d;
        let k2 = unit::k2_reg(z) + unit::k0_log_reg(z);
        2.0 * cos_series(fc, th) * k1 - cos_series(gc, th) * k2
    });
    let couple_regular = angular_integral(|th| {
        let s = th.cos();
        let d = t - s;
        let z = p * d.abs();
        let k2 = unit::k2_reg(z) + unit::k0_log_reg(z);
        let k3 = unit::k3_reg(p * d);
        -cos_series(fc, th) * k2 + cos_series(gc, th) * k3 / (2.0 * p)
    });

    let sigma = sigma0 + mu / PI * (c * cauchy_f + log_g + sigma_regular);
    let m = mu * a / PI * (-2.0 / (p * p) * cauchy_g + log_f + couple_regular);
    Ok((sigma, m))
}

/// `K_I = sqrt(pi a) mu (3 - 2 nu) f(1) / (2 (1 - nu))`; the classical
/// coefficient `1/(2(1 - nu))` applies when `l = 0`.
pub fn stress_intensity_factor(sol: &DensitySolution) -> f64 {
    let f1 = endpoint_values(sol).f1;
    let pb = &sol.problem;
    sif_from_endpoint(pb, f1)
}

fn cauchy_coefficient(pb: &CrackProblem) -> f64 {
    let nu = pb.material.poisson_ratio;
    if pb.is_classical() {
        1.0 / (2.0 * (1.0 - nu))
    } else {
        (3.0 - 2.0 * nu) / (2.0 * (1.0 - nu))
    }
}

fn sif_from_endpoint(pb: &CrackProblem, f1: f64) -> f64 {
    (PI * pb.half_length).sqrt() * pb.material.shear_modulus * cauchy_coefficient(pb) * f1
}

/// `J = (mu pi a / 2) [ (3 - 2 nu) f(1)^2 / (4 (1 - nu)) + (l/a)^2 g(1)^2 ]`.
pub fn j_integral(sol: &DensitySolution) -> f64 {
    let ep = endpoint_values(sol);
    j_from_endpoints(&sol.problem, ep.f1, ep.g1)
}

fn j_from_endpoints(pb: &CrackProblem, f1: f64, g1: f64) -> f64 {
    let mu = pb.material.shear_modulus;
    let a = pb.half_length;
    let l_over_a = pb.material.char_length / a;
    mu * PI * a / 2.0 * (0.5 * cauchy_coefficient(pb) * f1 * f1 + l_over_a * l_over_a * g1 * g1)
}

/// `sigma0 sqrt(pi a)`.
pub fn classical_sif(pb: &CrackProblem) -> f64 {
    pb.remote_tension * (PI * pb.half_length).sqrt()
}

/// `pi (1 - nu^2) sigma0^2 a / E`.
pub fn classical_j(pb: &CrackProblem) -> f64 {
    let m = &pb.material;
    PI * (1.0 - m.poisson_ratio * m.poisson_ratio) * pb.remote_tension.powi(2) * pb.half_length
        / m.youngs_modulus()
}

/// Classical opening `2 (1 - nu) sigma0 sqrt(a^2 - x^2) / mu`.
pub fn classical_opening(pb: &CrackProblem, x: f64) -> f64 {
    let m = &pb.material;
    let a = pb.half_length;
    2.0 * (1.0 - m.poisson_ratio) * pb.remote_tension * (a * a - x * x).max(0.0).sqrt() / m.shear_modulus
}

/// All tip quantities for a solved problem.
pub fn tip_quantities(sol: &DensitySolution) -> TipQuantities {
    let ep = endpoint_values(sol);
    let pb = &sol.problem;
    let k_i = sif_from_endpoint(pb, ep.f1);
    let j = j_from_endpoints(pb, ep.f1, ep.g1);
    TipQuantities {
        f1: ep.f1,
        g1: ep.g1,
        k_i,
        j,
        k_ratio: k_i / classical_sif(pb),
        j_ratio: j / classical_j(pb),
    }
}

/// Classical results in closed form and from the discretized classical equation.
pub fn classical_baseline(problem: &CrackProblem, n: usize, m_samples: usize) -> Result<ClassicalBaseline> {
    problem.validate()?;
    let mut classical = *problem;
    classical.material.char_length = 0.0;
    let sol = sie::solve(&classical, &Discretization::new(n)?)?;
    let tip = tip_quantities(&sol);
    let prof = crack_profiles(&sol, m_samples);
    let cod_closed = prof.x_samples.iter().map(|&x| classical_opening(problem, x)).collect();
    Ok(ClassicalBaseline {
        k_closed: classical_sif(problem),
        k_discrete: tip.k_i,
        j_closed: classical_j(problem),
        j_discrete: tip.j,
        x_samples: prof.x_samples,
        cod_closed,
        cod_discrete: prof.delta_uy,
    })
}

/// Which field to fit near the tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TipField {
    /// `sigma_yy - sigma0`
    NormalStress,
    /// `m_yz`
    CoupleStress,
}

/// Least-squares slope of `ln|field|` against `ln(x - a)` on
/// log-spaced samples of `x - a` in `[lo, hi] * a`.
pub fn fit_tip_exponent(sol: &DensitySolution, which: TipField, lo: f64, hi: f64, samples: usize) -> Result<f64> {
    let a = sol.problem.half_length;
    let xs = log_spaced(lo * a, hi * a, samples);
    let pts: Vec<f64> = xs.iter().map(|d| a + d).collect();
    let vals = stress_ahead_many(sol, &pts)?;
    let sigma0 = sol.problem.remote_tension;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(&vals)
        .map(|(d, (s, m))| {
            let v = match which {
                TipField::NormalStress => s - sigma0,
                TipField::CoupleStress => *m,
            };
            (d.ln(), v.abs().ln())
        })
        .unzip();
    Ok(linear_fit(&lx, &ly).1)
}

/// `K_I` from the intercept of `sqrt(2 pi (x-a)) sigma_yy` against `sqrt(x-a)`.
pub fn fit_sif(sol: &DensitySolution, lo: f64, hi: f64, samples: usize) -> Result<f64> {
    let a = sol.problem.half_length;
    let xs = log_spaced(lo * a, hi * a, samples);
    let pts: Vec<f64> = xs.iter().map(|d| a + d).collect();
    let vals = stress_ahead_many(sol, &pts)?;
    let (u, v): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(&vals)
        .map(|(d, (s, _))| (d.sqrt(), (2.0 * PI * d).sqrt() * s))
        .unzip();
    Ok(linear_fit(&u, &v).0)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Ordinary least squares `y = c0 + c1 x`; returns `(c0, c1)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub tip: TipQuantities,
    pub condition: f64,
}

/// Solves at each node count; solves run in parallel.
pub fn convergence_study(problem: &CrackProblem, ns: &[usize]) -> Result<Vec<ConvergenceRow>> {
    ns.par_iter()
        .map(|&n| {
            let sol = sie::solve(problem, &Discretization::new(n)?)?;
            Ok(ConvergenceRow {
                n,
                tip: tip_quantities(&sol),
                condition: sol.condition,
            })
        })
        .collect()
}

/// Largest relative change of `f(1)`, `g(1)` between the last two rows.
pub fn last_relative_change(rows: &[ConvergenceRow]) -> Option<f64> {
    let [.., prev, last] = rows else { return None };
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };
    Some(rel(prev.tip.f1, last.tip.f1).max(rel(prev.tip.g1, last.tip.g1)))
}
