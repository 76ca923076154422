#![allow(dead_code)]

use couplecrack::greens::{full_field, DefectCharge, FieldState, MaterialParams};
use couplecrack::quad;

/// Finite-difference weights for derivative `m` at 0 on the given offsets.
pub fn fornberg(m: usize, offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

pub const HALF_WIDTH: i32 = 4;

/// Field samples on a `(2w+1)^2` stencil around `(x, y)` with spacing `h`.
pub struct Stencil {
    pub h: f64,
    pub vals: Vec<Vec<FieldState>>,
    pub weights: Vec<Vec<f64>>,
}

impl Stencil {
    pub fn new(x: f64, y: f64, h: f64, charge: DefectCharge, mat: MaterialParams) -> Self {
        let offs: Vec<f64> = (-HALF_WIDTH..=HALF_WIDTH).map(|k| k as f64).collect();
        let vals = offs
            .iter()
            .map(|&i| {
                offs.iter()
                    .map(|&j| full_field(x + i * h, y + j * h, charge, mat).unwrap())
                    .collect()
            })
            .collect();
        let weights = (0..=4).map(|m| fornberg(m, &offs)).collect();
        Self { h, vals, weights }
    }

    /// `d^(i+j) F / dx^i dy^j` of the component selected by `pick`.
    pub fn d(&self, i: usize, j: usize, pick: impl Fn(&FieldState) -> f64) -> f64 {
        let wi = &self.weights[i];
        let wj = &self.weights[j];
        let mut s = 0.0;
        for (a, row) in self.vals.iter().enumerate() {
            if wi[a] == 0.0 {
                continue;
            }
            for (b, v) in row.iter().enumerate() {
                s += wi[a] * wj[b] * pick(v);
            }
        }
        s / self.h.powi((i + j) as i32)
    }

    pub fn center(&self) -> FieldState {
        self.vals[HALF_WIDTH as usize][HALF_WIDTH as usize]
    }
}

/// Validation grid: `y >= 0.5 l`, `l <= r <= 10 l`.
pub fn validation_grid(ell: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for &y in &[0.5, 1.0, 2.5, 6.0] {
        for &x in &[-7.0, -2.0, -0.6, 0.0, 0.9, 3.0, 8.0] {
            let r: f64 = (x * x + y * y as f64).sqrt();
            if (1.0..=10.0).contains(&r) {
                pts.push((x * ell, y * ell));
            }
        }
    }
    pts
}

/// Residual of a sum of terms relative to its largest term.
pub fn relative_residual(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let big = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if big == 0.0 {
        0.0
    } else {
        sum.abs() / big
    }
}

/// Fourier-side evaluation of the sine integrals with `l = 1`: the closed-form
/// leading behaviour `exp(-y xi) * {1/xi, 1}` is subtracted, the remainder is
/// integrated between consecutive zeros of `sin(xi x)` and the alternating
/// partial sums are accelerated by repeated averaging.
pub fn sine_integral_oracle(i11: bool, x: f64, y: f64) -> f64 {
    let weight = move |xi: f64| {
        let s = (1.0 + xi * xi).sqrt();
        let full = (-y * s).exp() * if i11 { s / xi } else { 1.0 / xi };
        let lead = (-y * xi).exp() * if i11 { 1.0 } else { 1.0 / xi };
        if xi < 1e-8 {
            // both weights reduce to finite limits times sin(xi x) ~ xi x
            if i11 {
                (-y).exp() / xi
            } else {
                ((-y).exp() - 1.0) / xi
            }
        } else {
            full - lead
        }
    };
    let f = move |xi: f64| weight(xi) * (xi * x).sin();
    let closed = if i11 { x / (x * x + y * y) } else { x.atan2(y) };
    let step = std::f64::consts::PI / x.abs();
    let mut partial = Vec::new();
    let mut acc = 0.0;
    let mut k = 0usize;
    loop {
        let a = k as f64 * step;
        let piece = quad::integrate(&f, a, a + step, 1e-17, 1e-14).0;
        acc += piece;
        partial.push(acc);
        k += 1;
        if (piece.abs() < 1e-18 && k >= 24) || k > 20000 {
            break;
        }
    }
    let tail: Vec<f64> = partial[partial.len().saturating_sub(8)..].to_vec();
    let mut level = tail;
    while level.len() > 1 {
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    closed + level[0]
}

/// Largest magnitude among several groups of terms.
pub fn largest(groups: &[&[f64]]) -> f64 {
    groups
        .iter()
        .flat_map(|g| g.iter())
        .fold(0.0_f64, |m, t| m.max(t.abs()))
}

/// `|sum(terms)| / scale`.
pub fn residual(terms: &[f64], scale: f64) -> f64 {
    let sum: f64 = terms.iter().sum();
    if scale == 0.0 {
        sum.abs()
    } else {
        sum.abs() / scale
    }
}
