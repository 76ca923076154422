//! Modified Bessel functions of the second kind (orders 0, 1, 2) and the
//! singularity-subtracted combinations that make up the crack-line kernels.
//!
//! Small arguments (`z <= 2`) use the ascending series with explicit
//! Euler-gamma and harmonic-number terms, so the subtracted forms never
//! cancel catastrophically. Larger arguments use Steed's continued fraction
//! for the exponentially scaled pair `exp(z) K0(z)`, `exp(z) K1(z)`, with
//! `K2` from the three-term recurrence.
//!
//! The disclination couple-stress kernel `sgn(x) G^{2,1}_{1,3}(x^2/4l^2 | 1; -1/2, 1/2, 0)`
//! reduces to Bessel functions and the running integral of `K0`:
//!
//! ```text
//! sgn(x) G(...) = -4 sgn(x) [ K1(z) + Ki0(z) ],   z = |x|/l,   Ki0(z) = int_0^z K0(t) dt
//! ```
//!
//! This follows from writing the finite-part sine integral
//! `FP int_0^inf sqrt(1+u^2)/u sin(u z) du` as `1/z + int_0^z (1/t^2 - K1(t)/t) dt`
//! and using `K1/t = -K0 - K1'`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{domain, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument the ascending series are used.
pub const SERIES_SWITCH: f64 = 2.0;

const SERIES_TOL: f64 = 1e-17;
const CF_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 200;

/// Dimensionless kernels of the scaled argument `z = |x| / l`.
///
/// These are the hot-path evaluators used during matrix assembly; they do
/// not validate their input.
pub mod unit {
    use super::*;

    /// `(K0, K1, K2)` at `z > 0`.
    pub fn bessel_k012(z: f64) -> [f64; 3] {
        if z <= SERIES_SWITCH {
            let k0 = k0_series(z);
            let k1 = 1.0 / z + k1_minus_inv_series(z);
            [k0, k1, k0 + 2.0 * k1 / z]
        } else {
            let [s0, s1] = k01_scaled_cf(z);
            let e = (-z).exp();
            let (k0, k1) = (s0 * e, s1 * e);
            [k0, k1, k0 + 2.0 * k1 / z]
        }
    }

    /// `exp(z) * (K0, K1, K2)` at `z > 0`.
    pub fn bessel_k012_scaled(z: f64) -> [f64; 3] {
        if z <= SERIES_SWITCH {
            let e = z.exp();
            let [k0, k1, k2] = bessel_k012(z);
            [k0 * e, k1 * e, k2 * e]
        } else {
            let [s0, s1] = k01_scaled_cf(z);
            [s0, s1, s0 + 2.0 * s1 / z]
        }
    }

    /// `2/z^2 - K2(z)`, equal to 1/2 at `z = 0`.
    pub fn k2_reg(z: f64) -> f64 {
        if z <= SERIES_SWITCH {
            0.5 + k2_reg_minus_half_series(z)
        } else {
            2.0 / (z * z) - bessel_k012(z)[2]
        }
    }

    /// `2/z^2 - K2(z) - 1/2`, vanishing like `z^2 ln(z) / 8` at the origin.
    pub fn k2_reg_minus_half(z: f64) -> f64 {
        if z <= SERIES_SWITCH {
            k2_reg_minus_half_series(z)
        } else {
            2.0 / (z * z) - bessel_k012(z)[2] - 0.5
        }
    }

    /// `K0(z) + ln z`, equal to `ln 2 - gamma` at `z = 0`.
    pub fn k0_log_reg(z: f64) -> f64 {
        if z == 0.0 {
            LN_2 - EULER_GAMMA
        } else if z <= SERIES_SWITCH {
            let q = 0.25 * z * z;
            let mut term = 1.0;
            let mut h = 0.0;
            let mut i0_minus_one = 0.0;
            let mut hsum = 0.0;
            for k in 1..MAX_TERMS {
                let kf = k as f64;
                term *= q / (kf * kf);
                h += 1.0 / kf;
                i0_minus_one += term;
                hsum += h * term;
                if term < SERIES_TOL * (1.0 + i0_minus_one) {
                    break;
                }
            }
            LN_2 - EULER_GAMMA - ((0.5 * z).ln() + EULER_GAMMA) * i0_minus_one + hsum
        } else {
            bessel_k012(z)[0] + z.ln()
        }
    }

    /// `K1(z) - 1/z`, vanishing like `(z/2) ln(z/2)` at the origin.
    pub fn k1_minus_inv(z: f64) -> f64 {
        if z == 0.0 {
            0.0
        } else if z <= SERIES_SWITCH {
            k1_minus_inv_series(z)
        } else {
            bessel_k012(z)[1] - 1.0 / z
        }
    }

    /// `int_0^z K0(t) dt`, tending to `pi/2` as `z -> inf`.
    pub fn integral_k0(z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        if z <= SERIES_SWITCH {
            let q = 0.25 * z * z;
            let lg = (0.5 * z).ln() + EULER_GAMMA;
            let mut coef = z; // z^{2k+1} / (4^k (k!)^2)
            let mut h = 0.0;
            let mut sum = 0.0;
            for k in 0..MAX_TERMS {
                if k > 0 {
                    let kf = k as f64;
                    coef *= q / (kf * kf);
                    h += 1.0 / kf;
                }
                let odd = (2 * k + 1) as f64;
                let t = coef / odd * (h - lg + 1.0 / odd);
                sum += t;
                if t.abs() < SERIES_TOL * sum.abs() && k > 2 {
                    break;
                }
            }
            sum
        } else {
            FRAC_PI_2 - k0_tail_integral(z)
        }
    }

    /// `sgn(x) G^{2,1}_{1,3}(z^2/4 | 1; -1/2, 1/2, 0)` for signed `z != 0`.
    pub fn meijer_kernel(z: f64) -> f64 {
        let a = z.abs();
        -4.0 * z.signum() * (bessel_k012(a)[1] + integral_k0(a))
    }

    /// Meijer kernel with its `-4/z` pole removed; zero at the origin.
    pub fn k3_reg(z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        let a = z.abs();
        -4.0 * z.signum() * (k1_minus_inv(a) + integral_k0(a))
    }
}

fn harmonic_psi_pair(k: usize, shift: usize) -> f64 {
    // psi(k+1) + psi(k+1+shift) with psi(m+1) = -gamma + H_m
    let hk: f64 = (1..=k).map(|j| 1.0 / j as f64).sum();
    let hks: f64 = hk + (k + 1..=k + shift).map(|j| 1.0 / j as f64).sum::<f64>();
    -2.0 * EULER_GAMMA + hk + hks
}

fn k0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut h = 0.0;
    let mut hsum = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        h += 1.0 / kf;
        i0 += term;
        hsum += h * term;
        if term < SERIES_TOL * i0 {
            break;
        }
    }
    -((0.5 * z).ln() + EULER_GAMMA) * i0 + hsum
}

// ln(z/2) I1(z) - (z/4) sum_k [psi(k+1) + psi(k+2)] q^k / (k! (k+1)!)
fn k1_minus_inv_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut i1_sum = 1.0;
    let mut psi_sum = harmonic_psi_pair(0, 1);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        i1_sum += term;
        psi_sum += harmonic_psi_pair(k, 1) * term;
        if term < SERIES_TOL * i1_sum {
            break;
        }
    }
    (0.5 * z).ln() * 0.5 * z * i1_sum - 0.25 * z * psi_sum
}

// ln(z/2) I2(z) - (z^2/8) sum_k [psi(k+1) + psi(k+3)] q^k / (k! (k+2)!)
fn k2_reg_minus_half_series(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let q = 0.25 * z * z;
    let mut term = 0.5;
    let mut i2_sum = 0.5;
    let mut psi_sum = harmonic_psi_pair(0, 2) * 0.5;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 2.0));
        i2_sum += term;
        psi_sum += harmonic_psi_pair(k, 2) * term;
        if term < SERIES_TOL * i2_sum {
            break;
        }
    }
    (0.5 * z).ln() * q * i2_sum - 0.125 * z * z * psi_sum
}

// Steed's continued fraction (Temme's CF2 form) for exp(z) K0, exp(z) K1.
fn k01_scaled_cf(z: f64) -> [f64; 2] {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..=10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < CF_TOL {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    [k0, k1]
}

// int_z^inf K0(t) dt = int_0^inf exp(-z cosh u) / cosh u du, by the
// trapezoidal rule, which converges geometrically for this analytic integrand.
fn k0_tail_integral(z: f64) -> f64 {
    let h = 0.3 / z.sqrt();
    let f = |u: f64| {
        let c = u.cosh();
        (-z * (c - 1.0)).exp() / c
    };
    let mut sum = 0.5 * f(0.0);
    let mut j = 1;
    loop {
        let v = f(j as f64 * h);
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
        j += 1;
    }
    (-z).exp() * h * sum
}

fn check_ell(op: &'static str, ell: f64) -> Result<()> {
    if ell > 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("characteristic length must be positive, got {ell}")))
    }
}

fn check_abs(op: &'static str, x_abs: f64) -> Result<()> {
    if x_abs >= 0.0 && x_abs.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("distance must be non-negative, got {x_abs}")))
    }
}

/// Modified Bessel function of the second kind `K_order(z)`, `order` in {0, 1, 2}.
pub fn bessel_k(order: u32, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("bessel_k", format!("argument must be positive, got {z}")));
    }
    match order {
        0..=2 => Ok(unit::bessel_k012(z)[order as usize]),
        _ => Err(domain("bessel_k", format!("order {order} not supported"))),
    }
}

/// Exponentially scaled `exp(z) K_order(z)`, usable far beyond the underflow of `K_order`.
pub fn bessel_k_scaled(order: u32, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(
            "bessel_k_scaled",
            format!("argument must be positive, got {z}"),
        ));
    }
    match order {
        0..=2 => Ok(unit::bessel_k012_scaled(z)[order as usize]),
        _ => Err(domain("bessel_k_scaled", format!("order {order} not supported"))),
    }
}

/// `2 l^2 / x^2 - K2(|x| / l)`.
pub fn k2_reg(x_abs: f64, ell: f64) -> Result<f64> {
    check_ell("k2_reg", ell)?;
    check_abs("k2_reg", x_abs)?;
    Ok(unit::k2_reg(x_abs / ell))
}

/// `K0(|x| / l) + ln(|x| / l)`.
pub fn k0_log_reg(x_abs: f64, ell: f64) -> Result<f64> {
    check_ell("k0_log_reg", ell)?;
    check_abs("k0_log_reg", x_abs)?;
    Ok(unit::k0_log_reg(x_abs / ell))
}

/// `sgn(x) G^{2,1}_{1,3}(x^2 / 4l^2 | 1; -1/2, 1/2, 0)`, the disclination
/// couple-stress kernel. Behaves like `-4l/x` near the origin and tends to
/// `-2 pi sgn(x)` far away.
pub fn meijer_kernel(x: f64, ell: f64) -> Result<f64> {
    check_ell("meijer_kernel", ell)?;
    if x == 0.0 || !x.is_finite() {
        return Err(domain("meijer_kernel", format!("argument must be nonzero, got {x}")));
    }
    Ok(unit::meijer_kernel(x / ell))
}

/// `meijer_kernel(x, l) + 4l/x`, extended by zero at the origin.
///
/// Precondition: `ell > 0`.
pub fn k3_reg(x: f64, ell: f64) -> f64 {
    debug_assert!(ell > 0.0);
    unit::k3_reg(x / ell)
}

/// Coefficients `(a1, a2)` of the expansion
/// `meijer_kernel(x) = -4l/x + (a1 + a2 ln|x|) x + O(x^3 ln|x|)`.
///
/// From `K1(z) - 1/z ~ (z/2) ln(z/2) + (2 gamma - 1) z / 4` and
/// `Ki0(z) ~ -z ln(z/2) + (1 - gamma) z`.
pub fn meijer_series_coefficients(ell: f64) -> Result<(f64, f64)> {
    check_ell("meijer_series_coefficients", ell)?;
    let a2 = 2.0 / ell;
    let a1 = -(3.0 - 2.0 * EULER_GAMMA + 2.0 * (2.0 * ell).ln()) / ell;
    Ok((a1, a2))
}
