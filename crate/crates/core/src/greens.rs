//! Fields of a discrete climb dislocation and a discrete constrained wedge
//! disclination located at the origin of an unbounded couple-stress plane.
//!
//! Lengths enter the Bessel terms through `R = r / l`; the abbreviation
//! `kr` below stands for `2/R^2 - K2(R)`.
//!
//! The two semi-infinite sine integrals of the disclination field are
//! evaluated as finite, non-oscillatory integrals. With `X = x/l`,
//! `Y = y/l`, `rho = sqrt(t^2 + Y^2)`:
//!
//! ```text
//! I10 = int_0^X Y K1(rho)/rho dt = int_0^{atan(X/Y)} rho K1(rho) dphi,   rho = Y / cos(phi)
//! I11 = X/(X^2+Y^2) - int_0^X [ Y^2 kr(rho)/rho^2 + (K1(rho) - 1/rho)/rho ] dt
//! ```
//!
//! Both follow from `d/dx I10 = y K1(r/l)/(r l)`, `d/dx I11 = y^2 K2/(r^2 l) - K1/r`
//! and the vanishing of the sine integrals at `x = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad;
use crate::specfun::unit;

/// Isotropic couple-stress material constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub shear_modulus: f64,
    pub poisson_ratio: f64,
    pub char_length: f64,
}

impl MaterialParams {
    /// Validated constructor: `mu > 0`, `-1 < nu <= 0.5`, `l >= 0`.
    pub fn new(shear_modulus: f64, poisson_ratio: f64, char_length: f64) -> Result<Self> {
        let m = Self {
            shear_modulus,
            poisson_ratio,
            char_length,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shear_modulus > 0.0) || !self.shear_modulus.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "shear modulus must be positive, got {}",
                self.shear_modulus
            )));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio must lie in (-1, 0.5], got {}",
                self.poisson_ratio
            )));
        }
        if !(self.char_length >= 0.0) || !self.char_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "characteristic length must be non-negative, got {}",
                self.char_length
            )));
        }
        Ok(())
    }

    /// Young's modulus `2 mu (1 + nu)`.
    pub fn youngs_modulus(&self) -> f64 {
        2.0 * self.shear_modulus * (1.0 + self.poisson_ratio)
    }

    fn require_length(&self, op: &'static str) -> Result<f64> {
        self.validate()?;
        if self.char_length > 0.0 {
            Ok(self.char_length)
        } else {
            Err(domain(op, "characteristic length must be positive"))
        }
    }
}

/// Climb Burgers vector `b` (along y) and Frank vector `Omega` (along z).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DefectCharge {
    pub burgers_b: f64,
    pub frank_omega: f64,
}

impl DefectCharge {
    pub fn dislocation(b: f64) -> Self {
        Self {
            burgers_b: b,
            frank_omega: 0.0,
        }
    }

    pub fn disclination(omega: f64) -> Self {
        Self {
            burgers_b: 0.0,
            frank_omega: omega,
        }
    }
}

/// The nine plane-strain field components at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
    pub syx: f64,
    pub mxz: f64,
    pub myz: f64,
    pub ux: f64,
    pub uy: f64,
    pub omega: f64,
}

impl std::ops::Add for FieldState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            sxx: self.sxx + o.sxx,
            syy: self.syy + o.syy,
            sxy: self.sxy + o.sxy,
            syx: self.syx + o.syx,
            mxz: self.mxz + o.mxz,
            myz: self.myz + o.myz,
            ux: self.ux + o.ux,
            uy: self.uy + o.uy,
            omega: self.omega + o.omega,
        }
    }
}

impl FieldState {
    /// Components in the fixed order `sxx, syy, sxy, syx, mxz, myz, ux, uy, omega`.
    pub fn to_array(&self) -> [f64; 9] {
        [
            self.sxx, self.syy, self.sxy, self.syx, self.mxz, self.myz, self.ux, self.uy, self.omega,
        ]
    }

    pub const NAMES: [&'static str; 9] = ["sxx", "syy", "sxy", "syx", "mxz", "myz", "ux", "uy", "omega"];
}

/// Which of the two numerically evaluated sine integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SineIntegral {
    /// `int_0^inf (1/xi) exp(-y sqrt(1+l^2 xi^2)/l) sin(xi x) dxi`
    I10,
    /// `int_0^inf (sqrt(1+l^2 xi^2)/xi) exp(-y sqrt(1+l^2 xi^2)/l) sin(xi x) dxi`
    I11,
}

fn check_x(op: &'static str, x: f64) -> Result<()> {
    if x == 0.0 || !x.is_finite() {
        Err(domain(op, format!("x must be finite and nonzero, got {x}")))
    } else {
        Ok(())
    }
}

/// Normal stress `sigma_yy(x, 0)` on the defect line.
pub fn line_sigma_yy(x: f64, charge: DefectCharge, mat: MaterialParams) -> Result<f64> {
    let ell = mat.require_length("line_sigma_yy")?;
    check_x("line_sigma_yy", x)?;
    let (mu, nu) = (mat.shear_modulus, mat.poisson_ratio);
    let (b, om) = (charge.burgers_b, charge.frank_omega);
    let z = x.abs() / ell;
    let kr = unit::k2_reg(z);
    let k0 = if z > 700.0 { 0.0 } else { unit::bessel_k012(z)[0] };
    Ok(mu * b / (2.0 * PI * (1.0 - nu) * x) + 2.0 * mu * b / (PI * x) * kr
        - mu * om / PI * kr
        - mu * om / PI * k0)
}

/// Couple-stress `m_yz(x, 0)` on the defect line.
pub fn line_m_yz(x: f64, charge: DefectCharge, mat: MaterialParams) -> Result<f64> {
    let ell = mat.require_length("line_m_yz")?;
    check_x("line_m_yz", x)?;
    let mu = mat.shear_modulus;
    let (b, om) = (charge.burgers_b, charge.frank_omega);
    let z = x.abs() / ell;
    let kr = unit::k2_reg(z);
    let k0 = if z > 700.0 { 0.0 } else { unit::bessel_k012(z)[0] };
    Ok(-mu * b / PI * kr - mu * b / PI * k0 + mu * ell * om / (2.0 * PI) * unit::meijer_kernel(x / ell))
}

fn bessel_or_zero(z: f64) -> [f64; 3] {
    if z > 700.0 {
        [0.0; 3]
    } else {
        unit::bessel_k012(z)
    }
}

/// `I10` and `I11` in scaled variables `X = x/l`, `Y = y/l > 0`.
fn sine_integrals_scaled(xs: f64, ys: f64) -> (f64, f64) {
    let sign = xs.signum();
    let xa = xs.abs();
    if xa == 0.0 {
        return (0.0, 0.0);
    }
    let tol = 1e-14;
    let phi_max = (xa / ys).atan();
    let i10 = quad::integrate(
        |phi: f64| {
            let rho = ys / phi.cos();
            if rho > 700.0 {
                0.0
            } else {
                rho * unit::bessel_k012(rho)[1]
            }
        },
        0.0,
        phi_max,
        tol,
        tol,
    )
    .0;

    let remainder = |t: f64| {
        let rho = t.hypot(ys);
        ys * ys * unit::k2_reg(rho) / (rho * rho) + unit::k1_minus_inv(rho) / rho
    };
    let mut breaks = vec![0.0];
    let mut edge = ys.min(1.0);
    while edge < xa {
        breaks.push(edge);
        edge *= 4.0;
    }
    breaks.push(xa);
    let rem = quad::integrate_pieces(remainder, &breaks, tol, tol);
    let i11 = xa / (xa * xa + ys * ys) - rem;
    (sign * i10, sign * i11)
}

/// Semi-infinite sine integrals `I10`, `I11` at `y > 0`.
pub fn semi_infinite_integral(which: SineIntegral, x: f64, y: f64, ell: f64) -> Result<f64> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(domain("semi_infinite_integral", format!("l must be positive, got {ell}")));
    }
    if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
        return Err(domain(
            "semi_infinite_integral",
            format!("requires finite x and y > 0, got ({x}, {y})"),
        ));
    }
    let (i10, i11) = sine_integrals_scaled(x / ell, y / ell);
    Ok(match which {
        SineIntegral::I10 => i10,
        SineIntegral::I11 => i11,
    })
}

/// Limits of `(I10, I11)` as `y -> 0+`.
fn sine_integrals_on_line(xs: f64) -> (f64, f64) {
    (FRAC_PI_2 * xs.signum(), -0.25 * unit::meijer_kernel(xs))
}

/// All field components at `(x, y)`, `y >= 0`, with the rigid-body terms
/// of the closed-form solution (translation-free `atan2` branch for the
/// dislocation, rotation `-Omega/4` for the disclination).
///
/// At `y = 0` the values are the limits from `y > 0`.
pub fn full_field(x: f64, y: f64, charge: DefectCharge, mat: MaterialParams) -> Result<FieldState> {
    let ell = mat.require_length("full_field")?;
    if !x.is_finite() || !y.is_finite() || y < 0.0 {
        return Err(domain("full_field", format!("requires finite x and y >= 0, got ({x}, {y})")));
    }
    if x == 0.0 && y == 0.0 {
        return Err(domain("full_field", "the defect core (0, 0) is excluded"));
    }
    let mut out = FieldState::default();
    if charge.burgers_b != 0.0 {
        out = out + dislocation_field(x, y, charge.burgers_b, mat, ell);
    }
    if charge.frank_omega != 0.0 {
        out = out + disclination_field(x, y, charge.frank_omega, mat, ell);
    }
    Ok(out)
}

fn dislocation_field(x: f64, y: f64, b: f64, mat: MaterialParams, ell: f64) -> FieldState {
    let (mu, nu) = (mat.shear_modulus, mat.poisson_ratio);
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    let r4 = r2 * r2;
    let big_r = r / ell;
    let [k0, k1, k2] = bessel_or_zero(big_r);
    let kr = unit::k2_reg(big_r);
    let c = 1.0 / (2.0 * PI * (1.0 - nu));
    let ell2 = ell * ell;

    let ux = b * (1.0 - 2.0 * nu) / (4.0 * PI * (1.0 - nu)) * r.ln()
        + b * (y * y - x * x) / (8.0 * PI * (1.0 - nu) * r2)
        - b * (y * y - x * x) / (2.0 * PI * r2) * kr
        + b / (2.0 * PI) * k0;
    let uy = b / (2.0 * PI) * y.atan2(x) - b * x * y / (4.0 * PI * (1.0 - nu) * r2)
        + b * x * y / (PI * r2) * kr;
    let omega = -b * y / (4.0 * PI * ell2) * (kr + k0);

    let myz = -mu * b / PI * (x * x - y * y) / r2 * kr - mu * b / PI * k0;
    let mxz = 2.0 * mu * b / PI * x * y / r2 * kr;

    let bulk = mu * b / (PI * ell2) * (k2 - k0) / r2;
    let syy = mu * b * c * x * (3.0 * y * y + x * x) / r4
        - 2.0 * mu * b * x / PI * (3.0 * y * y - x * x) / r4 * kr
        + bulk * x * y * y;
    let sxx = mu * b * c * x * (x * x - y * y) / r4
        + 2.0 * mu * b * x / PI * (3.0 * y * y - x * x) / r4 * kr
        - bulk * x * y * y;
    let syx = mu * b * c * y * (x * x - y * y) / r4
        - 2.0 * mu * b * y / PI * (3.0 * x * x - y * y) / r4 * kr
        + bulk * y * x * x;
    // omega = -(b / 4 pi l^2) y F(r), F = kr + K0, F' = -2 kr / r,
    // lap(y F) = y (F'' + 3 F'/r) = -2 y K1(R) / (l r)
    let lap_omega = b * y * k1 / (2.0 * PI * ell2 * ell * r);
    let sxy = syx - 4.0 * mu * ell2 * lap_omega;

    FieldState {
        sxx,
        syy,
        sxy,
        syx,
        mxz,
        myz,
        ux,
        uy,
        omega,
    }
}

fn disclination_field(x: f64, y: f64, om: f64, mat: MaterialParams, ell: f64) -> FieldState {
    let mu = mat.shear_modulus;
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    let big_r = r / ell;
    let [k0, k1, _] = bessel_or_zero(big_r);
    let kr = unit::k2_reg(big_r);
    let (i10, i11) = if y == 0.0 {
        sine_integrals_on_line(x / ell)
    } else {
        sine_integrals_scaled(x / ell, y / ell)
    };

    let ux = -om * ell * ell * x / (PI * r2) + om * ell / PI * i11 + om * y / 4.0;
    let uy = -om * y / (2.0 * PI) * (kr + k0) - om * x / 4.0;
    let omega = om / (2.0 * PI) * i10 - om / 4.0;

    let mxz = 2.0 * mu * ell * om / PI * y * k1 / r;
    let myz = -2.0 * mu * ell * om / PI * i11;

    let syy = -mu * om / PI * ((x * x - y * y) / r2 * kr + k0);
    let sxx = -syy;
    let syx = 2.0 * mu * om / PI * x * y / r2 * kr;
    // lap(I10) = I10 / l^2
    let sxy = syx - 2.0 * mu * om / PI * i10;

    FieldState {
        sxx,
        syy,
        sxy,
        syx,
        mxz,
        myz,
        ux,
        uy,
        omega,
    }
}

/// Rigid-body part carried by [`full_field`]: `(ux, uy, omega)`.
///
/// For the disclination this is the rotation `-Omega/4`; the dislocation
/// branch choice carries no rigid motion.
pub fn rigid_body_part(x: f64, y: f64, charge: DefectCharge) -> (f64, f64, f64) {
    let phi = -charge.frank_omega / 4.0;
    (-phi * y, phi * x, phi)
}
