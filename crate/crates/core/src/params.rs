//! Physical inputs and the derived parameters of the deformed models.
//!
//! Natural units `hbar = c = 1` throughout: `m` and `omega` carry energy,
//! `B` energy squared (`e` is a dimensionless coupling so `e*B` is energy
//! squared), and the non-commutativity parameter `theta` carries inverse
//! energy squared (length squared).

use serde::{Deserialize, Serialize};

/// Physical inputs shared by every model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Mass, > 0.
    pub m: f64,
    /// Charge magnitude, > 0.
    pub e: f64,
    /// Magnetic field strength; any real value.
    pub b: f64,
    /// Oscillator frequency, >= 0.
    pub omega: f64,
    /// Non-commutativity parameter; any real value.
    pub theta: f64,
    /// Spin projection, exactly +1/2 or -1/2.
    pub s_z: f64,
}

impl PhysParams {
    /// Convenience constructor.
    pub fn new(m: f64, e: f64, b: f64, omega: f64, theta: f64, s_z: f64) -> Self {
        Self { m, e, b, omega, theta, s_z }
    }

    /// The spin label as an integer: +1 for `s_z = +1/2`, -1 for `s_z = -1/2`.
    pub fn sigma_z(&self) -> i32 {
        if self.s_z >= 0.0 { 1 } else { -1 }
    }

    /// Copy with a different `theta`.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Copy with a different field strength.
    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    /// Copy with a different spin projection.
    pub fn with_s_z(mut self, s_z: f64) -> Self {
        self.s_z = s_z;
        self
    }
}

/// Quantities derived from [`PhysParams`], with well-posedness flags.
///
/// Ill-posed regimes (non-positive effective mass or squared frequency) are
/// flagged rather than rejected: the critical points of the models live
/// exactly on those boundaries, and downstream spectrum operations decide
/// whether to refuse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Cyclotron frequency `omega_c = e*B / (2m)` (half the textbook
    /// `e*B/m`; the complex-coordinate factorization of these models works
    /// with this convention throughout).
    pub omega_c: f64,
    /// Effective mass `m_tilde = m * (1 + e*B*theta/2)`.
    pub m_tilde: f64,
    /// Deformed cyclotron frequency `omega_tilde = e*B_tilde / m_tilde`
    /// (equivalently `(e*B / (2 m_tilde)) * (1 + e*B*theta/4)`).
    pub omega_tilde: f64,
    /// Deformed field `B_tilde = (B/2) * (1 + e*B*theta/4)`.
    pub b_tilde: f64,
    /// Deformed squared oscillator frequency
    /// `varpi^2 = (omega^2 + omega_c^2) / (1 + e*B*theta/2)`.
    pub varpi_sq: f64,
    /// `m_tilde > 0` and `omega_tilde^2 > 0`.
    pub well_posed_landau: bool,
    /// `m_tilde > 0` and `varpi_sq > 0`.
    pub well_posed_oscillator: bool,
}

impl DerivedParams {
    /// `varpi = sqrt(varpi_sq)`; NaN when `varpi_sq < 0`.
    pub fn varpi(&self) -> f64 {
        self.varpi_sq.sqrt()
    }
}

/// Compute every derived parameter. Pure: identical inputs give bit-identical
/// outputs. Never fails; ill-posed regimes are reported through the flags.
pub fn derive(phys: &PhysParams) -> DerivedParams {
    let eb = phys.e * phys.b;
    let omega_c = eb / (2.0 * phys.m);
    let m_tilde = phys.m * (1.0 + eb * phys.theta / 2.0);
    let b_tilde = (phys.b / 2.0) * (1.0 + eb * phys.theta / 4.0);
    // Evaluated as e*B_tilde/m_tilde so that omega_tilde * m_tilde and
    // e * B_tilde agree to the last bits (a 2-ulp documented identity).
    let omega_tilde = phys.e * b_tilde / m_tilde;
    let varpi_sq = (phys.omega * phys.omega + omega_c * omega_c) / (1.0 + eb * phys.theta / 2.0);
    DerivedParams {
        omega_c,
        m_tilde,
        omega_tilde,
        b_tilde,
        varpi_sq,
        well_posed_landau: m_tilde > 0.0 && omega_tilde * omega_tilde > 0.0,
        well_posed_oscillator: m_tilde > 0.0 && varpi_sq > 0.0,
    }
}

/// Check the [`PhysParams`] invariants; returns an empty list when they all
/// hold, otherwise one description per violated constraint.
pub fn validate(phys: &PhysParams) -> Vec<String> {
    let mut violations = Vec::new();
    if phys.m.is_nan() || phys.m <= 0.0 {
        violations.push(format!("m must be > 0 (got {})", phys.m));
    }
    if phys.e.is_nan() || phys.e <= 0.0 {
        violations.push(format!("e must be > 0 (got {})", phys.e));
    }
    if phys.omega.is_nan() || phys.omega < 0.0 {
        violations.push(format!("omega must be >= 0 (got {})", phys.omega));
    }
    if !phys.b.is_finite() {
        violations.push(format!("B must be finite (got {})", phys.b));
    }
    if !phys.theta.is_finite() {
        violations.push(format!("theta must be finite (got {})", phys.theta));
    }
    if phys.s_z != 0.5 && phys.s_z != -0.5 {
        violations.push(format!("s_z must be +1/2 or -1/2 exactly (got {})", phys.s_z));
    }
    violations
}
