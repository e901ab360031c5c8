//! Physical constants (CODATA 2018).

/// Vacuum constants used by the line model. Values are fixed; there is no
/// way to override them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Vacuum permeability, H/m.
    pub mu0: f64,
    /// Free-space wave impedance √(μ0/ε0), Ω.
    pub eta0: f64,
}

/// Speed of light in vacuum, m/s (exact).
pub const C0: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// dB per neper, 20/ln(10).
pub const DB_PER_NEPER: f64 = 20.0 / std::f64::consts::LN_10;

impl PhysicalConstants {
    pub fn get() -> Self {
        Self {
            c: C0,
            eps0: EPS0,
            mu0: MU0,
            eta0: eta0(),
        }
    }
}

/// Free-space impedance √(μ0/ε0) in ohms.
pub fn eta0() -> f64 {
    (MU0 / EPS0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta0_is_consistent() {
        let k = PhysicalConstants::get();
        assert!((k.eta0 - (k.mu0 / k.eps0).sqrt()).abs() < 1e-12);
        assert!((k.eta0 - 376.730_313_668).abs() < 1e-6);
        // c² μ0 ε0 = 1 to the precision of the published constants
        assert!((k.c * k.c * k.mu0 * k.eps0 - 1.0).abs() < 1e-9);
        assert!(k.c > 0.0 && k.eps0 > 0.0 && k.mu0 > 0.0);
    }

    #[test]
    fn neper_conversion() {
        assert!((DB_PER_NEPER - 8.685_889_638).abs() < 1e-9);
    }
}
