//! Physical constants.
//!
//! Values are the exact SI defining constants (2019 redefinition); ħ is
//! derived from the exact Planck constant.

use crate::real::{lit, Real};

/// Planck constant h in J·s (SI exact).
pub const PLANCK_H_F64: f64 = 6.626_070_15e-34;

/// Reduced Planck constant ħ = h / 2π in J·s.
pub const HBAR_F64: f64 = PLANCK_H_F64 / (2.0 * std::f64::consts::PI);

/// Boltzmann constant k_B in J/K (SI exact).
pub const BOLTZMANN_F64: f64 = 1.380_649e-23;

/// Speed of light in vacuum c in m/s (SI exact).
pub const SPEED_OF_LIGHT_F64: f64 = 299_792_458.0;

/// ħ in the working scalar type.
#[inline]
pub fn hbar<T: Real>() -> T {
    lit(HBAR_F64)
}

/// k_B in the working scalar type.
#[inline]
pub fn boltzmann<T: Real>() -> T {
    lit(BOLTZMANN_F64)
}

/// c in the working scalar type.
#[inline]
pub fn speed_of_light<T: Real>() -> T {
    lit(SPEED_OF_LIGHT_F64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_si_values() {
        assert_eq!(PLANCK_H_F64, 6.62607015e-34);
        assert_eq!(BOLTZMANN_F64, 1.380649e-23);
        assert_eq!(SPEED_OF_LIGHT_F64, 299792458.0);
        let h_over_2pi = 6.62607015e-34 / std::f64::consts::TAU;
        assert_eq!(HBAR_F64, h_over_2pi);
        assert_eq!(hbar::<f64>(), HBAR_F64);
    }
}
