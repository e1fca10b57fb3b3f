//! Raw device/environment parameters, thermal occupancies, and derived rates.
//!
//! This module turns laboratory quantities (cavity linewidths, drive powers,
//! temperatures) into the dimensionless quantities the converter model runs
//! on: thermal occupancies of every bath and the two cooperativities.

use crate::constants::{boltzmann, hbar};
use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Raw physical parameters of the converter and its environment.
///
/// All frequencies and rates are angular (rad/s). `delta_w`/`delta_o` are the
/// effective cavity detunings; the standard operating regime is
/// `delta_w = +omega_m`, `delta_o = -omega_m` (checked as a warning, not an
/// error).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams<T> {
    /// Mechanical resonance frequency (rad/s).
    pub omega_m: T,
    /// Mechanical quality factor (dimensionless).
    pub q_factor: T,
    /// Microwave cavity frequency (rad/s).
    pub omega_w: T,
    /// Optical cavity frequency (rad/s).
    pub omega_o: T,
    /// Microwave input-coupling rate (rad/s).
    pub kappa_w_in: T,
    /// Microwave intrinsic loss rate (rad/s).
    pub kappa_w_int: T,
    /// Optical input-coupling rate (rad/s).
    pub kappa_o_in: T,
    /// Optical intrinsic loss rate (rad/s).
    pub kappa_o_int: T,
    /// Microwave single-photon electromechanical coupling (rad/s).
    pub g_w: T,
    /// Optical single-photon optomechanical coupling (rad/s).
    pub g_o: T,
    /// Converter temperature (K).
    pub t_eom: T,
    /// Optical drive power (W).
    pub p_o: T,
    /// Microwave drive amplitude (rad/s).
    pub e_w_drive: T,
    /// Effective microwave detuning (rad/s).
    pub delta_w: T,
    /// Effective optical detuning (rad/s).
    pub delta_o: T,
    /// Optional override of the mechanical-bath occupancy. When set, it
    /// replaces the Planck value at (`omega_m`, `t_eom`) in
    /// [`occupancies`]. Used by presets that pin a benchmark occupancy.
    pub n_b_bath: Option<T>,
}

impl<T: Real> PhysicalParams<T> {
    /// Total microwave cavity linewidth kappa_w = kappa_w_in + kappa_w_int.
    pub fn kappa_w(&self) -> T {
        self.kappa_w_in + self.kappa_w_int
    }

    /// Total optical cavity linewidth kappa_o = kappa_o_in + kappa_o_int.
    pub fn kappa_o(&self) -> T {
        self.kappa_o_in + self.kappa_o_int
    }

    /// Mechanical damping rate gamma_m = omega_m / q_factor (rad/s).
    pub fn gamma_m(&self) -> T {
        self.omega_m / self.q_factor
    }

    /// Optical drive (laser) frequency implied by the detuning convention,
    /// omega_d_o = omega_o - delta_o (rad/s).
    pub fn optical_drive_frequency(&self) -> T {
        self.omega_o - self.delta_o
    }

    /// Validate all invariants. Returns regime *warnings* (non-fatal notes)
    /// on success and an error when a hard invariant is violated.
    pub fn validate(&self) -> Result<Vec<String>> {
        let all = [
            ("omega_m", self.omega_m),
            ("q_factor", self.q_factor),
            ("omega_w", self.omega_w),
            ("omega_o", self.omega_o),
            ("kappa_w_in", self.kappa_w_in),
            ("kappa_w_int", self.kappa_w_int),
            ("kappa_o_in", self.kappa_o_in),
            ("kappa_o_int", self.kappa_o_int),
            ("g_w", self.g_w),
            ("g_o", self.g_o),
            ("t_eom", self.t_eom),
            ("p_o", self.p_o),
            ("e_w_drive", self.e_w_drive),
            ("delta_w", self.delta_w),
            ("delta_o", self.delta_o),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(Error::Domain(format!("parameter {name} is not finite")));
            }
        }
        for (name, v) in [
            ("omega_m", self.omega_m),
            ("q_factor", self.q_factor),
            ("omega_w", self.omega_w),
            ("omega_o", self.omega_o),
        ] {
            if v <= T::zero() {
                return Err(Error::Domain(format!(
                    "parameter {name} must be strictly positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("kappa_w_in", self.kappa_w_in),
            ("kappa_w_int", self.kappa_w_int),
            ("kappa_o_in", self.kappa_o_in),
            ("kappa_o_int", self.kappa_o_int),
            ("g_w", self.g_w),
            ("g_o", self.g_o),
            ("p_o", self.p_o),
            ("e_w_drive", self.e_w_drive),
        ] {
            if v < T::zero() {
                return Err(Error::Domain(format!(
                    "parameter {name} must be non-negative, got {v}"
                )));
            }
        }
        if self.kappa_w() <= T::zero() {
            return Err(Error::Domain(
                "total microwave linewidth kappa_w must be strictly positive".into(),
            ));
        }
        if self.kappa_o() <= T::zero() {
            return Err(Error::Domain(
                "total optical linewidth kappa_o must be strictly positive".into(),
            ));
        }
        if self.t_eom < T::zero() {
            return Err(Error::Domain(format!(
                "temperature t_eom must be non-negative, got {}",
                self.t_eom
            )));
        }
        if let Some(nb) = self.n_b_bath {
            if !nb.is_finite() || nb < T::zero() {
                return Err(Error::Domain(format!(
                    "mechanical-bath occupancy override must be a finite non-negative number, got {nb}"
                )));
            }
        }
        if self.optical_drive_frequency() <= T::zero() {
            return Err(Error::Domain(
                "optical drive frequency omega_o - delta_o must be strictly positive".into(),
            ));
        }

        let mut warnings = Vec::new();
        let tol = self.omega_m * lit::<T>(1e-6);
        if (self.delta_w - self.omega_m).abs() > tol {
            warnings.push(format!(
                "detuning delta_w = {} deviates from the standard operating regime +omega_m = {}",
                self.delta_w, self.omega_m
            ));
        }
        if (self.delta_o + self.omega_m).abs() > tol {
            warnings.push(format!(
                "detuning delta_o = {} deviates from the standard operating regime -omega_m = -{}",
                self.delta_o, self.omega_m
            ));
        }
        Ok(warnings)
    }
}

/// Mean thermal occupancies of every bath the converter couples to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOccupancies<T> {
    /// Microwave input bath occupancy.
    pub n_w_t: T,
    /// Optical input bath occupancy.
    pub n_o_t: T,
    /// Mechanical bath occupancy.
    pub n_b_t: T,
    /// Microwave intrinsic-loss bath occupancy.
    pub n_w_int: T,
    /// Optical intrinsic-loss bath occupancy.
    pub n_o_int: T,
}

impl<T: Real> ThermalOccupancies<T> {
    /// Validate non-negativity and finiteness.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_w_t", self.n_w_t),
            ("n_o_t", self.n_o_t),
            ("n_b_t", self.n_b_t),
            ("n_w_int", self.n_w_int),
            ("n_o_int", self.n_o_int),
        ] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::Domain(format!(
                    "occupancy {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Rates derived from the drives: damping, intracavity pump photon numbers,
/// multi-photon couplings, cooperativities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates<T> {
    /// Mechanical damping rate (rad/s).
    pub gamma_m: T,
    /// Microwave multi-photon coupling G_w = g_w * sqrt(N_w) (rad/s).
    pub g_multi_w: T,
    /// Optical multi-photon coupling G_o = g_o * sqrt(N_o) (rad/s).
    pub g_multi_o: T,
    /// Mean intracavity microwave pump photon number.
    pub n_pump_w: T,
    /// Mean intracavity optical pump photon number.
    pub n_pump_o: T,
    /// Microwave cooperativity Gamma_w = G_w^2 / (kappa_w * gamma_m).
    pub gamma_w: T,
    /// Optical cooperativity Gamma_o = G_o^2 / (kappa_o * gamma_m).
    pub gamma_o: T,
}

/// Mean thermal occupancy of a bosonic mode: 1 / (exp(h_bar*omega/(k_B*T)) - 1).
///
/// Evaluated through `exp_m1` so small exponents keep full precision.
/// Returns 0 at `t == 0`.
pub fn planck_occupancy<T: Real>(omega: T, t: T) -> Result<T> {
    if !omega.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!(
            "planck_occupancy requires finite inputs, got omega = {omega}, t = {t}"
        )));
    }
    if omega <= T::zero() {
        return Err(Error::Domain(format!(
            "planck_occupancy requires omega > 0, got {omega}"
        )));
    }
    if t < T::zero() {
        return Err(Error::Domain(format!(
            "planck_occupancy requires t >= 0, got {t}"
        )));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let x = hbar::<T>() * omega / (boltzmann::<T>() * t);
    // exp_m1 overflows to +inf for large x, giving the correct limit 0.
    Ok(x.exp_m1().recip())
}

/// Derive damping, pump photon numbers, multi-photon couplings, and
/// cooperativities from the drive amplitudes in `p`.
pub fn derive_rates<T: Real>(p: &PhysicalParams<T>) -> Result<DerivedRates<T>> {
    p.validate()?;
    let gamma_m = p.gamma_m();
    let kappa_w = p.kappa_w();
    let kappa_o = p.kappa_o();

    // Microwave drive enters as an amplitude directly.
    let n_pump_w = p.e_w_drive * p.e_w_drive / (kappa_w * kappa_w + p.delta_w * p.delta_w);

    // Optical drive enters as a power: |E_o|^2 = 2 * P_o * kappa_o_in / (h_bar * omega_drive).
    let omega_d_o = p.optical_drive_frequency();
    let e_o_sq = lit::<T>(2.0) * p.p_o * p.kappa_o_in / (hbar::<T>() * omega_d_o);
    let n_pump_o = e_o_sq / (kappa_o * kappa_o + p.delta_o * p.delta_o);

    let g_multi_w = p.g_w * n_pump_w.sqrt();
    let g_multi_o = p.g_o * n_pump_o.sqrt();
    let gamma_w = g_multi_w * g_multi_w / (kappa_w * gamma_m);
    let gamma_o = g_multi_o * g_multi_o / (kappa_o * gamma_m);
    Ok(DerivedRates {
        gamma_m,
        g_multi_w,
        g_multi_o,
        n_pump_w,
        n_pump_o,
        gamma_w,
        gamma_o,
    })
}

/// Inverse of [`derive_rates`]: the drive amplitudes `(e_w_drive, p_o)` that
/// realize the requested cooperativities with the other parameters of `p`.
pub fn drives_for_cooperativities<T: Real>(
    p: &PhysicalParams<T>,
    gamma_w: T,
    gamma_o: T,
) -> Result<(T, T)> {
    p.validate()?;
    if gamma_w < T::zero() || gamma_o < T::zero() {
        return Err(Error::Domain(format!(
            "cooperativities must be non-negative, got ({gamma_w}, {gamma_o})"
        )));
    }
    let gamma_m = p.gamma_m();
    let kappa_w = p.kappa_w();
    let kappa_o = p.kappa_o();

    let e_w = if gamma_w == T::zero() {
        T::zero()
    } else {
        if p.g_w <= T::zero() {
            return Err(Error::Domain(
                "gamma_w > 0 requires a nonzero single-photon coupling g_w".into(),
            ));
        }
        let g_sq = gamma_w * kappa_w * gamma_m;
        let n_w = g_sq / (p.g_w * p.g_w);
        (n_w * (kappa_w * kappa_w + p.delta_w * p.delta_w)).sqrt()
    };

    let p_o = if gamma_o == T::zero() {
        T::zero()
    } else {
        if p.g_o <= T::zero() {
            return Err(Error::Domain(
                "gamma_o > 0 requires a nonzero single-photon coupling g_o".into(),
            ));
        }
        if p.kappa_o_in <= T::zero() {
            return Err(Error::Domain(
                "gamma_o > 0 requires a nonzero optical input coupling kappa_o_in".into(),
            ));
        }
        let g_sq = gamma_o * kappa_o * gamma_m;
        let n_o = g_sq / (p.g_o * p.g_o);
        let e_o_sq = n_o * (kappa_o * kappa_o + p.delta_o * p.delta_o);
        e_o_sq * hbar::<T>() * p.optical_drive_frequency() / (lit::<T>(2.0) * p.kappa_o_in)
    };

    Ok((e_w, p_o))
}

/// Thermal occupancies of the five converter baths at temperature `t_eom`.
///
/// The intrinsic-loss baths sit at the same frequencies and temperature as
/// the input baths, so they share the same occupancies. A set
/// [`PhysicalParams::n_b_bath`] override replaces the mechanical Planck
/// value.
pub fn occupancies<T: Real>(p: &PhysicalParams<T>) -> Result<ThermalOccupancies<T>> {
    p.validate()?;
    let n_w_t = planck_occupancy(p.omega_w, p.t_eom)?;
    let n_o_t = planck_occupancy(p.omega_o, p.t_eom)?;
    let n_b_t = match p.n_b_bath {
        Some(nb) => nb,
        None => planck_occupancy(p.omega_m, p.t_eom)?,
    };
    Ok(ThermalOccupancies {
        n_w_t,
        n_o_t,
        n_b_t,
        n_w_int: n_w_t,
        n_o_int: n_o_t,
    })
}

/// Background occupancy seen by the receiver: the Planck value at the
/// microwave frequency and the background temperature `t_b`.
pub fn background_occupancy<T: Real>(p: &PhysicalParams<T>, t_b: T) -> Result<T> {
    planck_occupancy(p.omega_w, t_b)
}
