//! Steady-state input-output coefficients of the converter and dynamical
//! stability of the linearized system.
//!
//! The converter couples a microwave cavity and an optical cavity to a
//! shared mechanical mode. Its steady state maps the input fields onto two
//! propagating outputs:
//!
//! ```text
//! d_w = a_w*c_w_in - b*c_o_in^dag      - c_w*b_mech - d_w*c_o_int^dag - e_w*c_w_int
//! d_o = conj(b)*c_w_in^dag + a_o*c_o_in - c_o*b_mech^dag + d_o*c_w_int^dag + e_o*c_o_int
//! ```
//!
//! Three fidelity levels are provided: lossless narrowband (closed real
//! forms), lossy narrowband (intrinsic-loss legs), and the full
//! frequency-dependent spectral coefficients.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::math::{solve_monic_cubic, CubicRoots};
use crate::real::{lit, Real};

/// Relative tolerance used to flag operating points sitting on a pole of the
/// steady-state solution.
const SINGULAR_EPS: f64 = 1e-9;

/// Model fidelity at which a coefficient set was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fidelity {
    /// Narrowband (carrier) limit with no intrinsic cavity losses.
    LosslessNarrowband,
    /// Narrowband limit including intrinsic-loss input legs.
    LossyNarrowband,
    /// Full frequency-dependent coefficients at a sideband offset `omega`.
    FullSpectral,
}

impl std::fmt::Display for Fidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Fidelity::LosslessNarrowband => "lossless_narrowband",
            Fidelity::LossyNarrowband => "lossy_narrowband",
            Fidelity::FullSpectral => "full_spectral",
        };
        f.write_str(s)
    }
}

/// In-coupling/intrinsic fractions of both cavity linewidths:
/// `in_j = kappa_j_in / kappa_j`, `int_j = kappa_j_int / kappa_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaRatios<T> {
    /// Microwave in-coupling fraction.
    pub in_w: T,
    /// Microwave intrinsic fraction.
    pub int_w: T,
    /// Optical in-coupling fraction.
    pub in_o: T,
    /// Optical intrinsic fraction.
    pub int_o: T,
}

impl<T: Real> KappaRatios<T> {
    /// Fully over-coupled cavities (no intrinsic loss).
    pub fn lossless() -> Self {
        KappaRatios {
            in_w: T::one(),
            int_w: T::zero(),
            in_o: T::one(),
            int_o: T::zero(),
        }
    }

    /// Build from the two in-coupling fractions; intrinsic fractions are the
    /// complements.
    pub fn from_in_fractions(r_w: T, r_o: T) -> Result<Self> {
        let ratios = KappaRatios {
            in_w: r_w,
            int_w: T::one() - r_w,
            in_o: r_o,
            int_o: T::one() - r_o,
        };
        ratios.validate()?;
        Ok(ratios)
    }

    /// Build from raw physical parameters.
    pub fn from_params(p: &crate::params::PhysicalParams<T>) -> Result<Self> {
        p.validate()?;
        let ratios = KappaRatios {
            in_w: p.kappa_w_in / p.kappa_w(),
            int_w: p.kappa_w_int / p.kappa_w(),
            in_o: p.kappa_o_in / p.kappa_o(),
            int_o: p.kappa_o_int / p.kappa_o(),
        };
        ratios.validate()?;
        Ok(ratios)
    }

    /// Check every fraction lies in [0, 1] and the pairs sum to one.
    pub fn validate(&self) -> Result<()> {
        let one = T::one();
        let tol = lit::<T>(1e-12);
        for (name, v) in [
            ("in_w", self.in_w),
            ("int_w", self.int_w),
            ("in_o", self.in_o),
            ("int_o", self.int_o),
        ] {
            if !v.is_finite() || v < -tol || v > one + tol {
                return Err(Error::Domain(format!(
                    "coupling fraction {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if (self.in_w + self.int_w - one).abs() > tol || (self.in_o + self.int_o - one).abs() > tol
        {
            return Err(Error::Domain(
                "coupling fractions of each cavity must sum to 1".into(),
            ));
        }
        Ok(())
    }
}

/// Input-output coefficients of the converter at one operating point.
///
/// `e_w_coef`/`e_o_coef` carry a suffix to avoid any confusion with the
/// microwave drive amplitude, which is a different quantity entirely.
#[derive(Debug, Clone, PartialEq)]
pub struct IoCoefficients<T> {
    /// Microwave-output coefficient on the microwave input.
    pub a_w: Complex<T>,
    /// Optical-output coefficient on the optical input.
    pub a_o: Complex<T>,
    /// Cross-conversion (two-mode-squeezing) coefficient.
    pub b: Complex<T>,
    /// Microwave-output coefficient on the mechanical bath.
    pub c_w: Complex<T>,
    /// Optical-output coefficient on the mechanical bath.
    pub c_o: Complex<T>,
    /// Microwave-output coefficient on the optical intrinsic bath (daggered).
    pub d_w: Complex<T>,
    /// Optical-output coefficient on the microwave intrinsic bath (daggered).
    pub d_o: Complex<T>,
    /// Microwave-output coefficient on the microwave intrinsic bath.
    pub e_w_coef: Complex<T>,
    /// Optical-output coefficient on the optical intrinsic bath.
    pub e_o_coef: Complex<T>,
    /// Sideband frequency offset (rad/s) the coefficients were evaluated at.
    pub omega: T,
    /// Model fidelity used for the evaluation.
    pub fidelity: Fidelity,
}

impl<T: Real> IoCoefficients<T> {
    /// Residuals of the two commutator-preservation identities
    /// (each must be 0 for a valid bosonic input-output map):
    ///
    /// ```text
    /// |a_w|^2 - |b|^2 + |c_w|^2 - |d_w|^2 + |e_w|^2 - 1
    /// |a_o|^2 - |b|^2 - |c_o|^2 - |d_o|^2 + |e_o|^2 - 1
    /// ```
    ///
    /// The signs follow which inputs enter the operator rows daggered: the
    /// microwave output daggers its optical legs (b, d_w), the optical
    /// output daggers its microwave legs (b, d_o) and the mechanical leg
    /// (c_o).
    pub fn commutator_residuals(&self) -> (T, T) {
        let one = T::one();
        let r_w = self.a_w.norm_sqr() - self.b.norm_sqr() + self.c_w.norm_sqr()
            - self.d_w.norm_sqr()
            + self.e_w_coef.norm_sqr()
            - one;
        let r_o = self.a_o.norm_sqr()
            - self.b.norm_sqr()
            - self.c_o.norm_sqr()
            - self.d_o.norm_sqr()
            + self.e_o_coef.norm_sqr()
            - one;
        (r_w, r_o)
    }

    /// Magnitude scale of the coefficient set, used to set relative
    /// tolerances on the identity residuals near the instability boundary.
    pub fn magnitude_scale(&self) -> T {
        T::one()
            + self.a_w.norm_sqr()
            + self.a_o.norm_sqr()
            + self.b.norm_sqr()
            + self.c_w.norm_sqr()
            + self.c_o.norm_sqr()
            + self.d_w.norm_sqr()
            + self.d_o.norm_sqr()
            + self.e_w_coef.norm_sqr()
            + self.e_o_coef.norm_sqr()
    }
}

fn check_cooperativities<T: Real>(gamma_w: T, gamma_o: T) -> Result<()> {
    if !gamma_w.is_finite() || !gamma_o.is_finite() || gamma_w < T::zero() || gamma_o < T::zero() {
        return Err(Error::Domain(format!(
            "cooperativities must be finite and non-negative, got ({gamma_w}, {gamma_o})"
        )));
    }
    Ok(())
}

fn narrowband_denominator<T: Real>(gamma_w: T, gamma_o: T) -> Result<T> {
    let den = T::one() + gamma_w - gamma_o;
    let scale = T::one() + gamma_w + gamma_o;
    if den.abs() <= lit::<T>(SINGULAR_EPS) * scale {
        return Err(Error::SingularOperatingPoint(format!(
            "narrowband denominator 1 + gamma_w - gamma_o = {den} vanishes at \
             (gamma_w, gamma_o) = ({gamma_w}, {gamma_o}): instability boundary"
        )));
    }
    Ok(den)
}

/// Lossless narrowband coefficients (no intrinsic losses, carrier limit).
pub fn coefficients_lossless<T: Real>(gamma_w: T, gamma_o: T) -> Result<IoCoefficients<T>> {
    check_cooperativities(gamma_w, gamma_o)?;
    let den = narrowband_denominator(gamma_w, gamma_o)?;
    let zero = Complex::new(T::zero(), T::zero());
    let two = lit::<T>(2.0);
    let re = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);
    Ok(IoCoefficients {
        a_w: re((T::one() - (gamma_w + gamma_o)) / den),
        a_o: re((T::one() + (gamma_w + gamma_o)) / den),
        b: re(two * (gamma_w * gamma_o).sqrt() / den),
        c_w: im(two * gamma_w.sqrt() / den),
        c_o: im(two * gamma_o.sqrt() / den),
        d_w: zero,
        d_o: zero,
        e_w_coef: zero,
        e_o_coef: zero,
        omega: T::zero(),
        fidelity: Fidelity::LosslessNarrowband,
    })
}

/// Lossy narrowband coefficients: intrinsic-loss legs included, carrier
/// limit.
pub fn coefficients_lossy<T: Real>(
    gamma_w: T,
    gamma_o: T,
    ratios: &KappaRatios<T>,
) -> Result<IoCoefficients<T>> {
    check_cooperativities(gamma_w, gamma_o)?;
    ratios.validate()?;
    let den = narrowband_denominator(gamma_w, gamma_o)?;
    let one = T::one();
    let two = lit::<T>(2.0);
    let (r_w, r_o) = (ratios.in_w, ratios.in_o);
    let re = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);
    Ok(IoCoefficients {
        a_w: re(((one - two * r_w) * (gamma_o - one) - gamma_w) / den),
        a_o: re((-(one - two * r_o) * (gamma_w + one) + gamma_o) / den),
        b: re(two * (r_o * r_w).sqrt() * (gamma_w * gamma_o).sqrt() / den),
        c_w: im(two * (r_w * gamma_w).sqrt() / den),
        c_o: im(two * (r_o * gamma_o).sqrt() / den),
        d_w: re(two * ((one - r_o) * r_w * gamma_o * gamma_w).sqrt() / den),
        d_o: re(two * (r_o * (one - r_w) * gamma_o * gamma_w).sqrt() / den),
        e_w_coef: re(two * ((one - r_w) * r_w).sqrt() * (gamma_o - one) / den),
        e_o_coef: re(two * ((one - r_o) * r_o).sqrt() * (gamma_w + one) / den),
        omega: T::zero(),
        fidelity: Fidelity::LossyNarrowband,
    })
}

/// Full frequency-dependent coefficients at sideband offset `omega`.
///
/// The microwave-output row is evaluated at `+omega` and the optical-output
/// row at the paired sideband `-omega` (equivalently, through the conjugated
/// response), which is the convention under which the two rows form one
/// commutator-preserving map. At `omega == 0` this reduces exactly to
/// [`coefficients_lossy`].
#[allow(clippy::too_many_arguments)]
pub fn coefficients_spectral<T: Real>(
    gamma_w: T,
    gamma_o: T,
    kappa_w: T,
    kappa_o: T,
    gamma_m: T,
    ratios: &KappaRatios<T>,
    omega: T,
) -> Result<IoCoefficients<T>> {
    check_cooperativities(gamma_w, gamma_o)?;
    ratios.validate()?;
    if !(kappa_w > T::zero()) || !(kappa_o > T::zero()) || !(gamma_m > T::zero()) {
        return Err(Error::Domain(format!(
            "rates must be strictly positive, got kappa_w = {kappa_w}, kappa_o = {kappa_o}, \
             gamma_m = {gamma_m}"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite, got {omega}")));
    }

    let one = T::one();
    let two = lit::<T>(2.0);
    let (r_w, r_o) = (ratios.in_w, ratios.in_o);
    let c = |re: T, imv: T| Complex::new(re, imv);
    // Normalized response denominators of each mode, 1 - i*omega/rate.
    let ow = c(one, -omega / kappa_w);
    let oo = c(one, -omega / kappa_o);
    let ob = c(one, -omega / gamma_m);
    let g_w = Complex::new(gamma_w, T::zero());
    let g_o = Complex::new(gamma_o, T::zero());

    let den = ow * (oo * ob - g_o) + g_w * oo;
    let scale = ow.norm() * (oo.norm() * ob.norm() + gamma_o) + gamma_w * oo.norm();
    if den.norm() <= lit::<T>(SINGULAR_EPS) * scale {
        return Err(Error::SingularOperatingPoint(format!(
            "spectral denominator vanishes at sideband frequency omega = {omega} rad/s for \
             (gamma_w, gamma_o) = ({gamma_w}, {gamma_o})"
        )));
    }
    let dens = den.conj();

    let two_r_w = c(two * r_w, T::zero());
    let two_r_o = c(two * r_o, T::zero());
    let i_unit = Complex::new(T::zero(), one);
    let rr = |x: T| Complex::new(x, T::zero());

    let a_w = ((ow - two_r_w) * (g_o - oo * ob) - g_w * oo) / den;
    let a_o = (-(oo.conj() - two_r_o) * (g_w + ow.conj() * ob.conj()) + g_o * ow.conj()) / dens;
    let b = rr(two * (r_o * r_w * gamma_w * gamma_o).sqrt()) / den;
    let c_w = i_unit * rr(two * (r_w * gamma_w).sqrt()) * oo / den;
    let c_o = i_unit * rr(two * (r_o * gamma_o).sqrt()) * ow.conj() / dens;
    let d_w = rr(two * ((one - r_o) * r_w * gamma_o * gamma_w).sqrt()) / den;
    let d_o = rr(two * (r_o * (one - r_w) * gamma_o * gamma_w).sqrt()) / dens;
    let e_w_coef = rr(two * ((one - r_w) * r_w).sqrt()) * (g_o - oo * ob) / den;
    let e_o_coef = rr(two * ((one - r_o) * r_o).sqrt()) * (g_w + ow.conj() * ob.conj()) / dens;

    Ok(IoCoefficients {
        a_w,
        a_o,
        b,
        c_w,
        c_o,
        d_w,
        d_o,
        e_w_coef,
        e_o_coef,
        omega,
        fidelity: Fidelity::FullSpectral,
    })
}

/// Dynamical-stability verdict for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport<T> {
    /// Routh-Hurwitz verdict: every drift eigenvalue has negative real part.
    pub stable: bool,
    /// Negated largest real part of the drift eigenvalues (rad/s); positive
    /// means stable, and its size is the decay rate of the slowest mode.
    pub margin: T,
    /// Whether the narrowband stability condition gamma_o < 1 + gamma_w
    /// holds.
    pub narrowband_condition: bool,
}

/// Stability of the linearized three-mode dynamics at one operating point.
///
/// The closed linear triple (microwave mode, conjugated optical mode,
/// mechanical mode) has a characteristic cubic
/// `lambda^3 + a2*lambda^2 + a1*lambda + a0` with
///
/// ```text
/// a2 = kappa_w + kappa_o + gamma_m
/// a1 = kappa_w*kappa_o + gamma_m*(kappa_w + kappa_o) + G_w^2 - G_o^2
/// a0 = kappa_w*kappa_o*gamma_m*(1 + gamma_w - gamma_o)
/// ```
///
/// The verdict comes from the Routh-Hurwitz conditions on (a2, a1, a0); the
/// margin is cross-filled from the actual roots. The constant term vanishes
/// exactly on the line `gamma_o = 1 + gamma_w`, which is therefore the
/// stability boundary.
pub fn stability<T: Real>(
    gamma_w: T,
    gamma_o: T,
    kappa_w: T,
    kappa_o: T,
    gamma_m: T,
) -> Result<StabilityReport<T>> {
    check_cooperativities(gamma_w, gamma_o)?;
    if !(kappa_w > T::zero()) || !(kappa_o > T::zero()) || !(gamma_m > T::zero()) {
        return Err(Error::Domain(format!(
            "rates must be strictly positive, got kappa_w = {kappa_w}, kappa_o = {kappa_o}, \
             gamma_m = {gamma_m}"
        )));
    }
    let g_w_sq = gamma_w * kappa_w * gamma_m;
    let g_o_sq = gamma_o * kappa_o * gamma_m;
    let a2 = kappa_w + kappa_o + gamma_m;
    let a1 = kappa_w * kappa_o + gamma_m * (kappa_w + kappa_o) + g_w_sq - g_o_sq;
    let a0 = kappa_w * kappa_o * gamma_m * (T::one() + gamma_w - gamma_o);
    let zero = T::zero();
    let stable = a2 > zero && a1 > zero && a0 > zero && a2 * a1 > a0;
    let roots: CubicRoots<T> = solve_monic_cubic(a2, a1, a0);
    let margin = -roots.max_real_part();
    Ok(StabilityReport {
        stable,
        margin,
        narrowband_condition: gamma_o < T::one() + gamma_w,
    })
}
