//! Joint Gaussian state of the entangled microwave/optical source and its
//! quality measures.
//!
//! The converter's two outputs form a zero-mean two-mode Gaussian state that
//! is fully described by the occupations of both modes and the
//! phase-sensitive cross correlation. In the standard form used here the
//! 4x4 covariance matrix (vacuum variance 1/2) is
//!
//! ```text
//! [ v11  0    v13  0  ]
//! [ 0    v11  0   -v13]
//! [ v13  0    v33  0  ]
//! [ 0   -v13  0    v33]
//! ```
//!
//! with `v11 = n_w + 1/2`, `v33 = n_o + 1/2`, `v13 = Re<d_w d_o>`.

use num_complex::Complex;

use crate::converter::IoCoefficients;
use crate::error::{Error, Result};
use crate::params::ThermalOccupancies;
use crate::real::{lit, Real};

/// Bosonic entropy function `h(x)` of a symplectic eigenvalue:
/// `h(x) = (x + 1/2) log2(x + 1/2) - (x - 1/2) log2(x - 1/2)`.
///
/// `h(1/2) = 0` (pure mode); values below `1/2 - 1e-9` are unphysical and
/// rejected, and the sliver just below 1/2 is clamped to 0.
pub fn entropy_h<T: Real>(x: T) -> Result<T> {
    let half = lit::<T>(0.5);
    if !x.is_finite() || x < half - lit::<T>(1e-9) {
        return Err(Error::Domain(format!(
            "entropy argument must be a symplectic eigenvalue >= 1/2, got {x}"
        )));
    }
    if x <= half {
        return Ok(T::zero());
    }
    let p = x + half;
    let m = x - half;
    Ok(p * p.log2() - m * m.log2())
}

/// Two-mode Gaussian state of the source in standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSourceState<T> {
    /// Microwave-output occupation.
    pub n_w: T,
    /// Optical-output occupation.
    pub n_o: T,
    /// Phase-sensitive cross correlation `<d_w d_o>`.
    pub cross: Complex<T>,
    /// Microwave quadrature variance, `n_w + 1/2`.
    pub v11: T,
    /// Optical quadrature variance, `n_o + 1/2`.
    pub v33: T,
    /// Cross quadrature covariance, `Re cross`.
    pub v13: T,
}

impl<T: Real> JointSourceState<T> {
    /// Build the state from the three second moments, enforcing that they
    /// describe a physical two-mode Gaussian state.
    pub fn from_occupations(n_w: T, n_o: T, cross: Complex<T>) -> Result<Self> {
        if !n_w.is_finite() || !n_o.is_finite() || n_w < T::zero() || n_o < T::zero() {
            return Err(Error::Domain(format!(
                "occupations must be finite and non-negative, got ({n_w}, {n_o})"
            )));
        }
        if !cross.re.is_finite() || !cross.im.is_finite() {
            return Err(Error::Domain(format!(
                "cross correlation must be finite, got {cross}"
            )));
        }
        // The standard form assumes the cross correlation has been rotated
        // onto the real axis; a residual imaginary part beyond roundoff
        // means the caller skipped that rotation.
        if cross.im.abs() > lit::<T>(1e-9) * cross.norm() {
            return Err(Error::Domain(format!(
                "cross correlation must be real in standard form (rotate its phase away), \
                 got {cross}"
            )));
        }
        // Quantum bound |<d_w d_o>| <= sqrt(n_max (1 + n_min)).
        let (n_min, n_max) = if n_w <= n_o { (n_w, n_o) } else { (n_o, n_w) };
        let bound = (n_max * (T::one() + n_min)).sqrt();
        if cross.norm() > bound + lit::<T>(1e-9) * (T::one() + bound) {
            return Err(Error::InternalConsistency(format!(
                "cross correlation |{cross}| exceeds the two-mode quantum bound {bound} for \
                 occupations ({n_w}, {n_o})"
            )));
        }
        let half = lit::<T>(0.5);
        let state = JointSourceState {
            n_w,
            n_o,
            cross,
            v11: n_w + half,
            v33: n_o + half,
            v13: cross.re,
        };
        // Full physicality: smallest symplectic eigenvalue must reach 1/2.
        let spec = symplectic_spectrum(&state)?;
        if spec.nu_minus < half - lit::<T>(1e-9) * (T::one() + spec.nu_plus) {
            return Err(Error::InternalConsistency(format!(
                "moments describe an unphysical state: smallest symplectic eigenvalue {} < 1/2",
                spec.nu_minus
            )));
        }
        Ok(state)
    }
}

/// Steady-state source moments produced by feeding the given thermal inputs
/// through the converter.
pub fn source_moments<T: Real>(
    c: &IoCoefficients<T>,
    occ: &ThermalOccupancies<T>,
) -> Result<JointSourceState<T>> {
    occ.validate()?;
    let one = T::one();
    let n_w = c.a_w.norm_sqr() * occ.n_w_t
        + c.b.norm_sqr() * (occ.n_o_t + one)
        + c.c_w.norm_sqr() * occ.n_b_t
        + c.d_w.norm_sqr() * (occ.n_o_int + one)
        + c.e_w_coef.norm_sqr() * occ.n_w_int;
    let n_o = c.b.norm_sqr() * (occ.n_w_t + one)
        + c.a_o.norm_sqr() * occ.n_o_t
        + c.c_o.norm_sqr() * (occ.n_b_t + one)
        + c.d_o.norm_sqr() * (occ.n_w_int + one)
        + c.e_o_coef.norm_sqr() * occ.n_o_int;
    let cross = c.a_w * c.b.conj() * (occ.n_w_t + one)
        - c.b * c.a_o * occ.n_o_t
        + c.c_w * c.c_o * (occ.n_b_t + one)
        - c.d_w * c.e_o_coef * occ.n_o_int
        - c.e_w_coef * c.d_o * (occ.n_w_int + one);
    JointSourceState::from_occupations(n_w, n_o, cross)
}

/// Symplectic invariants of the source state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum<T> {
    /// Smaller symplectic eigenvalue of the state.
    pub nu_minus: T,
    /// Larger symplectic eigenvalue of the state.
    pub nu_plus: T,
    /// Smaller symplectic eigenvalue of the partial transpose; below 1/2
    /// certifies entanglement.
    pub zeta_minus: T,
}

/// Symplectic eigenvalues of the state and of its partial transpose.
///
/// Uses factored closed forms that stay accurate where the textbook
/// discriminant expressions cancel catastrophically (near-pure states and
/// near the separability border):
///
/// ```text
/// nu+-   from  S_minus = v11^2 + v33^2 - 2 v13^2
/// zeta-  from  S_plus  = v11^2 + v33^2 + 2 v13^2
/// ```
///
/// with the identities `zeta+ zeta- = nu+ nu- = |det V|` used to recover the
/// small eigenvalues via division instead of subtraction.
pub fn symplectic_spectrum<T: Real>(s: &JointSourceState<T>) -> Result<SymplecticSpectrum<T>> {
    let (v11, v33, v13) = (s.v11, s.v33, s.v13);
    let two = lit::<T>(2.0);
    let dt = v11 * v33 - v13 * v13;
    let s_plus = v11 * v11 + v33 * v33 + two * v13 * v13;
    let s_minus = v11 * v11 + v33 * v33 - two * v13 * v13;

    // rad_plus = S_plus^2 - 4 dt^2 in a cancellation-free factored form.
    let sum = v11 + v33;
    let diff = v11 - v33;
    let rad_plus = sum * sum * (diff * diff + lit::<T>(4.0) * v13 * v13);
    let mut rad_minus = diff * diff * (sum * sum - lit::<T>(4.0) * v13 * v13);
    let scale = s_minus * s_minus;
    if rad_minus < T::zero() {
        if rad_minus < -lit::<T>(1e-9) * scale {
            return Err(Error::InternalConsistency(format!(
                "symplectic discriminant turned negative ({rad_minus}) for variances \
                 ({v11}, {v33}, {v13})"
            )));
        }
        rad_minus = T::zero();
    }

    let sqrt2 = lit::<T>(2.0).sqrt();
    let zeta_minus = sqrt2 * dt.abs() / (s_plus + rad_plus.sqrt()).sqrt();
    let nu_minus = sqrt2 * dt.abs() / (s_minus + rad_minus.sqrt()).sqrt();
    let nu_plus = ((s_minus + rad_minus.sqrt()) / two).sqrt();
    Ok(SymplecticSpectrum {
        nu_minus,
        nu_plus,
        zeta_minus,
    })
}

/// Logarithmic negativity `E_N = max[0, -log2(2 zeta_minus)]` in bits.
pub fn log_negativity<T: Real>(s: &JointSourceState<T>) -> Result<T> {
    let spec = symplectic_spectrum(s)?;
    let two = lit::<T>(2.0);
    let e = -(two * spec.zeta_minus).log2();
    Ok(e.max(T::zero()))
}

/// Coherent information from the microwave mode to the optical mode
/// (forward direction): `I = h(v11) - h(nu_minus) - h(nu_plus)`.
pub fn coherent_information<T: Real>(s: &JointSourceState<T>) -> Result<T> {
    let spec = symplectic_spectrum(s)?;
    Ok(entropy_h(s.v11)? - entropy_h(spec.nu_minus)? - entropy_h(spec.nu_plus)?)
}

/// Reverse coherent information: `I_rev = h(v33) - h(nu_minus) - h(nu_plus)`.
pub fn reverse_coherent_information<T: Real>(s: &JointSourceState<T>) -> Result<T> {
    let spec = symplectic_spectrum(s)?;
    Ok(entropy_h(s.v33)? - entropy_h(spec.nu_minus)? - entropy_h(spec.nu_plus)?)
}

/// Which mode is measured in the discord computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscordDirection {
    /// Discord of the microwave mode given a measurement on the optical
    /// mode.
    WGivenO,
    /// Discord of the optical mode given a measurement on the microwave
    /// mode.
    OGivenW,
}

/// Gaussian quantum discord of the two-mode state.
///
/// For these standard-form states the optimum heterodyne measurement gives
/// the closed form
///
/// ```text
/// D(w|o) = h(v33) - h(nu_minus) - h(nu_plus) + h(v11 - v13^2/(v33 + 1))
/// ```
///
/// (and the mirror image for the other direction). The conditional-variance
/// argument `v11 - v13^2/(v33 + 1)` is always a valid eigenvalue, so the
/// expression is finite for every physical input, including `v33 = 1`.
pub fn discord<T: Real>(s: &JointSourceState<T>, direction: DiscordDirection) -> Result<T> {
    let spec = symplectic_spectrum(s)?;
    let (v_meas, v_kept) = match direction {
        DiscordDirection::WGivenO => (s.v33, s.v11),
        DiscordDirection::OGivenW => (s.v11, s.v33),
    };
    let conditional = v_kept - s.v13 * s.v13 / (v_meas + T::one());
    Ok(entropy_h(v_meas)? - entropy_h(spec.nu_minus)? - entropy_h(spec.nu_plus)?
        + entropy_h(conditional)?)
}

/// Normalized cross-correlation strength
/// `E = |<d_w d_o>| / sqrt(n_w n_o)`; values above 1 are impossible for any
/// separable (classically correlated) state.
pub fn entanglement_metric<T: Real>(s: &JointSourceState<T>) -> Result<T> {
    let prod = s.n_w * s.n_o;
    if prod > T::zero() {
        return Ok(s.cross.norm() / prod.sqrt());
    }
    if s.cross.norm() == T::zero() {
        return Ok(T::zero());
    }
    Err(Error::ImpossibleState(format!(
        "nonzero cross correlation {} with a zero-occupation mode (n_w = {}, n_o = {})",
        s.cross, s.n_w, s.n_o
    )))
}

/// Per-photon (normalized by microwave occupation) copies of the additive
/// measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerPhotonMeasures<T> {
    pub e_n: T,
    pub i_fwd: T,
    pub i_rev: T,
    pub d_w_given_o: T,
    pub d_o_given_w: T,
}

/// Full set of source quality measures at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceMeasures<T> {
    /// Normalized cross-correlation strength (dimensionless; > 1 certifies
    /// entanglement).
    pub metric_e: T,
    /// Logarithmic negativity in bits.
    pub e_n: T,
    /// Forward coherent information in bits.
    pub i_fwd: T,
    /// Reverse coherent information in bits.
    pub i_rev: T,
    /// Discord, optical mode measured, in bits.
    pub d_w_given_o: T,
    /// Discord, microwave mode measured, in bits.
    pub d_o_given_w: T,
    /// Smallest partial-transpose symplectic eigenvalue.
    pub zeta_minus: T,
    /// Smaller symplectic eigenvalue of the state.
    pub nu_minus: T,
    /// Larger symplectic eigenvalue of the state.
    pub nu_plus: T,
    /// Measures divided by the microwave occupation, when that is positive.
    pub per_photon: Option<PerPhotonMeasures<T>>,
}

/// Compute every quality measure of the source state.
pub fn source_measures<T: Real>(s: &JointSourceState<T>) -> Result<SourceMeasures<T>> {
    let spec = symplectic_spectrum(s)?;
    let metric_e = entanglement_metric(s)?;
    let e_n = log_negativity(s)?;
    let i_fwd = coherent_information(s)?;
    let i_rev = reverse_coherent_information(s)?;
    let d_w_given_o = discord(s, DiscordDirection::WGivenO)?;
    let d_o_given_w = discord(s, DiscordDirection::OGivenW)?;
    let per_photon = if s.n_w > T::zero() {
        Some(PerPhotonMeasures {
            e_n: e_n / s.n_w,
            i_fwd: i_fwd / s.n_w,
            i_rev: i_rev / s.n_w,
            d_w_given_o: d_w_given_o / s.n_w,
            d_o_given_w: d_o_given_w / s.n_w,
        })
    } else {
        None
    };
    Ok(SourceMeasures {
        metric_e,
        e_n,
        i_fwd,
        i_rev,
        d_w_given_o,
        d_o_given_w,
        zeta_minus: spec.zeta_minus,
        nu_minus: spec.nu_minus,
        nu_plus: spec.nu_plus,
        per_photon,
    })
}

/// Per-photon measures, requiring a strictly positive microwave occupation.
pub fn normalized_measures<T: Real>(s: &JointSourceState<T>) -> Result<PerPhotonMeasures<T>> {
    if !(s.n_w > T::zero()) {
        return Err(Error::UndefinedNormalization(format!(
            "per-photon measures require a positive microwave occupation, got {}",
            s.n_w
        )));
    }
    let m = source_measures(s)?;
    Ok(m.per_photon.expect("positive occupation implies Some"))
}
