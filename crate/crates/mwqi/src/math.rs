//! Special functions and small solvers needed by the detection statistics
//! and the stability analysis.
//!
//! The complementary error function is hand-rolled for two reasons: it must
//! be generic over the scalar type, and it must be available in log space so
//! error probabilities down to 10^-12000 (large mode counts) stay
//! representable. A power series covers the small-argument range and a
//! modified-Lentz continued fraction covers the tail.

use crate::real::{lit, Real};

/// Branch point between the series and continued-fraction evaluations.
const SEAM: f64 = 1.5;

/// erf(x) for 0 <= x < SEAM via the all-positive-terms series
/// erf(x) = (2/sqrt(pi)) e^{-x^2} sum_{n>=0} (2x^2)^n x / (1*3*...*(2n+1)).
fn erf_series<T: Real>(x: T) -> T {
    let two = lit::<T>(2.0);
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let eps = T::epsilon();
    let mut n: u32 = 1;
    while n < 500 {
        term = term * two * x2 / lit::<T>(2.0 * f64::from(n) + 1.0);
        sum = sum + term;
        if term <= sum * eps {
            break;
        }
        n += 1;
    }
    two / T::PI().sqrt() * (-x2).exp() * sum
}

/// Modified-Lentz evaluation of f(x) = x + K_{n>=1}( (n/2) / x ), the
/// continued fraction satisfying erfc(x) = e^{-x^2} / (sqrt(pi) * f(x)).
fn erfc_tail_fraction<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value();
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for n in 1..=1000u32 {
        let a = lit::<T>(f64::from(n) / 2.0);
        d = x + a * d;
        if d == T::zero() {
            d = tiny;
        }
        c = x + a / c;
        if c == T::zero() {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    f
}

/// Complementary error function erfc(x) = 1 - erf(x), valid for all finite x.
///
/// Underflows to zero for arguments beyond the scalar type's range (f64:
/// x ≳ 26.6); use [`ln_erfc`] there.
pub fn erfc<T: Real>(x: T) -> T {
    if x < T::zero() {
        return lit::<T>(2.0) - erfc(-x);
    }
    if x < lit(SEAM) {
        T::one() - erf_series(x)
    } else {
        (-x * x).exp() / (T::PI().sqrt() * erfc_tail_fraction(x))
    }
}

/// Natural logarithm of erfc(x), evaluated without underflow for large x.
pub fn ln_erfc<T: Real>(x: T) -> T {
    if x < lit(SEAM) {
        // erfc >= erfc(SEAM) ~ 0.034 on this branch: the direct log is exact.
        erfc(x).ln()
    } else {
        -x * x - T::PI().sqrt().ln() - erfc_tail_fraction(x).ln()
    }
}

/// log10( erfc(x) / 2 ), the log-space error probability for threshold
/// detection with symmetric error rates.
pub fn log10_half_erfc<T: Real>(x: T) -> T {
    (ln_erfc(x) - T::LN_2()) / T::LN_10()
}

/// Roots of a monic cubic with real coefficients,
/// lambda^3 + a2*lambda^2 + a1*lambda + a0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots<T> {
    /// Three real roots (possibly repeated).
    ThreeReal([T; 3]),
    /// One real root plus a complex-conjugate pair.
    OneReal {
        /// The real root.
        real_root: T,
        /// Real part of the conjugate pair.
        pair_real: T,
        /// |imaginary part| of the conjugate pair.
        pair_imag: T,
    },
}

impl<T: Real> CubicRoots<T> {
    /// Largest real part over all three roots.
    pub fn max_real_part(&self) -> T {
        match *self {
            CubicRoots::ThreeReal([a, b, c]) => a.max(b).max(c),
            CubicRoots::OneReal {
                real_root,
                pair_real,
                ..
            } => real_root.max(pair_real),
        }
    }

    /// Real parts of the three roots (conjugate pair listed twice).
    pub fn real_parts(&self) -> [T; 3] {
        match *self {
            CubicRoots::ThreeReal(r) => r,
            CubicRoots::OneReal {
                real_root,
                pair_real,
                ..
            } => [real_root, pair_real, pair_real],
        }
    }
}

/// Solve the monic cubic lambda^3 + a2*lambda^2 + a1*lambda + a0 = 0.
///
/// Uses the trigonometric form when all roots are real and a
/// cancellation-avoiding Cardano form otherwise.
pub fn solve_monic_cubic<T: Real>(a2: T, a1: T, a0: T) -> CubicRoots<T> {
    let third = T::one() / lit::<T>(3.0);
    let half = lit::<T>(0.5);
    let shift = a2 * third;
    // Depressed cubic t^3 + p t + q with lambda = t - a2/3.
    let p = a1 - a2 * a2 * third;
    let q = a2 * (lit::<T>(2.0) * a2 * a2 - lit::<T>(9.0) * a1) / lit::<T>(27.0) + a0;
    let half_q = q * half;
    let disc = half_q * half_q + p * p * p / lit::<T>(27.0);
    if disc > T::zero() {
        // One real root. Pick the cube-root branch that avoids subtracting
        // nearly equal quantities.
        let s = disc.sqrt();
        let u3 = if q >= T::zero() {
            -half_q - s
        } else {
            -half_q + s
        };
        let u = u3.cbrt();
        let v = if u == T::zero() {
            T::zero()
        } else {
            -p * third / u
        };
        let t1 = u + v;
        CubicRoots::OneReal {
            real_root: t1 - shift,
            pair_real: -t1 * half - shift,
            pair_imag: (u - v).abs() * lit::<T>(3.0).sqrt() * half,
        }
    } else {
        // Three real roots (disc <= 0 forces p <= 0).
        let mp3 = (-p * third).max(T::zero());
        let m = lit::<T>(2.0) * mp3.sqrt();
        if m == T::zero() {
            let r = -shift;
            return CubicRoots::ThreeReal([r, r, r]);
        }
        let cos3t = (lit::<T>(3.0) * q / (p * m)).max(-T::one()).min(T::one());
        let theta = cos3t.acos() * third;
        let two_pi_3 = lit::<T>(2.0) * T::PI() * third;
        CubicRoots::ThreeReal([
            m * theta.cos() - shift,
            m * (theta - two_pi_3).cos() - shift,
            m * (theta + two_pi_3).cos() - shift,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    /// High-precision reference values (50-digit arithmetic, frozen).
    #[test]
    fn erfc_linear_range_reference_values() {
        let cases = [
            (0.3, 0.6713732405408725723611),
            (1.0, 0.1572992070502851306588),
            (1.4999, 0.03390674833770473068845),
            (1.5001, 0.03388296227958250080625),
            (2.0, 0.004677734981047265837931),
            (3.0, 2.209049699858544137278e-5),
            (5.0, 1.537459794428034850188e-12),
            (10.0, 2.088487583762544757001e-45),
        ];
        for (x, want) in cases {
            let got = erfc::<f64>(x);
            assert!(
                rel_close(got, want, 1e-13),
                "erfc({x}) = {got}, want {want}"
            );
        }
        // Negative arguments by reflection.
        assert!(rel_close(erfc::<f64>(-1.0), 2.0 - 0.1572992070502851306588, 1e-13));
        assert_eq!(erfc::<f64>(0.0), 1.0);
    }

    #[test]
    fn ln_erfc_log_range_reference_values() {
        let cases = [
            (0.3, -0.3984300514400852896509),
            (1.0, -1.849605509933248248576),
            (1.4999, -3.384141218397752248961),
            (1.5001, -3.384842978558159802784),
            (2.0, -5.364941264616637574468),
            (3.0, -10.72036304198111256773),
            (5.0, -27.20088954553743442244),
            (10.0, -102.8798890248448885748),
            (27.0, -732.8688865078974109764),
            (100.0, -10005.17758512266433257),
            (166.9, -27861.29977772249272374),
        ];
        for (x, want) in cases {
            let got = ln_erfc::<f64>(x);
            assert!(
                rel_close(got, want, 1e-12),
                "ln_erfc({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn erfc_branches_agree_at_the_seam() {
        // Evaluate both branches exactly at the seam point: they must agree
        // far more tightly than any downstream tolerance.
        let x = SEAM;
        let series = 1.0 - erf_series::<f64>(x);
        let tail = (-x * x).exp() / (std::f64::consts::PI.sqrt() * erfc_tail_fraction(x));
        assert!(rel_close(series, tail, 1e-13), "seam mismatch: {series} vs {tail}");
    }

    #[test]
    fn log10_half_erfc_matches_reference() {
        // log10(erfc(1)/2), frozen from 50-digit arithmetic.
        let got = log10_half_erfc::<f64>(1.0);
        assert!(rel_close(got, -1.104303462325841145254, 1e-13), "{got}");
        // x = 0 => erfc = 1 => log10(1/2).
        assert!(rel_close(log10_half_erfc::<f64>(0.0), (0.5f64).log10(), 1e-14));
    }

    #[test]
    fn erfc_f32_smoke() {
        let got = erfc::<f32>(1.0f32);
        assert!((got - 0.157_299_2f32).abs() < 1e-6);
        let ln = ln_erfc::<f32>(5.0f32);
        assert!((ln - (-27.200_89f32)).abs() < 1e-3);
    }

    #[test]
    fn cubic_three_real_roots() {
        // (x+1)(x+2)(x+3) = x^3 + 6x^2 + 11x + 6
        let roots = solve_monic_cubic::<f64>(6.0, 11.0, 6.0);
        let mut parts = roots.real_parts();
        parts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((parts[0] + 3.0).abs() < 1e-12);
        assert!((parts[1] + 2.0).abs() < 1e-12);
        assert!((parts[2] + 1.0).abs() < 1e-12);
        assert!((roots.max_real_part() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_complex_pair() {
        // (x+1)(x^2+x+1) = x^3 + 2x^2 + 2x + 1; pair has real part -1/2.
        let roots = solve_monic_cubic::<f64>(2.0, 2.0, 1.0);
        match roots {
            CubicRoots::OneReal {
                real_root,
                pair_real,
                pair_imag,
            } => {
                assert!((real_root + 1.0).abs() < 1e-12);
                assert!((pair_real + 0.5).abs() < 1e-12);
                assert!((pair_imag - 0.75f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("expected complex pair, got {other:?}"),
        }
        assert!((roots.max_real_part() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn cubic_triple_root() {
        // (x+2)^3 = x^3 + 6x^2 + 12x + 8
        let roots = solve_monic_cubic::<f64>(6.0, 12.0, 8.0);
        for r in roots.real_parts() {
            assert!((r + 2.0).abs() < 1e-5, "triple root off: {r}");
        }
    }

    #[test]
    fn cubic_zero_constant_term_has_zero_root() {
        // a0 = 0 => lambda = 0 is a root; remaining quadratic stable.
        let roots = solve_monic_cubic::<f64>(3.0, 2.0, 0.0);
        let max = roots.max_real_part();
        assert!(max.abs() < 1e-12, "expected marginal root, got {max}");
    }
}
