//! Independent verification oracle for Gaussian moment propagation.
//!
//! Everything in this module recomputes quantities from first principles —
//! a table of second moments pushed through explicit linear mode maps via
//! Wick factorization, and symplectic spectra extracted numerically from
//! covariance matrices — so the closed forms elsewhere in the crate can be
//! checked against an implementation that shares none of their algebra.
//!
//! The propagation works on annihilation-operator moments
//! `N_ij = <a_i^dag a_j>` (Hermitian) and `M_ij = <a_i a_j>` (symmetric)
//! under maps of the form `b_k = sum_i alpha_ki a_i + sum_i beta_ki a_i^dag`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Relative tolerance for the commutator (Gram) checks on a linear map.
const GRAM_EPS: f64 = 1e-11;

/// Table of all second moments of a zero-mean multimode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentTable<T> {
    labels: Vec<String>,
    /// Row-major `N_ij = <a_i^dag a_j>`.
    nn: Vec<Complex<T>>,
    /// Row-major `M_ij = <a_i a_j>`.
    mm: Vec<Complex<T>>,
}

impl<T: Real> SecondMomentTable<T> {
    /// Independent thermal modes with the given labels and occupancies.
    pub fn thermal(modes: &[(&str, T)]) -> Result<Self> {
        let n = modes.len();
        let mut labels = Vec::with_capacity(n);
        for (label, occ) in modes {
            if !occ.is_finite() || *occ < T::zero() {
                return Err(Error::Domain(format!(
                    "thermal occupancy of mode '{label}' must be finite and non-negative, \
                     got {occ}"
                )));
            }
            if labels.contains(&label.to_string()) {
                return Err(Error::Domain(format!("duplicate mode label '{label}'")));
            }
            labels.push(label.to_string());
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut nn = vec![zero; n * n];
        let mm = vec![zero; n * n];
        for (i, (_, occ)) in modes.iter().enumerate() {
            nn[i * n + i] = Complex::new(*occ, T::zero());
        }
        Ok(SecondMomentTable { labels, nn, mm })
    }

    /// Number of modes.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the table holds no modes.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The mode labels, in storage order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of a mode by label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Domain(format!("no mode labelled '{label}' in the table")))
    }

    /// Photon occupation of a labelled mode, `Re N_ii`.
    pub fn occupation(&self, label: &str) -> Result<T> {
        let i = self.index_of(label)?;
        Ok(self.nn[i * self.len() + i].re)
    }

    /// `N_ij = <a_i^dag a_j>`.
    pub fn n_entry(&self, i: usize, j: usize) -> Complex<T> {
        self.nn[i * self.len() + j]
    }

    /// `M_ij = <a_i a_j>`.
    pub fn m_entry(&self, i: usize, j: usize) -> Complex<T> {
        self.mm[i * self.len() + j]
    }
}

/// One term of an output mode: `coef * input` or `coef * input^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapLeg<T> {
    /// Label of the input mode this leg draws from.
    pub input: String,
    /// Complex amplitude of the leg.
    pub coef: Complex<T>,
    /// Whether the leg acts on the daggered input operator.
    pub conjugated: bool,
}

impl<T> MapLeg<T> {
    pub fn new(input: &str, coef: Complex<T>, conjugated: bool) -> Self {
        MapLeg {
            input: input.to_string(),
            coef,
            conjugated,
        }
    }
}

/// One output mode of a linear map, as a sum of legs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputMode<T> {
    /// Label of the output mode.
    pub label: String,
    /// The legs whose sum defines the output operator.
    pub legs: Vec<MapLeg<T>>,
}

impl<T: Real> OutputMode<T> {
    pub fn new(label: &str, legs: Vec<MapLeg<T>>) -> Self {
        OutputMode {
            label: label.to_string(),
            legs,
        }
    }

    /// Pass one input through unchanged, keeping its label.
    pub fn identity(label: &str) -> Self {
        OutputMode {
            label: label.to_string(),
            legs: vec![MapLeg::new(
                label,
                Complex::new(T::one(), T::zero()),
                false,
            )],
        }
    }
}

/// Push the second-moment table through a linear mode map.
///
/// Inputs not referenced by any output are traced out. The map must
/// preserve bosonic commutators on its outputs
/// (`alpha alpha^H - beta beta^H = I`, `alpha beta^T - beta alpha^T = 0`);
/// violations are rejected rather than propagated.
pub fn apply_linear_map<T: Real>(
    table: &SecondMomentTable<T>,
    outputs: &[OutputMode<T>],
) -> Result<SecondMomentTable<T>> {
    let n_in = table.len();
    let n_out = outputs.len();
    if n_out == 0 {
        return Err(Error::Domain("a linear map needs at least one output".into()));
    }
    let zero = Complex::new(T::zero(), T::zero());

    // Assemble alpha (plain legs) and beta (daggered legs), n_out x n_in.
    let mut alpha = vec![zero; n_out * n_in];
    let mut beta = vec![zero; n_out * n_in];
    let mut labels = Vec::with_capacity(n_out);
    for (k, out) in outputs.iter().enumerate() {
        if labels.contains(&out.label) {
            return Err(Error::Domain(format!(
                "duplicate output label '{}'",
                out.label
            )));
        }
        labels.push(out.label.clone());
        for leg in &out.legs {
            let i = table.index_of(&leg.input)?;
            if !leg.coef.re.is_finite() || !leg.coef.im.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite coefficient on leg '{}' of output '{}'",
                    leg.input, out.label
                )));
            }
            if leg.conjugated {
                beta[k * n_in + i] = beta[k * n_in + i] + leg.coef;
            } else {
                alpha[k * n_in + i] = alpha[k * n_in + i] + leg.coef;
            }
        }
    }

    // Commutator preservation. Scale the tolerance by the largest row
    // magnitude so near-boundary (large-coefficient) maps are judged
    // relatively.
    let mut scale = T::one();
    for k in 0..n_out {
        let mut row = T::zero();
        for i in 0..n_in {
            row = row + alpha[k * n_in + i].norm_sqr() + beta[k * n_in + i].norm_sqr();
        }
        scale = scale.max(row);
    }
    let tol = lit::<T>(GRAM_EPS) * scale;
    let mut worst = T::zero();
    for k in 0..n_out {
        for l in 0..n_out {
            let mut comm = zero; // [b_k, b_l^dag] - delta_kl
            let mut anti = zero; // [b_k, b_l]
            for i in 0..n_in {
                let ak = alpha[k * n_in + i];
                let al = alpha[l * n_in + i];
                let bk = beta[k * n_in + i];
                let bl = beta[l * n_in + i];
                comm = comm + ak * al.conj() - bk * bl.conj();
                anti = anti + ak * bl - bk * al;
            }
            if k == l {
                comm = comm - Complex::new(T::one(), T::zero());
            }
            worst = worst.max(comm.norm()).max(anti.norm());
        }
    }
    if worst > tol {
        return Err(Error::ContractViolation(format!(
            "linear map does not preserve bosonic commutators (worst residual {worst}, \
             tolerance {tol})"
        )));
    }

    // Wick-propagate the moments:
    //   N'_kl = sum_ij  conj(a_ki) N_ij a_lj + conj(a_ki) conj(M_ij) b_lj
    //         + conj(b_ki) M_ij a_lj + conj(b_ki) (N^T + I)_ij b_lj
    //   M'_kl = sum_ij  a_ki M_ij a_lj + a_ki (N^T + I)_ij b_lj
    //         + b_ki N_ij a_lj + b_ki conj(M_ij) b_lj
    let one_c = Complex::new(T::one(), T::zero());
    let mut nn = vec![zero; n_out * n_out];
    let mut mm = vec![zero; n_out * n_out];
    for k in 0..n_out {
        for l in 0..n_out {
            let mut n_acc = zero;
            let mut m_acc = zero;
            for i in 0..n_in {
                let aki = alpha[k * n_in + i];
                let bki = beta[k * n_in + i];
                for j in 0..n_in {
                    let alj = alpha[l * n_in + j];
                    let blj = beta[l * n_in + j];
                    let n_ij = table.nn[i * n_in + j];
                    let m_ij = table.mm[i * n_in + j];
                    let nt_plus_i = table.nn[j * n_in + i]
                        + if i == j { one_c } else { zero };
                    n_acc = n_acc
                        + aki.conj() * n_ij * alj
                        + aki.conj() * m_ij.conj() * blj
                        + bki.conj() * m_ij * alj
                        + bki.conj() * nt_plus_i * blj;
                    m_acc = m_acc
                        + aki * m_ij * alj
                        + aki * nt_plus_i * blj
                        + bki * n_ij * alj
                        + bki * m_ij.conj() * blj;
                }
            }
            nn[k * n_out + l] = n_acc;
            mm[k * n_out + l] = m_acc;
        }
    }

    // Enforce the exact structural symmetries against roundoff.
    let half = lit::<T>(0.5);
    for k in 0..n_out {
        for l in k..n_out {
            let n_kl = nn[k * n_out + l];
            let n_lk = nn[l * n_out + k];
            let herm = (n_kl + n_lk.conj()) * Complex::new(half, T::zero());
            nn[k * n_out + l] = herm;
            nn[l * n_out + k] = herm.conj();
            let m_kl = mm[k * n_out + l];
            let m_lk = mm[l * n_out + k];
            let sym = (m_kl + m_lk) * Complex::new(half, T::zero());
            mm[k * n_out + l] = sym;
            mm[l * n_out + k] = sym;
        }
    }

    Ok(SecondMomentTable { labels, nn, mm })
}

/// Mean and variance of a weighted sum of photon-number operators,
/// `sum_i w_i a_i^dag a_i`, evaluated by Wick factorization:
///
/// ```text
/// mean = sum_i w_i N_ii
/// var  = sum_ij w_i w_j (|M_ij|^2 + |N_ij|^2) + sum_i w_i^2 N_ii
/// ```
///
/// The table is first checked to describe a physical state (numeric
/// symplectic spectrum of its covariance matrix above the vacuum floor).
pub fn wick_number_moments<T: Real>(table: &SecondMomentTable<T>, weights: &[T]) -> Result<(T, T)> {
    let n = table.len();
    if weights.len() != n {
        return Err(Error::Domain(format!(
            "{} weights supplied for {n} modes",
            weights.len()
        )));
    }
    let cm = covariance_matrix(table);
    let spectrum = symplectic_spectrum_numeric(&cm, n, None)?;
    let nu_min = spectrum[0];
    let nu_max = spectrum[n - 1];
    let half = lit::<T>(0.5);
    if nu_min < half - lit::<T>(1e-9) * (T::one() + nu_max) {
        return Err(Error::Domain(format!(
            "moment table does not describe a physical state: smallest symplectic eigenvalue \
             {nu_min} < 1/2"
        )));
    }
    let mut mean = T::zero();
    let mut var = T::zero();
    for i in 0..n {
        mean = mean + weights[i] * table.nn[i * n + i].re;
        var = var + weights[i] * weights[i] * table.nn[i * n + i].re;
        for j in 0..n {
            var = var
                + weights[i]
                    * weights[j]
                    * (table.mm[i * n + j].norm_sqr() + table.nn[i * n + j].norm_sqr());
        }
    }
    Ok((mean, var))
}

/// Covariance matrix of the state in quadrature ordering
/// `(X_1, Y_1, X_2, Y_2, ...)` with `X = (a + a^dag)/sqrt(2)` and vacuum
/// variance 1/2. Row-major `2n x 2n`.
pub fn covariance_matrix<T: Real>(table: &SecondMomentTable<T>) -> Vec<T> {
    let n = table.len();
    let d = 2 * n;
    let half = lit::<T>(0.5);
    let mut cm = vec![T::zero(); d * d];
    for i in 0..n {
        for j in 0..n {
            let n_ij = table.nn[i * n + j];
            let m_ij = table.mm[i * n + j];
            let (xx, yy, xy, yx) = if i == j {
                (
                    n_ij.re + half + m_ij.re,
                    n_ij.re + half - m_ij.re,
                    m_ij.im,
                    m_ij.im,
                )
            } else {
                (
                    m_ij.re + n_ij.re,
                    n_ij.re - m_ij.re,
                    m_ij.im + n_ij.im,
                    m_ij.im - n_ij.im,
                )
            };
            cm[(2 * i) * d + 2 * j] = xx;
            cm[(2 * i + 1) * d + 2 * j + 1] = yy;
            cm[(2 * i) * d + 2 * j + 1] = xy;
            cm[(2 * i + 1) * d + 2 * j] = yx;
        }
    }
    cm
}

/// Symplectic spectrum of a covariance matrix, computed numerically.
///
/// `cm` is row-major `2*n_modes x 2*n_modes` in `(X_1, Y_1, ...)` ordering.
/// With `pt_mode = Some(k)` the spectrum of the partial transpose with
/// respect to mode `k` is returned instead. The result is sorted ascending,
/// one eigenvalue per mode.
///
/// Method: form `W = sqrt(V)` via a symmetric eigendecomposition; the
/// antisymmetric matrix `K = W Omega W` has singular values equal to the
/// symplectic eigenvalues (each twice), read off as eigenvalues of the
/// symmetric embedding `[[0, K], [K^T, 0]]`.
pub fn symplectic_spectrum_numeric<T: Real>(
    cm: &[T],
    n_modes: usize,
    pt_mode: Option<usize>,
) -> Result<Vec<T>> {
    let d = 2 * n_modes;
    if n_modes == 0 || cm.len() != d * d {
        return Err(Error::Domain(format!(
            "covariance matrix must be 2n x 2n for n = {n_modes} modes, got {} entries",
            cm.len()
        )));
    }
    let mut scale = T::one();
    for v in cm {
        if !v.is_finite() {
            return Err(Error::Domain("covariance matrix has non-finite entries".into()));
        }
        scale = scale.max(v.abs());
    }
    for r in 0..d {
        for c in (r + 1)..d {
            if (cm[r * d + c] - cm[c * d + r]).abs() > lit::<T>(1e-9) * scale {
                return Err(Error::Domain(format!(
                    "covariance matrix is not symmetric at ({r}, {c}): {} vs {}",
                    cm[r * d + c],
                    cm[c * d + r]
                )));
            }
        }
    }

    let mut v = cm.to_vec();
    // Exact symmetrization so the eigensolver sees a symmetric input.
    for r in 0..d {
        for c in (r + 1)..d {
            let avg = (v[r * d + c] + v[c * d + r]) * lit::<T>(0.5);
            v[r * d + c] = avg;
            v[c * d + r] = avg;
        }
    }

    if let Some(k) = pt_mode {
        if k >= n_modes {
            return Err(Error::Domain(format!(
                "partial-transpose mode index {k} out of range for {n_modes} modes"
            )));
        }
        // Partial transpose flips the momentum quadrature of mode k.
        let row = 2 * k + 1;
        for c in 0..d {
            v[row * d + c] = -v[row * d + c];
        }
        for r in 0..d {
            v[r * d + row] = -v[r * d + row];
        }
    }

    let w = sqrtm_psd(&v, d)?;

    // K = W Omega W with Omega = direct sum of [[0, 1], [-1, 0]].
    // (W Omega)[i][2m] = -W[i][2m+1], (W Omega)[i][2m+1] = W[i][2m].
    let mut womega = vec![T::zero(); d * d];
    for i in 0..d {
        for m in 0..n_modes {
            womega[i * d + 2 * m] = -w[i * d + 2 * m + 1];
            womega[i * d + 2 * m + 1] = w[i * d + 2 * m];
        }
    }
    let k_mat = matmul(&womega, &w, d);
    // K is antisymmetric with eigenvalues +-i nu, so its singular values
    // are the nu, each twice. Embedding K in the symmetric block matrix
    // [[0, K], [K^T, 0]] exposes them as eigenvalues +-nu without squaring
    // K, which would double the condition number and cost relative accuracy
    // on the small eigenvalues whenever the large ones dominate the norm.
    let dd = 2 * d;
    let mut e = vec![T::zero(); dd * dd];
    for r in 0..d {
        for c in 0..d {
            e[r * dd + d + c] = k_mat[r * d + c];
            e[(d + r) * dd + c] = k_mat[c * d + r];
        }
    }
    let (evals, _) = jacobi_eigen(&e, dd)?;
    let mut mags: Vec<T> = evals.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    // Each symplectic eigenvalue appears four times: +-nu, each doubled.
    let quarter = lit::<T>(0.25);
    let mut spectrum = Vec::with_capacity(n_modes);
    for m in 0..n_modes {
        let chunk = &mags[4 * m..4 * m + 4];
        spectrum.push((chunk[0] + chunk[1] + chunk[2] + chunk[3]) * quarter);
    }
    Ok(spectrum)
}

/// Square root of a symmetric positive-semidefinite matrix via Jacobi
/// eigendecomposition; tiny negative eigenvalues from roundoff are clamped.
fn sqrtm_psd<T: Real>(a: &[T], n: usize) -> Result<Vec<T>> {
    let (evals, evecs) = jacobi_eigen(a, n)?;
    let mut max_abs = T::zero();
    for l in &evals {
        max_abs = max_abs.max(l.abs());
    }
    let mut roots = Vec::with_capacity(n);
    for l in &evals {
        if *l < -lit::<T>(1e-9) * (T::one() + max_abs) {
            return Err(Error::Domain(format!(
                "matrix is not positive semidefinite (eigenvalue {l})"
            )));
        }
        roots.push(l.max(T::zero()).sqrt());
    }
    // W = Q sqrt(D) Q^T with eigenvector k stored as column k of Q.
    let mut w = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = T::zero();
            for (k, r) in roots.iter().enumerate() {
                acc = acc + evecs[i * n + k] * *r * evecs[j * n + k];
            }
            w[i * n + j] = acc;
            w[j * n + i] = acc;
        }
    }
    Ok(w)
}

/// Dense row-major matrix product of two n x n matrices.
fn matmul<T: Real>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    out
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvector `k` stored as
/// column `k` of the row-major `n x n` eigenvector matrix, so
/// `A = Q D Q^T`.
fn jacobi_eigen<T: Real>(a: &[T], n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut m = a.to_vec();
    let mut q = vec![T::zero(); n * n];
    for i in 0..n {
        q[i * n + i] = T::one();
    }
    if n == 1 {
        return Ok((vec![m[0]], q));
    }
    let eps = T::epsilon();
    let two = lit::<T>(2.0);
    let mut converged = false;
    for _sweep in 0..100 {
        // Convergence: off-diagonal Frobenius norm negligible against the
        // total.
        let mut off_sq = T::zero();
        let mut tot_sq = T::zero();
        for r in 0..n {
            for c in 0..n {
                let x = m[r * n + c];
                tot_sq = tot_sq + x * x;
                if r != c {
                    off_sq = off_sq + x * x;
                }
            }
        }
        let n_t = lit::<T>(n as f64);
        if off_sq <= tot_sq * eps * eps * n_t * n_t || tot_sq == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q_idx in p + 1..n {
                let apq = m[p * n + q_idx];
                let app = m[p * n + p];
                let aqq = m[q_idx * n + q_idx];
                // Rotations smaller than roundoff accomplish nothing.
                if apq.abs() <= eps * (app.abs() + aqq.abs()) * lit::<T>(0.5) {
                    m[p * n + q_idx] = T::zero();
                    m[q_idx * n + p] = T::zero();
                    continue;
                }
                let tau = (aqq - app) / (two * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q_idx];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q_idx] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q_idx * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q_idx * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkq = q[k * n + q_idx];
                    q[k * n + p] = c * qkp - s * qkq;
                    q[k * n + q_idx] = s * qkp + c * qkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::InternalConsistency(
            "symmetric eigensolver failed to converge within 100 sweeps".into(),
        ));
    }
    let evals = (0..n).map(|i| m[i * n + i]).collect();
    Ok((evals, q))
}

/// Labels of the five bath inputs feeding one converter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConverterBathLabels {
    /// Microwave in-coupled input.
    pub microwave_in: String,
    /// Optical in-coupled input.
    pub optical_in: String,
    /// Mechanical bath.
    pub mechanical: String,
    /// Microwave intrinsic-loss bath.
    pub microwave_int: String,
    /// Optical intrinsic-loss bath.
    pub optical_int: String,
}

impl ConverterBathLabels {
    /// Standard label set with an optional prefix for disambiguating
    /// multiple converters in one table.
    pub fn with_prefix(prefix: &str) -> Self {
        ConverterBathLabels {
            microwave_in: format!("{prefix}w_in"),
            optical_in: format!("{prefix}o_in"),
            mechanical: format!("{prefix}mech"),
            microwave_int: format!("{prefix}w_int"),
            optical_int: format!("{prefix}o_int"),
        }
    }

    /// Occupancy assignment matching [`crate::params::ThermalOccupancies`].
    pub fn thermal_assignment<'a, T: Real>(
        &'a self,
        occ: &crate::params::ThermalOccupancies<T>,
    ) -> Vec<(&'a str, T)> {
        vec![
            (self.microwave_in.as_str(), occ.n_w_t),
            (self.optical_in.as_str(), occ.n_o_t),
            (self.mechanical.as_str(), occ.n_b_t),
            (self.microwave_int.as_str(), occ.n_w_int),
            (self.optical_int.as_str(), occ.n_o_int),
        ]
    }
}

/// The two output rows of the converter as explicit linear-map modes:
///
/// ```text
/// d_w = a_w w_in - b o_in^dag - c_w mech - d_w o_int^dag - e_w w_int
/// d_o = conj(b) w_in^dag + a_o o_in - c_o mech^dag + d_o w_int^dag + e_o o_int
/// ```
pub fn converter_rows<T: Real>(
    c: &crate::converter::IoCoefficients<T>,
    baths: &ConverterBathLabels,
    out_w: &str,
    out_o: &str,
) -> (OutputMode<T>, OutputMode<T>) {
    let row_w = OutputMode::new(
        out_w,
        vec![
            MapLeg::new(&baths.microwave_in, c.a_w, false),
            MapLeg::new(&baths.optical_in, -c.b, true),
            MapLeg::new(&baths.mechanical, -c.c_w, false),
            MapLeg::new(&baths.optical_int, -c.d_w, true),
            MapLeg::new(&baths.microwave_int, -c.e_w_coef, false),
        ],
    );
    let row_o = OutputMode::new(
        out_o,
        vec![
            MapLeg::new(&baths.microwave_in, c.b.conj(), true),
            MapLeg::new(&baths.optical_in, c.a_o, false),
            MapLeg::new(&baths.mechanical, -c.c_o, true),
            MapLeg::new(&baths.microwave_int, c.d_o, true),
            MapLeg::new(&baths.optical_int, c.e_o_coef, false),
        ],
    );
    (row_w, row_o)
}

/// Receiver-side conversion row: the collected microwave return enters the
/// converter's phase-conjugating leg and exits as an optical mode.
pub fn phase_conjugate_row<T: Real>(
    c: &crate::converter::IoCoefficients<T>,
    return_label: &str,
    baths: &ConverterBathLabels,
    out_label: &str,
) -> OutputMode<T> {
    OutputMode::new(
        out_label,
        vec![
            MapLeg::new(return_label, c.b, true),
            MapLeg::new(&baths.optical_in, c.a_o, false),
            MapLeg::new(&baths.mechanical, -c.c_o, true),
            MapLeg::new(&baths.microwave_int, c.d_o, true),
            MapLeg::new(&baths.optical_int, c.e_o_coef, false),
        ],
    )
}

/// Raw detection moments recomputed by the oracle chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReceiverMoments<T> {
    /// Mean photon number at the "+" beamsplitter port.
    pub mean_plus: T,
    /// Mean photon number at the "-" port.
    pub mean_minus: T,
    /// Variance of the photon-count difference.
    pub var_diff: T,
    /// Photon number of the converted return just before the beamsplitter.
    pub n_return: T,
    /// Photon number of the retained mode just before the beamsplitter.
    pub n_retained: T,
}

/// Recompute the full detection chain by explicit moment propagation:
/// transmitter conversion, target channel, receiver-side conversion of the
/// return, and the balanced beamsplitter, ending in photon-difference
/// counting.
///
/// The chain shares no algebra with the closed forms: every stage is one
/// [`apply_linear_map`] call and the final statistics come from
/// [`wick_number_moments`].
pub fn oracle_receiver_moments<T: Real>(
    c: &crate::converter::IoCoefficients<T>,
    occ: &crate::params::ThermalOccupancies<T>,
    eta: T,
    n_b: T,
    convention: crate::receiver::BackgroundConvention,
    target_present: bool,
) -> Result<OracleReceiverMoments<T>> {
    occ.validate()?;
    if !eta.is_finite() || eta < T::zero() || eta >= T::one() {
        return Err(Error::Domain(format!(
            "reflectivity eta must lie in [0, 1), got {eta}"
        )));
    }
    if !n_b.is_finite() || n_b < T::zero() {
        return Err(Error::Domain(format!(
            "background occupancy must be finite and non-negative, got {n_b}"
        )));
    }
    let one = T::one();
    // Occupancy of the bath feeding the background leg. With the target in
    // place the background reaches the receiver through the 1 - eta
    // transmission, so the exact convention inflates the bath so that the
    // received brightness stays n_b.
    let n_bg_bath = if target_present {
        match convention {
            crate::receiver::BackgroundConvention::ExactDivOneMinusEta => n_b / (one - eta),
            crate::receiver::BackgroundConvention::Approximate => n_b,
        }
    } else {
        n_b
    };

    let tx_baths = ConverterBathLabels::with_prefix("tx_");
    let rx_baths = ConverterBathLabels::with_prefix("rx_");

    // Stage 0: independent thermal inputs for both converters plus the
    // background mode.
    let mut modes = tx_baths.thermal_assignment(occ);
    modes.push(("bg", n_bg_bath));
    modes.extend(rx_baths.thermal_assignment(occ));
    let table = SecondMomentTable::thermal(&modes)?;

    // Stage 1: transmitter conversion; everything else passes through.
    let (row_w, row_o) = converter_rows(c, &tx_baths, "signal", "idler");
    let mut outputs = vec![row_w, row_o, OutputMode::identity("bg")];
    for label in [
        &rx_baths.microwave_in,
        &rx_baths.optical_in,
        &rx_baths.mechanical,
        &rx_baths.microwave_int,
        &rx_baths.optical_int,
    ] {
        outputs.push(OutputMode::identity(label));
    }
    let table = apply_linear_map(&table, &outputs)?;

    // Stage 2: target channel. Present: the return is the attenuated echo
    // plus transmitted background. Absent: the return is the bare
    // background and the signal is lost.
    let one_c = Complex::new(T::one(), T::zero());
    let return_legs = if target_present {
        vec![
            MapLeg::new("signal", Complex::new(eta.sqrt(), T::zero()), false),
            MapLeg::new("bg", Complex::new((one - eta).sqrt(), T::zero()), false),
        ]
    } else {
        vec![MapLeg::new("bg", one_c, false)]
    };
    let mut outputs = vec![
        OutputMode::new("return", return_legs),
        OutputMode::identity("idler"),
    ];
    for label in [
        &rx_baths.microwave_in,
        &rx_baths.optical_in,
        &rx_baths.mechanical,
        &rx_baths.microwave_int,
        &rx_baths.optical_int,
    ] {
        outputs.push(OutputMode::identity(label));
    }
    let table = apply_linear_map(&table, &outputs)?;

    // Stage 3: the return is collected through the receiver-side converter,
    // which phase-conjugates it into an optical mode.
    let outputs = vec![
        phase_conjugate_row(c, "return", &rx_baths, "conv_return"),
        OutputMode::identity("idler"),
    ];
    let table = apply_linear_map(&table, &outputs)?;
    let n_return = table.occupation("conv_return")?;
    let n_retained = table.occupation("idler")?;

    // Stage 4: balanced beamsplitter and photon-difference counting.
    let half_sqrt = Complex::new((one / lit::<T>(2.0)).sqrt(), T::zero());
    let outputs = vec![
        OutputMode::new(
            "port_plus",
            vec![
                MapLeg::new("conv_return", half_sqrt, false),
                MapLeg::new("idler", half_sqrt, false),
            ],
        ),
        OutputMode::new(
            "port_minus",
            vec![
                MapLeg::new("conv_return", half_sqrt, false),
                MapLeg::new("idler", -half_sqrt, false),
            ],
        ),
    ];
    let table = apply_linear_map(&table, &outputs)?;

    let mean_plus = table.occupation("port_plus")?;
    let mean_minus = table.occupation("port_minus")?;
    let (_, var_diff) = wick_number_moments(&table, &[one, -one])?;

    Ok(OracleReceiverMoments {
        mean_plus,
        mean_minus,
        var_diff,
        n_return,
        n_retained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converter::{coefficients_lossless, coefficients_lossy, KappaRatios};
    use crate::params::test_fixtures::bench_params;
    use crate::params::{background_occupancy, occupancies, ThermalOccupancies};
    use crate::receiver::{receiver_moments, BackgroundConvention, TargetScenario};
    use crate::source::{source_moments, symplectic_spectrum};

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn thermal_mode_statistics() {
        let table = SecondMomentTable::thermal(&[("a", 3.0_f64)]).unwrap();
        let (mean, var) = wick_number_moments(&table, &[1.0]).unwrap();
        assert!(rel_close(mean, 3.0, 1e-14));
        assert!(rel_close(var, 12.0, 1e-14)); // n(n+1)
    }

    #[test]
    fn independent_difference_statistics() {
        let table = SecondMomentTable::thermal(&[("a", 2.0_f64), ("b", 5.0)]).unwrap();
        let (mean, var) = wick_number_moments(&table, &[1.0, -1.0]).unwrap();
        assert!(rel_close(mean, -3.0, 1e-14));
        assert!(rel_close(var, 2.0 * 3.0 + 5.0 * 6.0, 1e-14));
    }

    #[test]
    fn balanced_beamsplitter_splits_a_thermal_mode() {
        let table = SecondMomentTable::thermal(&[("hot", 4.0_f64), ("vac", 0.0)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let outputs = vec![
            OutputMode::new(
                "p",
                vec![
                    MapLeg::new("hot", c64(r, 0.0), false),
                    MapLeg::new("vac", c64(r, 0.0), false),
                ],
            ),
            OutputMode::new(
                "m",
                vec![
                    MapLeg::new("hot", c64(r, 0.0), false),
                    MapLeg::new("vac", c64(-r, 0.0), false),
                ],
            ),
        ];
        let out = apply_linear_map(&table, &outputs).unwrap();
        assert!(rel_close(out.occupation("p").unwrap(), 2.0, 1e-14));
        assert!(rel_close(out.occupation("m").unwrap(), 2.0, 1e-14));
        let n12 = out.n_entry(0, 1);
        assert!(rel_close(n12.re, 2.0, 1e-14));
        assert!(n12.im.abs() < 1e-14);
    }

    #[test]
    fn identity_map_preserves_the_table() {
        let table = SecondMomentTable::thermal(&[("a", 1.5_f64), ("b", 0.25)]).unwrap();
        let outputs = vec![OutputMode::identity("a"), OutputMode::identity("b")];
        let out = apply_linear_map(&table, &outputs).unwrap();
        assert_eq!(out, table);
    }

    #[test]
    fn commutator_violating_map_rejected() {
        let table = SecondMomentTable::thermal(&[("a", 1.0_f64)]).unwrap();
        let outputs = vec![OutputMode::new(
            "bad",
            vec![MapLeg::new("a", c64(2.0, 0.0), false)],
        )];
        let err = apply_linear_map(&table, &outputs).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)), "{err:?}");
    }

    #[test]
    fn transmitter_map_matches_closed_moments() {
        let ratios = KappaRatios::from_in_fractions(0.85, 0.6).unwrap();
        let c = coefficients_lossy::<f64>(6.0, 2.0, &ratios).unwrap();
        let occ = ThermalOccupancies {
            n_w_t: 0.3,
            n_o_t: 1.0e-3,
            n_b_t: 15.0,
            n_w_int: 0.3,
            n_o_int: 1.0e-3,
        };
        let s = source_moments(&c, &occ).unwrap();

        let baths = ConverterBathLabels::with_prefix("");
        let table = SecondMomentTable::thermal(&baths.thermal_assignment(&occ)).unwrap();
        let (row_w, row_o) = converter_rows(&c, &baths, "signal", "idler");
        let out = apply_linear_map(&table, &[row_w, row_o]).unwrap();

        assert!(rel_close(out.occupation("signal").unwrap(), s.n_w, 1e-12));
        assert!(rel_close(out.occupation("idler").unwrap(), s.n_o, 1e-12));
        let cross = out.m_entry(0, 1);
        assert!(rel_close(cross.re, s.cross.re, 1e-12), "{} vs {}", cross.re, s.cross.re);
        assert!((cross.im - s.cross.im).abs() <= 1e-12 * s.cross.norm());
        // The number-like cross moment vanishes for this map.
        assert!(out.n_entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn vacuum_covariance_matrix() {
        let table = SecondMomentTable::thermal(&[("a", 0.0_f64), ("b", 0.0)]).unwrap();
        let cm = covariance_matrix(&table);
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { 0.5 } else { 0.0 };
                assert!((cm[r * 4 + c] - expect).abs() < 1e-15);
            }
        }
        let spec = symplectic_spectrum_numeric(&cm, 2, None).unwrap();
        assert!(rel_close(spec[0], 0.5, 1e-12));
        assert!(rel_close(spec[1], 0.5, 1e-12));
    }

    #[test]
    fn benchmark_spectrum_matches_closed_forms() {
        let p = bench_params();
        let c = coefficients_lossless::<f64>(5181.95, 668.43).unwrap();
        let occ = occupancies(&p).unwrap();
        let s = source_moments(&c, &occ).unwrap();
        let closed = symplectic_spectrum(&s).unwrap();

        let baths = ConverterBathLabels::with_prefix("");
        let table = SecondMomentTable::thermal(&baths.thermal_assignment(&occ)).unwrap();
        let (row_w, row_o) = converter_rows(&c, &baths, "signal", "idler");
        let out = apply_linear_map(&table, &[row_w, row_o]).unwrap();
        let cm = covariance_matrix(&out);

        // Standard-form structure of the covariance matrix.
        assert!(rel_close(cm[0], s.v11, 1e-10));
        assert!(rel_close(cm[2 * 4 + 2], s.v33, 1e-10));
        assert!(rel_close(cm[2], s.v13, 1e-10));
        assert!(rel_close(cm[1 * 4 + 3], -s.v13, 1e-10));
        assert!(cm[3].abs() < 1e-10 * s.v13.abs());

        let spec = symplectic_spectrum_numeric(&cm, 2, None).unwrap();
        assert!(rel_close(spec[0], closed.nu_minus, 1e-10), "{} vs {}", spec[0], closed.nu_minus);
        assert!(rel_close(spec[1], closed.nu_plus, 1e-10), "{} vs {}", spec[1], closed.nu_plus);

        let pt = symplectic_spectrum_numeric(&cm, 2, Some(1)).unwrap();
        assert!(
            rel_close(pt[0], closed.zeta_minus, 1e-10),
            "{} vs {}",
            pt[0],
            closed.zeta_minus
        );
    }

    #[test]
    fn two_mode_squeezer_preserves_the_spectrum() {
        // A two-mode squeezer is symplectic, so the symplectic spectrum of
        // the squeezed thermal pair equals that of the inputs.
        let (n1, n2) = (0.7_f64, 0.2);
        let r: f64 = 0.9;
        let table = SecondMomentTable::thermal(&[("a1", n1), ("a2", n2)]).unwrap();
        let outputs = vec![
            OutputMode::new(
                "b1",
                vec![
                    MapLeg::new("a1", c64(r.cosh(), 0.0), false),
                    MapLeg::new("a2", c64(r.sinh(), 0.0), true),
                ],
            ),
            OutputMode::new(
                "b2",
                vec![
                    MapLeg::new("a2", c64(r.cosh(), 0.0), false),
                    MapLeg::new("a1", c64(r.sinh(), 0.0), true),
                ],
            ),
        ];
        let out = apply_linear_map(&table, &outputs).unwrap();
        let cm = covariance_matrix(&out);
        let spec = symplectic_spectrum_numeric(&cm, 2, None).unwrap();
        assert!(rel_close(spec[0], n2 + 0.5, 1e-9), "{}", spec[0]);
        assert!(rel_close(spec[1], n1 + 0.5, 1e-9), "{}", spec[1]);
    }

    #[test]
    fn asymmetric_covariance_rejected() {
        let mut cm = vec![0.0_f64; 16];
        for i in 0..4 {
            cm[i * 4 + i] = 0.5;
        }
        cm[1] = 0.3; // no matching transpose entry
        let err = symplectic_spectrum_numeric(&cm, 2, None).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err:?}");
    }

    #[test]
    fn oracle_chain_matches_closed_receiver() {
        let ratios = KappaRatios::from_in_fractions(0.85, 0.6).unwrap();
        let c = coefficients_lossy::<f64>(6.0, 2.0, &ratios).unwrap();
        let occ = ThermalOccupancies {
            n_w_t: 0.3,
            n_o_t: 1.0e-3,
            n_b_t: 15.0,
            n_w_int: 0.3,
            n_o_int: 1.0e-3,
        };
        let s = source_moments(&c, &occ).unwrap();
        let eta = 0.1;
        let n_b = 200.0;
        let t = TargetScenario::new(eta, n_b, 1.0).unwrap();
        for convention in [
            BackgroundConvention::ExactDivOneMinusEta,
            BackgroundConvention::Approximate,
        ] {
            let closed = receiver_moments(&s, &c, &occ, &t, convention).unwrap();
            let h1 = oracle_receiver_moments(&c, &occ, eta, n_b, convention, true).unwrap();
            let h0 = oracle_receiver_moments(&c, &occ, eta, n_b, convention, false).unwrap();

            assert!(rel_close(h1.mean_plus, closed.mean_plus_h1, 1e-10), "{convention:?}");
            assert!(rel_close(h1.mean_minus, closed.mean_minus_h1, 1e-10), "{convention:?}");
            assert!(rel_close(h1.var_diff, closed.var_diff_h1, 1e-10), "{convention:?}");
            assert!(rel_close(h1.n_return, closed.n_return_h1, 1e-10), "{convention:?}");
            assert!(rel_close(h1.n_retained, s.n_o, 1e-10), "{convention:?}");
            assert!(rel_close(h0.mean_plus, closed.mean_plus_h0, 1e-10), "{convention:?}");
            assert!(rel_close(h0.mean_minus, closed.mean_minus_h0, 1e-10), "{convention:?}");
            assert!(rel_close(h0.var_diff, closed.var_diff_h0, 1e-10), "{convention:?}");
            assert!(rel_close(h0.n_return, closed.n_return_h0, 1e-10), "{convention:?}");
        }
    }

    #[test]
    fn oracle_chain_at_the_benchmark_point() {
        let p = bench_params();
        let c = coefficients_lossless::<f64>(5181.95, 668.43).unwrap();
        let occ = occupancies(&p).unwrap();
        let n_b = background_occupancy(&p, 293.0).unwrap();
        let h1 = oracle_receiver_moments(
            &c,
            &occ,
            0.07,
            n_b,
            BackgroundConvention::ExactDivOneMinusEta,
            true,
        )
        .unwrap();
        assert!(rel_close(h1.mean_plus, 207.809454355520113, 1e-10), "{}", h1.mean_plus);
        assert!(rel_close(h1.mean_minus, 208.277203858433172, 1e-10), "{}", h1.mean_minus);
        assert!(rel_close(h1.var_diff, 982.127418037251399, 1e-10), "{}", h1.var_diff);
        assert!(rel_close(h1.n_return, 415.405478747168969, 1e-10), "{}", h1.n_return);
    }

    #[test]
    fn moment_helpers() {
        let table = SecondMomentTable::thermal(&[("x", 1.0_f64), ("y", 2.0)]).unwrap();
        assert_eq!(table.len(), 2);
        assert!(!table.is_empty());
        assert_eq!(table.index_of("y").unwrap(), 1);
        assert!(table.index_of("z").is_err());
        assert!(rel_close(table.occupation("y").unwrap(), 2.0, 1e-15));
        assert_eq!(table.labels(), &["x".to_string(), "y".to_string()]);
        // Duplicate labels rejected.
        assert!(SecondMomentTable::thermal(&[("x", 1.0_f64), ("x", 2.0)]).is_err());
        // Weight-count mismatch rejected.
        assert!(matches!(
            wick_number_moments(&table, &[1.0]),
            Err(Error::Domain(_))
        ));
    }
}
