use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::parallel::RngSeed;

/// Sorted eigenvalues of a Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    energies: Vec<f64>,
}

impl Spectrum {
    /// Sorts the input; rejects empty or non-finite spectra.
    pub fn new(mut energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidParameter("empty spectrum".into()));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("spectrum contains non-finite values".into()));
        }
        energies.sort_by(|a, b| a.total_cmp(b));
        Ok(Spectrum { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn d(&self) -> usize {
        self.energies.len()
    }

    /// Smallest gap larger than `tol`, if any.
    pub fn min_nonzero_gap(&self, tol: f64) -> Option<f64> {
        self.energies.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > tol).reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleTag {
    Gue,
    Gde,
    Poisson,
}

impl fmt::Display for EnsembleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleTag::Gue => "gue",
            EnsembleTag::Gde => "gde",
            EnsembleTag::Poisson => "poisson",
        })
    }
}

impl FromStr for EnsembleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => Ok(EnsembleTag::Gue),
            "gde" => Ok(EnsembleTag::Gde),
            "poisson" | "p" => Ok(EnsembleTag::Poisson),
            other => Err(Error::InvalidParameter(format!("unknown ensemble {other:?}"))),
        }
    }
}

/// Spectral ensemble with its normalization.
///
/// * GUE: semicircle of radius `2 · scale`.
/// * GDE: iid `N(0, scale²)` levels.
/// * Poisson: iid exponential spacings of mean `scale`, recentred to zero mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleKind {
    pub tag: EnsembleTag,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

impl EnsembleKind {
    pub fn new(tag: EnsembleTag, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("ensemble scale must be > 0, got {scale}")));
        }
        Ok(EnsembleKind { tag, scale })
    }

    pub fn gue() -> Self {
        EnsembleKind { tag: EnsembleTag::Gue, scale: 1.0 }
    }

    pub fn gde() -> Self {
        EnsembleKind { tag: EnsembleTag::Gde, scale: 1.0 }
    }

    pub fn poisson() -> Self {
        EnsembleKind { tag: EnsembleTag::Poisson, scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.tag, self.scale).map(|_| ())
    }
}

/// Draw one spectrum from `kind`.
pub fn sample_spectrum<R: Rng + ?Sized>(kind: &EnsembleKind, d: usize, rng: &mut R) -> Result<Spectrum> {
    kind.validate()?;
    let s = match kind.tag {
        EnsembleTag::Gue => sample_gue_spectrum(d, rng)?,
        EnsembleTag::Gde => sample_gde_spectrum(d, 1.0, rng)?,
        EnsembleTag::Poisson => sample_poisson_spectrum(d, rng)?,
    };
    if kind.scale == 1.0 {
        Ok(s)
    } else {
        Spectrum::new(s.energies.iter().map(|e| e * kind.scale).collect())
    }
}

/// GUE eigenvalues, semicircle on `[-2, 2]`.
///
/// Drawn from the Dumitriu–Edelman tridiagonal model with β = 2, which has the
/// same joint eigenvalue law as the dense Hermitian ensemble of
/// [`sample_gue_hamiltonian`] and costs `O(d²)` instead of `O(d³)`.
pub fn sample_gue_spectrum<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Spectrum> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut diag: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) * norm).collect();
    let mut off: Vec<f64> = (1..d)
        .map(|i| {
            let dof = 2.0 * (d - i) as f64;
            let chi2 = ChiSquared::new(dof).expect("positive dof").sample(rng);
            (chi2 / 2.0).sqrt() * norm
        })
        .collect();
    off.push(0.0);
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    Spectrum::new(diag)
}

/// Dense GUE Hamiltonian `(M + M†)/2` with `E|H_ij|² = 1/d`.
pub fn sample_gue_hamiltonian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DenseOperator {
    let sigma = (2.0 / d as f64).sqrt() / std::f64::consts::SQRT_2;
    let m = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * sigma, im * sigma)
    });
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DenseOperator::new_hermitian(h).expect("symmetrized matrix is Hermitian")
}

/// Sorted iid `N(0, scale²)` levels.
pub fn sample_gde_spectrum<R: Rng + ?Sized>(d: usize, scale: f64, rng: &mut R) -> Result<Spectrum> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("GDE scale must be > 0, got {scale}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    Spectrum::new((0..d).map(|_| rng.sample::<f64, _>(StandardNormal) * scale).collect())
}

/// Cumulative sums of iid unit-mean exponential spacings, recentred to zero mean.
pub fn sample_poisson_spectrum<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Spectrum> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let mut levels = Vec::with_capacity(d);
    let mut x = 0.0;
    levels.push(x);
    for _ in 1..d {
        let gap: f64 = rng.sample(Exp1);
        x += gap;
        levels.push(x);
    }
    let mean = levels.iter().sum::<f64>() / d as f64;
    Spectrum::new(levels.into_iter().map(|e| e - mean).collect())
}

impl Spectrum {
    pub fn sample_seeded(kind: &EnsembleKind, d: usize, seed: RngSeed) -> Result<Self> {
        sample_spectrum(kind, d, &mut seed.stream(0))
    }
}

/// Diagonal `U(t) = Σ_k e^{-i E_k t} |k⟩⟨k|`.
pub fn unitary_from_spectrum(s: &Spectrum, t: f64) -> Result<DenseOperator> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    let diag: Vec<C64> = s.energies.iter().map(|e| C64::from_polar(1.0, -e * t)).collect();
    let n = diag.len();
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) });
    Ok(DenseOperator::with_flags(m, true, false))
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL.
///
/// `diag` holds the diagonal and is overwritten by the (unsorted) eigenvalues;
/// `off[i]` couples `i` and `i + 1`, with `off[n-1]` ignored.
pub fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if off.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: off.len() });
    }
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::InvalidParameter("tridiagonal QL failed to converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_distance, Estimate};

    fn rng(seed: u64) -> rand_chacha::ChaCha12Rng {
        RngSeed(seed).stream(0)
    }

    #[test]
    fn tridiagonal_matches_dense_solver() {
        let mut r = rng(1);
        for n in [1usize, 2, 5, 17] {
            let d: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
            let e: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
            let dense = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    d[i]
                } else if j == i + 1 {
                    e[i]
                } else if i == j + 1 {
                    e[j]
                } else {
                    0.0
                }
            });
            let mut expected: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
            expected.sort_by(|a, b| a.total_cmp(b));
            let (mut dd, mut ee) = (d.clone(), e.clone());
            tridiagonal_eigenvalues(&mut dd, &mut ee).unwrap();
            dd.sort_by(|a, b| a.total_cmp(b));
            for (a, b) in dd.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn gue_small_d_is_reproducible_and_bounded() {
        let a = sample_gue_spectrum(2, &mut rng(9)).unwrap();
        let b = sample_gue_spectrum(2, &mut rng(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.energies().iter().all(|e| e.abs() < 3.0), "{a:?}");
    }

    fn semicircle_cdf(x: f64) -> f64 {
        let x = x.clamp(-2.0, 2.0);
        0.5 + (x * (4.0 - x * x).sqrt() / 2.0 + 2.0 * (x / 2.0).asin()) / (2.0 * std::f64::consts::PI)
    }

    #[test]
    fn gue_density_is_semicircle() {
        let mut all = Vec::new();
        for i in 0..200 {
            all.extend_from_slice(sample_gue_spectrum(256, &mut rng(100 + i)).unwrap().energies());
        }
        let ks = ks_distance(&all, semicircle_cdf);
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn dense_gue_has_same_semicircle() {
        let mut all = Vec::new();
        for i in 0..20 {
            let h = sample_gue_hamiltonian(64, &mut rng(300 + i));
            let ev = h.matrix().clone().symmetric_eigenvalues();
            all.extend(ev.iter().copied());
        }
        let ks = ks_distance(&all, semicircle_cdf);
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn gue_output_is_sorted() {
        for i in 0..20 {
            let s = sample_gue_spectrum(33, &mut rng(i)).unwrap();
            assert!(s.energies().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn gde_variance() {
        let s = sample_gde_spectrum(10_000, 1.5, &mut rng(2)).unwrap();
        let sq: Vec<f64> = s.energies().iter().map(|e| e * e).collect();
        let var = Estimate::from_samples(&sq).mean;
        assert!((var / 2.25 - 1.0).abs() < 0.05, "var = {var}");
        assert!(sample_gde_spectrum(4, 0.0, &mut rng(2)).is_err());
        assert!(EnsembleKind::new(EnsembleTag::Gde, 0.0).is_err());
        assert_eq!(
            sample_gde_spectrum(8, 1.0, &mut rng(5)).unwrap(),
            sample_gde_spectrum(8, 1.0, &mut rng(5)).unwrap()
        );
    }

    #[test]
    fn poisson_spacings_are_exponential() {
        let s = sample_poisson_spectrum(10_000, &mut rng(3)).unwrap();
        let gaps: Vec<f64> = s.energies().windows(2).map(|w| w[1] - w[0]).collect();
        let ks = ks_distance(&gaps, |x| 1.0 - (-x.max(0.0)).exp());
        assert!(ks <= 0.02, "KS = {ks}");
        let mean: f64 = s.energies().iter().sum::<f64>() / s.d() as f64;
        assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn poisson_single_level_is_zero() {
        let s = sample_poisson_spectrum(1, &mut rng(4)).unwrap();
        assert_eq!(s.energies(), &[0.0]);
        assert_eq!(
            sample_poisson_spectrum(16, &mut rng(4)).unwrap(),
            sample_poisson_spectrum(16, &mut rng(4)).unwrap()
        );
    }

    #[test]
    fn unitary_at_zero_time_is_identity() {
        let s = sample_gue_spectrum(6, &mut rng(5)).unwrap();
        let u = unitary_from_spectrum(&s, 0.0).unwrap();
        assert_eq!(u.max_abs_diff(&DenseOperator::identity(6)), 0.0);
        assert!(unitary_from_spectrum(&s, f64::NAN).is_err());
    }

    #[test]
    fn trace_square_matches_direct_sum() {
        let s = sample_gue_spectrum(12, &mut rng(6)).unwrap();
        let t = 1.7;
        let u = unitary_from_spectrum(&s, t).unwrap();
        let from_matrix = u.trace().norm_sqr();
        let e = s.energies();
        let mut direct = C64::new(0.0, 0.0);
        for a in e {
            for b in e {
                direct += C64::from_polar(1.0, (a - b) * t);
            }
        }
        assert!((from_matrix - direct.re).abs() < 1e-10 && direct.im.abs() < 1e-10);
    }

    #[test]
    fn spectrum_rejects_bad_input() {
        assert!(Spectrum::new(vec![]).is_err());
        assert!(Spectrum::new(vec![0.0, f64::INFINITY]).is_err());
        assert_eq!(Spectrum::new(vec![2.0, -1.0]).unwrap().energies(), &[-1.0, 2.0]);
    }
}
