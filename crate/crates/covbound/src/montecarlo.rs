//! Wishart scatter-matrix sampling and the empirical audit of every tail
//! bound: exceedance frequencies with Wilson intervals against the
//! theoretical probability budgets.
//!
//! Reproducibility contract: trial t draws from a ChaCha12 stream keyed by
//! splitmix64 over (seed, t), and all accumulation is integer counting, so a
//! given `TrialConfig` produces bit-identical reports regardless of thread
//! count or trial execution order. Gaussian variates come from the ziggurat
//! sampler behind `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Equation};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectra::{cholesky_factor, spectrum_of, symmetric_eigenvalues, CovarianceMatrix};

/// Two-sided 95% normal quantile used by the default Wilson interval.
pub const WILSON_Z95: f64 = 1.959964;

/// One Monte Carlo experiment: `trials` independent scatter matrices of `n`
/// samples each, audited at every θ in `thetas`.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub cov: CovarianceMatrix,
    pub n: usize,
    pub trials: usize,
    pub thetas: Vec<f64>,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(
        cov: CovarianceMatrix,
        n: usize,
        trials: usize,
        thetas: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if thetas.is_empty() {
            return Err(Error::Domain("theta grid must be nonempty".into()));
        }
        if thetas.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Domain("every theta must be finite and >= 0".into()));
        }
        Ok(TrialConfig {
            cov,
            n,
            trials,
            thetas,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// The CI lower bound does not exceed the theoretical budget.
    Consistent,
    /// The CI lower bound exceeds the budget: an implementation bug.
    Violated,
    /// Budget ≥ 1; the bound says nothing at this θ.
    Vacuous,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Violated => "VIOLATED",
            Verdict::Vacuous => "VACUOUS",
        })
    }
}

/// Empirical exceedance frequency of one event at one θ, against its budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceReport {
    pub equation: Equation,
    /// Eigenvalue index for the per-eigenvalue events (eq19/eq20).
    pub ell: Option<usize>,
    pub theta: f64,
    pub empirical_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Theoretical probability budget, untruncated.
    pub bound: f64,
    pub verdict: Verdict,
}

impl ExceedanceReport {
    /// Equation id with the eigenvalue index folded in, e.g. "eq19_l2";
    /// used where a single identifier column is needed.
    pub fn event_id(&self) -> String {
        match self.ell {
            Some(ell) => format!("{}_l{}", self.equation, ell),
            None => self.equation.to_string(),
        }
    }
}

/// Wilson score interval for `successes`/`trials` at normal quantile z.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::Domain("wilson interval needs trials >= 1".into()));
    }
    if successes > trials {
        return Err(Error::Domain(format!(
            "successes {successes} exceeds trials {trials}"
        )));
    }
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!("z must be positive, got {z}")));
    }
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At p̂ ∈ {0, 1} the score endpoints are exactly 0 and 1; rounding in the
    // expression above must not move them.
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((low, high))
}

/// Deterministic per-trial generator: splitmix64 expands (seed, trial) into
/// a ChaCha12 key.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut state = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// Scatter matrix S = Σ_{k=1..n} x_k x_kᵀ with x_k = L·z_k, z_k standard
/// normal.
pub fn sample_scatter<R: Rng>(c: &CovarianceMatrix, n: usize, rng: &mut R) -> Matrix {
    sample_scatter_with_factor(&cholesky_factor(c), n, rng)
}

fn sample_scatter_with_factor<R: Rng>(factor: &Matrix, n: usize, rng: &mut R) -> Matrix {
    let d = factor.dim();
    let mut s = Matrix::zeros(d);
    let mut z = vec![0.0; d];
    for _ in 0..n {
        for zi in &mut z {
            *zi = rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let x = factor.matvec(&z);
        s.add_outer(&x);
    }
    s
}

/// One audited event: which indicator to count and what it costs.
struct EventSpec {
    equation: Equation,
    ell: Option<usize>,
    /// Per-θ indicator thresholds.
    thresholds: Vec<f64>,
    /// Per-θ probability budgets.
    budgets: Vec<f64>,
}

/// Per-trial spectral statistics the indicators are computed from.
struct TrialStats {
    /// λ₁(S/n − C).
    up: f64,
    /// λ₁(C − S/n).
    down: f64,
    /// max_ℓ |λ_ℓ(S/n) − λ_ℓ(C)|.
    max_abs: f64,
    /// Eigenvalues of S/n, descending.
    s_eigs: Vec<f64>,
}

fn event_hit(spec: &EventSpec, stats: &TrialStats, theta_idx: usize) -> bool {
    let thr = spec.thresholds[theta_idx];
    match spec.equation {
        Equation::Eq15 => stats.up >= thr,
        Equation::Eq16 => stats.down >= thr,
        Equation::Eq17 => stats.up.max(stats.down) >= thr,
        Equation::Eq18 => stats.max_abs >= thr,
        Equation::Eq19 => stats.s_eigs[spec.ell.unwrap() - 1] >= thr,
        Equation::Eq20 => stats.s_eigs[spec.ell.unwrap() - 1] <= thr,
    }
}

/// Run the full audit: one report per collective event (eq15–eq18) per θ and
/// one per eigenvalue index for the individual events (eq19/eq20) per θ.
/// Eigenvalue indices with numerically zero λ_ℓ are skipped (their bounds
/// are undefined).
pub fn exceedance(cfg: &TrialConfig) -> Result<Vec<ExceedanceReport>> {
    let sp = spectrum_of(&cfg.cov)?;
    let d = sp.dim();
    let lam1 = sp.lambda(1);
    let n = cfg.n as u64;
    let thetas = &cfg.thetas;

    let mut events: Vec<EventSpec> = Vec::new();
    for equation in [
        Equation::Eq15,
        Equation::Eq16,
        Equation::Eq17,
        Equation::Eq18,
    ] {
        let mut thresholds = Vec::with_capacity(thetas.len());
        let mut budgets = Vec::with_capacity(thetas.len());
        for &theta in thetas {
            // eq18's per-ℓ thresholds all reduce to the eq15 deviation on the
            // λ₁ scale (κ_ℓ·λ_ℓ = λ₁), which also keeps the event well
            // defined for zero eigenvalues.
            thresholds.push(bounds::deviation_factor_eq15(theta, n, sp.r())? * lam1);
            let b = match equation {
                Equation::Eq15 => bounds::bound_eq15(&sp, n, theta)?,
                Equation::Eq16 => bounds::bound_eq16(&sp, n, theta)?,
                _ => bounds::bound_eq17(&sp, n, theta)?,
            };
            budgets.push(match equation {
                Equation::Eq18 => 2.0 * d as f64 * (-theta).exp(),
                _ => b.prob_budget,
            });
        }
        events.push(EventSpec {
            equation,
            ell: None,
            thresholds,
            budgets,
        });
    }
    for equation in [Equation::Eq19, Equation::Eq20] {
        for ell in 1..=d {
            if !sp.kappa(ell).is_finite() {
                continue;
            }
            let lam_ell = sp.lambda(ell);
            let mut thresholds = Vec::with_capacity(thetas.len());
            let mut budgets = Vec::with_capacity(thetas.len());
            for &theta in thetas {
                let b = match equation {
                    Equation::Eq19 => bounds::bound_eq19(&sp, n, theta, ell)?,
                    _ => bounds::bound_eq20(&sp, n, theta, ell)?,
                };
                let thr = match equation {
                    Equation::Eq19 => (1.0 + b.deviation) * lam_ell,
                    _ => (1.0 - b.deviation) * lam_ell,
                };
                thresholds.push(thr);
                budgets.push(b.prob_budget);
            }
            events.push(EventSpec {
                equation,
                ell: Some(ell),
                thresholds,
                budgets,
            });
        }
    }

    let factor = cholesky_factor(&cfg.cov);
    let lam_c: Vec<f64> = sp.eigenvalues().to_vec();
    let n_events = events.len();
    let n_thetas = thetas.len();
    let inv_n = 1.0 / cfg.n as f64;

    let counts: Vec<u64> = (0..cfg.trials as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; n_events * n_thetas],
            |mut acc, trial| {
                let mut rng = trial_rng(cfg.seed, trial);
                let s = sample_scatter_with_factor(&factor, cfg.n, &mut rng);
                let sn = s.scale(inv_n);
                let diff = sn.sub(cfg.cov.matrix()).symmetrized();
                let diff_eigs = symmetric_eigenvalues(&diff);
                let s_eigs = symmetric_eigenvalues(&sn);
                let max_abs = s_eigs
                    .iter()
                    .zip(&lam_c)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                let stats = TrialStats {
                    up: diff_eigs[0],
                    down: -diff_eigs[diff_eigs.len() - 1],
                    max_abs,
                    s_eigs,
                };
                for (ei, spec) in events.iter().enumerate() {
                    for ti in 0..n_thetas {
                        if event_hit(spec, &stats, ti) {
                            acc[ei * n_thetas + ti] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n_events * n_thetas],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let trials = cfg.trials as u64;
    let mut reports = Vec::with_capacity(n_events * n_thetas);
    for (ei, spec) in events.iter().enumerate() {
        for (ti, &theta) in thetas.iter().enumerate() {
            let successes = counts[ei * n_thetas + ti];
            let (ci_low, ci_high) = wilson_interval(successes, trials, WILSON_Z95)?;
            let bound = spec.budgets[ti];
            let verdict = if bound >= 1.0 {
                Verdict::Vacuous
            } else if ci_low > bound {
                Verdict::Violated
            } else {
                Verdict::Consistent
            };
            reports.push(ExceedanceReport {
                equation: spec.equation,
                ell: spec.ell,
                theta,
                empirical_rate: successes as f64 / trials as f64,
                ci_low,
                ci_high,
                bound,
                verdict,
            });
        }
    }
    Ok(reports)
}

/// Render reports as CSV with the columns
/// equation,theta,rate,ci_low,ci_high,bound,verdict. Per-eigenvalue events
/// fold ℓ into the equation id.
pub fn reports_to_csv(reports: &[ExceedanceReport]) -> String {
    let mut out = String::from("equation,theta,rate,ci_low,ci_high,bound,verdict\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.event_id(),
            r.theta,
            r.empirical_rate,
            r.ci_low,
            r.ci_high,
            r.bound,
            r.verdict
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg(cov: CovarianceMatrix, n: usize, trials: usize, seed: u64) -> TrialConfig {
        TrialConfig::new(cov, n, trials, vec![0.5, 1.0, 2.0], seed).unwrap()
    }

    #[test]
    fn wilson_edge_cases() {
        let (low, _) = wilson_interval(0, 50, WILSON_Z95).unwrap();
        assert_eq!(low, 0.0);
        let (_, high) = wilson_interval(50, 50, WILSON_Z95).unwrap();
        assert_eq!(high, 1.0);
        assert!(wilson_interval(5, 0, WILSON_Z95).is_err());
        assert!(wilson_interval(5, 4, WILSON_Z95).is_err());
    }

    #[test]
    fn wilson_50_of_100_against_closed_form() {
        // Independent evaluation of the score interval at p̂ = 1/2:
        // center = 1/2, half = z·sqrt(1/(4n) + z²/(4n²))/(1 + z²/n).
        let z = WILSON_Z95;
        let n = 100.0;
        let half = z * (0.25 / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n);
        let (low, high) = wilson_interval(50, 100, z).unwrap();
        assert!((low - (0.5 - half)).abs() < 1e-15);
        assert!((high - (0.5 + half)).abs() < 1e-15);
        assert!((low - 0.404).abs() < 5e-4);
        assert!((high - 0.596).abs() < 5e-4);
    }

    #[test]
    fn wilson_contains_the_point_estimate() {
        for &(s, t) in &[(0u64, 7u64), (3, 7), (7, 7), (13, 1000), (999, 1000)] {
            let (low, high) = wilson_interval(s, t, WILSON_Z95).unwrap();
            let p_hat = s as f64 / t as f64;
            assert!(low <= p_hat && p_hat <= high, "{s}/{t}");
        }
    }

    #[test]
    fn scatter_of_rank_one_cov_is_rank_one() {
        let mut m = Matrix::zeros(2);
        m.add_outer(&[0.6, 0.8]);
        let c = CovarianceMatrix::from_matrix(m).unwrap();
        let mut rng = trial_rng(9, 0);
        let s = sample_scatter(&c, 1, &mut rng);
        let eigs = symmetric_eigenvalues(&s);
        assert!(eigs[1].abs() <= 1e-12 * eigs[0].abs().max(1.0));
    }

    #[test]
    fn chi_square_mean_within_five_sigma() {
        // d=1, C=1: S ~ χ²_n with mean n and variance 2n.
        let c = CovarianceMatrix::identity(1);
        let n = 8;
        let trials = 20_000u64;
        let mut sum = 0.0;
        for t in 0..trials {
            let mut rng = trial_rng(1234, t);
            sum += sample_scatter(&c, n, &mut rng)[(0, 0)];
        }
        let mean = sum / trials as f64;
        let sigma = (2.0 * n as f64 / trials as f64).sqrt();
        assert!(
            (mean - n as f64).abs() <= 5.0 * sigma,
            "mean {mean} vs {n} (sigma {sigma})"
        );
    }

    #[test]
    fn scatter_trace_mean_matches_cov_trace() {
        let c = CovarianceMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let trials = 20_000u64;
        let mut sum = 0.0;
        for t in 0..trials {
            let mut rng = trial_rng(77, t);
            sum += sample_scatter(&c, 1, &mut rng).trace();
        }
        let mean = sum / trials as f64;
        // Var(tr S) = 2·tr(C²) for n = 1.
        let c2 = c.matrix().matmul(c.matrix());
        let sigma = (2.0 * c2.trace() / trials as f64).sqrt();
        assert!((mean - c.trace()).abs() <= 5.0 * sigma);
    }

    #[test]
    fn exceedance_deterministic_across_runs() {
        let cfg = quick_cfg(CovarianceMatrix::identity(2), 20, 400, 42);
        let a = exceedance(&cfg).unwrap();
        let b = exceedance(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn theta_zero_events_are_vacuous_and_near_certain() {
        let cfg = TrialConfig::new(CovarianceMatrix::identity(3), 25, 500, vec![0.0], 7).unwrap();
        let reports = exceedance(&cfg).unwrap();
        let eq15 = reports
            .iter()
            .find(|r| r.equation == Equation::Eq15)
            .unwrap();
        assert_eq!(eq15.verdict, Verdict::Vacuous);
        assert!(eq15.empirical_rate > 0.9);
        assert_eq!(eq15.bound, 3.0);
    }

    #[test]
    fn eq17_rate_dominates_one_sided_rates() {
        let cfg = quick_cfg(CovarianceMatrix::identity(3), 30, 1000, 5);
        let reports = exceedance(&cfg).unwrap();
        for ti in 0..cfg.thetas.len() {
            let rate = |eq: Equation| {
                reports
                    .iter()
                    .find(|r| r.equation == eq && r.theta == cfg.thetas[ti])
                    .unwrap()
                    .empirical_rate
            };
            assert!(rate(Equation::Eq17) >= rate(Equation::Eq15).max(rate(Equation::Eq16)));
        }
    }

    #[test]
    fn rate_nonincreasing_in_theta() {
        let cfg = TrialConfig::new(
            CovarianceMatrix::identity(2),
            15,
            2000,
            vec![0.25, 0.5, 1.0, 2.0, 4.0],
            11,
        )
        .unwrap();
        let reports = exceedance(&cfg).unwrap();
        for eq in Equation::ALL {
            let rates: Vec<f64> = reports
                .iter()
                .filter(|r| r.equation == eq && r.ell.unwrap_or(1) == 1)
                .map(|r| r.empirical_rate)
                .collect();
            if eq == Equation::Eq20 {
                // Lower-tail thresholds shrink with θ, so rates fall too.
                for w in rates.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12);
                }
            } else {
                for w in rates.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_trial_never_violates() {
        let cfg = quick_cfg(CovarianceMatrix::identity(2), 10, 1, 3);
        let reports = exceedance(&cfg).unwrap();
        assert!(reports.iter().all(|r| r.verdict != Verdict::Violated));
    }

    #[test]
    fn rank_deficient_cov_skips_undefined_ells() {
        let c = CovarianceMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let cfg = quick_cfg(c, 10, 50, 1);
        let reports = exceedance(&cfg).unwrap();
        assert!(reports
            .iter()
            .filter(|r| r.equation == Equation::Eq19)
            .all(|r| r.ell == Some(1)));
    }

    #[test]
    fn csv_has_the_specified_columns() {
        let cfg = quick_cfg(CovarianceMatrix::identity(2), 10, 20, 8);
        let reports = exceedance(&cfg).unwrap();
        let csv = reports_to_csv(&reports);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "equation,theta,rate,ci_low,ci_high,bound,verdict"
        );
        assert_eq!(lines.count(), reports.len());
        assert!(csv.contains("eq19_l1"));
    }

    #[test]
    fn mean_of_normalized_scatter_converges_to_cov() {
        let c = CovarianceMatrix::from_rows(&[vec![1.0, 0.4], vec![0.4, 2.0]]).unwrap();
        let n = 10;
        let trials = 5000u64;
        let mut mean = Matrix::zeros(2);
        for t in 0..trials {
            let mut rng = trial_rng(2024, t);
            mean = mean.add(&sample_scatter(&c, n, &mut rng).scale(1.0 / n as f64));
        }
        mean = mean.scale(1.0 / trials as f64);
        // Var of one entry of S/n is O(λ₁²/n); five sigmas with the crude
        // bound 2λ₁²/n.
        let lam1 = symmetric_eigenvalues(c.matrix())[0];
        let sigma = (2.0 * lam1 * lam1 / n as f64 / trials as f64).sqrt();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (mean[(i, j)] - c.entry(i, j)).abs() <= 5.0 * sigma,
                    "entry ({i},{j})"
                );
            }
        }
    }
}
