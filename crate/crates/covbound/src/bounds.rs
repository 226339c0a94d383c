//! Closed-form tail bounds for the normalized Wishart scatter matrix S/n,
//! plus their inversions into confidence and sample-size planners.
//!
//! Deviations are stored as relative factors: multiply by λ₁(C) (or λ_ℓ(C)
//! for the per-eigenvalue bounds) for an absolute scale. Probability budgets
//! are returned untruncated; budgets at or above 1 carry a `vacuous` flag
//! instead of being clipped, so the caller can see where a bound says
//! nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

/// (σ², B) pair for the scalar Bernstein tail machinery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    pub sigma2: f64,
    pub b: f64,
}

impl BernsteinParams {
    pub fn new(sigma2: f64, b: f64) -> Result<Self> {
        if !sigma2.is_finite() || !b.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        if sigma2 < 0.0 || b < 0.0 {
            return Err(Error::Domain(format!(
                "Bernstein parameters must be nonnegative (sigma2={sigma2}, B={b})"
            )));
        }
        Ok(BernsteinParams { sigma2, b })
    }
}

/// Which closed-form bound a `TailBound` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Eq15,
    Eq16,
    Eq17,
    Eq18,
    Eq19,
    Eq20,
}

impl Equation {
    pub const ALL: [Equation; 6] = [
        Equation::Eq15,
        Equation::Eq16,
        Equation::Eq17,
        Equation::Eq18,
        Equation::Eq19,
        Equation::Eq20,
    ];

    /// True for the per-eigenvalue one-sided bounds that take a meaningful ℓ.
    pub fn is_per_eigenvalue(self) -> bool {
        matches!(self, Equation::Eq19 | Equation::Eq20)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Equation::Eq15 => "eq15",
            Equation::Eq16 => "eq16",
            Equation::Eq17 => "eq17",
            Equation::Eq18 => "eq18",
            Equation::Eq19 => "eq19",
            Equation::Eq20 => "eq20",
        }
    }
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Equation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eq15" => Ok(Equation::Eq15),
            "eq16" => Ok(Equation::Eq16),
            "eq17" => Ok(Equation::Eq17),
            "eq18" => Ok(Equation::Eq18),
            "eq19" => Ok(Equation::Eq19),
            "eq20" => Ok(Equation::Eq20),
            other => Err(Error::Parse(format!("unknown equation id {other:?}"))),
        }
    }
}

/// One evaluated tail bound: a relative deviation factor and the probability
/// budget it buys at exponent θ.
///
/// For eq20 the deviation is the amount subtracted from 1; the multiplicative
/// factor 1 − deviation may be negative, in which case the bound is vacuous
/// and flagged as such.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub equation: Equation,
    /// Eigenvalue index (1-based); 1 for eq15–eq17.
    pub ell: usize,
    pub theta: f64,
    pub deviation: f64,
    pub prob_budget: f64,
    pub vacuous: bool,
}

impl TailBound {
    fn new(equation: Equation, ell: usize, theta: f64, deviation: f64, prob_budget: f64) -> Self {
        let vacuous = prob_budget >= 1.0 || (equation == Equation::Eq20 && deviation > 1.0);
        TailBound {
            equation,
            ell,
            theta,
            deviation,
            prob_budget,
            vacuous,
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::Domain(format!(
            "theta must be finite and >= 0, got {theta}"
        )));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be a positive integer".into()));
    }
    Ok(())
}

fn check_ell(sp: &Spectrum, ell: usize) -> Result<f64> {
    if ell == 0 || ell > sp.dim() {
        return Err(Error::Domain(format!(
            "ell must lie in 1..={}, got {ell}",
            sp.dim()
        )));
    }
    let kappa = sp.kappa(ell);
    if !kappa.is_finite() {
        return Err(Error::UndefinedBound(format!(
            "lambda_{ell} is numerically zero, kappa_{ell} is infinite"
        )));
    }
    Ok(kappa)
}

/// Bernstein deviation √(2θσ²) + θB at exponent θ.
pub fn bernstein_eps(theta: f64, p: &BernsteinParams) -> Result<f64> {
    check_theta(theta)?;
    Ok((2.0 * theta * p.sigma2).sqrt() + theta * p.b)
}

/// Tail probability exp(−ε²/(2σ² + 2εB)).
pub fn bernstein_tail(eps: f64, p: &BernsteinParams) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Domain(format!(
            "eps must be finite and >= 0, got {eps}"
        )));
    }
    if eps == 0.0 {
        return Ok(1.0);
    }
    if p.sigma2 == 0.0 && p.b == 0.0 {
        return Err(Error::DegenerateParams(
            "bernstein_tail needs sigma2 + eps*B > 0 for eps > 0".into(),
        ));
    }
    Ok((-eps * eps / (2.0 * p.sigma2 + 2.0 * eps * p.b)).exp())
}

/// Exact rate h(ε) = ε²/(εB + σ² + σ²√(1 + 2εB/σ²)), the sharp exponent the
/// simplified Bernstein tail relaxes. Satisfies h(ε) ≥ ε²/(2σ² + 2εB).
pub fn exact_rate(eps: f64, p: &BernsteinParams) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Domain(format!(
            "eps must be finite and >= 0, got {eps}"
        )));
    }
    if p.sigma2 <= 0.0 {
        return Err(Error::DegenerateParams(
            "exact_rate needs sigma2 > 0".into(),
        ));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let root = (1.0 + 2.0 * eps * p.b / p.sigma2).sqrt();
    Ok(eps * eps / (eps * p.b + p.sigma2 + p.sigma2 * root))
}

/// Relative deviation factor √(2θ(r+1)/n) + 2θr/n shared by eq15–eq17.
pub fn deviation_factor_eq15(theta: f64, n: u64, r: f64) -> Result<f64> {
    check_theta(theta)?;
    check_n(n)?;
    if !r.is_finite() || r < 1.0 {
        return Err(Error::Domain(format!(
            "intrinsic dimension r must be >= 1, got {r}"
        )));
    }
    let nf = n as f64;
    Ok((2.0 * theta * (r + 1.0) / nf).sqrt() + 2.0 * theta * r / nf)
}

fn eq15_family(sp: &Spectrum, n: u64, theta: f64, equation: Equation) -> Result<TailBound> {
    let deviation = deviation_factor_eq15(theta, n, sp.r())?;
    let d = sp.dim() as f64;
    let mult = if equation == Equation::Eq17 {
        2.0 * d
    } else {
        d
    };
    Ok(TailBound::new(
        equation,
        1,
        theta,
        deviation,
        mult * (-theta).exp(),
    ))
}

/// Upper tail of λ₁(S/n − C), budget d·e^{−θ}. Deviation relative to λ₁(C).
pub fn bound_eq15(sp: &Spectrum, n: u64, theta: f64) -> Result<TailBound> {
    eq15_family(sp, n, theta, Equation::Eq15)
}

/// Upper tail of λ₁(C − S/n), budget d·e^{−θ}. Deviation relative to λ₁(C).
pub fn bound_eq16(sp: &Spectrum, n: u64, theta: f64) -> Result<TailBound> {
    eq15_family(sp, n, theta, Equation::Eq16)
}

/// Two-sided spectral-norm tail ‖S/n − C‖, budget 2d·e^{−θ}.
pub fn bound_eq17(sp: &Spectrum, n: u64, theta: f64) -> Result<TailBound> {
    eq15_family(sp, n, theta, Equation::Eq17)
}

/// Collective per-eigenvalue band: the single 2d·e^{−θ} budget covers the
/// event that some ℓ leaves its band. Deviation relative to λ_ℓ(C).
pub fn bound_eq18(sp: &Spectrum, n: u64, theta: f64, ell: usize) -> Result<TailBound> {
    check_theta(theta)?;
    check_n(n)?;
    let kappa = check_ell(sp, ell)?;
    let r = sp.r();
    let nf = n as f64;
    let deviation =
        (2.0 * theta * kappa * kappa * (r + 1.0) / nf).sqrt() + 2.0 * theta * kappa * r / nf;
    let budget = 2.0 * sp.dim() as f64 * (-theta).exp();
    Ok(TailBound::new(
        Equation::Eq18,
        ell,
        theta,
        deviation,
        budget,
    ))
}

/// Individual upper bound on λ_ℓ(S/n), budget (d−ℓ+1)·e^{−θ}. The stored
/// deviation is the multiplicative factor minus 1, relative to λ_ℓ(C).
pub fn bound_eq19(sp: &Spectrum, n: u64, theta: f64, ell: usize) -> Result<TailBound> {
    check_theta(theta)?;
    check_n(n)?;
    let kappa = check_ell(sp, ell)?;
    let kr = kappa * sp.r_tail(ell);
    let nf = n as f64;
    let deviation = (2.0 * theta * (kr + 2.0) / nf).sqrt() + 2.0 * theta * kr / nf;
    let budget = (sp.dim() - ell + 1) as f64 * (-theta).exp();
    Ok(TailBound::new(
        Equation::Eq19,
        ell,
        theta,
        deviation,
        budget,
    ))
}

/// Individual lower bound on λ_ℓ(S/n), budget ℓ·e^{−θ}. The stored deviation
/// is the amount subtracted from 1; factors below 0 are reported as-is and
/// flagged vacuous.
pub fn bound_eq20(sp: &Spectrum, n: u64, theta: f64, ell: usize) -> Result<TailBound> {
    check_theta(theta)?;
    check_n(n)?;
    let kappa = check_ell(sp, ell)?;
    let spread = sp.r_tail(1) - sp.r_tail(ell + 1) + 2.0;
    let nf = n as f64;
    let deviation = (2.0 * theta * kappa * kappa * spread / nf).sqrt();
    let budget = ell as f64 * (-theta).exp();
    Ok(TailBound::new(
        Equation::Eq20,
        ell,
        theta,
        deviation,
        budget,
    ))
}

/// Union-bound multiplicity in each equation's probability budget
/// multiplicity·e^{−θ}. `d` is the dimension, `ell` the eigenvalue index
/// (ignored by the collective bounds).
pub fn budget_multiplicity(equation: Equation, d: usize, ell: usize) -> f64 {
    match equation {
        Equation::Eq15 | Equation::Eq16 => d as f64,
        Equation::Eq17 | Equation::Eq18 => 2.0 * d as f64,
        Equation::Eq19 => (d - ell + 1) as f64,
        Equation::Eq20 => ell as f64,
    }
}

/// Invert prob_budget = multiplicity·e^{−θ} = delta_fail for θ.
pub fn theta_for_confidence(delta_fail: f64, multiplicity: f64) -> Result<f64> {
    if !delta_fail.is_finite() || delta_fail <= 0.0 || delta_fail >= 1.0 {
        return Err(Error::Domain(format!(
            "delta_fail must lie strictly in (0,1), got {delta_fail}"
        )));
    }
    if !multiplicity.is_finite() || multiplicity <= 0.0 {
        return Err(Error::Domain(format!(
            "multiplicity must be positive, got {multiplicity}"
        )));
    }
    Ok((multiplicity / delta_fail).ln())
}

/// Largest n worth solving for before u64/f64 integer precision runs out.
const SOLVE_N_MAX: f64 = 9.0e15;

/// Minimal n with deviation_factor_eq15(θ, n, r) ≤ eps_rel.
///
/// In x = 1/√n the factor is b·x + a·x² with a = 2θr and b = √(2θ(r+1)), so
/// the candidate comes from the positive quadratic root; two-point integer
/// verification then repairs any floating-point misplacement of the ceiling.
pub fn solve_n(eps_rel: f64, theta: f64, r: f64) -> Result<u64> {
    if !eps_rel.is_finite() || eps_rel <= 0.0 {
        return Err(Error::Domain(format!(
            "eps_rel must be positive, got {eps_rel}"
        )));
    }
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain(format!(
            "theta must be positive, got {theta}"
        )));
    }
    if !r.is_finite() || r < 1.0 {
        return Err(Error::Domain(format!("r must be >= 1, got {r}")));
    }
    let a = 2.0 * theta * r;
    let b = (2.0 * theta * (r + 1.0)).sqrt();
    solve_n_quadratic(a, b, eps_rel, |n| {
        deviation_factor_eq15(theta, n, r).expect("validated")
    })
}

/// Minimal n with the requested equation's deviation ≤ eps_rel at θ. The
/// eq15 family ignores ell; the per-eigenvalue deviations invert through the
/// same quadratic with their own coefficients.
pub fn solve_n_for(
    sp: &Spectrum,
    equation: Equation,
    ell: usize,
    theta: f64,
    eps_rel: f64,
) -> Result<u64> {
    if !eps_rel.is_finite() || eps_rel <= 0.0 {
        return Err(Error::Domain(format!(
            "eps_rel must be positive, got {eps_rel}"
        )));
    }
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let r = sp.r();
    let (a, b) = match equation {
        Equation::Eq15 | Equation::Eq16 | Equation::Eq17 => {
            return solve_n(eps_rel, theta, r);
        }
        Equation::Eq18 => {
            let kappa = check_ell(sp, ell)?;
            (
                2.0 * theta * kappa * r,
                kappa * (2.0 * theta * (r + 1.0)).sqrt(),
            )
        }
        Equation::Eq19 => {
            let kappa = check_ell(sp, ell)?;
            let kr = kappa * sp.r_tail(ell);
            (2.0 * theta * kr, (2.0 * theta * (kr + 2.0)).sqrt())
        }
        Equation::Eq20 => {
            let kappa = check_ell(sp, ell)?;
            let spread = sp.r_tail(1) - sp.r_tail(ell + 1) + 2.0;
            (0.0, kappa * (2.0 * theta * spread).sqrt())
        }
    };
    solve_n_quadratic(a, b, eps_rel, |n| {
        let bound = match equation {
            Equation::Eq18 => bound_eq18(sp, n, theta, ell),
            Equation::Eq19 => bound_eq19(sp, n, theta, ell),
            _ => bound_eq20(sp, n, theta, ell),
        };
        bound.expect("validated").deviation
    })
}

/// Minimal n for any factor of the form b/√n + a/n (a ≥ 0, b ≥ 0, not both
/// zero), verified by direct evaluation of the exact factor at n and n−1.
pub(crate) fn solve_n_quadratic<F: Fn(u64) -> f64>(
    a: f64,
    b: f64,
    eps: f64,
    factor: F,
) -> Result<u64> {
    let x_star = if a > 0.0 {
        (-b + (b * b + 4.0 * a * eps).sqrt()) / (2.0 * a)
    } else {
        eps / b
    };
    let candidate = (1.0 / (x_star * x_star)).ceil();
    if !candidate.is_finite() || candidate > SOLVE_N_MAX {
        return Err(Error::Domain(format!(
            "required sample size exceeds supported range ({candidate:e})"
        )));
    }
    let mut n = (candidate as u64).max(1);
    while factor(n) > eps {
        n += 1;
    }
    while n > 1 && factor(n - 1) <= eps {
        n -= 1;
    }
    Ok(n)
}
