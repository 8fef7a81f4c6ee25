//! Photon-number distributions of the driving light and their normally
//! ordered statistics.
//!
//! The sub- and super-Poissonian families are
//!
//! ```text
//! P_n⁻ = λⁿ / ((2n)! Z₋(λ)),      Z₋(λ) = cosh √λ,
//! P_n⁺ = λⁿ / ((n+2)! Z₊(λ)),     Z₊(λ) = (e^λ − λ − 1) / λ²,
//! ```
//!
//! and the generating function F(s) = Σ P_n (1 − s)ⁿ = ⟨:e^{−s a†a}:⟩ feeds
//! the Laplace route in [`crate::driving`].
//!
//! Probability tables are built in log space from the ratio P_{n+1}/P_n and
//! truncated once the geometric tail bound drops below 1e-14. Moment sums
//! continue past the table with the same recurrence until their own
//! remainder bound is negligible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Largest coherence order accepted by [`PhotonDistribution::gk`]. Beyond it
/// the factorial moments of the heavier-tailed kinds lose relative precision.
pub const MAX_COHERENCE_ORDER: u32 = 10;

/// Tail mass allowed beyond the probability table.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Custom distributions whose total differs from 1 by more than this are
/// rejected; smaller deviations are renormalized.
pub const CUSTOM_NORMALIZATION_TOL: f64 = 1e-6;

const MAX_TERMS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Coherent,
    Thermal,
    #[serde(rename = "sub")]
    SubPoisson,
    #[serde(rename = "super")]
    SuperPoisson,
    Custom,
}

impl Statistic {
    pub const BUILT_IN: [Statistic; 4] = [
        Statistic::SubPoisson,
        Statistic::Coherent,
        Statistic::SuperPoisson,
        Statistic::Thermal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Coherent => "coherent",
            Statistic::Thermal => "thermal",
            Statistic::SubPoisson => "sub",
            Statistic::SuperPoisson => "super",
            Statistic::Custom => "custom",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coherent" | "poisson" => Ok(Statistic::Coherent),
            "thermal" => Ok(Statistic::Thermal),
            "sub" | "subpoisson" | "sub-poisson" => Ok(Statistic::SubPoisson),
            "super" | "superpoisson" | "super-poisson" => Ok(Statistic::SuperPoisson),
            "custom" => Ok(Statistic::Custom),
            other => Err(Error::invalid(
                "statistic",
                format!("unknown statistic `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    /// Poissonian numbers with mean n̄.
    Coherent(f64),
    /// Bose–Einstein numbers with mean n̄.
    Thermal(f64),
    SubPoisson(f64),
    SuperPoisson(f64),
    Custom(Vec<f64>),
}

/// Photon-number distribution with a cached probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    kind: DistributionKind,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    tail_mass: f64,
}

/// Z₋(λ) = cosh √λ, continued to λ < 0 as cos √(−λ).
pub fn z_minus(lambda: f64) -> f64 {
    if lambda >= 0.0 {
        lambda.sqrt().cosh()
    } else {
        (-lambda).sqrt().cos()
    }
}

/// Z₊(λ) = (e^λ − λ − 1)/λ², with the removable singularity at 0 equal to ½.
pub fn z_plus(lambda: f64) -> f64 {
    if lambda.abs() < 0.5 {
        z_plus_series(lambda)
    } else if lambda > 700.0 {
        ln_z_plus(lambda).exp()
    } else {
        (lambda.exp_m1() - lambda) / (lambda * lambda)
    }
}

/// Σ λⁿ/(n+2)!, accurate for |λ| < ½.
fn z_plus_series(lambda: f64) -> f64 {
    let mut term = 0.5;
    let mut sum = 0.0;
    for n in 0..24 {
        sum += term;
        term *= lambda / (n as f64 + 3.0);
    }
    sum
}

/// ln cosh √λ for λ ≥ 0 without overflow.
fn ln_z_minus(lambda: f64) -> f64 {
    let b = lambda.sqrt();
    b + (-2.0 * b).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln Z₊(λ) for any λ without overflow.
fn ln_z_plus(lambda: f64) -> f64 {
    if lambda > 30.0 {
        lambda + (-(lambda + 1.0) * (-lambda).exp()).ln_1p() - 2.0 * lambda.ln()
    } else {
        z_plus(lambda).ln()
    }
}

/// Z₋(y)/Z₋(λ) for λ ≥ 0.
fn z_minus_ratio(y: f64, lambda: f64) -> f64 {
    if y >= 0.0 {
        (ln_z_minus(y) - ln_z_minus(lambda)).exp()
    } else {
        (-y).sqrt().cos() * (-ln_z_minus(lambda)).exp()
    }
}

/// Z₊(y)/Z₊(λ); Z₊ is positive on the whole real line.
fn z_plus_ratio(y: f64, lambda: f64) -> f64 {
    (ln_z_plus(y) - ln_z_plus(lambda)).exp()
}

fn sub_poisson_mean(lambda: f64) -> f64 {
    let b = lambda.sqrt();
    0.5 * b * b.tanh()
}

fn super_poisson_mean(lambda: f64) -> f64 {
    if lambda < 2.0 {
        // Σ n λⁿ/(n+2)! / Σ λⁿ/(n+2)!
        let (mut num, mut den) = (0.0, 0.0);
        let mut term = 0.5;
        for n in 0..40 {
            den += term;
            num += n as f64 * term;
            term *= lambda / (n as f64 + 3.0);
        }
        num / den
    } else {
        lambda / (1.0 - lambda / lambda.exp_m1()) - 2.0
    }
}

fn check_parameter(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

impl PhotonDistribution {
    pub fn coherent(mean: f64) -> Result<Self> {
        Self::built_in(DistributionKind::Coherent(check_parameter("mean", mean)?))
    }

    pub fn thermal(mean: f64) -> Result<Self> {
        Self::built_in(DistributionKind::Thermal(check_parameter("mean", mean)?))
    }

    pub fn sub_poisson(lambda: f64) -> Result<Self> {
        Self::built_in(DistributionKind::SubPoisson(check_parameter(
            "lambda", lambda,
        )?))
    }

    pub fn super_poisson(lambda: f64) -> Result<Self> {
        Self::built_in(DistributionKind::SuperPoisson(check_parameter(
            "lambda", lambda,
        )?))
    }

    /// Tabulated P_0, P_1, …; renormalized when the total is within 1e-6 of 1.
    pub fn custom(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("probabilities", "empty sequence"));
        }
        if let Some((n, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::invalid(
                "probabilities",
                format!("P_{n} = {p} is not a probability"),
            ));
        }
        let total = probs.iter().copied().collect::<CompensatedSum>().value();
        if (total - 1.0).abs() > CUSTOM_NORMALIZATION_TOL {
            return Err(Error::invalid(
                "probabilities",
                format!("sum to {total}, expected 1 within {CUSTOM_NORMALIZATION_TOL}"),
            ));
        }
        let mut probs: Vec<f64> = probs.into_iter().map(|p| p / total).collect();
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Ok(PhotonDistribution {
            kind: DistributionKind::Custom(probs.clone()),
            probs,
            log_probs,
            tail_mass: 0.0,
        })
    }

    /// Built-in distribution from its native parameter: the mean for coherent
    /// and thermal light, λ for the sub- and super-Poissonian families.
    pub fn from_parameter(stat: Statistic, parameter: f64) -> Result<Self> {
        match stat {
            Statistic::Coherent => Self::coherent(parameter),
            Statistic::Thermal => Self::thermal(parameter),
            Statistic::SubPoisson => Self::sub_poisson(parameter),
            Statistic::SuperPoisson => Self::super_poisson(parameter),
            Statistic::Custom => Err(Error::invalid(
                "statistic",
                "custom distributions need a probability table",
            )),
        }
    }

    /// Built-in distribution with the given mean photon number.
    pub fn with_mean(stat: Statistic, mean: f64) -> Result<Self> {
        check_parameter("mean", mean)?;
        match stat {
            Statistic::SubPoisson | Statistic::SuperPoisson => {
                Self::from_parameter(stat, lambda_for_mean(stat, mean)?)
            }
            _ => Self::from_parameter(stat, mean),
        }
    }

    fn built_in(kind: DistributionKind) -> Result<Self> {
        let mut d = PhotonDistribution {
            kind,
            probs: vec![1.0],
            log_probs: vec![0.0],
            tail_mass: 0.0,
        };
        if d.parameter() == 0.0 {
            return Ok(d);
        }
        let mut n_max = 50usize.max((10.0 * d.closed_form_mean()).ceil() as usize);
        loop {
            let mut logs = Vec::with_capacity(n_max + 1);
            let mut acc = 0.0;
            logs.push(0.0);
            for n in 0..n_max {
                acc += d.ratio(n).ln();
                logs.push(acc);
            }
            let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let norm = logs
                .iter()
                .map(|l| (l - peak).exp())
                .collect::<CompensatedSum>()
                .value();
            let log_norm = peak + norm.ln();
            for l in logs.iter_mut() {
                *l -= log_norm;
            }
            let r = d.ratio(n_max);
            let tail = if r < 1.0 {
                logs[n_max].exp() * r / (1.0 - r)
            } else {
                f64::INFINITY
            };
            if tail < TAIL_TOLERANCE {
                d.probs = logs.iter().map(|l| l.exp()).collect();
                d.log_probs = logs;
                d.tail_mass = tail;
                return Ok(d);
            }
            if n_max > MAX_TERMS {
                return Err(Error::Precision(format!(
                    "probability table exceeds {MAX_TERMS} entries"
                )));
            }
            n_max *= 2;
        }
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn statistic(&self) -> Statistic {
        match self.kind {
            DistributionKind::Coherent(_) => Statistic::Coherent,
            DistributionKind::Thermal(_) => Statistic::Thermal,
            DistributionKind::SubPoisson(_) => Statistic::SubPoisson,
            DistributionKind::SuperPoisson(_) => Statistic::SuperPoisson,
            DistributionKind::Custom(_) => Statistic::Custom,
        }
    }

    /// Native parameter (mean or λ); NaN for custom tables.
    pub fn parameter(&self) -> f64 {
        match self.kind {
            DistributionKind::Coherent(v)
            | DistributionKind::Thermal(v)
            | DistributionKind::SubPoisson(v)
            | DistributionKind::SuperPoisson(v) => v,
            DistributionKind::Custom(_) => f64::NAN,
        }
    }

    /// Tabulated P_0..P_N.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_probabilities(&self) -> &[f64] {
        &self.log_probs
    }

    /// Index N of the last tabulated probability.
    pub fn truncation(&self) -> usize {
        self.probs.len() - 1
    }

    /// Upper bound on the probability mass beyond the table.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// P_{n+1}/P_n.
    fn ratio(&self, n: usize) -> f64 {
        let nf = n as f64;
        match &self.kind {
            DistributionKind::Coherent(l) => l / (nf + 1.0),
            DistributionKind::Thermal(m) => m / (m + 1.0),
            DistributionKind::SubPoisson(l) => l / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0)),
            DistributionKind::SuperPoisson(l) => l / (nf + 3.0),
            DistributionKind::Custom(_) => 0.0,
        }
    }

    fn is_finite_support(&self) -> bool {
        matches!(self.kind, DistributionKind::Custom(_)) || self.parameter() == 0.0
    }

    /// Mean photon number from the closed forms (direct sum for custom).
    pub fn closed_form_mean(&self) -> f64 {
        match &self.kind {
            DistributionKind::Coherent(m) | DistributionKind::Thermal(m) => *m,
            DistributionKind::SubPoisson(l) => sub_poisson_mean(*l),
            DistributionKind::SuperPoisson(l) => super_poisson_mean(*l),
            DistributionKind::Custom(p) => p
                .iter()
                .enumerate()
                .map(|(n, p)| n as f64 * p)
                .collect::<CompensatedSum>()
                .value(),
        }
    }

    /// Σ_n w_n P_n where log w_n evolves by `log_step(n)` from `log_w0` at
    /// n = `start`, and `q(n)` bounds the ratio of consecutive summands for
    /// all later n. Summation continues beyond the table until the geometric
    /// remainder bound falls below `rel_tol`·|sum|.
    fn extended_sum(
        &self,
        start: usize,
        log_w0: f64,
        sign: impl Fn(usize) -> f64,
        log_step: impl Fn(usize) -> f64,
        q: impl Fn(usize) -> f64,
        rel_tol: f64,
    ) -> Result<f64> {
        let mut acc = CompensatedSum::default();
        let mut log_w = log_w0;
        let n_tab = self.probs.len();
        let mut log_p = if start < n_tab {
            self.log_probs[start]
        } else {
            let mut l = self.log_probs[n_tab - 1];
            for n in n_tab - 1..start {
                l += self.ratio(n).ln();
            }
            l
        };
        let mut n = start;
        loop {
            let term = (log_p + log_w).exp();
            acc.add(sign(n) * term);
            if n + 1 >= n_tab {
                if self.is_finite_support() {
                    return Ok(acc.value());
                }
                let qn = q(n);
                if qn < 1.0 && term * qn / (1.0 - qn) <= rel_tol * acc.value().abs() {
                    return Ok(acc.value());
                }
                if n > MAX_TERMS {
                    return Err(Error::Precision(format!(
                        "sum not converged after {MAX_TERMS} terms (last term {term:.3e})"
                    )));
                }
            }
            log_p = if n + 1 < n_tab {
                self.log_probs[n + 1]
            } else {
                log_p + self.ratio(n).ln()
            };
            log_w += log_step(n);
            n += 1;
        }
    }

    /// ⟨(a†)^k a^k⟩ = Σ_{n≥k} P_n n(n−1)···(n−k+1).
    pub fn factorial_moment(&self, k: u32) -> Result<f64> {
        match self.kind {
            DistributionKind::Coherent(m) if k > 0 => Ok(m.powi(k as i32)),
            DistributionKind::Thermal(m) if k > 0 => {
                Ok((1..=k).map(f64::from).product::<f64>() * m.powi(k as i32))
            }
            _ => self.factorial_moment_direct(k),
        }
    }

    /// ⟨(a†)^k a^k⟩ summed over the table, with the tail bounded
    /// analytically. Independent of any closed form.
    pub fn factorial_moment_direct(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::invalid("k", "factorial moments start at k = 1"));
        }
        let k = k as usize;
        if self.is_finite_support() && self.probs.len() <= k {
            return Ok(0.0);
        }
        // log of k! at n = k; step n → n+1 multiplies by (n+1)/(n+1−k).
        let log_w0: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
        let kf = k as f64;
        self.extended_sum(
            k,
            log_w0,
            |_| 1.0,
            |n| ((n as f64 + 1.0) / (n as f64 + 1.0 - kf)).ln(),
            |n| self.ratio(n) * (n as f64 + 1.0) / (n as f64 + 1.0 - kf),
            1e-16,
        )
    }

    /// g^(k) = ⟨(a†)^k a^k⟩ / ⟨a†a⟩^k for 1 ≤ k ≤ 10.
    pub fn gk(&self, k: u32) -> Result<f64> {
        if k == 0 || k > MAX_COHERENCE_ORDER {
            return Err(Error::invalid(
                "k",
                format!("coherence order must be in 1..={MAX_COHERENCE_ORDER}, got {k}"),
            ));
        }
        let mean = self.factorial_moment(1)?;
        if mean == 0.0 {
            return Err(Error::Domain(
                "g^(k) undefined for zero mean photon number".into(),
            ));
        }
        if k == 1 {
            return Ok(1.0);
        }
        Ok(self.factorial_moment(k)? / mean.powi(k as i32))
    }

    pub fn mean_and_variance(&self) -> Result<(f64, f64)> {
        let m1 = self.factorial_moment(1)?;
        let m2 = self.factorial_moment(2)?;
        Ok((m1, m2 + m1 - m1 * m1))
    }

    /// Q = variance/mean − 1.
    pub fn mandel_q(&self) -> Result<f64> {
        let (m, v) = self.mean_and_variance()?;
        if m == 0.0 {
            return Err(Error::Domain(
                "Mandel Q undefined for zero mean photon number".into(),
            ));
        }
        Ok(v / m - 1.0)
    }

    /// F(s) = Σ P_n (1 − s)ⁿ from the closed forms.
    pub fn generating_function(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(1.0);
        }
        Ok(match &self.kind {
            DistributionKind::Coherent(m) => (-s * m).exp(),
            DistributionKind::Thermal(m) => {
                let d = 1.0 + m * s;
                if d <= 0.0 {
                    return Err(Error::Pole(s));
                }
                1.0 / d
            }
            DistributionKind::SubPoisson(l) => z_minus_ratio(l * (1.0 - s), *l),
            DistributionKind::SuperPoisson(l) => z_plus_ratio(l * (1.0 - s), *l),
            DistributionKind::Custom(p) => {
                let x = 1.0 - s;
                p.iter().rev().fold(0.0, |acc, pn| acc * x + pn)
            }
        })
    }

    /// Σ P_n |1 − s|ⁿ; bounds the cancellation in a custom F(s).
    pub fn generating_function_magnitude(&self, s: f64) -> Result<f64> {
        self.direct_power_sum(s, true)
    }

    /// F(s) summed term by term over the distribution.
    pub fn generating_function_direct(&self, s: f64) -> Result<f64> {
        self.direct_power_sum(s, false)
    }

    fn direct_power_sum(&self, s: f64, magnitude: bool) -> Result<f64> {
        let x = 1.0 - s;
        if x == 0.0 {
            return Ok(self.probs[0]);
        }
        let ln_x = x.abs().ln();
        let negative = x < 0.0 && !magnitude;
        self.extended_sum(
            0,
            0.0,
            |n| if negative && n % 2 == 1 { -1.0 } else { 1.0 },
            |_| ln_x,
            |n| self.ratio(n) * x.abs(),
            1e-17,
        )
    }
}

/// λ of a sub- or super-Poissonian distribution with the given mean.
pub fn lambda_for_mean(stat: Statistic, mean: f64) -> Result<f64> {
    check_parameter("mean", mean)?;
    let mean_of: fn(f64) -> f64 = match stat {
        Statistic::SubPoisson => sub_poisson_mean,
        Statistic::SuperPoisson => super_poisson_mean,
        _ => {
            return Err(Error::invalid(
                "statistic",
                "λ parameterization exists only for sub and super",
            ))
        }
    };
    if mean == 0.0 {
        return Ok(0.0);
    }
    let mut hi = match stat {
        Statistic::SubPoisson => 4.0 * mean * mean + 4.0,
        _ => mean + 4.0,
    };
    while mean_of(hi) < mean {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain(format!("no λ reaches mean {mean}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean_of(mid) < mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn z_minus_values() {
        assert_eq!(z_minus(0.0), 1.0);
        assert_relative_eq!(
            z_minus(-std::f64::consts::PI.powi(2)),
            -1.0,
            max_relative = 1e-15
        );
        // Σ 4ⁿ/(2n)!
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..40 {
            sum += term;
            term *= 4.0 / ((2 * n + 1) as f64 * (2 * n + 2) as f64);
        }
        assert_relative_eq!(z_minus(4.0), sum, max_relative = 1e-15);
        assert_relative_eq!(z_minus(4.0), 2f64.cosh(), max_relative = 1e-15);
    }

    #[test]
    fn z_plus_values() {
        assert_eq!(z_plus(0.0), 0.5);
        assert_relative_eq!(z_plus(1.0), std::f64::consts::E - 2.0, max_relative = 1e-15);
        let mut term = 0.5;
        let mut sum = 0.0;
        for n in 0..200 {
            sum += term;
            term *= 1e-5 / (n as f64 + 3.0);
        }
        assert_relative_eq!(z_plus(1e-5), sum, max_relative = 1e-14);
        for l in [-3.0, -0.49, 0.49, 0.51, 5.0, 40.0] {
            assert_relative_eq!(
                z_plus(l),
                (l.exp() - l - 1.0) / (l * l),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            ln_z_plus(800.0),
            800.0 - 2.0 * 800f64.ln(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn z_functions_are_continuous_at_zero() {
        for h in [1e-6, 1e-9] {
            assert!((z_minus(h) - z_minus(-h)).abs() < 2.0 * h);
            assert!((z_plus(h) - z_plus(-h)).abs() < 2.0 * h);
        }
    }

    #[test]
    fn tables_are_normalized() {
        for d in [
            PhotonDistribution::coherent(7.0).unwrap(),
            PhotonDistribution::thermal(30.0).unwrap(),
            PhotonDistribution::sub_poisson(9.0).unwrap(),
            PhotonDistribution::super_poisson(9.0).unwrap(),
        ] {
            let s: f64 = d.probabilities().iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "{:?}", d.statistic());
            assert!(d.tail_mass() < TAIL_TOLERANCE);
            assert!(d.truncation() >= 50);
        }
    }

    #[test]
    fn vacuum_parameters() {
        for stat in Statistic::BUILT_IN {
            let d = PhotonDistribution::from_parameter(stat, 0.0).unwrap();
            assert_eq!(d.probabilities(), &[1.0]);
            assert_eq!(d.factorial_moment(1).unwrap(), 0.0);
            assert_eq!(d.generating_function(0.7).unwrap(), 1.0);
            assert!(matches!(d.gk(2), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn poisson_and_thermal_moments() {
        let d = PhotonDistribution::coherent(2.5).unwrap();
        for k in 1..=5 {
            assert_relative_eq!(
                d.factorial_moment(k).unwrap(),
                2.5f64.powi(k as i32),
                max_relative = 1e-13
            );
        }
        let t = PhotonDistribution::thermal(3.0).unwrap();
        let mut fact = 1.0;
        for k in 1..=6 {
            fact *= k as f64;
            assert_relative_eq!(
                t.factorial_moment(k).unwrap(),
                fact * 3f64.powi(k as i32),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(t.gk(2).unwrap(), 2.0, max_relative = 1e-12);
        let (m, v) = t.mean_and_variance().unwrap();
        assert_relative_eq!(m, 3.0, max_relative = 1e-13);
        assert_relative_eq!(v, 12.0, max_relative = 1e-12);
        assert_relative_eq!(t.mandel_q().unwrap(), 3.0, max_relative = 1e-12);
        assert!(d.mandel_q().unwrap().abs() < 1e-12);
    }

    #[test]
    fn sub_poisson_moments_match_brute_force() {
        // Independent sum over n ≤ 400 of λⁿ/(2n)!, normalized.
        let lambda: f64 = 9.0;
        let mut w = vec![1.0f64];
        for n in 0..400 {
            let last = *w.last().unwrap();
            w.push(last * lambda / ((2 * n + 1) as f64 * (2 * n + 2) as f64));
        }
        let z: f64 = w.iter().sum();
        let d = PhotonDistribution::sub_poisson(lambda).unwrap();
        for k in 1..=4u32 {
            let brute: f64 = w
                .iter()
                .enumerate()
                .map(|(n, wn)| {
                    wn / z
                        * (0..k)
                            .map(|i| n as f64 - i as f64)
                            .product::<f64>()
                            .max(0.0)
                })
                .sum();
            assert_relative_eq!(d.factorial_moment(k).unwrap(), brute, max_relative = 1e-13);
        }
        assert_relative_eq!(
            d.factorial_moment(1).unwrap(),
            1.492_582_130_530_095_7,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            d.factorial_moment(2).unwrap(),
            1.503_708_934_734_952_2,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            d.factorial_moment(3).unwrap(),
            1.102_746_391_590_287_0,
            max_relative = 1e-13
        );
        assert!(d.mandel_q().unwrap() < 0.0);

        let s = PhotonDistribution::super_poisson(lambda).unwrap();
        assert_relative_eq!(
            s.factorial_moment(1).unwrap(),
            7.010_008_545_657_609_0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            s.factorial_moment(2).unwrap(),
            51.060_051_273_945_654,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            s.factorial_moment(3).unwrap(),
            381.480_410_191_565_23,
            max_relative = 1e-13
        );
        assert!(s.mandel_q().unwrap() > 0.0);
    }

    #[test]
    fn closed_form_means_agree_with_sums() {
        for l in [1e-4, 0.3, 1.9, 2.1, 9.0, 400.0] {
            let d = PhotonDistribution::sub_poisson(l).unwrap();
            assert_relative_eq!(
                d.closed_form_mean(),
                d.factorial_moment(1).unwrap(),
                max_relative = 1e-12
            );
            let d = PhotonDistribution::super_poisson(l).unwrap();
            assert_relative_eq!(
                d.closed_form_mean(),
                d.factorial_moment(1).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn lambda_inversion() {
        assert_relative_eq!(
            lambda_for_mean(Statistic::SubPoisson, 1.0).unwrap(),
            4.265_621_628_303_496_7,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_for_mean(Statistic::SubPoisson, 10.0).unwrap(),
            400.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_for_mean(Statistic::SuperPoisson, 1.0).unwrap(),
            2.149_125_799_907_062_5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_for_mean(Statistic::SuperPoisson, 10.0).unwrap(),
            11.999_114_509_521_842,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_for_mean(Statistic::SuperPoisson, 100.0).unwrap(),
            102.0,
            max_relative = 1e-12
        );
        assert!(lambda_for_mean(Statistic::Thermal, 1.0).is_err());
        let d = PhotonDistribution::with_mean(Statistic::SuperPoisson, 0.37).unwrap();
        assert_relative_eq!(d.closed_form_mean(), 0.37, max_relative = 1e-13);
    }

    #[test]
    fn generating_function_closed_forms() {
        let p = PhotonDistribution::coherent(2.0).unwrap();
        assert_relative_eq!(
            p.generating_function(1.0).unwrap(),
            (-2f64).exp(),
            max_relative = 1e-15
        );
        let t = PhotonDistribution::thermal(3.0).unwrap();
        assert_relative_eq!(
            t.generating_function(0.5).unwrap(),
            0.4,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            t.generating_function_direct(0.5).unwrap(),
            0.4,
            max_relative = 1e-12
        );
        assert_eq!(
            t.generating_function(-1.0 / 3.0),
            Err(Error::Pole(-1.0 / 3.0))
        );
        for s in [-0.5, 0.0, 0.3, 1.0, 1.7] {
            for d in [
                PhotonDistribution::coherent(4.0).unwrap(),
                PhotonDistribution::thermal(1.5).unwrap(),
                PhotonDistribution::sub_poisson(9.0).unwrap(),
                PhotonDistribution::super_poisson(9.0).unwrap(),
            ] {
                let a = d.generating_function(s).unwrap();
                let b = d.generating_function_direct(s).unwrap();
                assert!(
                    (a - b).abs() < 1e-10,
                    "{:?} s={s}: {a} vs {b}",
                    d.statistic()
                );
            }
        }
    }

    #[test]
    fn large_parameters_do_not_overflow() {
        let d = PhotonDistribution::sub_poisson(40_000.0).unwrap();
        assert_relative_eq!(d.closed_form_mean(), 100.0, max_relative = 1e-14);
        let f = d.generating_function(0.5).unwrap();
        assert!(f.is_finite() && f > 0.0);
        assert!(d.generating_function(3.0).unwrap().abs() <= 1.0);
        let s = PhotonDistribution::super_poisson(2000.0).unwrap();
        let f = s.generating_function(0.01).unwrap();
        assert!(f.is_finite() && f > 0.0 && f < 1.0);
    }

    #[test]
    fn custom_distributions() {
        let d = PhotonDistribution::custom(vec![0.25, 0.5, 0.25 + 1e-9]).unwrap();
        assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_relative_eq!(d.factorial_moment(1).unwrap(), 1.0, max_relative = 1e-8);
        assert_eq!(d.factorial_moment(3).unwrap(), 0.0);
        assert!(PhotonDistribution::custom(vec![0.5, 0.4]).is_err());
        assert!(PhotonDistribution::custom(vec![1.2, -0.2]).is_err());
        assert!(PhotonDistribution::custom(vec![]).is_err());
        let fock = PhotonDistribution::custom(vec![0.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(
            fock.generating_function(1.7).unwrap(),
            0.49,
            max_relative = 1e-14
        );
        assert_relative_eq!(fock.gk(2).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn coherence_order_bounds() {
        let d = PhotonDistribution::coherent(3.0).unwrap();
        assert_eq!(d.gk(1).unwrap(), 1.0);
        assert!(d.gk(0).is_err());
        assert!(d.gk(11).is_err());
        for k in 2..=4 {
            assert_relative_eq!(d.gk(k).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn statistic_names_round_trip() {
        for s in [
            Statistic::Coherent,
            Statistic::Thermal,
            Statistic::SubPoisson,
            Statistic::SuperPoisson,
            Statistic::Custom,
        ] {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("laser".parse::<Statistic>().is_err());
    }

    #[test]
    fn coherent_and_thermal_moments_are_exact() {
        for m in [0.01, 0.7, 3.0, 42.0, 1e3] {
            let c = PhotonDistribution::coherent(m).unwrap();
            let t = PhotonDistribution::thermal(m).unwrap();
            assert_eq!(c.gk(2).unwrap(), 1.0);
            assert_eq!(c.gk(7).unwrap(), 1.0);
            assert_eq!(t.gk(2).unwrap(), 2.0);
            for k in 1..=4 {
                let (a, b) = (
                    c.factorial_moment(k).unwrap(),
                    c.factorial_moment_direct(k).unwrap(),
                );
                assert_relative_eq!(a, b, max_relative = 1e-12);
                let (a, b) = (
                    t.factorial_moment(k).unwrap(),
                    t.factorial_moment_direct(k).unwrap(),
                );
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }
}
