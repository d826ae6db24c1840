//! Bernstein tails, the comparison between quantum and combinatorial
//! discrepancy, and the constants of the lower-bound argument.

use serde::Serialize;

use crate::combdisc::DEFAULT_EXHAUSTIVE_CAP;
use crate::dpp::{size_pmf, DppKernel};
use crate::error::{Error, Result};
use crate::qdisc::{qdisc_estimate_set_system, QdiscOptions};
use crate::setsys::SetSystem;

/// `2·exp(−min(t²/(4 Σ E[Xᵢ²]), t/(2K)))` for independent centered `Xᵢ`
/// with `|Xᵢ| ≤ K`.
pub fn bernstein_tail(variances: &[f64], bound_k: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveT(t));
    }
    if !(bound_k > 0.0) {
        return Err(Error::InvalidArgument(format!("K must be positive, got {bound_k}")));
    }
    if variances.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidArgument("variances must be non-negative".into()));
    }
    let total: f64 = variances.iter().sum();
    let quadratic = if total > 0.0 { t * t / (4.0 * total) } else { f64::INFINITY };
    Ok(2.0 * (-quadratic.min(t / (2.0 * bound_k))).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorVariant {
    /// `2c·ln(2M) + 1`
    Log,
    /// `2c·√ln(2M) + 1`
    SqrtLog,
}

pub fn comparison_factor(m: usize, c: f64, variant: FactorVariant) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    let l = (2.0 * m as f64).ln();
    Ok(match variant {
        FactorVariant::Log => 2.0 * c * l + 1.0,
        FactorVariant::SqrtLog => 2.0 * c * l.sqrt() + 1.0,
    })
}

/// 25 geometrically spaced values from 0.01 to 100.
pub fn default_c_grid() -> Vec<f64> {
    (0..25).map(|i| 0.01 * 10f64.powf(4.0 * i as f64 / 24.0)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub m: usize,
    pub disc: u64,
    pub qdisc_est: f64,
    /// Smallest grid `c` with `disc ≤ (2c·ln(2M) + 1)·qdisc_est`.
    pub min_c_log: Option<f64>,
    /// Same for `2c·√ln(2M) + 1`.
    pub min_c_sqrt_log: Option<f64>,
    /// `qdisc_est ≤ disc` (up to 1e-9).
    pub sandwich: bool,
}

fn smallest_feasible_c(disc: f64, qdisc: f64, m: usize, grid: &[f64], variant: FactorVariant) -> Result<Option<f64>> {
    for &c in grid {
        if disc <= comparison_factor(m, c, variant)? * qdisc + 1e-9 {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Exact discrepancy, quantum estimate of the embedded system, and the
/// smallest grid constants for which the comparison inequality holds.
pub fn comparison_check(s: &SetSystem, c_grid: &[f64], opts: &QdiscOptions) -> Result<ComparisonRow> {
    let n = s.ground_size();
    if n > DEFAULT_EXHAUSTIVE_CAP {
        return Err(Error::GroundSetTooLarge { n, cap: DEFAULT_EXHAUSTIVE_CAP });
    }
    let mut grid = c_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let est = qdisc_estimate_set_system::<f64>(s, opts)?;
    let m = s.len();
    let disc = est.disc as f64;
    let q = est.qdisc.value;
    Ok(ComparisonRow {
        n,
        m,
        disc: est.disc,
        qdisc_est: q,
        min_c_log: smallest_feasible_c(disc, q, m, &grid, FactorVariant::Log)?,
        min_c_sqrt_log: smallest_feasible_c(disc, q, m, &grid, FactorVariant::SqrtLog)?,
        sandwich: q <= disc + 1e-9,
    })
}

/// `(ε, ζ) = (1/20, 1/(2√(10(1+α))))`, checked against
/// `1/5 − ζ²(1+α) − 2ε > 0`.
pub fn lower_bound_constants(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let epsilon = 1.0 / 20.0;
    let zeta = 1.0 / (2.0 * (10.0 * (1.0 + alpha)).sqrt());
    let slack = 0.2 - zeta * zeta * (1.0 + alpha) - 2.0 * epsilon;
    if !(slack > 0.0) {
        return Err(Error::ConditionViolated(format!("1/5 − ζ²(1+α) − 2ε = {slack}")));
    }
    Ok((epsilon, zeta))
}

/// Exact tail `P[|X − EX| ≥ t]` of the size of a determinantal process next
/// to the Bernstein bound for the independent-Bernoulli decomposition of its
/// size.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailComparison {
    pub t: f64,
    pub exact_tail: f64,
    pub bound: f64,
}

pub fn size_tail_vs_bernstein(k: &DppKernel<f64>, t_grid: &[f64]) -> Result<Vec<TailComparison>> {
    let pmf = size_pmf(k);
    let lambdas: Vec<f64> = k.eigenvalues().iter().copied().collect();
    let mean: f64 = lambdas.iter().sum();
    let variances: Vec<f64> = lambdas.iter().map(|l| l * (1.0 - l)).collect();
    let bound_k = lambdas.iter().map(|l| l.max(1.0 - l)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    t_grid
        .iter()
        .map(|&t| {
            let exact_tail: f64 = pmf
                .iter()
                .enumerate()
                .filter(|(x, _)| (*x as f64 - mean).abs() >= t * (1.0 - 1e-12))
                .map(|(_, p)| p.max(0.0))
                .sum();
            Ok(TailComparison { t, exact_tail, bound: bernstein_tail(&variances, bound_k, t)? })
        })
        .collect()
}
