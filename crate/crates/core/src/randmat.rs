//! Haar-random unitaries, colorings and projections, the exact Haar moment
//! formulas, Monte Carlo gates comparing the two, and the empirical
//! concentration probe.

use nalgebra::ComplexField;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, OrthogonalProjection, QuantumColoring};
use crate::scalar::{Field, Real, C};
use crate::seeding::{self, stream};
use crate::setsys::ProjectionSystem;
use crate::stats::{mean_se, MeanSe};

/// Haar unitary: QR of a standard complex Gaussian matrix with each column
/// of `Q` multiplied by the phase of the matching diagonal entry of `R`.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::<T>::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C::new(T::lit(re * scale), T::lit(im * scale))
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let modulus = d.modulus();
        if modulus > T::zero() {
            let phase = d.unscale(modulus);
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// `U D_k U*` for Haar `U` and `k` plus signs.
pub fn random_coloring_with_plus_count<T: Real, R: Rng + ?Sized>(
    n: usize,
    plus_count: usize,
    rng: &mut R,
) -> Result<QuantumColoring<T>> {
    if n == 0 {
        return Err(Error::DegenerateDim(0));
    }
    QuantumColoring::from_unitary(&haar_unitary::<T, _>(n, rng), plus_count)
}

/// Random quantum coloring with `⌊N/2⌋` plus signs.
pub fn random_quantum_coloring<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuantumColoring<T>> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    random_coloring_with_plus_count(n, n / 2, rng)
}

/// Projection onto the span of the first `rank` columns of a Haar unitary.
pub fn random_projection_of_rank<T: Real, R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
) -> Result<OrthogonalProjection<T>> {
    if n == 0 {
        return Err(Error::DegenerateDim(0));
    }
    if rank > n {
        return Err(Error::InvalidArgument(format!("rank {rank} exceeds dimension {n}")));
    }
    let u = haar_unitary::<T, _>(n, rng);
    OrthogonalProjection::from_orthonormal_columns(u.columns(0, rank).into_owned())
}

/// Random projection of rank `⌊N/2⌋`.
pub fn random_projection<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OrthogonalProjection<T>> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    random_projection_of_rank(n, n / 2, rng)
}

/// `M` independent random projections; projection `j` uses its own stream of
/// `seed`.
pub fn random_projection_system<T: Real>(n: usize, m: usize, seed: u64) -> Result<ProjectionSystem<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let projections = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut rng = seeding::rng_for(seed, &[stream::PROJECTION, j as u64]);
            random_projection(n, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectionSystem::new(projections)
}

// ---------------------------------------------------------------------------
// Exact moments

fn check_dim_rank(n: usize, r: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    if r > n {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds dimension {n}")));
    }
    Ok(())
}

fn int<F: Field>(x: usize) -> F {
    F::from_int(x as i64)
}

/// `E[tr(χP)]` for a random coloring with `⌊N/2⌋` plus signs and a fixed
/// projection of rank `r`: `tr(D)·r/N`.
pub fn exact_mean_trace<F: Field>(n: usize, r: usize) -> Result<F> {
    check_dim_rank(n, r)?;
    let tr_d = F::from_int(2 * (n / 2) as i64 - n as i64);
    Ok(tr_d * int(r) / int(n))
}

/// `E[tr((χP)²)]` for a random coloring with `⌊N/2⌋` plus signs and a fixed
/// projection of rank `r`.
pub fn exact_mean_trace_sq<F: Field>(n: usize, r: usize) -> Result<F> {
    check_dim_rank(n, r)?;
    if n % 2 == 0 {
        let (nf, rf): (F, F) = (int(n), int(r));
        Ok((nf.clone() * rf.clone() * rf.clone() - rf) / (nf.clone() * nf - F::one()))
    } else {
        Ok(int::<F>(r * r) / int(n))
    }
}

/// `E[tr((χP)²)]` for fixed `χ` with `tr χ = t` and either `χ` or `P` of rank
/// `r` Haar-rotated:
/// `t²·r(N−r)/(N(N²−1)) + r(Nr−1)/(N²−1)`.
pub fn exact_mean_trace_sq_general<F: Field>(n: usize, r: usize, trace_chi: i64) -> Result<F> {
    check_dim_rank(n, r)?;
    if trace_chi.unsigned_abs() as usize > n || (trace_chi + n as i64) % 2 != 0 {
        return Err(Error::InvalidArgument(format!("trace {trace_chi} is not of the form 2k − {n}")));
    }
    let (nf, rf): (F, F) = (int(n), int(r));
    let t = F::from_int(trace_chi);
    let n2m1 = nf.clone() * nf.clone() - F::one();
    let first = t.clone() * t * rf.clone() * (nf.clone() - rf.clone()) / (nf.clone() * n2m1.clone());
    let second = rf.clone() * (nf * rf - F::one()) / n2m1;
    Ok(first + second)
}

/// `E[tr((χP)²)]` for fixed `χ` with trace `trace_chi` and a random
/// projection of rank `⌊N/2⌋`.
pub fn exact_mean_trace_sq_fixed_coloring<F: Field>(n: usize, trace_chi: i64) -> Result<F> {
    exact_mean_trace_sq_general(n, n / 2, trace_chi)
}

/// The four Haar fourth moments of an `N × N` unitary (indices distinct
/// where written distinct).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarFourthMoments<F> {
    /// `E|U_ij|⁴`
    pub abs4: F,
    /// `E|U_ij|²|U_in|²` and `E|U_ij|²|U_mj|²`
    pub shared_line: F,
    /// `E|U_ij|²|U_mn|²`
    pub disjoint: F,
    /// `E[U_ij U_mn Ū_mj Ū_in]`
    pub cross: F,
}

pub fn haar_fourth_moments<F: Field>(n: usize) -> Result<HaarFourthMoments<F>> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    let nf: F = int(n);
    let np1 = nf.clone() + F::one();
    let n2m1 = nf.clone() * nf.clone() - F::one();
    Ok(HaarFourthMoments {
        abs4: F::from_int(2) / (nf.clone() * np1.clone()),
        shared_line: F::one() / (nf.clone() * np1),
        disjoint: F::one() / n2m1.clone(),
        cross: -(F::one() / (nf * n2m1)),
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo gates

/// One Monte Carlo estimate checked against an exact value.
#[derive(Clone, Debug, Serialize)]
pub struct MomentGate {
    pub family: String,
    pub n: usize,
    /// Rank, plus count or index label, depending on the family.
    pub param: i64,
    pub exact: f64,
    pub estimate: MeanSe,
    pub z: f64,
    pub pass: bool,
}

fn gate(family: &str, n: usize, param: i64, exact: f64, values: &[f64], z_max: f64) -> MomentGate {
    let estimate = mean_se(values);
    let z = estimate.z_score(exact, 1e-9);
    MomentGate { family: family.to_string(), n, param, exact, estimate, z, pass: z.abs() <= z_max }
}

// Per-trial values for every prefix rank r = 0..=N of a fixed basis `w`:
// tr(χP_r) and tr((χP_r)²), where P_r projects onto the first r columns.
fn prefix_traces(chi: &CMatrix<f64>, w: &CMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = w.nrows();
    let g = w.adjoint() * chi * w;
    let mut t1 = vec![0.0; n + 1];
    let mut t2 = vec![0.0; n + 1];
    for r in 1..=n {
        let k = r - 1;
        t1[r] = t1[r - 1] + g[(k, k)].re;
        let mut add = g[(k, k)].norm_sqr();
        for j in 0..k {
            add += 2.0 * g[(k, j)].norm_sqr();
        }
        t2[r] = t2[r - 1] + add;
    }
    (t1, t2)
}

/// Monte Carlo checks of every exact Haar formula at dimension `n`:
/// the mean of `tr(χP)` and of `tr((χP)²)` for each rank, the fixed-coloring
/// second moment for each plus count, and the fourth moments. Each gate
/// passes when its z-score is at most `z_max` in absolute value.
pub fn moment_gates(n: usize, trials: usize, seed: u64, z_max: f64) -> Result<Vec<MomentGate>> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    if trials < 2 {
        return Err(Error::InvalidArgument("at least two trials are needed".into()));
    }
    let nn = n as u64;
    let mut gates = Vec::new();

    // random coloring, fixed projections of every rank
    let w = haar_unitary::<f64, _>(n, &mut seeding::rng_for(seed, &[stream::HAAR, nn, 0]));
    let per_trial: Vec<(Vec<f64>, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::rng_for(seed, &[stream::HAAR, nn, 1, t as u64]);
            let chi = random_quantum_coloring::<f64, _>(n, &mut rng).expect("n >= 2");
            prefix_traces(chi.matrix(), &w)
        })
        .collect();
    for r in 0..=n {
        let v1: Vec<f64> = per_trial.iter().map(|(a, _)| a[r]).collect();
        let v2: Vec<f64> = per_trial.iter().map(|(_, b)| b[r]).collect();
        gates.push(gate("mean_trace", n, r as i64, exact_mean_trace::<f64>(n, r)?, &v1, z_max));
        gates.push(gate("mean_trace_sq", n, r as i64, exact_mean_trace_sq::<f64>(n, r)?, &v2, z_max));
    }

    // fixed colorings of every plus count, random projection of rank ⌊N/2⌋
    let v = haar_unitary::<f64, _>(n, &mut seeding::rng_for(seed, &[stream::HAAR, nn, 2]));
    let rank = n / 2;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::rng_for(seed, &[stream::HAAR, nn, 3, t as u64]);
            let p = random_projection::<f64, _>(n, &mut rng).expect("n >= 2");
            // a = P-basis* V; tr((χ_k P)²) = ‖a D_k a*‖_F² with χ_k = V D_k V*
            let a = p.basis().adjoint() * &v;
            let mut m = -(&a * a.adjoint());
            let mut out = Vec::with_capacity(n + 1);
            out.push(m.norm_squared());
            for k in 0..n {
                let col = a.column(k);
                m += (&col * col.adjoint()) * C::new(2.0, 0.0);
                out.push(m.norm_squared());
            }
            out
        })
        .collect();
    for k in 0..=n {
        let vals: Vec<f64> = per_trial.iter().map(|row| row[k]).collect();
        let trace = 2 * k as i64 - n as i64;
        let exact = exact_mean_trace_sq_general::<f64>(n, rank, trace)?;
        gates.push(gate("fixed_coloring_trace_sq", n, k as i64, exact, &vals, z_max));
    }

    // fourth moments at fixed indices (i, j, m, n') = (0, 0, 1, 1)
    let per_trial: Vec<[f64; 5]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::rng_for(seed, &[stream::HAAR, nn, 4, t as u64]);
            let u = haar_unitary::<f64, _>(n, &mut rng);
            let a = u[(0, 0)].norm_sqr();
            [
                a * a,
                a * u[(0, 1)].norm_sqr(),
                a * u[(1, 0)].norm_sqr(),
                a * u[(1, 1)].norm_sqr(),
                (u[(0, 0)] * u[(1, 1)] * u[(1, 0)].conj() * u[(0, 1)].conj()).re,
            ]
        })
        .collect();
    let exact = haar_fourth_moments::<f64>(n)?;
    let targets = [
        ("fourth_abs4", exact.abs4),
        ("fourth_same_row", exact.shared_line),
        ("fourth_same_column", exact.shared_line),
        ("fourth_disjoint", exact.disjoint),
        ("fourth_cross", exact.cross),
    ];
    for (idx, (name, value)) in targets.iter().enumerate() {
        let vals: Vec<f64> = per_trial.iter().map(|row| row[idx]).collect();
        gates.push(gate(name, n, 0, *value, &vals, z_max));
    }
    Ok(gates)
}

// ---------------------------------------------------------------------------
// Concentration probe

/// Empirical tails of `f₁ = tr(χP)` and `f₂ = tr(P − (χP)²)` around their
/// exact means, and the fitted constants `ĉ` in `P[|f − Ef| ≥ δN] ≈ 2e^{−cN²δ²}`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub trials: usize,
    pub rank: usize,
    pub deltas: Vec<f64>,
    pub tail_f1: Vec<f64>,
    pub tail_f2: Vec<f64>,
    pub mean_f1: f64,
    pub mean_f2: f64,
    pub c_hat_f1: Option<f64>,
    pub c_hat_f2: Option<f64>,
    /// Number of grid points entering each fit.
    pub fit_points_f1: usize,
    pub fit_points_f2: usize,
}

impl ProbeReport {
    /// The smaller of the two fitted constants, if either fit had data.
    pub fn c_hat(&self) -> Option<f64> {
        match (self.c_hat_f1, self.c_hat_f2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Default deviation grid `δ = 0.02, 0.04, …, 0.40`.
pub fn default_probe_deltas() -> Vec<f64> {
    (1..=20).map(|i| 0.02 * i as f64).collect()
}

/// Minimum number of exceedances for a grid point to enter the fit.
const MIN_EXCEEDANCES: usize = 5;

pub fn concentration_probe(n: usize, trials: usize, deltas: &[f64], seed: u64) -> Result<ProbeReport> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    if trials < 1000 {
        return Err(Error::InvalidArgument("the probe needs at least 1000 trials".into()));
    }
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidArgument("deviations must be positive and finite".into()));
    }
    let mut deltas = deltas.to_vec();
    deltas.sort_by(f64::total_cmp);

    let rank = n / 2;
    let p = random_projection::<f64, _>(n, &mut seeding::rng_for(seed, &[stream::PROBE, 0]))?;
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::rng_for(seed, &[stream::PROBE, 1, t as u64]);
            let chi = random_quantum_coloring::<f64, _>(n, &mut rng).expect("n >= 2");
            let g = p.basis().adjoint() * chi.matrix() * p.basis();
            let f1 = g.trace().re;
            let f2 = rank as f64 - g.norm_squared();
            (f1, f2)
        })
        .collect();

    let mean_f1 = exact_mean_trace::<f64>(n, rank)?;
    let mean_f2 = rank as f64 - exact_mean_trace_sq::<f64>(n, rank)?;
    let tail = |which: usize, mean: f64| -> (Vec<f64>, Vec<usize>) {
        let dev: Vec<f64> = samples
            .iter()
            .map(|s| (if which == 0 { s.0 } else { s.1 } - mean).abs())
            .collect();
        let counts: Vec<usize> = deltas
            .iter()
            .map(|&d| dev.iter().filter(|&&x| x >= d * n as f64).count())
            .collect();
        (counts.iter().map(|&c| c as f64 / trials as f64).collect(), counts)
    };
    let (tail_f1, counts_f1) = tail(0, mean_f1);
    let (tail_f2, counts_f2) = tail(1, mean_f2);
    let (c_hat_f1, fit_points_f1) = fit_constant(n, &deltas, &tail_f1, &counts_f1);
    let (c_hat_f2, fit_points_f2) = fit_constant(n, &deltas, &tail_f2, &counts_f2);

    Ok(ProbeReport {
        n,
        trials,
        rank,
        deltas,
        tail_f1,
        tail_f2,
        mean_f1,
        mean_f2,
        c_hat_f1,
        c_hat_f2,
        fit_points_f1,
        fit_points_f2,
    })
}

// Least squares through the origin of log(p/2) against −N²δ².
fn fit_constant(n: usize, deltas: &[f64], tails: &[f64], counts: &[usize]) -> (Option<f64>, usize) {
    let n2 = (n * n) as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut used = 0;
    for ((&d, &p), &c) in deltas.iter().zip(tails).zip(counts) {
        if c < MIN_EXCEEDANCES || p >= 1.0 {
            continue;
        }
        let x = n2 * d * d;
        let y = (p / 2.0).ln();
        sxy += x * y;
        sxx += x * x;
        used += 1;
    }
    if used == 0 {
        return (None, 0);
    }
    (Some(-sxy / sxx), used)
}
