//! The quantum-discrepancy objective, identities it satisfies, a local
//! minimizer over quantum colorings, and the per-projection thresholds of
//! the random-coloring upper bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::combdisc::{disc_exact, disc_heuristic, DEFAULT_EXHAUSTIVE_CAP};
use crate::dpp::{expected_squared_imbalance, DppKernel};
use crate::error::{Error, Result};
use crate::matcore::{commutator, schatten_norm, CMatrix, OrthogonalProjection, QuantumColoring, SchattenP};
use crate::randmat::haar_unitary;
use crate::scalar::{Real, C};
use crate::seeding::{self, stream};
use crate::setsys::{to_projection_system, ProjectionSystem, SetSystem};

/// `χ(P)² = (tr χP)² + tr(P − (χP)²)` split into its two terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObjectiveValue<T> {
    pub trace_term: T,
    pub commutator_term: T,
    pub value: T,
}

fn agreement_tol<T: Real>(n: usize) -> T {
    T::lit(1e-9).max(T::identity_tol() * T::lit(10.0)) * T::from_usize(n.max(1)).unwrap()
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimMismatch { expected: a, found: b });
    }
    Ok(())
}

// Terms from the compressed matrix G = V*χV for an orthonormal basis V of P.
fn terms_from_compression<T: Real>(g: &CMatrix<T>) -> (T, T) {
    let tr = g.trace().re;
    let r = T::from_usize(g.nrows()).unwrap();
    (tr * tr, r - g.norm_squared())
}

fn value_from_terms<T: Real>(trace_term: T, commutator_term: T) -> ObjectiveValue<T> {
    let sq = (trace_term + commutator_term).max(T::zero());
    ObjectiveValue { trace_term, commutator_term, value: sq.sqrt() }
}

/// Evaluates the objective and checks the commutator term against
/// `tr(χ[χ, P]P)`.
pub fn objective<T: Real>(chi: &QuantumColoring<T>, p: &OrthogonalProjection<T>) -> Result<ObjectiveValue<T>> {
    check_dims(chi.dim(), p.dim())?;
    let v = p.basis();
    let g = v.adjoint() * chi.matrix() * v;
    let (trace_term, commutator_term) = terms_from_compression(&g);

    let comm = commutator(chi.hermitian(), p.hermitian())?;
    let alt = (chi.matrix() * comm * p.matrix()).trace().re;
    if (alt - commutator_term).abs() > agreement_tol::<T>(chi.dim()) {
        return Err(Error::IdentityViolation(format!(
            "commutator term {commutator_term} disagrees with tr(χ[χ,P]P) = {alt}"
        )));
    }
    Ok(value_from_terms(trace_term, commutator_term))
}

/// Objective without the commutator cross-check.
pub fn objective_fast<T: Real>(chi: &QuantumColoring<T>, p: &OrthogonalProjection<T>) -> Result<ObjectiveValue<T>> {
    check_dims(chi.dim(), p.dim())?;
    let v = p.basis();
    let (a, b) = terms_from_compression(&(v.adjoint() * chi.matrix() * v));
    Ok(value_from_terms(a, b))
}

/// Objective values of every projection of a system.
pub fn objectives<T: Real>(chi: &QuantumColoring<T>, system: &ProjectionSystem<T>) -> Result<Vec<ObjectiveValue<T>>> {
    system.iter().map(|p| objective(chi, p)).collect()
}

/// `max_P χ(P)` over a system.
pub fn max_objective<T: Real>(chi: &QuantumColoring<T>, system: &ProjectionSystem<T>) -> Result<T> {
    Ok(objectives(chi, system)?.into_iter().fold(T::zero(), |m, o| m.max(o.value)))
}

/// The imbalance of the determinantal process with kernel `(χ + I)/2` on a
/// coordinate set, next to the squared objective on the matching coordinate
/// projection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DppConsistency<T> {
    pub expected_imbalance: T,
    pub objective_sq: T,
    pub difference: T,
}

pub fn objective_vs_dpp<T: Real>(chi: &QuantumColoring<T>, s: &[usize]) -> Result<DppConsistency<T>> {
    let kernel = DppKernel::from_coloring(chi)?;
    let expected_imbalance = expected_squared_imbalance(&kernel, s)?;
    let p = OrthogonalProjection::coordinate(chi.dim(), s)?;
    let o = objective(chi, &p)?;
    let objective_sq = o.trace_term + o.commutator_term;
    Ok(DppConsistency { expected_imbalance, objective_sq, difference: (expected_imbalance - objective_sq).abs() })
}

/// Both sides of the diagonal-entry identity
/// `(tr χP)² − tr((χP)²) = 2 Σ_{i<j} χ'_ii χ'_jj (P'_ii P'_jj − |P'_ij|²)`
/// in an eigenbasis of `χ`, and the trivial bound `χ(P) ≤ N`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrivialBoundRecord<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
    pub value: T,
    pub within_bound: bool,
}

pub fn trivial_bound_check<T: Real>(chi: &QuantumColoring<T>, p: &OrthogonalProjection<T>) -> Result<TrivialBoundRecord<T>> {
    check_dims(chi.dim(), p.dim())?;
    let n = chi.dim();
    let chip = chi.matrix() * p.matrix();
    let tr = chip.trace().re;
    let lhs = tr * tr - (&chip * &chip).trace().re;

    let sd = chi.hermitian().spectral_decompose()?;
    let d: Vec<T> = sd.eigenvalues.iter().map(|&l| if l > T::zero() { T::one() } else { -T::one() }).collect();
    let pr = sd.eigenvectors.adjoint() * p.matrix() * &sd.eigenvectors;
    let mut rhs = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            rhs += d[i] * d[j] * (pr[(i, i)].re * pr[(j, j)].re - pr[(i, j)].norm_sqr());
        }
    }
    rhs *= T::lit(2.0);
    let value = objective(chi, p)?.value;
    let nf = T::from_usize(n).unwrap();
    Ok(TrivialBoundRecord {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        value,
        within_bound: value <= nf + T::lit(1e-9),
    })
}

/// The two Lipschitz inequalities for `tr(χP)` and `tr(P − (χP)²)` as
/// functions of `χ` in the Frobenius norm, at a projection of rank `⌊N/2⌋`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LipschitzRecord<T> {
    pub trace_gap: T,
    pub trace_bound: T,
    pub commutator_gap: T,
    pub commutator_bound: T,
    pub holds: bool,
}

pub fn lipschitz_check<T: Real>(
    p: &OrthogonalProjection<T>,
    chi1: &QuantumColoring<T>,
    chi2: &QuantumColoring<T>,
) -> Result<LipschitzRecord<T>> {
    let n = p.dim();
    check_dims(n, chi1.dim())?;
    check_dims(n, chi2.dim())?;
    if p.rank() != n / 2 {
        return Err(Error::RankMismatch { expected: n / 2, found: p.rank() });
    }
    let o1 = objective_fast(chi1, p)?;
    let o2 = objective_fast(chi2, p)?;
    let dist = schatten_norm(&(chi1.matrix() - chi2.matrix()), SchattenP::Two);
    let nf = T::from_usize(n).unwrap();
    let trace_gap = (o1.trace_term.sqrt() - o2.trace_term.sqrt()).abs();
    let trace_bound = (nf / T::lit(2.0)).sqrt() * dist;
    let commutator_gap = (o1.commutator_term - o2.commutator_term).abs();
    let commutator_bound = T::lit(2.0) * nf * dist;
    let slack = T::lit(1e-9);
    Ok(LipschitzRecord {
        trace_gap,
        trace_bound,
        commutator_gap,
        commutator_bound,
        holds: trace_gap <= trace_bound + slack && commutator_gap <= commutator_bound + slack,
    })
}

// ---------------------------------------------------------------------------
// Thresholds of the random-coloring bound

/// `Δ = √2·[√((1/c)·ln(8M) + N²r/(N²−1) − N r²/(N²−1)) + r/N]` for a
/// projection of rank `r` in dimension `N ≥ 2`.
pub fn delta_p_value(n: usize, rank: usize, m: usize, c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::DegenerateDim(n));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    if rank > n {
        return Err(Error::InvalidArgument(format!("rank {rank} exceeds dimension {n}")));
    }
    let (nf, r) = (n as f64, rank as f64);
    let n2m1 = nf * nf - 1.0;
    let inner = (8.0 * m as f64).ln() / c + nf * nf / n2m1 * r - nf / n2m1 * r * r;
    Ok(std::f64::consts::SQRT_2 * (inner.max(0.0).sqrt() + r / nf))
}

pub fn delta_p<T: Real>(p: &OrthogonalProjection<T>, m: usize, c: f64) -> Result<f64> {
    delta_p_value(p.dim(), p.rank(), m, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEventRecord {
    pub values: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub satisfied: Vec<bool>,
    pub all_satisfied: bool,
}

/// Checks `χ(P_j) ≤ Δ_{P_j}` for every member of the system, with `M` the
/// size of the system.
pub fn check_delta_event<T: Real>(system: &ProjectionSystem<T>, chi: &QuantumColoring<T>, c: f64) -> Result<DeltaEventRecord> {
    check_dims(system.dim(), chi.dim())?;
    let m = system.len();
    let mut values = Vec::with_capacity(m);
    let mut thresholds = Vec::with_capacity(m);
    for p in system.iter() {
        values.push(objective_fast(chi, p)?.value.to_f64_lossy());
        thresholds.push(delta_p(p, m, c)?);
    }
    let satisfied: Vec<bool> = values.iter().zip(&thresholds).map(|(v, t)| v <= t).collect();
    let all_satisfied = satisfied.iter().all(|&s| s);
    Ok(DeltaEventRecord { values, thresholds, satisfied, all_satisfied })
}

// ---------------------------------------------------------------------------
// Minimization

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QdiscOptions {
    /// Haar restarts per plus count.
    pub restarts: usize,
    /// Maximum number of plane sweeps per start.
    pub sweeps: usize,
    pub seed: u64,
    /// Plus counts to scan; all of `0..=N` when `None`.
    pub plus_counts: Option<Vec<usize>>,
}

impl Default for QdiscOptions {
    fn default() -> Self {
        Self { restarts: 4, sweeps: 30, seed: 0, plus_counts: None }
    }
}

/// Best coloring found. `value` is an upper estimate of the quantum
/// discrepancy.
#[derive(Clone, Debug)]
pub struct QdiscEstimate<T: Real> {
    pub value: T,
    pub witness: QuantumColoring<T>,
    pub plus_count: usize,
    pub restarts_used: usize,
    /// The winning start stopped because a full sweep made no progress.
    pub converged: bool,
    pub per_projection: Vec<ObjectiveValue<T>>,
}

const GRID: usize = 64;
const REFINEMENTS: usize = 3;

#[derive(Clone, Copy)]
enum Generator {
    Real,
    Imaginary,
}

// Running state of one start: χ = U D_k U* with D_k = diag(+1 ×k, −1 ×(N−k)),
// A_m = U* V_m, C_m = A_m* D_k A_m, f_m = (tr C_m)² + r_m − ‖C_m‖².
struct Search<'a, T: Real> {
    bases: &'a [CMatrix<T>],
    k: usize,
    u: CMatrix<T>,
    a: Vec<CMatrix<T>>,
    c: Vec<CMatrix<T>>,
    f: Vec<T>,
}

// Closed form of f(φ) when C(φ) = R + cos φ·Z + sin φ·W.
struct Quadratic<T> {
    tr: [T; 3],
    rr: T,
    zz: T,
    ww: T,
    rz: T,
    rw: T,
    zw: T,
    rank: T,
}

impl<T: Real> Quadratic<T> {
    fn eval(&self, phi: T) -> T {
        let (s, c) = phi.sin_cos();
        let tr = self.tr[0] + c * self.tr[1] + s * self.tr[2];
        let norm = self.rr
            + c * c * self.zz
            + s * s * self.ww
            + T::lit(2.0) * (c * self.rz + s * self.rw + c * s * self.zw);
        tr * tr + self.rank - norm
    }
}

fn re_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc + (x.conj() * y).re)
}

fn row<T: Real>(m: &CMatrix<T>, i: usize) -> CMatrix<T> {
    m.rows(i, 1).into_owned()
}

impl<'a, T: Real> Search<'a, T> {
    fn new(bases: &'a [CMatrix<T>], u: CMatrix<T>, k: usize) -> Self {
        let mut s = Self { bases, k, u, a: Vec::new(), c: Vec::new(), f: Vec::new() };
        s.refresh();
        s
    }

    fn refresh(&mut self) {
        let n = self.u.nrows();
        let ua = self.u.adjoint();
        self.a = self.bases.iter().map(|v| &ua * v).collect();
        self.c = self
            .a
            .iter()
            .map(|a| {
                let mut da = a.clone();
                for i in self.k..n {
                    da.row_mut(i).neg_mut();
                }
                a.adjoint() * da
            })
            .collect();
        self.f = self
            .c
            .iter()
            .map(|g| {
                let (x, y) = terms_from_compression(g);
                x + y
            })
            .collect();
    }

    fn worst(&self) -> T {
        self.f.iter().fold(T::zero(), |m, &x| m.max(x))
    }

    // Z and W for plane (i, j), i in the +1 block and j in the −1 block.
    fn directions(&self, m: usize, i: usize, j: usize, gen: Generator) -> (CMatrix<T>, CMatrix<T>) {
        let x = row(&self.a[m], i);
        let y = row(&self.a[m], j);
        let (xh, yh) = (x.adjoint(), y.adjoint());
        let z = &xh * &x - &yh * &y;
        let w = match gen {
            Generator::Real => -(&xh * &y + &yh * &x),
            Generator::Imaginary => {
                let iu = C::new(T::zero(), T::one());
                (&xh * &y - &yh * &x) * iu
            }
        };
        (z, w)
    }

    fn try_plane(&mut self, i: usize, j: usize, gen: Generator) -> bool {
        let dirs: Vec<(CMatrix<T>, CMatrix<T>)> =
            (0..self.bases.len()).map(|m| self.directions(m, i, j, gen)).collect();
        let quads: Vec<Quadratic<T>> = dirs
            .iter()
            .zip(&self.c)
            .zip(self.bases)
            .map(|(((z, w), c), v)| {
                let r = c - z;
                Quadratic {
                    tr: [r.trace().re, z.trace().re, w.trace().re],
                    rr: r.norm_squared(),
                    zz: z.norm_squared(),
                    ww: w.norm_squared(),
                    rz: re_inner(&r, z),
                    rw: re_inner(&r, w),
                    zw: re_inner(z, w),
                    rank: T::from_usize(v.ncols()).unwrap(),
                }
            })
            .collect();
        let worst = |phi: T| quads.iter().fold(T::zero(), |m, q| m.max(q.eval(phi)));

        let current = self.worst();
        let two_pi = T::two_pi();
        let mut step = two_pi / T::from_usize(GRID).unwrap();
        let mut best = (current, T::zero());
        for g in 1..GRID {
            let phi = step * T::from_usize(g).unwrap();
            let v = worst(phi);
            if v < best.0 {
                best = (v, phi);
            }
        }
        for _ in 0..REFINEMENTS {
            step /= T::lit(2.0);
            let centre = best.1;
            for phi in [centre - step, centre + step] {
                let v = worst(phi);
                if v < best.0 {
                    best = (v, phi);
                }
            }
        }
        let threshold = current - T::lit(1e-12) * current.max(T::one());
        if !(best.0 < threshold) {
            return false;
        }
        self.apply(i, j, gen, best.1, &dirs);
        true
    }

    fn apply(&mut self, i: usize, j: usize, gen: Generator, phi: T, dirs: &[(CMatrix<T>, CMatrix<T>)]) {
        let (s2, c2) = phi.sin_cos();
        let (s, c) = (phi / T::lit(2.0)).sin_cos();
        let (cs, ss) = (C::new(c, T::zero()), C::new(s, T::zero()));
        let g = match gen {
            Generator::Real => [[cs, -ss], [ss, cs]],
            Generator::Imaginary => {
                let is = C::new(T::zero(), s);
                [[cs, is], [is, cs]]
            }
        };
        for (m, a) in self.a.iter_mut().enumerate() {
            let x = row(a, i);
            let y = row(a, j);
            a.set_row(i, &(&x * g[0][0] + &y * g[0][1]).row(0));
            a.set_row(j, &(&x * g[1][0] + &y * g[1][1]).row(0));
            let (z, w) = &dirs[m];
            let r = &self.c[m] - z;
            self.c[m] = r + z * C::new(c2, T::zero()) + w * C::new(s2, T::zero());
            let (t1, t2) = terms_from_compression(&self.c[m]);
            self.f[m] = t1 + t2;
        }
        // U ← U gᴴ on columns i, j
        let ui = self.u.column(i).into_owned();
        let uj = self.u.column(j).into_owned();
        self.u.set_column(i, &(&ui * g[0][0].conj() + &uj * g[0][1].conj()));
        self.u.set_column(j, &(&ui * g[1][0].conj() + &uj * g[1][1].conj()));
    }

    /// Runs up to `sweeps` sweeps; true if the last sweep made no progress.
    fn run(&mut self, sweeps: usize) -> bool {
        let n = self.u.nrows();
        if self.k == 0 || self.k == n {
            return true;
        }
        for _ in 0..sweeps {
            let mut improved = false;
            for i in 0..self.k {
                for j in self.k..n {
                    improved |= self.try_plane(i, j, Generator::Real);
                    improved |= self.try_plane(i, j, Generator::Imaginary);
                }
            }
            self.refresh();
            if !improved {
                return true;
            }
        }
        false
    }
}

/// Restores exact unitarity after many rotations: QR with the phases of
/// `R`'s diagonal moved back into `Q`.
fn reorthonormalize<T: Real>(u: &CMatrix<T>) -> CMatrix<T> {
    use nalgebra::ComplexField;
    let qr = u.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let modulus = d.modulus();
        if modulus > T::zero() {
            let phase = d.unscale(modulus);
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// A unitary `U` with `χ = U D_k U*`, plus eigenvectors first.
fn frame_of<T: Real>(chi: &QuantumColoring<T>) -> Result<(CMatrix<T>, usize)> {
    let n = chi.dim();
    let m = chi.matrix();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C::new(T::zero(), T::zero())));
    let k = chi.plus_count();
    if diagonal {
        let mut order: Vec<usize> = (0..n).filter(|&i| m[(i, i)].re > T::zero()).collect();
        order.extend((0..n).filter(|&i| m[(i, i)].re <= T::zero()));
        let u = CMatrix::from_fn(n, n, |i, j| if order[j] == i { C::new(T::one(), T::zero()) } else { C::new(T::zero(), T::zero()) });
        return Ok((u, k));
    }
    let sd = chi.hermitian().spectral_decompose()?;
    // ascending eigenvalues: the +1 block is the last k columns
    let order: Vec<usize> = (n - k..n).chain(0..n - k).collect();
    Ok((CMatrix::from_fn(n, n, |i, j| sd.eigenvectors[(i, order[j])]), k))
}

struct StartOutcome<T: Real> {
    u: CMatrix<T>,
    k: usize,
    worst: T,
    converged: bool,
}

fn run_start<T: Real>(bases: &[CMatrix<T>], u: CMatrix<T>, k: usize, sweeps: usize) -> StartOutcome<T> {
    let mut s = Search::new(bases, u, k);
    let converged = s.run(sweeps);
    StartOutcome { worst: s.worst(), u: s.u, k, converged }
}

/// Upper estimate of the quantum discrepancy of a projection system.
///
/// For each plus count `k` the search starts from every warm start with that
/// plus count and from `restarts` Haar-random frames, then improves each by
/// greedy plane-rotation sweeps. Only strict improvements are accepted, so
/// the result never exceeds the best warm start.
pub fn qdisc_estimate<T: Real>(system: &ProjectionSystem<T>, opts: &QdiscOptions) -> Result<QdiscEstimate<T>> {
    qdisc_estimate_with_warm_starts(system, opts, &[])
}

pub fn qdisc_estimate_with_warm_starts<T: Real>(
    system: &ProjectionSystem<T>,
    opts: &QdiscOptions,
    warm: &[QuantumColoring<T>],
) -> Result<QdiscEstimate<T>> {
    let n = system.dim();
    if opts.restarts == 0 && warm.is_empty() {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let ks: Vec<usize> = match &opts.plus_counts {
        Some(ks) => {
            if let Some(&bad) = ks.iter().find(|&&k| k > n) {
                return Err(Error::InvalidArgument(format!("plus count {bad} exceeds {n}")));
            }
            ks.clone()
        }
        None => (0..=n).collect(),
    };
    for w in warm {
        check_dims(n, w.dim())?;
    }
    let bases: Vec<CMatrix<T>> = system.iter().map(|p| p.basis().clone()).collect();

    // Jobs in a fixed order: per k, warm starts first, then restarts.
    enum Start<'w, T: Real> {
        Warm(&'w QuantumColoring<T>),
        Haar(u64),
    }
    let mut jobs = Vec::new();
    for &k in &ks {
        for w in warm.iter().filter(|w| w.plus_count() == k) {
            jobs.push((k, Start::Warm(w)));
        }
        // ±I has no free parameters; one start suffices
        let fresh = if k == 0 || k == n { 1.min(opts.restarts) } else { opts.restarts };
        for r in 0..fresh {
            jobs.push((k, Start::Haar(r as u64)));
        }
    }
    if jobs.is_empty() {
        return Err(Error::InvalidArgument("no starts to run".into()));
    }
    let outcomes: Vec<StartOutcome<T>> = jobs
        .par_iter()
        .map(|(k, start)| {
            let u = match start {
                Start::Warm(w) => frame_of(w)?.0,
                Start::Haar(r) => {
                    let mut rng = seeding::rng_for(opts.seed, &[stream::QDISC, *k as u64, *r]);
                    haar_unitary::<T, _>(n, &mut rng)
                }
            };
            Ok(run_start(&bases, u, *k, opts.sweeps))
        })
        .collect::<Result<Vec<_>>>()?;

    let restarts_used = outcomes.len();
    let best = outcomes
        .into_iter()
        .reduce(|best, cand| if cand.worst < best.worst { cand } else { best })
        .expect("jobs is non-empty");

    let witness = QuantumColoring::from_unitary(&reorthonormalize(&best.u), best.k)?;
    let per_projection = objectives(&witness, system)?;
    let value = per_projection.iter().fold(T::zero(), |m, o| m.max(o.value));
    Ok(QdiscEstimate {
        value,
        witness,
        plus_count: best.k,
        restarts_used,
        converged: best.converged,
        per_projection,
    })
}

/// Combinatorial side of a set-system estimate: the exact discrepancy when
/// `N` is within the exhaustive cap, otherwise the local-search estimate.
#[derive(Clone, Debug)]
pub struct SetSystemEstimate<T: Real> {
    pub disc: u64,
    pub disc_exact: bool,
    pub qdisc: QdiscEstimate<T>,
}

/// Quantum estimate of the embedded set system, warm-started from the best
/// combinatorial coloring so that it never exceeds the combinatorial value.
pub fn qdisc_estimate_set_system<T: Real>(s: &SetSystem, opts: &QdiscOptions) -> Result<SetSystemEstimate<T>> {
    let (d, exact) = if s.ground_size() <= DEFAULT_EXHAUSTIVE_CAP {
        (disc_exact(s)?, true)
    } else {
        (disc_heuristic(s, opts.restarts.max(1) * 8, opts.seed)?, false)
    };
    let system = to_projection_system::<T>(s);
    let warm = QuantumColoring::diagonal(d.witness.signs())?;
    let qdisc = qdisc_estimate_with_warm_starts(&system, opts, &[warm])?;
    Ok(SetSystemEstimate { disc: d.value, disc_exact: exact, qdisc })
}
