//! Determinantal point processes on `[N]` with Hermitian kernels.

use nalgebra::{DVector, Dyn, LU};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, HermitianMatrix, OrthogonalProjection, QuantumColoring};
use crate::randmat::haar_unitary;
use crate::scalar::{Real, C};

/// Largest ground set for which the full subset law is tabulated.
pub const EXACT_DISTRIBUTION_CAP: usize = 14;

/// Hermitian kernel with spectrum in `[0, 1]`, together with its cached
/// eigendecomposition. Eigenvalues within tolerance of 0 or 1 are snapped.
#[derive(Clone, Debug)]
pub struct DppKernel<T: Real> {
    matrix: HermitianMatrix<T>,
    eigenvalues: DVector<T>,
    eigenvectors: CMatrix<T>,
}

/// Validates `a` as a kernel: every eigenvalue must lie in
/// `[−tol, 1 + tol]` with `tol = T::spectral_tol()`.
pub fn validate_kernel<T: Real>(a: HermitianMatrix<T>) -> Result<DppKernel<T>> {
    let sd = a.spectral_decompose()?;
    let tol = T::spectral_tol();
    let mut eigenvalues = sd.eigenvalues;
    for l in eigenvalues.iter_mut() {
        if *l < -tol || *l > T::one() + tol {
            return Err(Error::SpectrumOutOfRange { value: l.to_f64_lossy() });
        }
        if *l <= tol {
            *l = T::zero();
        } else if *l >= T::one() - tol {
            *l = T::one();
        }
    }
    Ok(DppKernel { matrix: a, eigenvalues, eigenvectors: sd.eigenvectors })
}

impl<T: Real> DppKernel<T> {
    pub fn new(a: HermitianMatrix<T>) -> Result<Self> {
        validate_kernel(a)
    }

    /// Kernel of the projection process onto the range of `p`.
    pub fn from_projection(p: &OrthogonalProjection<T>) -> Self {
        validate_kernel(p.hermitian().clone()).expect("projections have spectrum {0, 1}")
    }

    /// `(χ + I)/2`, the projection onto the +1 eigenspace of a coloring.
    pub fn from_coloring(chi: &QuantumColoring<T>) -> Result<Self> {
        let n = chi.dim();
        let half = C::new(T::lit(0.5), T::zero());
        let m = (chi.matrix() + CMatrix::<T>::identity(n, n)) * half;
        validate_kernel(HermitianMatrix::new(m)?).map_err(|e| Error::KernelInvalid(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.matrix.matrix()
    }

    /// Ascending, clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    /// True when every eigenvalue is exactly 0 or 1 after snapping.
    pub fn is_projection(&self) -> bool {
        self.eigenvalues.iter().all(|&l| l == T::zero() || l == T::one())
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        let n = self.dim();
        match idx.iter().find(|&&i| i >= n) {
            Some(&i) => Err(Error::IndexOutOfRange { index: i + 1, n }),
            None => Ok(()),
        }
    }
}

/// A realization of a point process: sorted, duplicate-free 0-based points.
/// Serialized 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct ProcessSample {
    points: Vec<usize>,
}

impl From<ProcessSample> for Vec<usize> {
    fn from(s: ProcessSample) -> Self {
        s.one_based()
    }
}

impl TryFrom<Vec<usize>> for ProcessSample {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        if v.contains(&0) {
            return Err(Error::IndexOutOfRange { index: 0, n: 0 });
        }
        let mut points: Vec<usize> = v.into_iter().map(|i| i - 1).collect();
        points.sort_unstable();
        points.dedup();
        Ok(Self { points })
    }
}

impl ProcessSample {
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.points.iter().map(|&i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Bit `i` set iff point `i` is present.
    pub fn mask(&self) -> u64 {
        self.points.iter().fold(0, |m, &i| m | 1 << i)
    }
}

fn det<T: Real>(m: CMatrix<T>) -> T {
    if m.nrows() == 0 {
        return T::one();
    }
    LU::<C<T>, Dyn, Dyn>::new(m).determinant().re
}

/// `det K[T, T]`, and 1 for the empty set.
pub fn joint_intensity<T: Real>(k: &DppKernel<T>, t: &[usize]) -> Result<T> {
    k.check_indices(t)?;
    Ok(det(k.hermitian().principal_submatrix(t)))
}

/// Exact sample by the spectral method: each eigenvector is kept
/// independently with probability equal to its eigenvalue, then the
/// projection process on the kept vectors is sampled point by point.
pub fn sample<T: Real, R: Rng + ?Sized>(k: &DppKernel<T>, rng: &mut R) -> Result<ProcessSample> {
    let n = k.dim();
    let mut kept = Vec::new();
    for (j, &l) in k.eigenvalues.iter().enumerate() {
        let take = if l == T::one() {
            true
        } else if l == T::zero() {
            false
        } else {
            rng.random::<f64>() < l.to_f64_lossy()
        };
        if take {
            kept.push(j);
        }
    }
    let rank = kept.len();
    if rank == 0 {
        return Ok(ProcessSample { points: Vec::new() });
    }
    // rows of the N×rank matrix of kept eigenvectors
    let rows: Vec<Vec<C<T>>> =
        (0..n).map(|i| kept.iter().map(|&j| k.eigenvectors[(i, j)]).collect()).collect();
    let mut residual: Vec<T> =
        rows.iter().map(|r| r.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())).collect();
    let mut basis: Vec<Vec<C<T>>> = Vec::with_capacity(rank);
    let mut points = Vec::with_capacity(rank);
    let tol = T::breakdown_tol();

    for _ in 0..rank {
        let total = residual.iter().fold(T::zero(), |a, &b| a + b.max(T::zero()));
        if total < tol {
            return Err(Error::NumericalBreakdown { residual: total.to_f64_lossy() });
        }
        let u = T::lit(rng.random::<f64>()) * total;
        let mut acc = T::zero();
        let mut chosen = None;
        for (i, &w) in residual.iter().enumerate() {
            let w = w.max(T::zero());
            if w == T::zero() {
                continue;
            }
            acc += w;
            chosen = Some(i);
            if u < acc {
                break;
            }
        }
        let i = chosen.expect("positive total weight");
        if residual[i] < tol {
            return Err(Error::NumericalBreakdown { residual: residual[i].to_f64_lossy() });
        }

        // Gram–Schmidt: the component of row i orthogonal to earlier picks
        let mut e = rows[i].clone();
        for b in &basis {
            let proj = inner(b, &e);
            for (x, y) in e.iter_mut().zip(b) {
                *x -= *y * proj;
            }
        }
        let norm = e.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if norm < tol {
            return Err(Error::NumericalBreakdown { residual: norm.to_f64_lossy() });
        }
        for x in e.iter_mut() {
            *x = x.unscale(norm);
        }
        for (r, res) in rows.iter().zip(residual.iter_mut()) {
            *res -= inner(&e, r).norm_sqr();
        }
        residual[i] = T::zero();
        basis.push(e);
        points.push(i);
    }
    points.sort_unstable();
    Ok(ProcessSample { points })
}

// ⟨a, b⟩ = Σ conj(a_k) b_k
fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Kernel of `X ∩ S`: the principal submatrix on `S`.
pub fn restrict_kernel<T: Real>(k: &DppKernel<T>, s: &[usize]) -> Result<DppKernel<T>> {
    if s.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    k.check_indices(s)?;
    let sub = HermitianMatrix::new(k.hermitian().principal_submatrix(s))?;
    validate_kernel(sub)
}

/// Law of `|X|` (Poisson-binomial in the eigenvalues), length `N + 1`.
pub fn size_pmf<T: Real>(k: &DppKernel<T>) -> Vec<T> {
    let n = k.dim();
    let mut pmf = vec![T::zero(); n + 1];
    pmf[0] = T::one();
    for (seen, &l) in k.eigenvalues.iter().enumerate() {
        for j in (0..=seen + 1).rev() {
            let stay = pmf[j] * (T::one() - l);
            let step = if j > 0 { pmf[j - 1] * l } else { T::zero() };
            pmf[j] = stay + step;
        }
    }
    pmf
}

/// `P[X = T]` for every `T ⊆ [N]`, indexed by bitmask (bit `i` ↔ element
/// `i + 1`), by Möbius inversion of the joint intensities over supersets.
///
/// For projection kernels the entries with `|T| = rank` are cross-checked
/// against `det K[T, T]`.
pub fn exact_distribution<T: Real>(k: &DppKernel<T>) -> Result<Vec<T>> {
    let n = k.dim();
    if n > EXACT_DISTRIBUTION_CAP {
        return Err(Error::GroundSetTooLarge { n, cap: EXACT_DISTRIBUTION_CAP });
    }
    let size = 1usize << n;
    let intensities: Vec<T> = (0..size)
        .map(|mask| det(k.hermitian().principal_submatrix(&mask_to_indices(mask, n))))
        .collect();
    let mut law = intensities.clone();
    for bit in 0..n {
        for mask in 0..size {
            if mask & 1 << bit == 0 {
                let sup = law[mask | 1 << bit];
                law[mask] -= sup;
            }
        }
    }
    if k.is_projection() {
        let rank = k.eigenvalues.iter().filter(|&&l| l == T::one()).count();
        let tol = T::lit(1e-9);
        for mask in (0..size).filter(|m| m.count_ones() as usize == rank) {
            if (law[mask] - intensities[mask]).abs() > tol {
                return Err(Error::IdentityViolation(format!(
                    "P[X = T] and det K[T,T] differ at mask {mask:#b}"
                )));
            }
        }
    }
    Ok(law)
}

pub fn mask_to_indices(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn diag_and_offdiag<T: Real>(k: &DppKernel<T>, s: &[usize]) -> Result<(T, T)> {
    k.check_indices(s)?;
    let m = k.matrix();
    let a = s.iter().fold(T::zero(), |acc, &i| acc + m[(i, i)].re);
    let mut b = T::zero();
    for &i in s {
        for &j in s {
            b += m[(i, j)].norm_sqr();
        }
    }
    Ok((a, b))
}

/// `E[(2|X ∩ S| − |S|)²] = 4[(tr(KP_S) − |S|/2)² + tr(KP_S(I − KP_S))]`.
pub fn expected_squared_imbalance<T: Real>(k: &DppKernel<T>, s: &[usize]) -> Result<T> {
    let (a, b) = diag_and_offdiag(k, s)?;
    let bias = a - T::from_usize(s.len()).unwrap() * T::lit(0.5);
    Ok(T::lit(4.0) * (bias * bias + a - b))
}

/// First and second moments of `|X ∩ S|`.
pub fn moments_of_count<T: Real>(k: &DppKernel<T>, s: &[usize]) -> Result<(T, T)> {
    k.check_indices(s)?;
    let m = k.matrix();
    let mean = s.iter().fold(T::zero(), |acc, &i| acc + m[(i, i)].re);
    let mut pairs = T::zero();
    for &i in s {
        for &j in s {
            if i != j {
                pairs += m[(i, i)].re * m[(j, j)].re - m[(i, j)].norm_sqr();
            }
        }
    }
    Ok((mean, mean + pairs))
}

/// `U diag(λ) U*` with Haar `U` and eigenvalues uniform on `[0, 1]`.
pub fn random_kernel<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DppKernel<T> {
    let u = haar_unitary::<T, _>(n, rng);
    let mut scaled = u.clone();
    for j in 0..n {
        let l = C::new(T::lit(rng.random::<f64>()), T::zero());
        for i in 0..n {
            scaled[(i, j)] *= l;
        }
    }
    let h = HermitianMatrix::new(scaled * u.adjoint()).expect("UΛU* is Hermitian");
    validate_kernel(h).expect("spectrum in [0, 1]")
}

/// Diagonal kernel of independent Bernoulli inclusions.
pub fn diagonal_kernel<T: Real>(p: &[T]) -> Result<DppKernel<T>> {
    validate_kernel(HermitianMatrix::from_real_diagonal(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use crate::stats::{frequencies, total_variation};
    use proptest::prelude::*;

    fn diag(p: &[f64]) -> DppKernel<f64> {
        diagonal_kernel(p).unwrap()
    }

    fn ones_over_n(n: usize) -> DppKernel<f64> {
        let m = CMatrix::<f64>::from_element(n, n, C::new(1.0 / n as f64, 0.0));
        validate_kernel(HermitianMatrix::new(m).unwrap()).unwrap()
    }

    // Brute-force imbalance expectation over the tabulated law.
    fn brute_imbalance(k: &DppKernel<f64>, s: &[usize]) -> f64 {
        let law = exact_distribution(k).unwrap();
        let smask: usize = s.iter().fold(0, |m, &i| m | 1 << i);
        law.iter()
            .enumerate()
            .map(|(t, &p)| {
                let x = (t & smask).count_ones() as f64;
                p * (2.0 * x - s.len() as f64).powi(2)
            })
            .sum()
    }

    #[test]
    fn validation_examples() {
        assert!(diagonal_kernel(&[0.5; 4]).is_ok());
        assert!(matches!(
            diagonal_kernel(&[2.0, 0.0]),
            Err(Error::SpectrumOutOfRange { value }) if value == 2.0
        ));
        assert!(matches!(diagonal_kernel(&[-0.1, 0.0]), Err(Error::SpectrumOutOfRange { .. })));
        let p = OrthogonalProjection::<f64>::coordinate(3, &[0, 2]).unwrap();
        assert!(DppKernel::from_projection(&p).is_projection());
        // snapping
        let k = diag(&[1.0 - 1e-12, 1e-12]);
        assert_eq!(k.eigenvalues().as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn intensity_examples() {
        let k = diag(&[0.2, 0.7, 0.4]);
        assert_close!(joint_intensity(&k, &[1]).unwrap(), 0.7, 1e-15);
        assert_close!(joint_intensity(&k, &[0, 2]).unwrap(), 0.08, 1e-15);
        assert_eq!(joint_intensity(&k, &[]).unwrap(), 1.0);
        assert!(matches!(joint_intensity(&k, &[3]), Err(Error::IndexOutOfRange { .. })));
        let r1 = ones_over_n(4);
        assert_close!(joint_intensity(&r1, &[0, 3]).unwrap(), 0.0, 1e-15);
    }

    #[test]
    fn sampler_trivial_kernels() {
        let mut rng = seeding::rng_for(0, &[]);
        let zero = diag(&[0.0; 5]);
        let one = diag(&[1.0; 5]);
        for _ in 0..50 {
            assert!(sample(&zero, &mut rng).unwrap().is_empty());
            assert_eq!(sample(&one, &mut rng).unwrap().points(), &[0, 1, 2, 3, 4]);
        }
        let p = crate::randmat::random_projection_of_rank::<f64, _>(7, 3, &mut rng).unwrap();
        let k = DppKernel::from_projection(&p);
        for _ in 0..200 {
            assert_eq!(sample(&k, &mut rng).unwrap().len(), 3);
        }
    }

    #[test]
    fn sampler_matches_exact_law() {
        let mut rng = seeding::rng_for(17, &[]);
        let k = random_kernel::<f64, _>(4, &mut rng);
        let law = exact_distribution(&k).unwrap();
        let trials = 40_000;
        let mut counts = vec![0u64; 16];
        for t in 0..trials {
            let s = sample(&k, &mut seeding::rng_for(18, &[t])).unwrap();
            counts[s.mask() as usize] += 1;
        }
        let tv = total_variation(&frequencies(&counts), &law);
        assert!(tv <= 0.02, "tv = {tv}");
    }

    #[test]
    fn restriction_examples() {
        let mut rng = seeding::rng_for(3, &[]);
        let k = random_kernel::<f64, _>(5, &mut rng);
        let full = restrict_kernel(&k, &[0, 1, 2, 3, 4]).unwrap();
        assert!((full.matrix() - k.matrix()).norm() < 1e-15);
        let d = diag(&[0.1, 0.6, 0.3]);
        let r = restrict_kernel(&d, &[1]).unwrap();
        assert_close!(r.matrix()[(0, 0)].re, 0.6, 1e-15);
        assert!(matches!(restrict_kernel(&d, &[]), Err(Error::EmptyRestriction)));
        let sub = restrict_kernel(&k, &[1, 3]).unwrap();
        assert!(sub.eigenvalues().iter().all(|&l| (0.0..=1.0).contains(&l)));
    }

    #[test]
    fn size_law_examples() {
        let pmf = size_pmf(&diag(&[0.5, 0.5]));
        assert_eq!(pmf, vec![0.25, 0.5, 0.25]);
        let p = OrthogonalProjection::<f64>::coordinate(5, &[0, 3]).unwrap();
        let pmf = size_pmf(&DppKernel::from_projection(&p));
        assert_eq!(pmf, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let k = random_kernel::<f64, _>(7, &mut seeding::rng_for(5, &[]));
        let pmf = size_pmf(&k);
        assert_close!(pmf.iter().sum::<f64>(), 1.0, 1e-12);
        let mean: f64 = pmf.iter().enumerate().map(|(j, p)| j as f64 * p).sum();
        assert_close!(mean, k.hermitian().trace(), 1e-10);
    }

    #[test]
    fn exact_distribution_examples() {
        let (p, q) = (0.3, 0.8);
        let law = exact_distribution(&diag(&[p, q])).unwrap();
        let expected = [(1.0 - p) * (1.0 - q), p * (1.0 - q), (1.0 - p) * q, p * q];
        for (a, b) in law.iter().zip(expected) {
            assert_close!(*a, b, 1e-15);
        }
        let law = exact_distribution(&ones_over_n(5)).unwrap();
        for i in 0..5 {
            assert_close!(law[1 << i], 0.2, 1e-12);
        }
        assert_close!(law.iter().sum::<f64>(), 1.0, 1e-9);
        let big = diag(&[0.5; 15]);
        assert!(matches!(exact_distribution(&big), Err(Error::GroundSetTooLarge { .. })));
    }

    #[test]
    fn imbalance_examples() {
        for m in 1..=5 {
            let k = diag(&[0.5; 6]);
            let s: Vec<usize> = (0..m).collect();
            assert_close!(expected_squared_imbalance(&k, &s).unwrap(), m as f64, 1e-12);
        }
        // K = P_S with S the full support: X(S) = |S| a.s., variance part 0
        let s = [0, 2, 3];
        let p = OrthogonalProjection::<f64>::coordinate(5, &s).unwrap();
        let k = DppKernel::from_projection(&p);
        assert_close!(expected_squared_imbalance(&k, &s).unwrap(), 9.0, 1e-12);
        let (mean, second) = moments_of_count(&k, &s).unwrap();
        assert_close!(second - mean * mean, 0.0, 1e-12);
    }

    #[test]
    fn moments_of_independent_kernel() {
        let p = [0.1, 0.5, 0.9, 0.3];
        let (mean, second) = moments_of_count(&diag(&p), &[0, 1, 2, 3]).unwrap();
        let mu: f64 = p.iter().sum();
        let var: f64 = p.iter().map(|x| x * (1.0 - x)).sum();
        assert_close!(mean, mu, 1e-15);
        assert_close!(second, var + mu * mu, 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernel_identities(n in 1usize..8, seed in any::<u64>(), smask in any::<u16>()) {
            let k = random_kernel::<f64, _>(n, &mut seeding::rng_for(seed, &[]));
            let s = mask_to_indices(smask as usize & ((1 << n) - 1), n);

            let law = exact_distribution(&k).unwrap();
            prop_assert!((law.iter().sum::<f64>() - 1.0).abs() <= 1e-9);

            let e = expected_squared_imbalance(&k, &s).unwrap();
            prop_assert!((e - brute_imbalance(&k, &s)).abs() <= 1e-9);

            let (mean, second) = moments_of_count(&k, &s).unwrap();
            let half = s.len() as f64 / 2.0;
            let from_moments = 4.0 * (second - 2.0 * half * mean + half * half);
            prop_assert!((from_moments - e).abs() <= 1e-9);

            if !s.is_empty() {
                let r = restrict_kernel(&k, &s).unwrap();
                prop_assert!((r.hermitian().trace() - mean).abs() <= 1e-12);
            }

            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let pij = joint_intensity(&k, &[i, j]).unwrap();
                        let pi = joint_intensity(&k, &[i]).unwrap();
                        let pj = joint_intensity(&k, &[j]).unwrap();
                        prop_assert!(pij <= pi * pj + 1e-12);
                    }
                }
            }
        }
    }
}
