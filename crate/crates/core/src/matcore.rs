//! Dense complex Hermitian matrices and the validated matrix types built on
//! them: orthogonal projections, quantum colorings and spectral
//! decompositions.
//!
//! Every type here is immutable once constructed. Constructors validate the
//! defining algebraic identity and report a typed error when it fails.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Dense complex matrix, row/column indexed from 0.
pub type CMatrix<T> = DMatrix<C<T>>;

pub(crate) fn c<T: Real>(re: T) -> C<T> {
    C::new(re, T::zero())
}

pub(crate) fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// `Σ_ij a_ij b_ji`, i.e. `tr(AB)` without forming the product.
pub fn trace_of_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> C<T> {
    let n = a.nrows();
    let mut acc = czero();
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Frobenius distance of `U*U` from the identity.
pub fn unitary_error<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::<T>::identity(n, n)).norm()
}

// ---------------------------------------------------------------------------
// HermitianMatrix

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Symmetrizes `raw` as `(A + A*)/2`.
    ///
    /// Input whose anti-Hermitian part exceeds a relative Frobenius size of
    /// `T::hermitian_reject_tol()` is rejected rather than silently projected.
    pub fn new(raw: CMatrix<T>) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::NonSquare { rows: raw.nrows(), cols: raw.ncols() });
        }
        if raw.nrows() == 0 {
            return Err(Error::DegenerateDim(0));
        }
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let scale = raw.norm();
        let anti = (&raw - raw.adjoint()).norm() * T::lit(0.5);
        if scale > T::zero() && anti > T::hermitian_reject_tol() * scale {
            return Err(Error::TooFarFromHermitian { relative: (anti / scale).to_f64_lossy() });
        }
        Ok(Self::symmetrized(raw))
    }

    /// Symmetrizes without the rejection check; for products that are
    /// Hermitian by construction.
    pub(crate) fn symmetrized(raw: CMatrix<T>) -> Self {
        let m = (&raw + raw.adjoint()) * c(T::lit(0.5));
        Self { m }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::DegenerateDim(0));
        }
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x)));
        Ok(Self { m: CMatrix::from_diagonal(&v) })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.m[(i, j)]
    }

    /// Real trace (the imaginary part of a Hermitian trace is zero).
    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    /// `U A U*`.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Self {
        Self::symmetrized(u * &self.m * u.adjoint())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: &self.m * c(s) }
    }

    /// Principal submatrix on the given 0-based indices, in the given order.
    pub fn principal_submatrix(&self, idx: &[usize]) -> CMatrix<T> {
        CMatrix::from_fn(idx.len(), idx.len(), |a, b| self.m[(idx[a], idx[b])])
    }

    pub fn spectral_decompose(&self) -> Result<SpectralDecomposition<T>> {
        spectral_decompose(self)
    }
}

// ---------------------------------------------------------------------------
// Spectral decomposition

/// Eigenvalues in ascending order and a unitary whose columns are the
/// matching eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: DVector<T>,
    pub eigenvectors: CMatrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    /// `U diag(λ) U*`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let l = c(self.eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= l;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }
}

const EIGEN_MAX_ITER: usize = 10_000;

pub fn spectral_decompose<T: Real>(a: &HermitianMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.m.clone(), T::default_epsilon(), EIGEN_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[x]
            .partial_cmp(&eig.eigenvalues[y])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

// ---------------------------------------------------------------------------
// Norms and commutators

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
    Infinity,
}

impl SchattenP {
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Self::One)
        } else if p == 2.0 {
            Ok(Self::Two)
        } else if p.is_infinite() && p > 0.0 {
            Ok(Self::Infinity)
        } else {
            Err(Error::UnsupportedP(p))
        }
    }

    /// Hölder conjugate exponent.
    pub fn conjugate(self) -> Self {
        match self {
            Self::One => Self::Infinity,
            Self::Two => Self::Two,
            Self::Infinity => Self::One,
        }
    }
}

/// Schatten norm of a general square matrix.
pub fn schatten_norm<T: Real>(a: &CMatrix<T>, p: SchattenP) -> T {
    if p == SchattenP::Two {
        return a.norm();
    }
    let sv = a.clone().svd(false, false).singular_values;
    match p {
        SchattenP::One => sv.iter().fold(T::zero(), |acc, &s| acc + s),
        _ => sv.iter().fold(T::zero(), |acc, &s| acc.max(s)),
    }
}

/// Schatten norm from a real exponent; only 1, 2 and ∞ are supported.
pub fn schatten_norm_p<T: Real>(a: &CMatrix<T>, p: f64) -> Result<T> {
    Ok(schatten_norm(a, SchattenP::from_f64(p)?))
}

/// `AB − BA`.
pub fn commutator<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<CMatrix<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(&a.m * &b.m - &b.m * &a.m)
}

// ---------------------------------------------------------------------------
// OrthogonalProjection

/// Orthogonal projection of `C^N`, stored together with an orthonormal basis
/// of its range.
#[derive(Clone, Debug)]
pub struct OrthogonalProjection<T: Real> {
    matrix: HermitianMatrix<T>,
    basis: CMatrix<T>,
}

impl<T: Real> OrthogonalProjection<T> {
    /// `P = Σ φᵢφᵢ*` for orthonormal columns `φᵢ` of an `N×r` matrix.
    pub fn from_orthonormal_columns(columns: CMatrix<T>) -> Result<Self> {
        let n = columns.nrows();
        if n == 0 {
            return Err(Error::DegenerateDim(0));
        }
        let r = columns.ncols();
        if r > n {
            return Err(Error::NotOrthonormal { error: f64::INFINITY });
        }
        if r > 0 {
            let gram_err = (columns.adjoint() * &columns - CMatrix::<T>::identity(r, r)).norm();
            if gram_err > T::orthonormal_tol() {
                return Err(Error::NotOrthonormal { error: gram_err.to_f64_lossy() });
            }
        }
        let matrix = HermitianMatrix::symmetrized(&columns * columns.adjoint());
        Ok(Self { matrix, basis: columns })
    }

    /// Validates a Hermitian matrix as a projection.
    ///
    /// The rank is the number of eigenvalues above 1/2; every eigenvalue must
    /// lie within `T::spectral_tol()` of 0 or 1.
    pub fn from_hermitian(h: HermitianMatrix<T>) -> Result<Self> {
        let n = h.dim();
        let idem = (h.matrix() * h.matrix() - h.matrix()).norm();
        if idem > T::identity_tol() {
            return Err(Error::NotProjection(format!("‖P²−P‖_F = {:e}", idem.to_f64_lossy())));
        }
        let sd = h.spectral_decompose()?;
        let half = T::lit(0.5);
        for &l in sd.eigenvalues.iter() {
            let d = l.abs().min((l - T::one()).abs());
            if d > T::spectral_tol() {
                return Err(Error::NotProjection(format!("eigenvalue {l} is not in {{0,1}}")));
            }
        }
        let range: Vec<usize> = (0..n).filter(|&k| sd.eigenvalues[k] > half).collect();
        let rank = range.len();
        let tr = h.trace();
        if (tr - T::from_usize(rank).unwrap()).abs() > T::spectral_tol() * T::from_usize(n).unwrap() {
            return Err(Error::NotProjection(format!("trace {tr} differs from rank {rank}")));
        }
        let basis = CMatrix::from_fn(n, rank, |i, j| sd.eigenvectors[(i, range[j])]);
        Ok(Self { matrix: h, basis })
    }

    /// Coordinate projection onto `span{e_i : i ∈ indices}` (0-based).
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateDim(0));
        }
        let mut seen = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i + 1, n });
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!("duplicate index {}", i + 1)));
            }
            seen[i] = true;
        }
        let mut basis = CMatrix::zeros(n, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            basis[(i, col)] = C::one();
        }
        let diag: Vec<T> = seen.iter().map(|&s| if s { T::one() } else { T::zero() }).collect();
        let matrix = HermitianMatrix::from_real_diagonal(&diag)?;
        Ok(Self { matrix, basis })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: HermitianMatrix::identity(n), basis: CMatrix::identity(n, n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { matrix: HermitianMatrix::zeros(n), basis: CMatrix::zeros(n, 0) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.matrix.matrix()
    }

    /// Orthonormal basis of the range, `N × rank`.
    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    /// `U P U*`.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Self {
        let basis = u * &self.basis;
        let matrix = HermitianMatrix::symmetrized(&basis * basis.adjoint());
        Self { matrix, basis }
    }
}

// ---------------------------------------------------------------------------
// QuantumColoring

/// Hermitian matrix with every eigenvalue equal to ±1.
#[derive(Clone, Debug)]
pub struct QuantumColoring<T: Real> {
    matrix: HermitianMatrix<T>,
    plus_count: usize,
}

impl<T: Real> QuantumColoring<T> {
    /// `U D_k U*` with `D_k = diag(+1 ×k, −1 ×(N−k))`.
    pub fn from_unitary(u: &CMatrix<T>, plus_count: usize) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::NonSquare { rows: n, cols: u.ncols() });
        }
        if plus_count > n {
            return Err(Error::InvalidArgument(format!("plus_count {plus_count} exceeds {n}")));
        }
        let uerr = unitary_error(u);
        if uerr > T::identity_tol() * T::from_usize(n.max(1)).unwrap() {
            return Err(Error::NotColoring(format!("U is not unitary (‖U*U−I‖_F = {uerr})")));
        }
        let mut scaled = u.clone();
        for j in plus_count..n {
            for i in 0..n {
                scaled[(i, j)] = -scaled[(i, j)];
            }
        }
        let m = HermitianMatrix::symmetrized(scaled * u.adjoint());
        Self::checked(m, plus_count)
    }

    /// Diagonal coloring from ±1 signs.
    pub fn diagonal(signs: &[i8]) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::NotColoring("signs must be ±1".into()));
        }
        let diag: Vec<T> = signs.iter().map(|&s| T::from_i8(s).unwrap()).collect();
        let plus = signs.iter().filter(|&&s| s == 1).count();
        Self::checked(HermitianMatrix::from_real_diagonal(&diag)?, plus)
    }

    /// Validates an arbitrary Hermitian matrix.
    pub fn from_hermitian(h: HermitianMatrix<T>) -> Result<Self> {
        let sd = h.spectral_decompose()?;
        for &l in sd.eigenvalues.iter() {
            if (l.abs() - T::one()).abs() > T::spectral_tol() {
                return Err(Error::NotColoring(format!("eigenvalue {l} is not ±1")));
            }
        }
        let plus = sd.eigenvalues.iter().filter(|&&l| l > T::zero()).count();
        Self::checked(h, plus)
    }

    fn checked(matrix: HermitianMatrix<T>, plus_count: usize) -> Result<Self> {
        let n = matrix.dim();
        let sq_err = (matrix.matrix() * matrix.matrix() - CMatrix::<T>::identity(n, n)).norm();
        if sq_err > T::identity_tol() {
            return Err(Error::NotColoring(format!("‖χ²−I‖_F = {:e}", sq_err.to_f64_lossy())));
        }
        let expected = T::from_i64(2 * plus_count as i64 - n as i64).unwrap();
        let tr = matrix.trace();
        if (tr - expected).abs() > T::spectral_tol() * T::from_usize(n).unwrap() {
            return Err(Error::NotColoring(format!("trace {tr} but plus_count {plus_count}")));
        }
        Ok(Self { matrix, plus_count })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn plus_count(&self) -> usize {
        self.plus_count
    }

    /// `tr χ = 2k − N`.
    pub fn trace_value(&self) -> i64 {
        2 * self.plus_count as i64 - self.dim() as i64
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.matrix.matrix()
    }

    pub fn negated(&self) -> Self {
        Self { matrix: self.matrix.scale(-T::one()), plus_count: self.dim() - self.plus_count }
    }

    /// `U χ U*`, assuming `U` unitary.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Self {
        Self { matrix: self.matrix.conjugate_by(u), plus_count: self.plus_count }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C64 = C<f64>;

    fn cm(rows: &[&[(f64, f64)]]) -> CMatrix<f64> {
        let n = rows.len();
        CMatrix::from_fn(n, rows[0].len(), |i, j| C64::new(rows[i][j].0, rows[i][j].1))
    }

    #[test]
    fn scalar_matrix_is_hermitian() {
        let h = HermitianMatrix::new(cm(&[&[(3.0, 0.0)]])).unwrap();
        assert_eq!(h.get(0, 0), C64::new(3.0, 0.0));
    }

    #[test]
    fn pauli_y_accepted_unchanged() {
        let raw = cm(&[&[(0.0, 0.0), (0.0, 1.0)], &[(0.0, -1.0), (0.0, 0.0)]]);
        let h = HermitianMatrix::new(raw.clone()).unwrap();
        assert_eq!(h.matrix(), &raw);
    }

    #[test]
    fn nilpotent_rejected() {
        let raw = cm(&[&[(0.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0)]]);
        assert!(matches!(HermitianMatrix::new(raw), Err(Error::TooFarFromHermitian { .. })));
    }

    #[test]
    fn non_square_rejected() {
        let raw = CMatrix::<f64>::zeros(2, 3);
        assert_eq!(HermitianMatrix::new(raw), Err(Error::NonSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn small_asymmetry_is_symmetrized() {
        let raw = cm(&[&[(1.0, 0.0), (2.0, 1e-9)], &[(2.0, 1e-9), (1.0, 0.0)]]);
        let h = HermitianMatrix::new(raw).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    }

    #[test]
    fn eigenvalues_of_small_cases() {
        let sd = HermitianMatrix::<f64>::identity(3).spectral_decompose().unwrap();
        for &l in sd.eigenvalues.iter() {
            assert_close!(l, 1.0, 1e-12);
        }
        let sd = HermitianMatrix::from_real_diagonal(&[2.0, -1.0]).unwrap().spectral_decompose().unwrap();
        assert_close!(sd.eigenvalues[0], -1.0, 1e-12);
        assert_close!(sd.eigenvalues[1], 2.0, 1e-12);
        let x = HermitianMatrix::new(cm(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])).unwrap();
        let sd = x.spectral_decompose().unwrap();
        assert_close!(sd.eigenvalues[0], -1.0, 1e-12);
        assert_close!(sd.eigenvalues[1], 1.0, 1e-12);
        assert!((sd.reconstruct() - x.matrix()).norm() < 1e-12);
    }

    #[test]
    fn schatten_examples() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap();
        assert_close!(schatten_norm(a.matrix(), SchattenP::One), 2.0, 1e-12);
        let b = HermitianMatrix::from_real_diagonal(&[3.0, 4.0]).unwrap();
        assert_close!(schatten_norm(b.matrix(), SchattenP::Two), 5.0, 1e-12);
        assert_close!(schatten_norm(b.matrix(), SchattenP::Infinity), 4.0, 1e-12);
        assert_eq!(SchattenP::from_f64(3.0), Err(Error::UnsupportedP(3.0)));
        assert_eq!(SchattenP::from_f64(f64::INFINITY), Ok(SchattenP::Infinity));
    }

    #[test]
    fn commutator_examples() {
        let x = HermitianMatrix::new(cm(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])).unwrap();
        let p = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap();
        let k = commutator(&x, &p).unwrap();
        let expected = cm(&[&[(0.0, 0.0), (-1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]]);
        assert!((k - expected).norm() < 1e-15);

        assert!(commutator(&x, &HermitianMatrix::identity(2)).unwrap().norm() < 1e-15);
        let d = HermitianMatrix::from_real_diagonal(&[5.0, -2.0]).unwrap();
        assert!(commutator(&d, &p).unwrap().norm() < 1e-15);
        assert_eq!(
            commutator(&d, &HermitianMatrix::identity(3)),
            Err(Error::DimMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn projections_from_vectors() {
        let e1 = cm(&[&[(1.0, 0.0)], &[(0.0, 0.0)]]);
        let p = OrthogonalProjection::from_orthonormal_columns(e1).unwrap();
        assert_eq!(p.rank(), 1);
        assert!((p.matrix() - HermitianMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap().matrix()).norm() < 1e-15);

        let full = OrthogonalProjection::<f64>::from_orthonormal_columns(CMatrix::identity(3, 3)).unwrap();
        assert!((full.matrix() - CMatrix::<f64>::identity(3, 3)).norm() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = cm(&[&[(s, 0.0)], &[(s, 0.0)]]);
        let p = OrthogonalProjection::from_orthonormal_columns(v).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_close!(p.matrix()[(i, j)].re, 0.5, 1e-15);
            }
        }
        let bad = cm(&[&[(1.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0)]]);
        assert!(matches!(
            OrthogonalProjection::from_orthonormal_columns(bad),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn projection_validation_counts_rank() {
        let h = HermitianMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]).unwrap();
        let p = OrthogonalProjection::from_hermitian(h).unwrap();
        assert_eq!(p.rank(), 2);
        let h = HermitianMatrix::from_real_diagonal(&[0.5, 1.0]).unwrap();
        assert!(matches!(OrthogonalProjection::from_hermitian(h), Err(Error::NotProjection(_))));
    }

    #[test]
    fn coloring_validation() {
        let chi = QuantumColoring::<f64>::diagonal(&[1, -1, -1]).unwrap();
        assert_eq!(chi.plus_count(), 1);
        assert_eq!(chi.trace_value(), -1);
        assert!(QuantumColoring::<f64>::diagonal(&[1, 0]).is_err());
        let h = HermitianMatrix::from_real_diagonal(&[1.0, 0.5]).unwrap();
        assert!(QuantumColoring::from_hermitian(h).is_err());
        let x = HermitianMatrix::new(cm(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])).unwrap();
        let chi = QuantumColoring::from_hermitian(x).unwrap();
        assert_eq!(chi.plus_count(), 1);
    }

    #[test]
    fn single_precision_path() {
        let v = CMatrix::<f32>::from_fn(2, 1, |i, _| C::new(if i == 0 { 0.6 } else { 0.8 }, 0.0));
        let p = OrthogonalProjection::from_orthonormal_columns(v).unwrap();
        let p2 = OrthogonalProjection::from_hermitian(p.hermitian().clone()).unwrap();
        assert_eq!(p2.rank(), 1);
    }
}
