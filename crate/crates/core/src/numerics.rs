//! Dense complex linear algebra with one shared tolerance policy.
//!
//! Every rank, equality and invertibility decision elsewhere in the crate goes
//! through a [`ToleranceConfig`], so two checks never disagree about whether the
//! same operator is singular.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::fusion::Subspace;

pub type C64 = Complex<f64>;
pub type Matrix = DMatrix<C64>;


#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Rank, equality and invertibility thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative cutoff for counting a singular value as nonzero.
    pub rank_rel: f64,
    /// Relative tolerance for operator equalities.
    pub eq_rel: f64,
    /// Relative threshold `sigma_min > inv_rel * sigma_max` for invertibility.
    pub inv_rel: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            eq_rel: 1e-8,
            inv_rel: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rel: f64, eq_rel: f64, inv_rel: f64) -> Result<Self> {
        let tol = Self {
            rank_rel,
            eq_rel,
            inv_rel,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("eq_rel", self.eq_rel),
            ("inv_rel", self.inv_rel),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(contract(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// Singular-value cutoff for a matrix of the given shape and largest singular value.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, s_max: f64) -> f64 {
        self.rank_rel * rows.max(cols) as f64 * s_max
    }

    /// `sigma_min > inv_rel * sigma_max`, with the zero operator never invertible.
    pub fn is_invertible(&self, sigma_min: f64, sigma_max: f64) -> bool {
        sigma_max > 0.0 && sigma_min > self.inv_rel * sigma_max
    }
}

/// Three-way invertibility decision with a guard band of one decade on either
/// side of the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invertibility {
    Invertible,
    Singular,
    Indeterminate,
}

impl Invertibility {
    pub fn classify(value: f64, threshold: f64) -> Self {
        if value > 10.0 * threshold {
            Invertibility::Invertible
        } else if value < threshold / 10.0 || threshold == 0.0 && value == 0.0 {
            Invertibility::Singular
        } else {
            Invertibility::Indeterminate
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Invertibility::Invertible => Some(true),
            Invertibility::Singular => Some(false),
            Invertibility::Indeterminate => None,
        }
    }
}

/// Thin singular value decomposition `A = U diag(s) V*` with `s` non-increasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn s_max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn s_min(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        let cutoff = tol.rank_cutoff(self.u.nrows(), self.v.nrows(), self.s_max());
        self.s.iter().take_while(|&&x| x > cutoff).count()
    }
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

// Dense decompositions run in faer; nalgebra holds the matrices everywhere else.
fn to_faer(a: &Matrix) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, C64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn svd(a: &Matrix) -> Result<Svd> {
    let (rows, cols) = a.shape();
    check_finite(a)?;
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: zeros(rows, 0),
            s: Vec::new(),
            v: zeros(cols, 0),
        });
    }
    let dec = to_faer(a).thin_svd().map_err(|_| Error::NumericFailure { rows, cols })?;
    let (u, v) = (from_faer(dec.U()), from_faer(dec.V()));
    let raw: Vec<f64> = dec.S().column_vector().iter().map(|z| z.re).collect();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));
    let mut su = zeros(rows, k);
    let mut sv = zeros(cols, k);
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        su.set_column(dst, &u.column(src));
        sv.set_column(dst, &v.column(src));
        s.push(raw[src].max(0.0));
    }
    Ok(Svd { u: su, s, v: sv })
}

pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

pub fn rank_tol(a: &Matrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(svd(a)?.rank(tol))
}

pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    Ok(svd(a)?.s_max())
}

/// Moore–Penrose pseudoinverse truncated at the rank cutoff.
pub fn pinv(a: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let d = svd(a)?;
    let r = d.rank(tol);
    let mut out = zeros(a.ncols(), a.nrows());
    for i in 0..r {
        let vi = d.v.column(i);
        let ui = d.u.column(i);
        out += (vi * ui.adjoint()) * c64(1.0 / d.s[i], 0.0);
    }
    Ok(out)
}

/// Inverse of a square matrix, refused when `sigma_min <= inv_rel * sigma_max`.
pub fn invert(a: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    if a.nrows() != a.ncols() {
        return Err(contract(format!(
            "cannot invert a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let d = svd(a)?;
    if !tol.is_invertible(d.s_min(), d.s_max()) {
        return Err(Error::NotInvertible {
            sigma_min: d.s_min(),
            threshold: tol.inv_rel * d.s_max(),
        });
    }
    let mut vs = d.v.clone();
    for (j, s) in d.s.iter().enumerate() {
        let mut col = vs.column_mut(j);
        col /= c64(*s, 0.0);
    }
    Ok(vs * d.u.adjoint())
}

pub fn is_hermitian(a: &Matrix, tol: &ToleranceConfig) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let dev = (a - a.adjoint()).norm();
    dev <= tol.eq_rel * a.norm().max(1.0)
}

/// Ascending eigenvalues and matching orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &Matrix, tol: &ToleranceConfig) -> Result<(Vec<f64>, Matrix)> {
    check_finite(a)?;
    if !is_hermitian(a, tol) {
        return Err(contract("matrix is not Hermitian within eq_rel"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let herm = (a + a.adjoint()) * c64(0.5, 0.0);
    let eig = to_faer(&herm)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NumericFailure { rows: n, cols: n })?;
    let raw: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    let u = from_faer(eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let mut vecs = zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &u.column(src));
        vals.push(raw[src]);
    }
    Ok((vals, vecs))
}

pub fn hermitian_eig_bounds(a: &Matrix, tol: &ToleranceConfig) -> Result<(f64, f64)> {
    let (vals, _) = hermitian_eigen(a, tol)?;
    match (vals.first(), vals.last()) {
        (Some(lo), Some(hi)) => Ok((*lo, *hi)),
        _ => Err(contract("empty matrix has no eigenvalues")),
    }
}

pub fn schatten_norm(a: &Matrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(contract(format!("Schatten exponent must be finite and >= 1, got {p}")));
    }
    let s = singular_values(a)?;
    Ok(s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Orthonormal basis of the range, truncated at the rank cutoff.
pub fn range_basis(a: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let d = svd(a)?;
    let r = d.rank(tol);
    Ok(d.u.columns(0, r).into_owned())
}

/// Orthonormal basis of the kernel.
pub fn null_space(a: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let n = a.ncols();
    let row_space = range_basis(&a.adjoint(), tol)?;
    orthogonal_complement(&row_space, n)
}

/// Orthonormal basis of the complement of the span of orthonormal columns `q` in C^n.
pub fn orthogonal_complement(q: &Matrix, n: usize) -> Result<Matrix> {
    let r = q.ncols();
    if r == n {
        return Ok(zeros(n, 0));
    }
    let proj = identity(n) - q * q.adjoint();
    let d = svd(&proj)?;
    Ok(d.u.columns(0, n - r).into_owned())
}

pub fn check_finite(a: &Matrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(contract("matrix contains non-finite entries"))
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries (`E|z|^2 = 1`).
pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * scale, im * scale)
    })
}

/// Haar-distributed `d`-dimensional subspace of C^n.
///
/// The basis is the QR factor of a complex Gaussian `n x d` matrix with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn random_subspace<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Subspace> {
    if d > n {
        return Err(contract(format!("subspace dimension {d} exceeds ambient dimension {n}")));
    }
    if d == 0 {
        return Ok(Subspace::zero(n));
    }
    let g = random_gaussian(n, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Subspace::from_orthonormal(q, &ToleranceConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_fn(v.len(), v.len(), |i, j| if i == j { c64(v[i], 0.0) } else { c64(0.0, 0.0) })
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_iterator(rows, cols, v.iter().map(|&x| c64(x, 0.0)))
    }

    #[test]
    fn svd_examples() {
        assert_eq!(svd(&identity(2)).unwrap().s, vec![1.0, 1.0]);
        let s = svd(&diag(&[3.0, 0.0])).unwrap().s;
        assert!((s[0] - 3.0).abs() < 1e-15 && s[1].abs() < 1e-15);
        // A*A = diag(0, 1), so the singular values are (1, 0).
        let s = svd(&real(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap().s;
        assert!((s[0] - 1.0).abs() < 1e-15 && s[1].abs() < 1e-15);
    }

    #[test]
    fn svd_reconstructs_rank_deficient_complex_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 0..3000 {
            let (n, m) = (1 + t % 8, 1 + (t / 8) % 8);
            let r = 1 + t % n.min(m);
            let mut a = random_gaussian(n, r, &mut rng) * random_gaussian(r, m, &mut rng);
            if t % 3 == 0 && n == m {
                let b = random_gaussian(n, 1, &mut rng);
                let p = &b * b.adjoint();
                a = &p * a * &p;
            }
            let d = svd(&a).unwrap();
            let s = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(d.s.len(), d.s.iter().map(|x| c64(*x, 0.0))));
            assert!((&d.u * s * d.v.adjoint() - &a).norm() <= 1e-13 * a.norm().max(1.0));
            assert!((d.u.adjoint() * &d.u - identity(d.s.len())).norm() <= 1e-13);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_handles_empty_shapes() {
        let d = svd(&zeros(3, 0)).unwrap();
        assert!(d.s.is_empty());
        assert_eq!(d.u.shape(), (3, 0));
    }

    #[test]
    fn rank_examples() {
        let tol = ToleranceConfig::default();
        assert_eq!(rank_tol(&zeros(3, 3), &tol).unwrap(), 0);
        assert_eq!(rank_tol(&identity(4), &tol).unwrap(), 4);
        assert_eq!(rank_tol(&diag(&[1.0, 1e-14]), &tol).unwrap(), 1);
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&identity(3)).unwrap() - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&(identity(3) * c64(2.0, 0.0))).unwrap() - 2.0).abs() < 1e-15);
        let nil = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!((spectral_norm(&nil).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pinv_examples() {
        let tol = ToleranceConfig::default();
        assert!((pinv(&identity(3), &tol).unwrap() - identity(3)).norm() < 1e-14);
        let z = pinv(&zeros(2, 3), &tol).unwrap();
        assert_eq!(z.shape(), (3, 2));
        assert_eq!(z.norm(), 0.0);
        let p = pinv(&diag(&[2.0, 0.0]), &tol).unwrap();
        assert!((p - diag(&[0.5, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn eig_bounds_examples() {
        let tol = ToleranceConfig::default();
        assert_eq!(hermitian_eig_bounds(&diag(&[1.0, 4.0]), &tol).unwrap(), (1.0, 4.0));
        let (lo, hi) = hermitian_eig_bounds(&identity(5), &tol).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        let (lo, hi) = hermitian_eig_bounds(&diag(&[0.0, 2.0, 5.0]), &tol).unwrap();
        assert!(lo.abs() < 1e-14 && (hi - 5.0).abs() < 1e-14);
    }

    #[test]
    fn eig_bounds_rejects_non_hermitian() {
        let tol = ToleranceConfig::default();
        let a = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig_bounds(&a, &tol), Err(Error::Contract(_))));
    }

    #[test]
    fn schatten_examples() {
        assert!((schatten_norm(&identity(3), 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        assert!((schatten_norm(&diag(&[3.0, 4.0]), 1.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((schatten_norm(&diag(&[3.0, 4.0]), 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!(matches!(schatten_norm(&identity(2), 0.5), Err(Error::Contract(_))));
    }

    #[test]
    fn random_subspace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = random_subspace(3, 0, &mut rng).unwrap();
        assert_eq!(z.projection().norm(), 0.0);
        let full = random_subspace(3, 3, &mut rng).unwrap();
        assert!((full.projection() - identity(3)).norm() < 1e-12);
        let a = random_subspace(4, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = random_subspace(4, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a.basis(), b.basis());
        assert!(random_subspace(2, 3, &mut rng).is_err());
    }

    #[test]
    fn invert_refuses_singular() {
        let tol = ToleranceConfig::default();
        assert!(matches!(invert(&diag(&[1.0, 0.0]), &tol), Err(Error::NotInvertible { .. })));
        let inv = invert(&diag(&[2.0, 4.0]), &tol).unwrap();
        assert!((inv - diag(&[0.5, 0.25])).norm() < 1e-15);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let tol = ToleranceConfig::default();
        let a = real(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&a, &tol).unwrap();
        assert_eq!(k.ncols(), 2);
        assert!((&a * &k).norm() < 1e-14);
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::new(1e-10, 1e-8, 1e-8).is_ok());
        assert!(ToleranceConfig::new(0.0, 1e-8, 1e-8).is_err());
        assert!(ToleranceConfig::new(1e-10, 1.0, 1e-8).is_err());
    }

    #[test]
    fn invertibility_band() {
        assert_eq!(Invertibility::classify(1.0, 1e-8), Invertibility::Invertible);
        assert_eq!(Invertibility::classify(1e-12, 1e-8), Invertibility::Singular);
        assert_eq!(Invertibility::classify(2e-8, 1e-8), Invertibility::Indeterminate);
        assert_eq!(Invertibility::classify(0.0, 0.0), Invertibility::Singular);
    }
}
