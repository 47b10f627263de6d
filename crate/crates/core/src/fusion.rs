//! Subspaces, weighted fusion sequences and local frames.
//!
//! Two coordinate systems appear throughout. The *ambient* stacked space is
//! `C^{N n}` (one full copy of `C^n` per block); the restricted space `K_W`
//! keeps only `W_i`-coordinates, so it has dimension `sum_i dim W_i`.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{contract, precondition, Error, Result};
use crate::frames::{canonical_dual_ordinary, frame_bounds_ordinary, VectorFrame};
use crate::numerics::{
    c64, hermitian_eig_bounds, identity, invert, random_gaussian, range_basis, rank_tol, zeros,
    Matrix, ToleranceConfig, C64,
};

/// A subspace of C^n held as an orthonormal column basis (possibly empty).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self { basis: zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Self { basis: identity(n) }
    }

    /// Accepts a basis that is already orthonormal within `eq_rel`.
    pub fn from_orthonormal(basis: Matrix, tol: &ToleranceConfig) -> Result<Self> {
        crate::numerics::check_finite(&basis)?;
        let d = basis.ncols();
        if d > basis.nrows() {
            return Err(contract(format!(
                "{d} basis vectors cannot be orthonormal in C^{}",
                basis.nrows()
            )));
        }
        let dev = (basis.adjoint() * &basis - identity(d)).norm();
        if dev > tol.eq_rel {
            return Err(contract(format!(
                "basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Span of the columns of `m`, re-orthonormalized.
    pub fn from_spanning(m: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        if m.ncols() == 0 {
            return Ok(Self::zero(m.nrows()));
        }
        Ok(Self {
            basis: range_basis(m, tol)?,
        })
    }

    pub fn span(n: usize, vectors: &[DVector<C64>], tol: &ToleranceConfig) -> Result<Self> {
        let frame = VectorFrame::new(n, vectors.to_vec())?;
        Self::from_spanning(&frame.synthesis(), tol)
    }

    /// `op(W)`.
    pub fn image(&self, op: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        Self::from_spanning(&(op * &self.basis), tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn projection(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }
}

/// Orthogonal projection onto `w`.
pub fn projection(w: &Subspace) -> Matrix {
    w.projection()
}

/// A weighted family `(W_i, w_i)` with `W_i = {0}` exactly when `w_i = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionSequence {
    subspaces: Vec<Subspace>,
    weights: Vec<f64>,
}

impl FusionSequence {
    pub fn new(subspaces: Vec<Subspace>, weights: Vec<f64>) -> Result<Self> {
        if subspaces.is_empty() {
            return Err(contract("fusion sequence needs at least one block"));
        }
        if subspaces.len() != weights.len() {
            return Err(contract(format!(
                "{} subspaces but {} weights",
                subspaces.len(),
                weights.len()
            )));
        }
        let n = subspaces[0].ambient_dim();
        for (i, (w, &om)) in subspaces.iter().zip(&weights).enumerate() {
            if w.ambient_dim() != n {
                return Err(contract(format!(
                    "block {i} lives in C^{}, expected C^{n}",
                    w.ambient_dim()
                )));
            }
            if !(om >= 0.0) || !om.is_finite() {
                return Err(contract(format!("weight {i} must be finite and non-negative, got {om}")));
            }
            if w.is_zero() != (om == 0.0) {
                return Err(contract(format!(
                    "block {i}: zero subspace must carry exactly zero weight (dim {}, weight {om})",
                    w.dim()
                )));
            }
        }
        Ok(Self { subspaces, weights })
    }

    /// Unit weights on every nonzero subspace.
    pub fn unweighted(subspaces: Vec<Subspace>) -> Result<Self> {
        let weights = subspaces
            .iter()
            .map(|w| if w.is_zero() { 0.0 } else { 1.0 })
            .collect();
        Self::new(subspaces, weights)
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(Subspace::dim).collect()
    }

    /// `(W_i, f_i w_i)`; blocks whose new weight vanishes become `{0}`.
    pub fn reweighted(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.len() {
            return Err(contract("reweighting factors must match block count"));
        }
        let mut subspaces = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for ((w, &om), &f) in self.subspaces.iter().zip(&self.weights).zip(factors) {
            let new = om * f;
            if new == 0.0 {
                subspaces.push(Subspace::zero(w.ambient_dim()));
                weights.push(0.0);
            } else {
                subspaces.push(w.clone());
                weights.push(new);
            }
        }
        Self::new(subspaces, weights)
    }

    /// Blocks `w_i P_{W_i}`.
    pub fn weighted_projections(&self) -> Vec<Matrix> {
        self.subspaces
            .iter()
            .zip(&self.weights)
            .map(|(w, &om)| w.projection() * c64(om, 0.0))
            .collect()
    }
}

/// `(N n) x n` stack whose i-th block is `w_i P_{W_i}`.
pub fn fusion_analysis_ambient(f: &FusionSequence) -> Matrix {
    let n = f.ambient_dim();
    let mut t = zeros(f.len() * n, n);
    for (i, block) in f.weighted_projections().into_iter().enumerate() {
        t.view_mut((i * n, 0), (n, n)).copy_from(&block);
    }
    t
}

/// `n x (sum_i d_i)` block row `[w_1 B_1 | ... | w_N B_N]`, the synthesis
/// operator in `K_W` coordinates.
pub fn fusion_synthesis_kw(f: &FusionSequence) -> Matrix {
    let n = f.ambient_dim();
    let total: usize = f.dims().iter().sum();
    let mut t = zeros(n, total);
    let mut col = 0;
    for (w, &om) in f.subspaces().iter().zip(f.weights()) {
        let d = w.dim();
        t.view_mut((0, col), (n, d))
            .copy_from(&(w.basis() * c64(om, 0.0)));
        col += d;
    }
    t
}

/// `S_W = sum_i w_i^2 P_{W_i}`.
pub fn fusion_frame_operator(f: &FusionSequence) -> Matrix {
    let n = f.ambient_dim();
    f.subspaces()
        .iter()
        .zip(f.weights())
        .fold(zeros(n, n), |acc, (w, &om)| acc + w.projection() * c64(om * om, 0.0))
}

pub fn fusion_bounds(f: &FusionSequence, tol: &ToleranceConfig) -> Result<(f64, f64)> {
    hermitian_eig_bounds(&fusion_frame_operator(f), tol)
}

pub fn is_fusion_frame(f: &FusionSequence, tol: &ToleranceConfig) -> Result<bool> {
    let (alpha, beta) = fusion_bounds(f, tol)?;
    Ok(alpha > tol.inv_rel * beta)
}

/// `S_W^{-1}`, refused when the sequence is not a fusion frame.
pub fn frame_operator_inverse(f: &FusionSequence, tol: &ToleranceConfig) -> Result<Matrix> {
    let (alpha, beta) = fusion_bounds(f, tol)?;
    if !(alpha > tol.inv_rel * beta) {
        return Err(Error::NotAFrame {
            alpha,
            beta,
            threshold: tol.inv_rel * beta,
        });
    }
    invert(&fusion_frame_operator(f), tol)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Classification {
    pub bessel: bool,
    pub frame: bool,
    pub riesz_fusion_basis: bool,
    pub alpha: f64,
    pub beta: f64,
}

pub fn classify(f: &FusionSequence, tol: &ToleranceConfig) -> Result<Classification> {
    let (alpha, beta) = fusion_bounds(f, tol)?;
    let n = f.ambient_dim();
    let total: usize = f.dims().iter().sum();
    let riesz = total == n && rank_tol(&fusion_synthesis_kw(f), tol)? == n;
    Ok(Classification {
        bessel: beta.is_finite(),
        frame: alpha > tol.inv_rel * beta,
        riesz_fusion_basis: riesz,
        alpha,
        beta,
    })
}

/// Kernel dimensions of the synthesis operator in both coordinate systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Excess {
    /// `N n - rank(T_{W,w})`, the kernel of the synthesis map on the stacked space.
    pub ambient: usize,
    /// `sum_i d_i - rank(T_W^*)` on `K_W`.
    pub kw: usize,
}

pub fn excess(f: &FusionSequence, tol: &ToleranceConfig) -> Result<Excess> {
    let t = fusion_analysis_ambient(f);
    let synth_kw = fusion_synthesis_kw(f);
    Ok(Excess {
        ambient: t.nrows() - rank_tol(&t, tol)?,
        kw: synth_kw.ncols() - rank_tol(&synth_kw, tol)?,
    })
}

/// A frame for each `W_i` together with its canonical dual inside `W_i`.
#[derive(Clone, Debug)]
pub struct LocalFrameFamily {
    pub frames: Vec<VectorFrame>,
    pub duals: Vec<VectorFrame>,
    /// Per-block `(alpha_i, beta_i)`; `None` for zero subspaces.
    pub local_bounds: Vec<Option<(f64, f64)>>,
    pub alpha: f64,
    pub beta: f64,
}

impl LocalFrameFamily {
    /// Validates `frames` against `f` and computes local canonical duals.
    pub fn from_frames(
        f: &FusionSequence,
        frames: Vec<VectorFrame>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if frames.len() != f.len() {
            return Err(contract("one local frame per block is required"));
        }
        let n = f.ambient_dim();
        let mut duals = Vec::with_capacity(frames.len());
        let mut local_bounds = Vec::with_capacity(frames.len());
        let (mut alpha, mut beta) = (f64::INFINITY, 0.0f64);
        for (i, (w, phi)) in f.subspaces().iter().zip(&frames).enumerate() {
            if phi.dim() != n {
                return Err(contract(format!("local frame {i} is not in C^{n}")));
            }
            let p = w.projection();
            for v in phi.vectors() {
                if (&p * v - v).norm() > tol.eq_rel * v.norm().max(1.0) {
                    return Err(precondition(format!("local frame {i} leaves its subspace")));
                }
            }
            if w.is_zero() {
                duals.push(phi.map(|v| v * c64(0.0, 0.0)));
                local_bounds.push(None);
                continue;
            }
            if phi.is_empty() {
                return Err(precondition(format!("local frame {i} does not span its subspace")));
            }
            let coords = VectorFrame::from_columns(&(w.basis().adjoint() * phi.synthesis()));
            let (a, b) = frame_bounds_ordinary(&coords, tol)?;
            if !(a > tol.inv_rel * b) {
                return Err(precondition(format!("local frame {i} does not span its subspace")));
            }
            let dual_coords = canonical_dual_ordinary(&coords, tol)?;
            duals.push(VectorFrame::from_columns(&(w.basis() * dual_coords.synthesis())));
            local_bounds.push(Some((a, b)));
            alpha = alpha.min(a);
            beta = beta.max(b);
        }
        if local_bounds.iter().all(Option::is_none) {
            alpha = 0.0;
        }
        Ok(Self {
            frames,
            duals,
            local_bounds,
            alpha,
            beta,
        })
    }
}

const LOCAL_LOWER_BOUND_FLOOR: f64 = 0.1;
const LOCAL_MAX_ATTEMPTS: usize = 10_000;

/// Random local frames with `dim W_i + redundancy` vectors per nonzero block.
///
/// Frames are drawn as Gaussian coefficients against the stored basis and
/// redrawn until the local lower bound is at least 0.1.
pub fn build_local_frames<R: Rng + ?Sized>(
    f: &FusionSequence,
    redundancy: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<LocalFrameFamily> {
    let n = f.ambient_dim();
    let mut frames = Vec::with_capacity(f.len());
    for w in f.subspaces() {
        let d = w.dim();
        if d == 0 {
            frames.push(VectorFrame::empty(n));
            continue;
        }
        let count = d + redundancy;
        let mut accepted = None;
        for _ in 0..LOCAL_MAX_ATTEMPTS {
            let coeffs = random_gaussian(d, count, rng);
            let (a, _) = hermitian_eig_bounds(&(&coeffs * coeffs.adjoint()), tol)?;
            if a >= LOCAL_LOWER_BOUND_FLOOR {
                accepted = Some(coeffs);
                break;
            }
        }
        let coeffs = accepted.ok_or_else(|| {
            precondition(format!("could not draw a well-conditioned local frame for a {d}-dimensional block"))
        })?;
        frames.push(VectorFrame::from_columns(&(w.basis() * coeffs)));
    }
    LocalFrameFamily::from_frames(f, frames, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random_subspace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize, i: usize) -> Subspace {
        let mut b = zeros(n, 1);
        b[(i, 0)] = c64(1.0, 0.0);
        Subspace::from_orthonormal(b, &ToleranceConfig::default()).unwrap()
    }

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_fn(v.len(), v.len(), |i, j| if i == j { c64(v[i], 0.0) } else { c64(0.0, 0.0) })
    }

    fn std_decomposition(weights: &[f64]) -> FusionSequence {
        let n = weights.len();
        FusionSequence::new((0..n).map(|i| line(n, i)).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(projection(&Subspace::zero(3)).norm(), 0.0);
        assert!((projection(&Subspace::full(3)) - identity(3)).norm() < 1e-15);
        let tol = ToleranceConfig::default();
        let v = DVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        let w = Subspace::span(2, &[v], &tol).unwrap();
        let half = Matrix::from_element(2, 2, c64(0.5, 0.0));
        assert!((projection(&w) - half).norm() < 1e-15);
    }

    #[test]
    fn weight_compatibility_is_enforced() {
        assert!(FusionSequence::new(vec![Subspace::zero(2)], vec![1.0]).is_err());
        assert!(FusionSequence::new(vec![line(2, 0)], vec![0.0]).is_err());
        assert!(FusionSequence::new(vec![line(2, 0)], vec![-1.0]).is_err());
        assert!(FusionSequence::new(vec![line(2, 0), line(3, 0)], vec![1.0, 1.0]).is_err());
        assert!(FusionSequence::new(vec![Subspace::zero(2), line(2, 1)], vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn analysis_ambient_examples() {
        let single = FusionSequence::new(vec![Subspace::full(3)], vec![1.0]).unwrap();
        assert!((fusion_analysis_ambient(&single) - identity(3)).norm() < 1e-15);

        let f = std_decomposition(&[1.0, 2.0]);
        let t = fusion_analysis_ambient(&f);
        assert_eq!(t.shape(), (4, 2));
        assert!((t.rows(0, 2) - diag(&[1.0, 0.0])).norm() < 1e-15);
        assert!((t.rows(2, 2) - diag(&[0.0, 2.0])).norm() < 1e-15);

        let z = FusionSequence::new(vec![Subspace::zero(2), line(2, 1)], vec![0.0, 1.0]).unwrap();
        assert_eq!(fusion_analysis_ambient(&z).rows(0, 2).norm(), 0.0);
    }

    #[test]
    fn synthesis_kw_examples() {
        assert!((fusion_synthesis_kw(&std_decomposition(&[1.0, 1.0])) - identity(2)).norm() < 1e-15);
        assert!((fusion_synthesis_kw(&std_decomposition(&[1.0, 2.0])) - diag(&[1.0, 2.0])).norm() < 1e-15);
        let z = FusionSequence::new(vec![Subspace::zero(2), line(2, 1)], vec![0.0, 1.0]).unwrap();
        assert_eq!(fusion_synthesis_kw(&z).shape(), (2, 1));
    }

    #[test]
    fn frame_operator_and_bounds_examples() {
        let tol = ToleranceConfig::default();
        let f = std_decomposition(&[1.0, 2.0]);
        assert!((fusion_frame_operator(&f) - diag(&[1.0, 4.0])).norm() < 1e-15);
        let (a, b) = fusion_bounds(&f, &tol).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 4.0).abs() < 1e-14);

        let single = FusionSequence::new(vec![Subspace::full(2)], vec![1.0]).unwrap();
        assert!((fusion_frame_operator(&single) - identity(2)).norm() < 1e-15);

        let twice = FusionSequence::new(vec![Subspace::full(2), Subspace::full(2)], vec![1.0, 1.0]).unwrap();
        assert!((fusion_frame_operator(&twice) - identity(2) * c64(2.0, 0.0)).norm() < 1e-15);
        let (a, b) = fusion_bounds(&twice, &tol).unwrap();
        assert!((a - 2.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);

        let line_only = FusionSequence::new(vec![line(2, 0)], vec![1.0]).unwrap();
        let (a, b) = fusion_bounds(&line_only, &tol).unwrap();
        assert!(a.abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        assert!(matches!(frame_operator_inverse(&line_only, &tol), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn classify_examples() {
        let tol = ToleranceConfig::default();
        let c = classify(&std_decomposition(&[1.0, 1.0, 1.0]), &tol).unwrap();
        assert!(c.bessel && c.frame && c.riesz_fusion_basis);

        let f = FusionSequence::new(vec![line(2, 0), Subspace::full(2)], vec![1.0, 1.0]).unwrap();
        let c = classify(&f, &tol).unwrap();
        assert!(c.frame && !c.riesz_fusion_basis);

        let c = classify(&FusionSequence::new(vec![line(2, 0)], vec![1.0]).unwrap(), &tol).unwrap();
        assert!(c.bessel && !c.frame && !c.riesz_fusion_basis);
    }

    #[test]
    fn excess_examples() {
        let tol = ToleranceConfig::default();
        assert_eq!(excess(&std_decomposition(&[1.0, 1.0]), &tol).unwrap(), Excess { ambient: 2, kw: 0 });
        let single = FusionSequence::new(vec![Subspace::full(2)], vec![1.0]).unwrap();
        assert_eq!(excess(&single, &tol).unwrap(), Excess { ambient: 0, kw: 0 });
        let twice = FusionSequence::new(vec![Subspace::full(2), Subspace::full(2)], vec![1.0, 1.0]).unwrap();
        assert_eq!(excess(&twice, &tol).unwrap(), Excess { ambient: 2, kw: 2 });
    }

    #[test]
    fn local_frame_examples() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = std_decomposition(&[1.0, 1.0]);
        let fam = build_local_frames(&f, 0, &mut rng, &tol).unwrap();
        for (i, (phi, dual)) in fam.frames.iter().zip(&fam.duals).enumerate() {
            assert_eq!(phi.len(), 1);
            // One vector on a line: the dual is v / |v|^2 and reconstructs the line.
            let v = &phi.vectors()[0];
            let vd = &dual.vectors()[0];
            assert!((vd - v / c64(v.norm_squared(), 0.0)).norm() < 1e-12);
            assert!((fam.local_bounds[i].unwrap().0 - v.norm_squared()).abs() < 1e-12);
        }

        let u = DVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let w = Subspace::span(2, &[u.clone()], &tol).unwrap();
        let f = FusionSequence::new(vec![w], vec![1.0]).unwrap();
        let fam = LocalFrameFamily::from_frames(&f, vec![VectorFrame::new(2, vec![u.clone(), u.clone()]).unwrap()], &tol).unwrap();
        for vd in fam.duals[0].vectors() {
            assert!((vd - &u * c64(0.5, 0.0)).norm() < 1e-14);
        }

        let z = FusionSequence::new(vec![Subspace::zero(2), line(2, 0), line(2, 1)], vec![0.0, 1.0, 1.0]).unwrap();
        let fam = build_local_frames(&z, 2, &mut rng, &tol).unwrap();
        assert!(fam.frames[0].is_empty());
        assert!(fam.local_bounds[0].is_none());
        assert!(fam.alpha >= 0.1);
    }

    #[test]
    fn local_frames_must_stay_in_their_subspace() {
        let tol = ToleranceConfig::default();
        let f = FusionSequence::new(vec![line(2, 0)], vec![1.0]).unwrap();
        let off = DVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
        let bad = VectorFrame::new(2, vec![off]).unwrap();
        assert!(matches!(LocalFrameFamily::from_frames(&f, vec![bad], &tol), Err(Error::Precondition(_))));
    }

    #[test]
    fn local_reconstruction_on_random_fusion_frames() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..40 {
            let n = 2 + trial % 5;
            let subspaces = (0..4)
                .map(|_| {
                    let d = rng.random_range(0..=n);
                    random_subspace(n, d, &mut rng).unwrap()
                })
                .collect();
            let f = FusionSequence::unweighted(subspaces).unwrap();
            let fam = build_local_frames(&f, trial % 4, &mut rng, &tol).unwrap();
            for ((w, phi), dual) in f.subspaces().iter().zip(&fam.frames).zip(&fam.duals) {
                let p = w.projection();
                // sum_j <P x, phi_j> dual_j = dual_synth * phi_synth^* * P
                let recon = dual.synthesis() * phi.synthesis().adjoint() * &p;
                assert!((recon - &p).norm() <= tol.eq_rel * (n as f64).sqrt());
            }
        }
    }
}
