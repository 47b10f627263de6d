//! Operator-valued frames `{A_i}` of `k x n` blocks and their duals.
//!
//! Every dual of a frame `A` has analysis operator `T_A S_A^{-1} + L` with
//! `L^* T_A = 0`. The deterministic family `L_{rs} = P_{ker T_A^*} E_{rs}` over
//! all elementary matrices spans that perturbation space, which turns the
//! density and null-sequence statements into exact rank computations.

use crate::error::{contract, Error, Result};
use crate::frames::VectorFrame;
use crate::fusion::FusionSequence;
use crate::numerics::{
    c64, hermitian_eig_bounds, identity, rank_tol, spectral_norm, svd, zeros, Matrix,
    ToleranceConfig,
};

#[derive(Clone, Debug, PartialEq)]
pub struct OvFrame {
    n: usize,
    k: usize,
    blocks: Vec<Matrix>,
}

impl OvFrame {
    pub fn new(n: usize, k: usize, blocks: Vec<Matrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(contract("operator-valued frame needs at least one block"));
        }
        if let Some((i, b)) = blocks.iter().enumerate().find(|(_, b)| b.shape() != (k, n)) {
            return Err(contract(format!(
                "block {i} has shape {:?}, expected ({k}, {n})",
                b.shape()
            )));
        }
        Ok(Self { n, k, blocks })
    }

    /// Splits a stacked `(N k) x n` analysis matrix into blocks.
    pub fn from_analysis(k: usize, t: &Matrix) -> Result<Self> {
        if k == 0 || t.nrows() % k != 0 {
            return Err(contract(format!(
                "{} rows cannot be split into blocks of height {k}",
                t.nrows()
            )));
        }
        let n = t.ncols();
        let blocks = (0..t.nrows() / k)
            .map(|i| t.rows(i * k, k).into_owned())
            .collect();
        Self::new(n, k, blocks)
    }

    pub fn domain_dim(&self) -> usize {
        self.n
    }

    pub fn codomain_dim(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }
}

/// Stacked analysis operator `x -> {A_i x}`, shape `(N k) x n`.
pub fn ovf_analysis(a: &OvFrame) -> Matrix {
    let mut t = zeros(a.len() * a.k, a.n);
    for (i, b) in a.blocks.iter().enumerate() {
        t.view_mut((i * a.k, 0), (a.k, a.n)).copy_from(b);
    }
    t
}

/// `(S_A, alpha, beta)` with `S_A = T_A^* T_A`.
pub fn ovf_frame_operator_bounds(a: &OvFrame, tol: &ToleranceConfig) -> Result<(Matrix, f64, f64)> {
    let t = ovf_analysis(a);
    let s = t.adjoint() * &t;
    let (alpha, beta) = hermitian_eig_bounds(&s, tol)?;
    Ok((s, alpha, beta))
}

/// `A_i x = <x, phi_i>`: one `1 x n` row `phi_i^*` per vector.
pub fn embed_ordinary(phi: &VectorFrame) -> OvFrame {
    OvFrame {
        n: phi.dim(),
        k: 1,
        blocks: phi
            .vectors()
            .iter()
            .map(|v| Matrix::from_row_slice(1, v.len(), v.adjoint().as_slice()))
            .collect(),
    }
}

/// `A_i = w_i P_{W_i}`.
pub fn embed_fusion(f: &FusionSequence) -> OvFrame {
    let n = f.ambient_dim();
    OvFrame {
        n,
        k: n,
        blocks: f.weighted_projections(),
    }
}

/// A dual `A~(L)` of `A` with analysis operator `T_A S_A^{-1} + L`.
#[derive(Clone, Debug)]
pub struct DualCandidate {
    base: OvFrame,
    perturbation: Matrix,
    dual: OvFrame,
}

impl DualCandidate {
    pub fn base(&self) -> &OvFrame {
        &self.base
    }

    pub fn perturbation(&self) -> &Matrix {
        &self.perturbation
    }

    pub fn dual(&self) -> &OvFrame {
        &self.dual
    }

    pub fn analysis(&self) -> Matrix {
        ovf_analysis(&self.dual)
    }

    /// `||T_{A~}^* T_A - I||`.
    pub fn duality_residual(&self) -> Result<f64> {
        let lhs = self.analysis().adjoint() * ovf_analysis(&self.base);
        spectral_norm(&(lhs - identity(self.base.n)))
    }

    /// `||L^* T_A||` relative to `||T_A|| ||L||` (zero for the canonical dual).
    pub fn membership_residual(&self) -> Result<f64> {
        let t = ovf_analysis(&self.base);
        let l_norm = spectral_norm(&self.perturbation)?;
        if l_norm == 0.0 {
            return Ok(0.0);
        }
        Ok(spectral_norm(&(self.perturbation.adjoint() * &t))? / (spectral_norm(&t)? * l_norm))
    }
}

/// Factorization of `T_A` shared by every dual computation.
struct DualBasis {
    canonical: Matrix,
    kernel_projector: Matrix,
}

fn dual_basis(a: &OvFrame, tol: &ToleranceConfig) -> Result<DualBasis> {
    let t = ovf_analysis(a);
    let d = svd(&t)?;
    let beta = d.s_max() * d.s_max();
    let alpha = if d.s.len() < a.n { 0.0 } else { d.s_min() * d.s_min() };
    if !(alpha > tol.inv_rel * beta) {
        return Err(Error::NotAFrame {
            alpha,
            beta,
            threshold: tol.inv_rel * beta,
        });
    }
    // T_A S_A^{-1} = U diag(1/s) V^*.
    let mut u_scaled = d.u.clone();
    for (j, s) in d.s.iter().enumerate() {
        let mut col = u_scaled.column_mut(j);
        col /= c64(*s, 0.0);
    }
    let canonical = u_scaled * d.v.adjoint();
    let rows = t.nrows();
    let kernel_projector = identity(rows) - &d.u * d.u.adjoint();
    Ok(DualBasis {
        canonical,
        kernel_projector,
    })
}

fn candidate(a: &OvFrame, canonical: &Matrix, l: Matrix) -> Result<DualCandidate> {
    let dual = OvFrame::from_analysis(a.k, &(canonical + &l))?;
    Ok(DualCandidate {
        base: a.clone(),
        perturbation: l,
        dual,
    })
}

/// `A~(0)`, read off from `T_A S_A^{-1}`.
pub fn canonical_ov_dual(a: &OvFrame, tol: &ToleranceConfig) -> Result<DualCandidate> {
    let basis = dual_basis(a, tol)?;
    let rows = basis.canonical.nrows();
    candidate(a, &basis.canonical, zeros(rows, a.n))
}

/// `A~(L)` with `L = P_{ker T_A^*} G`.
pub fn sample_ov_dual(a: &OvFrame, g: &Matrix, tol: &ToleranceConfig) -> Result<DualCandidate> {
    let basis = dual_basis(a, tol)?;
    if g.shape() != basis.canonical.shape() {
        return Err(contract(format!(
            "perturbation generator has shape {:?}, expected {:?}",
            g.shape(),
            basis.canonical.shape()
        )));
    }
    let l = &basis.kernel_projector * g;
    candidate(a, &basis.canonical, l)
}

/// Orthogonal projector onto `ker T_A^*` in the stacked space.
pub fn kernel_projector(a: &OvFrame, tol: &ToleranceConfig) -> Result<Matrix> {
    Ok(dual_basis(a, tol)?.kernel_projector)
}

/// The canonical dual followed by `A~(P_{ker T_A^*} E_{rs})` for every
/// elementary `(N k) x n` matrix `E_{rs}`, row-major in `(r, s)`.
pub fn elementary_dual_family(a: &OvFrame, tol: &ToleranceConfig) -> Result<Vec<DualCandidate>> {
    let basis = dual_basis(a, tol)?;
    let (rows, cols) = basis.canonical.shape();
    let mut out = Vec::with_capacity(1 + rows * cols);
    out.push(candidate(a, &basis.canonical, zeros(rows, cols))?);
    for r in 0..rows {
        for s in 0..cols {
            // P E_{rs} has column r of P in column s and zeros elsewhere.
            let mut l = zeros(rows, cols);
            l.set_column(s, &basis.kernel_projector.column(r));
            out.push(candidate(a, &basis.canonical, l)?);
        }
    }
    Ok(out)
}

/// Horizontal concatenation of the analysis operators of the elementary family.
fn stacked_dual_ranges(a: &OvFrame, tol: &ToleranceConfig) -> Result<Matrix> {
    let family = elementary_dual_family(a, tol)?;
    let rows = a.len() * a.k;
    let mut m = zeros(rows, family.len() * a.n);
    for (t, cand) in family.iter().enumerate() {
        m.view_mut((0, t * a.n), (rows, a.n)).copy_from(&cand.analysis());
    }
    Ok(m)
}

/// Dimension of the span of all dual ranges; equals `N k` for every frame.
pub fn dual_span_dimension(a: &OvFrame, tol: &ToleranceConfig) -> Result<usize> {
    rank_tol(&stacked_dual_ranges(a, tol)?, tol)
}

/// Dimension of the space of block sequences `B` with `T_B^* T_{A~(L_t)} = 0`
/// for every member of the elementary family; zero for every frame.
///
/// The constraint acts on each column of `T_B` separately: column `j` must lie
/// in the common kernel of every `T_{A~(L_t)}^*`. The solution space is thus
/// `n` copies of that kernel.
pub fn null_bessel_certificate(a: &OvFrame, tol: &ToleranceConfig) -> Result<usize> {
    let constraints = stacked_dual_ranges(a, tol)?.adjoint();
    let kernel = crate::numerics::null_space(&constraints, tol)?;
    Ok(a.n * kernel.ncols())
}
