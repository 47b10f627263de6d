//! Ordinary vector frames in C^n and their Bessel multipliers.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{contract, precondition, Error, Result};
use crate::numerics::{
    c64, hermitian_eig_bounds, invert, pinv, random_gaussian, spectral_norm, svd, Matrix,
    ToleranceConfig, C64,
};
use crate::ovf::{embed_ordinary, sample_ov_dual};

/// A finite sequence of vectors in C^n.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFrame {
    dim: usize,
    vectors: Vec<DVector<C64>>,
}

impl VectorFrame {
    pub fn new(dim: usize, vectors: Vec<DVector<C64>>) -> Result<Self> {
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(contract(format!(
                "vector {i} has length {}, expected {dim}",
                v.len()
            )));
        }
        Ok(Self { dim, vectors })
    }

    /// Frame whose vectors are the columns of `m`.
    pub fn from_columns(m: &Matrix) -> Self {
        Self {
            dim: m.nrows(),
            vectors: m.column_iter().map(|c| c.into_owned()).collect(),
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.vectors
    }

    /// `n x len` matrix whose columns are the frame vectors (the synthesis operator).
    pub fn synthesis(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.vectors.len());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// `S = sum_i phi_i phi_i*`.
    pub fn frame_operator(&self) -> Matrix {
        let t = self.synthesis();
        &t * t.adjoint()
    }

    pub fn map(&self, f: impl Fn(&DVector<C64>) -> DVector<C64>) -> Self {
        Self {
            dim: self.dim,
            vectors: self.vectors.iter().map(f).collect(),
        }
    }
}

/// Extreme eigenvalues `(alpha, beta)` of the frame operator.
pub fn frame_bounds_ordinary(phi: &VectorFrame, tol: &ToleranceConfig) -> Result<(f64, f64)> {
    if phi.is_empty() {
        return Err(contract("frame has no vectors"));
    }
    hermitian_eig_bounds(&phi.frame_operator(), tol)
}

pub fn is_frame(phi: &VectorFrame, tol: &ToleranceConfig) -> Result<bool> {
    let (alpha, beta) = frame_bounds_ordinary(phi, tol)?;
    Ok(alpha > tol.inv_rel * beta)
}

/// Canonical dual `psi_i = S^+ phi_i`, computed inside the span of `phi`.
pub fn canonical_dual_ordinary(phi: &VectorFrame, tol: &ToleranceConfig) -> Result<VectorFrame> {
    // S^+ T = (T^+)^*, which avoids squaring the condition number.
    let dual = pinv(&phi.synthesis(), tol)?.adjoint();
    Ok(VectorFrame::from_columns(&dual))
}

/// Matrix of `x -> sum_i m_i <x, anal_i> synth_i`.
pub fn ordinary_multiplier(m: &[C64], synth: &VectorFrame, anal: &VectorFrame) -> Result<Matrix> {
    if m.len() != synth.len() || m.len() != anal.len() {
        return Err(contract(format!(
            "symbol length {} does not match frame lengths {} and {}",
            m.len(),
            synth.len(),
            anal.len()
        )));
    }
    if synth.dim() != anal.dim() {
        return Err(contract("synthesis and analysis frames live in different spaces"));
    }
    let mut out = Matrix::zeros(synth.dim(), anal.dim());
    for ((mi, s), a) in m.iter().zip(synth.vectors()).zip(anal.vectors()) {
        out += (s * a.adjoint()) * *mi;
    }
    Ok(out)
}

/// Result of representing `M^{-1}` as a multiplier with reciprocal symbol.
#[derive(Clone, Debug)]
pub struct InverseRepresentation {
    /// `psi_dagger_i = M^{-1}(m_i phi_i)`, a dual of the analysis frame.
    pub psi_dagger: VectorFrame,
    /// Largest relative deviation `||M^{-1} - M_{1/m, psi_dagger, phi_d}|| / ||M^{-1}||`.
    pub residual: f64,
    pub sigma_min: f64,
}

/// Checks `M^{-1} = M_{1/m, psi_dagger, phi_d}` for the canonical dual of `phi`
/// and every supplied dual `phi_d`.
///
/// `M = M_{m, phi, psi}` uses `phi` for synthesis and `psi` for analysis.
pub fn inverse_representation_ordinary(
    m: &[C64],
    phi: &VectorFrame,
    psi: &VectorFrame,
    duals_of_phi: &[VectorFrame],
    tol: &ToleranceConfig,
) -> Result<InverseRepresentation> {
    let mult = ordinary_multiplier(m, phi, psi)?;
    let d = svd(&mult)?;
    if !tol.is_invertible(d.s_min(), d.s_max()) {
        return Err(Error::NotInvertible {
            sigma_min: d.s_min(),
            threshold: tol.inv_rel * d.s_max(),
        });
    }
    if m.iter().any(|z| z.norm() == 0.0) {
        return Err(precondition("symbol is not semi-normalized"));
    }
    let inv = invert(&mult, tol)?;
    let inv_norm = spectral_norm(&inv)?;
    let psi_dagger = VectorFrame {
        dim: phi.dim(),
        vectors: m
            .iter()
            .zip(phi.vectors())
            .map(|(mi, v)| &inv * (v * *mi))
            .collect(),
    };
    let recip: Vec<C64> = m.iter().map(|z| c64(1.0, 0.0) / z).collect();

    let mut residual: f64 = 0.0;
    let canonical = canonical_dual_ordinary(phi, tol)?;
    for dual in std::iter::once(&canonical).chain(duals_of_phi) {
        let rep = ordinary_multiplier(&recip, &psi_dagger, dual)?;
        residual = residual.max(spectral_norm(&(&inv - rep))? / inv_norm);
    }
    Ok(InverseRepresentation {
        psi_dagger,
        residual,
        sigma_min: d.s_min(),
    })
}

/// Duals of `phi` drawn as canonical dual plus random kernel perturbations.
pub fn sample_ordinary_duals<R: Rng + ?Sized>(
    phi: &VectorFrame,
    count: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<Vec<VectorFrame>> {
    let a = embed_ordinary(phi);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let g = random_gaussian(phi.len(), phi.dim(), rng);
        let cand = sample_ov_dual(&a, &g, tol)?;
        // Block i of the operator-valued dual is the row psi_i*.
        let vectors = cand
            .dual()
            .blocks()
            .iter()
            .map(|b| b.row(0).adjoint())
            .collect();
        out.push(VectorFrame {
            dim: phi.dim(),
            vectors,
        });
    }
    Ok(out)
}
