//! Fusion frame duality through admissible operator sequences.
//!
//! `(V, v)` is a dual of `(W, w)` when some admissible `{Q_i}` makes
//! `sum_i v_i w_i P_{V_i} Q_i P_{W_i}` the identity, and a generalized dual when
//! that composite is merely invertible.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{contract, precondition, Error, Result};
use crate::fusion::{fusion_analysis_ambient, frame_operator_inverse, FusionSequence, Subspace};
use crate::numerics::{
    c64, identity, random_gaussian, range_basis, spectral_norm, svd, zeros, Matrix,
    ToleranceConfig,
};
use crate::ovf::{elementary_dual_family, embed_fusion, ovf_analysis, sample_ov_dual, DualCandidate, OvFrame};

fn check_pair(v: &FusionSequence, w: &FusionSequence) -> Result<()> {
    if v.len() != w.len() {
        return Err(contract(format!("{} blocks vs {} blocks", v.len(), w.len())));
    }
    if v.ambient_dim() != w.ambient_dim() {
        return Err(contract("fusion sequences live in different spaces"));
    }
    Ok(())
}

/// Indices where either sequence has a zero subspace.
pub fn index_zero_set(v: &FusionSequence, w: &FusionSequence) -> Result<Vec<usize>> {
    check_pair(v, w)?;
    Ok((0..v.len())
        .filter(|&i| v.weights()[i] == 0.0 || w.weights()[i] == 0.0)
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexDiagnostics {
    pub index: usize,
    pub in_zero_set: bool,
    /// `||Q_i P_{W_i} - Q_i||`
    pub kernel_dev: f64,
    /// `||P_{V_i} Q_i - Q_i||`
    pub range_dev: f64,
    /// `| ||Q_i|| - 1 |`
    pub norm_dev: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub max_violation: f64,
    pub per_index: Vec<IndexDiagnostics>,
}

pub fn is_admissible(
    q: &[Matrix],
    v: &FusionSequence,
    w: &FusionSequence,
    tol: &ToleranceConfig,
) -> Result<AdmissibilityReport> {
    check_pair(v, w)?;
    let n = w.ambient_dim();
    if q.len() != w.len() {
        return Err(contract(format!("{} operators for {} blocks", q.len(), w.len())));
    }
    if let Some(i) = q.iter().position(|m| m.shape() != (n, n)) {
        return Err(contract(format!("operator {i} is not {n}x{n}")));
    }
    let zero_set = index_zero_set(v, w)?;
    let mut per_index = Vec::with_capacity(q.len());
    let mut max_violation: f64 = 0.0;
    for (i, qi) in q.iter().enumerate() {
        let in_zero_set = zero_set.contains(&i);
        let (kernel_dev, range_dev, norm_dev) = if in_zero_set {
            (0.0, 0.0, 0.0)
        } else {
            let pw = w.subspaces()[i].projection();
            let pv = v.subspaces()[i].projection();
            (
                spectral_norm(&(qi * pw - qi))?,
                spectral_norm(&(pv * qi - qi))?,
                (spectral_norm(qi)? - 1.0).abs(),
            )
        };
        let worst = kernel_dev.max(range_dev).max(norm_dev);
        max_violation = max_violation.max(worst);
        per_index.push(IndexDiagnostics {
            index: i,
            in_zero_set,
            kernel_dev,
            range_dev,
            norm_dev,
            ok: worst <= tol.eq_rel,
        });
    }
    Ok(AdmissibilityReport {
        admissible: per_index.iter().all(|d| d.ok),
        max_violation,
        per_index,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    Dual,
    GeneralizedDual,
    None,
}

#[derive(Clone, Debug)]
pub struct DualVerdict {
    pub kind: DualKind,
    /// `T_{V,v}^* D_Q T_{W,w}`.
    pub composite: Matrix,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub residual_to_identity: f64,
    pub admissibility: AdmissibilityReport,
}

/// `sum_i v_i w_i P_{V_i} Q_i P_{W_i}`.
pub fn kpp_composite(v: &FusionSequence, w: &FusionSequence, q: &[Matrix]) -> Matrix {
    let n = w.ambient_dim();
    let mut out = zeros(n, n);
    for i in 0..w.len() {
        let scale = v.weights()[i] * w.weights()[i];
        if scale == 0.0 {
            continue;
        }
        let pv = v.subspaces()[i].projection();
        let pw = w.subspaces()[i].projection();
        out += pv * &q[i] * pw * c64(scale, 0.0);
    }
    out
}

pub fn kpp_dual_check(
    v: &FusionSequence,
    w: &FusionSequence,
    q: &[Matrix],
    tol: &ToleranceConfig,
) -> Result<DualVerdict> {
    let admissibility = is_admissible(q, v, w, tol)?;
    let composite = kpp_composite(v, w, q);
    let n = w.ambient_dim();
    let d = svd(&composite)?;
    let residual_to_identity = spectral_norm(&(&composite - identity(n)))?;
    let kind = if !admissibility.admissible {
        DualKind::None
    } else if residual_to_identity <= tol.eq_rel {
        DualKind::Dual
    } else if tol.is_invertible(d.s_min(), d.s_max()) {
        DualKind::GeneralizedDual
    } else {
        DualKind::None
    };
    Ok(DualVerdict {
        kind,
        composite,
        sigma_min: d.s_min(),
        sigma_max: d.s_max(),
        residual_to_identity,
        admissibility,
    })
}

/// `||sum_i w_i v_i P_{V_i} S_W^{-1} P_{W_i} - I||_F / sqrt(n)`.
pub fn gavruta_dual_check(v: &FusionSequence, w: &FusionSequence, tol: &ToleranceConfig) -> Result<f64> {
    check_pair(v, w)?;
    let s_inv = frame_operator_inverse(w, tol)?;
    let n = w.ambient_dim();
    let mut sum = zeros(n, n);
    for i in 0..w.len() {
        let scale = v.weights()[i] * w.weights()[i];
        if scale == 0.0 {
            continue;
        }
        sum += v.subspaces()[i].projection() * &s_inv * w.subspaces()[i].projection() * c64(scale, 0.0);
    }
    Ok((sum - identity(n)).norm() / (n as f64).sqrt())
}

/// `(S_W^{-1} W_i, w_i)`.
pub fn canonical_gavruta_dual(w: &FusionSequence, tol: &ToleranceConfig) -> Result<FusionSequence> {
    let s_inv = frame_operator_inverse(w, tol)?;
    let subspaces = w
        .subspaces()
        .iter()
        .map(|wi| wi.image(&s_inv, tol))
        .collect::<Result<Vec<_>>>()?;
    FusionSequence::new(subspaces, w.weights().to_vec())
}

/// Output of the constructive dual generator.
#[derive(Clone, Debug)]
pub struct GeneratedDual {
    pub v: FusionSequence,
    pub q: Vec<Matrix>,
    /// `A_i = (w_i U S_W^{-1} + L_i^*) P_{W_i}`.
    pub a_blocks: Vec<Matrix>,
    /// `T_{V,v}^* D_Q T_{W,w}`, equal to `U`.
    pub composite: Matrix,
}

/// Builds `(V, v, Q)` with `V_i = ran A_i`, `v_i = ||A_i||`, `Q_i = A_i / v_i`.
///
/// `l` must satisfy `T_L^* T_{W,w} = 0`; the composite then equals `u`.
pub fn generate_fusion_dual(
    w: &FusionSequence,
    u: &Matrix,
    l: &OvFrame,
    tol: &ToleranceConfig,
) -> Result<GeneratedDual> {
    let n = w.ambient_dim();
    if u.shape() != (n, n) {
        return Err(contract(format!("U must be {n}x{n}")));
    }
    if l.len() != w.len() || l.domain_dim() != n || l.codomain_dim() != n {
        return Err(contract(format!("L must consist of {} blocks of size {n}x{n}", w.len())));
    }
    let s_inv = frame_operator_inverse(w, tol)?;
    let t_w = fusion_analysis_ambient(w);
    let t_l = ovf_analysis(l);
    let annihilation = spectral_norm(&(t_l.adjoint() * &t_w))?;
    let scale = (spectral_norm(&t_l)? * spectral_norm(&t_w)?).max(1.0);
    if annihilation > tol.eq_rel * scale {
        return Err(precondition(format!(
            "T_L^* T_W must vanish (norm {annihilation:e})"
        )));
    }
    let du = svd(u)?;
    if !tol.is_invertible(du.s_min(), du.s_max()) {
        return Err(Error::NotInvertible {
            sigma_min: du.s_min(),
            threshold: tol.inv_rel * du.s_max(),
        });
    }

    let us = u * &s_inv;
    let a_blocks: Vec<Matrix> = w
        .subspaces()
        .iter()
        .zip(w.weights())
        .zip(l.blocks())
        .map(|((wi, &om), li)| (&us * c64(om, 0.0) + li.adjoint()) * wi.projection())
        .collect();
    let norms = a_blocks
        .iter()
        .map(spectral_norm)
        .collect::<Result<Vec<f64>>>()?;
    let largest = norms.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Err(precondition("every generated block vanished"));
    }
    let floor = tol.rank_rel * largest;

    let mut subspaces = Vec::with_capacity(w.len());
    let mut weights = Vec::with_capacity(w.len());
    let mut q = Vec::with_capacity(w.len());
    for (ai, &norm) in a_blocks.iter().zip(&norms) {
        if norm <= floor {
            subspaces.push(Subspace::zero(n));
            weights.push(0.0);
            q.push(zeros(n, n));
        } else {
            subspaces.push(Subspace::from_orthonormal(range_basis(ai, tol)?, tol)?);
            weights.push(norm);
            q.push(ai * c64(1.0 / norm, 0.0));
        }
    }
    let v = FusionSequence::new(subspaces, weights)?;
    let composite = kpp_composite(&v, w, &q);
    Ok(GeneratedDual {
        v,
        q,
        a_blocks,
        composite,
    })
}

/// Random `L` with `T_L^* T_{W,w} = 0`, drawn from the kernel of `T_{W,w}^*`.
pub fn sample_annihilating_sequence<R: Rng + ?Sized>(
    w: &FusionSequence,
    scale: f64,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<OvFrame> {
    let a = embed_fusion(w);
    let n = w.ambient_dim();
    let g = random_gaussian(w.len() * n, n, rng) * c64(scale, 0.0);
    let cand = sample_ov_dual(&a, &g, tol)?;
    OvFrame::from_analysis(n, cand.perturbation())
}

/// Operator-valued frame `{v_i Q_i^*}`.
pub fn fusion_dual_to_ovf(v: &FusionSequence, q: &[Matrix]) -> Result<OvFrame> {
    let n = v.ambient_dim();
    if q.len() != v.len() {
        return Err(contract("one operator per block is required"));
    }
    let blocks = q
        .iter()
        .zip(v.weights())
        .map(|(qi, &ups)| qi.adjoint() * c64(ups, 0.0))
        .collect();
    OvFrame::new(n, n, blocks)
}

#[derive(Clone, Debug)]
pub struct SeparatingWitness {
    /// Position in the sweep (0 is the canonical dual).
    pub sweep_index: usize,
    /// `||T_D^* T_{W',w'} - I||`.
    pub residual: f64,
    pub dual: DualCandidate,
}

#[derive(Clone, Debug)]
pub struct Separation {
    pub witness: Option<SeparatingWitness>,
    /// `max_i ||w_i P_{W_i} - w'_i P_{W'_i}||`.
    pub max_block_deviation: f64,
    pub candidates_checked: usize,
}

pub fn max_block_deviation(w: &FusionSequence, w_prime: &FusionSequence) -> Result<f64> {
    check_pair(w, w_prime)?;
    w.weighted_projections()
        .iter()
        .zip(w_prime.weighted_projections())
        .map(|(a, b)| spectral_norm(&(a - b)))
        .try_fold(0.0f64, |acc, x| Ok(acc.max(x?)))
}

/// Searches the elementary dual family of `A_W` for a dual that fails to be a
/// dual of `A_{W'}`.
///
/// Candidates are evaluated in parallel; the witness is the first failing one
/// in sweep order. At most `trials_bound` candidates are examined.
pub fn find_separating_dual(
    w: &FusionSequence,
    w_prime: &FusionSequence,
    trials_bound: usize,
    tol: &ToleranceConfig,
) -> Result<Separation> {
    let max_dev = max_block_deviation(w, w_prime)?;
    let n = w.ambient_dim();
    let mut family = elementary_dual_family(&embed_fusion(w), tol)?;
    family.truncate(trials_bound);
    let t_prime = fusion_analysis_ambient(w_prime);
    let threshold = 10.0 * tol.eq_rel;
    let residuals = family
        .par_iter()
        .map(|d| spectral_norm(&(d.analysis().adjoint() * &t_prime - identity(n))))
        .collect::<Result<Vec<f64>>>()?;
    let hit = residuals.iter().position(|&r| r > threshold);
    let witness = hit.map(|idx| SeparatingWitness {
        sweep_index: idx,
        residual: residuals[idx],
        dual: family[idx].clone(),
    });
    Ok(Separation {
        witness,
        max_block_deviation: max_dev,
        candidates_checked: hit.map_or(family.len(), |i| i + 1),
    })
}
