//! `(m, R)`-Bessel fusion multipliers `M = sum_i m_i v_i w_i P_{V_i} R_i P_{W_i}`.

use serde::Serialize;

use crate::error::{contract, precondition, Error, Result};
use crate::frames::{ordinary_multiplier, VectorFrame};
use crate::fusion::{
    classify, excess, frame_operator_inverse, fusion_analysis_ambient, fusion_bounds, FusionSequence,
};
use crate::numerics::{
    c64, check_finite, identity, rank_tol, schatten_norm, singular_values, spectral_norm, svd, zeros,
    Invertibility, Matrix, ToleranceConfig, C64,
};
use crate::ovf::{canonical_ov_dual, embed_fusion, kernel_projector, DualCandidate};

/// Scalar symbol `m` and operator symbol `R`, one entry per block.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    m: Vec<C64>,
    r: Vec<Matrix>,
}

impl Symbol {
    pub fn new(m: Vec<C64>, r: Vec<Matrix>) -> Result<Self> {
        if m.is_empty() {
            return Err(contract("symbol needs at least one block"));
        }
        if m.len() != r.len() {
            return Err(contract(format!("{} scalars but {} operators", m.len(), r.len())));
        }
        let n = r[0].nrows();
        for (i, ri) in r.iter().enumerate() {
            if ri.shape() != (n, n) {
                return Err(contract(format!("operator {i} has shape {:?}, expected {n}x{n}", ri.shape())));
            }
            check_finite(ri)?;
        }
        if let Some(i) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(contract(format!("scalar {i} is not finite")));
        }
        Ok(Self { m, r })
    }

    /// `m_i = 1`, `R_i = I`.
    pub fn identity(blocks: usize, n: usize) -> Self {
        Self {
            m: vec![c64(1.0, 0.0); blocks],
            r: vec![identity(n); blocks],
        }
    }

    /// `R_i = I` with the given scalars.
    pub fn scalar(m: Vec<C64>, n: usize) -> Result<Self> {
        let r = vec![identity(n); m.len()];
        Self::new(m, r)
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.r[0].nrows()
    }

    pub fn m(&self) -> &[C64] {
        &self.m
    }

    pub fn r(&self) -> &[Matrix] {
        &self.r
    }

    /// `||m||_inf`.
    pub fn m_sup(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||R||_inf = max_i ||R_i||`.
    pub fn r_sup(&self) -> Result<f64> {
        self.r.iter().try_fold(0.0f64, |acc, ri| Ok(acc.max(spectral_norm(ri)?)))
    }

    /// `m^{av} = {|m_i|}`.
    pub fn m_abs(&self) -> Vec<f64> {
        self.m.iter().map(|z| z.norm()).collect()
    }

    fn check_against(&self, f: &FusionSequence) -> Result<()> {
        if self.len() != f.len() {
            return Err(contract(format!("symbol has {} blocks, sequence has {}", self.len(), f.len())));
        }
        if self.dim() != f.ambient_dim() {
            return Err(contract(format!(
                "symbol acts on C^{}, sequence lives in C^{}",
                self.dim(),
                f.ambient_dim()
            )));
        }
        Ok(())
    }
}

fn check_triple(symbol: &Symbol, v: &FusionSequence, w: &FusionSequence) -> Result<()> {
    symbol.check_against(v)?;
    symbol.check_against(w)
}

/// Block-diagonal `D_{mR}` with blocks `m_i R_i`, shape `(N n) x (N n)`.
pub fn block_diag_apply(symbol: &Symbol) -> Matrix {
    let (big_n, n) = (symbol.len(), symbol.dim());
    let mut d = zeros(big_n * n, big_n * n);
    for (i, (mi, ri)) in symbol.m.iter().zip(&symbol.r).enumerate() {
        d.view_mut((i * n, i * n), (n, n)).copy_from(&(ri * *mi));
    }
    d
}

/// Hypothesis `gamma ||x|| <= ||conj(m_j) R_j^* x|| <= delta ||x||` for all `j`.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCReport {
    /// `min_j |m_j| sigma_min(R_j)`.
    pub gamma: f64,
    /// `max_j |m_j| sigma_max(R_j)`.
    pub delta: f64,
    /// `gamma > inv_rel * delta`.
    pub holds: bool,
    /// `gamma` against `inv_rel * delta` with a one-decade guard band.
    pub band: Invertibility,
    pub semi_normalized: bool,
    /// `gamma / ||R||_inf`, a lower bound for `inf |m_i|` whenever C holds.
    pub lower_witness: f64,
}

pub fn condition_c(symbol: &Symbol, tol: &ToleranceConfig) -> Result<ConditionCReport> {
    let mut gamma = f64::INFINITY;
    let mut delta: f64 = 0.0;
    for (mi, ri) in symbol.m.iter().zip(&symbol.r) {
        let s = singular_values(ri)?;
        let (lo, hi) = (s.last().copied().unwrap_or(0.0), s.first().copied().unwrap_or(0.0));
        gamma = gamma.min(mi.norm() * lo);
        delta = delta.max(mi.norm() * hi);
    }
    let r_sup = symbol.r_sup()?;
    let inf_m = symbol.m.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    Ok(ConditionCReport {
        gamma,
        delta,
        holds: delta > 0.0 && gamma > tol.inv_rel * delta,
        band: Invertibility::classify(gamma, tol.inv_rel * delta),
        semi_normalized: inf_m > 0.0,
        lower_witness: if r_sup > 0.0 { gamma / r_sup } else { 0.0 },
    })
}

#[derive(Clone, Debug)]
pub struct MultiplierReport {
    pub matrix: Matrix,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub invertible: bool,
    /// `sigma_min` against `inv_rel * sigma_max` with a one-decade guard band.
    pub band: Invertibility,
    /// `sqrt(beta_V beta_W) ||m||_inf ||R||_inf`.
    pub norm_bound: f64,
}

/// `sum_i m_i v_i w_i P_{V_i} R_i P_{W_i}`, assembled block by block.
pub fn multiplier_matrix(symbol: &Symbol, v: &FusionSequence, w: &FusionSequence) -> Result<Matrix> {
    check_triple(symbol, v, w)?;
    let n = w.ambient_dim();
    let mut out = zeros(n, n);
    for i in 0..w.len() {
        let scale = v.weights()[i] * w.weights()[i];
        if scale == 0.0 {
            continue;
        }
        let pv = v.subspaces()[i].projection();
        let pw = w.subspaces()[i].projection();
        out += pv * &symbol.r[i] * pw * (symbol.m[i] * scale);
    }
    Ok(out)
}

/// `T_{V,v}^* D_{mR} T_{W,w}`, the same operator through the stacked space.
pub fn multiplier_via_composition(symbol: &Symbol, v: &FusionSequence, w: &FusionSequence) -> Result<Matrix> {
    check_triple(symbol, v, w)?;
    Ok(fusion_analysis_ambient(v).adjoint() * block_diag_apply(symbol) * fusion_analysis_ambient(w))
}

pub fn assemble_multiplier(
    symbol: &Symbol,
    v: &FusionSequence,
    w: &FusionSequence,
    tol: &ToleranceConfig,
) -> Result<MultiplierReport> {
    let matrix = multiplier_matrix(symbol, v, w)?;
    let d = svd(&matrix)?;
    let (_, beta_v) = fusion_bounds(v, tol)?;
    let (_, beta_w) = fusion_bounds(w, tol)?;
    let norm_bound = (beta_v * beta_w).sqrt() * symbol.m_sup() * symbol.r_sup()?;
    Ok(MultiplierReport {
        sigma_min: d.s_min(),
        sigma_max: d.s_max(),
        invertible: tol.is_invertible(d.s_min(), d.s_max()),
        band: Invertibility::classify(d.s_min(), tol.inv_rel * d.s_max()),
        norm_bound,
        matrix,
    })
}

/// Outcome of testing the Riesz-basis invertibility characterization.
#[derive(Clone, Debug, Serialize)]
pub struct RieszVerdict {
    pub condition: ConditionCReport,
    pub v_riesz: bool,
    pub multiplier_band: Invertibility,
    /// Invertibility of `M` as the characterization predicts; `None` when the
    /// relevant hypothesis is inside the guard band or neither direction applies.
    pub predicted: Option<bool>,
    /// Invertibility of `M` as measured; `None` inside the guard band.
    pub actual: Option<bool>,
    pub indeterminate: bool,
    pub consistent: bool,
}

/// For a Riesz fusion basis `W`: with `V` Riesz, `M` is invertible iff C
/// holds; with C holding, `M` is invertible iff `V` is Riesz.
pub fn riesz_multiplier_verdict(
    symbol: &Symbol,
    v: &FusionSequence,
    w: &FusionSequence,
    tol: &ToleranceConfig,
) -> Result<RieszVerdict> {
    check_triple(symbol, v, w)?;
    if !classify(w, tol)?.riesz_fusion_basis {
        return Err(precondition("W is not a Riesz fusion basis"));
    }
    let v_riesz = classify(v, tol)?.riesz_fusion_basis;
    let condition = condition_c(symbol, tol)?;
    let report = assemble_multiplier(symbol, v, w, tol)?;
    let c = condition.band.as_bool();
    let predicted = if v_riesz {
        c
    } else if c == Some(true) {
        Some(false)
    } else {
        None
    };
    let actual = report.band.as_bool();
    let indeterminate = predicted.is_none() || actual.is_none();
    Ok(RieszVerdict {
        consistent: indeterminate || predicted == actual,
        condition,
        v_riesz,
        multiplier_band: report.band,
        predicted,
        actual,
        indeterminate,
    })
}

/// Bounds and excesses of the sequences attached to an invertible multiplier.
#[derive(Clone, Debug, Serialize)]
pub struct ReweightingReport {
    /// `(alpha, beta)` of `(W, w)`, `(V, v)`, `(W, m^{av} w)`, `(V, m^{av} v)`.
    pub bounds: [(f64, f64); 4],
    pub all_frames: bool,
    /// `1 / (beta_V ||R||_inf^2 ||M^{-1}||^2)`.
    pub lower_bound_w: f64,
    /// `1 / (beta_W ||R||_inf^2 ||M^{-1}||^2)`.
    pub lower_bound_v: f64,
    /// `alpha(W, m^{av} w) >= (1 - eq_rel) lower_bound_w`, likewise for `V`.
    pub lower_bounds_hold: bool,
    /// Ambient excesses in the order of `bounds`.
    pub excess_ambient: [usize; 4],
    /// `Some` only when `inf |m_i| > 0`.
    pub reweighting_preserves_excess: Option<bool>,
    /// `Some` only when C holds.
    pub excess_w_equals_v: Option<bool>,
}

pub fn reweighting_properties(
    symbol: &Symbol,
    v: &FusionSequence,
    w: &FusionSequence,
    tol: &ToleranceConfig,
) -> Result<ReweightingReport> {
    let report = assemble_multiplier(symbol, v, w, tol)?;
    if !report.invertible {
        return Err(precondition(format!(
            "multiplier is singular (sigma_min {:e}, sigma_max {:e})",
            report.sigma_min, report.sigma_max
        )));
    }
    let m_abs = symbol.m_abs();
    let seqs = [w.clone(), v.clone(), w.reweighted(&m_abs)?, v.reweighted(&m_abs)?];
    let mut bounds = [(0.0, 0.0); 4];
    let mut excess_ambient = [0usize; 4];
    let mut all_frames = true;
    for (k, s) in seqs.iter().enumerate() {
        let (a, b) = fusion_bounds(s, tol)?;
        bounds[k] = (a, b);
        all_frames &= a > tol.inv_rel * b;
        excess_ambient[k] = excess(s, tol)?.ambient;
    }
    let r2 = symbol.r_sup()?.powi(2);
    let inv_norm2 = (1.0 / report.sigma_min).powi(2);
    let lower_bound_w = 1.0 / (bounds[1].1 * r2 * inv_norm2);
    let lower_bound_v = 1.0 / (bounds[0].1 * r2 * inv_norm2);
    let slack = 1.0 - tol.eq_rel;
    let lower_bounds_hold = bounds[2].0 >= slack * lower_bound_w && bounds[3].0 >= slack * lower_bound_v;
    let inf_m = m_abs.iter().copied().fold(f64::INFINITY, f64::min);
    let reweighting_preserves_excess = (inf_m > 0.0)
        .then(|| excess_ambient[0] == excess_ambient[2] && excess_ambient[1] == excess_ambient[3]);
    let excess_w_equals_v = condition_c(symbol, tol)?
        .holds
        .then(|| excess_ambient[0] == excess_ambient[1]);
    Ok(ReweightingReport {
        bounds,
        all_frames,
        lower_bound_w,
        lower_bound_v,
        lower_bounds_hold,
        excess_ambient,
        reweighting_preserves_excess,
        excess_w_equals_v,
    })
}

/// Inverse of a multiplier through the dual `Q^dagger` of `{w_i P_{W_i}}`.
#[derive(Clone, Debug)]
pub struct QDaggerReport {
    /// Blocks `Q^dagger_i = w_i P_{W_i} S_W^{-1} + conj(m_i) L_i`.
    pub q_dagger: Vec<Matrix>,
    pub l_blocks: Vec<Matrix>,
    /// `||T_{Q^dagger}^* T_{W,w} - I||`.
    pub duality_residual: f64,
    /// `||T_{Q^dagger}^* D_{(mR)^{-1}} T_D - M^{-1}|| / ||M^{-1}||` per dual `D`
    /// (the canonical dual of `A_V` first, then the supplied ones).
    pub representation_residuals: Vec<f64>,
    /// `max_D ||T_D^* T_{A_V} - I||` over the same duals.
    pub supplied_dual_residual: f64,
    /// Largest representation residual after replacing `Q^dagger` by
    /// `Q^dagger + E`, `E^* T_{W,w} = 0`, `||E|| = 0.01 ||T_{Q^dagger}||`.
    /// `None` when `ker T_{W,w}^*` is trivial.
    pub probe_residual: Option<f64>,
}

impl QDaggerReport {
    pub fn max_representation_residual(&self) -> f64 {
        self.representation_residuals.iter().copied().fold(0.0, f64::max)
    }
}

const PROBE_RELATIVE_SIZE: f64 = 0.01;

/// `probe` is an `(N n) x n` generator for the uniqueness perturbation; it is
/// projected onto `ker T_{W,w}^*` and rescaled.
pub fn inverse_via_qdagger(
    symbol: &Symbol,
    v: &FusionSequence,
    w: &FusionSequence,
    duals_of_av: &[DualCandidate],
    probe: &Matrix,
    tol: &ToleranceConfig,
) -> Result<QDaggerReport> {
    check_triple(symbol, v, w)?;
    let (big_n, n) = (w.len(), w.ambient_dim());
    let cond = condition_c(symbol, tol)?;
    if !cond.holds {
        return Err(precondition("condition C does not hold"));
    }
    let report = assemble_multiplier(symbol, v, w, tol)?;
    if !report.invertible {
        return Err(precondition("multiplier is singular"));
    }
    if probe.shape() != (big_n * n, n) {
        return Err(contract(format!("probe must be {}x{n}", big_n * n)));
    }
    let m_inv = report.matrix.clone().try_inverse().ok_or(Error::NotInvertible {
        sigma_min: report.sigma_min,
        threshold: tol.inv_rel * report.sigma_max,
    })?;
    let m_inv_adj = m_inv.adjoint();
    let s_inv = frame_operator_inverse(w, tol)?;

    let mut l_blocks = Vec::with_capacity(big_n);
    let mut q_dagger = Vec::with_capacity(big_n);
    let mut inv_blocks = Vec::with_capacity(big_n);
    for i in 0..big_n {
        let (mi, ri) = (symbol.m[i], &symbol.r[i]);
        let (om, ups) = (w.weights()[i], v.weights()[i]);
        let pw_sinv = w.subspaces()[i].projection() * &s_inv;
        let li = ri.adjoint() * v.subspaces()[i].projection() * &m_inv_adj * c64(ups, 0.0)
            - &pw_sinv * (c64(om, 0.0) / mi.conj());
        q_dagger.push(&pw_sinv * c64(om, 0.0) + &li * mi.conj());
        l_blocks.push(li);
        // gamma > 0 certifies that each m_i R_i is invertible.
        inv_blocks.push((ri * mi).try_inverse().ok_or(Error::NotInvertible {
            sigma_min: cond.gamma,
            threshold: tol.inv_rel * cond.delta,
        })?);
    }
    let stack = |blocks: &[Matrix]| {
        let mut t = zeros(big_n * n, n);
        for (i, b) in blocks.iter().enumerate() {
            t.view_mut((i * n, 0), (n, n)).copy_from(b);
        }
        t
    };
    let t_q = stack(&q_dagger);
    let mut d_inv = zeros(big_n * n, big_n * n);
    for (i, b) in inv_blocks.iter().enumerate() {
        d_inv.view_mut((i * n, i * n), (n, n)).copy_from(b);
    }
    let t_w = fusion_analysis_ambient(w);
    let duality_residual = spectral_norm(&(t_q.adjoint() * &t_w - identity(n)))?;

    let a_v = embed_fusion(v);
    let t_av = fusion_analysis_ambient(v);
    let mut duals = vec![canonical_ov_dual(&a_v, tol)?];
    duals.extend_from_slice(duals_of_av);
    let inv_norm = spectral_norm(&m_inv)?;
    let mut representation_residuals = Vec::with_capacity(duals.len());
    let mut supplied_dual_residual: f64 = 0.0;
    let mut middles = Vec::with_capacity(duals.len());
    for d in &duals {
        let t_d = d.analysis();
        if t_d.shape() != (big_n * n, n) {
            return Err(contract("dual of A_V has the wrong shape"));
        }
        supplied_dual_residual = supplied_dual_residual.max(spectral_norm(&(t_d.adjoint() * &t_av - identity(n)))?);
        let middle = &d_inv * t_d;
        representation_residuals.push(spectral_norm(&(t_q.adjoint() * &middle - &m_inv))? / inv_norm);
        middles.push(middle);
    }

    let e = kernel_projector(&embed_fusion(w), tol)? * probe;
    let e_norm = spectral_norm(&e)?;
    let probe_residual = if e_norm > tol.rank_cutoff(e.nrows(), e.ncols(), spectral_norm(probe)?) {
        let e = e * c64(PROBE_RELATIVE_SIZE * spectral_norm(&t_q)? / e_norm, 0.0);
        let t_perturbed = &t_q + e;
        let mut worst: f64 = 0.0;
        for middle in &middles {
            worst = worst.max(spectral_norm(&(t_perturbed.adjoint() * middle - &m_inv))? / inv_norm);
        }
        Some(worst)
    } else {
        None
    };

    Ok(QDaggerReport {
        q_dagger,
        l_blocks,
        duality_residual,
        representation_residuals,
        supplied_dual_residual,
        probe_residual,
    })
}

/// `||M_fusion - M_ordinary|| / max(1, ||M_fusion||)`, where the ordinary
/// multiplier uses analysis frame `{w_i phi_ij}`, synthesis frame
/// `{v_i P_{V_i} R_i phi~_ij}` and symbol `m_i` repeated over `j`.
///
/// `duals[i]` is meant to be a dual of `frames[i]` inside `W_i`; the residual
/// vanishes exactly when every `sum_j phi~_ij phi_ij^*` acts as `P_{W_i}`
/// wherever the multiplier sees it.
pub fn local_frame_equivalence(
    symbol: &Symbol,
    v: &FusionSequence,
    w: &FusionSequence,
    frames: &[VectorFrame],
    duals: &[VectorFrame],
    tol: &ToleranceConfig,
) -> Result<f64> {
    check_triple(symbol, v, w)?;
    let n = w.ambient_dim();
    if frames.len() != w.len() || duals.len() != w.len() {
        return Err(contract("one local frame and one local dual per block are required"));
    }
    let mut m_hat = Vec::new();
    let mut analysis = Vec::new();
    let mut synthesis = Vec::new();
    for i in 0..w.len() {
        let (phi, dual) = (&frames[i], &duals[i]);
        if phi.dim() != n || dual.dim() != n || phi.len() != dual.len() {
            return Err(contract(format!("local frame {i} and its dual do not match")));
        }
        let sub = &w.subspaces()[i];
        let pw = sub.projection();
        if phi.vectors().iter().any(|x| (&pw * x - x).norm() > tol.eq_rel * x.norm().max(1.0)) {
            return Err(precondition(format!("local frame {i} leaves W_{i}")));
        }
        let spanned = if phi.is_empty() { 0 } else { rank_tol(&phi.synthesis(), tol)? };
        if spanned != sub.dim() {
            return Err(precondition(format!("local frame {i} does not span W_{i}")));
        }
        let (om, ups) = (w.weights()[i], v.weights()[i]);
        let push_op = v.subspaces()[i].projection() * &symbol.r[i] * c64(ups, 0.0);
        for (x, y) in phi.vectors().iter().zip(dual.vectors()) {
            m_hat.push(symbol.m[i]);
            analysis.push(x * c64(om, 0.0));
            synthesis.push(&push_op * y);
        }
    }
    let fusion = multiplier_matrix(symbol, v, w)?;
    let ordinary = ordinary_multiplier(
        &m_hat,
        &VectorFrame::new(n, synthesis)?,
        &VectorFrame::new(n, analysis)?,
    )?;
    Ok(spectral_norm(&(&fusion - ordinary))? / spectral_norm(&fusion)?.max(1.0))
}

/// `sum_i m_i w_i v_i P_{V_i} P_{W_i}`.
pub fn comparison_multiplier_ar(m: &[C64], v: &FusionSequence, w: &FusionSequence) -> Result<Matrix> {
    let symbol = Symbol::scalar(m.to_vec(), w.ambient_dim())?;
    multiplier_matrix(&symbol, v, w)
}

/// `sum_i m_i w_i v_i P_{V_i} S_W^{-1} P_{W_i}`.
pub fn comparison_multiplier_msh(
    m: &[C64],
    v: &FusionSequence,
    w: &FusionSequence,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    let s_inv = frame_operator_inverse(w, tol).map_err(|e| match e {
        Error::NotAFrame { alpha, beta, .. } => {
            precondition(format!("W is not a fusion frame (bounds {alpha:e}, {beta:e})"))
        }
        other => other,
    })?;
    let symbol = Symbol::new(m.to_vec(), vec![s_inv; m.len()])?;
    multiplier_matrix(&symbol, v, w)
}

#[derive(Clone, Debug, Serialize)]
pub struct SchattenReport {
    pub p: f64,
    /// Largest gap between the sorted singular values of `D_{mR}` and the
    /// sorted union of the singular values of the blocks `m_i R_i`.
    pub block_multiset_deviation: f64,
    /// The deviation divided by `max(1, ||D_{mR}||)`.
    pub block_multiset_relative: f64,
    pub block_multiset_ok: bool,
    /// `||M||_p`.
    pub multiplier_norm: f64,
    /// `||T_{V,v}|| ||T_{W,w}|| ||D_{mR}||_p`.
    pub ideal_bound: f64,
    pub ideal_bound_ok: bool,
    /// `||D_{mR}||_p^p`.
    pub diagonal_power: f64,
    /// `sum_i rank(R_i) |m_i|^p ||R_i||^p`.
    pub rank_bound: f64,
    pub rank_bound_ok: bool,
}

impl SchattenReport {
    pub fn all_ok(&self) -> bool {
        self.block_multiset_ok && self.ideal_bound_ok && self.rank_bound_ok
    }
}

pub fn schatten_checks(
    symbol: &Symbol,
    v: &FusionSequence,
    w: &FusionSequence,
    p: f64,
    tol: &ToleranceConfig,
) -> Result<SchattenReport> {
    if !(p >= 1.0) {
        return Err(contract(format!("Schatten exponent must be at least 1, got {p}")));
    }
    check_triple(symbol, v, w)?;
    let d = block_diag_apply(symbol);
    let mut from_blocks = Vec::with_capacity(d.nrows());
    let mut rank_bound = 0.0;
    for (mi, ri) in symbol.m.iter().zip(&symbol.r) {
        from_blocks.extend(singular_values(&(ri * *mi))?);
        rank_bound += rank_tol(ri, tol)? as f64 * (mi.norm() * spectral_norm(ri)?).powf(p);
    }
    from_blocks.sort_by(|a, b| b.total_cmp(a));
    let whole = singular_values(&d)?;
    let block_multiset_deviation = whole
        .iter()
        .zip(&from_blocks)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = whole.first().copied().unwrap_or(0.0).max(1.0);

    let multiplier_norm = schatten_norm(&multiplier_matrix(symbol, v, w)?, p)?;
    let d_norm = schatten_norm(&d, p)?;
    let ideal_bound = spectral_norm(&fusion_analysis_ambient(v))? * spectral_norm(&fusion_analysis_ambient(w))? * d_norm;
    let diagonal_power = d_norm.powf(p);
    Ok(SchattenReport {
        p,
        block_multiset_deviation,
        block_multiset_relative: block_multiset_deviation / scale,
        block_multiset_ok: whole.len() == from_blocks.len() && block_multiset_deviation <= tol.eq_rel * scale,
        multiplier_norm,
        ideal_bound,
        ideal_bound_ok: multiplier_norm <= ideal_bound + tol.eq_rel * ideal_bound.max(1.0),
        diagonal_power,
        rank_bound,
        rank_bound_ok: diagonal_power <= rank_bound + tol.eq_rel * rank_bound.max(1.0),
    })
}
