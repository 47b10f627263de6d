//! Named verification checks grouped into suites, and the report they produce.
//!
//! Every check reduces to a residual compared against a tolerance. Checks of
//! the form `observed >= threshold` are reported with residual
//! `threshold / observed` and tolerance 1. Boolean checks use residual 0 or 1
//! against tolerance 0.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{
    canonical_gavruta_dual, find_separating_dual, gavruta_dual_check, generate_fusion_dual, kpp_dual_check,
    max_block_deviation, sample_annihilating_sequence, DualKind,
};
use crate::error::{Error, Result};
use crate::fusion::{build_local_frames, classify, LocalFrameFamily};
use crate::instance::{generate, random_conditioned, random_spec, Instance, InstanceSpec};
use crate::multipliers::{
    assemble_multiplier, comparison_multiplier_ar, comparison_multiplier_msh, condition_c, reweighting_properties,
    inverse_via_qdagger, local_frame_equivalence, multiplier_matrix, multiplier_via_composition,
    riesz_multiplier_verdict, schatten_checks,
};
use crate::numerics::{identity, random_gaussian, spectral_norm, svd, Invertibility, ToleranceConfig};
use crate::ovf::{
    canonical_ov_dual, dual_span_dimension, embed_fusion, null_bessel_certificate, sample_ov_dual,
};

pub const REPORT_SCHEMA: &str = "ffv1-report";

/// Largest stacked dimension `N n` for which the elementary dual family is swept.
pub const DUAL_FAMILY_LIMIT: usize = 48;
/// Sampled duals per instance in the dual and inverse-representation checks.
pub const SAMPLED_DUALS: usize = 5;
/// Local-frame redundancy used when an instance file stores no local frames.
pub const DEFAULT_LOCAL_REDUNDANCY: usize = 1;

const SEPARATION_DEVIATION: f64 = 0.1;
const NEGATIVE_CONTROL_FLOOR: f64 = 1e-3;
const UNIQUENESS_FLOOR: f64 = 1e-4;
const SCHATTEN_EXPONENTS: [f64; 3] = [1.0, 2.0, 4.0];
const RNG_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Duals,
    Multipliers,
    Local,
    Schatten,
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Duals, Suite::Multipliers, Suite::Local, Suite::Schatten, Suite::All];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Duals => "duals",
            Suite::Multipliers => "multipliers",
            Suite::Local => "local",
            Suite::Schatten => "schatten",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Contract(format!("unknown suite '{s}' (expected duals, multipliers, local, schatten or all)")))
    }
}

/// Catalog entry describing one check.
#[derive(Clone, Copy, Debug)]
pub struct CheckInfo {
    pub name: &'static str,
    pub suite: Suite,
    pub anchor: &'static str,
    pub statement: &'static str,
    pub tolerance: &'static str,
}

pub const CATALOG: &[CheckInfo] = &[
    CheckInfo {
        name: "canonical_dual",
        suite: Suite::Duals,
        anchor: "canonical dual of an operator-valued frame",
        statement: "For A = {w_i P_{W_i}}, the canonical dual with analysis T_A S_A^{-1} satisfies ||T_{A~}^* T_A - I|| <= eq_rel.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "sampled_duals",
        suite: Suite::Duals,
        anchor: "the set of all duals",
        statement: "Every dual T_A S_A^{-1} + L with L^* T_A = 0 reconstructs: max over sampled L of ||T_{A~(L)}^* T_A - I|| <= eq_rel.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "dual_span",
        suite: Suite::Duals,
        anchor: "duals span the stacked space",
        statement: "The ranges of all duals of A span the stacked space: |dim span - N n| = 0 (rank at rank_rel).",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "null_bessel",
        suite: Suite::Duals,
        anchor: "only the zero sequence annihilates every dual",
        statement: "The space of block sequences B with T_B^* T_D = 0 for every dual D of A has dimension 0.",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "separating_dual",
        suite: Suite::Duals,
        anchor: "duals determine the frame",
        statement: "When max_i ||w_i P_{W_i} - v_i P_{V_i}|| >= 0.1, some dual of A_W fails to be a dual of A_V (residual 0 when a witness is found).",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "separating_dual_self",
        suite: Suite::Duals,
        anchor: "duals determine the frame",
        statement: "No dual of A_W fails to be a dual of A_W itself (residual 0 when no witness is found).",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "kpp_generator_identity",
        suite: Suite::Duals,
        anchor: "constructive fusion frame dual",
        statement: "With U = I and a random L annihilating T_W, the generated (V, v, Q) is admissible and T_V^* D_Q T_W = I; residual is max(||composite - I||, admissibility violation), 1 if the verdict is not 'dual'.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "kpp_generator",
        suite: Suite::Duals,
        anchor: "constructive fusion frame dual",
        statement: "With random invertible U and random L annihilating T_W, the generated (V, v, Q) is admissible and ||T_V^* D_Q T_W - U|| <= eq_rel ||U||.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "gavruta_canonical",
        suite: Suite::Duals,
        anchor: "canonical Gavruta dual",
        statement: "V_i = S_W^{-1} W_i with v = w satisfies ||sum_i w_i v_i P_{V_i} S_W^{-1} P_{W_i} - I||_F / sqrt(n) <= eq_rel.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "composition_identity",
        suite: Suite::Multipliers,
        anchor: "multiplier as T_V^* D_{mR} T_W",
        statement: "Blockwise assembly and T_V^* D_{mR} T_W agree: ||difference|| / max(1, ||M||) <= eq_rel.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "norm_bound",
        suite: Suite::Multipliers,
        anchor: "multiplier norm bound",
        statement: "sigma_max(M) <= sqrt(beta_V beta_W) ||m||_inf ||R||_inf; residual is the ratio of the two sides.",
        tolerance: "1 + eq_rel",
    },
    CheckInfo {
        name: "semi_normalized",
        suite: Suite::Multipliers,
        anchor: "condition C forces a semi-normalized symbol",
        statement: "When C(m,R) holds, inf |m_i| >= gamma / ||R||_inf; residual is (gamma / ||R||_inf) / inf |m_i|.",
        tolerance: "1 + eq_rel",
    },
    CheckInfo {
        name: "parsa1257",
        suite: Suite::Multipliers,
        anchor: "if and only if C(m,R) holds",
        statement: "For a Riesz fusion basis W: with V Riesz, M is invertible iff C(m,R) holds; with C(m,R) holding, M is invertible iff V is Riesz. Near-threshold decisions are indeterminate.",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "reweighted_frames",
        suite: Suite::Multipliers,
        anchor: "invertible multipliers force fusion frames",
        statement: "If M is invertible then (W, w), (V, v), (W, |m| w) and (V, |m| v) are all fusion frames.",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "reweighted_lower_bound",
        suite: Suite::Multipliers,
        anchor: "invertible multipliers force fusion frames",
        statement: "alpha(W, |m| w) >= 1 / (beta_V ||R||_inf^2 ||M^{-1}||^2) and symmetrically for V; residual is bound / observed, with (1 - eq_rel) slack.",
        tolerance: "1",
    },
    CheckInfo {
        name: "excess_preserved",
        suite: Suite::Multipliers,
        anchor: "equal ambient excess",
        statement: "Ambient excess is unchanged by reweighting with |m| when inf |m_i| > 0, and excess(W, w) = excess(V, v) when C(m,R) holds.",
        tolerance: "0 (exact)",
    },
    CheckInfo {
        name: "qdagger",
        suite: Suite::Multipliers,
        anchor: "unique operator-valued dual frame of",
        statement: "Q^dagger_i = w_i P_{W_i} S_W^{-1} + conj(m_i) L_i is a dual of {w_i P_{W_i}} and M^{-1} = T_{Q^dagger}^* D_{(mR)^{-1}} T_D for every dual D of {v_i P_{V_i}}.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "qdagger_uniqueness",
        suite: Suite::Multipliers,
        anchor: "unique operator-valued dual frame of",
        statement: "Perturbing Q^dagger inside the duals of {w_i P_{W_i}} by 1% breaks the inverse representation for some dual D by at least 1e-4; residual is 1e-4 / observed.",
        tolerance: "1",
    },
    CheckInfo {
        name: "ar_contrast",
        suite: Suite::Multipliers,
        anchor: "multipliers without an operator symbol",
        statement: "Enabled by the [ar] comparison flag: sum m_i w_i v_i P_{V_i} P_{W_i} and sum m_i w_i v_i P_{V_i} S_W^{-1} P_{W_i} are singular while M is invertible; residual is max sigma_min of the comparisons over sigma_min(M).",
        tolerance: "inv_rel",
    },
    CheckInfo {
        name: "local_frames",
        suite: Suite::Local,
        anchor: "fusion multiplier as an ordinary multiplier",
        statement: "With local frames {phi_ij} of W_i and their canonical duals, M equals the ordinary multiplier with analysis {w_i phi_ij}, synthesis {v_i P_{V_i} R_i phi~_ij} and symbol m_i repeated.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "local_frames_negative",
        suite: Suite::Local,
        anchor: "fusion multiplier as an ordinary multiplier",
        statement: "Using the local frames in place of their duals breaks the equality by at least 1e-3; residual is 1e-3 / observed.",
        tolerance: "1",
    },
    CheckInfo {
        name: "schatten_p1",
        suite: Suite::Schatten,
        anchor: "Schatten class membership",
        statement: "For p = 1: singular values of D_{mR} are the union of those of the blocks, ||M||_p <= ||T_V|| ||T_W|| ||D_{mR}||_p, and ||D_{mR}||_p^p <= sum rank(R_i) |m_i|^p ||R_i||^p.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "schatten_p2",
        suite: Suite::Schatten,
        anchor: "Schatten class membership",
        statement: "As schatten_p1 with p = 2.",
        tolerance: "eq_rel",
    },
    CheckInfo {
        name: "schatten_p4",
        suite: Suite::Schatten,
        anchor: "Schatten class membership",
        statement: "As schatten_p1 with p = 4.",
        tolerance: "eq_rel",
    },
];

pub fn check_info(name: &str) -> Option<&'static CheckInfo> {
    CATALOG.iter().find(|c| c.name == name)
}

/// Text printed by `explain`.
pub fn explain(name: &str) -> Result<String> {
    let info = check_info(name).ok_or_else(|| Error::Contract(format!("unknown check '{name}'")))?;
    Ok(format!(
        "{}\n  suite:     {}\n  statement: {}\n  anchor:    \"{}\"\n  tolerance: {}\n",
        info.name, info.suite, info.statement, info.anchor, info.tolerance
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub trial: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedCheck {
    pub name: String,
    pub trial: usize,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub suite: Suite,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    /// One spec per trial, in trial order.
    pub instances: Vec<InstanceSpec>,
    pub checks: Vec<CheckResult>,
    pub skipped: Vec<SkippedCheck>,
    pub summary: Summary,
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub tol: ToleranceConfig,
    /// Adds the `ar_contrast` check.
    pub compare_ar: bool,
}

enum Outcome {
    Measured { residual: f64, tolerance: f64 },
    Indeterminate(String),
    Skip(String),
}

fn measured(residual: f64, tolerance: f64) -> Outcome {
    Outcome::Measured { residual, tolerance }
}

fn boolean(ok: bool) -> Outcome {
    measured(if ok { 0.0 } else { 1.0 }, 0.0)
}

/// `threshold / observed` against tolerance 1.
fn at_least(observed: f64, threshold: f64) -> Outcome {
    measured(threshold / observed, 1.0)
}

fn skip(reason: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Skip(reason.into()))
}

/// JSON has no infinities; residuals are clamped to the largest finite value.
fn finite(x: f64) -> f64 {
    if x.is_nan() {
        f64::MAX
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

struct Recorder {
    trial: usize,
    checks: Vec<CheckResult>,
    skipped: Vec<SkippedCheck>,
}

impl Recorder {
    fn run(&mut self, name: &'static str, f: impl FnOnce() -> Result<Outcome>) {
        let anchor = check_info(name).map_or("", |c| c.anchor).to_string();
        let result = |residual: f64, tolerance: f64, verdict, detail| CheckResult {
            name: name.to_string(),
            anchor: anchor.clone(),
            residual: finite(residual),
            tolerance,
            verdict,
            trial: self.trial,
            detail,
        };
        let entry = match f() {
            Ok(Outcome::Measured { residual, tolerance }) => {
                let verdict = if residual <= tolerance { Verdict::Pass } else { Verdict::Fail };
                result(residual, tolerance, verdict, None)
            }
            Ok(Outcome::Indeterminate(why)) => result(1.0, 0.0, Verdict::Indeterminate, Some(why)),
            Ok(Outcome::Skip(reason)) => {
                self.skipped.push(SkippedCheck {
                    name: name.to_string(),
                    trial: self.trial,
                    reason,
                });
                return;
            }
            Err(e) => result(f64::MAX, 0.0, Verdict::Fail, Some(e.to_string())),
        };
        self.checks.push(entry);
    }
}

fn run_duals(inst: &Instance, rec: &mut Recorder, rng: &mut ChaCha8Rng, tol: &ToleranceConfig) {
    let (w, v) = (&inst.w, &inst.v);
    let n = w.ambient_dim();
    let stacked = w.len() * n;
    let a = embed_fusion(w);
    rec.run("canonical_dual", || Ok(measured(canonical_ov_dual(&a, tol)?.duality_residual()?, tol.eq_rel)));
    rec.run("sampled_duals", || {
        let mut worst: f64 = 0.0;
        for _ in 0..SAMPLED_DUALS {
            let d = sample_ov_dual(&a, &random_gaussian(stacked, n, rng), tol)?;
            worst = worst.max(d.duality_residual()?);
        }
        Ok(measured(worst, tol.eq_rel))
    });
    let too_large = || format!("stacked dimension {stacked} exceeds {DUAL_FAMILY_LIMIT}");
    rec.run("dual_span", || {
        if stacked > DUAL_FAMILY_LIMIT {
            return skip(too_large());
        }
        Ok(measured(dual_span_dimension(&a, tol)?.abs_diff(stacked) as f64, 0.0))
    });
    rec.run("null_bessel", || {
        if stacked > DUAL_FAMILY_LIMIT {
            return skip(too_large());
        }
        Ok(measured(null_bessel_certificate(&a, tol)? as f64, 0.0))
    });
    rec.run("separating_dual", || {
        if stacked > DUAL_FAMILY_LIMIT {
            return skip(too_large());
        }
        let dev = max_block_deviation(w, v)?;
        if dev < SEPARATION_DEVIATION {
            return skip(format!("block deviation {dev:.3e} is below {SEPARATION_DEVIATION}"));
        }
        Ok(boolean(find_separating_dual(w, v, usize::MAX, tol)?.witness.is_some()))
    });
    rec.run("separating_dual_self", || {
        if stacked > DUAL_FAMILY_LIMIT {
            return skip(too_large());
        }
        Ok(boolean(find_separating_dual(w, w, usize::MAX, tol)?.witness.is_none()))
    });
    rec.run("kpp_generator_identity", || {
        let l = sample_annihilating_sequence(w, 1.0, rng, tol)?;
        let g = generate_fusion_dual(w, &identity(n), &l, tol)?;
        let verdict = kpp_dual_check(&g.v, w, &g.q, tol)?;
        let residual = verdict.residual_to_identity.max(verdict.admissibility.max_violation);
        Ok(measured(if verdict.kind == DualKind::Dual { residual } else { residual.max(1.0) }, tol.eq_rel))
    });
    rec.run("kpp_generator", || {
        let u = random_conditioned(n, 0.5, 2.0, rng)?;
        let l = sample_annihilating_sequence(w, 1.0, rng, tol)?;
        let g = generate_fusion_dual(w, &u, &l, tol)?;
        let verdict = kpp_dual_check(&g.v, w, &g.q, tol)?;
        let rel = spectral_norm(&(&verdict.composite - &u))? / spectral_norm(&u)?;
        let residual = rel.max(verdict.admissibility.max_violation);
        Ok(measured(if verdict.kind == DualKind::None { residual.max(1.0) } else { residual }, tol.eq_rel))
    });
    rec.run("gavruta_canonical", || {
        let dual = canonical_gavruta_dual(w, tol)?;
        Ok(measured(gavruta_dual_check(&dual, w, tol)?, tol.eq_rel))
    });
}

fn run_multipliers(inst: &Instance, rec: &mut Recorder, rng: &mut ChaCha8Rng, opts: &SuiteOptions) {
    let tol = &opts.tol;
    let (w, v, s) = (&inst.w, &inst.v, &inst.symbol);
    let n = w.ambient_dim();
    let report = assemble_multiplier(s, v, w, tol);
    let cond = condition_c(s, tol);
    rec.run("composition_identity", || {
        let a = multiplier_matrix(s, v, w)?;
        let b = multiplier_via_composition(s, v, w)?;
        Ok(measured(spectral_norm(&(&a - b))? / spectral_norm(&a)?.max(1.0), tol.eq_rel))
    });
    rec.run("norm_bound", || {
        let r = report.as_ref().map_err(clone_err)?;
        let ratio = if r.norm_bound > 0.0 { r.sigma_max / r.norm_bound } else { r.sigma_max };
        Ok(measured(ratio, 1.0 + tol.eq_rel))
    });
    rec.run("semi_normalized", || {
        let c = cond.as_ref().map_err(clone_err)?;
        if !c.holds {
            return skip("condition C does not hold");
        }
        let inf_m = s.m_abs().into_iter().fold(f64::INFINITY, f64::min);
        if !c.semi_normalized {
            return Ok(boolean(false));
        }
        Ok(measured(c.lower_witness / inf_m, 1.0 + tol.eq_rel))
    });
    rec.run("parsa1257", || {
        if !classify(w, tol)?.riesz_fusion_basis {
            return skip("W is not a Riesz fusion basis");
        }
        let verdict = riesz_multiplier_verdict(s, v, w, tol)?;
        if !verdict.v_riesz && verdict.condition.band == Invertibility::Singular {
            return skip("V is not Riesz and condition C fails, so neither direction applies");
        }
        if verdict.indeterminate {
            return Ok(Outcome::Indeterminate(format!(
                "gamma {:.3e} vs delta {:.3e}, sigma_min(M) band {:?}",
                verdict.condition.gamma, verdict.condition.delta, verdict.multiplier_band
            )));
        }
        Ok(boolean(verdict.consistent))
    });
    let invertible = report.as_ref().map(|r| r.invertible).unwrap_or(false);
    let reweighting = invertible.then(|| reweighting_properties(s, v, w, tol));
    rec.run("reweighted_frames", || match &reweighting {
        None => skip("multiplier is not invertible"),
        Some(g) => Ok(boolean(g.as_ref().map_err(clone_err)?.all_frames)),
    });
    rec.run("reweighted_lower_bound", || match &reweighting {
        None => skip("multiplier is not invertible"),
        Some(g) => {
            let g = g.as_ref().map_err(clone_err)?;
            let slack = 1.0 - tol.eq_rel;
            let rw = slack * g.lower_bound_w / g.bounds[2].0;
            let rv = slack * g.lower_bound_v / g.bounds[3].0;
            Ok(measured(rw.max(rv), 1.0))
        }
    });
    rec.run("excess_preserved", || match &reweighting {
        None => skip("multiplier is not invertible"),
        Some(g) => {
            let g = g.as_ref().map_err(clone_err)?;
            let flags = [g.reweighting_preserves_excess, g.excess_w_equals_v];
            if flags.iter().all(Option::is_none) {
                return skip("m has a zero entry and condition C fails");
            }
            Ok(boolean(flags.iter().flatten().all(|&ok| ok)))
        }
    });
    let c_holds = cond.as_ref().map(|c| c.holds).unwrap_or(false);
    let qdagger = (c_holds && invertible).then(|| {
        let a_v = embed_fusion(v);
        let stacked = v.len() * n;
        let duals = (0..SAMPLED_DUALS)
            .map(|_| sample_ov_dual(&a_v, &random_gaussian(stacked, n, rng), tol))
            .collect::<Result<Vec<_>>>()?;
        let probe = random_gaussian(stacked, n, rng);
        inverse_via_qdagger(s, v, w, &duals, &probe, tol)
    });
    rec.run("qdagger", || match &qdagger {
        None => skip("requires condition C and an invertible multiplier"),
        Some(q) => {
            let q = q.as_ref().map_err(clone_err)?;
            let residual = q
                .duality_residual
                .max(q.max_representation_residual())
                .max(q.supplied_dual_residual);
            Ok(measured(residual, tol.eq_rel))
        }
    });
    rec.run("qdagger_uniqueness", || match &qdagger {
        None => skip("requires condition C and an invertible multiplier"),
        Some(q) => match q.as_ref().map_err(clone_err)?.probe_residual {
            None => skip("the duals of {w_i P_{W_i}} are unique, so there is nothing to perturb"),
            Some(p) => Ok(at_least(p, UNIQUENESS_FLOOR)),
        },
    });
    if opts.compare_ar {
        rec.run("ar_contrast", || {
            let r = report.as_ref().map_err(clone_err)?;
            let ar = svd(&comparison_multiplier_ar(s.m(), v, w)?)?.s_min();
            let msh = svd(&comparison_multiplier_msh(s.m(), v, w, tol)?)?.s_min();
            Ok(measured(ar.max(msh) / r.sigma_min, tol.inv_rel))
        });
    }
}

fn run_local(inst: &Instance, rec: &mut Recorder, rng: &mut ChaCha8Rng, tol: &ToleranceConfig) {
    let (w, v, s) = (&inst.w, &inst.v, &inst.symbol);
    let local: Result<LocalFrameFamily> = match &inst.local {
        Some(l) => Ok(l.clone()),
        None => build_local_frames(w, DEFAULT_LOCAL_REDUNDANCY, rng, tol),
    };
    rec.run("local_frames", || {
        let l = local.as_ref().map_err(clone_err)?;
        Ok(measured(local_frame_equivalence(s, v, w, &l.frames, &l.duals, tol)?, tol.eq_rel))
    });
    rec.run("local_frames_negative", || {
        let l = local.as_ref().map_err(clone_err)?;
        let observed = local_frame_equivalence(s, v, w, &l.frames, &l.frames, tol)?;
        Ok(at_least(observed, NEGATIVE_CONTROL_FLOOR))
    });
}

fn run_schatten(inst: &Instance, rec: &mut Recorder, tol: &ToleranceConfig) {
    let names = ["schatten_p1", "schatten_p2", "schatten_p4"];
    for (name, p) in names.into_iter().zip(SCHATTEN_EXPONENTS) {
        rec.run(name, || {
            let r = schatten_checks(&inst.symbol, &inst.v, &inst.w, p, tol)?;
            let excess_b = (r.multiplier_norm - r.ideal_bound).max(0.0) / r.ideal_bound.max(1.0);
            let excess_c = (r.diagonal_power - r.rank_bound).max(0.0) / r.rank_bound.max(1.0);
            let residual = r.block_multiset_relative.max(excess_b).max(excess_c);
            Ok(measured(residual, tol.eq_rel))
        });
    }
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::Contract(m) => Error::Contract(m.clone()),
        Error::NumericFailure { rows, cols } => Error::NumericFailure { rows: *rows, cols: *cols },
        Error::NotInvertible { sigma_min, threshold } => Error::NotInvertible {
            sigma_min: *sigma_min,
            threshold: *threshold,
        },
        Error::NotAFrame { alpha, beta, threshold } => Error::NotAFrame {
            alpha: *alpha,
            beta: *beta,
            threshold: *threshold,
        },
        Error::Precondition(m) => Error::Precondition(m.clone()),
        other => Error::Format(other.to_string()),
    }
}

/// Runs every check of `suite` on one instance.
pub fn run_checks(suite: Suite, inst: &Instance, trial: usize, opts: &SuiteOptions) -> (Vec<CheckResult>, Vec<SkippedCheck>) {
    let mut rng = ChaCha8Rng::seed_from_u64(inst.spec.seed ^ RNG_SALT);
    let mut rec = Recorder {
        trial,
        checks: Vec::new(),
        skipped: Vec::new(),
    };
    if suite.includes(Suite::Duals) {
        run_duals(inst, &mut rec, &mut rng, &opts.tol);
    }
    if suite.includes(Suite::Multipliers) {
        run_multipliers(inst, &mut rec, &mut rng, opts);
    }
    if suite.includes(Suite::Local) {
        run_local(inst, &mut rec, &mut rng, &opts.tol);
    }
    if suite.includes(Suite::Schatten) {
        run_schatten(inst, &mut rec, &opts.tol);
    }
    (rec.checks, rec.skipped)
}

fn summarize(checks: &[CheckResult]) -> Summary {
    let mut s = Summary::default();
    for c in checks {
        match c.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::Indeterminate => s.indeterminate += 1,
        }
    }
    s
}

fn assemble_report(suite: Suite, seed: u64, opts: &SuiteOptions, runs: Vec<(InstanceSpec, Vec<CheckResult>, Vec<SkippedCheck>)>, start: Instant) -> VerificationReport {
    let mut instances = Vec::with_capacity(runs.len());
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for (spec, c, s) in runs {
        instances.push(spec);
        checks.extend(c);
        skipped.extend(s);
    }
    VerificationReport {
        schema: REPORT_SCHEMA.to_string(),
        suite,
        seed,
        tolerances: opts.tol,
        instances,
        summary: summarize(&checks),
        checks,
        skipped,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// Runs `suite` on a single loaded instance (trial 0).
pub fn run_suite_on_instance(suite: Suite, inst: &Instance, opts: &SuiteOptions) -> Result<VerificationReport> {
    opts.tol.validate()?;
    let start = Instant::now();
    let (checks, skipped) = run_checks(suite, inst, 0, opts);
    Ok(assemble_report(suite, inst.spec.seed, opts, vec![(inst.spec.clone(), checks, skipped)], start))
}

/// Runs `suite` on `count` generated instances; trial `i` uses seed `seed + i`.
///
/// Trials run in parallel and are reported in trial order.
pub fn run_suite_random(suite: Suite, count: usize, seed: u64, opts: &SuiteOptions) -> Result<VerificationReport> {
    opts.tol.validate()?;
    let start = Instant::now();
    let runs = (0..count)
        .into_par_iter()
        .map(|i| {
            let spec = random_spec(seed.wrapping_add(i as u64));
            let inst = generate(&spec)?;
            let (checks, skipped) = run_checks(suite, &inst, i, opts);
            Ok((spec, checks, skipped))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_report(suite, seed, opts, runs, start))
}
