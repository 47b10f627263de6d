//! Acceptance suite: fourteen criteria, one PASS/FAIL line each.
//!
//! The table goes to stderr on every run. The test fails if any criterion
//! fails.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use ffv_core::duality::{
    canonical_gavruta_dual, find_separating_dual, gavruta_dual_check, generate_fusion_dual, is_admissible,
    kpp_dual_check, max_block_deviation, sample_annihilating_sequence, DualKind,
};
use ffv_core::fusion::{build_local_frames, classify, FusionSequence, Subspace};
use ffv_core::instance::{generate, random_annulus, random_conditioned, random_spec, Instance, InstanceSpec, SymbolMode};
use ffv_core::multipliers::{
    assemble_multiplier, comparison_multiplier_ar, comparison_multiplier_msh, condition_c, reweighting_properties,
    inverse_via_qdagger, local_frame_equivalence, multiplier_matrix, riesz_multiplier_verdict, schatten_checks,
    Symbol,
};
use ffv_core::numerics::{c64, identity, random_gaussian, spectral_norm, svd, zeros, Invertibility, Matrix, ToleranceConfig};
use ffv_core::ovf::{
    canonical_ov_dual, dual_span_dimension, embed_fusion, null_bessel_certificate, ovf_frame_operator_bounds,
    sample_ov_dual, OvFrame,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn rng(criterion: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(criterion << 32 | trial)
}

/// Collects per-trial results; the first failure wins.
fn all_ok<T: Send>(items: Vec<Result<T, String>>) -> Result<Vec<T>, String> {
    items.into_iter().collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Random operator-valued frame with `n, k <= 8`, `N <= 6` and `alpha / beta >= 1e-4`.
fn random_ovf(rng: &mut ChaCha8Rng) -> OvFrame {
    loop {
        let n = rng.random_range(1..=8usize);
        let k = rng.random_range(1..=8usize);
        let big_n = rng.random_range(1..=6usize);
        if big_n * k < n {
            continue;
        }
        let blocks = (0..big_n).map(|_| random_gaussian(k, n, rng)).collect();
        let a = OvFrame::new(n, k, blocks).unwrap();
        let (_, alpha, beta) = ovf_frame_operator_bounds(&a, &tol()).unwrap();
        if alpha >= 1e-4 * beta {
            return a;
        }
    }
}

fn instance(seed: u64) -> Instance {
    generate(&random_spec(seed)).unwrap()
}

fn with_mode(seed: u64, mode: SymbolMode) -> Instance {
    let mut spec = random_spec(seed);
    spec.symbol_mode = mode;
    spec.local_redundancy = None;
    generate(&spec).unwrap()
}

fn c1_canonical_duals() -> Outcome {
    let worst = all_ok(
        (0..200u64)
            .into_par_iter()
            .map(|t| {
                let mut r = rng(1, t);
                let a = random_ovf(&mut r);
                let mut worst = canonical_ov_dual(&a, &tol()).map_err(e)?.duality_residual().map_err(e)?;
                for _ in 0..20 {
                    let g = random_gaussian(a.len() * a.codomain_dim(), a.domain_dim(), &mut r);
                    let d = sample_ov_dual(&a, &g, &tol()).map_err(e)?;
                    ensure(d.perturbation().norm() > 0.0 || a.len() * a.codomain_dim() == a.domain_dim(), || {
                        format!("trial {t}: sampled dual coincides with the canonical one")
                    })?;
                    worst = worst.max(d.duality_residual().map_err(e)?);
                }
                Ok(worst)
            })
            .collect(),
    )?
    .into_iter()
    .fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("max residual {worst:.3e}"))?;
    Ok(format!("200 frames x 21 duals, max ||T~* T - I|| = {worst:.2e}"))
}

fn c2_dual_generator() -> Outcome {
    let stats = all_ok(
        (0..200u64)
            .into_par_iter()
            .map(|t| {
                let mut r = rng(2, t);
                let w = instance(t).w;
                let n = w.ambient_dim();
                let is_identity = t % 4 == 0;
                let u = if is_identity { identity(n) } else { random_conditioned(n, 0.5, 2.0, &mut r).map_err(e)? };
                let l = sample_annihilating_sequence(&w, 1.0, &mut r, &tol()).map_err(e)?;
                let g = generate_fusion_dual(&w, &u, &l, &tol()).map_err(e)?;
                let verdict = kpp_dual_check(&g.v, &w, &g.q, &tol()).map_err(e)?;
                let rel = spectral_norm(&(&verdict.composite - &u)).map_err(e)? / spectral_norm(&u).map_err(e)?;
                ensure(rel <= 1e-8, || format!("trial {t}: ||composite - U|| / ||U|| = {rel:.3e}"))?;
                let adm = is_admissible(&g.q, &g.v, &w, &tol()).map_err(e)?;
                ensure(adm.admissible, || format!("trial {t}: admissibility violation {:.3e}", adm.max_violation))?;
                if is_identity {
                    ensure(verdict.kind == DualKind::Dual, || format!("trial {t}: U = I gave {:?}", verdict.kind))?;
                }
                Ok((rel, is_identity))
            })
            .collect(),
    )?;
    let worst = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let ids = stats.iter().filter(|s| s.1).count();
    Ok(format!("200 triples ({ids} with U = I), max relative residual {worst:.2e}"))
}

fn c3_c4_population() -> Vec<OvFrame> {
    (0..100u64).map(|t| random_ovf(&mut rng(3, t))).collect()
}

fn c3_dual_span() -> Outcome {
    let frames = c3_c4_population();
    all_ok(
        frames
            .par_iter()
            .enumerate()
            .map(|(t, a)| {
                let dim = dual_span_dimension(a, &tol()).map_err(e)?;
                let expected = a.len() * a.codomain_dim();
                ensure(dim == expected, || format!("frame {t}: span dimension {dim}, expected {expected}"))
            })
            .collect(),
    )?;
    Ok("100 frames, span of dual ranges = N k in every case".into())
}

fn c4_null_bessel() -> Outcome {
    let frames = c3_c4_population();
    all_ok(
        frames
            .par_iter()
            .enumerate()
            .map(|(t, a)| {
                let c = null_bessel_certificate(a, &tol()).map_err(e)?;
                ensure(c == 0, || format!("frame {t}: certificate {c}"))
            })
            .collect(),
    )?;
    Ok("100 frames, null certificate 0 in every case".into())
}

fn c5_separating_duals() -> Outcome {
    let mut pairs = Vec::new();
    let mut seed = 0u64;
    while pairs.len() < 50 {
        let inst = instance(seed);
        seed += 1;
        if max_block_deviation(&inst.w, &inst.v).unwrap() >= 0.1 {
            pairs.push((inst.w, inst.v));
        }
    }
    let found = all_ok(
        pairs
            .par_iter()
            .enumerate()
            .map(|(t, (w, w2))| {
                let sep = find_separating_dual(w, w2, usize::MAX, &tol()).map_err(e)?;
                ensure(sep.witness.is_some(), || format!("pair {t}: no witness"))?;
                let same = find_separating_dual(w, w, usize::MAX, &tol()).map_err(e)?;
                ensure(same.witness.is_none(), || format!("pair {t}: W' = W produced a witness"))?;
                Ok(sep.candidates_checked)
            })
            .collect(),
    )?;
    let most = found.iter().copied().max().unwrap_or(0);
    Ok(format!("50 pairs separated (at most {most} candidates examined); W' = W never separated"))
}

/// `B (B^* B)^{-1} B^*` without orthonormalizing `B`.
fn oracle_projection(b: &Matrix) -> Matrix {
    let gram = (b.adjoint() * b).try_inverse().expect("basis images are independent");
    b * gram * b.adjoint()
}

fn c6_gavruta() -> Outcome {
    let worst = all_ok(
        (0..100u64)
            .into_par_iter()
            .map(|t| {
                let w = instance(1000 + t).w;
                let n = w.ambient_dim();
                let mut s = zeros(n, n);
                for (sub, &om) in w.subspaces().iter().zip(w.weights()) {
                    s += sub.basis() * sub.basis().adjoint() * c64(om * om, 0.0);
                }
                let s_inv = s.try_inverse().ok_or("S_W is singular")?;
                let mut sum = zeros(n, n);
                let mut proj_gap: f64 = 0.0;
                let dual = canonical_gavruta_dual(&w, &tol()).map_err(e)?;
                for (i, (sub, &om)) in w.subspaces().iter().zip(w.weights()).enumerate() {
                    if sub.is_zero() {
                        continue;
                    }
                    let pv = oracle_projection(&(&s_inv * sub.basis()));
                    let pw = sub.basis() * sub.basis().adjoint();
                    sum += &pv * &s_inv * pw * c64(om * om, 0.0);
                    proj_gap = proj_gap.max(spectral_norm(&(dual.subspaces()[i].projection() - pv)).map_err(e)?);
                }
                let oracle = spectral_norm(&(sum - identity(n))).map_err(e)?;
                let library = gavruta_dual_check(&dual, &w, &tol()).map_err(e)?;
                ensure(dual.weights() == w.weights(), || format!("frame {t}: weights changed"))?;
                let worst = oracle.max(library).max(proj_gap);
                ensure(worst <= 1e-8, || format!("frame {t}: oracle {oracle:.3e}, library {library:.3e}, projections {proj_gap:.3e}"))?;
                Ok(worst)
            })
            .collect(),
    )?
    .into_iter()
    .fold(0.0, f64::max);
    Ok(format!("100 frames, max residual against direct assembly {worst:.2e}"))
}

/// Replaces the smallest singular value of `R_j` so that `gamma = f inv_rel delta`.
fn near_threshold(inst: &Instance, r: &mut ChaCha8Rng) -> Symbol {
    let s = &inst.symbol;
    let tol = tol();
    let j = r.random_range(0..s.len());
    let delta = condition_c(s, &tol).unwrap().delta;
    let f = 10f64.powf(r.random_range(-0.9..0.9));
    let target = f * tol.inv_rel * delta / s.m()[j].norm();
    let d = svd(&s.r()[j]).unwrap();
    let mut sv = d.s.clone();
    *sv.last_mut().unwrap() = target;
    let n = sv.len();
    let diag = Matrix::from_fn(n, n, |a, b| if a == b { c64(sv[a], 0.0) } else { c64(0.0, 0.0) });
    let mut rs = s.r().to_vec();
    rs[j] = &d.u * diag * d.v.adjoint();
    Symbol::new(s.m().to_vec(), rs).unwrap()
}

fn c7_riesz_characterization() -> Outcome {
    let tol = tol();
    let verdicts = all_ok(
        (0..100u64)
            .into_par_iter()
            .map(|t| {
                let mode = if t % 2 == 0 { SymbolMode::RandomCHolding } else { SymbolMode::RandomCFailing };
                let inst = with_mode(3 * t, mode);
                let (w, v) = (&inst.w, &inst.v);
                ensure(classify(w, &tol).unwrap().riesz_fusion_basis && classify(v, &tol).unwrap().riesz_fusion_basis, || {
                    format!("pair {t} is not a Riesz pair")
                })?;
                let verdict = riesz_multiplier_verdict(&inst.symbol, v, w, &tol).map_err(e)?;
                ensure(!verdict.indeterminate && verdict.consistent, || {
                    format!(
                        "pair {t}: C band {:?}, M band {:?}, consistent {}",
                        verdict.condition.band, verdict.multiplier_band, verdict.consistent
                    )
                })?;
                Ok(verdict.actual == Some(true))
            })
            .collect(),
    )?;
    let invertible = verdicts.iter().filter(|&&b| b).count();
    all_ok(
        (0..20u64)
            .into_par_iter()
            .map(|t| {
                let inst = with_mode(3 * (200 + t), SymbolMode::RandomCHolding);
                let symbol = near_threshold(&inst, &mut rng(7, t));
                let c = condition_c(&symbol, &tol).map_err(e)?;
                ensure(c.band == Invertibility::Indeterminate, || format!("adversarial {t}: C band {:?}", c.band))?;
                let verdict = riesz_multiplier_verdict(&symbol, &inst.v, &inst.w, &tol).map_err(e)?;
                ensure(verdict.indeterminate && verdict.consistent, || format!("adversarial {t} not flagged"))
            })
            .collect(),
    )?;
    Ok(format!(
        "100 Riesz pairs consistent ({invertible} invertible, {} singular); 20 near-threshold symbols indeterminate",
        100 - invertible
    ))
}

fn c8_reweighted_sequences() -> Outcome {
    let tol = tol();
    let rows = all_ok(
        (0..150u64)
            .into_par_iter()
            .map(|t| {
                let inst = instance(2000 + t);
                let rep = assemble_multiplier(&inst.symbol, &inst.v, &inst.w, &tol).map_err(e)?;
                if !rep.invertible {
                    return Ok(None);
                }
                let g = reweighting_properties(&inst.symbol, &inst.v, &inst.w, &tol).map_err(e)?;
                ensure(g.all_frames, || format!("instance {t}: a reweighted sequence is not a frame {:?}", g.bounds))?;
                let slack = 1.0 - 1e-6;
                ensure(g.bounds[2].0 >= slack * g.lower_bound_w, || {
                    format!("instance {t}: lower bound {:.6e} < {:.6e}", g.bounds[2].0, g.lower_bound_w)
                })?;
                let inf_m = inst.symbol.m_abs().into_iter().fold(f64::INFINITY, f64::min);
                let x = g.excess_ambient;
                if inf_m > 0.0 {
                    ensure(x[0] == x[2] && x[1] == x[3], || format!("instance {t}: excesses {x:?}"))?;
                }
                if condition_c(&inst.symbol, &tol).map_err(e)?.holds {
                    ensure(x[0] == x[1], || format!("instance {t}: excesses {x:?}"))?;
                }
                Ok(Some(inf_m > 0.0))
            })
            .collect(),
    )?;
    let checked = rows.iter().flatten().count();
    ensure(checked >= 50, || format!("only {checked} invertible instances"))?;
    Ok(format!("{checked} invertible instances of 150; bounds, lower bound and excesses hold"))
}

fn c9_qdagger() -> Outcome {
    let tol = tol();
    let mut seeds = Vec::new();
    let mut seed = 3000u64;
    while seeds.len() < 50 {
        let inst = with_mode(seed, SymbolMode::RandomCHolding);
        if assemble_multiplier(&inst.symbol, &inst.v, &inst.w, &tol).unwrap().invertible {
            seeds.push(seed);
        }
        seed += 1;
    }
    let stats = all_ok(
        seeds
            .par_iter()
            .map(|&s| {
                let inst = with_mode(s, SymbolMode::RandomCHolding);
                let mut r = rng(9, s);
                let (v, w) = (&inst.v, &inst.w);
                let stacked = v.len() * v.ambient_dim();
                let a_v = embed_fusion(v);
                let duals = (0..5)
                    .map(|_| sample_ov_dual(&a_v, &random_gaussian(stacked, v.ambient_dim(), &mut r), &tol))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(e)?;
                let probe = random_gaussian(stacked, v.ambient_dim(), &mut r);
                let q = inverse_via_qdagger(&inst.symbol, v, w, &duals, &probe, &tol).map_err(e)?;
                let res = q.duality_residual.max(q.max_representation_residual()).max(q.supplied_dual_residual);
                ensure(q.representation_residuals.len() == 6, || "expected canonical plus 5 duals".into())?;
                ensure(res <= 1e-8, || format!("seed {s}: residual {res:.3e}"))?;
                let p = q.probe_residual.ok_or_else(|| format!("seed {s}: no probe"))?;
                ensure(p >= 1e-4, || format!("seed {s}: probe residual {p:.3e}"))?;
                Ok((res, p))
            })
            .collect(),
    )?;
    let worst = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let probe = stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(format!("50 instances x 6 duals, max residual {worst:.2e}, min probe residual {probe:.2e}"))
}

fn c10_local_frames() -> Outcome {
    let tol = tol();
    let stats = all_ok(
        (0..50u64)
            .into_par_iter()
            .map(|t| {
                let inst = instance(4000 + t);
                let redundancy = (t % 4) as usize;
                let local = build_local_frames(&inst.w, redundancy, &mut rng(10, t), &tol).map_err(e)?;
                let (s, v, w) = (&inst.symbol, &inst.v, &inst.w);
                let pos = local_frame_equivalence(s, v, w, &local.frames, &local.duals, &tol).map_err(e)?;
                ensure(pos <= 1e-8, || format!("instance {t}: residual {pos:.3e}"))?;
                let neg = local_frame_equivalence(s, v, w, &local.frames, &local.frames, &tol).map_err(e)?;
                ensure(neg > 1e-3, || format!("instance {t}: negative control only {neg:.3e}"))?;
                Ok((pos, neg))
            })
            .collect(),
    )?;
    let worst = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let neg = stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(format!("50 instances, redundancy 0..3, max residual {worst:.2e}, min negative control {neg:.2e}"))
}

fn line(n: usize, i: usize) -> Subspace {
    let mut b = zeros(n, 1);
    b[(i, 0)] = c64(1.0, 0.0);
    Subspace::from_orthonormal(b, &tol()).unwrap()
}

/// `E_{ab}`: maps `e_b` to `e_a`.
fn unit(n: usize, a: usize, b: usize) -> Matrix {
    let mut m = zeros(n, n);
    m[(a, b)] = c64(1.0, 0.0);
    m
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn c11_cross_contrast() -> Outcome {
    let tol = tol();
    let w = FusionSequence::unweighted(vec![line(2, 0), line(2, 1)]).unwrap();
    let v = FusionSequence::unweighted(vec![line(2, 1), line(2, 0)]).unwrap();
    let m = vec![c64(1.0, 0.0); 2];
    let symbol = Symbol::new(m.clone(), vec![unit(2, 1, 0), unit(2, 0, 1)]).map_err(e)?;
    let swap = unit(2, 0, 1) + unit(2, 1, 0);
    let mult = multiplier_matrix(&symbol, &v, &w).map_err(e)?;
    let gap = max_abs(&(&mult - &swap));
    let ar = max_abs(&comparison_multiplier_ar(&m, &v, &w).map_err(e)?);
    let msh = max_abs(&comparison_multiplier_msh(&m, &v, &w, &tol).map_err(e)?);
    let sigma = svd(&mult).map_err(e)?.s_min();
    ensure(gap <= 1e-12 && ar <= 1e-12 && msh <= 1e-12, || format!("|M - swap| {gap:e}, |M_ar| {ar:e}, |M_msh| {msh:e}"))?;
    ensure((sigma - 1.0).abs() <= 1e-12, || format!("sigma_min(M) = {sigma}"))?;
    Ok(format!("M = swap ({gap:.0e}), M_ar = 0 ({ar:.0e}), M_msh = 0 ({msh:.0e}), sigma_min(M) = 1"))
}

/// Symbol whose blocks `R_i` have rank at most `dim W_i`.
fn rank_bounded_symbol(inst: &Instance, r: &mut ChaCha8Rng) -> Symbol {
    let n = inst.w.ambient_dim();
    let mut m = Vec::new();
    let mut rs = Vec::new();
    for d in inst.w.dims() {
        let k = d.max(1);
        m.push(random_annulus(0.5, 2.0, r));
        rs.push(random_gaussian(n, k, r) * random_gaussian(k, n, r) * c64(1.0 / n as f64, 0.0));
    }
    Symbol::new(m, rs).unwrap()
}

fn c12_schatten() -> Outcome {
    let tol = tol();
    let worst = all_ok(
        (0..50u64)
            .into_par_iter()
            .map(|t| {
                let inst = instance(5000 + t);
                let symbol = rank_bounded_symbol(&inst, &mut rng(12, t));
                let mut worst: f64 = 0.0;
                for p in [1.0, 2.0, 4.0] {
                    let rep = schatten_checks(&symbol, &inst.v, &inst.w, p, &tol).map_err(e)?;
                    ensure(rep.all_ok(), || format!("instance {t}, p = {p}: {rep:?}"))?;
                    ensure(rep.block_multiset_relative <= 1e-8, || {
                        format!("instance {t}: multiset deviation {:.3e}", rep.block_multiset_relative)
                    })?;
                    worst = worst.max(rep.block_multiset_relative);
                }
                Ok(worst)
            })
            .collect(),
    )?
    .into_iter()
    .fold(0.0, f64::max);
    Ok(format!("50 instances x p in {{1, 2, 4}}, max multiset deviation {worst:.2e}"))
}

fn c13_norm_bound() -> Outcome {
    let tol = tol();
    let worst = all_ok(
        (0..500u64)
            .into_par_iter()
            .map(|t| {
                let inst = instance(6000 + t);
                let rep = assemble_multiplier(&inst.symbol, &inst.v, &inst.w, &tol).map_err(e)?;
                let ratio = rep.sigma_max / rep.norm_bound;
                ensure(ratio <= 1.0 + tol.eq_rel, || format!("instance {t}: sigma_max / bound = {ratio}"))?;
                Ok(ratio)
            })
            .collect(),
    )?
    .into_iter()
    .fold(0.0, f64::max);
    Ok(format!("500 instances, max sigma_max / bound = {worst:.4}"))
}

fn ffv(args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_ffv")).args(args).output().expect("ffv runs");
    let text = String::from_utf8_lossy(&o.stdout)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_s\""))
        .map(|l| format!("{l}\n"))
        .collect();
    (o.status.code(), text)
}

fn c14_cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let spec = InstanceSpec::new(4, vec![2, 2, 1], SymbolMode::RandomCHolding, 42);
    let files: Vec<_> = ["a.json", "b.json"].iter().map(|f| dir.path().join(f)).collect();
    for f in &files {
        let (code, _) = ffv(&[
            "gen", "--dim", "4", "--blocks", "3", "--dims", "2,2,1", "--symbol", "random_C_holding", "--seed", "42",
            "--local-redundancy", "2", "-o", f.to_str().unwrap(),
        ]);
        ensure(code == Some(0), || format!("gen exited {code:?}"))?;
    }
    let a = std::fs::read(&files[0]).map_err(e)?;
    ensure(a == std::fs::read(&files[1]).map_err(e)?, || "gen is not deterministic".into())?;
    ensure(a == std::fs::read(golden.join("random42.json")).map_err(e)?, || "gen differs from golden".into())?;
    ensure(Instance::load(&files[0]).map_err(e)?.spec.seed == spec.seed, || "round trip lost the seed".into())?;

    let args = ["check", "--suite", "all", "--random", "6", "--seed", "11"];
    let (code, first) = ffv(&args);
    let (_, second) = ffv(&args);
    ensure(code == Some(0), || format!("passing run exited {code:?}"))?;
    ensure(first == second, || "reports differ between runs".into())?;
    let expected = std::fs::read_to_string(golden.join("random6.seed11.all.report.json")).map_err(e)?;
    ensure(first == expected, || "report differs from golden".into())?;

    let (code, _) = ffv(&["check", "--suite", "duals", "--random", "2", "--seed", "1", "--tol-eq", "1e-300"]);
    ensure(code == Some(1), || format!("failing run exited {code:?}"))?;
    let (code, _) = ffv(&["check", "--suite", "all", "/no/such/instance.json"]);
    ensure(code == Some(2), || format!("missing file exited {code:?}"))?;
    let (code, _) = ffv(&["explain", "no_such_check"]);
    ensure(code == Some(2), || format!("unknown check exited {code:?}"))?;
    Ok("gen and check byte-identical to golden files; exit codes 0, 1, 2 as specified".into())
}

/// Written straight to stderr so the table shows without `--nocapture`.
fn report(line: String) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("canonical and sampled duals reconstruct", c1_canonical_duals),
        ("dual generator reproduces U", c2_dual_generator),
        ("dual ranges span the stacked space", c3_dual_span),
        ("no nonzero sequence annihilates every dual", c4_null_bessel),
        ("distinct fusion frames are separated by a dual", c5_separating_duals),
        ("canonical dual of the Gavruta type", c6_gavruta),
        ("parsa1257 on Riesz pairs", c7_riesz_characterization),
        ("reweighted sequences of invertible multipliers", c8_reweighted_sequences),
        ("qdagger inverse representation", c9_qdagger),
        ("local frames give the same multiplier", c10_local_frames),
        ("cross example contrast", c11_cross_contrast),
        ("Schatten class bounds", c12_schatten),
        ("multiplier norm bound", c13_norm_bound),
        ("CLI determinism and exit codes", c14_cli_contract),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => report(format!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1)),
            Err(why) => {
                report(format!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
