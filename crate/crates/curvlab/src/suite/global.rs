//! Suite orchestration: hypothesis gates, calibrated tolerances, the
//! Einstein/holomorphic co-vanishing check, the endgame instance check and
//! the chart-level report assembly.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;
use thiserror::Error;

use crate::algebra::{
    canonical, contractions, pcasc_estimate, q_tensor, reconstruct_from_q, scalar_identities,
    sectional, Canonical,
};
use crate::chart::Chart;
use crate::jet::{almost_kahler_residuals, jet, nabla_j_norm, second_bianchi_residual, JetError, JetPoint};
use crate::report::{Context, Entry, IdentityReport};
use crate::sampling::{sample_planes, split_seed, ConstraintError, PlaneKind};
use crate::space::{HermitianSpace, SpaceError};
use crate::tensor::Curv4;

use super::algebra_checks::{
    adjudicate_s_coefficient, eq_2_3, eq_2_4, eq_2_5, eq_2_6, eq_2_7, fit_e17, fit_e18,
};
use super::catalog::{EvaluatorKind, IdentityId, CATALOG};
use super::lemma::{
    eq_2_10, eq_2_11, eq_2_12, eq_2_13, eq_2_14, eq_2_19, eq_2_9, Eq210Reading, EvalOutcome,
    LemmaData,
};
use super::section3::{eq_3_1, eq_3_2, eq_3_3, eq_3_4};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("hypothesis violated: {}", failures.join("; "))]
    HypothesisViolated { failures: Vec<String> },
    #[error("conclusion violated: {0}")]
    ConclusionViolated(String),
}

/// Knobs for a suite run; defaults match the acceptance criteria.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub h: f64,
    pub seed: u64,
    /// Antiholomorphic planes per p.c.a.s.c. estimate.
    pub planes: usize,
    /// Random frame tuples per identity evaluation.
    pub tuples: usize,
    pub tolerances: BTreeMap<IdentityId, f64>,
    pub include: Option<BTreeSet<IdentityId>>,
    pub exclude: BTreeSet<IdentityId>,
    pub eq_2_10_reading: Eq210Reading,
    pub config_hash: String,
    pub timestamp: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            h: 1e-3,
            seed: 0,
            planes: 200,
            tuples: 40,
            tolerances: BTreeMap::new(),
            include: None,
            exclude: BTreeSet::new(),
            eq_2_10_reading: Eq210Reading::SymmetricPair,
            config_hash: "unconfigured".to_string(),
            timestamp: None,
        }
    }
}

/// Chart-level tolerance policy: identity verdicts are calibrated to the
/// measured scheme error, never tighter than 1e-6.
pub fn chart_tolerance(bianchi_floor: f64) -> f64 {
    (100.0 * bianchi_floor).max(1e-6)
}

/// Pointwise p.c.a.s.c. measurement on jet data.
pub fn pcasc_spread(
    space: &HermitianSpace,
    r: &Curv4,
    planes: usize,
    seed: u64,
) -> Result<(f64, f64), SuiteError> {
    let samples = sample_planes(space, PlaneKind::Antiholomorphic, planes, seed)?;
    let est = pcasc_estimate(space, r, &samples, 1e-10)
        .map_err(|e| SuiteError::HypothesisViolated {
            failures: vec![e.to_string()],
        })?;
    Ok((est.mean_nu, est.spread))
}

/// Einstein defect and holomorphic sectional spread for one tangent space.
pub fn einstein_holo_defects(
    space: &HermitianSpace,
    r: &Curv4,
    planes: usize,
    seed: u64,
) -> Result<(f64, f64), SuiteError> {
    let c = contractions(space, r);
    let d = space.dim();
    let iso = c.tau / d as f64;
    let mut einstein = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let want = if i == j { iso } else { 0.0 };
            einstein = einstein.max((c.rho.get(i, j) - want).abs());
        }
    }
    let holos = sample_planes(space, PlaneKind::Holomorphic, planes, seed)?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for p in &holos {
        let k = sectional(r, p);
        min = min.min(k);
        max = max.max(k);
    }
    Ok((einstein, max - min))
}

/// Per-point co-vanishing verdict for the Einstein / constant-holomorphic
/// equivalence: residual 0 when both defects sit on the same side of the
/// tolerance, the larger defect otherwise.
pub fn einstein_covanish_residual(einstein: f64, holo_spread: f64, tol: f64) -> f64 {
    if (einstein <= tol) == (holo_spread <= tol) {
        0.0
    } else {
        einstein.max(holo_spread)
    }
}

/// Data-level core of the endgame check: every point must carry vanishing
/// nabla J and a space-form curvature, with one shared constant.
/// Returns (residual, note); the residual folds all three conditions.
pub fn theorem1_data_residual(
    points: &[(HermitianSpace, Curv4, f64)],
    tol: f64,
) -> Result<(f64, String), SuiteError> {
    let mut nus = Vec::with_capacity(points.len());
    let mut worst = 0.0f64;
    for (space, r, njn) in points {
        let c = contractions(space, r);
        let nu = crate::algebra::nu_from_scalars(space.n(), c.tau, c.tau_star);
        let model = canonical(space, Canonical::Pi1)
            .add(&canonical(space, Canonical::Pi2))
            .scale(nu);
        let form_resid = r.sub(&model).sup_norm();
        worst = worst.max(*njn).max(form_resid);
        nus.push(nu);
    }
    let mut dev = 0.0f64;
    for i in 0..nus.len() {
        for j in i + 1..nus.len() {
            dev = dev.max((nus[i] - nus[j]).abs());
        }
    }
    let residual = worst.max(dev);
    let note = format!(
        "nu per point: {:?}; max pairwise deviation {:.3e}",
        nus.iter().map(|v| (v * 1e8).round() / 1e8).collect::<Vec<_>>(),
        dev
    );
    if residual > tol {
        return Err(SuiteError::ConclusionViolated(format!(
            "residual {residual:.3e} > {tol:.3e} ({note})"
        )));
    }
    Ok((residual, note))
}

fn context_for(jet: &JetPoint, seed: u64) -> Context {
    Context {
        chart: jet.chart_name.clone(),
        point: jet.point.clone(),
        h: jet.h,
        seed,
        n: jet.space.n(),
    }
}

struct PointEval {
    jet: JetPoint,
    data: LemmaData,
    mean_nu: f64,
    spread: f64,
    ak_max: f64,
    bianchi: f64,
}

/// Runs the selected identity evaluators on a chart at the given points and
/// assembles the canonical report.
///
/// Hypothesis gates: every identity except the three almost-Kaehler
/// conditions requires p.c.a.s.c. within tolerance at each point; the
/// derivative lemmas, the final-section identities and the endgame check
/// additionally require the almost-Kaehler residuals to pass.
pub fn run_chart_suite(
    chart: &Chart,
    points: &[Vec<f64>],
    cfg: &SuiteConfig,
) -> Result<IdentityReport, SuiteError> {
    let n = chart.n();
    let selected: Vec<IdentityId> = CATALOG
        .iter()
        .copied()
        .filter(|id| match &cfg.include {
            Some(inc) => inc.contains(id),
            None => id.admits_n(n),
        })
        .filter(|id| !cfg.exclude.contains(id))
        .collect();

    // Evaluate jets and the hypothesis measurements.
    let mut evals = Vec::with_capacity(points.len());
    for (pi, p) in points.iter().enumerate() {
        let j = jet(chart, p, cfg.h)?;
        let data = LemmaData::from_jet(&j);
        let (mean_nu, spread) =
            pcasc_spread(&j.space, &j.r, cfg.planes, split_seed(cfg.seed, 900 + pi as u64))?;
        let ak = almost_kahler_residuals(&j);
        let bianchi = second_bianchi_residual(&j, split_seed(cfg.seed, 950 + pi as u64), 200);
        evals.push(PointEval {
            data,
            mean_nu,
            spread,
            ak_max: ak.max(),
            bianchi,
            jet: j,
        });
    }
    let floor = evals.iter().map(|e| e.bianchi).fold(0.0f64, f64::max);
    let base_tol = chart_tolerance(floor);
    let tol_for = |id: IdentityId| -> f64 { *cfg.tolerances.get(&id).unwrap_or(&base_tol) };

    // Hypothesis gates.
    let needs_pcasc = |id: IdentityId| {
        !matches!(id, IdentityId::Eq1_8 | IdentityId::Eq1_9 | IdentityId::Eq1_10)
    };
    let needs_ak = |id: IdentityId| {
        matches!(
            id.kind(),
            EvaluatorKind::Lemma | EvaluatorKind::Section3 | EvaluatorKind::Theorem1
        ) || matches!(id, IdentityId::Eq2_6 | IdentityId::Eq2_7)
    };
    let mut failures = Vec::new();
    for (pi, e) in evals.iter().enumerate() {
        if selected.iter().any(|&id| needs_pcasc(id)) && e.spread > base_tol {
            failures.push(format!(
                "point {pi}: p.c.a.s.c. spread {:.3e} > {base_tol:.3e}",
                e.spread
            ));
        }
        if selected.iter().any(|&id| needs_ak(id)) && e.ak_max > base_tol {
            failures.push(format!(
                "point {pi}: almost-Kaehler residual {:.3e} > {base_tol:.3e}",
                e.ak_max
            ));
        }
    }
    if !failures.is_empty() {
        return Err(SuiteError::HypothesisViolated { failures });
    }

    let mut report = IdentityReport::new(cfg.config_hash.clone());
    report.metadata.timestamp = cfg.timestamp.clone();
    report.metadata.note = Some(
        "Chart-level residuals on Kaehler space forms sit in the degenerate regime where \
         every derivative term vanishes individually; max_term records the evidence. The \
         discriminating checks for the derivation identities are the algebra-context \
         entries on random constrained instances."
            .to_string(),
    );

    for (pi, e) in evals.iter().enumerate() {
        let seed_of = |id: IdentityId| split_seed(cfg.seed, (pi as u64) << 8 | id as u64);
        for &id in &selected {
            let seed = seed_of(id);
            let ctx = context_for(&e.jet, seed);
            match id.kind() {
                EvaluatorKind::Scalar => {
                    let si = scalar_identities(&e.jet.space, &e.jet.r, e.mean_nu);
                    let residual = match id {
                        IdentityId::Eq1_6 => si.res_1_6,
                        IdentityId::Eq1_7 => si.res_1_7,
                        IdentityId::Eq2_2 => si.res_2_2,
                        IdentityId::Eq2_8 => {
                            let q = q_tensor(&e.jet.space, &e.jet.r);
                            reconstruct_from_q(&e.jet.space, &q, e.mean_nu)
                                .sub(&e.jet.r)
                                .sup_norm()
                        }
                        _ => unreachable!(),
                    };
                    report.push(Entry::new(id.as_str(), residual, tol_for(id), ctx));
                }
                EvaluatorKind::AlmostKahler => {
                    let ak = almost_kahler_residuals(&e.jet);
                    let residual = match id {
                        IdentityId::Eq1_8 => ak.r_1_8,
                        IdentityId::Eq1_9 => ak.r_1_9,
                        IdentityId::Eq1_10 => ak.r_1_10,
                        _ => unreachable!(),
                    };
                    report.push(
                        Entry::new(id.as_str(), residual, tol_for(id), ctx)
                            .with_max_term(nabla_j_norm(&e.jet)),
                    );
                }
                EvaluatorKind::Lemma | EvaluatorKind::Section3 => {
                    let out = eval_lemma_or_section3(id, &e.data, cfg.tuples, seed, cfg);
                    report.push(
                        Entry::new(id.as_str(), out.residual, tol_for(id), ctx)
                            .with_max_term(out.max_term),
                    );
                }
                EvaluatorKind::Algebra => {
                    if !id.is_exploratory() {
                        let out = match id {
                            IdentityId::Eq2_3 => eq_2_3(&e.data, cfg.tuples, seed),
                            IdentityId::Eq2_4 => eq_2_4(&e.data, cfg.tuples, seed),
                            IdentityId::Eq2_5 => eq_2_5(&e.data, cfg.tuples, seed),
                            IdentityId::Eq2_6 => eq_2_6(&e.data, cfg.tuples, seed),
                            IdentityId::Eq2_7 => eq_2_7(&e.data, cfg.tuples, seed),
                            _ => unreachable!(),
                        };
                        report.push(
                            Entry::new(id.as_str(), out.residual, tol_for(id), ctx)
                                .with_max_term(out.max_term),
                        );
                    }
                }
                EvaluatorKind::Einstein => {
                    let (einstein, spread) = einstein_holo_defects(
                        &e.jet.space,
                        &e.jet.r,
                        cfg.planes,
                        split_seed(seed, 3),
                    )?;
                    let tol = tol_for(id);
                    let residual = einstein_covanish_residual(einstein, spread, tol);
                    report.push(
                        Entry::new(id.as_str(), residual, tol, ctx)
                            .with_max_term(einstein.max(spread))
                            .with_note(format!(
                                "einstein_defect={einstein:.3e} holo_spread={spread:.3e}"
                            )),
                    );
                }
                EvaluatorKind::Theorem1 => {} // handled once below
            }
        }
    }

    // Endgame check across all points.
    if selected.contains(&IdentityId::Thm1) {
        let id = IdentityId::Thm1;
        let tol = tol_for(id);
        let data: Vec<(HermitianSpace, Curv4, f64)> = evals
            .iter()
            .map(|e| (e.jet.space.clone(), e.jet.r.clone(), nabla_j_norm(&e.jet)))
            .collect();
        let (residual, note) = theorem1_data_residual(&data, tol)?;
        let ctx = Context {
            chart: chart.name().to_string(),
            point: Vec::new(),
            h: cfg.h,
            seed: cfg.seed,
            n,
        };
        report.push(Entry::new(id.as_str(), residual, tol, ctx).with_note(note));
    }

    // Exploratory algebra adjudications, once per run, on the standard
    // space at the chart's n (or n = 4 when the chart is too small).
    let algebra_entries = exploratory_algebra_entries(n.max(4), cfg, &selected)?;
    report.extend(algebra_entries);

    report.sort_canonical();
    Ok(report)
}

fn eval_lemma_or_section3(
    id: IdentityId,
    data: &LemmaData,
    tuples: usize,
    seed: u64,
    cfg: &SuiteConfig,
) -> EvalOutcome {
    match id {
        IdentityId::Eq2_9 => eq_2_9(data, tuples, seed),
        IdentityId::Eq2_10 => eq_2_10(data, tuples, seed, cfg.eq_2_10_reading),
        IdentityId::Eq2_11 => eq_2_11(data, tuples, seed),
        IdentityId::Eq2_12 => eq_2_12(data, tuples, seed),
        IdentityId::Eq2_13 => eq_2_13(data, tuples, seed),
        IdentityId::Eq2_14 => eq_2_14(data, tuples, seed),
        IdentityId::Eq2_19 => eq_2_19(data, tuples, seed),
        IdentityId::Eq3_1 => eq_3_1(data, tuples, seed),
        IdentityId::Eq3_2 => eq_3_2(data, tuples, seed),
        IdentityId::Eq3_3 => eq_3_3(data, tuples, seed),
        IdentityId::Eq3_4 => eq_3_4(data, tuples, seed),
        _ => unreachable!("not a lemma/section3 id"),
    }
}

/// The S-coefficient adjudication and the substitution-claim fits, recorded
/// as exploratory entries on random constrained instances.
pub fn exploratory_algebra_entries(
    n: usize,
    cfg: &SuiteConfig,
    selected: &[IdentityId],
) -> Result<Vec<Entry>, SuiteError> {
    let mut out = Vec::new();
    let wanted: Vec<IdentityId> = selected
        .iter()
        .copied()
        .filter(|id| id.is_exploratory())
        .collect();
    if wanted.is_empty() {
        return Ok(out);
    }
    let space = HermitianSpace::standard(n.max(4));
    let ctx = || Context::algebra(space.n(), cfg.seed);
    let finding = adjudicate_s_coefficient(&space, split_seed(cfg.seed, 7001))?;
    for id in [IdentityId::Eq2_15, IdentityId::Eq2_16] {
        if !wanted.contains(&id) {
            continue;
        }
        let residual = if id == IdentityId::Eq2_15 {
            finding.combo1_residual
        } else {
            finding.combo2_residual
        };
        out.push(
            Entry::exploratory(id.as_str(), residual, 1e-8, ctx())
                .with_note(finding.verdict.clone()),
        );
    }
    if wanted.contains(&IdentityId::Eq2_17) {
        let fit = fit_e17(&space, split_seed(cfg.seed, 7002))?;
        out.push(Entry::exploratory("eq_2_17", fit.residual, 1e-8, ctx()).with_note(fit.note));
    }
    if wanted.contains(&IdentityId::Eq2_18) {
        let fit = fit_e18(&space, split_seed(cfg.seed, 7003))?;
        out.push(Entry::exploratory("eq_2_18", fit.residual, 1e-8, ctx()).with_note(fit.note));
    }
    Ok(out)
}

/// Curvature invariants at a point, for the CLI `eval` command.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PointInvariants {
    pub tau: f64,
    pub tau_star: f64,
    pub nu: f64,
    pub pcasc_mean: f64,
    pub pcasc_spread: f64,
    pub einstein_defect: f64,
    pub holo_spread: f64,
    pub ak_residuals: [f64; 3],
    pub nabla_j_norm: f64,
    pub bianchi_residual: f64,
}

pub fn point_invariants(
    chart: &Chart,
    point: &[f64],
    h: f64,
    seed: u64,
) -> Result<PointInvariants, SuiteError> {
    let j = jet(chart, point, h)?;
    let c = contractions(&j.space, &j.r);
    let n = j.space.n();
    let nu = if n >= 2 {
        crate::algebra::nu_from_scalars(n, c.tau, c.tau_star)
    } else {
        f64::NAN
    };
    let (mean, spread) = if j.space.dim() >= 4 {
        pcasc_spread(&j.space, &j.r, 200, split_seed(seed, 1))?
    } else {
        (f64::NAN, f64::NAN)
    };
    let (einstein, holo) = einstein_holo_defects(&j.space, &j.r, 200, split_seed(seed, 2))?;
    let ak = almost_kahler_residuals(&j);
    Ok(PointInvariants {
        tau: c.tau,
        tau_star: c.tau_star,
        nu,
        pcasc_mean: mean,
        pcasc_spread: spread,
        einstein_defect: einstein,
        holo_spread: holo,
        ak_residuals: [ak.r_1_8, ak.r_1_9, ak.r_1_10],
        nabla_j_norm: nabla_j_norm(&j),
        bianchi_residual: second_bianchi_residual(&j, split_seed(seed, 3), 200),
    })
}

/// Deterministic interior point sampler for batch runs.
pub fn sample_points(chart: &Chart, count: usize, seed: u64, margin: f64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = crate::sampling::rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let p: Vec<f64> = chart
            .domain()
            .iter()
            .map(|(lo, hi)| {
                let lo = lo + margin;
                let hi = hi - margin;
                rng.gen_range(lo..hi)
            })
            .collect();
        out.push(p);
    }
    out
}

/// The suite's own basis-independence sanity: scalar outputs agree after a
/// random orthogonal frame rotation.
pub fn rotated_frame_invariance(space: &HermitianSpace, r: &Curv4, seed: u64) -> f64 {
    use rand::Rng;
    let d = space.dim();
    let mut rng = crate::sampling::rng_from_seed(seed);
    let m = nalgebra::DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let qr = m.qr();
    let o = qr.q();
    let rotated_space = space.rotate_frame(&o);
    let r_rot = r.change_frame(&o);
    let c0 = contractions(space, r);
    let c1 = contractions(&rotated_space, &r_rot);
    let mut resid = (c0.tau - c1.tau).abs().max((c0.tau_star - c1.tau_star).abs());
    // sectional on the "same" geometric plane
    let x = DVector::from_fn(d, |i, _| ((i + 1) as f64).sin());
    let y = DVector::from_fn(d, |i, _| ((2 * i + 1) as f64).cos());
    if let Ok(p0) = crate::space::TwoPlane::new(x.clone(), y.clone()) {
        let p1 = crate::space::TwoPlane::new(o.transpose() * x, o.transpose() * y).unwrap();
        resid = resid.max((sectional(r, &p0) - sectional(&r_rot, &p1)).abs());
    }
    resid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_core_accepts_space_forms_and_flags_drift() {
        let mk = |nu: f64| {
            let s = HermitianSpace::standard(4);
            let r = canonical(&s, Canonical::Pi1)
                .add(&canonical(&s, Canonical::Pi2))
                .scale(nu);
            (s, r, 0.0)
        };
        let pts = vec![mk(1.0), mk(1.0), mk(1.0)];
        let (resid, _) = theorem1_data_residual(&pts, 1e-8).unwrap();
        assert!(resid <= 1e-10);

        let pts = vec![mk(1.0), mk(1.05)];
        let err = theorem1_data_residual(&pts, 1e-4).unwrap_err();
        assert!(matches!(err, SuiteError::ConclusionViolated(_)));
    }

    #[test]
    fn covanish_residual_semantics() {
        assert_eq!(einstein_covanish_residual(1e-9, 1e-9, 1e-6), 0.0);
        assert_eq!(einstein_covanish_residual(0.5, 0.4, 1e-6), 0.0);
        assert!(einstein_covanish_residual(0.5, 1e-9, 1e-6) > 0.4);
    }

    #[test]
    fn frame_rotation_leaves_scalars_invariant() {
        let s = HermitianSpace::standard(3);
        let r = crate::sampling::random_curvature(6, 4);
        assert!(rotated_frame_invariance(&s, &r, 11) <= 1e-10);
    }
}
