use std::collections::BTreeMap;
use std::time::Instant;
use curvlab::algebra::{canonical, contractions, Canonical};
use curvlab::chart::builtin_chart;
use curvlab::jet::{dq_from_nabla_r, jet, second_bianchi_residual};

#[test]
fn probe_fs8() {
    let chart = builtin_chart("fubini_study", 4, &BTreeMap::new()).unwrap();
    let t0 = Instant::now();
    let j = jet(&chart, &[0.11, -0.06, 0.04, 0.09, -0.03, 0.07, 0.02, -0.08], 1e-3).unwrap();
    let dt = t0.elapsed();
    let model = canonical(&j.space, Canonical::Pi1).add(&canonical(&j.space, Canonical::Pi2));
    let resid = j.r.sub(&model).sup_norm();
    let c = contractions(&j.space, &j.r);
    let bianchi = second_bianchi_residual(&j, 1, 500);
    let dq2 = dq_from_nabla_r(&j);
    let cross = j.dq.data().iter().zip(dq2.data()).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    println!(
        "FS n=4: jet={dt:?} |R-model|={resid:.3e} tau={:.6} (want 80) nu={:.6} bianchi={bianchi:.3e} |dq|={:.2e} dq_cross={cross:.3e}",
        c.tau, j.nu, j.dq.sup_norm(),
    );
}
