// Temporary development probe; replaced by the real chart tests.

use std::collections::BTreeMap;

use curvlab::algebra::{canonical, contractions, sectional, Canonical};
use curvlab::chart::builtin_chart;
use curvlab::jet::{almost_kahler_residuals, jet, nabla_j_norm, second_bianchi_residual};
use curvlab::sampling::{sample_planes, PlaneKind};
use curvlab::space::TwoPlane;

#[test]
fn probe_fubini_study() {
    let chart = builtin_chart("fubini_study", 2, &BTreeMap::new()).unwrap();
    for (label, point) in [("origin", [0.0; 4]), ("off", [0.21, -0.13, 0.08, 0.17])] {
        for h in [4e-2, 2e-2, 1e-2, 1e-3, 5e-4] {
            let j = jet(&chart, &point, h).unwrap();
            let model = canonical(&j.space, Canonical::Pi1).add(&canonical(&j.space, Canonical::Pi2));
            let resid = j.r.sub(&model).sup_norm();
            let holo = TwoPlane::holomorphic(&j.space, curvlab::algebra::basis_vector(4, 0)).unwrap();
            let k = sectional(&j.r, &holo);
            let c = contractions(&j.space, &j.r);
            let bianchi = second_bianchi_residual(&j, 1, 200);
            let ak = almost_kahler_residuals(&j);
            println!(
                "{label} h={h:.0e}: |R-model|={resid:.3e} K_holo={k:+.6} tau={:.6} nu={:.6} bianchi={bianchi:.3e} ak={:.2e} |dJ|={:.2e} |dq|={:.2e} dnu={:.2e}",
                c.tau, j.nu, ak.max(), nabla_j_norm(&j), j.dq.sup_norm(), j.dnu.amax(),
            );
        }
    }
}

#[test]
fn probe_kodaira_thurston() {
    let chart = builtin_chart("kodaira_thurston", 2, &BTreeMap::new()).unwrap();
    for h in [1e-2, 1e-3] {
        let j = jet(&chart, &[0.1, 0.2, -0.1, 0.3], h).unwrap();
        let ak = almost_kahler_residuals(&j);
        let planes = sample_planes(&j.space, PlaneKind::Antiholomorphic, 100, 5).unwrap();
        let est = curvlab::algebra::pcasc_estimate(&j.space, &j.r, &planes, 1e-10).unwrap();
        println!(
            "KT h={h:.0e}: r18={:.3e} r19={:.3e} r110={:.3e} |dJ|={:.4} spread={:.4} mean_nu={:.4} |R|={:.3}",
            ak.r_1_8, ak.r_1_9, ak.r_1_10, nabla_j_norm(&j), est.spread, est.mean_nu, j.r.sup_norm(),
        );
    }
}

#[test]
fn probe_complex_hyperbolic() {
    let chart = builtin_chart("complex_hyperbolic", 2, &BTreeMap::new()).unwrap();
    let j = jet(&chart, &[0.05, -0.02, 0.04, 0.01], 1e-3).unwrap();
    let model = canonical(&j.space, Canonical::Pi1).add(&canonical(&j.space, Canonical::Pi2));
    let resid = j.r.add(&model).sup_norm(); // CH should be -(pi1+pi2)
    println!("CH: |R+model|={resid:.3e} nu={:.6}", j.nu);
}
