use curvlab::space::HermitianSpace;
use curvlab::suite::algebra_checks::{adjudicate_s_coefficient, fit_e17, fit_e18};

#[test]
fn probe_adjudication() {
    for n in [4usize, 5] {
        let s = HermitianSpace::standard(n);
        let f = adjudicate_s_coefficient(&s, 99).unwrap();
        println!("n={n}: {}", f.verdict);
        println!("  candidates: 4(2n^2-3)={}, 4(2n-3)={}", 4.0*(2.0*(n as f64).powi(2)-3.0), 4.0*(2.0*n as f64-3.0));
    }
    let s = HermitianSpace::standard(4);
    let f17 = fit_e17(&s, 7).unwrap();
    println!("e17 fit: {}", f17.note);
    let f18 = fit_e18(&s, 8).unwrap();
    println!("e18 fit: {}", f18.note);
}
