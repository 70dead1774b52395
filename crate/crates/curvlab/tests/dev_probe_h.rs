use curvlab::space::HermitianSpace;
use curvlab::suite::algebra_checks::AlgebraInstance;
use curvlab::suite::section3::h_prime_consistency;

#[test]
fn probe_h_prime_consistency() {
    let s = HermitianSpace::standard(4);
    let inst = AlgebraInstance::random(&s, 5).unwrap();
    let data = inst.lemma_data();
    let r = h_prime_consistency(&data, 30, 9);
    println!("h' consistency: {r:.3e}");
    assert!(r <= 1e-10);
}
