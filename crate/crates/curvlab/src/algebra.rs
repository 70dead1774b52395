//! Canonical curvature tensors, the phi/psi lifts, contractions and the
//! Q-tensor calculus, all in frame components of a [`HermitianSpace`].
//!
//! Conventions fixed by calibration on R = nu (pi1 + pi2):
//!   rho(X, Y)      = sum_i R(e_i, X, e_i, Y)
//!   rho_star(X, Y) = sum_i R(X, e_i, JY, J e_i)
//!   K(plane)       = R(X, Y, X, Y) for a g-orthonormal basis {X, Y}
//! Under these, tau = tau_star = 4n(n+1) nu and both the Ganchev
//! reconstruction and the scalar relation between tau and tau_star hold
//! exactly on space forms; see the calibration tests.

use nalgebra::DVector;

use crate::space::{HermitianSpace, TwoPlane};
use crate::tensor::{Bilinear, Curv4};

/// Which canonical tensor to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Canonical {
    Pi1,
    Pi2,
}

/// Which rank-2 to rank-4 lift to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    Phi,
    Psi,
}

/// pi1 or pi2 evaluated on all frame 4-tuples.
pub fn canonical(space: &HermitianSpace, kind: Canonical) -> Curv4 {
    let d = space.dim();
    let jf = space.j_frame();
    match kind {
        Canonical::Pi1 => Curv4::from_fn(d, |i, j, k, l| {
            let gik = if i == k { 1.0 } else { 0.0 };
            let gjl = if j == l { 1.0 } else { 0.0 };
            let gjk = if j == k { 1.0 } else { 0.0 };
            let gil = if i == l { 1.0 } else { 0.0 };
            gik * gjl - gjk * gil
        }),
        Canonical::Pi2 => {
            // omega_ab = g(J e_a, e_b) = -jf[(a, b)]
            Curv4::from_fn(d, |i, j, k, l| {
                let w_ij = -jf[(i, j)];
                let w_kl = -jf[(k, l)];
                let w_ik = -jf[(i, k)];
                let w_jl = -jf[(j, l)];
                let w_jk = -jf[(j, k)];
                let w_il = -jf[(i, l)];
                2.0 * w_ij * w_kl + w_ik * w_jl - w_jk * w_il
            })
        }
    }
}

/// The rank-4 lift phi(S) or psi(S) of a rank-2 tensor S.
pub fn lift(space: &HermitianSpace, s: &Bilinear, kind: Lift) -> Curv4 {
    let d = space.dim();
    let jf = space.j_frame();
    match kind {
        Lift::Phi => Curv4::from_fn(d, |i, j, k, l| {
            let gik = if i == k { 1.0 } else { 0.0 };
            let gjl = if j == l { 1.0 } else { 0.0 };
            let gil = if i == l { 1.0 } else { 0.0 };
            let gjk = if j == k { 1.0 } else { 0.0 };
            gik * s.get(j, l) + gjl * s.get(i, k) - gil * s.get(j, k) - gjk * s.get(i, l)
        }),
        Lift::Psi => {
            // g(X, JY) in frame components is +jf[(x, y)].
            // S(Z, JW) = sum_b S(Z, e_b) jf[(b, w)] = (S jf)(z, w).
            let sj = &s.m * jf;
            Curv4::from_fn(d, |i, j, k, l| {
                2.0 * jf[(i, j)] * sj[(k, l)]
                    + 2.0 * jf[(k, l)] * sj[(i, j)]
                    + jf[(i, k)] * sj[(j, l)]
                    + jf[(j, l)] * sj[(i, k)]
                    - jf[(i, l)] * sj[(j, k)]
                    - jf[(j, k)] * sj[(i, l)]
            })
        }
    }
}

/// L3 R (X, Y, Z, W) = R(JX, JY, JZ, JW); an involution.
pub fn l3(space: &HermitianSpace, r: &Curv4) -> Curv4 {
    let jf = space.j_frame();
    let d = r.dim();
    let mut cur = r.data().to_vec();
    for _slot in 0..4 {
        let mut next = vec![0.0; cur.len()];
        let block = d * d * d;
        for a in 0..d {
            for rest in 0..block {
                let mut acc = 0.0;
                for b in 0..d {
                    acc += jf[(b, a)] * cur[b * block + rest];
                }
                next[rest * d + a] = acc;
            }
        }
        cur = next;
    }
    let mut out = Curv4::zeros(d);
    out.data_mut().copy_from_slice(&cur);
    out
}

/// Ricci, star-Ricci and their traces.
#[derive(Debug, Clone)]
pub struct Contractions {
    pub rho: Bilinear,
    pub rho_star: Bilinear,
    pub tau: f64,
    pub tau_star: f64,
}

/// rho, rho_star, tau, tau_star of a curvature-type tensor.
pub fn contractions(space: &HermitianSpace, r: &Curv4) -> Contractions {
    let d = space.dim();
    let jf = space.j_frame();
    let mut rho = Bilinear::zeros(d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = 0.0;
            for i in 0..d {
                acc += r.get(i, a, i, b);
            }
            rho.m[(a, b)] = acc;
        }
    }
    // rho_star(X, Y) = sum_i R(X, e_i, JY, J e_i)
    //               = sum_{i, c, e} R(x, i, c, e) jf[(c, y)] jf[(e, i)].
    let mut rho_star = Bilinear::zeros(d);
    for x in 0..d {
        for y in 0..d {
            let mut acc = 0.0;
            for i in 0..d {
                for c in 0..d {
                    let jcy = jf[(c, y)];
                    if jcy == 0.0 {
                        continue;
                    }
                    for e in 0..d {
                        acc += r.get(x, i, c, e) * jcy * jf[(e, i)];
                    }
                }
            }
            rho_star.m[(x, y)] = acc;
        }
    }
    let tau = rho.trace();
    let tau_star = rho_star.trace();
    Contractions {
        rho,
        rho_star,
        tau,
        tau_star,
    }
}

/// Sectional curvature K = R(X, Y, X, Y) of the stored orthonormal basis.
pub fn sectional(r: &Curv4, plane: &TwoPlane) -> f64 {
    r.eval(&plane.x, &plane.y, &plane.x, &plane.y)
}

/// nu from the scalar relation 8n(n^2-1) nu = (2n+1) tau - 3 tau_star.
/// Requires n >= 2.
pub fn nu_from_scalars(n: usize, tau: f64, tau_star: f64) -> f64 {
    assert!(n >= 2, "nu extraction needs n >= 2");
    let nf = n as f64;
    ((2.0 * nf + 1.0) * tau - 3.0 * tau_star) / (8.0 * nf * (nf * nf - 1.0))
}

/// Right-hand side of the Ganchev characterization: the curvature tensor a
/// p.c.a.s.c. manifold must have, assembled from rho_star and the scalars.
/// The sup-norm of `r - ganchev_reconstruct(r)` certifies p.c.a.s.c.
pub fn ganchev_reconstruct(space: &HermitianSpace, r: &Curv4) -> Curv4 {
    let n = space.n();
    assert!(n >= 2, "reconstruction needs n >= 2");
    let nf = n as f64;
    let c = contractions(space, r);
    let nu = nu_from_scalars(n, c.tau, c.tau_star);
    let psi_rho_star = lift(space, &c.rho_star, Lift::Psi);
    let pi1 = canonical(space, Canonical::Pi1);
    let pi2 = canonical(space, Canonical::Pi2);
    let coef_pi2 = (2.0 * (nf + 1.0) * nu + c.tau_star) / (2.0 * (nf + 1.0) * (2.0 * nf + 1.0));
    psi_rho_star
        .scale(1.0 / (2.0 * (nf + 1.0)))
        .add(&pi1.scale(nu))
        .sub(&pi2.scale(coef_pi2))
}

/// Q = rho(R)/6 + rho_star(R - L3 R) / (4(n+1)).
pub fn q_tensor(space: &HermitianSpace, r: &Curv4) -> Bilinear {
    let nf = space.n() as f64;
    let c = contractions(space, r);
    let l3r = l3(space, r);
    let c3 = contractions(space, &l3r);
    let skew = c.rho_star.sub(&c3.rho_star);
    c.rho.scale(1.0 / 6.0).add(&skew.scale(1.0 / (4.0 * (nf + 1.0))))
}

/// R = psi(Q) + nu pi1 - ((2n-1)/3) nu pi2; exact round trip with
/// [`q_tensor`] on p.c.a.s.c. inputs.
pub fn reconstruct_from_q(space: &HermitianSpace, q: &Bilinear, nu: f64) -> Curv4 {
    let nf = space.n() as f64;
    let psi_q = lift(space, q, Lift::Psi);
    let pi1 = canonical(space, Canonical::Pi1);
    let pi2 = canonical(space, Canonical::Pi2);
    psi_q
        .add(&pi1.scale(nu))
        .sub(&pi2.scale((2.0 * nf - 1.0) / 3.0 * nu))
}

/// Sup-norm residuals of the three pointwise scalar identities.
#[derive(Debug, Clone, Copy)]
pub struct ScalarResiduals {
    /// rho_star(R + L3 R) = (2/3)(n+1) rho(R) - ((n+1) tau - 3 tau_star)/(3n) g
    pub res_1_6: f64,
    /// 8n(n^2-1) nu = (2n+1) tau - 3 tau_star
    pub res_1_7: f64,
    /// Q(JX, JY) = Q(Y, X)
    pub res_2_2: f64,
}

/// Evaluates the scalar identities with a caller-supplied nu. Requires n >= 2.
pub fn scalar_identities(space: &HermitianSpace, r: &Curv4, nu: f64) -> ScalarResiduals {
    let n = space.n();
    assert!(n >= 2, "scalar identities need n >= 2");
    let nf = n as f64;
    let d = space.dim();
    let c = contractions(space, r);
    let l3r = l3(space, r);
    let c3 = contractions(space, &l3r);

    let lhs_1_6 = c.rho_star.add(&c3.rho_star);
    let g_coef = ((nf + 1.0) * c.tau - 3.0 * c.tau_star) / (3.0 * nf);
    let mut rhs_1_6 = c.rho.scale(2.0 / 3.0 * (nf + 1.0));
    for i in 0..d {
        rhs_1_6.m[(i, i)] -= g_coef;
    }
    let res_1_6 = lhs_1_6.sub(&rhs_1_6).sup_norm();

    let res_1_7 =
        (8.0 * nf * (nf * nf - 1.0) * nu - ((2.0 * nf + 1.0) * c.tau - 3.0 * c.tau_star)).abs();

    let q = q_tensor(space, r);
    let res_2_2 = q_constraint_residual(space, &q);

    ScalarResiduals {
        res_1_6,
        res_1_7,
        res_2_2,
    }
}

/// Sup-norm of Q(JX, JY) - Q(Y, X) over the frame.
pub fn q_constraint_residual(space: &HermitianSpace, q: &Bilinear) -> f64 {
    let jf = space.j_frame();
    let lhs = jf.transpose() * &q.m * jf;
    let resid = lhs - q.m.transpose();
    resid.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Mean and spread of sectional values over antiholomorphic samples.
#[derive(Debug, Clone, Copy)]
pub struct PcascEstimate {
    pub mean_nu: f64,
    /// max - min of the sampled sectional values.
    pub spread: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum PcascError {
    #[error("samples {0:?} are not antiholomorphic within tolerance")]
    NotAntiholomorphic(Vec<usize>),
    #[error("no samples supplied")]
    Empty,
}

/// Estimates the antiholomorphic sectional constant; a spread near zero
/// certifies p.c.a.s.c. at this point within sampling confidence.
pub fn pcasc_estimate(
    space: &HermitianSpace,
    r: &Curv4,
    samples: &[TwoPlane],
    defect_tol: f64,
) -> Result<PcascEstimate, PcascError> {
    if samples.is_empty() {
        return Err(PcascError::Empty);
    }
    let offenders: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, p)| crate::space::plane_defects(space, p).antiholomorphic > defect_tol)
        .map(|(i, _)| i)
        .collect();
    if !offenders.is_empty() {
        return Err(PcascError::NotAntiholomorphic(offenders));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for p in samples {
        let k = sectional(r, p);
        min = min.min(k);
        max = max.max(k);
        sum += k;
    }
    Ok(PcascEstimate {
        mean_nu: sum / samples.len() as f64,
        spread: max - min,
    })
}

/// Frame basis vector as a DVector.
pub fn basis_vector(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::plane_defects;

    fn std_space(n: usize) -> HermitianSpace {
        HermitianSpace::standard(n)
    }

    #[test]
    fn pi1_on_orthonormal_pairs() {
        let s = std_space(2);
        let pi1 = canonical(&s, Canonical::Pi1);
        assert_eq!(pi1.get(0, 2, 0, 2), 1.0);
        assert_eq!(pi1.get(0, 0, 1, 2), 0.0);
    }

    #[test]
    fn pi2_on_holomorphic_pair_is_three() {
        // pi2(e1, Je1, e1, Je1) = 3 in the standard space.
        let s = std_space(2);
        let pi2 = canonical(&s, Canonical::Pi2);
        assert!((pi2.get(0, 1, 0, 1) - 3.0).abs() <= 1e-14);
        // Antiholomorphic pair: all three terms vanish.
        assert!(pi2.get(0, 2, 0, 2).abs() <= 1e-14);
    }

    #[test]
    fn lift_of_metric_doubles_canonicals() {
        for n in [2usize, 3] {
            let s = std_space(n);
            let g = Bilinear::from_matrix(nalgebra::DMatrix::identity(2 * n, 2 * n));
            let phi_g = lift(&s, &g, Lift::Phi);
            let psi_g = lift(&s, &g, Lift::Psi);
            let two_pi1 = canonical(&s, Canonical::Pi1).scale(2.0);
            let two_pi2 = canonical(&s, Canonical::Pi2).scale(2.0);
            assert!(phi_g.sub(&two_pi1).sup_norm() <= 1e-14);
            assert!(psi_g.sub(&two_pi2).sup_norm() <= 1e-14);
        }
    }

    #[test]
    fn l3_fixes_canonicals() {
        let s = std_space(2);
        for kind in [Canonical::Pi1, Canonical::Pi2] {
            let t = canonical(&s, kind);
            assert!(l3(&s, &t).sub(&t).sup_norm() <= 1e-14);
        }
    }

    #[test]
    fn contraction_calibration_on_space_forms() {
        for n in [2usize, 3, 4] {
            for nu in [-1.0, 0.0, 1.0, 2.0] {
                let s = std_space(n);
                let nf = n as f64;
                let r = canonical(&s, Canonical::Pi1)
                    .add(&canonical(&s, Canonical::Pi2))
                    .scale(nu);
                let c = contractions(&s, &r);
                let expect = 4.0 * nf * (nf + 1.0) * nu;
                assert!((c.tau - expect).abs() <= 1e-10, "tau n={n} nu={nu}");
                assert!((c.tau_star - expect).abs() <= 1e-10, "tau* n={n} nu={nu}");
                let coef = 2.0 * (nf + 1.0) * nu;
                for i in 0..2 * n {
                    assert!((c.rho.get(i, i) - coef).abs() <= 1e-10);
                    assert!((c.rho_star.get(i, i) - coef).abs() <= 1e-10);
                }
                let si = scalar_identities(&s, &r, nu);
                assert!(si.res_1_6 <= 1e-12);
                assert!(si.res_1_7 <= 1e-12);
                assert!(si.res_2_2 <= 1e-12);
            }
        }
    }

    #[test]
    fn ganchev_reconstruct_space_form_and_zero() {
        let s = std_space(3);
        let r = canonical(&s, Canonical::Pi1)
            .add(&canonical(&s, Canonical::Pi2))
            .scale(2.0);
        let back = ganchev_reconstruct(&s, &r);
        assert!(r.sub(&back).sup_norm() <= 1e-12);
        let zero = Curv4::zeros(6);
        assert!(ganchev_reconstruct(&s, &zero).sup_norm() <= 1e-14);
    }

    #[test]
    fn q_tensor_space_form_and_round_trip() {
        for n in [2usize, 4] {
            let s = std_space(n);
            let nf = n as f64;
            let nu = 2.0;
            let r = canonical(&s, Canonical::Pi1)
                .add(&canonical(&s, Canonical::Pi2))
                .scale(nu);
            let q = q_tensor(&s, &r);
            let coef = (nf + 1.0) * nu / 3.0;
            for i in 0..2 * n {
                assert!((q.get(i, i) - coef).abs() <= 1e-12);
            }
            assert!(q.skew_part().sup_norm() <= 1e-12);
            let back = reconstruct_from_q(&s, &q, nu);
            assert!(r.sub(&back).sup_norm() <= 1e-12);
        }
    }

    #[test]
    fn sectional_on_model_planes() {
        let s = std_space(2);
        let nu = 3.0;
        let r = canonical(&s, Canonical::Pi1)
            .add(&canonical(&s, Canonical::Pi2))
            .scale(nu);
        let anti = TwoPlane::new(basis_vector(4, 0), basis_vector(4, 2)).unwrap();
        assert!(plane_defects(&s, &anti).antiholomorphic <= 1e-14);
        assert!((sectional(&r, &anti) - nu).abs() <= 1e-12);
        let holo = TwoPlane::holomorphic(&s, basis_vector(4, 0)).unwrap();
        assert!((sectional(&r, &holo) - 4.0 * nu).abs() <= 1e-12);
        let pi1 = canonical(&s, Canonical::Pi1);
        assert!((sectional(&pi1, &anti) - 1.0).abs() <= 1e-14);
        assert!((sectional(&pi1, &holo) - 1.0).abs() <= 1e-14);
    }
}
