//! Finite-difference jets: Christoffel symbols, curvature, nabla omega,
//! nabla J, nabla R and the differenced Q / nu / tau fields at a chart
//! point, re-expressed in the pointwise orthonormal frame.
//!
//! Derivatives use order-4 central stencils. Coordinate components are
//! differenced (never frame components: frames at nearby points come from
//! independent Cholesky factorizations and are not a smooth field), the
//! Levi-Civita corrections are applied in coordinates, and only the final
//! tensors are contracted into the frame at the center point.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::chart::Chart;
use crate::space::{HermitianSpace, SpaceError};
use crate::tensor::{Bilinear, Curv4, Rank3, Rank5};

#[derive(Debug, Error)]
pub enum JetError {
    #[error("point is outside the chart domain")]
    OutOfDomain,
    #[error("step too large: point violates the 4h stencil margin")]
    StepTooLarge,
    #[error("chart invariant violated at the probed point: {0}")]
    BadChart(#[from] SpaceError),
}

/// The package of pointwise derivatives extracted from a chart at a point.
///
/// `gamma` stays in chart coordinates (`gamma[a][b][c]` = Gamma^a_bc); all
/// other tensors are frame components. The differenced Q field and the
/// scalar gradients ride along because the identity suite needs them at the
/// same stencil.
#[derive(Debug, Clone)]
pub struct JetPoint {
    pub chart_name: String,
    pub point: Vec<f64>,
    pub h: f64,
    pub gamma: Rank3,
    pub r: Curv4,
    pub nabla_omega: Rank3,
    pub nabla_j: Rank3,
    pub nabla_r: Rank5,
    pub space: HermitianSpace,
    /// Q tensor at the point (frame components).
    pub q: Bilinear,
    /// (nabla_V Q)(X, Y), differenced from the pointwise Q field.
    pub dq: Rank3,
    /// Frame components of d(nu) and d(tau).
    pub dnu: DVector<f64>,
    pub dtau: DVector<f64>,
    pub nu: f64,
    pub tau: f64,
    pub tau_star: f64,
}

/// Coordinate-level curvature package at one point.
struct PointPackage {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    j: DMatrix<f64>,
    gamma: Rank3,
    /// Lowered curvature R_{abcd} in chart coordinates.
    r_low: Curv4,
}

fn offset(x: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[axis] += delta;
    y
}

/// Order-4 central difference from the four stencil values
/// f(x-2h), f(x-h), f(x+h), f(x+2h).
fn stencil4(m2: f64, m1: f64, p1: f64, p2: f64, h: f64) -> f64 {
    (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h)
}

fn metric_derivs(chart: &Chart, x: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    let d = chart.dim();
    (0..d)
        .map(|axis| {
            let m2 = chart.metric_at(&offset(x, axis, -2.0 * h));
            let m1 = chart.metric_at(&offset(x, axis, -h));
            let p1 = chart.metric_at(&offset(x, axis, h));
            let p2 = chart.metric_at(&offset(x, axis, 2.0 * h));
            DMatrix::from_fn(d, d, |i, j| {
                stencil4(m2[(i, j)], m1[(i, j)], p1[(i, j)], p2[(i, j)], h)
            })
        })
        .collect()
}

/// Christoffel symbols of the second kind at x.
fn christoffel(chart: &Chart, x: &[f64], h: f64) -> (DMatrix<f64>, DMatrix<f64>, Rank3) {
    let d = chart.dim();
    let g = chart.metric_at(x);
    let ginv = g.clone().try_inverse().expect("chart metric must be SPD");
    let dg = metric_derivs(chart, x, h);
    let mut gamma = Rank3::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in b..d {
                let mut acc = 0.0;
                for e in 0..d {
                    acc += ginv[(a, e)] * (dg[b][(e, c)] + dg[c][(e, b)] - dg[e][(b, c)]);
                }
                let v = 0.5 * acc;
                gamma.set(a, b, c, v);
                gamma.set(a, c, b, v);
            }
        }
    }
    (g, ginv, gamma)
}

/// Lowered Riemann tensor in coordinates, with the sign convention
/// calibrated so K(X, Y) = R(X, Y, X, Y) is +1 on the unit round model
/// (Fubini-Study with c = 4 gives holomorphic sectional +4).
fn point_package(chart: &Chart, x: &[f64], h: f64) -> PointPackage {
    let d = chart.dim();
    let (g, ginv, gamma) = christoffel(chart, x, h);
    let j = chart.j_at(x);

    // dgamma[c] = d/dx_c of Gamma at x.
    let dgamma: Vec<Rank3> = (0..d)
        .map(|axis| {
            let (_, _, m2) = christoffel(chart, &offset(x, axis, -2.0 * h), h);
            let (_, _, m1) = christoffel(chart, &offset(x, axis, -h), h);
            let (_, _, p1) = christoffel(chart, &offset(x, axis, h), h);
            let (_, _, p2) = christoffel(chart, &offset(x, axis, 2.0 * h), h);
            let mut out = Rank3::zeros(d);
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        out.set(
                            a,
                            b,
                            c,
                            stencil4(
                                m2.get(a, b, c),
                                m1.get(a, b, c),
                                p1.get(a, b, c),
                                p2.get(a, b, c),
                                h,
                            ),
                        );
                    }
                }
            }
            out
        })
        .collect();

    // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
    //           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    let mut r_low = Curv4::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    let mut v = dgamma[c].get(a, dd, b) - dgamma[dd].get(a, c, b);
                    for e in 0..d {
                        v += gamma.get(a, c, e) * gamma.get(e, dd, b)
                            - gamma.get(a, dd, e) * gamma.get(e, c, b);
                    }
                    // lower the first index: R_{abcd} = g_{ae} R^e_{bcd}
                    for s in 0..d {
                        r_low.add_to(s, b, c, dd, g[(s, a)] * v);
                    }
                }
            }
        }
    }
    PointPackage {
        g,
        ginv,
        j,
        gamma,
        r_low,
    }
}

/// Contracts all four slots of a rank-4 coordinate tensor with matrices
/// (column a of m holds the components of the image of basis vector a).
fn curv4_contract(r: &Curv4, m: [&DMatrix<f64>; 4]) -> Curv4 {
    let d = r.dim();
    let mut cur = r.data().to_vec();
    for mat in m {
        let block = d * d * d;
        let mut next = vec![0.0; cur.len()];
        for a in 0..d {
            for rest in 0..block {
                let mut acc = 0.0;
                for b in 0..d {
                    acc += mat[(b, a)] * cur[b * block + rest];
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

fn rank3_contract(t: &Rank3, m: [&DMatrix<f64>; 3]) -> Rank3 {
    let d = t.dim();
    let mut cur = t.data().to_vec();
    for mat in m {
        let block = d * d;
        let mut next = vec![0.0; cur.len()];
        for a in 0..d {
            for rest in 0..block {
                let mut acc = 0.0;
                for b in 0..d {
                    acc += mat[(b, a)] * cur[b * block + rest];
                }
                next[rest * d + a] = acc;
            }
        }
        cur = next;
    }
    let mut out = Rank3::zeros(d);
    out.data_mut().copy_from_slice(&cur);
    out
}

fn rank5_contract(t: &Rank5, m: [&DMatrix<f64>; 5]) -> Rank5 {
    let d = t.dim();
    let mut cur = t.data().to_vec();
    for mat in m {
        let block = d * d * d * d;
        let mut next = vec![0.0; cur.len()];
        for a in 0..d {
            for rest in 0..block {
                let mut acc = 0.0;
                for b in 0..d {
                    acc += mat[(b, a)] * cur[b * block + rest];
                }
                next[rest * d + a] = acc;
            }
        }
        cur = next;
    }
    let mut out = Rank5::zeros(d);
    out.data_mut().copy_from_slice(&cur);
    out
}

/// Coordinate contractions of a lowered curvature tensor with metric
/// inverse and J: returns (Q, tau, tau_star, nu) at the point.
fn q_package(
    n: usize,
    r_low: &Curv4,
    ginv: &DMatrix<f64>,
    j: &DMatrix<f64>,
) -> (DMatrix<f64>, f64, f64, f64) {
    let _d = 2 * n;
    let rho = coord_rho(r_low, ginv);
    let rho_star = coord_rho_star(r_low, ginv, j);
    let l3r = curv4_contract(r_low, [j, j, j, j]);
    let rho_star_l3 = coord_rho_star(&l3r, ginv, j);
    let nf = n as f64;
    let q = &rho / 6.0 + (&rho_star - &rho_star_l3) / (4.0 * (nf + 1.0));
    let tau = (ginv * &rho).trace();
    let tau_star = (ginv * &rho_star).trace();
    let nu = if n >= 2 {
        crate::algebra::nu_from_scalars(n, tau, tau_star)
    } else {
        f64::NAN
    };
    (q, tau, tau_star, nu)
}

fn coord_rho(r_low: &Curv4, ginv: &DMatrix<f64>) -> DMatrix<f64> {
    let d = r_low.dim();
    DMatrix::from_fn(d, d, |b, l| {
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                let w = ginv[(i, k)];
                if w != 0.0 {
                    acc += w * r_low.get(i, b, k, l);
                }
            }
        }
        acc
    })
}

/// rho_star(X, Y) = trace over an orthonormal pair of R(X, e, JY, Je);
/// in coordinates g^{bd} R_{x b c e} J^c_y J^e_d.
fn coord_rho_star(r_low: &Curv4, ginv: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let d = r_low.dim();
    DMatrix::from_fn(d, d, |x, y| {
        let mut acc = 0.0;
        for b in 0..d {
            for dd in 0..d {
                let w = ginv[(b, dd)];
                if w == 0.0 {
                    continue;
                }
                for c in 0..d {
                    let jc = j[(c, y)];
                    if jc == 0.0 {
                        continue;
                    }
                    for e in 0..d {
                        acc += w * jc * j[(e, dd)] * r_low.get(x, b, c, e);
                    }
                }
            }
        }
        acc
    })
}

/// Computes the full jet at a chart point. Points must keep a 4h margin to
/// every domain face; the deep (nested) stencils may evaluate the chart
/// functions up to 6h outside the point but stay near the domain.
pub fn jet(chart: &Chart, point: &[f64], h: f64) -> Result<JetPoint, JetError> {
    assert!(h > 0.0, "step must be positive");
    let d = chart.dim();
    let n = d / 2;
    if !chart.contains(point) {
        return Err(JetError::OutOfDomain);
    }
    if !chart.has_margin(point, 4.0 * h) {
        return Err(JetError::StepTooLarge);
    }

    let center = point_package(chart, point, h);
    let space = HermitianSpace::new(n, center.g.clone(), center.j.clone())?;
    let frame = space.frame().clone();

    // Stencil packages along every axis (for nabla R and the Q field).
    let stencils: Vec<[PointPackage; 4]> = (0..d)
        .map(|axis| {
            [
                point_package(chart, &offset(point, axis, -2.0 * h), h),
                point_package(chart, &offset(point, axis, -h), h),
                point_package(chart, &offset(point, axis, h), h),
                point_package(chart, &offset(point, axis, 2.0 * h), h),
            ]
        })
        .collect();

    // nabla R in coordinates: partial of R_low minus Gamma corrections.
    let mut nabla_r_coords = Rank5::zeros(d);
    for e in 0..d {
        let st = &stencils[e];
        for i in 0..d {
            for jj in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut v = stencil4(
                            st[0].r_low.get(i, jj, k, l),
                            st[1].r_low.get(i, jj, k, l),
                            st[2].r_low.get(i, jj, k, l),
                            st[3].r_low.get(i, jj, k, l),
                            h,
                        );
                        for f in 0..d {
                            let gf = |s: usize| center.gamma.get(f, e, s);
                            v -= gf(i) * center.r_low.get(f, jj, k, l)
                                + gf(jj) * center.r_low.get(i, f, k, l)
                                + gf(k) * center.r_low.get(i, jj, f, l)
                                + gf(l) * center.r_low.get(i, jj, k, f);
                        }
                        nabla_r_coords.set(e, i, jj, k, l, v);
                    }
                }
            }
        }
    }

    // nabla omega and nabla J in coordinates.
    // omega_{ab} = J^c_a g_{cb}; (nabla_v omega)_{ab} = d_v omega_{ab}
    //   - Gamma^e_{va} omega_{eb} - Gamma^e_{vb} omega_{ae}.
    let omega_of = |p: &PointPackage| p.j.transpose() * &p.g;
    let omega_c = omega_of(&center);
    let mut nabla_omega_coords = Rank3::zeros(d);
    let mut nabla_j_coords = Rank3::zeros(d); // (nabla_v J)^a_b stored [v][b][a]-lowered later
    for v in 0..d {
        let st = &stencils[v];
        let omegas: Vec<DMatrix<f64>> = st.iter().map(omega_of).collect();
        for a in 0..d {
            for b in 0..d {
                let mut w = stencil4(
                    omegas[0][(a, b)],
                    omegas[1][(a, b)],
                    omegas[2][(a, b)],
                    omegas[3][(a, b)],
                    h,
                );
                for e in 0..d {
                    w -= center.gamma.get(e, v, a) * omega_c[(e, b)]
                        + center.gamma.get(e, v, b) * omega_c[(a, e)];
                }
                nabla_omega_coords.set(v, a, b, w);
            }
        }
        // (nabla_v J)^a_b = d_v J^a_b + Gamma^a_{ve} J^e_b - Gamma^e_{vb} J^a_e
        for a in 0..d {
            for b in 0..d {
                let mut w = stencil4(
                    st[0].j[(a, b)],
                    st[1].j[(a, b)],
                    st[2].j[(a, b)],
                    st[3].j[(a, b)],
                    h,
                );
                for e in 0..d {
                    w += center.gamma.get(a, v, e) * center.j[(e, b)]
                        - center.gamma.get(e, v, b) * center.j[(a, e)];
                }
                // lower the upper index with g: store g((nabla_v J) e_b, e_c)
                // after the loop; keep the endomorphism for now in [v][b][a].
                nabla_j_coords.set(v, b, a, w);
            }
        }
    }
    // Lower nabla J: A[v][x][y] = g_{ya} (nabla_v J)^a_x.
    let mut nabla_j_low = Rank3::zeros(d);
    for v in 0..d {
        for x in 0..d {
            for y in 0..d {
                let mut acc = 0.0;
                for a in 0..d {
                    acc += center.g[(y, a)] * nabla_j_coords.get(v, x, a);
                }
                nabla_j_low.set(v, x, y, acc);
            }
        }
    }

    // Q field: value, first derivatives of Q, nu, tau along each axis.
    let (q_c, tau_c, tau_star_c, nu_c) = q_package(n, &center.r_low, &center.ginv, &center.j);
    let mut dq_coords = Rank3::zeros(d);
    let mut dnu_coords = DVector::zeros(d);
    let mut dtau_coords = DVector::zeros(d);
    for e in 0..d {
        let st = &stencils[e];
        let packs: Vec<(DMatrix<f64>, f64, f64, f64)> = st
            .iter()
            .map(|p| q_package(n, &p.r_low, &p.ginv, &p.j))
            .collect();
        for a in 0..d {
            for b in 0..d {
                let mut w = stencil4(
                    packs[0].0[(a, b)],
                    packs[1].0[(a, b)],
                    packs[2].0[(a, b)],
                    packs[3].0[(a, b)],
                    h,
                );
                for f in 0..d {
                    w -= center.gamma.get(f, e, a) * q_c[(f, b)]
                        + center.gamma.get(f, e, b) * q_c[(a, f)];
                }
                dq_coords.set(e, a, b, w);
            }
        }
        dtau_coords[e] = stencil4(packs[0].1, packs[1].1, packs[2].1, packs[3].1, h);
        if n >= 2 {
            dnu_coords[e] = stencil4(packs[0].3, packs[1].3, packs[2].3, packs[3].3, h);
        }
    }

    // Re-express everything in the orthonormal frame at the center.
    let r = curv4_contract(&center.r_low, [&frame; 4]);
    let nabla_r = rank5_contract(&nabla_r_coords, [&frame; 5]);
    let nabla_omega = rank3_contract(&nabla_omega_coords, [&frame; 3]);
    let nabla_j = rank3_contract(&nabla_j_low, [&frame; 3]);
    let q = Bilinear::from_matrix(frame.transpose() * &q_c * &frame);
    let dq = rank3_contract(&dq_coords, [&frame; 3]);
    let dnu = frame.transpose() * dnu_coords;
    let dtau = frame.transpose() * dtau_coords;

    Ok(JetPoint {
        chart_name: chart.name().to_string(),
        point: point.to_vec(),
        h,
        gamma: center.gamma,
        r,
        nabla_omega,
        nabla_j,
        nabla_r,
        space,
        q,
        dq,
        dnu,
        dtau,
        nu: nu_c,
        tau: tau_c,
        tau_star: tau_star_c,
    })
}

/// Sup-norm residuals of the three almost Kaehler conditions over the
/// orthonormal frame: the cyclic condition on nabla omega, the
/// J-shift relation and the vanishing frame trace.
#[derive(Debug, Clone, Copy)]
pub struct AkResiduals {
    pub r_1_8: f64,
    pub r_1_9: f64,
    pub r_1_10: f64,
}

impl AkResiduals {
    pub fn max(&self) -> f64 {
        self.r_1_8.max(self.r_1_9).max(self.r_1_10)
    }
}

pub fn almost_kahler_residuals(jet: &JetPoint) -> AkResiduals {
    almost_kahler_residuals_of(&jet.space, &jet.nabla_omega)
}

/// Same residuals on standalone (space, nabla omega) data.
pub fn almost_kahler_residuals_of(space: &HermitianSpace, a: &Rank3) -> AkResiduals {
    let d = space.dim();
    let jf = space.j_frame();
    let mut r8 = 0.0f64;
    let mut r9 = 0.0f64;
    for v in 0..d {
        for x in 0..d {
            for y in 0..d {
                r8 = r8.max((a.get(v, x, y) + a.get(x, y, v) + a.get(y, v, x)).abs());
                let mut s = a.get(v, x, y);
                for p in 0..d {
                    let cp = jf[(p, v)];
                    if cp == 0.0 {
                        continue;
                    }
                    for q in 0..d {
                        let cq = jf[(q, x)];
                        if cq != 0.0 {
                            s += cp * cq * a.get(p, q, y);
                        }
                    }
                }
                r9 = r9.max(s.abs());
            }
        }
    }
    let mut r10 = 0.0f64;
    for y in 0..d {
        let mut t = 0.0;
        for i in 0..d {
            t += a.get(i, i, y);
        }
        r10 = r10.max(t.abs());
    }
    AkResiduals {
        r_1_8: r8,
        r_1_9: r9,
        r_1_10: r10,
    }
}

/// Sup over random frame index 5-tuples of the cyclic (second Bianchi)
/// combination of nabla R.
pub fn second_bianchi_residual(jet: &JetPoint, seed: u64, samples: usize) -> f64 {
    let d = jet.space.dim();
    let mut rng = crate::sampling::rng_from_seed(seed);
    let mut sup = 0.0f64;
    use rand::Rng;
    for _ in 0..samples {
        let v = rng.gen_range(0..d);
        let x = rng.gen_range(0..d);
        let y = rng.gen_range(0..d);
        let z = rng.gen_range(0..d);
        let w = rng.gen_range(0..d);
        let s = jet.nabla_r.get(v, x, y, z, w)
            + jet.nabla_r.get(x, y, v, z, w)
            + jet.nabla_r.get(y, v, x, z, w);
        sup = sup.max(s.abs());
    }
    sup
}

/// Sup-norm of nabla J (frame components of the lowered tensor).
pub fn nabla_j_norm(jet: &JetPoint) -> f64 {
    jet.nabla_omega.sup_norm()
}

/// Rebuilds (nabla Q) from nabla R, R and nabla J by the product rule, for
/// cross-checking against the differenced Q field.
pub fn dq_from_nabla_r(jet: &JetPoint) -> Rank3 {
    let d = jet.space.dim();
    let n = jet.space.n();
    let nf = n as f64;
    let jf = jet.space.j_frame().clone();
    let a = &jet.nabla_omega;

    let mut out = Rank3::zeros(d);
    for e in 0..d {
        // B_e as a matrix: column x holds the components of (nabla_e J) e_x.
        let b_e = DMatrix::from_fn(d, d, |row, col| a.get(e, col, row));
        let de_r = nabla_r_slice(&jet.nabla_r, e);

        // d rho = contraction of nabla R.
        let mut drho = DMatrix::zeros(d, d);
        for p in 0..d {
            for q in 0..d {
                let mut acc = 0.0;
                for i in 0..d {
                    acc += de_r.get(i, p, i, q);
                }
                drho[(p, q)] = acc;
            }
        }

        // d rho_star(R) and d rho_star(L3 R).
        let l3r = curv4_contract(&jet.r, [&jf, &jf, &jf, &jf]);
        let mut de_l3r = curv4_contract(&de_r, [&jf, &jf, &jf, &jf]);
        for slot in 0..4 {
            let mats: [&DMatrix<f64>; 4] = match slot {
                0 => [&b_e, &jf, &jf, &jf],
                1 => [&jf, &b_e, &jf, &jf],
                2 => [&jf, &jf, &b_e, &jf],
                _ => [&jf, &jf, &jf, &b_e],
            };
            de_l3r = de_l3r.add(&curv4_contract(&jet.r, mats));
        }
        let d_rho_star = d_rho_star_frame(&jet.r, &de_r, &jf, &b_e);
        let d_rho_star_l3 = d_rho_star_frame(&l3r, &de_l3r, &jf, &b_e);

        let dq = drho / 6.0 + (d_rho_star - d_rho_star_l3) / (4.0 * (nf + 1.0));
        for x in 0..d {
            for y in 0..d {
                out.set(e, x, y, dq[(x, y)]);
            }
        }
    }
    out
}

fn nabla_r_slice(nr: &Rank5, e: usize) -> Curv4 {
    let d = nr.dim();
    let mut out = Curv4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out.set(i, j, k, l, nr.get(e, i, j, k, l));
                }
            }
        }
    }
    out
}

/// d/de of rho_star(R)(x, y) = sum_i R(x, e_i, Jy, J e_i) in frame
/// components: contraction of (nabla_e R) plus the two nabla J terms.
fn d_rho_star_frame(
    r: &Curv4,
    de_r: &Curv4,
    jf: &DMatrix<f64>,
    b_e: &DMatrix<f64>,
) -> DMatrix<f64> {
    let d = r.dim();
    DMatrix::from_fn(d, d, |x, y| {
        let mut acc = 0.0;
        for i in 0..d {
            for c in 0..d {
                let jcy = jf[(c, y)];
                let bcy = b_e[(c, y)];
                for dd in 0..d {
                    let jdi = jf[(dd, i)];
                    if jcy != 0.0 || bcy != 0.0 {
                        acc += de_r.get(x, i, c, dd) * jcy * jdi
                            + r.get(x, i, c, dd) * (bcy * jdi + jcy * b_e[(dd, i)]);
                    }
                }
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn flat_jet_vanishes() {
        let chart = crate::chart::builtin_chart("flat", 2, &BTreeMap::new()).unwrap();
        let j = jet(&chart, &[0.0; 4], 1e-3).unwrap();
        assert!(j.gamma.sup_norm() <= 1e-12);
        assert!(j.r.sup_norm() <= 1e-10);
        assert!(j.nabla_omega.sup_norm() <= 1e-12);
        assert!(j.nabla_r.sup_norm() <= 1e-8);
        assert!(j.dq.sup_norm() <= 1e-8);
        let ak = almost_kahler_residuals(&j);
        assert!(ak.max() <= 1e-12);
    }

    #[test]
    fn margin_violations_are_rejected() {
        let chart = crate::chart::builtin_chart("flat", 2, &BTreeMap::new()).unwrap();
        assert!(matches!(
            jet(&chart, &[2.0, 0.0, 0.0, 0.0], 1e-3),
            Err(JetError::OutOfDomain)
        ));
        assert!(matches!(
            jet(&chart, &[0.999, 0.0, 0.0, 0.0], 1e-3),
            Err(JetError::StepTooLarge)
        ));
    }
}
