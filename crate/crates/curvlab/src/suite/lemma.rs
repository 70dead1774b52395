//! Evaluators for the nabla-Q lemma identities (the covariant-derivative
//! expansion of the curvature reconstruction and its trace consequences).
//!
//! Each evaluator assembles both sides of one identity from a [`LemmaData`]
//! bundle over random frame tuples and reports the sup-norm residual
//! together with the largest individual term magnitude (so a vanishing
//! residual on a degenerate input is distinguishable from a real
//! cancellation).

use nalgebra::{DMatrix, DVector};

use crate::algebra::{canonical, Canonical};
use crate::sampling::{random_unit_vector, rng_from_seed};
use crate::space::HermitianSpace;
use crate::tensor::{Bilinear, Curv4, Rank3, Rank5};

/// Which way to read the ambiguous parenthesis in the long nabla-Q lemma:
/// the source text opens `(2n+3)(Q(Y,...)` without a matching close, so the
/// second difference term either shares the (2n+3) factor or carries
/// coefficient one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eq210Reading {
    /// `(2n+3) * (Q(Y, (nabla_X J)V) - Q(X, (nabla_Y J)V))`, matching the
    /// paired pattern of every subsequent term group.
    #[default]
    SymmetricPair,
    /// `(2n+3) * Q(Y, (nabla_X J)V) - Q(X, (nabla_Y J)V)` as printed.
    Literal,
}

/// Pointwise data the lemma and section-3 evaluators consume: the tensors a
/// jet produces at a chart point, or synthetic constrained data assembled
/// for negative controls and transcription checks.
#[derive(Debug, Clone)]
pub struct LemmaData {
    pub space: HermitianSpace,
    pub r: Curv4,
    pub nabla_r: Rank5,
    pub q: Bilinear,
    /// (nabla_V Q)(X, Y).
    pub dq: Rank3,
    /// (nabla_V omega)(X, Y) = g((nabla_V J) X, Y).
    pub a: Rank3,
    pub dnu: DVector<f64>,
    pub dtau: DVector<f64>,
    pub nu: f64,
    pub tau: f64,
}

impl LemmaData {
    pub fn from_jet(jet: &crate::jet::JetPoint) -> Self {
        LemmaData {
            space: jet.space.clone(),
            r: jet.r.clone(),
            nabla_r: jet.nabla_r.clone(),
            q: jet.q.clone(),
            dq: jet.dq.clone(),
            a: jet.nabla_omega.clone(),
            dnu: jet.dnu.clone(),
            dtau: jet.dtau.clone(),
            nu: jet.nu,
            tau: jet.tau,
        }
    }

    /// Synthetic data from formal (Q, nabla Q, nabla omega, d nu, d tau):
    /// the curvature is reconstructed from Q and nu, and nabla R is the
    /// exact directional derivative of that reconstruction (an order-4
    /// difference in the deformation parameter, exact for the cubic
    /// dependence). A wrong transcription of the expansion formula thus
    /// fails against synthetic data even though no chart is involved.
    #[allow(clippy::too_many_arguments)]
    pub fn synthetic(
        space: HermitianSpace,
        q: Bilinear,
        dq: Rank3,
        a: Rank3,
        dnu: DVector<f64>,
        dtau: DVector<f64>,
        nu: f64,
        tau: f64,
    ) -> Self {
        let d = space.dim();
        let n = space.n();
        let r = reconstruct_with_j(d, n, &q.m, nu, space.j_frame());
        let mut nabla_r = Rank5::zeros(d);
        let t = 0.5;
        for v in 0..d {
            // B_v: column x holds the components of (nabla_{e_v} J) e_x.
            let b_v = DMatrix::from_fn(d, d, |row, col| a.get(v, col, row));
            let dq_v = DMatrix::from_fn(d, d, |x, y| dq.get(v, x, y));
            let at = |s: f64| {
                let j_s = space.j_frame() + &b_v * s;
                let q_s = &q.m + &dq_v * s;
                reconstruct_with_j(d, n, &q_s, nu + s * dnu[v], &j_s)
            };
            let (f_p2, f_p1, f_m1, f_m2) = (at(2.0 * t), at(t), at(-t), at(-2.0 * t));
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let der = (-f_p2.get(i, j, k, l) + 8.0 * f_p1.get(i, j, k, l)
                                - 8.0 * f_m1.get(i, j, k, l)
                                + f_m2.get(i, j, k, l))
                                / (12.0 * t);
                            nabla_r.set(v, i, j, k, l, der);
                        }
                    }
                }
            }
        }
        LemmaData {
            space,
            r,
            nabla_r,
            q,
            dq,
            a,
            dnu,
            dtau,
            nu,
            tau,
        }
    }

    /// The degenerate regime of a Kaehler space form: every derivative
    /// field vanishes and Q is the metric multiple.
    pub fn kahler_degenerate(space: HermitianSpace, nu: f64) -> Self {
        let d = space.dim();
        let n = space.n();
        let nf = n as f64;
        let q = Bilinear::from_matrix(DMatrix::identity(d, d) * ((nf + 1.0) * nu / 3.0));
        let r = canonical(&space, Canonical::Pi1)
            .add(&canonical(&space, Canonical::Pi2))
            .scale(nu);
        LemmaData {
            r,
            nabla_r: Rank5::zeros(d),
            q,
            dq: Rank3::zeros(d),
            a: Rank3::zeros(d),
            dnu: DVector::zeros(d),
            dtau: DVector::zeros(d),
            nu,
            tau: 4.0 * nf * (nf + 1.0) * nu,
            space,
        }
    }

    /// rho_star(R - L3 R) recovered from the skew part of Q.
    pub fn rho_star_skew(&self) -> Bilinear {
        let nf = self.space.n() as f64;
        self.q.skew_part().scale(4.0 * (nf + 1.0))
    }
}

/// psi(Q) + nu pi1 - ((2n-1)/3) nu pi2 with an explicit (possibly deformed)
/// J matrix in place of the space's own.
fn reconstruct_with_j(d: usize, n: usize, q: &DMatrix<f64>, nu: f64, jmat: &DMatrix<f64>) -> Curv4 {
    let nf = n as f64;
    let sj = q * jmat;
    let mut out = Curv4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    // psi(Q) on basis vectors with g(X, JY) = jmat[(x, y)].
                    let psi = 2.0 * jmat[(i, j)] * sj[(k, l)]
                        + 2.0 * jmat[(k, l)] * sj[(i, j)]
                        + jmat[(i, k)] * sj[(j, l)]
                        + jmat[(j, l)] * sj[(i, k)]
                        - jmat[(i, l)] * sj[(j, k)]
                        - jmat[(j, k)] * sj[(i, l)];
                    let gik = (i == k) as u8 as f64;
                    let gjl = (j == l) as u8 as f64;
                    let gjk = (j == k) as u8 as f64;
                    let gil = (i == l) as u8 as f64;
                    let pi1 = gik * gjl - gjk * gil;
                    // omega(X, Y) = -g(X, JY) reads the same entries.
                    let w = |a: usize, b: usize| -jmat[(a, b)];
                    let pi2 = 2.0 * w(i, j) * w(k, l) + w(i, k) * w(j, l) - w(j, k) * w(i, l);
                    out.set(
                        i,
                        j,
                        k,
                        l,
                        psi + nu * pi1 - (2.0 * nf - 1.0) / 3.0 * nu * pi2,
                    );
                }
            }
        }
    }
    out
}

/// One evaluated residual: sup over tuples of |lhs - rhs| plus the largest
/// single term magnitude encountered.
#[derive(Debug, Clone, Copy)]
pub struct EvalOutcome {
    pub residual: f64,
    pub max_term: f64,
}

impl EvalOutcome {
    pub(crate) fn zero() -> Self {
        EvalOutcome {
            residual: 0.0,
            max_term: 0.0,
        }
    }

    pub(crate) fn absorb(&mut self, lhs: f64, rhs: f64, terms: &[f64]) {
        self.residual = self.residual.max((lhs - rhs).abs());
        for t in terms {
            self.max_term = self.max_term.max(t.abs());
        }
        self.max_term = self.max_term.max(lhs.abs()).max(rhs.abs());
    }
}

/// Shared evaluation context over one [`LemmaData`].
pub struct Ctx<'a> {
    pub d: usize,
    pub nf: f64,
    pub jf: &'a DMatrix<f64>,
    pub data: &'a LemmaData,
}

impl<'a> Ctx<'a> {
    pub fn new(data: &'a LemmaData) -> Self {
        Ctx {
            d: data.space.dim(),
            nf: data.space.n() as f64,
            jf: data.space.j_frame(),
            data,
        }
    }

    pub fn q(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.data.q.eval(x, y)
    }

    pub fn j(&self, x: &DVector<f64>) -> DVector<f64> {
        self.jf * x
    }

    /// g(X, JY).
    pub fn gj(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * self.jf * y)[(0, 0)]
    }

    /// omega(X, Y) = g(JX, Y).
    pub fn w(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        -self.gj(x, y)
    }

    /// (nabla_V J) X as a vector.
    pub fn bv(&self, v: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        let d = self.d;
        let mut out = DVector::zeros(d);
        for vv in 0..d {
            let cv = v[vv];
            if cv == 0.0 {
                continue;
            }
            for xx in 0..d {
                let cx = x[xx];
                if cx == 0.0 {
                    continue;
                }
                for y in 0..d {
                    out[y] += cv * cx * self.data.a.get(vv, xx, y);
                }
            }
        }
        out
    }

    /// (nabla_V omega)(X, Y).
    pub fn wd(&self, v: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.data.a.eval(v, x, y)
    }

    /// (nabla_V Q)(X, Y).
    pub fn dq(&self, v: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.data.dq.eval(v, x, y)
    }

    /// sum_i Q(J e_i, (nabla_V J) e_i).
    pub fn qjsum(&self, v: &DVector<f64>) -> f64 {
        let d = self.d;
        let mut acc = 0.0;
        for i in 0..d {
            let mut bvi = vec![0.0; d];
            for vv in 0..d {
                let cv = v[vv];
                if cv == 0.0 {
                    continue;
                }
                for (b, slot) in bvi.iter_mut().enumerate() {
                    *slot += cv * self.data.a.get(vv, i, b);
                }
            }
            for p in 0..d {
                let jpi = self.jf[(p, i)];
                if jpi == 0.0 {
                    continue;
                }
                for (b, &av) in bvi.iter().enumerate() {
                    acc += jpi * self.data.q.get(p, b) * av;
                }
            }
        }
        acc
    }

    pub fn dnu(&self, x: &DVector<f64>) -> f64 {
        self.data.dnu.dot(x)
    }

    pub fn dtau(&self, x: &DVector<f64>) -> f64 {
        self.data.dtau.dot(x)
    }

    pub fn pi1(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        x.dot(z) * y.dot(w) - y.dot(z) * x.dot(w)
    }

    pub fn pi2(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        2.0 * self.w(x, y) * self.w(z, w) + self.w(x, z) * self.w(y, w)
            - self.w(y, z) * self.w(x, w)
    }
}

pub fn tuples(d: usize, count: usize, seed: u64, arity: usize) -> Vec<Vec<DVector<f64>>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| (0..arity).map(|_| random_unit_vector(d, &mut rng)).collect())
        .collect()
}

/// The covariant-derivative expansion of R = psi(Q) + nu pi1 - c nu pi2:
/// (nabla_V R)(X,Y,Z,W) against the four assembled blocks.
pub fn eq_2_9(data: &LemmaData, count: usize, seed: u64) -> EvalOutcome {
    let c = Ctx::new(data);
    let coef = (2.0 * c.nf - 1.0) / 3.0;
    let mut out = EvalOutcome::zero();
    for t in tuples(c.d, count, seed, 5) {
        let (v, x, y, z, w) = (&t[0], &t[1], &t[2], &t[3], &t[4]);
        let lhs = data.nabla_r.eval(v, x, y, z, w);
        let (jy, jz, jw) = (c.j(y), c.j(z), c.j(w));
        let block_a = 2.0 * c.gj(x, y) * (c.dq(v, z, &jw) + c.q(z, &c.bv(v, w)))
            + 2.0 * c.gj(z, w) * (c.dq(v, x, &jy) + c.q(x, &c.bv(v, y)))
            + c.gj(x, z) * (c.dq(v, y, &jw) + c.q(y, &c.bv(v, w)))
            + c.gj(y, w) * (c.dq(v, x, &jz) + c.q(x, &c.bv(v, z)))
            - c.gj(y, z) * (c.dq(v, x, &jw) + c.q(x, &c.bv(v, w)))
            - c.gj(x, w) * (c.dq(v, y, &jz) + c.q(y, &c.bv(v, z)));
        let block_b = 2.0 * c.wd(v, y, x) * c.q(z, &jw)
            + 2.0 * c.wd(v, w, z) * c.q(x, &jy)
            + c.wd(v, z, x) * c.q(y, &jw)
            + c.wd(v, w, y) * c.q(x, &jz)
            - c.wd(v, z, y) * c.q(x, &jw)
            - c.wd(v, w, x) * c.q(y, &jz);
        let block_c = c.dnu(v) * (c.pi1(x, y, z, w) - coef * c.pi2(x, y, z, w));
        let block_d = -coef
            * data.nu
            * (2.0 * c.gj(x, y) * c.wd(v, w, z)
                + 2.0 * c.gj(z, w) * c.wd(v, y, x)
                + c.gj(x, z) * c.wd(v, w, y)
                + c.gj(y, w) * c.wd(v, z, x)
                - c.gj(x, w) * c.wd(v, z, y)
                - c.gj(y, z) * c.wd(v, w, x));
        let rhs = block_a + block_b + block_c + block_d;
        out.absorb(lhs, rhs, &[block_a, block_b, block_c, block_d]);
    }
    out
}

/// The closed form of 2(n+1)(2n-1) (nabla_V Q)(X, JY).
pub fn eq_2_10(data: &LemmaData, count: usize, seed: u64, reading: Eq210Reading) -> EvalOutcome {
    let c = Ctx::new(data);
    let nf = c.nf;
    let mut out = EvalOutcome::zero();
    for t in tuples(c.d, count, seed, 3) {
        let (v, x, y) = (&t[0], &t[1], &t[2]);
        let jy = c.j(y);
        let (jx_nu, jy_nu) = (c.dnu(&c.j(x)), c.dnu(&jy));
        let lhs = 2.0 * (nf + 1.0) * (2.0 * nf - 1.0) * c.dq(v, x, &jy);
        let pair = match reading {
            Eq210Reading::SymmetricPair => {
                (2.0 * nf + 3.0) * (c.q(y, &c.bv(x, v)) - c.q(x, &c.bv(y, v)))
            }
            Eq210Reading::Literal => (2.0 * nf + 3.0) * c.q(y, &c.bv(x, v)) - c.q(x, &c.bv(y, v)),
        };
        let t2 = (4.0 * nf + 3.0) * c.q(v, &(c.bv(x, y) - c.bv(y, x)));
        let t3 = -c.q(y, &c.bv(v, x));
        let t4 = -(4.0 * nf * nf + 2.0 * nf - 3.0) * c.q(x, &c.bv(v, y));
        let braces = |u: &DVector<f64>, lead: f64, nu_coef: f64| {
            lead * c.qjsum(u) + nu_coef * c.dnu(u) + (2.0 * nf - 1.0) / 6.0 * c.dtau(u)
        };
        let t5 = c.gj(x, y)
            * braces(v, 2.0 * nf, 4.0 / 3.0 * (nf + 1.0) * (nf - 2.0));
        let off_nu = -2.0 / 3.0 * (nf + 1.0) * (2.0 * nf * nf - 4.0 * nf + 3.0);
        let t6 = c.gj(x, v) * braces(y, (4.0 * nf - 1.0) / 2.0, off_nu);
        let t7 = -c.gj(y, v) * braces(x, (4.0 * nf - 1.0) / 2.0, off_nu);
        let t8 = -2.0 * (nf + 1.0) * (jx_nu * y.dot(v) - jy_nu * x.dot(v));
        let t9 = (nf + 1.0) / 3.0 * (data.tau - 2.0 * (2.0 * nf - 1.0).powi(2) * data.nu)
            * c.wd(v, x, y);
        let rhs = pair + t2 + t3 + t4 + t5 + t6 + t7 + t8 + t9;
        out.absorb(lhs, rhs, &[pair, t2, t3, t4, t5, t6, t7, t8, t9]);
    }
    out
}

/// The cyclic-sum identity obtained from tracing the second Bianchi
/// identity against the fundamental form.
pub fn eq_2_11(data: &LemmaData, count: usize, seed: u64) -> EvalOutcome {
    let c = Ctx::new(data);
    let nf = c.nf;
    let mut out = EvalOutcome::zero();
    for t in tuples(c.d, count, seed, 3) {
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut max_piece = 0.0f64;
        for rot in 0..3 {
            let (v, x, y) = (&t[rot % 3], &t[(rot + 1) % 3], &t[(rot + 2) % 3]);
            let jy = c.j(y);
            lhs += 2.0 * (nf + 1.0) * c.dq(v, x, &jy);
            let bracket = c.dtau(v) / 6.0 - 4.0 / 3.0 * (nf * nf - 1.0) * c.dnu(v) + c.qjsum(v);
            let piece = c.q(y, &c.bv(v, x)) - (2.0 * nf + 3.0) * c.q(x, &c.bv(v, y))
                + c.w(x, y) * bracket;
            rhs += piece;
            max_piece = max_piece.max(piece.abs());
        }
        out.absorb(lhs, rhs, &[max_piece]);
    }
    out
}

/// The divergence of Q against the qjsum / d tau / d nu combination.
pub fn eq_2_12(data: &LemmaData, count: usize, seed: u64) -> EvalOutcome {
    let c = Ctx::new(data);
    let nf = c.nf;
    let d = c.d;
    let mut out = EvalOutcome::zero();
    for t in tuples(d, count, seed, 1) {
        let v = &t[0];
        let mut lhs = 0.0;
        for i in 0..d {
            for x in 0..d {
                lhs += data.dq.get(i, x, i) * v[x];
            }
        }
        let t1 = (4.0 * nf + 1.0) / (4.0 * (nf + 1.0)) * c.qjsum(v);
        let t2 = nf / (6.0 * (nf + 1.0)) * c.dtau(v);
        let t3 = -2.0 / 3.0 * (nf - 1.0) * (nf - 1.0) * c.dnu(v);
        out.absorb(lhs, t1 + t2 + t3, &[t1, t2, t3]);
    }
    out
}

/// qjsum(V) = (4/3)(n^2 - 1) V(nu); requires n != 3.
pub fn eq_2_13(data: &LemmaData, count: usize, seed: u64) -> EvalOutcome {
    let c = Ctx::new(data);
    let nf = c.nf;
    let mut out = EvalOutcome::zero();
    for t in tuples(c.d, count, seed, 1) {
        let v = &t[0];
        let lhs = c.qjsum(v);
        let rhs = 4.0 / 3.0 * (nf * nf - 1.0) * c.dnu(v);
        out.absorb(lhs, rhs, &[lhs, rhs]);
    }
    out
}

/// The eight-term combination that the vanishing of the S tensor forces;
/// requires n >= 3.
pub fn eq_2_14(data: &LemmaData, count: usize, seed: u64) -> EvalOutcome {
    let c = Ctx::new(data);
    let nf = c.nf;
    let mut out = EvalOutcome::zero();
    for t in tuples(c.d, count, seed, 3) {
        let (w, x, y) = (&t[0], &t[1], &t[2]);
        let (jx, jy) = (c.j(x), c.j(y));
        let t1 = 4.0 * (2.0 * nf - 3.0) * (c.q(x, &c.bv(y, w)) - c.q(y, &c.bv(x, w)));
        let t2 = 4.0 * nf * (c.q(x, &c.bv(w, y)) - c.q(y, &c.bv(w, x)));
        let t3 = -4.0 * (nf - 3.0) * c.q(w, &(c.bv(x, y) - c.bv(y, x)));
        let t4 = data.tau * c.wd(w, x, y);
        let t5 = -8.0 / 3.0
            * (2.0 * nf * nf - 4.0 * nf + 3.0)
            * (c.dnu(x) * c.w(y, w) - c.dnu(y) * c.w(x, w) + 2.0 * c.dnu(w) * c.gj(x, y));
        let t6 = 8.0 * nf * (nf - 2.0) * (c.dnu(&jx) * y.dot(w) - c.dnu(&jy) * x.dot(w));
        let lhs = t1 + t2 + t3 + t4 + t5 + t6;
        out.absorb(lhs, 0.0, &[t1, t2, t3, t4, t5, t6]);
    }
    out
}

/// The antisymmetrized-Q identity closing the lemma chain; requires n >= 4.
pub fn eq_2_19(data: &LemmaData, count: usize, seed: u64) -> EvalOutcome {
    let c = Ctx::new(data);
    let nf = c.nf;
    let mut out = EvalOutcome::zero();
    for t in tuples(c.d, count, seed, 3) {
        let (y, v, x) = (&t[0], &t[1], &t[2]);
        let (jy, jv) = (c.j(y), c.j(v));
        let byv = c.bv(y, v);
        let lhs = c.q(x, &byv) - c.q(&byv, x);
        let rhs = 2.0 / 3.0
            * ((2.0 * nf - 1.0) * (c.dnu(y) * c.w(v, x) + c.dnu(&jy) * v.dot(x))
                + (nf - 2.0) * (c.dnu(v) * c.w(y, x) + c.dnu(&jv) * y.dot(x)));
        out.absorb(lhs, rhs, &[lhs, rhs]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian_vector, random_constrained_a, random_constrained_q};

    fn synthetic_instance(n: usize, seed: u64) -> LemmaData {
        let space = HermitianSpace::standard(n);
        let d = 2 * n;
        let q = random_constrained_q(&space, seed);
        let a = random_constrained_a(&space, seed + 1).unwrap();
        let mut rng = rng_from_seed(seed + 2);
        let dnu = gaussian_vector(d, &mut rng);
        let dtau = gaussian_vector(d, &mut rng);
        let dq = {
            use rand::Rng;
            Rank3::from_fn(d, |_, _, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
        };
        LemmaData::synthetic(space, q, dq, a, dnu, dtau, 0.7, -1.3)
    }

    #[test]
    fn eq_2_9_matches_formal_derivative() {
        // nabla R is built as the exact derivative of the reconstruction,
        // so the hand-transcribed expansion must agree to roundoff on fully
        // generic (even unconstrained-dq) data.
        for n in [2usize, 3] {
            let data = synthetic_instance(n, 33 + n as u64);
            let out = eq_2_9(&data, 25, 7);
            assert!(
                out.residual <= 1e-10 * out.max_term.max(1.0),
                "n={n}: residual {} with max term {}",
                out.residual,
                out.max_term
            );
            assert!(out.max_term > 1e-2, "check must not be vacuous");
        }
    }

    #[test]
    fn kahler_degenerate_data_zeroes_every_lemma() {
        let data = LemmaData::kahler_degenerate(HermitianSpace::standard(4), 1.0);
        assert!(eq_2_9(&data, 10, 1).residual <= 1e-12);
        assert!(eq_2_10(&data, 10, 1, Eq210Reading::SymmetricPair).residual <= 1e-12);
        assert!(eq_2_11(&data, 10, 1).residual <= 1e-12);
        assert!(eq_2_12(&data, 10, 1).residual <= 1e-12);
        assert!(eq_2_13(&data, 10, 1).residual <= 1e-12);
        assert!(eq_2_14(&data, 10, 1).residual <= 1e-12);
        assert!(eq_2_19(&data, 10, 1).residual <= 1e-12);
    }

    #[test]
    fn dnu_injection_fires_each_trace_lemma() {
        let space = HermitianSpace::standard(4);
        let d = 8;
        let mut data = LemmaData::kahler_degenerate(space, 1.0);
        data.dnu = DVector::from_fn(d, |i, _| 0.1 + i as f64 * 0.05);
        assert!(eq_2_10(&data, 10, 1, Eq210Reading::SymmetricPair).residual > 1e-3);
        assert!(eq_2_11(&data, 10, 1).residual > 1e-3);
        assert!(eq_2_12(&data, 10, 1).residual > 1e-3);
        assert!(eq_2_13(&data, 10, 1).residual > 1e-3);
        assert!(eq_2_14(&data, 10, 1).residual > 1e-3);
        assert!(eq_2_19(&data, 10, 1).residual > 1e-3);
    }
}
