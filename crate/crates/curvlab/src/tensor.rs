//! Dense covariant tensors in frame components (ranks 2 through 5).
//!
//! Storage is row-major `Vec<f64>` indexed by frame indices. The metric in
//! frame components is the identity, so traces are plain index sums and no
//! raising/lowering appears anywhere in this module.

use nalgebra::{DMatrix, DVector};

/// Rank-2 covariant tensor, possibly non-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Bilinear {
    pub m: DMatrix<f64>,
}

impl Bilinear {
    pub fn zeros(dim: usize) -> Self {
        Bilinear {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Bilinear { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[(a, b)]
    }

    /// S(X, Y) on frame-component vectors.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.m * y)[(0, 0)]
    }

    pub fn symmetric_part(&self) -> Bilinear {
        Bilinear {
            m: (&self.m + self.m.transpose()) * 0.5,
        }
    }

    pub fn skew_part(&self) -> Bilinear {
        Bilinear {
            m: (&self.m - self.m.transpose()) * 0.5,
        }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn sup_norm(&self) -> f64 {
        self.m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Bilinear {
        Bilinear { m: &self.m * s }
    }

    pub fn add(&self, other: &Bilinear) -> Bilinear {
        Bilinear { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Bilinear) -> Bilinear {
        Bilinear { m: &self.m - &other.m }
    }
}

/// Rank-3 covariant tensor; used for (nabla omega)-like data A[v][x][y].
#[derive(Debug, Clone, PartialEq)]
pub struct Rank3 {
    dim: usize,
    data: Vec<f64>,
}

impl Rank3 {
    pub fn zeros(dim: usize) -> Self {
        Rank3 {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Rank3::zeros(dim);
        for v in 0..dim {
            for x in 0..dim {
                for y in 0..dim {
                    t.set(v, x, y, f(v, x, y));
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, v: usize, x: usize, y: usize) -> f64 {
        self.data[(v * self.dim + x) * self.dim + y]
    }

    #[inline]
    pub fn set(&mut self, v: usize, x: usize, y: usize, val: f64) {
        self.data[(v * self.dim + x) * self.dim + y] = val;
    }

    #[inline]
    pub fn add_to(&mut self, v: usize, x: usize, y: usize, val: f64) {
        self.data[(v * self.dim + x) * self.dim + y] += val;
    }

    /// T(U, X, Y) on frame-component vectors.
    pub fn eval(&self, u: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for v in 0..d {
            if u[v] == 0.0 {
                continue;
            }
            for a in 0..d {
                if x[a] == 0.0 {
                    continue;
                }
                let base = (v * d + a) * d;
                let mut inner = 0.0;
                for b in 0..d {
                    inner += self.data[base + b] * y[b];
                }
                acc += u[v] * x[a] * inner;
            }
        }
        acc
    }

    /// Contracts the first slot with a vector, leaving a Bilinear.
    pub fn contract_first(&self, u: &DVector<f64>) -> Bilinear {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for v in 0..d {
            let w = u[v];
            if w == 0.0 {
                continue;
            }
            for a in 0..d {
                for b in 0..d {
                    m[(a, b)] += w * self.get(v, a, b);
                }
            }
        }
        Bilinear { m }
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Rank3 {
        Rank3 {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Rank-4 covariant tensor with (when promised) algebraic curvature
/// symmetries; houses R, pi1, pi2, psi(S), L3 R and identity residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Curv4 {
    dim: usize,
    data: Vec<f64>,
}

impl Curv4 {
    pub fn zeros(dim: usize) -> Self {
        Curv4 {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Curv4::zeros(dim);
        let mut idx = 0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        t.data[idx] = f(i, j, k, l);
                        idx += 1;
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, val: f64) {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l] = val;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, k: usize, l: usize, val: f64) {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l] += val;
    }

    /// R(X, Y, Z, W) on frame-component vectors.
    pub fn eval(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..d {
                    if z[k] == 0.0 {
                        continue;
                    }
                    let base = ((i * d + j) * d + k) * d;
                    let mut inner = 0.0;
                    for l in 0..d {
                        inner += self.data[base + l] * w[l];
                    }
                    acc += xy * z[k] * inner;
                }
            }
        }
        acc
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Curv4 {
        Curv4 {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Curv4) -> Curv4 {
        assert_eq!(self.dim, other.dim);
        Curv4 {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Curv4) -> Curv4 {
        assert_eq!(self.dim, other.dim);
        Curv4 {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Components of the same geometric tensor after the frame change
    /// e'_a = sum_b O[b][a] e_b (O orthogonal in frame components).
    pub fn change_frame(&self, o: &DMatrix<f64>) -> Curv4 {
        let d = self.dim;
        // Contract one slot at a time to keep this O(d^5).
        let mut cur = self.data.clone();
        for _slot in 0..4 {
            // Cycle slots: contract the first index with O, then rotate
            // indices so each original slot is hit exactly once.
            let mut next = vec![0.0; cur.len()];
            for a in 0..d {
                for rest in 0..d * d * d {
                    let mut acc = 0.0;
                    for b in 0..d {
                        acc += o[(b, a)] * cur[b * d * d * d + rest];
                    }
                    // Move contracted slot to the back: (a, rest) -> (rest, a)
                    next[rest * d + a] = acc;
                }
            }
            cur = next;
        }
        Curv4 { dim: d, data: cur }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Rank-5 covariant tensor; houses (nabla R)[v][i][j][k][l].
#[derive(Debug, Clone, PartialEq)]
pub struct Rank5 {
    dim: usize,
    data: Vec<f64>,
}

impl Rank5 {
    pub fn zeros(dim: usize) -> Self {
        Rank5 {
            dim,
            data: vec![0.0; dim * dim * dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, v: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[(((v * self.dim + i) * self.dim + j) * self.dim + k) * self.dim + l]
    }

    #[inline]
    pub fn set(&mut self, v: usize, i: usize, j: usize, k: usize, l: usize, val: f64) {
        self.data[(((v * self.dim + i) * self.dim + j) * self.dim + k) * self.dim + l] = val;
    }

    /// (nabla_V R)(X, Y, Z, W) on frame-component vectors.
    pub fn eval(
        &self,
        v: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for a in 0..d {
            if v[a] == 0.0 {
                continue;
            }
            for i in 0..d {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    if y[j] == 0.0 {
                        continue;
                    }
                    let vxy = v[a] * x[i] * y[j];
                    for k in 0..d {
                        if z[k] == 0.0 {
                            continue;
                        }
                        let base = (((a * d + i) * d + j) * d + k) * d;
                        let mut inner = 0.0;
                        for l in 0..d {
                            inner += self.data[base + l] * w[l];
                        }
                        acc += vxy * z[k] * inner;
                    }
                }
            }
        }
        acc
    }

    /// Contracts the derivative slot with a frame-component vector.
    pub fn contract_first(&self, v: &DVector<f64>) -> Curv4 {
        let d = self.dim;
        let mut out = Curv4::zeros(d);
        let block = d * d * d * d;
        for a in 0..d {
            let w = v[a];
            if w == 0.0 {
                continue;
            }
            let off = a * block;
            for idx in 0..block {
                out.data[idx] += w * self.data[off + idx];
            }
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Sup-norm residuals of the four algebraic curvature symmetries.
#[derive(Debug, Clone, Copy)]
pub struct SymmetryDefect {
    pub antisym12: f64,
    pub antisym34: f64,
    pub pair: f64,
    pub bianchi1: f64,
}

impl SymmetryDefect {
    pub fn max(&self) -> f64 {
        self.antisym12
            .max(self.antisym34)
            .max(self.pair)
            .max(self.bianchi1)
    }
}

/// Measures how far a rank-4 tensor is from having curvature symmetries.
pub fn symmetry_defect(r: &Curv4) -> SymmetryDefect {
    let d = r.dim();
    let mut a12 = 0.0f64;
    let mut a34 = 0.0f64;
    let mut pair = 0.0f64;
    let mut b1 = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let v = r.get(i, j, k, l);
                    a12 = a12.max((v + r.get(j, i, k, l)).abs());
                    a34 = a34.max((v + r.get(i, j, l, k)).abs());
                    pair = pair.max((v - r.get(k, l, i, j)).abs());
                    b1 = b1.max((v + r.get(j, k, i, l) + r.get(k, i, j, l)).abs());
                }
            }
        }
    }
    SymmetryDefect {
        antisym12: a12,
        antisym34: a34,
        pair,
        bianchi1: b1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curv4_roundtrip_indexing() {
        let mut t = Curv4::zeros(4);
        t.set(1, 2, 3, 0, 5.5);
        assert_eq!(t.get(1, 2, 3, 0), 5.5);
        assert_eq!(t.get(0, 0, 0, 0), 0.0);
    }

    #[test]
    fn symmetry_defect_flags_asymmetric_noise() {
        let mut t = Curv4::zeros(4);
        t.set(0, 1, 2, 3, 1.0);
        let d = symmetry_defect(&t);
        assert!(d.max() > 0.5);
    }

    #[test]
    fn change_frame_identity_is_noop() {
        let mut t = Curv4::zeros(4);
        t.set(0, 1, 2, 3, 2.0);
        t.set(3, 1, 0, 2, -1.0);
        let o = DMatrix::identity(4, 4);
        assert_eq!(t.change_frame(&o), t);
    }
}
