//! Validated almost-Hermitian inner-product spaces and g-orthonormal 2-planes.
//!
//! A [`HermitianSpace`] bundles a 2n-dimensional metric `g`, a compatible
//! almost complex structure `J` and a g-orthonormal frame. All tensor
//! calculus elsewhere in the crate works on components taken in that frame,
//! where the metric is the identity and `J` is a skew-orthogonal matrix.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Compatibility tolerance for validating (g, J) pairs at construction.
pub const COMPAT_TOL: f64 = 1e-10;

/// Pivot threshold below which Gram-Schmidt re-draws instead of dividing.
pub const PIVOT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("metric is not symmetric positive definite")]
    NonPositiveDefiniteMetric,
    #[error("incompatible almost complex structure: {check} residual {residual:.3e}")]
    IncompatibleJ { check: &'static str, residual: f64 },
    #[error("degenerate plane: Gram-Schmidt pivot below {0:.1e}")]
    DegeneratePlane(f64),
    #[error("dimension too small: need real dimension >= {need}, got {got}")]
    DimensionTooSmall { need: usize, got: usize },
}

/// A 2n-dimensional real inner-product space with compatible almost complex
/// structure and an adapted g-orthonormal frame.
#[derive(Debug, Clone)]
pub struct HermitianSpace {
    n: usize,
    g: DMatrix<f64>,
    j: DMatrix<f64>,
    frame: DMatrix<f64>,
    /// J expressed in frame components; skew-symmetric and orthogonal.
    jf: DMatrix<f64>,
}

/// The block-standard complex structure: J e_{2k} = e_{2k+1} (0-indexed).
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let d = 2 * n;
    let mut j = DMatrix::zeros(d, d);
    for k in 0..n {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

fn sup_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

impl HermitianSpace {
    /// Standard space: Euclidean metric, block-standard J, identity frame.
    pub fn standard(n: usize) -> Self {
        assert!(n >= 1, "complex dimension must be positive");
        let d = 2 * n;
        let j = standard_j(n);
        HermitianSpace {
            n,
            g: DMatrix::identity(d, d),
            j: j.clone(),
            frame: DMatrix::identity(d, d),
            jf: j,
        }
    }

    /// Builds and validates a space from explicit metric and complex
    /// structure components, computing the orthonormal frame by Cholesky.
    pub fn new(n: usize, g: DMatrix<f64>, j: DMatrix<f64>) -> Result<Self, SpaceError> {
        assert!(n >= 1, "complex dimension must be positive");
        let d = 2 * n;
        assert_eq!(g.nrows(), d);
        assert_eq!(g.ncols(), d);
        assert_eq!(j.nrows(), d);
        assert_eq!(j.ncols(), d);

        if sup_norm(&(g.clone() - g.transpose())) > COMPAT_TOL {
            return Err(SpaceError::NonPositiveDefiniteMetric);
        }
        let jj = &j * &j + DMatrix::identity(d, d);
        let r = sup_norm(&jj);
        if r > COMPAT_TOL {
            return Err(SpaceError::IncompatibleJ {
                check: "J*J + I",
                residual: r,
            });
        }
        let comp = j.transpose() * &g * &j - &g;
        let r = sup_norm(&comp);
        if r > COMPAT_TOL {
            return Err(SpaceError::IncompatibleJ {
                check: "g(J.,J.) - g",
                residual: r,
            });
        }

        let chol = nalgebra::Cholesky::new(g.clone())
            .ok_or(SpaceError::NonPositiveDefiniteMetric)?;
        // frame = L^{-T} gives frame^T g frame = I.
        let frame = chol
            .l()
            .transpose()
            .try_inverse()
            .ok_or(SpaceError::NonPositiveDefiniteMetric)?;
        let jf = frame.transpose() * &g * &j * &frame;
        Ok(HermitianSpace { n, g, j, frame, jf })
    }

    /// Like [`HermitianSpace::new`] but builds a J-adapted frame
    /// (e_{2k+1} = J e_{2k}) by Gram-Schmidt. Intended for readable tests.
    pub fn new_adapted(n: usize, g: DMatrix<f64>, j: DMatrix<f64>) -> Result<Self, SpaceError> {
        let base = Self::new(n, g, j)?;
        let d = 2 * n;
        let gm = &base.g;
        let jm = &base.j;
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(d);
        for cand in 0..d {
            if cols.len() == d {
                break;
            }
            let mut v = DVector::zeros(d);
            v[cand] = 1.0;
            for u in &cols {
                let proj = (u.transpose() * gm * &v)[(0, 0)];
                v -= u * proj;
            }
            let norm2 = (v.transpose() * gm * &v)[(0, 0)];
            if norm2 < PIVOT_TOL {
                continue;
            }
            let e = v / norm2.sqrt();
            let je = jm * &e;
            cols.push(e);
            cols.push(je);
        }
        if cols.len() != d {
            return Err(SpaceError::DegeneratePlane(PIVOT_TOL));
        }
        let mut frame = DMatrix::zeros(d, d);
        for (c, v) in cols.iter().enumerate() {
            frame.set_column(c, v);
        }
        let jf = frame.transpose() * gm * jm * &frame;
        Ok(HermitianSpace {
            n,
            g: base.g,
            j: base.j,
            frame,
            jf,
        })
    }

    /// Replaces the adapted frame by `frame * o` for an orthogonal `o`.
    /// The result describes the same geometry in a rotated frame.
    pub fn rotate_frame(&self, o: &DMatrix<f64>) -> Self {
        let frame = &self.frame * o;
        let jf = o.transpose() * &self.jf * o;
        HermitianSpace {
            n: self.n,
            g: self.g.clone(),
            j: self.j.clone(),
            frame,
            jf,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension 2n.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn complex_structure(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// Columns form the g-orthonormal frame in the working basis.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// J in frame components: `(j_frame())[(a, b)]` is the a-component of
    /// J e_b. Skew-symmetric with square -I.
    pub fn j_frame(&self) -> &DMatrix<f64> {
        &self.jf
    }

    /// Applies J to a vector given in frame components.
    pub fn apply_j(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.jf * x
    }

    /// g(X, JY) for frame-component vectors: X^T Jf Y.
    pub fn g_x_jy(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.jf * y)[(0, 0)]
    }

    /// The fundamental 2-form omega(X, Y) = g(JX, Y) on frame components.
    pub fn omega(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        -self.g_x_jy(x, y)
    }

    /// Max violation over the three construction invariants.
    pub fn validation_residual(&self) -> f64 {
        let d = self.dim();
        let id = DMatrix::identity(d, d);
        let r1 = sup_norm(&(&self.j * &self.j + &id));
        let r2 = sup_norm(&(self.j.transpose() * &self.g * &self.j - &self.g));
        let r3 = sup_norm(&(self.frame.transpose() * &self.g * &self.frame - &id));
        r1.max(r2).max(r3)
    }
}

/// An oriented g-orthonormal pair spanning a 2-plane, stored in frame
/// components.
#[derive(Debug, Clone)]
pub struct TwoPlane {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

/// Deviation of a plane from the antiholomorphic and holomorphic types.
#[derive(Debug, Clone, Copy)]
pub struct PlaneDefects {
    /// |g(JX, Y)|; zero exactly for antiholomorphic planes.
    pub antiholomorphic: f64,
    /// 1 - |g(JX, Y)|; zero exactly for holomorphic planes.
    pub holomorphic: f64,
}

impl TwoPlane {
    /// Orthonormalizes the given frame-component pair.
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Result<Self, SpaceError> {
        let nx = x.norm();
        if nx < PIVOT_TOL {
            return Err(SpaceError::DegeneratePlane(PIVOT_TOL));
        }
        let x = x / nx;
        let mut y = y.clone();
        let p = x.dot(&y);
        y -= &x * p;
        let ny = y.norm();
        if ny < PIVOT_TOL {
            return Err(SpaceError::DegeneratePlane(PIVOT_TOL));
        }
        Ok(TwoPlane { x, y: y / ny })
    }

    /// The holomorphic plane span{X, JX}.
    pub fn holomorphic(space: &HermitianSpace, x: DVector<f64>) -> Result<Self, SpaceError> {
        let nx = x.norm();
        if nx < PIVOT_TOL {
            return Err(SpaceError::DegeneratePlane(PIVOT_TOL));
        }
        let x = x / nx;
        let y = space.apply_j(&x);
        Ok(TwoPlane { x, y })
    }

    /// Max violation of g-orthonormality (frame components).
    pub fn orthonormality_residual(&self) -> f64 {
        let rxx = (self.x.dot(&self.x) - 1.0).abs();
        let ryy = (self.y.dot(&self.y) - 1.0).abs();
        let rxy = self.x.dot(&self.y).abs();
        rxx.max(ryy).max(rxy)
    }
}

/// How far a plane is from being antiholomorphic / holomorphic.
pub fn plane_defects(space: &HermitianSpace, plane: &TwoPlane) -> PlaneDefects {
    let a = space.g_x_jy(&plane.y, &plane.x).abs();
    PlaneDefects {
        antiholomorphic: a,
        holomorphic: 1.0 - a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_space_has_identity_frame() {
        let s = HermitianSpace::standard(2);
        assert_eq!(s.dim(), 4);
        assert!(s.validation_residual() <= 1e-12);
        assert_eq!(s.frame()[(0, 0)], 1.0);
        assert_eq!(s.j_frame()[(1, 0)], 1.0);
        assert_eq!(s.j_frame()[(0, 1)], -1.0);
    }

    #[test]
    fn incompatible_j_is_rejected() {
        let d = 4;
        let g = DMatrix::identity(d, d);
        let mut j = standard_j(2);
        j[(0, 1)] = -0.5; // breaks J^2 = -I
        let err = HermitianSpace::new(2, g, j).unwrap_err();
        match err {
            SpaceError::IncompatibleJ { residual, .. } => assert!(residual > 0.1),
            other => panic!("expected IncompatibleJ, got {other:?}"),
        }
    }

    #[test]
    fn non_spd_metric_is_rejected() {
        let d = 4;
        let mut g = DMatrix::identity(d, d);
        // J-invariant but indefinite.
        g[(0, 0)] = -1.0;
        g[(1, 1)] = -1.0;
        let err = HermitianSpace::new(2, g, standard_j(2)).unwrap_err();
        assert!(matches!(err, SpaceError::NonPositiveDefiniteMetric));
    }

    #[test]
    fn plane_orthonormalization() {
        let x = DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        let p = TwoPlane::new(x, y).unwrap();
        assert!(p.orthonormality_residual() <= 1e-12);
    }

    #[test]
    fn defects_identify_plane_types() {
        let s = HermitianSpace::standard(2);
        // span{e0, e2}: antiholomorphic for the standard J.
        let p = TwoPlane::new(
            DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        let d = plane_defects(&s, &p);
        assert!(d.antiholomorphic <= 1e-14);

        let h = TwoPlane::holomorphic(&s, DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        let d = plane_defects(&s, &h);
        assert!((d.antiholomorphic - 1.0).abs() <= 1e-14);
        assert!(d.holomorphic <= 1e-14);
    }

    #[test]
    fn mixed_plane_defect() {
        let s = HermitianSpace::standard(2);
        // span{e0, (e2 + J e0)/sqrt(2)}: defect 1/sqrt(2).
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]);
        let p = TwoPlane::new(x, y).unwrap();
        let d = plane_defects(&s, &p);
        assert!((d.antiholomorphic - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
    }

    #[test]
    fn adapted_frame_is_j_adapted() {
        // J-invariant SPD metric: g0 + J^T g0 J.
        let n = 2;
        let d = 2 * n;
        let j = standard_j(n);
        let mut g0 = DMatrix::identity(d, d);
        g0[(0, 0)] = 2.0;
        g0[(0, 3)] = 0.3;
        g0[(3, 0)] = 0.3;
        let g = &g0 + j.transpose() * &g0 * &j;
        let s = HermitianSpace::new_adapted(n, g, j).unwrap();
        assert!(s.validation_residual() <= 1e-12);
        // e1 = J e0 in frame components.
        let jf = s.j_frame();
        assert!((jf[(1, 0)] - 1.0).abs() <= 1e-12);
    }
}
