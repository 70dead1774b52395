//! Seeded random generation: 2-plane samples, curvature-symmetric noise,
//! and random tensors projected onto linear constraint subspaces.
//!
//! Every function takes an explicit seed and is deterministic given it;
//! there is no global RNG state anywhere in the crate.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::space::{HermitianSpace, SpaceError, TwoPlane, PIVOT_TOL};
use crate::tensor::{Bilinear, Curv4, Rank3};

const MAX_REDRAWS: usize = 100;

/// Derives an independent sub-seed; used to split one run seed across
/// points, instances or operations without correlated streams.
pub fn split_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

/// A random unit vector (frame components).
pub fn random_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    for _ in 0..MAX_REDRAWS {
        let v = gaussian_vector(dim, rng);
        let n = v.norm();
        if n > PIVOT_TOL {
            return v / n;
        }
    }
    unreachable!("gaussian draws cannot all be degenerate");
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneKind {
    Antiholomorphic,
    Holomorphic,
    Generic,
}

/// Draws `count` planes of the requested kind; deterministic given seed.
/// Every returned plane has the requested defect at the 1e-12 level by
/// construction.
pub fn sample_planes(
    space: &HermitianSpace,
    kind: PlaneKind,
    count: usize,
    seed: u64,
) -> Result<Vec<TwoPlane>, SpaceError> {
    assert!(count >= 1, "count must be positive");
    let d = space.dim();
    if kind == PlaneKind::Antiholomorphic && d < 4 {
        return Err(SpaceError::DimensionTooSmall { need: 4, got: d });
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = random_unit_vector(d, &mut rng);
        let plane = match kind {
            PlaneKind::Holomorphic => TwoPlane::holomorphic(space, x)?,
            PlaneKind::Generic => {
                let y = gaussian_vector(d, &mut rng);
                match TwoPlane::new(x, y) {
                    Ok(p) => p,
                    Err(_) => continue, // re-draw on a degenerate pivot
                }
            }
            PlaneKind::Antiholomorphic => {
                let jx = space.apply_j(&x);
                let mut ok = None;
                for _ in 0..MAX_REDRAWS {
                    let mut y = gaussian_vector(d, &mut rng);
                    y -= &x * x.dot(&y);
                    y -= &jx * jx.dot(&y);
                    let n = y.norm();
                    if n > PIVOT_TOL {
                        ok = Some(TwoPlane { x: x.clone(), y: y / n });
                        break;
                    }
                }
                match ok {
                    Some(p) => p,
                    None => return Err(SpaceError::DegeneratePlane(PIVOT_TOL)),
                }
            }
        };
        out.push(plane);
    }
    Ok(out)
}

/// Random Bilinear satisfying Q(JX, JY) = Q(Y, X) exactly, built by the
/// closed-form projection of a gaussian matrix onto the admissible parts:
/// J-invariant symmetric plus J-anti-invariant skew.
pub fn random_constrained_q(space: &HermitianSpace, seed: u64) -> Bilinear {
    let d = space.dim();
    let mut rng = rng_from_seed(seed);
    let m = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    project_q(space, &Bilinear::from_matrix(m))
}

/// Projects an arbitrary Bilinear onto the Q-constraint subspace.
pub fn project_q(space: &HermitianSpace, q: &Bilinear) -> Bilinear {
    let jf = space.j_frame();
    let s = q.symmetric_part().m;
    let k = q.skew_part().m;
    let s_adm = (&s + jf.transpose() * &s * jf) * 0.5;
    let k_adm = (&k - jf.transpose() * &k * jf) * 0.5;
    Bilinear::from_matrix(s_adm + k_adm)
}

#[derive(Debug, Error)]
pub enum ConstraintError {
    #[error("constraint subspace is empty; constraint assembly is inconsistent")]
    EmptyConstraintSpace,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Null-space basis cache for the nabla-omega constraint system, keyed by
/// the frame components of J. The eigendecomposition is worth caching: the
/// suite draws many instances over the same space.
fn null_basis_cache() -> &'static Mutex<HashMap<u64, Arc<DMatrix<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<DMatrix<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn jf_cache_key(space: &HermitianSpace) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    space.dim().hash(&mut h);
    for v in space.j_frame().iter() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Orthonormal basis (columns) of the subspace of rank-3 arrays satisfying
/// all almost-Kaehler pointwise constraints on A(V; X, Y) = g((nabla_V J)X, Y):
/// skewness in (X, Y), J-anticommutation, the almost-Kaehler relation
/// A(X; Y, .) + A(JX; JY, .) = 0, the cyclic condition and the vanishing
/// frame trace.
fn constrained_a_basis(space: &HermitianSpace) -> Result<Arc<DMatrix<f64>>, ConstraintError> {
    let key = jf_cache_key(space);
    if let Some(b) = null_basis_cache().lock().unwrap().get(&key) {
        return Ok(b.clone());
    }

    let d = space.dim();
    let jf = space.j_frame();
    let unknowns = d * d * d;
    let idx = |v: usize, x: usize, y: usize| (v * d + x) * d + y;

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    // Skew in (x, y), including the diagonal.
    for v in 0..d {
        for x in 0..d {
            for y in x..d {
                rows.push(vec![(idx(v, x, y), 1.0), (idx(v, y, x), 1.0)]);
            }
        }
    }
    // A(V; JX, Y) = A(V; X, JY).
    for v in 0..d {
        for x in 0..d {
            for y in 0..d {
                let mut row = Vec::new();
                for a in 0..d {
                    let c = jf[(a, x)];
                    if c != 0.0 {
                        row.push((idx(v, a, y), c));
                    }
                }
                for b in 0..d {
                    let c = jf[(b, y)];
                    if c != 0.0 {
                        row.push((idx(v, x, b), -c));
                    }
                }
                rows.push(row);
            }
        }
    }
    // A(X; Y, Z) + A(JX; JY, Z) = 0.
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let mut row = vec![(idx(x, y, z), 1.0)];
                for a in 0..d {
                    let ca = jf[(a, x)];
                    if ca == 0.0 {
                        continue;
                    }
                    for b in 0..d {
                        let cb = jf[(b, y)];
                        if cb != 0.0 {
                            row.push((idx(a, b, z), ca * cb));
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    // Cyclic sum vanishes.
    for v in 0..d {
        for x in 0..d {
            for y in 0..d {
                rows.push(vec![
                    (idx(v, x, y), 1.0),
                    (idx(x, y, v), 1.0),
                    (idx(y, v, x), 1.0),
                ]);
            }
        }
    }
    // Frame trace vanishes.
    for y in 0..d {
        let row = (0..d).map(|i| (idx(i, i, y), 1.0)).collect();
        rows.push(row);
    }

    // Gram matrix of the constraint rows; its kernel is the feasible set.
    let mut gram = DMatrix::zeros(unknowns, unknowns);
    for row in &rows {
        for &(i, a) in row {
            for &(j, b) in row {
                gram[(i, j)] += a * b;
            }
        }
    }
    let eig: nalgebra::SymmetricEigen<f64, nalgebra::Dyn> = nalgebra::SymmetricEigen::new(gram);
    let max_ev = eig.eigenvalues.iter().fold(0.0f64, |m, v: &f64| m.max(v.abs()));
    let tol = max_ev.max(1.0) * 1e-10;
    let null_cols: Vec<usize> = (0..unknowns)
        .filter(|&i| eig.eigenvalues[i].abs() <= tol)
        .collect();
    if null_cols.is_empty() {
        return Err(ConstraintError::EmptyConstraintSpace);
    }
    let mut basis = DMatrix::zeros(unknowns, null_cols.len());
    for (c, &i) in null_cols.iter().enumerate() {
        basis.set_column(c, &eig.eigenvectors.column(i));
    }
    let basis = Arc::new(basis);
    null_basis_cache().lock().unwrap().insert(key, basis.clone());
    Ok(basis)
}

/// Random rank-3 array modeling g((nabla_V J)X, Y) at a point of an almost
/// Kaehler manifold: gaussian draw projected onto the constraint subspace.
/// Nonzero with probability 1; requires real dimension >= 4.
pub fn random_constrained_a(space: &HermitianSpace, seed: u64) -> Result<Rank3, ConstraintError> {
    let d = space.dim();
    if d < 4 {
        return Err(SpaceError::DimensionTooSmall { need: 4, got: d }.into());
    }
    let basis = constrained_a_basis(space)?;
    let mut rng = rng_from_seed(seed);
    let z = gaussian_vector(basis.ncols(), &mut rng);
    let flat = &*basis * z;
    let mut a = Rank3::zeros(d);
    a.data_mut().copy_from_slice(flat.as_slice());
    Ok(a)
}

/// Residuals of the five constraints defining the admissible A-space.
#[derive(Debug, Clone, Copy)]
pub struct AResiduals {
    pub skew: f64,
    pub j_anticommute: f64,
    pub almost_kahler: f64,
    pub cyclic: f64,
    pub trace: f64,
}

impl AResiduals {
    pub fn max(&self) -> f64 {
        self.skew
            .max(self.j_anticommute)
            .max(self.almost_kahler)
            .max(self.cyclic)
            .max(self.trace)
    }
}

/// Evaluates all five A-constraints on a rank-3 array.
pub fn constrained_a_residuals(space: &HermitianSpace, a: &Rank3) -> AResiduals {
    let d = space.dim();
    let jf = space.j_frame();
    let mut skew = 0.0f64;
    let mut antic = 0.0f64;
    let mut ak = 0.0f64;
    let mut cyc = 0.0f64;
    for v in 0..d {
        for x in 0..d {
            for y in 0..d {
                skew = skew.max((a.get(v, x, y) + a.get(v, y, x)).abs());
                let mut lhs = 0.0;
                let mut rhs = 0.0;
                let mut akv = a.get(v, x, y);
                for b in 0..d {
                    lhs += jf[(b, x)] * a.get(v, b, y);
                    rhs += jf[(b, y)] * a.get(v, x, b);
                }
                antic = antic.max((lhs - rhs).abs());
                for p in 0..d {
                    let cp = jf[(p, v)];
                    if cp == 0.0 {
                        continue;
                    }
                    for q in 0..d {
                        let cq = jf[(q, x)];
                        if cq != 0.0 {
                            akv += cp * cq * a.get(p, q, y);
                        }
                    }
                }
                ak = ak.max(akv.abs());
                cyc = cyc.max((a.get(v, x, y) + a.get(x, y, v) + a.get(y, v, x)).abs());
            }
        }
    }
    let mut trace = 0.0f64;
    for y in 0..d {
        let mut t = 0.0;
        for i in 0..d {
            t += a.get(i, i, y);
        }
        trace = trace.max(t.abs());
    }
    AResiduals {
        skew,
        j_anticommute: antic,
        almost_kahler: ak,
        cyclic: cyc,
        trace,
    }
}

/// Random rank-4 tensor with exact algebraic curvature symmetries
/// (antisymmetries, pair symmetry and the first Bianchi identity), built by
/// symmetrizing gaussian noise and removing the fully antisymmetric part.
pub fn random_curvature(dim: usize, seed: u64) -> Curv4 {
    let mut rng = rng_from_seed(seed);
    let raw = Curv4::from_fn(dim, |_, _, _, _| rng.sample::<f64, _>(StandardNormal));
    project_curvature(&raw)
}

/// Projects an arbitrary rank-4 tensor onto the curvature-symmetric class.
pub fn project_curvature(raw: &Curv4) -> Curv4 {
    let d = raw.dim();
    let t1 = Curv4::from_fn(d, |i, j, k, l| {
        0.25 * (raw.get(i, j, k, l) - raw.get(j, i, k, l) - raw.get(i, j, l, k)
            + raw.get(j, i, l, k))
    });
    let t2 = Curv4::from_fn(d, |i, j, k, l| 0.5 * (t1.get(i, j, k, l) + t1.get(k, l, i, j)));
    // First-Bianchi projection: subtract the fully antisymmetric part.
    let b = Curv4::from_fn(d, |i, j, k, l| {
        (t2.get(i, j, k, l) + t2.get(j, k, i, l) + t2.get(k, i, j, l)) / 3.0
    });
    t2.sub(&b)
}

/// A random space with non-Euclidean metric and conjugated complex
/// structure, exactly compatible by construction: J = S J0 S^-1 for a mild
/// random S, and g = g0 + J^T g0 J for a random SPD g0.
pub fn random_compatible_space(n: usize, seed: u64) -> HermitianSpace {
    let d = 2 * n;
    let mut rng = rng_from_seed(seed);
    let j0 = crate::space::standard_j(n);
    let s = DMatrix::identity(d, d)
        + DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)) * 0.2;
    let s_inv = s.clone().try_inverse().expect("perturbed identity is invertible");
    let j = &s * j0 * s_inv;
    let m = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)) * 0.2;
    let g0 = DMatrix::identity(d, d) + &m * m.transpose();
    let g = &g0 + j.transpose() * &g0 * &j;
    HermitianSpace::new(n, g, j).expect("construction is compatible")
}

/// Random symmetric, J-invariant, trace-free Bilinear; the perturbation
/// direction that breaks the Einstein property while preserving p.c.a.s.c.
pub fn random_traceless_j_invariant(space: &HermitianSpace, seed: u64) -> Bilinear {
    let d = space.dim();
    let jf = space.j_frame();
    let mut rng = rng_from_seed(seed);
    let m = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let s = (&m + m.transpose()) * 0.5;
    let mut s = (&s + jf.transpose() * &s * jf) * 0.5;
    let t = s.trace() / d as f64;
    for i in 0..d {
        s[(i, i)] -= t;
    }
    Bilinear::from_matrix(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{canonical, pcasc_estimate, sectional, Canonical};
    use crate::space::plane_defects;
    use crate::tensor::symmetry_defect;

    #[test]
    fn antiholomorphic_samples_have_zero_defect() {
        let s = HermitianSpace::standard(4);
        let planes = sample_planes(&s, PlaneKind::Antiholomorphic, 100, 7).unwrap();
        assert_eq!(planes.len(), 100);
        let max_defect = planes
            .iter()
            .map(|p| plane_defects(&s, p).antiholomorphic)
            .fold(0.0f64, f64::max);
        assert!(max_defect <= 1e-12);
        for p in &planes {
            assert!(p.orthonormality_residual() <= 1e-12);
        }
    }

    #[test]
    fn same_seed_same_planes() {
        let s = HermitianSpace::standard(2);
        let a = sample_planes(&s, PlaneKind::Generic, 10, 3).unwrap();
        let b = sample_planes(&s, PlaneKind::Generic, 10, 3).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.x, q.x);
            assert_eq!(p.y, q.y);
        }
    }

    #[test]
    fn samples_on_space_form_read_nu() {
        let s = HermitianSpace::standard(2);
        let nu = 1.5;
        let r = canonical(&s, Canonical::Pi1)
            .add(&canonical(&s, Canonical::Pi2))
            .scale(nu);
        let planes = sample_planes(&s, PlaneKind::Antiholomorphic, 50, 11).unwrap();
        for p in &planes {
            assert!((sectional(&r, p) - nu).abs() <= 1e-12);
        }
        let est = pcasc_estimate(&s, &r, &planes, 1e-10).unwrap();
        assert!((est.mean_nu - nu).abs() <= 1e-12);
        assert!(est.spread <= 1e-12);
    }

    #[test]
    fn antiholomorphic_needs_dim_four() {
        let s = HermitianSpace::standard(1);
        let err = sample_planes(&s, PlaneKind::Antiholomorphic, 1, 0).unwrap_err();
        assert!(matches!(err, SpaceError::DimensionTooSmall { .. }));
    }

    #[test]
    fn constrained_q_satisfies_2_2() {
        let s = HermitianSpace::standard(3);
        let q = random_constrained_q(&s, 42);
        assert!(crate::algebra::q_constraint_residual(&s, &q) <= 1e-12);
        assert!(q.sup_norm() > 1e-3);
        // g itself is admissible.
        let g = Bilinear::from_matrix(DMatrix::identity(6, 6));
        assert!(crate::algebra::q_constraint_residual(&s, &g) <= 1e-14);
    }

    #[test]
    fn constrained_a_satisfies_all_invariants() {
        let s = HermitianSpace::standard(2);
        let a = random_constrained_a(&s, 1).unwrap();
        assert!(a.sup_norm() > 1e-6, "projection should be nonzero a.s.");
        let res = constrained_a_residuals(&s, &a);
        assert!(res.max() <= 1e-10, "residuals {res:?}");
    }

    #[test]
    fn random_curvature_has_symmetries() {
        let r = random_curvature(6, 9);
        let d = symmetry_defect(&r);
        assert!(d.max() <= 1e-12, "defect {d:?}");
        assert!(r.sup_norm() > 1e-3);
    }
}
