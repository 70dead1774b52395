//! Coordinate charts: smooth point-functions for (g, J) on a box domain.
//!
//! Builtin charts cover the model geometries used by the identity suite:
//! flat space, Fubini-Study, complex hyperbolic (all Kaehler), the
//! Kodaira-Thurston almost Kaehler non-Kaehler nilmanifold chart, and
//! block-diagonal products. User charts load from JSON with metric and J
//! entries given as expression strings (see [`crate::expr`]).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::{self, Expr};

type MatrixFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A coordinate-domain description of (g, J) as smooth point-functions.
#[derive(Clone)]
pub struct Chart {
    name: String,
    dim: usize,
    domain: Vec<(f64, f64)>,
    params: BTreeMap<String, f64>,
    metric_fn: MatrixFn,
    j_fn: MatrixFn,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("params", &self.params)
            .finish()
    }
}

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("unknown chart '{0}'")]
    UnknownChart(String),
    #[error("bad chart parameters: {0}")]
    BadParams(String),
    #[error("chart json: {0}")]
    Json(String),
    #[error("chart expression {entry}: {source}")]
    Expr {
        entry: String,
        source: expr::ParseError,
    },
    #[error("chart self-check failed: {0}")]
    SelfCheck(String),
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        domain: Vec<(f64, f64)>,
        params: BTreeMap<String, f64>,
        metric_fn: MatrixFn,
        j_fn: MatrixFn,
    ) -> Self {
        assert_eq!(domain.len(), dim);
        Chart {
            name: name.into(),
            dim,
            domain,
            params,
            metric_fn,
            j_fn,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.dim / 2
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn metric_at(&self, x: &[f64]) -> DMatrix<f64> {
        (self.metric_fn)(x)
    }

    pub fn j_at(&self, x: &[f64]) -> DMatrix<f64> {
        (self.j_fn)(x)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter()
                .zip(&self.domain)
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// True when `x` keeps at least `margin` from every domain face.
    pub fn has_margin(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.dim
            && x.iter()
                .zip(&self.domain)
                .all(|(v, (lo, hi))| *v >= lo + margin && *v <= hi - margin)
    }

    /// The domain center.
    pub fn center(&self) -> Vec<f64> {
        self.domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Block-diagonal product chart; almost Kaehler factors give an almost
    /// Kaehler product.
    pub fn product(a: &Chart, b: &Chart) -> Chart {
        let da = a.dim;
        let db = b.dim;
        let dim = da + db;
        let mut domain = a.domain.clone();
        domain.extend_from_slice(&b.domain);
        let mut params = BTreeMap::new();
        for (k, v) in &a.params {
            params.insert(format!("left.{k}"), *v);
        }
        for (k, v) in &b.params {
            params.insert(format!("right.{k}"), *v);
        }
        let (fa, fb) = (a.metric_fn.clone(), b.metric_fn.clone());
        let metric_fn: MatrixFn = Arc::new(move |x: &[f64]| {
            let ga = fa(&x[..da]);
            let gb = fb(&x[da..]);
            block_diag(&ga, &gb)
        });
        let (ja, jb) = (a.j_fn.clone(), b.j_fn.clone());
        let j_fn: MatrixFn = Arc::new(move |x: &[f64]| {
            let ma = ja(&x[..da]);
            let mb = jb(&x[da..]);
            block_diag(&ma, &mb)
        });
        Chart {
            name: format!("product({},{})", a.name, b.name),
            dim,
            domain,
            params,
            metric_fn,
            j_fn,
        }
    }
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (da, db) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(da + db, da + db);
    m.view_mut((0, 0), (da, da)).copy_from(a);
    m.view_mut((da, da), (db, db)).copy_from(b);
    m
}

/// Builtin chart names with one-line parameter docs, for `list` output.
pub fn builtin_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("flat", "Euclidean metric, constant J0; params: none (any n)"),
        (
            "fubini_study",
            "affine-chart Fubini-Study, holomorphic sectional curvature c (default 4); params: c > 0",
        ),
        (
            "complex_hyperbolic",
            "ball-model dual of Fubini-Study, holomorphic sectional curvature -c; params: c > 0",
        ),
        (
            "kodaira_thurston",
            "left-invariant almost Kaehler non-Kaehler structure, fixed 2n = 4; params: none",
        ),
        (
            "product",
            "block-diagonal product; chart spec syntax: product(<spec>,<spec>)",
        ),
    ]
}

/// Builds a builtin chart by name. `product` is handled by
/// [`Chart::product`] (the CLI spec syntax `product(a,b)` routes there).
pub fn builtin_chart(
    name: &str,
    n: usize,
    params: &BTreeMap<String, f64>,
) -> Result<Chart, ChartError> {
    if n < 1 {
        return Err(ChartError::BadParams("n must be >= 1".into()));
    }
    let d = 2 * n;
    match name {
        "flat" => {
            let j0 = crate::space::standard_j(n);
            Ok(Chart::new(
                "flat",
                d,
                vec![(-1.0, 1.0); d],
                BTreeMap::new(),
                Arc::new(move |_x: &[f64]| DMatrix::identity(2 * n, 2 * n)),
                Arc::new(move |_x: &[f64]| j0.clone()),
            ))
        }
        "fubini_study" => {
            let c = *params.get("c").unwrap_or(&4.0);
            if c <= 0.0 {
                return Err(ChartError::BadParams("fubini_study needs c > 0".into()));
            }
            let j0 = crate::space::standard_j(n);
            let scale = 4.0 / c;
            let metric_j0 = j0.clone();
            let mut p = BTreeMap::new();
            p.insert("c".to_string(), c);
            Ok(Chart::new(
                "fubini_study",
                d,
                vec![(-0.8, 0.8); d],
                p,
                Arc::new(move |x: &[f64]| {
                    let v = nalgebra::DVector::from_column_slice(x);
                    let jv = &metric_j0 * &v;
                    let r2 = v.norm_squared();
                    let s = 1.0 + r2;
                    let m = DMatrix::identity(x.len(), x.len()) * s
                        - &v * v.transpose()
                        - &jv * jv.transpose();
                    m * (scale / (s * s))
                }),
                Arc::new(move |_x: &[f64]| j0.clone()),
            ))
        }
        "complex_hyperbolic" => {
            let c = *params.get("c").unwrap_or(&4.0);
            if c <= 0.0 {
                return Err(ChartError::BadParams(
                    "complex_hyperbolic needs c > 0 (holomorphic curvature is -c)".into(),
                ));
            }
            let j0 = crate::space::standard_j(n);
            let scale = 4.0 / c;
            let metric_j0 = j0.clone();
            let half = 0.5 / (d as f64).sqrt();
            let mut p = BTreeMap::new();
            p.insert("c".to_string(), c);
            Ok(Chart::new(
                "complex_hyperbolic",
                d,
                vec![(-half, half); d],
                p,
                Arc::new(move |x: &[f64]| {
                    let v = nalgebra::DVector::from_column_slice(x);
                    let jv = &metric_j0 * &v;
                    let r2 = v.norm_squared();
                    let s = 1.0 - r2;
                    let m = DMatrix::identity(x.len(), x.len()) * s
                        + &v * v.transpose()
                        + &jv * jv.transpose();
                    m * (scale / (s * s))
                }),
                Arc::new(move |_x: &[f64]| j0.clone()),
            ))
        }
        "kodaira_thurston" => {
            if n != 2 {
                return Err(ChartError::BadParams(
                    "kodaira_thurston is fixed at 2n = 4".into(),
                ));
            }
            let chart = kodaira_thurston();
            // The literature has several conventions for this structure, so
            // the closedness of omega and the non-Kaehler property are
            // measured, not assumed.
            let j = crate::jet::jet(&chart, &[0.3, -0.2, 0.1, 0.4], 1e-3)
                .map_err(|e| ChartError::SelfCheck(e.to_string()))?;
            let ak = crate::jet::almost_kahler_residuals(&j);
            if ak.r_1_8 > 1e-8 {
                return Err(ChartError::SelfCheck(format!(
                    "fundamental 2-form is not closed: residual {:.3e}",
                    ak.r_1_8
                )));
            }
            let njn = crate::jet::nabla_j_norm(&j);
            if njn < 0.1 {
                return Err(ChartError::SelfCheck(format!(
                    "structure looks Kaehler: |nabla J| = {njn:.3e}"
                )));
            }
            Ok(chart)
        }
        "product" => Err(ChartError::BadParams(
            "product takes two sub-chart specs: product(<spec>,<spec>)".into(),
        )),
        other => Err(ChartError::UnknownChart(other.to_string())),
    }
}

/// Left-invariant coframe chart on the Heisenberg-type group times a line:
/// e1 = dx1, e2 = dx2, e3 = dx3 - x1 dx2, e4 = dx4, metric sum (e^i)^2,
/// J E1 = E3, J E2 = E4 on the dual frame. The fundamental form
/// e1^e3 + e2^e4 is closed while nabla J != 0; the jet-level self-checks
/// for both facts live in the test suite.
fn kodaira_thurston() -> Chart {
    let coframe = |x: &[f64]| {
        let mut th = DMatrix::identity(4, 4);
        th[(2, 1)] = -x[0];
        th
    };
    // Frame map: E1 -> E3, E2 -> E4, E3 -> -E1, E4 -> -E2.
    let mut jhat = DMatrix::zeros(4, 4);
    jhat[(2, 0)] = 1.0;
    jhat[(3, 1)] = 1.0;
    jhat[(0, 2)] = -1.0;
    jhat[(1, 3)] = -1.0;
    Chart::new(
        "kodaira_thurston",
        4,
        vec![(-1.0, 1.0); 4],
        BTreeMap::new(),
        Arc::new(move |x: &[f64]| {
            let th = coframe(x);
            th.transpose() * th
        }),
        Arc::new(move |x: &[f64]| {
            let th = coframe(x);
            let thi = th.clone().try_inverse().expect("coframe is unimodular");
            thi * &jhat * th
        }),
    )
}

// ---------------------------------------------------------------------------
// JSON user charts
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct ChartJson {
    name: String,
    dim: usize,
    domain: Vec<[f64; 2]>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    metric: Vec<Vec<String>>,
    j: Vec<Vec<String>>,
}

/// Loads a chart from its JSON description. Every metric and J entry is an
/// expression in x1..x<dim> and the params; parse errors report the entry
/// and position.
pub fn chart_from_json(text: &str) -> Result<Chart, ChartError> {
    let spec: ChartJson = serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
    let d = spec.dim;
    if d == 0 || d % 2 != 0 {
        return Err(ChartError::BadParams(format!(
            "dim must be a positive even number, got {d}"
        )));
    }
    if spec.domain.len() != d {
        return Err(ChartError::BadParams(format!(
            "domain must list {d} axis ranges"
        )));
    }
    let parse_grid = |rows: &[Vec<String>], what: &str| -> Result<Vec<Vec<Expr>>, ChartError> {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(ChartError::BadParams(format!("{what} must be {d}x{d}")));
        }
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, src)| {
                        expr::parse(src).map_err(|source| ChartError::Expr {
                            entry: format!("{what}[{i}][{j}]"),
                            source,
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let metric = parse_grid(&spec.metric, "metric")?;
    let jmat = parse_grid(&spec.j, "j")?;

    let eval_grid = move |grid: &[Vec<Expr>], x: &[f64], params: &BTreeMap<String, f64>| {
        DMatrix::from_fn(x.len(), x.len(), |i, j| {
            grid[i][j].eval(x, params).unwrap_or(f64::NAN)
        })
    };

    let params = spec.params.clone();
    let domain: Vec<(f64, f64)> = spec.domain.iter().map(|[lo, hi]| (*lo, *hi)).collect();

    // Surface unknown-parameter errors at load time.
    let center: Vec<f64> = domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    for (grid, what) in [(&metric, "metric"), (&jmat, "j")] {
        for (i, row) in grid.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                e.eval(&center, &params).map_err(|err| ChartError::Json(
                    format!("{what}[{i}][{j}]: {err}"),
                ))?;
            }
        }
    }

    let p1 = params.clone();
    let m_grid = metric;
    let metric_fn: MatrixFn = Arc::new(move |x: &[f64]| eval_grid(&m_grid, x, &p1));
    let p2 = params.clone();
    let j_grid = jmat;
    let eval_grid2 = move |grid: &[Vec<Expr>], x: &[f64]| {
        DMatrix::from_fn(x.len(), x.len(), |i, j| {
            grid[i][j].eval(x, &p2).unwrap_or(f64::NAN)
        })
    };
    let j_fn: MatrixFn = Arc::new(move |x: &[f64]| eval_grid2(&j_grid, x));

    Ok(Chart::new(spec.name, d, domain, params, metric_fn, j_fn))
}

// ---------------------------------------------------------------------------
// Chart spec strings: name, name(k=v,...), product(<spec>,<spec>)
// ---------------------------------------------------------------------------

/// Parses a chart spec string such as `flat(n=2)`,
/// `fubini_study(n=4,c=4)` or `product(kodaira_thurston,flat(n=2))`.
/// A bare name uses n from `default_n` and default params.
pub fn parse_spec(spec: &str, default_n: usize) -> Result<Chart, ChartError> {
    let spec = spec.trim();
    let (name, args) = match spec.find('(') {
        None => (spec, None),
        Some(open) => {
            if !spec.ends_with(')') {
                return Err(ChartError::BadParams(format!(
                    "unbalanced parentheses in chart spec '{spec}'"
                )));
            }
            (&spec[..open], Some(&spec[open + 1..spec.len() - 1]))
        }
    };
    if name == "product" {
        let inner = args.ok_or_else(|| {
            ChartError::BadParams("product needs two sub-chart specs".into())
        })?;
        let (a, b) = split_top_level(inner).ok_or_else(|| {
            ChartError::BadParams("product needs exactly two comma-separated sub-specs".into())
        })?;
        let ca = parse_spec(a, default_n)?;
        let cb = parse_spec(b, default_n)?;
        return Ok(Chart::product(&ca, &cb));
    }
    let mut n = default_n;
    let mut params = BTreeMap::new();
    if let Some(args) = args {
        for kv in args.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ChartError::BadParams(format!("expected k=v, got '{kv}'")))?;
            let k = k.trim();
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| ChartError::BadParams(format!("bad value in '{kv}'")))?;
            if k == "n" {
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(ChartError::BadParams("n must be a positive integer".into()));
                }
                n = v as usize;
            } else {
                params.insert(k.to_string(), v);
            }
        }
    }
    builtin_chart(name, n, &params)
}

/// Splits `a,b` at the single top-level comma, honoring nested parens.
fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => {
                let (a, b) = s.split_at(i);
                let b = &b[1..];
                if b.contains(',') && depth == 0 && split_top_level(b).is_some() {
                    return None; // more than two sub-specs
                }
                return Some((a, b));
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_chart_is_constant() {
        let c = builtin_chart("flat", 2, &BTreeMap::new()).unwrap();
        let g = c.metric_at(&[0.1, 0.2, -0.3, 0.0]);
        assert_eq!(g, DMatrix::identity(4, 4));
    }

    #[test]
    fn unknown_chart_is_rejected() {
        let err = builtin_chart("torus", 2, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, ChartError::UnknownChart(_)));
    }

    #[test]
    fn fubini_study_metric_at_origin_scales_with_c() {
        let mut p = BTreeMap::new();
        p.insert("c".to_string(), 1.0);
        let c = builtin_chart("fubini_study", 2, &p).unwrap();
        let g = c.metric_at(&[0.0; 4]);
        assert!((g[(0, 0)] - 4.0).abs() <= 1e-14);
    }

    #[test]
    fn fubini_study_compatibility_off_origin() {
        let c = builtin_chart("fubini_study", 2, &BTreeMap::new()).unwrap();
        let x = [0.2, -0.1, 0.3, 0.05];
        let g = c.metric_at(&x);
        let j = c.j_at(&x);
        let resid = (j.transpose() * &g * &j - &g).amax();
        assert!(resid <= 1e-12);
    }

    #[test]
    fn kodaira_thurston_compatibility() {
        let c = builtin_chart("kodaira_thurston", 2, &BTreeMap::new()).unwrap();
        let x = [0.4, -0.2, 0.1, 0.3];
        let g = c.metric_at(&x);
        let j = c.j_at(&x);
        assert!((&j * &j + DMatrix::identity(4, 4)).amax() <= 1e-12);
        assert!((j.transpose() * &g * &j - &g).amax() <= 1e-12);
    }

    #[test]
    fn product_blocks() {
        let a = builtin_chart("kodaira_thurston", 2, &BTreeMap::new()).unwrap();
        let b = builtin_chart("flat", 2, &BTreeMap::new()).unwrap();
        let p = Chart::product(&a, &b);
        assert_eq!(p.dim(), 8);
        let x = [0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let g = p.metric_at(&x);
        assert_eq!(g[(5, 5)], 1.0);
        assert_eq!(g[(0, 5)], 0.0);
    }

    #[test]
    fn spec_strings_parse() {
        let c = parse_spec("fubini_study(n=4,c=4)", 2).unwrap();
        assert_eq!(c.dim(), 8);
        let c = parse_spec("product(kodaira_thurston,flat(n=2))", 2).unwrap();
        assert_eq!(c.dim(), 8);
        assert!(parse_spec("product(flat)", 2).is_err());
        assert!(parse_spec("nope(n=2)", 2).is_err());
    }

    #[test]
    fn json_chart_round_trip() {
        let text = r#"{
            "name": "conformal_flat",
            "dim": 2,
            "domain": [[-1, 1], [-1, 1]],
            "params": {"a": 0.5},
            "metric": [["exp(a * x1)", "0"], ["0", "exp(a * x1)"]],
            "j": [["0", "-1"], ["1", "0"]]
        }"#;
        let c = chart_from_json(text).unwrap();
        assert_eq!(c.dim(), 2);
        let g = c.metric_at(&[1.0, 0.0]);
        assert!((g[(0, 0)] - (0.5f64).exp()).abs() <= 1e-14);
    }

    #[test]
    fn json_chart_parse_error_reports_entry() {
        let text = r#"{
            "name": "broken",
            "dim": 2,
            "domain": [[-1, 1], [-1, 1]],
            "metric": [["1 +", "0"], ["0", "1"]],
            "j": [["0", "-1"], ["1", "0"]]
        }"#;
        let err = chart_from_json(text).unwrap_err();
        match err {
            ChartError::Expr { entry, source } => {
                assert_eq!(entry, "metric[0][0]");
                assert_eq!(source.line, 1);
            }
            other => panic!("expected Expr error, got {other:?}"),
        }
    }
}
