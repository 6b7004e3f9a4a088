//! Dense linear-algebra helpers shared by the floating backends.
//!
//! Subspaces are represented by matrices with orthonormal columns. Rank
//! decisions use singular values relative to the largest one.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

fn singular_cut(sv: &DVector<f64>, rel_tol: f64) -> f64 {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        f64::INFINITY
    } else {
        rel_tol * smax
    }
}

/// Thin singular value decomposition `m = U diag(s) V^*`, singular values
/// in nonincreasing order.
pub struct Svd<T: nalgebra::Scalar> {
    pub u: DMatrix<T>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<T>,
}

/// Scalars with a reliable SVD backend.
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    fn thin_svd(m: &DMatrix<Self>) -> Svd<Self>;
}

macro_rules! faer_svd {
    ($t:ty, $re:expr) => {
        impl Scalar for $t {
            fn thin_svd(m: &DMatrix<$t>) -> Svd<$t> {
                let (r, c) = m.shape();
                let k = r.min(c);
                if k == 0 {
                    return Svd { u: DMatrix::zeros(r, 0), singular_values: DVector::zeros(0), v_t: DMatrix::zeros(0, c) };
                }
                let f = faer::Mat::<$t>::from_fn(r, c, |i, j| m[(i, j)]);
                let d = f.thin_svd().expect("svd did not converge");
                let (u, v, sv) = (d.U(), d.V(), d.S().column_vector());
                Svd {
                    u: DMatrix::from_fn(r, k, |i, j| u[(i, j)]),
                    singular_values: DVector::from_fn(k, |i, _| $re(sv[i])),
                    v_t: DMatrix::from_fn(k, c, |i, j| ComplexField::conjugate(v[(j, i)])),
                }
            }
        }
    };
}

faer_svd!(f64, |x: f64| x);
faer_svd!(Complex64, |x: Complex64| x.re);

/// Largest entry of `m - U diag(s) V^*`, relative to the largest singular
/// value.
fn reconstruction_error<T: Scalar>(m: &DMatrix<T>, d: &Svd<T>) -> f64 {
    let smax = d.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return m.camax();
    }
    let s = DMatrix::from_diagonal(&d.singular_values.map(T::from_real));
    (&d.u * s * &d.v_t - m).camax() / smax
}

/// Accepted reconstruction error of a thin SVD.
const SVD_CHECK: f64 = 1e-12;

fn nalgebra_svd<T: Scalar>(m: &DMatrix<T>) -> Option<Svd<T>> {
    let d = m.clone().try_svd(true, true, f64::EPSILON, 0)?;
    let mut order: Vec<usize> = (0..d.singular_values.len()).collect();
    order.sort_by(|&a, &b| d.singular_values[b].total_cmp(&d.singular_values[a]));
    let (u, v_t) = (d.u?, d.v_t?);
    Some(Svd {
        u: DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]),
        singular_values: DVector::from_fn(order.len(), |i, _| d.singular_values[order[i]]),
        v_t: DMatrix::from_fn(order.len(), v_t.ncols(), |i, j| v_t[(order[i], j)]),
    })
}

/// `m^* = V s U^*`, so the factors swap.
fn adjoint_svd<T: Scalar>(d: Svd<T>) -> Svd<T> {
    Svd { u: d.v_t.adjoint(), singular_values: d.singular_values, v_t: d.u.adjoint() }
}

/// Thin SVD, verified by reconstruction. The faer kernel can lose accuracy
/// on matrices whose singular values come in large exactly degenerate
/// clusters (stacked orthonormal bases); such inputs are retried with
/// nalgebra, on the tall orientation first. The most accurate candidate is
/// returned.
pub fn svd<T: Scalar>(m: &DMatrix<T>) -> Svd<T> {
    let d = T::thin_svd(m);
    let e = reconstruction_error(m, &d);
    if e <= SVD_CHECK {
        return d;
    }
    let mut best = (e, d);
    let wide = m.nrows() < m.ncols();
    for transpose in [wide, !wide] {
        let cand = if transpose { nalgebra_svd(&m.adjoint()).map(adjoint_svd) } else { nalgebra_svd(m) };
        if let Some(c) = cand {
            let e = reconstruction_error(m, &c);
            if e <= SVD_CHECK {
                return c;
            }
            if e < best.0 {
                best = (e, c);
            }
        }
    }
    best.1
}

/// Orthonormal basis of the column space of `m`.
pub fn orth<T>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T>
where
    T: Scalar,
{
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = svd(m);
    let u = svd.u;
    let cut = singular_cut(&svd.singular_values, rel_tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    DMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])].clone())
}

/// Numerical rank of `m`.
pub fn rank<T>(m: &DMatrix<T>, rel_tol: f64) -> usize
where
    T: Scalar,
{
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let sv = svd(m).singular_values;
    let cut = singular_cut(&sv, rel_tol);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis of the null space of `m`, with the threshold taken
/// relative to the largest singular value of `m`.
pub fn null_space<T>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T>
where
    T: Scalar,
{
    null_space_abs(m, None, rel_tol)
}

/// Null space with an optional absolute scale: singular values below
/// `rel_tol * scale` count as zero. Without a scale the largest singular
/// value is used.
pub fn null_space_abs<T>(m: &DMatrix<T>, scale: Option<f64>, rel_tol: f64) -> DMatrix<T>
where
    T: Scalar,
{
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return DMatrix::identity(cols, cols);
    }
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(&padded);
    let vt = svd.v_t;
    let cut = match scale {
        Some(s) => rel_tol * s,
        None => singular_cut(&svd.singular_values, rel_tol),
    };
    let cut = if cut.is_finite() { cut } else { f64::INFINITY };
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| !(svd.singular_values[i] > cut))
        .collect();
    DMatrix::from_fn(cols, keep.len(), |i, j| vt[(keep[j], i)].clone().conjugate())
}

/// Largest singular value, zero for empty matrices.
pub fn norm2<T>(m: &DMatrix<T>) -> f64
where
    T: Scalar,
{
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    svd(m).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Columns of `[a | b]`.
pub fn hcat<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar,
{
    assert_eq!(a.nrows(), b.nrows(), "row mismatch in hcat");
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Rows of `[a ; b]`.
pub fn vcat<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar,
{
    assert_eq!(a.ncols(), b.ncols(), "column mismatch in vcat");
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Span of the union of column spaces.
pub fn span_union<T>(parts: &[&DMatrix<T>], rel_tol: f64) -> DMatrix<T>
where
    T: Scalar,
{
    let n = parts.first().map(|p| p.nrows()).unwrap_or(0);
    let mut acc = DMatrix::zeros(n, 0);
    for p in parts {
        acc = hcat(&acc, p);
    }
    orth(&acc, rel_tol)
}

/// Intersection of the column spaces of two orthonormal bases. `rel_tol`
/// bounds the sine of the principal angles treated as zero.
pub fn span_intersect<T>(a: &DMatrix<T>, b: &DMatrix<T>, rel_tol: f64) -> DMatrix<T>
where
    T: Scalar,
{
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let stacked = hcat(a, &(-b.clone()));
    // both blocks are orthonormal, so singular values lie in [0, sqrt 2] and
    // the threshold is used as an absolute cut
    let ker = null_space_abs(&stacked, Some(1.0), rel_tol);
    let coeffs = ker.rows(0, a.ncols()).into_owned();
    orth(&(a * coeffs), rel_tol)
}

/// Orthogonal projection residual of the columns of `v` against the
/// orthonormal basis `q`; returns the largest column residual norm.
pub fn max_residual<T>(q: &DMatrix<T>, v: &DMatrix<T>) -> f64
where
    T: Scalar,
{
    let r = residual(q, v);
    (0..r.ncols()).map(|j| r.column(j).norm()).fold(0.0, f64::max)
}

/// `v - q q^H v`.
pub fn residual<T>(q: &DMatrix<T>, v: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar,
{
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.adjoint() * v)
}

/// Whether every column of the orthonormal basis `a` lies in span `b`.
pub fn contained_in<T>(a: &DMatrix<T>, b: &DMatrix<T>, tol: f64) -> bool
where
    T: Scalar,
{
    a.ncols() == 0 || max_residual(b, a) <= tol
}

/// Embed a real matrix into the complex one with zero imaginary parts.
pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Row-major JSON representation with complex entries as `[re, im]`.
pub fn cmat_to_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..m.nrows())
        .map(|i| {
            serde_json::Value::Array(
                (0..m.ncols())
                    .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                    .collect(),
            )
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// Parse the representation produced by [`cmat_to_json`]; plain numbers are
/// accepted as real entries.
pub fn cmat_from_json(v: &serde_json::Value) -> Result<CMat, String> {
    let rows = v.as_array().ok_or("matrix must be an array of rows")?;
    let nrows = rows.len();
    let ncols = match rows.first() {
        Some(r) => r.as_array().ok_or("row must be an array")?.len(),
        None => 0,
    };
    let mut m = CMat::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or("row must be an array")?;
        if row.len() != ncols {
            return Err(format!("row {i} has length {} (expected {ncols})", row.len()));
        }
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = match e {
                serde_json::Value::Number(x) => Complex64::new(x.as_f64().unwrap_or(0.0), 0.0),
                serde_json::Value::Array(p) if p.len() == 2 => Complex64::new(
                    p[0].as_f64().ok_or("bad real part")?,
                    p[1].as_f64().ok_or("bad imaginary part")?,
                ),
                _ => return Err(format!("bad entry at ({i},{j})")),
            };
        }
    }
    Ok(m)
}
