//! Dense complex tensors, mode unfoldings and support subspaces.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use num_complex::Complex64;

pub const MAX_DIM: usize = 6;
pub const MAX_ORDER: usize = 5;

/// Row-major dense tensor. The last index varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    pub dims: Vec<usize>,
    pub data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() > MAX_ORDER || dims.iter().any(|&d| d > MAX_DIM) {
            return Err(Error::TooLarge(format!("tensor dims {dims:?}")));
        }
        Ok(DenseTensor { dims: dims.to_vec(), data: vec![Complex64::new(0.0, 0.0); dims.iter().product()] })
    }

    pub fn from_data(dims: &[usize], data: Vec<Complex64>) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        if data.len() != t.data.len() {
            return Err(Error::Shape(format!("{} entries for dims {dims:?}", data.len())));
        }
        t.data = data;
        Ok(t)
    }

    /// `v1 ⊗ v2 ⊗ ...`
    pub fn outer(vectors: &[&[Complex64]]) -> Result<Self> {
        let dims: Vec<usize> = vectors.iter().map(|v| v.len()).collect();
        let mut t = Self::zeros(&dims)?;
        for (flat, x) in t.data.iter_mut().enumerate() {
            let idx = unravel(flat, &dims);
            *x = idx.iter().zip(vectors).map(|(&i, v)| v[i]).product();
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.dims, other.dims);
        DenseTensor { dims: self.dims.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: Complex64) -> DenseTensor {
        DenseTensor { dims: self.dims.clone(), data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Mode-k unfolding: rows indexed by mode k, columns by the others in
    /// order.
    pub fn unfold(&self, k: usize) -> Result<CMat> {
        if k >= self.order() {
            return Err(Error::OutOfRange(format!("mode {k} of order-{} tensor", self.order())));
        }
        let rows = self.dims[k];
        let cols = if rows == 0 { 0 } else { self.data.len() / rows.max(1) };
        let mut m = CMat::zeros(rows, cols);
        for (flat, z) in self.data.iter().enumerate() {
            let idx = unravel(flat, &self.dims);
            let mut col = 0;
            for (a, &i) in idx.iter().enumerate() {
                if a != k {
                    col = col * self.dims[a] + i;
                }
            }
            m[(idx[k], col)] = *z;
        }
        Ok(m)
    }

    /// Apply `m` (r × d_k) along mode k.
    pub fn mode_product(&self, k: usize, m: &CMat) -> Result<DenseTensor> {
        if k >= self.order() {
            return Err(Error::OutOfRange(format!("mode {k} of order-{} tensor", self.order())));
        }
        if m.ncols() != self.dims[k] {
            return Err(Error::Shape(format!("matrix {:?} against mode size {}", m.shape(), self.dims[k])));
        }
        let mut dims = self.dims.clone();
        dims[k] = m.nrows();
        let mut out = DenseTensor { dims: dims.clone(), data: vec![Complex64::new(0.0, 0.0); dims.iter().product()] };
        for (flat, z) in self.data.iter().enumerate() {
            if *z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut idx = unravel(flat, &self.dims);
            let src = idx[k];
            for r in 0..m.nrows() {
                idx[k] = r;
                let o = ravel(&idx, &dims);
                out.data[o] += m[(r, src)] * z;
            }
        }
        Ok(out)
    }

    /// Average over all index permutations (square tensors only).
    pub fn symmetrize(&self) -> DenseTensor {
        let n = self.order();
        let perms = permutations(n);
        let mut out = DenseTensor { dims: self.dims.clone(), data: vec![Complex64::new(0.0, 0.0); self.data.len()] };
        let w = 1.0 / perms.len() as f64;
        for (flat, x) in out.data.iter_mut().enumerate() {
            let idx = unravel(flat, &self.dims);
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &perms {
                let pidx: Vec<usize> = p.iter().map(|&a| idx[a]).collect();
                acc += self.data[ravel(&pidx, &self.dims)];
            }
            *x = acc * w;
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let s = self.symmetrize();
        s.data.iter().zip(&self.data).all(|(a, b)| (a - b).norm() <= tol * (1.0 + self.norm()))
    }

    /// Nested JSON arrays, complex entries as `[re, im]`.
    pub fn to_json(&self) -> serde_json::Value {
        fn rec(t: &DenseTensor, prefix: &mut Vec<usize>) -> serde_json::Value {
            if prefix.len() == t.order() {
                let z = t.data[ravel(prefix, &t.dims)];
                return serde_json::json!([z.re, z.im]);
            }
            let d = t.dims[prefix.len()];
            let mut items = Vec::with_capacity(d);
            for i in 0..d {
                prefix.push(i);
                items.push(rec(t, prefix));
                prefix.pop();
            }
            serde_json::Value::Array(items)
        }
        if self.order() == 0 {
            let z = self.data[0];
            return serde_json::json!([z.re, z.im]);
        }
        rec(self, &mut Vec::new())
    }
}

pub fn unravel(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for a in (0..dims.len()).rev() {
        idx[a] = flat % dims[a];
        flat /= dims[a];
    }
    idx
}

pub fn ravel(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Orthonormal basis of the column space of the mode-k unfolding.
pub fn support_subspace(t: &DenseTensor, k: usize, tol: f64) -> Result<CMat> {
    Ok(linalg::orth(&t.unfold(k)?, tol))
}

/// Project every mode onto its support subspace and compare.
pub fn envelope_membership(t: &DenseTensor, tol: f64) -> Result<bool> {
    let mut p = t.clone();
    for k in 0..t.order() {
        let u = support_subspace(t, k, tol)?;
        p = p.mode_product(k, &(&u * u.adjoint()))?;
    }
    let diff: f64 = p.data.iter().zip(&t.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(diff <= tol.sqrt() * t.norm().max(f64::MIN_POSITIVE) || t.norm() == 0.0)
}

/// `S ⊗ ... ⊗ S` applied to `t`.
pub fn tensor_power_apply(s: &CMat, t: &DenseTensor) -> Result<DenseTensor> {
    let mut out = t.clone();
    for k in 0..t.order() {
        out = out.mode_product(k, s)?;
    }
    Ok(out)
}

/// Support invariance probe: given `S^{⊗n} t = λ t`, check that `S`
/// maps every support subspace of `t` onto itself.
pub fn check_inv_supp(s: &CMat, t: &DenseTensor, lambda: Complex64, tol: f64) -> Result<bool> {
    let d = s.nrows();
    if s.ncols() != d || t.dims.iter().any(|&x| x != d) {
        return Err(Error::Shape("all modes must match the square matrix".into()));
    }
    if t.norm() == 0.0 {
        return Err(Error::InvalidMap("zero tensor".into()));
    }
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidMap("zero eigenvalue".into()));
    }
    let st = tensor_power_apply(s, t)?;
    let residual = st.add(&t.scale(-lambda)).norm();
    let bound = 1e-8 * t.norm();
    if residual > bound {
        return Err(Error::NotEigen { residual, bound });
    }
    for k in 0..t.order() {
        let u = support_subspace(t, k, tol)?;
        let su = s * &u;
        if linalg::rank(&su, tol) != u.ncols() || !linalg::contained_in(&linalg::orth(&su, tol), &u, tol.sqrt()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `S_1 ⊗ ... ⊗ S_n` has trivial kernel.
pub fn tensor_power_injective(mats: &[CMat], tol: f64) -> Result<bool> {
    let mut k = CMat::identity(1, 1);
    for m in mats {
        if m.nrows() > MAX_DIM || m.ncols() > MAX_DIM {
            return Err(Error::TooLarge(format!("factor {:?}", m.shape())));
        }
        k = linalg::kron(&k, m);
    }
    Ok(linalg::rank(&k, tol) == k.ncols())
}
