//! Truncated symmetric tensor algebra with the sigma-deformed product, its
//! star operation and functorial action, over floating or exact complex
//! coefficients.
//!
//! An element is a list of symmetric tensors, one per degree `0..=max`,
//! each stored flat with the first index slowest.

use crate::error::{Error, Result};
use crate::exact::Q;
use crate::linalg::{self, CMat};
use crate::symplectic::{PreSymplecticSpace, SymplecticMap};
use crate::tensor::{permutations, ravel, unravel};
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

pub mod check;

/// Default truncation degree.
pub const DEFAULT_DEGREE: usize = 4;

/// Exact complex rationals.
pub type CQ = Complex<Q>;

/// Coefficient fields.
pub trait Coeff:
    Clone + PartialEq + Debug + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn ratio(num: i64, den: i64) -> Self;
    fn imag_unit() -> Self;
    fn conjugate(&self) -> Self;
    fn to_c64(&self) -> Complex64;
}

impl Coeff for Complex64 {
    fn ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::i()
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl Coeff for CQ {
    fn ratio(num: i64, den: i64) -> Self {
        Complex::new(crate::exact::q(num, den), Q::zero())
    }
    fn imag_unit() -> Self {
        Complex::new(Q::zero(), Q::one())
    }
    fn conjugate(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(crate::exact::to_f64(&self.re), crate::exact::to_f64(&self.im))
    }
}

/// Dense square matrix over a coefficient field, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Square<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Coeff> Square<T> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        Square { n, data: (0..n * n).map(|k| f(k / n, k % n)).collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }
}

impl Square<Complex64> {
    pub fn from_cmat(m: &CMat) -> Self {
        Square::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

/// Algebra data: dimension, symplectic form, conjugation matrix
/// (`C v = J conj(v)`) and truncation degree.
#[derive(Clone, Debug)]
pub struct PolyAlgebra<T> {
    pub dim: usize,
    pub sigma: Square<T>,
    pub conj: Square<T>,
    pub max_degree: usize,
}

/// Element of the truncated algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct SymPoly<T> {
    pub dim: usize,
    pub comps: Vec<Vec<T>>,
}

fn pow(d: usize, n: usize) -> usize {
    d.pow(n as u32)
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn binom(n: usize, k: usize) -> i64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Average over index permutations of a flat degree-`n` tensor.
pub fn symmetrize<T: Coeff>(t: &[T], d: usize, n: usize) -> Vec<T> {
    if n <= 1 {
        return t.to_vec();
    }
    let dims = vec![d; n];
    let perms = permutations(n);
    let w = T::ratio(1, perms.len() as i64);
    (0..t.len())
        .map(|flat| {
            let idx = unravel(flat, &dims);
            let mut acc = T::zero();
            for p in &perms {
                let q: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                acc = acc + t[ravel(&q, &dims)].clone();
            }
            acc * w.clone()
        })
        .collect()
}

/// Apply `m` to mode `k` of a flat degree-`n` tensor.
pub fn mode_apply<T: Coeff>(t: &[T], d: usize, n: usize, k: usize, m: &Square<T>) -> Vec<T> {
    let inner = pow(d, n - 1 - k);
    let outer = pow(d, k);
    let mut out = vec![T::zero(); t.len()];
    for o in 0..outer {
        for p in 0..d {
            for q in 0..d {
                let c = m.at(p, q);
                if c.is_zero() {
                    continue;
                }
                for i in 0..inner {
                    let dst = (o * d + p) * inner + i;
                    let src = (o * d + q) * inner + i;
                    out[dst] = out[dst].clone() + c.clone() * t[src].clone();
                }
            }
        }
    }
    out
}

impl<T: Coeff> SymPoly<T> {
    pub fn zero(dim: usize, max_degree: usize) -> Self {
        SymPoly { dim, comps: (0..=max_degree).map(|n| vec![T::zero(); pow(dim, n)]).collect() }
    }

    pub fn max_degree(&self) -> usize {
        self.comps.len() - 1
    }

    /// Highest degree with a nonzero component.
    pub fn degree(&self) -> usize {
        (0..self.comps.len()).rev().find(|&n| self.comps[n].iter().any(|c| !c.is_zero())).unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect())
            .collect();
        SymPoly { dim: self.dim, comps }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect())
            .collect();
        SymPoly { dim: self.dim, comps }
    }

    /// `self += s * other`, skipping zero entries.
    pub fn axpy(&mut self, s: &T, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x = x.clone() + s.clone() * y.clone();
                }
            }
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        SymPoly {
            dim: self.dim,
            comps: self.comps.iter().map(|c| c.iter().map(|x| x.clone() * s.clone()).collect()).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.comps.iter().enumerate().all(|(n, c)| symmetrize(c, self.dim, n) == *c)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().map(|c| c.to_c64().norm()).fold(0.0, f64::max)
    }
}

impl SymPoly<Complex64> {
    /// Nested JSON arrays of `[re, im]` pairs keyed by degree.
    pub fn to_json(&self) -> serde_json::Value {
        fn nest(c: &[Complex64], d: usize, n: usize) -> serde_json::Value {
            if n == 0 {
                return serde_json::json!([c[0].re, c[0].im]);
            }
            let step = pow(d, n - 1);
            serde_json::Value::Array((0..d).map(|i| nest(&c[i * step..(i + 1) * step], d, n - 1)).collect())
        }
        let mut map = serde_json::Map::new();
        for (n, c) in self.comps.iter().enumerate() {
            if c.iter().any(|z| z.norm() != 0.0) {
                map.insert(n.to_string(), nest(c, self.dim, n));
            }
        }
        serde_json::Value::Object(map)
    }
}

impl<T: Coeff> PolyAlgebra<T> {
    pub fn new(sigma: Square<T>, conj: Square<T>, max_degree: usize) -> Self {
        PolyAlgebra { dim: sigma.n, sigma, conj, max_degree }
    }

    pub fn zero(&self) -> SymPoly<T> {
        SymPoly::zero(self.dim, self.max_degree)
    }

    pub fn unit(&self) -> SymPoly<T> {
        self.scalar(T::one())
    }

    pub fn scalar(&self, c: T) -> SymPoly<T> {
        let mut p = self.zero();
        p.comps[0][0] = c;
        p
    }

    /// Degree-one element `u`.
    pub fn generator(&self, u: &[T]) -> SymPoly<T> {
        let mut p = self.zero();
        p.comps[1] = u.to_vec();
        p
    }

    /// `u^{⊙n}`.
    pub fn power(&self, u: &[T], n: usize) -> Result<SymPoly<T>> {
        self.check_degree(n)?;
        let mut p = self.zero();
        let mut t = vec![T::one()];
        for _ in 0..n {
            t = outer(&t, u);
        }
        p.comps[n] = t;
        Ok(p)
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.max_degree {
            return Err(Error::TruncationOverflow { degree: n, max: self.max_degree });
        }
        Ok(())
    }

    /// Sigma-contraction of the last `r` modes of `a` (degree `m`) with the
    /// first `r` modes of `b` (degree `n`), symmetrized.
    fn contract(&self, a: &[T], m: usize, b: &[T], n: usize, r: usize) -> Vec<T> {
        let d = self.dim;
        let mut bs = b.to_vec();
        for k in 0..r {
            bs = mode_apply(&bs, d, n, k, &self.sigma);
        }
        let (rows, inner, cols) = (pow(d, m - r), pow(d, r), pow(d, n - r));
        let mut out = vec![T::zero(); rows * cols];
        for i in 0..rows {
            for k in 0..inner {
                let x = &a[i * inner + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..cols {
                    let y = &bs[k * cols + j];
                    if !y.is_zero() {
                        out[i * cols + j] = out[i * cols + j].clone() + x.clone() * y.clone();
                    }
                }
            }
        }
        symmetrize(&out, d, m + n - 2 * r)
    }

    /// Products of homogeneous parts of degrees `m`, `n` summed with weight
    /// `(i/2)^r m! n! / (r! (m-r)! (n-r)!)`; terms above `cap` are dropped.
    fn product_upto(&self, a: &SymPoly<T>, b: &SymPoly<T>, cap: usize) -> SymPoly<T> {
        let mut out: SymPoly<T> = SymPoly::zero(self.dim, cap);
        let half_i = T::imag_unit() * T::ratio(1, 2);
        for (m, ca) in a.comps.iter().enumerate() {
            if ca.iter().all(|c| c.is_zero()) {
                continue;
            }
            for (n, cb) in b.comps.iter().enumerate() {
                if cb.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let mut hr = T::one();
                for r in 0..=m.min(n) {
                    if r > 0 {
                        hr = hr * half_i.clone();
                    }
                    let deg = m + n - 2 * r;
                    if deg > cap {
                        continue;
                    }
                    let w = T::ratio(binom(m, r) * binom(n, r) * factorial(r), 1) * hr.clone();
                    let c = self.contract(ca, m, cb, n, r);
                    for (o, x) in out.comps[deg].iter_mut().zip(c) {
                        *o = o.clone() + w.clone() * x;
                    }
                }
            }
        }
        out
    }

    /// Deformed product; fails if a nonzero term would exceed the truncation.
    pub fn product(&self, a: &SymPoly<T>, b: &SymPoly<T>) -> Result<SymPoly<T>> {
        let top = a.degree() + b.degree();
        if !(a.comps.iter().chain(&b.comps)).all(|c| c.iter().all(|x| x.is_zero())) {
            self.check_degree(top)?;
        }
        let mut p = self.product_upto(a, b, self.max_degree);
        p.comps.truncate(self.max_degree + 1);
        Ok(p)
    }

    /// Product keeping only degrees `<= cap`, for series truncations.
    pub fn product_truncated(&self, a: &SymPoly<T>, b: &SymPoly<T>, cap: usize) -> SymPoly<T> {
        self.product_upto(a, b, cap)
    }

    pub fn commutator(&self, a: &SymPoly<T>, b: &SymPoly<T>) -> Result<SymPoly<T>> {
        Ok(self.product(a, b)?.sub(&self.product(b, a)?))
    }

    /// `(u^{⊙n})^* = (Cu)^{⊙n}`, extended antilinearly.
    pub fn star(&self, a: &SymPoly<T>) -> SymPoly<T> {
        let d = self.dim;
        let comps = a
            .comps
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let mut t: Vec<T> = c.iter().map(|x| x.conjugate()).collect();
                for k in 0..n {
                    t = mode_apply(&t, d, n, k, &self.conj);
                }
                t
            })
            .collect();
        SymPoly { dim: d, comps }
    }

    /// Action of a linear map on every tensor factor; `target` supplies the
    /// codomain algebra.
    pub fn apply_map(&self, f: &Rect<T>, a: &SymPoly<T>, target: &PolyAlgebra<T>) -> Result<SymPoly<T>> {
        if f.cols != self.dim || f.rows != target.dim {
            return Err(Error::Shape(format!("map {}x{} on dimension {}", f.rows, f.cols, self.dim)));
        }
        let mut out = target.zero();
        for (n, c) in a.comps.iter().enumerate().take(target.max_degree + 1) {
            out.comps[n] = apply_rect_all_modes(c, self.dim, n, f);
        }
        Ok(out)
    }

    /// Truncated `W(λu) = Σ (iλ)^n / n! u^{⊙n}`.
    pub fn weyl_series(&self, u: &[T], lambda: &T, n_max: usize) -> Result<SymPoly<T>> {
        self.check_degree(n_max)?;
        let mut out = self.zero();
        let il = T::imag_unit() * lambda.clone();
        let mut coef = T::one();
        let mut t = vec![T::one()];
        for n in 0..=n_max {
            if n > 0 {
                coef = coef * il.clone() * T::ratio(1, n as i64);
                t = outer(&t, u);
            }
            out.comps[n] = t.iter().map(|x| x.clone() * coef.clone()).collect();
        }
        Ok(out)
    }

    /// `sigma(u, v) = u^T S v`.
    pub fn form(&self, u: &[T], v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + u[i].clone() * self.sigma.at(i, j).clone() * v[j].clone();
            }
        }
        acc
    }

    /// Largest coefficient deviation in `W(λu) W(μv) = e^{-iλμσ/2} W(λu+μv)`,
    /// compared coefficient by coefficient in `λ^a μ^b` for `a + b <= n`.
    pub fn weyl_relation_residual(&self, u: &[T], v: &[T], n: usize) -> Result<f64> {
        self.check_degree(n)?;
        let s = self.form(u, v);
        let i = T::imag_unit();
        let mut worst = 0.0f64;
        let inv_fact = |k: usize| T::ratio(1, factorial(k));
        let ipow = |k: usize| (0..k).fold(T::one(), |acc, _| acc * i.clone());
        for a in 0..=n {
            for b in 0..=n - a {
                let lhs = self.product(
                    &self.power(u, a)?.scale(&(ipow(a) * inv_fact(a))),
                    &self.power(v, b)?.scale(&(ipow(b) * inv_fact(b))),
                )?;
                let mut rhs = self.zero();
                let phase = T::zero() - i.clone() * s.clone() * T::ratio(1, 2);
                for k in 0..=a.min(b) {
                    let deg = a + b - 2 * k;
                    let ph = (0..k).fold(T::one(), |acc, _| acc * phase.clone()) * inv_fact(k);
                    let w = ph * ipow(deg) * inv_fact(deg) * T::ratio(binom(deg, a - k), 1);
                    let mut t = vec![T::one()];
                    for _ in 0..a - k {
                        t = outer(&t, u);
                    }
                    for _ in 0..b - k {
                        t = outer(&t, v);
                    }
                    let t = symmetrize(&t, self.dim, deg);
                    for (o, x) in rhs.comps[deg].iter_mut().zip(t) {
                        *o = o.clone() + w.clone() * x;
                    }
                }
                worst = worst.max(lhs.sub(&rhs).max_abs());
            }
        }
        Ok(worst)
    }

    /// Product computed in the tensor algebra and normal-ordered to the
    /// symmetric representative by commutator rewriting.
    pub fn rewrite_oracle_product(&self, a: &SymPoly<T>, b: &SymPoly<T>) -> Result<SymPoly<T>> {
        if self.dim > 4 || self.max_degree > 4 {
            return Err(Error::TooLarge("rewrite oracle is limited to dim <= 4 and degree <= 4".into()));
        }
        let top = a.degree() + b.degree();
        self.check_degree(top)?;
        let d = self.dim;
        let mut memo: HashMap<Vec<usize>, SymPoly<T>> = HashMap::new();
        let mut out = self.zero();
        for (m, ca) in a.comps.iter().enumerate() {
            for (fa, x) in ca.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let wa = unravel(fa, &vec![d; m]);
                for (n, cb) in b.comps.iter().enumerate() {
                    for (fb, y) in cb.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let mut w = wa.clone();
                        w.extend(unravel(fb, &vec![d; n]));
                        let r = self.normal_order(&w, &mut memo);
                        out.axpy(&(x.clone() * y.clone()), &r);
                    }
                }
            }
        }
        Ok(out)
    }

    fn normal_order(&self, w: &[usize], memo: &mut HashMap<Vec<usize>, SymPoly<T>>) -> SymPoly<T> {
        if let Some(r) = memo.get(w) {
            return r.clone();
        }
        let n = w.len();
        let d = self.dim;
        let mut out = self.zero();
        if n <= 1 {
            if n == 0 {
                out.comps[0][0] = T::one();
            } else {
                out.comps[1][w[0]] = T::one();
            }
            memo.insert(w.to_vec(), out.clone());
            return out;
        }
        let perms = permutations(n);
        let inv = T::ratio(1, perms.len() as i64);
        let dims = vec![d; n];
        let i = T::imag_unit();
        for p in &perms {
            let target: Vec<usize> = p.iter().map(|&k| w[k]).collect();
            out.comps[n][ravel(&target, &dims)] = out.comps[n][ravel(&target, &dims)].clone() + inv.clone();
            // w - target as a sum of adjacent swaps, each worth i sigma(a, b)
            // times the word with the pair removed
            let mut cur: Vec<usize> = (0..n).collect();
            loop {
                let pos = (0..n - 1).find(|&k| {
                    let (x, y) = (p.iter().position(|&z| z == cur[k]).unwrap(), p.iter().position(|&z| z == cur[k + 1]).unwrap());
                    x > y
                });
                let Some(k) = pos else { break };
                let word: Vec<usize> = cur.iter().map(|&z| w[z]).collect();
                let s = self.sigma.at(word[k], word[k + 1]).clone();
                if !s.is_zero() {
                    let mut rest = word.clone();
                    rest.drain(k..k + 2);
                    let r = self.normal_order(&rest, memo);
                    out.axpy(&(i.clone() * s * inv.clone()), &r);
                }
                cur.swap(k, k + 1);
            }
        }
        memo.insert(w.to_vec(), out.clone());
        out
    }
}

fn outer<T: Coeff>(t: &[T], u: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(t.len() * u.len());
    for x in t {
        for y in u {
            out.push(x.clone() * y.clone());
        }
    }
    out
}

impl PolyAlgebra<Complex64> {
    pub fn from_space(space: &PreSymplecticSpace, max_degree: usize) -> Self {
        PolyAlgebra::new(Square::from_cmat(&space.sigma), Square::from_cmat(&space.conj), max_degree)
    }
}

/// `Q(f)`: `f^{⊗n}` on each degree, between the algebras of its domain
/// and codomain at truncation `max_degree`.
pub fn q_functor(f: &SymplecticMap, a: &SymPoly<Complex64>) -> Result<SymPoly<Complex64>> {
    let n = a.max_degree();
    let src = PolyAlgebra::from_space(&f.domain, n);
    let dst = PolyAlgebra::from_space(&f.codomain, n);
    src.apply_map(&Rect::from_cmat(&f.matrix), a, &dst)
}

/// Rectangular matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Coeff> Rect<T> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        Rect { rows, cols, data: (0..rows * cols).map(|k| f(k / cols, k % cols)).collect() }
    }
}

impl Rect<Complex64> {
    pub fn from_cmat(m: &CMat) -> Self {
        Rect::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// `f^{⊗n}` applied to a flat tensor over `d`.
pub fn apply_rect_all_modes<T: Coeff>(t: &[T], d: usize, n: usize, f: &Rect<T>) -> Vec<T> {
    let mut cur = t.to_vec();
    let mut dims = vec![d; n];
    for k in 0..n {
        let inner: usize = dims[k + 1..].iter().product();
        let outer_n: usize = dims[..k].iter().product();
        let mut next = vec![T::zero(); outer_n * f.rows * inner];
        for o in 0..outer_n {
            for p in 0..f.rows {
                for q in 0..f.cols {
                    let c = &f.data[p * f.cols + q];
                    if c.is_zero() {
                        continue;
                    }
                    for i in 0..inner {
                        let dst = (o * f.rows + p) * inner + i;
                        let src = (o * dims[k] + q) * inner + i;
                        next[dst] = next[dst].clone() + c.clone() * cur[src].clone();
                    }
                }
            }
        }
        dims[k] = f.rows;
        cur = next;
    }
    cur
}

/// Span over degrees `n >= 1` of the mode-one unfoldings.
pub fn support_space(a: &SymPoly<Complex64>, tol: f64) -> CMat {
    let d = a.dim;
    let mut acc = CMat::zeros(d, 0);
    for (n, c) in a.comps.iter().enumerate().skip(1) {
        let cols = pow(d, n - 1);
        let unf = CMat::from_fn(d, cols, |i, j| c[i * cols + j]);
        acc = linalg::hcat(&acc, &unf);
    }
    if acc.ncols() == 0 || acc.norm() == 0.0 {
        return CMat::zeros(d, 0);
    }
    linalg::orth(&acc, tol)
}

/// Largest change of `a` under projecting every tensor factor onto the
/// span of `q` (orthonormal columns): zero iff `a` lies in the subalgebra
/// generated by that span.
pub fn subalgebra_residual(a: &SymPoly<Complex64>, q: &CMat) -> f64 {
    let p = q * q.adjoint();
    let f = Rect::from_cmat(&p);
    a.comps
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let pc = apply_rect_all_modes(c, a.dim, n, &f);
            pc.iter().zip(c).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Sorted multi-indices of degree `n` over `d`. A symmetric tensor is
/// coordinatized by its entries at these indices.
pub fn multisets(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(d, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(d, n, 0, &mut vec![], &mut out);
    out
}

/// Matrix of `g^{⊗n}` on symmetric tensors in sorted-index coordinates.
pub fn sym_power_matrix(g: &CMat, n: usize) -> CMat {
    let d = g.nrows();
    let ms = multisets(d, n);
    let dims = vec![d; n];
    let f = Rect::from_cmat(g);
    let mut out = CMat::zeros(ms.len(), ms.len());
    for c in 0..ms.len() {
        let mut e = vec![Complex64::new(0.0, 0.0); ms.len()];
        e[c] = Complex64::new(1.0, 0.0);
        let t = sym_from_coords(&e, d, n);
        let gt = apply_rect_all_modes(&t, d, n, &f);
        for (r, beta) in ms.iter().enumerate() {
            out[(r, c)] = gt[ravel(beta, &dims)];
        }
    }
    out
}

/// Symmetric tensor from sorted-index coordinates.
pub fn sym_from_coords(coords: &[Complex64], d: usize, n: usize) -> Vec<Complex64> {
    let dims = vec![d; n];
    let mut t = vec![Complex64::new(0.0, 0.0); pow(d, n)];
    for (alpha, c) in multisets(d, n).iter().zip(coords) {
        let mut seen = std::collections::HashSet::new();
        for p in permutations(n) {
            let q: Vec<usize> = p.iter().map(|&k| alpha[k]).collect();
            if seen.insert(q.clone()) {
                t[ravel(&q, &dims)] = *c;
            }
        }
    }
    t
}

/// Spanning tensors of `Γ_⊙` of the column span of `q` in degree `n`.
pub fn sym_power_span(q: &CMat, n: usize) -> CMat {
    let (d, w) = (q.nrows(), q.ncols());
    let ms = multisets(w, n);
    let mut out = CMat::zeros(pow(d, n), ms.len());
    for (c, alpha) in ms.iter().enumerate() {
        let mut t = vec![Complex64::new(1.0, 0.0)];
        for &k in alpha {
            let col: Vec<Complex64> = q.column(k).iter().cloned().collect();
            t = outer(&t, &col);
        }
        let t = symmetrize(&t, d, n);
        for (r, x) in t.into_iter().enumerate() {
            out[(r, c)] = x;
        }
    }
    out
}
