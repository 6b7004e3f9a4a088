//! Exact rational matrices: row reduction, rank, null spaces and span
//! operations. Used wherever equality of labels has to be decidable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Render as `p/q` (or `p` for integers).
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| format!("bad integer {s:?}"))?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Best rational approximation with `|x - p/q| <= tol` from the continued
/// fraction expansion of `x`.
pub fn rationalize(x: f64, tol: f64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let ax = x.abs();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = ax;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1.to_f64().unwrap_or(f64::MAX) / k1.to_f64().unwrap_or(1.0);
        if (approx - ax).abs() <= tol {
            break;
        }
        let frac = r - a;
        if frac < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    Q::new(BigInt::from(sign) * h1, k1)
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(dim: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                m.set(i, j, c[i].clone());
            }
        }
        m
    }

    pub fn from_f64(m: &nalgebra::DMatrix<f64>, tol: f64) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.set(i, j, rationalize(m[(i, j)], tol));
            }
        }
        out
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + a * b;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).recip();
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(r, j) - &f * m.get(row, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space as columns.
    pub fn null_space(&self) -> QMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = QMat::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, Q::one());
            for (i, &p) in pivots.iter().enumerate() {
                out.set(p, k, -r.get(i, f).clone());
            }
        }
        out
    }

    /// Basis of the column space (a subset of the columns).
    pub fn col_basis(&self) -> QMat {
        let (_, pivots) = self.rref();
        let cols: Vec<Vec<Q>> = pivots.iter().map(|&j| self.col(j)).collect();
        QMat::from_cols(self.rows, &cols)
    }

    pub fn hcat(&self, other: &QMat) -> QMat {
        assert_eq!(self.rows, other.rows);
        let mut out = QMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Whether `v` lies in the column space.
    pub fn spans(&self, v: &[Q]) -> bool {
        let base = self.rank();
        let ext = self.hcat(&QMat::from_cols(self.rows, &[v.to_vec()]));
        ext.rank() == base
    }

    /// Coefficients `c` with `self * c = v`, if any.
    pub fn solve(&self, v: &[Q]) -> Option<Vec<Q>> {
        let aug = self.hcat(&QMat::from_cols(self.rows, &[v.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut c = vec![Q::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            c[p] = r.get(i, self.cols).clone();
        }
        Some(c)
    }

    /// Intersection of column spaces, as a column basis.
    pub fn intersect(&self, other: &QMat) -> QMat {
        let a = self.col_basis();
        let b = other.col_basis();
        let mut neg_b = b.clone();
        for x in neg_b.data.iter_mut() {
            *x = -x.clone();
        }
        let ker = a.hcat(&neg_b).null_space();
        let mut cols = Vec::new();
        for k in 0..ker.cols {
            let coeffs: Vec<Q> = (0..a.cols).map(|i| ker.get(i, k).clone()).collect();
            cols.push(a.mul_vec(&coeffs));
        }
        QMat::from_cols(self.rows, &cols).col_basis()
    }

    pub fn max_abs(&self) -> Q {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.75, 1e-12), q(3, 4));
        assert_eq!(rationalize(-1.0 / 3.0, 1e-12), q(-1, 3));
        assert_eq!(rationalize(2.0, 1e-12), qi(2));
    }

    #[test]
    fn null_space_and_rank() {
        let m = QMat::from_rows(&[vec![qi(1), qi(2), qi(3)], vec![qi(2), qi(4), qi(6)]]);
        assert_eq!(m.rank(), 1);
        let n = m.null_space();
        assert_eq!(n.cols, 2);
        assert!(m.mul(&n).is_zero());
    }

    #[test]
    fn parse_and_format() {
        let x = parse_q("-6/8").unwrap();
        assert_eq!(fmt_q(&x), "-3/4");
        assert_eq!(fmt_q(&parse_q("5").unwrap()), "5");
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn intersect_coordinate_planes() {
        let a = QMat::from_cols(3, &[vec![qi(1), qi(0), qi(0)], vec![qi(0), qi(1), qi(0)]]);
        let b = QMat::from_cols(3, &[vec![qi(1), qi(1), qi(0)], vec![qi(0), qi(0), qi(1)]]);
        let c = a.intersect(&b);
        assert_eq!(c.cols, 1);
        assert!(a.spans(&c.col(0)) && b.spans(&c.col(0)));
    }
}
