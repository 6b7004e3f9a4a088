//! Algebraic span of Weyl generators `W(u)` over exact rational labels,
//! with its action on finitely supported functions of labels and the
//! fixed points of symplectic relabelings.

use crate::error::{Error, Result};
use crate::exact::{fmt_q, parse_q, to_f64, QMat, Q};
use crate::linalg::{self, RMat};
use num_complex::Complex64;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub mod check;

pub type Label = Vec<Q>;

/// Amplitudes below this are pruned.
pub const PRUNE: f64 = 1e-300;

/// Label space: rational antisymmetric form.
#[derive(Clone, Debug)]
pub struct LabelSpace {
    pub sigma: QMat,
}

impl LabelSpace {
    pub fn new(sigma: QMat) -> Result<Self> {
        if sigma.rows != sigma.cols {
            return Err(Error::Shape("form must be square".into()));
        }
        if !sigma.data.is_empty() && !sigma.transpose().data.iter().zip(&sigma.data).all(|(a, b)| *a == -b.clone()) {
            return Err(Error::InvalidSpace("form is not antisymmetric".into()));
        }
        Ok(LabelSpace { sigma })
    }

    /// Standard form `[[0, I], [-I, 0]]` on `Q^{2k}`.
    pub fn standard(k: usize) -> Self {
        let mut s = QMat::zeros(2 * k, 2 * k);
        for i in 0..k {
            s.set(i, k + i, Q::from_integer(1.into()));
            s.set(k + i, i, Q::from_integer((-1).into()));
        }
        LabelSpace { sigma: s }
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows
    }

    pub fn form(&self, u: &[Q], v: &[Q]) -> Q {
        let sv = self.sigma.mul_vec(v);
        u.iter().zip(&sv).fold(Q::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `e^{i theta sigma(u, v) / 2}`.
    fn phase(&self, theta: f64, u: &[Q], v: &[Q]) -> Complex64 {
        Complex64::from_polar(1.0, theta * to_f64(&self.form(u, v)) / 2.0)
    }

    pub fn zero_label(&self) -> Label {
        vec![Q::zero(); self.dim()]
    }

    /// Whether `g` preserves the form exactly.
    pub fn is_symplectic(&self, g: &QMat) -> bool {
        g.rows == self.dim() && g.cols == self.dim() && g.transpose().mul(&self.sigma).mul(g) == self.sigma
    }
}

pub fn add(u: &[Q], v: &[Q]) -> Label {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn neg(u: &[Q]) -> Label {
    u.iter().map(|a| -a.clone()).collect()
}

/// Finite combination `Σ a(u) W(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylElement {
    pub terms: BTreeMap<Label, Complex64>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement { terms: BTreeMap::new() }
    }

    pub fn generator(u: Label) -> Self {
        Self::term(u, Complex64::new(1.0, 0.0))
    }

    pub fn term(u: Label, a: Complex64) -> Self {
        let mut e = Self::zero();
        e.push(u, a);
        e
    }

    pub fn unit(space: &LabelSpace) -> Self {
        Self::generator(space.zero_label())
    }

    fn push(&mut self, u: Label, a: Complex64) {
        let z = self.terms.get(&u).copied().unwrap_or_default() + a;
        if z.norm() <= PRUNE {
            self.terms.remove(&u);
        } else {
            self.terms.insert(u, z);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (u, a) in &other.terms {
            out.push(u.clone(), *a);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            out.push(u.clone(), a * s);
        }
        out
    }

    /// Largest amplitude difference over the union of supports.
    pub fn distance(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&Label> = self.terms.keys().chain(other.terms.keys()).collect();
        let z = Complex64::new(0.0, 0.0);
        keys.into_iter()
            .map(|k| (self.terms.get(k).unwrap_or(&z) - other.terms.get(k).unwrap_or(&z)).norm())
            .fold(0.0, f64::max)
    }

    /// JSON fixture: `[{label: ["p/q", ...], amp: [re, im]}]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(u, a)| {
                    serde_json::json!({ "label": u.iter().map(fmt_q).collect::<Vec<_>>(), "amp": [a.re, a.im] })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::Shape(format!("weyl element json: {m}"));
        let mut out = Self::zero();
        for t in v.as_array().ok_or_else(|| bad("expected an array"))? {
            let label = t["label"]
                .as_array()
                .ok_or_else(|| bad("label"))?
                .iter()
                .map(|x| x.as_str().ok_or_else(|| bad("label entry")).and_then(|s| parse_q(s).map_err(|e| bad(&e))))
                .collect::<Result<Label>>()?;
            let amp = t["amp"].as_array().ok_or_else(|| bad("amp"))?;
            let re = amp.first().and_then(|x| x.as_f64()).ok_or_else(|| bad("amp re"))?;
            let im = amp.get(1).and_then(|x| x.as_f64()).ok_or_else(|| bad("amp im"))?;
            out.push(label, Complex64::new(re, im));
        }
        Ok(out)
    }
}

fn check_labels(space: &LabelSpace, e: &WeylElement) -> Result<()> {
    if e.terms.keys().any(|u| u.len() != space.dim()) {
        return Err(Error::Shape(format!("label of wrong length for dimension {}", space.dim())));
    }
    Ok(())
}

/// Bilinear extension of `W(u) W(v) = e^{-i sigma(u, v) / 2} W(u + v)`.
pub fn multiply(space: &LabelSpace, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    check_labels(space, a)?;
    check_labels(space, b)?;
    let mut out = WeylElement::zero();
    for (u, x) in &a.terms {
        for (v, y) in &b.terms {
            out.push(add(u, v), x * y * space.phase(-1.0, u, v));
        }
    }
    Ok(out)
}

/// `(Σ a(u) W(u))^* = Σ conj(a(u)) W(-u)`.
pub fn star(a: &WeylElement) -> WeylElement {
    let mut out = WeylElement::zero();
    for (u, x) in &a.terms {
        out.push(neg(u), x.conj());
    }
    out
}

/// Finitely supported function on labels.
pub type LabelFn = BTreeMap<Label, Complex64>;

/// `(W(u) f)(v) = e^{i sigma(u, v) / 2} f(u + v)`, extended linearly.
pub fn ell2_action(space: &LabelSpace, a: &WeylElement, f: &LabelFn) -> Result<LabelFn> {
    check_labels(space, a)?;
    let mut out: LabelFn = BTreeMap::new();
    for (u, x) in &a.terms {
        for (w, y) in f {
            // v = w - u, and sigma(u, v) = sigma(u, w)
            let v: Label = w.iter().zip(u).map(|(p, q)| p - q).collect();
            *out.entry(v).or_insert(Complex64::new(0.0, 0.0)) += x * y * space.phase(1.0, u, w);
        }
    }
    out.retain(|_, z| z.norm() > PRUNE);
    Ok(out)
}

/// `Σ conj(f) g` over labels.
pub fn inner(f: &LabelFn, g: &LabelFn) -> Complex64 {
    f.iter().filter_map(|(k, x)| g.get(k).map(|y| x.conj() * y)).sum()
}

/// Relabeling `W(u) -> W(g u)`.
pub fn relabel(g: &QMat, a: &WeylElement) -> WeylElement {
    let mut out = WeylElement::zero();
    for (u, x) in &a.terms {
        out.push(g.mul_vec(u), *x);
    }
    out
}

/// Orbit of `u` under the group generated by `gens`.
pub fn orbit(gens: &[QMat], u: &Label, cap: usize) -> Result<Vec<Label>> {
    let mut seen: BTreeSet<Label> = BTreeSet::new();
    let mut order = vec![u.clone()];
    seen.insert(u.clone());
    let mut queue = VecDeque::from([u.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.mul_vec(&x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::TooLarge(format!("orbit exceeds {cap} labels")));
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Orbit sums and the pool labels whose orbit exceeded the cap.
#[derive(Clone, Debug)]
pub struct FixedSpan {
    pub sums: Vec<WeylElement>,
    pub unbounded: Vec<Label>,
}

/// Orbit sums `Σ_{x in orbit(u)} W(x)` over the distinct finite orbits met
/// by the pool, each verified fixed under every generator. Labels with
/// orbits beyond `cap` carry no fixed amplitude and are listed apart.
pub fn fixed_point_span(space: &LabelSpace, gens: &[QMat], pool: &[Label], cap: usize) -> Result<FixedSpan> {
    for g in gens {
        if !space.is_symplectic(g) {
            return Err(Error::InvalidMap("relabeling does not preserve the form".into()));
        }
    }
    let mut covered: BTreeSet<Label> = BTreeSet::new();
    let mut out = FixedSpan { sums: Vec::new(), unbounded: Vec::new() };
    for u in pool {
        if covered.contains(u) {
            continue;
        }
        let orb = match orbit(gens, u, cap) {
            Ok(o) => o,
            Err(Error::TooLarge(_)) => {
                out.unbounded.push(u.clone());
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut e = WeylElement::zero();
        for x in &orb {
            covered.insert(x.clone());
            e.push(x.clone(), Complex64::new(1.0, 0.0));
        }
        for g in gens {
            if relabel(g, &e) != e {
                return Err(Error::InvalidMap("orbit sum is not fixed".into()));
            }
        }
        out.sums.push(e);
    }
    Ok(out)
}

/// Labels fixed by every sampled member of a family: the intersection of
/// `ker(g_i - I)`, with a relative singular-value cut `tol`.
pub fn family_fixed_labels(family: &[RMat], tol: f64) -> Result<RMat> {
    let d = family.first().map(|g| g.nrows()).ok_or_else(|| Error::InvalidMap("empty family".into()))?;
    let mut stacked = RMat::zeros(0, d);
    for g in family {
        if g.shape() != (d, d) {
            return Err(Error::Shape("family members of different sizes".into()));
        }
        stacked = linalg::vcat(&stacked, &(g - RMat::identity(d, d)));
    }
    Ok(linalg::null_space_abs(&stacked, Some(1.0), tol))
}

/// Exact rational labels for the columns of `m`, rounded at `tol`.
pub fn rational_labels(m: &RMat, tol: f64) -> Vec<Label> {
    let q = QMat::from_f64(m, tol);
    (0..q.cols).map(|j| q.col(j)).collect()
}

pub fn label_to_f64(u: &[Q]) -> Vec<f64> {
    u.iter().map(to_f64).collect()
}
