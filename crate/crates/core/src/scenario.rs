//! Scenarios: a spacetime, a theory, a quantization and a region, with the
//! verdict they are expected to produce. Running one yields a
//! deterministic JSON report; wall times are returned separately.

use crate::error::{Error, Result};
use crate::lattice::{self, Interval, LatticeSpacetime, MetricSpec, RegionSpec, SpacetimeConfig, Topology};
use crate::locality::{self, current, sampler, Comparison, PhaseSpace, PhaseSubspace, Verdict, COMPARE_TOL};
use crate::{poly, weyl};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;
/// Lattice size of the quantized builtins.
pub const REDUCED_NX: usize = 16;
/// Degree up to which quantized algebras are compared.
pub const QUANTIZED_DEGREE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Scalar,
    Current,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantization {
    None,
    Poly,
    Weyl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub verdict: Verdict,
    /// Expected `dim(dyn) - dim(kin)`.
    #[serde(default)]
    pub gap: Option<usize>,
}

fn default_seed() -> u64 {
    1
}

fn default_tol() -> f64 {
    COMPARE_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// The statement the scenario instantiates.
    #[serde(default)]
    pub claim: String,
    pub spacetime: SpacetimeConfig,
    pub mass: f64,
    pub theory: Theory,
    #[serde(default = "default_quantization")]
    pub quantization: Quantization,
    pub region: RegionSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Sampled perturbations for the rce cross-checks; 0 skips them.
    #[serde(default)]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    pub expect: Expectation,
}

fn default_quantization() -> Quantization {
    Quantization::None
}

/// Region shapes used by the builtins, placed on the middle level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Base interval over the middle quarter.
    Centered,
    /// Base interval over the middle half.
    Wide,
    /// Two bases, each a quarter, separated by a quarter.
    Pair,
    /// `{a < |x - c| < 2a}` with `a = nx / 8`.
    Annulus,
}

pub const SHAPES: [Shape; 3] = [Shape::Centered, Shape::Wide, Shape::Pair];

pub fn shape_region(shape: Shape, nx: usize, nt: usize) -> RegionSpec {
    let t = nt / 2;
    let iv = |x0: usize, x1: usize| Interval { t, x0, x1 };
    let components = match shape {
        Shape::Centered => vec![iv(3 * nx / 8, 5 * nx / 8)],
        Shape::Wide => vec![iv(nx / 4, 3 * nx / 4)],
        Shape::Pair => vec![iv(nx / 8, 3 * nx / 8), iv(5 * nx / 8, 7 * nx / 8)],
        Shape::Annulus => {
            let (c, a) = (nx / 2, nx / 8);
            vec![iv(c - 2 * a, c - a - 1), iv(c + a + 1, c + 2 * a)]
        }
    };
    RegionSpec::Diamond { components }
}

/// Unit-length space, `dt = dx / 2`, `nt = 2 nx`.
pub fn grid(topology: Topology, nx: usize, metric: MetricSpec) -> SpacetimeConfig {
    let dx = 1.0 / nx as f64;
    SpacetimeConfig { topology, nx, nt: 2 * nx, dx, dt: 0.5 * dx, t0: 0.0, metric, perturbations: vec![] }
}

/// Static lapse bump used by most scenarios.
pub fn static_metric() -> MetricSpec {
    MetricSpec::Static { amp: 0.2, center: 0.5, width: 0.2 }
}

#[allow(clippy::too_many_arguments)]
pub fn make(
    name: &str,
    claim: &str,
    topology: Topology,
    nx: usize,
    mass: f64,
    theory: Theory,
    quantization: Quantization,
    shape: Shape,
    expect: Expectation,
) -> Scenario {
    let metric = if shape == Shape::Annulus { MetricSpec::Minkowski } else { static_metric() };
    let spacetime = grid(topology, nx, metric);
    let region = shape_region(shape, nx, spacetime.nt);
    Scenario {
        name: name.into(),
        claim: claim.into(),
        spacetime,
        mass,
        theory,
        quantization,
        region,
        seed: 1,
        samples: if quantization == Quantization::None { sampler::DEFAULT_SAMPLES } else { 0 },
        tolerance: COMPARE_TOL,
        expect,
    }
}

fn equal() -> Expectation {
    Expectation { verdict: Verdict::Equal, gap: Some(0) }
}

fn strict(gap: Option<usize>) -> Expectation {
    Expectation { verdict: Verdict::AStrictlyInB, gap }
}

/// One scenario per statement: classical scalar field for positive and
/// zero mass, the massless current, and both quantizations.
pub fn builtins() -> Vec<Scenario> {
    use Quantization as Qz;
    use Theory::*;
    use Topology::*;
    let n = 128;
    let r = REDUCED_NX;
    vec![
        make("massive-diamond", "the massive scalar field is dynamically local for every m > 0", Circle, n, 1.0, Scalar, Qz::None, Shape::Centered, equal()),
        make("massive-line-pair", "dynamical locality for m > 0 holds for multi-component regions on noncompact Cauchy surfaces", Line, n, 0.5, Scalar, Qz::None, Shape::Pair, equal()),
        make("massless-circle", "the massless scalar field fails dynamical locality on a compact Cauchy surface: dyn = kin + locally constant solutions", Circle, n, 0.0, Scalar, Qz::None, Shape::Centered, strict(Some(1))),
        make("massless-line", "locally constant solutions are trivial on a noncompact Cauchy surface, so dyn = kin for m = 0", Line, n, 0.0, Scalar, Qz::None, Shape::Centered, equal()),
        make("current-circle", "the massless current is dynamically local in two dimensions (connected region)", Circle, n, 0.0, Current, Qz::None, Shape::Centered, equal()),
        make("current-line", "the massless current is dynamically local in two dimensions (connected region, noncompact surface)", Line, n, 0.0, Current, Qz::None, Shape::Wide, equal()),
        make("current-disconnected-O", "dynamical locality of the current fails for a disconnected region in Minkowski space; witness (f(x-t) + f(x+t))/2", Line, n, 0.0, Current, Qz::None, Shape::Annulus, strict(None)),
        make("poly-massive", "the polynomial field algebra inherits dynamical locality from the classical theory (m > 0)", Circle, r, 1.0, Scalar, Qz::Poly, Shape::Centered, equal()),
        make("poly-massless-circle", "the polynomial field algebra inherits the failure of dynamical locality for m = 0", Circle, r, 0.0, Scalar, Qz::Poly, Shape::Centered, strict(None)),
        make("weyl-massive", "the Weyl algebra is dynamically local iff the classical theory is (m > 0)", Circle, r, 1.0, Scalar, Qz::Weyl, Shape::Centered, equal()),
        make("weyl-massless-circle", "the Weyl algebra is dynamically local iff the classical theory is (m = 0, compact surface)", Circle, r, 0.0, Scalar, Qz::Weyl, Shape::Centered, strict(None)),
        make("weyl-current-disconnected", "the Weyl algebra of the current fails dynamical locality where the classical current does", Line, r, 0.0, Current, Qz::Weyl, Shape::Pair, strict(None)),
    ]
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtins().into_iter().find(|s| s.name == name)
}

#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    pub topology: Topology,
    pub nx: usize,
    pub nt: usize,
    pub phase_dim: usize,
}

/// Cross-check of the bullet subspace of the largest generator against the
/// sampled rce-invariant subspace.
#[derive(Clone, Debug, Serialize)]
pub struct Oracle {
    pub samples: usize,
    pub bullet_dim: usize,
    pub invariant_dim: usize,
    pub comparison: Comparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// Distances relative to the witness norm.
    pub kin_distance: f64,
    pub dyn_distance: f64,
    /// Largest relative change under sampled rce in the region's causal
    /// complement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rce_residual: Option<f64>,
    /// Dimension of `dyn` over `kin + locally constant`, when the witness
    /// is the constant solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub with_constants: Option<Comparison>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: String,
    pub claim: String,
    pub theory: Theory,
    pub quantization: Quantization,
    pub mass: f64,
    pub grid: Grid,
    pub region: RegionSpec,
    pub seed: u64,
    pub tolerance: f64,
    pub generators: usize,
    pub dim_kin: usize,
    pub dim_dyn: usize,
    pub classical: Comparison,
    pub verdict: Verdict,
    pub expected: Expectation,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<poly::check::QuantizedVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl: Option<weyl::check::WeylVerdict>,
}

/// Report plus the solution field of the witness, if any.
pub struct Outcome {
    pub report: Report,
    pub witness_field: Option<crate::kg::GridField>,
}

fn ctx<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Scenario { .. } => e,
        other => Error::Scenario { name: name.into(), msg: other.to_string() },
    })
}

impl Scenario {
    /// Scale every tolerance by `k`.
    pub fn scale_tolerance(&mut self, k: f64) {
        self.tolerance *= k;
    }

    pub fn validate(&self) -> Result<LatticeSpacetime> {
        if self.mass < 0.0 || !self.mass.is_finite() {
            return Err(Error::Scenario { name: self.name.clone(), msg: format!("bad mass {}", self.mass) });
        }
        if self.theory == Theory::Current && self.mass != 0.0 {
            return Err(Error::Scenario { name: self.name.clone(), msg: "the current needs m = 0".into() });
        }
        ctx(&self.name, LatticeSpacetime::build(&self.spacetime))
    }

    pub fn run(&self) -> Result<Outcome> {
        ctx(&self.name, self.run_inner())
    }

    fn run_inner(&self) -> Result<Outcome> {
        let m = self.validate()?;
        let ps = PhaseSpace::new(&m, self.mass);
        let o = self.region.build(&m)?;
        let gens = lattice::enumerate_kb(&m, &o)?;
        let (kin, bullets) = match self.theory {
            Theory::Scalar => (ps.kin_subspace(&o)?, gens.iter().map(|k| ps.bullet_subspace(k)).collect::<Vec<_>>()),
            Theory::Current => (
                current::current_kin(&ps, &o)?,
                gens.iter().map(|k| current::current_bullet(&ps, k)).collect::<Result<Vec<_>>>()?,
            ),
        };
        let mut dyn_ = match self.theory {
            Theory::Scalar => PhaseSubspace::zero(ps.level, ps.dim()),
            Theory::Current => ps.locally_constant(),
        };
        for b in &bullets {
            dyn_ = dyn_.join(b);
        }
        let classical = locality::compare(&kin, &dyn_, self.tolerance)?;

        let mut witness = None;
        let mut witness_field = None;
        let lc = ps.locally_constant();
        if self.theory == Theory::Scalar && classical.verdict == Verdict::AStrictlyInB && lc.dim() > 0 {
            let c: Vec<f64> = lc.basis.column(0).iter().cloned().collect();
            witness = Some(Witness {
                kin_distance: kin.distance(&c),
                dyn_distance: dyn_.distance(&c),
                rce_residual: None,
                with_constants: Some(locality::compare(&kin.join(&lc), &dyn_, self.tolerance)?),
            });
            witness_field = Some(ps.field(&c));
        }
        if self.theory == Theory::Current && o.bases.len() == 2 {
            let (mut l, mut r) = (o.bases[0], o.bases[1]);
            if l.x0 > r.x0 {
                std::mem::swap(&mut l, &mut r);
            }
            let v = current::plateau_witness(&ps, l, r)?;
            let n = norm(&v);
            let rce_residual = if self.samples > 0 {
                let hs = sampler::sample_perturbations(&m, &o, self.samples, self.seed)?;
                let cache = ps.rce_cache();
                let col = crate::linalg::RMat::from_column_slice(v.len(), 1, &v);
                let mut worst = 0.0f64;
                for h in &hs {
                    let g = ps.rce_matrix(h, &cache)?;
                    worst = worst.max((&g * &col - &col).norm() / n);
                }
                Some(worst)
            } else {
                None
            };
            witness = Some(Witness {
                kin_distance: kin.distance(&v) / n,
                dyn_distance: dyn_.distance(&v) / n,
                rce_residual,
                with_constants: None,
            });
            witness_field = Some(ps.field(&v));
        }

        let oracle = if self.samples > 0 && self.quantization == Quantization::None {
            let k = gens.iter().max_by_key(|k| (k.count(), std::cmp::Reverse(k.bases.clone()))).expect("generators");
            let hs = sampler::sample_perturbations(&m, k, self.samples, self.seed)?;
            let inv = ps.rce_invariant_subspace(&hs)?;
            let b = ps.bullet_subspace(k);
            Some(Oracle {
                samples: hs.len(),
                bullet_dim: b.dim(),
                invariant_dim: inv.dim(),
                comparison: locality::compare(&b, &inv, self.tolerance)?,
            })
        } else {
            None
        };

        let (verdict, poly, weyl) = match self.quantization {
            Quantization::None => (classical.verdict, None, None),
            Quantization::Poly => {
                let q = poly::check::quantized_verdict(&kin, &dyn_, QUANTIZED_DEGREE)?;
                (q.verdict, Some(q), None)
            }
            Quantization::Weyl => {
                let w = weyl::check::weyl_verdict(&ps, &kin, &bullets, self.seed)?;
                (w.verdict, None, Some(w))
            }
        };
        let gap = dyn_.dim() as isize - kin.dim() as isize;
        let matches = verdict == self.expect.verdict
            && self.expect.gap.map_or(true, |g| gap == g as isize)
            && (self.quantization == Quantization::None || verdict == classical.verdict);
        let report = Report {
            schema: SCHEMA,
            scenario: self.name.clone(),
            claim: self.claim.clone(),
            theory: self.theory,
            quantization: self.quantization,
            mass: self.mass,
            grid: Grid { topology: m.topology, nx: m.nx, nt: m.nt, phase_dim: ps.dim() },
            region: self.region.clone(),
            seed: self.seed,
            tolerance: self.tolerance,
            generators: gens.len(),
            dim_kin: kin.dim(),
            dim_dyn: dyn_.dim(),
            verdict,
            expected: self.expect.clone(),
            matches,
            classical,
            witness,
            oracle,
            poly,
            weyl,
        };
        Ok(Outcome { report, witness_field })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
