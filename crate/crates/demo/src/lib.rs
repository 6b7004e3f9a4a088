//! Browser demo on small lattices: the field of a point source, the causal
//! cone of a node, and the kin/dyn verdict of a scenario. Every export
//! returns plain data so the page can draw it on a canvas.

use dynloc::kg::{GridField, Solver};
use dynloc::lattice::{self, LatticeSpacetime, Region, Topology};
use dynloc::scenario::{self, Quantization, Shape, Theory};
use dynloc::locality::Verdict;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

/// Lattices above this size are refused to keep the page responsive.
pub const MAX_NX: usize = 48;

fn topology(circle: bool) -> Topology {
    if circle {
        Topology::Circle
    } else {
        Topology::Line
    }
}

fn spacetime(nx: usize, circle: bool) -> Result<LatticeSpacetime, String> {
    if !(8..=MAX_NX).contains(&nx) {
        return Err(format!("nx must lie in 8..={MAX_NX}"));
    }
    LatticeSpacetime::build(&scenario::grid(topology(circle), nx, scenario::static_metric())).map_err(|e| e.to_string())
}

/// Real part of `E f` for a unit source at node `(it, ix)`, row-major over
/// the `2 nx` levels.
#[wasm_bindgen]
pub fn point_source_field(nx: usize, mass: f64, circle: bool, it: usize, ix: usize) -> Result<Vec<f64>, String> {
    let m = spacetime(nx, circle)?;
    if it >= m.nt || ix >= m.nx {
        return Err("source outside the grid".into());
    }
    let s = Solver::new(&m, mass);
    let mut f = GridField::zeros(m.nt, m.nx);
    f.values[m.node(it, ix)] = Complex64::new(1.0, 0.0);
    s.propagator(&f).map(|e| e.re()).map_err(|e| e.to_string())
}

/// Per node: 1 in the future of `(it, ix)`, 2 in its past, 3 in the causal
/// complement, 0 on the one-cell collar in between, 4 the node itself.
#[wasm_bindgen]
pub fn causal_cone(nx: usize, circle: bool, it: usize, ix: usize) -> Result<Vec<u8>, String> {
    let m = spacetime(nx, circle)?;
    if it >= m.nt || ix >= m.nx {
        return Err("node outside the grid".into());
    }
    let k = Region::from_sites(&m, &[(it, ix)]);
    let fut = lattice::causal_future(&m, &k);
    let past = lattice::causal_past(&m, &k);
    let perp = lattice::causal_complement(&m, &k);
    let mut out = vec![0u8; m.len()];
    for t in 0..m.nt {
        for x in 0..m.nx {
            out[m.node(t, x)] = if (t, x) == (it, ix) {
                4
            } else if fut.contains(t, x) {
                1
            } else if past.contains(t, x) {
                2
            } else if perp.contains(t, x) {
                3
            } else {
                0
            };
        }
    }
    Ok(out)
}

/// Kin/dyn comparison for the scalar field (or the current if `current`)
/// on a region shape ("centered", "wide", "pair"). Returns a short JSON
/// summary.
#[wasm_bindgen]
pub fn locality_verdict(nx: usize, mass: f64, circle: bool, shape: &str, current: bool) -> Result<String, String> {
    spacetime(nx, circle)?;
    let shape = match shape {
        "centered" => Shape::Centered,
        "wide" => Shape::Wide,
        "pair" => Shape::Pair,
        other => return Err(format!("unknown shape {other}")),
    };
    let theory = if current { Theory::Current } else { Theory::Scalar };
    let expect = scenario::Expectation { verdict: Verdict::Equal, gap: None };
    let mut s = scenario::make("demo", "", topology(circle), nx, mass, theory, Quantization::None, shape, expect);
    s.samples = 0;
    let r = s.run().map_err(|e| e.to_string())?.report;
    let summary = serde_json::json!({
        "verdict": r.verdict,
        "dim_kin": r.dim_kin,
        "dim_dyn": r.dim_dyn,
        "phase_dim": r.grid.phase_dim,
        "generators": r.generators,
        "witness_kin_distance": r.witness.as_ref().map(|w| w.kin_distance),
    });
    Ok(summary.to_string())
}
