//! Random metric perturbations supported in the causal complement of a
//! region.
//!
//! Each sample covers every connected component of the admissible part of
//! `K^perp` with a plateau that drops to a third of its height on the
//! component's rim, modulated by a random plane wave, on both diagonal
//! metric components. Amplitudes cycle through three fractions of the
//! smallest signature margin.

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeSpacetime, MetricPerturbation, Region, Topology, EDGE_LEVELS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Fractions of the signature margin used as peak amplitudes.
pub const AMPLITUDES: [f64; 3] = [0.08, 0.14, 0.2];
/// Default number of samples.
pub const DEFAULT_SAMPLES: usize = 9;

/// Nodes of `K^perp` where a perturbation is allowed.
pub fn admissible(m: &LatticeSpacetime, k: &Region) -> Region {
    let mut r = lattice::causal_complement(m, k);
    let margin = lattice::line_margin(m);
    for (it, ix) in r.sites() {
        let edge = it <= EDGE_LEVELS || it + EDGE_LEVELS + 1 >= m.nt;
        let side = m.topology == Topology::Line && (ix < margin || ix + margin >= m.nx);
        if edge || side {
            r.mask[it * m.nx + ix] = false;
        }
    }
    r
}

/// Chebyshev distance from each node of `r` to the nearest node outside it.
fn depth(m: &LatticeSpacetime, r: &Region) -> Vec<usize> {
    let mut d = vec![usize::MAX; m.len()];
    let mut queue = VecDeque::new();
    for k in 0..m.len() {
        if !r.mask[k] {
            d[k] = 0;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        let (it, ix) = (k / m.nx, k % m.nx);
        for dt in -1isize..=1 {
            let jt = it as isize + dt;
            if jt < 0 || jt >= m.nt as isize {
                continue;
            }
            for dx in -1isize..=1 {
                if let Some(jx) = m.shift(ix, dx) {
                    let q = jt as usize * m.nx + jx;
                    if d[q] == usize::MAX {
                        d[q] = d[k] + 1;
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    d
}

pub fn sample_perturbations(
    m: &LatticeSpacetime,
    k: &Region,
    count: usize,
    seed: u64,
) -> Result<Vec<MetricPerturbation>> {
    let allowed = admissible(m, k);
    if allowed.is_empty() {
        return Err(Error::Region("no admissible perturbation support outside J(K)".into()));
    }
    let comps = allowed.components(m);
    let depth = depth(m, &allowed);
    let margin = m.metric.iter().map(lattice::signature_margin).fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for s in 0..count {
        let amp = AMPLITUDES[s % AMPLITUDES.len()] * margin;
        let mut h = MetricPerturbation::zero(m);
        for c in &comps {
            let mut wave = [[0.0; 4]; 2];
            for w in wave.iter_mut() {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                *w = [sign, rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5), rng.gen_range(0.0..std::f64::consts::TAU)];
            }
            for (it, ix) in c.sites() {
                let node = it * m.nx + ix;
                let plateau = ((depth[node] as f64) / 3.0).min(1.0);
                for (comp, w) in [0usize, 2].into_iter().zip(&wave) {
                    let phase = w[1] * it as f64 + w[2] * ix as f64 + w[3];
                    h.h[node][comp] = w[0] * amp * plateau * (1.0 + 0.4 * phase.sin()) / 1.4;
                }
            }
        }
        lattice::perturb(m, &h)?;
        out.push(h);
    }
    Ok(out)
}
