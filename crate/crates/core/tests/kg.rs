use dynloc::kg::{io, stress, GridField, Kind, Solver};
use dynloc::lattice::{self, LatticeSpacetime, MetricPerturbation, MetricSpec, Region, Topology};
use dynloc::scenario;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(top: Topology, nx: usize) -> LatticeSpacetime {
    LatticeSpacetime::build(&scenario::grid(top, nx, scenario::static_metric())).unwrap()
}

/// Random complex source on a block in the middle of the window.
fn source(m: &LatticeSpacetime, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t0, x0) = (rng.gen_range(m.nt / 4..m.nt / 2), rng.gen_range(m.nx / 4..m.nx / 2));
    let (lt, lx) = (rng.gen_range(1..m.nt / 4), rng.gen_range(1..m.nx / 4));
    GridField::from_fn(m, |it, ix| {
        if (t0..t0 + lt).contains(&it) && (x0..x0 + lx).contains(&ix) {
            Complex64::new(rng_val(seed, it, ix), rng_val(seed + 1, it, ix))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn rng_val(seed: u64, it: usize, ix: usize) -> f64 {
    ChaCha8Rng::seed_from_u64(seed ^ ((it as u64) << 20) ^ ix as u64).gen_range(-1.0..1.0)
}

fn top() -> impl Strategy<Value = Topology> {
    prop_oneof![Just(Topology::Line), Just(Topology::Circle)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagator_gives_solutions_supported_in_the_shadow(t in top(), seed in 0u64..1000, mass in 0.0f64..2.0) {
        let m = space(t, 32);
        let s = Solver::new(&m, mass);
        let f = source(&m, seed);
        let ef = s.propagator(&f).unwrap();
        prop_assert!(s.is_solution(&ef));
        let shadow = lattice::causal_shadow(&m, &f.support(&m));
        prop_assert!(ef.support(&m).is_subset_of(&shadow));
    }

    #[test]
    fn pairing_is_antisymmetric_and_sigma_is_conserved(t in top(), seed in 0u64..1000, mass in 0.0f64..2.0) {
        let m = space(t, 32);
        let s = Solver::new(&m, mass);
        let (f, g) = (source(&m, seed), source(&m, seed + 7));
        let (fg, gf) = (s.pairing(&f, &g).unwrap(), s.pairing(&g, &f).unwrap());
        prop_assert!((fg + gf).norm() <= 1e-12 * (1.0 + fg.norm()));
        let (ef, eg) = (s.propagator(&f).unwrap(), s.propagator(&g).unwrap());
        let first = s.symplectic_form(&ef, &eg, 1).unwrap();
        let last = s.symplectic_form(&ef, &eg, m.nt - 2).unwrap();
        prop_assert!((first - last).norm() <= 1e-12 * (1.0 + first.norm()));
    }
}

#[test]
fn retarded_solution_vanishes_before_the_source() {
    let m = space(Topology::Circle, 32);
    let s = Solver::new(&m, 1.0);
    let f = source(&m, 3);
    let (lo, _) = f.support(&m).level_range().unwrap();
    let ret = s.fundamental_solution(&f, Kind::Retarded).unwrap();
    assert!((0..lo).all(|it| (0..m.nx).all(|ix| ret.at(it, ix).norm() == 0.0)));
}

#[test]
fn sources_on_edge_levels_are_refused() {
    let m = space(Topology::Line, 16);
    let s = Solver::new(&m, 1.0);
    let mut f = GridField::zeros(m.nt, m.nx);
    f.values[3] = Complex64::new(1.0, 0.0);
    assert!(s.propagator(&f).is_err());
}

#[test]
fn zero_perturbation_gives_identity_rce() {
    let m = space(Topology::Circle, 32);
    let s = Solver::new(&m, 0.5);
    let ef = s.propagator(&source(&m, 9)).unwrap();
    let back = s.rce(&MetricPerturbation::zero(&m), &ef).unwrap();
    assert!(back.sub(&ef).max_abs() <= 1e-12 * ef.max_abs());
}

#[test]
fn rce_is_trivial_on_solutions_supported_away_from_the_perturbation() {
    let m = LatticeSpacetime::build(&scenario::grid(Topology::Line, 64, MetricSpec::Minkowski)).unwrap();
    let s = Solver::new(&m, 1.0);
    // a narrow source near the left end, a perturbation near the right end
    let f = GridField::from_fn(&m, |it, ix| Complex64::new(if it == 60 && (8..12).contains(&ix) { 1.0 } else { 0.0 }, 0.0));
    let ef = s.propagator(&f).unwrap();
    let h = MetricPerturbation::from_bumps(
        &m,
        &[lattice::BumpSpec { component: lattice::Component::Tt, amp: 0.05, t: 64.0, x: 56.0, rt: 4.0, rx: 4.0 }],
    );
    assert!(!h.support(&m).intersects(&ef.support(&m)));
    let moved = s.rce(&h, &ef).unwrap();
    assert!(moved.sub(&ef).max_abs() <= 1e-12 * ef.max_abs());
}

#[test]
fn stress_contraction_vanishes_for_perturbations_outside_the_field() {
    let m = space(Topology::Circle, 32);
    let s = Solver::new(&m, 1.0);
    let phi = GridField::from_fn(&m, |it, ix| {
        Complex64::new(if (28..36).contains(&it) && (4..8).contains(&ix) { 1.0 } else { 0.0 }, 0.0)
    });
    let t = stress::stress_energy(&s, &phi, &phi.conj());
    let far = MetricPerturbation::from_bumps(
        &m,
        &[lattice::BumpSpec { component: lattice::Component::Xx, amp: 0.1, t: 32.0, x: 22.0, rt: 3.0, rx: 3.0 }],
    );
    assert_eq!(stress::contract_integral(&s, &far, &t).norm(), 0.0);
}

#[test]
fn csv_and_binary_round_trip() {
    let m = space(Topology::Line, 8);
    let f = source(&m, 5);
    let mut buf = Vec::new();
    io::write_csv(&f, &mut buf).unwrap();
    assert_eq!(io::read_csv(&buf[..]).unwrap(), f);
    let mut bin = Vec::new();
    io::write_binary(&f, "phi", &mut bin).unwrap();
    let (_, back) = io::read_binary(&bin[..]).unwrap();
    assert_eq!(back, f);
}

#[test]
fn region_support_of_a_source_is_its_block() {
    let m = space(Topology::Circle, 16);
    let f = GridField::from_fn(&m, |it, ix| Complex64::new(if it == 5 && ix == 3 { 2.0 } else { 0.0 }, 0.0));
    let r = f.support(&m);
    assert_eq!(r.count(), 1);
    assert!(r.is_subset_of(&Region::from_sites(&m, &[(5, 3)])));
}
