//! Closed forms and optimizers checked against the brute-force oracle layer.

use entanglekit::distillation::{self, bbpssw_purity_step};
use entanglekit::geometry::{self, Witness};
use entanglekit::measures;
use entanglekit::nonlocality::{self, ChshSettings, ProbabilityTable};
use entanglekit::oracle;
use entanglekit::simplex::{self, SimplexPoint2x2};
use entanglekit::states::{self, Bell, DensityMatrix, PureState, WernerParam};
use entanglekit::{linalg, ComplexMatrix};
use rand::Rng;

fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[test]
fn chsh_max_agrees_with_brute_force() {
    for seed in 0..12u64 {
        let rho = states::random_density(2, 2, 1 + seed as usize % 4, seed).unwrap();
        let closed = nonlocality::chsh_max(&rho).unwrap();
        let (brute, settings) = oracle::chsh_brute_force(&rho, 8).unwrap();
        assert!((closed - brute).abs() < 1e-4, "seed {seed}: {closed} vs {brute}");
        assert!((nonlocality::chsh_value(&rho, &settings).unwrap() - brute).abs() < 1e-12);
    }
}

#[test]
fn chsh_max_bounds_sampled_settings() {
    let mut rng = states::rng_from_seed(3);
    for seed in 0..10u64 {
        let rho = states::random_density(2, 2, 2, seed).unwrap();
        let m = nonlocality::chsh_max(&rho).unwrap();
        for _ in 0..1000 {
            let s = ChshSettings::new(random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng))
                .unwrap();
            assert!(nonlocality::chsh_value(&rho, &s).unwrap() <= m + 1e-8);
        }
    }
}

#[test]
fn separable_states_satisfy_chsh() {
    let mut rng = states::rng_from_seed(4);
    for _ in 0..1000 {
        let terms = rng.random_range(1..6);
        let rho = states::random_separable(2, 2, terms, &mut rng);
        assert!(nonlocality::chsh_max(&rho).unwrap() <= 2.0 + 1e-9);
    }
}

#[test]
fn correlation_expansion_oracle() {
    let mut rng = states::rng_from_seed(5);
    let rho = states::random_density(2, 2, 4, 5).unwrap();
    for _ in 0..50 {
        let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
        let x = nonlocality::correlation(&rho, &a, &b);
        assert!((x - oracle::correlation_by_expansion(&rho, &a, &b)).abs() < 1e-12);
    }
}

#[test]
fn product_minimum_agrees_with_grid() {
    for seed in 0..6u64 {
        let mut rng = states::rng_from_seed(seed);
        let v = states::random_vector(16, &mut rng);
        let m = ComplexMatrix::from_fn(4, 4, |i, j| v[i * 4 + j]);
        let w = Witness::new(linalg::hermitian_part(&m), 2, 2).unwrap();
        let search = geometry::min_product_expectation(&w);
        let grid = oracle::min_product_grid_2x2(&w.op, 24);
        assert!(search <= grid + 1e-12, "seed {seed}: {search} > {grid}");
        assert!(grid - search < 5e-3, "seed {seed}: {search} vs {grid}");
    }
}

#[test]
fn bell_witnesses_are_nonnegative_on_products() {
    let mut rng = states::rng_from_seed(6);
    for _ in 0..20 {
        let s = ChshSettings::new(random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng))
            .unwrap();
        let w = nonlocality::witness_from_bell(&nonlocality::bell_operator_chsh(&s).unwrap()).unwrap();
        assert!(w.verified);
        assert!(oracle::min_product_grid_2x2(&w.op, 12) >= -1e-7);
    }
}

#[test]
fn fef_agrees_with_grid() {
    for seed in 20..26u64 {
        let rho = states::random_density(2, 2, 1 + seed as usize % 4, seed).unwrap();
        let opt = measures::fully_entangled_fraction(&rho).unwrap();
        let grid = oracle::fef_grid_2x2(&rho, 36);
        assert!(grid <= opt + 1e-12 && opt - grid < 1e-2, "seed {seed}: {opt} vs {grid}");
        assert!((0.25 - 1e-12..=1.0).contains(&opt));
    }
}

#[test]
fn concurrence_agrees_with_bell_diagonal_oracle() {
    let mut rng = states::rng_from_seed(7);
    for _ in 0..200 {
        let mut w: [f64; 4] = [0.0; 4];
        for x in w.iter_mut() {
            *x = -(1.0 - rng.random::<f64>()).ln();
        }
        let total: f64 = w.iter().sum();
        let w = w.map(|x| x / total);
        let p = SimplexPoint2x2 { weights: w };
        let rho = simplex::bell_diagonal(&p).unwrap();
        let c = measures::concurrence_2q(&rho).unwrap();
        assert!((c - oracle::concurrence_bell_diagonal(&w)).abs() < 1e-8);
    }
}

fn random_bases(d: usize, rng: &mut impl Rng) -> [ComplexMatrix; 2] {
    [states::random_unitary(d, rng), states::random_unitary(d, rng)]
}

#[test]
fn cglmp_local_bounds_hold_for_separable_states() {
    let mut rng = states::rng_from_seed(8);
    for d in [2usize, 3] {
        for _ in 0..200 {
            let rho = states::random_separable(d, d, rng.random_range(1..5), &mut rng);
            let t = nonlocality::probability_table(&rho, &random_bases(d, &mut rng), &random_bases(d, &mut rng)).unwrap();
            assert!(nonlocality::cglmp_value(&t) <= nonlocality::cglmp_local_bound(d) + 1e-9);
        }
        let max = oracle::cglmp_deterministic_max(d);
        assert!((max - nonlocality::cglmp_local_bound(d)).abs() < 1e-12);
    }
    assert_eq!(nonlocality::cglmp_value(&ProbabilityTable::uniform(2)), 2.0);
}

#[test]
fn twirling_never_increases_concurrence() {
    for seed in 0..100u64 {
        let rho = states::random_density(2, 2, 1 + seed as usize % 4, seed).unwrap();
        let w = distillation::twirl(&rho, Bell::PsiMinus).unwrap();
        let (c0, c1) = (measures::concurrence_2q(&rho).unwrap(), measures::concurrence_2q(&w).unwrap());
        assert!(c1 <= c0 + 1e-8, "seed {seed}: {c1} > {c0}");
    }
}

#[test]
fn purity_map_has_only_the_expected_fixed_points() {
    // interior fixed points are the maximally mixed point 1/4 and the threshold 1/2
    let n = 20_000;
    let mut crossings = Vec::new();
    let mut prev_sign = None;
    for k in 1..n {
        let f = k as f64 / n as f64;
        let (next, _) = bbpssw_purity_step(WernerParam::new(f).unwrap());
        let diff = next.value() - f;
        let sign = diff > 0.0;
        if let Some(p) = prev_sign {
            if p != sign {
                crossings.push(f);
            }
        }
        prev_sign = Some(sign);
    }
    assert_eq!(crossings.len(), 2, "{crossings:?}");
    assert!((crossings[0] - 0.25).abs() < 2.0 / n as f64);
    assert!((crossings[1] - 0.5).abs() < 2.0 / n as f64);
}

#[test]
fn nearest_ppt_witness_is_optimal_for_npt_two_qubit_states() {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 20 {
        seed += 1;
        let rho = states::random_density(2, 2, 1 + seed as usize % 4, seed).unwrap();
        if entanglekit::criteria::is_ppt(&rho).0 {
            continue;
        }
        let n = geometry::nearest_ppt_state(&rho);
        assert!(n.min_pt_eigenvalue(2, 2).unwrap() >= -1e-10);
        let w = n.witness(&rho).unwrap();
        assert!(w.expectation(&rho) < 0.0);
        assert!(oracle::min_product_grid_2x2(&w.op, 16) >= -1e-3);
        checked += 1;
    }
}

#[test]
fn pure_state_robustness_matches_closed_form() {
    // for α|00⟩+β|11⟩ the minimum partial-transpose eigenvalue is −αβ
    for k in 1..10 {
        let a = k as f64 / 10.0;
        let b = (1.0 - a * a).sqrt();
        let rho = states::from_pure(&PureState::from_real(&[a, 0.0, 0.0, b], 2, 2).unwrap());
        let r = measures::random_robustness(&rho);
        assert!((r.value - 4.0 * a * b).abs() < 2e-9);
        let noisy = measures::noisy(&rho, r.value).unwrap();
        assert!(entanglekit::criteria::is_ppt(&noisy).0);
    }
    let mixed = DensityMatrix::maximally_mixed(2, 2);
    assert_eq!(measures::random_robustness(&mixed).value, 0.0);
}
