//! Brute-force reference computations used to cross-check the closed forms
//! and optimizers elsewhere in the crate. They are slow by design.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bases;
use crate::error::Result;
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::nonlocality::{self, ChshSettings, ProbabilityTable};
use crate::states::DensityMatrix;

fn sphere(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn unit3(v: [f64; 3], fallback: [f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    if n > 1e-14 { [v[0] / n, v[1] / n, v[2] / n] } else { fallback }
}

/// Correlations `K[i][j] = tr(ρ σᵢ⊗σⱼ)` from explicit traces.
fn correlations(rho: &DensityMatrix) -> [[f64; 3]; 3] {
    let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = nonlocality::correlation(rho, &e[i], &e[j]);
        }
    }
    k
}

fn apply(k: &[[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| k[i][0] * b[0] + k[i][1] * b[1] + k[i][2] * b[2])
}

/// For fixed Bob directions the best Alice directions are explicit; returns the value and settings.
fn best_for_bob(k: &[[f64; 3]; 3], angles: [f64; 4]) -> (f64, ChshSettings) {
    let b1 = sphere(angles[0], angles[1]);
    let b2 = sphere(angles[2], angles[3]);
    let v = apply(k, [b1[0] - b2[0], b1[1] - b2[1], b1[2] - b2[2]]);
    let w = apply(k, [b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]]);
    let settings = ChshSettings {
        a1: unit3(v, [0.0, 0.0, 1.0]),
        a2: unit3(w, [1.0, 0.0, 0.0]),
        b1,
        b2,
    };
    (norm3(v) + norm3(w), settings)
}

/// Maximize the CHSH value by an angle grid over Bob's two directions
/// (`n` polar by `2n` azimuthal steps each), optimal Alice directions at each
/// point, then compass-search refinement of the best grid points.
pub fn chsh_brute_force(rho: &DensityMatrix, n: usize) -> Result<(f64, ChshSettings)> {
    let k = correlations(rho);
    let n = n.max(2);
    let thetas: Vec<f64> = (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect();
    let phis: Vec<f64> = (0..2 * n).map(|i| PI * i as f64 / n as f64).collect();
    let mut dirs = Vec::with_capacity(thetas.len() * phis.len());
    for &t in &thetas {
        for &p in &phis {
            dirs.push((t, p));
        }
    }
    let mut candidates: Vec<(f64, [f64; 4])> = Vec::new();
    for &(t1, p1) in &dirs {
        for &(t2, p2) in &dirs {
            let a = [t1, p1, t2, p2];
            candidates.push((best_for_bob(&k, a).0, a));
        }
    }
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut best = (f64::NEG_INFINITY, ChshSettings::planar_optimal());
    for &(_, start) in candidates.iter().take(8) {
        let refined = compass(&k, start, PI / n as f64);
        if refined.0 > best.0 {
            best = refined;
        }
    }
    // confirm with the direct evaluation
    let value = nonlocality::chsh_value(rho, &best.1)?;
    Ok((value, best.1))
}

fn compass(k: &[[f64; 3]; 3], mut x: [f64; 4], mut step: f64) -> (f64, ChshSettings) {
    let mut fx = best_for_bob(k, x).0;
    while step > 1e-10 {
        let mut improved = false;
        for i in 0..4 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[i] += sign * step;
                let fy = best_for_bob(k, y).0;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_for_bob(k, x)
}

/// Largest CGLMP value over all `d⁴` deterministic local strategies.
pub fn cglmp_deterministic_max(d: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for a1 in 0..d {
        for a2 in 0..d {
            for b1 in 0..d {
                for b2 in 0..d {
                    let t = ProbabilityTable::deterministic(d, [a1, a2], [b1, b2]);
                    best = best.max(nonlocality::cglmp_value(&t));
                }
            }
        }
    }
    best
}

/// `SU(2)` element `[[cos t·e^{ia}, −sin t·e^{ib}], [sin t·e^{−ib}, cos t·e^{−ia}]]`.
fn su2(t: f64, a: f64, b: f64) -> ComplexMatrix {
    let (s, c) = t.sin_cos();
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(c, a),
            -Complex64::from_polar(s, b),
            Complex64::from_polar(s, -b),
            Complex64::from_polar(c, -a),
        ],
    )
}

/// Fully entangled fraction of a two-qubit state on an `n³` grid over `SU(2)`.
pub fn fef_grid_2x2(rho: &DensityMatrix, n: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n {
        let t = 0.5 * PI * i as f64 / n as f64;
        for j in 0..n {
            let a = 2.0 * PI * j as f64 / n as f64;
            for l in 0..n {
                let b = 2.0 * PI * l as f64 / n as f64;
                let u = su2(t, a, b);
                let v = ComplexVector::from_fn(4, |r, _| u[(r / 2, r % 2)]);
                best = best.max(linalg::expectation(rho.matrix(), &v) / 2.0);
            }
        }
    }
    best
}

/// `min ⟨a⊗b|W|a⊗b⟩` over qubit pure states on an `n × 2n` Bloch-sphere grid per side.
pub fn min_product_grid_2x2(w: &ComplexMatrix, n: usize) -> f64 {
    let mut kets = Vec::new();
    for i in 0..=n {
        let theta = PI * i as f64 / n as f64;
        for j in 0..2 * n {
            let phi = PI * j as f64 / n as f64;
            kets.push(ComplexVector::from_vec(vec![
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]));
        }
    }
    let mut best = f64::INFINITY;
    for a in &kets {
        for b in &kets {
            best = best.min(linalg::expectation(w, &linalg::tensor_vec(a, b)));
        }
    }
    best
}

/// Concurrence of a Bell-diagonal state: `max(0, 2·max weight − 1)`.
pub fn concurrence_bell_diagonal(weights: &[f64; 4]) -> f64 {
    let m = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (2.0 * m - 1.0).max(0.0)
}

/// `E(a,b)` for unit vectors via the Pauli expansion `Σ aᵢ bⱼ tr(ρ σᵢ⊗σⱼ)`.
pub fn correlation_by_expansion(rho: &DensityMatrix, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let s = [
        bases::pauli(1).expect("index 1"),
        bases::pauli(2).expect("index 2"),
        bases::pauli(3).expect("index 3"),
    ];
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            total += a[i] * b[j] * linalg::trace_product(rho.matrix(), &linalg::tensor(&s[i], &s[j])).re;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures;
    use crate::states::{self, Bell, PureState};

    #[test]
    fn brute_force_chsh_singlet_and_product() {
        let singlet = states::from_pure(&states::bell_state(Bell::PsiMinus));
        let (v, _) = chsh_brute_force(&singlet, 8).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        let up = states::from_pure(&PureState::from_real(&[1.0, 0.0, 0.0, 0.0], 2, 2).unwrap());
        let (v, _) = chsh_brute_force(&up, 8).unwrap();
        assert!(v <= 2.0 + 1e-9);
    }

    #[test]
    fn deterministic_cglmp_maxima() {
        assert_eq!(cglmp_deterministic_max(2), 3.0);
        for d in 3..=5 {
            assert!((cglmp_deterministic_max(d) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_fef_matches_known_values() {
        let up = states::from_pure(&PureState::from_real(&[1.0, 0.0, 0.0, 0.0], 2, 2).unwrap());
        assert!((fef_grid_2x2(&up, 24) - 0.5).abs() < 1e-9);
        let rho = states::random_density(2, 2, 2, 11).unwrap();
        let grid = fef_grid_2x2(&rho, 40);
        let opt = measures::fully_entangled_fraction(&rho).unwrap();
        assert!(grid <= opt + 1e-12 && opt - grid < 5e-3);
    }

    #[test]
    fn expansion_matches_operator_correlation() {
        let rho = states::random_density(2, 2, 3, 12).unwrap();
        let a = [0.6, 0.0, 0.8];
        let b = [0.0, -0.28, 0.96];
        let direct = nonlocality::correlation(&rho, &a, &b);
        assert!((correlation_by_expansion(&rho, &a, &b) - direct).abs() < 1e-12);
    }
}
