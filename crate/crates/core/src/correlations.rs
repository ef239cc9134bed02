//! Entanglement, mutual information, classical correlations and discord of
//! the two-qubit states produced by the engines. Entropies are in bits.
//!
//! Classical correlations are defined by projective measurements on qubit 2.
//! [`classical_closed`] is the value for a measurement in the computational
//! basis, which depends on the populations only; [`classical_optimized`]
//! searches the whole family of projective measurements.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::XStateDensity;

type C = Complex64;

const HERMITIAN_TOL: f64 = 1e-10;
const EIG_CLIP: f64 = 1e-12;

/// `-x log2 x` with the `0 log 0 = 0` convention and tiny negatives clipped.
fn eta(x: f64) -> f64 {
    if x <= EIG_CLIP {
        0.0
    } else {
        let x = x.min(1.0);
        -x * x.log2()
    }
}

/// Shannon entropy of a list of eigenvalues.
pub fn entropy_of(eigs: &[f64]) -> f64 {
    eigs.iter().map(|&l| eta(l)).sum()
}

pub fn von_neumann_entropy(rho: &DMatrix<C>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::InvalidParameter("density matrix must be square".into()));
    }
    let asym = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > HERMITIAN_TOL {
        return Err(Error::NonHermitian(asym));
    }
    let herm = (rho + rho.adjoint()).scale(0.5);
    let eigs = herm.symmetric_eigenvalues();
    Ok(entropy_of(eigs.as_slice()))
}

fn binary_entropy(p: f64) -> f64 {
    eta(p) + eta(1.0 - p)
}

/// Entropy of a 2x2 Hermitian positive matrix with trace `tr` (not
/// necessarily 1), returned for the normalized state.
fn entropy_2x2(a: f64, d: f64, b: C) -> f64 {
    let tr = a + d;
    if tr <= 0.0 {
        return 0.0;
    }
    let half = 0.5 * tr;
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    entropy_of(&[(half + r) / tr, (half - r) / tr])
}

pub fn concurrence(x: &XStateDensity) -> f64 {
    2.0 * x.z.norm()
}

/// Eigenvalues of the full two-qubit state: `p00`, `0` and the split pair
/// of the excited block.
pub fn xstate_eigenvalues(x: &XStateDensity) -> [f64; 4] {
    let m = 0.5 * (x.p10 + x.p01);
    let r = (0.25 * (x.p10 - x.p01).powi(2) + x.z.norm_sqr()).sqrt();
    [x.p00, 0.0, m + r, m - r]
}

pub fn mutual_information(x: &XStateDensity) -> f64 {
    let s1 = binary_entropy(x.p10);
    let s2 = binary_entropy(x.p01);
    s1 + s2 - entropy_of(&xstate_eigenvalues(x))
}

/// Classical correlations for a computational-basis measurement of qubit 2,
/// as a function of the excited populations alone.
pub fn classical_closed(p10: f64, p01: f64) -> f64 {
    let xlog = |x: f64| -eta(x);
    xlog(1.0 - p10 - p01) - xlog(1.0 - p10) - xlog(1.0 - p01)
}

/// Marginal entropy reduction of qubit 1 when qubit 2 is measured along
/// `{cos t |0> + e^{i f} sin t |1>, -e^{-i f} sin t |0> + cos t |1>}`.
pub fn measured_information(x: &XStateDensity, theta: f64, phi: f64) -> f64 {
    let (ct, st) = (theta.cos(), theta.sin());
    let outcomes = [
        (C::new(ct, 0.0), C::from_polar(st, phi)),
        (C::from_polar(-st, -phi), C::new(ct, 0.0)),
    ];
    let mut conditional = 0.0;
    for (k0, k1) in outcomes {
        let (a0, a1) = (k0.norm_sqr(), k1.norm_sqr());
        let m00 = x.p00 * a0 + x.p01 * a1;
        let m11 = x.p10 * a0;
        let m10 = x.z * k0.conj() * k1;
        let p = m00 + m11;
        if p > EIG_CLIP {
            conditional += p * entropy_2x2(m00, m11, m10);
        }
    }
    binary_entropy(x.p10) - conditional
}

/// Best measurement found by [`classical_optimized`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOptimum {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Grid resolution for the measurement search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for OptimizerGrid {
    fn default() -> Self {
        Self { n_theta: 64, n_phi: 64 }
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Supremum over projective measurements on qubit 2: a grid search over
/// `theta in [0, pi/2]`, `phi in [0, 2 pi)` (ties go to the lowest `theta`,
/// then the lowest `phi`), refined by golden-section search to 1e-8.
pub fn classical_optimized(x: &XStateDensity, grid: OptimizerGrid) -> Result<ClassicalOptimum> {
    if grid.n_theta < 64 || grid.n_phi < 64 {
        return Err(Error::InvalidParameter("optimizer grid must be at least 64 x 64".into()));
    }
    use std::f64::consts::{FRAC_PI_2, TAU};
    let dt = FRAC_PI_2 / (grid.n_theta - 1) as f64;
    let dp = TAU / grid.n_phi as f64;
    let mut best = ClassicalOptimum { value: f64::NEG_INFINITY, theta: 0.0, phi: 0.0 };
    for it in 0..grid.n_theta {
        let theta = it as f64 * dt;
        for ip in 0..grid.n_phi {
            let phi = ip as f64 * dp;
            let v = measured_information(x, theta, phi);
            if v > best.value {
                best = ClassicalOptimum { value: v, theta, phi };
            }
        }
    }
    for _ in 0..2 {
        let lo = (best.theta - dt).max(0.0);
        let hi = (best.theta + dt).min(FRAC_PI_2);
        let (t, v) = golden_max(|t| measured_information(x, t, best.phi), lo, hi, 1e-8);
        if v > best.value {
            best.theta = t;
            best.value = v;
        }
        let (p, v) = golden_max(|p| measured_information(x, best.theta, p), best.phi - dp, best.phi + dp, 1e-8);
        if v > best.value {
            best.phi = p.rem_euclid(TAU);
            best.value = v;
        }
    }
    // The interval endpoints are not sampled by the golden-section search.
    for t in [0.0, FRAC_PI_2] {
        let v = measured_information(x, t, best.phi);
        if v > best.value {
            best = ClassicalOptimum { value: v, theta: t, phi: best.phi };
        }
    }
    Ok(best)
}

/// Spread of the measured information over `n` equally spaced `phi` at fixed `theta`.
pub fn phi_slice_variation(x: &XStateDensity, theta: f64, n: usize) -> f64 {
    let vals: Vec<f64> = (0..n)
        .map(|k| measured_information(x, theta, std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// Discord with classical correlations taken in the computational basis.
pub fn discord(x: &XStateDensity) -> f64 {
    mutual_information(x) - classical_closed(x.p10, x.p01)
}

/// Discord with the optimized classical correlations.
pub fn discord_optimized(x: &XStateDensity, grid: OptimizerGrid) -> Result<f64> {
    Ok(mutual_information(x) - classical_optimized(x, grid)?.value)
}

/// Closed form of the discord for a state with excited block of rank one,
/// in terms of `|c1|^2` and `|c2|^2`.
pub fn discord_pure_branch(p1: f64, p2: f64) -> f64 {
    let term = |a: f64, b: f64| if a <= 0.0 { 0.0 } else { a * (1.0 + b / a).log2() };
    term(p1, p2) + term(p2, p1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub concurrence: f64,
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
}

impl CorrelationRecord {
    pub fn new(x: &XStateDensity) -> Self {
        let mutual_info = mutual_information(x);
        let classical = classical_closed(x.p10, x.p01);
        Self { concurrence: concurrence(x), mutual_info, classical, discord: mutual_info - classical }
    }

    pub fn optimized(x: &XStateDensity, grid: OptimizerGrid) -> Result<Self> {
        let mutual_info = mutual_information(x);
        let classical = classical_optimized(x, grid)?.value;
        Ok(Self { concurrence: concurrence(x), mutual_info, classical, discord: mutual_info - classical })
    }
}

/// Dense 4x4 form of the qubit-1 or qubit-2 marginal, for cross-checks.
pub fn marginal(x: &XStateDensity, qubit: crate::model::Qubit) -> Matrix2<C> {
    let p = match qubit {
        crate::model::Qubit::One => x.p10,
        crate::model::Qubit::Two => x.p01,
    };
    Matrix2::new(C::new(1.0 - p, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(p, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Qubit;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn xs(p00: f64, p01: f64, p10: f64, z: C) -> XStateDensity {
        XStateDensity::new(p00, p01, p10, z).unwrap()
    }

    fn dm(m: nalgebra::Matrix4<C>) -> DMatrix<C> {
        DMatrix::from_iterator(4, 4, m.iter().cloned())
    }

    fn pure_branch(p1: f64, p2: f64, chi: f64) -> XStateDensity {
        xs(1.0 - p1 - p2, p2, p1, C::from_polar((p1 * p2).sqrt(), chi))
    }

    #[test]
    fn entropy_examples() {
        let pure = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]);
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DMatrix::from_diagonal_element(2, 2, c(0.5, 0.0));
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.75, 0.0), c(0.25, 0.0)]));
        assert!((von_neumann_entropy(&d).unwrap() - 0.811278124459133).abs() < 1e-12);
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(von_neumann_entropy(&bad), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&xs(0.0, 0.5, 0.5, c(0.5, 0.0))) - 1.0).abs() < 1e-15);
        assert_eq!(concurrence(&xs(0.0, 0.0, 1.0, c(0.0, 0.0))), 0.0);
        assert!((concurrence(&xs(0.5, 0.25, 0.25, c(0.25, 0.0))) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        assert!((mutual_information(&xs(0.0, 0.5, 0.5, c(0.5, 0.0))) - 2.0).abs() < 1e-12);
        assert!(mutual_information(&xs(0.0, 0.0, 1.0, c(0.0, 0.0))).abs() < 1e-12);
        let x = xs(0.5, 0.25, 0.25, c(0.25, 0.0));
        let whole = von_neumann_entropy(&dm(x.to_matrix())).unwrap();
        let m1 = marginal(&x, Qubit::One);
        let m2 = marginal(&x, Qubit::Two);
        let s = |m: Matrix2<C>| von_neumann_entropy(&DMatrix::from_iterator(2, 2, m.iter().cloned())).unwrap();
        assert!((mutual_information(&x) - (s(m1) + s(m2) - whole)).abs() < 1e-10);
    }

    #[test]
    fn classical_closed_examples() {
        assert!((classical_closed(0.5, 0.5) - 1.0).abs() < 1e-15);
        assert!(classical_closed(1.0, 0.0).abs() < 1e-15);
        assert!((classical_closed(0.25, 0.25) - 0.122556).abs() < 1e-6);
    }

    #[test]
    fn computational_measurement_reproduces_closed_form() {
        for &(p00, p01, p10, z) in &[(0.5, 0.25, 0.25, c(0.25, 0.0)), (0.2, 0.3, 0.5, c(0.1, -0.2)), (0.6, 0.1, 0.3, c(0.0, 0.0))] {
            let x = xs(p00, p01, p10, z);
            assert!((measured_information(&x, 0.0, 1.3) - classical_closed(p10, p01)).abs() < 1e-12);
        }
    }

    #[test]
    fn optimizer_beats_or_matches_every_basis() {
        let x = pure_branch(0.3, 0.2, 0.7);
        let opt = classical_optimized(&x, OptimizerGrid::default()).unwrap();
        assert!(opt.value >= classical_closed(0.3, 0.2) - 1e-12);
        for k in 0..50 {
            let t = PI / 2.0 * k as f64 / 49.0;
            assert!(measured_information(&x, t, 0.0) <= opt.value + 1e-9);
        }
        assert!(phi_slice_variation(&x, opt.theta, 32) < 1e-9);
        assert!(classical_optimized(&x, OptimizerGrid { n_theta: 10, n_phi: 64 }).is_err());
    }

    #[test]
    fn discord_examples() {
        let bell = xs(0.0, 0.5, 0.5, c(0.5, 0.0));
        assert!((discord(&bell) - 1.0).abs() < 1e-12);
        assert!(discord(&xs(0.0, 0.0, 1.0, c(0.0, 0.0))).abs() < 1e-12);
        let x = pure_branch(0.3, 0.3, 1.0);
        assert!((discord(&x) - concurrence(&x)).abs() < 1e-9);
    }

    #[test]
    fn mixed_family_discord_equals_weight() {
        for ia in 0..=20 {
            let alpha = ia as f64 / 20.0;
            for it in 0..8 {
                let theta = TAU * it as f64 / 8.0;
                let x = xs(1.0 - alpha, alpha / 2.0, alpha / 2.0, C::from_polar(alpha / 2.0, -theta));
                assert!((concurrence(&x) - alpha).abs() < 1e-10);
                assert!((discord(&x) - alpha).abs() < 1e-6, "alpha {alpha}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pure_branch_discord_closed_form(p1 in 0.0f64..1.0, frac in 0.0f64..1.0, chi in 0.0f64..6.3) {
                let p2 = (1.0 - p1) * frac;
                let x = pure_branch(p1, p2, chi);
                prop_assert!((discord(&x) - discord_pure_branch(p1, p2)).abs() < 1e-9);
            }

            #[test]
            fn record_invariants(p00 in 0.0f64..1.0, frac in 0.0f64..1.0, coh in 0.0f64..=1.0, chi in 0.0f64..6.3) {
                let p10 = (1.0 - p00) * frac;
                let p01 = 1.0 - p00 - p10;
                let x = xs(p00, p01, p10, C::from_polar(coh * (p10 * p01).sqrt(), chi));
                let r = CorrelationRecord::new(&x);
                prop_assert!((r.discord - (r.mutual_info - r.classical)).abs() < 1e-12);
                prop_assert!(r.classical >= -1e-9 && r.discord >= -1e-9 && r.mutual_info <= 2.0 + 1e-12);
                prop_assert!(r.classical <= r.mutual_info + 1e-9);
                prop_assert!((0.0..=1.0 + 1e-12).contains(&r.concurrence));
            }

            #[test]
            fn measures_ignore_coherence_phase(p1 in 0.0f64..0.5, p2 in 0.0f64..0.5, chi in 0.0f64..6.3) {
                let a = CorrelationRecord::new(&pure_branch(p1, p2, 0.0));
                let b = CorrelationRecord::new(&pure_branch(p1, p2, chi));
                prop_assert!((a.concurrence - b.concurrence).abs() < 1e-12);
                prop_assert!((a.mutual_info - b.mutual_info).abs() < 1e-12);
                prop_assert!((a.discord - b.discord).abs() < 1e-12);
            }

            #[test]
            fn mutual_information_matches_dense_eigensolver(p00 in 0.0f64..1.0, frac in 0.0f64..1.0, coh in 0.0f64..=1.0) {
                let p10 = (1.0 - p00) * frac;
                let p01 = 1.0 - p00 - p10;
                let x = xs(p00, p01, p10, C::new(coh * (p10 * p01).sqrt(), 0.0));
                let whole = von_neumann_entropy(&dm(x.to_matrix())).unwrap();
                let direct = binary_entropy(p10) + binary_entropy(p01) - whole;
                prop_assert!((mutual_information(&x) - direct).abs() < 1e-9);
            }
        }
    }
}
