//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use contagion_core::HoldingsMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub holdings: HoldingsMatrix,
    pub endowments: Vec<f64>,
    pub failure_cost: f64,
    pub threshold: f64,
}

/// Random column-normalized network with `n ≤ 12` firms and a threshold
/// placed between the all-insolvent and all-solvent value ranges, so that
/// several equilibria are common.
pub fn random_instance(seed: u64, n: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: f64 = rng.gen_range(0.2..1.0);
    let c: f64 = rng.gen_range(0.2..0.8);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen::<f64>() < p {
                a[(i, j)] = 1.0;
            }
        }
    }
    for j in 0..n {
        let d: f64 = a.column(j).sum();
        if d == 0.0 {
            a[(j, j)] = 1.0;
        }
        let d: f64 = a.column(j).sum();
        for i in 0..n {
            a[(i, j)] *= c / d;
        }
    }
    let e: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let beta: f64 = rng.gen_range(0.05..1.0);
    let inv = inverse(&a);
    let hi = (&inv * DVector::from_column_slice(&e)).max();
    let lo = (&inv * DVector::from_iterator(n, e.iter().map(|v| v - beta))).min();
    let threshold = rng.gen_range(lo..hi);
    Instance {
        holdings: HoldingsMatrix::new(a).unwrap(),
        endowments: e,
        failure_cost: beta,
        threshold,
    }
}

pub fn inverse(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.nrows();
    (DMatrix::<f64>::identity(n, n) - c)
        .try_inverse()
        .expect("I - C invertible")
}

pub struct Enumeration {
    pub feasible: Vec<Vec<bool>>,
    pub join: Vec<bool>,
    pub meet: Vec<bool>,
}

/// All `2ⁿ` labelings, keeping those whose values reproduce them.
pub fn enumerate_equilibria(inst: &Instance) -> Enumeration {
    let c = inst.holdings.entries();
    let n = c.nrows();
    assert!(n <= 16);
    let inv = inverse(c);
    let mut feasible = Vec::new();
    for mask in 0u32..(1 << n) {
        let kappa: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let rhs = DVector::from_iterator(
            n,
            (0..n).map(|i| inst.endowments[i] - if kappa[i] { 0.0 } else { inst.failure_cost }),
        );
        let v = &inv * rhs;
        if (0..n).all(|i| (v[i] >= inst.threshold) == kappa[i]) {
            feasible.push(kappa);
        }
    }
    let join = (0..n).map(|i| feasible.iter().any(|k| k[i])).collect();
    let meet = (0..n).map(|i| feasible.iter().all(|k| k[i])).collect();
    Enumeration {
        feasible,
        join,
        meet,
    }
}
