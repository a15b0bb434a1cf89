use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::math;
use crate::SIMPLEX_TOL;

/// A probability distribution over states.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    /// Validates `probs` as a point of the simplex (entries non-negative, sum 1 within 1e-9).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidBelief("no states"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidBelief("negative or non-finite entry"));
        }
        let total: f64 = probs.iter().sum();
        if math::abs(total - 1.0) > SIMPLEX_TOL {
            return Err(Error::InvalidBelief("entries do not sum to one"));
        }
        Ok(Belief(probs))
    }

    /// Clamps tiny negatives and rescales; for vectors that are a belief up to rounding.
    pub fn normalized(mut probs: Vec<f64>) -> Result<Self> {
        for p in probs.iter_mut() {
            if *p < 0.0 {
                if *p < -SIMPLEX_TOL {
                    return Err(Error::InvalidBelief("negative entry"));
                }
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidBelief("zero total mass"));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Belief(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Belief(alloc::vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, state: usize) -> Self {
        let mut probs = alloc::vec![0.0; n];
        probs[state] = 1.0;
        Belief(probs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn min_mass(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn l1_distance(&self, other: &Belief) -> f64 {
        math::l1(&self.0, &other.0)
    }

    /// `E_{omega ~ self}[f(omega)]` for a per-state vector `f`.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.0.iter().zip(f).map(|(p, x)| p * x).sum()
    }

    /// `(1 - weight) * self + weight * other`.
    pub fn mix(&self, other: &Belief, weight: f64) -> Belief {
        let probs = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (1.0 - weight) * a + weight * b)
            .collect();
        Belief(probs)
    }
}

impl Index<usize> for Belief {
    type Output = f64;

    fn index(&self, state: usize) -> &f64 {
        &self.0[state]
    }
}
