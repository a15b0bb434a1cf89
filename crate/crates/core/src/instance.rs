use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::matrix::UtilityMatrix;

/// Affine map applied to a receiver utility table to bring it into `[0, 1]`:
/// `stored = scale * raw + shift`. Best responses are unchanged by it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverNormalization {
    pub scale: f64,
    pub shift: f64,
}

impl ReceiverNormalization {
    pub fn raw(&self, stored: f64) -> f64 {
        (stored - self.shift) / self.scale
    }
}

/// What the designer knows: both utility tables and the prior-mass floor `p0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicModel {
    pub u: UtilityMatrix,
    pub v: UtilityMatrix,
    pub p0: f64,
    pub normalization: Option<ReceiverNormalization>,
}

impl PublicModel {
    pub fn new(u: UtilityMatrix, v: UtilityMatrix, p0: f64) -> Result<Self> {
        if u.actions() != v.actions() || u.states() != v.states() {
            return Err(Error::Dimension("sender and receiver tables differ in shape"));
        }
        if !u.in_unit_range() || !v.in_unit_range() {
            return Err(Error::InvalidInstance("utilities must lie in [0, 1]"));
        }
        if !(p0 > 0.0) || p0 > 1.0 / u.states() as f64 + 1e-12 {
            return Err(Error::InvalidInstance("p0 must lie in (0, 1/|states|]"));
        }
        Ok(PublicModel { u, v, p0, normalization: None })
    }

    pub fn with_normalization(mut self, normalization: ReceiverNormalization) -> Self {
        self.normalization = Some(normalization);
        self
    }

    pub fn states(&self) -> usize {
        self.u.states()
    }

    pub fn actions(&self) -> usize {
        self.u.actions()
    }
}

/// The single-period game: public model plus the hidden true prior.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub model: PublicModel,
    pub prior: Belief,
}

impl Instance {
    pub fn new(model: PublicModel, prior: Belief) -> Result<Self> {
        if prior.len() != model.states() {
            return Err(Error::Dimension("prior length differs from state count"));
        }
        // p0 is often set to the exact minimum, so allow rounding slack.
        if prior.min_mass() < model.p0 * (1.0 - 1e-12) {
            return Err(Error::PriorBelowFloor);
        }
        Ok(Instance { model, prior })
    }

    pub fn states(&self) -> usize {
        self.model.states()
    }

    pub fn actions(&self) -> usize {
        self.model.actions()
    }

    pub fn u(&self) -> &UtilityMatrix {
        &self.model.u
    }

    pub fn v(&self) -> &UtilityMatrix {
        &self.model.v
    }

    pub fn p0(&self) -> f64 {
        self.model.p0
    }
}
