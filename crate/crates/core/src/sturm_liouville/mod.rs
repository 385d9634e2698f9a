//! Weighted scalar and 2×2 Sturm-Liouville eigenproblems
//! `-h'' + A(t) h = λ w(t) h`, plus shooting utilities.

pub mod band;
mod discretize;
mod shooting;
mod solve;

pub use discretize::{assemble, DiscretePencil};
pub use shooting::{oscillation_compare, shoot_scalar, ComparisonVerdict, ShootingResult};
pub(crate) use solve::half_problem;
pub use solve::{
    count_negatives, eigenvalues, eigenvalues_parity, eigenvalues_with, negative_count,
    negative_count_with, quadratic_form, weighted_norm2, SolverOptions,
};

use serde::Serialize;
use std::fmt;
use std::sync::Arc;

pub type Potential = Arc<dyn Fn(f64) -> [[f64; 2]; 2] + Send + Sync>;
pub type Weight = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Condition at one end. `Robin { coefficient: c }` means `h'(end) = c h(end)`
/// with the plain t-derivative, whichever end it sits on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Dirichlet,
    Robin { coefficient: f64 },
}

impl BoundaryCondition {
    pub const NEUMANN: Self = Self::Robin { coefficient: 0.0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    Scalar,
    Vector2,
}

impl Dimension {
    pub fn size(self) -> usize {
        match self {
            Self::Scalar => 1,
            Self::Vector2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// `h1` even, `h2` odd.
    Plus,
    /// `h1` odd, `h2` even.
    Minus,
    None,
}

/// Eigenproblem on `[t0, t1]`. Each end carries one condition per component.
#[derive(Clone)]
pub struct SlProblem {
    pub t0: f64,
    pub t1: f64,
    /// Angular mode the potential was built for; a label only.
    pub m: u32,
    pub dimension: Dimension,
    pub left: [BoundaryCondition; 2],
    pub right: [BoundaryCondition; 2],
    potential: Potential,
    weight: Weight,
}

impl fmt::Debug for SlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlProblem")
            .field("t0", &self.t0)
            .field("t1", &self.t1)
            .field("m", &self.m)
            .field("dimension", &self.dimension)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish_non_exhaustive()
    }
}

impl SlProblem {
    pub fn vector(
        t0: f64,
        t1: f64,
        potential: impl Fn(f64) -> [[f64; 2]; 2] + Send + Sync + 'static,
        weight: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            t0,
            t1,
            m: 0,
            dimension: Dimension::Vector2,
            left: [BoundaryCondition::Dirichlet; 2],
            right: [BoundaryCondition::Dirichlet; 2],
            potential: Arc::new(potential),
            weight: Arc::new(weight),
        }
    }

    pub fn scalar(
        t0: f64,
        t1: f64,
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        weight: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension: Dimension::Scalar,
            ..Self::vector(t0, t1, move |t| [[q(t), 0.0], [0.0, 0.0]], weight)
        }
    }

    pub fn with_mode(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn with_left(mut self, bc: BoundaryCondition) -> Self {
        self.left = [bc; 2];
        self
    }

    pub fn with_right(mut self, bc: BoundaryCondition) -> Self {
        self.right = [bc; 2];
        self
    }

    pub fn with_left_components(mut self, bc: [BoundaryCondition; 2]) -> Self {
        self.left = bc;
        self
    }

    pub fn with_interval(mut self, t0: f64, t1: f64) -> Self {
        self.t0 = t0;
        self.t1 = t1;
        self
    }

    /// Same problem with unit weight.
    pub fn unit_weight(&self) -> Self {
        Self {
            weight: Arc::new(|_| 1.0),
            ..self.clone()
        }
    }

    pub fn potential_at(&self, t: f64) -> [[f64; 2]; 2] {
        (self.potential)(t)
    }

    pub fn weight_at(&self, t: f64) -> f64 {
        (self.weight)(t)
    }
}

/// Vector function sampled on grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledVector {
    pub t: Vec<f64>,
    pub h: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Richardson-extrapolated eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of the finest discrete problem.
    pub finest: Vec<f64>,
    /// Eigenvectors of the finest discrete problem, `⟨w h, h⟩ = 1`.
    pub eigenvectors: Vec<SampledVector>,
    pub parity: Vec<Parity>,
    /// Intervals of the finest grid.
    pub grid_size: usize,
    pub convergence_estimate: Vec<f64>,
}
