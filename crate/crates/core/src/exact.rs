//! Exhaustive enumeration of small windows.

use crate::boundary::BoundaryCondition;
use crate::error::{Error, Result};
use crate::lattice::{blank_sample, finish_sample, HeightConvention, LatticeSample, VertexCase};
use crate::params::ModelParams;

pub const DEFAULT_BRANCH_CAP: usize = 20;

/// Every configuration of a window together with its probability.
#[derive(Debug, Clone)]
pub struct ExactLaw {
    outcomes: Vec<(LatticeSample, f64)>,
}

impl ExactLaw {
    pub fn outcomes(&self) -> &[(LatticeSample, f64)] {
        &self.outcomes
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn expectation<F: Fn(&LatticeSample) -> f64>(&self, f: F) -> f64 {
        self.outcomes.iter().map(|(s, p)| p * f(s)).sum()
    }

    /// Exact `E[phi(x, y)]`.
    pub fn mean_phi(&self, x: usize, y: usize) -> f64 {
        self.expectation(|s| s.phi(x, y))
    }

    /// Re-label every outcome with another height convention.
    pub fn with_convention(&self, convention: HeightConvention) -> Self {
        Self {
            outcomes: self
                .outcomes
                .iter()
                .map(|(s, p)| (s.clone().with_convention(convention), *p))
                .collect(),
        }
    }
}

/// Enumerate all outcomes, branching at every single-input vertex in sweep
/// order. Fails if some path needs more than `branch_cap` branchings.
pub fn enumerate_exact(
    params: &ModelParams,
    bc: &BoundaryCondition,
    x_extent: usize,
    y_extent: usize,
    convention: HeightConvention,
    branch_cap: usize,
) -> Result<ExactLaw> {
    let root = blank_sample(params, bc, x_extent, y_extent)?;
    let mut outcomes = Vec::new();
    // (partial sample, next linear index, probability, branchings so far)
    let mut stack = vec![(root, 0usize, 1.0f64, 0usize)];
    let total = x_extent * y_extent;
    while let Some((mut sample, mut k, prob, depth)) = stack.pop() {
        // Resolve forced vertices until the next branching one.
        loop {
            if k == total {
                outcomes.push((finish_sample(sample, convention), prob));
                break;
            }
            let (x, y) = (k % x_extent + 1, k / x_extent + 1);
            let (below, left) = sample.incoming(x, y);
            let case = VertexCase::from_inputs(below, left);
            if !case.is_branching() {
                sample.set_outputs(x, y, below, left);
                k += 1;
                continue;
            }
            if depth + 1 > branch_cap {
                return Err(Error::BranchCapExceeded { cap: branch_cap });
            }
            for (vt, p) in case.outcomes(params) {
                let (up, right) = vt.outputs();
                let mut child = sample.clone();
                child.set_outputs(x, y, up, right);
                stack.push((child, k + 1, prob * p, depth + 1));
            }
            break;
        }
    }
    Ok(ExactLaw { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundarySpec;
    use crate::lattice::VertexType;

    fn weights() -> ModelParams {
        ModelParams::from_weights(0.6, 0.9).unwrap()
    }

    #[test]
    fn empty_window_is_deterministic() {
        let bc = BoundarySpec::Empty.build(2, 2).unwrap();
        let law = enumerate_exact(&weights(), &bc, 2, 2, HeightConvention::Standard, 20).unwrap();
        assert_eq!(law.outcomes().len(), 1);
        assert_eq!(law.outcomes()[0].1, 1.0);
    }

    #[test]
    fn single_vertex_step() {
        let bc = BoundarySpec::Step.build(1, 1).unwrap();
        let law = enumerate_exact(&weights(), &bc, 1, 1, HeightConvention::Standard, 20).unwrap();
        assert_eq!(law.outcomes().len(), 2);
        let prob_of = |t| -> f64 {
            law.outcomes()
                .iter()
                .filter(|(s, _)| s.vertex_type(1, 1) == Some(t))
                .map(|(_, p)| p)
                .sum()
        };
        assert!((prob_of(VertexType::StraightRight) - 0.6).abs() < 1e-15);
        assert!((prob_of(VertexType::TurnUp) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let bc = BoundarySpec::Explicit {
            left: vec![1, 0, 1, 1],
            bottom: vec![0, 1, 1, 0],
        }
        .build(4, 4)
        .unwrap();
        let law = enumerate_exact(&weights(), &bc, 4, 4, HeightConvention::Standard, 20).unwrap();
        assert!((law.total_probability() - 1.0).abs() < 1e-12);
        for (s, _) in law.outcomes() {
            s.check_invariants().unwrap();
        }
    }

    #[test]
    fn branch_cap_is_enforced() {
        let bc = BoundarySpec::Step.build(6, 6).unwrap();
        let err = enumerate_exact(&weights(), &bc, 6, 6, HeightConvention::Standard, 5).unwrap_err();
        assert!(matches!(err, Error::BranchCapExceeded { cap: 5 }));
    }
}
