//! Line entries along the two axes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{replica_rng, Stream};

/// How a boundary condition was produced. Deterministic kinds can be rebuilt
/// from the tag alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundarySpec {
    /// A line enters at every `(0, y)`, none from below.
    Step,
    Empty,
    /// Independent entries with the given densities.
    Bernoulli {
        rho_left: f64,
        rho_bottom: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Explicit 0/1 indicators; `left[k]` is the entry at `(0, k + 1)` and
    /// `bottom[k]` the entry at `(k + 1, 0)`.
    Explicit {
        left: Vec<u8>,
        bottom: Vec<u8>,
    },
}

impl BoundarySpec {
    pub fn build(&self, x_extent: usize, y_extent: usize) -> Result<BoundaryCondition> {
        let (left, bottom) = match self {
            BoundarySpec::Step => (vec![true; y_extent], vec![false; x_extent]),
            BoundarySpec::Empty => (vec![false; y_extent], vec![false; x_extent]),
            BoundarySpec::Bernoulli {
                rho_left,
                rho_bottom,
                seed,
            } => {
                for rho in [*rho_left, *rho_bottom] {
                    if !(0.0..=1.0).contains(&rho) {
                        return Err(Error::InvalidBoundary(format!(
                            "Bernoulli density {rho} outside [0, 1]"
                        )));
                    }
                }
                // Left and bottom use separate streams so changing one
                // extent never reshuffles the other axis.
                let mut rl = replica_rng(*seed, 0, Stream::Boundary);
                let mut rb = replica_rng(*seed, 1, Stream::Boundary);
                (
                    (0..y_extent).map(|_| rl.random::<f64>() < *rho_left).collect(),
                    (0..x_extent).map(|_| rb.random::<f64>() < *rho_bottom).collect(),
                )
            }
            BoundarySpec::Explicit { left, bottom } => {
                if left.len() < y_extent || bottom.len() < x_extent {
                    return Err(Error::InvalidBoundary(format!(
                        "explicit boundary has {} left / {} bottom entries, window needs {} / {}",
                        left.len(),
                        bottom.len(),
                        y_extent,
                        x_extent
                    )));
                }
                let to_bool = |v: &u8| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::InvalidBoundary(format!("indicator {other} is not 0/1"))),
                };
                (
                    left[..y_extent].iter().map(to_bool).collect::<Result<_>>()?,
                    bottom[..x_extent].iter().map(to_bool).collect::<Result<_>>()?,
                )
            }
        };
        Ok(BoundaryCondition {
            spec: self.clone(),
            left,
            bottom,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    spec: BoundarySpec,
    left: Vec<bool>,
    bottom: Vec<bool>,
}

impl BoundaryCondition {
    pub fn spec(&self) -> &BoundarySpec {
        &self.spec
    }

    /// Entry at `(0, y)` for `y >= 1`.
    pub fn left_entry(&self, y: usize) -> bool {
        self.left[y - 1]
    }

    /// Entry at `(x, 0)` for `x >= 1`.
    pub fn bottom_entry(&self, x: usize) -> bool {
        self.bottom[x - 1]
    }

    pub fn left_entries(&self) -> &[bool] {
        &self.left
    }

    pub fn bottom_entries(&self) -> &[bool] {
        &self.bottom
    }

    pub fn x_extent(&self) -> usize {
        self.bottom.len()
    }

    pub fn y_extent(&self) -> usize {
        self.left.len()
    }

    /// Every axis site fed, forcing pass-through everywhere.
    pub fn full(x_extent: usize, y_extent: usize) -> Self {
        Self {
            spec: BoundarySpec::Explicit {
                left: vec![1; y_extent],
                bottom: vec![1; x_extent],
            },
            left: vec![true; y_extent],
            bottom: vec![true; x_extent],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_and_empty() {
        let step = BoundarySpec::Step.build(3, 3).unwrap();
        assert_eq!(step.left_entries(), &[true, true, true]);
        assert_eq!(step.bottom_entries(), &[false, false, false]);
        let empty = BoundarySpec::Empty.build(4, 2).unwrap();
        assert!(empty.left_entries().iter().chain(empty.bottom_entries()).all(|e| !e));
    }

    #[test]
    fn bernoulli_density_and_replay() {
        let spec = BoundarySpec::Bernoulli {
            rho_left: 0.5,
            rho_bottom: 0.0,
            seed: 11,
        };
        let a = spec.build(10, 20_000).unwrap();
        let b = spec.build(10, 20_000).unwrap();
        assert_eq!(a, b);
        let density = a.left_entries().iter().filter(|e| **e).count() as f64 / 20_000.0;
        // 4 standard errors of a fair coin at n = 20000
        assert!((density - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt(), "{density}");
        assert!(a.bottom_entries().iter().all(|e| !e));
        // growing one axis leaves the other untouched
        let c = spec.build(10, 50).unwrap();
        assert_eq!(&a.left_entries()[..50], c.left_entries());
    }

    #[test]
    fn rejects_bad_densities_and_indicators() {
        let bad = BoundarySpec::Bernoulli {
            rho_left: 1.5,
            rho_bottom: 0.1,
            seed: 0,
        };
        assert!(bad.build(2, 2).is_err());
        let short = BoundarySpec::Explicit {
            left: vec![1],
            bottom: vec![0, 1],
        };
        assert!(short.build(2, 2).is_err());
        let non_binary = BoundarySpec::Explicit {
            left: vec![2, 0],
            bottom: vec![0, 1],
        };
        assert!(non_binary.build(2, 2).is_err());
    }

    #[test]
    fn parses_json_tags() {
        let spec: BoundarySpec =
            serde_json::from_str(r#"{"kind":"bernoulli","rho_left":0.3,"rho_bottom":0.7}"#).unwrap();
        assert_eq!(
            spec,
            BoundarySpec::Bernoulli {
                rho_left: 0.3,
                rho_bottom: 0.7,
                seed: 0
            }
        );
        let spec: BoundarySpec = serde_json::from_str(r#"{"kind":"step"}"#).unwrap();
        assert_eq!(spec, BoundarySpec::Step);
    }
}
