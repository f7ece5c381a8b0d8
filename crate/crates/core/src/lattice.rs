//! Edge configurations, the sequential sampler and the height function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryCondition;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{replica_rng, Stream};

/// Vertex types I..VI, numbered as in the usual weight table
/// `(1, 1, b1, b2, 1 - b1, 1 - b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    Empty,
    Cross,
    /// Left-entering line continues right (weight `b1`).
    StraightRight,
    /// Bottom-entering line continues up (weight `b2`).
    StraightUp,
    /// Left-entering line turns up (weight `1 - b1`).
    TurnUp,
    /// Bottom-entering line turns right (weight `1 - b2`).
    TurnRight,
}

impl VertexType {
    pub fn classify(in_below: bool, in_left: bool, out_up: bool, out_right: bool) -> Option<Self> {
        use VertexType::*;
        Some(match (in_below, in_left, out_up, out_right) {
            (false, false, false, false) => Empty,
            (true, true, true, true) => Cross,
            (false, true, false, true) => StraightRight,
            (true, false, true, false) => StraightUp,
            (false, true, true, false) => TurnUp,
            (true, false, false, true) => TurnRight,
            _ => return None,
        })
    }

    pub fn outputs(self) -> (bool, bool) {
        use VertexType::*;
        match self {
            Empty => (false, false),
            Cross => (true, true),
            StraightRight | TurnRight => (false, true),
            StraightUp | TurnUp => (true, false),
        }
    }

    pub fn weight(self, params: &ModelParams) -> f64 {
        use VertexType::*;
        match self {
            Empty | Cross => 1.0,
            StraightRight => params.b1(),
            StraightUp => params.b2(),
            TurnUp => 1.0 - params.b1(),
            TurnRight => 1.0 - params.b2(),
        }
    }
}

/// Incoming-line configuration at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexCase {
    None,
    Both,
    Bottom,
    Left,
}

impl VertexCase {
    pub const ALL: [VertexCase; 4] = [VertexCase::None, VertexCase::Both, VertexCase::Bottom, VertexCase::Left];

    pub fn from_inputs(in_below: bool, in_left: bool) -> Self {
        match (in_below, in_left) {
            (false, false) => VertexCase::None,
            (true, true) => VertexCase::Both,
            (true, false) => VertexCase::Bottom,
            (false, true) => VertexCase::Left,
        }
    }

    pub fn inputs(self) -> (bool, bool) {
        match self {
            VertexCase::None => (false, false),
            VertexCase::Both => (true, true),
            VertexCase::Bottom => (true, false),
            VertexCase::Left => (false, true),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexCase::None => "none",
            VertexCase::Both => "both",
            VertexCase::Bottom => "bottom",
            VertexCase::Left => "left",
        }
    }

    /// Possible vertex types with their probabilities; the first entry is the
    /// one chosen when the uniform draw falls below its probability.
    pub fn outcomes(self, params: &ModelParams) -> Vec<(VertexType, f64)> {
        use VertexType::*;
        match self {
            VertexCase::None => vec![(Empty, 1.0)],
            VertexCase::Both => vec![(Cross, 1.0)],
            VertexCase::Bottom => vec![(StraightUp, params.b2()), (TurnRight, 1.0 - params.b2())],
            VertexCase::Left => vec![(StraightRight, params.b1()), (TurnUp, 1.0 - params.b1())],
        }
    }

    pub fn is_branching(self) -> bool {
        matches!(self, VertexCase::Bottom | VertexCase::Left)
    }
}

/// Orientation of the height function.
///
/// `Standard`: crossing an occupied vertical edge eastwards raises `H` by one,
/// crossing an occupied horizontal edge northwards lowers it by one.
/// `Flipped` negates both. Only `Standard` makes the four-point residual
/// conditionally centred; the flipped variant exists so the enumeration
/// oracle can demonstrate that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightConvention {
    #[default]
    Standard,
    Flipped,
}

impl HeightConvention {
    pub const ALL: [HeightConvention; 2] = [HeightConvention::Standard, HeightConvention::Flipped];

    /// `(sigma_x, sigma_y)`: the jump across an occupied vertical / horizontal edge.
    pub fn signs(self) -> (i32, i32) {
        match self {
            HeightConvention::Standard => (1, -1),
            HeightConvention::Flipped => (-1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeightConvention::Standard => "standard",
            HeightConvention::Flipped => "flipped",
        }
    }
}

/// One configuration on the window `0..=X` by `0..=Y`.
///
/// `vertical(x, y)` is the edge `(x, y) -> (x, y + 1)`, `horizontal(x, y)` the
/// edge `(x, y) -> (x + 1, y)`. `height(x, y)` labels the unit face whose
/// south-west corner is `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSample {
    x_extent: usize,
    y_extent: usize,
    q: f64,
    convention: HeightConvention,
    vertical: Vec<bool>,
    horizontal: Vec<bool>,
    height: Vec<i32>,
    phi: Vec<f64>,
}

impl LatticeSample {
    fn idx(&self, x: usize, y: usize) -> usize {
        y * (self.x_extent + 1) + x
    }

    /// Empty edge arrays with the boundary entries in place.
    fn with_boundary(params: &ModelParams, bc: &BoundaryCondition, x_extent: usize, y_extent: usize) -> Result<Self> {
        if x_extent == 0 || y_extent == 0 {
            return Err(Error::InvalidParameter("window extents must be at least 1".into()));
        }
        if bc.x_extent() < x_extent || bc.y_extent() < y_extent {
            return Err(Error::InvalidBoundary(format!(
                "boundary covers {}x{}, window is {x_extent}x{y_extent}",
                bc.x_extent(),
                bc.y_extent()
            )));
        }
        let n = (x_extent + 1) * (y_extent + 1);
        let mut sample = Self {
            x_extent,
            y_extent,
            q: params.q(),
            convention: HeightConvention::Standard,
            vertical: vec![false; n],
            horizontal: vec![false; n],
            height: vec![0; n],
            phi: vec![1.0; n],
        };
        for x in 1..=x_extent {
            let i = sample.idx(x, 0);
            sample.vertical[i] = bc.bottom_entry(x);
        }
        for y in 1..=y_extent {
            let i = sample.idx(0, y);
            sample.horizontal[i] = bc.left_entry(y);
        }
        Ok(sample)
    }

    pub(crate) fn incoming(&self, x: usize, y: usize) -> (bool, bool) {
        (self.vertical[self.idx(x, y - 1)], self.horizontal[self.idx(x - 1, y)])
    }

    pub(crate) fn set_outputs(&mut self, x: usize, y: usize, up: bool, right: bool) {
        let i = self.idx(x, y);
        self.vertical[i] = up;
        self.horizontal[i] = right;
    }

    /// Recompute `H` and `phi` from the edges under `convention`.
    pub fn with_convention(mut self, convention: HeightConvention) -> Self {
        self.convention = convention;
        self.fill_heights();
        self
    }

    fn fill_heights(&mut self) {
        let (sx, sy) = self.convention.signs();
        let (nx, ny) = (self.x_extent, self.y_extent);
        for y in 0..=ny {
            let start = if y == 0 {
                0
            } else {
                let below = self.height[self.idx(0, y - 1)];
                below + if self.horizontal[self.idx(0, y)] { sy } else { 0 }
            };
            let i0 = self.idx(0, y);
            self.height[i0] = start;
            for x in 1..=nx {
                let prev = self.height[self.idx(x - 1, y)];
                let step = if self.vertical[self.idx(x, y)] { sx } else { 0 };
                let i = self.idx(x, y);
                self.height[i] = prev + step;
            }
        }
        let q = self.q;
        for (p, h) in self.phi.iter_mut().zip(&self.height) {
            *p = q.powi(*h);
        }
    }

    pub fn x_extent(&self) -> usize {
        self.x_extent
    }

    pub fn y_extent(&self) -> usize {
        self.y_extent
    }

    pub fn convention(&self) -> HeightConvention {
        self.convention
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn vertical(&self, x: usize, y: usize) -> bool {
        self.vertical[self.idx(x, y)]
    }

    pub fn horizontal(&self, x: usize, y: usize) -> bool {
        self.horizontal[self.idx(x, y)]
    }

    pub fn height(&self, x: usize, y: usize) -> i32 {
        self.height[self.idx(x, y)]
    }

    pub fn phi(&self, x: usize, y: usize) -> f64 {
        self.phi[self.idx(x, y)]
    }

    /// Row-major (`y` outer) height grid.
    pub fn heights(&self) -> &[i32] {
        &self.height
    }

    pub fn phis(&self) -> &[f64] {
        &self.phi
    }

    /// Type of the bulk vertex `(x, y)`, `1 <= x <= X`, `1 <= y <= Y`.
    pub fn vertex_type(&self, x: usize, y: usize) -> Option<VertexType> {
        let (below, left) = self.incoming(x, y);
        VertexType::classify(below, left, self.vertical(x, y), self.horizontal(x, y))
    }

    /// Line conservation at every bulk vertex and a consistent height field.
    ///
    /// Single occupancy holds by construction since edges are booleans.
    pub fn check_invariants(&self) -> Result<()> {
        for y in 1..=self.y_extent {
            for x in 1..=self.x_extent {
                if self.vertex_type(x, y).is_none() {
                    return Err(Error::IdentityViolation {
                        name: "line conservation",
                        residual: 1.0,
                        tol: 0.0,
                    });
                }
            }
        }
        if self.height(0, 0) != 0 {
            return Err(Error::IdentityViolation {
                name: "H(0,0) = 0",
                residual: f64::from(self.height(0, 0)).abs(),
                tol: 0.0,
            });
        }
        // Plaquette: the column route must agree with the row route used to fill H.
        let (_, sy) = self.convention.signs();
        for y in 0..self.y_extent {
            for x in 0..=self.x_extent {
                let up = self.height(x, y) + if self.horizontal(x, y + 1) { sy } else { 0 };
                if up != self.height(x, y + 1) {
                    return Err(Error::IdentityViolation {
                        name: "plaquette additivity",
                        residual: f64::from(up - self.height(x, y + 1)).abs(),
                        tol: 0.0,
                    });
                }
            }
        }
        Ok(())
    }
}

/// One replica drawn with the ChaCha stream `(seed, replica)`.
pub fn sample_replica(
    params: &ModelParams,
    bc: &BoundaryCondition,
    x_extent: usize,
    y_extent: usize,
    seed: u64,
    replica: u64,
) -> Result<LatticeSample> {
    let mut sample = LatticeSample::with_boundary(params, bc, x_extent, y_extent)?;
    let mut rng = replica_rng(seed, replica, Stream::Lattice);
    let (b1, b2) = (params.b1(), params.b2());
    // Row-by-row: vertex (x, y) only needs the outputs of (x - 1, y) and
    // (x, y - 1), so this is equivalent to the anti-diagonal order.
    for y in 1..=y_extent {
        for x in 1..=x_extent {
            let (below, left) = sample.incoming(x, y);
            let (up, right) = match (below, left) {
                (false, false) => (false, false),
                (true, true) => (true, true),
                (true, false) => {
                    if rng.random::<f64>() < b2 {
                        (true, false)
                    } else {
                        (false, true)
                    }
                }
                (false, true) => {
                    if rng.random::<f64>() < b1 {
                        (false, true)
                    } else {
                        (true, false)
                    }
                }
            };
            sample.set_outputs(x, y, up, right);
        }
    }
    sample.fill_heights();
    Ok(sample)
}

pub fn sample_configuration(
    params: &ModelParams,
    bc: &BoundaryCondition,
    x_extent: usize,
    y_extent: usize,
    seed: u64,
) -> Result<LatticeSample> {
    sample_replica(params, bc, x_extent, y_extent, seed, 0)
}

/// Boundary-only skeleton used by the exact enumerator.
pub(crate) fn blank_sample(
    params: &ModelParams,
    bc: &BoundaryCondition,
    x_extent: usize,
    y_extent: usize,
) -> Result<LatticeSample> {
    LatticeSample::with_boundary(params, bc, x_extent, y_extent)
}

pub(crate) fn finish_sample(mut sample: LatticeSample, convention: HeightConvention) -> LatticeSample {
    sample.convention = convention;
    sample.fill_heights();
    sample
}

/// `phi` along the two axes, which is all the mean field needs.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisProfile {
    /// `phi(x, 0)` for `x = 0..=X`.
    pub bottom: Vec<f64>,
    /// `phi(0, y)` for `y = 0..=Y`.
    pub left: Vec<f64>,
}

impl AxisProfile {
    pub fn from_boundary(
        params: &ModelParams,
        bc: &BoundaryCondition,
        x_extent: usize,
        y_extent: usize,
        convention: HeightConvention,
    ) -> Self {
        let (sx, sy) = convention.signs();
        let q = params.q();
        let mut h = 0i32;
        let mut bottom = vec![1.0];
        for x in 1..=x_extent {
            h += if bc.bottom_entry(x) { sx } else { 0 };
            bottom.push(q.powi(h));
        }
        let mut h = 0i32;
        let mut left = vec![1.0];
        for y in 1..=y_extent {
            h += if bc.left_entry(y) { sy } else { 0 };
            left.push(q.powi(h));
        }
        Self { bottom, left }
    }

    pub fn from_sample(sample: &LatticeSample) -> Self {
        Self {
            bottom: (0..=sample.x_extent()).map(|x| sample.phi(x, 0)).collect(),
            left: (0..=sample.y_extent()).map(|y| sample.phi(0, y)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundarySpec;
    use proptest::prelude::*;

    fn params() -> ModelParams {
        ModelParams::new(16, 2.0, 1.0).unwrap()
    }

    #[test]
    fn empty_boundary_is_trivial() {
        let p = params();
        let bc = BoundarySpec::Empty.build(6, 5).unwrap();
        let s = sample_configuration(&p, &bc, 6, 5, 1).unwrap();
        for y in 0..=5 {
            for x in 0..=6 {
                assert_eq!(s.height(x, y), 0);
                assert_eq!(s.phi(x, y), 1.0);
                if x > 0 && y > 0 {
                    assert_eq!(s.vertex_type(x, y), Some(VertexType::Empty));
                }
            }
        }
    }

    #[test]
    fn full_boundary_is_all_crossings() {
        let p = params();
        let bc = BoundaryCondition::full(5, 4);
        let a = sample_configuration(&p, &bc, 5, 4, 1).unwrap();
        let b = sample_configuration(&p, &bc, 5, 4, 999).unwrap();
        assert_eq!(a, b);
        for y in 1..=4 {
            for x in 1..=5 {
                assert_eq!(a.vertex_type(x, y), Some(VertexType::Cross));
            }
        }
    }

    #[test]
    fn step_first_vertex_frequencies() {
        let p = ModelParams::from_weights(0.6, 0.9).unwrap();
        let bc = BoundarySpec::Step.build(1, 1).unwrap();
        let n = 20_000;
        let straight = (0..n)
            .filter(|&r| {
                let s = sample_replica(&p, &bc, 1, 1, 5, r).unwrap();
                s.vertex_type(1, 1) == Some(VertexType::StraightRight)
            })
            .count();
        let freq = straight as f64 / n as f64;
        let se = (0.6f64 * 0.4 / n as f64).sqrt();
        assert!((freq - 0.6).abs() < 4.0 * se, "{freq}");
    }

    #[test]
    fn step_axis_heights() {
        let p = params();
        let bc = BoundarySpec::Step.build(4, 4).unwrap();
        let s = sample_configuration(&p, &bc, 4, 4, 3).unwrap();
        for y in 0..=4 {
            assert_eq!(s.height(0, y), -(y as i32));
        }
        for x in 0..=4 {
            assert_eq!(s.height(x, 0), 0);
        }
        let flipped = s.clone().with_convention(HeightConvention::Flipped);
        assert_eq!(flipped.height(0, 3), 3);
        assert_eq!(flipped.vertical, s.vertical);
    }

    #[test]
    fn phi_bounded_uniformly() {
        // |phi|, |L grad phi| bounded on [0, aL]^2 with a = 1, L = 64.
        let p = ModelParams::new(64, 2.0, 1.0).unwrap();
        let l = 64.0;
        let bc = BoundarySpec::Step.build(64, 64).unwrap();
        // H ranges over [-2aL, 2aL], so phi <= frak_q^{2a} and L|grad phi| <= L|q^{-1} - 1| phi.
        let phi_bound = p.frak_q().powi(2);
        let grad_bound = l * (1.0 / p.q() - 1.0).abs() * phi_bound;
        for r in 0..100 {
            let s = sample_replica(&p, &bc, 64, 64, 17, r).unwrap();
            for y in 0..64 {
                for x in 0..64 {
                    let f = s.phi(x, y);
                    assert!(f > 0.0 && f <= phi_bound);
                    assert!(l * (s.phi(x + 1, y) - f).abs() <= grad_bound);
                    assert!(l * (s.phi(x, y + 1) - f).abs() <= grad_bound);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn configurations_are_valid_and_replayable(
            b1 in 0.05f64..0.95,
            b2 in 0.05f64..0.95,
            rho_left in 0.0f64..=1.0,
            rho_bottom in 0.0f64..=1.0,
            nx in 1usize..20,
            ny in 1usize..20,
            seed in any::<u64>(),
        ) {
            prop_assume!((b1 - b2).abs() > 1e-3);
            let p = ModelParams::from_weights(b1, b2).unwrap();
            let bc = BoundarySpec::Bernoulli { rho_left, rho_bottom, seed }.build(nx, ny).unwrap();
            let s = sample_configuration(&p, &bc, nx, ny, seed).unwrap();
            s.check_invariants().unwrap();
            let again = sample_configuration(&p, &bc, nx, ny, seed).unwrap();
            prop_assert_eq!(s.heights(), again.heights());
            let (sx, sy) = s.convention().signs();
            for y in 0..=ny {
                for x in 0..=nx {
                    if x < nx {
                        let d = s.height(x + 1, y) - s.height(x, y);
                        prop_assert!(d == 0 || d == sx);
                    }
                    if y < ny {
                        let d = s.height(x, y + 1) - s.height(x, y);
                        prop_assert!(d == 0 || d == sy);
                    }
                }
            }
            // Plaquette increments depend only on the vertex's own edges.
            for y in 0..ny {
                for x in 0..nx {
                    let plaq = s.height(x + 1, y + 1) - s.height(x + 1, y) - s.height(x, y + 1) + s.height(x, y);
                    let (below, _) = s.incoming(x + 1, y + 1);
                    let expected = sx * (s.vertical(x + 1, y + 1) as i32 - below as i32);
                    prop_assert_eq!(plaq, expected);
                }
            }
        }
    }
}
