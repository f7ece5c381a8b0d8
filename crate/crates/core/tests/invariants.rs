//! Property tests for the exact identities and structural invariants.

use proptest::prelude::*;

use s6v_core::config::ExperimentConfig;
use s6v_core::exact::DEFAULT_BRANCH_CAP;
use s6v_core::kernels::{KernelTable, RecurrenceCoefficients};
use s6v_core::noise::{conditional_moments, decompose, mean_field};
use s6v_core::stats;
use s6v_core::telegraph::{BoundaryProfile, TelegraphOptions, TelegraphProblem};
use s6v_core::{enumerate_exact, sample_replica, AxisProfile, BoundarySpec, HeightConvention, ModelParams, VertexCase};

fn weights() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..0.95, 0.05f64..0.95).prop_filter("distinct weights", |(a, b)| (a - b).abs() > 1e-3)
}

fn bits(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn duhamel_reconstruction_is_exact((b1, b2) in weights(), left in bits(10), bottom in bits(10), seed: u64) {
        let p = ModelParams::from_weights(b1, b2).unwrap();
        let bc = BoundarySpec::Explicit { left, bottom }.build(10, 10).unwrap();
        let s = sample_replica(&p, &bc, 10, 10, seed, 0).unwrap();
        s.check_invariants().unwrap();
        let table = KernelTable::build(&p, 10, 10);
        let d = decompose(&s, &p, &table).unwrap();
        let scale = s.phis().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(d.exactness <= 1e-11 * scale, "{}", d.exactness);
    }

    #[test]
    fn residual_is_conditionally_centred((b1, b2) in weights(), h in -6i32..=6, case in 0usize..4) {
        let p = ModelParams::from_weights(b1, b2).unwrap();
        let m = conditional_moments(&p, VertexCase::ALL[case], h, HeightConvention::Standard);
        prop_assert!(m.relative_mean <= 1e-14, "{}", m.relative_mean);
        prop_assert!(m.matches_closed_form);
        prop_assert!(m.second_moment >= 0.0);
    }

    #[test]
    fn kernel_table_obeys_recurrence_and_axes((b1, b2) in weights()) {
        let p = ModelParams::from_weights(b1, b2).unwrap();
        let t = KernelTable::build(&p, 24, 24);
        prop_assert!(t.recurrence_residual(&RecurrenceCoefficients::from_params(&p)) < 1e-13);
        for k in 0..=24 {
            prop_assert!((t.get(k, 0) - b1.powi(k as i32)).abs() < 1e-14);
            prop_assert!((t.get(0, k) - b2.powi(k as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_field_is_the_exact_expectation((b1, b2) in weights(), left in bits(3), bottom in bits(3)) {
        let p = ModelParams::from_weights(b1, b2).unwrap();
        let bc = BoundarySpec::Explicit { left, bottom }.build(3, 3).unwrap();
        let law = enumerate_exact(&p, &bc, 3, 3, HeightConvention::Standard, DEFAULT_BRANCH_CAP).unwrap();
        let axis = AxisProfile::from_boundary(&p, &bc, 3, 3, HeightConvention::Standard);
        let bar = mean_field(&axis, &KernelTable::build(&p, 3, 3), b1, b2, 3, 3).unwrap();
        for y in 0..=3 {
            for x in 0..=3 {
                let e = law.mean_phi(x, y);
                prop_assert!((e - bar.get(x, y)).abs() <= 1e-12 * e.abs().max(1.0), "({x}, {y}): {e} vs {}", bar.get(x, y));
            }
        }
    }

    #[test]
    fn variance_is_shift_invariant(xs in prop::collection::vec(-1e3f64..1e3, 2..200), c in -1e3f64..1e3, a in 0.1f64..10.0) {
        let v = stats::variance(&xs);
        let shifted: Vec<f64> = xs.iter().map(|x| a * x + c).collect();
        prop_assert!((stats::variance(&shifted) - a * a * v).abs() <= 1e-9 * (a * a * v).max(1.0));
    }

    #[test]
    fn config_survives_json(seed: u64, scale in 1u32..1024, beta1 in 0.1f64..5.0, gap in 0.05f64..2.0) {
        let cfg = ExperimentConfig { seed, scale, beta1, beta2: beta1 + gap, ..ExperimentConfig::default() };
        let back = ExperimentConfig::from_json_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The solution operator is linear in the boundary data.
    #[test]
    fn telegraph_solution_is_linear(r1 in -1.0f64..1.0, r2 in -1.0f64..1.0, c in 0.2f64..3.0, x in 0.05f64..1.0, y in 0.05f64..1.0) {
        let solve = |chi: BoundaryProfile, psi: BoundaryProfile| {
            TelegraphProblem::new(2.0, 1.0, chi, psi, 1.0, 1.0, TelegraphOptions::default()).unwrap()
        };
        let a = solve(BoundaryProfile::exponential(1.0, r1, 1.0), BoundaryProfile::exponential(1.0, r2, 1.0));
        let b = solve(BoundaryProfile::constant(c, 1.0), BoundaryProfile::exponential(c, r1, 1.0));
        let sum = solve(
            BoundaryProfile::exponential(1.0, r1, 1.0).sum(&BoundaryProfile::constant(c, 1.0)).unwrap(),
            BoundaryProfile::exponential(1.0, r2, 1.0).sum(&BoundaryProfile::exponential(c, r1, 1.0)).unwrap(),
        );
        let (ja, jb, js) = (a.eval(x, y).unwrap(), b.eval(x, y).unwrap(), sum.eval(x, y).unwrap());
        for (u, v) in [(ja.phi + jb.phi, js.phi), (ja.dx + jb.dx, js.dx), (ja.dy + jb.dy, js.dy)] {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0), "{u} vs {v}");
        }
    }
}
