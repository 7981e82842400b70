//! Acceptance checks for the core crate. Each check
//! panics on failure and returns a one-line summary of what it measured.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepsim_core::scene::{JointParams, JointType};
use stepsim_core::{
    compute_jacobian, forward_kinematics, plan_rrt_connect, solve_ik, ArmDescriptor, IkParams,
    KinematicsError, PlanningParams, Pose, Scene, Simulator, Vec3,
};

use super::*;

pub const FK_TOL: f64 = 1e-9;
pub const JACOBIAN_TOL: f64 = 1e-5;
pub const IK_POSITION_TOL: f64 = 1e-4;
pub const IK_MAX_ITERS: usize = 200;
/// Joint-space sampling step of the independent path validation, in rad.
pub const VALIDATION_RESOLUTION: f64 = 0.01;

/// FK of a planar 2R arm against `l1·cos q1 + l2·cos(q1+q2)` and the sine
/// counterpart.
pub fn planar_2r_fk(configurations: usize) -> String {
    let j = JointParams {
        joint_type: JointType::Revolute,
        axis: Vec3::z(),
        lower: -PI,
        upper: PI,
        max_velocity: 1.0,
    };
    let (l1, l2) = (0.5, 0.5);
    let arm = ArmDescriptor::new(
        Pose::IDENTITY,
        vec![(Pose::IDENTITY, j), (Pose::from_translation(l1, 0.0, 0.0), j)],
        Pose::from_translation(l2, 0.0, 0.0),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..configurations {
        let q = [rng.random_range(-PI..=PI), rng.random_range(-PI..=PI)];
        let p = forward_kinematics(&arm, &q).unwrap().position;
        let x = l1 * q[0].cos() + l2 * (q[0] + q[1]).cos();
        let y = l1 * q[0].sin() + l2 * (q[0] + q[1]).sin();
        let err = (p.x - x).abs().max((p.y - y).abs()).max(p.z.abs());
        assert!(err < FK_TOL, "q = {q:?}: error {err:e}");
        worst = worst.max(err);
    }
    format!("{configurations} configurations, max error {worst:.1e}")
}

pub fn jacobian_vs_finite_differences(chains: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for trial in 0..chains {
        let dof = rng.random_range(2..=7);
        let arm = random_chain(&mut rng, dof);
        let q = random_q(&arm, &mut rng);
        let j = compute_jacobian(&arm, &q).unwrap();
        let fd = finite_difference_jacobian(&arm, &q, 1e-6);
        for (col, expected) in fd.iter().enumerate() {
            for row in 0..6 {
                let got = j.0[(row, col)];
                let err = (got - expected[row]).abs();
                assert!(
                    err < JACOBIAN_TOL,
                    "trial {trial} dof {dof} J[{row},{col}] = {got}, fd = {}",
                    expected[row]
                );
                worst = worst.max(err);
            }
        }
    }
    format!("{chains} random chains, max error {worst:.1e}")
}

/// Position-only IK on the demo 6-DoF arm from [`READY`] towards FK images
/// of random in-limit configurations.
pub fn ik_round_trip(targets: usize) -> (usize, String) {
    let arm = demo_arm();
    let params = IkParams {
        position_only: true,
        ..IkParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let q0 = READY.to_vec();
    let mut converged = 0;
    let mut worst_iters = 0;
    for _ in 0..targets {
        let q_true = random_q(&arm, &mut rng);
        let target = forward_kinematics(&arm, &q_true).unwrap();
        match solve_ik(&arm, &target, &q0, &params) {
            Ok(sol) => {
                let reached = forward_kinematics(&arm, &sol.q).unwrap();
                assert!((reached.position - target.position).norm() < IK_POSITION_TOL);
                assert!(sol.iterations <= IK_MAX_ITERS);
                worst_iters = worst_iters.max(sol.iterations);
                converged += 1;
            }
            Err(KinematicsError::NotConverged { best }) => {
                arm.check(&best.q).unwrap();
            }
            Err(e) => panic!("{e}"),
        }
    }
    (converged, format!("IK {converged}/{targets}, worst {worst_iters} iterations"))
}

/// Plans through the gap-in-wall scene for seeds `0..seeds` and re-checks
/// every returned path with [`SceneOracle`] at [`VALIDATION_RESOLUTION`].
pub fn gap_wall_planning(seeds: u64) -> (u64, String) {
    let (arm, world) = gap_setup();
    let mut oracle = SceneOracle::new(GAP_WALL);
    let mut successes = 0;
    for seed in 0..seeds {
        let params = PlanningParams { seed, ..PlanningParams::default() };
        let Ok(path) = plan_rrt_connect(&arm, &START, &GOAL, &world, &params) else { continue };
        successes += 1;
        assert_eq!(path.first().unwrap().as_slice(), START);
        assert_eq!(path.last().unwrap().as_slice(), GOAL);
        assert!(max_joint_step(&path) <= VALIDATION_RESOLUTION + 1e-12);
        oracle.validate(&path, VALIDATION_RESOLUTION).unwrap();
    }
    (successes, format!("{successes}/{seeds} seeds solved, all paths validated"))
}

pub fn planning_determinism() -> String {
    let (arm, world) = gap_setup();
    let seeds = [3, 99, 12345];
    for seed in seeds {
        let params = PlanningParams { seed, ..PlanningParams::default() };
        let a = plan_rrt_connect(&arm, &START, &GOAL, &world, &params).unwrap();
        let b = plan_rrt_connect(&arm, &START, &GOAL, &world, &params).unwrap();
        let bits = |p: &[Vec<f64>]| -> Vec<u64> { p.iter().flatten().map(|v| v.to_bits()).collect() };
        assert_eq!(bits(&a), bits(&b), "seed {seed}");
    }
    format!("{} seeds replanned bit-identically", seeds.len())
}

/// Runs the same random script on two simulators and compares every joint
/// position bit for bit after each command.
pub fn trajectory_determinism(steps: u64) -> String {
    for (text, seed) in [(DEMO, 17u64), (MIXED, 18)] {
        let scene = Scene::from_json(text).unwrap();
        let script = random_script(&scene, &mut ChaCha8Rng::seed_from_u64(seed), steps as usize);
        let mut a = Simulator::new(scene.clone(), true).with_seed(seed);
        let mut b = Simulator::new(scene, true).with_seed(seed);
        a.start().unwrap();
        b.start().unwrap();
        for &cmd in &script {
            apply(&mut a, cmd);
            apply(&mut b, cmd);
            let (sa, sb) = (joint_states(&a), joint_states(&b));
            for (x, y) in sa.iter().zip(&sb) {
                assert_eq!(x.q.to_bits(), y.q.to_bits());
            }
            assert_eq!(a.step_count(), b.step_count());
        }
        assert_eq!(a.step_count(), steps);
        assert_eq!(a.scene(), b.scene());
    }
    format!("2 scenes x {steps} steps bit-identical")
}
