//! Embeddable robot-simulation kernel.
//!
//! A [`Scene`] is a forest of named objects loaded from a JSON document. A
//! [`Simulator`] owns one scene and advances it in fixed `dt` steps, executing
//! every call on the caller's thread. [`kinematics`] and [`planner`] operate on
//! arm descriptors discovered from the scene.

pub mod kinematics;
pub mod math;
pub mod mesh;
pub mod planner;
pub mod scene;
pub mod sim;

pub use kinematics::{
    compute_jacobian, forward_kinematics, solve_ik, ArmDescriptor, IkParams, IkSolution, Jacobian,
    KinematicsError, PoseError,
};
pub use math::{compose_pose, Pose, Quaternion, Vec3};
pub use planner::{
    in_collision, plan_rrt_connect, shortcut_path, CollisionWorld, PlanError, PlanningParams,
    Sphere,
};
pub use scene::{load_scene, Handle, ObjectKind, Scene, SceneError, SceneObject};
pub use sim::{launch, MailboxSender, Phase, SimError, Simulator, StepConfig};
