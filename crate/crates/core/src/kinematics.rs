//! Serial-chain forward kinematics, geometric Jacobian and damped
//! least-squares inverse kinematics.

use nalgebra::{DMatrix, DVector, Matrix6xX};
use thiserror::Error;

use crate::math::{Pose, Vec3};
use crate::scene::{Handle, JointParams, JointType, ObjectData, Scene, SceneError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("expected {expected} joint values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("joint {index} value {value} outside its limits")]
    LimitViolation { index: usize, value: f64 },
    #[error("arm descriptor is not bound to a scene")]
    NotBound,
    #[error("no joints between the scene root and tip {0}")]
    NoJoints(Handle),
    #[error("invalid IK parameters: {0}")]
    InvalidParams(&'static str),
    #[error(
        "IK did not converge after {} iterations (position error {:.3e} m, orientation error {:.3e} rad)",
        best.iterations, best.position_error, best.orientation_error
    )]
    NotConverged { best: IkSolution },
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Kinematic chain from a base frame through n joints to a tip frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmDescriptor {
    /// Scene handles of the joints, base to tip. Empty for detached chains.
    pub joint_handles: Vec<Handle>,
    pub joints: Vec<JointParams>,
    /// World pose of the frame the first joint hangs from.
    pub base: Pose,
    /// `link_offsets[i]`: fixed pose from the previous joint's moved frame
    /// (or the base) to joint `i`'s rest frame.
    pub link_offsets: Vec<Pose>,
    pub tip_offset: Pose,
    pub tip_handle: Option<Handle>,
}

impl ArmDescriptor {
    /// Builds a chain not attached to any scene. Each entry is
    /// (offset from the previous frame, joint parameters).
    pub fn new(base: Pose, joints: Vec<(Pose, JointParams)>, tip_offset: Pose) -> Self {
        let (link_offsets, joints) = joints.into_iter().unzip();
        Self {
            joint_handles: Vec::new(),
            joints,
            base,
            link_offsets,
            tip_offset,
            tip_handle: None,
        }
    }

    /// Discovers the chain by walking from the tip object up to the root;
    /// every joint on that path belongs to the arm.
    pub fn from_scene(scene: &Scene, tip: Handle) -> Result<Self, KinematicsError> {
        let mut path = vec![tip];
        let mut cur = scene.object(tip)?.parent;
        while let Some(h) = cur {
            path.push(h);
            cur = scene.object(h)?.parent;
        }
        path.reverse();
        let first_joint = path
            .iter()
            .position(|&h| matches!(scene.object(h).map(|o| &o.data), Ok(ObjectData::Joint(_))))
            .ok_or(KinematicsError::NoJoints(tip))?;
        let base = if first_joint == 0 {
            Pose::IDENTITY
        } else {
            scene.world_pose(path[first_joint - 1])?
        };

        let mut arm = ArmDescriptor {
            joint_handles: Vec::new(),
            joints: Vec::new(),
            base,
            link_offsets: Vec::new(),
            tip_offset: Pose::IDENTITY,
            tip_handle: Some(tip),
        };
        let mut offset = Pose::IDENTITY;
        for &h in &path[first_joint..] {
            let obj = scene.object(h)?;
            offset = offset.compose(&obj.local_pose);
            if let ObjectData::Joint(j) = &obj.data {
                arm.joint_handles.push(h);
                arm.joints.push(j.params);
                arm.link_offsets.push(offset);
                offset = Pose::IDENTITY;
            }
        }
        // A joint used as its own tip ends on a moved frame with no offset.
        arm.tip_offset = offset;
        Ok(arm)
    }

    pub fn from_tip_name(scene: &Scene, tip_name: &str) -> Result<Self, KinematicsError> {
        Self::from_scene(scene, scene.get_object_by_name(tip_name)?)
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn is_bound(&self) -> bool {
        self.tip_handle.is_some() && self.joint_handles.len() == self.joints.len()
    }

    /// Same chain mounted on a different base.
    pub fn with_base(&self, base: Pose) -> Self {
        Self {
            base,
            ..self.clone()
        }
    }

    pub fn check(&self, q: &[f64]) -> Result<(), KinematicsError> {
        if q.len() != self.dof() {
            return Err(KinematicsError::DimensionMismatch {
                expected: self.dof(),
                got: q.len(),
            });
        }
        for (index, (&value, j)) in q.iter().zip(&self.joints).enumerate() {
            if !j.within_limits(value) {
                return Err(KinematicsError::LimitViolation { index, value });
            }
        }
        Ok(())
    }

    pub fn clamp_to_limits(&self, q: &mut [f64]) {
        for (v, j) in q.iter_mut().zip(&self.joints) {
            *v = j.clamp(*v);
        }
    }

    /// World frame of every joint after its motion is applied. No validation.
    pub fn joint_frames(&self, q: &[f64]) -> Vec<Pose> {
        let mut frames = Vec::with_capacity(self.dof());
        let mut cur = self.base;
        for ((offset, joint), &qi) in self.link_offsets.iter().zip(&self.joints).zip(q) {
            cur = cur.compose(offset).compose(&joint.motion(qi));
            frames.push(cur);
        }
        frames
    }

    fn tip_from_frames(&self, frames: &[Pose]) -> Pose {
        frames.last().unwrap_or(&self.base).compose(&self.tip_offset)
    }
}

/// Tip pose for joint vector `q`.
pub fn forward_kinematics(arm: &ArmDescriptor, q: &[f64]) -> Result<Pose, KinematicsError> {
    arm.check(q)?;
    Ok(arm.tip_from_frames(&arm.joint_frames(q)))
}

/// 6×n geometric Jacobian: rows are tip linear velocity then angular
/// velocity; columns are joints base to tip.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian(pub Matrix6xX<f64>);

impl Jacobian {
    pub fn linear(&self, joint: usize) -> Vec3 {
        self.0.fixed_view::<3, 1>(0, joint).into_owned()
    }

    pub fn angular(&self, joint: usize) -> Vec3 {
        self.0.fixed_view::<3, 1>(3, joint).into_owned()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }
}

pub fn compute_jacobian(arm: &ArmDescriptor, q: &[f64]) -> Result<Jacobian, KinematicsError> {
    if q.len() != arm.dof() {
        return Err(KinematicsError::DimensionMismatch {
            expected: arm.dof(),
            got: q.len(),
        });
    }
    Ok(jacobian_unchecked(arm, q))
}

fn jacobian_unchecked(arm: &ArmDescriptor, q: &[f64]) -> Jacobian {
    let frames = arm.joint_frames(q);
    let tip = arm.tip_from_frames(&frames).position;
    let mut j = Matrix6xX::zeros(arm.dof());
    for (i, (frame, joint)) in frames.iter().zip(&arm.joints).enumerate() {
        let z = frame.transform_vector(&joint.axis);
        let (lin, ang) = match joint.joint_type {
            JointType::Revolute => (z.cross(&(tip - frame.position)), z),
            JointType::Prismatic => (z, Vec3::zeros()),
        };
        j.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
        j.fixed_view_mut::<3, 1>(3, i).copy_from(&ang);
    }
    Jacobian(j)
}

/// Position error (m) and orientation error as a rotation vector (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseError {
    pub position: Vec3,
    pub orientation: Vec3,
}

impl PoseError {
    /// Error that takes `current` to `target`; the orientation part is the
    /// rotation vector of `R_target · R_currentᵀ`.
    pub fn between(current: &Pose, target: &Pose) -> Self {
        let rel = target.orientation.mul(&current.orientation.inverse());
        Self {
            position: target.position - current.position,
            orientation: rel.to_rotation_vector(),
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (p, o) = (self.position, self.orientation);
        [p.x, p.y, p.z, o.x, o.y, o.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkParams {
    /// Damping factor λ.
    pub lambda: f64,
    pub pos_tol: f64,
    pub ori_tol: f64,
    pub max_iters: usize,
    /// Largest change applied to any joint in one iteration.
    pub step_clamp: f64,
    /// Ignore the orientation rows of the error and Jacobian.
    pub position_only: bool,
}

impl Default for IkParams {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            pos_tol: 1e-4,
            ori_tol: 1e-3,
            max_iters: 200,
            step_clamp: 0.2,
            position_only: false,
        }
    }
}

impl IkParams {
    fn validate(&self) -> Result<(), KinematicsError> {
        if !(self.lambda > 0.0) {
            return Err(KinematicsError::InvalidParams("lambda must be positive"));
        }
        if !(self.pos_tol > 0.0 && self.ori_tol > 0.0) {
            return Err(KinematicsError::InvalidParams("tolerances must be positive"));
        }
        if self.max_iters < 1 {
            return Err(KinematicsError::InvalidParams("max_iters must be at least 1"));
        }
        if !(self.step_clamp > 0.0) {
            return Err(KinematicsError::InvalidParams("step_clamp must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkSolution {
    pub q: Vec<f64>,
    /// Number of updates applied.
    pub iterations: usize,
    pub position_error: f64,
    pub orientation_error: f64,
}

/// Damped least squares: `Δq = Jᵀ(JJᵀ + λ²I)⁻¹ e`, each component clamped to
/// `step_clamp`, then `q` clamped to the joint limits.
pub fn solve_ik(
    arm: &ArmDescriptor,
    target: &Pose,
    q0: &[f64],
    params: &IkParams,
) -> Result<IkSolution, KinematicsError> {
    params.validate()?;
    arm.check(q0)?;
    let rows = if params.position_only { 3 } else { 6 };
    let damping = DMatrix::<f64>::identity(rows, rows) * (params.lambda * params.lambda);
    let mut q = q0.to_vec();
    let mut best: Option<IkSolution> = None;

    for iteration in 0..=params.max_iters {
        let err = PoseError::between(&arm.tip_from_frames(&arm.joint_frames(&q)), target);
        let pos_err = err.position.norm();
        let ori_err = if params.position_only {
            0.0
        } else {
            err.orientation.norm()
        };
        let current = IkSolution {
            q: q.clone(),
            iterations: iteration,
            position_error: pos_err,
            orientation_error: ori_err,
        };
        if pos_err <= params.pos_tol && ori_err <= params.ori_tol {
            return Ok(current);
        }
        let score = pos_err + ori_err;
        if best
            .as_ref()
            .is_none_or(|b| score < b.position_error + b.orientation_error)
        {
            best = Some(current);
        }
        if iteration == params.max_iters {
            break;
        }

        let jac = jacobian_unchecked(arm, &q).0.rows(0, rows).into_owned();
        let e = DVector::from_row_slice(&err.to_array()[..rows]);
        let jjt = &jac * jac.transpose() + &damping;
        let Some(chol) = jjt.cholesky() else {
            break;
        };
        let dq = jac.transpose() * chol.solve(&e);
        for (qi, d) in q.iter_mut().zip(dq.iter()) {
            *qi += d.clamp(-params.step_clamp, params.step_clamp);
        }
        arm.clamp_to_limits(&mut q);
    }
    Err(KinematicsError::NotConverged {
        best: best.expect("at least one iteration evaluated"),
    })
}

/// Current joint vector of a bound arm, read from the scene.
pub fn current_q(scene: &Scene, arm: &ArmDescriptor) -> Result<Vec<f64>, KinematicsError> {
    if !arm.is_bound() {
        return Err(KinematicsError::NotBound);
    }
    arm.joint_handles
        .iter()
        .map(|&h| Ok(scene.joint(h)?.state.q))
        .collect()
}

/// Forward kinematics at the scene's live joint positions.
pub fn get_tip_pose(scene: &Scene, arm: &ArmDescriptor) -> Result<Pose, KinematicsError> {
    let q = current_q(scene, arm)?;
    forward_kinematics(arm, &q)
}
