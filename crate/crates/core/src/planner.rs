//! Joint-space RRT-Connect against a sphere-approximated collision world.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kinematics::ArmDescriptor;
use crate::math::{Pose, Vec3};
use crate::scene::{Handle, ObjectData, Scene, SceneError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("start configuration is in collision")]
    StartInCollision,
    #[error("goal configuration is in collision")]
    GoalInCollision,
    #[error("no path found within {0} nodes")]
    NoPathFound(usize),
    #[error("configuration has {got} joints, arm has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("configuration outside joint limits")]
    OutOfLimits,
    #[error("invalid planning parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Touching spheres do not intersect.
    pub fn intersects(&self, other: &Sphere) -> bool {
        (self.center - other.center).norm() < self.radius + other.radius
    }
}

/// Static obstacles in world coordinates plus spheres attached to each
/// joint's moving frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollisionWorld {
    pub obstacles: Vec<Sphere>,
    /// `link_spheres[i]` are expressed in joint `i`'s frame.
    pub link_spheres: Vec<Vec<Sphere>>,
}

impl CollisionWorld {
    pub fn new(obstacles: Vec<Sphere>, link_spheres: Vec<Vec<Sphere>>) -> Self {
        Self {
            obstacles,
            link_spheres,
        }
    }

    /// Shape collision spheres below a joint of `arm` become link spheres of
    /// the nearest such joint; all others become world obstacles. Spheres on
    /// the arm's base are ignored.
    pub fn from_scene(scene: &Scene, arm: &ArmDescriptor) -> Result<Self, PlanError> {
        let mut world = CollisionWorld {
            obstacles: Vec::new(),
            link_spheres: vec![Vec::new(); arm.dof()],
        };
        let base_parent = arm
            .joint_handles
            .first()
            .and_then(|&h| scene.object(h).ok())
            .and_then(|o| o.parent);
        for obj in scene.objects() {
            let ObjectData::Shape(shape) = &obj.data else {
                continue;
            };
            if shape.collision_spheres.is_empty() || Some(obj.handle) == base_parent {
                continue;
            }
            match owning_joint(scene, arm, obj.handle) {
                Some((index, joint)) => {
                    // shape pose in the joint's moved frame
                    let rel = scene.pose(obj.handle, Some(joint))?;
                    for s in &shape.collision_spheres {
                        world.link_spheres[index]
                            .push(Sphere::new(rel.transform_point(&s.center()), s.radius));
                    }
                }
                None => {
                    let pose = scene.world_pose(obj.handle)?;
                    for s in &shape.collision_spheres {
                        world
                            .obstacles
                            .push(Sphere::new(pose.transform_point(&s.center()), s.radius));
                    }
                }
            }
        }
        Ok(world)
    }
}

fn owning_joint(scene: &Scene, arm: &ArmDescriptor, h: Handle) -> Option<(usize, Handle)> {
    let mut cur = scene.object(h).ok()?.parent;
    while let Some(p) = cur {
        if let Some(i) = arm.joint_handles.iter().position(|&j| j == p) {
            return Some((i, p));
        }
        cur = scene.object(p).ok()?.parent;
    }
    None
}

/// World-space robot spheres at configuration `q`.
pub fn robot_spheres(arm: &ArmDescriptor, q: &[f64], world: &CollisionWorld) -> Vec<Sphere> {
    let frames = arm.joint_frames(q);
    frames
        .iter()
        .zip(&world.link_spheres)
        .flat_map(|(frame, spheres)| spheres.iter().map(move |s| place(frame, s)))
        .collect()
}

fn place(frame: &Pose, s: &Sphere) -> Sphere {
    Sphere::new(frame.transform_point(&s.center), s.radius)
}

/// True iff any robot sphere intersects any obstacle sphere.
pub fn in_collision(arm: &ArmDescriptor, q: &[f64], world: &CollisionWorld) -> bool {
    if world.obstacles.is_empty() {
        return false;
    }
    let frames = arm.joint_frames(q);
    frames.iter().zip(&world.link_spheres).any(|(frame, spheres)| {
        spheres.iter().any(|s| {
            let placed = place(frame, s);
            world.obstacles.iter().any(|o| placed.intersects(o))
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanningParams {
    /// Largest joint-space (Euclidean) extension per tree edge, rad.
    pub step_size: f64,
    pub goal_bias: f64,
    pub max_nodes: usize,
    /// Per-joint spacing used when checking and densifying edges, rad.
    pub validation_resolution: f64,
    pub seed: u64,
}

impl Default for PlanningParams {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            goal_bias: 0.1,
            max_nodes: 10_000,
            validation_resolution: 0.01,
            seed: 0,
        }
    }
}

impl PlanningParams {
    fn validate(&self) -> Result<(), PlanError> {
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(PlanError::InvalidParams("goal_bias must lie in [0, 1]"));
        }
        if !(self.step_size > 0.0) {
            return Err(PlanError::InvalidParams("step_size must be positive"));
        }
        if !(self.validation_resolution > 0.0 && self.validation_resolution <= self.step_size) {
            return Err(PlanError::InvalidParams(
                "validation_resolution must lie in (0, step_size]",
            ));
        }
        Ok(())
    }
}

pub type Path = Vec<Vec<f64>>;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Total joint-space arc length.
pub fn path_length(path: &[Vec<f64>]) -> f64 {
    path.windows(2).map(|w| distance(&w[0], &w[1])).sum()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect()
}

fn segment_count(a: &[f64], b: &[f64], resolution: f64) -> usize {
    let max_diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ((max_diff / resolution).ceil() as usize).max(1)
}

/// Checks interior points of `a → b` at `resolution`; endpoints are assumed
/// already validated.
fn segment_free(
    arm: &ArmDescriptor,
    world: &CollisionWorld,
    a: &[f64],
    b: &[f64],
    resolution: f64,
) -> bool {
    let n = segment_count(a, b, resolution);
    (1..n).all(|k| !in_collision(arm, &lerp(a, b, k as f64 / n as f64), world))
}

/// Inserts intermediate waypoints so consecutive entries differ by at most
/// `resolution` per joint. Original waypoints are kept bit-exact.
pub fn densify(path: &[Vec<f64>], resolution: f64) -> Path {
    let mut out = Vec::new();
    for w in path.windows(2) {
        let n = segment_count(&w[0], &w[1], resolution);
        out.push(w[0].clone());
        for k in 1..n {
            out.push(lerp(&w[0], &w[1], k as f64 / n as f64));
        }
    }
    if let Some(last) = path.last() {
        out.push(last.clone());
    }
    out
}

struct Tree {
    nodes: Vec<Vec<f64>>,
    parents: Vec<usize>,
}

impl Tree {
    fn new(root: Vec<f64>) -> Self {
        Self {
            nodes: vec![root],
            parents: vec![usize::MAX],
        }
    }

    fn nearest(&self, q: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, n) in self.nodes.iter().enumerate() {
            let d = distance(n, q);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    fn add(&mut self, q: Vec<f64>, parent: usize) -> usize {
        self.nodes.push(q);
        self.parents.push(parent);
        self.nodes.len() - 1
    }

    /// Root-to-node sequence.
    fn trace(&self, mut i: usize) -> Path {
        let mut out = vec![self.nodes[i].clone()];
        while self.parents[i] != usize::MAX {
            i = self.parents[i];
            out.push(self.nodes[i].clone());
        }
        out.reverse();
        out
    }
}

enum Extend {
    Reached(usize),
    Advanced(usize),
    Trapped,
}

struct Context<'a> {
    arm: &'a ArmDescriptor,
    world: &'a CollisionWorld,
    params: &'a PlanningParams,
}

impl Context<'_> {
    fn extend(&self, tree: &mut Tree, target: &[f64]) -> Extend {
        let near = tree.nearest(target);
        let from = &tree.nodes[near];
        let d = distance(from, target);
        let (q_new, reached) = if d <= self.params.step_size {
            (target.to_vec(), true)
        } else {
            (lerp(from, target, self.params.step_size / d), false)
        };
        if in_collision(self.arm, &q_new, self.world)
            || !segment_free(self.arm, self.world, from, &q_new, self.params.validation_resolution)
        {
            return Extend::Trapped;
        }
        let idx = tree.add(q_new, near);
        if reached {
            Extend::Reached(idx)
        } else {
            Extend::Advanced(idx)
        }
    }

    fn connect(&self, tree: &mut Tree, target: &[f64], budget: &mut usize) -> Extend {
        loop {
            if *budget == 0 {
                return Extend::Trapped;
            }
            match self.extend(tree, target) {
                Extend::Advanced(_) => *budget -= 1,
                other => {
                    if matches!(other, Extend::Reached(_)) {
                        *budget = budget.saturating_sub(1);
                    }
                    return other;
                }
            }
        }
    }
}

fn check_config(arm: &ArmDescriptor, q: &[f64]) -> Result<(), PlanError> {
    if q.len() != arm.dof() {
        return Err(PlanError::DimensionMismatch {
            expected: arm.dof(),
            got: q.len(),
        });
    }
    if !q.iter().zip(&arm.joints).all(|(v, j)| j.within_limits(*v)) {
        return Err(PlanError::OutOfLimits);
    }
    Ok(())
}

/// Bidirectional RRT with greedy connection. On success the path runs
/// exactly from `q_start` to `q_goal`, densified to the validation
/// resolution, and every waypoint is collision-free.
pub fn plan_rrt_connect(
    arm: &ArmDescriptor,
    q_start: &[f64],
    q_goal: &[f64],
    world: &CollisionWorld,
    params: &PlanningParams,
) -> Result<Path, PlanError> {
    params.validate()?;
    check_config(arm, q_start)?;
    check_config(arm, q_goal)?;
    if in_collision(arm, q_start, world) {
        return Err(PlanError::StartInCollision);
    }
    if in_collision(arm, q_goal, world) {
        return Err(PlanError::GoalInCollision);
    }
    if segment_free(arm, world, q_start, q_goal, params.validation_resolution) {
        return Ok(densify(
            &[q_start.to_vec(), q_goal.to_vec()],
            params.validation_resolution,
        ));
    }

    let ctx = Context { arm, world, params };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut a = Tree::new(q_start.to_vec());
    let mut b = Tree::new(q_goal.to_vec());
    // `a` always grows from whichever root it holds; track orientation.
    let mut a_is_start = true;
    let mut budget = params.max_nodes.saturating_sub(2);

    while budget > 0 {
        let sample: Vec<f64> = if rng.random::<f64>() < params.goal_bias {
            b.nodes[0].clone()
        } else {
            arm.joints
                .iter()
                .map(|j| rng.random_range(j.lower..=j.upper))
                .collect()
        };
        let new_idx = match ctx.extend(&mut a, &sample) {
            Extend::Trapped => None,
            Extend::Advanced(i) | Extend::Reached(i) => {
                budget -= 1;
                Some(i)
            }
        };
        if let Some(i) = new_idx {
            let q_new = a.nodes[i].clone();
            if let Extend::Reached(j) = ctx.connect(&mut b, &q_new, &mut budget) {
                let mut from_a = a.trace(i);
                let mut from_b = b.trace(j);
                from_b.reverse();
                from_b.remove(0); // duplicate of q_new
                from_a.extend(from_b);
                if !a_is_start {
                    from_a.reverse();
                }
                // restore exact endpoints
                *from_a.first_mut().expect("non-empty") = q_start.to_vec();
                *from_a.last_mut().expect("non-empty") = q_goal.to_vec();
                return Ok(densify(&from_a, params.validation_resolution));
            }
        }
        std::mem::swap(&mut a, &mut b);
        a_is_start = !a_is_start;
    }
    Err(PlanError::NoPathFound(params.max_nodes))
}

/// Randomly replaces sub-paths by straight segments when the segment is
/// collision-free and strictly shorter. The result is re-densified.
pub fn shortcut_path(
    path: &[Vec<f64>],
    world: &CollisionWorld,
    arm: &ArmDescriptor,
    params: &PlanningParams,
    attempts: usize,
) -> Path {
    let mut current: Path = path.to_vec();
    if current.len() < 3 {
        return current;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5eed_c0de);
    let mut changed = false;
    for _ in 0..attempts {
        if current.len() < 3 {
            break;
        }
        let i = rng.random_range(0..current.len() - 2);
        let j = rng.random_range(i + 2..current.len());
        let old = path_length(&current[i..=j]);
        let new = distance(&current[i], &current[j]);
        if new >= old - 1e-12 * old.max(1.0) {
            continue;
        }
        if !segment_free(arm, world, &current[i], &current[j], params.validation_resolution) {
            continue;
        }
        current.drain(i + 1..j);
        changed = true;
    }
    if changed {
        densify(&current, params.validation_resolution)
    } else {
        current
    }
}
