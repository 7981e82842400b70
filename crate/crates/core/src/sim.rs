//! Stepped simulation loop.
//!
//! Every public method runs on the caller's own thread. The mailbox is the
//! only structure other threads may touch: they enqueue commands through a
//! [`MailboxSender`], and the owner executes them at the top of the next
//! [`Simulator::step`] (or an explicit [`Simulator::service_mailbox`]).

use std::fmt;
use std::path::Path;
use std::sync::mpsc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kinematics::{self, ArmDescriptor, KinematicsError};
use crate::math::{Pose, Vec3};
use crate::scene::{Handle, JointMode, JointState, ObjectData, Scene, SceneError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot read scene file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("simulation is already running")]
    AlreadyRunning,
    #[error("simulation is not running")]
    NotRunning,
    #[error("joint {handle} is in {mode:?} mode")]
    WrongMode { handle: Handle, mode: JointMode },
    #[error("target {value} outside the limits of joint {handle}")]
    LimitViolation { handle: Handle, value: f64 },
    #[error("non-finite joint target for {0}")]
    NonFinite(Handle),
    #[error("invalid step configuration: dt must be positive")]
    InvalidDt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Launched,
    Running,
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            dt: crate::scene::DEFAULT_DT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub phase: Phase,
    pub step_count: u64,
    pub rng_seed: u64,
}

/// Deferred operation executed by the simulator's owner.
pub type Command = Box<dyn FnOnce(&mut Simulator) + Send>;

/// Error returned when the owning simulator has been dropped.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("simulator mailbox is closed")]
pub struct MailboxClosed;

/// Cloneable enqueue side of a simulator's mailbox.
#[derive(Clone)]
pub struct MailboxSender {
    tx: mpsc::Sender<Command>,
}

impl fmt::Debug for MailboxSender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MailboxSender")
    }
}

impl MailboxSender {
    pub fn send(&self, cmd: Command) -> Result<(), MailboxClosed> {
        self.tx.send(cmd).map_err(|_| MailboxClosed)
    }
}

pub struct Simulator {
    scene: Scene,
    initial_joints: Vec<(Handle, JointState)>,
    state: SimState,
    config: StepConfig,
    headless: bool,
    rng: ChaCha8Rng,
    mailbox_tx: mpsc::Sender<Command>,
    mailbox_rx: mpsc::Receiver<Command>,
    shutdown_hooks: Vec<Box<dyn FnOnce() + Send>>,
}

impl fmt::Debug for Simulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Simulator")
            .field("state", &self.state)
            .field("config", &self.config)
            .field("headless", &self.headless)
            .field("objects", &self.scene.len())
            .finish_non_exhaustive()
    }
}

/// Loads a scene file into a new simulator in the `Launched` phase.
pub fn launch(scene_path: impl AsRef<Path>, headless: bool) -> Result<Simulator, SimError> {
    let path = scene_path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Simulator::new(Scene::from_json(&text)?, headless))
}

impl Simulator {
    /// The timestep is taken from the scene.
    pub fn new(scene: Scene, headless: bool) -> Self {
        let (mailbox_tx, mailbox_rx) = mpsc::channel();
        let initial_joints = scene
            .objects()
            .filter_map(|o| match &o.data {
                ObjectData::Joint(j) => Some((o.handle, j.state)),
                _ => None,
            })
            .collect();
        let config = StepConfig { dt: scene.dt };
        Self {
            scene,
            initial_joints,
            state: SimState {
                phase: Phase::Launched,
                step_count: 0,
                rng_seed: 0,
            },
            config,
            headless,
            rng: ChaCha8Rng::seed_from_u64(0),
            mailbox_tx,
            mailbox_rx,
            shutdown_hooks: Vec::new(),
        }
    }

    /// Replaces the scene and returns to the `Launched` phase with a zero
    /// step count. The mailbox, seed and shutdown hooks are kept.
    pub fn load_scene(&mut self, scene: Scene) {
        self.initial_joints = scene
            .objects()
            .filter_map(|o| match &o.data {
                ObjectData::Joint(j) => Some((o.handle, j.state)),
                _ => None,
            })
            .collect();
        self.config = StepConfig { dt: scene.dt };
        self.scene = scene;
        self.state.phase = Phase::Launched;
        self.state.step_count = 0;
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.state.rng_seed = seed;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self
    }

    pub fn with_config(mut self, config: StepConfig) -> Result<Self, SimError> {
        if !(config.dt > 0.0 && config.dt.is_finite()) {
            return Err(SimError::InvalidDt);
        }
        self.config = config;
        Ok(self)
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn scene_mut(&mut self) -> &mut Scene {
        &mut self.scene
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn phase(&self) -> Phase {
        self.state.phase
    }

    pub fn step_count(&self) -> u64 {
        self.state.step_count
    }

    pub fn dt(&self) -> f64 {
        self.config.dt
    }

    /// `step_count × dt`, never accumulated.
    pub fn sim_time(&self) -> f64 {
        self.state.step_count as f64 * self.config.dt
    }

    pub fn headless(&self) -> bool {
        self.headless
    }

    /// Seeded generator, reset on every `start`.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn mailbox(&self) -> MailboxSender {
        MailboxSender {
            tx: self.mailbox_tx.clone(),
        }
    }

    /// Registers a callback run by [`Simulator::shutdown`].
    pub fn on_shutdown(&mut self, hook: Box<dyn FnOnce() + Send>) {
        self.shutdown_hooks.push(hook);
    }

    pub fn start(&mut self) -> Result<(), SimError> {
        match self.state.phase {
            Phase::Running => Err(SimError::AlreadyRunning),
            Phase::Launched | Phase::Stopped => {
                for &(h, initial) in &self.initial_joints {
                    let joint = self.scene.joint_mut(h)?;
                    joint.state = JointState {
                        v_target: 0.0,
                        q_target: initial.q,
                        ..initial
                    };
                }
                self.state.phase = Phase::Running;
                self.rng = ChaCha8Rng::seed_from_u64(self.state.rng_seed);
                Ok(())
            }
        }
    }

    /// Idempotent; state is kept for inspection.
    pub fn stop(&mut self) {
        if self.state.phase == Phase::Running {
            self.state.phase = Phase::Stopped;
        }
    }

    /// Consumes the instance, closing anything attached to it.
    pub fn shutdown(mut self) {
        self.stop();
        for hook in self.shutdown_hooks.drain(..) {
            hook();
        }
    }

    /// Drains the mailbox, then integrates every joint by one `dt`.
    pub fn step(&mut self) -> Result<(), SimError> {
        if self.state.phase != Phase::Running {
            return Err(SimError::NotRunning);
        }
        self.service_mailbox();
        self.advance()
    }

    /// Executes queued commands in arrival order and returns how many ran.
    pub fn service_mailbox(&mut self) -> usize {
        let queued: Vec<Command> = self.mailbox_rx.try_iter().collect();
        let n = queued.len();
        for cmd in queued {
            cmd(self);
        }
        n
    }

    /// Integrates joints by one step without touching the mailbox.
    pub fn advance(&mut self) -> Result<(), SimError> {
        if self.state.phase != Phase::Running {
            return Err(SimError::NotRunning);
        }
        let dt = self.config.dt;
        for &(h, _) in &self.initial_joints {
            let joint = self.scene.joint_mut(h)?;
            let p = joint.params;
            let s = &mut joint.state;
            match s.mode {
                JointMode::Velocity => {
                    let v = s.v_target.clamp(-p.max_velocity, p.max_velocity);
                    s.q = p.clamp(s.q + v * dt);
                }
                JointMode::Position => {
                    let delta = s.q_target - s.q;
                    let max_step = p.max_velocity * dt;
                    if delta.abs() <= max_step + 1e-12 * s.q_target.abs().max(1.0) {
                        s.q = s.q_target;
                    } else {
                        s.q = p.clamp(s.q + max_step.copysign(delta));
                    }
                }
                JointMode::Passive => {}
            }
        }
        self.state.step_count += 1;
        Ok(())
    }

    /// Values beyond ±max_velocity are stored as given and clamped during
    /// integration.
    pub fn set_joint_target_velocity(&mut self, h: Handle, v: f64) -> Result<(), SimError> {
        let joint = self.scene.joint_mut(h)?;
        if joint.state.mode != JointMode::Velocity {
            return Err(SimError::WrongMode {
                handle: h,
                mode: joint.state.mode,
            });
        }
        if !v.is_finite() {
            return Err(SimError::NonFinite(h));
        }
        joint.state.v_target = v;
        Ok(())
    }

    pub fn set_joint_target_position(&mut self, h: Handle, q_target: f64) -> Result<(), SimError> {
        let joint = self.scene.joint_mut(h)?;
        if joint.state.mode != JointMode::Position {
            return Err(SimError::WrongMode {
                handle: h,
                mode: joint.state.mode,
            });
        }
        if !joint.params.within_limits(q_target) {
            return Err(SimError::LimitViolation {
                handle: h,
                value: q_target,
            });
        }
        joint.state.q_target = q_target;
        Ok(())
    }

    pub fn joint_position(&self, h: Handle) -> Result<f64, SimError> {
        Ok(self.scene.joint(h)?.state.q)
    }

    pub fn joint_state(&self, h: Handle) -> Result<JointState, SimError> {
        Ok(self.scene.joint(h)?.state)
    }

    pub fn get_object_by_name(&self, name: &str) -> Result<Handle, SimError> {
        Ok(self.scene.get_object_by_name(name)?)
    }

    pub fn get_position(&self, h: Handle, relative_to: Option<Handle>) -> Result<Vec3, SimError> {
        Ok(self.scene.get_position(h, relative_to)?)
    }

    pub fn set_position(
        &mut self,
        h: Handle,
        p: Vec3,
        relative_to: Option<Handle>,
    ) -> Result<(), SimError> {
        Ok(self.scene.set_position(h, p, relative_to)?)
    }

    /// Arm descriptor for the chain ending at the named tip object.
    pub fn arm(&self, tip_name: &str) -> Result<ArmDescriptor, SimError> {
        Ok(ArmDescriptor::from_tip_name(&self.scene, tip_name)?)
    }

    pub fn get_tip_pose(&self, arm: &ArmDescriptor) -> Result<Pose, SimError> {
        Ok(kinematics::get_tip_pose(&self.scene, arm)?)
    }
}
