//! Latency and throughput harness comparing in-process calls with the
//! socket API.

pub mod config;
pub mod report;
pub mod stats;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepsim_core::scene::ObjectKind;
use stepsim_core::{ArmDescriptor, Handle, Scene, SimError, Simulator, Vec3};
use stepsim_remote::{Cadence, Client, ClientError, Server, ServerError};
use thiserror::Error;

pub use config::{BenchConfig, Mode, Workload, EPISODE_LENGTH, MIN_CALLS};
pub use report::{render_table, ReportRow};
pub use stats::LatencyStats;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Render(#[from] stepsim_render::RenderError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Server(#[from] ServerError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn is_config(&self) -> bool {
        matches!(self, BenchError::Config(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub mode: Mode,
    pub workload: Workload,
    pub stats: LatencyStats,
    /// Per-call latencies in seconds, in call order.
    pub samples: Vec<f64>,
}

/// Handles a workload touches, resolved from the scene before serving.
#[derive(Debug, Clone)]
struct Targets {
    tip: Handle,
    joints: Vec<Handle>,
    target: Option<Handle>,
    camera: Option<Handle>,
}

impl Targets {
    fn resolve(scene: &Scene, config: &BenchConfig) -> Result<Self, BenchError> {
        let tip = scene.get_object_by_name(&config.tip).map_err(|_| {
            BenchError::Config(format!("scene has no tip object `{}`", config.tip))
        })?;
        let arm = ArmDescriptor::from_scene(scene, tip)
            .map_err(|e| BenchError::Config(format!("tip `{}`: {e}", config.tip)))?;
        let camera = scene
            .objects()
            .find(|o| o.kind() == ObjectKind::VisionSensor)
            .map(|o| o.handle);
        if config.workload == Workload::Episode && camera.is_none() {
            return Err(BenchError::Config(
                "the episode workload needs a vision sensor in the scene".into(),
            ));
        }
        Ok(Self {
            tip,
            joints: arm.joint_handles,
            target: scene.get_object_by_name("target").ok(),
            camera,
        })
    }
}

enum Driver {
    Direct(Box<Simulator>),
    Remote {
        client: Client,
        server: Option<Server>,
        stepper: Option<(Arc<AtomicBool>, JoinHandle<Server>)>,
    },
}

impl Driver {
    fn step(&mut self) -> Result<(), BenchError> {
        match self {
            Driver::Direct(sim) => Ok(sim.step()?),
            Driver::Remote { client, .. } => Ok(client.step()?),
        }
    }

    fn tip_position(&mut self, tip: Handle) -> Result<Vec3, BenchError> {
        match self {
            Driver::Direct(sim) => Ok(sim.get_position(tip, None)?),
            Driver::Remote { client, .. } => Ok(client.get_position(tip, None)?),
        }
    }

    fn set_position(&mut self, h: Handle, p: Vec3) -> Result<(), BenchError> {
        match self {
            Driver::Direct(sim) => Ok(sim.set_position(h, p, None)?),
            Driver::Remote { client, .. } => Ok(client.set_position(h, p, None)?),
        }
    }

    fn set_velocity(&mut self, h: Handle, v: f64) -> Result<(), BenchError> {
        match self {
            Driver::Direct(sim) => Ok(sim.set_joint_target_velocity(h, v)?),
            Driver::Remote { client, .. } => Ok(client.set_joint_target_velocity(h, v)?),
        }
    }

    /// Captures both images and returns their pixel counts.
    fn observe(&mut self, camera: Handle) -> Result<usize, BenchError> {
        match self {
            Driver::Direct(sim) => {
                let rgb = stepsim_render::capture_rgb(sim.scene(), camera)?;
                let depth = stepsim_render::capture_depth(sim.scene(), camera)?;
                Ok(rgb.to_rgb8().len() / 3 + depth.data.len())
            }
            Driver::Remote { client, .. } => {
                let rgb = client.capture_rgb(camera)?;
                let depth = client.capture_depth(camera)?;
                Ok(rgb.data.len() / 3 + depth.data.len())
            }
        }
    }

    fn close(self) {
        match self {
            Driver::Direct(sim) => sim.shutdown(),
            Driver::Remote {
                client,
                server,
                stepper,
            } => {
                drop(client);
                if let Some(server) = server {
                    server.shutdown();
                }
                if let Some((stop, handle)) = stepper {
                    stop.store(true, Ordering::SeqCst);
                    if let Ok(server) = handle.join() {
                        server.shutdown();
                    }
                }
            }
        }
    }
}

fn open_driver(sim: Simulator, mode: Mode) -> Result<Driver, BenchError> {
    match mode {
        Mode::Direct => Ok(Driver::Direct(Box::new(sim))),
        Mode::RemoteFixed(ms) => {
            let cadence = Cadence::FixedInterval(std::time::Duration::from_millis(ms));
            let server = Server::serve(sim, "127.0.0.1:0", cadence)?;
            let client = Client::connect(server.local_addr())?;
            Ok(Driver::Remote {
                client,
                server: Some(server),
                stepper: None,
            })
        }
        Mode::RemoteStepBoundary => {
            let mut server = Server::serve(sim, "127.0.0.1:0", Cadence::StepBoundary)?;
            let client = Client::connect(server.local_addr())?;
            let stop = Arc::new(AtomicBool::new(false));
            let flag = stop.clone();
            let handle = thread::spawn(move || {
                while !flag.load(Ordering::Relaxed) {
                    server.step();
                    thread::yield_now();
                }
                server
            });
            Ok(Driver::Remote {
                client,
                server: None,
                stepper: Some((stop, handle)),
            })
        }
    }
}

/// State of the random agent between calls.
struct Agent {
    rng: ChaCha8Rng,
    iteration: usize,
}

impl Agent {
    fn call(&mut self, d: &mut Driver, workload: Workload, t: &Targets) -> Result<(), BenchError> {
        match workload {
            Workload::StepOnly => d.step(),
            Workload::StepPlusQuery => {
                d.step()?;
                d.tip_position(t.tip).map(|_| ())
            }
            Workload::Episode => {
                if self.iteration % EPISODE_LENGTH == 0 {
                    if let Some(target) = t.target {
                        let p = Vec3::new(
                            self.rng.random_range(-0.4..0.4),
                            self.rng.random_range(-0.4..0.4),
                            self.rng.random_range(0.3..0.9),
                        );
                        d.set_position(target, p)?;
                    }
                }
                self.iteration += 1;
                d.observe(t.camera.expect("checked at resolve"))?;
                for &j in &t.joints {
                    let v = self.rng.random_range(-1.0..1.0);
                    d.set_velocity(j, v)?;
                }
                d.step()?;
                d.tip_position(t.tip).map(|_| ())
            }
        }
    }
}

/// Loads the scene, starts the simulation, runs the warmup calls and then
/// times each call with a monotonic clock. Remote modes serve the
/// simulator on an ephemeral localhost port for the duration of the run.
pub fn run_bench(config: &BenchConfig) -> Result<BenchResult, BenchError> {
    config.validate()?;
    let text = std::fs::read_to_string(&config.scene).map_err(|e| {
        BenchError::Config(format!("cannot read scene {}: {e}", config.scene.display()))
    })?;
    let scene = Scene::from_json(&text)
        .map_err(|e| BenchError::Config(format!("scene {}: {e}", config.scene.display())))?;
    let targets = Targets::resolve(&scene, config)?;
    let mut sim = Simulator::new(scene, true).with_seed(config.seed);
    sim.start()?;

    let mut driver = open_driver(sim, config.mode)?;
    let mut agent = Agent {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        iteration: 0,
    };
    let outcome = (|| {
        for _ in 0..config.n_warmup {
            agent.call(&mut driver, config.workload, &targets)?;
        }
        let mut samples = Vec::with_capacity(config.n_calls);
        for _ in 0..config.n_calls {
            let t0 = Instant::now();
            agent.call(&mut driver, config.workload, &targets)?;
            samples.push(t0.elapsed().as_secs_f64());
        }
        Ok::<_, BenchError>(samples)
    })();
    driver.close();
    let samples = outcome?;
    Ok(BenchResult {
        mode: config.mode,
        workload: config.workload,
        stats: LatencyStats::from_seconds(&samples),
        samples,
    })
}
