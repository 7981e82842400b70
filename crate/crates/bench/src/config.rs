use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use crate::BenchError;

/// How calls reach the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// In-process calls on the harness thread.
    Direct,
    /// Over the socket, serviced by a companion thread that steps in a
    /// tight loop.
    RemoteStepBoundary,
    /// Over the socket, serviced by a fixed-interval tick (milliseconds).
    RemoteFixed(u64),
}

impl Mode {
    pub fn is_remote(self) -> bool {
        self != Mode::Direct
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Direct => f.write_str("direct"),
            Mode::RemoteStepBoundary => f.write_str("remote-step"),
            Mode::RemoteFixed(ms) => write!(f, "remote-fixed({ms}ms)"),
        }
    }
}

impl FromStr for Mode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Mode::Direct),
            "remote-step" => Ok(Mode::RemoteStepBoundary),
            _ => s
                .strip_prefix("remote-fixed(")
                .and_then(|r| r.strip_suffix("ms)"))
                .and_then(|ms| ms.parse().ok())
                .map(Mode::RemoteFixed)
                .ok_or_else(|| BenchError::Config(format!("unknown mode `{s}`"))),
        }
    }
}

/// What one timed call does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Workload {
    /// One simulation step.
    StepOnly,
    /// One step, then a world-position query of the arm tip.
    StepPlusQuery,
    /// One iteration of a control loop driven by a random agent: capture
    /// RGB and depth, set every arm joint velocity, step, read the tip
    /// position. The target object moves at the start of each episode.
    Episode,
}

impl Workload {
    pub const ALL: [Workload; 3] = [Workload::StepOnly, Workload::StepPlusQuery, Workload::Episode];

    pub fn as_str(self) -> &'static str {
        match self {
            Workload::StepOnly => "step",
            Workload::StepPlusQuery => "step-query",
            Workload::Episode => "episode",
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Workload {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Workload::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown workload `{s}`")))
    }
}

/// Fewest timed calls for which statistics are reported.
pub const MIN_CALLS: usize = 100;
pub const DEFAULT_WARMUP: usize = 1000;
pub const DEFAULT_DIRECT_CALLS: usize = 10_000;
pub const DEFAULT_REMOTE_CALLS: usize = 1000;
/// Control-loop iterations per episode.
pub const EPISODE_LENGTH: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub mode: Mode,
    pub workload: Workload,
    pub n_warmup: usize,
    pub n_calls: usize,
    pub scene: PathBuf,
    /// Name of the dummy at the end of the arm.
    pub tip: String,
    /// Seed of the random agent.
    pub seed: u64,
}

impl BenchConfig {
    /// Defaults: 1000 warmup calls, then 10⁴ timed calls in direct mode or
    /// 10³ in the remote modes.
    pub fn new(mode: Mode, workload: Workload, scene: impl Into<PathBuf>) -> Self {
        Self {
            mode,
            workload,
            n_warmup: DEFAULT_WARMUP,
            n_calls: if mode.is_remote() {
                DEFAULT_REMOTE_CALLS
            } else {
                DEFAULT_DIRECT_CALLS
            },
            scene: scene.into(),
            tip: "tip".to_owned(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n_calls < MIN_CALLS {
            return Err(BenchError::Config(format!(
                "at least {MIN_CALLS} timed calls are required, got {}",
                self.n_calls
            )));
        }
        if self.mode == Mode::RemoteFixed(0) {
            return Err(BenchError::Config(
                "service interval must be at least 1 ms".into(),
            ));
        }
        Ok(())
    }

    pub fn interval(&self) -> Option<Duration> {
        match self.mode {
            Mode::RemoteFixed(ms) => Some(Duration::from_millis(ms)),
            _ => None,
        }
    }
}
