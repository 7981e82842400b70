//! Blocking client with one request in flight at a time.

use std::io::{self, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use stepsim_core::{Handle, Vec3};
use thiserror::Error;

use crate::command::{parse_response, Failure, Request, Response};
use crate::protocol::{encode_frame, read_frame, FrameError, Opcode, PayloadError, ReadError, Status};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("server closed the connection")]
    ConnectionClosed,
    #[error("no response within the timeout")]
    Timeout,
    #[error("{status:?}: {message}")]
    Status { status: Status, message: String },
    #[error("malformed response frame: {0}")]
    Frame(#[from] FrameError),
    #[error("malformed response payload: {0}")]
    Payload(#[from] PayloadError),
    #[error("response to request {got} while waiting for {expected}")]
    UnexpectedResponse { expected: u32, got: u32 },
    #[error(transparent)]
    Io(io::Error),
}

impl ClientError {
    pub fn status(&self) -> Option<Status> {
        match self {
            ClientError::Status { status, .. } => Some(*status),
            _ => None,
        }
    }
}

impl From<Failure> for ClientError {
    fn from(f: Failure) -> Self {
        ClientError::Status {
            status: f.status,
            message: f.message,
        }
    }
}

fn io_error(e: io::Error) -> ClientError {
    match e.kind() {
        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => ClientError::Timeout,
        io::ErrorKind::ConnectionReset
        | io::ErrorKind::ConnectionAborted
        | io::ErrorKind::BrokenPipe
        | io::ErrorKind::UnexpectedEof => ClientError::ConnectionClosed,
        _ => ClientError::Io(e),
    }
}

impl From<ReadError> for ClientError {
    fn from(e: ReadError) -> Self {
        match e {
            ReadError::Closed | ReadError::Frame(FrameError::TruncatedFrame { .. }) => {
                ClientError::ConnectionClosed
            }
            ReadError::Frame(f) => ClientError::Frame(f),
            ReadError::Io(e) => io_error(e),
        }
    }
}

/// Image returned by [`Client::capture_rgb`]: row-major, three bytes per
/// pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

/// Image returned by [`Client::capture_depth`]: row-major metres.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

#[derive(Debug)]
pub struct Client {
    stream: TcpStream,
    next_id: u32,
}

impl Client {
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Client, ClientError> {
        Self::connect_with_timeout(addr, DEFAULT_TIMEOUT)
    }

    pub fn connect_with_timeout(
        addr: impl ToSocketAddrs,
        timeout: Duration,
    ) -> Result<Client, ClientError> {
        let stream = TcpStream::connect(addr).map_err(ClientError::Io)?;
        stream.set_nodelay(true).map_err(ClientError::Io)?;
        stream
            .set_read_timeout(Some(timeout))
            .map_err(ClientError::Io)?;
        Ok(Client { stream, next_id: 1 })
    }

    /// Sends one request and waits for its response.
    pub fn request(&mut self, request: &Request) -> Result<Response, ClientError> {
        let opcode = request.opcode();
        let payload = self.call(opcode, &request.encode_payload())?;
        Ok(parse_response(opcode, &payload)??)
    }

    /// Sends a raw request payload and returns the raw response payload,
    /// status byte included.
    pub fn call(&mut self, opcode: Opcode, payload: &[u8]) -> Result<Vec<u8>, ClientError> {
        let id = self.next_id;
        self.next_id = self.next_id.wrapping_add(1);
        self.stream
            .write_all(&encode_frame(opcode, id, payload))
            .map_err(io_error)?;
        let frame = read_frame(&mut self.stream)?;
        if frame.request_id != id {
            return Err(ClientError::UnexpectedResponse {
                expected: id,
                got: frame.request_id,
            });
        }
        Ok(frame.payload)
    }

    fn expect_empty(&mut self, request: Request) -> Result<(), ClientError> {
        match self.request(&request)? {
            Response::Empty => Ok(()),
            other => Err(unexpected(other)),
        }
    }

    pub fn step(&mut self) -> Result<(), ClientError> {
        self.expect_empty(Request::Step)
    }

    pub fn start(&mut self) -> Result<(), ClientError> {
        self.expect_empty(Request::Start)
    }

    pub fn stop(&mut self) -> Result<(), ClientError> {
        self.expect_empty(Request::Stop)
    }

    pub fn load_scene(&mut self, json: &str) -> Result<(), ClientError> {
        self.expect_empty(Request::LoadScene {
            json: json.to_owned(),
        })
    }

    pub fn get_handle(&mut self, name: &str) -> Result<Handle, ClientError> {
        match self.request(&Request::GetHandle {
            name: name.to_owned(),
        })? {
            Response::Handle(h) => Ok(h),
            other => Err(unexpected(other)),
        }
    }

    pub fn get_position(
        &mut self,
        handle: Handle,
        relative_to: Option<Handle>,
    ) -> Result<Vec3, ClientError> {
        match self.request(&Request::GetPosition {
            handle,
            relative_to,
        })? {
            Response::Position(p) => Ok(Vec3::from(p)),
            other => Err(unexpected(other)),
        }
    }

    pub fn set_position(
        &mut self,
        handle: Handle,
        position: Vec3,
        relative_to: Option<Handle>,
    ) -> Result<(), ClientError> {
        self.expect_empty(Request::SetPosition {
            handle,
            relative_to,
            position: position.into(),
        })
    }

    pub fn set_joint_target_velocity(
        &mut self,
        handle: Handle,
        velocity: f64,
    ) -> Result<(), ClientError> {
        self.expect_empty(Request::SetJointTargetVelocity { handle, velocity })
    }

    pub fn capture_rgb(&mut self, sensor: Handle) -> Result<RgbImage, ClientError> {
        match self.request(&Request::CaptureRgb { sensor })? {
            Response::Rgb {
                width,
                height,
                data,
            } => Ok(RgbImage {
                width,
                height,
                data,
            }),
            other => Err(unexpected(other)),
        }
    }

    pub fn capture_depth(&mut self, sensor: Handle) -> Result<DepthImage, ClientError> {
        match self.request(&Request::CaptureDepth { sensor })? {
            Response::Depth {
                width,
                height,
                data,
            } => Ok(DepthImage {
                width,
                height,
                data,
            }),
            other => Err(unexpected(other)),
        }
    }

    /// Joint solution for a tip target; `orientation` is a w-first unit
    /// quaternion, or `None` for a position-only solve.
    pub fn solve_ik(
        &mut self,
        tip: Handle,
        position: Vec3,
        orientation: Option<[f64; 4]>,
    ) -> Result<Vec<f64>, ClientError> {
        match self.request(&Request::SolveIk {
            tip,
            position: position.into(),
            orientation,
        })? {
            Response::Joints(q) => Ok(q),
            other => Err(unexpected(other)),
        }
    }

    pub fn plan_path(
        &mut self,
        tip: Handle,
        goal: &[f64],
        seed: u32,
    ) -> Result<Vec<Vec<f64>>, ClientError> {
        match self.request(&Request::PlanPath {
            tip,
            goal: goal.to_vec(),
            seed,
        })? {
            Response::Path(p) => Ok(p),
            other => Err(unexpected(other)),
        }
    }
}

fn unexpected(resp: Response) -> ClientError {
    ClientError::Status {
        status: Status::Internal,
        message: format!("unexpected response body {resp:?}"),
    }
}
