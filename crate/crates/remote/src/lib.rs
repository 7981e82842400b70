//! Socket API for a [`stepsim_core::Simulator`].
//!
//! Clients send length-prefixed binary frames over TCP. The server decodes
//! each request on the connection's own thread and queues it into the
//! simulator's mailbox; the request runs, and its response is written, when
//! the mailbox is next drained. See `PROTOCOL.md` for the byte layout.

pub mod client;
pub mod command;
pub mod protocol;
pub mod server;

pub use client::{Client, ClientError, DepthImage, RgbImage, DEFAULT_TIMEOUT};
pub use command::{execute, Failure, Request, Response};
pub use protocol::{
    decode_frame, encode_frame, read_frame, Frame, FrameError, Opcode, PayloadError, ReadError,
    Status, MAX_PAYLOAD,
};
pub use server::{Cadence, Server, ServerError, DEFAULT_INTERVAL, DEFAULT_PORT};
