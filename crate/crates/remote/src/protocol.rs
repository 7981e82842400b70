//! Frame layout and primitive payload encodings.
//!
//! Every message is `payload_len: u32 LE | opcode: u8 | request_id: u32 LE |
//! payload`. Responses reuse the layout, echo the request's opcode and id,
//! and start their payload with a [`Status`] byte.

use std::io::{self, Read};

use thiserror::Error;

/// Largest accepted payload, in bytes.
pub const MAX_PAYLOAD: usize = 64 << 20;

pub const HEADER_LEN: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opcode {
    Step = 0x01,
    GetPosition = 0x02,
    SetPosition = 0x03,
    SetJointTargetVelocity = 0x04,
    CaptureRgb = 0x05,
    CaptureDepth = 0x06,
    GetHandle = 0x07,
    Start = 0x08,
    Stop = 0x09,
    LoadScene = 0x0A,
    SolveIk = 0x0B,
    PlanPath = 0x0C,
}

impl Opcode {
    pub const ALL: [Opcode; 12] = [
        Opcode::Step,
        Opcode::GetPosition,
        Opcode::SetPosition,
        Opcode::SetJointTargetVelocity,
        Opcode::CaptureRgb,
        Opcode::CaptureDepth,
        Opcode::GetHandle,
        Opcode::Start,
        Opcode::Stop,
        Opcode::LoadScene,
        Opcode::SolveIk,
        Opcode::PlanPath,
    ];

    pub fn from_u8(b: u8) -> Option<Opcode> {
        Self::ALL.into_iter().find(|op| *op as u8 == b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Status {
    Ok = 0x00,
    NotFound = 0x01,
    BadArgs = 0x02,
    SimNotRunning = 0x03,
    WrongMode = 0x04,
    Internal = 0x05,
}

impl Status {
    pub fn from_u8(b: u8) -> Option<Status> {
        [
            Status::Ok,
            Status::NotFound,
            Status::BadArgs,
            Status::SimNotRunning,
            Status::WrongMode,
            Status::Internal,
        ]
        .into_iter()
        .find(|s| *s as u8 == b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub opcode: Opcode,
    pub request_id: u32,
    pub payload: Vec<u8>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("declared payload of {0} bytes exceeds the frame limit")]
    FrameTooLarge(usize),
    #[error("frame needs {needed} bytes, only {available} available")]
    TruncatedFrame { needed: usize, available: usize },
    #[error("unknown opcode {opcode:#04x} in request {request_id}")]
    UnknownOpcode { opcode: u8, request_id: u32 },
}

/// Failure while reading a frame from a byte stream.
#[derive(Debug, Error)]
pub enum ReadError {
    /// The stream ended cleanly between frames.
    #[error("connection closed")]
    Closed,
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn encode_raw(opcode: u8, request_id: u32, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.push(opcode);
    out.extend_from_slice(&request_id.to_le_bytes());
    out.extend_from_slice(payload);
    out
}

/// Panics if the payload exceeds [`MAX_PAYLOAD`].
pub fn encode_frame(opcode: Opcode, request_id: u32, payload: &[u8]) -> Vec<u8> {
    assert!(payload.len() <= MAX_PAYLOAD, "payload exceeds MAX_PAYLOAD");
    encode_raw(opcode as u8, request_id, payload)
}

fn header(bytes: &[u8; HEADER_LEN]) -> (usize, u8, u32) {
    let len = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let id = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
    (len, bytes[4], id)
}

/// Decodes the frame at the start of `bytes` and returns it with the number
/// of bytes it occupied. Trailing bytes are left for the caller.
pub fn decode_frame(bytes: &[u8]) -> Result<(Frame, usize), FrameError> {
    let Some(head) = bytes.first_chunk::<HEADER_LEN>() else {
        return Err(FrameError::TruncatedFrame {
            needed: HEADER_LEN,
            available: bytes.len(),
        });
    };
    let (len, op, request_id) = header(head);
    if len > MAX_PAYLOAD {
        return Err(FrameError::FrameTooLarge(len));
    }
    let total = HEADER_LEN + len;
    if bytes.len() < total {
        return Err(FrameError::TruncatedFrame {
            needed: total,
            available: bytes.len(),
        });
    }
    let opcode = Opcode::from_u8(op).ok_or(FrameError::UnknownOpcode {
        opcode: op,
        request_id,
    })?;
    let frame = Frame {
        opcode,
        request_id,
        payload: bytes[HEADER_LEN..total].to_vec(),
    };
    Ok((frame, total))
}

/// Header fields and payload of one frame read from a stream, without
/// opcode validation.
pub(crate) struct RawFrame {
    pub opcode: u8,
    pub request_id: u32,
    pub payload: Vec<u8>,
}

fn read_full(r: &mut impl Read, buf: &mut [u8]) -> Result<usize, io::Error> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

pub(crate) fn read_raw_frame(r: &mut impl Read) -> Result<RawFrame, ReadError> {
    let mut head = [0u8; HEADER_LEN];
    let got = read_full(r, &mut head)?;
    if got == 0 {
        return Err(ReadError::Closed);
    }
    if got < HEADER_LEN {
        return Err(FrameError::TruncatedFrame {
            needed: HEADER_LEN,
            available: got,
        }
        .into());
    }
    let (len, opcode, request_id) = header(&head);
    if len > MAX_PAYLOAD {
        return Err(FrameError::FrameTooLarge(len).into());
    }
    let mut payload = vec![0u8; len];
    let got = read_full(r, &mut payload)?;
    if got < len {
        return Err(FrameError::TruncatedFrame {
            needed: HEADER_LEN + len,
            available: HEADER_LEN + got,
        }
        .into());
    }
    Ok(RawFrame {
        opcode,
        request_id,
        payload,
    })
}

/// Reads exactly one frame from a blocking stream.
pub fn read_frame(r: &mut impl Read) -> Result<Frame, ReadError> {
    let raw = read_raw_frame(r)?;
    let opcode = Opcode::from_u8(raw.opcode).ok_or(FrameError::UnknownOpcode {
        opcode: raw.opcode,
        request_id: raw.request_id,
    })?;
    Ok(Frame {
        opcode,
        request_id: raw.request_id,
        payload: raw.payload,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PayloadError {
    #[error("payload ends early")]
    Truncated,
    #[error("{0} unexpected bytes after the payload")]
    TrailingBytes(usize),
    #[error("string is not valid UTF-8")]
    BadUtf8,
    #[error("expected a vector of {expected} values, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("unknown status byte {0:#04x}")]
    BadStatus(u8),
}

/// Appends primitive values in wire encoding.
#[derive(Debug, Default, Clone)]
pub struct PayloadWriter {
    buf: Vec<u8>,
}

impl PayloadWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(mut self, v: u8) -> Self {
        self.buf.push(v);
        self
    }

    pub fn u32(mut self, v: u32) -> Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(mut self, v: f64) -> Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    /// `u32` count followed by that many `f64`.
    pub fn vector(mut self, v: &[f64]) -> Self {
        self = self.u32(v.len() as u32);
        for x in v {
            self = self.f64(*x);
        }
        self
    }

    /// `u32` byte length followed by UTF-8 bytes.
    pub fn string(mut self, s: &str) -> Self {
        self = self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
        self
    }

    pub fn bytes(mut self, b: &[u8]) -> Self {
        self.buf.extend_from_slice(b);
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

/// Consumes primitive values from a payload.
#[derive(Debug, Clone)]
pub struct PayloadReader<'a> {
    buf: &'a [u8],
}

impl<'a> PayloadReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], PayloadError> {
        if self.buf.len() < n {
            return Err(PayloadError::Truncated);
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8, PayloadError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, PayloadError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64, PayloadError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn vector(&mut self) -> Result<Vec<f64>, PayloadError> {
        let n = self.u32()? as usize;
        if n > self.buf.len() / 8 {
            return Err(PayloadError::Truncated);
        }
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn fixed_vector<const N: usize>(&mut self) -> Result<[f64; N], PayloadError> {
        let v = self.vector()?;
        let got = v.len();
        v.try_into()
            .map_err(|_| PayloadError::BadLength { expected: N, got })
    }

    pub fn string(&mut self) -> Result<String, PayloadError> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| PayloadError::BadUtf8)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn finish(self) -> Result<(), PayloadError> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(PayloadError::TrailingBytes(n)),
        }
    }
}
