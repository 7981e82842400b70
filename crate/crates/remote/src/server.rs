//! TCP server that queues decoded requests into a simulator's mailbox.

use std::io::{self, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use stepsim_core::{MailboxSender, Simulator};
use thiserror::Error;

use crate::command::{execute, response_payload, Failure, Request};
use crate::protocol::{encode_raw, read_raw_frame, Opcode, Status};

pub const DEFAULT_PORT: u16 = 19997;
pub const DEFAULT_INTERVAL: Duration = Duration::from_millis(5);

/// When queued requests are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cadence {
    /// Whenever the owner calls [`Server::step`] or [`Server::service`].
    StepBoundary,
    /// A service thread owns the simulator, drains the mailbox, then sleeps
    /// for the interval before the next pass.
    FixedInterval(Duration),
}

impl Default for Cadence {
    fn default() -> Self {
        Cadence::FixedInterval(DEFAULT_INTERVAL)
    }
}

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("address {0} is already in use")]
    PortInUse(String),
    #[error("fixed service interval must be positive")]
    InvalidInterval,
    #[error(transparent)]
    Io(#[from] io::Error),
}

type Writer = Arc<Mutex<TcpStream>>;

/// State shared by the acceptor, connection readers and queued commands.
struct Shared {
    /// Cleared on shutdown; queued commands then do nothing.
    live: AtomicBool,
    mailbox: MailboxSender,
    connections: Mutex<Vec<TcpStream>>,
    readers: Mutex<Vec<JoinHandle<()>>>,
}

impl Shared {
    fn is_live(&self) -> bool {
        self.live.load(Ordering::SeqCst)
    }
}

enum Owner {
    Local(Simulator),
    Ticker(JoinHandle<Simulator>),
}

/// A served simulator. Dropping the server without calling
/// [`Server::shutdown`] or [`Server::into_simulator`] leaves its threads
/// running until the process exits.
pub struct Server {
    addr: SocketAddr,
    cadence: Cadence,
    shared: Arc<Shared>,
    acceptor: Option<JoinHandle<()>>,
    owner: Option<Owner>,
}

impl std::fmt::Debug for Server {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Server")
            .field("addr", &self.addr)
            .field("cadence", &self.cadence)
            .finish_non_exhaustive()
    }
}

fn write_response(writer: &Writer, opcode: u8, request_id: u32, payload: &[u8]) {
    if let Ok(mut stream) = writer.lock() {
        let _ = stream.write_all(&encode_raw(opcode, request_id, payload));
    }
}

fn reject(writer: &Writer, opcode: u8, request_id: u32, message: &str) {
    let payload = response_payload(&Err(Failure::new(Status::BadArgs, message)));
    write_response(writer, opcode, request_id, &payload);
}

fn handle_connection(stream: TcpStream, shared: Arc<Shared>) {
    let writer: Writer = match stream.try_clone() {
        Ok(s) => Arc::new(Mutex::new(s)),
        Err(_) => return,
    };
    let mut reader = stream;
    let mut last_id: Option<u32> = None;
    // A frame that cannot be read ends the connection
    // without a response.
    while let Ok(raw) = read_raw_frame(&mut reader) {
        if !shared.is_live() {
            break;
        }
        if last_id.is_some_and(|last| raw.request_id <= last) {
            reject(&writer, raw.opcode, raw.request_id, "request id must increase");
            break;
        }
        last_id = Some(raw.request_id);
        let Some(opcode) = Opcode::from_u8(raw.opcode) else {
            reject(&writer, raw.opcode, raw.request_id, "unknown opcode");
            continue;
        };
        let request = match Request::decode(opcode, &raw.payload) {
            Ok(r) => r,
            Err(e) => {
                reject(&writer, raw.opcode, raw.request_id, &e.to_string());
                break;
            }
        };
        let id = raw.request_id;
        let w = writer.clone();
        let s = shared.clone();
        let sent = shared.mailbox.send(Box::new(move |sim: &mut Simulator| {
            if !s.is_live() {
                return;
            }
            let result = execute(sim, &request);
            write_response(&w, opcode as u8, id, &response_payload(&result));
        }));
        if sent.is_err() {
            break;
        }
    }
    let _ = reader.shutdown(Shutdown::Both);
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>) {
    for stream in listener.incoming() {
        if !shared.is_live() {
            break;
        }
        let Ok(stream) = stream else { continue };
        let _ = stream.set_nodelay(true);
        let Ok(registered) = stream.try_clone() else {
            continue;
        };
        shared.connections.lock().unwrap().push(registered);
        let s = shared.clone();
        let reader = thread::spawn(move || handle_connection(stream, s));
        shared.readers.lock().unwrap().push(reader);
    }
}

fn ticker(mut sim: Simulator, interval: Duration, shared: Arc<Shared>) -> Simulator {
    while shared.is_live() {
        sim.service_mailbox();
        thread::sleep(interval);
    }
    sim
}

impl Server {
    /// Binds `addr` and starts accepting clients. With
    /// [`Cadence::FixedInterval`] the simulator moves to a service thread;
    /// with [`Cadence::StepBoundary`] it stays with the returned server.
    pub fn serve(
        sim: Simulator,
        addr: impl ToSocketAddrs,
        cadence: Cadence,
    ) -> Result<Server, ServerError> {
        if cadence == Cadence::FixedInterval(Duration::ZERO) {
            return Err(ServerError::InvalidInterval);
        }
        let listener = TcpListener::bind(addr).map_err(|e| match e.kind() {
            io::ErrorKind::AddrInUse => ServerError::PortInUse(e.to_string()),
            _ => ServerError::Io(e),
        })?;
        let local = listener.local_addr()?;
        let shared = Arc::new(Shared {
            live: AtomicBool::new(true),
            mailbox: sim.mailbox(),
            connections: Mutex::new(Vec::new()),
            readers: Mutex::new(Vec::new()),
        });
        let s = shared.clone();
        let acceptor = thread::spawn(move || accept_loop(listener, s));
        let owner = match cadence {
            Cadence::StepBoundary => Owner::Local(sim),
            Cadence::FixedInterval(interval) => {
                let s = shared.clone();
                Owner::Ticker(thread::spawn(move || ticker(sim, interval, s)))
            }
        };
        Ok(Server {
            addr: local,
            cadence,
            shared,
            acceptor: Some(acceptor),
            owner: Some(owner),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn cadence(&self) -> Cadence {
        self.cadence
    }

    /// The simulator, when it is held by this server (step-boundary mode).
    pub fn simulator(&self) -> Option<&Simulator> {
        match &self.owner {
            Some(Owner::Local(sim)) => Some(sim),
            _ => None,
        }
    }

    pub fn simulator_mut(&mut self) -> Option<&mut Simulator> {
        match &mut self.owner {
            Some(Owner::Local(sim)) => Some(sim),
            _ => None,
        }
    }

    /// Executes queued requests and returns how many ran. Does nothing in
    /// fixed-interval mode.
    pub fn service(&mut self) -> usize {
        self.simulator_mut().map_or(0, |sim| sim.service_mailbox())
    }

    /// Executes queued requests, then advances one step if the simulation
    /// is running. Returns whether a step was taken.
    pub fn step(&mut self) -> bool {
        let Some(sim) = self.simulator_mut() else {
            return false;
        };
        sim.service_mailbox();
        sim.advance().is_ok()
    }

    /// Stops serving, closes every client connection and hands the
    /// simulator back. Requests still queued are discarded.
    pub fn into_simulator(mut self) -> Simulator {
        self.shared.live.store(false, Ordering::SeqCst);
        // Wake the acceptor so it observes the flag.
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
        if let Some(acceptor) = self.acceptor.take() {
            let _ = acceptor.join();
        }
        for conn in self.shared.connections.lock().unwrap().drain(..) {
            let _ = conn.shutdown(Shutdown::Both);
        }
        let readers: Vec<_> = self.shared.readers.lock().unwrap().drain(..).collect();
        for r in readers {
            let _ = r.join();
        }
        let mut sim = match self.owner.take().expect("owner present until consumed") {
            Owner::Local(sim) => sim,
            Owner::Ticker(handle) => handle.join().expect("service thread panicked"),
        };
        sim.service_mailbox();
        sim
    }

    /// Closes the server and shuts the simulator down.
    pub fn shutdown(self) {
        self.into_simulator().shutdown();
    }
}
