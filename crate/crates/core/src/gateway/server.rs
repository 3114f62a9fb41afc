use super::bus::{Bus, ClientId};
use super::wire::{encode, read_frame, ReadError, WireMessage, WireValue};
use std::collections::VecDeque;
use std::io::{BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

pub const DEFAULT_NAV_PORT: u16 = 9001;
pub const DEFAULT_PAYLOAD_PORT: u16 = 9002;

/// Control keys handled by the server rather than routed; value is the pattern text.
pub const KEY_SUBSCRIBE: &str = "SUBSCRIBE";
pub const KEY_UNSUBSCRIBE: &str = "UNSUBSCRIBE";
/// Sent back to the client once a (un)subscription is in effect.
pub const KEY_ACK: &str = "ACK";

pub struct Server {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    conns: Arc<Mutex<Vec<TcpStream>>>,
    accept: Option<JoinHandle<()>>,
}

impl Server {
    /// Binds and starts accepting; each connection gets a reader and a writer thread.
    pub fn bind<A: ToSocketAddrs>(addr: A, bus: Arc<Bus>) -> std::io::Result<Server> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let conns: Arc<Mutex<Vec<TcpStream>>> = Arc::default();
        let (stop2, conns2) = (stop.clone(), conns.clone());
        let accept = std::thread::Builder::new()
            .name("gateway-accept".into())
            .spawn(move || {
                for stream in listener.incoming() {
                    if stop2.load(Ordering::SeqCst) {
                        break;
                    }
                    match stream {
                        Ok(s) => {
                            if let Ok(c) = s.try_clone() {
                                conns2.lock().expect("conn list").push(c);
                            }
                            if let Err(e) = spawn_connection(s, bus.clone()) {
                                log::warn!("connection setup failed: {e}");
                            }
                        }
                        Err(e) => log::warn!("accept failed: {e}"),
                    }
                }
            })?;
        Ok(Server {
            addr,
            stop,
            conns,
            accept: Some(accept),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.stop_all();
    }

    fn stop_all(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
        for c in self.conns.lock().expect("conn list").drain(..) {
            let _ = c.shutdown(Shutdown::Both);
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        if self.accept.is_some() {
            self.stop_all();
        }
    }
}

fn spawn_connection(stream: TcpStream, bus: Arc<Bus>) -> std::io::Result<()> {
    stream.set_nodelay(true)?;
    let (id, rx) = bus.attach();
    let writer = Arc::new(Mutex::new(stream.try_clone()?));
    let w2 = writer.clone();
    std::thread::Builder::new().name(format!("gateway-tx-{id}")).spawn(move || {
        for m in rx {
            let Ok(b) = encode(&m) else { continue };
            if w2.lock().expect("writer").write_all(&b).is_err() {
                break;
            }
        }
        // channel closed by overflow or detach
        let _ = w2.lock().expect("writer").shutdown(Shutdown::Both);
    })?;
    std::thread::Builder::new()
        .name(format!("gateway-rx-{id}"))
        .spawn(move || reader_loop(stream, id, bus, writer))?;
    Ok(())
}

fn reader_loop(stream: TcpStream, id: ClientId, bus: Arc<Bus>, writer: Arc<Mutex<TcpStream>>) {
    let mut r = BufReader::new(stream);
    loop {
        match read_frame(&mut r) {
            Ok(m) => match (m.key.as_str(), &m.value) {
                (KEY_SUBSCRIBE, WireValue::Text(p)) => {
                    bus.subscribe(id, p);
                    ack(&writer, &m);
                }
                (KEY_UNSUBSCRIBE, WireValue::Text(p)) => {
                    bus.unsubscribe(id, p);
                    ack(&writer, &m);
                }
                _ => {
                    bus.publish(&m, Some(id));
                }
            },
            Err(ReadError::Wire(e)) => {
                log::warn!("client {id} sent a bad frame: {e}");
                break;
            }
            Err(ReadError::Io(_)) => break,
        }
    }
    bus.detach(id);
}

fn ack(writer: &Mutex<TcpStream>, m: &WireMessage) {
    if let Ok(b) = encode(&WireMessage {
        key: KEY_ACK.into(),
        ..m.clone()
    }) {
        let _ = writer.lock().expect("writer").write_all(&b);
    }
}

/// Blocking TCP client.
pub struct Client {
    stream: TcpStream,
    reader: BufReader<TcpStream>,
    pending: VecDeque<WireMessage>,
}

impl Client {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> std::io::Result<Client> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(Client {
            stream,
            reader,
            pending: VecDeque::new(),
        })
    }

    pub fn publish(&mut self, m: &WireMessage) -> Result<(), ReadError> {
        let b = encode(m)?;
        self.stream.write_all(&b)?;
        Ok(())
    }

    fn control(&mut self, key: &str, pattern: &str) -> Result<(), ReadError> {
        self.publish(&WireMessage::text(0.0, key, pattern, ""))?;
        loop {
            let m = read_frame(&mut self.reader)?;
            if m.key == KEY_ACK && m.value.as_str() == Some(pattern) {
                return Ok(());
            }
            self.pending.push_back(m);
        }
    }

    /// Returns once the server has registered the pattern.
    pub fn subscribe(&mut self, pattern: &str) -> Result<(), ReadError> {
        self.control(KEY_SUBSCRIBE, pattern)
    }

    pub fn unsubscribe(&mut self, pattern: &str) -> Result<(), ReadError> {
        self.control(KEY_UNSUBSCRIBE, pattern)
    }

    pub fn recv(&mut self) -> Result<WireMessage, ReadError> {
        match self.pending.pop_front() {
            Some(m) => Ok(m),
            None => read_frame(&mut self.reader),
        }
    }

    pub fn set_read_timeout(&self, d: Option<std::time::Duration>) -> std::io::Result<()> {
        self.stream.set_read_timeout(d)
    }

    /// Raw write for fault injection.
    pub fn write_raw(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        self.stream.write_all(bytes)
    }
}
