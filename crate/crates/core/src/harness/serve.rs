//! Gateway-only mode: navigation and payload servers without a simulated vehicle.

use super::config::SimConfig;
use crate::gateway::{Bus, HydromanBoundary, HydromanService, Server};
use crate::helm::payload::{KEY_DEPTH, KEY_HEADING, KEY_SPEED};
use crate::helm::PayloadIngest;
use crate::navigation::model::{ModelParams, TermMask};
use crate::navigation::NavEngine;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

pub struct Gateways {
    pub nav: Server,
    pub payload: Server,
    pub nav_bus: Arc<Bus>,
    pub payload_bus: Arc<Bus>,
    /// Latest payload commands; times are seconds since start.
    pub ingest: Arc<Mutex<PayloadIngest>>,
    service: HydromanService,
    stop: Arc<AtomicBool>,
    payload_thread: JoinHandle<()>,
}

impl Gateways {
    pub fn start(host: &str, nav_port: u16, payload_port: u16, cfg: &SimConfig) -> std::io::Result<Gateways> {
        let nav_bus = Arc::new(Bus::new());
        let payload_bus = Arc::new(Bus::new());
        let nav = Server::bind((host, nav_port), nav_bus.clone())?;
        let payload = Server::bind((host, payload_port), payload_bus.clone())?;
        let (a, b, g) = cfg.flight_model;
        let engine = NavEngine::new(cfg.nav, ModelParams::new(a, b, g, cfg.nav_lambda, TermMask::default()));
        let service = HydromanService::spawn(nav_bus.clone(), HydromanBoundary::new(engine));

        let ingest = Arc::new(Mutex::new(PayloadIngest::new(cfg.payload_timeout)));
        let stop = Arc::new(AtomicBool::new(false));
        let (id, rx) = payload_bus.subscribe_local(&[KEY_HEADING, KEY_SPEED, KEY_DEPTH]);
        let (flag, sink, bus) = (stop.clone(), ingest.clone(), payload_bus.clone());
        let t0 = Instant::now();
        let payload_thread = std::thread::spawn(move || {
            while !flag.load(Ordering::Relaxed) {
                if let Ok(m) = rx.recv_timeout(Duration::from_millis(20)) {
                    let ok = sink
                        .lock()
                        .expect("payload ingest lock")
                        .ingest(&m.key, m.value.as_f64(), t0.elapsed().as_secs_f64());
                    log::info!("payload {} = {:?} ({})", m.key, m.value, if ok { "accepted" } else { "rejected" });
                }
            }
            bus.detach(id);
        });
        Ok(Gateways {
            nav,
            payload,
            nav_bus,
            payload_bus,
            ingest,
            service,
            stop,
            payload_thread,
        })
    }

    pub fn addrs(&self) -> (SocketAddr, SocketAddr) {
        (self.nav.local_addr(), self.payload.local_addr())
    }

    pub fn shutdown(self) -> HydromanBoundary {
        self.stop.store(true, Ordering::Relaxed);
        let _ = self.payload_thread.join();
        self.nav.shutdown();
        self.payload.shutdown();
        self.service.stop()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{Client, WireMessage};

    #[test]
    fn payload_command_reaches_ingest() {
        let g = Gateways::start("127.0.0.1", 0, 0, &SimConfig::builtin()).unwrap();
        let mut c = Client::connect(g.addrs().1).unwrap();
        c.publish(&WireMessage::double(0.0, KEY_HEADING, 90.0, "payload")).unwrap();
        let deadline = Instant::now() + Duration::from_secs(5);
        while g.ingest.lock().unwrap().accepted == 0 && Instant::now() < deadline {
            std::thread::sleep(Duration::from_millis(5));
        }
        assert_eq!(g.ingest.lock().unwrap().accepted, 1);
        g.shutdown();
    }
}
