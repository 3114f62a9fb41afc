use super::wire::WireMessage;
use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TrySendError};
use std::sync::Mutex;

/// Per-subscriber backlog; a subscriber that falls further behind is dropped.
pub const QUEUE_DEPTH: usize = 1024;

pub type ClientId = u64;

/// Exact key, or a prefix when the pattern ends in `*`.
pub fn pattern_matches(pattern: &str, key: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => key.starts_with(prefix),
        None => pattern == key,
    }
}

struct Subscriber {
    id: ClientId,
    patterns: Vec<String>,
    tx: SyncSender<WireMessage>,
}

#[derive(Default)]
struct Inner {
    next_id: ClientId,
    subs: Vec<Subscriber>,
}

/// In-process publish/subscribe hub shared by TCP connections and local consumers.
#[derive(Default)]
pub struct Bus {
    inner: Mutex<Inner>,
}

impl Bus {
    pub fn new() -> Self {
        Bus::default()
    }

    /// Registers a subscriber with an empty pattern set.
    pub fn attach(&self) -> (ClientId, Receiver<WireMessage>) {
        let (tx, rx) = sync_channel(QUEUE_DEPTH);
        let mut g = self.inner.lock().expect("bus lock");
        g.next_id += 1;
        let id = g.next_id;
        g.subs.push(Subscriber {
            id,
            patterns: Vec::new(),
            tx,
        });
        (id, rx)
    }

    /// Local consumer subscribed to `patterns`.
    pub fn subscribe_local(&self, patterns: &[&str]) -> (ClientId, Receiver<WireMessage>) {
        let (id, rx) = self.attach();
        for p in patterns {
            self.subscribe(id, p);
        }
        (id, rx)
    }

    pub fn subscribe(&self, id: ClientId, pattern: &str) {
        let mut g = self.inner.lock().expect("bus lock");
        if let Some(s) = g.subs.iter_mut().find(|s| s.id == id) {
            if !s.patterns.iter().any(|p| p == pattern) {
                s.patterns.push(pattern.to_string());
            }
        }
    }

    pub fn unsubscribe(&self, id: ClientId, pattern: &str) {
        let mut g = self.inner.lock().expect("bus lock");
        if let Some(s) = g.subs.iter_mut().find(|s| s.id == id) {
            s.patterns.retain(|p| p != pattern);
        }
    }

    pub fn detach(&self, id: ClientId) {
        self.inner.lock().expect("bus lock").subs.retain(|s| s.id != id);
    }

    pub fn subscriber_count(&self) -> usize {
        self.inner.lock().expect("bus lock").subs.len()
    }

    /// Fans `msg` out to every other matching subscriber; returns the ids
    /// dropped for overflow or disconnect.
    pub fn publish(&self, msg: &WireMessage, from: Option<ClientId>) -> Vec<ClientId> {
        let mut g = self.inner.lock().expect("bus lock");
        let mut dropped = Vec::new();
        for s in &g.subs {
            if Some(s.id) == from || !s.patterns.iter().any(|p| pattern_matches(p, &msg.key)) {
                continue;
            }
            match s.tx.try_send(msg.clone()) {
                Ok(()) => {}
                Err(TrySendError::Full(_)) => {
                    log::warn!("subscriber {} overflowed, disconnecting", s.id);
                    dropped.push(s.id);
                }
                Err(TrySendError::Disconnected(_)) => dropped.push(s.id),
            }
        }
        g.subs.retain(|s| !dropped.contains(&s.id));
        dropped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns() {
        assert!(pattern_matches("NAV_*", "NAV_X"));
        assert!(pattern_matches("NAV_X", "NAV_X"));
        assert!(!pattern_matches("NAV_X", "NAV_XY"));
        assert!(pattern_matches("*", "ANY"));
        assert!(!pattern_matches("NAV_*", "SENSOR_DEPTH"));
    }

    #[test]
    fn fan_out_skips_sender_and_nonmatching() {
        let bus = Bus::new();
        let (a, ra) = bus.subscribe_local(&["NAV_*"]);
        let (_b, rb) = bus.subscribe_local(&["NAV_*"]);
        let (_c, rc) = bus.subscribe_local(&["SENSOR_*"]);
        bus.publish(&WireMessage::double(0.0, "NAV_X", 1.0, ""), Some(a));
        assert!(ra.try_recv().is_err());
        assert_eq!(rb.try_recv().unwrap().key, "NAV_X");
        assert!(rc.try_recv().is_err());
    }

    #[test]
    fn overflow_disconnects() {
        let bus = Bus::new();
        let (id, _rx) = bus.subscribe_local(&["*"]);
        let m = WireMessage::double(0.0, "K", 0.0, "");
        for _ in 0..QUEUE_DEPTH {
            assert!(bus.publish(&m, None).is_empty());
        }
        assert_eq!(bus.publish(&m, None), vec![id]);
        assert_eq!(bus.subscriber_count(), 0);
    }
}
