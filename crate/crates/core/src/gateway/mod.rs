//! Framed key/value messaging over TCP and an in-process bus.

pub mod bus;
pub mod hydroman;
pub mod server;
pub mod wire;

pub use bus::{pattern_matches, Bus, ClientId, QUEUE_DEPTH};
pub use hydroman::{measurement_to_messages, solution_to_messages, Assembler, HydromanBoundary, HydromanService, KEY_TICK};
pub use server::{Client, Server, DEFAULT_NAV_PORT, DEFAULT_PAYLOAD_PORT};
pub use wire::{decode, encode, read_frame, ReadError, WireError, WireMessage, WireValue, MAX_FRAME};
