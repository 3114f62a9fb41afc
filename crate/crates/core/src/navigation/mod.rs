//! Model-aided navigation: sensor preprocessors, a self-identifying flight
//! model, environment calibration, layered fusion and a navigation manager.

pub mod calibrator;
pub mod depth;
pub mod dvl;
pub mod engine;
pub mod fusion;
pub mod lbl;
pub mod manager;
pub mod model;

pub use crate::measurement::{DvlFrame, Measurement, Stream};
pub use calibrator::{Calibrator, CalibratorConfig};
pub use depth::DepthFilter;
pub use dvl::{DvlConfig, DvlPreprocessor, DvlVelocity};
pub use engine::{NavBias, NavConfig, NavCounters, NavEngine, NavError, NavSolution};
pub use fusion::{BiasConfig, BiasLayer, FixOutcome, MainFilter};
pub use lbl::{lbl_extrapolate, TrackBuffer};
pub use manager::{ManagerConfig, NavManager, NavStatus};
pub use model::{model_velocity, rls_update, ModelParams, Regressors, TermMask};
