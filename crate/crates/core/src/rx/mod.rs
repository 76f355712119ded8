//! Iterative receiver: interference cancelation front end, trellis
//! demodulation on the mismatched metric, outer decoding and the global loop.

mod code;
mod design;
mod interleave;
mod lmmse;
mod receiver;
mod trellis;

pub use code::{outer_decode, rsc_log_map, CodeConfig, CodeKind, DecodeOutput, OuterCode};
pub use design::{mimo_design, mimo_front_end, DesignConfig, IsiDesign, IsiDesigner, RxMethod};
pub use interleave::Interleaver;
pub use lmmse::lmmse_pic_demodulate;
pub use receiver::{run_iterative_receiver, IterationRecord, IterationTrace, Link, ReceiverConfig, TxConfig};
pub use trellis::{bcjr_demodulate, trellis_app, BandedTrellis, MetricKind, TrellisInput, TrellisOutput, TrellisSpec, MAX_STATES};
