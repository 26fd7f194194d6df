//! Spin state vectors built from SU(2) rotors and the numerical exchange
//! phase of two-particle states.
//!
//! A [`Rotor`] keeps the sign a 3×3 rotation matrix forgets, [`dmatrix`]
//! turns it into spin matrices, and the constructions in [`twoparticle`]
//! compare states whose frames differ by a 2π rotation.

pub mod coupling;
pub mod error;
pub mod frames;
pub mod halfspin;
pub mod oracle;
pub mod rotor;
pub mod sampling;
pub mod states;
pub mod sweep;
pub mod twoparticle;
pub mod verify;
pub mod wigner;

pub use coupling::{cg, couple_total_spin, exclusion_report, exclusion_report_with, CGQuery, ExclusionRow};
pub use error::{Error, Result};
pub use frames::{bisecting_frames, bisecting_frames_with_hint, limit_frames, pair_geometry, parallel_frames, relating_rotor, Frame, PairGeometry};
pub use halfspin::HalfSpin;
pub use rotor::{Rotor, Vec3};
pub use states::{apply_rotation, canonical_ket, helicity_ket, inner_product, make_ket, phase_ratio, KetLabel, QuantumNumbers, StateVector};
pub use twoparticle::{
    bisecting_pair_state, enumerate_order_free, exchange, exchange_phase, labeled_common_frame_state, permute, symmetric_common_frame_state, symmetrize, Basis,
    ExchangePhase, ParticleSpec, TwoParticleState,
};
pub use wigner::{dmatrix, little_d, DMatrix};
pub use num_complex::Complex64;
