//! Why a repeater memory wants long optical storage.
//!
//! In spin-wave storage a control pulse swaps optical and spin coherence for every atom
//! it addresses, so it cannot move one stored train without also moving the others.
//! [`simulate_spinwave_schedule`] plays out a timeline of trains and pulses and reports
//! every train that was moved against the intent of a pulse. The rate model then
//! counts how many modes a memory can hold per attempt under each protocol.

mod rate;
mod schedule;

pub use rate::{entanglement_rate, Protocol, RateEstimate, RepeaterConfig};
pub use schedule::{
    fig1_scenario, max_conflict_free_block, simulate_spinwave_schedule, Conflict, ConflictKind,
    ControlPulse, EventKind, PulseDirection, QubitTrain, ScheduleEvent, ScheduleOutcome,
    SpinWaveMemory, TrainState,
};
