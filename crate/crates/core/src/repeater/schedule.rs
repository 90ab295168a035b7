use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrainState {
    #[default]
    Optical,
    Spin,
    Reemitted,
    Corrupted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitTrain {
    pub id: String,
    pub arrival_time: f64,
    pub n_modes: u32,
    pub mode_duration: f64,
    #[serde(default)]
    pub state: TrainState,
}

impl QubitTrain {
    pub fn new(id: impl Into<String>, arrival_time: f64, n_modes: u32, mode_duration: f64) -> Self {
        Self {
            id: id.into(),
            arrival_time,
            n_modes,
            mode_duration,
            state: TrainState::Optical,
        }
    }

    pub fn absorption_end(&self) -> f64 {
        self.arrival_time + self.n_modes as f64 * self.mode_duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseDirection {
    /// Optical (excited) to spin coherence.
    Down,
    /// Spin back to optical coherence.
    Up,
}

/// A π-pulse pair acting on every stored train. The direction records the intended
/// transfer; physically the pulse swaps the two domains of whatever is in the memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlPulse {
    pub time: f64,
    pub direction: PulseDirection,
}

impl ControlPulse {
    pub fn down(time: f64) -> Self {
        Self { time, direction: PulseDirection::Down }
    }

    pub fn up(time: f64) -> Self {
        Self { time, direction: PulseDirection::Up }
    }
}

/// Memory with a fixed optical rephasing time (1/Δ). Time spent in spin coherence does
/// not count towards it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinWaveMemory {
    pub optical_storage_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Absorbed,
    ToSpin,
    ToOptical,
    Reemitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub time: f64,
    pub train: String,
    pub kind: EventKind,
    pub pulse: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    /// A down pulse returned a spin-stored train to optical coherence.
    UnintendedRecall,
    /// An up pulse moved an optical train into spin coherence.
    UnintendedTransfer,
    /// A pulse arrived while the train was still being absorbed.
    AbsorptionInterrupted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conflict {
    pub train: String,
    pub pulse: usize,
    pub time: f64,
    pub kind: ConflictKind,
    /// When the train actually leaves the memory after the conflict, if it does.
    pub forced_reemission: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    pub events: Vec<ScheduleEvent>,
    pub conflicts: Vec<Conflict>,
    /// Trains with their final states, input order.
    pub trains: Vec<QubitTrain>,
    pub reemission_times: Vec<Option<f64>>,
}

impl ScheduleOutcome {
    pub fn corrupted(&self) -> Vec<&str> {
        self.trains
            .iter()
            .filter(|t| t.state == TrainState::Corrupted)
            .map(|t| t.id.as_str())
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Domain {
    Waiting,
    Optical,
    Spin,
    Gone,
}

struct Track {
    domain: Domain,
    /// Optical time accumulated before the current optical stretch.
    clock: f64,
    since: f64,
    corrupted: bool,
    reemitted: Option<f64>,
}

fn validate(memory: &SpinWaveMemory, trains: &[QubitTrain], pulses: &[ControlPulse]) -> Result<()> {
    if !(memory.optical_storage_time > 0.0) {
        return Err(Error::invalid("optical_storage_time", "must be positive"));
    }
    for t in trains {
        if t.n_modes == 0 || !(t.mode_duration > 0.0) || !t.arrival_time.is_finite() {
            return Err(Error::invalid("trains", format!("train {} needs n_modes ≥ 1 and a positive mode duration", t.id)));
        }
    }
    if trains.windows(2).any(|w| w[1].arrival_time < w[0].arrival_time) {
        return Err(Error::invalid("trains", "must be sorted by arrival time"));
    }
    if pulses.windows(2).any(|w| !(w[1].time > w[0].time)) {
        return Err(Error::invalid("pulses", "times must be strictly increasing"));
    }
    Ok(())
}

/// Runs the memory timeline. Every pulse toggles every train that has arrived and not
/// yet been re-emitted; a toggle that contradicts the pulse direction, or that hits a
/// train mid-absorption, is a conflict and corrupts that train.
pub fn simulate_spinwave_schedule(
    memory: &SpinWaveMemory,
    trains: &[QubitTrain],
    pulses: &[ControlPulse],
) -> Result<ScheduleOutcome> {
    validate(memory, trains, pulses)?;
    let t_opt = memory.optical_storage_time;
    let mut tracks: Vec<Track> = trains
        .iter()
        .map(|_| Track { domain: Domain::Waiting, clock: 0.0, since: 0.0, corrupted: false, reemitted: None })
        .collect();
    let mut events = Vec::new();
    let mut conflicts = Vec::new();

    // Advances every train to time `now` (exclusive of pulses at `now`).
    let advance = |now: f64, tracks: &mut [Track], events: &mut Vec<ScheduleEvent>| {
        let mut pending: Vec<ScheduleEvent> = Vec::new();
        for (i, tr) in tracks.iter_mut().enumerate() {
            if tr.domain == Domain::Waiting && trains[i].arrival_time <= now {
                tr.domain = Domain::Optical;
                tr.since = trains[i].arrival_time;
                pending.push(ScheduleEvent {
                    time: trains[i].arrival_time,
                    train: trains[i].id.clone(),
                    kind: EventKind::Absorbed,
                    pulse: None,
                });
            }
            if tr.domain == Domain::Optical {
                let due = tr.since + (t_opt - tr.clock);
                if due <= now {
                    tr.domain = Domain::Gone;
                    tr.reemitted = Some(due);
                    pending.push(ScheduleEvent {
                        time: due,
                        train: trains[i].id.clone(),
                        kind: EventKind::Reemitted,
                        pulse: None,
                    });
                }
            }
        }
        pending.sort_by(|a, b| a.time.total_cmp(&b.time));
        events.extend(pending);
    };

    for (p, pulse) in pulses.iter().enumerate() {
        advance(pulse.time, &mut tracks, &mut events);
        for (i, tr) in tracks.iter_mut().enumerate() {
            let train = &trains[i];
            let kind = match tr.domain {
                Domain::Optical => {
                    tr.clock += pulse.time - tr.since;
                    tr.domain = Domain::Spin;
                    (pulse.direction == PulseDirection::Up).then_some(ConflictKind::UnintendedTransfer)
                }
                Domain::Spin => {
                    tr.domain = Domain::Optical;
                    tr.since = pulse.time;
                    (pulse.direction == PulseDirection::Down).then_some(ConflictKind::UnintendedRecall)
                }
                Domain::Waiting | Domain::Gone => continue,
            };
            events.push(ScheduleEvent {
                time: pulse.time,
                train: train.id.clone(),
                kind: if tr.domain == Domain::Spin { EventKind::ToSpin } else { EventKind::ToOptical },
                pulse: Some(p),
            });
            let interrupted = pulse.time < train.absorption_end();
            for k in kind.into_iter().chain(interrupted.then_some(ConflictKind::AbsorptionInterrupted)) {
                tr.corrupted = true;
                conflicts.push(Conflict {
                    train: train.id.clone(),
                    pulse: p,
                    time: pulse.time,
                    kind: k,
                    forced_reemission: None,
                });
            }
        }
    }
    advance(f64::INFINITY, &mut tracks, &mut events);

    for c in conflicts.iter_mut() {
        let i = trains.iter().position(|t| t.id == c.train).unwrap_or(0);
        c.forced_reemission = tracks[i].reemitted;
    }
    let trains_out = trains
        .iter()
        .zip(&tracks)
        .map(|(t, tr)| QubitTrain {
            state: match (tr.corrupted, tr.domain) {
                (true, _) => TrainState::Corrupted,
                (false, Domain::Gone) => TrainState::Reemitted,
                (false, Domain::Spin) => TrainState::Spin,
                (false, _) => TrainState::Optical,
            },
            ..t.clone()
        })
        .collect();
    Ok(ScheduleOutcome {
        events,
        conflicts,
        trains: trains_out,
        reemission_times: tracks.iter().map(|t| t.reemitted).collect(),
    })
}

/// The two-train timeline of the spin-wave storage argument: R1 is transferred to spin,
/// R2 arrives, and the pulse meant to transfer R2 recalls R1 as well.
pub fn fig1_scenario() -> (SpinWaveMemory, Vec<QubitTrain>, Vec<ControlPulse>) {
    let us = 1e-6;
    (
        SpinWaveMemory { optical_storage_time: 10.0 * us },
        vec![
            QubitTrain::new("R1", 0.0, 5, us),
            QubitTrain::new("R2", 7.0 * us, 5, us),
        ],
        vec![
            ControlPulse::down(6.0 * us),
            ControlPulse::down(13.0 * us),
            ControlPulse::up(30.0 * us),
        ],
    )
}

/// `floor(optical_storage_time / mode_duration)`.
pub fn max_conflict_free_block(optical_storage_time: f64, mode_duration: f64) -> u64 {
    if !(optical_storage_time > 0.0 && mode_duration > 0.0) {
        return 0;
    }
    (optical_storage_time / mode_duration * (1.0 + 1e-12)).floor() as u64
}
