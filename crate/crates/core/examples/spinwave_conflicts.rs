//! Replays the two-train spin-wave scenario where a shared control pulse recalls the
//! first train early, then shows how long a conflict-free block can be.

use afcsim::repeater::{fig1_scenario, max_conflict_free_block, simulate_spinwave_schedule};

fn main() -> afcsim::Result<()> {
    let (memory, trains, pulses) = fig1_scenario();
    let out = simulate_spinwave_schedule(&memory, &trains, &pulses)?;
    for e in &out.events {
        println!("{:6.1} µs  {:3}  {:?}", e.time * 1e6, e.train, e.kind);
    }
    for c in &out.conflicts {
        println!("conflict: {} hit by pulse {} at {:.1} µs ({:?})", c.train, c.pulse, c.time * 1e6, c.kind);
    }
    println!("corrupted: {:?}", out.corrupted());
    println!("conflict-free block: {} modes", max_conflict_free_block(memory.optical_storage_time, 1e-6));
    Ok(())
}
