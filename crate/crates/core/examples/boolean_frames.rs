//! Boolean frames: the yes-or-no questions one observable can answer.
//!
//! Coarse-grains the spin-1 S_z by value ranges, shows that S_x and S_z
//! generate incompatible frames, and asks whether three-valued variables with
//! given anti-correlations admit a single joint distribution.
//!
//! Run with `cargo run --example boolean_frames`.

use corrgeo::elliptope::CorrelationTriple;
use corrgeo::quantum::{self, frame_of, frames_compatible, Direction, Ket, ValueRange};
use corrgeo::raffles::{RaffleFeasibility, CHI_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = quantum::spin_ops(2)?;
    let fine = frame_of(&s.sz, None)?;
    let coarse = frame_of(&s.sz, Some(&[ValueRange::point(1.0), ValueRange::half_open(-1.5, 0.5)]))?;
    for (name, f) in [("S_z", &fine), ("S_z coarse-grained", &coarse)] {
        let labels: Vec<String> = f.outcomes().iter().map(|o| o.label.to_string()).collect();
        println!("{name}: {}", labels.join(", "));
    }

    let sx = frame_of(&s.component(&Direction::x()), None)?;
    println!("S_z frame compatible with its coarse-graining: {}", frames_compatible(&fine, &coarse)?);
    println!("S_z frame compatible with S_x frame: {}", frames_compatible(&fine, &sx)?);

    let psi = Ket::basis(3, 0);
    println!("Born rule on |m=+1>: S_z {:?}, S_x {:?}", quantum::born(&psi, &fine)?, quantum::born(&psi, &sx)?);

    for values in [2, 3] {
        let t = CorrelationTriple::new(-0.5, -0.5, -0.5)?;
        match quantum::global_boolean_embedding_exists(&t, values)? {
            RaffleFeasibility::Feasible(r) => {
                println!("{values} values each: joint distribution exists ({} atoms)", r.len())
            }
            RaffleFeasibility::Infeasible { facet } => println!(
                "{values} values each: no joint distribution, violates {}",
                facet.to_inequality_string(&CHI_NAMES)
            ),
        }
    }
    Ok(())
}
