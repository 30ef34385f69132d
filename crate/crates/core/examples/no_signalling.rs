//! Ensembles, improper mixtures and no-signalling.
//!
//! Two different qubit ensembles give the same density operator, so no
//! measurement tells them apart. The reduced state of one half of a singlet
//! is maximally mixed, and no measurement on the far half changes the near
//! half's statistics.
//!
//! Run with `cargo run --example no_signalling`.

use corrgeo::quantum::{
    self, born, frame_of, BooleanFrame, CMatrix, DensityOperator, Direction, Ket, SpinOperators, Subsystem,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let up_down = quantum::ensemble_density(&[(0.5, Ket::basis(2, 0)), (0.5, Ket::basis(2, 1))])?;
    let plus_minus = quantum::ensemble_density(&[(0.5, Ket::from_real(&[r, r])?), (0.5, Ket::from_real(&[r, -r])?)])?;
    let diff = max_entry(&(up_down.matrix() - plus_minus.matrix()));
    println!("{{up, down}} and {{+, -}} ensembles differ by {diff:.1e} entrywise");

    let s = quantum::spin_ops(1)?;
    let sx = frame_of(&s.component(&Direction::x()), None)?;
    println!(
        "Born probabilities for S_x: {:?} vs {:?}",
        born(&up_down, &sx)?,
        born(&plus_minus, &sx)?
    );

    for spin2 in [1, 2, 3] {
        let d = spin2 as usize + 1;
        let rho = quantum::singlet(spin2)?.density();
        let reduced = quantum::partial_trace(&rho, (d, d), Subsystem::A)?;
        let mixed = max_entry(&(reduced.matrix() - DensityOperator::maximally_mixed(d).matrix()));
        let ops = quantum::spin_ops(spin2)?;
        let frames_b = bob_frames(&ops)?;
        let dev = quantum::no_signalling_check(&rho, (d, d), &[], &frames_b)?;
        println!(
            "singlet 2s = {spin2}: reduced state is I/{d} to {mixed:.1e}, \
             largest shift in A's statistics from measuring B = {dev:.1e}"
        );
    }
    Ok(())
}

fn bob_frames(ops: &SpinOperators) -> Result<Vec<BooleanFrame>, quantum::QuantumError> {
    let dirs = [
        Direction::z(),
        Direction::x(),
        Direction::from_spherical(1.0, 2.0),
    ];
    dirs.iter().map(|a| frame_of(&ops.component(a), None)).collect()
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
