//! The Mermin point (-1/2, -1/2, -1/2) from four sides.
//!
//! It sits on the elliptope boundary, no spin-1/2 raffle reaches it (the LP
//! returns the violated tetrahedron facet), a spin-1 raffle does (the LP
//! returns an exact witness), and the spin-s singlet produces it at mutual
//! 120 degree settings for every spin.
//!
//! Run with `cargo run --example mermin_point`.

use corrgeo::elliptope;
use corrgeo::quantum::{self, Direction};
use corrgeo::raffles::{self, BalancedValueSet, RaffleFeasibility, CHI_NAMES};
use corrgeo::rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let half = rational::ratio(-1, 2);
    let target = [half.clone(), half.clone(), half];

    println!("elliptope value: {}", rational::format(&elliptope::elliptope_value_exact(&target)));

    for spin2 in [1, 2] {
        match raffles::feasible(&BalancedValueSet::new(spin2), &target)? {
            RaffleFeasibility::Infeasible { facet } => {
                println!("2s = {spin2}: infeasible, violates {}", facet.to_inequality_string(&CHI_NAMES))
            }
            RaffleFeasibility::Feasible(r) => {
                println!("2s = {spin2}: feasible with {} tickets", r.len());
                for (t, p) in r.tickets() {
                    let x: Vec<String> = t.values().iter().map(rational::format).collect();
                    println!("    p = {:>5}  party 1 values (a, b, c) = ({})", rational::format(p), x.join(", "));
                }
                let chi: Vec<String> = raffles::chi_exact(&r)?.iter().map(rational::format).collect();
                println!("    exact chi = ({})", chi.join(", "));
            }
        }
    }

    let third = 2.0 * std::f64::consts::PI / 3.0;
    let dirs = [
        Direction::from_spherical(std::f64::consts::FRAC_PI_2, 0.0),
        Direction::from_spherical(std::f64::consts::FRAC_PI_2, third),
        Direction::from_spherical(std::f64::consts::FRAC_PI_2, 2.0 * third),
    ];
    for spin2 in 1..=10 {
        let chi = quantum::chi_triple(spin2, &dirs)?;
        println!("singlet 2s = {spin2:>2}: chi = [{:+.12}, {:+.12}, {:+.12}]", chi[0], chi[1], chi[2]);
    }
    Ok(())
}
