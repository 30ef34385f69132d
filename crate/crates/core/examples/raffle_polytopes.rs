//! Local hidden-variable correlation polytopes for spin 1/2 through 3.
//!
//! For each value set the exact set of anti-correlation triples reachable by
//! raffles with uniform marginals, its facets, and a check that every vertex
//! lies in the elliptope. The spin-1/2 body is the tetrahedron; higher spins
//! approach the elliptope from inside.
//!
//! Run with `cargo run --release --example raffle_polytopes`.

use corrgeo::elliptope;
use corrgeo::polytope;
use corrgeo::raffles::{self, BalancedValueSet, CHI_NAMES};
use corrgeo::rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spin2 in 1..=raffles::MAX_SPIN2 {
        let vs = BalancedValueSet::new(spin2);
        let v = raffles::raffle_polytope(&vs)?;
        let h = polytope::facets(&v)?;
        let min_value = v
            .vertices()
            .iter()
            .map(|x| elliptope::elliptope_value_exact(&[x[0].clone(), x[1].clone(), x[2].clone()]))
            .min()
            .expect("nonempty polytope");
        println!(
            "2s = {spin2}: {} values, {} vertices, {} facets, min elliptope value at a vertex = {}",
            vs.len(),
            v.vertices().len(),
            h.inequalities().len(),
            rational::format(&min_value),
        );
        if spin2 <= 2 {
            for f in h.inequalities() {
                println!("    {}", f.to_inequality_string(&CHI_NAMES));
            }
        }
    }

    // the second-moment relaxation agrees up to 2s = 3 and is strictly larger after
    let vs = BalancedValueSet::new(4);
    let exact = raffles::raffle_polytope(&vs)?;
    let relaxed = raffles::variance_polytope(&vs)?;
    println!(
        "2s = 4: exact body has {} vertices, second-moment relaxation has {}",
        exact.vertices().len(),
        relaxed.vertices().len()
    );
    Ok(())
}
