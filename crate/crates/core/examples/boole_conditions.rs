//! Boole's conditions of possible experience for the CHSH event system.
//!
//! Four atomic events (Alice's two settings, Bob's two settings) and the four
//! joint events across parties. The 16 consistent 0/1 assignments span the
//! correlation polytope; its facets are the Bell-type inequalities, among them
//! the Clauser-Horne inequality.
//!
//! Run with `cargo run --example boole_conditions`.

use corrgeo::events::{self, EventSystem};
use num_traits::Zero;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = EventSystem::chsh();
    let names = sys.coordinate_names();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();

    let verts = events::enumerate_vertices(&sys)?;
    println!("{} consistent assignments over ({})", verts.len(), names.join(", "));

    let h = events::boole_conditions(&sys)?;
    let facets = h.inequalities();
    println!("{} facets:", facets.len());
    for f in &facets {
        println!("  {}", f.to_inequality_string(&refs));
    }

    // p1 + p4 - p13 - p14 + p23 - p24 >= 0 is Clauser-Horne up to relabelling
    let ch = facets
        .iter()
        .filter(|f| f.a.iter().filter(|c| !c.is_zero()).count() == 6)
        .count();
    println!("{ch} of them are Clauser-Horne type (six nonzero coefficients)");
    Ok(())
}
