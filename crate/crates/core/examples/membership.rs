//! Membership certificates in both representations.
//!
//! Decides membership of a few points in the spin-1/2 correlation tetrahedron
//! twice: by evaluating its facets, and by an exact LP over its vertices that
//! returns convex weights or a separating halfspace.
//!
//! Run with `cargo run --example membership`.

use corrgeo::polytope::{self, Certificate, VPolytope};
use corrgeo::rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tet = VPolytope::from_ints(3, &[&[1, 1, 1], &[1, -1, -1], &[-1, 1, -1], &[-1, -1, 1]])?;
    let h = polytope::facets(&tet)?;
    let names = ["x", "y", "z"];
    for s in ["0,0,0", "1,1,1", "1/2,0,0", "-1/2,-1/2,-1/2", "1/3,1/3,-1/3"] {
        let x: Vec<_> = s.split(',').map(rational::parse).collect::<Result<_, _>>()?;
        let by_facets = polytope::contains(&h, &x)?;
        let certificate = match polytope::lp_membership(&tet, &x)? {
            Certificate::Inside { weights } => {
                let w: Vec<String> = weights.iter().map(rational::format).collect();
                format!("weights ({})", w.join(", "))
            }
            Certificate::Outside { separator } => format!("separated by {}", separator.to_inequality_string(&names)),
        };
        println!("({s}): {by_facets:?}; {certificate}");
    }
    Ok(())
}
