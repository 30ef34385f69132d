//! The elliptope of anti-correlation triples.
//!
//! Classifies a few landmark triples, realizes an interior point as three
//! unit vectors, and writes a boundary mesh as CSV (the data behind the
//! elliptope figure) to the path given as the first argument, or a summary
//! to stdout.
//!
//! Run with `cargo run --example elliptope_mesh -- mesh.csv`.

use corrgeo::elliptope::{self, CorrelationTriple};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let landmarks = [
        ("origin", [0.0, 0.0, 0.0]),
        ("tetrahedron vertex", [1.0, 1.0, 1.0]),
        ("Mermin point", [-0.5, -0.5, -0.5]),
        ("beyond the Mermin point", [-0.6, -0.6, -0.6]),
        ("edge midpoint", [0.0, 0.0, 1.0]),
    ];
    for (name, c) in landmarks {
        println!(
            "{name:>24} {c:?}: value {:+.6}, {:?}",
            elliptope::elliptope_value_raw(c),
            elliptope::classify(c, elliptope::DEFAULT_TOL)
        );
    }

    let t = CorrelationTriple::new(0.3, -0.2, 0.5)?;
    let g = elliptope::gram_vectors(&t)?;
    println!("unit vectors realizing {:?}:", t.as_array());
    for (name, v) in ["a", "b", "c"].iter().zip(g.vectors()) {
        println!("  {name} = [{:+.6}, {:+.6}, {:+.6}]", v[0], v[1], v[2]);
    }
    println!("  recovered cosines {:?}", g.cosines());

    let mesh = elliptope::boundary_mesh(64);
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, elliptope::mesh_to_csv(&mesh))?;
            println!("wrote {} boundary points to {path}", mesh.len());
        }
        None => {
            let worst = mesh
                .iter()
                .map(|t| elliptope::elliptope_value(t).abs())
                .fold(0.0, f64::max);
            println!("{} boundary points, max |value| = {worst:.2e}", mesh.len());
        }
    }
    Ok(())
}
