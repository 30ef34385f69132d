//! The ten acceptance criteria, one pass/fail line each.
//!
//! Runs without the libtest harness so every criterion reports even when an
//! earlier one fails; the process exits nonzero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use corrgeo::elliptope::{self, CorrelationTriple, Verdict};
use corrgeo::events::{self, EventSystem};
use corrgeo::polytope::{self, Certificate, Membership, VPolytope};
use corrgeo::quantum::{self, born, frame_of, BooleanFrame, Direction, Ket};
use corrgeo::raffles::{self, BalancedValueSet, Raffle, RaffleFeasibility, CHI_NAMES};
use corrgeo::rational::{self, Rational};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{canonical, ints, Row};

type Outcome = Result<String, String>;

// negated so that NaN fails the check
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "elliptope identity", budget: Some(Duration::from_secs(5)), check: elliptope_identity },
    Criterion { id: 2, name: "Bell facet recovery", budget: Some(Duration::from_secs(10)), check: bell_facets },
    Criterion { id: 3, name: "quantum closed form", budget: Some(Duration::from_secs(30)), check: closed_form },
    Criterion { id: 4, name: "elliptope saturation", budget: None, check: saturation },
    Criterion { id: 5, name: "Mermin point separation", budget: None, check: mermin_point },
    Criterion { id: 6, name: "LHV inside quantum", budget: None, check: lhv_inside_quantum },
    Criterion { id: 7, name: "no-signalling", budget: Some(Duration::from_secs(20)), check: no_signalling },
    Criterion { id: 8, name: "ensemble non-uniqueness", budget: None, check: ensembles },
    Criterion { id: 9, name: "Monte Carlo consistency", budget: None, check: monte_carlo },
    Criterion { id: 10, name: "LP/facet duality", budget: None, check: lp_facet_duality },
];

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {:<26} {elapsed:>9.2?}  {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {:<26} {elapsed:>9.2?}  {why}", c.id, c.name);
            }
        }
    }
    let _ = panic::take_hook();
    println!("{} of {} acceptance criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn elliptope_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_det, mut agree) = (0.0f64, 0);
    let n = 10_000;
    for _ in 0..n {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let t = CorrelationTriple::from_array(c).map_err(|e| e.to_string())?;
        let err = (elliptope::elliptope_value(&t) - common::det3(c)).abs();
        worst_det = worst_det.max(err);
        ensure!(err <= 1e-14, "value {c:?} differs from the determinant by {err:e}");
        let psd = common::min_eigenvalue(c) >= -1e-10;
        let inside = elliptope::is_in_elliptope(&t, elliptope::DEFAULT_TOL) != Verdict::Outside;
        ensure!(psd == inside, "{c:?}: PSD oracle says {psd}, classifier says {inside}");
        agree += usize::from(inside);
    }
    Ok(format!("{n} triples, max |value - det| = {worst_det:.1e}, {agree} inside"))
}

fn bell_facets() -> Outcome {
    let sys = EventSystem::chsh();
    let verts = events::enumerate_vertices(&sys).map_err(|e| e.to_string())?;
    ensure!(verts.len() == 16, "CHSH has {} vertices", verts.len());
    let h = events::boole_conditions(&sys).map_err(|e| e.to_string())?;
    let facets: Vec<Row> = h.inequalities().iter().map(canonical).collect();
    // (p1, p2, p3, p4, p13, p14, p23, p24)
    let clauser_horne = [
        Row::new(ints(&[1, 0, 0, 1, -1, -1, 1, -1]), rational::int(0)),
        Row::new(ints(&[-1, 0, 0, -1, 1, 1, -1, 1]), rational::int(1)),
    ];
    for ch in &clauser_horne {
        ensure!(facets.contains(ch), "missing Clauser-Horne facet {ch:?}");
    }
    let raw = h
        .inequalities()
        .iter()
        .find(|f| canonical(f) == clauser_horne[0])
        .map(|f| (f.a.clone(), f.a0.clone()))
        .expect("found above");
    ensure!(raw.0 == ints(&[1, 0, 0, 1, -1, -1, 1, -1]) && raw.1.is_zero(), "coefficients not coprime integers: {raw:?}");

    let vs = BalancedValueSet::new(1);
    let sigma2 = vs.sigma2();
    let mut points = Vec::new();
    for t in vs.tickets() {
        let p = raffles::ticket_point(&vs, &t).map_err(|e| e.to_string())?;
        points.push(p[..3].iter().map(|x| x / &sigma2).collect::<Vec<Rational>>());
    }
    ensure!(points.len() == 8, "{} spin-1/2 tickets", points.len());
    let tet = VPolytope::new(3, points).map_err(|e| e.to_string())?;
    let got: Vec<String> = polytope::facets(&tet)
        .map_err(|e| e.to_string())?
        .inequalities()
        .iter()
        .map(|f| f.to_inequality_string(&CHI_NAMES))
        .collect();
    let want = [
        "-chi_ab-chi_ac+chi_bc >= -1",
        "-chi_ab+chi_ac-chi_bc >= -1",
        "chi_ab-chi_ac-chi_bc >= -1",
        "chi_ab+chi_ac+chi_bc >= -1",
    ];
    ensure!(got == want, "tetrahedron facets {got:?}");
    Ok(format!("{} CHSH facets include both Clauser-Horne forms; 8 tickets give the 4 tetrahedron facets", facets.len()))
}

fn closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for spin2 in 1..=10u32 {
        let s = f64::from(spin2) / 2.0;
        for _ in 0..100 {
            let a = common::random_direction(&mut rng);
            let b = common::random_direction(&mut rng);
            let got = quantum::singlet_correlation(spin2, &a, &b).map_err(|e| e.to_string())?;
            let want = -s * (s + 1.0) / 3.0 * a.dot(&b);
            let err = (got - want).abs();
            worst = worst.max(err);
            ensure!(err <= 1e-9, "2s = {spin2}: {got} vs {want}");
        }
    }
    Ok(format!("2s = 1..10 x 100 pairs, max error {worst:.1e}"))
}

fn saturation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = Vec::new();
    while points.len() < 200 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if elliptope::classify(c, elliptope::DEFAULT_TOL) == Verdict::Inside {
            points.push(CorrelationTriple::from_array(c).map_err(|e| e.to_string())?);
        }
    }
    let mut worst = 0.0f64;
    for spin2 in [1, 4] {
        for t in &points {
            let dirs = quantum::saturate(t, spin2).map_err(|e| e.to_string())?;
            let chi = quantum::chi_triple(spin2, &dirs).map_err(|e| e.to_string())?;
            for (k, (x, y)) in chi.iter().zip(t.as_array()).enumerate() {
                let err = (x - y).abs();
                worst = worst.max(err);
                ensure!(err <= 1e-9, "2s = {spin2}, {:?}: {} off by {err:e}", t.as_array(), CHI_NAMES[k]);
            }
        }
    }
    Ok(format!("200 interior points for s = 1/2 and 2, max error {worst:.1e}"))
}

fn mermin_point() -> Outcome {
    let h = rational::ratio(-1, 2);
    let target = [h.clone(), h.clone(), h];
    let t = CorrelationTriple::new(-0.5, -0.5, -0.5).map_err(|e| e.to_string())?;
    let value = elliptope::elliptope_value(&t);
    ensure!(value.abs() <= 1e-12, "(a) value {value}");
    ensure!(elliptope::is_in_elliptope(&t, 1e-12) == Verdict::Boundary, "(a) not BOUNDARY");

    match raffles::feasible(&BalancedValueSet::new(1), &target).map_err(|e| e.to_string())? {
        RaffleFeasibility::Infeasible { facet } => {
            let text = facet.to_inequality_string(&CHI_NAMES);
            ensure!(text == "chi_ab+chi_ac+chi_bc >= -1", "(b) facet {text}");
            ensure!(facet.slack(&target).is_negative(), "(b) facet not violated");
        }
        RaffleFeasibility::Feasible(_) => return Err("(b) spin-1/2 raffle reaches the Mermin point".into()),
    }

    let witness = match raffles::feasible(&BalancedValueSet::new(2), &target).map_err(|e| e.to_string())? {
        RaffleFeasibility::Feasible(r) => r,
        RaffleFeasibility::Infeasible { facet } => {
            return Err(format!("(c) infeasible, facet {}", facet.to_inequality_string(&CHI_NAMES)))
        }
    };
    let chi = raffles::chi_exact(&witness).map_err(|e| e.to_string())?;
    ensure!(chi == target, "(c) witness gives {chi:?}");

    let third = std::f64::consts::TAU / 3.0;
    let dirs: [Direction; 3] = std::array::from_fn(|k| Direction::from_spherical(std::f64::consts::FRAC_PI_2, k as f64 * third));
    let mut worst = 0.0f64;
    for spin2 in 1..=10 {
        for x in quantum::chi_triple(spin2, &dirs).map_err(|e| e.to_string())? {
            worst = worst.max((x + 0.5).abs());
        }
    }
    ensure!(worst <= 1e-9, "(d) 120 degree chi off by {worst:e}");
    Ok(format!("boundary, spin-1/2 facet violated, spin-1 witness with {} tickets, 120 degrees within {worst:.1e}", witness.len()))
}

fn lhv_inside_quantum() -> Outcome {
    let mut summary = Vec::new();
    for spin2 in 1..=raffles::MAX_SPIN2 {
        let v = raffles::raffle_polytope(&BalancedValueSet::new(spin2)).map_err(|e| e.to_string())?;
        for x in v.vertices() {
            let value = elliptope::elliptope_value_exact(&[x[0].clone(), x[1].clone(), x[2].clone()]);
            ensure!(!value.is_negative(), "2s = {spin2}: vertex {x:?} has value {value}");
        }
        summary.push(v.vertices().len().to_string());
    }
    Ok(format!("all vertices for 2s = 1..6 inside (vertex counts {})", summary.join(", ")))
}

fn random_frame(rng: &mut ChaCha8Rng, d: usize) -> Result<BooleanFrame, String> {
    let h = common::random_hermitian(rng, d);
    if rng.random_bool(0.5) {
        return frame_of(&h, None).map_err(|e| e.to_string());
    }
    // coarse-grain at a random cut between eigenvalues
    let mut eig: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let k = rng.random_range(1..d);
    let cut = (eig[k - 1] + eig[k]) / 2.0;
    let ranges = [
        quantum::ValueRange::half_open(f64::MIN, cut),
        quantum::ValueRange::closed(cut, f64::MAX),
    ];
    frame_of(&h, Some(&ranges)).map_err(|e| e.to_string())
}

fn no_signalling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let da = rng.random_range(2..=4);
        let db = rng.random_range(2..=4);
        let rho = common::random_density(&mut rng, da * db);
        let fa: Vec<BooleanFrame> = (0..3).map(|_| random_frame(&mut rng, da)).collect::<Result<_, _>>()?;
        let fb: Vec<BooleanFrame> = (0..3).map(|_| random_frame(&mut rng, db)).collect::<Result<_, _>>()?;
        let dev = quantum::no_signalling_check(&rho, (da, db), &fa, &fb).map_err(|e| e.to_string())?;
        worst = worst.max(dev);
        ensure!(dev <= 1e-12, "{da}x{db}: deviation {dev:e}");
    }
    Ok(format!("100 random states up to 4x4, max deviation {worst:.1e}"))
}

fn ensembles() -> Outcome {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = quantum::ensemble_density(&[(0.5, Ket::basis(2, 0)), (0.5, Ket::basis(2, 1))]).map_err(|e| e.to_string())?;
    let plus = Ket::from_real(&[r, r]).map_err(|e| e.to_string())?;
    let minus = Ket::from_real(&[r, -r]).map_err(|e| e.to_string())?;
    let x = quantum::ensemble_density(&[(0.5, plus), (0.5, minus)]).map_err(|e| e.to_string())?;
    let diff = (z.matrix() - x.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    ensure!(diff <= 1e-14, "density operators differ by {diff:e}");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = frame_of(&common::random_hermitian(&mut rng, 2), None).map_err(|e| e.to_string())?;
        let p = born(&z, &f).map_err(|e| e.to_string())?;
        let q = born(&x, &f).map_err(|e| e.to_string())?;
        ensure!(p.len() == q.len(), "outcome counts differ");
        for (a, b) in p.iter().zip(&q) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure!(worst <= 1e-14, "Born probabilities differ by {worst:e}");
    Ok(format!("density operators within {diff:.1e}, Born rule on 20 frames within {worst:.1e}"))
}

fn monte_carlo() -> Outcome {
    let n = 1_000_000;
    let half = BalancedValueSet::new(1);
    let one = BalancedValueSet::new(2);
    let mermin = match raffles::feasible(&one, &[rational::ratio(-1, 2), rational::ratio(-1, 2), rational::ratio(-1, 2)])
        .map_err(|e| e.to_string())?
    {
        RaffleFeasibility::Feasible(r) => r,
        RaffleFeasibility::Infeasible { .. } => return Err("no Mermin witness".into()),
    };
    let raffles_under_test = [
        ("uniform 2s=1", Raffle::uniform(half, &half.tickets()).map_err(|e| e.to_string())?),
        ("Mermin 2s=2", mermin),
        ("uniform 2s=3", Raffle::uniform(BalancedValueSet::new(3), &BalancedValueSet::new(3).tickets()).map_err(|e| e.to_string())?),
    ];
    let mut worst = 0.0f64;
    // the default seed of the command-line tool; each pair sees about 2n/9
    // draws, so 5e-3 is roughly 2.4 standard errors
    let seed = corrgeo::cli::DEFAULT_SEED;
    for (name, r) in &raffles_under_test {
        let exact = raffles::chi_exact(r).map_err(|e| e.to_string())?.map(|x| rational::to_f64(&x));
        let base = raffles::simulate(r, n, seed, 1);
        for (x, y) in base.chi.iter().zip(exact) {
            let err = (x - y).abs();
            worst = worst.max(err);
            ensure!(err <= 5e-3, "{name}: simulated {:?}, exact {exact:?}", base.chi);
        }
        for shards in [2, 3, 8] {
            let other = raffles::simulate(r, n, seed, shards);
            let same = other.chi.map(f64::to_bits) == base.chi.map(f64::to_bits)
                && other.pair_counts == base.pair_counts
                && other.marginals == base.marginals;
            ensure!(same, "{name}: {shards} shards differ from 1 shard");
        }
    }
    Ok(format!("3 raffles at n = 1e6, seed {seed}, max error {worst:.1e}, bit-identical across 1/2/3/8 shards"))
}

fn lp_facet_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sys = EventSystem::chsh();
    let chsh_verts = events::enumerate_vertices(&sys).map_err(|e| e.to_string())?;
    let chsh = events::correlation_polytope(sys.dim(), &chsh_verts).map_err(|e| e.to_string())?;
    let test_polytopes: Vec<(&str, VPolytope)> = vec![
        ("tetrahedron", VPolytope::from_ints(3, &[&[1, 1, 1], &[1, -1, -1], &[-1, 1, -1], &[-1, -1, 1]]).unwrap()),
        (
            "cube",
            VPolytope::from_ints(
                3,
                &[&[0, 0, 0], &[0, 0, 1], &[0, 1, 0], &[0, 1, 1], &[1, 0, 0], &[1, 0, 1], &[1, 1, 0], &[1, 1, 1]],
            )
            .unwrap(),
        ),
        ("2-simplex in 3D", VPolytope::from_ints(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap()),
        ("spin-1 raffle polytope", raffles::raffle_polytope(&BalancedValueSet::new(2)).map_err(|e| e.to_string())?),
        ("CHSH correlation polytope", chsh),
    ];
    let mut inside_total = 0;
    for (name, v) in &test_polytopes {
        let h = polytope::facets(v).map_err(|e| e.to_string())?;
        let d = v.dim();
        for i in 0..1000 {
            let x = sample(&mut rng, v, i);
            let by_facets = polytope::contains(&h, &x).map_err(|e| e.to_string())?;
            let cert = polytope::lp_membership(v, &x).map_err(|e| e.to_string())?;
            match (&by_facets, &cert) {
                (Membership::Inside | Membership::Boundary, Certificate::Inside { weights }) => {
                    let mut y = vec![Rational::zero(); d];
                    for (w, p) in weights.iter().zip(v.vertices()) {
                        ensure!(!w.is_negative(), "{name}: negative weight");
                        for (yi, pi) in y.iter_mut().zip(p) {
                            *yi += w * pi;
                        }
                    }
                    ensure!(y == x, "{name}: weights do not reproduce {x:?}");
                    inside_total += 1;
                }
                (Membership::Outside { violated }, Certificate::Outside { separator }) => {
                    ensure!(!violated.is_empty(), "{name}: outside with no violated facet");
                    ensure!(separator.slack(&x).is_negative(), "{name}: separator not violated");
                    ensure!(
                        v.vertices().iter().all(|p| !separator.slack(p).is_negative()),
                        "{name}: separator cuts a vertex"
                    );
                }
                _ => return Err(format!("{name}: {x:?} facets say {by_facets:?}, LP says {cert:?}")),
            }
        }
    }
    Ok(format!("5 polytopes x 1000 points agree exactly ({inside_total} inside)"))
}

/// Alternates uniform points in `[-1, 1]^d` with random convex combinations
/// of vertices, half of those nudged off by a small rational.
fn sample(rng: &mut ChaCha8Rng, v: &VPolytope, i: usize) -> Vec<Rational> {
    let d = v.dim();
    if i.is_multiple_of(2) {
        return common::random_point(rng, d, -1, 1, 6);
    }
    let verts = v.vertices();
    let picks: Vec<usize> = (0..3).map(|_| rng.random_range(0..verts.len())).collect();
    let raw: Vec<i64> = picks.iter().map(|_| rng.random_range(0..=4)).collect();
    let total: i64 = raw.iter().sum::<i64>().max(1);
    let mut x = vec![Rational::zero(); d];
    for (&k, &w) in picks.iter().zip(&raw) {
        let w = rational::ratio(w, total);
        for (xi, pi) in x.iter_mut().zip(&verts[k]) {
            *xi += &w * pi;
        }
    }
    if raw.iter().all(|&w| w == 0) {
        x.clone_from(&verts[picks[0]]);
    }
    if i % 4 == 1 {
        let j = rng.random_range(0..d);
        x[j] += rational::ratio(rng.random_range(-1..=1), 12);
    }
    x
}
