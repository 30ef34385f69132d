//! Local hidden-variable models as raffles.
//!
//! Two parties each receive one of a pair of correlated systems and measure
//! it in one of three settings `a`, `b`, `c`. A raffle ticket fixes party 1's
//! outcome `x_t` for every setting `t`; party 2 then obtains `-x_t`, so
//! matching settings are perfectly anti-correlated. A raffle is a probability
//! distribution over tickets.
//!
//! Outcomes are spin-s values `m ∈ {-s, …, s}`. Each setting's marginal is
//! required to be uniform over those values, which fixes the variance at
//! `σ² = s(s+1)/3` and makes the anti-correlation coefficients
//! `χ_st = E[x_s x_t] / σ²` linear in the ticket probabilities.
//!
//! [`raffle_polytope`] is the exact set of `(χ_ab, χ_ac, χ_bc)` reachable by
//! raffles with uniform marginals. [`variance_polytope`] lifts each ticket to
//! `(x_a x_b, x_a x_c, x_b x_c, x_a², x_b², x_c²)`, slices on `x_t² = σ²` and
//! projects; it only constrains second moments, so it agrees with the raffle
//! polytope for `2s <= 3` and strictly contains it from `2s = 4` on.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptope::{CorrelationTriple, ElliptopeError};
use crate::lp::{self, Feasibility};
use crate::polytope::{self, Halfspace, HPolytope, PolytopeError, VPolytope};
use crate::rational::{self, Rational};

/// Largest `2s` for which exact polytopes and LPs are built (7 values).
pub const MAX_SPIN2: u32 = 6;

pub const SETTINGS: [char; 3] = ['a', 'b', 'c'];
pub const CHI_NAMES: [&str; 3] = ["chi_ab", "chi_ac", "chi_bc"];
/// Setting pairs in coordinate order ab, ac, bc.
const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Draws per independent random stream in [`simulate`].
pub const SIM_BLOCK: u64 = 1 << 16;
pub const SIM_ALGORITHM: &str = "chacha8-seed_from_u64/stream-per-block/block=65536";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RaffleError {
    #[error("2s = {spin2} is outside the supported range 1..={max}")]
    SpinBoundExceeded { spin2: u32, max: u32 },
    #[error("value {value} is not in the spin-{spin} value set")]
    ValueNotInSet { value: String, spin: String },
    #[error("probability {0} is negative")]
    NegativeProbability(String),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("marginal of setting {setting} is not uniform: {marginal:?}")]
    MarginalNotUniform {
        setting: char,
        marginal: Vec<(String, String)>,
    },
    #[error("raffle is for 2s = {found}, expected {expected}")]
    SpinMismatch { expected: u32, found: u32 },
    #[error("invalid raffle JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Elliptope(#[from] ElliptopeError),
}

/// Outcome values `{-s, -s+1, …, s}` of a spin-s observable (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BalancedValueSet {
    spin2: u32,
}

impl BalancedValueSet {
    /// `spin2` is `2s`; spin-1/2 is `new(1)`.
    pub fn new(spin2: u32) -> Self {
        BalancedValueSet { spin2 }
    }

    pub fn spin2(&self) -> u32 {
        self.spin2
    }

    pub fn spin(&self) -> Rational {
        rational::ratio(self.spin2 as i64, 2)
    }

    pub fn len(&self) -> usize {
        self.spin2 as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values doubled (`2m`), ascending.
    pub fn twice_values(&self) -> Vec<i64> {
        let s2 = self.spin2 as i64;
        (0..=s2).map(|k| -s2 + 2 * k).collect()
    }

    pub fn values(&self) -> Vec<Rational> {
        self.twice_values()
            .into_iter()
            .map(|v| rational::ratio(v, 2))
            .collect()
    }

    pub fn contains_twice(&self, v2: i64) -> bool {
        v2.abs() <= self.spin2 as i64 && (v2 - self.spin2 as i64) % 2 == 0
    }

    /// `s(s+1)/3`, the variance of the uniform distribution on the values.
    pub fn sigma2(&self) -> Rational {
        let s2 = self.spin2 as i64;
        rational::ratio(s2 * (s2 + 2), 12)
    }

    fn check_bound(&self) -> Result<(), RaffleError> {
        if self.spin2 == 0 || self.spin2 > MAX_SPIN2 {
            return Err(RaffleError::SpinBoundExceeded {
                spin2: self.spin2,
                max: MAX_SPIN2,
            });
        }
        Ok(())
    }

    /// All `(2s+1)³` tickets in lexicographic order.
    pub fn tickets(&self) -> Vec<Ticket> {
        let vals = self.twice_values();
        let mut out = Vec::with_capacity(vals.len().pow(3));
        for &a in &vals {
            for &b in &vals {
                for &c in &vals {
                    out.push(Ticket { twice: [a, b, c] });
                }
            }
        }
        out
    }
}

/// Party 1's outcome for each of the three settings (party 2 gets the negation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ticket {
    twice: [i64; 3],
}

impl Ticket {
    pub fn new(vs: &BalancedValueSet, values: &[Rational; 3]) -> Result<Self, RaffleError> {
        let mut twice = [0i64; 3];
        for (slot, v) in twice.iter_mut().zip(values) {
            let doubled = v * rational::int(2);
            let ok = doubled.is_integer()
                && doubled
                    .to_integer()
                    .to_i64()
                    .is_some_and(|d| vs.contains_twice(d));
            if !ok {
                return Err(RaffleError::ValueNotInSet {
                    value: v.to_string(),
                    spin: vs.spin().to_string(),
                });
            }
            *slot = doubled.to_integer().to_i64().expect("checked above");
        }
        Ok(Ticket { twice })
    }

    /// Builds a ticket from doubled values (`2m`).
    pub fn from_twice(vs: &BalancedValueSet, twice: [i64; 3]) -> Result<Self, RaffleError> {
        for v in twice {
            if !vs.contains_twice(v) {
                return Err(RaffleError::ValueNotInSet {
                    value: rational::ratio(v, 2).to_string(),
                    spin: vs.spin().to_string(),
                });
            }
        }
        Ok(Ticket { twice })
    }

    pub fn twice(&self) -> [i64; 3] {
        self.twice
    }

    pub fn values(&self) -> [Rational; 3] {
        self.twice.map(|v| rational::ratio(v, 2))
    }

    pub fn party2(&self) -> [Rational; 3] {
        self.twice.map(|v| rational::ratio(-v, 2))
    }
}

/// `(x_a x_b, x_a x_c, x_b x_c, x_a², x_b², x_c²)`
pub fn ticket_point(vs: &BalancedValueSet, t: &Ticket) -> Result<Vec<Rational>, RaffleError> {
    let t = Ticket::from_twice(vs, t.twice)?;
    let x = t.twice;
    let q = |v: i64| rational::ratio(v, 4);
    Ok(vec![
        q(x[0] * x[1]),
        q(x[0] * x[2]),
        q(x[1] * x[2]),
        q(x[0] * x[0]),
        q(x[1] * x[1]),
        q(x[2] * x[2]),
    ])
}

/// Probability distribution over tickets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raffle {
    values: BalancedValueSet,
    tickets: BTreeMap<Ticket, Rational>,
}

impl Raffle {
    /// Tickets with zero probability are dropped; repeated tickets are merged.
    pub fn new(vs: BalancedValueSet, entries: Vec<(Ticket, Rational)>) -> Result<Self, RaffleError> {
        let mut tickets: BTreeMap<Ticket, Rational> = BTreeMap::new();
        let mut total = Rational::zero();
        for (t, p) in entries {
            let t = Ticket::from_twice(&vs, t.twice)?;
            if p.is_negative() {
                return Err(RaffleError::NegativeProbability(p.to_string()));
            }
            total += &p;
            if !p.is_zero() {
                *tickets.entry(t).or_insert_with(Rational::zero) += p;
            }
        }
        if !total.is_one() {
            return Err(RaffleError::NotNormalized(total.to_string()));
        }
        Ok(Raffle { values: vs, tickets })
    }

    /// Equal weight on each listed ticket.
    pub fn uniform(vs: BalancedValueSet, tickets: &[Ticket]) -> Result<Self, RaffleError> {
        let p = rational::ratio(1, tickets.len().max(1) as i64);
        Raffle::new(vs, tickets.iter().map(|t| (*t, p.clone())).collect())
    }

    pub fn value_set(&self) -> BalancedValueSet {
        self.values
    }

    pub fn tickets(&self) -> impl Iterator<Item = (&Ticket, &Rational)> {
        self.tickets.iter()
    }

    pub fn len(&self) -> usize {
        self.tickets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tickets.is_empty()
    }

    /// Marginal distribution of party 1's value for setting `t`, ascending in value.
    pub fn marginal(&self, setting: usize) -> Vec<(Rational, Rational)> {
        let mut acc: BTreeMap<i64, Rational> = self
            .values
            .twice_values()
            .into_iter()
            .map(|v| (v, Rational::zero()))
            .collect();
        for (t, p) in &self.tickets {
            *acc.get_mut(&t.twice[setting]).expect("ticket validated") += p;
        }
        acc.into_iter()
            .map(|(v, p)| (rational::ratio(v, 2), p))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RaffleJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, RaffleError> {
        let raw: RaffleJson = serde_json::from_str(s).map_err(|e| RaffleError::Json(e.to_string()))?;
        let vs = BalancedValueSet::new(raw.spin2);
        let mut entries = Vec::with_capacity(raw.tickets.len());
        for t in raw.tickets {
            if t.x.len() != 3 {
                return Err(RaffleError::Json(format!("ticket needs 3 values, got {}", t.x.len())));
            }
            let x = [t.x[0].clone(), t.x[1].clone(), t.x[2].clone()];
            entries.push((Ticket::new(&vs, &x)?, t.p));
        }
        Raffle::new(vs, entries)
    }
}

#[derive(Serialize, Deserialize)]
struct TicketJson {
    #[serde(with = "rational::serde_str::vec")]
    x: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    p: Rational,
}

#[derive(Serialize, Deserialize)]
struct RaffleJson {
    spin2: u32,
    tickets: Vec<TicketJson>,
}

impl From<&Raffle> for RaffleJson {
    fn from(r: &Raffle) -> Self {
        RaffleJson {
            spin2: r.values.spin2,
            tickets: r
                .tickets
                .iter()
                .map(|(t, p)| TicketJson {
                    x: t.values().to_vec(),
                    p: p.clone(),
                })
                .collect(),
        }
    }
}

fn polytope_cache() -> &'static Mutex<HashMap<u32, VPolytope>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, VPolytope>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Exact vertex set of the `(χ_ab, χ_ac, χ_bc)` region reachable by raffles
/// with uniform marginals.
pub fn raffle_polytope(vs: &BalancedValueSet) -> Result<VPolytope, RaffleError> {
    vs.check_bound()?;
    if let Some(p) = polytope_cache().lock().expect("cache lock").get(&vs.spin2) {
        return Ok(p.clone());
    }
    let p = build_raffle_polytope(vs)?;
    polytope_cache()
        .lock()
        .expect("cache lock")
        .insert(vs.spin2, p.clone());
    Ok(p)
}

/// The 6-dimensional polytope of lifted tickets.
pub fn lifted_polytope(vs: &BalancedValueSet) -> Result<VPolytope, RaffleError> {
    vs.check_bound()?;
    let pts = vs
        .tickets()
        .iter()
        .map(|t| ticket_point(vs, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VPolytope::new(6, pts)?)
}

/// The equalities `x_t² - σ² = 0` in lifted coordinates.
pub fn variance_slice(vs: &BalancedValueSet) -> Vec<Halfspace> {
    (0..3)
        .map(|t| {
            let mut a = vec![Rational::zero(); 6];
            a[3 + t] = Rational::one();
            Halfspace::new(a, -vs.sigma2())
        })
        .collect()
}

/// Lifted tickets sliced on `x_t² = σ²`, projected to the products and
/// divided by `σ²`. Contains [`raffle_polytope`].
pub fn variance_polytope(vs: &BalancedValueSet) -> Result<VPolytope, RaffleError> {
    let lifted = lifted_polytope(vs)?;
    let sliced = polytope::slice(&lifted, &variance_slice(vs))?;
    let projected = polytope::project(&sliced, &[0, 1, 2])?;
    let inv = Rational::one() / vs.sigma2();
    let scaled = projected
        .vertices()
        .iter()
        .map(|v| v.iter().map(|x| x * &inv).collect())
        .collect();
    Ok(VPolytope::new(3, scaled)?)
}

/// Linear image of the raffle polytope over ticket orbits under the global
/// sign flip. Symmetrizing a raffle keeps its correlations and makes every
/// marginal symmetric, so uniformity reduces to one frequency per `|x_t|`.
fn build_raffle_polytope(vs: &BalancedValueSet) -> Result<VPolytope, RaffleError> {
    let orbits: Vec<Ticket> = vs
        .tickets()
        .into_iter()
        .filter(|t| t.twice.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0))
        .collect();
    let mut levels: Vec<i64> = vs.twice_values().iter().map(|v| v.abs()).collect();
    levels.sort_unstable();
    levels.dedup();
    let n_vals = vs.len() as i64;

    let mut rows = vec![vec![Rational::one(); orbits.len()]];
    let mut rhs = vec![Rational::one()];
    for setting in 0..3 {
        // the lowest level's row is implied by normalization
        for &k in &levels[1..] {
            rows.push(
                orbits
                    .iter()
                    .map(|t| if t.twice[setting].abs() == k { Rational::one() } else { Rational::zero() })
                    .collect(),
            );
            rhs.push(rational::ratio(2, n_vals));
        }
    }
    let scale = Rational::one() / (vs.sigma2() * rational::int(4));
    let map: Vec<Vec<Rational>> = PAIRS
        .iter()
        .map(|&(s, u)| {
            orbits
                .iter()
                .map(|t| rational::int(t.twice[s] * t.twice[u]) * &scale)
                .collect()
        })
        .collect();
    Ok(polytope::linear_image(&rows, &rhs, &map, &chi_symmetries())?)
}

/// Setting permutations and per-setting sign flips, acting on
/// `(χ_ab, χ_ac, χ_bc)`. Both preserve uniform marginals.
fn chi_symmetries() -> Vec<Vec<Vec<Rational>>> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for flips in 0..4u8 {
            // flipping setting a (bit 0) or b (bit 1); c's flip is their product
            let sign = |t: usize| if t < 2 && flips >> t & 1 == 1 { -1 } else { 1 };
            let g = PAIRS
                .iter()
                .map(|&(s, u)| {
                    let (ps, pu) = (perm[s], perm[u]);
                    let src = PAIRS
                        .iter()
                        .position(|&pair| pair == (ps.min(pu), ps.max(pu)))
                        .expect("permuted pair is a pair");
                    (0..3)
                        .map(|j| if j == src { rational::int(sign(s) * sign(u)) } else { Rational::zero() })
                        .collect()
                })
                .collect();
            out.push(g);
        }
    }
    out
}

/// Facets of [`raffle_polytope`].
pub fn raffle_facets(vs: &BalancedValueSet) -> Result<HPolytope, RaffleError> {
    Ok(polytope::facets(&raffle_polytope(vs)?)?)
}

/// Exact `(χ_ab, χ_ac, χ_bc)` of a raffle with uniform marginals.
pub fn chi_exact(r: &Raffle) -> Result<[Rational; 3], RaffleError> {
    let vs = r.values;
    if vs.spin2 == 0 {
        // zero variance
        return Err(RaffleError::SpinBoundExceeded { spin2: 0, max: MAX_SPIN2 });
    }
    let uniform = rational::ratio(1, vs.len() as i64);
    for (setting, &name) in SETTINGS.iter().enumerate() {
        let m = r.marginal(setting);
        if m.iter().any(|(_, p)| *p != uniform) {
            return Err(RaffleError::MarginalNotUniform {
                setting: name,
                marginal: m.iter().map(|(v, p)| (v.to_string(), p.to_string())).collect(),
            });
        }
    }
    let sigma2 = vs.sigma2();
    let mut chi: [Rational; 3] = std::array::from_fn(|_| Rational::zero());
    for (t, p) in &r.tickets {
        for (k, &(s, u)) in PAIRS.iter().enumerate() {
            chi[k] += p * rational::ratio(t.twice[s] * t.twice[u], 4);
        }
    }
    Ok(chi.map(|c| c / &sigma2))
}

pub fn chi_of_raffle(vs: &BalancedValueSet, r: &Raffle) -> Result<CorrelationTriple, RaffleError> {
    if r.values != *vs {
        return Err(RaffleError::SpinMismatch {
            expected: vs.spin2,
            found: r.values.spin2,
        });
    }
    let c = chi_exact(r)?;
    Ok(CorrelationTriple::new(
        rational::to_f64(&c[0]),
        rational::to_f64(&c[1]),
        rational::to_f64(&c[2]),
    )?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RaffleFeasibility {
    /// A raffle with uniform marginals reproducing the target exactly.
    Feasible(Raffle),
    /// A facet of the raffle polytope violated by the target.
    Infeasible { facet: Halfspace },
}

/// Exact LP over ticket probabilities with uniform marginals and the target
/// correlations; certifies the answer either way.
pub fn feasible(vs: &BalancedValueSet, target: &[Rational; 3]) -> Result<RaffleFeasibility, RaffleError> {
    vs.check_bound()?;
    let tickets = vs.tickets();
    let vals = vs.twice_values();
    let n = tickets.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();

    rows.push(vec![Rational::one(); n]);
    rhs.push(Rational::one());
    let uniform = rational::ratio(1, vals.len() as i64);
    for setting in 0..3 {
        // the last value's row is implied by normalization
        for &v in &vals[..vals.len() - 1] {
            rows.push(
                tickets
                    .iter()
                    .map(|t| if t.twice[setting] == v { Rational::one() } else { Rational::zero() })
                    .collect(),
            );
            rhs.push(uniform.clone());
        }
    }
    let sigma2 = vs.sigma2();
    for (k, &(s, u)) in PAIRS.iter().enumerate() {
        rows.push(
            tickets
                .iter()
                .map(|t| rational::ratio(t.twice[s] * t.twice[u], 4))
                .collect(),
        );
        rhs.push(&target[k] * &sigma2);
    }
    match lp::feasibility(&rows, &rhs) {
        Feasibility::Feasible(x) => {
            let entries = tickets
                .into_iter()
                .zip(x)
                .filter(|(_, p)| !p.is_zero())
                .collect();
            Ok(RaffleFeasibility::Feasible(Raffle::new(*vs, entries)?))
        }
        Feasibility::Infeasible(_) => {
            let h = raffle_facets(vs)?;
            let facet = h
                .halfspaces()
                .iter()
                .map(|f| (f.slack(target), f))
                .filter(|(s, _)| s.is_negative())
                .min_by(|x, y| x.0.cmp(&y.0))
                .map(|(_, f)| f.clone())
                .expect("the raffle polytope is exact, so an infeasible target violates a facet");
            Ok(RaffleFeasibility::Infeasible { facet })
        }
    }
}

/// Observed histogram of one party's outcomes for one setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub party: u8,
    pub setting: char,
    pub values: Vec<String>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub algorithm: String,
    pub seed: u64,
    pub n_draws: u64,
    pub shards: usize,
    pub spin2: u32,
    /// Empirical `(χ_ab, χ_ac, χ_bc)`; `NaN` (JSON `null`) when a pair was never drawn.
    pub chi: [f64; 3],
    /// Number of draws contributing to each coefficient.
    pub pair_counts: [u64; 3],
    pub marginals: Vec<Histogram>,
}

#[derive(Default, Clone)]
struct Tally {
    /// Σ (2 o1)(2 o2) per unordered cross-setting pair.
    cross: [i128; 3],
    pair_counts: [u64; 3],
    /// Σ (2 o)² over both parties' outcomes.
    squares: i128,
    /// counts[party][setting][value index]
    counts: Vec<Vec<Vec<u64>>>,
}

impl Tally {
    fn new(n_values: usize) -> Self {
        Tally {
            counts: vec![vec![vec![0; n_values]; 3]; 2],
            ..Default::default()
        }
    }

    fn merge(&mut self, o: &Tally) {
        for k in 0..3 {
            self.cross[k] += o.cross[k];
            self.pair_counts[k] += o.pair_counts[k];
        }
        self.squares += o.squares;
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                for (u, v) in x.iter_mut().zip(y) {
                    *u += v;
                }
            }
        }
    }
}

enum TicketSampler {
    /// Exact sampling: uniform integer below `total`, cumulative numerators.
    Exact { cumulative: Vec<u64>, total: u64 },
    Float(WeightedIndex<f64>),
}

impl TicketSampler {
    fn new(probs: &[Rational]) -> Self {
        let lcm = probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        if let Some(total) = lcm.to_u64().filter(|&t| t < (1 << 62)) {
            let mut cumulative = Vec::with_capacity(probs.len());
            let mut acc = 0u64;
            for p in probs {
                acc += (p * Rational::from_integer(lcm.clone()))
                    .to_integer()
                    .to_u64()
                    .expect("bounded by lcm");
                cumulative.push(acc);
            }
            TicketSampler::Exact { cumulative, total }
        } else {
            let w: Vec<f64> = probs.iter().map(rational::to_f64).collect();
            TicketSampler::Float(WeightedIndex::new(w).expect("valid weights"))
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        match self {
            TicketSampler::Exact { cumulative, total } => {
                let u = rng.random_range(0..*total);
                cumulative.partition_point(|&c| c <= u)
            }
            TicketSampler::Float(w) => w.sample(rng),
        }
    }
}

fn run_block(
    seed: u64,
    block: u64,
    draws: u64,
    tickets: &[[i64; 3]],
    sampler: &TicketSampler,
    value_index: &dyn Fn(i64) -> usize,
    tally: &mut Tally,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    for _ in 0..draws {
        let t = &tickets[sampler.sample(&mut rng)];
        let i = rng.random_range(0..3usize);
        let j = rng.random_range(0..3usize);
        let o1 = t[i];
        let o2 = -t[j];
        tally.squares += (o1 * o1 + o2 * o2) as i128;
        tally.counts[0][i][value_index(o1)] += 1;
        tally.counts[1][j][value_index(o2)] += 1;
        if i != j {
            let k = match (i.min(j), i.max(j)) {
                (0, 1) => 0,
                (0, 2) => 1,
                _ => 2,
            };
            tally.cross[k] += (o1 * o2) as i128;
            tally.pair_counts[k] += 1;
        }
    }
}

/// Monte Carlo run of a raffle: each draw picks a ticket and independent
/// uniform settings for both parties.
///
/// Draws are split into blocks of [`SIM_BLOCK`]; block `k` uses its own
/// ChaCha8 stream `k` under `seed`. Totals are exact integer sums, so the
/// report is bit-identical for any `shards >= 1`.
pub fn simulate(r: &Raffle, n_draws: u64, seed: u64, shards: usize) -> SimulationReport {
    let vs = r.values;
    let (tickets, probs): (Vec<[i64; 3]>, Vec<Rational>) =
        r.tickets.iter().map(|(t, p)| (t.twice, p.clone())).unzip();
    let sampler = TicketSampler::new(&probs);
    let spin2 = vs.spin2 as i64;
    let value_index = move |v2: i64| ((v2 + spin2) / 2) as usize;
    let n_values = vs.len();
    let blocks = n_draws.div_ceil(SIM_BLOCK);
    let shards = shards.max(1);

    let block_len = |b: u64| SIM_BLOCK.min(n_draws - b * SIM_BLOCK);
    let partials: Vec<Tally> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                let tickets = &tickets;
                let sampler = &sampler;
                let value_index = &value_index;
                scope.spawn(move || {
                    let mut tally = Tally::new(n_values);
                    let mut b = shard as u64;
                    while b < blocks {
                        run_block(seed, b, block_len(b), tickets, sampler, value_index, &mut tally);
                        b += shards as u64;
                    }
                    tally
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard panicked")).collect()
    });
    let mut total = Tally::new(n_values);
    for p in &partials {
        total.merge(p);
    }

    let mean_square = total.squares as f64 / (2 * n_draws) as f64;
    let chi = std::array::from_fn(|k| {
        if total.pair_counts[k] == 0 || mean_square == 0.0 {
            f64::NAN
        } else {
            -(total.cross[k] as f64 / total.pair_counts[k] as f64) / mean_square
        }
    });
    let labels: Vec<String> = vs.values().iter().map(|v| v.to_string()).collect();
    let mut marginals = Vec::with_capacity(6);
    for party in 0..2 {
        for (setting, &name) in SETTINGS.iter().enumerate() {
            marginals.push(Histogram {
                party: party as u8 + 1,
                setting: name,
                values: labels.clone(),
                counts: total.counts[party][setting].clone(),
            });
        }
    }
    SimulationReport {
        algorithm: SIM_ALGORITHM.to_string(),
        seed,
        n_draws,
        shards,
        spin2: vs.spin2,
        chi,
        pair_counts: total.pair_counts,
        marginals,
    }
}
