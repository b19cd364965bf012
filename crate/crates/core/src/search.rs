//! Simulated annealing over hemisphere covers, looking for an antipodal
//! `n`-fold cover of `S^d` whose exact maximum multiplicity is below `d + n`.
//!
//! Poles live on the integer lattice `[-2^K, 2^K]^{d+1}`; a move nudges one
//! coordinate by `2^(K-k)`, with `k` growing over the run. Every state is
//! judged by the exact engine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::gale_points;
use crate::cover::{Claims, Cover, CoverSet, Provenance, Region};
use crate::error::{Error, Result};
use crate::exact::{multiplicity_extrema, multiplicity_extrema_with, ExactConfig};
use crate::geometry::{rat_to_f64, Direction};
use num_integer::Integer;
use num_traits::ToPrimitive;

const LATTICE_BITS: u32 = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    pub d: usize,
    pub n: usize,
    /// Number of poles.
    #[serde(rename = "N")]
    pub poles: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Finest step exponent reached at the end of a run.
    pub max_step_exponent: u32,
    pub initial_temperature: f64,
}

impl SearchConfig {
    pub fn new(d: usize, n: usize, poles: usize) -> Self {
        SearchConfig {
            d,
            n,
            poles,
            iterations: 200,
            restarts: 4,
            seed: 1,
            max_step_exponent: 6,
            initial_temperature: 1.0,
        }
    }

    pub fn validate(&self, cap: usize) -> Result<()> {
        if self.d < 1 || self.n < 1 {
            return Err(Error::InvalidParameter("need d >= 1 and n >= 1".into()));
        }
        if self.poles < self.d + 2 * self.n {
            return Err(Error::InvalidParameter(format!(
                "{} hemispheres cannot form an antipodal {}-fold cover of S^{}; need at least {}",
                self.poles,
                self.n,
                self.d,
                self.d + 2 * self.n
            )));
        }
        if self.poles > cap {
            return Err(Error::OverCap { sets: self.poles, cap });
        }
        if self.iterations < 1 || self.restarts < 1 {
            return Err(Error::InvalidParameter("need at least one iteration and one restart".into()));
        }
        if self.max_step_exponent > LATTICE_BITS {
            return Err(Error::InvalidParameter(format!("step exponent at most {LATTICE_BITS}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub restart: usize,
    pub iteration: usize,
    /// Exact extrema of the proposed state.
    pub min: usize,
    pub max: usize,
    pub feasible: bool,
    pub accepted: bool,
    /// Objective of the current state after this step.
    pub objective: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    SupportsConjecture,
    CounterexampleCandidate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub best_poles: Vec<Direction>,
    pub best_min: usize,
    pub best_max: usize,
    pub states_evaluated: usize,
    /// Smallest exact maximum over every feasible state visited.
    pub lowest_feasible_max: usize,
    pub verdict: Verdict,
    pub trace: Vec<TraceRow>,
    pub note: &'static str,
}

impl SearchResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("restart,iteration,min,max,feasible,accepted,objective\n");
        for r in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.restart, r.iteration, r.min, r.max, r.feasible, r.accepted, r.objective
            ));
        }
        out
    }

    pub fn cover(&self) -> Result<Cover> {
        state_cover(self.config.d, self.config.n, &self.best_poles)
    }
}

fn state_cover(d: usize, n: usize, poles: &[Direction]) -> Result<Cover> {
    let sets = poles.iter().cloned().map(CoverSet::hemisphere).collect();
    Cover::new(d, sets, Claims::fold(n as u32), Provenance::named("search"))
}

type State = Vec<Vec<i64>>;

fn to_directions(state: &State) -> Result<Vec<Direction>> {
    state.iter().map(|p| Direction::from_ints(p)).collect()
}

/// Gale poles scaled onto the lattice, plus random extra poles.
fn initial_state(config: &SearchConfig, rng: &mut ChaCha8Rng) -> Result<State> {
    let bound = 1i64 << LATTICE_BITS;
    let gale = gale_points(config.d, config.n)?;
    let mut state = Vec::with_capacity(config.poles);
    for p in &gale.points {
        // Integer coordinates (the default t-values are integers).
        let ints: Vec<i64> = p
            .coords()
            .iter()
            .map(|c| c.to_integer().to_i64().ok_or_else(|| Error::Internal("pole coordinate overflow".into())))
            .collect::<Result<_>>()?;
        let g = ints.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        let maxabs = ints.iter().map(|c| (c / g).abs()).max().unwrap_or(1);
        let scale = (bound / maxabs).max(1);
        state.push(ints.iter().map(|&c| c / g * scale).collect());
    }
    while state.len() < config.poles {
        let p: Vec<i64> = (0..=config.d).map(|_| rng.random_range(-bound..=bound)).collect();
        if p.iter().any(|&c| c != 0) {
            state.push(p);
        }
    }
    Ok(state)
}

fn propose(state: &State, rng: &mut ChaCha8Rng, exponent: u32) -> State {
    let bound = 1i64 << LATTICE_BITS;
    let step = 1i64 << (LATTICE_BITS - exponent);
    loop {
        let mut next = state.clone();
        let i = rng.random_range(0..next.len());
        let j = rng.random_range(0..next[i].len());
        let delta = if rng.random_bool(0.5) { step } else { -step };
        next[i][j] = (next[i][j] + delta).clamp(-bound, bound);
        if next[i].iter().any(|&c| c != 0) && next != *state {
            return next;
        }
    }
}

struct Eval {
    min: usize,
    max: usize,
}

fn evaluate(config: &SearchConfig, state: &State) -> Result<Eval> {
    let cover = state_cover(config.d, config.n, &to_directions(state)?)?;
    let r = multiplicity_extrema(&cover, Region::Sphere)?;
    let floor = config.d.div_ceil(2) + config.n;
    if r.min >= config.n && r.max < floor {
        return Err(Error::Internal(format!(
            "an antipodal {}-fold cover with maximum {} < {floor} contradicts the lower bound",
            config.n, r.max
        )));
    }
    Ok(Eval { min: r.min, max: r.max })
}

struct RunOutcome {
    best: State,
    best_eval: Eval,
    lowest_feasible_max: usize,
    trace: Vec<TraceRow>,
    states: usize,
}

fn run_restart(config: &SearchConfig, restart: usize) -> Result<RunOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut current = initial_state(config, &mut rng)?;
    let mut cur = evaluate(config, &current)?;
    if cur.min < config.n {
        return Err(Error::Internal("initial Gale state is not n-fold".into()));
    }
    let mut best = current.clone();
    let mut best_eval = Eval { min: cur.min, max: cur.max };
    let mut lowest = cur.max;
    let mut trace = Vec::with_capacity(config.iterations);
    let mut states = 1;
    for it in 0..config.iterations {
        let progress = it as f64 / config.iterations as f64;
        let exponent = 1 + ((config.max_step_exponent.max(1) - 1) as f64 * progress).floor() as u32;
        let temperature = config.initial_temperature * (1.0 - progress);
        let cand = propose(&current, &mut rng, exponent);
        let e = evaluate(config, &cand)?;
        states += 1;
        let feasible = e.min >= config.n;
        let accepted = feasible && {
            let delta = e.max as f64 - cur.max as f64;
            let u: f64 = rng.random();
            delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp())
        };
        if feasible {
            lowest = lowest.min(e.max);
        }
        trace.push(TraceRow {
            restart,
            iteration: it,
            min: e.min,
            max: e.max,
            feasible,
            accepted,
            objective: if accepted { e.max } else { cur.max },
        });
        if accepted {
            current = cand;
            cur = e;
            if cur.max < best_eval.max {
                best = current.clone();
                best_eval = Eval { min: cur.min, max: cur.max };
            }
        }
    }
    Ok(RunOutcome { best, best_eval, lowest_feasible_max: lowest, trace, states })
}

pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    let engine = ExactConfig::default();
    config.validate(engine.cap)?;
    let restarts: Vec<usize> = (0..config.restarts).collect();
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<RunOutcome>> = {
        use rayon::prelude::*;
        restarts.par_iter().map(|&r| run_restart(config, r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<RunOutcome>> = restarts.iter().map(|&r| run_restart(config, r)).collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let winner = outcomes
        .iter()
        .enumerate()
        .min_by_key(|(i, o)| (o.best_eval.max, *i))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let lowest = outcomes.iter().map(|o| o.lowest_feasible_max).min().expect("nonempty");
    let best = &outcomes[winner];
    let best_poles = to_directions(&best.best)?;
    let target = config.d + config.n;
    let verdict = if lowest < target {
        // Re-check the best state with the unpruned engine where affordable.
        let cover = state_cover(config.d, config.n, &best_poles)?;
        let independent = ExactConfig { prune: config.poles > 9, seed: config.seed ^ 0x9e37, vertex_seeding: false, ..engine };
        let r = multiplicity_extrema_with(&cover, Region::Sphere, &independent)?;
        if r.min < config.n || r.max != best.best_eval.max {
            return Err(Error::Internal("counterexample candidate failed independent re-verification".into()));
        }
        Verdict::CounterexampleCandidate
    } else {
        Verdict::SupportsConjecture
    };
    Ok(SearchResult {
        config: config.clone(),
        best_poles,
        best_min: best.best_eval.min,
        best_max: best.best_eval.max,
        states_evaluated: outcomes.iter().map(|o| o.states).sum(),
        lowest_feasible_max: lowest,
        verdict,
        trace: outcomes.into_iter().flat_map(|o| o.trace).collect(),
        note: "hemisphere covers only; absence of a counterexample here says nothing about general open covers",
    })
}

/// Pole angles in degrees, for `d = 1` reports.
pub fn circle_angles(poles: &[Direction]) -> Vec<f64> {
    poles
        .iter()
        .map(|p| rat_to_f64(&p.coords()[1]).atan2(rat_to_f64(&p.coords()[0])).to_degrees().rem_euclid(360.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_poles_rejected() {
        let c = SearchConfig::new(2, 2, 5);
        assert!(search(&c).is_err());
    }

    #[test]
    fn circle_probe() {
        let mut c = SearchConfig::new(1, 1, 3);
        c.iterations = 40;
        c.restarts = 2;
        let r = search(&c).unwrap();
        assert_eq!(r.lowest_feasible_max, 2);
        assert_eq!(r.verdict, Verdict::SupportsConjecture);
        assert_eq!(r.trace.len(), 80);
        assert!(r.trace_csv().lines().count() == 81);
    }

    #[test]
    fn deterministic() {
        let mut c = SearchConfig::new(2, 1, 5);
        c.iterations = 15;
        c.restarts = 2;
        assert_eq!(search(&c).unwrap(), search(&c).unwrap());
    }

    #[test]
    fn initial_state_is_scaled_gale() {
        let c = SearchConfig::new(2, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = initial_state(&c, &mut rng).unwrap();
        let gale = gale_points(2, 1).unwrap();
        for (p, q) in to_directions(&s).unwrap().iter().zip(&gale.points) {
            assert!(p.sphere_eq(q));
        }
    }
}
