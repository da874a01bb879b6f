//! Synthetic fed-batch culture generator.
//!
//! Each culture follows a daily discrete model: logistic viable-cell growth
//! slowed by a temperature shift and followed by a death phase, product
//! accumulation proportional to integral viable cell density, glutamine
//! consumption with periodic feeds, and a set of auxiliary measurements
//! (metabolites, ions, gases, cell size) derived from that state. Culture
//! parameters vary randomly between runs. Observation noise is multiplicative
//! with relative standard deviation `noise`, except for the clock (`ECT`) and
//! the temperature, which receives additive noise in °C.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CultureSeries, DayRecord};
use crate::error::{HmrError, Result};

/// The 23 generated process parameters, in column order.
pub const PARAMETER_NAMES: [&str; 23] = [
    "ECT",
    "EGN",
    "VCD",
    "TCD",
    "Viability",
    "mAb",
    "Glucose",
    "Lactate",
    "Glutamine",
    "Glutamate",
    "Ammonium",
    "K+",
    "Na+",
    "Osmolality",
    "Temperature",
    "pH",
    "pCO2",
    "pO2",
    "HCO3-",
    "ACV",
    "CellDiameter",
    "Volume",
    "FeedVolume",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_cultures: usize,
    pub n_days: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_cultures: 106,
            n_days: 15,
            noise: 0.02,
            seed: 7,
        }
    }
}

/// Randomly drawn constants of one run.
struct RunParams {
    mu_max: f64,
    capacity: f64,
    vcd0: f64,
    death_onset: f64,
    death_rate: f64,
    productivity: f64,
    shift_day: u32,
    glutamine0: f64,
    glutamine_uptake: f64,
    glucose0: f64,
    glucose_uptake: f64,
    feed_size: f64,
}

impl RunParams {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        RunParams {
            mu_max: rng.random_range(0.55..0.9),
            capacity: rng.random_range(12.0..26.0),
            vcd0: rng.random_range(0.3..0.7),
            death_onset: rng.random_range(7.0..12.0),
            death_rate: rng.random_range(0.08..0.3),
            productivity: rng.random_range(1.2..3.2),
            shift_day: rng.random_range(5..=8),
            glutamine0: rng.random_range(4.0..8.0),
            glutamine_uptake: rng.random_range(0.04..0.09),
            glucose0: rng.random_range(30.0..45.0),
            glucose_uptake: rng.random_range(0.15..0.3),
            feed_size: rng.random_range(0.8..1.6),
        }
    }
}

/// Generates `n_cultures` runs of `n_days` days each, deterministically per
/// seed. Culture ids are `c001`, `c002`, ...
pub fn synthesize(config: &SynthConfig) -> Result<Vec<CultureSeries>> {
    validate_config(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = config.n_cultures.to_string().len().max(3);
    let parameters: Vec<String> = PARAMETER_NAMES.iter().map(|s| s.to_string()).collect();

    let mut out = Vec::with_capacity(config.n_cultures);
    for c in 0..config.n_cultures {
        let run = RunParams::draw(&mut rng);
        let states = simulate(&run, config.n_days);
        let records = states
            .iter()
            .enumerate()
            .map(|(d, truth)| DayRecord {
                day: d as u32 + 1,
                values: observe(truth, config.noise, &mut rng),
            })
            .collect();
        out.push(CultureSeries {
            culture_id: format!("c{:0width$}", c + 1),
            parameters: parameters.clone(),
            records,
        });
    }
    Ok(out)
}

fn simulate(run: &RunParams, n_days: usize) -> Vec<[f64; 23]> {
    let mut vcd = run.vcd0;
    let mut dead = 0.05 * run.vcd0;
    let mut mab = 0.0;
    let mut glutamine = run.glutamine0;
    let mut glutamine_used = 0.0;
    let mut glucose = run.glucose0;
    let mut lactate = 1.0;
    let mut lactate_made = 0.0;
    let mut feeds = 0u32;
    let mut feed_volume = 0.0;
    let mut generations = 0.0;

    let mut days = Vec::with_capacity(n_days);
    for d in 1..=n_days as u32 {
        let shifted = d >= run.shift_day;
        let temperature = if shifted { 33.5 } else { 36.8 };
        let tcd = vcd + dead;
        let p_co2 = 28.0 + 1.6 * vcd + 0.8 * lactate;
        let hco3 = 30.0 - 0.12 * p_co2 + 0.05 * f64::from(feeds);
        let na = 118.0 + 0.9 * lactate_made;
        let k = 6.5 - 0.08 * f64::from(d) + 0.05 * vcd;
        let osmolality = 290.0 + 3.0 * f64::from(d) + 8.0 * f64::from(feeds) + 0.6 * lactate;
        let ammonium = 0.5 + 0.7 * glutamine_used;
        let glutamate = 0.8 + 0.4 * glutamine_used;
        let ph = 7.15 - 0.012 * lactate - 0.002 * p_co2;
        let p_o2 = 55.0 - 1.1 * vcd;
        let acv = 1.7 + 0.06 * f64::from(d) + if shifted { 0.25 } else { 0.0 };
        let diameter = 14.5 + 0.25 * f64::from(d) + if shifted { 0.6 } else { 0.0 };
        let volume = 2.0 + 0.04 * f64::from(feeds);

        days.push([
            24.0 * f64::from(d - 1),
            generations,
            vcd,
            tcd,
            100.0 * vcd / tcd,
            mab,
            glucose,
            lactate,
            glutamine,
            glutamate,
            ammonium,
            k,
            na,
            osmolality,
            temperature,
            ph,
            p_co2,
            p_o2,
            hco3,
            acv,
            diameter,
            volume,
            feed_volume,
        ]);

        // Advance to the next day.
        let mu = run.mu_max * if shifted { 0.45 } else { 1.0 };
        let limitation = glutamine / (glutamine + 0.4);
        let growth = mu * vcd * (1.0 - vcd / run.capacity) * limitation;
        let onset = 1.0 / (1.0 + (-(f64::from(d) - run.death_onset) * 1.5).exp());
        let death = (0.02 + run.death_rate * onset) * vcd;
        let next_vcd = (vcd + growth - death).max(0.01);
        let ivcd = 0.5 * (vcd + next_vcd);

        if next_vcd > vcd {
            generations += (next_vcd / vcd).log2();
        }
        mab += run.productivity * ivcd * if shifted { 1.35 } else { 1.0 };
        let gln_use = (run.glutamine_uptake * ivcd).min(glutamine);
        glutamine -= gln_use;
        glutamine_used += gln_use;
        glucose = (glucose - run.glucose_uptake * ivcd).max(0.5);
        let lac_rate = if d < 6 { 0.12 } else { -0.05 };
        let lac_delta = (lac_rate * ivcd).max(-lactate + 0.2);
        lactate += lac_delta;
        lactate_made += lac_delta.max(0.0);
        dead += death - 0.03 * dead;
        vcd = next_vcd;

        if d >= 3 && d % 2 == 1 {
            feeds += 1;
            feed_volume += 0.04;
            glutamine += run.feed_size;
            glucose += 6.0 * run.feed_size;
        }
    }
    days
}

fn observe(truth: &[f64; 23], noise: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    truth
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let z: f64 = StandardNormal.sample(rng);
            match PARAMETER_NAMES[j] {
                "ECT" => *v,
                "Temperature" => v + 0.5 * noise * z,
                _ => v * (1.0 + noise * z).max(0.0),
            }
        })
        .collect()
}

/// Columns of [`synthesize_piecewise`]: the state and an exogenous input.
pub const PIECEWISE_PARAMETERS: [&str; 2] = ["X", "U"];

/// Benchmark cultures whose next-day state is a piecewise-linear function of
/// today's state and input:
///
/// `X(t+1) = 0.05 + 0.85·T(X(t)) + 0.1·U(t)` with the tent map
/// `T(s) = 2s` for `s < 0.5` and `2(1 − s)` otherwise. `U` is drawn uniformly
/// from `[0, 1]` each day. A global linear model cannot follow the fold at
/// `X = 0.5`. Observation noise is additive with standard deviation `noise`.
pub fn synthesize_piecewise(config: &SynthConfig) -> Result<Vec<CultureSeries>> {
    validate_config(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = config.n_cultures.to_string().len().max(3);
    let parameters: Vec<String> = PIECEWISE_PARAMETERS.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::with_capacity(config.n_cultures);
    for c in 0..config.n_cultures {
        let mut x: f64 = rng.random_range(0.05..0.95);
        let mut records = Vec::with_capacity(config.n_days);
        for d in 1..=config.n_days as u32 {
            let u: f64 = rng.random_range(0.0..1.0);
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zu: f64 = StandardNormal.sample(&mut rng);
            records.push(DayRecord {
                day: d,
                values: vec![x + config.noise * zx, u + config.noise * zu],
            });
            let tent = if x < 0.5 { 2.0 * x } else { 2.0 * (1.0 - x) };
            x = 0.05 + 0.85 * tent + 0.1 * u;
        }
        out.push(CultureSeries {
            culture_id: format!("c{:0width$}", c + 1),
            parameters: parameters.clone(),
            records,
        });
    }
    Ok(out)
}

fn validate_config(config: &SynthConfig) -> Result<()> {
    if config.n_cultures == 0 {
        return Err(HmrError::invalid("n_cultures must be at least 1"));
    }
    if config.n_days < 3 {
        return Err(HmrError::invalid("n_days must be at least 3"));
    }
    if !(config.noise.is_finite() && config.noise >= 0.0) {
        return Err(HmrError::invalid(format!(
            "noise must be finite and >= 0, got {}",
            config.noise
        )));
    }
    Ok(())
}
