//! Active construction of the training set: train, score every pool point by
//! energy variance plus `μ` times its distance to the selected set, add the
//! best one, repeat.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::Path;

use crate::encoder::Encoder;
use crate::error::{ensure, Result};
use crate::hamiltonian::GroundStateCache;
use crate::metrics::{evaluate_on_grid, Model};
use crate::training::{TrainConfig, Trainer};

#[derive(Clone, Debug, PartialEq)]
pub struct AcquisitionConfig {
    /// Candidate points.
    pub pool: Vec<Vec<f64>>,
    /// Exploration weight.
    pub mu: f64,
    /// Stop once the max relative error over `test_points` drops below this.
    pub threshold: f64,
    pub max_points: usize,
    /// Continue from the previous round's weights instead of reinitializing.
    pub warm_start: bool,
    pub test_points: Vec<Vec<f64>>,
    /// Seeds the round-0 pick.
    pub seed: u64,
}

impl AcquisitionConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        ensure!(!self.pool.is_empty(), Config, "acquisition pool is empty");
        ensure!(!self.test_points.is_empty(), Config, "active-learning test set is empty");
        ensure!(self.mu >= 0.0 && self.mu.is_finite(), Config, "mu must be finite and non-negative");
        ensure!(!self.threshold.is_nan(), Config, "stop threshold is NaN");
        ensure!(self.max_points >= 1, Config, "max points must be at least 1");
        for p in self.pool.iter().chain(&self.test_points) {
            ensure!(p.len() == dim, Config, "point {p:?} does not have {dim} components");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Score {
    pub variance: f64,
    pub distance: f64,
    pub total: f64,
}

fn min_distance(point: &[f64], selected: &[Vec<f64>]) -> f64 {
    selected
        .iter()
        .map(|s| s.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// `Var_ψ(λ) H(λ) + μ · min_{λ* ∈ selected} ‖λ − λ*‖` for every pool point.
pub fn acquisition_scores(model: &Model<'_>, pool: &[Vec<f64>], selected: &[Vec<f64>], mu: f64) -> Result<Vec<Score>> {
    ensure!(!selected.is_empty(), Usage, "acquisition needs at least one selected point");
    pool.par_iter()
        .map(|point| {
            let (_, variance) = model.energy_and_variance(point)?;
            let distance = mu * min_distance(point, selected);
            Ok(Score { variance, distance, total: variance + distance })
        })
        .collect()
}

/// Highest-scoring pool index not yet taken; ties go to the lowest index.
pub fn select_next(scores: &[Score], taken: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if taken[i] {
            continue;
        }
        if best.is_none_or(|b| s.total > scores[b].total) {
            best = Some(i);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub round: usize,
    pub added_point: Vec<f64>,
    /// Acquisition score of the added point; NaN for the random first pick.
    pub score: Score,
    /// Max test relative error after training on the enlarged set.
    pub test_max_rel_err: f64,
}

#[derive(Clone, Debug)]
pub struct ActiveOutcome {
    /// Pool indices in acquisition order.
    pub selected: Vec<usize>,
    pub points: Vec<Vec<f64>>,
    pub encoder: Encoder,
    pub rounds: Vec<Round>,
    pub reached_threshold: bool,
    /// Every pool point was selected before the threshold was met.
    pub pool_exhausted: bool,
}

/// Runs rounds until the test error threshold, `max_points`, or the pool
/// runs out. `train` supplies everything but the points, which are replaced
/// by the selected set each round.
pub fn active_learn(config: &AcquisitionConfig, train: &TrainConfig, exact: &GroundStateCache) -> Result<ActiveOutcome> {
    config.validate(train.family.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let first = rng.random_range(0..config.pool.len());
    let mut taken = vec![false; config.pool.len()];
    taken[first] = true;
    let mut selected = vec![first];
    let mut score = Score { variance: f64::NAN, distance: f64::NAN, total: f64::NAN };
    let mut encoder = Encoder::init(train.encoder.clone())?;
    let mut rounds = Vec::new();

    loop {
        let round_config = TrainConfig {
            points: selected.iter().map(|&i| config.pool[i].clone()).collect(),
            ..train.clone()
        };
        let start = if config.warm_start || rounds.is_empty() {
            encoder
        } else {
            Encoder::init(train.encoder.clone())?
        };
        encoder = Trainer::new(&round_config)?.run(start)?.encoder;

        let model = Model::new(&train.family, &train.circuit, &encoder);
        let records = evaluate_on_grid(&model, &config.test_points, exact)?;
        let test_max_rel_err = records.iter().map(|r| r.rel_err).fold(0.0, f64::max);
        let last = *selected.last().expect("selected is never empty");
        rounds.push(Round { round: rounds.len(), added_point: config.pool[last].clone(), score, test_max_rel_err });

        let reached_threshold = test_max_rel_err < config.threshold;
        let pool_exhausted = selected.len() == config.pool.len();
        if reached_threshold || pool_exhausted || selected.len() >= config.max_points {
            return Ok(ActiveOutcome {
                points: round_config.points,
                selected,
                encoder,
                rounds,
                reached_threshold,
                pool_exhausted: pool_exhausted && !reached_threshold,
            });
        }

        let scores = acquisition_scores(&model, &config.pool, &round_config.points, config.mu)?;
        let next = select_next(&scores, &taken).expect("pool not exhausted");
        taken[next] = true;
        selected.push(next);
        score = scores[next];
    }
}

/// `round,added_point,score,variance_term,distance_term,test_max_rel_err`.
/// Multi-parameter points are written space-separated in one field.
pub fn write_rounds_csv(rounds: &[Round], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["round", "added_point", "score", "variance_term", "distance_term", "test_max_rel_err"])?;
    for r in rounds {
        let point: Vec<String> = r.added_point.iter().map(f64::to_string).collect();
        w.write_record([
            r.round.to_string(),
            point.join(" "),
            r.score.total.to_string(),
            r.score.variance.to_string(),
            r.score.distance.to_string(),
            r.test_max_rel_err.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(total: f64) -> Score {
        Score { variance: total, distance: 0.0, total }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let scores = [s(1.0), s(3.0), s(3.0), s(2.0)];
        assert_eq!(select_next(&scores, &[false; 4]), Some(1));
        assert_eq!(select_next(&scores, &[false, true, false, false]), Some(2));
        assert_eq!(select_next(&scores, &[true; 4]), None);
    }

    #[test]
    fn euclidean_min_distance() {
        let sel = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        assert_eq!(min_distance(&[3.0, 0.0], &sel), 3.0);
        assert_eq!(min_distance(&[3.0, 4.0], &sel), 0.0);
    }
}
