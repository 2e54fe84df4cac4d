use nnvqe::active::*;
use nnvqe::ansatz::build_hea;
use nnvqe::encoder::{Encoder, EncoderSpec};
use nnvqe::error::Error;
use nnvqe::hamiltonian::{GroundStateCache, HamiltonianFamily};
use nnvqe::metrics::{grid1d, grid2d, linspace, Model};
use nnvqe::training::{LrSchedule, TrainConfig, Trainer};

fn train_config(seed: u64) -> TrainConfig {
    let circuit = build_hea(4, 1).unwrap();
    TrainConfig {
        family: HamiltonianFamily::xxz_delta(4, 0.75),
        encoder: EncoderSpec::mlp(1, 6, circuit.n_params(), 0.0, seed),
        circuit,
        points: vec![vec![0.0]],
        max_epochs: 10,
        schedule: LrSchedule::constant(0.02),
        seed,
    }
}

fn acquisition(pool: Vec<Vec<f64>>, threshold: f64, max_points: usize) -> AcquisitionConfig {
    AcquisitionConfig {
        pool,
        mu: 6.0,
        threshold,
        max_points,
        warm_start: true,
        test_points: grid1d(&linspace(-2.0, 2.0, 9)),
        seed: 5,
    }
}

#[test]
fn infinite_threshold_stops_after_first_round() {
    let cache = GroundStateCache::new();
    let out = active_learn(&acquisition(grid1d(&linspace(-2.0, 2.0, 11)), f64::INFINITY, 10), &train_config(0), &cache).unwrap();
    assert_eq!(out.selected.len(), 1);
    assert_eq!(out.rounds.len(), 1);
    assert!(out.reached_threshold);
    assert!(out.rounds[0].score.total.is_nan());
}

#[test]
fn single_point_pool_is_exhausted_not_an_error() {
    let cache = GroundStateCache::new();
    let out = active_learn(&acquisition(vec![vec![0.5]], 0.0, 10), &train_config(0), &cache).unwrap();
    assert_eq!(out.points, vec![vec![0.5]]);
    assert!(out.pool_exhausted);
    assert!(!out.reached_threshold);
}

#[test]
fn grows_by_one_without_duplicates() {
    let cache = GroundStateCache::new();
    let pool = grid1d(&linspace(-2.0, 2.0, 11));
    let out = active_learn(&acquisition(pool.clone(), 0.0, 6), &train_config(1), &cache).unwrap();
    assert_eq!(out.selected.len(), 6);
    assert_eq!(out.rounds.len(), 6);
    let mut seen = out.selected.clone();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), 6);
    for (round, &i) in out.rounds.iter().zip(&out.selected) {
        assert_eq!(round.added_point, pool[i]);
    }
    assert!(!out.pool_exhausted);
}

#[test]
fn added_point_dominates_full_rescan() {
    let cache = GroundStateCache::new();
    let pool = grid1d(&linspace(-2.0, 2.0, 11));
    let config = train_config(2);
    let acq = acquisition(pool.clone(), 0.0, 2);
    let out = active_learn(&acq, &config, &cache).unwrap();
    let first = out.selected[0];

    // Rebuild the round-0 model independently and rescore the whole pool.
    let round0 = TrainConfig { points: vec![pool[first].clone()], ..config.clone() };
    let start = Encoder::init(config.encoder.clone()).unwrap();
    let encoder = Trainer::new(&round0).unwrap().run(start).unwrap().encoder;
    let model = Model::new(&config.family, &config.circuit, &encoder);
    let mut best = (f64::NEG_INFINITY, usize::MAX);
    for (i, p) in pool.iter().enumerate() {
        if i == first {
            continue;
        }
        let (_, var) = model.energy_and_variance(p).unwrap();
        let total = var + acq.mu * (p[0] - pool[first][0]).abs();
        if total > best.0 {
            best = (total, i);
        }
    }
    assert_eq!(out.selected[1], best.1);
    assert!((out.rounds[1].score.total - best.0).abs() < 1e-10);
}

#[test]
fn mu_scaling_moves_toward_distance() {
    let config = train_config(3);
    let encoder = Encoder::init(config.encoder.clone()).unwrap();
    let model = Model::new(&config.family, &config.circuit, &encoder);
    let pool = grid1d(&linspace(-2.0, 2.0, 21));
    let selected = vec![vec![-0.4], vec![1.2]];
    let low = acquisition_scores(&model, &pool, &selected, 0.5).unwrap();
    let high = acquisition_scores(&model, &pool, &selected, 5.0).unwrap();
    let taken = vec![false; pool.len()];
    for (a, b) in low.iter().zip(&high) {
        assert_eq!(a.variance, b.variance);
        assert!((b.distance - 10.0 * a.distance).abs() < 1e-12);
    }
    let i = select_next(&low, &taken).unwrap();
    let j = select_next(&high, &taken).unwrap();
    assert!(high[j].distance / 5.0 >= low[i].distance / 0.5 - 1e-12);

    // Selected points score their variance alone; μ = 0 ranks by variance.
    let at_selected = acquisition_scores(&model, &selected, &selected, 6.0).unwrap();
    assert!(at_selected.iter().all(|s| s.distance == 0.0 && s.total == s.variance));
    let zero = acquisition_scores(&model, &pool, &selected, 0.0).unwrap();
    let k = select_next(&zero, &taken).unwrap();
    assert!(zero.iter().all(|s| s.variance <= zero[k].variance));
}

#[test]
fn two_parameter_distance_is_euclidean() {
    let circuit = build_hea(4, 1).unwrap();
    let family = HamiltonianFamily::xxz_delta_field(4);
    let encoder = Encoder::init(EncoderSpec::mlp(2, 4, circuit.n_params(), 0.0, 0)).unwrap();
    let model = Model::new(&family, &circuit, &encoder);
    let pool = grid2d(&[0.0, 3.0], &[0.0, 4.0]);
    let scores = acquisition_scores(&model, &pool, &[vec![0.0, 0.0]], 1.0).unwrap();
    assert_eq!(scores[3].distance, 5.0);
    assert!(matches!(acquisition_scores(&model, &pool, &[], 1.0), Err(Error::Usage(_))));
}
