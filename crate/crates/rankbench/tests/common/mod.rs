#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankbench::core::{Dataset, DatasetBuilder, Reference, RunKey, RunRecord, RunStatus};

pub struct Shape {
    pub solvers: usize,
    pub instances: usize,
    pub seeds: u64,
    /// 0 leaves the dataset in the single default stratum.
    pub strata: usize,
    pub cutoff: f64,
}

/// Synthetic competition: solver `s` succeeds with a skill-dependent
/// probability; every run has reference data, so all mechanisms apply.
pub fn synthetic(shape: &Shape, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let skill: Vec<f64> = (0..shape.solvers).map(|_| rng.random_range(0.2..0.9)).collect();
    let mut b = DatasetBuilder::new(shape.cutoff);
    let mut strata = BTreeMap::new();
    let mut reference = BTreeMap::new();
    for i in 0..shape.instances {
        let inst = format!("inst{i:04}");
        if shape.strata > 0 {
            strata.insert(inst.clone(), format!("dom{:02}", i % shape.strata));
        }
        let difficulty: f64 = rng.random_range(-0.2..0.2);
        for seed in 0..shape.seeds {
            let key = RunKey::new(inst.clone(), seed);
            let best = rng.random_range(10.0..100.0f64).round();
            reference.insert(key.clone(), Reference { best_known_quality: best, reference_time: rng.random_range(1.0..50.0) });
            for (s, &p) in skill.iter().enumerate() {
                let roll: f64 = rng.random();
                let record = if roll < p + difficulty {
                    let time = rng.random_range(0.1..shape.cutoff);
                    if rng.random_bool(0.3) {
                        RunRecord::new(RunStatus::SolvedOptimal, time, Some(best))
                    } else {
                        RunRecord::new(RunStatus::Solved, time, Some(best + rng.random_range(0.0..best).round()))
                    }
                } else {
                    let status = [RunStatus::Timeout, RunStatus::Incorrect, RunStatus::Crashed, RunStatus::Unsolved][rng.random_range(0..4)];
                    RunRecord::new(status, shape.cutoff, None)
                };
                b.push(&format!("solver{s:02}"), key.clone(), record).unwrap();
            }
        }
    }
    b.strata(strata);
    b.reference(reference);
    b.build().unwrap()
}

/// Two solvers with i.i.d. Bernoulli(`p`) success on each of `instances` runs.
pub fn bernoulli_pair(instances: usize, p: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DatasetBuilder::new(100.0);
    for i in 0..instances {
        for s in ["A", "B"] {
            let status = if rng.random_bool(p) { RunStatus::Solved } else { RunStatus::Timeout };
            b.push(s, RunKey::new(format!("i{i}"), 0), RunRecord::new(status, 1.0, None)).unwrap();
        }
    }
    b.build().unwrap()
}
