mod oracle;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rankbench_core::*;

fn status(i: u8) -> RunStatus {
    RunStatus::ALL[i as usize % 6]
}

/// (status, time, quality) per solver per run.
fn dataset_strategy(max_solvers: usize, max_runs: usize) -> impl Strategy<Value = Vec<Vec<(u8, u16, u16)>>> {
    (2..=max_solvers, 1..=max_runs).prop_flat_map(|(s, r)| {
        prop::collection::vec(prop::collection::vec((0u8..6, 0u16..400, 10u16..100), r), s)
    })
}

fn build(cells: &[Vec<(u8, u16, u16)>], extra_failing_run: bool) -> Dataset {
    let mut b = DatasetBuilder::new(300.0);
    let mut reference = BTreeMap::new();
    for (s, row) in cells.iter().enumerate() {
        for (r, &(st, t, q)) in row.iter().enumerate() {
            let rec = RunRecord::new(status(st), f64::from(t), Some(f64::from(q)));
            b.push(&format!("s{s}"), RunKey::new(format!("i{r}"), 0), rec).unwrap();
            reference.insert(RunKey::new(format!("i{r}"), 0), Reference { best_known_quality: 10.0, reference_time: 30.0 });
        }
        if extra_failing_run {
            let rec = RunRecord::new(RunStatus::Crashed, 5.0, Some(50.0));
            b.push(&format!("s{s}"), RunKey::new("fail", 0), rec).unwrap();
            reference.insert(RunKey::new("fail", 0), Reference { best_known_quality: 10.0, reference_time: 30.0 });
        }
    }
    b.reference(reference);
    b.build().unwrap()
}

const ADDITIVE: [Mechanism; 4] =
    [Mechanism::SolvedCount, Mechanism::OptimalCount, Mechanism::IpcQuality, Mechanism::IpcAgile];

fn is_valid_min_rank(scores: &[f64], ranks: &[u32]) -> bool {
    oracle::min_ranks(scores) == ranks
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn failing_run_changes_no_additive_score(cells in dataset_strategy(5, 12)) {
        let d = build(&cells, false);
        let d2 = build(&cells, true);
        for mech in ADDITIVE {
            let a = compute_scores(&d, &mech, &RunMultiset::full(&d)).unwrap();
            let b = compute_scores(&d2, &mech, &RunMultiset::full(&d2)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn duplicating_entries_doubles_or_preserves(cells in dataset_strategy(5, 12)) {
        let d = build(&cells, false);
        let once = RunMultiset::full(&d);
        let mut twice = once.entries.clone();
        twice.extend(once.entries.clone());
        let twice = RunMultiset::new(twice);
        for mech in ADDITIVE {
            let a = compute_scores(&d, &mech, &once).unwrap();
            let b = compute_scores(&d, &mech, &twice).unwrap();
            for (x, y) in a.scores.iter().zip(&b.scores) {
                prop_assert!((2.0 * x - y).abs() <= 1e-9 * y.abs().max(1.0));
            }
        }
        for mech in [Mechanism::ParK(10.0), Mechanism::MeanMetric] {
            let a = compute_scores(&d, &mech, &once).unwrap();
            let b = compute_scores(&d, &mech, &twice).unwrap();
            for (x, y) in a.scores.iter().zip(&b.scores) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn official_ranking_is_affine_invariant(
        raw in prop::collection::vec(0i32..20, 2..10),
        scale_pow in 0i32..6,
        shift in -1000i32..1000,
    ) {
        let ids: Vec<String> = (0..raw.len()).map(|i| format!("s{i}")).collect();
        let mut b = DatasetBuilder::new(10.0);
        for id in &ids {
            b.push(id, RunKey::new("x", 0), RunRecord::new(RunStatus::Solved, 1.0, None)).unwrap();
        }
        let d = b.build().unwrap();
        let rs = RunMultiset::full(&d);
        let sv = ScoreVector { scores: raw.iter().map(|&x| f64::from(x)).collect() };
        let scale = f64::from(1 << scale_pow);
        let tv = ScoreVector { scores: sv.scores.iter().map(|x| scale * x + f64::from(shift)).collect() };
        let a = official_ranking(&sv, &d, &rs, &[]);
        let b2 = official_ranking(&tv, &d, &rs, &[]);
        prop_assert!(is_valid_min_rank(&sv.scores, &a.ranks));
        prop_assert_eq!(a, b2);
    }

    #[test]
    fn percentile_ci_bounds_are_sample_elements(
        samples in prop::collection::vec(-1e3f64..1e3, 1..300),
        alpha in 0.001f64..0.999,
    ) {
        let ci = percentile_ci(&samples, alpha).unwrap();
        prop_assert!(ci.lower <= ci.upper);
        prop_assert!(samples.contains(&ci.lower));
        prop_assert!(samples.contains(&ci.upper));
    }

    #[test]
    fn wider_alpha_never_widens(
        samples in prop::collection::vec(-1e3f64..1e3, 1..300),
        a in 0.001f64..0.999,
        b in 0.001f64..0.999,
    ) {
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        let narrow = percentile_ci(&samples, large).unwrap();
        let wide = percentile_ci(&samples, small).unwrap();
        prop_assert!(wide.lower <= narrow.lower && narrow.upper <= wide.upper);
    }

    #[test]
    fn bootstrap_p_complementarity(rows in prop::collection::vec((0u8..5, 0u8..5), 1..200)) {
        let rows: Vec<Vec<f64>> = rows.iter().map(|&(a, b)| vec![f64::from(a), f64::from(b)]).collect();
        let m = ScoreMatrix::from_rows(vec!["a".into(), "b".into()], &rows);
        let p12 = bootstrap_p(&m, "a", "b", 0.05).unwrap().p_value;
        let p21 = bootstrap_p(&m, "b", "a", 0.05).unwrap().p_value;
        let ties = rows.iter().any(|r| r[0] == r[1]);
        prop_assert!(p12 + p21 >= 1.0 - 1e-12);
        prop_assert_eq!((p12 + p21 - 1.0).abs() < 1e-12, !ties);
    }

    #[test]
    fn holm_between_bonferroni_and_uncorrected(
        p in prop::collection::vec(0.0f64..=1.0, 1..12),
        alpha in 0.001f64..0.5,
    ) {
        let m = p.len() as f64;
        let holm = holm_bonferroni(&p, alpha);
        for (i, &pi) in p.iter().enumerate() {
            if pi < alpha / m {
                prop_assert!(holm.contains(&i));
            }
            if holm.contains(&i) {
                prop_assert!(pi < alpha);
            }
        }
        prop_assert_eq!(holm, oracle::holm(&p, alpha));
    }

    #[test]
    fn holm_is_permutation_invariant(
        p in prop::collection::vec(0.0f64..=1.0, 1..10),
        perm_seed in any::<u64>(),
    ) {
        let n = p.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = perm_seed | 1;
        for i in (1..n).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            perm.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let shuffled: Vec<f64> = perm.iter().map(|&i| p[i]).collect();
        let base: Vec<usize> = holm_bonferroni(&p, 0.05);
        let mut back: Vec<usize> = holm_bonferroni(&shuffled, 0.05).into_iter().map(|j| perm[j]).collect();
        back.sort();
        prop_assert_eq!(base, back);
    }

    #[test]
    fn fractional_ranks_conserve_sum(sizes in prop::collection::vec(1usize..8, 1..20)) {
        let n: usize = sizes.iter().sum();
        let total: f64 = fractional_ranks(&sizes).iter().zip(&sizes).map(|(r, &k)| r * k as f64).sum();
        prop_assert_eq!(total, (n * (n + 1)) as f64 / 2.0);
    }

    #[test]
    fn robust_ranking_matches_transcription(
        n in 1usize..=6,
        k in 1usize..=200,
        levels in 1u8..6,
        seed in any::<u64>(),
    ) {
        let rows = random_rows(n, k, levels, seed);
        let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let m = ScoreMatrix::from_rows(ids.clone(), &rows);
        for row in 0..k {
            prop_assert!(is_valid_min_rank(m.row(row), m.rank_row(row)));
        }
        let r = robust_ranking(&m, 0.05);
        let mut got: Vec<Vec<usize>> = r.groups.iter().map(|g| g.members.clone()).collect();
        for g in &mut got { g.sort(); }
        prop_assert_eq!(got, oracle::robust_groups(&rows, &ids, 0.05));

        let sum: f64 = r.groups.iter().map(|g| g.fractional_rank * g.members.len() as f64).sum();
        prop_assert_eq!(sum, (n * (n + 1)) as f64 / 2.0);
        let winner = select_winner(&m);
        prop_assert!(r.groups[0].members.contains(&winner));
        let sizes = r.group_sizes();
        prop_assert_eq!(tied_pair_count(&r, None), sizes.iter().map(|&s| (s * (s - 1) / 2) as u64).sum::<u64>());
    }

    #[test]
    fn inversion_free_for_linear_extensions(sizes in prop::collection::vec(1usize..4, 2..6), seed in any::<u64>()) {
        // official order that respects the group order, with random ties inside groups
        let n: usize = sizes.iter().sum();
        let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let mut scores = Vec::new();
        let mut level = 1000.0;
        let mut x = seed | 1;
        for &size in &sizes {
            for _ in 0..size {
                x ^= x << 13; x ^= x >> 7; x ^= x << 17;
                scores.push(level - (x % 3) as f64);
            }
            level -= 10.0;
        }
        let mut b = DatasetBuilder::new(10.0);
        for id in &ids {
            b.push(id, RunKey::new("x", 0), RunRecord::new(RunStatus::Solved, 1.0, None)).unwrap();
        }
        let d = b.build().unwrap();
        let off = official_ranking(&ScoreVector { scores }, &d, &RunMultiset::full(&d), &[]);
        let mut start = 0;
        let groups = sizes.iter().zip(fractional_ranks(&sizes)).enumerate().map(|(i, (&s, fr))| {
            let g = RankGroup { index: i + 1, members: (start..start + s).collect(), fractional_rank: fr };
            start += s;
            g
        }).collect();
        let robust = RobustRanking { groups, iterations: vec![] };
        prop_assert_eq!(inversion_count(&off, &robust, None).count(), 0);
    }
}

/// Scores on a coarse grid so that ties and near-ties are common.
fn random_rows(n: usize, k: usize, levels: u8, seed: u64) -> Vec<Vec<f64>> {
    let mut x = seed | 1;
    let mut next = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x
    };
    let bias: Vec<u64> = (0..n).map(|_| next() % 3).collect();
    (0..k)
        .map(|_| (0..n).map(|s| (bias[s] + next() % u64::from(levels)) as f64).collect())
        .collect()
}

#[test]
fn tied_pairs_match_brute_force_for_small_universes() {
    // every composition of n <= 8 into ordered group sizes
    fn compositions(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        (1..=n)
            .flat_map(|first| compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            }))
            .collect()
    }
    for n in 1..=8 {
        for sizes in compositions(n) {
            let mut start = 0;
            let groups = sizes
                .iter()
                .zip(fractional_ranks(&sizes))
                .enumerate()
                .map(|(i, (&s, fr))| {
                    let g = RankGroup { index: i + 1, members: (start..start + s).collect(), fractional_rank: fr };
                    start += s;
                    g
                })
                .collect();
            let r = RobustRanking { groups, iterations: vec![] };
            let group = r.group_of();
            let brute = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| group[a] == group[b]).count();
            assert_eq!(tied_pair_count(&r, None), brute as u64, "{sizes:?}");
        }
    }
}

#[test]
fn group_count_versus_alpha_sweep() {
    // Larger alpha rejects more, so the first group can only shrink. Group
    // counts are checked for monotonicity over a sweep on fixed matrices.
    let alphas = [1e-6, 0.001, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
    let mut violations = 0;
    for seed in 1..200u64 {
        let rows = random_rows(6, 150, 4, seed);
        let ids: Vec<String> = (0..6).map(|i| format!("s{i}")).collect();
        let m = ScoreMatrix::from_rows(ids, &rows);
        let counts: Vec<usize> = alphas.iter().map(|&a| robust_ranking(&m, a).groups.len()).collect();
        let first: Vec<usize> = alphas.iter().map(|&a| robust_ranking(&m, a).groups[0].members.len()).collect();
        assert!(first.windows(2).all(|w| w[0] >= w[1]), "first group grew with alpha: {first:?}");
        if !counts.windows(2).all(|w| w[0] <= w[1]) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0, "group count decreased with alpha");
}

#[test]
fn tiny_alpha_only_separates_strict_domination() {
    // with alpha below 1/k, only p = 0 pairs can be rejected
    for seed in 1..50u64 {
        let mut rows = random_rows(5, 100, 4, seed);
        // make every pair overlap at least once
        rows.push(vec![0.0; 5]);
        let ids: Vec<String> = (0..5).map(|i| format!("s{i}")).collect();
        let m = ScoreMatrix::from_rows(ids, &rows);
        assert_eq!(robust_ranking(&m, 1e-9).groups.len(), 1);
    }
}

#[test]
fn mean_distinct_fraction_of_uniform_replicates() {
    // E[distinct] = n (1 - (1 - 1/n)^n) ~ 3161.0 for n = 5000
    let n = 5000;
    let mut b = DatasetBuilder::new(10.0);
    for i in 0..n {
        for s in ["A", "B"] {
            b.push(s, RunKey::new(format!("i{i}"), 0), RunRecord::new(RunStatus::Solved, 1.0, None)).unwrap();
        }
    }
    let d = b.build().unwrap();
    let draws = 10_000;
    let mut seen = vec![0u32; n];
    let mut total = 0usize;
    for rep in 0..draws {
        let rs = draw_uniform_replicate(&d, &mut replicate_rng(99, rep));
        assert_eq!(rs.len(), n);
        let stamp = rep as u32 + 1;
        for &e in &rs.entries {
            if seen[e] != stamp {
                seen[e] = stamp;
                total += 1;
            }
        }
    }
    let mean = total as f64 / draws as f64;
    let expected = n as f64 * (1.0 - (1.0 - 1.0 / n as f64).powi(n as i32));
    // sd of a single draw's distinct count is ~ 21; the mean of 10^4 draws ~ 0.21
    assert!((mean - expected).abs() < 2.0, "mean {mean} vs {expected}");
}

#[test]
fn stratified_counts_per_stratum() {
    let mut b = DatasetBuilder::new(10.0);
    let mut strata = BTreeMap::new();
    for dom in 0..4 {
        for j in 0..(dom + 2) {
            let inst = format!("d{dom}-{j}");
            strata.insert(inst.clone(), format!("d{dom}"));
            for s in ["A", "B"] {
                b.push(s, RunKey::new(inst.clone(), 0), RunRecord::new(RunStatus::Solved, 1.0, None)).unwrap();
            }
        }
    }
    b.strata(strata);
    let d = b.build().unwrap();
    let st = Strata::new(&d).unwrap();
    for i in 0..500 {
        let rs = draw_stratified_replicate(&st, &mut replicate_rng(4, i));
        for (label, runs) in st.labels.iter().zip(&st.runs) {
            let count = rs.entries.iter().filter(|&&e| d.stratum_of(&d.runs()[e].instance) == Some(label)).count();
            assert_eq!(count, runs.len());
        }
    }
}

#[test]
fn matrix_rows_independent_of_evaluation_order() {
    let mut b = DatasetBuilder::new(100.0);
    for i in 0..40 {
        for (s, t) in [("A", 10.0 + i as f64), ("B", 90.0), ("C", 200.0 - i as f64 * 4.0)] {
            b.push(s, RunKey::new(format!("i{i}"), 0), RunRecord::new(RunStatus::Solved, t, None)).unwrap();
        }
    }
    let d = b.build().unwrap();
    let mut cfg = AnalysisConfig::new(Mechanism::ParK(10.0));
    cfg.replicates = 64;
    cfg.master_seed = 2024;
    let m = generate_score_matrix(&d, &cfg).unwrap();
    let scorer = ReplicateScorer::new(&d, &cfg).unwrap();
    let mut entries = Vec::new();
    let mut s = vec![0.0; 3];
    let mut r = vec![0u32; 3];
    for i in (0..64).rev() {
        scorer.score_replicate(i, &mut entries, &mut s, &mut r).unwrap();
        assert_eq!(m.row(i), &s[..]);
        assert_eq!(m.rank_row(i), &r[..]);
        let direct = compute_scores(&d, &cfg.mechanism, &scorer.draw(i)).unwrap();
        assert_eq!(direct.scores, s);
    }
}

#[test]
fn sensitivity_constructed_example() {
    // B solves {1,2,3,4}, A solves {1,2,3}, C nothing. Dropping 4 ties A and B
    // and the id tiebreak lists A first; no other removal changes anything.
    let mut b = DatasetBuilder::new(10.0);
    let solved = [("A", [true, true, true, false]), ("B", [true, true, true, true]), ("C", [false; 4])];
    for (s, row) in &solved {
        for (i, &ok) in row.iter().enumerate() {
            let st = if ok { RunStatus::Solved } else { RunStatus::Timeout };
            b.push(s, RunKey::new(format!("i{}", i + 1), 0), RunRecord::new(st, 1.0, None)).unwrap();
        }
    }
    let d = b.build().unwrap();
    let r = leave_one_out_analysis(&d, &AnalysisConfig::new(Mechanism::SolvedCount)).unwrap();
    let flags: Vec<bool> = r.instances.iter().map(|f| f.any_change).collect();
    assert_eq!(flags, vec![false, false, false, true]);
    assert_eq!(r.counts.any_change, 1);
    assert_eq!(r.counts.top3_order, 1);
    assert_eq!(r.counts.top3_comp, 0);
    // fewer than 10 solvers: the top-10 view is the whole listing
    assert_eq!(r.counts.top10_order, 1);
    assert_eq!(r.counts.rank_change, 1);

    let matrix: Vec<Vec<bool>> = solved.iter().map(|(_, row)| row.to_vec()).collect();
    let ids: Vec<String> = solved.iter().map(|(s, _)| s.to_string()).collect();
    let brute = oracle::solved_count_loo(&matrix, &ids);
    for (f, o) in r.instances.iter().zip(&brute) {
        assert_eq!([f.any_change, f.top10_comp, f.top10_order, f.top3_comp, f.top3_order], *o);
    }
}
