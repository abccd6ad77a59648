//! Direct, unoptimised transcriptions used as test oracles. Nothing here
//! calls into the crate's ranking, stats or sensitivity code.
#![allow(dead_code)]

/// Holm step-down, phrased as "reject the j-th smallest p-value iff it and
/// every smaller one beat their thresholds".
pub fn holm(p: &[f64], alpha: f64) -> Vec<usize> {
    let m = p.len();
    let mut idx: Vec<usize> = (0..m).collect();
    // insertion sort, stable
    for i in 1..m {
        let mut j = i;
        while j > 0 && p[idx[j - 1]] > p[idx[j]] {
            idx.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut out = Vec::new();
    for j in 0..m {
        let mut all = true;
        for i in 0..=j {
            if p[idx[i]] >= alpha / ((m - i) as f64) {
                all = false;
            }
        }
        if all {
            out.push(idx[j]);
        }
    }
    out.sort();
    out
}

fn median(col: &[f64]) -> f64 {
    let mut c = col.to_vec();
    c.sort_by(|a, b| a.partial_cmp(b).unwrap());
    c[c.len().div_ceil(2) - 1]
}

/// Robust grouping straight from its definition. `rows[i][s]` is the score
/// of solver `s` in replicate `i`. Returns groups as sorted solver indices.
pub fn robust_groups(rows: &[Vec<f64>], ids: &[String], alpha: f64) -> Vec<Vec<usize>> {
    let k = rows.len();
    let n = ids.len();
    let medians: Vec<f64> = (0..n).map(|s| median(&rows.iter().map(|r| r[s]).collect::<Vec<_>>())).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut groups = Vec::new();
    while !remaining.is_empty() {
        let mut wins = vec![0usize; n];
        for row in rows {
            for &s in &remaining {
                if remaining.iter().all(|&t| row[t] <= row[s]) {
                    wins[s] += 1;
                }
            }
        }
        let mut winner = remaining[0];
        for &s in &remaining {
            let key = (wins[s], medians[s]);
            let best = (wins[winner], medians[winner]);
            if key.0 > best.0 || (key.0 == best.0 && (key.1 > best.1 || (key.1 == best.1 && ids[s] < ids[winner]))) {
                winner = s;
            }
        }
        let others: Vec<usize> = remaining.iter().copied().filter(|&s| s != winner).collect();
        let p: Vec<f64> = others
            .iter()
            .map(|&s| rows.iter().filter(|r| r[winner] <= r[s]).count() as f64 / k as f64)
            .collect();
        let rejected: Vec<usize> = holm(&p, alpha).into_iter().map(|j| others[j]).collect();
        let mut group: Vec<usize> = remaining.iter().copied().filter(|s| !rejected.contains(s)).collect();
        group.sort();
        groups.push(group);
        remaining = rejected;
    }
    groups
}

/// Min-rank by counting strictly better scores.
pub fn min_ranks(scores: &[f64]) -> Vec<u32> {
    scores.iter().map(|x| 1 + scores.iter().filter(|y| *y > x).count() as u32).collect()
}

/// Leave-one-out flags for a solved-count competition given as
/// `solved[s][instance]`, solver ids `ids`, listing ties broken by id.
/// Returns per instance `(any, top10_comp, top10_order, top3_comp, top3_order)`.
pub fn solved_count_loo(solved: &[Vec<bool>], ids: &[String]) -> Vec<[bool; 5]> {
    let n_inst = solved[0].len();
    let listing = |keep: &dyn Fn(usize) -> bool| -> Vec<usize> {
        let scores: Vec<usize> =
            solved.iter().map(|row| (0..n_inst).filter(|&i| keep(i) && row[i]).count()).collect();
        let mut order: Vec<usize> = (0..solved.len()).collect();
        order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(ids[a].cmp(&ids[b])));
        order
    };
    let base = listing(&|_| true);
    let depth_flags = |a: &[usize], b: &[usize], d: usize| -> (bool, bool) {
        let d = d.min(a.len());
        let (x, y) = (&a[..d], &b[..d]);
        let same_set = x.iter().all(|s| y.contains(s));
        (!same_set, same_set && x != y)
    };
    (0..n_inst)
        .map(|removed| {
            let v = listing(&|i| i != removed);
            let (c10, o10) = depth_flags(&base, &v, 10);
            let (c3, o3) = depth_flags(&base, &v, 3);
            [v != base, c10, o10, c3, o3]
        })
        .collect()
}
