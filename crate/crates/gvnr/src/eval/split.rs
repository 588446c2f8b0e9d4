//! Seeded data splits: stratified label splits and link-prediction edge
//! splits.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

const STRATIFY_LANE: u64 = 11;
const EDGE_LANE: u64 = 12;
const NEGATIVE_LANE: u64 = 13;

/// Per-class proportional train/test split.
///
/// Class quotas use largest-remainder rounding toward `round(frac·n)` total;
/// every class keeps at least one training example (forced with a warning if
/// its quota rounds to zero). Returns sorted index lists.
pub fn stratified_split(
    labels: &[usize],
    train_frac: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::Config(format!(
            "train_frac must be in (0, 1), got {train_frac}"
        )));
    }
    if labels.is_empty() {
        return Err(Error::InvalidInput("no labels to split".into()));
    }
    let num_classes = labels.iter().max().unwrap() + 1;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &label) in labels.iter().enumerate() {
        members[label].push(i);
    }
    if let Some(empty) = members.iter().position(|m| m.is_empty()) {
        return Err(Error::InvalidInput(format!("class {empty} has no members")));
    }

    let target_total = (train_frac * labels.len() as f64).round() as usize;
    let mut quotas: Vec<usize> = Vec::with_capacity(num_classes);
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(num_classes);
    for (c, m) in members.iter().enumerate() {
        let exact = train_frac * m.len() as f64;
        let base = exact.floor() as usize;
        quotas.push(base);
        remainders.push((c, exact - base as f64));
    }
    let assigned: usize = quotas.iter().sum();
    let mut leftover = target_total.saturating_sub(assigned);
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    'distribute: while leftover > 0 {
        let mut progressed = false;
        for &(c, _) in &remainders {
            if leftover == 0 {
                break 'distribute;
            }
            if quotas[c] < members[c].len() {
                quotas[c] += 1;
                leftover -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    for (c, quota) in quotas.iter_mut().enumerate() {
        if *quota == 0 {
            log::warn!("class {c} quota rounded to zero; forcing one training example");
            *quota = 1;
        }
    }

    let mut rng = stream_rng(seed, STRATIFY_LANE, 0);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, m) in members.iter().enumerate() {
        let mut shuffled = m.clone();
        shuffled.shuffle(&mut rng);
        let quota = quotas[c].min(shuffled.len());
        train.extend_from_slice(&shuffled[..quota]);
        test.extend_from_slice(&shuffled[quota..]);
    }
    if test.is_empty() {
        return Err(Error::InvalidInput(
            "split leaves no test examples; lower train_frac".into(),
        ));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// A link-prediction split: the training graph plus held-out positive edges
/// and sampled never-linked negative pairs.
#[derive(Debug, Clone)]
pub struct LinkSplit {
    pub train: Dataset,
    pub positives: Vec<(usize, usize)>,
    pub negatives: Vec<(usize, usize)>,
    pub test_frac: f64,
}

/// Remove `test_frac` of the edges uniformly at random as test positives,
/// keeping every node connected (edges whose removal would isolate a node
/// are passed over; if the quota cannot be met, a warning is logged and the
/// split proceeds short). Negatives are sampled uniformly among pairs never
/// linked in the original graph, one per positive.
pub fn link_prediction_split(d: &Dataset, test_frac: f64, seed: u64) -> Result<LinkSplit> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::Config(format!(
            "test_frac must be in (0, 1), got {test_frac}"
        )));
    }
    let edges = d.edges();
    if edges.is_empty() {
        return Err(Error::InvalidInput("graph has no edges to split".into()));
    }
    let target = ((test_frac * edges.len() as f64).round() as usize).max(1);

    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut stream_rng(seed, EDGE_LANE, 0));
    let mut degree: Vec<usize> = d.adjacency.iter().map(|a| a.len()).collect();
    let mut removed: HashSet<(usize, usize)> = HashSet::new();
    let mut positives = Vec::with_capacity(target);
    for &e in &order {
        if positives.len() == target {
            break;
        }
        let (a, b) = edges[e];
        if degree[a] > 1 && degree[b] > 1 {
            degree[a] -= 1;
            degree[b] -= 1;
            removed.insert((a, b));
            positives.push((a, b));
        }
    }
    if positives.len() < target {
        log::warn!(
            "link split kept only {} of {} requested test edges; graph too sparse to isolate more",
            positives.len(),
            target
        );
    }
    if positives.is_empty() {
        return Err(Error::InvalidInput(
            "no edge can be removed without isolating a node".into(),
        ));
    }

    let adjacency: Vec<Vec<usize>> = d
        .adjacency
        .iter()
        .enumerate()
        .map(|(i, nb)| {
            nb.iter()
                .copied()
                .filter(|&j| !removed.contains(&(i.min(j), i.max(j))))
                .collect()
        })
        .collect();
    let train = Dataset {
        node_ids: d.node_ids.clone(),
        adjacency,
        bows: d.bows.clone(),
        labels: d.labels.clone(),
        class_names: d.class_names.clone(),
        vocab_size: d.vocab_size,
        num_classes: d.num_classes,
    };
    train.validate()?;

    let all_edges: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let n = d.len();
    let mut rng = stream_rng(seed, NEGATIVE_LANE, 0);
    let mut negatives: Vec<(usize, usize)> = Vec::with_capacity(positives.len());
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut attempts = 0usize;
    let budget = 1000 + 200 * positives.len();
    while negatives.len() < positives.len() {
        attempts += 1;
        if attempts > budget {
            return Err(Error::InvalidInput(
                "could not sample enough never-linked negative pairs".into(),
            ));
        }
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if all_edges.contains(&pair) || !seen.insert(pair) {
            continue;
        }
        negatives.push(pair);
    }

    Ok(LinkSplit {
        train,
        positives,
        negatives,
        test_frac,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_cora_format;
    use std::io::Cursor;

    #[test]
    fn balanced_split_hits_exact_counts() {
        // 10 items, 2 balanced classes, frac 0.5: 5 train / 5 test
        let labels = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let (train, test) = stratified_split(&labels, 0.5, 3).unwrap();
        assert_eq!(train.len(), 5);
        assert_eq!(test.len(), 5);
        for class in 0..2 {
            let in_train = train.iter().filter(|&&i| labels[i] == class).count();
            assert!((2..=3).contains(&in_train));
        }
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn proportions_held_within_one_item() {
        // class sizes 50 / 30 / 20, frac 0.3
        let mut labels = vec![0; 50];
        labels.extend(vec![1; 30]);
        labels.extend(vec![2; 20]);
        let (train, _) = stratified_split(&labels, 0.3, 9).unwrap();
        assert_eq!(train.len(), 30);
        let counts: Vec<usize> = (0..3)
            .map(|c| train.iter().filter(|&&i| labels[i] == c).count())
            .collect();
        for (c, &got) in counts.iter().enumerate() {
            let exact = 0.3 * [50.0, 30.0, 20.0][c];
            assert!((got as f64 - exact).abs() <= 1.0, "class {c}: {got} vs {exact}");
        }
    }

    #[test]
    fn tiny_class_forced_into_train() {
        let labels = vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        let (train, _) = stratified_split(&labels, 0.2, 5).unwrap();
        assert!(train.contains(&9), "single-member class must be in train");
    }

    #[test]
    fn split_is_deterministic() {
        let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let a = stratified_split(&labels, 0.25, 77).unwrap();
        let b = stratified_split(&labels, 0.25, 77).unwrap();
        assert_eq!(a, b);
        let c = stratified_split(&labels, 0.25, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_fractions_rejected() {
        let labels = vec![0, 1];
        assert!(stratified_split(&labels, 0.0, 1).is_err());
        assert!(stratified_split(&labels, 1.0, 1).is_err());
    }

    fn path_graph_4() -> Dataset {
        let content = "a\t1\tx\nb\t1\tx\nc\t1\ty\nd\t1\ty\n";
        let cites = "a b\nb c\nc d\n";
        load_cora_format(Cursor::new(content), Cursor::new(cites))
            .unwrap()
            .0
    }

    #[test]
    fn link_split_hand_enumeration() {
        // 3 edges, test_frac 0.34: one positive, one negative, two edges in
        // train. In the path a-b-c-d only b-c can be removed without
        // isolating an endpoint.
        let d = path_graph_4();
        let split = link_prediction_split(&d, 0.34, 1).unwrap();
        assert_eq!(split.positives, vec![(1, 2)]);
        assert_eq!(split.negatives.len(), 1);
        assert_eq!(split.train.edge_count(), 2);
        assert!(split.train.adjacency.iter().all(|a| !a.is_empty()));
    }

    #[test]
    fn negatives_never_intersect_original_edges() {
        let d = path_graph_4();
        for seed in 0..30 {
            let split = link_prediction_split(&d, 0.34, seed).unwrap();
            let edges: HashSet<(usize, usize)> = d.edges().into_iter().collect();
            for &neg in &split.negatives {
                assert!(!edges.contains(&neg), "negative {neg:?} is a real edge");
            }
        }
    }

    #[test]
    fn link_split_deterministic() {
        let d = path_graph_4();
        let a = link_prediction_split(&d, 0.34, 7).unwrap();
        let b = link_prediction_split(&d, 0.34, 7).unwrap();
        assert_eq!(a.positives, b.positives);
        assert_eq!(a.negatives, b.negatives);
        assert_eq!(a.train, b.train);
    }
}
