use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_for;

use super::dataset::Dataset;
use super::metrics::gini_from_counts;
use super::params::ForestParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n_samples: usize,
        depth: usize,
        impurity: f64,
        /// `(n_node / n_root) · (impurity − weighted child impurity)`
        impurity_decrease_weighted: f64,
    },
    Leaf {
        class_histogram: Vec<u32>,
        n_samples: usize,
        depth: usize,
        impurity: f64,
    },
}

impl Node {
    pub fn n_samples(&self) -> usize {
        match self {
            Node::Split { n_samples, .. } | Node::Leaf { n_samples, .. } => *n_samples,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Split { depth, .. } | Node::Leaf { depth, .. } => *depth,
        }
    }
}

/// Binary tree stored as a node array; node 0 is the root. Samples with
/// `x[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl DecisionTree {
    fn leaf(&self, row: &[f64]) -> &[u32] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if row[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { class_histogram, .. } => return class_histogram,
            }
        }
    }

    /// Add this tree's leaf class frequencies for `row` into `out`.
    pub(crate) fn accumulate_proba(&self, row: &[f64], out: &mut [f64]) {
        let hist = self.leaf(row);
        let total: u32 = hist.iter().sum();
        for (o, c) in out.iter_mut().zip(hist) {
            *o += f64::from(*c) / f64::from(total);
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features {
            return Err(Error::Validation(format!(
                "row has {} features, tree expects {}",
                row.len(),
                self.n_features
            )));
        }
        let mut out = vec![0.0; self.n_classes];
        self.accumulate_proba(row, &mut out);
        Ok(out)
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Node::depth).max().unwrap_or(0)
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    /// Check the growth constraints of `params` against the stored node statistics.
    pub fn check_constraints(&self, params: &ForestParams) -> std::result::Result<(), String> {
        for (i, node) in self.nodes.iter().enumerate() {
            if node.depth() > params.max_depth {
                return Err(format!("node {i} at depth {} > {}", node.depth(), params.max_depth));
            }
            if let Node::Split {
                left, right, n_samples, ..
            } = node
            {
                if *n_samples < params.min_samples_split {
                    return Err(format!("node {i} split with {n_samples} < min_samples_split"));
                }
                for child in [left, right] {
                    let n = self.nodes[*child].n_samples();
                    if n < params.min_samples_leaf {
                        return Err(format!("child {child} of node {i} holds {n} < min_samples_leaf"));
                    }
                }
                if self.nodes[*left].n_samples() + self.nodes[*right].n_samples() != *n_samples {
                    return Err(format!("node {i}: children do not partition its samples"));
                }
            }
        }
        Ok(())
    }
}

/// Column-major training table borrowed by tree growth.
pub(crate) struct TrainView<'a> {
    pub cols: &'a [f64],
    pub labels: &'a [usize],
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
}

impl<'a> TrainView<'a> {
    pub fn new(data: &'a Dataset, cols: &'a [f64]) -> Self {
        Self {
            cols,
            labels: data.labels(),
            n_samples: data.n_samples(),
            n_features: data.n_features(),
            n_classes: data.n_classes(),
        }
    }

    fn value(&self, row: usize, feature: usize) -> f64 {
        self.cols[feature * self.n_samples + row]
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    /// Σ left counts² / n_left + Σ right counts² / n_right; larger is purer.
    score: f64,
    n_left: usize,
}

struct Grower<'v, 'a> {
    view: &'v TrainView<'a>,
    params: &'v ForestParams,
    max_features: usize,
    n_root: f64,
    pairs: Vec<(f64, usize)>,
    left_counts: Vec<usize>,
    right_counts: Vec<usize>,
}

impl Grower<'_, '_> {
    fn counts(&self, rows: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.view.n_classes];
        for &r in rows {
            counts[self.view.labels[r]] += 1;
        }
        counts
    }

    fn best_split(&mut self, rows: &[usize], features: &[usize], parent: &[u32]) -> Option<BestSplit> {
        let n = rows.len();
        let min_leaf = self.params.min_samples_leaf;
        let mut best: Option<BestSplit> = None;
        for &f in features {
            self.pairs.clear();
            self.pairs
                .extend(rows.iter().map(|&r| (self.view.value(r, f), self.view.labels[r])));
            self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if self.pairs[0].0 == self.pairs[n - 1].0 {
                continue;
            }
            self.left_counts.iter_mut().for_each(|c| *c = 0);
            for (r, p) in self.right_counts.iter_mut().zip(parent) {
                *r = *p as usize;
            }
            let mut left_sq = 0.0f64;
            let mut right_sq: f64 = parent.iter().map(|c| f64::from(*c).powi(2)).sum();
            for i in 0..n - 1 {
                let y = self.pairs[i].1;
                left_sq += (2 * self.left_counts[y] + 1) as f64;
                right_sq -= (2 * self.right_counts[y] - 1) as f64;
                self.left_counts[y] += 1;
                self.right_counts[y] -= 1;
                let n_left = i + 1;
                if n_left < min_leaf {
                    continue;
                }
                if n - n_left < min_leaf {
                    break;
                }
                let (lo, hi) = (self.pairs[i].0, self.pairs[i + 1].0);
                if lo == hi {
                    continue;
                }
                let score = left_sq / n_left as f64 + right_sq / (n - n_left) as f64;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        score,
                        n_left,
                    });
                }
            }
        }
        best
    }
}

pub(crate) fn grow(view: &TrainView<'_>, params: &ForestParams, seed: u64) -> DecisionTree {
    let mut rng = rng_for(seed, 0);
    let rows: Vec<usize> = if params.bootstrap {
        (0..view.n_samples).map(|_| rng.random_range(0..view.n_samples)).collect()
    } else {
        (0..view.n_samples).collect()
    };
    let mut g = Grower {
        view,
        params,
        max_features: params.max_features.resolve(view.n_features),
        n_root: rows.len() as f64,
        pairs: Vec::with_capacity(rows.len()),
        left_counts: vec![0; view.n_classes],
        right_counts: vec![0; view.n_classes],
    };

    let mut nodes: Vec<Node> = Vec::new();
    let placeholder = || Node::Leaf {
        class_histogram: Vec::new(),
        n_samples: 0,
        depth: 0,
        impurity: 0.0,
    };
    nodes.push(placeholder());
    // (slot, rows, depth); popped depth-first, left child first
    let mut stack = vec![(0usize, rows, 0usize)];
    while let Some((slot, rows, depth)) = stack.pop() {
        let counts = g.counts(&rows);
        let n = rows.len();
        let impurity = gini_from_counts(&counts);
        let can_split = impurity > 0.0 && n >= params.min_samples_split && depth < params.max_depth;
        let split = if can_split {
            let mut features = index::sample(&mut rng, view.n_features, g.max_features).into_vec();
            features.sort_unstable();
            g.best_split(&rows, &features, &counts)
        } else {
            None
        };
        let Some(split) = split else {
            nodes[slot] = Node::Leaf {
                class_histogram: counts,
                n_samples: n,
                depth,
                impurity,
            };
            continue;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| view.value(r, split.feature) <= split.threshold);
        debug_assert_eq!(left_rows.len(), split.n_left);
        let child_impurity = |rows: &[usize]| gini_from_counts(&g.counts(rows)) * rows.len() as f64;
        let weighted_children = (child_impurity(&left_rows) + child_impurity(&right_rows)) / n as f64;
        let left = nodes.len();
        let right = left + 1;
        nodes.push(placeholder());
        nodes.push(placeholder());
        nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            n_samples: n,
            depth,
            impurity,
            impurity_decrease_weighted: n as f64 / g.n_root * (impurity - weighted_children),
        };
        stack.push((right, right_rows, depth + 1));
        stack.push((left, left_rows, depth + 1));
    }
    DecisionTree {
        nodes,
        n_features: view.n_features,
        n_classes: view.n_classes,
    }
}

/// Grow one CART tree on `data`; deterministic in `seed`.
pub fn fit_tree(data: &Dataset, params: &ForestParams, seed: u64) -> Result<DecisionTree> {
    params.validate()?;
    let cols = data.columns();
    Ok(grow(&TrainView::new(data, &cols), params, seed))
}
