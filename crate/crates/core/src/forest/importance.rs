use crate::error::{Error, Result};

use super::ensemble::RandomForestModel;
use super::tree::Node;

/// Mean decrease in impurity. Each split adds its sample-weighted impurity
/// decrease to its feature; every tree's vector is normalized to sum 1, then
/// the vectors of trees with at least one split are averaged.
pub fn mdi_importance(model: &RandomForestModel) -> Result<Vec<f64>> {
    let d = model.n_features();
    let mut total = vec![0.0; d];
    let mut contributing = 0usize;
    for tree in &model.trees {
        let mut per_tree = vec![0.0; d];
        for node in &tree.nodes {
            if let Node::Split {
                feature,
                impurity_decrease_weighted,
                ..
            } = node
            {
                per_tree[*feature] += impurity_decrease_weighted;
            }
        }
        let sum: f64 = per_tree.iter().sum();
        if sum > 0.0 {
            contributing += 1;
            for (t, v) in total.iter_mut().zip(&per_tree) {
                *t += v / sum;
            }
        }
    }
    if contributing == 0 {
        return Err(Error::UndefinedImportance);
    }
    let n = contributing as f64;
    Ok(total.into_iter().map(|v| v / n).collect())
}
