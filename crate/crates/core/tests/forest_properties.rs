use esdgait::forest::{
    cross_validate, fit_forest, mdi_importance, Dataset, ForestParams, MaxFeatures, Node, RandomForestModel,
};
use esdgait::seed::rng_for;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn dataset(seed: u64, n: usize, d: usize, k: usize) -> Dataset {
    let mut rng = rng_for(seed, 0);
    let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    let rows = labels
        .iter()
        .map(|&y| {
            (0..d)
                .map(|j| if j == 0 { y as f64 + rng.random_range(-0.8..0.8) } else { rng.random_range(0.0..1.0) })
                .collect()
        })
        .collect();
    Dataset::new(
        rows,
        labels,
        (0..d).map(|j| format!("f{j}")).collect(),
        (0..k).map(|c| format!("c{c}")).collect(),
    )
    .unwrap()
}

fn small_params(seed: u64) -> ForestParams {
    ForestParams { n_estimators: 8, min_samples_split: 2, min_samples_leaf: 1, max_features: MaxFeatures::Sqrt, seed, ..Default::default() }
}

/// Tree structure without thresholds.
fn shape(model: &RandomForestModel) -> Vec<Vec<String>> {
    model
        .trees
        .iter()
        .map(|t| {
            t.nodes
                .iter()
                .map(|n| match n {
                    Node::Split { feature, left, right, n_samples, .. } => format!("s{feature}/{left}/{right}/{n_samples}"),
                    Node::Leaf { class_histogram, .. } => format!("l{class_histogram:?}"),
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_a_column_keeps_structure_and_predictions(
        seed in any::<u64>(),
        n in 12usize..60,
        d in 2usize..6,
        k in 2usize..4,
        column in 0usize..6,
        factor in 0.01f64..100.0,
    ) {
        let data = dataset(seed, n, d, k);
        let j = column % d;
        let scaled_rows: Vec<Vec<f64>> = data
            .rows()
            .map(|r| r.iter().enumerate().map(|(i, v)| if i == j { v * factor } else { *v }).collect())
            .collect();
        let scaled = Dataset::new(scaled_rows, data.labels().to_vec(), data.feature_names.clone(), data.class_names.clone()).unwrap();
        let params = small_params(seed);
        let a = fit_forest(&data, &params).unwrap();
        let b = fit_forest(&scaled, &params).unwrap();
        prop_assert_eq!(shape(&a), shape(&b));
        for i in 0..n {
            prop_assert_eq!(a.predict_proba(data.row(i)).unwrap(), b.predict_proba(scaled.row(i)).unwrap());
        }
    }

    #[test]
    fn permuting_class_ids_permutes_probabilities(
        seed in any::<u64>(),
        n in 12usize..60,
        k in 2usize..5,
    ) {
        let data = dataset(seed, n, 4, k);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng_for(seed, 9));
        let relabelled = Dataset::new(
            data.rows().map(<[f64]>::to_vec).collect(),
            data.labels().iter().map(|&y| perm[y]).collect(),
            data.feature_names.clone(),
            data.class_names.clone(),
        )
        .unwrap();
        let params = small_params(seed);
        let a = fit_forest(&data, &params).unwrap();
        let b = fit_forest(&relabelled, &params).unwrap();
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        for i in 0..n {
            let p = a.predict_proba(data.row(i)).unwrap();
            let q = b.predict_proba(data.row(i)).unwrap();
            for c in 0..k {
                prop_assert_eq!(p[c].to_bits(), q[perm[c]].to_bits());
            }
            let top = p.iter().cloned().fold(f64::MIN, f64::max);
            if p.iter().filter(|v| **v == top).count() == 1 {
                pa.push(perm[a.predict(data.row(i)).unwrap()]);
                pb.push(b.predict(data.row(i)).unwrap());
            }
        }
        prop_assert_eq!(pa, pb);
    }

    #[test]
    fn importances_are_a_distribution(seed in any::<u64>(), n in 12usize..60, d in 2usize..8) {
        let data = dataset(seed, n, d, 2);
        let model = fit_forest(&data, &small_params(seed)).unwrap();
        let imp = mdi_importance(&model).unwrap();
        prop_assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(imp.iter().all(|v| *v >= 0.0));
        let mut used = vec![false; d];
        for t in &model.trees {
            for node in &t.nodes {
                if let Node::Split { feature, .. } = node {
                    used[*feature] = true;
                }
            }
        }
        for (f, u) in used.iter().enumerate() {
            if !u {
                prop_assert_eq!(imp[f], 0.0);
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_agree_with_predict(seed in any::<u64>(), n in 12usize..50, k in 2usize..5) {
        let data = dataset(seed, n, 3, k);
        let model = fit_forest(&data, &small_params(seed)).unwrap();
        let mut rng = rng_for(seed, 3);
        for _ in 0..20 {
            let row: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..k as f64)).collect();
            let p = model.predict_proba(&row).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let top = p.iter().cloned().fold(f64::MIN, f64::max);
            let first = p.iter().position(|v| *v == top).unwrap();
            prop_assert_eq!(model.predict(&row).unwrap(), first);
        }
    }
}

#[test]
fn separable_data_scores_perfectly() {
    let rows: Vec<Vec<f64>> = (0..60).map(|i| vec![if i < 30 { i as f64 } else { 100.0 + i as f64 }, (i % 7) as f64]).collect();
    let labels = (0..60).map(|i| usize::from(i >= 30)).collect();
    let data = Dataset::new(rows, labels, vec!["a".into(), "b".into()], vec!["x".into(), "y".into()]).unwrap();
    let r = cross_validate(&data, &ForestParams { n_estimators: 10, ..Default::default() }, 10, 2).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert_eq!(r.cohens_kappa, 1.0);
    assert_eq!(r.auroc, 1.0);
}

#[test]
fn shuffled_labels_score_near_chance() {
    // 3 sigma binomial band around the modal rate
    for seed in 0..4u64 {
        let data = dataset(seed, 200, 6, 2);
        let mut labels = data.labels().to_vec();
        labels.shuffle(&mut rng_for(seed, 5));
        let noise = Dataset::new(
            data.rows().map(|r| r[1..].to_vec()).collect(),
            labels.clone(),
            (1..6).map(|j| format!("f{j}")).collect(),
            data.class_names.clone(),
        )
        .unwrap();
        let r = cross_validate(&noise, &ForestParams { n_estimators: 30, ..Default::default() }, 10, seed).unwrap();
        let counts = noise.class_counts();
        let p = *counts.iter().max().unwrap() as f64 / 200.0;
        let sigma = (p * (1.0 - p) / 200.0).sqrt();
        assert!(r.accuracy <= p + 3.0 * sigma, "seed {seed}: {} vs {p}", r.accuracy);
    }
}
