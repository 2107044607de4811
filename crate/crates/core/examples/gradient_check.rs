//! Compares analytic gradients of both models with central finite
//! differences on small random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use socvar::models::{
    gradient_check, CnnExample, CnnModel, CnnObjective, CnnShape, LrModel, LrObjective, SparseVec, TrainConfig,
};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let n_features = 6;
    let params = (0..4 * n_features + 4).map(|_| rng.random_range(-0.5..0.5)).collect();
    let lr = LrModel::from_params(n_features, params).expect("sized parameters");
    let docs: Vec<(SparseVec, usize)> = vec![(vec![(0, 1.0), (3, 2.0)], 1), (vec![(1, 1.0), (5, 3.0)], 3)];
    let r = gradient_check(
        &LrObjective {
            model: &lr,
            batch: docs.iter().map(|(x, y)| (x, *y)).collect(),
            l2: 0.01,
        },
        1e-5,
    );
    println!(
        "LR : {} parameters, max relative error {:.2e}",
        4 * n_features + 4,
        r.max_relative_error
    );

    let config = TrainConfig {
        d_emb: 4,
        n_filters: 3,
        window: 2,
        d_hidden: 3,
        dropout: 0.0,
        ..Default::default()
    };
    let seqs: [&[u32]; 2] = [&[1, 2, 3, 4, 5], &[5, 5, 0, 2]];
    let batch: Vec<CnnExample> = vec![(seqs[0], 0, None), (seqs[1], 2, None)];
    // ReLU is not differentiable at 0; pick an initialisation whose
    // pre-activations stay clear of it.
    let cnn = (0..500)
        .map(|s| CnnModel::init(CnnShape::new(6, &config), &mut ChaCha8Rng::seed_from_u64(s)))
        .find(|m| {
            seqs.iter()
                .all(|s| m.forward(s, None).unwrap().min_relu_margin() > 1e-3)
        })
        .expect("an initialisation away from ReLU kinks");
    let r = gradient_check(
        &CnnObjective {
            model: &cnn,
            batch,
            l2: 0.01,
        },
        1e-5,
    );
    println!(
        "CNN: {} parameters, max relative error {:.2e} at index {} (analytic {:.6}, numeric {:.6})",
        cnn.shape.n_params(),
        r.max_relative_error,
        r.worst_index,
        r.analytic,
        r.numeric
    );
}
