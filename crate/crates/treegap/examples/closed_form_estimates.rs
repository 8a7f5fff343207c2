//! The closed-form two-sided estimate from subtree masses and accumulated
//! resistances: no eigensolve needed, and the two sides always differ by
//! the factor 2 * sup_c.
//!
//! ```bash
//! cargo run -p treegap --example closed_form_estimates
//! ```

use treegap::{
    build_dirichlet_matrix, closed_form_bounds, smallest_eigenpair, tree::tree_from_parents,
    tree::Branching, random_tree, Measure, RootedTree,
};

fn survey(label: &str, tree: &RootedTree) {
    let measure = Measure::for_tree(tree);
    let cf = closed_form_bounds(tree, &measure);
    let exact = smallest_eigenpair(&build_dirichlet_matrix(tree, &measure)).unwrap();
    println!("{label} ({} vertices, depth {})", tree.vertex_count(), tree.max_layer());
    println!(
        "  delta = {:.6} attained at vertex {}, sup_c = {}",
        cf.delta, cf.argmax_delta, cf.sup_c
    );
    println!(
        "  bracket [{:.9}, {:.9}], exact {:.9}",
        cf.lower, cf.upper, exact.lambda0
    );
    let position = (exact.lambda0 - cf.lower) / (cf.upper - cf.lower);
    println!("  exact sits {:.0}% of the way through the bracket\n", 100.0 * position);
}

fn main() {
    survey("unit star", &tree_from_parents(&[0, 1, 1], None).unwrap());
    survey("unit path", &tree_from_parents(&[0, 1, 2, 3, 4], None).unwrap());
    survey(
        "lopsided rates",
        &tree_from_parents(
            &[0, 1, 1, 3],
            Some(&[(0.2, 3.0), (5.0, 0.4), (1.0, 1.0), (2.5, 0.8)]),
        )
        .unwrap(),
    );
    for seed in [11, 12, 13] {
        let tree = random_tree(seed, 30, (0.1, 10.0), Branching::UniformAttachment).unwrap();
        survey(&format!("random tree, seed {seed}"), &tree);
    }
}
