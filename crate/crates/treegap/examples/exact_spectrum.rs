//! Solve the Dirichlet eigenproblem exactly on a small tree and check the
//! answer against the dense reference solver.
//!
//! ```bash
//! cargo run -p treegap --example exact_spectrum
//! ```

use treegap::{
    build_dirichlet_matrix, dense_reference_solve, smallest_eigenpair, tree::tree_from_parents,
    Measure,
};

fn main() {
    // A tree with two branch points:
    //
    //        0
    //        |
    //        1
    //       / \
    //      2   3
    //     / \   \
    //    4   5   6
    let tree = tree_from_parents(
        &[0, 1, 1, 2, 2, 3],
        Some(&[(1.0, 2.0), (2.0, 1.0), (1.0, 1.0), (0.5, 1.5), (2.0, 2.0), (1.0, 0.5)]),
    )
    .unwrap();
    let measure = Measure::for_tree(&tree);

    println!("tree on {} vertices, max layer {}", tree.vertex_count(), tree.max_layer());
    for v in 1..tree.vertex_count() {
        println!(
            "  vertex {v}: parent {}, layer {}, rates up {} / down {}, mu {:.4}",
            tree.parent(v).unwrap(),
            tree.layer(v),
            tree.rate_up(v),
            tree.rate_down(v),
            measure.mu(v)
        );
    }

    let matrix = build_dirichlet_matrix(&tree, &measure);
    let pair = smallest_eigenpair(&matrix).unwrap();
    println!("\nlambda0  = {:.12}", pair.lambda0);
    println!("residual = {:.3e}", pair.residual);

    println!("\neigenfunction (sup-normalized, strictly increasing along edges):");
    for v in 0..tree.vertex_count() {
        println!("  g({v}) = {:.12}", pair.g.get(v));
    }

    let spectrum = dense_reference_solve(&matrix).unwrap();
    println!("\nfull spectrum from the dense cross-check:");
    for (k, ev) in spectrum.iter().enumerate() {
        println!("  lambda_{k} = {ev:.12}");
    }
    let gap = (pair.lambda0 - spectrum[0]).abs() / pair.lambda0;
    println!("\nsparse vs dense relative difference: {gap:.2e}");
}
