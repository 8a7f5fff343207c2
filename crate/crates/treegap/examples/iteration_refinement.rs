//! Refine a crude witness by pushing it through the Green operator.
//! Every step yields both a lower and an upper certificate, and the pinch
//! tightens toward the eigenvalue as the iterates approach the
//! eigenfunction.
//!
//! ```bash
//! cargo run -p treegap --example iteration_refinement
//! ```

use treegap::{
    build_dirichlet_matrix, iterate_ii, smallest_eigenpair, tree::Branching, random_tree,
    Measure, VertexFunction,
};

fn main() {
    let tree = random_tree(99, 35, (0.1, 10.0), Branching::UniformAttachment).unwrap();
    let measure = Measure::for_tree(&tree);
    let exact = smallest_eigenpair(&build_dirichlet_matrix(&tree, &measure)).unwrap();
    println!(
        "random tree: {} vertices, exact lambda0 = {:.12}\n",
        tree.vertex_count(),
        exact.lambda0
    );

    let start = VertexFunction::constant_one(tree.vertex_count());
    let trace = iterate_ii(&tree, &measure, &start, 60).unwrap();

    println!("step   lower bound       upper bound       width");
    for (k, step) in trace.iter().enumerate() {
        let width = step.upper.value - step.lower.value;
        if k < 10 || (k + 1) % 10 == 0 {
            println!(
                "{:>4}   {:.12}   {:.12}   {:.3e}",
                k + 1,
                step.lower.value,
                step.upper.value,
                width
            );
        }
    }

    let last = trace.last().unwrap();
    println!(
        "\nafter {} steps: lower off by {:.3e}, upper off by {:.3e}",
        trace.len(),
        exact.lambda0 - last.lower.value,
        last.upper.value - exact.lambda0
    );
    let reached = trace
        .iter()
        .position(|s| (s.lower.value - exact.lambda0).abs() <= 1e-6 * exact.lambda0)
        .map(|k| k + 1);
    match reached {
        Some(k) => println!("lower bound entered the 1e-6 band at step {k}"),
        None => println!("lower bound did not reach the 1e-6 band in {} steps", trace.len()),
    }
}
