//! Truncate a tree at successive layers. Each level absorbs everything
//! beyond the layer into the boundary vertices, rescaling their up-rates
//! so the measure-rate products survive; the eigenvalues decrease level by
//! level and land exactly on the full tree's value.
//!
//! Each level also hands back an upper-bound witness for the full tree:
//! extend the truncated eigenfunction flat past the boundary.
//!
//! ```bash
//! cargo run -p treegap --example collapse_ladder
//! ```

use treegap::{
    build_dirichlet_matrix, flat_extension, lambda0_sequence, smallest_eigenpair,
    tree::Branching, random_tree, upper_bound, DomainTag, Family, Measure,
};

fn main() {
    let tree = random_tree(2024, 40, (0.25, 4.0), Branching::UniformAttachment).unwrap();
    let measure = Measure::for_tree(&tree);
    let exact = smallest_eigenpair(&build_dirichlet_matrix(&tree, &measure)).unwrap();
    println!(
        "random tree: {} vertices, depth {}, exact lambda0 = {:.12}\n",
        tree.vertex_count(),
        tree.max_layer(),
        exact.lambda0
    );

    let layers: Vec<usize> = (1..=tree.max_layer()).collect();
    let ladder = lambda0_sequence(&tree, &measure, &layers).unwrap();

    println!("level  vertices  lambda0(level)   excess over exact");
    for level in &ladder {
        println!(
            "{:>5}  {:>8}  {:.12}   {:+.3e}",
            level.m,
            level.collapsed.tree.vertex_count(),
            level.lambda0,
            level.lambda0 - exact.lambda0
        );
    }

    println!("\nflat-extended truncated eigenfunctions certify upper bounds:");
    for level in ladder.iter().take(3) {
        let extended = flat_extension(&tree, &level.collapsed, &level.pair).unwrap();
        let tag = DomainTag::modified(Family::FIMod, level.m).unwrap();
        let cert = upper_bound(&tree, &measure, &extended, tag).unwrap();
        println!(
            "  level {}: certified lambda0 <= {:.12} (tight to the level by {:.1e})",
            level.m,
            cert.value,
            (cert.value - level.lambda0).abs()
        );
    }
}
