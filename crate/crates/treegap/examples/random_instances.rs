//! Generate reproducible random instances, write them through the text
//! format, and run the whole estimation pipeline on each.
//!
//! ```bash
//! cargo run -p treegap --example random_instances
//! ```

use treegap::io::{parse_tree, serialize_tree};
use treegap::{
    build_dirichlet_matrix, closed_form_bounds, lower_bound, smallest_eigenpair,
    sqrt_phi_function, tree::Branching, random_tree, DomainTag, Family, Measure,
};

fn main() {
    println!("seed  n   depth  closed-form bracket        sqrt-phi     exact");
    for seed in 1..=10u64 {
        let tree = random_tree(seed, 25, (0.1, 10.0), Branching::UniformAttachment).unwrap();

        // the text format round-trips bit-exactly
        let text = serialize_tree(&tree);
        let reparsed = parse_tree(&text).unwrap();
        assert_eq!(reparsed, tree);

        let measure = Measure::for_tree(&tree);
        let cf = closed_form_bounds(&tree, &measure);
        let sqrt_phi = sqrt_phi_function(&tree, &measure);
        let cert =
            lower_bound(&tree, &measure, &sqrt_phi, DomainTag::base(Family::FI).unwrap()).unwrap();
        let exact = smallest_eigenpair(&build_dirichlet_matrix(&tree, &measure)).unwrap();

        println!(
            "{seed:>4}  {:>2}  {:>5}  [{:.6}, {:.6}]   {:.6}    {:.6}",
            tree.vertex_count(),
            tree.max_layer(),
            cf.lower,
            cf.upper,
            cert.value,
            exact.lambda0
        );
        assert!(cf.lower <= exact.lambda0 && exact.lambda0 <= cf.upper);
        assert!(cert.value <= exact.lambda0);
    }
    println!("\nall brackets contain the exact value; one sample file:\n");
    let sample = random_tree(4, 8, (0.5, 2.0), Branching::UniformAttachment).unwrap();
    print!("{}", serialize_tree(&sample));
}
