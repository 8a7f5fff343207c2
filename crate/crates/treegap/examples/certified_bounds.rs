//! Turn test functions into certified one-sided bounds.
//!
//! Any function that is strictly increasing along edges (family F_I),
//! strictly positive (F_II), or an edge-ratio function above 1 (W) gives a
//! rigorous lower bound on the eigenvalue. The eigenfunction itself makes
//! every bound sharp.
//!
//! ```bash
//! cargo run -p treegap --example certified_bounds
//! ```

use treegap::{
    build_dirichlet_matrix, eigen_ratio, lower_bound, smallest_eigenpair, sqrt_phi_function,
    tree::tree_from_parents, DomainTag, Family, Measure, VertexFunction,
};

fn main() {
    // the unit-rate star: 0 - 1 - {2, 3}
    let tree = tree_from_parents(&[0, 1, 1], None).unwrap();
    let measure = Measure::for_tree(&tree);
    let exact = smallest_eigenpair(&build_dirichlet_matrix(&tree, &measure)).unwrap();
    println!("exact lambda0 = {:.12}\n", exact.lambda0);

    // 1. the square root of the accumulated resistance is always admissible
    let sqrt_phi = sqrt_phi_function(&tree, &measure);
    let cert = lower_bound(&tree, &measure, &sqrt_phi, DomainTag::base(Family::FI).unwrap()).unwrap();
    println!("sqrt-phi witness {:?}", sqrt_phi.values());
    println!(
        "  F_I lower bound {:.12} (binding at vertex {})",
        cert.value, cert.extremal_vertex
    );
    println!("  slack to exact: {:.3e}\n", exact.lambda0 - cert.value);

    // 2. a hand-picked positive function through the double-summation form
    let guess = VertexFunction::new(vec![0.0, 1.0, 1.5, 1.5]);
    let cert = lower_bound(&tree, &measure, &guess, DomainTag::base(Family::FII).unwrap()).unwrap();
    println!("hand-picked witness {:?}", guess.values());
    println!("  F_II lower bound {:.12}", cert.value);
    println!("  per-vertex evaluations: {:?}\n", &cert.per_vertex[1..]);

    // 3. the eigenfunction's edge ratios make the difference form sharp
    let ratio = eigen_ratio(&tree, &exact).unwrap();
    let cert = lower_bound(&tree, &measure, &ratio, DomainTag::base(Family::W).unwrap()).unwrap();
    println!("eigen-ratio witness {:?}", ratio.values());
    println!("  W lower bound {:.12}", cert.value);
    println!("  matches exact to {:.3e}", (cert.value - exact.lambda0).abs());

    // 4. an inadmissible witness is rejected with the violated condition
    let bad = VertexFunction::new(vec![0.0, 1.0, 1.0, 2.0]);
    match lower_bound(&tree, &measure, &bad, DomainTag::base(Family::FI).unwrap()) {
        Err(err) => println!("\nflat witness rejected: {err}"),
        Ok(_) => unreachable!(),
    }
}
