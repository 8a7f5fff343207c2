//! Membership checks for all six witness families, including the
//! flat-tail (modified) ones used for upper bounds, with the exact
//! condition reported on rejection.
//!
//! ```bash
//! cargo run -p treegap --example witness_check
//! ```

use treegap::{check_domain, tree::tree_from_parents, DomainTag, Family, VertexFunction};

fn main() {
    let tree = tree_from_parents(&[0, 1, 1], None).unwrap();
    let inf = f64::INFINITY;

    let cases: Vec<(&str, VertexFunction, DomainTag)> = vec![
        (
            "strictly increasing",
            VertexFunction::new(vec![0.0, 1.0, 2.0, 2.5]),
            DomainTag::base(Family::FI).unwrap(),
        ),
        (
            "flat on one edge",
            VertexFunction::new(vec![0.0, 1.0, 1.0, 2.5]),
            DomainTag::base(Family::FI).unwrap(),
        ),
        (
            "positive but wiggly",
            VertexFunction::new(vec![0.0, 2.0, 1.0, 3.0]),
            DomainTag::base(Family::FII).unwrap(),
        ),
        (
            "edge ratios above 1",
            VertexFunction::new(vec![inf, inf, 1.4, 1.9]),
            DomainTag::base(Family::W).unwrap(),
        ),
        (
            "ratio dips to 1",
            VertexFunction::new(vec![inf, inf, 1.0, 1.9]),
            DomainTag::base(Family::W).unwrap(),
        ),
        (
            "increasing then flat",
            VertexFunction::new(vec![0.0, 1.0, 1.0, 1.0]),
            DomainTag::modified(Family::FIMod, 1).unwrap(),
        ),
        (
            "tail not flat",
            VertexFunction::new(vec![0.0, 1.0, 1.0, 2.0]),
            DomainTag::modified(Family::FIMod, 1).unwrap(),
        ),
        (
            "ratio with unit tail and margin",
            VertexFunction::new(vec![inf, 2.0, 1.0, 1.0]),
            DomainTag::modified(Family::WMod, 1).unwrap(),
        ),
        (
            "ratio tail sticks out",
            VertexFunction::new(vec![inf, 2.0, 1.0, 1.3]),
            DomainTag::modified(Family::WMod, 1).unwrap(),
        ),
    ];

    for (label, witness, tag) in cases {
        let check = check_domain(&tree, &witness, &tag);
        if check.passed {
            println!("{label:<32} {tag:<10} -> admissible");
        } else {
            let v = check.violation.unwrap();
            println!(
                "{label:<32} {tag:<10} -> rejected at vertex {}: {}",
                v.vertex, v.condition
            );
        }
    }
}
