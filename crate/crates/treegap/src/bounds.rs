//! Certified one-sided bounds on the first Dirichlet eigenvalue, the
//! closed-form two-sided estimate, and the Green-operator refinement
//! iteration.
//!
//! A certificate records the witness function, the family it was checked
//! against, every per-vertex operator evaluation, and the extremal vertex
//! that produced the bound. Lower bounds come from the base families,
//! upper bounds from the modified (flat-tail) families.

use crate::error::{Error, Result};
use crate::func::{check_domain, DomainTag, Family, VertexFunction};
use crate::ops::{green_apply, op_i_all, op_ii_all, op_r, op_r_mod, subtree_weighted_sums};
use crate::tree::{Measure, RootedTree};

/// Accumulated resistance along the root path:
/// `phi(j) = sum over k on the path of 1 / (mu(k) rate_up(k))`.
/// Slot 0 is zero.
pub fn phi(tree: &RootedTree, measure: &Measure) -> Vec<f64> {
    let n = tree.vertex_count();
    let mut out = vec![0.0; n];
    for &v in tree.preorder().iter().skip(1) {
        let p = tree.parent(v).unwrap();
        out[v] = out[p] + 1.0 / (measure.mu(v) * tree.rate_up(v));
    }
    out
}

/// The closed-form two-sided estimate: `delta` is the largest product of
/// subtree mass and accumulated resistance, and the branching count caps
/// the gap between the two sides at `2 * sup_c`.
#[derive(Debug, Clone)]
pub struct ClosedFormBounds {
    pub delta: f64,
    pub sup_c: i64,
    pub lower: f64,
    pub upper: f64,
    pub phi: Vec<f64>,
    pub branching_count: Vec<i64>,
    pub argmax_delta: usize,
}

/// Compute `delta`, the per-vertex branching counts
/// `C(i) = 1 + |J(i)| + sum over s in J(i), k in subtree(s) of (|J(k)| - 1)`
/// (empty sums are zero), and the bounds `1/(2 sup_c delta)` and `1/delta`.
pub fn closed_form_bounds(tree: &RootedTree, measure: &Measure) -> ClosedFormBounds {
    let n = tree.vertex_count();
    let phi = phi(tree, measure);
    let mut delta = f64::MIN;
    let mut argmax_delta = 1;
    for v in 1..n {
        let p = measure.subtree_mass(v) * phi[v];
        if p > delta {
            delta = p;
            argmax_delta = v;
        }
    }
    // deficit(v) = sum over the subtree of v of (|J(k)| - 1)
    let mut deficit = vec![0i64; n];
    for &v in tree.preorder().iter().rev() {
        deficit[v] = tree.children(v).len() as i64 - 1;
        for &c in tree.children(v) {
            deficit[v] += deficit[c];
        }
    }
    let mut branching_count = vec![0i64; n];
    for v in 0..n {
        let mut c = 1 + tree.children(v).len() as i64;
        for &s in tree.children(v) {
            c += deficit[s];
        }
        branching_count[v] = c;
    }
    let sup_c = branching_count[1..].iter().copied().max().unwrap_or(1);
    ClosedFormBounds {
        delta,
        sup_c,
        lower: 1.0 / (2.0 * sup_c as f64 * delta),
        upper: 1.0 / delta,
        phi,
        branching_count,
        argmax_delta,
    }
}

/// The square root of the accumulated resistance, zero at the root. Each
/// resistance increment is strictly positive, so the result is strictly
/// increasing along every edge.
pub fn sqrt_phi_function(tree: &RootedTree, measure: &Measure) -> VertexFunction {
    let values = phi(tree, measure).iter().map(|&p| p.sqrt()).collect();
    VertexFunction::new(values)
}

/// The witness concentrated on one root path: the accumulated resistance
/// on the path of `i0`, its value at `i0` across the whole subtree of
/// `i0`, and zero elsewhere.
pub fn path_indicator_function(
    tree: &RootedTree,
    measure: &Measure,
    i0: usize,
) -> Result<VertexFunction> {
    if i0 == 0 {
        return Err(Error::RootNotInDomain);
    }
    let phi = phi(tree, measure);
    let mut values = vec![0.0; tree.vertex_count()];
    for v in tree.path_to_root(i0)? {
        values[v] = phi[v];
    }
    for v in tree.subtree(i0) {
        values[v] = phi[i0];
    }
    Ok(VertexFunction::new(values))
}

/// Evaluate the single-summation operator on the path witness of `i0`,
/// taking the infimum over the vertices with strictly positive increment
/// (exactly the root path of `i0`; elsewhere the witness is flat or
/// drops to zero and is excluded). The result is the product of the
/// subtree mass and the accumulated resistance at `i0`.
pub fn path_indicator_value(tree: &RootedTree, measure: &Measure, i0: usize) -> Result<f64> {
    let f = path_indicator_function(tree, measure, i0)?;
    let s = subtree_weighted_sums(tree, measure, &f);
    let mut inf = f64::INFINITY;
    for v in 1..tree.vertex_count() {
        let p = tree.parent(v).unwrap();
        let inc = f.get(v) - f.get(p);
        if inc > 0.0 {
            inf = inf.min(s[v] / (measure.mu(v) * tree.rate_up(v) * inc));
        }
    }
    Ok(inf)
}

/// The largest path-witness value over all vertices; recovers `delta`
/// through the operator pipeline instead of the direct product.
pub fn path_indicator_delta(tree: &RootedTree, measure: &Measure) -> f64 {
    (1..tree.vertex_count())
        .map(|i0| path_indicator_value(tree, measure, i0).unwrap())
        .fold(f64::MIN, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

/// A one-sided bound on the eigenvalue together with everything needed to
/// audit it: the witness, its family, the raw per-vertex operator
/// evaluations (slot 0 meaningless), and the vertex where the bound is
/// attained.
#[derive(Debug, Clone)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub tag: DomainTag,
    pub value: f64,
    pub witness: VertexFunction,
    pub per_vertex: Vec<f64>,
    pub extremal_vertex: usize,
}

fn reciprocal(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else {
        1.0 / x
    }
}

/// Certify a lower bound from a base-family witness: the infimum over
/// non-root vertices of the reciprocal operator evaluations (of the
/// evaluations themselves for the ratio family).
pub fn lower_bound(
    tree: &RootedTree,
    measure: &Measure,
    witness: &VertexFunction,
    tag: DomainTag,
) -> Result<BoundCertificate> {
    if tag.family.is_modified() {
        return Err(Error::DegenerateParams(format!(
            "family {} certifies upper bounds",
            tag.family
        )));
    }
    check_domain(tree, witness, &tag).require(tag.family)?;
    let n = tree.vertex_count();
    let per_vertex = match tag.family {
        Family::FI => op_i_all(tree, measure, witness)?,
        Family::FII => op_ii_all(tree, measure, witness)?,
        Family::W => {
            let mut vals = vec![f64::NAN; n];
            for v in 1..n {
                vals[v] = op_r(tree, witness, v)?;
            }
            vals
        }
        _ => unreachable!(),
    };
    let mut value = f64::INFINITY;
    let mut extremal_vertex = 1;
    for v in 1..n {
        let bound = match tag.family {
            Family::W => per_vertex[v],
            _ => reciprocal(per_vertex[v]),
        };
        if bound < value {
            value = bound;
            extremal_vertex = v;
        }
    }
    Ok(BoundCertificate {
        kind: BoundKind::Lower,
        tag,
        value,
        witness: witness.clone(),
        per_vertex,
        extremal_vertex,
    })
}

/// Certify an upper bound from a modified-family witness: the supremum
/// over non-root vertices, with infinite evaluations on the flat tail
/// mapping to reciprocal zero and never affecting the supremum.
pub fn upper_bound(
    tree: &RootedTree,
    measure: &Measure,
    witness: &VertexFunction,
    tag: DomainTag,
) -> Result<BoundCertificate> {
    if !tag.family.is_modified() {
        return Err(Error::DegenerateParams(format!(
            "family {} certifies lower bounds",
            tag.family
        )));
    }
    check_domain(tree, witness, &tag).require(tag.family)?;
    let n = tree.vertex_count();
    let cutoff = tag.cutoff.unwrap();
    let per_vertex = match tag.family {
        Family::FIMod => op_i_all(tree, measure, witness)?,
        Family::FIIMod => op_ii_all(tree, measure, witness)?,
        Family::WMod => {
            let mut vals = vec![f64::NAN; n];
            for v in 1..n {
                vals[v] = op_r_mod(tree, measure, witness, cutoff, v)?;
            }
            vals
        }
        _ => unreachable!(),
    };
    let mut value = f64::MIN;
    let mut extremal_vertex = 1;
    for v in 1..n {
        let bound = match tag.family {
            Family::WMod => per_vertex[v],
            _ => reciprocal(per_vertex[v]),
        };
        if bound > value {
            value = bound;
            extremal_vertex = v;
        }
    }
    Ok(BoundCertificate {
        kind: BoundKind::Upper,
        tag,
        value,
        witness: witness.clone(),
        per_vertex,
        extremal_vertex,
    })
}

/// One step of the refinement iteration: the new function, a lower
/// certificate and an upper certificate evaluated on it.
#[derive(Debug, Clone)]
pub struct IterationStep {
    pub function: VertexFunction,
    pub lower: BoundCertificate,
    pub upper: BoundCertificate,
}

/// Repeatedly push a positive function through the Green operator,
/// renormalizing to sup-norm 1. Each iterate is strictly increasing along
/// edges, so both a lower and an upper certificate come out of each step;
/// the two pinch the eigenvalue as the iterates approach the
/// eigenfunction. Convergence is observed, not guaranteed.
pub fn iterate_ii(
    tree: &RootedTree,
    measure: &Measure,
    f0: &VertexFunction,
    steps: usize,
) -> Result<Vec<IterationStep>> {
    if steps == 0 {
        return Err(Error::DegenerateParams("iteration needs at least one step".into()));
    }
    let fii = DomainTag::base(Family::FII)?;
    check_domain(tree, f0, &fii).require(Family::FII)?;
    let flat_tail = DomainTag::modified(Family::FIIMod, tree.max_layer())?;
    let mut current = f0.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut next = green_apply(tree, measure, &current);
        next[0] = 0.0;
        let mut next = VertexFunction::new(next);
        let norm = next.sup_norm();
        next = next.scaled(1.0 / norm);
        let lower = lower_bound(tree, measure, &next, fii)?;
        let upper = upper_bound(tree, measure, &next, flat_tail)?;
        out.push(IterationStep { function: next.clone(), lower, upper });
        current = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{build_dirichlet_matrix, smallest_eigenpair};
    use crate::tree::{random_tree, tree_from_parents, Branching};

    fn star() -> (RootedTree, Measure) {
        let t = tree_from_parents(&[0, 1, 1], None).unwrap();
        let m = Measure::for_tree(&t);
        (t, m)
    }

    fn path3() -> (RootedTree, Measure) {
        let t = tree_from_parents(&[0, 1], None).unwrap();
        let m = Measure::for_tree(&t);
        (t, m)
    }

    #[test]
    fn phi_fixtures() {
        let (t, m) = star();
        assert_eq!(phi(&t, &m), vec![0.0, 1.0, 2.0, 2.0]);
        let (t, m) = path3();
        assert_eq!(phi(&t, &m), vec![0.0, 1.0, 2.0]);
        // mu(1) rate_up(1) = rate_down(1) = 4
        let t = tree_from_parents(&[0], Some(&[(1.0, 4.0)])).unwrap();
        let m = Measure::for_tree(&t);
        assert_eq!(phi(&t, &m)[1], 0.25);
    }

    #[test]
    fn closed_form_star() {
        let (t, m) = star();
        let cf = closed_form_bounds(&t, &m);
        assert_eq!(cf.delta, 3.0);
        assert_eq!(cf.argmax_delta, 1);
        assert_eq!(&cf.branching_count[1..], &[1, 1, 1]);
        assert_eq!(cf.sup_c, 1);
        assert!((cf.lower - 1.0 / 6.0).abs() < 1e-15);
        assert!((cf.upper - 1.0 / 3.0).abs() < 1e-15);
        let lam = 2.0 - 3.0f64.sqrt();
        assert!(cf.lower <= lam && lam <= cf.upper);
    }

    #[test]
    fn closed_form_path() {
        let (t, m) = path3();
        let cf = closed_form_bounds(&t, &m);
        assert_eq!(cf.delta, 2.0);
        assert_eq!(cf.sup_c, 1);
        assert!((cf.lower - 0.25).abs() < 1e-15);
        assert!((cf.upper - 0.5).abs() < 1e-15);
        let lam = (3.0 - 5.0f64.sqrt()) / 2.0;
        assert!(cf.lower <= lam && lam <= cf.upper);
    }

    #[test]
    fn closed_form_single_edge() {
        for (a, b) in [(0.5, 1.0), (1.0, 2.0), (3.0, 0.4)] {
            let t = tree_from_parents(&[0], Some(&[(a, b)])).unwrap();
            let m = Measure::for_tree(&t);
            let cf = closed_form_bounds(&t, &m);
            assert!((cf.delta - 1.0 / a).abs() < 1e-15);
            assert!((cf.lower - a / 2.0).abs() < 1e-15 * a);
            assert!((cf.upper - a).abs() < 1e-15 * a);
        }
    }

    #[test]
    fn sqrt_phi_star() {
        let (t, m) = star();
        let f = sqrt_phi_function(&t, &m);
        let s2 = 2.0f64.sqrt();
        assert_eq!(f.values(), &[0.0, 1.0, s2, s2]);
        let tag = DomainTag::base(Family::FI).unwrap();
        assert!(check_domain(&t, &f, &tag).passed);
    }

    #[test]
    fn sqrt_phi_always_admissible() {
        let tag = DomainTag::base(Family::FI).unwrap();
        for seed in 0..15u64 {
            let t = random_tree(seed, 40, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let f = sqrt_phi_function(&t, &m);
            assert!(check_domain(&t, &f, &tag).passed, "seed {seed}");
        }
    }

    #[test]
    fn path_indicator_star() {
        let (t, m) = star();
        let f = path_indicator_function(&t, &m, 2).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 2.0, 0.0]);
        let v = path_indicator_value(&t, &m, 2).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn path_indicator_path() {
        let (t, m) = path3();
        let f = path_indicator_function(&t, &m, 2).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 2.0]);
        let v = path_indicator_value(&t, &m, 2).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert!((path_indicator_delta(&t, &m) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn path_indicator_at_roots_son_floods_subtree() {
        let (t, m) = star();
        let f = path_indicator_function(&t, &m, 1).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            path_indicator_function(&t, &m, 0),
            Err(Error::RootNotInDomain)
        ));
    }

    #[test]
    fn delta_recovered_through_operator_pipeline() {
        for seed in 0..25u64 {
            let t = random_tree(seed, 40, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let cf = closed_form_bounds(&t, &m);
            let via_ops = path_indicator_delta(&t, &m);
            assert!(
                (via_ops - cf.delta).abs() <= 1e-12 * cf.delta,
                "seed {seed}: {via_ops} vs {}",
                cf.delta
            );
        }
    }

    #[test]
    fn lower_bound_sqrt_phi_star() {
        let (t, m) = star();
        let f = sqrt_phi_function(&t, &m);
        let cert = lower_bound(&t, &m, &f, DomainTag::base(Family::FI).unwrap()).unwrap();
        let want = 1.0 / (1.0 + 2.0 * 2.0f64.sqrt());
        assert!((cert.value - want).abs() < 1e-12);
        assert_eq!(cert.extremal_vertex, 1);
        assert!(cert.value <= 2.0 - 3.0f64.sqrt());
    }

    #[test]
    fn lower_bound_eigen_ratio_is_sharp() {
        let (t, m) = star();
        let g2 = (1.0 + 3.0f64.sqrt()) / 2.0;
        let w = VertexFunction::new(vec![f64::INFINITY, f64::INFINITY, g2, g2]);
        let cert = lower_bound(&t, &m, &w, DomainTag::base(Family::W).unwrap()).unwrap();
        assert!((cert.value - (2.0 - 3.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_eigenfunction_is_sharp() {
        let (t, m) = path3();
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        let g = VertexFunction::new(vec![0.0, 1.0, golden]);
        let cert = lower_bound(&t, &m, &g, DomainTag::base(Family::FI).unwrap()).unwrap();
        let lam = (3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((cert.value - lam).abs() < 1e-10);
    }

    #[test]
    fn lower_bound_rejects_bad_witness() {
        let (t, m) = star();
        let f = VertexFunction::new(vec![0.0, 1.0, 1.0, 2.0]);
        let err = lower_bound(&t, &m, &f, DomainTag::base(Family::FI).unwrap());
        assert!(matches!(err, Err(Error::DomainViolation { vertex: 2, .. })));
    }

    #[test]
    fn upper_bound_flat_extension_star() {
        let (t, m) = star();
        let f = VertexFunction::new(vec![0.0, 1.0, 1.0, 1.0]);
        let tag = DomainTag::modified(Family::FIMod, 1).unwrap();
        let cert = upper_bound(&t, &m, &f, tag).unwrap();
        assert!((cert.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cert.extremal_vertex, 1);
        assert_eq!(cert.per_vertex[2], f64::INFINITY);
    }

    #[test]
    fn upper_bound_ratio_star() {
        let (t, m) = star();
        let w = VertexFunction::new(vec![f64::INFINITY, f64::INFINITY, 1.0, 1.0]);
        let tag = DomainTag::modified(Family::WMod, 1).unwrap();
        let cert = upper_bound(&t, &m, &w, tag).unwrap();
        assert!((cert.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn upper_bound_full_cutoff_eigenfunction() {
        let (t, m) = path3();
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        let g = VertexFunction::new(vec![0.0, 1.0, golden]);
        let tag = DomainTag::modified(Family::FIMod, 2).unwrap();
        let cert = upper_bound(&t, &m, &g, tag).unwrap();
        let lam = (3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((cert.value - lam).abs() < 1e-10);
    }

    #[test]
    fn iterate_one_step_star() {
        let (t, m) = star();
        let f0 = VertexFunction::constant_one(4);
        let steps = iterate_ii(&t, &m, &f0, 1).unwrap();
        let f1 = &steps[0].function;
        // the unnormalized iterate is (0, 3, 4, 4)
        assert!((f1.get(1) - 0.75).abs() < 1e-15);
        assert_eq!(f1.get(2), 1.0);
        assert_eq!(f1.get(3), 1.0);
        assert!((steps[0].lower.value - 1.0 / 3.75).abs() < 1e-12);
        let lam = 2.0 - 3.0f64.sqrt();
        assert!(steps[0].lower.value <= lam && lam <= steps[0].upper.value);
    }

    #[test]
    fn iterate_fixed_point_at_eigenfunction() {
        let (t, m) = star();
        let pair = smallest_eigenpair(&build_dirichlet_matrix(&t, &m)).unwrap();
        let steps = iterate_ii(&t, &m, &pair.g, 2).unwrap();
        for s in &steps {
            assert!((s.lower.value - pair.lambda0).abs() < 1e-9);
            assert!((s.upper.value - pair.lambda0).abs() < 1e-9);
        }
    }

    #[test]
    fn iterate_rejects_zero_steps_and_bad_start() {
        let (t, m) = star();
        let f0 = VertexFunction::constant_one(4);
        assert!(matches!(
            iterate_ii(&t, &m, &f0, 0),
            Err(Error::DegenerateParams(_))
        ));
        let bad = VertexFunction::new(vec![0.0, 1.0, -1.0, 1.0]);
        assert!(matches!(
            iterate_ii(&t, &m, &bad, 1),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn iterate_lower_values_stay_below_eigenvalue() {
        for seed in 0..10u64 {
            let t = random_tree(seed, 30, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let pair = smallest_eigenpair(&build_dirichlet_matrix(&t, &m)).unwrap();
            let f0 = VertexFunction::constant_one(t.vertex_count());
            let steps = iterate_ii(&t, &m, &f0, 25).unwrap();
            let mut last = 0.0;
            for s in &steps {
                assert!(s.lower.value <= pair.lambda0 * (1.0 + 1e-10), "seed {seed}");
                assert!(s.upper.value >= pair.lambda0 * (1.0 - 1e-10), "seed {seed}");
                last = s.lower.value;
            }
            // after 25 steps the pinch is already tight on small trees
            assert!((last - pair.lambda0).abs() <= 1e-3 * pair.lambda0, "seed {seed}");
        }
    }

    #[test]
    fn sqrt_phi_certificate_valid_and_path_constant_bounded() {
        // The certificate from the square-root witness always stays below
        // the eigenvalue; on single-branch trees its evaluations also stay
        // within 4 * delta.
        let tag = DomainTag::base(Family::FI).unwrap();
        for seed in 0..20u64 {
            let t = random_tree(seed, 40, (0.1, 10.0), Branching::Path).unwrap();
            let m = Measure::for_tree(&t);
            let f = sqrt_phi_function(&t, &m);
            let cert = lower_bound(&t, &m, &f, tag).unwrap();
            let pair = smallest_eigenpair(&build_dirichlet_matrix(&t, &m)).unwrap();
            assert!(cert.value <= pair.lambda0 * (1.0 + 1e-10), "seed {seed}");
            let cf = closed_form_bounds(&t, &m);
            let sup_eval = cert
                .per_vertex[1..]
                .iter()
                .fold(0.0f64, |a, &v| a.max(v));
            assert!(sup_eval <= 4.0 * cf.delta * (1.0 + 1e-12), "seed {seed}");
        }
    }
}
