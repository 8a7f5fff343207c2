//! The generator, the Dirichlet form, and the three bound operators.
//!
//! All operators are pure functions of immutable inputs. Per-vertex batch
//! evaluators run in O(n) total using one postorder pass for subtree sums
//! and one preorder pass for path-cumulative sums; slot 0 of a returned
//! vector is never meaningful and is filled with NaN.

use crate::error::{Error, Result};
use crate::func::VertexFunction;
use crate::tree::{Measure, RootedTree};

fn ensure_vertex(tree: &RootedTree, f: &VertexFunction, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::RootNotInDomain);
    }
    if v >= tree.vertex_count() || f.len() != tree.vertex_count() {
        return Err(Error::DegenerateParams(format!(
            "vertex {v} or function length {} does not fit a tree on {} vertices",
            f.len(),
            tree.vertex_count()
        )));
    }
    Ok(())
}

/// The generator applied at a single vertex:
/// sum of rate * increment over the neighbours of `v`.
pub fn apply_omega(tree: &RootedTree, f: &VertexFunction, v: usize) -> Result<f64> {
    ensure_vertex(tree, f, v)?;
    let p = tree.parent(v).unwrap();
    for &u in [v, p].iter().chain(tree.children(v)) {
        if !f.get(u).is_finite() {
            return Err(Error::NonFiniteInput(u));
        }
    }
    let mut acc = tree.rate_up(v) * (f.get(p) - f.get(v));
    for &c in tree.children(v) {
        acc += tree.rate_down(c) * (f.get(c) - f.get(v));
    }
    Ok(acc)
}

/// The quadratic energy sum of `mu * rate_up * increment^2` over all edges.
/// Zero exactly when `f` vanishes identically.
pub fn dirichlet_form(tree: &RootedTree, measure: &Measure, f: &VertexFunction) -> Result<f64> {
    if f.get(0) != 0.0 {
        return Err(Error::BoundaryViolation(f.get(0)));
    }
    let mut acc = 0.0;
    for v in 1..tree.vertex_count() {
        if !f.get(v).is_finite() {
            return Err(Error::NonFiniteInput(v));
        }
        let p = tree.parent(v).unwrap();
        let d = f.get(v) - f.get(p);
        acc += measure.mu(v) * tree.rate_up(v) * d * d;
    }
    Ok(acc)
}

/// Energy over mass: an upper bound on the first Dirichlet eigenvalue for
/// every admissible `f`.
pub fn rayleigh_quotient(tree: &RootedTree, measure: &Measure, f: &VertexFunction) -> Result<f64> {
    let energy = dirichlet_form(tree, measure, f)?;
    let mass: f64 = (1..tree.vertex_count())
        .map(|v| measure.mu(v) * f.get(v) * f.get(v))
        .sum();
    if mass == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(energy / mass)
}

/// Mass-weighted subtree sums `S(v) = sum over the subtree of v of mu * f`,
/// by one postorder accumulation.
pub fn subtree_weighted_sums(tree: &RootedTree, measure: &Measure, f: &VertexFunction) -> Vec<f64> {
    let n = tree.vertex_count();
    let mut s: Vec<f64> = (0..n).map(|v| measure.mu(v) * f.get(v)).collect();
    for &v in tree.preorder().iter().rev() {
        if let Some(p) = tree.parent(v) {
            let add = s[v];
            s[p] += add;
        }
    }
    s
}

/// Single-summation operator at one vertex: the subtree sum of `mu * f`
/// divided by `mu * rate_up * increment`. A vanishing increment with the
/// usual convention 1/0 = inf yields `+inf`; a negative increment yields
/// the signed value as computed.
pub fn op_i(tree: &RootedTree, measure: &Measure, f: &VertexFunction, v: usize) -> Result<f64> {
    ensure_vertex(tree, f, v)?;
    Ok(op_i_all(tree, measure, f)?[v])
}

/// Single-summation operator at every non-root vertex in O(n) total.
pub fn op_i_all(tree: &RootedTree, measure: &Measure, f: &VertexFunction) -> Result<Vec<f64>> {
    let n = tree.vertex_count();
    if f.get(0) != 0.0 {
        return Err(Error::BoundaryViolation(f.get(0)));
    }
    for v in 0..n {
        if !f.get(v).is_finite() {
            return Err(Error::NonFiniteInput(v));
        }
    }
    let s = subtree_weighted_sums(tree, measure, f);
    let mut out = vec![f64::NAN; n];
    for v in 1..n {
        let p = tree.parent(v).unwrap();
        let denom = measure.mu(v) * tree.rate_up(v) * (f.get(v) - f.get(p));
        out[v] = if denom == 0.0 { f64::INFINITY } else { s[v] / denom };
    }
    Ok(out)
}

/// Double-summation operator at one vertex: the path-cumulative sum of
/// `S(k) / (mu(k) rate_up(k))` divided by `f(v)`.
pub fn op_ii(tree: &RootedTree, measure: &Measure, f: &VertexFunction, v: usize) -> Result<f64> {
    ensure_vertex(tree, f, v)?;
    Ok(op_ii_all(tree, measure, f)?[v])
}

/// Double-summation operator at every non-root vertex in O(n) total.
/// Requires `f` strictly positive off the root.
pub fn op_ii_all(tree: &RootedTree, measure: &Measure, f: &VertexFunction) -> Result<Vec<f64>> {
    let n = tree.vertex_count();
    if f.get(0) != 0.0 {
        return Err(Error::BoundaryViolation(f.get(0)));
    }
    for v in 1..n {
        if !f.get(v).is_finite() {
            return Err(Error::NonFiniteInput(v));
        }
        if !(f.get(v) > 0.0) {
            return Err(Error::NonPositiveFunction(v));
        }
    }
    let cumulative = green_apply(tree, measure, f);
    let mut out = vec![f64::NAN; n];
    for v in 1..n {
        out[v] = cumulative[v] / f.get(v);
    }
    Ok(out)
}

/// The path-cumulative sums `sum over k on the root path of v of
/// S(k) / (mu(k) rate_up(k))`, by one preorder pass over the subtree sums.
/// This is exactly the inverse of the negated Dirichlet generator applied
/// to `f`; the double-summation operator is this divided by `f` pointwise.
pub fn green_apply(tree: &RootedTree, measure: &Measure, f: &VertexFunction) -> Vec<f64> {
    let n = tree.vertex_count();
    let s = subtree_weighted_sums(tree, measure, f);
    let mut cumulative = vec![0.0; n];
    for &v in tree.preorder().iter().skip(1) {
        let p = tree.parent(v).unwrap();
        cumulative[v] = cumulative[p] + s[v] / (measure.mu(v) * tree.rate_up(v));
    }
    cumulative
}

/// Difference-form operator at one vertex, with the convention
/// `1/inf = 0` for the ratio at `v`.
pub fn op_r(tree: &RootedTree, w: &VertexFunction, v: usize) -> Result<f64> {
    ensure_vertex(tree, w, v)?;
    let w_v = w.get(v);
    if w_v.is_nan() {
        return Err(Error::NonFiniteInput(v));
    }
    let w_inv = if w_v == f64::INFINITY { 0.0 } else { 1.0 / w_v };
    let mut acc = tree.rate_up(v) * (1.0 - w_inv);
    for &c in tree.children(v) {
        if !w.get(c).is_finite() {
            return Err(Error::NonFiniteInput(c));
        }
        acc += tree.rate_down(c) * (1.0 - w.get(c));
    }
    Ok(acc)
}

/// Difference-form operator with the up-rate at layer `m` replaced by
/// `mu * rate_up / subtree_mass`, the rescaling used when a tree is
/// truncated at layer `m`.
pub fn op_r_mod(
    tree: &RootedTree,
    measure: &Measure,
    w: &VertexFunction,
    m: usize,
    v: usize,
) -> Result<f64> {
    if m < 1 || m > tree.max_layer() {
        return Err(Error::LayerOutOfRange { layer: m, max: tree.max_layer() });
    }
    let plain = op_r(tree, w, v)?;
    if tree.layer(v) != m {
        return Ok(plain);
    }
    let w_v = w.get(v);
    let w_inv = if w_v == f64::INFINITY { 0.0 } else { 1.0 / w_v };
    let up = tree.rate_up(v);
    let up_mod = measure.mu(v) * up / measure.subtree_mass(v);
    Ok(plain + (up_mod - up) * (1.0 - w_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{random_tree, tree_from_parents, Branching};
    use proptest::prelude::*;

    const GOLDEN: f64 = 1.618_033_988_749_895;

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

    fn vf(values: &[f64]) -> VertexFunction {
        VertexFunction::new(values.to_vec())
    }

    /// The literal nested double sum; the O(n) two-pass scheme is tested
    /// against this.
    fn op_ii_literal(tree: &RootedTree, measure: &Measure, f: &VertexFunction, v: usize) -> f64 {
        let mut acc = 0.0;
        for k in tree.path_to_root(v).unwrap() {
            let mut inner = 0.0;
            for j in tree.subtree(k) {
                inner += measure.mu(j) * f.get(j);
            }
            acc += inner / (measure.mu(k) * tree.rate_up(k));
        }
        acc / f.get(v)
    }

    #[test]
    fn omega_star_flat_function() {
        let (t, _) = star();
        let f = vf(&[0.0, 1.0, 1.0, 1.0]);
        assert_eq!(apply_omega(&t, &f, 1).unwrap(), -1.0);
        // constant around vertex 2 (values at 2 and its parent 1 agree,
        // no children): increments vanish
        assert_eq!(apply_omega(&t, &f, 2).unwrap(), 0.0);
    }

    #[test]
    fn omega_eigenfunction_path() {
        let (t, _) = path3();
        let f = vf(&[0.0, 1.0, GOLDEN]);
        let lambda = (3.0 - 5.0f64.sqrt()) / 2.0;
        let got = apply_omega(&t, &f, 1).unwrap();
        assert!((got + lambda).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn omega_rejects_root_and_nan() {
        let (t, _) = star();
        let f = vf(&[0.0, 1.0, 1.0, 1.0]);
        assert!(matches!(apply_omega(&t, &f, 0), Err(Error::RootNotInDomain)));
        let g = vf(&[0.0, 1.0, f64::NAN, 1.0]);
        assert!(matches!(apply_omega(&t, &g, 1), Err(Error::NonFiniteInput(2))));
    }

    #[test]
    fn dirichlet_form_star() {
        let (t, m) = star();
        assert_eq!(dirichlet_form(&t, &m, &vf(&[0.0, 1.0, 1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(dirichlet_form(&t, &m, &vf(&[0.0, 1.0, 2.0, 2.0])).unwrap(), 3.0);
        assert_eq!(dirichlet_form(&t, &m, &vf(&[0.0; 4])).unwrap(), 0.0);
        assert!(matches!(
            dirichlet_form(&t, &m, &vf(&[0.5, 1.0, 1.0, 1.0])),
            Err(Error::BoundaryViolation(_))
        ));
    }

    #[test]
    fn rayleigh_examples() {
        let (t, m) = path3();
        let r = rayleigh_quotient(&t, &m, &vf(&[0.0, 1.0, 1.0])).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        let r = rayleigh_quotient(&t, &m, &vf(&[0.0, 1.0, GOLDEN])).unwrap();
        assert!((r - 0.381_966_011_3).abs() < 1e-10);
        let (t, m) = star();
        let r = rayleigh_quotient(&t, &m, &vf(&[0.0, 1.0, 1.0, 1.0])).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            rayleigh_quotient(&t, &m, &vf(&[0.0; 4])),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn op_i_sqrt_phi_star() {
        let (t, m) = star();
        let s2 = 2.0f64.sqrt();
        let f = vf(&[0.0, 1.0, s2, s2]);
        let got1 = op_i(&t, &m, &f, 1).unwrap();
        assert!((got1 - (1.0 + 2.0 * s2)).abs() < 1e-12);
        let got2 = op_i(&t, &m, &f, 2).unwrap();
        assert!((got2 - (2.0 + s2)).abs() < 1e-12);
    }

    #[test]
    fn op_i_eigen_identity_path() {
        let (t, m) = path3();
        let f = vf(&[0.0, 1.0, GOLDEN]);
        let got = op_i(&t, &m, &f, 1).unwrap();
        assert!((got - (1.0 + GOLDEN)).abs() < 1e-10); // 1/lambda0 = 2.618..
    }

    #[test]
    fn op_i_flat_edge_is_infinite() {
        let (t, m) = star();
        let f = vf(&[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(op_i(&t, &m, &f, 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn op_ii_star_eigenfunction_constant() {
        let (t, m) = star();
        let g2 = (1.0 + 3.0f64.sqrt()) / 2.0;
        let f = vf(&[0.0, 1.0, g2, g2]);
        let want = 1.0 / (2.0 - 3.0f64.sqrt());
        for v in 1..4 {
            let got = op_ii(&t, &m, &f, v).unwrap();
            assert!((got - want).abs() < 1e-10, "vertex {v}: {got}");
        }
    }

    #[test]
    fn op_ii_two_vertex() {
        let t = tree_from_parents(&[0], None).unwrap();
        let m = Measure::for_tree(&t);
        assert_eq!(op_ii(&t, &m, &vf(&[0.0, 1.0]), 1).unwrap(), 1.0);
    }

    #[test]
    fn op_ii_star_flat_one() {
        let (t, m) = star();
        let f = vf(&[0.0, 1.0, 1.0, 1.0]);
        assert!((op_ii(&t, &m, &f, 2).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn op_ii_rejects_nonpositive() {
        let (t, m) = star();
        let f = vf(&[0.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            op_ii(&t, &m, &f, 1),
            Err(Error::NonPositiveFunction(2))
        ));
    }

    #[test]
    fn op_r_star_eigen_ratio() {
        let (t, _) = star();
        let g2 = (1.0 + 3.0f64.sqrt()) / 2.0;
        let w = vf(&[f64::INFINITY, f64::INFINITY, g2, g2]);
        let want = 2.0 - 3.0f64.sqrt();
        for v in 1..4 {
            let got = op_r(&t, &w, v).unwrap();
            assert!((got - want).abs() < 1e-12, "vertex {v}: {got}");
        }
    }

    #[test]
    fn op_r_leaf_with_infinite_ratio() {
        let (t, _) = star();
        let w = vf(&[f64::INFINITY, 1.5, f64::INFINITY, 1.5]);
        // vertex 2 is a leaf: children sum empty, 1/inf = 0
        assert_eq!(op_r(&t, &w, 2).unwrap(), t.rate_up(2));
    }

    #[test]
    fn op_r_mod_star_collapse_value() {
        let (t, m) = star();
        let w = vf(&[f64::INFINITY, f64::INFINITY, 1.0, 1.0]);
        let got = op_r_mod(&t, &m, &w, 1, 1).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-15);
        // beyond the cutoff the flat ratio evaluates to zero
        assert_eq!(op_r_mod(&t, &m, &w, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn op_r_mod_below_cutoff_matches_plain() {
        let t = tree_from_parents(&[0, 1, 2], Some(&[(2.0, 1.0), (0.5, 3.0), (1.0, 1.0)])).unwrap();
        let m = Measure::for_tree(&t);
        let w = vf(&[f64::INFINITY, f64::INFINITY, 1.7, 1.2]);
        for v in 1..3 {
            let plain = op_r(&t, &w, v).unwrap();
            let modified = op_r_mod(&t, &m, &w, 3, v).unwrap();
            assert_eq!(plain, modified, "vertex {v}");
        }
    }

    #[test]
    fn two_pass_ii_matches_literal_double_sum() {
        for seed in 0..25u64 {
            let t = random_tree(seed, 30, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let mut vals = vec![0.0];
            for v in 1..t.vertex_count() {
                vals.push(0.1 + (v as f64 * 0.7).sin().abs());
            }
            let f = VertexFunction::new(vals);
            let fast = op_ii_all(&t, &m, &f).unwrap();
            for v in 1..t.vertex_count() {
                let slow = op_ii_literal(&t, &m, &f, v);
                let rel = (fast[v] - slow).abs() / slow.abs();
                assert!(rel < 1e-12, "seed {seed} vertex {v}: {} vs {slow}", fast[v]);
            }
        }
    }

    #[test]
    fn poisson_summation_identity() {
        // For any g and the induced f = -(generator g), the flux through
        // layer n+1 plus the edge flux at k balances the interior mass of f,
        // for every k with layer(k) <= n. Exhaustive over small trees.
        for seed in 0..20u64 {
            let t = random_tree(seed, 12, (0.2, 5.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let n_vertices = t.vertex_count();
            let mut g = vec![0.0];
            for v in 1..n_vertices {
                g.push((v as f64 * 1.3).cos() + 2.0);
            }
            let g = VertexFunction::new(g);
            let f: Vec<f64> = (0..n_vertices)
                .map(|v| if v == 0 { 0.0 } else { -apply_omega(&t, &g, v).unwrap() })
                .collect();
            for n in 1..=t.max_layer() {
                for k in 1..n_vertices {
                    if t.layer(k) > n {
                        continue;
                    }
                    let subtree = t.subtree(k);
                    let boundary: f64 = subtree
                        .iter()
                        .filter(|&&j| t.layer(j) == n + 1)
                        .map(|&j| {
                            let p = t.parent(j).unwrap();
                            m.mu(j) * t.rate_up(j) * (g.get(p) - g.get(j))
                        })
                        .sum();
                    let pk = t.parent(k).unwrap();
                    let edge = m.mu(k) * t.rate_up(k) * (g.get(k) - g.get(pk));
                    let interior: f64 = subtree
                        .iter()
                        .filter(|&&j| t.layer(j) <= n)
                        .map(|&j| m.mu(j) * f[j])
                        .sum();
                    let scale = edge.abs().max(interior.abs()).max(1.0);
                    assert!(
                        (boundary + edge - interior).abs() < 1e-10 * scale,
                        "seed {seed} n {n} k {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn integration_by_parts() {
        // D(f) equals the mass pairing of f with -(generator f).
        for seed in 0..20u64 {
            let t = random_tree(seed, 25, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let mut vals = vec![0.0];
            for v in 1..t.vertex_count() {
                vals.push((v as f64 * 0.9).sin());
            }
            let f = VertexFunction::new(vals);
            let d = dirichlet_form(&t, &m, &f).unwrap();
            let paired: f64 = (1..t.vertex_count())
                .map(|v| -m.mu(v) * f.get(v) * apply_omega(&t, &f, v).unwrap())
                .sum();
            assert!(
                (d - paired).abs() <= 1e-10 * d.abs().max(1.0),
                "seed {seed}: {d} vs {paired}"
            );
        }
    }

    proptest! {
        /// Ratio correspondence: for u built from any ratio function by
        /// cumulative products, R(w) at v equals -(generator u)(v) / u(v).
        #[test]
        fn ratio_correspondence(seed in 0u64..500) {
            let t = random_tree(seed, 20, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let n = t.vertex_count();
            // w is inf at the root's son (u(0) = 0 there), finite above 1
            // elsewhere; u is the cumulative product of ratios along the
            // root path, with a free positive start at the root's son.
            let mut w = vec![f64::INFINITY; n];
            for v in 1..n {
                if t.layer(v) >= 2 {
                    w[v] = 1.05 + 0.9 * ((seed as f64 + v as f64) * 0.61).sin().abs();
                }
            }
            let mut u = vec![0.0; n];
            for &v in t.preorder().iter().skip(1) {
                let p = t.parent(v).unwrap();
                u[v] = if p == 0 { 2.0 } else { u[p] * w[v] };
            }
            let wf = VertexFunction::new(w.clone());
            let uf = VertexFunction::new(u.clone());
            for v in 1..n {
                let r = op_r(&t, &wf, v).unwrap();
                let via_u = -apply_omega(&t, &uf, v).unwrap() / u[v];
                let rel = (r - via_u).abs() / via_u.abs().max(1e-30);
                prop_assert!(rel < 1e-12, "vertex {}: {} vs {}", v, r, via_u);
            }
        }

        /// The single-summation operator is invariant under positive
        /// rescaling of the test function.
        #[test]
        fn op_i_scale_invariant(seed in 0u64..200, c in 0.01f64..100.0) {
            let t = random_tree(seed, 20, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let m = Measure::for_tree(&t);
            let mut vals = vec![0.0];
            for v in 1..t.vertex_count() {
                vals.push(t.layer(v) as f64 + 0.3 * ((v * 7) as f64).sin());
            }
            let f = VertexFunction::new(vals);
            let a = op_i_all(&t, &m, &f).unwrap();
            let b = op_i_all(&t, &m, &f.scaled(c)).unwrap();
            for v in 1..t.vertex_count() {
                if a[v].is_finite() {
                    prop_assert!((a[v] - b[v]).abs() <= 1e-9 * a[v].abs());
                } else {
                    prop_assert_eq!(a[v], b[v]);
                }
            }
        }
    }
}
