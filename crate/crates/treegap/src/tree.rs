//! Rooted trees with birth-death rates and their symmetric measure.
//!
//! Vertices are dense labels `0..n` with `0` the root. Each non-root vertex
//! `i` carries both rates of its parent edge: `rate_up(i)` is the jump rate
//! from `i` toward the root and `rate_down(i)` the rate from the parent
//! toward `i`. The root is required to have exactly one child.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One non-root vertex of the raw input: its parent and both edge rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpec {
    pub child: usize,
    pub parent: usize,
    pub rate_up: f64,
    pub rate_down: f64,
}

/// A validated rooted tree with positive rates on both directions of
/// every edge. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    parent: Vec<usize>,     // parent[0] unused
    children: Vec<Vec<usize>>,
    layer: Vec<usize>,
    rate_up: Vec<f64>,      // index 0 unused
    rate_down: Vec<f64>,    // index 0 unused
    preorder: Vec<usize>,   // root first, parents before children
    max_layer: usize,
}

impl RootedTree {
    /// Validate a raw edge list and build the tree.
    ///
    /// Every vertex in `1..=edges.len()` must appear exactly once as a
    /// child; layers and child lists are computed here.
    pub fn from_edges(edges: &[EdgeSpec]) -> Result<Self> {
        let n = edges.len() + 1;
        if n < 2 {
            return Err(Error::DegenerateParams(
                "a tree needs at least two vertices".into(),
            ));
        }
        let mut parent = vec![usize::MAX; n];
        // slot 0 of the rate arrays is unused and stays 0 so that the
        // derived equality works
        let mut rate_up = vec![0.0; n];
        let mut rate_down = vec![0.0; n];
        for e in edges {
            if e.child == 0 || e.child >= n {
                return Err(Error::CycleOrDisconnected {
                    n,
                    detail: format!("child vertex {} outside 1..{}", e.child, n),
                });
            }
            if e.parent >= n {
                return Err(Error::CycleOrDisconnected {
                    n,
                    detail: format!("parent vertex {} outside 0..{}", e.parent, n),
                });
            }
            if parent[e.child] != usize::MAX {
                return Err(Error::DuplicateVertex(e.child));
            }
            for rate in [e.rate_up, e.rate_down] {
                if !(rate > 0.0) || !rate.is_finite() {
                    return Err(Error::NonPositiveRate {
                        vertex: e.child,
                        value: rate,
                    });
                }
            }
            parent[e.child] = e.parent;
            rate_up[e.child] = e.rate_up;
            rate_down[e.child] = e.rate_down;
        }

        let mut children = vec![Vec::new(); n];
        for v in 1..n {
            children[parent[v]].push(v);
        }
        for list in &mut children {
            list.sort_unstable();
        }
        if children[0].len() != 1 {
            return Err(Error::RootDegree(children[0].len()));
        }

        // BFS from the root assigns layers and detects unreachable vertices
        // (which is the same thing as a cycle among the parent links).
        let mut layer = vec![usize::MAX; n];
        let mut preorder = Vec::with_capacity(n);
        layer[0] = 0;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &c in children[v].iter().rev() {
                layer[c] = layer[v] + 1;
                stack.push(c);
            }
        }
        if preorder.len() != n {
            let missing = (0..n).find(|&v| layer[v] == usize::MAX).unwrap();
            return Err(Error::CycleOrDisconnected {
                n,
                detail: format!("vertex {missing} not reachable from the root"),
            });
        }
        let max_layer = layer.iter().copied().max().unwrap();

        Ok(RootedTree {
            parent,
            children,
            layer,
            rate_up,
            rate_down,
            preorder,
            max_layer,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent of `v`; `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v])
    }

    /// Ordered children J(v).
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn layer(&self, v: usize) -> usize {
        self.layer[v]
    }

    pub fn max_layer(&self) -> usize {
        self.max_layer
    }

    /// Rate from `v` toward its parent. `v` must not be the root.
    pub fn rate_up(&self, v: usize) -> f64 {
        debug_assert!(v != 0);
        self.rate_up[v]
    }

    /// Rate from the parent of `v` toward `v`. `v` must not be the root.
    pub fn rate_down(&self, v: usize) -> f64 {
        debug_assert!(v != 0);
        self.rate_down[v]
    }

    /// Vertices in preorder: root first, every parent before its children.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// The path from `v` to the root: `[v, parent(v), ..]`, root excluded.
    pub fn path_to_root(&self, v: usize) -> Result<Vec<usize>> {
        if v == 0 {
            return Err(Error::RootHasNoPath);
        }
        let mut path = Vec::with_capacity(self.layer[v]);
        let mut cur = v;
        while cur != 0 {
            path.push(cur);
            cur = self.parent[cur];
        }
        Ok(path)
    }

    /// Vertices of the subtree rooted at `v` (v included), in preorder.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            for &c in self.children[u].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Export as an edge list (vertices ascending), the inverse of
    /// [`RootedTree::from_edges`].
    pub fn to_edges(&self) -> Vec<EdgeSpec> {
        (1..self.vertex_count())
            .map(|v| EdgeSpec {
                child: v,
                parent: self.parent[v],
                rate_up: self.rate_up[v],
                rate_down: self.rate_down[v],
            })
            .collect()
    }
}

/// The symmetric measure of a tree together with all subtree masses.
///
/// `mu(0) = 1` and `mu` satisfies detailed balance
/// `mu(i) * rate_up(i) = mu(parent(i)) * rate_down(i)`.
#[derive(Debug, Clone)]
pub struct Measure {
    mu: Vec<f64>,
    subtree_mass: Vec<f64>,
}

impl Measure {
    /// Compute the measure by one preorder pass (multiplying the parent's
    /// mass by the edge rate ratio) and subtree masses by one postorder
    /// accumulation.
    pub fn for_tree(tree: &RootedTree) -> Measure {
        let n = tree.vertex_count();
        let mut mu = vec![0.0; n];
        mu[0] = 1.0;
        for &v in tree.preorder().iter().skip(1) {
            let p = tree.parent(v).unwrap();
            mu[v] = mu[p] * tree.rate_down(v) / tree.rate_up(v);
        }
        let mut subtree_mass = mu.clone();
        for &v in tree.preorder().iter().rev() {
            if let Some(p) = tree.parent(v) {
                subtree_mass[p] += subtree_mass[v];
            }
        }
        Measure { mu, subtree_mass }
    }

    pub fn mu(&self, v: usize) -> f64 {
        self.mu[v]
    }

    /// Mass of the subtree rooted at `v`, the root giving the total mass.
    pub fn subtree_mass(&self, v: usize) -> f64 {
        self.subtree_mass[v]
    }

    pub fn total(&self) -> f64 {
        self.subtree_mass[0]
    }

    /// Largest relative detailed-balance defect over all edges; used by
    /// validation tests.
    pub fn detailed_balance_defect(&self, tree: &RootedTree) -> f64 {
        (1..tree.vertex_count())
            .map(|v| {
                let p = tree.parent(v).unwrap();
                let lhs = self.mu[v] * tree.rate_up(v);
                let rhs = self.mu[p] * tree.rate_down(v);
                (lhs - rhs).abs() / lhs.max(rhs)
            })
            .fold(0.0, f64::max)
    }
}

/// A tree truncated at a layer, with the up-rates on the truncation layer
/// rescaled so each boundary vertex carries its whole former subtree mass.
///
/// `original_ids[new]` maps the collapsed tree's labels back to the full
/// tree's labels.
#[derive(Debug, Clone)]
pub struct CollapsedTree {
    pub tree: RootedTree,
    pub original_ids: Vec<usize>,
}

impl CollapsedTree {
    /// New label of an original vertex, if it survived the truncation.
    pub fn new_id(&self, original: usize) -> Option<usize> {
        self.original_ids.binary_search(&original).ok()
    }
}

/// Truncate a tree at layer `m`: vertices beyond layer `m` are absorbed
/// into their layer-`m` ancestor. The up-rate of a layer-`m` vertex `i`
/// becomes `mu(i) * rate_up(i) / subtree_mass(i)`, so the product
/// `mu * rate_up` is preserved and the collapsed tree's symmetric measure
/// at `i` equals the full subtree mass. Rates below layer `m` are kept.
pub fn collapse(tree: &RootedTree, measure: &Measure, m: usize) -> Result<CollapsedTree> {
    if m < 1 || m > tree.max_layer() {
        return Err(Error::LayerOutOfRange {
            layer: m,
            max: tree.max_layer(),
        });
    }
    let mut original_ids: Vec<usize> =
        (0..tree.vertex_count()).filter(|&v| tree.layer(v) <= m).collect();
    original_ids.sort_unstable();
    let mut new_id = vec![usize::MAX; tree.vertex_count()];
    for (new, &old) in original_ids.iter().enumerate() {
        new_id[old] = new;
    }
    // Relabelling by (layer, id) is not needed: parents survive whenever a
    // child does, and from_edges tolerates any labelling of the kept set.
    let edges: Vec<EdgeSpec> = original_ids
        .iter()
        .filter(|&&old| old != 0)
        .map(|&old| {
            let rate_up = if tree.layer(old) == m {
                measure.mu(old) * tree.rate_up(old) / measure.subtree_mass(old)
            } else {
                tree.rate_up(old)
            };
            EdgeSpec {
                child: new_id[old],
                parent: new_id[tree.parent(old).unwrap()],
                rate_up,
                rate_down: tree.rate_down(old),
            }
        })
        .collect();
    Ok(CollapsedTree {
        tree: RootedTree::from_edges(&edges)?,
        original_ids,
    })
}

/// Shape of randomly generated trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branching {
    /// Each new vertex attaches to a uniformly chosen existing non-root
    /// vertex.
    UniformAttachment,
    /// Each new vertex extends the current deepest vertex: a single branch.
    Path,
}

/// Deterministic random tree: the vertex count is uniform in
/// `2..=max_vertices`, rates are uniform in `rate_range`, and the shape
/// follows `branching`. The same seed always yields the same tree,
/// bit for bit.
pub fn random_tree(
    seed: u64,
    max_vertices: usize,
    rate_range: (f64, f64),
    branching: Branching,
) -> Result<RootedTree> {
    let (lo, hi) = rate_range;
    if max_vertices < 2 {
        return Err(Error::DegenerateParams(format!(
            "max_vertices must be at least 2, got {max_vertices}"
        )));
    }
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::DegenerateParams(format!(
            "rate range must satisfy 0 < min <= max < inf, got [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_vertices);
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let parent = match branching {
            _ if v == 1 => 0,
            Branching::UniformAttachment => rng.random_range(1..v),
            Branching::Path => v - 1,
        };
        let rate_up = rng.random_range(lo..=hi);
        let rate_down = rng.random_range(lo..=hi);
        edges.push(EdgeSpec {
            child: v,
            parent,
            rate_up,
            rate_down,
        });
    }
    RootedTree::from_edges(&edges)
}

/// Convenience constructor used heavily in tests and examples: unit rates
/// unless given, vertices parented by `parents[i]` for vertex `i + 1`.
pub fn tree_from_parents(parents: &[usize], rates: Option<&[(f64, f64)]>) -> Result<RootedTree> {
    let edges: Vec<EdgeSpec> = parents
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (up, down) = rates.map_or((1.0, 1.0), |r| r[i]);
            EdgeSpec {
                child: i + 1,
                parent: p,
                rate_up: up,
                rate_down: down,
            }
        })
        .collect();
    RootedTree::from_edges(&edges)
}
