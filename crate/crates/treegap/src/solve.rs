//! Exact solution of the finite Dirichlet eigenproblem.
//!
//! The generator restricted to functions vanishing at the root is
//! symmetrized by the square root of the measure, giving a sparse
//! symmetric positive-definite matrix whose off-diagonal pattern mirrors
//! the tree. Elimination in children-before-parent order factorizes it
//! with zero fill-in, so inertia counts and shifted solves both cost O(n).
//! The smallest eigenvalue is bracketed by bisection on the inertia count
//! and the eigenvector recovered by inverse iteration; every step is
//! deterministic.

use crate::error::{Error, Result};
use crate::func::VertexFunction;
use crate::tree::{collapse, CollapsedTree, Measure, RootedTree};

const EIGEN_ITERATION_CAP: usize = 10_000;
const DENSE_DIM_LIMIT: usize = 64;

/// The symmetrized Dirichlet operator of a tree. Row/column `v - 1`
/// corresponds to vertex `v`; the edge to the root only contributes to the
/// diagonal of the root's son.
#[derive(Debug, Clone)]
pub struct DirichletMatrix {
    /// Number of tree vertices, including the root; the matrix dimension
    /// is one less.
    n: usize,
    parent: Vec<usize>,
    /// Diagonal: total jump rate out of each vertex. Slot 0 unused.
    diag: Vec<f64>,
    /// Off-diagonal coupling to the parent: `-sqrt(rate_up * rate_down)`,
    /// meaningful when the parent is not the root. Slot 0 unused.
    off: Vec<f64>,
    sqrt_mu: Vec<f64>,
    /// Vertices in children-before-parent order, root excluded.
    elim_order: Vec<usize>,
}

impl DirichletMatrix {
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn max_diagonal(&self) -> f64 {
        self.diag[1..].iter().fold(0.0, |a, &d| a.max(d))
    }

    pub fn diagonal(&self, v: usize) -> f64 {
        self.diag[v]
    }

    /// Off-diagonal entry coupling `v` to its parent, zero when the parent
    /// is the root.
    pub fn off_diagonal(&self, v: usize) -> f64 {
        if self.parent[v] == 0 { 0.0 } else { self.off[v] }
    }

    /// y = M x in vertex index space (slot 0 ignored).
    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y[0] = 0.0;
        for v in 1..self.n {
            y[v] = self.diag[v] * x[v];
        }
        for v in 1..self.n {
            let p = self.parent[v];
            if p != 0 {
                y[v] += self.off[v] * x[p];
                y[p] += self.off[v] * x[v];
            }
        }
    }

    /// x^T M x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        (1..self.n).map(|v| x[v] * y[v]).sum()
    }

    /// Pivots of the shifted factorization M - shift. The number of
    /// negative pivots equals the number of eigenvalues below the shift.
    /// Pivots that come out exactly zero (the shift hit an eigenvalue of a
    /// leading minor) are clamped to a tiny positive value so the solve
    /// path never divides by zero; inverse iteration wants the blow-up.
    fn ldlt_pivots(&self, shift: f64) -> Vec<f64> {
        let mut d: Vec<f64> = (0..self.n).map(|v| self.diag[v] - shift).collect();
        d[0] = f64::NAN;
        for &v in &self.elim_order {
            // children of v have already been folded in: d[v] is final
            if d[v] == 0.0 {
                d[v] = 1e-300;
            }
            let p = self.parent[v];
            if p != 0 {
                d[p] -= self.off[v] * self.off[v] / d[v];
            }
        }
        d
    }

    /// Number of eigenvalues strictly below the shift.
    pub fn eigenvalues_below(&self, shift: f64) -> usize {
        self.ldlt_pivots(shift)[1..].iter().filter(|&&p| p < 0.0).count()
    }

    /// Solve (M - shift) x = b through the same zero-fill factorization.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let d = self.ldlt_pivots(shift);
        let mut y = b.to_vec();
        for &v in &self.elim_order {
            let p = self.parent[v];
            if p != 0 {
                let l = self.off[v] / d[v];
                y[p] -= l * y[v];
            }
        }
        for v in 1..self.n {
            y[v] /= d[v];
        }
        for &v in self.elim_order.iter().rev() {
            let p = self.parent[v];
            if p != 0 {
                let l = self.off[v] / d[v];
                y[v] -= l * y[p];
            }
        }
        y[0] = 0.0;
        y
    }
}

/// Assemble the symmetrized Dirichlet matrix of a tree. For any `f` with
/// `f(0) = 0` the quadratic form of `sqrt(mu) * f` equals the Dirichlet
/// form of `f`; detailed balance makes both off-diagonal entries equal to
/// `-sqrt(rate_up * rate_down)`.
pub fn build_dirichlet_matrix(tree: &RootedTree, measure: &Measure) -> DirichletMatrix {
    let n = tree.vertex_count();
    let mut parent = vec![0usize; n];
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut sqrt_mu = vec![0.0; n];
    sqrt_mu[0] = 1.0;
    for v in 1..n {
        parent[v] = tree.parent(v).unwrap();
        sqrt_mu[v] = measure.mu(v).sqrt();
        let mut total = tree.rate_up(v);
        for &c in tree.children(v) {
            total += tree.rate_down(c);
        }
        diag[v] = total;
        if parent[v] != 0 {
            off[v] = -(tree.rate_up(v) * tree.rate_down(v)).sqrt();
        }
    }
    let elim_order: Vec<usize> = tree
        .preorder()
        .iter()
        .rev()
        .copied()
        .filter(|&v| v != 0)
        .collect();
    DirichletMatrix { n, parent, diag, off, sqrt_mu, elim_order }
}

/// The principal Dirichlet eigenvalue with its eigenfunction, pulled back
/// to vertex space and normalized to sup-norm 1 with positive entries.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda0: f64,
    pub g: VertexFunction,
    /// max over vertices of |generator g + lambda0 g| divided by the
    /// sup-norm of g.
    pub residual: f64,
}

/// Smallest eigenvalue and eigenvector of the symmetrized Dirichlet
/// matrix. Bisection on the inertia count brackets the eigenvalue to
/// near machine precision; inverse iteration from the left bracket end
/// then converges in a couple of steps. Deterministic throughout.
pub fn smallest_eigenpair(matrix: &DirichletMatrix) -> Result<EigenPair> {
    let n = matrix.n;
    let max_diag = matrix.max_diagonal();

    // lambda0 never exceeds the smallest diagonal entry; pad the bracket
    // so the predicate holds at the right end even in the 1x1 case.
    let min_diag = matrix.diag[1..].iter().fold(f64::MAX, |a, &d| a.min(d));
    let mut lo = 0.0f64;
    let mut hi = min_diag * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * hi {
            break;
        }
        if matrix.eigenvalues_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Inverse iteration with the left bracket end as shift: the shifted
    // matrix is positive definite there and the factorization has no
    // cancellation, so a positive start stays positive componentwise.
    let mut x = vec![1.0; n];
    x[0] = 0.0;
    let mut lambda = 0.5 * (lo + hi);
    let mut residual_v = f64::MAX;
    let mut converged = false;
    let mut iterations = 0;
    let mut y = vec![0.0; n];
    while iterations < EIGEN_ITERATION_CAP {
        iterations += 1;
        x = matrix.solve_shifted(lo, &x);
        let norm = x[1..].iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        for v in x[1..].iter_mut() {
            *v /= norm;
        }
        matrix.matvec(&x, &mut y);
        let xx: f64 = (1..n).map(|v| x[v] * x[v]).sum();
        let xy: f64 = (1..n).map(|v| x[v] * y[v]).sum();
        lambda = xy / xx;
        residual_v = (1..n)
            .map(|v| (y[v] - lambda * x[v]).abs())
            .fold(0.0, f64::max);
        if residual_v <= 1e-13 * max_diag {
            converged = true;
            break;
        }
    }

    // Pull back to vertex space, fix the sign at the root's son, and
    // normalize to sup-norm 1.
    let son = (1..n).find(|&v| matrix.parent[v] == 0).unwrap_or(1);
    let sign = if x[son] < 0.0 { -1.0 } else { 1.0 };
    let mut g_vals = vec![0.0; n];
    for v in 1..n {
        g_vals[v] = sign * x[v] / matrix.sqrt_mu[v];
    }
    let g_max = g_vals[1..].iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    for v in g_vals[1..].iter_mut() {
        *v /= g_max;
    }

    // Residual in vertex space: generator g + lambda g is the symmetrized
    // residual divided componentwise by sqrt(mu), and the sup-norm of g
    // after normalization is 1.
    let g_residual = (1..n)
        .map(|v| ((y[v] - lambda * x[v]) / matrix.sqrt_mu[v]).abs())
        .fold(0.0, f64::max)
        / g_max;

    let pair = EigenPair {
        lambda0: lambda,
        g: VertexFunction::new(g_vals),
        residual: g_residual,
    };

    if converged {
        Ok(pair)
    } else {
        Err(Error::ConvergenceFailure { estimate: lambda, residual: residual_v })
    }
}

/// All eigenvalues of a small instance by cyclic Jacobi rotations, the
/// independent cross-check for the sparse path. Ascending order.
pub fn dense_reference_solve(matrix: &DirichletMatrix) -> Result<Vec<f64>> {
    let dim = matrix.dim();
    if dim > DENSE_DIM_LIMIT {
        return Err(Error::DimensionTooLarge { dim, max: DENSE_DIM_LIMIT });
    }
    let mut a = vec![vec![0.0f64; dim]; dim];
    for v in 1..matrix.n {
        a[v - 1][v - 1] = matrix.diag[v];
        let p = matrix.parent[v];
        if p != 0 {
            a[v - 1][p - 1] = matrix.off[v];
            a[p - 1][v - 1] = matrix.off[v];
        }
    }
    let frobenius: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    for _sweep in 0..100 {
        let mut off_norm = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off_norm += 2.0 * a[p][q] * a[p][q];
            }
        }
        if off_norm.sqrt() <= 1e-15 * frobenius.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..dim).map(|i| a[i][i]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(eigenvalues)
}

/// One rung of the truncation ladder.
#[derive(Debug, Clone)]
pub struct ApproxLevel {
    pub m: usize,
    pub lambda0: f64,
    pub pair: EigenPair,
    pub collapsed: CollapsedTree,
}

/// Solve the truncated eigenproblem at each requested layer. The values
/// decrease toward the full tree's eigenvalue, which the final entry
/// reproduces exactly when the deepest layer is requested.
pub fn lambda0_sequence(
    tree: &RootedTree,
    measure: &Measure,
    m_values: &[usize],
) -> Result<Vec<ApproxLevel>> {
    let mut out = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let collapsed = collapse(tree, measure, m)?;
        let c_measure = Measure::for_tree(&collapsed.tree);
        let matrix = build_dirichlet_matrix(&collapsed.tree, &c_measure);
        let pair = smallest_eigenpair(&matrix)?;
        out.push(ApproxLevel { m, lambda0: pair.lambda0, pair, collapsed });
    }
    Ok(out)
}

/// Edgewise ratios of an eigenfunction: infinite at the root and at the
/// root's son, `g(v)/g(parent)` elsewhere. Rejects pairs whose
/// eigenfunction is not strictly increasing.
pub fn eigen_ratio(tree: &RootedTree, pair: &EigenPair) -> Result<VertexFunction> {
    ratio_function(tree, &pair.g, true)
}

/// Ratios of any positive increasing-or-flat function; `strict` demands
/// strict increase everywhere.
pub fn ratio_function(tree: &RootedTree, g: &VertexFunction, strict: bool) -> Result<VertexFunction> {
    let n = tree.vertex_count();
    let mut w = vec![f64::INFINITY; n];
    for v in 1..n {
        let p = tree.parent(v).unwrap();
        if strict && !(g.get(v) > g.get(p)) {
            return Err(Error::MonotonicityViolation(v));
        }
        if p != 0 {
            w[v] = g.get(v) / g.get(p);
        }
    }
    Ok(VertexFunction::new(w))
}

/// Extend an eigenfunction of a collapsed tree to the full tree by copying
/// each parent value downward past the truncation layer.
pub fn flat_extension(
    tree: &RootedTree,
    collapsed: &CollapsedTree,
    pair: &EigenPair,
) -> Result<VertexFunction> {
    let n = tree.vertex_count();
    if pair.g.len() != collapsed.tree.vertex_count()
        || collapsed.original_ids.len() != collapsed.tree.vertex_count()
    {
        return Err(Error::LayerMismatch(format!(
            "pair solved on {} vertices, truncation kept {}",
            pair.g.len(),
            collapsed.original_ids.len()
        )));
    }
    if collapsed.original_ids.iter().any(|&old| old >= n) {
        return Err(Error::LayerMismatch(
            "truncation refers to vertices outside the full tree".into(),
        ));
    }
    let m = collapsed.original_ids.iter().map(|&o| tree.layer(o)).max().unwrap();
    let expected = (0..n).filter(|&v| tree.layer(v) <= m).count();
    if expected != collapsed.original_ids.len() {
        return Err(Error::LayerMismatch(format!(
            "kept set has {} vertices but the full tree has {expected} up to layer {m}",
            collapsed.original_ids.len()
        )));
    }
    let mut values = vec![f64::NAN; n];
    values[0] = 0.0;
    for (new, &old) in collapsed.original_ids.iter().enumerate() {
        values[old] = pair.g.get(new);
    }
    for &v in tree.preorder().iter().skip(1) {
        if values[v].is_nan() {
            values[v] = values[tree.parent(v).unwrap()];
        }
    }
    Ok(VertexFunction::new(values))
}
