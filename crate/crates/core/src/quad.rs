//! Gaussian quadrature rules used by the kernel variance constant.
//!
//! Only the Jacobi weight (1 + x)^beta with alpha = 0 is needed here, which
//! keeps the normalization free of gamma functions. Nodes and weights come
//! from the Golub-Welsch eigenvalue problem on the symmetrized Jacobi matrix.

use nalgebra::DMatrix;

/// Nodes and weights for ∫_{-1}^{1} (1 + x)^beta f(x) dx, beta > -1.
pub(crate) fn gauss_jacobi(deg: usize, beta: f64) -> Vec<(f64, f64)> {
    assert!(deg >= 2, "quadrature degree must be at least 2");
    assert!(beta > -1.0, "Jacobi weight needs beta > -1");

    let mut jacobi = DMatrix::<f64>::zeros(deg, deg);
    let mut diag = beta / (2.0 + beta);
    for idx in 0..deg - 1 {
        let k = (idx + 1) as f64;
        let denom = 2.0 * k + beta;
        let off = 2.0 * k * (k + beta) / (denom * ((denom + 1.0) * (denom - 1.0)).sqrt());
        jacobi[(idx, idx)] = diag;
        jacobi[(idx, idx + 1)] = off;
        jacobi[(idx + 1, idx)] = off;
        diag = beta * beta / (denom * (denom + 2.0));
    }
    jacobi[(deg - 1, deg - 1)] = diag;

    let eigen = jacobi.symmetric_eigen();
    // total weight ∫ (1+x)^beta dx = 2^{beta+1} / (beta+1)
    let scale = 2.0_f64.powf(beta + 1.0) / (beta + 1.0);

    let mut pairs: Vec<(f64, f64)> = eigen
        .eigenvalues
        .iter()
        .zip(eigen.eigenvectors.row(0).iter())
        .map(|(&node, &v0)| (node, v0 * v0 * scale))
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs
}

/// Plain Gauss-Legendre rule on [-1, 1].
pub(crate) fn gauss_legendre(deg: usize) -> Vec<(f64, f64)> {
    gauss_jacobi(deg, 0.0)
}

/// ∫_a^b f(x) dx with a Gauss-Legendre rule.
pub(crate) fn integrate<F: Fn(f64) -> f64>(rule: &[(f64, f64)], a: f64, b: f64, f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * rule
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}
