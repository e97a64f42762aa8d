//! Shared numerical kernels: Gauss-Legendre quadrature, dense symmetric
//! eigendecomposition, golden-section maximization, and power-law fitting.

use nalgebra::DMatrix;

use crate::error::{BackflowError, Result};

/// A quadrature rule on `[a, b]`: nodes strictly increasing, weights positive,
/// weights summing to `b - a`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Approximate `\int_a^b f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre rule with `n` nodes mapped affinely to `[a, b]`.
///
/// Exact for polynomials of degree <= 2n-1. Nodes and weights come from
/// Newton iteration on the Legendre polynomial, converged to ~1e-15.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(BackflowError::InvalidParams(
            "quadrature needs at least one node".into(),
        ));
    }
    if !(a < b) {
        return Err(BackflowError::InvalidParams(format!(
            "quadrature interval must satisfy a < b, got [{a}, {b}]"
        )));
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];

    // Nodes are symmetric about the origin; solve for the first half.
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root of P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // One polishing step after convergence.
        let (p, d) = legendre_and_derivative(n, x);
        x -= p / d;
        dp = legendre_and_derivative(n, x).1;

        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    // Affine map [-1, 1] -> [a, b].
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n {
        nodes[i] = mid + half * nodes[i];
        weights[i] *= half;
    }

    Ok(QuadratureRule { nodes, weights })
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Full spectrum of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigenResult {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` paired with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    /// max_i ||A v_i - lambda_i v_i||_2.
    pub max_residual: f64,
}

impl SymmetricEigenResult {
    /// Largest eigenvalue with its eigenvector and individual residual.
    pub fn largest(&self) -> (f64, Vec<f64>, f64) {
        let i = self.eigenvalues.len() - 1;
        let v: Vec<f64> = self.eigenvectors.column(i).iter().copied().collect();
        (self.eigenvalues[i], v, self.max_residual)
    }
}

/// Dense symmetric eigendecomposition with a residual contract of
/// `1e-10 * ||A||_F`.
///
/// Symmetry is required up to 1e-12 entrywise; the matrix is symmetrized
/// before factorization so roundoff in assembly cannot leak through.
pub fn symmetric_eigen(matrix: &DMatrix<f64>) -> Result<SymmetricEigenResult> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(BackflowError::InvalidParams(format!(
            "eigensolver needs a nonempty square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if asym > 1e-12 {
        return Err(BackflowError::NotSymmetric(asym));
    }

    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (matrix[(i, j)] + matrix[(j, i)]));
    let eig = nalgebra::SymmetricEigen::try_new(sym.clone(), 0.0, 0)
        .ok_or_else(|| BackflowError::ConvergenceFailure("symmetric QL did not converge".into()))?;

    // nalgebra returns the spectrum unordered; sort ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        eigenvectors.set_column(col, &eig.eigenvectors.column(i));
    }

    let av = &sym * &eigenvectors;
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        let mut r2 = 0.0;
        for j in 0..n {
            let r = av[(j, i)] - eigenvalues[i] * eigenvectors[(j, i)];
            r2 += r * r;
        }
        max_residual = max_residual.max(r2.sqrt());
    }
    let scale = sym.norm().max(f64::MIN_POSITIVE);
    if max_residual > 1e-10 * scale {
        return Err(BackflowError::ConvergenceFailure(format!(
            "residual {max_residual:.3e} exceeds 1e-10 * ||A|| = {:.3e}",
            1e-10 * scale
        )));
    }

    Ok(SymmetricEigenResult {
        eigenvalues,
        eigenvectors,
        max_residual,
    })
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// For unimodal `f` the returned abscissa is within `tol` of the maximizer.
/// Monotone functions converge to the corresponding endpoint; callers that
/// bracket via a coarse scan detect that case themselves.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Least-squares power law `y = prefactor * x^exponent` fitted on
/// `(log x, log y)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

pub fn powerlaw_fit(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(BackflowError::NonPositiveData(format!(
            "fit needs >= 3 matching points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(BackflowError::NonPositiveData(
            "all xs and ys must be strictly positive".into(),
        ));
    }

    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();

    let exponent = sxy / sxx;
    let prefactor = (my - exponent * mx).exp();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };

    Ok(PowerLawFit {
        exponent,
        prefactor,
        r_squared,
    })
}
