//! The Laplacian, the Bakry-Émery forms and Dirichlet spectra.
//!
//! Vertex functions are plain slices indexed in vertex order. All operators
//! act pointwise with respect to the vertex measure:
//!
//! ```text
//! Δf(x)      = 1/m(x) Σ_y μ_xy (f(y) - f(x))
//! Γ(f,g)(x)  = 1/(2m(x)) Σ_y μ_xy (f(y) - f(x)) (g(y) - g(x))
//! Γ₂(f)(x)   = ½ (ΔΓ(f,f) - 2Γ(f, Δf))(x)
//! ```

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{MeasuredGraph, Subset};
use crate::scalar::Scalar;

/// Largest domain handed to the dense eigensolver.
pub const DENSE_CAP: usize = 2000;

/// Default relative tolerance for orthonormality and eigen-residual checks.
pub const SPECTRAL_TOL: f64 = 1e-8;

#[inline]
pub fn laplacian<S: Scalar>(g: &MeasuredGraph<S>, f: &[S], x: usize) -> S {
    let fx = f[x];
    let sum = g.neighbors(x).iter().fold(S::zero(), |acc, &(y, w)| acc + w * (f[y] - fx));
    sum / g.measure(x)
}

pub fn laplacian_all<S: Scalar>(g: &MeasuredGraph<S>, f: &[S]) -> Vec<S> {
    (0..g.len()).map(|x| laplacian(g, f, x)).collect()
}

#[inline]
pub fn gamma<S: Scalar>(g: &MeasuredGraph<S>, f: &[S], h: &[S], x: usize) -> S {
    let (fx, hx) = (f[x], h[x]);
    let sum = g
        .neighbors(x)
        .iter()
        .fold(S::zero(), |acc, &(y, w)| acc + w * (f[y] - fx) * (h[y] - hx));
    sum / (S::lit(2.0) * g.measure(x))
}

pub fn gamma_all<S: Scalar>(g: &MeasuredGraph<S>, f: &[S], h: &[S]) -> Vec<S> {
    (0..g.len()).map(|x| gamma(g, f, h, x)).collect()
}

/// `Γ(f,g)` through the product rule `½(Δ(fg) - fΔg - gΔf)`.
pub fn gamma_product_rule<S: Scalar>(g: &MeasuredGraph<S>, f: &[S], h: &[S], x: usize) -> S {
    let fh: Vec<S> = f.iter().zip(h).map(|(&a, &b)| a * b).collect();
    S::lit(0.5) * (laplacian(g, &fh, x) - f[x] * laplacian(g, h, x) - h[x] * laplacian(g, f, x))
}

/// `Γ₂(f)(x)`, evaluated from the values of `f` on the 2-ball of `x` only.
pub fn gamma2<S: Scalar>(g: &MeasuredGraph<S>, f: &[S], x: usize) -> S {
    let two = S::lit(2.0);
    let lap_x = laplacian(g, f, x);
    let gam_x = gamma(g, f, f, x);
    let fx = f[x];
    let mut lap_gamma = S::zero();
    let mut cross = S::zero();
    for &(y, w) in g.neighbors(x) {
        let gam_y = gamma(g, f, f, y);
        let lap_y = laplacian(g, f, y);
        lap_gamma += w * (gam_y - gam_x);
        cross += w * (f[y] - fx) * (lap_y - lap_x);
    }
    let m = g.measure(x);
    // ½ΔΓ(f) - Γ(f,Δf)
    lap_gamma / (two * m) - cross / (two * m)
}

/// Matrix of `-Δ_Ω` conjugated by `m^{1/2}`: symmetric, indexed by the members
/// of `domain` in order.
pub fn symmetrized_dirichlet_matrix<S: Scalar>(g: &MeasuredGraph<S>, domain: &Subset) -> DMatrix<S> {
    let k = domain.len();
    let mut pos = vec![usize::MAX; g.len()];
    for (i, v) in domain.iter().enumerate() {
        pos[v] = i;
    }
    let mut a = DMatrix::zeros(k, k);
    for (i, x) in domain.iter().enumerate() {
        let mx = g.measure(x);
        a[(i, i)] = g.degree(x) / mx;
        for &(y, w) in g.neighbors(x) {
            let j = pos[y];
            if j != usize::MAX {
                a[(i, j)] = -w / (mx * g.measure(y)).sqrt();
            }
        }
    }
    a
}

/// Eigenpairs of `-Δ_Ω` with `m`-orthonormal eigenfunctions.
#[derive(Debug, Clone)]
pub struct Spectrum<S: Scalar = f64> {
    eigenvalues: Vec<S>,
    /// Column `k` is the `k`-th eigenfunction restricted to the domain (rows
    /// follow the domain's member order).
    eigenfunctions: DMatrix<S>,
    domain: Subset,
}

impl<S: Scalar> Spectrum<S> {
    /// Nondecreasing eigenvalues.
    pub fn eigenvalues(&self) -> &[S] {
        &self.eigenvalues
    }

    /// `λ_k`, 1-based as is customary.
    pub fn lambda(&self, k: usize) -> S {
        self.eigenvalues[k - 1]
    }

    /// First Dirichlet eigenvalue `μ₁(Ω)`.
    pub fn mu1(&self) -> S {
        self.eigenvalues[0]
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn domain(&self) -> &Subset {
        &self.domain
    }

    pub fn eigenfunction_matrix(&self) -> &DMatrix<S> {
        &self.eigenfunctions
    }

    /// The `k`-th (0-based) eigenfunction on the whole vertex set, zero off the domain.
    pub fn eigenfunction(&self, k: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.domain.universe()];
        for (i, v) in self.domain.iter().enumerate() {
            out[v] = self.eigenfunctions[(i, k)];
        }
        out
    }

    /// `max_{i,j} |Σ_x m(x) φ_i(x) φ_j(x) - δ_ij|`.
    pub fn orthonormality_defect(&self, g: &MeasuredGraph<S>) -> S {
        let n = self.len();
        let mut worst = S::zero();
        for i in 0..n {
            for j in i..n {
                let mut s = S::zero();
                for (r, v) in self.domain.iter().enumerate() {
                    s += g.measure(v) * self.eigenfunctions[(r, i)] * self.eigenfunctions[(r, j)];
                }
                let target = if i == j { S::one() } else { S::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `max_k max_x |Δ_Ω φ_k(x) + λ_k φ_k(x)|`.
    pub fn eigen_residual(&self, g: &MeasuredGraph<S>) -> S {
        let mut worst = S::zero();
        for k in 0..self.len() {
            let phi = self.eigenfunction(k);
            for x in self.domain.iter() {
                let r = laplacian(g, &phi, x) + self.eigenvalues[k] * phi[x];
                worst = worst.max(r.abs());
            }
        }
        worst
    }
}

/// Eigen-decomposition of the Dirichlet Laplacian on `domain` (the whole vertex
/// set gives the ordinary spectrum with `λ₁ = 0`).
pub fn dirichlet_spectrum<S: Scalar>(g: &MeasuredGraph<S>, domain: &Subset) -> Result<Spectrum<S>> {
    if domain.universe() != g.len() {
        return Err(Error::InvalidSubset("subset belongs to a different graph".into()));
    }
    if domain.len() > DENSE_CAP {
        return Err(Error::TooLarge { size: domain.len(), cap: DENSE_CAP });
    }
    let a = symmetrized_dirichlet_matrix(g, domain);
    let k = a.nrows();
    let eig = SymmetricEigen::try_new(a, S::epsilon(), 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap_or(std::cmp::Ordering::Equal)
    });

    let members = domain.members();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut funcs = DMatrix::zeros(k, k);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        // fix the sign: the entry of largest magnitude is positive
        let mut pivot = 0;
        for r in 1..k {
            if v[r].abs() > v[pivot].abs() * (S::one() + S::lit(1e-9)) {
                pivot = r;
            }
        }
        let sign = if v[pivot] < S::zero() { -S::one() } else { S::one() };
        for r in 0..k {
            funcs[(r, col)] = sign * v[r] / g.measure(members[r]).sqrt();
        }
    }
    Ok(Spectrum { eigenvalues, eigenfunctions: funcs, domain: domain.clone() })
}

/// Full spectrum of `-Δ` on a finite graph.
pub fn spectrum<S: Scalar>(g: &MeasuredGraph<S>) -> Result<Spectrum<S>> {
    dirichlet_spectrum(g, &Subset::whole(g))
}

/// Rayleigh quotient `½Σ_{x,y} μ_xy (f(x)-f(y))² / Σ_{x∈Ω} m(x) f(x)²` of a
/// function supported in `domain`.
pub fn rayleigh_quotient<S: Scalar>(g: &MeasuredGraph<S>, domain: &Subset, f: &[S]) -> Result<S> {
    if f.len() != g.len() {
        return Err(Error::InvalidArgument("function length differs from vertex count".into()));
    }
    if let Some(v) = (0..g.len()).find(|&v| !domain.contains(v) && f[v] != S::zero()) {
        return Err(Error::Precondition(format!("support leaves the domain at `{}`", g.id(v))));
    }
    let den = domain.iter().fold(S::zero(), |acc, v| acc + g.measure(v) * f[v] * f[v]);
    if den == S::zero() {
        return Err(Error::Precondition("zero function has no Rayleigh quotient".into()));
    }
    let num = g.edges().fold(S::zero(), |acc, (x, y, w)| {
        let d = f[x] - f[y];
        acc + w * d * d
    });
    Ok(num / den)
}
