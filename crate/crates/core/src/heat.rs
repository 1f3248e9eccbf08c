//! Dirichlet heat kernels and the minimal heat kernel of an exhaustion.
//!
//! On a finite domain `Ω` the kernel is the spectral sum
//! `p_t(x,y,Ω) = Σ_k e^{-λ_k t} φ_k(x) φ_k(y)` over an `m`-orthonormal
//! eigenbasis of `Δ_Ω`. Values carry units of inverse measure, so
//! `Σ_y p_t(x,y) m(y)` is the mass that survives at time `t`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Exhaustion, MeasuredGraph, Subset};
use crate::operators::{dirichlet_spectrum, Spectrum};
use crate::scalar::Scalar;

/// Successive stages closer than this count as converged.
pub const STAGE_CONVERGENCE: f64 = 1e-9;

/// Slack before a decreasing stage sequence is treated as a solver fault.
pub const STAGE_MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct HeatKernel<S: Scalar = f64> {
    time: S,
    domain: Subset,
    values: DMatrix<S>,
}

impl<S: Scalar> HeatKernel<S> {
    pub fn time(&self) -> S {
        self.time
    }

    pub fn domain(&self) -> &Subset {
        &self.domain
    }

    /// Matrix indexed by the domain members in order.
    pub fn matrix(&self) -> &DMatrix<S> {
        &self.values
    }

    /// `p_t(x,y,Ω)` for graph vertices `x`, `y`; zero when either is outside `Ω`.
    pub fn get(&self, x: usize, y: usize) -> S {
        match (self.position(x), self.position(y)) {
            (Some(i), Some(j)) => self.values[(i, j)],
            _ => S::zero(),
        }
    }

    fn position(&self, v: usize) -> Option<usize> {
        self.domain.members().binary_search(&v).ok()
    }

    /// `Σ_y p_t(x,y) m(y)`.
    pub fn row_mass(&self, g: &MeasuredGraph<S>, x: usize) -> S {
        match self.position(x) {
            Some(i) => self
                .domain
                .iter()
                .enumerate()
                .fold(S::zero(), |acc, (j, y)| acc + self.values[(i, j)] * g.measure(y)),
            None => S::zero(),
        }
    }

    /// `Σ_{x∈A} Σ_{y∈B} p_t(x,y) m(x) m(y)`.
    pub fn flow(&self, g: &MeasuredGraph<S>, a: &Subset, b: &Subset) -> S {
        let mut total = S::zero();
        for x in a.iter() {
            for y in b.iter() {
                total += self.get(x, y) * g.measure(x) * g.measure(y);
            }
        }
        total
    }
}

/// Cached eigendecomposition from which kernels and solutions at any time are
/// read off.
#[derive(Debug, Clone)]
pub struct DirichletSemigroup<S: Scalar = f64> {
    spectrum: Spectrum<S>,
    measure: DVector<S>,
}

impl<S: Scalar> DirichletSemigroup<S> {
    pub fn new(g: &MeasuredGraph<S>, domain: &Subset) -> Result<Self> {
        let spectrum = dirichlet_spectrum(g, domain)?;
        let measure = DVector::from_iterator(domain.len(), domain.iter().map(|v| g.measure(v)));
        Ok(Self { spectrum, measure })
    }

    pub fn whole(g: &MeasuredGraph<S>) -> Result<Self> {
        Self::new(g, &Subset::whole(g))
    }

    pub fn spectrum(&self) -> &Spectrum<S> {
        &self.spectrum
    }

    pub fn domain(&self) -> &Subset {
        self.spectrum.domain()
    }

    fn check_time(t: S) -> Result<()> {
        if t >= S::zero() && t.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("heat time must be nonnegative, got {t}")))
        }
    }

    /// `p_t(·,·,Ω)`; at `t = 0` exactly `δ_y(x)/m(y)`.
    pub fn kernel(&self, t: S) -> Result<HeatKernel<S>> {
        Self::check_time(t)?;
        if t == S::zero() {
            let inv = self.measure.map(|m| S::one() / m);
            let values = DMatrix::from_diagonal(&inv);
            return Ok(HeatKernel { time: t, domain: self.domain().clone(), values });
        }
        let phi = self.spectrum.eigenfunction_matrix();
        let decay = DVector::from_iterator(
            self.spectrum.len(),
            self.spectrum.eigenvalues().iter().map(|&l| (-l * t).exp()),
        );
        let scaled = phi * DMatrix::from_diagonal(&decay);
        let mut values = &scaled * phi.transpose();
        // exact symmetry
        let n = values.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (values[(i, j)] + values[(j, i)]) * S::lit(0.5);
                values[(i, j)] = avg;
                values[(j, i)] = avg;
            }
        }
        Ok(HeatKernel { time: t, domain: self.domain().clone(), values })
    }

    /// `u(t,x) = Σ_{y∈Ω} p_t(x,y,Ω) f(y) m(y)` on the whole vertex set (zero off `Ω`).
    pub fn evolve(&self, f0: &[S], t: S) -> Result<Vec<S>> {
        Self::check_time(t)?;
        let dom = self.domain();
        if f0.len() != dom.universe() {
            return Err(Error::InvalidArgument("initial datum length differs from vertex count".into()));
        }
        if let Some(v) = (0..f0.len()).find(|&v| !dom.contains(v) && f0[v] != S::zero()) {
            return Err(Error::Precondition(format!("initial datum is nonzero off the domain at index {v}")));
        }
        if t == S::zero() {
            return Ok(f0.to_vec());
        }
        let local = DVector::from_iterator(dom.len(), dom.iter().map(|v| f0[v]));
        let phi = self.spectrum.eigenfunction_matrix();
        let mut coeffs = phi.transpose() * local.component_mul(&self.measure);
        for (c, &l) in coeffs.iter_mut().zip(self.spectrum.eigenvalues()) {
            *c *= (-l * t).exp();
        }
        let u = phi * coeffs;
        let mut out = vec![S::zero(); f0.len()];
        for (i, v) in dom.iter().enumerate() {
            out[v] = u[i];
        }
        Ok(out)
    }
}

pub fn dirichlet_heat_kernel<S: Scalar>(g: &MeasuredGraph<S>, domain: &Subset, t: S) -> Result<HeatKernel<S>> {
    DirichletSemigroup::new(g, domain)?.kernel(t)
}

pub fn heat_evolve<S: Scalar>(g: &MeasuredGraph<S>, domain: &Subset, f0: &[S], t: S) -> Result<Vec<S>> {
    DirichletSemigroup::new(g, domain)?.evolve(f0, t)
}

/// Stage-by-stage values of `p_t(x,y,Ω_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalKernel<S = f64> {
    pub value: S,
    pub stage_values: Vec<S>,
    pub radii: Vec<usize>,
    /// Last two stages within [`STAGE_CONVERGENCE`].
    pub converged: bool,
}

/// Approximates the minimal heat kernel `lim_i p_t(x,y,Ω_i)` using the first
/// `stages` stages. `x` and `y` are vertices of the exhaustion host.
pub fn minimal_heat_kernel<S: Scalar>(
    ex: &Exhaustion<S>,
    x: usize,
    y: usize,
    t: S,
    stages: usize,
) -> Result<MinimalKernel<S>> {
    if stages < 2 || stages > ex.stages().len() {
        return Err(Error::InvalidArgument(format!(
            "need between 2 and {} stages, got {stages}",
            ex.stages().len()
        )));
    }
    let first = &ex.stages()[0];
    if !first.contains(x) || !first.contains(y) {
        return Err(Error::Precondition("x and y must lie in the first stage".into()));
    }
    let mut values = Vec::with_capacity(stages);
    for stage in &ex.stages()[..stages] {
        let kernel = dirichlet_heat_kernel(ex.host(), stage, t)?;
        let v = kernel.get(x, y);
        if let Some(&prev) = values.last() {
            let prev: S = prev;
            let slack = S::lit(STAGE_MONOTONE_SLACK) * prev.abs().max(S::one());
            if v < prev - slack {
                return Err(Error::Numerical(format!(
                    "exhaustion sequence decreased from {prev} to {v}"
                )));
            }
        }
        values.push(v);
    }
    let n = values.len();
    let converged = (values[n - 1] - values[n - 2]).abs() < S::lit(STAGE_CONVERGENCE);
    Ok(MinimalKernel {
        value: values[n - 1],
        stage_values: values,
        radii: ex.radii()[..stages].to_vec(),
        converged,
    })
}
