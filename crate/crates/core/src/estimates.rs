//! Inequalities derived from the off-diagonal bound and from the Li-Yau
//! gradient estimate.
//!
//! The eigenvalue, diameter, isoperimetric and mixing checks are
//! unconditional on finite connected graphs. The Li-Yau, Harnack, Cheng and
//! Gaussian-fit checks consume curvature evidence; when they fail, the
//! report status is `certificate_falsified`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curvature::{CurvatureEvidence, CurvatureKind};
use crate::dgg::{corollary_constant, DggParams};
use crate::error::{Error, Result};
use crate::graph::{Exhaustion, MeasuredGraph, Subset};
use crate::heat::{DirichletSemigroup, STAGE_MONOTONE_SLACK};
use crate::legendre::{h_inverse, sigma_factor};
use crate::operators::{dirichlet_spectrum, gamma, laplacian, spectrum, Spectrum};
use crate::report::{ReportBuilder, VerificationReport};

/// Relative slack for the monotone mixing quantity.
pub const MIXING_SLACK: f64 = 1e-10;

/// Largest curvature hypothesis treated as `K = 0` by the flat Li-Yau form.
/// Certificates of `K = 0` carry their search margin, so this sits at the
/// certification dispersion scale.
pub const FLAT_K: f64 = 1e-4;

/// Absolute slack added to `Kn` in the Cheng comparison.
pub const CHENG_SLACK: f64 = 1e-9;

/// `k ≥ 2` pairwise disjoint vertex sets at mutual distance at least 1.
#[derive(Debug, Clone)]
pub struct EigenBoundInput {
    sets: Vec<Subset>,
    delta: usize,
}

impl EigenBoundInput {
    pub fn new(g: &MeasuredGraph, sets: Vec<Subset>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidSubset("need at least two sets".into()));
        }
        if sets.iter().any(|s| s.universe() != g.len()) {
            return Err(Error::InvalidSubset("sets belong to a different graph".into()));
        }
        let mut delta = usize::MAX;
        for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                if !sets[i].is_disjoint(&sets[j]) {
                    return Err(Error::InvalidSubset(format!("sets {i} and {j} overlap")));
                }
                delta = delta.min(g.subset_distance(&sets[i], &sets[j]));
            }
        }
        if delta == 0 {
            return Err(Error::InvalidSubset("sets touch: minimal distance is 0".into()));
        }
        Ok(Self { sets, delta })
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    /// `δ = min_{i≠j} d(A_i, A_j)`.
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// `log(2m(V)/√(m(A_i)m(A_j)))` for every pair `i < j`.
    fn log_ratios(&self, g: &MeasuredGraph) -> Vec<(usize, usize, f64)> {
        let total = g.total_measure();
        let mut out = Vec::new();
        for i in 0..self.sets.len() {
            for j in (i + 1)..self.sets.len() {
                let mm = self.sets[i].measure(g) * self.sets[j].measure(g);
                out.push((i, j, (2.0 * total / mm.sqrt()).ln()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub log_ratio: f64,
    /// `h(2L/δ)`.
    pub h_value: f64,
    /// `(D_m/δ) L / h(2L/δ)`.
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBound {
    pub k: usize,
    pub delta: usize,
    pub d_m: f64,
    pub bound: f64,
    /// Eigensolved `λ_k` for comparison.
    pub lambda_k: f64,
    pub pairs: Vec<PairTerm>,
}

impl EigenBound {
    pub fn holds(&self) -> bool {
        self.bound >= self.lambda_k
    }

    pub fn report(&self) -> VerificationReport {
        VerificationReport::builder("eigenbound")
            .param("k", self.k)
            .param("delta", self.delta)
            .param("d_m", self.d_m)
            .param("bound", self.bound)
            .param("lambda_k", self.lambda_k)
            .points(vec![self.k as f64], vec![self.bound - self.lambda_k])
            .details(json!({ "pairs": self.pairs }))
            .note("grid holds k; margin is bound - eigensolved λ_k")
            .finish(self.holds())
    }
}

/// `λ_k ≤ (D_m/δ) max_{i≠j} L_ij / h(2L_ij/δ)`.
pub fn eigenvalue_upper_bound(g: &MeasuredGraph, input: &EigenBoundInput) -> Result<EigenBound> {
    let k = input.k();
    if k > g.len() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the vertex count")));
    }
    let d_m = g.structural_constants().d_m;
    let delta = input.delta() as f64;
    let pairs = input
        .log_ratios(g)
        .into_iter()
        .map(|(i, j, l)| {
            let h = h_inverse(2.0 * l / delta)?;
            Ok(PairTerm { i, j, log_ratio: l, h_value: h, term: d_m / delta * l / h })
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = pairs.iter().map(|p| p.term).fold(f64::NEG_INFINITY, f64::max);
    let lambda_k = spectrum(g)?.lambda(k);
    Ok(EigenBound { k, delta: input.delta(), d_m, bound, lambda_k, pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedBound {
    pub bound: f64,
    pub sigma: f64,
    /// `2L/δ ≤ ½ asinh(1/σ)`, the range where `h(a) ≥ σ asinh(1/σ)/(2a)`.
    pub in_regime: bool,
    /// The unsimplified bound on the same input.
    pub theorem_bound: f64,
    pub lambda_k: f64,
}

impl SimplifiedBound {
    /// The simplified bound is at least the unsimplified one.
    pub fn relaxes(&self) -> bool {
        self.bound >= self.theorem_bound - 1e-12
    }

    pub fn report(&self, k: usize) -> VerificationReport {
        let mut b = VerificationReport::builder("eigenbound-simplified")
            .param("k", k)
            .param("sigma", self.sigma)
            .param("in_regime", self.in_regime)
            .param("bound", self.bound)
            .param("theorem_bound", self.theorem_bound)
            .param("lambda_k", self.lambda_k)
            .points(vec![k as f64], vec![self.bound - self.lambda_k]);
        if !self.in_regime {
            b = b.note("σ outside the relaxation range: the simplified form is not implied by the unsimplified one");
        }
        let pass = self.bound >= self.lambda_k && (!self.in_regime || self.relaxes());
        b.finish(pass)
    }
}

/// `λ_k ≤ 4D_m max L² / (σ asinh(1/σ) δ²)`; with `sigma = None`,
/// `σ = 1/sinh(4 max L / δ)`, which puts `2L/δ` exactly on the edge of the
/// relaxation range.
pub fn eigenvalue_upper_bound_simplified(
    g: &MeasuredGraph,
    input: &EigenBoundInput,
    sigma: Option<f64>,
) -> Result<SimplifiedBound> {
    let theorem = eigenvalue_upper_bound(g, input)?;
    let delta = input.delta() as f64;
    let l = theorem.pairs.iter().map(|p| p.log_ratio).fold(f64::NEG_INFINITY, f64::max);
    let sigma = match sigma {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(Error::InvalidArgument(format!("sigma must be positive, got {s}"))),
        None => 1.0 / (4.0 * l / delta).sinh(),
    };
    let bound = 4.0 * theorem.d_m * l * l / (sigma_factor(sigma) * delta * delta);
    let a = 2.0 * l / delta;
    let edge = 0.5 * crate::legendre::asinh(1.0 / sigma);
    Ok(SimplifiedBound {
        bound,
        sigma,
        in_regime: a <= edge * (1.0 + 1e-12),
        theorem_bound: theorem.bound,
        lambda_k: theorem.lambda_k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterBound {
    pub bound: f64,
    pub diameter: usize,
    pub lambda2: f64,
    pub sigma: f64,
}

impl DiameterBound {
    pub fn holds(&self) -> bool {
        self.bound >= self.diameter as f64
    }

    pub fn report(&self) -> VerificationReport {
        VerificationReport::builder("diameter")
            .param("bound", self.bound)
            .param("diameter", self.diameter)
            .param("lambda2", self.lambda2)
            .param("sigma", self.sigma)
            .points(vec![self.diameter as f64], vec![self.bound - self.diameter as f64])
            .finish(self.holds())
    }
}

/// `D ≤ 2√(D_m/(σ asinh(1/σ) λ₂)) log(2m(V)/m_min)`, `σ = 1/sinh(4 log(2m(V)/m_min))`.
pub fn diameter_bound(g: &MeasuredGraph) -> Result<DiameterBound> {
    if g.len() < 2 {
        return Err(Error::InvalidGraph("diameter bound needs at least two vertices".into()));
    }
    let c = g.structural_constants();
    let lambda2 = spectrum(g)?.lambda(2);
    let l = (2.0 * g.total_measure() / c.m_min).ln();
    let sigma = 1.0 / (4.0 * l).sinh();
    let bound = 2.0 * (c.d_m / (sigma_factor(sigma) * lambda2)).sqrt() * l;
    Ok(DiameterBound { bound, diameter: g.diameter(), lambda2, sigma })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricBound {
    pub r: usize,
    pub bound: f64,
    /// `m(N_r(U))`.
    pub measured: f64,
    pub lambda2: f64,
    pub sigma: f64,
}

impl IsoperimetricBound {
    pub fn holds(&self) -> bool {
        self.bound <= self.measured
    }

    pub fn report(&self) -> VerificationReport {
        VerificationReport::builder("isoperimetric")
            .param("r", self.r)
            .param("bound", self.bound)
            .param("measured", self.measured)
            .param("lambda2", self.lambda2)
            .param("sigma", self.sigma)
            .points(vec![self.r as f64], vec![self.measured - self.bound])
            .finish(self.holds())
    }
}

/// `m(N_r(U)) ≥ m(V)(1 - (4m(V)/m(U)) exp(-(r+1)√(λ₂ σ asinh(1/σ)/D_m)))`
/// with `σ = 1/sinh(2 log(2m(V)/√(m(U)m_min)))`.
pub fn isoperimetric_bound(g: &MeasuredGraph, u: &Subset, r: usize) -> Result<IsoperimetricBound> {
    let lambda2 = spectrum(g)?.lambda(2);
    isoperimetric_bound_with(g, u, r, lambda2)
}

/// As [`isoperimetric_bound`] with a precomputed `λ₂`.
pub fn isoperimetric_bound_with(g: &MeasuredGraph, u: &Subset, r: usize, lambda2: f64) -> Result<IsoperimetricBound> {
    if r == 0 {
        return Err(Error::InvalidArgument("neighborhood radius must be at least 1".into()));
    }
    let c = g.structural_constants();
    let total = g.total_measure();
    let mu = u.measure(g);
    let sigma = 1.0 / (2.0 * (2.0 * total / (mu * c.m_min).sqrt()).ln()).sinh();
    let rate = (lambda2 * sigma_factor(sigma) / c.d_m).sqrt();
    let bound = total * (1.0 - 4.0 * total / mu * (-((r + 1) as f64) * rate).exp());
    let measured = g.neighborhood(u, r).measure(g);
    Ok(IsoperimetricBound { r, bound, measured, lambda2, sigma })
}

/// `h_t(x,x) e^{λ₂t}` nonincreasing for every `x`, and `|h_t(x,y)| ≤ √(h_t(x,x)h_t(y,y))`,
/// where `h_t = p_t - 1/m(V)` is summed spectrally from the second eigenpair on.
pub fn mixing_monitor(g: &MeasuredGraph, grid: &[f64]) -> Result<VerificationReport> {
    check_times(grid, false)?;
    let spec = spectrum(g)?;
    mixing_monitor_with(g, &spec, grid)
}

pub fn mixing_monitor_with(g: &MeasuredGraph, spec: &Spectrum, grid: &[f64]) -> Result<VerificationReport> {
    check_times(grid, false)?;
    if g.len() < 2 {
        return Err(Error::InvalidGraph("mixing needs at least two vertices".into()));
    }
    let n = g.len();
    let lambdas = spec.eigenvalues();
    let l2 = lambdas[1];
    let phi = spec.eigenfunction_matrix();
    let rows: Vec<(Vec<f64>, f64)> = grid
        .par_iter()
        .map(|&t| {
            let w: Vec<f64> = lambdas.iter().map(|&l| (-l * t).exp()).collect();
            let diag: Vec<f64> = (0..n)
                .map(|x| (1..n).map(|i| ((l2 - lambdas[i]) * t).exp() * phi[(x, i)].powi(2)).sum())
                .collect();
            let h = |x: usize, y: usize| -> f64 { (1..n).map(|i| w[i] * phi[(x, i)] * phi[(y, i)]).sum() };
            let hd: Vec<f64> = (0..n).map(|x| h(x, x)).collect();
            let mut cs = f64::INFINITY;
            for x in 0..n {
                for y in (x + 1)..n {
                    let cap = (hd[x].max(0.0) * hd[y].max(0.0)).sqrt();
                    cs = cs.min((cap - h(x, y).abs()) / cap.max(f64::MIN_POSITIVE).max(1e-300));
                }
            }
            (diag, cs)
        })
        .collect();
    let mut margins = vec![0.0];
    for w in rows.windows(2) {
        let m = w[0]
            .0
            .iter()
            .zip(&w[1].0)
            .map(|(a, b)| (a - b) / a.abs().max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min);
        margins.push(m);
    }
    let cs_worst = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let monotone = margins.iter().all(|&m| m >= -MIXING_SLACK);
    let cauchy_schwarz = !(cs_worst < -MIXING_SLACK);
    Ok(VerificationReport::builder("mixing")
        .param("lambda2", l2)
        .param("vertices", n)
        .points(grid.to_vec(), margins)
        .details(json!({
            "monotone": monotone,
            "cauchy_schwarz": cauchy_schwarz,
            "cauchy_schwarz_worst_relative_margin": if cs_worst.is_finite() { cs_worst } else { 0.0 },
        }))
        .note("margin is the smallest relative decrease of h_t(x,x) e^{λ₂t} over vertices")
        .finish(monotone && cauchy_schwarz))
}

fn check_times(grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    for &t in grid {
        let ok = if positive { t > 0.0 } else { t >= 0.0 };
        if !ok || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid times must be {}, got {t}",
                if positive { "positive" } else { "nonnegative" }
            )));
        }
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// On failure, attaches the certificate carrying the largest `K` as the
/// suspect.
fn blame(b: ReportBuilder, ev: &CurvatureEvidence, pass: bool) -> ReportBuilder {
    match ev.worst() {
        Some(cert) if !pass => b
            .param("suspect_certificate", cert)
            .note(format!("inequality violated: the curvature evidence at {} is contradicted", cert.vertex)),
        _ => b,
    }
}

fn require_cde(ev: &CurvatureEvidence) -> Result<f64> {
    if ev.kind != CurvatureKind::Cde {
        return Err(Error::Precondition("the check needs CDE evidence".into()));
    }
    ev.dimension
        .finite()
        .ok_or_else(|| Error::Precondition("the check needs a finite dimension".into()))
}

/// Which Li-Yau inequality to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum LiYauForm {
    /// `CDE(n,0)`: `Γ(√u)/u - ∂_t√u/√u ≤ n/2t + n(1+D_μ)D_m/R`.
    Flat,
    /// `CDE(n,-K)` with potential `q`:
    /// `(1-ρ)Γ(√u)/u - ∂_t√u/√u - q/2 ≤ n/((1-ρ)2t) + n(2+D_μ)D_m/((1-ρ)R) + Kn/(2ρ)`.
    Curved { rho: f64, q: f64 },
}

/// Evaluates the Li-Yau gradient estimate on the `R`-ball of `x0` for
/// `u = e^{-qt} P_t u0` on the whole graph.
///
/// The evidence must cover the `2R`-ball. Since `u` solves the equation
/// exactly, `∂_t√u/√u = (Δu - qu)/(2u)`.
pub fn li_yau_check(
    g: &MeasuredGraph,
    evidence: &CurvatureEvidence,
    x0: usize,
    r: usize,
    u0: &[f64],
    grid: &[f64],
    form: LiYauForm,
) -> Result<VerificationReport> {
    let n = require_cde(evidence)?;
    check_times(grid, true)?;
    if r == 0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if u0.len() != g.len() || u0.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("initial datum must be positive everywhere".into()));
    }
    evidence.require_cover(g, &g.ball(x0, 2 * r))?;
    let k = evidence.hypothesis_k();
    let (rho, q) = match form {
        LiYauForm::Flat => {
            if k > FLAT_K {
                return Err(Error::Precondition(format!(
                    "evidence supports only K = {k:.3e} > 0; use the curved form"
                )));
            }
            (0.0, 0.0)
        }
        LiYauForm::Curved { rho, q } => {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::InvalidArgument(format!("rho must lie in (0,1), got {rho}")));
            }
            (rho, q)
        }
    };
    let c = g.structural_constants();
    let rr = r as f64;
    let ball = g.ball(x0, r);
    let sg = DirichletSemigroup::whole(g)?;
    let rows: Vec<(f64, f64, f64, usize)> = grid
        .par_iter()
        .map(|&t| {
            let mut u = sg.evolve(u0, t)?;
            let decay = (-q * t).exp();
            u.iter_mut().for_each(|v| *v *= decay);
            let root: Vec<f64> = u.iter().map(|v| v.sqrt()).collect();
            let rhs = match form {
                LiYauForm::Flat => n / (2.0 * t) + n * (1.0 + c.d_mu) * c.d_m / rr,
                LiYauForm::Curved { .. } => {
                    n / ((1.0 - rho) * 2.0 * t)
                        + n * (2.0 + c.d_mu) * c.d_m / ((1.0 - rho) * rr)
                        + k * n / (2.0 * rho)
                }
            };
            let mut worst = (f64::NEG_INFINITY, 0usize);
            for x in ball.iter() {
                if !(u[x] > 0.0) {
                    return Err(Error::Numerical(format!("heat solution is not positive at {}", g.id(x))));
                }
                let grad = gamma(g, &root, &root, x) / u[x];
                let time = laplacian(g, &u, x) / (2.0 * u[x]);
                let lhs = match form {
                    LiYauForm::Flat => grad - time,
                    // the q terms cancel: -∂_t√u/√u - q/2 = -Δu/(2u)
                    LiYauForm::Curved { .. } => (1.0 - rho) * grad - time,
                };
                if lhs > worst.0 {
                    worst = (lhs, x);
                }
            }
            Ok((rhs - worst.0, worst.0, rhs, worst.1))
        })
        .collect::<Result<_>>()?;
    let margins: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let pass = margins.iter().all(|&m| m >= 0.0);
    let witness = rows
        .iter()
        .zip(grid)
        .filter(|(r, _)| r.0 < 0.0)
        .map(|(r, &t)| json!({ "t": t, "vertex": g.id(r.3), "lhs": r.1, "rhs": r.2 }))
        .collect::<Vec<_>>();
    Ok(blame(VerificationReport::builder("li-yau"), evidence, pass)
        .conditional()
        .param("form", form)
        .param("center", g.id(x0))
        .param("radius", r)
        .param("n", n)
        .param("k", k)
        .param("d_m", c.d_m)
        .param("d_mu", c.d_mu)
        .param("certified", evidence.all_certified())
        .points(grid.to_vec(), margins)
        .details(json!({
            "lhs_max": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
            "rhs": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
            "violations": witness,
        }))
        .finish(pass))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnackParams {
    pub n: f64,
    pub k: f64,
    pub q: f64,
    pub rho: f64,
    pub t1: f64,
    pub t2: f64,
}

impl HarnackParams {
    pub fn new(n: f64, k: f64, q: f64, rho: f64, t1: f64, t2: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) || !(k >= 0.0 && k.is_finite()) || !q.is_finite() {
            return Err(Error::InvalidArgument("need n > 0, K ≥ 0 and finite q".into()));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidArgument(format!("rho must lie in (0,1), got {rho}")));
        }
        if !(t1 > 0.0 && t1.is_finite() && t2.is_finite()) {
            return Err(Error::InvalidArgument("times must be positive".into()));
        }
        if t1 > t2 {
            return Err(Error::InvalidArgument(format!("need T₁ ≤ T₂, got {t1} > {t2}")));
        }
        Ok(Self { n, k, q, rho, t1, t2 })
    }

    /// `(n, K)` from CDE evidence covering every vertex of `g`.
    pub fn from_evidence(g: &MeasuredGraph, ev: &CurvatureEvidence, q: f64, rho: f64, t1: f64, t2: f64) -> Result<Self> {
        let n = require_cde(ev)?;
        ev.require_cover(g, &Subset::whole(g))?;
        Self::new(n, ev.hypothesis_k(), q, rho, t1, t2)
    }

    /// Logarithm of the Harnack factor for hop distance `d`.
    pub fn log_factor(&self, d: usize, m_max: f64, mu_min: f64) -> f64 {
        let power = self.n / (1.0 - self.rho) * (self.t2 / self.t1).ln();
        let dt = self.t2 - self.t1;
        let spread = if d == 0 {
            0.0
        } else if dt == 0.0 {
            f64::INFINITY
        } else {
            4.0 * m_max * (d * d) as f64 / ((1.0 - self.rho) * dt * mu_min)
        };
        power + (self.k * self.n / self.rho + self.q) * dt + spread
    }
}

/// `u(T₁,x) ≤ u(T₂,y)(T₂/T₁)^{n/(1-ρ)} exp((Kn/ρ + q)(T₂-T₁) + 4m_max d²/((1-ρ)(T₂-T₁)μ_min))`
/// for `u = e^{-qt} P_t u0` on the whole graph. Margins are
/// `log RHS - log LHS`, one per pair; an infinite right side is recorded
/// as `f64::MAX`.
pub fn harnack_check(
    g: &MeasuredGraph,
    params: &HarnackParams,
    u0: &[f64],
    pairs: &[(usize, usize)],
) -> Result<VerificationReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no vertex pairs given".into()));
    }
    if u0.len() != g.len() || u0.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("initial datum must be positive everywhere".into()));
    }
    let c = g.structural_constants();
    let sg = DirichletSemigroup::whole(g)?;
    let evolve = |t: f64| -> Result<Vec<f64>> {
        let mut u = sg.evolve(u0, t)?;
        let decay = (-params.q * t).exp();
        u.iter_mut().for_each(|v| *v *= decay);
        Ok(u)
    };
    let u1 = evolve(params.t1)?;
    let u2 = evolve(params.t2)?;
    let mut dist_cache: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut margins = Vec::with_capacity(pairs.len());
    let mut rows = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        let d = dist_cache.entry(x).or_insert_with(|| g.distances_from(&[x]))[y];
        if !(u1[x] > 0.0 && u2[y] > 0.0) {
            return Err(Error::Numerical("heat solution is not positive".into()));
        }
        let log_factor = params.log_factor(d, c.m_max, c.mu_min);
        let margin = u2[y].ln() + log_factor - u1[x].ln();
        margins.push(if margin.is_finite() { margin } else { f64::MAX });
        rows.push(json!({ "x": g.id(x), "y": g.id(y), "d": d, "u_t1_x": u1[x], "u_t2_y": u2[y] }));
    }
    let pass = margins.iter().all(|&m| m >= 0.0);
    Ok(VerificationReport::builder("harnack")
        .conditional()
        .param("params", params)
        .param("m_max", c.m_max)
        .param("mu_min", c.mu_min)
        .points((0..pairs.len()).map(|i| i as f64).collect(), margins)
        .details(json!({ "pairs": rows }))
        .note("grid indexes the vertex pairs; margins are log RHS - log LHS")
        .finish(pass))
}

/// Compares the bottom of the spectrum, estimated from the Dirichlet
/// eigenvalues of the exhaustion stages, with `Kn`.
///
/// `μ₁(Ω_i)` decreases to `μ`. Stage `i ≥ 1` contributes the margin
/// `Kn + slack - (2μ₁(Ω_i) - μ₁(Ω_{i-1}))`, comparing `Kn` with the linear
/// extrapolation of the sequence; the check passes when the last one is
/// nonnegative.
pub fn cheng_check(ex: &Exhaustion, evidence: &CurvatureEvidence) -> Result<VerificationReport> {
    let n = require_cde(evidence)?;
    if ex.stages().len() < 3 {
        return Err(Error::InvalidArgument("need at least three exhaustion stages".into()));
    }
    let host = ex.host();
    let mu: Vec<f64> = ex
        .stages()
        .par_iter()
        .map(|s| dirichlet_spectrum(host, s).map(|sp| sp.mu1()))
        .collect::<Result<_>>()?;
    for (i, w) in mu.windows(2).enumerate() {
        if w[1] > w[0] + STAGE_MONOTONE_SLACK * w[0].abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "Dirichlet eigenvalue increased from stage {i} to {}: {} -> {}",
                i + 1,
                w[0],
                w[1]
            )));
        }
    }
    let k = evidence.hypothesis_k();
    let kn = k * n;
    let radii: Vec<f64> = ex.radii()[1..].iter().map(|&r| r as f64).collect();
    let margins: Vec<f64> = mu.windows(2).map(|w| kn + CHENG_SLACK - (2.0 * w[1] - w[0])).collect();
    let pass = *margins.last().expect("three stages") >= 0.0;
    Ok(blame(VerificationReport::builder("cheng"), evidence, pass)
        .conditional()
        .param("family", ex.family().to_string())
        .param("n", n)
        .param("k", k)
        .param("kn", kn)
        .param("mu_estimate", *mu.last().expect("stages"))
        .param("certified", evidence.all_certified())
        .points(radii, margins)
        .details(json!({ "radii": ex.radii(), "mu1": mu }))
        .note("grid holds stage radii from the second stage on")
        .finish(pass))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub c2: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub gamma: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub c3: f64,
    pub n: f64,
    pub k: f64,
    /// Minimal `C₁` for each `C₂` of the grid.
    pub frontier: Vec<FitPoint>,
    pub samples: usize,
    pub skipped: usize,
    pub times: Vec<f64>,
}

impl GaussianFit {
    pub fn c1(&self) -> f64 {
        self.frontier[0].c1
    }

    /// Compares this fit with one on a refined time sample: per `C₂`, the
    /// margin is `tolerance - |C₁'/C₁ - 1|`.
    pub fn stability_report(&self, refined: &GaussianFit, tolerance: f64) -> VerificationReport {
        let grid: Vec<f64> = self.frontier.iter().map(|p| p.c2).collect();
        let margins: Vec<f64> = self
            .frontier
            .iter()
            .zip(&refined.frontier)
            .map(|(a, b)| {
                let change = (b.c1 / a.c1 - 1.0).abs();
                if change.is_finite() { tolerance - change } else { f64::NEG_INFINITY }
            })
            .collect();
        let pass = margins.iter().all(|&m| m >= 0.0);
        VerificationReport::builder("gaussian-fit")
            .param("gamma", self.gamma)
            .param("epsilon", self.epsilon)
            .param("beta", self.beta)
            .param("c3", self.c3)
            .param("n", self.n)
            .param("k", self.k)
            .param("tolerance", tolerance)
            .points(grid, margins)
            .details(json!({ "fit": self, "refined": refined }))
            .note("grid holds C₂; margin is the tolerance minus the relative change of C₁ under time refinement")
            .finish(pass)
    }
}

/// All `(x, y, t)` with `t` from `times`.
pub fn all_pairs_sample(g: &MeasuredGraph, times: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(g.len() * g.len() * times.len());
    for &t in times {
        for x in 0..g.len() {
            for y in 0..g.len() {
                out.push((x, y, t));
            }
        }
    }
    out
}

/// For each `C₂`, the least `C₁` with
/// `p_t(x,y) ≤ C₁ e^{-(1-γ)μt} exp(-C₃d²/(4(1+2ε)t) + C₂√(Knt)) / √(m(B_x(√t))m(B_y(√t)))`
/// over the sample. Balls use hop radius `⌊√t⌋`, `μ = 0` and `C₃` is the
/// Gaussian constant of the off-diagonal corollary. Sample points outside
/// `t ≥ βd ∨ 1` are skipped.
#[allow(clippy::too_many_arguments)]
pub fn gaussian_fit(
    g: &MeasuredGraph,
    evidence: &CurvatureEvidence,
    gamma_: f64,
    epsilon: f64,
    beta: f64,
    c2_grid: &[f64],
    sample: &[(usize, usize, f64)],
) -> Result<GaussianFit> {
    let n = require_cde(evidence)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if c2_grid.is_empty() || c2_grid.iter().any(|c| !(*c >= 0.0)) {
        return Err(Error::InvalidArgument("C₂ grid must be nonempty and nonnegative".into()));
    }
    let p = DggParams::for_graph(g, gamma_, beta)?;
    let c3 = corollary_constant(&p);
    let k = evidence.hypothesis_k();
    let mut by_time: BTreeMap<u64, Vec<(usize, usize)>> = BTreeMap::new();
    let mut dist: Vec<Option<Vec<usize>>> = vec![None; g.len()];
    let mut skipped = 0usize;
    for &(x, y, t) in sample {
        if x >= g.len() || y >= g.len() || !(t > 0.0) {
            return Err(Error::InvalidArgument("sample point out of range".into()));
        }
        let d = dist[x].get_or_insert_with(|| g.distances_from(&[x]))[y] as f64;
        if t >= (beta * d).max(1.0) {
            by_time.entry(t.to_bits()).or_default().push((x, y));
        } else {
            skipped += 1;
        }
    }
    if by_time.is_empty() {
        return Err(Error::InvalidArgument("no sample point satisfies t ≥ βd ∨ 1".into()));
    }
    let sg = DirichletSemigroup::whole(g)?;
    // per sample: log of p_t √(m(B_x)m(B_y)) exp(C₃d²/(4(1+2ε)t)), and √(Knt)
    let entries: Vec<Vec<(f64, f64)>> = by_time
        .par_iter()
        .map(|(&bits, pts)| {
            let t = f64::from_bits(bits);
            let kernel = sg.kernel(t)?;
            let radius = t.sqrt().floor() as usize;
            let ball_mass: Vec<f64> = (0..g.len()).map(|v| g.ball(v, radius).measure(g)).collect();
            Ok(pts
                .iter()
                .map(|&(x, y)| {
                    let d = g.vertex_distance(x, y) as f64;
                    let lp = kernel.get(x, y).max(f64::MIN_POSITIVE).ln()
                        + 0.5 * (ball_mass[x] * ball_mass[y]).ln()
                        + c3 * d * d / (4.0 * (1.0 + 2.0 * epsilon) * t);
                    (lp, (k * n * t).sqrt())
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let flat: Vec<(f64, f64)> = entries.into_iter().flatten().collect();
    let frontier = c2_grid
        .iter()
        .map(|&c2| FitPoint {
            c2,
            c1: flat.iter().map(|&(lp, s)| lp - c2 * s).fold(f64::NEG_INFINITY, f64::max).exp(),
        })
        .collect();
    Ok(GaussianFit {
        gamma: gamma_,
        epsilon,
        beta,
        c3,
        n,
        k,
        frontier,
        samples: flat.len(),
        skipped,
        times: by_time.keys().map(|&b| f64::from_bits(b)).collect(),
    })
}

/// Inserts the geometric midpoint between consecutive times.
pub fn refine_times(times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * times.len());
    for w in times.windows(2) {
        out.push(w[0]);
        out.push((w[0] * w[1]).sqrt());
    }
    out.extend(times.last());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, MeasureMode};

    fn path(n: usize) -> MeasuredGraph {
        generate(Family::Path(n), MeasureMode::Unit).unwrap()
    }

    #[test]
    fn eigen_input_validation() {
        let g = path(6);
        let a = Subset::new(&g, [0, 1]).unwrap();
        let b = Subset::new(&g, [2, 3]).unwrap();
        let c = Subset::new(&g, [1, 4]).unwrap();
        assert!(EigenBoundInput::new(&g, vec![a.clone()]).is_err());
        assert_eq!(EigenBoundInput::new(&g, vec![a.clone(), b]).unwrap().delta(), 1);
        assert!(EigenBoundInput::new(&g, vec![a.clone(), c]).is_err());
        let far = Subset::new(&g, [4, 5]).unwrap();
        assert_eq!(EigenBoundInput::new(&g, vec![a, far]).unwrap().delta(), 3);
    }

    #[test]
    fn k2_mixing_is_flat() {
        let k2 = path(2);
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let rep = mixing_monitor(&k2, &grid).unwrap();
        assert!(rep.pass);
        assert!(rep.margins.iter().all(|m| m.abs() < 1e-12));
    }

    #[test]
    fn refine_inserts_midpoints() {
        let r = refine_times(&[1.0, 4.0, 16.0]);
        assert_eq!(r, vec![1.0, 2.0, 4.0, 8.0, 16.0]);
    }

    #[test]
    fn harnack_factor_limits() {
        let p = HarnackParams::new(2.0, 0.0, 0.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(p.log_factor(0, 1.0, 1.0), 0.0);
        assert_eq!(p.log_factor(1, 1.0, 1.0), f64::INFINITY);
        assert!(HarnackParams::new(2.0, 0.0, 0.0, 0.5, 2.0, 1.0).is_err());
    }
}
