//! The Davies-Gaffney-Grigor'yan bound and the machinery behind it.
//!
//! For `0 < γ < 1`, with `α = α(γ)`,
//!
//! ```text
//! Σ_{x∈B₁} Σ_{y∈B₂} p_t(x,y) m(x) m(y)
//!     ≤ √(m(B₁)m(B₂)) e^{-(1-γ)μt} exp(-ζ(αD_m t + 1, d(B₁,B₂)))
//! ```
//!
//! and for `γ = 1` the right side is `√(m(B₁)m(B₂)) exp(-½ζ(D_m t, d))`.
//! The proof monitors `e^{2(1-γ)μ₁t} Σ K u² m` with the weight
//! `K(t,x) = exp(2ζ(αD_m t + ½, d(x,B)))`, which satisfies the edge condition
//! checked by [`check_weight_condition`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{MeasuredGraph, Subset};
use crate::heat::DirichletSemigroup;
use crate::legendre::{asinh, chi, lambda_star, zeta};
use crate::report::VerificationReport;

/// Relative slack for the monotone sequence of the integral maximum principle.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// Allowed negative margin in the weight condition.
pub const WEIGHT_SLACK: f64 = 1e-10;

/// Allowed negative margin, relative to the right side, in the bound itself.
pub const BOUND_SLACK: f64 = 1e-9;

/// Pointwise agreement demanded between the two forms of the weight condition.
pub const FORM_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DggParams {
    pub gamma: f64,
    pub beta: f64,
    pub d_m: f64,
    /// Spectral bottom, or `μ₁(Ω)` on a Dirichlet domain.
    pub mu: f64,
}

impl DggParams {
    pub fn new(gamma: f64, beta: f64, d_m: f64, mu: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if !(d_m > 0.0 && d_m.is_finite()) {
            return Err(Error::InvalidArgument(format!("D_m must be positive, got {d_m}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu must be nonnegative, got {mu}")));
        }
        Ok(Self { gamma, beta, d_m, mu })
    }

    /// Parameters with `D_m` read off the graph and `μ = 0`.
    pub fn for_graph(g: &MeasuredGraph, gamma: f64, beta: f64) -> Result<Self> {
        Self::new(gamma, beta, g.structural_constants().d_m, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        alpha(self.gamma).expect("validated gamma")
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self::new(self.gamma, self.beta, self.d_m, mu)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma must lie in (0,1], got {gamma}")))
    }
}

/// `α(γ) = max{4, (√5-1)/γ + 2}`.
pub fn alpha(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(4f64.max((5f64.sqrt() - 1.0) / gamma + 2.0))
}

/// Shifted time `αD_m t + ½` at which the weight evaluates `ζ`.
fn weight_time(t: f64, p: &DggParams) -> f64 {
    p.alpha() * p.d_m * t + 0.5
}

/// `η(t,d) = ζ(αD_m t + ½, d)`, so that the weight is `e^{2η}`.
pub fn weight_exponent(t: f64, dist: usize, p: &DggParams) -> f64 {
    zeta(weight_time(t, p), dist as f64).expect("shifted time is positive")
}

/// `∂_t η = -αD_m χ(λ(αD_m t + ½, d))`.
pub fn weight_exponent_dt(t: f64, dist: usize, p: &DggParams) -> f64 {
    let l = lambda_star(weight_time(t, p), dist as f64).expect("shifted time is positive");
    -p.alpha() * p.d_m * chi(l)
}

/// `K(t,x) = exp(2ζ(αD_m t + ½, d(x)))`.
pub fn imp_weight(t: f64, dist: usize, p: &DggParams) -> f64 {
    (2.0 * weight_exponent(t, dist, p)).exp()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if let Some(t) = grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument(format!("grid times must be nonnegative, got {t}")));
    }
    Ok(())
}

/// Both sides of the edge condition at one `(t, x∼y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCondition {
    /// `RHS - LHS` of the `K` form divided by `K(t,x)K(t,y)`.
    pub k_form: f64,
    /// `RHS - LHS` of the `χ` form.
    pub chi_form: f64,
}

/// Evaluates the edge condition for distances `dx`, `dy` to `B`.
///
/// The `K` form is computed from weights rescaled by their maximum, so it
/// stays finite for large distances; dividing by `K̂_x K̂_y` then gives four
/// times the `χ` form exactly.
pub fn edge_condition(t: f64, dx: usize, dy: usize, p: &DggParams) -> EdgeCondition {
    let g = p.gamma;
    let (ex, ey) = (weight_exponent(t, dx, p), weight_exponent(t, dy, p));
    let (etx, ety) = (weight_exponent_dt(t, dx, p), weight_exponent_dt(t, dy, p));
    let top = ex.max(ey);
    let kx = (2.0 * (ex - top)).exp();
    let ky = (2.0 * (ey - top)).exp();
    let ktx = 2.0 * etx * kx;
    let kty = 2.0 * ety * ky;
    let lhs = (kx + ky - 2.0 * (1.0 - g) * (kx * ky).sqrt()).powi(2);
    let rhs = (ktx / p.d_m - 2.0 * g * kx) * (kty / p.d_m - 2.0 * g * ky);
    let k_form = (rhs - lhs) / (kx * ky);
    let chi_lhs = (chi(ex - ey) + g).powi(2);
    let chi_rhs = (etx / p.d_m - g) * (ety / p.d_m - g);
    EdgeCondition { k_form, chi_form: chi_rhs - chi_lhs }
}

/// Checks the edge condition of the weight for every edge and grid time.
pub fn check_weight_condition(
    g: &MeasuredGraph,
    b: &Subset,
    p: &DggParams,
    grid: &[f64],
) -> Result<VerificationReport> {
    check_grid(grid)?;
    let dist = g.distances_from(b.members());
    let edges: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    let rows: Vec<(f64, f64, (usize, usize))> = grid
        .par_iter()
        .map(|&t| {
            let mut worst = f64::INFINITY;
            let mut disagreement = 0.0f64;
            let mut at = (0, 0);
            for &(u, v) in &edges {
                let e = edge_condition(t, dist[u], dist[v], p);
                // margins are divided by 4 so both forms share a scale
                let scale = 1.0 + e.chi_form.abs();
                disagreement = disagreement.max((e.k_form / 4.0 - e.chi_form).abs() / scale);
                if e.k_form / 4.0 < worst {
                    worst = e.k_form / 4.0;
                    at = (u, v);
                }
            }
            (worst, disagreement, at)
        })
        .collect();
    let margins: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let disagreement = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let worst_edge = rows
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|r| (g.id(r.2 .0).to_owned(), g.id(r.2 .1).to_owned()));
    let pass = margins.iter().all(|&m| m >= -WEIGHT_SLACK) && disagreement <= FORM_AGREEMENT;
    Ok(VerificationReport::builder("weight-condition")
        .param("gamma", p.gamma)
        .param("alpha", p.alpha())
        .param("d_m", p.d_m)
        .param("b", b.iter().map(|v| g.id(v)).collect::<Vec<_>>())
        .param("edges", edges.len())
        .points(grid.to_vec(), margins)
        .details(json!({ "form_disagreement": disagreement, "worst_edge": worst_edge }))
        .note("margin per time is the minimum over edges of the chi form; the K form agrees up to the factor 4")
        .finish(pass))
}

/// `e^{2(1-γ)μ₁(Ω)t} Σ_{x∈Ω} K(t,x) u²(t,x) m(x)` with `u = P_t^Ω 1_B`.
pub fn imp_monitor(
    g: &MeasuredGraph,
    omega: &Subset,
    b: &Subset,
    p: &DggParams,
    grid: &[f64],
) -> Result<VerificationReport> {
    check_grid(grid)?;
    if !b.is_subset_of(omega) {
        return Err(Error::InvalidSubset("B must lie inside the domain".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    let sg = DirichletSemigroup::new(g, omega)?;
    let mu1 = sg.spectrum().mu1();
    let dist = g.distances_from(b.members());
    let f0 = b.indicator::<f64>();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| {
            let u = sg.evolve(&f0, t)?;
            let energy: f64 = omega
                .iter()
                .map(|x| imp_weight(t, dist[x], p) * u[x] * u[x] * g.measure(x))
                .sum();
            Ok((2.0 * (1.0 - p.gamma) * mu1 * t).exp() * energy)
        })
        .collect::<Result<_>>()?;
    let mut margins = Vec::with_capacity(values.len());
    margins.push(0.0);
    for w in values.windows(2) {
        margins.push((w[0] - w[1]) / w[0].abs().max(f64::MIN_POSITIVE));
    }
    let pass = margins.iter().all(|&m| m >= -MONOTONE_SLACK);
    Ok(VerificationReport::builder("imp-monitor")
        .param("gamma", p.gamma)
        .param("alpha", p.alpha())
        .param("d_m", p.d_m)
        .param("mu1", mu1)
        .param("domain_size", omega.len())
        .param("b", b.iter().map(|v| g.id(v)).collect::<Vec<_>>())
        .points(grid.to_vec(), margins)
        .details(json!({ "sequence": values }))
        .note("margin is the relative decrease from the previous grid time")
        .finish(pass))
}

/// Right side of the bound in theorem form.
pub fn dgg_rhs(m_b1: f64, m_b2: f64, dist: usize, t: f64, p: &DggParams) -> Result<f64> {
    if !(m_b1 > 0.0 && m_b2 > 0.0) {
        return Err(Error::InvalidArgument("set masses must be positive".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    let mass = (m_b1 * m_b2).sqrt();
    let d = dist as f64;
    if p.gamma < 1.0 {
        let decay = (-(1.0 - p.gamma) * p.mu * t).exp();
        Ok(mass * decay * (-zeta(p.alpha() * p.d_m * t + 1.0, d)?).exp())
    } else if t == 0.0 {
        Ok(if dist == 0 { mass } else { 0.0 })
    } else {
        Ok(mass * (-0.5 * zeta(p.d_m * t, d)?).exp())
    }
}

/// Gaussian constant of the corollary: `C₃` for `γ < 1`, `C` for `γ = 1`.
pub fn corollary_constant(p: &DggParams) -> f64 {
    if p.gamma < 1.0 {
        let a = p.alpha() * p.d_m;
        2.0 * a * p.beta * asinh(1.0 / (a * p.beta)) / (a + 1.0)
    } else {
        p.beta * asinh(1.0 / (p.d_m * p.beta))
    }
}

/// Right side of the bound in Gaussian form, with its constant.
pub fn dgg_corollary_rhs(m_b1: f64, m_b2: f64, dist: usize, t: f64, p: &DggParams) -> Result<(f64, f64)> {
    if !(m_b1 > 0.0 && m_b2 > 0.0) {
        return Err(Error::InvalidArgument("set masses must be positive".into()));
    }
    let d = dist as f64;
    let threshold = if p.gamma < 1.0 { (p.beta * d).max(1.0) } else { p.beta * d };
    if !(t >= threshold) || !(t > 0.0) {
        return Err(Error::Precondition(format!(
            "corollary regime not applicable: need t ≥ {threshold}, got {t}"
        )));
    }
    let c = corollary_constant(p);
    let decay = if p.gamma < 1.0 { (-(1.0 - p.gamma) * p.mu * t).exp() } else { 1.0 };
    Ok(((m_b1 * m_b2).sqrt() * decay * (-c * d * d / (4.0 * t)).exp(), c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DggMode {
    Theorem,
    Corollary,
}

impl std::str::FromStr for DggMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(Self::Theorem),
            "corollary" => Ok(Self::Corollary),
            _ => Err(Error::Parse(format!("mode must be theorem or corollary, got '{s}'"))),
        }
    }
}

/// Compares the heat flow between `b1` and `b2` with the bound on a grid.
///
/// Without a domain the whole-graph kernel is used and `μ = 0`, the bottom of
/// the spectrum of a finite connected graph. With a domain `Ω` the Dirichlet
/// kernel is used and `μ = μ₁(Ω)`; `params.mu` is ignored in both cases.
/// In corollary mode grid times outside the regime are skipped.
pub fn verify_dgg(
    g: &MeasuredGraph,
    b1: &Subset,
    b2: &Subset,
    params: &DggParams,
    grid: &[f64],
    mode: DggMode,
    domain: Option<&Subset>,
) -> Result<VerificationReport> {
    check_grid(grid)?;
    let whole = Subset::whole(g);
    let omega = domain.unwrap_or(&whole);
    if !b1.is_subset_of(omega) || !b2.is_subset_of(omega) {
        return Err(Error::InvalidSubset("B₁ and B₂ must lie inside the domain".into()));
    }
    let sg = DirichletSemigroup::new(g, omega)?;
    let (mu, mu_source) = match domain {
        Some(_) => (sg.spectrum().mu1(), "dirichlet_mu1"),
        None => (0.0, "finite_graph_spectral_bottom"),
    };
    let p = params.with_mu(mu)?;
    let dist = g.subset_distance(b1, b2);
    let (m1, m2) = (b1.measure(g), b2.measure(g));
    let times: Vec<f64> = match mode {
        DggMode::Theorem => grid.to_vec(),
        DggMode::Corollary => grid
            .iter()
            .copied()
            .filter(|&t| dgg_corollary_rhs(m1, m2, dist, t, &p).is_ok())
            .collect(),
    };
    if times.is_empty() {
        return Err(Error::Precondition("no grid time lies in the corollary regime".into()));
    }
    let rows: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| {
            let lhs = sg.kernel(t)?.flow(g, b1, b2);
            let rhs = match mode {
                DggMode::Theorem => dgg_rhs(m1, m2, dist, t, &p)?,
                DggMode::Corollary => dgg_corollary_rhs(m1, m2, dist, t, &p)?.0,
            };
            Ok((lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let margins: Vec<f64> = rows.iter().map(|(l, r)| r - l).collect();
    let pass = rows.iter().all(|(l, r)| r - l >= -BOUND_SLACK * r.abs());
    let mut builder = VerificationReport::builder("dgg")
        .param("mode", mode)
        .param("gamma", p.gamma)
        .param("alpha", p.alpha())
        .param("beta", p.beta)
        .param("d_m", p.d_m)
        .param("mu", mu)
        .param("mu_source", mu_source)
        .param("distance", dist)
        .param("m_b1", m1)
        .param("m_b2", m2)
        .param("b1", b1.iter().map(|v| g.id(v)).collect::<Vec<_>>())
        .param("b2", b2.iter().map(|v| g.id(v)).collect::<Vec<_>>());
    if mode == DggMode::Corollary {
        builder = builder.param("constant", corollary_constant(&p));
    }
    if dist == 0 {
        builder = builder.note("B₁ and B₂ overlap or touch: distance 0");
    }
    if times.len() < grid.len() {
        builder = builder.note(format!("{} grid times outside the corollary regime skipped", grid.len() - times.len()));
    }
    Ok(builder
        .points(times, margins)
        .details(json!({
            "lhs": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
            "rhs": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        }))
        .finish(pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(1.0).unwrap(), 4.0);
        assert_eq!(alpha((5f64.sqrt() - 1.0) / 2.0).unwrap(), 4.0);
        assert!((alpha(0.1).unwrap() - ((5f64.sqrt() - 1.0) / 0.1 + 2.0)).abs() < 1e-13);
        assert!((alpha(0.1).unwrap() - 14.3607).abs() < 1e-4);
        assert!(alpha(0.0).is_err() && alpha(1.5).is_err());
    }

    #[test]
    fn weight_examples() {
        let p = DggParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(imp_weight(3.0, 0, &p), 1.0);
        assert!(imp_weight(0.0, 3, &p) > imp_weight(1.0, 3, &p));
        assert!(imp_weight(1.0, 3, &p) > imp_weight(2.0, 3, &p));
        let z = 2f64.asinh() - (1.25f64).sqrt() + 0.5;
        assert!((z - 0.8256).abs() < 1e-4);
        assert!((imp_weight(0.0, 1, &p) - (2.0 * z).exp()).abs() < 1e-13);
    }

    #[test]
    fn edge_forms_agree() {
        let p = DggParams::new(0.5, 1.0, 2.0, 0.0).unwrap();
        for &t in &[0.0, 0.3, 2.0, 10.0] {
            for &(a, b) in &[(0, 1), (1, 2), (4, 5), (3, 3), (20, 21)] {
                let e = edge_condition(t, a, b, &p);
                assert!((e.k_form - 4.0 * e.chi_form).abs() < 1e-9 * (1.0 + e.chi_form.abs()));
                assert!(e.chi_form >= -1e-10, "t={t} ({a},{b}) {}", e.chi_form);
            }
        }
        // both endpoints in B: (2γ)² on each side
        let e = edge_condition(1.0, 0, 0, &p);
        assert_eq!((e.chi_form, e.k_form), (0.0, 0.0));
    }

    #[test]
    fn rhs_examples() {
        let p = DggParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(dgg_rhs(2.0, 8.0, 0, 0.0, &p).unwrap(), 4.0);
        assert_eq!(dgg_rhs(2.0, 8.0, 1, 0.0, &p).unwrap(), 0.0);
        let z11 = zeta(1.0, 1.0).unwrap();
        for d in [1usize, 3, 7] {
            let r = dgg_rhs(1.0, 1.0, d, d as f64, &p).unwrap();
            assert!((r.ln() + 0.5 * d as f64 * z11).abs() < 1e-12);
        }
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let q = DggParams::new(golden, 1.0, 1.0, 0.3).unwrap();
        let r = dgg_rhs(1.0, 1.0, 0, 2.0, &q).unwrap();
        assert!((r.ln() / (-0.3 * 2.0) - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let (_, c3) = dgg_corollary_rhs(1.0, 1.0, 2, 2.0, &q).unwrap();
        assert!((c3 - 8.0 * 0.25f64.asinh() / 5.0).abs() < 1e-12);
        assert!((c3 - 0.3959).abs() < 1e-4);
        let (_, c) = dgg_corollary_rhs(1.0, 1.0, 2, 2.0, &p).unwrap();
        assert!((c - 1f64.asinh()).abs() < 1e-15);
        assert!(dgg_corollary_rhs(1.0, 1.0, 3, 2.0, &p).is_err());
        assert!(dgg_corollary_rhs(1.0, 1.0, 0, 0.5, &q).is_err());
        let (v, _) = dgg_corollary_rhs(4.0, 1.0, 0, 1.0, &q).unwrap();
        assert!((v - 2.0 * (-(1.0 - golden) * 0.3f64).exp()).abs() < 1e-15);
    }
}
