//! Curvature-dimension evidence at single vertices.
//!
//! `CD(n,K)` asks `Γ₂(f) ≥ (Δf)²/n + KΓ(f)`; the exponential variant
//! `CDE(n,K)` subtracts `Γ(f, Γ(f)/f)` on the left and quantifies over
//! positive `f` with `Δf(x) < 0`. Both sides at `x` depend only on `f` over the
//! 2-ball of `x`, so the search below runs on that ball.
//!
//! A certificate is optimization evidence. The reported `bound_k` is the
//! smallest ratio found, which can only overestimate the infimum; the module
//! never claims a proven lower curvature bound.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{MeasuredGraph, Subset};
use crate::operators::{gamma, gamma2, laplacian};

/// `Δf(x)` must be below this for a CDE test function to count.
pub const ADMISSIBLE_LAPLACIAN: f64 = -1e-12;

/// Restart dispersion under which a certificate counts as certified.
pub const CERTIFIED_DISPERSION: f64 = 1e-4;

/// Added to the dispersion when forming the certificate margin.
pub const BASE_MARGIN: f64 = 1e-6;

const LOG_CLAMP: f64 = 30.0;
const CD_SCALE_CAP: f64 = 1e6;
const MIN_GAMMA: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    pub fn new(n: f64) -> Result<Self> {
        if n.is_infinite() && n > 0.0 {
            Ok(Self::Infinite)
        } else if n > 0.0 {
            Ok(Self::Finite(n))
        } else {
            Err(Error::InvalidArgument(format!("dimension must be positive, got {n}")))
        }
    }

    /// `1/n`, zero for `n = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(n) => 1.0 / n,
            Self::Infinite => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(n) => Some(n),
            Self::Infinite => None,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(n) => write!(f, "{n}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinite),
            other => {
                let n: f64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("dimension must be a number or 'inf', got '{other}'")))?;
                Self::new(n)
            }
        }
    }
}

impl Serialize for Dimension {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            Self::Finite(n) => s.serialize_f64(*n),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(n) => Dimension::new(n).map_err(serde::de::Error::custom),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvatureKind {
    #[serde(rename = "CD")]
    Cd,
    #[serde(rename = "CDE")]
    Cde,
}

impl FromStr for CurvatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cd" => Ok(Self::Cd),
            "cde" => Ok(Self::Cde),
            _ => Err(Error::Parse(format!("curvature kind must be CD or CDE, got '{s}'"))),
        }
    }
}

impl fmt::Display for CurvatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cd => "CD",
            Self::Cde => "CDE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    Inconclusive,
}

pub fn cd_ratio(g: &MeasuredGraph, f: &[f64], x: usize, n: Dimension) -> Result<f64> {
    check_len(g, f)?;
    let gam = gamma(g, f, f, x);
    if !(gam > 0.0) {
        return Err(Error::Precondition(format!("Γ(f) vanishes at {}", g.id(x))));
    }
    let lap = laplacian(g, f, x);
    Ok((gamma2(g, f, x) - n.reciprocal() * lap * lap) / gam)
}

pub fn cde_ratio(g: &MeasuredGraph, f: &[f64], x: usize, n: Dimension) -> Result<f64> {
    check_len(g, f)?;
    if let Some(v) = g.ball(x, 2).iter().find(|&v| !(f[v] > 0.0)) {
        return Err(Error::Precondition(format!("test function is not positive at {}", g.id(v))));
    }
    let lap = laplacian(g, f, x);
    if !(lap < 0.0) {
        return Err(Error::Precondition(format!(
            "not admissible: Δf({}) = {lap} is not negative",
            g.id(x)
        )));
    }
    let gam = gamma(g, f, f, x);
    if !(gam > 0.0) {
        return Err(Error::Precondition(format!("Γ(f) vanishes at {}", g.id(x))));
    }
    Ok((gamma2(g, f, x) - gamma_gamma_over_f(g, f, x) - n.reciprocal() * lap * lap) / gam)
}

fn check_len(g: &MeasuredGraph, f: &[f64]) -> Result<()> {
    if f.len() == g.len() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "function has {} values for {} vertices",
            f.len(),
            g.len()
        )))
    }
}

/// `Γ(f, Γ(f)/f)(x)`.
fn gamma_gamma_over_f(g: &MeasuredGraph, f: &[f64], x: usize) -> f64 {
    let q = |v: usize| gamma(g, f, f, v) / f[v];
    let (fx, qx) = (f[x], q(x));
    let sum: f64 = g.neighbors(x).iter().map(|&(y, w)| w * (f[y] - fx) * (q(y) - qx)).sum();
    sum / (2.0 * g.measure(x))
}

/// Search settings; every restart draws from `ChaCha8(seed + index)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    /// Ratio evaluations per restart.
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 64, budget: 50_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCertificate {
    pub vertex: String,
    pub dimension: Dimension,
    pub kind: CurvatureKind,
    /// Smallest ratio found.
    pub bound_k: f64,
    /// Test function on the whole vertex set that attains `bound_k`.
    pub witness: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub evaluations: usize,
    /// 25th-percentile restart minimum minus the best one.
    pub dispersion: f64,
    pub margin: f64,
    pub status: CertificateStatus,
}

impl CurvatureCertificate {
    /// The `K ≥ 0` for which the evidence supports `kind(n, -K)`: the negative
    /// part of `bound_k - margin`.
    pub fn hypothesis_k(&self) -> f64 {
        (-(self.bound_k - self.margin)).max(0.0)
    }

    /// Re-evaluates the ratio on the stored witness.
    pub fn reevaluate(&self, g: &MeasuredGraph) -> Result<f64> {
        let x = g.index_of(&self.vertex)?;
        match self.kind {
            CurvatureKind::Cd => cd_ratio(g, &self.witness, x, self.dimension),
            CurvatureKind::Cde => cde_ratio(g, &self.witness, x, self.dimension),
        }
    }
}

/// The 2-ball of a vertex as a standalone graph; `Γ₂`, `Δ` and
/// `Γ(f, Γ(f)/f)` at the center agree with the parent graph.
struct LocalProblem {
    graph: MeasuredGraph,
    ball: Subset,
    center: usize,
    /// Local indices of the free coordinates (everything but the center).
    free: Vec<usize>,
    kind: CurvatureKind,
    inv_n: f64,
}

impl LocalProblem {
    fn new(g: &MeasuredGraph, x: usize, kind: CurvatureKind, n: Dimension) -> Result<Self> {
        let ball = g.ball(x, 2);
        let graph = g.induced(&ball)?;
        let center = ball.members().binary_search(&x).expect("center in its ball");
        let free = (0..ball.len()).filter(|&i| i != center).collect();
        Ok(Self { graph, ball, center, free, kind, inv_n: n.reciprocal() })
    }

    fn dim(&self) -> usize {
        self.free.len()
    }

    fn values(&self, p: &[f64]) -> Vec<f64> {
        let base = match self.kind {
            CurvatureKind::Cd => 0.0,
            CurvatureKind::Cde => 1.0,
        };
        let mut f = vec![base; self.graph.len()];
        for (&i, &w) in self.free.iter().zip(p) {
            f[i] = match self.kind {
                CurvatureKind::Cd => w,
                CurvatureKind::Cde => w.exp(),
            };
        }
        f
    }

    /// Ratio at parameter `p`, `+∞` outside the admissible region.
    fn objective(&self, p: &[f64]) -> f64 {
        let g = &self.graph;
        let x = self.center;
        match self.kind {
            CurvatureKind::Cd => {
                if p.iter().any(|w| !(w.abs() <= CD_SCALE_CAP)) {
                    return f64::INFINITY;
                }
                let f = self.values(p);
                let gam = gamma(g, &f, &f, x);
                if !(gam > MIN_GAMMA) {
                    return f64::INFINITY;
                }
                let lap = laplacian(g, &f, x);
                (gamma2(g, &f, x) - self.inv_n * lap * lap) / gam
            }
            CurvatureKind::Cde => {
                if p.iter().any(|w| !(w.abs() <= LOG_CLAMP)) {
                    return f64::INFINITY;
                }
                let f = self.values(p);
                let lap = laplacian(g, &f, x);
                if !(lap < ADMISSIBLE_LAPLACIAN) {
                    return f64::INFINITY;
                }
                let gam = gamma(g, &f, &f, x);
                if !(gam > MIN_GAMMA) {
                    return f64::INFINITY;
                }
                (gamma2(g, &f, x) - gamma_gamma_over_f(g, &f, x) - self.inv_n * lap * lap) / gam
            }
        }
    }

    fn start(&self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        for attempt in 0..4096 {
            let spread = if attempt < 2048 { 2.0 } else { 0.5 };
            let p: Vec<f64> = (0..self.dim()).map(|_| rng.random_range(-spread..spread)).collect();
            if self.objective(&p).is_finite() {
                return Some(p);
            }
        }
        None
    }
}

struct Minimum {
    point: Vec<f64>,
    value: f64,
    evaluations: usize,
}

/// Nelder-Mead with standard coefficients, restarted from its own best vertex
/// while that keeps improving and the budget lasts.
fn nelder_mead(obj: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64, budget: usize) -> Minimum {
    let n = x0.len();
    let mut evals = 0usize;
    let mut best = Minimum { value: obj(&x0), point: x0, evaluations: 1 };
    evals += 1;
    if n == 0 {
        return best;
    }
    let mut scale = step;
    while evals < budget {
        let before = best.value;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best.point.clone(), best.value));
        for i in 0..n {
            let mut p = best.point.clone();
            p[i] += scale;
            let mut v = obj(&p);
            evals += 1;
            if !v.is_finite() {
                p[i] -= 2.0 * scale;
                v = obj(&p);
                evals += 1;
            }
            simplex.push((p, v));
        }
        while evals < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let lo = simplex[0].1;
            let hi = simplex[n].1;
            if hi.is_finite() && (hi - lo).abs() <= 1e-13 * (1.0 + lo.abs()) {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (p, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(p) {
                    *c += v / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
            };
            let xr = along(1.0);
            let fr = obj(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = obj(&xe);
                evals += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(0.5);
                    let fc = obj(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-0.5);
                    let fc = obj(&xc);
                    (xc, fc)
                };
                evals += 1;
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let anchor = simplex[0].0.clone();
                    for (p, v) in simplex.iter_mut().skip(1) {
                        for (pi, ai) in p.iter_mut().zip(&anchor) {
                            *pi = ai + 0.5 * (*pi - ai);
                        }
                        *v = obj(p);
                        evals += 1;
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best.value {
            best.point = simplex[0].0.clone();
            best.value = simplex[0].1;
        }
        let gain = before - best.value;
        if !(gain > 1e-12 * (1.0 + best.value.abs())) {
            if scale < 1e-3 {
                break;
            }
            scale *= 0.1;
        }
    }
    best.evaluations = evals;
    best
}

/// Multistart search for the infimum of the `kind` ratio at `x`.
pub fn estimate_curvature(
    g: &MeasuredGraph,
    x: usize,
    n: Dimension,
    kind: CurvatureKind,
    opts: &SearchOptions,
) -> Result<CurvatureCertificate> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    if x >= g.len() {
        return Err(Error::UnknownVertex(format!("index {x}")));
    }
    let problem = LocalProblem::new(g, x, kind, n)?;
    let obj = |p: &[f64]| problem.objective(p);
    let runs: Vec<Option<Minimum>> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let x0 = problem.start(&mut rng)?;
            Some(nelder_mead(&obj, x0, 0.5, opts.budget))
        })
        .collect();
    let evaluations = runs.iter().flatten().map(|m| m.evaluations).sum();
    let mut ok: Vec<(usize, Minimum)> = runs
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| m.filter(|m| m.value.is_finite()).map(|m| (i, m)))
        .collect();
    if ok.is_empty() {
        return Err(Error::Numerical(format!(
            "no admissible starting point found at {}",
            g.id(x)
        )));
    }
    ok.sort_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)));
    let best = &ok[0].1;
    let quartile = ok[(ok.len() - 1) / 4].1.value;
    let dispersion = quartile - best.value;
    let local = problem.values(&best.point);
    let mut witness = vec![local[problem.center]; g.len()];
    for (i, v) in problem.ball.iter().enumerate() {
        witness[v] = local[i];
    }
    Ok(CurvatureCertificate {
        vertex: g.id(x).to_owned(),
        dimension: n,
        kind,
        bound_k: best.value,
        witness,
        restarts: opts.restarts,
        seed: opts.seed,
        evaluations,
        dispersion,
        margin: BASE_MARGIN + dispersion,
        status: if dispersion < CERTIFIED_DISPERSION {
            CertificateStatus::Certified
        } else {
            CertificateStatus::Inconclusive
        },
    })
}

/// Certificates for a set of vertices sharing one `(n, kind)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEvidence {
    pub dimension: Dimension,
    pub kind: CurvatureKind,
    pub certificates: Vec<CurvatureCertificate>,
}

impl CurvatureEvidence {
    pub fn collect(
        g: &MeasuredGraph,
        vertices: &Subset,
        n: Dimension,
        kind: CurvatureKind,
        opts: &SearchOptions,
    ) -> Result<Self> {
        let certificates = vertices
            .iter()
            .map(|v| estimate_curvature(g, v, n, kind, opts))
            .collect::<Result<_>>()?;
        Ok(Self { dimension: n, kind, certificates })
    }

    /// Largest hypothesis `K` over the certified vertices.
    pub fn hypothesis_k(&self) -> f64 {
        self.certificates.iter().map(|c| c.hypothesis_k()).fold(0.0, f64::max)
    }

    pub fn all_certified(&self) -> bool {
        self.certificates.iter().all(|c| c.status == CertificateStatus::Certified)
    }

    /// Errors unless every vertex of `set` carries a certificate of this kind.
    pub fn require_cover(&self, g: &MeasuredGraph, set: &Subset) -> Result<()> {
        for v in set.iter() {
            if !self.certificates.iter().any(|c| c.vertex == g.id(v)) {
                return Err(Error::Precondition(format!(
                    "no curvature certificate at vertex {}",
                    g.id(v)
                )));
            }
        }
        Ok(())
    }

    pub fn worst(&self) -> Option<&CurvatureCertificate> {
        self.certificates
            .iter()
            .max_by(|a, b| a.hypothesis_k().total_cmp(&b.hypothesis_k()))
    }
}

impl From<CurvatureCertificate> for CurvatureEvidence {
    fn from(c: CurvatureCertificate) -> Self {
        Self { dimension: c.dimension, kind: c.kind, certificates: vec![c] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffClause {
    /// `φ(x) < c(1+R√K)/(2R²)`.
    Small,
    /// The two bounds on `φ²Δ(1/φ)` and `φ³Γ(1/φ)` with `φ > 0` around `x`.
    Regular,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffVertex {
    pub vertex: String,
    pub phi: f64,
    pub clause: CutoffClause,
    /// `φ²Δ(1/φ)(x)` when `φ` has no zero on the closed neighborhood.
    pub laplacian_term: Option<f64>,
    /// `φ³Γ(1/φ)(x)`, same condition.
    pub gradient_term: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub center: String,
    pub c: f64,
    pub r: f64,
    pub k: f64,
    pub center_is_one: bool,
    pub vanishes_off_support: bool,
    pub vertices: Vec<CutoffVertex>,
    pub pass: bool,
}

/// Checks that `phi` is a `(c,R)`-strong cut-off function centered at `x0`
/// and supported on `support`.
pub fn verify_strong_cutoff(
    g: &MeasuredGraph,
    phi: &[f64],
    x0: usize,
    support: &Subset,
    c: f64,
    r: f64,
    k: f64,
) -> Result<CutoffReport> {
    check_len(g, phi)?;
    if let Some(v) = (0..g.len()).find(|&v| !(0.0..=1.0).contains(&phi[v])) {
        return Err(Error::InvalidArgument(format!(
            "cut-off function leaves [0,1] at {}: {}",
            g.id(v),
            phi[v]
        )));
    }
    if !(c > 0.0 && r > 0.0 && k >= 0.0) {
        return Err(Error::InvalidArgument("need c > 0, R > 0 and K ≥ 0".into()));
    }
    let d_m = g.structural_constants().d_m;
    let lift = 1.0 + r * k.sqrt();
    let small = c * lift / (2.0 * r * r);
    let lap_cap = d_m * c * lift / (r * r);
    let grad_cap = d_m * c / (r * r);
    let center_is_one = phi[x0] == 1.0;
    let vanishes_off_support = (0..g.len()).all(|v| support.contains(v) || phi[v] == 0.0);
    let mut vertices = Vec::with_capacity(support.len());
    for x in support.iter() {
        let nonvanishing = phi[x] > 0.0 && g.neighbors(x).iter().all(|&(y, _)| phi[y] > 0.0);
        let (laplacian_term, gradient_term) = if nonvanishing {
            let inv: Vec<f64> = phi.iter().map(|&p| if p > 0.0 { 1.0 / p } else { 0.0 }).collect();
            let p = phi[x];
            (Some(p * p * laplacian(g, &inv, x)), Some(p * p * p * gamma(g, &inv, &inv, x)))
        } else {
            (None, None)
        };
        let clause = if phi[x] < small {
            CutoffClause::Small
        } else if matches!((laplacian_term, gradient_term), (Some(l), Some(q)) if l <= lap_cap && q <= grad_cap) {
            CutoffClause::Regular
        } else {
            CutoffClause::Neither
        };
        vertices.push(CutoffVertex { vertex: g.id(x).to_owned(), phi: phi[x], clause, laplacian_term, gradient_term });
    }
    let pass = center_is_one && vanishes_off_support && vertices.iter().all(|v| v.clause != CutoffClause::Neither);
    Ok(CutoffReport {
        center: g.id(x0).to_owned(),
        c,
        r,
        k,
        center_is_one,
        vanishes_off_support,
        vertices,
        pass,
    })
}
