use clap::{Args, ValueEnum};
use dggkit::curvature::{CertificateStatus, CurvatureEvidence, CurvatureKind};
use dggkit::dgg::{self, DggMode, DggParams};
use dggkit::estimates::{self, EigenBoundInput, HarnackParams, LiYauForm, FLAT_K};
use dggkit::graph::{Exhaustion, InfiniteFamily};
use dggkit::heat::DirichletSemigroup;
use dggkit::legendre;
use dggkit::operators::dirichlet_spectrum;
use dggkit::report::SCHEMA;
use dggkit::{MeasureMode, MeasuredGraph, Subset};
use serde_json::json;

use crate::input::{parse_grid, parse_list, parse_set, parse_usize_list, EvidenceArgs, GraphArgs, SearchArgs};
use crate::{Failure, Outcome};

fn domain(g: &MeasuredGraph, spec: &Option<String>) -> Result<Subset, Failure> {
    match spec {
        Some(s) => parse_set(g, s),
        None => Ok(Subset::whole(g)),
    }
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    #[command(flatten)]
    graph: GraphArgs,
}

pub fn info(a: &InfoArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let c = g.structural_constants();
    let rows = vec![
        vec!["vertices".into(), g.len().to_string()],
        vec!["edges".into(), g.edge_count().to_string()],
        vec!["total_measure".into(), g.total_measure().to_string()],
        vec!["diameter".into(), g.diameter().to_string()],
        vec!["d_m".into(), c.d_m.to_string()],
        vec!["d_mu".into(), c.d_mu.to_string()],
    ];
    let value = json!({
        "schema": SCHEMA,
        "command": "info",
        "vertices": g.len(),
        "edges": g.edge_count(),
        "total_measure": g.total_measure(),
        "diameter": g.diameter(),
        "d_m": c.d_m,
        "d_mu": c.d_mu,
        "m_min": c.m_min,
        "m_max": c.m_max,
        "mu_min": c.mu_min,
    });
    let summary = format!("{} vertices, {} edges, D_m = {}, D_mu = {}", g.len(), g.edge_count(), c.d_m, c.d_mu);
    Ok(Outcome::data(value, Some(rows), true, summary))
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Dirichlet domain (default: the whole graph)
    #[arg(long)]
    domain: Option<String>,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let dom = domain(&g, &a.domain)?;
    let sp = dirichlet_spectrum(&g, &dom)?;
    let values = sp.eigenvalues().to_vec();
    let mut rows = vec![vec!["index".to_owned(), "eigenvalue".to_owned()]];
    rows.extend(values.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), v.to_string()]));
    let value = json!({
        "schema": SCHEMA,
        "command": "spectrum",
        "domain_size": dom.len(),
        "eigenvalues": values,
        "orthonormality_defect": sp.orthonormality_defect(&g),
        "residual": sp.eigen_residual(&g),
    });
    Ok(Outcome::data(value, Some(rows), true, format!("{} eigenvalues, bottom {}", values.len(), values[0])))
}

#[derive(Args, Debug)]
pub struct HeatArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Dirichlet domain (default: the whole graph)
    #[arg(long)]
    domain: Option<String>,
    /// Source vertex id (default: first vertex of the domain)
    #[arg(long)]
    x: Option<String>,
    /// Target vertex id (default: the source)
    #[arg(long)]
    y: Option<String>,
    /// Time grid: start:stop:count, start:stop:countL or a comma list
    #[arg(long, default_value = "0:5:11")]
    t: String,
}

pub fn heat(a: &HeatArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let dom = domain(&g, &a.domain)?;
    let grid = parse_grid(&a.t)?;
    let x = match &a.x {
        Some(id) => g.index_of(id)?,
        None => dom.members()[0],
    };
    let y = match &a.y {
        Some(id) => g.index_of(id)?,
        None => x,
    };
    if !dom.contains(x) || !dom.contains(y) {
        return Err(Failure::usage("x and y must lie in the domain"));
    }
    let sg = DirichletSemigroup::new(&g, &dom)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut mass = Vec::with_capacity(grid.len());
    for &t in &grid {
        let p = sg.kernel(t)?;
        values.push(p.get(x, y));
        mass.push(p.row_mass(&g, x));
    }
    let mut rows = vec![vec!["t".to_owned(), "value".to_owned(), "row_mass".to_owned()]];
    rows.extend(grid.iter().zip(&values).zip(&mass).map(|((t, v), m)| vec![t.to_string(), v.to_string(), m.to_string()]));
    let value = json!({
        "schema": SCHEMA,
        "command": "heat",
        "x": g.id(x),
        "y": g.id(y),
        "domain_size": dom.len(),
        "times": grid,
        "values": values,
        "row_mass": mass,
    });
    Ok(Outcome::data(value, Some(rows), true, format!("p_t({}, {}) on {} times", g.id(x), g.id(y), grid.len())))
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    /// Time t > 0
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    /// Distance d ≥ 0
    #[arg(long, allow_negative_numbers = true)]
    d: f64,
}

pub fn zeta(a: &ZetaArgs) -> Result<Outcome, Failure> {
    let z = legendre::zeta(a.t, a.d)?;
    let value = json!({
        "schema": SCHEMA,
        "command": "zeta",
        "t": a.t,
        "d": a.d,
        "zeta": z,
        "lambda_star": legendre::lambda_star(a.t, a.d)?,
    });
    let rows = vec![vec!["t".into(), "d".into(), "zeta".into()], vec![a.t.to_string(), a.d.to_string(), z.to_string()]];
    let mut out = Outcome::data(value, Some(rows), true, format!("zeta({}, {}) = {z}", a.t, a.d));
    out.text = Some(format!("{z:.7}\n"));
    Ok(out)
}

#[derive(Args, Debug)]
pub struct CurvatureArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Vertices to certify (default: all)
    #[arg(long)]
    at: Option<String>,
    /// CD or CDE
    #[arg(long, default_value = "CDE")]
    kind: CurvatureKind,
    #[command(flatten)]
    search: SearchArgs,
}

pub fn curvature(a: &CurvatureArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let at = domain(&g, &a.at)?;
    let ev = CurvatureEvidence::collect(&g, &at, a.search.n, a.kind, &a.search.options())?;
    let mut rows = vec![["vertex", "bound_k", "dispersion", "margin", "status"].map(String::from).to_vec()];
    for c in &ev.certificates {
        let status = serde_json::to_value(c.status).expect("status serializes");
        rows.push(vec![
            c.vertex.clone(),
            c.bound_k.to_string(),
            c.dispersion.to_string(),
            c.margin.to_string(),
            status.as_str().unwrap_or("?").to_owned(),
        ]);
    }
    let certified = ev.certificates.iter().filter(|c| c.status == CertificateStatus::Certified).count();
    let summary = format!(
        "{}({}, K) at {} vertices: {certified} certified, hypothesis K = {:e}",
        a.kind,
        a.search.n,
        ev.certificates.len(),
        ev.hypothesis_k()
    );
    let json = serde_json::to_string_pretty(&ev).expect("evidence serializes");
    Ok(Outcome { json, csv: Some(rows), text: None, pass: ev.all_certified(), summary })
}

#[derive(Args, Debug)]
pub struct DggArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// First set B₁
    #[arg(long)]
    b1: String,
    /// Second set B₂
    #[arg(long)]
    b2: String,
    /// γ in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// β > 0 of the Gaussian corollary
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Time grid: start:stop:count, start:stop:countL or a comma list
    #[arg(long, default_value = "0:20:41")]
    t: String,
    /// Bound form: theorem (ζ) or corollary (Gaussian)
    #[arg(long, default_value = "theorem")]
    mode: DggMode,
    /// Dirichlet domain Ω; μ becomes μ₁(Ω) (default: the whole graph, μ = 0)
    #[arg(long)]
    domain: Option<String>,
}

pub fn dgg_verify(a: &DggArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let (b1, b2) = (parse_set(&g, &a.b1)?, parse_set(&g, &a.b2)?);
    let dom = a.domain.as_ref().map(|s| parse_set(&g, s)).transpose()?;
    let p = DggParams::for_graph(&g, a.gamma, a.beta)?;
    let r = dgg::verify_dgg(&g, &b1, &b2, &p, &parse_grid(&a.t)?, a.mode, dom.as_ref())?;
    Ok(Outcome::report(&r))
}

#[derive(Args, Debug)]
pub struct ImpArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Dirichlet domain Ω (default: the whole graph)
    #[arg(long)]
    domain: Option<String>,
    /// Initial set B; the datum is its indicator
    #[arg(long)]
    b: String,
    /// γ in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Time grid: start:stop:count, start:stop:countL or a comma list
    #[arg(long, default_value = "0:10:41")]
    t: String,
}

pub fn imp_monitor(a: &ImpArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let dom = domain(&g, &a.domain)?;
    let b = parse_set(&g, &a.b)?;
    let p = DggParams::for_graph(&g, a.gamma, a.beta)?;
    let r = dgg::imp_monitor(&g, &dom, &b, &p, &parse_grid(&a.t)?)?;
    Ok(Outcome::report(&r))
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// One of k ≥ 2 disjoint sets (repeat the flag)
    #[arg(long = "set", required = true)]
    sets: Vec<String>,
    /// Use the simplified bound 4D_m L²/(σ asinh(1/σ) δ²)
    #[arg(long)]
    simplified: bool,
    /// σ of the simplified bound (default: the edge of its validity range)
    #[arg(long, requires = "simplified")]
    sigma: Option<f64>,
}

pub fn eigenbound(a: &EigenArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let sets = a.sets.iter().map(|s| parse_set(&g, s)).collect::<Result<Vec<_>, _>>()?;
    let input = EigenBoundInput::new(&g, sets)?;
    let b = estimates::eigenvalue_upper_bound(&g, &input)?;
    let mut rows = vec![["i", "j", "log_ratio", "h_value", "term"].map(String::from).to_vec()];
    rows.extend(b.pairs.iter().map(|p| {
        vec![p.i.to_string(), p.j.to_string(), p.log_ratio.to_string(), p.h_value.to_string(), p.term.to_string()]
    }));
    let r = if a.simplified {
        estimates::eigenvalue_upper_bound_simplified(&g, &input, a.sigma)?.report(input.k())
    } else {
        b.report()
    };
    let mut out = Outcome::report(&r);
    out.csv = Some(rows);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct DiameterArgs {
    #[command(flatten)]
    graph: GraphArgs,
}

pub fn diameter(a: &DiameterArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    Ok(Outcome::report(&estimates::diameter_bound(&g)?.report()))
}

#[derive(Args, Debug)]
pub struct IsoArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// The set U
    #[arg(long)]
    set: String,
    /// Neighbourhood radius r ≥ 1
    #[arg(long)]
    r: usize,
}

pub fn isoperimetric(a: &IsoArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let u = parse_set(&g, &a.set)?;
    Ok(Outcome::report(&estimates::isoperimetric_bound(&g, &u, a.r)?.report()))
}

#[derive(Args, Debug)]
pub struct MixingArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Time grid: start:stop:count, start:stop:countL or a comma list
    #[arg(long, default_value = "0.05:50:40L")]
    t: String,
}

pub fn mixing(a: &MixingArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    Ok(Outcome::report(&estimates::mixing_monitor(&g, &parse_grid(&a.t)?)?))
}

/// Positive initial datum: explicit values, or a spike on a small background.
#[derive(Args, Debug)]
pub struct DatumArgs {
    /// Initial values in vertex order, comma separated
    #[arg(long, conflicts_with = "spike")]
    u0: Option<String>,
    /// Vertex carrying the spike of height 1
    #[arg(long)]
    spike: Option<String>,
    /// Background value of the spike datum
    #[arg(long, default_value_t = 1e-3)]
    background: f64,
}

impl DatumArgs {
    fn build(&self, g: &MeasuredGraph, default_spike: usize) -> Result<Vec<f64>, Failure> {
        if let Some(list) = &self.u0 {
            let u = parse_list(list)?;
            if u.len() != g.len() {
                return Err(Failure::usage(format!("--u0 has {} values for {} vertices", u.len(), g.len())));
            }
            return Ok(u);
        }
        let at = match &self.spike {
            Some(id) => g.index_of(id)?,
            None => default_spike,
        };
        let mut u = vec![self.background; g.len()];
        u[at] = 1.0;
        Ok(u)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    /// Flat when the evidence gives K ≤ 1e-4, curved otherwise
    Auto,
    Flat,
    Curved,
}

#[derive(Args, Debug)]
pub struct LiYauArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Center x₀ of the ball B(x₀, R)
    #[arg(long)]
    x0: String,
    /// Radius R; evidence must cover B(x₀, 2R)
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Time grid: start:stop:count, start:stop:countL or a comma list
    #[arg(long, default_value = "0.5:10:20")]
    t: String,
    #[arg(long, value_enum, default_value = "auto")]
    form: FormChoice,
    /// ρ in (0, 1) of the curved form
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Constant potential q of the curved form
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[command(flatten)]
    datum: DatumArgs,
    #[command(flatten)]
    evidence: EvidenceArgs,
}

pub fn liyau(a: &LiYauArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let x0 = g.index_of(&a.x0)?;
    let ev = a.evidence.obtain(&g, &g.ball(x0, 2 * a.radius))?;
    let curved = LiYauForm::Curved { rho: a.rho, q: a.q };
    let form = match a.form {
        FormChoice::Flat => LiYauForm::Flat,
        FormChoice::Curved => curved,
        FormChoice::Auto if ev.hypothesis_k() <= FLAT_K => LiYauForm::Flat,
        FormChoice::Auto => curved,
    };
    let u0 = a.datum.build(&g, x0)?;
    let r = estimates::li_yau_check(&g, &ev, x0, a.radius, &u0, &parse_grid(&a.t)?, form)?;
    Ok(Outcome::report(&r))
}

#[derive(Args, Debug)]
pub struct HarnackArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Earlier time T₁
    #[arg(long)]
    t1: f64,
    /// Later time T₂ ≥ T₁
    #[arg(long)]
    t2: f64,
    /// ρ in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Constant potential q
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Vertices x (default: all)
    #[arg(long)]
    from: Option<String>,
    /// Vertices y (default: all)
    #[arg(long)]
    to: Option<String>,
    #[command(flatten)]
    datum: DatumArgs,
    #[command(flatten)]
    evidence: EvidenceArgs,
}

pub fn harnack(a: &HarnackArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let (xs, ys) = (domain(&g, &a.from)?, domain(&g, &a.to)?);
    let ev = a.evidence.obtain(&g, &Subset::whole(&g))?;
    let params = HarnackParams::from_evidence(&g, &ev, a.q, a.rho, a.t1, a.t2)?;
    let pairs: Vec<(usize, usize)> = xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).collect();
    let u0 = a.datum.build(&g, 0)?;
    Ok(Outcome::report(&estimates::harnack_check(&g, &params, &u0, &pairs)?))
}

#[derive(Args, Debug)]
pub struct ChengArgs {
    /// Infinite family: lattice:DIM or tree:DEG
    #[arg(long)]
    family: InfiniteFamily,
    /// Exhaustion radii, strictly increasing, at least three
    #[arg(long, default_value = "5,10,20")]
    radii: String,
    #[arg(long = "m-mode", default_value = "unit")]
    m_mode: MeasureMode,
    #[command(flatten)]
    evidence: EvidenceArgs,
}

pub fn cheng(a: &ChengArgs) -> Result<Outcome, Failure> {
    let ex: Exhaustion = Exhaustion::new(a.family, a.m_mode, &parse_usize_list(&a.radii)?)?;
    let root = Subset::singleton(ex.host(), ex.root());
    let ev = a.evidence.obtain(ex.host(), &root)?;
    Ok(Outcome::report(&estimates::cheng_check(&ex, &ev)?))
}

#[derive(Args, Debug)]
pub struct GaussianArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// C₂ grid, comma separated
    #[arg(long, default_value = "0,0.5,1,2")]
    c2: String,
    /// Sample times; every vertex pair is sampled at each
    #[arg(long, default_value = "1,2,4,8")]
    times: String,
    /// Allowed relative change of C₁ when geometric midpoints are added to the times
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    #[command(flatten)]
    evidence: EvidenceArgs,
}

pub fn gaussian_fit(a: &GaussianArgs) -> Result<Outcome, Failure> {
    let g = a.graph.load()?;
    let ev = a.evidence.obtain(&g, &Subset::whole(&g))?;
    let c2 = parse_list(&a.c2)?;
    let times = parse_list(&a.times)?;
    let fit = |ts: &[f64]| {
        estimates::gaussian_fit(&g, &ev, a.gamma, a.epsilon, a.beta, &c2, &estimates::all_pairs_sample(&g, ts))
    };
    let base = fit(&times)?;
    let refined = fit(&estimates::refine_times(&times))?;
    let mut out = Outcome::report(&base.stability_report(&refined, a.tolerance));
    let mut rows = vec![["c2", "c1", "c1_refined"].map(String::from).to_vec()];
    rows.extend(
        base.frontier
            .iter()
            .zip(&refined.frontier)
            .map(|(p, q)| vec![p.c2.to_string(), p.c1.to_string(), q.c1.to_string()]),
    );
    out.csv = Some(rows);
    Ok(out)
}
