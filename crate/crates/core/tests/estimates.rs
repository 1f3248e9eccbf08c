mod common;

use dggkit::curvature::{
    CertificateStatus, CurvatureCertificate, CurvatureEvidence, CurvatureKind, Dimension, SearchOptions,
};
use dggkit::estimates::{
    all_pairs_sample, cheng_check, diameter_bound, eigenvalue_upper_bound, eigenvalue_upper_bound_simplified,
    gaussian_fit, harnack_check, isoperimetric_bound, li_yau_check, mixing_monitor, refine_times, EigenBoundInput,
    HarnackParams, LiYauForm,
};
use dggkit::graph::{Exhaustion, InfiniteFamily, MeasureMode, MeasuredGraph, Subset};
use dggkit::heat::DirichletSemigroup;
use dggkit::legendre::asinh;
use dggkit::operators::{dirichlet_spectrum, spectrum};
use dggkit::report::Status;

use common::{corpus, family, lin_grid, log_grid, tree_bottom};

const N2: Dimension = Dimension::Finite(2.0);

fn path_input(n: usize) -> (MeasuredGraph, EigenBoundInput) {
    let g = family(&format!("path:{}", 4 * n + 1));
    let a = Subset::new(&g, 0..=n).unwrap();
    let b = Subset::new(&g, 3 * n..=4 * n).unwrap();
    let input = EigenBoundInput::new(&g, vec![a, b]).unwrap();
    (g, input)
}

fn star_input(n: usize) -> (MeasuredGraph, EigenBoundInput) {
    let g = family(&format!("star:3,{n}"));
    let sets = (0..3)
        .map(|l| {
            let ids: Vec<String> = (n + 1..=2 * n).map(|j| format!("{l}:{j}")).collect();
            Subset::from_ids(&g, &ids).unwrap()
        })
        .collect();
    let input = EigenBoundInput::new(&g, sets).unwrap();
    (g, input)
}

/// A hand-made certificate recording `K ≥ 0` at every vertex.
fn flat_evidence(g: &MeasuredGraph, bound_k: f64) -> CurvatureEvidence {
    CurvatureEvidence {
        dimension: N2,
        kind: CurvatureKind::Cde,
        certificates: (0..g.len())
            .map(|v| CurvatureCertificate {
                vertex: g.id(v).to_owned(),
                dimension: N2,
                kind: CurvatureKind::Cde,
                bound_k,
                witness: vec![1.0; g.len()],
                restarts: 0,
                seed: 0,
                evaluations: 0,
                dispersion: 0.0,
                margin: 0.0,
                status: CertificateStatus::Certified,
            })
            .collect(),
    }
}

#[test]
fn eigenvalue_bound_examples() {
    let p21 = family("path:21");
    let input = EigenBoundInput::new(&p21, vec![Subset::new(&p21, 0..5).unwrap(), Subset::new(&p21, 16..21).unwrap()]).unwrap();
    let b = eigenvalue_upper_bound(&p21, &input).unwrap();
    assert!(b.bound >= spectrum(&p21).unwrap().lambda(2));
    assert!(b.holds() && b.pairs.len() == 1);

    let doubled = p21.with_measure_mode(MeasureMode::Unit);
    let measure: Vec<f64> = (0..21).map(|v| 2.0 * doubled.measure(v)).collect();
    let edges: Vec<_> = p21.edges().collect();
    let heavy = MeasuredGraph::new(p21.ids().to_vec(), &edges, measure).unwrap();
    let hb = eigenvalue_upper_bound(&heavy, &EigenBoundInput::new(&heavy, input.sets().to_vec()).unwrap()).unwrap();
    assert!((hb.pairs[0].log_ratio - b.pairs[0].log_ratio).abs() < 1e-14);
    assert!((hb.bound / b.bound - 0.5).abs() < 1e-14);

    let (g5, s5) = star_input(5);
    let (_, s10) = star_input(10);
    let (g10, _) = star_input(10);
    let b5 = eigenvalue_upper_bound(&g5, &s5).unwrap();
    let b10 = eigenvalue_upper_bound(&g10, &s10).unwrap();
    assert!(b5.holds() && b10.holds() && b5.k == 3);
    let ratio = b10.bound / b5.bound;
    assert!((0.1875..=0.3125).contains(&ratio), "{ratio}");

    let p = family("path:6");
    assert!(EigenBoundInput::new(&p, vec![Subset::new(&p, [0, 1]).unwrap(), Subset::new(&p, [1, 2]).unwrap()]).is_err());
}

#[test]
fn simplified_bound() {
    let (g5, i5) = path_input(5);
    let (g10, i10) = path_input(10);
    let s5 = eigenvalue_upper_bound_simplified(&g5, &i5, None).unwrap();
    let s10 = eigenvalue_upper_bound_simplified(&g10, &i10, None).unwrap();
    assert!(s5.bound > s5.lambda_k && s10.bound > s10.lambda_k);
    assert!(s5.relaxes() && s10.relaxes() && s5.in_regime && s10.in_regime);
    let ratio = s10.bound / s5.bound;
    assert!((0.2..=0.3).contains(&ratio), "{ratio}");

    let one = eigenvalue_upper_bound_simplified(&g5, &i5, Some(1.0)).unwrap();
    let b = eigenvalue_upper_bound(&g5, &i5).unwrap();
    let l = b.pairs[0].log_ratio;
    let delta = i5.delta() as f64;
    let expected = 4.0 * b.d_m / (asinh(1.0) * delta * delta) * l * l;
    assert!((one.bound - expected).abs() < 1e-12 * expected);
    assert!(eigenvalue_upper_bound_simplified(&g5, &i5, Some(-1.0)).is_err());
}

#[test]
fn eigenvalue_scaling() {
    let scaled: Vec<f64> = [5, 10, 20, 40]
        .iter()
        .map(|&n| {
            let (g, i) = path_input(n);
            let b = eigenvalue_upper_bound(&g, &i).unwrap();
            assert!(b.holds());
            b.bound * (n * n) as f64
        })
        .collect();
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo <= 2.0, "{scaled:?}");
}

#[test]
fn corollaries_on_corpus() {
    for (name, g) in corpus() {
        let d = diameter_bound(&g).unwrap();
        assert!(d.holds(), "{name}: {} < {}", d.bound, d.diameter);
        for u in [Subset::singleton(&g, 0), g.ball(g.len() / 2, 1)] {
            let mut prev = f64::NEG_INFINITY;
            for r in 1..=g.diameter() + 1 {
                let iso = isoperimetric_bound(&g, &u, r).unwrap();
                assert!(iso.holds(), "{name} r={r}");
                assert!(iso.bound >= prev);
                assert!(iso.bound <= g.total_measure());
                prev = iso.bound;
            }
        }
        let rep = mixing_monitor(&g, &log_grid(0.05, 50.0, 30)).unwrap();
        assert!(rep.pass, "{name}: {:?}", rep.worst);
    }
    let k2 = family("path:2");
    assert!(diameter_bound(&k2).unwrap().bound >= 1.0);
    assert!(diameter_bound(&family("path:11")).unwrap().bound >= 10.0);
    let p21 = family("path:21");
    let iso = isoperimetric_bound(&p21, &Subset::singleton(&p21, 10), 3).unwrap();
    assert_eq!(iso.measured, 7.0);
    assert!(iso.bound <= 7.0);
    assert!(isoperimetric_bound(&p21, &Subset::singleton(&p21, 10), 0).is_err());
}

#[test]
fn mixing_examples() {
    let k2 = family("path:2");
    let rep = mixing_monitor(&k2, &lin_grid(0.0, 10.0, 21)).unwrap();
    assert!(rep.pass && rep.margins.iter().all(|m| m.abs() < 1e-12));
    let p5 = family("path:5");
    let rep = mixing_monitor(&p5, &lin_grid(0.1, 20.0, 30)).unwrap();
    assert!(rep.pass && rep.margins.iter().all(|&m| m >= -1e-10));
    let p = DirichletSemigroup::whole(&p5).unwrap().kernel(200.0).unwrap();
    assert!(p.matrix().iter().all(|v| (v - 0.2).abs() < 1e-12));
    assert!(mixing_monitor(&p5, &[1.0, 0.5]).is_err());
}

#[test]
fn li_yau_examples() {
    let g = family("lattice:1,6");
    let x0 = g.index_of("0").unwrap();
    let opts = SearchOptions::default();
    let ev = CurvatureEvidence::collect(&g, &g.ball(x0, 4), N2, CurvatureKind::Cde, &opts).unwrap();
    assert!(ev.all_certified());
    let mut u0 = vec![1e-3; g.len()];
    u0[x0] = 1.0;
    let grid = lin_grid(0.5, 10.0, 20);
    let rep = li_yau_check(&g, &ev, x0, 2, &u0, &grid, LiYauForm::Flat).unwrap();
    assert!(rep.pass && rep.margins.iter().all(|&m| m > 0.0), "{:?}", rep.worst);
    let rep4 = li_yau_check(&g, &ev, x0, 1, &u0, &grid, LiYauForm::Flat).unwrap();
    let rhs = |r: &dggkit::report::VerificationReport| -> Vec<f64> {
        r.details["rhs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
    };
    assert!(rhs(&rep).iter().zip(rhs(&rep4)).all(|(a, b)| *a < b));
    let rep = li_yau_check(&g, &ev, x0, 2, &u0, &grid, LiYauForm::Curved { rho: 0.5, q: 0.3 }).unwrap();
    assert!(rep.pass);

    let flat = flat_evidence(&g, 0.0);
    let rep = li_yau_check(&g, &flat, x0, 3, &[4.0; 13], &grid, LiYauForm::Flat).unwrap();
    assert!(rep.details["lhs_max"].as_array().unwrap().iter().all(|v| v.as_f64().unwrap().abs() < 1e-12));
    assert!(li_yau_check(&g, &ev, x0, 3, &u0, &grid, LiYauForm::Flat).is_err());
    assert!(li_yau_check(&g, &flat_evidence(&g, -1.0), x0, 2, &u0, &grid, LiYauForm::Flat).is_err());
}

#[test]
fn harnack_examples() {
    let k2 = family("path:2");
    let ev = CurvatureEvidence::collect(&k2, &Subset::whole(&k2), N2, CurvatureKind::Cde, &SearchOptions::default()).unwrap();
    let hp = HarnackParams::from_evidence(&k2, &ev, 0.0, 0.5, 1.0, 2.0).unwrap();
    let rep = harnack_check(&k2, &hp, &[1.0, 2.0], &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
    assert!(rep.pass);
    // closed form: u(t) = 3/2 ± e^{-2t}/2
    let u = |t: f64, x: usize| 1.5 + if x == 0 { -0.5 } else { 0.5 } * (-2.0 * t).exp();
    let row = &rep.details["pairs"][1];
    assert!((row["u_t1_x"].as_f64().unwrap() - u(1.0, 0)).abs() < 1e-12);
    assert!((row["u_t2_y"].as_f64().unwrap() - u(2.0, 1)).abs() < 1e-12);

    let same = HarnackParams::new(2.0, 0.0, 0.0, 0.5, 1.5, 1.5).unwrap();
    let rep = harnack_check(&k2, &same, &[1.0, 2.0], &[(0, 0), (0, 1)]).unwrap();
    assert!(rep.margins[0].abs() < 1e-12 && rep.margins[1] == f64::MAX);
    assert!(HarnackParams::new(2.0, 0.0, 0.0, 0.5, 2.0, 1.0).is_err());

    let g = family("lattice:1,6");
    let ev = CurvatureEvidence::collect(&g, &Subset::whole(&g), N2, CurvatureKind::Cde, &SearchOptions::default()).unwrap();
    let mut u0 = vec![0.05; g.len()];
    u0[6] = 1.0;
    let pairs: Vec<(usize, usize)> = (0..g.len()).flat_map(|x| (0..g.len()).map(move |y| (x, y))).collect();
    for rho in [0.25, 0.5, 0.75] {
        let hp = HarnackParams::from_evidence(&g, &ev, 0.2, rho, 1.0, 3.0).unwrap();
        let rep = harnack_check(&g, &hp, &u0, &pairs).unwrap();
        assert!(rep.pass, "ρ={rho}: {:?}", rep.worst);
    }
}

#[test]
fn cheng_examples() {
    let opts = SearchOptions::default();
    let z: Exhaustion = Exhaustion::new(InfiniteFamily::Lattice { dim: 1 }, MeasureMode::Unit, &[5, 10, 20, 40]).unwrap();
    let ev = CurvatureEvidence::from(
        dggkit::curvature::estimate_curvature(z.host(), z.root(), N2, CurvatureKind::Cde, &opts).unwrap(),
    );
    let rep = cheng_check(&z, &ev).unwrap();
    assert!(rep.pass);
    let mu: Vec<f64> = rep.details["mu1"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(mu.windows(2).all(|w| w[1] < w[0]));

    let tree: Exhaustion = Exhaustion::new(InfiniteFamily::RegularTree { degree: 3 }, MeasureMode::Unit, &[3, 4, 5]).unwrap();
    let ev = CurvatureEvidence::from(
        dggkit::curvature::estimate_curvature(tree.host(), tree.root(), N2, CurvatureKind::Cde, &opts).unwrap(),
    );
    let rep = cheng_check(&tree, &ev).unwrap();
    assert!(rep.pass, "{:?}", rep.details);
    assert_ne!(rep.status, Status::CertificateFalsified);
    let mu_est = rep.param("mu_estimate").unwrap().as_f64().unwrap();
    let big = family("tree:3,8");
    let deep = dirichlet_spectrum(&big, &big.ball(0, 7)).unwrap().mu1();
    assert!(mu_est > deep && deep > tree_bottom(3));

    let short: Exhaustion = Exhaustion::new(InfiniteFamily::RegularTree { degree: 3 }, MeasureMode::Unit, &[3, 4]).unwrap();
    assert!(cheng_check(&short, &ev).is_err());
}

#[test]
fn gaussian_fit_examples() {
    let p21 = family("path:21");
    let ev = CurvatureEvidence::from(
        dggkit::curvature::estimate_curvature(&p21, 10, N2, CurvatureKind::Cde, &SearchOptions::default()).unwrap(),
    );
    let times = [1.0, 2.0, 4.0, 8.0];
    let c2 = [0.0, 0.5, 1.0, 2.0];
    let a = gaussian_fit(&p21, &ev, 1.0, 0.1, 1.0, &c2, &all_pairs_sample(&p21, &times)).unwrap();
    let b = gaussian_fit(&p21, &ev, 1.0, 0.1, 1.0, &c2, &all_pairs_sample(&p21, &refine_times(&times))).unwrap();
    assert!(a.c1().is_finite() && a.c1() > 0.0);
    assert!((b.c1() / a.c1() - 1.0).abs() < 0.05);
    assert!(a.frontier.windows(2).all(|w| w[1].c1 <= w[0].c1));
    let p = dggkit::dgg::DggParams::for_graph(&p21, 1.0, 1.0).unwrap();
    assert_eq!(a.c3, dggkit::dgg::corollary_constant(&p));
    assert!(a.skipped > 0);

    let flat = flat_evidence(&p21, 0.5);
    let f = gaussian_fit(&p21, &flat, 0.5, 0.1, 1.0, &c2, &all_pairs_sample(&p21, &times)).unwrap();
    assert!(f.frontier.iter().all(|pt| pt.c1 == f.c1()));
    assert!(gaussian_fit(&p21, &flat, 0.5, 0.1, 1.0, &c2, &[(0, 20, 2.0)]).is_err());
}
