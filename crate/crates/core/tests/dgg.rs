mod common;

use dggkit::dgg::{
    alpha, check_weight_condition, corollary_constant, dgg_corollary_rhs, dgg_rhs, edge_condition, imp_monitor,
    imp_weight, verify_dgg, DggMode, DggParams,
};
use dggkit::graph::{MeasuredGraph, Subset};
use dggkit::legendre::{asinh, zeta};
use dggkit::report::Status;
use proptest::prelude::*;

use common::{corpus, family, lin_grid};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const GAMMAS: [f64; 4] = [0.25, 0.5, GOLDEN, 1.0];

fn params(g: &MeasuredGraph, gamma: f64) -> DggParams {
    DggParams::for_graph(g, gamma, 1.0).unwrap()
}

#[test]
fn named_constants() {
    assert_eq!(alpha(1.0).unwrap(), 4.0);
    assert_eq!(alpha(GOLDEN).unwrap(), 4.0);
    for g in [0.05, 0.1, 0.25, 0.5, 0.9] {
        assert_eq!(alpha(g).unwrap(), 4f64.max((5f64.sqrt() - 1.0) / g + 2.0));
    }
    let p = DggParams::new(GOLDEN, 1.0, 1.0, 1.0).unwrap();
    assert!((corollary_constant(&p) - 8.0 * (0.25f64).asinh() / 5.0).abs() < 1e-12);
    assert!((corollary_constant(&p) - 0.3959).abs() < 1e-4);
    // the μ factor: e^{-(1-γ)μt} with 1-γ = (3-√5)/2
    let rhs = dgg_rhs(1.0, 1.0, 0, 2.0, &p).unwrap();
    assert!((rhs - (-(3.0 - 5f64.sqrt()) / 2.0 * 2.0).exp()).abs() < 1e-12);
    let p1 = DggParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    assert!((corollary_constant(&p1) - (1.0f64).asinh()).abs() < 1e-15);
    assert!((corollary_constant(&p1) - 0.8814).abs() < 1e-4);
    let z11 = zeta(1.0, 1.0).unwrap();
    for d in [1usize, 3, 10] {
        let r = dgg_rhs(1.0, 1.0, d, d as f64, &p1).unwrap();
        assert!((r.ln() + 0.5 * d as f64 * z11).abs() < 1e-12);
    }
    assert!((0.5 * z11 - 0.23358).abs() < 1e-5);
    assert_eq!(dgg_rhs(2.0, 8.0, 0, 0.0, &p1).unwrap(), 4.0);
    assert_eq!(dgg_rhs(2.0, 8.0, 1, 0.0, &p1).unwrap(), 0.0);
    assert_eq!(dgg_corollary_rhs(2.0, 8.0, 0, 3.0, &p1).unwrap().0, 4.0);
    assert!(dgg_corollary_rhs(1.0, 1.0, 5, 2.0, &p1).is_err());
    let half = DggParams::new(0.5, 1.0, 1.0, 0.0).unwrap();
    assert!(dgg_corollary_rhs(1.0, 1.0, 0, 0.5, &half).is_err());
    assert!(dgg_corollary_rhs(1.0, 1.0, 0, 1.0, &half).is_ok());
}

#[test]
fn weight_formula() {
    let p = DggParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    let z = asinh(2.0) - 1.25f64.sqrt() + 0.5;
    assert!((imp_weight(0.0, 1, &p) - (2.0 * z).exp()).abs() < 1e-12);
    assert_eq!(imp_weight(5.0, 0, &p), 1.0);
    let e = edge_condition(0.7, 0, 0, &p);
    assert_eq!((e.chi_form, e.k_form), (0.0, 0.0));
}

#[test]
fn weight_condition_on_corpus() {
    let grid = lin_grid(0.0, 10.0, 50);
    for (name, g) in corpus() {
        for gamma in GAMMAS {
            for b in [Subset::singleton(&g, 0), g.ball(g.len() / 2, 1)] {
                let rep = check_weight_condition(&g, &b, &params(&g, gamma), &grid).unwrap();
                assert!(rep.pass, "{name} γ={gamma}: worst {:?}", rep.worst);
                assert!(rep.margins.iter().all(|&m| m >= -1e-10));
            }
        }
        let whole = Subset::whole(&g);
        let rep = check_weight_condition(&g, &whole, &params(&g, 0.5), &grid).unwrap();
        assert!(rep.margins.iter().all(|&m| m.abs() < 1e-12), "{name}");
    }
}

#[test]
fn integral_maximum_principle() {
    let grid = lin_grid(0.0, 8.0, 40);
    let p5 = family("path:5");
    let rep = imp_monitor(&p5, &Subset::whole(&p5), &Subset::singleton(&p5, 2), &params(&p5, 1.0), &grid).unwrap();
    assert!(rep.pass);
    let whole = Subset::whole(&p5);
    assert!(imp_monitor(&p5, &whole, &whole, &params(&p5, 1.0), &grid).unwrap().pass);
    assert!(imp_monitor(&p5, &whole, &whole, &params(&p5, 0.5), &grid).unwrap().pass);
    for (name, g) in corpus() {
        let omega = g.ball(g.len() / 2, 2);
        for gamma in GAMMAS {
            let b = Subset::singleton(&g, g.len() / 2);
            let rep = imp_monitor(&g, &omega, &b, &params(&g, gamma), &grid).unwrap();
            assert!(rep.pass, "{name} γ={gamma}: {:?}", rep.worst);
        }
    }
    assert!(imp_monitor(&p5, &Subset::singleton(&p5, 0), &Subset::singleton(&p5, 1), &params(&p5, 1.0), &grid).is_err());
}

#[test]
fn bound_on_examples() {
    let p21 = family("path:21");
    let (b1, b2) = (Subset::singleton(&p21, 0), Subset::singleton(&p21, 20));
    let grid: Vec<f64> = (1..=40).map(f64::from).collect();
    let rep = verify_dgg(&p21, &b1, &b2, &params(&p21, 1.0), &grid, DggMode::Theorem, None).unwrap();
    assert!(rep.pass && rep.margins.iter().all(|&m| m >= 0.0));
    assert_eq!(rep.param("mu_source").unwrap(), "finite_graph_spectral_bottom");

    let whole = Subset::whole(&p21);
    let rep = verify_dgg(&p21, &whole, &whole, &params(&p21, 1.0), &grid, DggMode::Theorem, None).unwrap();
    assert!(rep.pass && rep.margins.iter().all(|m| m.abs() < 1e-9 * 21.0));
    assert!(!rep.notes.is_empty());

    let star = family("star:3,2");
    let tips = (Subset::from_ids(&star, &["0:3"]).unwrap(), Subset::from_ids(&star, &["1:3"]).unwrap());
    let dom = star.ball(0, 3);
    let rep = verify_dgg(&star, &tips.0, &tips.1, &params(&star, 0.5), &lin_grid(0.5, 20.0, 50), DggMode::Theorem, Some(&dom)).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.param("mu_source").unwrap(), "dirichlet_mu1");
    assert!(rep.param("mu").unwrap().as_f64().unwrap() > 0.0);
}

#[test]
fn bound_on_corpus() {
    let grid = lin_grid(0.0, 30.0, 50);
    for (name, g) in corpus() {
        let far = (0..g.len()).max_by_key(|&v| g.vertex_distance(0, v)).unwrap();
        let pairs = [
            (Subset::singleton(&g, 0), Subset::singleton(&g, far)),
            (Subset::singleton(&g, 0), g.ball(0, 1)),
            (g.ball(0, 1), g.ball(far, 1)),
        ];
        for (b1, b2) in &pairs {
            for gamma in GAMMAS {
                for mode in [DggMode::Theorem, DggMode::Corollary] {
                    let rep = match verify_dgg(&g, b1, b2, &params(&g, gamma), &grid, mode, None) {
                        Ok(r) => r,
                        Err(dggkit::Error::Precondition(_)) if mode == DggMode::Corollary => continue,
                        Err(e) => panic!("{name}: {e}"),
                    };
                    assert!(rep.pass, "{name} γ={gamma} {mode:?}: {:?}", rep.worst);
                    assert_eq!(rep.status, Status::Pass);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn rhs_decreases_in_distance(t in 0.0f64..50.0, d in 0usize..30, gi in 0usize..4, m1 in 0.5f64..5.0, m2 in 0.5f64..5.0) {
        let p = DggParams::new(GAMMAS[gi], 1.0, 2.0, 0.1).unwrap();
        let a = dgg_rhs(m1, m2, d, t, &p).unwrap();
        let b = dgg_rhs(m1, m2, d + 1, t, &p).unwrap();
        prop_assert!(b <= a);
    }

    #[test]
    fn edge_forms_agree(t in 0.0f64..20.0, dx in 0usize..40, step in 0usize..2, gi in 0usize..4, d_m in 0.5f64..4.0) {
        let p = DggParams::new(GAMMAS[gi], 1.0, d_m, 0.0).unwrap();
        let e = edge_condition(t, dx, dx + step, &p);
        prop_assert!((e.k_form - 4.0 * e.chi_form).abs() < 1e-9 * (1.0 + e.k_form.abs()));
        prop_assert!(e.chi_form >= -1e-10);
    }
}
