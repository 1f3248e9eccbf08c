//! Independent oracles and the test-graph corpus shared by the integration
//! tests. Nothing here calls into the code under test except to read graph
//! structure.

#![allow(dead_code, clippy::needless_range_loop)]

use dggkit::graph::{generate, MeasureMode, MeasuredGraph};

pub fn family(spec: &str) -> MeasuredGraph {
    generate(spec.parse().unwrap(), MeasureMode::Unit).unwrap()
}

pub fn family_deg(spec: &str) -> MeasuredGraph {
    generate(spec.parse().unwrap(), MeasureMode::Degree).unwrap()
}

/// Hexagon with uneven weights and measures.
pub fn weighted_cycle() -> MeasuredGraph {
    let ids = (0..6).map(|i| format!("c{i}")).collect();
    let w = [1.0, 2.5, 0.5, 1.5, 3.0, 0.75];
    let edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6, w[i])).collect();
    MeasuredGraph::new(ids, &edges, vec![1.0, 2.0, 0.5, 1.5, 1.0, 3.0]).unwrap()
}

/// Every finite test graph, labelled.
pub fn corpus() -> Vec<(String, MeasuredGraph)> {
    let mut out: Vec<(String, MeasuredGraph)> = [
        "path:2", "path:3", "path:5", "path:11", "path:21", "star:3,2", "lattice:1,6", "lattice:2,3", "tree:3,3",
    ]
    .iter()
    .map(|s| (s.to_string(), family(s)))
    .collect();
    for s in ["path:5", "star:3,2", "lattice:2,3"] {
        out.push((format!("{s}/degree"), family_deg(s)));
    }
    out.push(("weighted-cycle".into(), weighted_cycle()));
    out
}

/// The heat-kernel corpus: K₂, P₅, P₂₁, star(3,2), lattice_ball(2,3).
pub fn heat_corpus() -> Vec<(String, MeasuredGraph)> {
    ["path:2", "path:5", "path:21", "star:3,2", "lattice:2,3"]
        .iter()
        .map(|s| (s.to_string(), family(s)))
        .collect()
}

/// `max_{λ≥0} dλ - (cosh λ - 1)t` by bracketing and golden-section search.
pub fn zeta_variational(t: f64, d: f64) -> f64 {
    let obj = |l: f64| d * l - (l.cosh() - 1.0) * t;
    if d == 0.0 {
        return 0.0;
    }
    let mut hi = 1.0f64;
    while d - hi.sinh() * t > 0.0 {
        hi *= 2.0;
    }
    let (mut a, mut b) = (0.0f64, hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..300 {
        let c = b - r * (b - a);
        let e = a + r * (b - a);
        if obj(c) > obj(e) {
            b = e;
        } else {
            a = c;
        }
    }
    obj(0.5 * (a + b))
}

/// Generator matrix `A` with `(Af)(x) = (1/m(x)) Σ_y μ_xy (f(y) - f(x))`,
/// restricted to `domain` (Dirichlet: values outside are 0), row-major.
pub fn generator(g: &MeasuredGraph, domain: &[usize]) -> Vec<Vec<f64>> {
    let pos = |v: usize| domain.iter().position(|&u| u == v);
    let n = domain.len();
    let mut a = vec![vec![0.0; n]; n];
    for (i, &x) in domain.iter().enumerate() {
        let mx = g.measure(x);
        for &(y, w) in g.neighbors(x) {
            a[i][i] -= w / mx;
            if let Some(j) = pos(y) {
                a[i][j] += w / mx;
            }
        }
    }
    a
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
    }
    c
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// `e^{tA}` by Taylor series with scaling and squaring.
pub fn expm_taylor(a: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max) * t;
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let h = t / 2f64.powi(s);
    let scaled: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| v * h).collect()).collect();
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..30 {
        term = matmul(&term, &scaled);
        term.iter_mut().flatten().for_each(|v| *v /= k as f64);
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Solves `M X = B` by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                for k in 0..b[row].len() {
                    b[row][k] -= f * b[col][k];
                }
            }
        }
    }
    for col in (0..n).rev() {
        for k in 0..b[col].len() {
            let mut v = b[col][k];
            for j in (col + 1)..n {
                v -= m[col][j] * b[j][k];
            }
            b[col][k] = v / m[col][col];
        }
    }
    b
}

/// Fixed-step implicit midpoint for `u' = Au` over `[0, t]` with step
/// `1e-3 / ρ(A)`; returns the propagator. The one-step map is raised to the
/// step count by repeated squaring.
pub fn implicit_midpoint_propagator(a: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let n = a.len();
    let radius = a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let steps = (t * radius / 1e-3).ceil().max(1.0) as u64;
    let h = t / steps as f64;
    let mut lhs = identity(n);
    let mut rhs = identity(n);
    for i in 0..n {
        for j in 0..n {
            lhs[i][j] -= 0.5 * h * a[i][j];
            rhs[i][j] += 0.5 * h * a[i][j];
        }
    }
    let step = solve(lhs, rhs);
    let mut out = identity(n);
    let mut base = step;
    let mut k = steps;
    while k > 0 {
        if k & 1 == 1 {
            out = matmul(&out, &base);
        }
        base = matmul(&base, &base);
        k >>= 1;
    }
    out
}

/// `p_t(0,0)` on `ℤ` with unit weights and measure: `e^{-2t} I₀(2t)`.
pub fn z_return_probability(t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= t * t / (k as f64 * k as f64);
        sum += term;
    }
    (-2.0 * t).exp() * sum
}

/// Bottom of the spectrum of the `q`-regular tree with unit measure.
pub fn tree_bottom(q: usize) -> f64 {
    q as f64 - 2.0 * ((q - 1) as f64).sqrt()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Prints one acceptance line and returns the verdict.
pub fn verdict(label: &str, ok: bool, detail: &str) -> bool {
    println!("[{}] {label}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}
