//! Measured weighted graphs.
//!
//! A [`MeasuredGraph`] is a finite, connected, locally finite graph with a
//! symmetric positive edge weight `mu` and a positive vertex measure `m`.
//! Vertices are addressed by their position in the vertex list (file or
//! generation order); the opaque string ids are kept for I/O.
//!
//! Distances are combinatorial hop counts. Edge weights never enter them.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredGraph<S: Scalar = f64> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, S)>>,
    measure: Vec<S>,
    degree: Vec<S>,
}

/// The structural constants `D_m`, `D_mu`, `m_max`, `m_min`, `mu_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralConstants<S = f64> {
    /// `max_x deg(x) / m(x)`.
    pub d_m: S,
    /// `max_{x ~ y} deg(x) / mu_xy`.
    pub d_mu: S,
    pub m_max: S,
    pub m_min: S,
    pub mu_min: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    /// `m = 1`, the combinatorial Laplacian.
    #[default]
    Unit,
    /// `m = deg`, the normalized Laplacian.
    Degree,
}

impl FromStr for MeasureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "degree" | "deg" => Ok(Self::Degree),
            other => Err(Error::InvalidArgument(format!("unknown measure mode `{other}`"))),
        }
    }
}

impl<S: Scalar> MeasuredGraph<S> {
    /// Builds a graph from ids, an undirected edge list (each edge once) and a
    /// measure. Duplicate edges with equal weight are merged; conflicting
    /// duplicates are rejected.
    pub fn new(ids: Vec<String>, edges: &[(usize, usize, S)], measure: Vec<S>) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if measure.len() != n {
            return Err(Error::InvalidGraph(format!(
                "measure has {} entries for {n} vertices",
                measure.len()
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id `{id}`")));
            }
        }
        for (i, &m) in measure.iter().enumerate() {
            if !(m > S::zero()) || !m.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "nonpositive measure m({}) = {m}",
                    ids[i]
                )));
            }
        }

        let mut adjacency: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        let mut seen: HashMap<(usize, usize), S> = HashMap::new();
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at `{}`", ids[u])));
            }
            if !(w > S::zero()) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "nonpositive weight mu({}, {}) = {w}",
                    ids[u], ids[v]
                )));
            }
            let key = (u.min(v), u.max(v));
            match seen.get(&key) {
                Some(&old) if old == w => continue,
                Some(&old) => {
                    return Err(Error::InvalidGraph(format!(
                        "conflicting weights {old} and {w} for edge ({}, {})",
                        ids[u], ids[v]
                    )))
                }
                None => {
                    seen.insert(key, w);
                }
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        adjacency.iter_mut().for_each(|nbrs| nbrs.sort_by_key(|&(v, _)| v));

        let degree: Vec<S> = adjacency
            .iter()
            .map(|nbrs| nbrs.iter().fold(S::zero(), |acc, &(_, w)| acc + w))
            .collect();
        if let Some(i) = degree.iter().position(|d| !(*d > S::zero())) {
            return Err(Error::InvalidGraph(format!("isolated vertex `{}`", ids[i])));
        }

        let graph = Self { ids, index, adjacency, measure, degree };
        let reach = graph.distances_from(&[0]);
        if let Some(i) = reach.iter().position(|&d| d == usize::MAX) {
            return Err(Error::InvalidGraph(format!(
                "graph is disconnected (`{}` unreachable from `{}`)",
                graph.ids[i], graph.ids[0]
            )));
        }
        Ok(graph)
    }

    /// Builds a graph from string-keyed vertices and edges.
    pub fn from_named(vertices: Vec<(String, S)>, edges: &[(String, String, S)]) -> Result<Self> {
        let (ids, measure): (Vec<_>, Vec<_>) = vertices.into_iter().unzip();
        let lookup: HashMap<&str, usize> =
            ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut indexed = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            let iu = *lookup.get(u.as_str()).ok_or_else(|| Error::UnknownVertex(u.clone()))?;
            let iv = *lookup.get(v.as_str()).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
            indexed.push((iu, iv, *w));
        }
        Self::new(ids, &indexed, measure)
    }

    /// Same topology and weights, measure replaced according to `mode`.
    pub fn with_measure_mode(&self, mode: MeasureMode) -> Self {
        let measure = match mode {
            MeasureMode::Unit => vec![S::one(); self.len()],
            MeasureMode::Degree => self.degree.clone(),
        };
        Self { measure, ..self.clone() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    /// Neighbors of `v` with the connecting edge weight.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(usize, S)] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn measure(&self, v: usize) -> S {
        self.measure[v]
    }

    pub fn measures(&self) -> &[S] {
        &self.measure
    }

    #[inline]
    pub fn degree(&self, v: usize) -> S {
        self.degree[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<S> {
        self.adjacency[u].iter().find(|&&(w, _)| w == v).map(|&(_, mu)| mu)
    }

    /// Undirected edges `(u, v, mu)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter().filter(move |&&(v, _)| u < v).map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn total_measure(&self) -> S {
        self.measure.iter().fold(S::zero(), |acc, &m| acc + m)
    }

    pub fn structural_constants(&self) -> StructuralConstants<S> {
        let mut c = StructuralConstants {
            d_m: S::zero(),
            d_mu: S::zero(),
            m_max: self.measure[0],
            m_min: self.measure[0],
            mu_min: S::max_value().expect("bounded scalar"),
        };
        for x in 0..self.len() {
            c.d_m = c.d_m.max(self.degree[x] / self.measure[x]);
            c.m_max = c.m_max.max(self.measure[x]);
            c.m_min = c.m_min.min(self.measure[x]);
            for &(_, w) in &self.adjacency[x] {
                c.d_mu = c.d_mu.max(self.degree[x] / w);
                c.mu_min = c.mu_min.min(w);
            }
        }
        c
    }

    /// Multi-source BFS. Unreachable vertices get `usize::MAX`.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::with_capacity(self.len());
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &(v, _) in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Hop distance from `x` to the nearest member of `set`; 0 iff `x` is in it.
    pub fn distance(&self, x: usize, set: &Subset) -> usize {
        if set.contains(x) {
            return 0;
        }
        self.distances_from(&[x])
            .into_iter()
            .enumerate()
            .filter(|&(v, _)| set.contains(v))
            .map(|(_, d)| d)
            .min()
            .expect("subsets are nonempty")
    }

    pub fn vertex_distance(&self, x: usize, y: usize) -> usize {
        self.distances_from(&[x])[y]
    }

    /// `min_{x in a, y in b} d(x, y)`.
    pub fn subset_distance(&self, a: &Subset, b: &Subset) -> usize {
        let dist = self.distances_from(a.members());
        b.iter().map(|v| dist[v]).min().expect("subsets are nonempty")
    }

    /// `N_r(U) = { x : d(x, U) <= r }`.
    pub fn neighborhood(&self, set: &Subset, r: usize) -> Subset {
        let dist = self.distances_from(set.members());
        Subset::from_mask(dist.iter().map(|&d| d <= r).collect())
    }

    /// Closed ball of hop radius `r` around `x`.
    pub fn ball(&self, x: usize, r: usize) -> Subset {
        self.neighborhood(&Subset::singleton(self, x), r)
    }

    pub fn diameter(&self) -> usize {
        (0..self.len())
            .map(|x| self.distances_from(&[x]).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Induced graph on `set`, keeping the parent ids, weights and measure.
    /// Fails if the induced graph is disconnected.
    pub fn induced(&self, set: &Subset) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, v) in set.iter().enumerate() {
            pos[v] = i;
        }
        let ids = set.iter().map(|v| self.ids[v].clone()).collect();
        let measure = set.iter().map(|v| self.measure[v]).collect();
        let edges: Vec<_> = self
            .edges()
            .filter(|&(u, v, _)| set.contains(u) && set.contains(v))
            .map(|(u, v, w)| (pos[u], pos[v], w))
            .collect();
        Self::new(ids, &edges, measure)
    }
}

/// A nonempty set of vertices of one graph, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl Subset {
    pub fn new<S: Scalar>(g: &MeasuredGraph<S>, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; g.len()];
        for v in members {
            if v >= g.len() {
                return Err(Error::InvalidSubset(format!("vertex index {v} out of range")));
            }
            mask[v] = true;
        }
        if !mask.iter().any(|&b| b) {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        Ok(Self::from_mask(mask))
    }

    pub fn from_ids<S: Scalar, I: AsRef<str>>(g: &MeasuredGraph<S>, ids: &[I]) -> Result<Self> {
        let members = ids.iter().map(|id| g.index_of(id.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(g, members)
    }

    pub fn singleton<S: Scalar>(g: &MeasuredGraph<S>, v: usize) -> Self {
        Self::new(g, [v]).expect("vertex in range")
    }

    pub fn whole<S: Scalar>(g: &MeasuredGraph<S>) -> Self {
        Self::from_mask(vec![true; g.len()])
    }

    fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        Self { members, mask }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Size of the parent graph's vertex set.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() == self.mask.len()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Complement within the parent graph, `None` if empty.
    pub fn complement(&self) -> Option<Subset> {
        let mask: Vec<bool> = self.mask.iter().map(|b| !b).collect();
        mask.iter().any(|&b| b).then(|| Self::from_mask(mask))
    }

    pub fn measure<S: Scalar>(&self, g: &MeasuredGraph<S>) -> S {
        self.iter().fold(S::zero(), |acc, v| acc + g.measure(v))
    }

    pub fn indicator<S: Scalar>(&self) -> Vec<S> {
        self.mask.iter().map(|&b| if b { S::one() } else { S::zero() }).collect()
    }
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default = "unit_measure")]
    pub m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    pub mu: f64,
}

fn unit_measure() -> f64 {
    1.0
}

/// Parses the JSON graph document. Vertex order is file order.
pub fn load_graph<S: Scalar>(document: &[u8]) -> Result<MeasuredGraph<S>> {
    let doc: GraphDocument =
        serde_json::from_slice(document).map_err(|e| Error::Parse(e.to_string()))?;
    let vertices = doc.vertices.into_iter().map(|v| (v.id, S::lit(v.m))).collect();
    let edges: Vec<_> = doc.edges.into_iter().map(|e| (e.u, e.v, S::lit(e.mu))).collect();
    MeasuredGraph::from_named(vertices, &edges)
}

pub fn to_document<S: Scalar>(g: &MeasuredGraph<S>) -> GraphDocument {
    GraphDocument {
        vertices: (0..g.len())
            .map(|v| VertexEntry { id: g.id(v).to_owned(), m: g.measure(v).as_f64() })
            .collect(),
        edges: g
            .edges()
            .map(|(u, v, w)| EdgeEntry { u: g.id(u).to_owned(), v: g.id(v).to_owned(), mu: w.as_f64() })
            .collect(),
    }
}

pub fn save_graph<S: Scalar>(g: &MeasuredGraph<S>) -> String {
    serde_json::to_string_pretty(&to_document(g)).expect("graph document serializes")
}

// ---------------------------------------------------------------------------
// Generators

/// Finite graph families with unit edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Path on `n` vertices, ids `0..n`.
    Path(usize),
    /// `arms` copies of the path `[0, 2 * half_len]` glued at their origin.
    Star { arms: usize, half_len: usize },
    /// `{ z in Z^dim : |z|_1 <= radius }` with lattice edges.
    LatticeBall { dim: usize, radius: usize },
    /// Ball of hop radius `radius` around the root of the `degree`-regular tree.
    TreeBall { degree: usize, radius: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Star { arms, half_len } => write!(f, "star:{arms},{half_len}"),
            Family::LatticeBall { dim, radius } => write!(f, "lattice:{dim},{radius}"),
            Family::TreeBall { degree, radius } => write!(f, "tree:{degree},{radius}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `path:N`, `star:K,N`, `lattice:DIM,R`, `tree:DEG,R`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse graph family `{s}`"));
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (name, nums.as_slice()) {
            ("path", [n]) => Ok(Family::Path(*n)),
            ("star", [k, n]) => Ok(Family::Star { arms: *k, half_len: *n }),
            ("lattice" | "lattice_ball", [d, r]) => Ok(Family::LatticeBall { dim: *d, radius: *r }),
            ("tree" | "tree_ball", [d, r]) => Ok(Family::TreeBall { degree: *d, radius: *r }),
            _ => Err(bad()),
        }
    }
}

pub fn generate<S: Scalar>(family: Family, mode: MeasureMode) -> Result<MeasuredGraph<S>> {
    let (ids, edges) = match family {
        Family::Path(n) => {
            if n < 2 {
                return Err(Error::InvalidArgument("path needs at least 2 vertices".into()));
            }
            ((0..n).map(|i| i.to_string()).collect(), (1..n).map(|i| (i - 1, i)).collect())
        }
        Family::Star { arms, half_len } => {
            if arms < 1 || half_len < 1 {
                return Err(Error::InvalidArgument("star needs arms >= 1 and n >= 1".into()));
            }
            let arm_len = 2 * half_len;
            let mut ids = vec!["o".to_owned()];
            let mut edges = Vec::new();
            for l in 0..arms {
                for j in 1..=arm_len {
                    ids.push(format!("{l}:{j}"));
                    let here = ids.len() - 1;
                    let prev = if j == 1 { 0 } else { here - 1 };
                    edges.push((prev, here));
                }
            }
            (ids, edges)
        }
        Family::LatticeBall { dim, radius } => lattice_ball(dim, radius)?,
        Family::TreeBall { degree, radius } => tree_ball(degree, radius)?,
    };
    let n = ids.len();
    let edges: Vec<_> = edges.into_iter().map(|(u, v)| (u, v, S::one())).collect();
    let unit = MeasuredGraph::new(ids, &edges, vec![S::one(); n])?;
    Ok(match mode {
        MeasureMode::Unit => unit,
        MeasureMode::Degree => unit.with_measure_mode(MeasureMode::Degree),
    })
}

fn coord_id(z: &[i64]) -> String {
    z.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

#[allow(clippy::type_complexity)]
fn lattice_ball(dim: usize, radius: usize) -> Result<(Vec<String>, Vec<(usize, usize)>)> {
    if dim < 1 || radius < 1 {
        return Err(Error::InvalidArgument("lattice ball needs dim >= 1 and R >= 1".into()));
    }
    let r = radius as i64;
    // lexicographic enumeration of the l1 ball
    let mut points: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &points {
            let used: i64 = p.iter().map(|c| c.abs()).sum();
            for c in -(r - used)..=(r - used) {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        points = next;
    }
    let index: HashMap<&[i64], usize> =
        points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for axis in 0..dim {
            let mut q = p.clone();
            q[axis] += 1;
            if let Some(&j) = index.get(q.as_slice()) {
                edges.push((i, j));
            }
        }
    }
    Ok((points.iter().map(|p| coord_id(p)).collect(), edges))
}

#[allow(clippy::type_complexity)]
fn tree_ball(degree: usize, radius: usize) -> Result<(Vec<String>, Vec<(usize, usize)>)> {
    if degree < 2 || radius < 1 {
        return Err(Error::InvalidArgument("tree ball needs degree >= 2 and R >= 1".into()));
    }
    let mut ids = vec!["r".to_owned()];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for depth in 0..radius {
        let mut next = Vec::new();
        for &parent in &frontier {
            let children = if depth == 0 { degree } else { degree - 1 };
            for c in 0..children {
                ids.push(format!("{}.{c}", ids[parent]));
                let child = ids.len() - 1;
                edges.push((parent, child));
                next.push(child);
            }
        }
        frontier = next;
    }
    Ok((ids, edges))
}

// ---------------------------------------------------------------------------
// Exhaustions of infinite graphs

/// Infinite vertex-transitive families that admit ball exhaustions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfiniteFamily {
    Lattice { dim: usize },
    RegularTree { degree: usize },
}

impl InfiniteFamily {
    fn ball(self, radius: usize) -> Family {
        match self {
            InfiniteFamily::Lattice { dim } => Family::LatticeBall { dim, radius },
            InfiniteFamily::RegularTree { degree } => Family::TreeBall { degree, radius },
        }
    }

    fn root_id(self) -> String {
        match self {
            InfiniteFamily::Lattice { dim } => coord_id(&vec![0; dim]),
            InfiniteFamily::RegularTree { .. } => "r".to_owned(),
        }
    }
}

impl std::fmt::Display for InfiniteFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfiniteFamily::Lattice { dim } => write!(f, "lattice:{dim}"),
            InfiniteFamily::RegularTree { degree } => write!(f, "tree:{degree}"),
        }
    }
}

impl FromStr for InfiniteFamily {
    type Err = Error;

    /// `lattice:DIM` or `tree:DEG`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse infinite family `{s}`"));
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = arg.trim().parse().map_err(|_| bad())?;
        match name {
            "lattice" | "z" => Ok(InfiniteFamily::Lattice { dim: k }),
            "tree" => Ok(InfiniteFamily::RegularTree { degree: k }),
            _ => Err(bad()),
        }
    }
}

/// Balls `Omega_1 ⊂ Omega_2 ⊂ ...` of strictly increasing radius around a
/// root, realised inside a host ball one hop larger than the last stage so
/// that every stage vertex carries its full degree.
#[derive(Debug, Clone)]
pub struct Exhaustion<S: Scalar = f64> {
    family: InfiniteFamily,
    radii: Vec<usize>,
    host: MeasuredGraph<S>,
    root: usize,
    stages: Vec<Subset>,
}

impl<S: Scalar> Exhaustion<S> {
    pub fn new(family: InfiniteFamily, mode: MeasureMode, radii: &[usize]) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("exhaustion needs at least one stage".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] == 0 {
            return Err(Error::InvalidArgument(
                "exhaustion radii must be positive and strictly increasing".into(),
            ));
        }
        let outer = *radii.last().unwrap() + 1;
        let unit: MeasuredGraph<S> = generate(family.ball(outer), MeasureMode::Unit)?;
        let root = unit.index_of(&family.root_id())?;
        let host = match mode {
            MeasureMode::Unit => unit,
            MeasureMode::Degree => unit.with_measure_mode(MeasureMode::Degree),
        };
        let stages = radii.iter().map(|&r| host.ball(root, r)).collect();
        Ok(Self { family, radii: radii.to_vec(), host, root, stages })
    }

    pub fn family(&self) -> InfiniteFamily {
        self.family
    }

    pub fn radii(&self) -> &[usize] {
        &self.radii
    }

    /// The finite graph every stage lives in.
    pub fn host(&self) -> &MeasuredGraph<S> {
        &self.host
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn stages(&self) -> &[Subset] {
        &self.stages
    }
}
