//! Social graphs, influence matrices, PageRank centrality and susceptibility profiles.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_len, Error, Result};

/// Tolerance applied when validating opinion entries against [-1, 1].
pub const OPINION_TOL: f64 = 1e-9;

/// Tolerance on row sums of an influence matrix.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// A node's weight on its own prejudice in the variational model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SelfWeight {
    Finite(f64),
    /// Infinite self-weight: the node never moves from its prejudice.
    Stubborn,
}

/// A weighted arc `from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Weighted social ties between `n` nodes. Undirected graphs store both arc directions.
#[derive(Clone, Debug)]
pub struct SocialGraph {
    n: usize,
    arcs: Vec<Arc>,
    directed: bool,
    self_weights: Option<Vec<SelfWeight>>,
    labels: Vec<u64>,
}

impl SocialGraph {
    /// Builds a graph from `(i, j, w)` ties. Undirected ties are listed once and mirrored.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph has no nodes"));
        }
        let mut seen = HashSet::new();
        let mut arcs = Vec::with_capacity(if directed { edges.len() } else { 2 * edges.len() });
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i}, {j}) outside [0, {n})")));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on node {i}; use self weights")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(format!("edge ({i}, {j}) has weight {w}")));
            }
            let key = if directed { (i, j) } else { (i.min(j), i.max(j)) };
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
            arcs.push(Arc { from: i, to: j, weight: w });
            if !directed {
                arcs.push(Arc { from: j, to: i, weight: w });
            }
        }
        arcs.sort_by_key(|a| (a.from, a.to));
        Ok(SocialGraph { n, arcs, directed, self_weights: None, labels: (0..n as u64).collect() })
    }

    /// Builds a graph from a dense weight matrix. Off-diagonal positive entries become arcs;
    /// a nonzero diagonal becomes the self weights. Symmetric input is treated as undirected.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            check_len(n, r.len())?;
        }
        let directed = (0..n).any(|i| (0..n).any(|j| rows[i][j] != rows[j][i]));
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rows[i][j] != 0.0 && (directed || i < j) {
                    edges.push((i, j, rows[i][j]));
                }
            }
        }
        let g = Self::from_edges(n, &edges, directed)?;
        if (0..n).any(|i| rows[i][i] != 0.0) {
            g.with_self_weights((0..n).map(|i| SelfWeight::Finite(rows[i][i])).collect())
        } else {
            Ok(g)
        }
    }

    pub fn with_self_weights(mut self, weights: Vec<SelfWeight>) -> Result<Self> {
        check_len(self.n, weights.len())?;
        for (i, w) in weights.iter().enumerate() {
            if let SelfWeight::Finite(x) = *w {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(Error::invalid(format!("node {i} has self weight {x}")));
                }
            }
        }
        self.self_weights = Some(weights);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn self_weights(&self) -> Option<&[SelfWeight]> {
        self.self_weights.as_deref()
    }

    /// Original node labels, indexed by compacted node index.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Off-diagonal social weights as a dense matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            a[(arc.from, arc.to)] = arc.weight;
        }
        a
    }

    /// Sum of weights on arcs leaving each node (self weights excluded).
    pub fn out_weights(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for arc in &self.arcs {
            d[arc.from] += arc.weight;
        }
        d
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeListFormat {
    pub directed: bool,
}

/// Parses an edge list: one `i j [w]` tie per line, separated by whitespace or commas.
/// `#` starts a comment. A line `i i w` sets node `i`'s self weight (`inf` marks it stubborn).
/// Nodes without ties are dropped and the remaining labels compacted in ascending order.
pub fn load_edge_list<R: BufRead>(source: R, format: EdgeListFormat) -> Result<SocialGraph> {
    let mut ties: Vec<(u64, u64, f64, usize)> = Vec::new();
    let mut selfs: BTreeMap<u64, (SelfWeight, usize)> = BTreeMap::new();
    for (k, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `i j [w]`, got {} fields", fields.len()),
            });
        }
        let node = |f: &str| {
            f.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{f}` is not a node index"),
            })
        };
        let (i, j) = (node(fields[0])?, node(fields[1])?);
        let w = match fields.get(2) {
            None => 1.0,
            Some(f) => f.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{f}` is not a weight"),
            })?,
        };
        if w.is_nan() || w < 0.0 {
            return Err(Error::invalid(format!("line {lineno}: negative weight {w}")));
        }
        if i == j {
            let sw = if w.is_infinite() { SelfWeight::Stubborn } else { SelfWeight::Finite(w) };
            if selfs.insert(i, (sw, lineno)).is_some() {
                return Err(Error::invalid(format!("line {lineno}: duplicate self weight for {i}")));
            }
        } else {
            if w.is_infinite() {
                return Err(Error::invalid(format!("line {lineno}: infinite tie weight")));
            }
            ties.push((i, j, w, lineno));
        }
    }

    let labels: Vec<u64> = ties
        .iter()
        .flat_map(|t| [t.0, t.1])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.is_empty() {
        return Err(Error::invalid("edge list contains no ties"));
    }
    let index = |l: u64| labels.binary_search(&l).expect("label collected above");

    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(ties.len());
    for &(i, j, w, lineno) in &ties {
        let key = if format.directed { (i, j) } else { (i.min(j), i.max(j)) };
        if !seen.insert(key) {
            return Err(Error::invalid(format!("line {lineno}: duplicate edge ({i}, {j})")));
        }
        edges.push((index(i), index(j), w));
    }
    let mut g = SocialGraph::from_edges(labels.len(), &edges, format.directed)?;
    g.labels = labels;

    if !selfs.is_empty() {
        let mut weights = vec![SelfWeight::Finite(0.0); g.n];
        for (label, (sw, _)) in selfs {
            if let Some(i) = g.index_of(label) {
                weights[i] = sw;
            }
        }
        g = g.with_self_weights(weights)?;
    }
    Ok(g)
}

/// A row-stochastic, nonnegative matrix of influence weights.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceMatrix(DMatrix<f64>);

impl InfluenceMatrix {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::invalid("influence matrix is not square"));
        }
        for i in 0..w.nrows() {
            let row = w.row(i);
            if row.iter().any(|&x| !(0.0..=1.0 + ROW_SUM_TOL).contains(&x)) {
                return Err(Error::invalid(format!("row {i} has entries outside [0, 1]")));
            }
            let s = row.sum();
            if (s - 1.0).abs() > ROW_SUM_TOL * w.ncols() as f64 {
                return Err(Error::invalid(format!("row {i} sums to {s}, not 1")));
            }
        }
        Ok(InfluenceMatrix(w))
    }

    /// Divides every row by its sum.
    pub fn normalized(mut w: DMatrix<f64>) -> Result<Self> {
        for i in 0..w.nrows() {
            let s = w.row(i).sum();
            if !(s > 0.0) {
                return Err(Error::invalid(format!("node {i} has no outgoing weight")));
            }
            w.row_mut(i).scale_mut(1.0 / s);
        }
        Self::new(w)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            check_len(n, r.len())?;
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// Row-normalizes the social weights. Finite self weights stay on the diagonal;
/// a stubborn node gets an identity row.
pub fn row_normalize(g: &SocialGraph) -> Result<InfluenceMatrix> {
    let mut w = g.adjacency();
    if let Some(sw) = g.self_weights() {
        for (i, s) in sw.iter().enumerate() {
            match *s {
                SelfWeight::Finite(x) => w[(i, i)] = x,
                SelfWeight::Stubborn => {
                    w.row_mut(i).fill(0.0);
                    w[(i, i)] = 1.0;
                }
            }
        }
    }
    InfluenceMatrix::normalized(w)
}

/// PageRank on the row-normalized ties (self weights ignored). Nodes without outgoing
/// ties spread their mass uniformly.
pub fn pagerank(g: &SocialGraph, damping: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::invalid(format!("damping {damping} outside (0, 1)")));
    }
    let n = g.n();
    let out = g.out_weights();
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let dangling: f64 = (0..n).filter(|&i| out[i] <= 0.0).map(|i| x[i]).sum();
        let base = (1.0 - damping) / n as f64 + damping * dangling / n as f64;
        next.fill(base);
        for arc in g.arcs() {
            if out[arc.from] > 0.0 {
                next[arc.to] += damping * x[arc.from] * arc.weight / out[arc.from];
            }
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < tol {
            return Ok(x);
        }
    }
    Err(Error::Convergence { what: "pagerank", residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SusceptibilityScheme {
    Constant(f64),
    PageRankProportional,
    PageRankInverse,
    Explicit,
}

/// Per-node susceptibility to others' opinions: 0 is stubborn, 1 is naive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SusceptibilityProfile {
    lambdas: Vec<f64>,
    scheme: SusceptibilityScheme,
}

impl SusceptibilityProfile {
    pub fn explicit(lambdas: Vec<f64>) -> Result<Self> {
        for (i, &l) in lambdas.iter().enumerate() {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::invalid(format!("susceptibility of node {i} is {l}")));
            }
        }
        Ok(SusceptibilityProfile { lambdas, scheme: SusceptibilityScheme::Explicit })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        let mut p = Self::explicit(vec![c; n])?;
        p.scheme = SusceptibilityScheme::Constant(c);
        Ok(p)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn scheme(&self) -> SusceptibilityScheme {
        self.scheme
    }
}

/// Maps centrality scores to susceptibilities. The rescaling schemes send the
/// minimum to `epsilon` and the maximum to `1 - epsilon` affinely.
pub fn build_susceptibility(
    centrality: &[f64],
    scheme: SusceptibilityScheme,
    epsilon: f64,
) -> Result<SusceptibilityProfile> {
    if centrality.is_empty() {
        return Err(Error::invalid("empty centrality vector"));
    }
    if centrality.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::invalid("centrality entries must be positive"));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside (0, 0.5)")));
    }
    let rescale = |v: Vec<f64>| -> Result<Vec<f64>> {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= f64::EPSILON * hi {
            return Err(Error::invalid(
                "all centralities are equal; use a constant susceptibility instead",
            ));
        }
        Ok(v.iter().map(|x| epsilon + (1.0 - 2.0 * epsilon) * (x - lo) / (hi - lo)).collect())
    };
    let lambdas = match scheme {
        SusceptibilityScheme::Constant(c) => {
            return SusceptibilityProfile::constant(centrality.len(), c)
        }
        SusceptibilityScheme::PageRankProportional => rescale(centrality.to_vec())?,
        SusceptibilityScheme::PageRankInverse => {
            rescale(centrality.iter().map(|c| 1.0 / c).collect())?
        }
        SusceptibilityScheme::Explicit => {
            return Err(Error::invalid("explicit susceptibilities are not derived from centrality"))
        }
    };
    Ok(SusceptibilityProfile { lambdas, scheme })
}

/// Reads `label lambda` lines; every node of `g` must appear exactly once.
pub fn load_susceptibility<R: BufRead>(source: R, g: &SocialGraph) -> Result<SusceptibilityProfile> {
    let mut lambdas = vec![f64::NAN; g.n()];
    for (k, line) in source.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        let parsed = match fields.as_slice() {
            [a, b] => a.parse::<u64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        let (label, l) = parsed.ok_or_else(|| Error::Parse {
            line: k + 1,
            message: "expected `index lambda`".into(),
        })?;
        let i = g
            .index_of(label)
            .ok_or_else(|| Error::invalid(format!("line {}: unknown node {label}", k + 1)))?;
        if !lambdas[i].is_nan() {
            return Err(Error::invalid(format!("line {}: node {label} listed twice", k + 1)));
        }
        lambdas[i] = l;
    }
    if let Some(i) = lambdas.iter().position(|l| l.is_nan()) {
        return Err(Error::invalid(format!("no susceptibility for node {}", g.labels()[i])));
    }
    SusceptibilityProfile::explicit(lambdas)
}

/// Opinions in [-1, 1].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    /// Accepts entries within `OPINION_TOL` of [-1, 1] and clamps them.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut values = values;
        for (i, x) in values.iter_mut().enumerate() {
            if !(x.abs() <= 1.0 + OPINION_TOL) {
                return Err(Error::invalid(format!("opinion {i} is {x}, outside [-1, 1]")));
            }
            *x = x.clamp(-1.0, 1.0);
        }
        Ok(OpinionVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        OpinionVector(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn neg(&self) -> Self {
        OpinionVector(self.0.iter().map(|x| -x).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, directed: bool) -> Result<SocialGraph> {
        load_edge_list(text.as_bytes(), EdgeListFormat { directed })
    }

    #[test]
    fn triangle_is_symmetrized() {
        let g = parse("0 1\n1 2\n2 0", false).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.arcs().len(), 6);
        assert!(g.arcs().iter().all(|a| a.weight == 1.0));
    }

    #[test]
    fn comments_commas_and_isolated_labels() {
        let g = parse("# header\n10, 30, 2.5\n30 50 # tail\n\n", false).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.labels(), &[10, 30, 50]);
        assert_eq!(g.adjacency()[(0, 1)], 2.5);
        assert_eq!(g.adjacency()[(2, 1)], 1.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse("0 1\n1 x\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0 1 -2", false), Err(Error::Validation(_))));
        assert!(matches!(parse("# nothing\n", false), Err(Error::Validation(_))));
        assert!(matches!(parse("0 1\n1 0\n", false), Err(Error::Validation(_))));
        assert!(parse("0 1\n1 0\n", true).is_ok());
    }

    #[test]
    fn self_weight_lines() {
        let g = parse("0 1\n1 2\n0 0 3\n2 2 inf\n", false).unwrap();
        assert_eq!(
            g.self_weights().unwrap(),
            &[SelfWeight::Finite(3.0), SelfWeight::Finite(0.0), SelfWeight::Stubborn]
        );
    }

    #[test]
    fn row_normalization() {
        let g = SocialGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], false).unwrap();
        let w = row_normalize(&g).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w.matrix()[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
        let g = SocialGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0)], true).unwrap();
        let err = row_normalize(&g).unwrap_err();
        assert!(err.to_string().contains("node 1"));
        let g = g.with_self_weights(vec![SelfWeight::Finite(0.0); 4]).unwrap();
        assert!(row_normalize(&g).is_err());
        let g = SocialGraph::from_edges(2, &[(0, 1, 1.0)], true)
            .unwrap()
            .with_self_weights(vec![SelfWeight::Finite(3.0), SelfWeight::Stubborn])
            .unwrap();
        let w = row_normalize(&g).unwrap();
        assert_eq!(w.matrix().as_slice(), &[0.75, 0.0, 0.25, 1.0]);
    }

    #[test]
    fn weighted_row_and_self_weights() {
        let rows = vec![
            vec![1.0, 4.0, 0.0, 1.0],
            vec![1.0, 8.0, 0.0, 3.0],
            vec![4.0, 1.0, 1.0, 0.0],
            vec![0.0, 0.0, 8.0, 1.0],
        ];
        let g = SocialGraph::from_matrix(&rows).unwrap();
        assert!(g.is_directed());
        let w = row_normalize(&g).unwrap();
        for i in 0..4 {
            assert!((w.matrix().row(i).sum() - 1.0).abs() < 1e-12);
        }
        assert!((w.matrix()[(1, 1)] - 8.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn pagerank_symmetry() {
        let k3 = SocialGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], false).unwrap();
        for p in pagerank(&k3, 0.85, 1e-12, 10_000).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        let star = SocialGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], false).unwrap();
        let p = pagerank(&star, 0.85, 1e-12, 10_000).unwrap();
        assert!(p[0] > p[1]);
        assert!((p[1] - p[2]).abs() < 1e-12 && (p[2] - p[3]).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pagerank_reports_nonconvergence() {
        let star = SocialGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], false).unwrap();
        assert!(matches!(pagerank(&star, 0.85, 1e-15, 2), Err(Error::Convergence { .. })));
    }

    #[test]
    fn susceptibility_schemes() {
        let c = [0.1, 0.2, 0.7];
        let p = build_susceptibility(&c, SusceptibilityScheme::PageRankProportional, 0.01).unwrap();
        let want = [0.01, 0.01 + 0.98 / 6.0, 0.99];
        for (a, b) in p.lambdas().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        // 1/C = (10, 5, 10/7); the middle entry lands at 0.01 + 0.98 * (5 - 10/7) / (10 - 10/7).
        let p = build_susceptibility(&c, SusceptibilityScheme::PageRankInverse, 0.01).unwrap();
        let want = [0.99, 0.01 + 0.98 * (25.0 / 60.0), 0.01];
        for (a, b) in p.lambdas().iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let p = build_susceptibility(&[0.2; 5], SusceptibilityScheme::Constant(0.8), 0.01).unwrap();
        assert_eq!(p.lambdas(), &[0.8; 5]);
        assert!(build_susceptibility(&[0.2; 5], SusceptibilityScheme::PageRankInverse, 0.01).is_err());
    }

    #[test]
    fn susceptibility_file_uses_labels() {
        let g = parse("10 20\n20 30\n", false).unwrap();
        let p = load_susceptibility("30 0.5\n10 0.1\n20 1\n".as_bytes(), &g).unwrap();
        assert_eq!(p.lambdas(), &[0.1, 1.0, 0.5]);
        assert!(load_susceptibility("10 0.1\n".as_bytes(), &g).is_err());
        assert!(load_susceptibility("10 0.1\n20 2\n30 0\n".as_bytes(), &g).is_err());
    }

    #[test]
    fn opinion_vector_clamps_within_tolerance() {
        let v = OpinionVector::new(vec![1.0 + 1e-10, -0.5]).unwrap();
        assert_eq!(v.values(), &[1.0, -0.5]);
        assert!(OpinionVector::new(vec![1.1]).is_err());
        assert!(OpinionVector::new(vec![f64::NAN]).is_err());
    }
}
