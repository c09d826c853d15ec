//! Electrical networks as chain complexes.
//!
//! Branches span the 1-chains and nodes the 0-chains. The boundary of a branch
//! is `end - start`, so in the incidence matrix a branch contributes `+1` at the
//! node it enters and `-1` at the node it leaves. Kirchhoff's current law is
//! membership of the branch-current vector in the kernel of that map.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::element::ElementKind;
use crate::waveform::Waveform;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchId(String);

impl BranchId {
    pub fn new(label: impl Into<String>) -> Self {
        BranchId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BranchId {
    fn from(s: &str) -> Self {
        BranchId(s.to_string())
    }
}

/// A directed branch between two nodes, referenced by index into [`Network::nodes`].
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    id: BranchId,
    start: usize,
    end: usize,
    element: ElementKind,
}

impl Branch {
    pub fn id(&self) -> &BranchId {
        &self.id
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn element(&self) -> &ElementKind {
        &self.element
    }

    pub fn is_self_loop(&self) -> bool {
        self.start == self.end
    }
}

/// Nodes and branches in insertion order, with an optional reference node.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<NodeId>,
    branches: Vec<Branch>,
    reference: Option<usize>,
}

impl Network {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn reference(&self) -> Option<usize> {
        self.reference
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.as_str() == label)
    }

    pub fn branch_index(&self, id: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.id.as_str() == id)
    }

    /// Connected components of the underlying undirected graph, isolated nodes included.
    pub fn components(&self) -> usize {
        let labels = self.component_labels();
        let mut seen = vec![false; self.nodes.len()];
        let mut count = 0;
        for &l in &labels {
            if !seen[l] {
                seen[l] = true;
                count += 1;
            }
        }
        count
    }

    /// Component representative for every node.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for b in &self.branches {
            let (a, c) = (find(&mut parent, b.start), find(&mut parent, b.end));
            if a != c {
                parent[a.max(c)] = a.min(c);
            }
        }
        (0..self.nodes.len()).map(|i| find(&mut parent, i)).collect()
    }

    pub fn with_reference(mut self, label: &str) -> Result<Network> {
        let idx = self
            .node_index(label)
            .ok_or_else(|| Error::InvalidNetwork(format!("reference node `{label}` does not exist")))?;
        self.reference = Some(idx);
        Ok(self)
    }
}

/// Incremental network construction; nodes are created on first mention.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    nodes: Vec<NodeId>,
    branches: Vec<(BranchId, usize, usize, ElementKind, bool)>,
    reference: Option<String>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, label: &str) -> usize {
        match self.nodes.iter().position(|n| n.as_str() == label) {
            Some(i) => i,
            None => {
                self.nodes.push(NodeId::from(label));
                self.nodes.len() - 1
            }
        }
    }

    pub fn reference(&mut self, label: &str) -> &mut Self {
        self.node(label);
        self.reference = Some(label.to_string());
        self
    }

    pub fn branch(&mut self, id: &str, start: &str, end: &str, element: ElementKind) -> &mut Self {
        let (s, e) = (self.node(start), self.node(end));
        self.branches.push((BranchId::from(id), s, e, element, false));
        self
    }

    /// Adds a branch whose start and end coincide. Its boundary is zero.
    pub fn self_loop(&mut self, id: &str, node: &str, element: ElementKind) -> &mut Self {
        let n = self.node(node);
        self.branches.push((BranchId::from(id), n, n, element, true));
        self
    }

    /// Copies every branch of `other`, identifying nodes by label.
    pub fn merge(&mut self, other: &Network) -> &mut Self {
        for n in &other.nodes {
            self.node(n.as_str());
        }
        for b in &other.branches {
            let s = self.node(other.nodes[b.start].as_str());
            let e = self.node(other.nodes[b.end].as_str());
            self.branches.push((b.id.clone(), s, e, b.element.clone(), b.is_self_loop()));
        }
        self
    }

    pub fn build(&self) -> Result<Network> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidNetwork("network needs at least one node".into()));
        }
        let mut ids = BTreeMap::new();
        let mut branches = Vec::with_capacity(self.branches.len());
        for (id, s, e, element, self_loop) in &self.branches {
            if ids.insert(id.clone(), ()).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate branch id `{id}`")));
            }
            if s == e && !self_loop {
                return Err(Error::InvalidNetwork(format!(
                    "branch `{id}` starts and ends at `{}`; declare it as a self-loop",
                    self.nodes[*s]
                )));
            }
            element
                .validate()
                .map_err(|msg| Error::InvalidNetwork(format!("branch `{id}`: {msg}")))?;
            branches.push(Branch { id: id.clone(), start: *s, end: *e, element: element.clone() });
        }
        let reference = match &self.reference {
            Some(label) => self.nodes.iter().position(|n| n.as_str() == label),
            None => None,
        };
        Ok(Network { nodes: self.nodes.clone(), branches, reference })
    }
}

/// Node-by-branch incidence matrix with entries in {-1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl BoundaryMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, node: usize, branch: usize) -> i8 {
        self.entries[node * self.cols + branch]
    }

    pub fn column(&self, branch: usize) -> Vec<i8> {
        (0..self.rows).map(|r| self.get(r, branch)).collect()
    }

    pub fn column_sums(&self) -> Vec<i64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| i64::from(self.get(r, c))).sum())
            .collect()
    }

    /// Boundary of an integer 1-chain.
    pub fn apply_exact(&self, chain: &[i64]) -> Result<Vec<i64>> {
        self.check_len(chain.len())?;
        Ok((0..self.rows)
            .map(|r| (0..self.cols).map(|c| i64::from(self.get(r, c)) * chain[c]).sum())
            .collect())
    }

    pub fn apply(&self, chain: &[f64]) -> Result<Vec<f64>> {
        self.check_len(chain.len())?;
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = 0.0;
                for (c, &x) in chain.iter().enumerate() {
                    match self.get(r, c) {
                        1 => acc += x,
                        -1 => acc -= x,
                        _ => {}
                    }
                }
                acc
            })
            .collect())
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.reduced().1.len()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.cols {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.cols, got: len })
        }
    }

    /// Reduced row echelon form over exact rationals and its pivot columns.
    fn reduced(&self) -> (Vec<Vec<Ratio<i64>>>, Vec<usize>) {
        let mut m: Vec<Vec<Ratio<i64>>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| Ratio::from_integer(i64::from(self.get(r, c)))).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = m[row][col].recip();
            for x in m[row].iter_mut() {
                *x *= inv;
            }
            for r in 0..self.rows {
                if r != row && !m[r][col].is_zero() {
                    let factor = m[r][col];
                    for c in col..self.cols {
                        let delta = factor * m[row][c];
                        m[r][c] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }
}

/// Basis of the cycle space `ker ∂`, as primitive integer vectors over the branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    pub vectors: Vec<Vec<i64>>,
}

impl CycleBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

pub fn boundary(net: &Network) -> BoundaryMatrix {
    let rows = net.node_count();
    let cols = net.branch_count();
    let mut entries = vec![0i8; rows * cols];
    for (c, b) in net.branches.iter().enumerate() {
        if b.is_self_loop() {
            continue;
        }
        entries[b.end * cols + c] = 1;
        entries[b.start * cols + c] = -1;
    }
    BoundaryMatrix { rows, cols, entries }
}

/// Exact kernel basis of the boundary matrix; one vector per free column of its
/// reduced row echelon form.
pub fn cycle_space(net: &Network) -> CycleBasis {
    let bm = boundary(net);
    let (rref, pivots) = bm.reduced();
    let mut is_pivot = vec![false; bm.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut vectors = Vec::new();
    for free in (0..bm.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Ratio::<i64>::zero(); bm.cols];
        v[free] = Ratio::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -rref[r][free];
        }
        vectors.push(primitive(&v));
    }
    CycleBasis { vectors }
}

fn primitive(v: &[Ratio<i64>]) -> Vec<i64> {
    let lcm = v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> = v.iter().map(|x| (x * Ratio::from_integer(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
    let g = if g == 0 { 1 } else { g };
    // Sign-normalize so the first nonzero entry is positive.
    let sign = ints.iter().find(|x| **x != 0).map_or(1, |x| x.signum());
    ints.into_iter().map(|x| x / g * sign).collect()
}

/// Per-node current balance `Σ entering − Σ leaving`, i.e. `∂ · I`.
pub fn kcl_residual(net: &Network, branch_currents: &[f64]) -> Result<Vec<f64>> {
    boundary(net).apply(branch_currents)
}

/// Current delivered to the output node when a constant excitation `i_alpha`
/// and a time-dependent perturbation `i_delta` meet at the constant-current node.
pub fn node_balance_output(i_alpha: f64, i_delta: &Waveform) -> Result<Waveform> {
    i_delta.map(|d| i_alpha + d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Source;
    use crate::waveform::Unit;
    use proptest::prelude::*;

    fn r() -> ElementKind {
        ElementKind::Resistor(1.0)
    }

    fn chain(edges: &[(&str, &str)]) -> Network {
        let mut b = NetworkBuilder::new();
        for (i, (s, e)) in edges.iter().enumerate() {
            b.branch(&format!("b{i}"), s, e, r());
        }
        b.build().unwrap()
    }

    #[test]
    fn single_branch_column() {
        let net = chain(&[("A", "B")]);
        assert_eq!(boundary(&net).column(0), vec![-1, 1]);
    }

    #[test]
    fn self_loop_is_zero_column() {
        let mut b = NetworkBuilder::new();
        b.self_loop("loop", "A", r());
        let net = b.build().unwrap();
        assert_eq!(boundary(&net).column(0), vec![0]);
        assert_eq!(cycle_space(&net).vectors, vec![vec![1]]);
    }

    #[test]
    fn implicit_self_loop_rejected() {
        let mut b = NetworkBuilder::new();
        b.branch("x", "A", "A", r());
        assert!(matches!(b.build(), Err(Error::InvalidNetwork(_))));
    }

    #[test]
    fn duplicate_branch_rejected() {
        let mut b = NetworkBuilder::new();
        b.branch("x", "A", "B", r()).branch("x", "B", "C", r());
        assert!(b.build().is_err());
    }

    #[test]
    fn empty_network_rejected() {
        assert!(NetworkBuilder::new().build().is_err());
    }

    #[test]
    fn chain_boundary_groups_by_node() {
        // Δi -A_f-> A -B_f-> B: ∂K = A(A_f - B_f) + B(B_f) - Δi(A_f)
        let mut b = NetworkBuilder::new();
        b.branch("A_f", "Di", "A", r()).branch("B_f", "A", "B", r());
        let net = b.build().unwrap();
        let bm = boundary(&net);
        let (di, a, bb) = (net.node_index("Di").unwrap(), net.node_index("A").unwrap(), net.node_index("B").unwrap());
        assert_eq!((bm.get(a, 0), bm.get(a, 1)), (1, -1));
        assert_eq!((bm.get(bb, 0), bm.get(bb, 1)), (0, 1));
        assert_eq!((bm.get(di, 0), bm.get(di, 1)), (-1, 0));
    }

    #[test]
    fn tree_has_no_cycles() {
        let net = chain(&[("a", "b"), ("b", "c"), ("b", "d"), ("d", "e")]);
        assert_eq!(cycle_space(&net).dimension(), 0);
    }

    #[test]
    fn triangle_cycle() {
        let net = chain(&[("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(cycle_space(&net).vectors, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn two_disjoint_triangles() {
        let net = chain(&[("a", "b"), ("b", "c"), ("c", "a"), ("x", "y"), ("y", "z"), ("z", "x")]);
        assert_eq!(net.components(), 2);
        // B - N + components = 6 - 6 + 2.
        assert_eq!(cycle_space(&net).dimension(), 2);
    }

    #[test]
    fn parallel_branches_form_a_cycle() {
        let net = chain(&[("a", "b"), ("a", "b")]);
        assert_eq!(cycle_space(&net).vectors, vec![vec![1, -1]]);
    }

    #[test]
    fn kcl_single_branch() {
        let net = chain(&[("A", "B")]);
        assert_eq!(kcl_residual(&net, &[1.0]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(
            kcl_residual(&net, &[1.0, 2.0]),
            Err(Error::LengthMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn node_balance_examples() {
        let delta = Waveform::new(0.0, 1e-12, vec![0.0, 0.0105, 0.0], Unit::Ampere).unwrap();
        let out = node_balance_output(0.031, &delta).unwrap();
        let peak = out.samples().iter().cloned().fold(f64::MIN, f64::max);
        assert!((peak - 0.0415).abs() < 1e-15);
        assert_eq!(out.samples()[0], 0.031);

        let zero = Waveform::new(0.0, 1e-12, vec![0.0; 5], Unit::Ampere).unwrap();
        assert!(node_balance_output(0.031, &zero).unwrap().samples().iter().all(|&v| v == 0.031));
    }

    #[test]
    fn sources_are_opaque_to_topology() {
        let mut b = NetworkBuilder::new();
        b.branch("I1", "gnd", "a", ElementKind::CurrentSource(Source::Constant(1.0)))
            .branch("R1", "a", "gnd", r());
        let net = b.build().unwrap();
        assert_eq!(cycle_space(&net).vectors, vec![vec![1, 1]]);
    }

    fn arb_network() -> impl Strategy<Value = Network> {
        (1usize..=12).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..=24).prop_map(move |edges| {
                let mut b = NetworkBuilder::new();
                for i in 0..n {
                    b.node(&format!("n{i}"));
                }
                for (k, (s, e)) in edges.iter().enumerate() {
                    let (s, e) = (format!("n{s}"), format!("n{e}"));
                    if s == e {
                        b.self_loop(&format!("b{k}"), &s, r());
                    } else {
                        b.branch(&format!("b{k}"), &s, &e, r());
                    }
                }
                b.build().unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn columns_sum_to_zero(net in arb_network()) {
            prop_assert!(boundary(&net).column_sums().iter().all(|&s| s == 0));
        }

        #[test]
        fn rank_nullity(net in arb_network()) {
            let bm = boundary(&net);
            let dim = cycle_space(&net).dimension();
            prop_assert_eq!(dim + bm.rank(), net.branch_count());
            prop_assert_eq!(dim + net.node_count(), net.branch_count() + net.components());
        }

        #[test]
        fn cycles_satisfy_kcl(net in arb_network(), scale in -8i32..8) {
            let bm = boundary(&net);
            let c = f64::from(scale) * 0.25;
            for v in cycle_space(&net).vectors {
                prop_assert!(bm.apply_exact(&v).unwrap().iter().all(|&x| x == 0));
                let currents: Vec<f64> = v.iter().map(|&x| x as f64 * c).collect();
                prop_assert!(kcl_residual(&net, &currents).unwrap().iter().all(|&x| x == 0.0));
            }
        }

        #[test]
        fn kcl_matches_direct_summation(net in arb_network(), seed in any::<u64>()) {
            let mut state = seed;
            let currents: Vec<f64> = (0..net.branch_count())
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
                })
                .collect();
            let got = kcl_residual(&net, &currents).unwrap();
            for (node, &res) in got.iter().enumerate() {
                let mut entering = 0.0;
                let mut leaving = 0.0;
                for (b, br) in net.branches().iter().enumerate() {
                    if br.is_self_loop() { continue; }
                    if br.end() == node { entering += currents[b]; }
                    if br.start() == node { leaving += currents[b]; }
                }
                prop_assert!((res - (entering - leaving)).abs() <= 1e-12);
            }
        }

        #[test]
        fn node_balance_is_linear(a in prop::collection::vec(-1000i32..1000, 2..50), shift in -1000i32..1000) {
            // Dyadic values keep the float arithmetic exact.
            let q = 1.0 / 1048576.0;
            let alpha = f64::from(shift) * q;
            let wa = Waveform::new(0.0, 1.0, a.iter().map(|&x| f64::from(x) * q).collect(), Unit::Ampere).unwrap();
            let wb = Waveform::new(0.0, 1.0, a.iter().rev().map(|&x| f64::from(x) * q).collect(), Unit::Ampere).unwrap();
            let wsum = Waveform::new(0.0, 1.0, wa.samples().iter().zip(wb.samples()).map(|(x, y)| x + y).collect(), Unit::Ampere).unwrap();
            let oa = node_balance_output(alpha, &wa).unwrap();
            let ob = node_balance_output(alpha, &wb).unwrap();
            let os = node_balance_output(alpha, &wsum).unwrap();
            for i in 0..os.len() {
                prop_assert_eq!(oa.samples()[i] + ob.samples()[i] - alpha, os.samples()[i]);
                prop_assert_eq!(oa.samples()[i] - alpha, wa.samples()[i]);
            }
        }
    }
}
