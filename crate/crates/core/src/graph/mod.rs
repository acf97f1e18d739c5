//! The superspecial (2,2)-isogeny multigraph `G_p` for small primes.
//!
//! Jacobian vertices are keyed by their Cardona-Quer triple, products of
//! elliptic curves by the sorted pair of j-invariants. Each vertex keeps one
//! concrete model; kernel descriptors on edges refer to that model.

mod checks;
mod export;
mod path;
mod state;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_probable_prime, FieldContext, FieldError, FieldHandle};
use crate::hash::c0_start;
use crate::invariants::{cardona_quer_of, supersingular_models, EllipticRootsForm, InvariantError, InvariantTriple};
use crate::richelot::{
    all_splittings, glue_product, product_step, richelot_image, split_codomain, FactorList, GlueOutcome,
    QuadraticSplitting, RichelotError, StepOutcome, PERMUTATIONS,
};
use crate::SmallFp2;

pub use checks::{x5_minus_x_check, small_prime_counts, verify_connectivity, verify_counts, verify_edges, CheckLine, Report};
pub use export::{ExportFormat, GRAPH_FORMAT};
pub use path::{find_path, replay_path, replay_trace, PathStep};
pub use state::{curve_normal_form, good_successors, good_walk_ball, state_key, StateGraph, StateKey, WalkLevel};

pub type SmallField = Arc<FieldContext<u64>>;

/// Largest prime [`build_graph`] accepts unless told otherwise.
pub const DEFAULT_PRIME_BOUND: u64 = 199;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("p = {p} is outside the supported range 7..={bound}")]
    OutOfRange { p: u64, bound: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no superspecial seed for p = {p} (tried: {tried})")]
    NoSeed { p: u64, tried: String },
    #[error("vertex is not in the graph")]
    UnknownVertex,
    #[error("path step does not apply here: {0}")]
    BadPath(String),
    #[error("malformed graph: {0}")]
    Format(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Richelot(#[from] RichelotError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Jacobian(InvariantTriple<u64>),
    /// Sorted j-invariants of the two factors.
    Product([SmallFp2; 2]),
}

impl Vertex {
    pub fn product(j1: SmallFp2, j2: SmallFp2) -> Self {
        if j2 < j1 {
            Vertex::Product([j2, j1])
        } else {
            Vertex::Product([j1, j2])
        }
    }

    pub fn is_jacobian(&self) -> bool {
        matches!(self, Vertex::Jacobian(_))
    }

    /// `J(a,b,c)` or `E(j1,j2)` with canonical integer codes.
    pub fn label(&self) -> String {
        match self {
            Vertex::Jacobian(t) => {
                let c = t.0.each_ref().map(|x| x.canonical_encode().to_string());
                format!("J({})", c.join(","))
            }
            Vertex::Product([a, b]) => format!("E({},{})", a.canonical_encode(), b.canonical_encode()),
        }
    }
}

/// A concrete curve or product for a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Jacobian(FactorList<u64>),
    Product(EllipticRootsForm<u64>, EllipticRootsForm<u64>),
}

impl Model {
    pub fn vertex(&self) -> Result<Vertex, GraphError> {
        Ok(match self {
            Model::Jacobian(l) => Vertex::Jacobian(cardona_quer_of(l.factors(), l.field())?),
            Model::Product(e1, e2) => Vertex::product(e1.j_invariant(), e2.j_invariant()),
        })
    }

    /// The 15 kernels in edge order.
    pub fn kernels(&self) -> Vec<KernelDescriptor> {
        match self {
            Model::Jacobian(_) => (0..15).map(KernelDescriptor::Splitting).collect(),
            Model::Product(..) => {
                let mut out: Vec<_> = (0..3)
                    .flat_map(|i| (0..3).map(move |j| KernelDescriptor::ProductSplit(i, j)))
                    .collect();
                out.extend((0..6).map(KernelDescriptor::Diagonal));
                out
            }
        }
    }
}

/// A (2,2)-kernel at a model.
///
/// `Splitting(k)` is the `k`-th entry of `all_splittings`; `ProductSplit(i, j)`
/// is `<(P_i, O), (O, Q_j)>` and `Diagonal(s)` the graph of the `s`-th
/// permutation, both in the root order of the product model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelDescriptor {
    Splitting(u8),
    ProductSplit(u8, u8),
    Diagonal(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kernel: KernelDescriptor,
}

/// Codomain of the splitting, as a vertex and a model.
pub fn splitting_image(s: &QuadraticSplitting<u64>) -> Result<(Vertex, Model), GraphError> {
    let model = match richelot_image(s, false)?.0 {
        StepOutcome::Jacobian(l) => Model::Jacobian(l),
        StepOutcome::Split => {
            let c = split_codomain(s)?;
            Model::Product(c.e1, c.e2)
        }
    };
    Ok((model.vertex()?, model))
}

/// Applies one kernel to a model.
pub fn apply_kernel(model: &Model, kernel: KernelDescriptor) -> Result<(Vertex, Model), GraphError> {
    let bad = || GraphError::BadPath(format!("{kernel:?} on {}", model_kind(model)));
    match (model, kernel) {
        (Model::Jacobian(l), KernelDescriptor::Splitting(k)) if k < 15 => {
            splitting_image(&all_splittings(l)[k as usize])
        }
        (Model::Product(e1, e2), KernelDescriptor::ProductSplit(i, j)) if i < 3 && j < 3 => {
            let (a, b) = product_step(e1, e2, (i as usize, j as usize))?;
            let m = Model::Product(a, b);
            Ok((m.vertex()?, m))
        }
        (Model::Product(e1, e2), KernelDescriptor::Diagonal(s)) if s < 6 => {
            match glue_product(e1, e2, PERMUTATIONS[s as usize])? {
                GlueOutcome::SelfIsogeny => Ok((model.vertex()?, model.clone())),
                GlueOutcome::Jacobian { factors, .. } => {
                    let m = Model::Jacobian(factors);
                    Ok((m.vertex()?, m))
                }
            }
        }
        _ => Err(bad()),
    }
}

fn model_kind(m: &Model) -> &'static str {
    match m {
        Model::Jacobian(_) => "a jacobian",
        Model::Product(..) => "a product",
    }
}

/// All 15 outgoing edges of a model.
pub fn neighbours(model: &Model) -> Result<Vec<(KernelDescriptor, Vertex, Model)>, GraphError> {
    match model {
        Model::Jacobian(l) => all_splittings(l)
            .iter()
            .enumerate()
            .map(|(k, s)| splitting_image(s).map(|(v, m)| (KernelDescriptor::Splitting(k as u8), v, m)))
            .collect(),
        Model::Product(..) => model
            .kernels()
            .into_iter()
            .map(|k| apply_kernel(model, k).map(|(v, m)| (k, v, m)))
            .collect(),
    }
}

/// `y^2 = x^5 - x` as `(0, 1, -1, i, -i, 1)`.
pub fn x5_minus_x(field: &SmallField) -> Result<FactorList<u64>, GraphError> {
    let i = field.from_i64(-1).sqrt().expect("every element of F_p is a square in F_p2");
    Ok(FactorList::from_roots([
        Some(field.zero()),
        Some(field.one()),
        Some(-field.one()),
        Some(i.clone()),
        Some(-i),
        None,
    ])?)
}

/// Known superspecial models: `x^5 - x` for `p = 5, 7 mod 8`, the sextic `C_0`
/// for `p = 5 mod 6`, and every product of supersingular Legendre curves.
pub fn seed_models(field: &SmallField) -> Result<Vec<Model>, GraphError> {
    let p = *field.p();
    let mut out = Vec::new();
    if matches!(p % 8, 5 | 7) {
        out.push(Model::Jacobian(x5_minus_x(field)?));
    }
    if p % 6 == 5 {
        out.push(Model::Jacobian(c0_start(field).map_err(|e| GraphError::Format(e.to_string()))?));
    }
    let es: Vec<_> = supersingular_models(field)?.into_values().collect();
    for (i, e1) in es.iter().enumerate() {
        for e2 in &es[i..] {
            out.push(Model::Product(e1.clone(), e2.clone()));
        }
    }
    if out.is_empty() {
        return Err(GraphError::NoSeed {
            p,
            tried: "x^5-x (p = 5,7 mod 8), C0 (p = 5 mod 6), supersingular products".into(),
        });
    }
    Ok(out)
}

/// An immutable `G_p`: vertices in key order, edges sorted by source then
/// kernel.
#[derive(Clone, Debug)]
pub struct GraphSnapshot {
    field: SmallField,
    vertices: Vec<Vertex>,
    models: Vec<Model>,
    edges: Vec<Edge>,
}

impl PartialEq for GraphSnapshot {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p()
            && self.vertices == other.vertices
            && self.models == other.models
            && self.edges == other.edges
    }
}

impl Eq for GraphSnapshot {}

impl GraphSnapshot {
    fn from_parts(
        field: SmallField,
        vertices: Vec<Vertex>,
        models: Vec<Model>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        if models.len() != n || edges.iter().any(|e| e.from >= n || e.to >= n) {
            return Err(GraphError::Format("edge endpoint out of range".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
        let mut rank = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge { from: rank[e.from], to: rank[e.to], kernel: e.kernel })
            .collect();
        edges.sort();
        let mut vs: Vec<Option<Vertex>> = vertices.into_iter().map(Some).collect();
        let mut ms: Vec<Option<Model>> = models.into_iter().map(Some).collect();
        let vertices = order.iter().map(|&i| vs[i].take().expect("permutation")).collect();
        let models = order.iter().map(|&i| ms[i].take().expect("permutation")).collect();
        Ok(Self { field, vertices, models, edges })
    }

    pub fn p(&self) -> u64 {
        *self.field.p()
    }

    pub fn field(&self) -> &SmallField {
        &self.field
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn out_edges(&self, i: usize) -> &[Edge] {
        let lo = self.edges.partition_point(|e| e.from < i);
        let hi = self.edges.partition_point(|e| e.from <= i);
        &self.edges[lo..hi]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_edges(i).len()
    }

    /// Edge multiplicities by `(from, to)`.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry((e.from, e.to)).or_insert(0) += 1;
        }
        m
    }

    pub fn jacobian_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.is_jacobian()).count()
    }

    pub fn product_count(&self) -> usize {
        self.vertices.len() - self.jacobian_count()
    }
}

pub fn build_graph(p: u64) -> Result<GraphSnapshot, GraphError> {
    build_graph_with(p, DEFAULT_PRIME_BOUND)
}

/// Breadth-first closure of the seeds under all 15 outgoing edges.
pub fn build_graph_with(p: u64, bound: u64) -> Result<GraphSnapshot, GraphError> {
    if p < 7 || p > bound {
        return Err(GraphError::OutOfRange { p, bound });
    }
    if !is_probable_prime(&BigUint::from(p)) {
        return Err(GraphError::NotPrime(p));
    }
    let field = FieldContext::new(p)?;
    let mut index: HashMap<Vertex, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut models = Vec::new();
    let mut frontier = Vec::new();
    for m in seed_models(&field)? {
        let v = m.vertex()?;
        if !index.contains_key(&v) {
            index.insert(v.clone(), vertices.len());
            frontier.push(vertices.len());
            vertices.push(v);
            models.push(m);
        }
    }
    let mut edges = Vec::new();
    while !frontier.is_empty() {
        let expanded: Vec<_> = frontier.par_iter().map(|&i| neighbours(&models[i])).collect();
        let mut next = Vec::new();
        for (&from, out) in frontier.iter().zip(expanded) {
            for (kernel, v, m) in out? {
                let to = match index.get(&v) {
                    Some(&t) => t,
                    None => {
                        let t = vertices.len();
                        index.insert(v.clone(), t);
                        vertices.push(v);
                        models.push(m);
                        next.push(t);
                        t
                    }
                };
                edges.push(Edge { from, to, kernel });
            }
        }
        frontier = next;
    }
    GraphSnapshot::from_parts(field, vertices, models, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g13_shape() {
        let g = build_graph(13).unwrap();
        assert_eq!(g.jacobian_count(), 3);
        assert_eq!(g.product_count(), 1);
        for i in 0..g.vertices().len() {
            assert_eq!(g.out_degree(i), 15);
        }
    }

    #[test]
    fn range_is_enforced() {
        assert_eq!(build_graph(5), Err(GraphError::OutOfRange { p: 5, bound: 199 }));
        assert_eq!(build_graph(211), Err(GraphError::OutOfRange { p: 211, bound: 199 }));
        assert_eq!(build_graph(15), Err(GraphError::NotPrime(15)));
        assert!(build_graph_with(211, 211).is_ok());
    }

    #[test]
    fn sizes_double_from_13_to_17() {
        assert_eq!(build_graph(17).unwrap().vertices().len(), 8);
    }
}
