//! Line-oriented verification reports.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use petgraph::algo::{connected_components, tarjan_scc};
use petgraph::graph::{DiGraph, UnGraph};

use crate::field::{FieldContext, FieldHandle};
use crate::invariants::{enumerate_ss_j, is_superspecial_g2, supersingular_models, Genus2Curve};
use crate::richelot::{all_splittings, glue_product, richelot_image, split_codomain, GlueOutcome, StepOutcome, PERMUTATIONS};
use crate::SmallFp2;

use super::state::{curve_normal_form, StateGraph};
use super::{x5_minus_x, GraphError, GraphSnapshot, Model, Vertex};

/// `CHECK <name> p=<p> PASS|FAIL <details>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub p: u64,
    pub pass: bool,
    pub details: String,
}

impl CheckLine {
    fn new(name: &str, p: u64, pass: bool, details: impl Into<String>) -> Self {
        Self { name: name.into(), p, pass, details: details.into() }
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "CHECK {} p={} {} {}", self.name, self.p, verdict, self.details)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report(pub Vec<CheckLine>);

impl Report {
    pub fn all_pass(&self) -> bool {
        self.0.iter().all(|l| l.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.0.iter().filter(|l| !l.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.0.extend(other.0);
    }

    pub fn line(&self, name: &str) -> Option<&CheckLine> {
        self.0.iter().find(|l| l.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn fraction(num: i64, den: i64) -> String {
    let g = num.gcd(&den);
    let (n, d) = (num / g, den / g);
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

/// Vertex counts against the closed formulas. The observed offsets are
/// printed as `delta` and `eps`.
pub fn verify_counts(g: &GraphSnapshot) -> Result<Report, GraphError> {
    let p = g.p() as i64;
    let mut r = Report::default();
    let jac = g.jacobian_count() as i64;
    let base = p * p * p + 24 * p * p + 141 * p - 346;
    let d = 2880 * jac - base;
    r.0.push(CheckLine::new(
        "jacobian-count",
        g.p(),
        (0..=3524).contains(&d),
        format!("#J={jac} base={} delta={}", fraction(base, 2880), fraction(d, 2880)),
    ));
    let n = enumerate_ss_j(g.field())?.len() as i64;
    let e = 12 * n - (p - 1);
    r.0.push(CheckLine::new(
        "supersingular-count",
        g.p(),
        (0..=14).contains(&e),
        format!("n={n} eps={}", fraction(e, 12)),
    ));
    let prod = g.product_count() as i64;
    r.0.push(CheckLine::new(
        "product-count",
        g.p(),
        prod == n * (n + 1) / 2,
        format!("#E={prod} expected={}", n * (n + 1) / 2),
    ));
    Ok(r)
}

/// Order of the automorphism group of an elliptic curve with this j, `p > 3`.
fn aut_order(j: &SmallFp2) -> usize {
    if j.is_zero() {
        6
    } else if *j == j.field().from_u64(1728) {
        4
    } else {
        2
    }
}

/// Edge-count bounds, regularity, symmetry, and the superspecial test on
/// models defined over `F_p`.
pub fn verify_edges(g: &GraphSnapshot) -> Result<Report, GraphError> {
    let p = g.p();
    let mut r = Report::default();
    let n = g.vertices().len();
    let irregular: Vec<_> = (0..n).filter(|&i| g.out_degree(i) != 15).collect();
    r.0.push(CheckLine::new(
        "out-degree",
        p,
        irregular.is_empty(),
        format!("vertices={n} irregular={}", irregular.len()),
    ));
    let mult = g.multiplicities();
    let one_way: Vec<_> = mult.keys().filter(|(a, b)| !mult.contains_key(&(*b, *a))).collect();
    r.0.push(CheckLine::new(
        "edge-symmetry",
        p,
        one_way.is_empty(),
        match one_way.first() {
            None => format!("pairs={}", mult.len()),
            Some(&&(a, b)) => format!("no edge back from {} to {}", g.vertices()[b].label(), g.vertices()[a].label()),
        },
    ));
    let cross = |i: usize| {
        let from_j = g.vertices()[i].is_jacobian();
        g.out_edges(i).iter().filter(|e| g.vertices()[e.to].is_jacobian() != from_j).count()
    };
    for (name, want_jac) in [("jacobian-to-product-edges", true), ("product-to-jacobian-edges", false)] {
        let counts: Vec<(usize, usize)> = (0..n)
            .filter(|&i| g.vertices()[i].is_jacobian() == want_jac)
            .map(|i| (i, cross(i)))
            .collect();
        let worst = counts.iter().max_by_key(|c| c.1);
        let pass = counts.iter().all(|c| c.1 <= 6);
        let details = match worst {
            None => "none".to_string(),
            Some(&(i, c)) if c > 6 => format!("{} has {c}", g.vertices()[i].label()),
            Some(&(_, c)) => format!("max={c}"),
        };
        r.0.push(CheckLine::new(name, p, pass, details));
    }
    let mut diag = Vec::new();
    let mut diag_ok = true;
    for i in 0..n {
        if let Vertex::Product([j1, j2]) = &g.vertices()[i] {
            if j1 == j2 {
                let want = 6 - aut_order(j1) / 2;
                let got = cross(i);
                diag_ok &= got == want;
                diag.push(format!("{}:{got}/{want}", j1.canonical_encode()));
            }
        }
    }
    r.0.push(CheckLine::new("diagonal-product-edges", p, diag_ok, diag.join(" ")));
    let mut checked = 0;
    let mut failed = Vec::new();
    for (v, m) in g.vertices().iter().zip(g.models()) {
        let Model::Jacobian(l) = m else { continue };
        let c = Genus2Curve::from_factors(l.factors(), l.field())?;
        if !c.f().coeffs().iter().all(|a| a.is_in_base_field()) {
            continue;
        }
        checked += 1;
        if !is_superspecial_g2(&c)? {
            failed.push(v.label());
        }
    }
    r.0.push(CheckLine::new(
        "superspecial-models",
        p,
        failed.is_empty(),
        match failed.first() {
            None => format!("checked={checked}"),
            Some(l) => format!("{l} is not superspecial"),
        },
    ));
    if matches!(p % 8, 5 | 7) {
        r.extend(x5_minus_x_check(p)?);
    }
    Ok(r)
}

/// The determinants of all 15 splittings of `y^2 = x^5 - x`: up to sign six
/// zeros, `2` once, `3i + 1` and `3i - 1` four times each (reduced mod `p`).
pub fn x5_minus_x_check(p: u64) -> Result<Report, GraphError> {
    let field = FieldContext::new(p)?;
    let l = x5_minus_x(&field)?;
    let up_to_sign = |d: SmallFp2| {
        let m = -&d;
        if m < d {
            m
        } else {
            d
        }
    };
    let mut got: Vec<SmallFp2> = all_splittings(&l).iter().map(|s| up_to_sign(s.delta())).collect();
    got.sort();
    let i = field.from_i64(-1).sqrt().expect("square in F_p2");
    let three_i = &field.from_u64(3) * &i;
    let mut want = vec![field.zero(); 6];
    want.push(field.from_u64(2));
    want.extend(std::iter::repeat_n(&three_i + &field.one(), 4));
    want.extend(std::iter::repeat_n(&three_i - &field.one(), 4));
    let mut want: Vec<SmallFp2> = want.into_iter().map(up_to_sign).collect();
    want.sort();
    let zeros = got.iter().filter(|d| d.is_zero()).count();
    let expected_zeros = if p == 5 { 10 } else { 6 };
    let mut r = Report::default();
    r.0.push(CheckLine::new(
        "x5-x-singular-splittings",
        p,
        zeros == expected_zeros,
        format!("zeros={zeros} expected={expected_zeros}"),
    ));
    let shown: Vec<String> = got.iter().map(ToString::to_string).collect();
    r.0.push(CheckLine::new("x5-x-deltas", p, got == want, format!("[{}]", shown.join(", "))));
    Ok(r)
}

/// Vertex counts by a closure keyed on branch-point normal forms instead of
/// invariants, so that it also runs at `p = 5`. Returns `(#J, #E)`.
pub fn small_prime_counts(p: u64) -> Result<(usize, usize), GraphError> {
    let field = FieldContext::new(p)?;
    let es: Vec<_> = supersingular_models(&field)?.into_values().collect();
    let mut jac = HashSet::new();
    let mut prod = BTreeSet::new();
    let mut queue = VecDeque::new();
    let push = |m: Model, jac: &mut HashSet<_>, prod: &mut BTreeSet<_>, queue: &mut VecDeque<Model>| {
        let fresh = match &m {
            Model::Jacobian(l) => jac.insert(curve_normal_form(l)),
            Model::Product(a, b) => {
                let (x, y) = (a.j_invariant(), b.j_invariant());
                prod.insert(if y < x { (y, x) } else { (x, y) })
            }
        };
        if fresh {
            queue.push_back(m);
        }
    };
    if matches!(p % 8, 5 | 7) {
        push(Model::Jacobian(x5_minus_x(&field)?), &mut jac, &mut prod, &mut queue);
    }
    for (i, a) in es.iter().enumerate() {
        for b in &es[i..] {
            push(Model::Product(a.clone(), b.clone()), &mut jac, &mut prod, &mut queue);
        }
    }
    while let Some(m) = queue.pop_front() {
        let mut next = Vec::new();
        match &m {
            Model::Jacobian(l) => {
                for s in all_splittings(l) {
                    next.push(match richelot_image(&s, false)?.0 {
                        StepOutcome::Jacobian(l) => Model::Jacobian(l),
                        StepOutcome::Split => {
                            let c = split_codomain(&s)?;
                            Model::Product(c.e1, c.e2)
                        }
                    });
                }
            }
            Model::Product(a, b) => {
                for k in m.kernels() {
                    if let super::KernelDescriptor::ProductSplit(i, j) = k {
                        let (x, y) = crate::richelot::product_step(a, b, (i as usize, j as usize))?;
                        next.push(Model::Product(x, y));
                    }
                }
                for s in PERMUTATIONS {
                    if let GlueOutcome::Jacobian { factors, .. } = glue_product(a, b, s)? {
                        next.push(Model::Jacobian(factors));
                    }
                }
            }
        }
        for m in next {
            push(m, &mut jac, &mut prod, &mut queue);
        }
    }
    Ok((jac.len(), prod.len()))
}

/// Connectivity of `G_p`, of its jacobian part, and reachability through
/// good extensions.
pub fn verify_connectivity(g: &GraphSnapshot) -> Result<Report, GraphError> {
    let p = g.p();
    let n = g.vertices().len();
    let mut r = Report::default();
    let mut whole = UnGraph::<(), ()>::new_undirected();
    let nodes: Vec<_> = (0..n).map(|_| whole.add_node(())).collect();
    for e in g.edges() {
        whole.add_edge(nodes[e.from], nodes[e.to], ());
    }
    let c = connected_components(&whole);
    r.0.push(CheckLine::new("connected", p, c == 1, format!("components={c}")));

    let jac: Vec<usize> = (0..n).filter(|&i| g.vertices()[i].is_jacobian()).collect();
    let mut pos = vec![usize::MAX; n];
    for (k, &i) in jac.iter().enumerate() {
        pos[i] = k;
    }
    let mut sub = UnGraph::<(), ()>::new_undirected();
    let sub_nodes: Vec<_> = jac.iter().map(|_| sub.add_node(())).collect();
    for e in g.edges() {
        if pos[e.from] != usize::MAX && pos[e.to] != usize::MAX {
            sub.add_edge(sub_nodes[pos[e.from]], sub_nodes[pos[e.to]], ());
        }
    }
    let c = connected_components(&sub);
    r.0.push(CheckLine::new("jacobian-connected", p, c == 1, format!("components={c}")));

    // lifted state graph: first step any jacobian edge, then good extensions
    let mut starts: Vec<Vec<crate::richelot::FactorList<u64>>> = Vec::with_capacity(jac.len());
    for &i in &jac {
        let Model::Jacobian(l) = &g.models()[i] else { unreachable!("jacobian vertex") };
        let mut out = Vec::new();
        for s in all_splittings(l) {
            if let StepOutcome::Jacobian(next) = richelot_image(&s, false)?.0 {
                out.push(next);
            }
        }
        starts.push(out);
    }
    let seeds: Vec<_> = starts.iter().flatten().cloned().collect();
    let sg = StateGraph::explore(&seeds)?;
    let mut owner = Vec::with_capacity(sg.len());
    for t in &sg.triples {
        let v = g.index_of(&Vertex::Jacobian(t.clone())).ok_or(GraphError::UnknownVertex)?;
        owner.push(pos[v]);
    }
    let mut dg = DiGraph::<(), ()>::with_capacity(sg.len(), sg.len() * 8);
    let snodes: Vec<_> = (0..sg.len()).map(|_| dg.add_node(())).collect();
    for (s, succ) in sg.successors.iter().enumerate() {
        let uniq: BTreeSet<_> = succ.iter().collect();
        for &t in uniq {
            dg.add_edge(snodes[s], snodes[t], ());
        }
    }
    let words = jac.len().div_ceil(64);
    let sccs = tarjan_scc(&dg);
    let mut comp = vec![0usize; sg.len()];
    for (c, members) in sccs.iter().enumerate() {
        for m in members {
            comp[m.index()] = c;
        }
    }
    // tarjan_scc yields components sinks first
    let mut reach = vec![vec![0u64; words]; sccs.len()];
    for (c, members) in sccs.iter().enumerate() {
        let mut bits = vec![0u64; words];
        for m in members {
            let s = m.index();
            bits[owner[s] / 64] |= 1 << (owner[s] % 64);
            for &t in &sg.successors[s] {
                if comp[t] != c {
                    for (b, x) in bits.iter_mut().zip(&reach[comp[t]]) {
                        *b |= x;
                    }
                }
            }
        }
        reach[c] = bits;
    }
    let mut stuck = Vec::new();
    for (k, list) in starts.iter().enumerate() {
        let mut bits = vec![0u64; words];
        bits[k / 64] |= 1 << (k % 64);
        for l in list {
            let s = sg.index_of(l).expect("seeded state");
            for (b, x) in bits.iter_mut().zip(&reach[comp[s]]) {
                *b |= x;
            }
        }
        let count: u32 = bits.iter().map(|b| b.count_ones()).sum();
        if count as usize != jac.len() {
            stuck.push(k);
        }
    }
    r.0.push(CheckLine::new(
        "good-extension-connected",
        p,
        stuck.is_empty(),
        match stuck.first() {
            None => format!("states={} sources={}", sg.len(), jac.len()),
            Some(&k) => format!("{} sources fail, first {}", stuck.len(), g.vertices()[jac[k]].label()),
        },
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::build_graph;
    use super::*;

    #[test]
    fn report_line_format() {
        let l = CheckLine::new("x", 13, true, "ok");
        assert_eq!(l.to_string(), "CHECK x p=13 PASS ok");
    }

    #[test]
    fn p13_reports_pass() {
        let g = build_graph(13).unwrap();
        for r in [verify_counts(&g), verify_edges(&g), verify_connectivity(&g)] {
            let r = r.unwrap();
            assert!(r.all_pass(), "{r}");
        }
    }

    #[test]
    fn p5_counts() {
        assert_eq!(small_prime_counts(5).unwrap(), (1, 1));
        let r = x5_minus_x_check(5).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn normal_form_counts_agree_with_invariants() {
        for p in [7, 11, 13, 17] {
            let g = build_graph(p).unwrap();
            assert_eq!(small_prime_counts(p).unwrap(), (g.jacobian_count(), g.product_count()));
        }
    }
}
