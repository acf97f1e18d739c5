//! Curves together with the kernel of the step that reached them.
//!
//! A state is a factor list whose pairs `(L1 L2, L3 L4, L5 L6)` are the
//! incoming splitting. Two states are the same when some Moebius map carries
//! one configuration of six points with its pairing onto the other, so the
//! key below is a normal form under `PGL_2`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::field::FieldHandle;
use crate::invariants::{cardona_quer_of, InvariantTriple};
use crate::poly::LinearFactor;
use crate::richelot::{all_splittings, classify_extension, richelot_image, ExtensionClass, FactorList, Kernel, StepOutcome};
use crate::SmallFp2;

use super::GraphError;

/// Point of the projective line; `None` is infinity.
type Point = Option<SmallFp2>;

pub type StateKey = [SmallFp2; 3];

fn points(l: &FactorList<u64>) -> [Point; 6] {
    l.factors().clone().map(|f| match f {
        LinearFactor::Root(r) => Some(r),
        LinearFactor::One => None,
    })
}

/// `u_X v_Z - v_X u_Z`.
fn bracket(u: &Point, v: &Point, one: &SmallFp2) -> SmallFp2 {
    match (u, v) {
        (Some(x), Some(y)) => x - y,
        (None, Some(_)) => one.clone(),
        (Some(_), None) => -one,
        (None, None) => one.field().zero(),
    }
}

/// The Moebius map sending `a, b, c` to `infinity, 0, 1`, evaluated at `x != a`.
fn normalize(x: &Point, a: &Point, b: &Point, c: &Point, one: &SmallFp2) -> SmallFp2 {
    let num = &bracket(x, b, one) * &bracket(c, a, one);
    let den = &bracket(x, a, one) * &bracket(c, b, one);
    num.checked_div(&den).expect("distinct points")
}

/// Normal form of the six branch points: the least sorted image of the other
/// three over all ordered triples sent to `infinity, 0, 1`.
pub fn curve_normal_form(l: &FactorList<u64>) -> StateKey {
    let pts = points(l);
    let one = l.field().one();
    let mut best: Option<StateKey> = None;
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                if a == b || a == c || b == c {
                    continue;
                }
                let mut rest: Vec<SmallFp2> = (0..6)
                    .filter(|&k| k != a && k != b && k != c)
                    .map(|k| normalize(&pts[k], &pts[a], &pts[b], &pts[c], &one))
                    .collect();
                rest.sort();
                let key: StateKey = rest.try_into().expect("three points");
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
    }
    best.expect("six points")
}

/// Normal form of a state: one incoming pair goes to `infinity, 0`, a third
/// point to `1`; the key is the image of that point's partner followed by the
/// sorted images of the last pair, minimized over the 24 choices.
pub fn state_key(l: &FactorList<u64>) -> StateKey {
    let pts = points(l);
    let one = l.field().one();
    let mut best: Option<StateKey> = None;
    for q in 0..3 {
        for (a, b) in [(2 * q, 2 * q + 1), (2 * q + 1, 2 * q)] {
            for c in (0..6).filter(|k| k / 2 != q) {
                let partner = c ^ 1;
                let last = 3 - q - c / 2;
                let img = |k: usize| normalize(&pts[k], &pts[a], &pts[b], &pts[c], &one);
                let (y, z) = (img(2 * last), img(2 * last + 1));
                let (y, z) = if z < y { (z, y) } else { (y, z) };
                let key = [img(partner), y, z];
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
    }
    best.expect("24 normalizations")
}

/// Codomains of the eight good extensions, found by classifying all 15
/// splittings against the incoming one. `None` marks a product codomain.
pub fn good_successors(l: &FactorList<u64>) -> Result<Vec<Option<FactorList<u64>>>, GraphError> {
    let prev = Kernel::Jacobian(l.incoming_splitting().partition());
    let mut out = Vec::with_capacity(8);
    for s in all_splittings(l) {
        if classify_extension(&prev, &Kernel::Jacobian(s.partition()))? != ExtensionClass::Good {
            continue;
        }
        out.push(match richelot_image(&s, false)?.0 {
            StepOutcome::Jacobian(next) => Some(next),
            StepOutcome::Split => None,
        });
    }
    if out.len() != 8 {
        return Err(GraphError::Richelot(crate::richelot::RichelotError::InvariantViolation(
            "a splitting does not have eight good extensions",
        )));
    }
    Ok(out)
}

/// The states reachable from some seeds through good extensions into
/// jacobians.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub keys: Vec<StateKey>,
    pub models: Vec<FactorList<u64>>,
    pub triples: Vec<InvariantTriple<u64>>,
    /// Jacobian successors with multiplicity.
    pub successors: Vec<Vec<usize>>,
    /// Number of good extensions ending in a product.
    pub bottoms: Vec<usize>,
    index: HashMap<StateKey, usize>,
}

impl StateGraph {
    pub fn explore(seeds: &[FactorList<u64>]) -> Result<Self, GraphError> {
        let mut g = StateGraph {
            keys: Vec::new(),
            models: Vec::new(),
            triples: Vec::new(),
            successors: Vec::new(),
            bottoms: Vec::new(),
            index: HashMap::new(),
        };
        let mut frontier = Vec::new();
        for s in seeds {
            if let Some(i) = g.insert(s.clone())? {
                frontier.push(i);
            }
        }
        while !frontier.is_empty() {
            let expanded: Vec<_> = frontier.par_iter().map(|&i| good_successors(&g.models[i])).collect();
            let mut next = Vec::new();
            for (&i, out) in frontier.iter().zip(expanded) {
                let mut succ = Vec::with_capacity(8);
                for l in out? {
                    match l {
                        None => g.bottoms[i] += 1,
                        Some(l) => {
                            let key = state_key(&l);
                            let j = match g.index.get(&key) {
                                Some(&j) => j,
                                None => {
                                    let j = g.insert(l)?.expect("new state");
                                    next.push(j);
                                    j
                                }
                            };
                            succ.push(j);
                        }
                    }
                }
                g.successors[i] = succ;
            }
            frontier = next;
        }
        Ok(g)
    }

    fn insert(&mut self, l: FactorList<u64>) -> Result<Option<usize>, GraphError> {
        let key = state_key(&l);
        if self.index.contains_key(&key) {
            return Ok(None);
        }
        let i = self.keys.len();
        self.index.insert(key.clone(), i);
        self.triples.push(cardona_quer_of(l.factors(), l.field())?);
        self.keys.push(key);
        self.models.push(l);
        self.successors.push(Vec::new());
        self.bottoms.push(0);
        Ok(Some(i))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn index_of(&self, l: &FactorList<u64>) -> Option<usize> {
        self.index.get(&state_key(l)).copied()
    }
}

/// Walk counts after a fixed number of good steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WalkLevel {
    pub triples: BTreeMap<InvariantTriple<u64>, u64>,
    pub bottom: u64,
}

/// For each length `0..=depth`, how many good walks from `start` end at each
/// jacobian and how many hit a product on the way.
pub fn good_walk_ball(start: &FactorList<u64>, depth: usize) -> Result<Vec<WalkLevel>, GraphError> {
    let g = StateGraph::explore(std::slice::from_ref(start))?;
    let s0 = g.index_of(start).expect("seed state");
    let mut counts: BTreeMap<usize, u64> = [(s0, 1)].into();
    let mut bottom = 0u64;
    let mut levels = Vec::with_capacity(depth + 1);
    for level in 0..=depth {
        let mut w = WalkLevel { triples: BTreeMap::new(), bottom };
        for (&s, &c) in &counts {
            *w.triples.entry(g.triples[s].clone()).or_insert(0) += c;
        }
        levels.push(w);
        if level == depth {
            break;
        }
        let mut next = BTreeMap::new();
        bottom *= 8;
        for (&s, &c) in &counts {
            bottom += c * g.bottoms[s] as u64;
            for &t in &g.successors[s] {
                *next.entry(t).or_insert(0) += c;
            }
        }
        counts = next;
    }
    Ok(levels)
}
