//! Dual, bad and good extensions.
//!
//! Two kernels at the same vertex are compared by their intersection: the
//! whole group means the second isogeny undoes the first (dual), order 2
//! means the composite kernel is `Z/4 x (Z/2)^2` (bad), and a trivial
//! intersection gives the `(Z/4)^2` kernel of a good extension.

use std::collections::BTreeSet;

use crate::field::Residue;
use crate::poly::LinearFactor;

use super::RichelotError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtensionClass {
    Dual,
    Bad,
    Good,
}

/// A splitting as an unordered set of unordered factor pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition<U: Residue>([[LinearFactor<U>; 2]; 3]);

impl<U: Residue> PairPartition<U> {
    pub fn new(mut pairs: [[LinearFactor<U>; 2]; 3]) -> Self {
        for p in &mut pairs {
            p.sort();
        }
        pairs.sort();
        Self(pairs)
    }

    pub fn pairs(&self) -> &[[LinearFactor<U>; 2]; 3] {
        &self.0
    }

    /// Number of quadratics the two splittings share (up to scalar).
    pub fn shared(&self, other: &Self) -> usize {
        self.0.iter().filter(|p| other.0.contains(p)).count()
    }
}

/// A maximal isotropic subgroup of the 2-torsion at a vertex.
///
/// Product kernels refer to the Weierstrass points `P_0, P_1, P_2` of the first
/// factor and `Q_0, Q_1, Q_2` of the second, in the root order of the model
/// at hand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kernel<U: Residue> {
    Jacobian(PairPartition<U>),
    /// `<(P_i, O), (O, Q_j)>`: a product of 2-isogenies.
    ProductSplit(usize, usize),
    /// `{(P_k, Q_sigma(k))}`.
    ProductDiagonal([usize; 3]),
}

impl<U: Residue> Kernel<U> {
    /// Nonzero elements of a product kernel as `(P index, Q index)`, `None`
    /// for the identity component.
    fn product_elements(&self) -> Option<BTreeSet<(Option<usize>, Option<usize>)>> {
        match *self {
            Kernel::ProductSplit(i, j) => Some([(Some(i), None), (None, Some(j)), (Some(i), Some(j))].into()),
            Kernel::ProductDiagonal(s) => Some((0..3).map(|k| (Some(k), Some(s[k]))).collect()),
            Kernel::Jacobian(_) => None,
        }
    }
}

/// Classifies `next` relative to `prev`, the image of the 2-torsion under the
/// previous isogeny (equivalently the kernel of its dual).
pub fn classify_extension<U: Residue>(prev: &Kernel<U>, next: &Kernel<U>) -> Result<ExtensionClass, RichelotError> {
    let shared = match (prev, next) {
        (Kernel::Jacobian(a), Kernel::Jacobian(b)) => a.shared(b),
        (Kernel::Jacobian(_), _) | (_, Kernel::Jacobian(_)) => return Err(RichelotError::MismatchedKernels),
        _ => {
            let a = prev.product_elements().expect("product kernel");
            let b = next.product_elements().expect("product kernel");
            a.intersection(&b).count()
        }
    };
    match shared {
        3 => Ok(ExtensionClass::Dual),
        1 => Ok(ExtensionClass::Bad),
        0 => Ok(ExtensionClass::Good),
        _ => Err(RichelotError::InvariantViolation("kernels are not maximal isotropic")),
    }
}

/// The 15 kernels at a product vertex: 9 splits, then the 6 permutations.
pub fn product_kernels<U: Residue>() -> Vec<Kernel<U>> {
    let mut out: Vec<Kernel<U>> = Vec::with_capacity(15);
    for i in 0..3 {
        for j in 0..3 {
            out.push(Kernel::ProductSplit(i, j));
        }
    }
    for s in PERMUTATIONS {
        out.push(Kernel::ProductDiagonal(s));
    }
    out
}

pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
