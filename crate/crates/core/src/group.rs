//! Finite reflection groups realized as permutations of a root system.
//!
//! The only floating-point step is building the root system; after that
//! every group element is an exact permutation of root indices.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use thiserror::Error;

use crate::diagram::{DecoratedDiagram, NodeSet};

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Roots closer than this are the same root.
pub const ROOT_TOLERANCE: f64 = 1e-6;
/// Distinct roots must be at least this far apart.
pub const ROOT_SEPARATION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("Gram matrix is not positive definite; the diagram is not of finite type")]
    NotFiniteType,
    #[error("group of order {order} exceeds the enumeration budget of {budget} elements")]
    BudgetExceeded { order: BigUint, budget: usize },
    #[error("two distinct roots are closer than the separation threshold")]
    ToleranceCollision,
    #[error("subgroup does not belong to this group")]
    SubgroupNotContained,
}

/// Unit normals of the simple mirrors, one per diagram node.
#[derive(Debug, Clone)]
pub struct SimpleNormals {
    vectors: Vec<DVector<f64>>,
}

impl SimpleNormals {
    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Matrix whose rows are the normals.
    pub fn as_rows(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.vectors[i][j])
    }
}

/// Rows of the Cholesky factor of the Gram matrix `-cos(pi / m_ij)`.
pub fn simple_normals(d: &DecoratedDiagram) -> Result<SimpleNormals, GroupError> {
    let gram = d.coxeter_matrix().gram();
    let n = d.len();
    let chol = gram.cholesky().ok_or(GroupError::NotFiniteType)?;
    let l = chol.l();
    let vectors = (0..n).map(|i| DVector::from_fn(n, |j, _| l[(i, j)])).collect();
    Ok(SimpleNormals { vectors })
}

/// Deduplicated root vectors closed under the simple reflections.
#[derive(Debug, Clone)]
pub struct RootSystem {
    roots: Vec<DVector<f64>>,
    simple_indices: Vec<usize>,
}

impl RootSystem {
    pub fn roots(&self) -> &[DVector<f64>] {
        &self.roots
    }

    pub fn simple_indices(&self) -> &[usize] {
        &self.simple_indices
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    fn find(&self, v: &DVector<f64>) -> Option<usize> {
        self.roots.iter().position(|r| (r - v).amax() < ROOT_TOLERANCE)
    }
}

fn reflect(normal: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    v - normal * (2.0 * normal.dot(v))
}

/// A group element as a permutation of root indices, with a generator word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub perm: Vec<u16>,
    /// Simple-reflection indices whose left-to-right product is the element.
    pub word: Vec<usize>,
}

/// A parabolic subgroup: the closure of a set of simple reflections.
#[derive(Debug, Clone)]
pub struct Subgroup {
    generators: NodeSet,
    elements: Vec<u32>,
    fingerprint: u64,
}

impl Subgroup {
    pub fn generators(&self) -> NodeSet {
        self.generators
    }

    /// Element indices (into the parent group), ascending.
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, element: u32) -> bool {
        self.elements.binary_search(&element).is_ok()
    }
}

/// Left cosets `g G_J` of a parabolic subgroup, in canonical order.
#[derive(Debug, Clone)]
pub struct CosetPartition {
    pub generators: NodeSet,
    /// Coset index of every group element.
    pub coset_of: Vec<u32>,
    /// Canonical representative (lexicographically least root permutation)
    /// of each coset; cosets are sorted by that permutation.
    pub representatives: Vec<u32>,
}

impl CosetPartition {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// A finite reflection group, fully enumerated.
#[derive(Debug, Clone)]
pub struct Group {
    normals: SimpleNormals,
    roots: RootSystem,
    rank: usize,
    nroots: usize,
    perms: Vec<u16>,
    lmul: Vec<u32>,
    rmul: Vec<u32>,
    parent: Vec<(u32, u8)>,
    generators: Vec<u32>,
    index: HashMap<Vec<u16>, u32>,
    basis_inverse: DMatrix<f64>,
    fingerprint: u64,
}

impl Group {
    /// Builds normals, roots and the group for `d` with the default budget.
    pub fn of(d: &DecoratedDiagram) -> Result<Self, GroupError> {
        Self::of_with_budget(d, DEFAULT_BUDGET)
    }

    pub fn of_with_budget(d: &DecoratedDiagram, budget: usize) -> Result<Self, GroupError> {
        let order = d.group_order();
        if order > BigUint::from(budget) {
            return Err(GroupError::BudgetExceeded { order, budget });
        }
        let normals = simple_normals(d)?;
        Self::enumerate(normals, budget)
    }

    /// Breadth-first closure of the simple reflections acting on the roots.
    pub fn enumerate(normals: SimpleNormals, budget: usize) -> Result<Self, GroupError> {
        let rank = normals.dim();
        let roots = root_closure(&normals)?;
        let nroots = roots.len();
        let simple = roots.simple_indices.clone();

        let reflections: Vec<Vec<u16>> = normals
            .vectors
            .iter()
            .map(|n| {
                roots
                    .roots
                    .iter()
                    .map(|r| roots.find(&reflect(n, r)).expect("root system is closed") as u16)
                    .collect()
            })
            .collect();

        let key_of = |perm: &[u16]| -> Vec<u16> { simple.iter().map(|&s| perm[s]).collect() };
        let mut perms: Vec<u16> = (0..nroots as u16).collect();
        let mut index: HashMap<Vec<u16>, u32> = HashMap::new();
        index.insert(key_of(&perms[..nroots]), 0);
        let mut parent = vec![(0u32, u8::MAX)];
        let mut lmul: Vec<u32> = Vec::new();
        let mut next = 0usize;
        let mut scratch = vec![0u16; nroots];
        while next * nroots < perms.len() {
            for (s, refl) in reflections.iter().enumerate() {
                let g = &perms[next * nroots..(next + 1) * nroots];
                for r in 0..nroots {
                    scratch[r] = refl[g[r] as usize];
                }
                let key = key_of(&scratch);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = parent.len() as u32;
                        if parent.len() >= budget {
                            return Err(GroupError::BudgetExceeded {
                                order: BigUint::from(parent.len() + 1),
                                budget,
                            });
                        }
                        index.insert(key, id);
                        perms.extend_from_slice(&scratch);
                        parent.push((next as u32, s as u8));
                        id
                    }
                };
                lmul.push(id);
            }
            next += 1;
        }
        let order = parent.len();

        let mut rmul = Vec::with_capacity(order * rank);
        for g in 0..order {
            let perm = &perms[g * nroots..(g + 1) * nroots];
            for refl in &reflections {
                let key: Vec<u16> = simple.iter().map(|&s| perm[refl[s] as usize]).collect();
                rmul.push(index[&key]);
            }
        }
        let generators = (0..rank).map(|s| lmul[s]).collect();

        let basis = DMatrix::from_fn(rank, rank, |i, j| normals.vectors[j][i]);
        let basis_inverse = basis.try_inverse().ok_or(GroupError::NotFiniteType)?;

        let mut hasher = DefaultHasher::new();
        reflections.hash(&mut hasher);
        order.hash(&mut hasher);
        let fingerprint = hasher.finish();

        Ok(Self {
            normals,
            roots,
            rank,
            nroots,
            perms,
            lmul,
            rmul,
            parent,
            generators,
            index,
            basis_inverse,
            fingerprint,
        })
    }

    pub fn order(&self) -> usize {
        self.parent.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn normals(&self) -> &SimpleNormals {
        &self.normals
    }

    pub fn roots(&self) -> &RootSystem {
        &self.roots
    }

    pub fn identity(&self) -> u32 {
        0
    }

    /// Element index of the simple reflection for node `s`.
    pub fn generator(&self, s: usize) -> u32 {
        self.generators[s]
    }

    pub fn perm(&self, g: u32) -> &[u16] {
        let g = g as usize;
        &self.perms[g * self.nroots..(g + 1) * self.nroots]
    }

    /// `s * g` for the simple reflection `s`.
    pub fn left_mul_generator(&self, s: usize, g: u32) -> u32 {
        self.lmul[g as usize * self.rank + s]
    }

    /// `g * s` for the simple reflection `s`.
    pub fn right_mul_generator(&self, g: u32, s: usize) -> u32 {
        self.rmul[g as usize * self.rank + s]
    }

    /// Index of the element with the given root permutation.
    pub fn index_of(&self, perm: &[u16]) -> Option<u32> {
        if perm.len() != self.nroots {
            return None;
        }
        // the images of the simple roots determine the element
        let key: Vec<u16> = self.roots.simple_indices.iter().map(|&s| perm[s]).collect();
        let g = *self.index.get(&key)?;
        (self.perm(g) == perm).then_some(g)
    }

    /// Product `a * b` (apply `b` first).
    pub fn compose(&self, a: u32, b: u32) -> u32 {
        // Express b as a word and multiply a by it on the right.
        let mut acc = a;
        for s in self.word(b) {
            acc = self.right_mul_generator(acc, s);
        }
        acc
    }

    pub fn inverse(&self, g: u32) -> u32 {
        let mut acc = self.identity();
        for s in self.word(g) {
            acc = self.left_mul_generator(s, acc);
        }
        acc
    }

    /// Generator word of `g`: the product of the listed simple reflections, left to right.
    pub fn word(&self, g: u32) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = g as usize;
        while cur != 0 {
            let (p, s) = self.parent[cur];
            word.push(s as usize);
            cur = p as usize;
        }
        word
    }

    pub fn element(&self, g: u32) -> GroupElement {
        GroupElement { perm: self.perm(g).to_vec(), word: self.word(g) }
    }

    /// Orthogonal matrix inducing the permutation `g`.
    pub fn matrix(&self, g: u32) -> DMatrix<f64> {
        let perm = self.perm(g);
        let images = DMatrix::from_fn(self.rank, self.rank, |i, j| {
            self.roots.roots[perm[self.roots.simple_indices[j]] as usize][i]
        });
        images * &self.basis_inverse
    }

    /// Image of `x` under `g`.
    pub fn apply(&self, g: u32, x: &DVector<f64>) -> DVector<f64> {
        let coords = &self.basis_inverse * x;
        let perm = self.perm(g);
        let mut out = DVector::zeros(self.rank);
        for (j, &s) in self.roots.simple_indices.iter().enumerate() {
            out.axpy(coords[j], &self.roots.roots[perm[s] as usize], 1.0);
        }
        out
    }

    /// The parabolic subgroup generated by the simple reflections in `gens`.
    pub fn subgroup(&self, gens: NodeSet) -> Subgroup {
        let mut elements = self.coset_of(self.identity(), gens);
        elements.sort_unstable();
        Subgroup { generators: gens, elements, fingerprint: self.fingerprint }
    }

    fn coset_of(&self, g: u32, gens: NodeSet) -> Vec<u32> {
        let mut seen = HashMap::new();
        seen.insert(g, ());
        let mut out = vec![g];
        let mut i = 0;
        while i < out.len() {
            let h = out[i];
            for s in (0..self.rank).filter(|s| gens & (1 << s) != 0) {
                let k = self.right_mul_generator(h, s);
                if seen.insert(k, ()).is_none() {
                    out.push(k);
                }
            }
            i += 1;
        }
        out
    }

    /// Partition of the group into left cosets of the parabolic subgroup on `gens`.
    pub fn coset_partition(&self, gens: NodeSet) -> CosetPartition {
        let order = self.order();
        let gen_list: Vec<usize> = (0..self.rank).filter(|s| gens & (1 << s) != 0).collect();
        let mut coset_of = vec![u32::MAX; order];
        let mut reps: Vec<u32> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..order as u32 {
            if coset_of[start as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            let mut best = start;
            coset_of[start as usize] = id;
            stack.push(start);
            while let Some(h) = stack.pop() {
                if self.perm(h) < self.perm(best) {
                    best = h;
                }
                for &s in &gen_list {
                    let k = self.right_mul_generator(h, s);
                    if coset_of[k as usize] == u32::MAX {
                        coset_of[k as usize] = id;
                        stack.push(k);
                    }
                }
            }
            reps.push(best);
        }
        // Canonical order: by representative permutation.
        let mut order_idx: Vec<u32> = (0..reps.len() as u32).collect();
        order_idx.sort_by(|&a, &b| self.perm(reps[a as usize]).cmp(self.perm(reps[b as usize])));
        let mut rename = vec![0u32; reps.len()];
        for (new, &old) in order_idx.iter().enumerate() {
            rename[old as usize] = new as u32;
        }
        for c in &mut coset_of {
            *c = rename[*c as usize];
        }
        let representatives = order_idx.iter().map(|&old| reps[old as usize]).collect();
        CosetPartition { generators: gens, coset_of, representatives }
    }

    /// Canonical representatives of the left cosets of `h`.
    pub fn cosets(&self, h: &Subgroup) -> Result<Vec<u32>, GroupError> {
        if h.fingerprint != self.fingerprint {
            return Err(GroupError::SubgroupNotContained);
        }
        Ok(self.coset_partition(h.generators).representatives)
    }
}

fn root_closure(normals: &SimpleNormals) -> Result<RootSystem, GroupError> {
    let mut system = RootSystem { roots: Vec::new(), simple_indices: Vec::new() };
    for n in &normals.vectors {
        let idx = match system.find(n) {
            Some(i) => i,
            None => {
                system.roots.push(n.clone());
                system.roots.len() - 1
            }
        };
        system.simple_indices.push(idx);
    }
    let mut i = 0;
    while i < system.roots.len() {
        for n in &normals.vectors {
            let image = reflect(n, &system.roots[i]);
            if system.find(&image).is_none() {
                system.roots.push(image);
                if system.roots.len() > u16::MAX as usize {
                    return Err(GroupError::NotFiniteType);
                }
            }
        }
        i += 1;
    }
    for a in 0..system.roots.len() {
        for b in a + 1..system.roots.len() {
            if (&system.roots[a] - &system.roots[b]).norm() < ROOT_SEPARATION {
                return Err(GroupError::ToleranceCollision);
            }
        }
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{FamilyTag, Mark};

    fn group(s: &str) -> Group {
        Group::of(&DecoratedDiagram::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn normals_have_prescribed_angles() {
        let d = DecoratedDiagram::parse("x4o").unwrap();
        let n = simple_normals(&d).unwrap();
        let dot = n.vectors()[0].dot(&n.vectors()[1]);
        assert!((dot + (std::f64::consts::FRAC_PI_4).cos()).abs() < 1e-12);

        let d = DecoratedDiagram::from_families(&[FamilyTag::A(1), FamilyTag::A(1)], vec![Mark::Ring; 2])
            .unwrap();
        let n = simple_normals(&d).unwrap();
        assert!(n.vectors()[0].dot(&n.vectors()[1]).abs() < 1e-12);

        let d = DecoratedDiagram::parse("x5o3o").unwrap();
        let n = simple_normals(&d).unwrap();
        let v = n.vectors();
        let expected = [
            (0, 1, -(std::f64::consts::PI / 5.0).cos()),
            (1, 2, -0.5),
            (0, 2, 0.0),
        ];
        for (i, j, e) in expected {
            assert!((v[i].dot(&v[j]) - e).abs() < 1e-12);
        }
        for x in v {
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_groups() {
        let g = group("x4o");
        assert_eq!((g.roots().len(), g.order()), (8, 8));
        let g = group("x4o3o");
        assert_eq!((g.roots().len(), g.order()), (18, 48));
        let g = group("x");
        assert_eq!((g.roots().len(), g.order()), (2, 2));
    }

    #[test]
    fn reflections_count_half_the_roots() {
        // Reflections: det -1 and trace n-2.
        for s in ["x4o3o", "x3o3o", "x5o3o", "x3o4o3o"] {
            let g = group(s);
            let n = g.rank() as f64;
            let count = (0..g.order() as u32)
                .filter(|&e| {
                    let m = g.matrix(e);
                    (m.determinant() + 1.0).abs() < 1e-9 && (m.trace() - (n - 2.0)).abs() < 1e-9
                })
                .count();
            assert_eq!(2 * count, g.roots().len(), "{s}");
        }
    }

    #[test]
    fn element_matrices_are_orthogonal_and_injective() {
        let g = group("x5o3o");
        let mut seen = std::collections::HashSet::new();
        for e in 0..g.order() as u32 {
            let m = g.matrix(e);
            let err = (m.transpose() * &m - DMatrix::identity(3, 3)).amax();
            assert!(err < 1e-9);
            assert!(seen.insert(g.perm(e).to_vec()));
        }
    }

    #[test]
    fn words_compose_and_invert() {
        let g = group("x3o4o3o");
        for e in (0..g.order() as u32).step_by(37) {
            let inv = g.inverse(e);
            assert_eq!(g.compose(e, inv), g.identity());
            let m = g.matrix(e) * g.matrix(inv);
            assert!((m - DMatrix::identity(4, 4)).amax() < 1e-9);
            let rebuilt = g.word(e).iter().fold(g.identity(), |acc, &s| g.compose(acc, g.generator(s)));
            assert_eq!(rebuilt, e);
            assert_eq!(g.index_of(g.perm(e)), Some(e));
        }
    }

    #[test]
    fn commuting_generators() {
        let g = group("x4o3o");
        let (a, c) = (g.generator(0), g.generator(2));
        assert_eq!(g.compose(a, c), g.compose(c, a));
        let b = g.generator(1);
        assert_ne!(g.compose(a, b), g.compose(b, a));
    }

    #[test]
    fn parabolic_subgroups_and_cosets() {
        let g = group("x4o3o");
        let h = g.subgroup(0b110);
        assert_eq!(h.order(), 6);
        assert_eq!(g.cosets(&h).unwrap().len(), 8);
        assert_eq!(g.subgroup(0).order(), 1);
        let whole = g.subgroup(0b111);
        assert_eq!(g.cosets(&whole).unwrap(), vec![g.identity()]);

        let d4 = DecoratedDiagram::from_families(&[FamilyTag::D(4)], vec![Mark::Cross; 4]).unwrap();
        let g4 = Group::of(&d4).unwrap();
        assert_eq!(g4.order(), 192);
        // leaves are nodes 0, 2, 3 in the standard D4 layout
        let leaves = g4.subgroup(0b1101);
        assert_eq!(leaves.order(), 8);
        assert_eq!(g4.cosets(&leaves).unwrap().len(), 24);

        assert!(matches!(g4.cosets(&h), Err(GroupError::SubgroupNotContained)));
    }

    #[test]
    fn coset_representatives_are_lex_minimal() {
        let g = group("x4o3o");
        let part = g.coset_partition(0b011);
        for (c, &rep) in part.representatives.iter().enumerate() {
            for e in 0..g.order() as u32 {
                if part.coset_of[e as usize] == c as u32 {
                    assert!(g.perm(rep) <= g.perm(e));
                }
            }
        }
        assert!(part.representatives.windows(2).all(|w| g.perm(w[0]) < g.perm(w[1])));
    }

    #[test]
    fn budget_is_enforced() {
        let e7 = DecoratedDiagram::from_families(&[FamilyTag::E7], vec![Mark::Ring; 7]).unwrap();
        assert!(matches!(Group::of(&e7), Err(GroupError::BudgetExceeded { .. })));
        let b3 = DecoratedDiagram::parse("x4o3o").unwrap();
        assert!(matches!(Group::of_with_budget(&b3, 47), Err(GroupError::BudgetExceeded { .. })));
        let normals = simple_normals(&b3).unwrap();
        assert!(matches!(Group::enumerate(normals, 40), Err(GroupError::BudgetExceeded { .. })));
    }
}
