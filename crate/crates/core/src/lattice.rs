//! The face lattice of a Wythoffian polytope.
//!
//! A rank-`k` face is a pair (left coset of `G(f')`, `f'`) where `f'` is a
//! decoration with `k` circled nodes. Two faces of consecutive rank are
//! incident when their circled sets are nested and their cosets share an
//! element. The empty face and the polytope itself are explicit elements.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::decoration::{decoration_from_s, is_degenerate, stabilizer_generators, valid_s_sets, Decoration012};
use crate::diagram::{DecoratedDiagram, NodeSet};
use crate::group::Group;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("decoration is degenerate: some component has no ring")]
    Degenerate,
    #[error("group was built for a different diagram")]
    GroupMismatch,
}

/// Id of the empty face in every lattice.
pub const EMPTY_FACE: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    /// `-1` for the empty face.
    pub rank: i32,
    /// Index into [`FaceLattice::decorations`]; `None` for the empty face.
    pub decoration: Option<u32>,
    /// Canonical coset representative (group element index).
    pub coset: u32,
}

#[derive(Debug, Clone)]
pub struct FaceLattice {
    rank: usize,
    group_order: usize,
    decorations: Vec<Decoration012>,
    decoration_starts: Vec<u32>,
    faces: Vec<Face>,
    rank_starts: Vec<usize>,
    up: Vec<Vec<u32>>,
    down: Vec<Vec<u32>>,
    element_face: Vec<Vec<u32>>,
}

impl FaceLattice {
    /// Builds the lattice for the diagram's own decoration.
    pub fn build(d: &DecoratedDiagram, g: &Group) -> Result<Self, LatticeError> {
        if g.rank() != d.len() || BigUint::from(g.order()) != d.group_order() {
            return Err(LatticeError::GroupMismatch);
        }
        let f0 = Decoration012::initial(d);
        if is_degenerate(d, &f0) {
            return Err(LatticeError::Degenerate);
        }
        let n = d.len();
        let order = g.order();

        let mut decorations = Vec::new();
        for k in 0..=n {
            for s in valid_s_sets(d, &f0, k) {
                decorations.push(decoration_from_s(d, &f0, s).expect("valid set"));
            }
        }

        let mut partitions: HashMap<NodeSet, (Vec<u32>, Vec<u32>)> = HashMap::new();
        let mut faces = vec![Face { rank: -1, decoration: None, coset: g.identity() }];
        let mut rank_starts = vec![0usize, 1];
        let mut decoration_starts = Vec::with_capacity(decorations.len());
        let mut element_face: Vec<Vec<u32>> = Vec::with_capacity(decorations.len());
        let mut current_rank = 0;
        for (di, f) in decorations.iter().enumerate() {
            while f.rank() > current_rank {
                rank_starts.push(faces.len());
                current_rank += 1;
            }
            let gens = stabilizer_generators(f);
            let (coset_of, reps) = partitions
                .entry(gens)
                .or_insert_with(|| {
                    let p = g.coset_partition(gens);
                    (p.coset_of, p.representatives)
                })
                .clone();
            let base = faces.len() as u32;
            decoration_starts.push(base);
            faces.extend(reps.iter().map(|&c| Face {
                rank: f.rank() as i32,
                decoration: Some(di as u32),
                coset: c,
            }));
            element_face.push(coset_of.into_iter().map(|c| base + c).collect());
        }
        rank_starts.push(faces.len());
        debug_assert_eq!(rank_starts.len(), n + 3);

        let mut up = vec![Vec::new(); faces.len()];
        let mut down = vec![Vec::new(); faces.len()];
        for v in rank_starts[1]..rank_starts[2] {
            up[EMPTY_FACE as usize].push(v as u32);
            down[v].push(EMPTY_FACE);
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (lo, flo) in decorations.iter().enumerate() {
            for (hi, fhi) in decorations.iter().enumerate() {
                let (slo, shi) = (flo.s_set(), fhi.s_set());
                if fhi.rank() != flo.rank() + 1 || slo & !shi != 0 {
                    continue;
                }
                let (a, b) = (&element_face[lo], &element_face[hi]);
                pairs.extend((0..order).map(|e| (a[e], b[e])));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        for (a, b) in pairs {
            up[a as usize].push(b);
            down[b as usize].push(a);
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
        }

        Ok(Self {
            rank: n,
            group_order: order,
            decorations,
            decoration_starts,
            faces,
            rank_starts,
            up,
            down,
            element_face,
        })
    }

    /// Rank of the polytope (the top element's rank).
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face(&self, id: u32) -> &Face {
        &self.faces[id as usize]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn decorations(&self) -> &[Decoration012] {
        &self.decorations
    }

    pub fn decoration_of(&self, id: u32) -> Option<&Decoration012> {
        self.faces[id as usize].decoration.map(|d| &self.decorations[d as usize])
    }

    /// Face ids of rank `k`, for `-1 <= k <= n`.
    pub fn rank_range(&self, k: i32) -> std::ops::Range<u32> {
        let i = (k + 1) as usize;
        self.rank_starts[i] as u32..self.rank_starts[i + 1] as u32
    }

    pub fn top(&self) -> u32 {
        self.rank_range(self.rank as i32).start
    }

    pub fn covers_of(&self, id: u32) -> &[u32] {
        &self.up[id as usize]
    }

    pub fn covered_by(&self, id: u32) -> &[u32] {
        &self.down[id as usize]
    }

    /// All cover pairs `(lower, upper)`, including those with the sentinels.
    pub fn cover_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.up
            .iter()
            .enumerate()
            .flat_map(|(a, ups)| ups.iter().map(move |&b| (a as u32, b)))
    }

    /// Face of decoration `decoration` whose coset contains `element`.
    pub fn face_of_element(&self, decoration: u32, element: u32) -> u32 {
        self.element_face[decoration as usize][element as usize]
    }

    /// Coset index of a face within its decoration.
    pub fn coset_index(&self, id: u32) -> Option<u32> {
        let f = &self.faces[id as usize];
        f.decoration.map(|d| id - self.decoration_starts[d as usize])
    }

    /// Number of faces per rank `0..n`, counted in the built lattice.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.rank as i32).map(|k| self.rank_range(k).len()).collect()
    }

    /// Image of a face under left multiplication by a group element.
    pub fn act(&self, g: &Group, element: u32, id: u32) -> u32 {
        let f = &self.faces[id as usize];
        match f.decoration {
            None => id,
            Some(d) => self.face_of_element(d, g.compose(element, f.coset)),
        }
    }

    /// Image of a face under the simple reflection `s`.
    pub fn act_generator(&self, g: &Group, s: usize, id: u32) -> u32 {
        let f = &self.faces[id as usize];
        match f.decoration {
            None => id,
            Some(d) => self.face_of_element(d, g.left_mul_generator(s, f.coset)),
        }
    }

    /// The rank-0 face at the Wythoff point itself.
    pub fn base_vertex(&self) -> u32 {
        self.face_of_element(0, 0)
    }

    /// All flags, as chains of face ids of ranks `0..n`, in lexicographic order.
    pub fn flags(&self) -> Flags {
        let n = self.rank;
        let mut data = Vec::new();
        let mut chain = Vec::with_capacity(n);
        fn extend(l: &FaceLattice, chain: &mut Vec<u32>, n: usize, data: &mut Vec<u32>) {
            if chain.len() == n {
                data.extend_from_slice(chain);
                return;
            }
            let last = *chain.last().unwrap();
            for &next in l.covers_of(last) {
                chain.push(next);
                extend(l, chain, n, data);
                chain.pop();
            }
        }
        if n > 0 {
            for v in self.rank_range(0) {
                chain.push(v);
                extend(self, &mut chain, n, &mut data);
                chain.pop();
            }
        }
        Flags::new(n, data)
    }

    /// Rank-`k` faces strictly between `lower` (rank `k-1`) and `upper` (rank `k+1`).
    pub fn between(&self, lower: u32, upper: u32) -> Vec<u32> {
        self.between_iter(lower, upper).collect()
    }

    fn between_iter(&self, lower: u32, upper: u32) -> impl Iterator<Item = u32> + '_ {
        let (a, b) = (self.covers_of(lower), self.covered_by(upper));
        let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        short.iter().copied().filter(move |x| long.binary_search(x).is_ok())
    }

    /// Every (rank k-1, rank k+1) incident pair must have exactly two faces between.
    pub fn check_diamond(&self) -> DiamondReport {
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for k in 0..=self.rank as i32 - 1 {
            for m in self.rank_range(k) {
                for &a in self.covered_by(m) {
                    for &b in self.covers_of(m) {
                        *counts.entry((a, b)).or_default() += 1;
                    }
                }
            }
        }
        let mut violations: Vec<(u32, u32, u32)> = counts
            .iter()
            .filter(|(_, &c)| c != 2)
            .map(|(&(a, b), &c)| (a, b, c))
            .collect();
        violations.sort_unstable();
        DiamondReport { pairs_checked: counts.len(), violations }
    }

    /// Flag graph connectivity, and exactly `n` neighbours per flag.
    pub fn check_flag_connected(&self) -> FlagReport {
        let flags = self.flags();
        let n = self.rank;
        let count = flags.count();
        let mut parent: Vec<u32> = (0..count as u32).collect();
        fn root(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut wrong_degree = 0;
        let mut scratch = vec![0u32; n];
        for i in 0..count {
            let flag = flags.get(i);
            let mut degree = 0;
            for pos in 0..n {
                let lower = if pos == 0 { EMPTY_FACE } else { flag[pos - 1] };
                let upper = if pos + 1 == n { self.top() } else { flag[pos + 1] };
                for alt in self.between_iter(lower, upper) {
                    if alt == flag[pos] {
                        continue;
                    }
                    degree += 1;
                    if alt < flag[pos] {
                        continue;
                    }
                    scratch.copy_from_slice(flag);
                    scratch[pos] = alt;
                    if let Some(j) = flags.position(&scratch) {
                        let (ra, rb) = (root(&mut parent, i as u32), root(&mut parent, j as u32));
                        if ra != rb {
                            parent[ra as usize] = rb;
                        }
                    }
                }
            }
            if degree != n {
                wrong_degree += 1;
            }
        }
        let mut roots = std::collections::HashSet::new();
        for i in 0..count as u32 {
            roots.insert(root(&mut parent, i));
        }
        FlagReport { flags: count, components: roots.len(), wrong_degree }
    }

    /// Faces containing the base vertex, with the covers among them.
    pub fn vertex_figure(&self) -> VertexFigure {
        let n = self.rank;
        let mut by_rank = vec![Vec::new(); n + 1];
        let mut seen = std::collections::HashSet::from([self.base_vertex()]);
        let mut frontier = vec![self.base_vertex()];
        while let Some(f) = frontier.pop() {
            for &u in self.covers_of(f) {
                if seen.insert(u) {
                    frontier.push(u);
                }
            }
        }
        for &f in &seen {
            let r = self.faces[f as usize].rank as usize;
            by_rank[r].push(f);
        }
        for list in &mut by_rank {
            list.sort_unstable();
        }
        by_rank.truncate(n);
        let mut covers: Vec<(u32, u32)> = seen
            .iter()
            .flat_map(|&a| self.covers_of(a).iter().filter(|b| seen.contains(b)).map(move |&b| (a, b)))
            .filter(|&(_, b)| b != self.top())
            .collect();
        covers.sort_unstable();
        VertexFigure { faces_by_rank: by_rank, covers }
    }

    /// Structured export of the lattice.
    pub fn document(&self, d: &DecoratedDiagram) -> LatticeDocument {
        let faces = self
            .faces
            .iter()
            .enumerate()
            .map(|(id, f)| {
                let dec = f.decoration.map(|i| &self.decorations[i as usize]);
                FaceDoc {
                    id: id as u32,
                    rank: f.rank,
                    s_set: dec.map_or_else(Vec::new, |x| {
                        (0..d.len()).filter(|&v| x.s_set() & (1 << v) != 0).map(|v| d.ids()[v].clone()).collect()
                    }),
                    decoration: dec.map_or_else(Vec::new, |x| x.values().to_vec()),
                    coset: f.decoration.map(|_| f.coset),
                }
            })
            .collect();
        LatticeDocument {
            diagram: d.notation(),
            rank: self.rank,
            f_vector: self.f_vector(),
            faces,
            covers: self.cover_pairs().map(|(a, b)| [a, b]).collect(),
        }
    }
}

/// Euler relation `sum (-1)^k f_k = 1 - (-1)^n` over ranks `0..n`.
pub fn euler_holds(f: &[usize]) -> bool {
    let n = f.len() as i64;
    let alternating: i64 = f.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
    alternating == 1 - if n % 2 == 0 { 1 } else { -1 }
}

/// Face counts per rank `0..n` from orbit-stabilizer arithmetic alone.
pub fn f_vector_formula(d: &DecoratedDiagram) -> Result<Vec<BigUint>, LatticeError> {
    let f0 = Decoration012::initial(d);
    if is_degenerate(d, &f0) {
        return Err(LatticeError::Degenerate);
    }
    let order = d.group_order();
    Ok((0..d.len())
        .map(|k| {
            valid_s_sets(d, &f0, k)
                .into_iter()
                .map(|s| {
                    let f = decoration_from_s(d, &f0, s).expect("valid set");
                    &order / d.parabolic_order(stabilizer_generators(&f))
                })
                .sum()
        })
        .collect())
}

/// Flags stored contiguously, `len` face ids each, sorted lexicographically,
/// with an open-addressing hash index for lookups.
#[derive(Debug, Clone)]
pub struct Flags {
    len: usize,
    data: Vec<u32>,
    slots: Vec<u32>,
    shift: u32,
}

fn flag_hash(flag: &[u32]) -> u64 {
    flag.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &x| (h ^ x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(29))
}

impl Flags {
    fn new(len: usize, data: Vec<u32>) -> Self {
        let count = if len == 0 { 0 } else { data.len() / len };
        let bits = (2 * count).max(2).next_power_of_two().trailing_zeros();
        let mut flags = Self { len, data, slots: vec![u32::MAX; 1 << bits], shift: 64 - bits };
        let mask = flags.slots.len() - 1;
        for i in 0..count {
            let mut h = (flag_hash(flags.get(i)) >> flags.shift) as usize;
            while flags.slots[h] != u32::MAX {
                h = (h + 1) & mask;
            }
            flags.slots[h] = i as u32;
        }
        flags
    }

    pub fn count(&self) -> usize {
        if self.len == 0 {
            0
        } else {
            self.data.len() / self.len
        }
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.len..(i + 1) * self.len]
    }

    pub fn position(&self, flag: &[u32]) -> Option<usize> {
        if flag.len() != self.len || self.count() == 0 {
            return None;
        }
        let mask = self.slots.len() - 1;
        let mut h = (flag_hash(flag) >> self.shift) as usize;
        loop {
            match self.slots[h] {
                u32::MAX => return None,
                i if self.get(i as usize) == flag => return Some(i as usize),
                _ => h = (h + 1) & mask,
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.len.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondReport {
    pub pairs_checked: usize,
    /// `(lower, upper, count)` for pairs whose count is not two.
    pub violations: Vec<(u32, u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagReport {
    pub flags: usize,
    pub components: usize,
    /// Flags whose number of adjacent flags differs from the rank.
    pub wrong_degree: usize,
}

impl FlagReport {
    pub fn ok(&self) -> bool {
        self.components == 1 && self.wrong_degree == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexFigure {
    /// Faces through the base vertex, ranks `0..n` (rank 0 is the vertex itself).
    pub faces_by_rank: Vec<Vec<u32>>,
    pub covers: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceDoc {
    pub id: u32,
    pub rank: i32,
    pub s_set: Vec<String>,
    pub decoration: Vec<u8>,
    pub coset: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeDocument {
    pub diagram: String,
    pub rank: usize,
    pub f_vector: Vec<usize>,
    pub faces: Vec<FaceDoc>,
    pub covers: Vec<[u32; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{FamilyTag, Mark};

    fn lattice(s: &str) -> (DecoratedDiagram, Group, FaceLattice) {
        let d = DecoratedDiagram::parse(s).unwrap();
        let g = Group::of(&d).unwrap();
        let l = FaceLattice::build(&d, &g).unwrap();
        (d, g, l)
    }

    fn formula(d: &DecoratedDiagram) -> Vec<usize> {
        f_vector_formula(d).unwrap().iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn cube() {
        let (d, _, l) = lattice("x4o3o");
        assert_eq!(l.f_vector(), vec![8, 12, 6]);
        assert_eq!(formula(&d), vec![8, 12, 6]);
        assert!(l.check_diamond().violations.is_empty());
        let flags = l.check_flag_connected();
        assert_eq!(flags, FlagReport { flags: 48, components: 1, wrong_degree: 0 });
        let vf = l.vertex_figure();
        assert_eq!(vf.faces_by_rank.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 3, 3]);
        // the vertex figure is a triangle: each edge lies in two squares
        for &e in &vf.faces_by_rank[1] {
            assert_eq!(vf.covers.iter().filter(|c| c.0 == e).count(), 2);
        }
    }

    #[test]
    fn octagon() {
        let (_, _, l) = lattice("x4x");
        assert_eq!(l.f_vector(), vec![8, 8]);
        assert!(l.check_diamond().violations.is_empty());
        assert_eq!(l.check_flag_connected().flags, 16);
        assert_eq!(l.vertex_figure().faces_by_rank[1].len(), 2);
    }

    #[test]
    fn truncated_cube() {
        let (_, _, l) = lattice("o3x4x");
        assert_eq!(l.f_vector(), vec![24, 36, 14]);
        let report = l.check_flag_connected();
        assert_eq!((report.flags, report.components), (144, 1));
    }

    #[test]
    fn segment() {
        let (_, _, l) = lattice("x");
        assert_eq!(l.f_vector(), vec![2]);
        assert_eq!(l.check_flag_connected(), FlagReport { flags: 2, components: 1, wrong_degree: 0 });
        assert!(l.check_diamond().violations.is_empty());
    }

    #[test]
    fn twenty_four_cell_from_d4() {
        let d = DecoratedDiagram::from_families(
            &[FamilyTag::D(4)],
            vec![Mark::Cross, Mark::Ring, Mark::Cross, Mark::Cross],
        )
        .unwrap();
        let g = Group::of(&d).unwrap();
        let l = FaceLattice::build(&d, &g).unwrap();
        assert_eq!(l.f_vector(), vec![24, 96, 96, 24]);
        assert!(l.check_diamond().violations.is_empty());
        let vf = l.vertex_figure();
        assert_eq!(vf.faces_by_rank.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 8, 12, 6]);
    }

    #[test]
    fn formula_only_for_large_groups() {
        let mut marks = vec![Mark::Cross; 8];
        marks[6] = Mark::Ring;
        let e8 = DecoratedDiagram::from_families(&[FamilyTag::E8], marks).unwrap();
        assert_eq!(f_vector_formula(&e8).unwrap()[0], BigUint::from(240u32));
        let f4 = DecoratedDiagram::parse("x3o4o3o").unwrap();
        assert_eq!(formula(&f4), vec![24, 96, 96, 24]);
    }

    #[test]
    fn degenerate_is_rejected() {
        let d = DecoratedDiagram::parse("o3o").unwrap();
        let g = Group::of(&d).unwrap();
        assert!(matches!(FaceLattice::build(&d, &g), Err(LatticeError::Degenerate)));
        assert!(matches!(f_vector_formula(&d), Err(LatticeError::Degenerate)));
        let other = Group::of(&DecoratedDiagram::parse("x4o3o").unwrap()).unwrap();
        assert!(matches!(
            FaceLattice::build(&DecoratedDiagram::parse("x3o3o").unwrap(), &other),
            Err(LatticeError::GroupMismatch)
        ));
    }

    #[test]
    fn euler_relation() {
        assert!(euler_holds(&[8, 12, 6]));
        assert!(euler_holds(&[8, 8]));
        assert!(euler_holds(&[2]));
        assert!(euler_holds(&[24, 96, 96, 24]));
        assert!(!euler_holds(&[8, 12, 7]));
    }

    #[test]
    fn group_action_preserves_structure() {
        let (_, g, l) = lattice("x3o4x");
        for s in 0..3 {
            for (a, b) in l.cover_pairs() {
                let (ia, ib) = (l.act_generator(&g, s, a), l.act_generator(&g, s, b));
                assert_eq!(l.face(ia).rank, l.face(a).rank);
                assert!(l.covers_of(ia).contains(&ib));
            }
        }
        let e = 17;
        for id in 0..l.len() as u32 {
            let word = g.word(e);
            let stepwise = word.iter().rev().fold(id, |acc, &s| l.act_generator(&g, s, acc));
            assert_eq!(l.act(&g, e, id), stepwise);
        }
    }
}
