//! Regularity: the ruled decision procedure on decorated diagrams, a
//! flag-transitivity oracle, and the catalog of regular polytopes per
//! dimension.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::decoration::{apply_star, is_degenerate, is_valid_s, valid_s_sets, Decoration012};
use crate::diagram::{all_markings, finite_type_multisets, DecoratedDiagram, FamilyTag, Mark, NodeSet};
use crate::geometry::{realize, wythoff_point, GeometryError, Realization};
use crate::group::{Group, GroupError, DEFAULT_BUDGET};
use crate::lattice::{f_vector_formula, FaceLattice, LatticeError, EMPTY_FACE};

/// Largest `k` for `I2(k)` components in catalog scans unless overridden.
pub const DEFAULT_KMAX: u32 = 12;

#[derive(Debug, Error)]
pub enum RegularError {
    #[error("decoration is degenerate: some component carries no ring")]
    Degenerate,
    #[error("no regular polytope named {0:?}")]
    UnknownName(String),
    #[error("no pair of distinct faces found for non-regular diagram {0}")]
    NoWitness(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The regular polytopes that arise from Wythoff's construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolytopeKind {
    Segment,
    Polygon(u32),
    Simplex(usize),
    Hypercube(usize),
    Hyperoctahedron(usize),
    Icosahedron,
    Dodecahedron,
    TwentyFourCell,
    OneTwentyCell,
    SixHundredCell,
}

pub fn polygon_name(k: u32) -> String {
    let named = [
        "", "", "", "triangle", "square", "pentagon", "hexagon", "heptagon", "octagon", "nonagon", "decagon",
        "hendecagon", "dodecagon",
    ];
    named.get(k as usize).filter(|s| !s.is_empty()).map_or_else(|| format!("{k}-gon"), |s| s.to_string())
}

fn binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

impl PolytopeKind {
    pub fn dimension(self) -> usize {
        match self {
            Self::Segment => 1,
            Self::Polygon(_) => 2,
            Self::Simplex(n) | Self::Hypercube(n) | Self::Hyperoctahedron(n) => n,
            Self::Icosahedron | Self::Dodecahedron => 3,
            Self::TwentyFourCell | Self::OneTwentyCell | Self::SixHundredCell => 4,
        }
    }

    pub fn name(self) -> String {
        match self {
            Self::Segment => "segment".into(),
            Self::Polygon(k) => polygon_name(k),
            Self::Simplex(n) => format!("{n}-simplex"),
            Self::Hypercube(n) => format!("{n}-hypercube"),
            Self::Hyperoctahedron(n) => format!("{n}-hyperoctahedron"),
            Self::Icosahedron => "icosahedron".into(),
            Self::Dodecahedron => "dodecahedron".into(),
            Self::TwentyFourCell => "24-cell".into(),
            Self::OneTwentyCell => "120-cell".into(),
            Self::SixHundredCell => "600-cell".into(),
        }
    }

    pub fn common_name(self) -> Option<&'static str> {
        match self {
            Self::Simplex(3) => Some("tetrahedron"),
            Self::Simplex(4) => Some("5-cell"),
            Self::Hypercube(3) => Some("cube"),
            Self::Hypercube(4) => Some("tesseract"),
            Self::Hyperoctahedron(3) => Some("octahedron"),
            Self::Hyperoctahedron(4) => Some("16-cell"),
            _ => None,
        }
    }

    /// Name with the common name in parentheses, e.g. `3-hypercube (cube)`.
    pub fn display_name(self) -> String {
        match self.common_name() {
            Some(c) => format!("{} ({c})", self.name()),
            None => self.name(),
        }
    }

    /// Accepts the canonical name, the common name, or the display name.
    pub fn from_name(name: &str) -> Option<Self> {
        let name = name.trim().to_ascii_lowercase();
        let base = name.split(" (").next().unwrap_or(&name);
        for kind in [
            Self::Segment,
            Self::Icosahedron,
            Self::Dodecahedron,
            Self::TwentyFourCell,
            Self::OneTwentyCell,
            Self::SixHundredCell,
            Self::Simplex(3),
            Self::Simplex(4),
            Self::Hypercube(3),
            Self::Hypercube(4),
            Self::Hyperoctahedron(3),
            Self::Hyperoctahedron(4),
        ] {
            if kind.name() == base || kind.common_name() == Some(base) {
                return Some(kind);
            }
        }
        for k in 3..=12 {
            if polygon_name(k) == base {
                return Some(Self::Polygon(k));
            }
        }
        if let Some(k) = base.strip_suffix("-gon").and_then(|k| k.parse().ok()).filter(|&k: &u32| k >= 3) {
            return Some(Self::Polygon(k));
        }
        let (n, family) = base.split_once('-')?;
        let n: usize = n.parse().ok().filter(|&n| n >= 3)?;
        match family {
            "simplex" => Some(Self::Simplex(n)),
            "hypercube" => Some(Self::Hypercube(n)),
            "hyperoctahedron" => Some(Self::Hyperoctahedron(n)),
            _ => None,
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Self::Hypercube(n) => Self::Hyperoctahedron(n),
            Self::Hyperoctahedron(n) => Self::Hypercube(n),
            Self::Icosahedron => Self::Dodecahedron,
            Self::Dodecahedron => Self::Icosahedron,
            Self::OneTwentyCell => Self::SixHundredCell,
            Self::SixHundredCell => Self::OneTwentyCell,
            other => other,
        }
    }

    /// Face counts of ranks `0..n` from the closed forms of each family.
    pub fn expected_f_vector(self) -> Vec<BigUint> {
        let fixed = |v: &[u32]| v.iter().map(|&x| BigUint::from(x)).collect();
        match self {
            Self::Segment => fixed(&[2]),
            Self::Polygon(k) => fixed(&[k, k]),
            Self::Simplex(n) => (0..n).map(|k| binomial(n + 1, k + 1)).collect(),
            Self::Hypercube(n) => (0..n).map(|k| (BigUint::from(1u32) << (n - k)) * binomial(n, k)).collect(),
            Self::Hyperoctahedron(n) => (0..n).map(|k| (BigUint::from(1u32) << (k + 1)) * binomial(n, k + 1)).collect(),
            Self::Icosahedron => fixed(&[12, 30, 20]),
            Self::Dodecahedron => fixed(&[20, 30, 12]),
            Self::TwentyFourCell => fixed(&[24, 96, 96, 24]),
            Self::OneTwentyCell => fixed(&[600, 1200, 720, 120]),
            Self::SixHundredCell => fixed(&[120, 720, 1200, 600]),
        }
    }

    /// A reference construction: family and the canonical position of the ring.
    pub fn reference_diagram(self) -> DecoratedDiagram {
        let (tag, ring) = match self {
            Self::Segment => (FamilyTag::A(1), 0),
            Self::Polygon(k) => (FamilyTag::I2(k), 0),
            Self::Simplex(n) => (FamilyTag::A(n), 0),
            Self::Hypercube(n) => (FamilyTag::B(n), 0),
            Self::Hyperoctahedron(n) => (FamilyTag::B(n), n - 1),
            Self::Icosahedron => (FamilyTag::H3, 2),
            Self::Dodecahedron => (FamilyTag::H3, 0),
            Self::TwentyFourCell => (FamilyTag::F4, 0),
            Self::OneTwentyCell => (FamilyTag::H4, 0),
            Self::SixHundredCell => (FamilyTag::H4, 3),
        };
        let marks = (0..tag.rank()).map(|i| if i == ring { Mark::Ring } else { Mark::Cross }).collect();
        DecoratedDiagram::from_families(&[tag], marks).expect("standard family")
    }

    fn catalog_order(self) -> (usize, u8, u32) {
        match self {
            Self::Segment => (1, 0, 0),
            Self::Polygon(k) => (2, 0, k),
            Self::Simplex(n) => (n, 0, 0),
            Self::Hypercube(n) => (n, 1, 0),
            Self::Hyperoctahedron(n) => (n, 2, 0),
            Self::Icosahedron => (3, 3, 0),
            Self::Dodecahedron => (3, 4, 0),
            Self::TwentyFourCell => (4, 3, 0),
            Self::OneTwentyCell => (4, 4, 0),
            Self::SixHundredCell => (4, 5, 0),
        }
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name())
    }
}

/// One face of a counterexample: the subdiagram it lives on and how the
/// rewriting rule reaches it.
#[derive(Debug, Clone, Serialize)]
pub struct FaceWitness {
    pub rank: usize,
    pub s_set: Vec<String>,
    pub decoration: Vec<u8>,
    /// Nodes in the order the rule is applied to reach the face.
    pub sequence: Vec<String>,
    pub diagram: String,
    pub vertices: u64,
    pub description: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Name(String),
    Counterexample { first: FaceWitness, second: FaceWitness },
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularVerdict {
    pub regular: bool,
    pub kind: Option<PolytopeKindDoc>,
    pub witness: Witness,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolytopeKindDoc {
    pub name: String,
    pub common_name: Option<String>,
    pub dimension: usize,
}

impl From<PolytopeKind> for PolytopeKindDoc {
    fn from(k: PolytopeKind) -> Self {
        Self { name: k.name(), common_name: k.common_name().map(String::from), dimension: k.dimension() }
    }
}

impl fmt::Display for RegularVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Witness::Name(name) => write!(f, "regular: {name}"),
            Witness::Counterexample { first, second } => write!(
                f,
                "not regular: {}-faces {} vs {}",
                first.rank, first.description, second.description
            ),
        }
    }
}

/// Interned isomorphism types of Wythoffian polytopes: a type is its
/// per-rank multiset of face types, counted by orbit-stabilizer arithmetic.
#[derive(Debug, Default)]
pub struct FaceTypes {
    ids: HashMap<TypeKey, u32>,
    keys: Vec<TypeKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct TypeKey {
    rank: usize,
    faces: Vec<Vec<(u32, BigUint)>>,
}

struct TypeScan<'a> {
    d: &'a DecoratedDiagram,
    f0: Decoration012,
    ones: NodeSet,
    memo: HashMap<NodeSet, u32>,
    orders: HashMap<NodeSet, BigUint>,
}

impl TypeScan<'_> {
    fn order(&mut self, s: NodeSet) -> BigUint {
        if let Some(o) = self.orders.get(&s) {
            return o.clone();
        }
        let o = self.d.parabolic_order(s);
        self.orders.insert(s, o.clone());
        o
    }
}

impl FaceTypes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn rank(&self, t: u32) -> usize {
        self.keys[t as usize].rank
    }

    /// Face counts of ranks `0..rank` of type `t`.
    pub fn f_vector(&self, t: u32) -> Vec<BigUint> {
        self.keys[t as usize].faces.iter().map(|r| r.iter().map(|(_, c)| c).sum()).collect()
    }

    /// Type of the polytope itself.
    pub fn of_polytope(&mut self, d: &DecoratedDiagram) -> Result<u32, RegularError> {
        let all = d.all_nodes();
        self.of_faces(d, &[all]).map(|v| v[0])
    }

    /// Types of the faces with the given circled sets.
    pub fn of_faces(&mut self, d: &DecoratedDiagram, sets: &[NodeSet]) -> Result<Vec<u32>, RegularError> {
        let f0 = Decoration012::initial(d);
        if is_degenerate(d, &f0) {
            return Err(RegularError::Degenerate);
        }
        let ones = f0.nodes_with(1);
        let mut scan = TypeScan { d, f0, ones, memo: HashMap::new(), orders: HashMap::new() };
        Ok(sets.iter().map(|&s| self.signature(&mut scan, s)).collect())
    }

    fn signature(&mut self, scan: &mut TypeScan, s: NodeSet) -> u32 {
        if let Some(&t) = scan.memo.get(&s) {
            return t;
        }
        let rank = s.count_ones() as usize;
        let total = scan.order(s);
        let mut faces: Vec<BTreeMap<u32, BigUint>> = vec![BTreeMap::new(); rank];
        // proper subsets of s, by submask enumeration
        let mut sub = s;
        while sub != 0 {
            sub = (sub - 1) & s;
            if !is_valid_s(scan.d, &scan.f0, sub) {
                continue;
            }
            let near = (0..scan.d.len()).filter(|&v| sub & (1 << v) != 0).fold(0, |acc, v| acc | scan.d.neighbors(v));
            let stabilizer = s & (sub | !(scan.ones | near));
            let count = &total / scan.order(stabilizer);
            let t = self.signature(scan, sub);
            *faces[sub.count_ones() as usize].entry(t).or_insert_with(BigUint::zero) += count;
        }
        let key = TypeKey { rank, faces: faces.into_iter().map(|m| m.into_iter().collect()).collect() };
        let next = self.keys.len() as u32;
        let t = *self.ids.entry(key.clone()).or_insert_with(|| {
            self.keys.push(key);
            next
        });
        scan.memo.insert(s, t);
        t
    }
}

/// Ring positions of a component, in its canonical node order.
fn ring_positions(d: &DecoratedDiagram, nodes: &[usize]) -> Vec<usize> {
    nodes.iter().enumerate().filter(|(_, &v)| d.marks()[v] == Mark::Ring).map(|(i, _)| i).collect()
}

fn is_hypercube_factor(d: &DecoratedDiagram, tag: FamilyTag, nodes: &[usize]) -> bool {
    let rings = ring_positions(d, nodes);
    match tag {
        FamilyTag::A(1) => rings == [0],
        FamilyTag::I2(4) => rings.len() == 1,
        FamilyTag::B(_) => rings == [0],
        _ => false,
    }
}

/// The regular polytope named by the case analysis, if any.
pub fn ruled_kind(d: &DecoratedDiagram) -> Option<PolytopeKind> {
    let n = d.len();
    let comps = d.components();
    if n == 1 {
        return Some(PolytopeKind::Segment);
    }
    if n == 2 {
        return Some(match comps[0].tag {
            FamilyTag::I2(k) if d.ringed().count_ones() == 1 => PolytopeKind::Polygon(k),
            FamilyTag::I2(k) => PolytopeKind::Polygon(2 * k),
            _ => PolytopeKind::Polygon(4),
        });
    }
    if comps.len() > 1 {
        return comps
            .iter()
            .all(|c| is_hypercube_factor(d, c.tag, &c.nodes))
            .then_some(PolytopeKind::Hypercube(n));
    }
    let c = &comps[0];
    let rings = ring_positions(d, &c.nodes);
    let [p] = rings[..] else { return None };
    match (c.tag, p) {
        (FamilyTag::A(_), 0) => Some(PolytopeKind::Simplex(n)),
        (FamilyTag::A(_), p) if p == n - 1 => Some(PolytopeKind::Simplex(n)),
        (FamilyTag::A(3), 1) => Some(PolytopeKind::Hyperoctahedron(3)),
        (FamilyTag::B(_), 0) => Some(PolytopeKind::Hypercube(n)),
        (FamilyTag::B(_), p) if p == n - 1 => Some(PolytopeKind::Hyperoctahedron(n)),
        (FamilyTag::B(4), 2) => Some(PolytopeKind::TwentyFourCell),
        (FamilyTag::D(4), 1) => Some(PolytopeKind::TwentyFourCell),
        (FamilyTag::D(4), _) => Some(PolytopeKind::Hyperoctahedron(4)),
        (FamilyTag::D(_), 0) => Some(PolytopeKind::Hyperoctahedron(n)),
        (FamilyTag::F4, 0 | 3) => Some(PolytopeKind::TwentyFourCell),
        (FamilyTag::H3, 0) => Some(PolytopeKind::Dodecahedron),
        (FamilyTag::H3, 2) => Some(PolytopeKind::Icosahedron),
        (FamilyTag::H4, 0) => Some(PolytopeKind::OneTwentyCell),
        (FamilyTag::H4, 3) => Some(PolytopeKind::SixHundredCell),
        _ => None,
    }
}

/// Order in which the rule can circle the nodes of `s`, starting from `f0`.
fn star_sequence(d: &DecoratedDiagram, f0: &Decoration012, s: NodeSet) -> Vec<usize> {
    let mut f = f0.clone();
    let mut order = Vec::new();
    let mut left = s;
    while left != 0 {
        let w = (0..d.len()).find(|&v| left & (1 << v) != 0 && f.value(v) == 1).expect("valid set");
        f = apply_star(d, &f, w).expect("value checked");
        order.push(w);
        left &= !(1 << w);
    }
    order
}

fn describe_face(d: &DecoratedDiagram, s: NodeSet, f_vector: &[BigUint]) -> String {
    let sub = d.induced(s);
    if s.count_ones() == 2 {
        return polygon_name(f_vector[0].to_u32().unwrap_or(0));
    }
    match ruled_kind(&sub) {
        Some(kind) => kind.display_name(),
        None => sub.notation(),
    }
}

fn face_witness(d: &DecoratedDiagram, f0: &Decoration012, s: NodeSet, types: &FaceTypes, t: u32) -> FaceWitness {
    let f_vector = types.f_vector(t);
    let decoration = crate::decoration::decoration_from_s(d, f0, s).expect("valid set");
    FaceWitness {
        rank: s.count_ones() as usize,
        s_set: (0..d.len()).filter(|&v| s & (1 << v) != 0).map(|v| d.ids()[v].clone()).collect(),
        decoration: decoration.values().to_vec(),
        sequence: star_sequence(d, f0, s).into_iter().map(|v| d.ids()[v].clone()).collect(),
        diagram: d.induced(s).notation(),
        vertices: f_vector.first().and_then(|v| v.to_u64()).unwrap_or(1),
        description: describe_face(d, s, &f_vector),
    }
}

/// Two faces of lowest possible rank with different types.
pub fn find_witness(d: &DecoratedDiagram) -> Result<Option<(FaceWitness, FaceWitness)>, RegularError> {
    let f0 = Decoration012::initial(d);
    if is_degenerate(d, &f0) {
        return Err(RegularError::Degenerate);
    }
    let mut types = FaceTypes::new();
    for k in 2..d.len() {
        let sets = valid_s_sets(d, &f0, k);
        let sigs = types.of_faces(d, &sets)?;
        if let Some(j) = sigs.iter().position(|&t| t != sigs[0]) {
            let mut a = face_witness(d, &f0, sets[0], &types, sigs[0]);
            let mut b = face_witness(d, &f0, sets[j], &types, sigs[j]);
            if b.vertices > a.vertices {
                std::mem::swap(&mut a, &mut b);
            }
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Ruled verdict: the case analysis names the polytope, otherwise two faces
/// of different type are exhibited.
pub fn is_regular_ruled(d: &DecoratedDiagram) -> Result<RegularVerdict, RegularError> {
    if is_degenerate(d, &Decoration012::initial(d)) {
        return Err(RegularError::Degenerate);
    }
    if let Some(kind) = ruled_kind(d) {
        return Ok(RegularVerdict { regular: true, kind: Some(kind.into()), witness: Witness::Name(kind.display_name()) });
    }
    match find_witness(d)? {
        Some((first, second)) => {
            Ok(RegularVerdict { regular: false, kind: None, witness: Witness::Counterexample { first, second } })
        }
        None => Err(RegularError::NoWitness(d.notation())),
    }
}

/// Size of the orbit of one flag under the generators of `g`, and the flag count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlagOrbit {
    pub flags: usize,
    pub orbit: usize,
}

impl FlagOrbit {
    pub fn transitive(&self) -> bool {
        self.orbit == self.flags
    }
}

fn flag_orbit(flags: &crate::lattice::Flags, mut act: impl FnMut(usize, &[u32], &mut [u32]) -> bool, gens: usize) -> usize {
    let count = flags.count();
    if count == 0 {
        return 0;
    }
    let mut seen = vec![false; count];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut image = vec![0u32; flags.get(0).len()];
    let mut orbit = 1;
    while let Some(i) = queue.pop_front() {
        for s in 0..gens {
            if !act(s, flags.get(i), &mut image) {
                continue;
            }
            if let Some(j) = flags.position(&image) {
                if !seen[j] {
                    seen[j] = true;
                    orbit += 1;
                    queue.push_back(j);
                }
            }
        }
    }
    orbit
}

pub fn group_flag_orbit(l: &FaceLattice, g: &Group) -> FlagOrbit {
    let flags = l.flags();
    let orbit = flag_orbit(
        &flags,
        |s, flag, image| {
            for (slot, &f) in image.iter_mut().zip(flag) {
                *slot = l.act_generator(g, s, f);
            }
            true
        },
        g.rank(),
    );
    FlagOrbit { flags: flags.count(), orbit }
}

/// Whether `g` acts transitively on the flags of `l`.
pub fn is_regular_oracle(l: &FaceLattice, g: &Group) -> bool {
    l.flags().count() <= g.order() && group_flag_orbit(l, g).transitive()
}

/// Flag orbit under the Wythoff group enlarged by the ridge reflections,
/// the latter acting on faces through their vertex sets. `None` when some
/// ridge reflection is not a symmetry.
pub fn full_symmetry_flag_orbit(l: &FaceLattice, g: &Group, r: &Realization) -> Result<Option<FlagOrbit>, GeometryError> {
    let ridges = r.ridge_reflection_check()?;
    if !ridges.ok() {
        return Ok(None);
    }
    let mut by_vertices: HashMap<Vec<u32>, u32> = HashMap::new();
    for id in 0..l.len() as u32 {
        if id != EMPTY_FACE {
            by_vertices.insert(r.face_vertices(id).to_vec(), id);
        }
    }
    let flags = l.flags();
    let mut scratch = Vec::new();
    let orbit = flag_orbit(
        &flags,
        |s, flag, image| {
            if s < g.rank() {
                for (slot, &f) in image.iter_mut().zip(flag) {
                    *slot = l.act_generator(g, s, f);
                }
                return true;
            }
            let perm = &ridges.reflections[s - g.rank()].vertex_permutation;
            for (slot, &f) in image.iter_mut().zip(flag) {
                scratch.clear();
                scratch.extend(r.face_vertices(f).iter().map(|&v| perm[v as usize]));
                scratch.sort_unstable();
                match by_vertices.get(&scratch) {
                    Some(&id) => *slot = id,
                    None => return false,
                }
            }
            true
        },
        g.rank() + ridges.reflections.len(),
    );
    Ok(Some(FlagOrbit { flags: flags.count(), orbit }))
}

/// Regular polytopes whose Wythoff group is smaller than their symmetry group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Caveat {
    FullyRingedPolygon,
    HypercubeProduct,
    A3Middle,
    D4,
    B4Interior,
}

pub fn oracle_caveat(d: &DecoratedDiagram) -> Option<Caveat> {
    let comps = d.components();
    if d.len() == 2 && d.is_connected() && d.ringed().count_ones() == 2 {
        return Some(Caveat::FullyRingedPolygon);
    }
    if comps.len() > 1 {
        return (ruled_kind(d).is_some()).then_some(Caveat::HypercubeProduct);
    }
    let c = &comps[0];
    match (c.tag, &ring_positions(d, &c.nodes)[..]) {
        (FamilyTag::A(3), [1]) => Some(Caveat::A3Middle),
        (FamilyTag::D(4), [_]) => Some(Caveat::D4),
        (FamilyTag::B(4), [2]) => Some(Caveat::B4Interior),
        _ => None,
    }
}

/// Ruled verdict next to the oracle, with the full-symmetry check run for
/// whitelisted diagrams.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub ruled: bool,
    pub group: FlagOrbit,
    pub caveat: Option<Caveat>,
    pub full_symmetry: Option<FlagOrbit>,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        if self.ruled == self.group.transitive() {
            return true;
        }
        self.ruled && self.caveat.is_some() && self.full_symmetry.is_some_and(|o| o.transitive())
    }
}

pub fn compare_with_oracle(d: &DecoratedDiagram, budget: usize) -> Result<OracleComparison, RegularError> {
    let ruled = is_regular_ruled(d)?.regular;
    let g = Group::of_with_budget(d, budget)?;
    let l = FaceLattice::build(d, &g)?;
    let group = group_flag_orbit(&l, &g);
    let caveat = oracle_caveat(d);
    let full_symmetry = if ruled && !group.transitive() && caveat.is_some() {
        let x = wythoff_point(g.normals(), &Decoration012::initial(d))?;
        let r = realize(&l, &g, &x)?;
        full_symmetry_flag_orbit(&l, &g, &r)?
    } else {
        None
    };
    Ok(OracleComparison { ruled, group, caveat, full_symmetry })
}

fn serialize_counts<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_u64() {
            Some(small) => seq.serialize_element(&small)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

/// A decorated diagram producing a catalog polytope.
#[derive(Debug, Clone, Serialize)]
pub struct Construction {
    pub families: String,
    pub diagram: String,
    pub decoration: Vec<u8>,
}

impl Construction {
    pub fn of(d: &DecoratedDiagram) -> Self {
        let families = d.family_tags().iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+");
        Self {
            families,
            diagram: d.notation(),
            decoration: Decoration012::initial(d).values().to_vec(),
        }
    }

    /// Inline notation, or family tags with ringed node ids.
    pub fn label(&self, d: &DecoratedDiagram) -> String {
        d.to_inline().unwrap_or_else(|| {
            let rings: Vec<&str> =
                (0..d.len()).filter(|&v| d.marks()[v] == Mark::Ring).map(|v| d.ids()[v].as_str()).collect();
            format!("{} ringed {}", self.families, rings.join(","))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub common_name: Option<String>,
    pub dimension: usize,
    pub dual: String,
    /// First construction found by the scan.
    pub diagram: String,
    pub decoration: Vec<u8>,
    #[serde(serialize_with = "serialize_counts")]
    pub f_vector: Vec<BigUint>,
    pub constructions: Vec<String>,
    /// Every construction's orbit-stabilizer f-vector equals `f_vector`.
    pub formula_checked: bool,
    /// Lattice enumeration and oracle, run for dimensions 3 and 4.
    pub verified: Option<bool>,
    #[serde(skip)]
    pub kind: Option<PolytopeKind>,
}

impl CatalogEntry {
    pub fn display_name(&self) -> String {
        match &self.common_name {
            Some(c) => format!("{} ({c})", self.name),
            None => self.name.clone(),
        }
    }
}

/// Every finite-type diagram of rank `n` (`I2(k)` for `k <= kmax`) with every
/// non-degenerate marking, in scan order.
pub fn scan_diagrams(n: usize, kmax: u32) -> impl Iterator<Item = DecoratedDiagram> {
    finite_type_multisets(n, kmax).into_iter().flat_map(move |tags| {
        all_markings(n).filter_map(move |marks| {
            let d = DecoratedDiagram::from_families(&tags, marks).expect("finite type");
            (!is_degenerate(&d, &Decoration012::initial(&d))).then_some(d)
        })
    })
}

/// Regular polytopes of dimension `n` from diagrams with `I2(k)`, `k <= kmax`.
/// Dimensions 3 and 4 are additionally verified by lattice enumeration and the
/// flag oracle.
pub fn classify(n: usize, kmax: u32) -> Vec<CatalogEntry> {
    let mut found: BTreeMap<(usize, u8, u32), (PolytopeKind, Vec<DecoratedDiagram>)> = BTreeMap::new();
    for d in scan_diagrams(n, kmax) {
        if let Some(kind) = ruled_kind(&d) {
            found.entry(kind.catalog_order()).or_insert_with(|| (kind, Vec::new())).1.push(d);
        }
    }
    found
        .into_values()
        .map(|(kind, diagrams)| {
            let expected = kind.expected_f_vector();
            let formula_checked =
                diagrams.iter().all(|d| f_vector_formula(d).map(|f| f == expected).unwrap_or(false));
            let verified = (n == 3 || n == 4).then(|| diagrams.iter().all(|d| verify_construction(d, &expected)));
            let first = Construction::of(&diagrams[0]);
            CatalogEntry {
                name: kind.name(),
                common_name: kind.common_name().map(String::from),
                dimension: n,
                dual: kind.dual().name(),
                diagram: first.diagram.clone(),
                decoration: first.decoration.clone(),
                f_vector: expected,
                constructions: diagrams.iter().map(|d| Construction::of(d).label(d)).collect(),
                formula_checked,
                verified,
                kind: Some(kind),
            }
        })
        .collect()
}

fn verify_construction(d: &DecoratedDiagram, expected: &[BigUint]) -> bool {
    let Ok(g) = Group::of_with_budget(d, DEFAULT_BUDGET) else { return false };
    let Ok(l) = FaceLattice::build(d, &g) else { return false };
    let counts: Vec<BigUint> = l.f_vector().into_iter().map(BigUint::from).collect();
    if counts != expected {
        return false;
    }
    if is_regular_oracle(&l, &g) {
        return true;
    }
    if oracle_caveat(d).is_none() {
        return false;
    }
    let Ok(x) = wythoff_point(g.normals(), &Decoration012::initial(d)) else { return false };
    let Ok(r) = realize(&l, &g, &x) else { return false };
    matches!(full_symmetry_flag_orbit(&l, &g, &r), Ok(Some(o)) if o.transitive())
}

/// All diagrams of the named polytope's dimension whose polytope has the
/// same face-type signature as the named one.
pub fn multi_construction_report(name: &str, kmax: u32) -> Result<Vec<(DecoratedDiagram, Construction)>, RegularError> {
    let kind = PolytopeKind::from_name(name).ok_or_else(|| RegularError::UnknownName(name.to_string()))?;
    let reference = kind.reference_diagram();
    let mut types = FaceTypes::new();
    let target = types.of_polytope(&reference)?;
    let vertices = kind.expected_f_vector()[0].clone();
    let mut out = Vec::new();
    for d in scan_diagrams(kind.dimension(), kmax) {
        let f0 = Decoration012::initial(&d);
        let count = d.group_order() / d.parabolic_order(crate::decoration::stabilizer_generators(&f0));
        if count != vertices {
            continue;
        }
        if types.of_polytope(&d)? == target {
            let c = Construction::of(&d);
            out.push((d, c));
        }
    }
    Ok(out)
}

/// Flag-graph isomorphism test between two face lattices.
pub fn lattices_isomorphic(a: &FaceLattice, b: &FaceLattice) -> bool {
    if a.rank() != b.rank() || a.f_vector() != b.f_vector() {
        return false;
    }
    let (fa, fb) = (a.flags(), b.flags());
    if fa.count() != fb.count() {
        return false;
    }
    if fa.count() == 0 {
        return true;
    }
    let (adj_a, adj_b) = (flag_adjacency(a, &fa), flag_adjacency(b, &fb));
    let n = a.rank();
    let count = fa.count();
    'candidate: for start in 0..count {
        let mut map = vec![u32::MAX; count];
        let mut used = vec![false; count];
        map[0] = start as u32;
        used[start] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let j = map[i] as usize;
            for pos in 0..n {
                let (ni, nj) = (adj_a[i * n + pos] as usize, adj_b[j * n + pos] as usize);
                if map[ni] == u32::MAX {
                    if used[nj] {
                        continue 'candidate;
                    }
                    map[ni] = nj as u32;
                    used[nj] = true;
                    queue.push_back(ni);
                } else if map[ni] as usize != nj {
                    continue 'candidate;
                }
            }
        }
        if map.contains(&u32::MAX) {
            continue;
        }
        let mut face_map = vec![u32::MAX; a.len()];
        let mut face_used = vec![false; b.len()];
        for i in 0..count {
            for (&x, &y) in fa.get(i).iter().zip(fb.get(map[i] as usize)) {
                if face_map[x as usize] == u32::MAX {
                    if face_used[y as usize] {
                        continue 'candidate;
                    }
                    face_map[x as usize] = y;
                    face_used[y as usize] = true;
                } else if face_map[x as usize] != y {
                    continue 'candidate;
                }
            }
        }
        return true;
    }
    false
}

fn flag_adjacency(l: &FaceLattice, flags: &crate::lattice::Flags) -> Vec<u32> {
    let n = l.rank();
    let mut adj = vec![u32::MAX; flags.count() * n];
    let mut scratch = vec![0u32; n];
    for i in 0..flags.count() {
        let flag = flags.get(i);
        for pos in 0..n {
            let lower = if pos == 0 { EMPTY_FACE } else { flag[pos - 1] };
            let upper = if pos + 1 == n { l.top() } else { flag[pos + 1] };
            if let Some(alt) = l.between(lower, upper).into_iter().find(|&f| f != flag[pos]) {
                scratch.copy_from_slice(flag);
                scratch[pos] = alt;
                if let Some(j) = flags.position(&scratch) {
                    adj[i * n + pos] = j as u32;
                }
            }
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DecoratedDiagram {
        DecoratedDiagram::parse(s).unwrap()
    }

    fn family(tag: FamilyTag, ring: usize) -> DecoratedDiagram {
        let marks = (0..tag.rank()).map(|i| if i == ring { Mark::Ring } else { Mark::Cross }).collect();
        DecoratedDiagram::from_families(&[tag], marks).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for kind in [
            PolytopeKind::Polygon(4),
            PolytopeKind::Polygon(17),
            PolytopeKind::Simplex(5),
            PolytopeKind::Hypercube(3),
            PolytopeKind::Hyperoctahedron(4),
            PolytopeKind::TwentyFourCell,
            PolytopeKind::SixHundredCell,
        ] {
            assert_eq!(PolytopeKind::from_name(&kind.name()), Some(kind));
            assert_eq!(PolytopeKind::from_name(&kind.display_name()), Some(kind));
        }
        assert_eq!(PolytopeKind::from_name("cube"), Some(PolytopeKind::Hypercube(3)));
        assert_eq!(PolytopeKind::from_name("tesseract"), Some(PolytopeKind::Hypercube(4)));
        assert_eq!(PolytopeKind::from_name("3-hyperoctahedron (octahedron)"), Some(PolytopeKind::Hyperoctahedron(3)));
        assert_eq!(PolytopeKind::from_name("rhombus"), None);
    }

    #[test]
    fn closed_form_f_vectors() {
        let v = |k: PolytopeKind| k.expected_f_vector().iter().map(|x| x.to_u64().unwrap()).collect::<Vec<_>>();
        assert_eq!(v(PolytopeKind::Simplex(4)), vec![5, 10, 10, 5]);
        assert_eq!(v(PolytopeKind::Hypercube(4)), vec![16, 32, 24, 8]);
        assert_eq!(v(PolytopeKind::Hyperoctahedron(4)), vec![8, 24, 32, 16]);
    }

    #[test]
    fn ruled_examples() {
        let cube = is_regular_ruled(&d("x4o3o")).unwrap();
        assert!(cube.regular);
        assert_eq!(cube.to_string(), "regular: 3-hypercube (cube)");

        let v = is_regular_ruled(&d("o3x4o")).unwrap();
        assert!(!v.regular);
        assert_eq!(v.to_string(), "not regular: 2-faces square vs triangle");
        let Witness::Counterexample { first, second } = &v.witness else { panic!() };
        assert_eq!((first.rank, second.rank), (2, 2));
        assert_eq!(first.sequence.len(), 2);

        assert_eq!(ruled_kind(&family(FamilyTag::D(4), 1)), Some(PolytopeKind::TwentyFourCell));
        assert_eq!(ruled_kind(&family(FamilyTag::B(4), 2)), Some(PolytopeKind::TwentyFourCell));
        assert_eq!(ruled_kind(&family(FamilyTag::F4, 3)), Some(PolytopeKind::TwentyFourCell));
        assert_eq!(ruled_kind(&family(FamilyTag::D(5), 0)), Some(PolytopeKind::Hyperoctahedron(5)));
        assert_eq!(ruled_kind(&family(FamilyTag::D(5), 4)), None);
        assert_eq!(ruled_kind(&family(FamilyTag::E6, 0)), None);
        assert_eq!(ruled_kind(&d("x3o3x")), None);
        assert_eq!(ruled_kind(&d("x5x")), Some(PolytopeKind::Polygon(10)));
        assert!(matches!(is_regular_ruled(&d("o3o")), Err(RegularError::Degenerate)));
    }

    #[test]
    fn hypercube_products() {
        let prism = DecoratedDiagram::from_families(
            &[FamilyTag::I2(4), FamilyTag::A(1)],
            vec![Mark::Cross, Mark::Ring, Mark::Ring],
        )
        .unwrap();
        assert_eq!(ruled_kind(&prism), Some(PolytopeKind::Hypercube(3)));
        let triangular = DecoratedDiagram::from_families(
            &[FamilyTag::I2(3), FamilyTag::A(1)],
            vec![Mark::Ring, Mark::Cross, Mark::Ring],
        )
        .unwrap();
        let v = is_regular_ruled(&triangular).unwrap();
        assert_eq!(v.to_string(), "not regular: 2-faces square vs triangle");
    }

    #[test]
    fn face_types_identify_octahedra() {
        let mut types = FaceTypes::new();
        let a = types.of_polytope(&d("o3x3o")).unwrap();
        let b = types.of_polytope(&d("x3o4o")).unwrap();
        let c = types.of_polytope(&d("x4o3o")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let f: Vec<u64> = types.f_vector(a).iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(f, vec![6, 12, 8]);
    }

    #[test]
    fn oracle_examples() {
        let cube = d("x4o3o");
        let g = Group::of(&cube).unwrap();
        let l = FaceLattice::build(&cube, &g).unwrap();
        assert_eq!(group_flag_orbit(&l, &g), FlagOrbit { flags: 48, orbit: 48 });
        assert!(is_regular_oracle(&l, &g));

        let tc = d("o3x4x");
        let g = Group::of(&tc).unwrap();
        let l = FaceLattice::build(&tc, &g).unwrap();
        assert!(!is_regular_oracle(&l, &g));

        let octagon = compare_with_oracle(&d("x4x"), DEFAULT_BUDGET).unwrap();
        assert_eq!(octagon.group, FlagOrbit { flags: 16, orbit: 8 });
        assert_eq!(octagon.caveat, Some(Caveat::FullyRingedPolygon));
        assert_eq!(octagon.full_symmetry, Some(FlagOrbit { flags: 16, orbit: 16 }));
        assert!(octagon.agrees());

        let cubocta = compare_with_oracle(&d("x3o3x"), DEFAULT_BUDGET).unwrap();
        assert!(!cubocta.ruled && !cubocta.group.transitive() && cubocta.agrees());
    }

    #[test]
    fn classify_three() {
        let names: Vec<String> = classify(3, 6).iter().map(|e| e.name.clone()).collect();
        assert_eq!(
            names,
            ["3-simplex", "3-hypercube", "3-hyperoctahedron", "icosahedron", "dodecahedron"]
        );
        for e in classify(3, 6) {
            assert!(e.formula_checked && e.verified == Some(true), "{}", e.name);
        }
    }

    #[test]
    fn octahedron_constructions() {
        let found = multi_construction_report("3-hyperoctahedron (octahedron)", DEFAULT_KMAX).unwrap();
        let labels: Vec<String> = found.iter().map(|(d, c)| c.label(d)).collect();
        assert_eq!(labels, ["o3x3o", "o4o3x"]);
        assert!(matches!(multi_construction_report("trapezohedron", 12), Err(RegularError::UnknownName(_))));
    }

    #[test]
    fn isomorphism_of_octahedra() {
        let build = |s: &str| {
            let d = d(s);
            let g = Group::of(&d).unwrap();
            FaceLattice::build(&d, &g).unwrap()
        };
        assert!(lattices_isomorphic(&build("o3x3o"), &build("x3o4o")));
        assert!(!lattices_isomorphic(&build("o3x3o"), &build("x4o3o")));
        assert!(!lattices_isomorphic(&build("x3x3o"), &build("x3o4o")));
    }
}
