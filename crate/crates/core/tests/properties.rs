use num_bigint::BigUint;
use proptest::prelude::*;
use wythoff::diagram::{Edge, FamilyTag, Mark};
use wythoff::regular::ruled_kind;
use wythoff::{f_vector_formula, DecoratedDiagram, Group};

fn path_family() -> impl Strategy<Value = FamilyTag> {
    prop_oneof![
        (1usize..=6).prop_map(FamilyTag::A),
        (3usize..=6).prop_map(FamilyTag::B),
        Just(FamilyTag::H3),
        Just(FamilyTag::H4),
        Just(FamilyTag::F4),
        (3u32..=12).prop_map(FamilyTag::I2),
    ]
}

fn any_family() -> impl Strategy<Value = FamilyTag> {
    prop_oneof![
        path_family(),
        (4usize..=7).prop_map(FamilyTag::D),
        Just(FamilyTag::E6),
        Just(FamilyTag::E7),
        Just(FamilyTag::E8),
    ]
}

fn with_marks(tags: Vec<FamilyTag>) -> impl Strategy<Value = DecoratedDiagram> {
    let n: usize = tags.iter().map(|t| t.rank()).sum();
    proptest::collection::vec(any::<bool>(), n).prop_map(move |rings| {
        let marks = rings.into_iter().map(|r| if r { Mark::Ring } else { Mark::Cross }).collect();
        DecoratedDiagram::from_families(&tags, marks).unwrap()
    })
}

fn relabel(d: &DecoratedDiagram, perm: &[usize]) -> DecoratedDiagram {
    let mut ids = vec![String::new(); d.len()];
    let mut marks = vec![Mark::Cross; d.len()];
    for (old, &new) in perm.iter().enumerate() {
        ids[new] = d.ids()[old].clone();
        marks[new] = d.marks()[old];
    }
    let edges = d.edges().iter().map(|e| Edge { a: perm[e.a], b: perm[e.b], m: e.m }).collect();
    DecoratedDiagram::new(ids, marks, edges).unwrap()
}

proptest! {
    #[test]
    fn inline_round_trip(d in path_family().prop_flat_map(|t| with_marks(vec![t]))) {
        let text = d.to_inline().unwrap();
        let back = DecoratedDiagram::parse(&text).unwrap();
        prop_assert_eq!(back.to_inline().unwrap(), text);
        prop_assert_eq!(back.family_tags(), d.family_tags());
        prop_assert_eq!(back.marks(), d.marks());
    }

    #[test]
    fn document_round_trip(d in proptest::collection::vec(any_family(), 1..3).prop_flat_map(with_marks)) {
        let back = DecoratedDiagram::parse(&d.to_document()).unwrap();
        prop_assert_eq!(&back, &d);
    }

    #[test]
    fn relabeling_keeps_classification(
        (d, perm) in proptest::collection::vec(any_family(), 1..3)
            .prop_flat_map(with_marks)
            .prop_flat_map(|d| {
                let n = d.len();
                (Just(d), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
    ) {
        let r = relabel(&d, &perm);
        let mut a = d.family_tags();
        let mut b = r.family_tags();
        a.sort_by_key(|t| t.to_string());
        b.sort_by_key(|t| t.to_string());
        prop_assert_eq!(a, b);
        prop_assert_eq!(d.group_order(), r.group_order());
        prop_assert_eq!(f_vector_formula(&d).ok(), f_vector_formula(&r).ok());
        prop_assert_eq!(ruled_kind(&d), ruled_kind(&r));
    }
}

#[test]
fn enumerated_orders_match_closed_forms() {
    let tags = [
        FamilyTag::A(1),
        FamilyTag::A(4),
        FamilyTag::A(6),
        FamilyTag::B(3),
        FamilyTag::B(5),
        FamilyTag::D(4),
        FamilyTag::D(5),
        FamilyTag::F4,
        FamilyTag::H3,
        FamilyTag::H4,
        FamilyTag::I2(7),
        FamilyTag::I2(12),
    ];
    for tag in tags {
        let d = DecoratedDiagram::from_families(&[tag], vec![Mark::Ring; tag.rank()]).unwrap();
        let g = Group::of(&d).unwrap();
        assert_eq!(BigUint::from(g.order()), tag.order(), "{tag}");
    }
    let product =
        DecoratedDiagram::from_families(&[FamilyTag::A(2), FamilyTag::I2(5)], vec![Mark::Ring; 4]).unwrap();
    assert_eq!(Group::of(&product).unwrap().order(), 60);
}

#[test]
fn relabeled_d4_center_is_still_the_24_cell() {
    let d = DecoratedDiagram::parse(
        r#"{"nodes":[{"id":"p","mark":"cross"},{"id":"q","mark":"cross"},{"id":"hub","mark":"ring"},{"id":"r","mark":"cross"}],"edges":[{"a":"hub","b":"r","m":3},{"a":"p","b":"hub","m":3},{"a":"hub","b":"q","m":3}]}"#,
    )
    .unwrap();
    assert_eq!(d.family_tags(), vec![FamilyTag::D(4)]);
    assert_eq!(ruled_kind(&d).map(|k| k.name()), Some("24-cell".to_string()));
}
