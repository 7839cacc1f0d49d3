mod common;

use common::{ext, model_ext, parse, Rows};
use potentialist::kripke::{enumerate_frames, FrameValidity, KripkeError, ModelFile};
use potentialist::{Frame, FrameProperty, Model, PropFormula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chain() -> Model {
    ModelFile::parse(r#"{"worlds": ["w0","w1"], "relation": [["w0","w0"],["w0","w1"],["w1","w1"]], "valuation": {"w0": [], "w1": ["p"]}}"#)
        .unwrap()
}

fn fork() -> Frame {
    Frame::new(
        ["r", "a", "b"],
        [("r", "r"), ("a", "a"), ("b", "b"), ("r", "a"), ("r", "b")],
    )
    .unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, n: usize) -> Model {
    let r = Rows::from_mask(n, rng.gen_range(0..1u64 << (n * n)));
    let val: Vec<Vec<&str>> = (0..n)
        .map(|_| {
            ["p", "q"]
                .into_iter()
                .filter(|_| rng.gen_bool(0.5))
                .collect()
        })
        .collect();
    let refs: Vec<&[&str]> = val.iter().map(Vec::as_slice).collect();
    common::model(&r, &refs)
}

#[test]
fn documented_model_checks() {
    let m = chain();
    assert!(m.model_check("w0", &parse("<>p")).unwrap());
    assert!(!m.model_check("w0", &parse("[]p")).unwrap());
    assert!(m.model_check("w0", &parse("<>[]p")).unwrap());
    assert_eq!(
        m.model_check("w9", &parse("p")),
        Err(KripkeError::UnknownWorld("w9".into()))
    );
    assert!(m.valid(&parse("p | ~p")).is_ok());
    assert_eq!(m.valid(&parse("[]p")), Err("w0".to_string()));
}

#[test]
fn documented_frame_properties() {
    let one = Frame::new(["w"], [("w", "w")]).unwrap();
    for p in [
        FrameProperty::Reflexive,
        FrameProperty::Transitive,
        FrameProperty::Directed,
    ] {
        assert!(one.has_property(p));
    }
    let w = fork().check_property(FrameProperty::Directed).unwrap_err();
    assert_eq!(w.worlds, ["r", "a", "b"]);
    let three = Frame::new(["a", "b", "c"], [("a", "b"), ("b", "c")])
        .unwrap()
        .reflexive_transitive_closure();
    assert!(three.has_property(FrameProperty::Directed));
}

#[test]
fn documented_frame_validity() {
    let f = parse("<>[]p -> []<>p");
    match fork().valid(&f, 4).unwrap() {
        FrameValidity::Countermodel { model, world } => {
            assert_eq!(world, "r");
            let p: Vec<&str> = (0..3)
                .filter(|&i| model.atoms_at(i).contains("p"))
                .map(|i| model.world_id(i))
                .collect();
            assert_eq!(p, ["a"]);
        }
        FrameValidity::Valid => panic!("the fork is not directed"),
    }
    assert!(fork().valid(&parse("p -> p"), 4).unwrap().is_valid());
    let three = Frame::new(["a", "b", "c"], [("a", "b"), ("b", "c")])
        .unwrap()
        .reflexive_transitive_closure();
    assert!(three.valid(&f, 4).unwrap().is_valid());
    assert!(matches!(
        fork().valid(&parse("a & b & c & d & e"), 4),
        Err(KripkeError::CapExceeded { .. })
    ));
}

#[test]
fn enumeration_matches_the_oracle() {
    use FrameProperty::*;
    for n in 0..=3 {
        for props in [
            vec![],
            vec![Reflexive],
            vec![Reflexive, Transitive],
            vec![Reflexive, Transitive, Directed],
            vec![Equivalence],
        ] {
            let got: Vec<u64> = enumerate_frames(n, &props, 5)
                .unwrap()
                .map(|f| f.mask().unwrap())
                .collect();
            let want: Vec<u64> = (0u64..1 << (n * n))
                .filter(|&m| {
                    let r = Rows::from_mask(n, m);
                    props.iter().all(|p| match p {
                        Reflexive => r.reflexive(),
                        Transitive => r.transitive(),
                        Directed => r.directed(),
                        Symmetric => r.symmetric(),
                        Equivalence => r.reflexive() && r.transitive() && r.symmetric(),
                    })
                })
                .collect();
            assert_eq!(got, want, "n={n} {props:?}");
        }
    }
    assert_eq!(enumerate_frames(2, &[], 5).unwrap().count(), 16);
    assert!(enumerate_frames(6, &[], 5).is_err());
}

#[test]
fn forcing_matches_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fs = common::corpus(5, 60, 6);
    for _ in 0..40 {
        let n = rng.gen_range(1..=4);
        let m = random_model(&mut rng, n);
        for f in &fs {
            let got = m.extension(f);
            let want = model_ext(&m, f);
            for i in 0..n {
                assert_eq!(
                    got.contains(i),
                    want >> i & 1 == 1,
                    "{f} at {}",
                    m.world_id(i)
                );
            }
        }
    }
}

#[test]
fn duality_and_box_persistence() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fs = common::corpus(9, 40, 4);
    for _ in 0..30 {
        let n = rng.gen_range(1..=4);
        let m = random_model(&mut rng, n);
        let closed = m.with_frame(m.frame().reflexive_transitive_closure());
        for f in &fs {
            let dia = m.extension(&PropFormula::diamond(f.clone()));
            let not_box_not = m.extension(&PropFormula::not(PropFormula::necessarily(
                PropFormula::not(f.clone()),
            )));
            assert_eq!(dia, not_box_not);
            let boxed = closed.extension(&PropFormula::necessarily(f.clone()));
            for w in boxed.ones() {
                assert!(closed
                    .frame()
                    .successors(w)
                    .ones()
                    .all(|u| boxed.contains(u)));
            }
        }
    }
}

#[test]
fn four_and_two_sweeps() {
    let four = parse("[]p -> [][]p");
    let two = parse("<>[]p -> []<>p");
    for n in 1..=4 {
        for fr in
            enumerate_frames(n, &[FrameProperty::Reflexive, FrameProperty::Transitive], 5).unwrap()
        {
            assert!(fr.valid(&four, 4).unwrap().is_valid());
            let r = Rows::from_mask(n, fr.mask().unwrap());
            // frame validity by the oracle: every valuation of p
            let oracle = (0u16..1 << n).all(|v| ext(&two, &r, &|_| v as u8) == r.full());
            assert_eq!(fr.valid(&two, 4).unwrap().is_valid(), oracle);
            assert_eq!(oracle, r.directed());
        }
    }
}

#[test]
fn model_files_round_trip_and_reject_junk() {
    let m = chain();
    assert_eq!(ModelFile::parse(&ModelFile::to_json(&m)).unwrap(), m);
    assert!(ModelFile::parse(
        r#"{"worlds": ["w0"], "relation": [], "valuation": {"w0": []}, "extra": 1}"#
    )
    .is_err());
    assert!(ModelFile::parse(
        r#"{"worlds": ["w0"], "relation": [["w0","w1"]], "valuation": {"w0": []}}"#
    )
    .is_err());
    assert!(ModelFile::parse(r#"{"worlds": ["w0"], "relation": [], "valuation": {}}"#).is_err());
    let closed = ModelFile::parse(
        r#"{"worlds": ["a","b","c"], "relation": [["a","b"],["b","c"]], "valuation": {"a": [], "b": [], "c": []}, "close": "rt"}"#,
    )
    .unwrap();
    assert!(closed.frame().accesses(0, 2) && closed.frame().accesses(1, 1));
}
