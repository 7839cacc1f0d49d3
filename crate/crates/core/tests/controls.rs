mod common;

use common::parse;
use potentialist::controls::{
    classify, independent_buttons_dial, independent_switches, is_dial, make_button_dial_model,
    make_switch_model, mp_check, s42_cap_witness, s5_cap_witness, ControlError, DialFamily,
    WitnessResult,
};
use potentialist::theories::{decide, logic_fingerprint, Axiom, Theory, DEFAULT_CAP};
use potentialist::{Model, PropFormula};

/// Truth of `f` at world `w` by direct recursion on successors, without the
/// library's extension machinery.
fn holds(m: &Model, w: usize, f: &PropFormula) -> bool {
    match f {
        PropFormula::Atom(a) => m.atoms_at(w).contains(a),
        PropFormula::True => true,
        PropFormula::False => false,
        PropFormula::Not(g) => !holds(m, w, g),
        PropFormula::And(g, h) => holds(m, w, g) && holds(m, w, h),
        PropFormula::Or(g, h) => holds(m, w, g) || holds(m, w, h),
        PropFormula::Implies(g, h) => !holds(m, w, g) || holds(m, w, h),
        PropFormula::Iff(g, h) => holds(m, w, g) == holds(m, w, h),
        PropFormula::Diamond(g) => m.frame().successors(w).ones().any(|u| holds(m, u, g)),
        PropFormula::Box(g) => m.frame().successors(w).ones().all(|u| holds(m, u, g)),
    }
}

fn certify(m: &Model, f: &PropFormula, r: &WitnessResult) {
    let w = m.world_index(&r.world).unwrap();
    assert!(
        !holds(m, w, &f.substitute(&r.substitution)),
        "{f} under {:?} holds at {}",
        r.substitution,
        r.world
    );
}

fn atoms(prefix: &str, n: usize) -> Vec<PropFormula> {
    (0..n)
        .map(|i| PropFormula::atom(&format!("{prefix}{i}")))
        .collect()
}

#[test]
fn buttons_persist_in_generated_models() {
    for (nb, nd, depth) in [(1, 1, 3), (2, 3, 3), (3, 2, 2)] {
        let m = make_button_dial_model(nb, nd, depth).unwrap();
        for b in atoms("b", nb) {
            let pushed: Vec<usize> = (0..m.len())
                .filter(|&w| holds(&m, w, &PropFormula::necessarily(b.clone())))
                .collect();
            for &w in &pushed {
                assert!(m.frame().successors(w).ones().all(|u| pushed.contains(&u)));
            }
            assert!(classify(&m, m.world_id(0), &b).unwrap().is_button());
        }
    }
}

#[test]
fn dials_partition_their_scope() {
    for (nb, nd) in [(1, 2), (2, 3), (0, 4)] {
        let m = make_button_dial_model(nb, nd, 2).unwrap();
        let dial = DialFamily::new(atoms("d", nd));
        assert_eq!(is_dial(&m, &dial).unwrap(), Ok(()));
        for w in 0..m.len() {
            assert_eq!(
                dial.statements.iter().filter(|d| holds(&m, w, d)).count(),
                1
            );
        }
    }
    let m = make_switch_model(1, 3).unwrap();
    assert_eq!(
        is_dial(&m, &DialFamily::new(vec![parse("s0"), parse("~s0")])).unwrap(),
        Ok(())
    );
}

#[test]
fn switch_models_are_independent() {
    for n in 1..=3 {
        let m = make_switch_model(n, 2).unwrap();
        let ss = atoms("s", n);
        for w in 0..m.len() {
            assert_eq!(
                independent_switches(&m, m.world_id(w), &ss).unwrap(),
                Ok(())
            );
        }
        let mut dup = ss.clone();
        dup.push(ss[0].clone());
        assert!(independent_switches(&m, m.world_id(0), &dup)
            .unwrap()
            .is_err());
    }
}

#[test]
fn button_independence_examples() {
    let m = make_button_dial_model(2, 3, 8).unwrap();
    let bs = atoms("b", 2);
    assert_eq!(
        independent_buttons_dial(&m, &bs, &DialFamily::new(atoms("d", 3))).unwrap(),
        Ok(())
    );
    assert_eq!(
        independent_buttons_dial(&m, &bs, &DialFamily::trivial()).unwrap(),
        Ok(())
    );
    let same = [parse("b0"), parse("b0")];
    assert!(independent_buttons_dial(&m, &same, &DialFamily::trivial())
        .unwrap()
        .is_err());
}

#[test]
fn s5_witnesses_self_certify_on_a_corpus() {
    let m = make_switch_model(3, 2).unwrap();
    let ss = atoms("s", 3);
    let mut found = 0;
    for f in common::corpus(21, 150, 6) {
        match s5_cap_witness(&m, "l0p0", &ss, &f) {
            Ok(r) => {
                certify(&m, &f, &r);
                found += 1;
            }
            Err(ControlError::ValidInTheory { .. }) => {
                assert!(decide(&f, Theory::S5, DEFAULT_CAP).is_valid())
            }
            Err(ControlError::TooFewControls { .. }) => {}
            Err(e) => panic!("{f}: {e}"),
        }
    }
    assert!(found > 20, "only {found} witnesses");
}

#[test]
fn s42_witnesses_self_certify_on_a_corpus() {
    let m = make_button_dial_model(2, 2, 4).unwrap();
    let bs = atoms("b", 2);
    let dial = DialFamily::new(atoms("d", 2));
    let mut found = 0;
    for f in common::corpus(22, 150, 6) {
        match s42_cap_witness(&m, m.world_id(0), &bs, &dial, &f) {
            Ok(r) => {
                certify(&m, &f, &r);
                found += 1;
            }
            Err(ControlError::ValidInTheory { .. }) => {
                assert!(decide(&f, Theory::S4_2, DEFAULT_CAP).is_valid())
            }
            Err(ControlError::TooFewControls { .. } | ControlError::NoChainCountermodel { .. }) => {
            }
            Err(e) => panic!("{f}: {e}"),
        }
    }
    assert!(found > 20, "only {found} witnesses");
}

#[test]
fn documented_witnesses() {
    let m = make_switch_model(1, 3).unwrap();
    let f = parse("[](p | q) -> []p | []q");
    let r = s5_cap_witness(&m, "l0p0", &[parse("s0")], &f).unwrap();
    certify(&m, &f, &r);
    let inst = f.substitute(&r.substitution);
    assert!((0..m.len()).all(|w| !holds(&m, w, &inst)));
    assert!(matches!(
        s5_cap_witness(&m, "l0p0", &[parse("s0")], &parse("<>[]p -> []<>p")),
        Err(ControlError::ValidInTheory { .. })
    ));

    let m = make_button_dial_model(2, 1, 4).unwrap();
    let f = parse("~(~p & <>(p & ~q & <>[]q))");
    let r = s42_cap_witness(
        &m,
        m.world_id(0),
        &atoms("b", 2),
        &DialFamily::trivial(),
        &f,
    )
    .unwrap();
    certify(&m, &f, &r);
    assert!(matches!(
        s42_cap_witness(
            &m,
            m.world_id(0),
            &atoms("b", 2),
            &DialFamily::trivial(),
            &parse("[]p -> [][]p")
        ),
        Err(ControlError::ValidInTheory { .. })
    ));
}

#[test]
fn upper_bound_echo() {
    let m = make_button_dial_model(3, 3, 8).unwrap();
    let report = logic_fingerprint(&m, &[parse("b0"), parse("d0")], 2).unwrap();
    assert!(report.validates(Theory::S4_2));
    assert!(!report.scheme(Axiom::Five).all_valid());
    let f = Axiom::Five.scheme();
    let r = s42_cap_witness(
        &m,
        m.world_id(0),
        &atoms("b", 3),
        &DialFamily::new(atoms("d", 3)),
        &f,
    )
    .unwrap();
    certify(&m, &f, &r);
}

#[test]
fn mp_on_clusters_and_chains() {
    let m = make_switch_model(2, 1).unwrap();
    for w in 0..m.len() {
        assert!(mp_check(&m, m.world_id(w), &[parse("s0")], 2)
            .unwrap()
            .holds());
    }
    let m = make_button_dial_model(1, 1, 1).unwrap();
    let r = mp_check(&m, "P0d0l0", &[parse("b0")], 0).unwrap();
    assert_eq!(r.violation.unwrap().instance, "<>[]b0 -> b0");
    assert!(mp_check(&m, "P1d0l0", &[parse("b0")], 2).unwrap().holds());
}
