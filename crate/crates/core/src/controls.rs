//! Switches, buttons and dials on a finite Kripke model, independence of
//! such families, and the labelings that turn independent controls into
//! failing substitution instances of formulas outside S5 or S4.2.
//!
//! "Reachable" always means reachable in zero or more steps; `<>` and `[]`
//! keep the model's raw relation.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{PropFormula, Substitution};
use crate::kripke::{Frame, KripkeError, Model};
use crate::pool::pool_closure;
use crate::theories::{decide, Theory, Verdict, DEFAULT_CAP};

pub const MAX_SWITCHES: usize = 6;
pub const MAX_BUTTONS: usize = 5;
pub const MAX_DIAL: usize = 8;
pub const MAX_LEVELS: usize = 16;

#[derive(Debug, Error)]
pub enum ControlError {
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("switch family is not independent: {0}")]
    NotIndependentSwitches(SwitchViolation),
    #[error("button family is not independent of the dial: {0}")]
    NotIndependentButtons(ButtonViolation),
    #[error("{formula} is valid in {theory}; no failing substitution instance exists")]
    ValidInTheory { formula: String, theory: Theory },
    #[error("could not decide {formula} in {theory} within {cap} worlds")]
    Undecided {
        formula: String,
        theory: Theory,
        cap: usize,
    },
    #[error("not enough controls: {needed} {what} needed, {have} supplied")]
    TooFewControls {
        what: &'static str,
        needed: usize,
        have: usize,
    },
    #[error("no countermodel shaped as a chain of clusters fits {buttons} buttons and {dial} dial values")]
    NoChainCountermodel { buttons: usize, dial: usize },
    #[error("labeling failed to certify: {instance} is not false at any candidate world")]
    CertificationFailed { instance: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub world: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role")]
pub enum Role {
    /// `button` lists the pushed worlds when the statement is also a button.
    Switch {
        button: Option<Vec<String>>,
    },
    Button {
        pushed: Vec<String>,
    },
    Neither {
        switch: Violation,
        button: Violation,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControlReport {
    pub statement: PropFormula,
    #[serde(flatten)]
    pub role: Role,
}

impl ControlReport {
    pub fn is_switch(&self) -> bool {
        matches!(self.role, Role::Switch { .. })
    }

    pub fn is_button(&self) -> bool {
        matches!(
            self.role,
            Role::Button { .. } | Role::Switch { button: Some(_) }
        )
    }

    pub fn pushed(&self) -> Option<&[String]> {
        match &self.role {
            Role::Button { pushed }
            | Role::Switch {
                button: Some(pushed),
            } => Some(pushed),
            _ => None,
        }
    }
}

fn ids(m: &Model, s: &FixedBitSet) -> Vec<String> {
    s.ones().map(|i| m.world_id(i).to_string()).collect()
}

fn switch_violation(m: &Model, w: usize, s: &PropFormula) -> Option<Violation> {
    let fr = m.frame();
    let ext = m.extension(s);
    let poss = fr.diamond_of(&ext);
    let mut neg = ext;
    neg.toggle_range(..);
    let poss_not = fr.diamond_of(&neg);
    fr.reachable(w).ones().find_map(|u| {
        let reason = if !poss.contains(u) {
            format!("<>{} fails", paren(s))
        } else if !poss_not.contains(u) {
            format!("<>~{} fails", paren(s))
        } else {
            return None;
        };
        Some(Violation {
            world: m.world_id(u).to_string(),
            reason,
        })
    })
}

fn paren(s: &PropFormula) -> String {
    let text = s.render();
    if s.children().len() == 2 {
        format!("({text})")
    } else {
        text
    }
}

/// Worlds where `b` is pushed, or the first world where `<>[]b` fails.
fn button_status(m: &Model, b: &PropFormula) -> Result<FixedBitSet, Violation> {
    let fr = m.frame();
    let pushed = fr.box_of(&m.extension(b));
    let pushable = fr.diamond_of(&pushed);
    match (0..m.len()).find(|&i| !pushable.contains(i)) {
        Some(i) => Err(Violation {
            world: m.world_id(i).to_string(),
            reason: format!("<>[]{} fails", paren(b)),
        }),
        None => Ok(pushed),
    }
}

/// Classifies `s` as a switch at `w` (tested on every world reachable from
/// `w`) and as a button (tested at every world).
pub fn classify(m: &Model, w: &str, s: &PropFormula) -> Result<ControlReport, KripkeError> {
    let wi = m.world_index(w)?;
    let switch = switch_violation(m, wi, s);
    let button = button_status(m, s);
    let role = match (switch, button) {
        (None, Ok(pushed)) => Role::Switch {
            button: Some(ids(m, &pushed)),
        },
        (None, Err(_)) => Role::Switch { button: None },
        (Some(_), Ok(pushed)) => Role::Button {
            pushed: ids(m, &pushed),
        },
        (Some(switch), Err(button)) => Role::Neither { switch, button },
    };
    Ok(ControlReport {
        statement: s.clone(),
        role,
    })
}

/// Statements `d_0..` asserted to form a dial on `scope` (every world when
/// `scope` is `None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DialFamily {
    pub statements: Vec<PropFormula>,
    pub scope: Option<BTreeSet<String>>,
}

impl DialFamily {
    pub fn new(statements: Vec<PropFormula>) -> Self {
        assert!(!statements.is_empty(), "a dial needs at least one value");
        DialFamily {
            statements,
            scope: None,
        }
    }

    pub fn with_scope(mut self, scope: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.scope = Some(scope.into_iter().map(Into::into).collect());
        self
    }

    /// The trivial one-valued dial.
    pub fn trivial() -> Self {
        DialFamily::new(vec![PropFormula::True])
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    fn scope_set(&self, m: &Model) -> Result<FixedBitSet, KripkeError> {
        let mut s = FixedBitSet::with_capacity(m.len());
        match &self.scope {
            None => s.insert_range(..),
            Some(ws) => {
                for w in ws {
                    s.insert(m.world_index(w)?);
                }
            }
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum DialViolation {
    /// `values` lists the dial values true at `world`.
    NotExactlyOne {
        world: String,
        values: Vec<usize>,
    },
    Unreachable {
        world: String,
        value: usize,
    },
}

impl DialViolation {
    pub fn world(&self) -> &str {
        match self {
            DialViolation::NotExactlyOne { world, .. }
            | DialViolation::Unreachable { world, .. } => world,
        }
    }
}

/// Checks the dial contract on every scope world; on failure returns every
/// violation found, in world order.
pub fn is_dial(
    m: &Model,
    dial: &DialFamily,
) -> Result<Result<(), Vec<DialViolation>>, KripkeError> {
    let scope = dial.scope_set(m)?;
    let exts: Vec<FixedBitSet> = dial.statements.iter().map(|d| m.extension(d)).collect();
    let mut out = Vec::new();
    for u in scope.ones() {
        let values: Vec<usize> = (0..exts.len()).filter(|&i| exts[i].contains(u)).collect();
        if values.len() != 1 {
            out.push(DialViolation::NotExactlyOne {
                world: m.world_id(u).to_string(),
                values,
            });
        }
        let reach = m.frame().reachable(u);
        for (i, e) in exts.iter().enumerate() {
            if reach.is_disjoint(e) {
                out.push(DialViolation::Unreachable {
                    world: m.world_id(u).to_string(),
                    value: i,
                });
            }
        }
    }
    Ok(if out.is_empty() { Ok(()) } else { Err(out) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SwitchViolation {
    NotASwitch {
        statement: String,
        violation: Violation,
    },
    /// `pattern[i]` is the required truth value of switch `i`.
    PatternUnreachable { world: String, pattern: Vec<bool> },
}

impl std::fmt::Display for SwitchViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SwitchViolation::NotASwitch {
                statement,
                violation,
            } => {
                write!(
                    f,
                    "{statement} is not a switch: {} at {}",
                    violation.reason, violation.world
                )
            }
            SwitchViolation::PatternUnreachable { world, pattern } => {
                write!(f, "pattern {pattern:?} is not reachable from {world}")
            }
        }
    }
}

/// Pattern `j` of `k` switches; switch 0 is the most significant bit.
fn pattern_bit(j: usize, i: usize, k: usize) -> bool {
    j >> (k - 1 - i) & 1 == 1
}

/// From every world reachable from `w`, every truth pattern of `ss` holds
/// at some reachable world.
pub fn independent_switches(
    m: &Model,
    w: &str,
    ss: &[PropFormula],
) -> Result<Result<(), SwitchViolation>, KripkeError> {
    let wi = m.world_index(w)?;
    if ss.len() > MAX_SWITCHES {
        return Err(KripkeError::CapExceeded {
            what: "switches",
            got: ss.len(),
            cap: MAX_SWITCHES,
        });
    }
    for s in ss {
        if let Some(violation) = switch_violation(m, wi, s) {
            return Ok(Err(SwitchViolation::NotASwitch {
                statement: s.render(),
                violation,
            }));
        }
    }
    let k = ss.len();
    let exts: Vec<FixedBitSet> = ss.iter().map(|s| m.extension(s)).collect();
    let pattern_of = |u: usize| (0..k).fold(0usize, |p, i| p << 1 | exts[i].contains(u) as usize);
    let patterns: Vec<usize> = (0..m.len()).map(pattern_of).collect();
    for u in m.frame().reachable(wi).ones() {
        let mut seen = vec![false; 1 << k];
        for v in m.frame().reachable(u).ones() {
            seen[patterns[v]] = true;
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            let pattern = (0..k).map(|i| pattern_bit(j, i, k)).collect();
            return Ok(Err(SwitchViolation::PatternUnreachable {
                world: m.world_id(u).to_string(),
                pattern,
            }));
        }
    }
    Ok(Ok(()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ButtonViolation {
    NotAButton {
        statement: String,
        violation: Violation,
    },
    NoUnpushedWorld,
    /// From `world` no reachable world pushes `button` alone and shows
    /// dial value `value`.
    CannotPush {
        world: String,
        button: usize,
        value: usize,
    },
}

impl std::fmt::Display for ButtonViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ButtonViolation::NotAButton {
                statement,
                violation,
            } => {
                write!(
                    f,
                    "{statement} is not a button: {} at {}",
                    violation.reason, violation.world
                )
            }
            ButtonViolation::NoUnpushedWorld => write!(f, "no world has every button unpushed"),
            ButtonViolation::CannotPush {
                world,
                button,
                value,
            } => {
                write!(
                    f,
                    "from {world}, button {button} cannot be pushed alone with dial value {value}"
                )
            }
        }
    }
}

/// (i) some world has every button unpushed; (ii) from every scope world,
/// for every unpushed button and dial value, some reachable world pushes
/// that button, leaves the other unpushed buttons unpushed, and shows the
/// dial value.
pub fn independent_buttons_dial(
    m: &Model,
    bs: &[PropFormula],
    dial: &DialFamily,
) -> Result<Result<(), ButtonViolation>, KripkeError> {
    if bs.len() > MAX_BUTTONS {
        return Err(KripkeError::CapExceeded {
            what: "buttons",
            got: bs.len(),
            cap: MAX_BUTTONS,
        });
    }
    if dial.len() > MAX_DIAL {
        return Err(KripkeError::CapExceeded {
            what: "dial values",
            got: dial.len(),
            cap: MAX_DIAL,
        });
    }
    let mut pushed = Vec::new();
    for b in bs {
        match button_status(m, b) {
            Ok(p) => pushed.push(p),
            Err(violation) => {
                return Ok(Err(ButtonViolation::NotAButton {
                    statement: b.render(),
                    violation,
                }))
            }
        }
    }
    let scope = dial.scope_set(m)?;
    let dials: Vec<FixedBitSet> = dial.statements.iter().map(|d| m.extension(d)).collect();
    let state = |u: usize| (0..bs.len()).fold(0u32, |s, i| s | (pushed[i].contains(u) as u32) << i);
    let states: Vec<u32> = (0..m.len()).map(state).collect();
    if !states.contains(&0) {
        return Ok(Err(ButtonViolation::NoUnpushedWorld));
    }
    for u in scope.ones() {
        let reach = m.frame().reachable(u);
        let here = states[u];
        for b in (0..bs.len()).filter(|b| here >> b & 1 == 0) {
            // the other unpushed buttons must stay unpushed
            let others = !here & !(1 << b);
            for (value, d) in dials.iter().enumerate() {
                let ok = reach
                    .ones()
                    .any(|v| states[v] >> b & 1 == 1 && states[v] & others == 0 && d.contains(v));
                if !ok {
                    return Ok(Err(ButtonViolation::CannotPush {
                        world: m.world_id(u).to_string(),
                        button: b,
                        value,
                    }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// A substitution together with a world at which the substituted formula
/// was checked to be false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessResult {
    pub substitution: Substitution,
    pub world: String,
}

fn countermodel(f: &PropFormula, t: Theory, cap: usize) -> Result<(Model, usize), ControlError> {
    match decide(f, t, cap) {
        Verdict::Valid { .. } => Err(ControlError::ValidInTheory {
            formula: f.render(),
            theory: t,
        }),
        Verdict::Inconclusive { cap } => Err(ControlError::Undecided {
            formula: f.render(),
            theory: t,
            cap,
        }),
        Verdict::Countermodel { model, world } => {
            let w = model
                .world_index(&world)
                .expect("verdict names a world of its model");
            Ok((model, w))
        }
    }
}

/// Labels the worlds of an S5 countermodel to `f` by groups of switch
/// patterns and returns the resulting substitution with a world of `m`,
/// reachable from `w`, where the instance fails.
pub fn s5_cap_witness(
    m: &Model,
    w: &str,
    ss: &[PropFormula],
    f: &PropFormula,
) -> Result<WitnessResult, ControlError> {
    if let Err(v) = independent_switches(m, w, ss)? {
        return Err(ControlError::NotIndependentSwitches(v));
    }
    let k = ss.len();
    let patterns = 1usize << k;
    let (cm, fw) = countermodel(f, Theory::S5, DEFAULT_CAP.max(patterns))?;
    let c = cm.len();
    if c > patterns {
        return Err(ControlError::TooFewControls {
            what: "switch patterns",
            needed: c,
            have: patterns,
        });
    }
    // pattern j labels cluster world min(j, c - 1)
    let group = |j: usize| j.min(c - 1);
    let conj = |j: usize| {
        PropFormula::conjunction((0..k).map(|i| {
            if pattern_bit(j, i, k) {
                ss[i].clone()
            } else {
                PropFormula::not(ss[i].clone())
            }
        }))
    };
    let mut sigma = Substitution::new();
    for a in f.atoms() {
        let parts = (0..patterns).filter(|&j| cm.atoms_at(group(j)).contains(&a));
        let all = (0..patterns).all(|j| cm.atoms_at(group(j)).contains(&a));
        let value = if all {
            PropFormula::True
        } else {
            PropFormula::disjunction(parts.map(conj))
        };
        sigma.insert(a, value);
    }
    let instance = f.substitute(&sigma);
    let exts: Vec<FixedBitSet> = ss.iter().map(|s| m.extension(s)).collect();
    let wi = m.world_index(w)?;
    let target = m.frame().reachable(wi).ones().find(|&u| {
        let j = (0..k).fold(0usize, |p, i| p << 1 | exts[i].contains(u) as usize);
        group(j) == fw
    });
    certify(m, target, &instance, sigma)
}

fn certify(
    m: &Model,
    target: Option<usize>,
    instance: &PropFormula,
    substitution: Substitution,
) -> Result<WitnessResult, ControlError> {
    match target {
        Some(u) if !m.holds_at(u, instance) => Ok(WitnessResult {
            substitution,
            world: m.world_id(u).to_string(),
        }),
        _ => Err(ControlError::CertificationFailed {
            instance: instance.render(),
        }),
    }
}

/// Clusters of a rooted preorder listed bottom to top, when they form a
/// chain; each cluster lists its worlds in index order.
fn chain_of_clusters(fr: &Frame) -> Option<Vec<Vec<usize>>> {
    let n = fr.len();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut placed = vec![false; n];
    for i in 0..n {
        if placed[i] {
            continue;
        }
        let c: Vec<usize> = (0..n)
            .filter(|&j| fr.accesses(i, j) && fr.accesses(j, i))
            .collect();
        for &j in &c {
            placed[j] = true;
        }
        clusters.push(c);
    }
    // in a chain each cluster sees exactly those at or above it
    let seen = |c: &[usize]| (0..n).filter(|&j| fr.accesses(c[0], j)).count();
    clusters.sort_by_key(|c| std::cmp::Reverse(seen(c)));
    let mut above = n;
    for c in &clusters {
        if seen(c) != above {
            return None;
        }
        let ok = clusters
            .iter()
            .all(|d| fr.accesses(c[0], d[0]) == (seen(d) <= above));
        if !ok {
            return None;
        }
        above -= c.len();
    }
    Some(clusters)
}

/// Chains of clusters with at most `levels` levels of width at most
/// `width`, searched for a model falsifying `f` at the bottom.
fn search_chain(f: &PropFormula, levels: usize, width: usize) -> Option<(Model, usize)> {
    const MAX_WORLDS: usize = 6;
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    for total in 1..=MAX_WORLDS {
        if total * atoms.len() > 16 {
            break;
        }
        let mut shapes = Vec::new();
        compositions(total, width, levels, &mut Vec::new(), &mut shapes);
        for shape in shapes {
            let mut level_of = Vec::new();
            for (l, &c) in shape.iter().enumerate() {
                level_of.extend(std::iter::repeat(l).take(c));
            }
            let pairs: Vec<(usize, usize)> = (0..total)
                .flat_map(|i| (0..total).map(move |j| (i, j)))
                .filter(|&(i, j)| level_of[i] <= level_of[j])
                .collect();
            let fr = Frame::from_index_pairs(total, pairs);
            for val in 0u64..1 << (total * atoms.len()) {
                let valuation = (0..total)
                    .map(|wld| {
                        (0..atoms.len())
                            .filter(|a| val >> (wld * atoms.len() + a) & 1 == 1)
                            .map(|a| atoms[a].clone())
                            .collect()
                    })
                    .collect();
                let model = Model::from_indexed(fr.clone(), valuation);
                if !model.holds_at(0, f) {
                    return Some((model, 0));
                }
            }
        }
    }
    None
}

fn compositions(
    total: usize,
    width: usize,
    levels: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if total == 0 {
        out.push(prefix.clone());
        return;
    }
    if prefix.len() == levels {
        return;
    }
    for c in 1..=width.min(total) {
        prefix.push(c);
        compositions(total - c, width, levels, prefix, out);
        prefix.pop();
    }
}

/// Subsets of `0..n` of size `k`, as bitmasks in ascending order.
fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..1 << n).filter(move |s| s.count_ones() as usize == k)
}

/// Labels the levels of a chain-of-clusters S4.2 countermodel to `f` by the
/// number of pushed buttons and positions inside a level by dial values;
/// returns the substitution with a world of `m`, reachable from `w`, where
/// the instance fails.
pub fn s42_cap_witness(
    m: &Model,
    w: &str,
    bs: &[PropFormula],
    dial: &DialFamily,
    f: &PropFormula,
) -> Result<WitnessResult, ControlError> {
    if let Err(v) = independent_buttons_dial(m, bs, dial)? {
        return Err(ControlError::NotIndependentButtons(v));
    }
    let wi = m.world_index(w)?;
    let nb = bs.len();
    let nd = dial.len();
    let (cm, fw) = countermodel(f, Theory::S4_2, DEFAULT_CAP)?;
    let fw_id = cm.world_id(fw).to_string();
    let cm = cm.generated(fw);
    let fw = cm
        .world_index(&fw_id)
        .expect("generated keeps the failing world");
    let fits = |cl: &Vec<Vec<usize>>| cl.len() <= nb + 1 && cl.iter().all(|c| c.len() <= nd);
    let (cm, fw, clusters) = match chain_of_clusters(cm.frame()) {
        Some(cl) if fits(&cl) => (cm, fw, cl),
        shape => {
            let found = search_chain(f, nb + 1, nd);
            let Some((cm, fw)) = found else {
                return Err(match shape {
                    Some(cl) if cl.len() > nb + 1 => ControlError::TooFewControls {
                        what: "buttons",
                        needed: cl.len() - 1,
                        have: nb,
                    },
                    Some(cl) => ControlError::TooFewControls {
                        what: "dial values",
                        needed: cl.iter().map(Vec::len).max().unwrap_or(1),
                        have: nd,
                    },
                    None => ControlError::NoChainCountermodel {
                        buttons: nb,
                        dial: nd,
                    },
                });
            };
            let cl = chain_of_clusters(cm.frame()).expect("searched frames are chains");
            (cm, fw, cl)
        }
    };
    let levels = clusters.len();
    let fr = m.frame();
    // a persistent button reads directly, otherwise through []
    let pushed_expr: Vec<PropFormula> = bs
        .iter()
        .map(|b| {
            let ext = m.extension(b);
            if fr.box_of(&ext) == ext {
                b.clone()
            } else {
                PropFormula::necessarily(b.clone())
            }
        })
        .collect();
    let count_expr = |level: usize| {
        let top = level + 1 == levels;
        PropFormula::disjunction(subsets_of_size(nb, level).map(|s| {
            PropFormula::conjunction((0..nb).filter_map(|i| {
                if s >> i & 1 == 1 {
                    Some(pushed_expr[i].clone())
                } else if top {
                    None
                } else {
                    Some(PropFormula::not(pushed_expr[i].clone()))
                }
            }))
        }))
    };
    let position_expr = |level: usize, pos: usize| {
        let width = clusters[level].len();
        if width == 1 {
            PropFormula::True
        } else if pos + 1 < width {
            dial.statements[pos].clone()
        } else {
            PropFormula::disjunction(dial.statements[pos..].iter().cloned())
        }
    };
    let mut label = vec![PropFormula::True; cm.len()];
    let mut level_of = vec![0; cm.len()];
    let mut position_of = vec![0; cm.len()];
    for (l, c) in clusters.iter().enumerate() {
        for (p, &u) in c.iter().enumerate() {
            label[u] = PropFormula::and_simplified(count_expr(l), position_expr(l, p));
            level_of[u] = l;
            position_of[u] = p;
        }
    }
    let mut sigma = Substitution::new();
    for a in f.atoms() {
        let holders: Vec<usize> = (0..cm.len())
            .filter(|&u| cm.atoms_at(u).contains(&a))
            .collect();
        let value = if holders.len() == cm.len() {
            PropFormula::True
        } else {
            PropFormula::disjunction(holders.iter().map(|&u| label[u].clone()))
        };
        sigma.insert(a, value);
    }
    let instance = f.substitute(&sigma);
    let scope = dial.scope_set(m)?;
    let unpushed = {
        let mut s = FixedBitSet::with_capacity(m.len());
        s.insert_range(..);
        for e in &pushed_expr {
            s.difference_with(&m.extension(e));
        }
        s
    };
    let start = m.extension(&position_expr(level_of[fw], position_of[fw]));
    let target = fr
        .reachable(wi)
        .ones()
        .filter(|&u| unpushed.contains(u) && scope.contains(u) && start.contains(u))
        .find(|&u| !m.holds_at(u, &instance));
    certify(m, target, &instance, sigma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpReport {
    pub world: String,
    pub checked: usize,
    /// First pool formula `g` with `<>[]g -> g` false at the world.
    pub violation: Option<MpViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpViolation {
    pub formula: String,
    pub instance: String,
}

impl MpReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `<>[]g -> g` at `w` for one representative `g` of every
/// extension generated from `pool` up to `depth`.
pub fn mp_check(
    m: &Model,
    w: &str,
    pool: &[PropFormula],
    depth: usize,
) -> Result<MpReport, KripkeError> {
    let wi = m.world_index(w)?;
    let entries = pool_closure(m, pool, depth)?;
    let fr = m.frame();
    let violation = entries
        .iter()
        .find(|e| !e.ext.contains(wi) && fr.diamond_of(&fr.box_of(&e.ext)).contains(wi));
    Ok(MpReport {
        world: w.to_string(),
        checked: entries.len(),
        violation: violation.map(|e| MpViolation {
            formula: e.formula.render(),
            instance: PropFormula::implies(
                PropFormula::diamond(PropFormula::necessarily(e.formula.clone())),
                e.formula.clone(),
            )
            .render(),
        }),
    })
}

/// Worlds `l{level}p{pattern}` for every pattern of `n` switches and every
/// level below `depth`, level-major; `w R u` iff `level(w) <= level(u)`.
/// Atom `s{i}` is bit `i` of the pattern, switch 0 most significant.
pub fn make_switch_model(n: usize, depth: usize) -> Result<Model, KripkeError> {
    if n > MAX_SWITCHES {
        return Err(KripkeError::CapExceeded {
            what: "switches",
            got: n,
            cap: MAX_SWITCHES,
        });
    }
    if depth == 0 || depth > MAX_LEVELS {
        return Err(KripkeError::CapExceeded {
            what: "levels",
            got: depth,
            cap: MAX_LEVELS,
        });
    }
    let patterns = 1usize << n;
    let worlds: Vec<(usize, usize)> = (0..depth)
        .flat_map(|l| (0..patterns).map(move |p| (l, p)))
        .collect();
    let ids: Vec<String> = worlds.iter().map(|(l, p)| format!("l{l}p{p}")).collect();
    let pairs = (0..worlds.len())
        .flat_map(|i| (0..worlds.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| worlds[i].0 <= worlds[j].0)
        .map(|(i, j)| (ids[i].clone(), ids[j].clone()));
    let frame = Frame::new(ids.iter().cloned(), pairs)?;
    let valuation = worlds
        .iter()
        .zip(&ids)
        .map(|((_, p), id)| {
            (
                id.clone(),
                (0..n)
                    .filter(|&i| pattern_bit(*p, i, n))
                    .map(|i| format!("s{i}"))
                    .collect(),
            )
        })
        .collect();
    Model::new(frame, valuation)
}

/// Worlds `P{set}d{value}l{level}` for every set of `nb` buttons, dial
/// value below `nd` and level below `depth`; accessibility grows the button
/// set and the level and leaves the dial free. Atom `b{i}` holds when button
/// `i` is in the set and `d{j}` when the dial shows `j`.
pub fn make_button_dial_model(nb: usize, nd: usize, depth: usize) -> Result<Model, KripkeError> {
    if nb > MAX_BUTTONS {
        return Err(KripkeError::CapExceeded {
            what: "buttons",
            got: nb,
            cap: MAX_BUTTONS,
        });
    }
    if nd == 0 || nd > MAX_DIAL {
        return Err(KripkeError::CapExceeded {
            what: "dial values",
            got: nd,
            cap: MAX_DIAL,
        });
    }
    if depth == 0 || depth > MAX_LEVELS {
        return Err(KripkeError::CapExceeded {
            what: "levels",
            got: depth,
            cap: MAX_LEVELS,
        });
    }
    let mut worlds = Vec::new();
    for level in 0..depth {
        for set in 0u32..1 << nb {
            for d in 0..nd {
                worlds.push((set, d, level));
            }
        }
    }
    let ids: Vec<String> = worlds
        .iter()
        .map(|(s, d, l)| format!("P{s}d{d}l{l}"))
        .collect();
    let pairs = (0..worlds.len())
        .flat_map(|i| (0..worlds.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| worlds[i].0 & !worlds[j].0 == 0 && worlds[i].2 <= worlds[j].2)
        .map(|(i, j)| (ids[i].clone(), ids[j].clone()));
    let frame = Frame::new(ids.iter().cloned(), pairs)?;
    let valuation = worlds
        .iter()
        .zip(&ids)
        .map(|((s, d, _), id)| {
            let atoms = (0..nb)
                .filter(|i| s >> i & 1 == 1)
                .map(|i| format!("b{i}"))
                .chain([format!("d{d}")]);
            (id.clone(), atoms.collect())
        })
        .collect();
    Model::new(frame, valuation)
}
