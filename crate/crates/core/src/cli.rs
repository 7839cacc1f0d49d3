//! Command-line front end.
//!
//! Every subcommand prints one JSON document on stdout and human-readable
//! notes on stderr. Exit codes: 0 valid, true or success; 1 countermodel or
//! false; 2 usage, parse or input error; 3 inconclusive or cap exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::controls::{self, ControlError, DialFamily};
use crate::formula::{FoFormula, ParseError, PropFormula};
use crate::kripke::{
    enumerate_frames, FrameProperty, FrameValidity, KripkeError, Model, ModelFile, ModelFileError,
    DEFAULT_ATOM_CAP, DEFAULT_ENUMERATION_CAP,
};
use crate::multiverse::{self, MultiverseError, ToySystem};
use crate::theories::{self, Theory, Verdict, DEFAULT_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "potentialist",
    version,
    about = "Modal logic of potentialist systems"
)]
struct Cli {
    /// Bound on every search (worlds for decide, frame size for sweeps).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Suppress diagnostics on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// JSON output (the default and only mode).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a formula in K, S4, S4.2 or S5.
    Decide {
        #[arg(long, short)]
        theory: Theory,
        /// Write a Graphviz description of the countermodel.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the countermodel as a model file.
        #[arg(long)]
        model_out: Option<PathBuf>,
        formula: String,
    },
    /// Truth of a formula at a world of a model.
    ModelCheck {
        model: PathBuf,
        world: String,
        formula: String,
    },
    /// Frame properties of a model's frame, or frame validity of a formula.
    FrameCheck {
        model: PathBuf,
        /// Properties to check (all when omitted).
        #[arg(long, value_delimiter = ',')]
        property: Vec<FrameProperty>,
        /// Check frame validity of this formula instead.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Compare frame validity of a formula with a frame property over all
    /// small frames of a class.
    FramesSweep {
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        #[arg(long, default_value = "<>[]p -> []<>p")]
        formula: String,
        #[arg(long, value_delimiter = ',', default_value = "reflexive,transitive")]
        class: Vec<FrameProperty>,
        #[arg(long, default_value = "directed")]
        property: FrameProperty,
    },
    /// Switches, buttons and dials.
    #[command(subcommand)]
    Controls(ControlsCommand),
    /// The finite multiverse of hereditarily finite sets.
    #[command(subcommand)]
    Multiverse(MultiverseCommand),
    /// Which axiom instances over a pool hold on a model.
    Fingerprint {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        pool: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Exit 1 unless every axiom of this theory is validated.
        #[arg(long, short)]
        theory: Option<Theory>,
    },
}

#[derive(Args, Debug)]
struct DialArgs {
    /// Dial statements, in value order.
    #[arg(long, value_delimiter = ',')]
    dial: Vec<String>,
    /// Worlds on which the dial is asserted (all when omitted).
    #[arg(long, value_delimiter = ',')]
    scope: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum ControlsCommand {
    /// Classify a statement as switch, button or neither.
    Classify {
        model: PathBuf,
        world: String,
        statement: String,
    },
    /// Check that statements form a dial.
    Dial {
        model: PathBuf,
        #[arg(long, value_delimiter = ',')]
        scope: Option<Vec<String>>,
        #[arg(required = true)]
        statements: Vec<String>,
    },
    /// Independence of a switch family at a world, or of a button family
    /// together with a dial.
    Independent {
        model: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            required_unless_present = "buttons",
            conflicts_with = "buttons",
            requires = "world"
        )]
        switches: Option<Vec<String>>,
        /// Reference world for switches.
        #[arg(long)]
        world: Option<String>,
        #[arg(long, value_delimiter = ',')]
        buttons: Option<Vec<String>>,
        #[command(flatten)]
        dial: DialArgs,
    },
    /// A substitution of switch combinations under which a non-S5 formula
    /// fails.
    S5Witness {
        model: PathBuf,
        world: String,
        #[arg(long, value_delimiter = ',', required = true)]
        switches: Vec<String>,
        formula: String,
    },
    /// A substitution of button and dial combinations under which a
    /// non-S4.2 formula fails.
    S42Witness {
        model: PathBuf,
        world: String,
        #[arg(long, value_delimiter = ',', required = true)]
        buttons: Vec<String>,
        #[command(flatten)]
        dial: DialArgs,
        formula: String,
    },
    /// Check the maximality principle at a world over a formula pool.
    Mp {
        model: PathBuf,
        world: String,
        #[arg(long, value_delimiter = ',', required = true)]
        pool: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MultiverseCommand {
    /// Build the toy system and write it as JSON.
    Build {
        #[arg(long)]
        max_height: usize,
        #[arg(long, value_delimiter = ',')]
        multipliers: Vec<usize>,
        /// Number of multiples in each button set.
        #[arg(long = "K", visible_alias = "k", default_value_t = 3)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare top-world truth with potentialist truth for a corpus of
    /// first-order formulas, one per line.
    Corollary { system: PathBuf, corpus: PathBuf },
    /// Check that accessibility is a directed preorder reaching every set.
    Account { system: PathBuf },
    /// Read a Kripke model off the system.
    Induce {
        system: PathBuf,
        /// JSON object mapping atom names to observables or sentences.
        #[arg(long)]
        atoms: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a subcommand produced: the stdout document, the exit code and an
/// optional note for stderr.
struct Outcome {
    doc: Value,
    code: i32,
    note: Option<String>,
}

impl Outcome {
    fn new(doc: impl Serialize, code: i32) -> Self {
        Outcome {
            doc: serde_json::to_value(doc).expect("serializable"),
            code,
            note: None,
        }
    }

    fn verdict(doc: impl Serialize, ok: bool) -> Self {
        Outcome::new(doc, if ok { EXIT_OK } else { EXIT_FALSE })
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<KripkeError> for Failure {
    fn from(e: KripkeError) -> Self {
        let code = if matches!(e, KripkeError::CapExceeded { .. }) {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::usage(e)
    }
}

impl From<ModelFileError> for Failure {
    fn from(e: ModelFileError) -> Self {
        match e {
            ModelFileError::Kripke(k) => k.into(),
            e => Failure::usage(e),
        }
    }
}

impl From<MultiverseError> for Failure {
    fn from(e: MultiverseError) -> Self {
        match e {
            MultiverseError::Kripke(k) => k.into(),
            e => Failure::usage(e),
        }
    }
}

impl From<ControlError> for Failure {
    fn from(e: ControlError) -> Self {
        let code = match &e {
            ControlError::Kripke(k) => return k.clone().into(),
            ControlError::NotIndependentSwitches(_)
            | ControlError::NotIndependentButtons(_)
            | ControlError::ValidInTheory { .. }
            | ControlError::TooFewControls { .. } => EXIT_FALSE,
            ControlError::Undecided { .. }
            | ControlError::NoChainCountermodel { .. }
            | ControlError::CertificationFailed { .. } => EXIT_INCONCLUSIVE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Res = Result<Outcome, Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code. Never panics on malformed input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let quiet = cli.quiet;
    match dispatch(cli) {
        Ok(out) => {
            // a closed pipe is not an error of ours
            let _ = writeln!(
                std::io::stdout().lock(),
                "{}",
                serde_json::to_string_pretty(&out.doc).expect("serializable")
            );
            if let (Some(note), false) = (out.note, quiet) {
                eprintln!("{note}");
            }
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> Res {
    let cap = cli.cap;
    match cli.command {
        Command::Decide {
            theory,
            dot,
            model_out,
            formula,
        } => decide(
            theory,
            cap.unwrap_or(DEFAULT_CAP),
            dot.as_deref(),
            model_out.as_deref(),
            &formula,
        ),
        Command::ModelCheck {
            model,
            world,
            formula,
        } => {
            let m = ModelFile::load(&model)?;
            let f = prop(&formula)?;
            let holds = m.model_check(&world, &f)?;
            Ok(Outcome::verdict(
                json!({"world": world, "formula": f.render(), "holds": holds}),
                holds,
            ))
        }
        Command::FrameCheck {
            model,
            property,
            formula,
        } => frame_check(&model, property, formula.as_deref()),
        Command::FramesSweep {
            max_worlds,
            formula,
            class,
            property,
        } => frames_sweep(
            max_worlds,
            cap.unwrap_or(DEFAULT_ENUMERATION_CAP),
            &formula,
            &class,
            property,
        ),
        Command::Controls(c) => controls_cmd(c),
        Command::Multiverse(c) => multiverse_cmd(c),
        Command::Fingerprint {
            model,
            pool,
            depth,
            theory,
        } => {
            let m = ModelFile::load(&model)?;
            let pool = props(&pool)?;
            let report = theories::logic_fingerprint(&m, &pool, depth)?;
            let ok = theory.is_none_or(|t| report.validates(t));
            let note = format!("{} representatives", report.representatives);
            Ok(Outcome::verdict(report, ok).note(note))
        }
    }
}

fn prop(s: &str) -> Result<PropFormula, Failure> {
    Ok(s.parse::<PropFormula>()?)
}

fn props(ss: &[String]) -> Result<Vec<PropFormula>, Failure> {
    ss.iter().map(|s| prop(s)).collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn decide(
    theory: Theory,
    cap: usize,
    dot: Option<&Path>,
    model_out: Option<&Path>,
    text: &str,
) -> Res {
    let f = prop(text)?;
    let base = json!({"theory": theory.name(), "formula": f.render()});
    let with = |extra: Value| {
        let mut doc = base.clone();
        doc.as_object_mut()
            .expect("object")
            .extend(extra.as_object().expect("object").clone());
        doc
    };
    Ok(match theories::decide(&f, theory, cap) {
        Verdict::Valid { bound } => {
            Outcome::new(with(json!({"verdict": "Valid", "bound": bound})), EXIT_OK)
                .note(format!("valid in {theory}"))
        }
        Verdict::Countermodel { model, world } => {
            if let Some(p) = model_out {
                write(p, &ModelFile::to_json(&model))?;
            }
            if let Some(p) = dot {
                write(p, &to_dot(&model, &world))?;
            }
            let note = format!("countermodel of size {}, false at {world}", model.len());
            let doc = with(
                json!({"verdict": "Countermodel", "world": world, "model": ModelFile::from_model(&model)}),
            );
            Outcome::new(doc, EXIT_FALSE).note(note)
        }
        Verdict::Inconclusive { cap } => Outcome::new(
            with(json!({"verdict": "Inconclusive", "cap": cap})),
            EXIT_INCONCLUSIVE,
        )
        .note(format!("no verdict within {cap} worlds")),
    })
}

/// Graphviz digraph of a model; the marked world is drawn doubled.
pub fn to_dot(m: &Model, marked: &str) -> String {
    let mut s = String::from("digraph model {\n");
    for i in 0..m.len() {
        let id = m.world_id(i);
        let atoms: Vec<&str> = m.atoms_at(i).iter().map(String::as_str).collect();
        let shape = if id == marked {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            s,
            "  \"{id}\" [shape={shape}, label=\"{id}\\n{}\"];",
            atoms.join(",")
        );
    }
    for (a, b) in m.frame().pairs() {
        let _ = writeln!(s, "  \"{a}\" -> \"{b}\";");
    }
    s.push_str("}\n");
    s
}

fn frame_check(model: &Path, property: Vec<FrameProperty>, formula: Option<&str>) -> Res {
    let m = ModelFile::load(model)?;
    if let Some(text) = formula {
        let f = prop(text)?;
        return Ok(match m.frame().valid(&f, DEFAULT_ATOM_CAP)? {
            FrameValidity::Valid => {
                Outcome::verdict(json!({"formula": f.render(), "valid": true}), true)
            }
            FrameValidity::Countermodel { model, world } => Outcome::verdict(
                json!({"formula": f.render(), "valid": false, "world": world, "model": ModelFile::from_model(&model)}),
                false,
            ),
        });
    }
    let props = if property.is_empty() {
        FrameProperty::ALL.to_vec()
    } else {
        property
    };
    let results: Vec<Value> = props
        .iter()
        .map(|&p| match m.frame().check_property(p) {
            Ok(()) => json!({"property": p, "holds": true}),
            Err(w) => json!({"property": p, "holds": false, "witness": w.worlds}),
        })
        .collect();
    let ok = results.iter().all(|r| r["holds"] == true);
    Ok(Outcome::verdict(json!({ "properties": results }), ok))
}

#[derive(Serialize)]
struct SweepException {
    worlds: usize,
    relation: Vec<(String, String)>,
    valid: bool,
    property: bool,
}

fn frames_sweep(
    max_worlds: usize,
    cap: usize,
    text: &str,
    class: &[FrameProperty],
    property: FrameProperty,
) -> Res {
    let f = prop(text)?;
    let (mut frames, mut valid, mut with_property) = (0usize, 0usize, 0usize);
    let mut exceptions = Vec::new();
    for n in 1..=max_worlds {
        for fr in enumerate_frames(n, class, cap)? {
            let v = fr.valid(&f, DEFAULT_ATOM_CAP)?.is_valid();
            let p = fr.has_property(property);
            frames += 1;
            valid += v as usize;
            with_property += p as usize;
            if v != p {
                exceptions.push(SweepException {
                    worlds: n,
                    relation: fr.pairs(),
                    valid: v,
                    property: p,
                });
            }
        }
    }
    let ok = exceptions.is_empty();
    let note = format!("{frames} frames, {} exceptions", exceptions.len());
    let doc = json!({
        "formula": f.render(),
        "class": class,
        "property": property,
        "max_worlds": max_worlds,
        "frames": frames,
        "valid": valid,
        "with_property": with_property,
        "exceptions": exceptions,
    });
    Ok(Outcome::verdict(doc, ok).note(note))
}

fn dial_family(args: &DialArgs) -> Result<DialFamily, Failure> {
    let dial = if args.dial.is_empty() {
        DialFamily::trivial()
    } else {
        DialFamily::new(props(&args.dial)?)
    };
    Ok(match &args.scope {
        Some(s) => dial.with_scope(s.iter().cloned()),
        None => dial,
    })
}

fn controls_cmd(c: ControlsCommand) -> Res {
    match c {
        ControlsCommand::Classify {
            model,
            world,
            statement,
        } => {
            let m = ModelFile::load(&model)?;
            let report = controls::classify(&m, &world, &prop(&statement)?)?;
            let ok = report.is_switch() || report.is_button();
            Ok(Outcome::verdict(report, ok))
        }
        ControlsCommand::Dial {
            model,
            scope,
            statements,
        } => {
            let m = ModelFile::load(&model)?;
            let dial = dial_family(&DialArgs {
                dial: statements,
                scope,
            })?;
            let violations = controls::is_dial(&m, &dial)?.err().unwrap_or_default();
            let ok = violations.is_empty();
            Ok(Outcome::verdict(
                json!({"dial": ok, "violations": violations}),
                ok,
            ))
        }
        ControlsCommand::Independent {
            model,
            switches,
            world,
            buttons,
            dial,
        } => {
            let m = ModelFile::load(&model)?;
            if let Some(ss) = switches {
                let world = world.ok_or_else(|| Failure::usage("--switches needs --world"))?;
                let v = controls::independent_switches(&m, &world, &props(&ss)?)?.err();
                return Ok(Outcome::verdict(
                    json!({"independent": v.is_none(), "violation": v}),
                    v.is_none(),
                ));
            }
            let bs = props(&buttons.unwrap_or_default())?;
            let v = controls::independent_buttons_dial(&m, &bs, &dial_family(&dial)?)?.err();
            Ok(Outcome::verdict(
                json!({"independent": v.is_none(), "violation": v}),
                v.is_none(),
            ))
        }
        ControlsCommand::S5Witness {
            model,
            world,
            switches,
            formula,
        } => {
            let m = ModelFile::load(&model)?;
            let f = prop(&formula)?;
            let w = controls::s5_cap_witness(&m, &world, &props(&switches)?, &f)?;
            Ok(Outcome::new(witness_doc(&f, &w), EXIT_OK))
        }
        ControlsCommand::S42Witness {
            model,
            world,
            buttons,
            dial,
            formula,
        } => {
            let m = ModelFile::load(&model)?;
            let f = prop(&formula)?;
            let w =
                controls::s42_cap_witness(&m, &world, &props(&buttons)?, &dial_family(&dial)?, &f)?;
            Ok(Outcome::new(witness_doc(&f, &w), EXIT_OK))
        }
        ControlsCommand::Mp {
            model,
            world,
            pool,
            depth,
        } => {
            let m = ModelFile::load(&model)?;
            let report = controls::mp_check(&m, &world, &props(&pool)?, depth)?;
            let ok = report.holds();
            Ok(Outcome::verdict(report, ok))
        }
    }
}

fn witness_doc(f: &PropFormula, w: &controls::WitnessResult) -> Value {
    json!({
        "formula": f.render(),
        "substitution": w.substitution,
        "instance": f.substitute(&w.substitution).render(),
        "world": w.world,
    })
}

fn load_system(path: &Path) -> Result<ToySystem, Failure> {
    Ok(ToySystem::from_json(&read(path)?)?)
}

fn multiverse_cmd(c: MultiverseCommand) -> Res {
    match c {
        MultiverseCommand::Build {
            max_height,
            multipliers,
            k,
            out,
        } => {
            let sys = multiverse::make_toy_system(max_height, &multipliers, k)?;
            let note = format!("{} worlds", sys.len());
            match out {
                None => Ok(Outcome::new(
                    serde_json::from_str::<Value>(&sys.to_json()).expect("valid JSON"),
                    EXIT_OK,
                )
                .note(note)),
                Some(p) => {
                    write(&p, &sys.to_json())?;
                    let top = sys.top().map(|t| sys.world(t).id.clone());
                    Ok(
                        Outcome::new(json!({"worlds": sys.len(), "top": top, "out": p}), EXIT_OK)
                            .note(note),
                    )
                }
            }
        }
        MultiverseCommand::Corollary { system, corpus } => {
            let sys = load_system(&system)?;
            let corpus: Vec<FoFormula> = multiverse::parse_corpus(&read(&corpus)?)?;
            let report = multiverse::corollary_check(&sys, &corpus)?;
            let note = format!(
                "{} checks, {} violations",
                report.checks,
                report.violations.len()
            );
            let ok = report.holds();
            Ok(Outcome::verdict(report, ok).note(note))
        }
        MultiverseCommand::Account { system } => {
            let report = multiverse::account_check(&load_system(&system)?);
            let ok = report.holds();
            Ok(Outcome::verdict(report, ok))
        }
        MultiverseCommand::Induce { system, atoms, out } => {
            let sys = load_system(&system)?;
            let specs = multiverse::parse_atom_specs(&read(&atoms)?)?;
            let m = multiverse::induce_model(&sys, &specs)?;
            let file = ModelFile::from_model(&m);
            match out {
                None => Ok(Outcome::new(file, EXIT_OK)),
                Some(p) => {
                    write(&p, &ModelFile::to_json(&m))?;
                    Ok(Outcome::new(json!({"worlds": m.len(), "out": p}), EXIT_OK))
                }
            }
        }
    }
}
