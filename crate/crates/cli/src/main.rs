//! `dualis`: spectra, structure sheaves and Stone duality from the command line.
//!
//! Exit status is 0 when every check passes, 1 when a verification fails
//! and 2 on unreadable or malformed input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use dualis::fol::{
    basic_open_algebra_check, definable_sheaf, enumerate_models, groupoid, iso_invariance, morphism_stability,
    parse_fo, semantic_consequence, Budget, Convention, Definables, FoTheory, Verdict,
};
use dualis::io::{self, InputError};
use dualis::lattice_spec::{check_slice_equalizer, describe_lattice, sspec, verify_lattice_representation};
use dualis::order::{check_distributive, DistLattice, Distributivity, Lattice};
use dualis::prop::{heyting_validity, lindenbaum, parse_prop, stone_round_trip, stone_spec, PropTheory, Validity};
use dualis::report::Report;
use dualis::ring::{describe_ring, prime_spectrum, structure_sheaf, verify_representation};
use dualis::suite;

#[derive(Parser)]
#[command(name = "dualis", version, about = "Finite spectra, structure sheaves and Stone duality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// write the output to a file instead of stdout
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Emit::Text, global = true)]
    emit: Emit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Finite commutative rings
    #[command(subcommand)]
    Ring(RingCmd),
    /// Finite distributive lattices
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Propositional theories and finite Boolean algebras
    #[command(subcommand)]
    Stone(StoneCmd),
    /// Evaluate a propositional formula in a finite Heyting algebra
    #[command(subcommand)]
    Heyting(HeytingCmd),
    /// Finite models of first-order theories
    #[command(subcommand)]
    Fol(FolCmd),
    /// The acceptance suite
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Subcommand)]
enum RingCmd {
    /// Prime spectrum with its basic opens
    Spec { file: PathBuf },
    /// Structure sheaf on the basis of basic opens
    Sheaf { file: PathBuf },
    /// Stalks, global sections and the subdirect embedding
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Prime-ideal spectrum with its basic opens
    Sspec { file: PathBuf },
    /// Slice equalizer for every pair of elements
    Equalizer { file: PathBuf },
    /// Stalks, global sections, opens and equalizers
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum StoneCmd {
    /// Lindenbaum algebra: one class per set of models
    Lt { file: PathBuf },
    /// Stone space of the Lindenbaum algebra
    Spec { file: PathBuf },
    /// B against the clopens of its Stone space
    Roundtrip { file: PathBuf },
}

#[derive(Subcommand)]
enum HeytingCmd {
    /// Value of the formula under --assign, or validity over all valuations
    Eval {
        algebra: PathBuf,
        formula: String,
        /// `var=element`; repeatable
        #[arg(long)]
        assign: Vec<String>,
    },
}

#[derive(Args)]
struct FolArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=8))]
    max_size: u64,
}

#[derive(Args)]
struct GroupoidArgs {
    #[command(flatten)]
    fol: FolArgs,
    /// number of labels x0 .. x{k-1}
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(0..=4))]
    labels: u64,
    /// admit every isomorphism between models, ignoring labels
    #[arg(long)]
    all_isos: bool,
}

impl GroupoidArgs {
    fn convention(&self) -> Convention {
        if self.all_isos {
            Convention::AllIsos
        } else {
            Convention::LabelCompatible
        }
    }
}

#[derive(Subcommand)]
enum FolCmd {
    /// Models up to --max-size with their isomorphism classes
    Enumerate(FolArgs),
    /// The groupoid of labelled models; --depth also checks definable sets
    Groupoid {
        #[command(flatten)]
        g: GroupoidArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4))]
        depth: Option<u64>,
    },
    /// The basic open of a formula in the labels, and its stability
    Open {
        #[command(flatten)]
        g: GroupoidArgs,
        #[arg(long)]
        formula: String,
        /// a second formula for the lattice identities
        #[arg(long)]
        with: Option<String>,
    },
    /// The definable sheaf of a formula: its solution set in every model
    Stalk {
        #[command(flatten)]
        g: GroupoidArgs,
        #[arg(long)]
        formula: String,
    },
    /// Search for a countermodel of a sentence up to --max-size
    Consequence {
        #[command(flatten)]
        fol: FolArgs,
        #[arg(long)]
        formula: String,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Runs every acceptance criterion
    RunAll {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// print every report in full
        #[arg(long)]
        verbose: bool,
    },
}

/// What a command produced: text and whether its checks passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }

    fn report(r: &Report) -> Self {
        Outcome {
            text: r.render(),
            passed: r.passed(),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn input<E: std::fmt::Display>(what: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", what.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let code = match result {
        Ok(out) => {
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &out.text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    eprintln!("time: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}

fn read(path: &Path) -> Result<String, Failure> {
    Ok(io::read_file(path)?)
}

/// `input <path> sha256 <hex>` over the raw bytes.
fn digest_line(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(input(path))?;
    Ok(format!("input {} sha256 {:x}", path.display(), Sha256::digest(&bytes)))
}

fn with_digest(paths: &[&Path], emit: Emit, mut out: Outcome) -> Result<Outcome, Failure> {
    let mut head = String::new();
    for p in paths {
        let line = digest_line(p)?;
        match emit {
            Emit::Text => writeln!(head, "{line}"),
            Emit::Dot => writeln!(head, "// {line}"),
        }
        .expect("write to string");
    }
    out.text.insert_str(0, &head);
    Ok(out)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let emit = cli.emit;
    match &cli.command {
        Command::Ring(c) => {
            let file = match c {
                RingCmd::Spec { file } | RingCmd::Sheaf { file } | RingCmd::Verify { file } => file,
            };
            let a = io::read_ring(file).map_err(input(file))?;
            let out = match c {
                RingCmd::Spec { .. } => {
                    let s = prime_spectrum(&a);
                    match emit {
                        Emit::Dot => Outcome::ok(s.space.to_dot("Spec")),
                        Emit::Text => {
                            let mut t = format!("ring: {}\n", describe_ring(&a));
                            for (p, i) in s.ideals.iter().enumerate() {
                                writeln!(t, "point {} = {}", s.space.point_name(p), i.display(&a)).unwrap();
                            }
                            t.push_str(&s.space.to_text());
                            Outcome::ok(t)
                        }
                    }
                }
                RingCmd::Sheaf { .. } => {
                    let sh = structure_sheaf(&a).map_err(input(file))?;
                    match emit {
                        Emit::Dot => Outcome::ok(sh.spectrum.space.to_dot("Spec")),
                        Emit::Text => Outcome::ok(sh.presheaf.to_text()),
                    }
                }
                RingCmd::Verify { .. } => {
                    let rep = verify_representation(&a).map_err(input(file))?;
                    Outcome::report(&rep.to_report())
                }
            };
            with_digest(&[file], emit, out)
        }
        Command::Lattice(c) => {
            let file = match c {
                LatticeCmd::Sspec { file } | LatticeCmd::Equalizer { file } | LatticeCmd::Verify { file } => file,
            };
            let l = io::read_lattice(file).map_err(input(file))?;
            let out = match c {
                LatticeCmd::Equalizer { .. } => Outcome::report(&equalizer_report(&l)),
                _ => {
                    let d = distributive(&l).map_err(input(file))?;
                    match c {
                        LatticeCmd::Sspec { .. } => {
                            let s = sspec(&d).map_err(input(file))?;
                            match emit {
                                Emit::Dot => Outcome::ok(s.space.to_dot("SSpec")),
                                Emit::Text => Outcome::ok(format!("lattice: {}\n{}", describe_lattice(&l), s.sheaf.to_text())),
                            }
                        }
                        _ => {
                            let rep = verify_lattice_representation(&d).map_err(input(file))?;
                            Outcome::report(&rep.to_report())
                        }
                    }
                }
            };
            with_digest(&[file], emit, out)
        }
        Command::Stone(c) => {
            let file = match c {
                StoneCmd::Lt { file } | StoneCmd::Spec { file } | StoneCmd::Roundtrip { file } => file,
            };
            let t = PropTheory::parse(&read(file)?).map_err(input(file))?;
            let lt = lindenbaum(&t).map_err(input(file))?;
            let b = &lt.algebra;
            let out = match c {
                StoneCmd::Lt { .. } => {
                    let mut s = format!("Lindenbaum algebra: {} elements, {} models\n", b.len(), lt.models.len());
                    for (i, v) in lt.models.iter().enumerate() {
                        writeln!(s, "model {i}: {}", v.display(&t.vars)).unwrap();
                    }
                    for e in b.elements() {
                        writeln!(s, "{} = [{}]", b.name(e), lt.representative(e)).unwrap();
                    }
                    Outcome::ok(s)
                }
                StoneCmd::Spec { .. } => {
                    let sp = stone_spec(b);
                    let mut r = Report::new("Stone space");
                    for (p, name) in sp.space.point_names().iter().enumerate() {
                        let h: Vec<String> = b.elements().filter(|&x| sp.points[p][x]).map(|x| b.name(x).to_string()).collect();
                        r.info(format!("point {name}: true on {}", h.join(" ")));
                    }
                    r.check(
                        "homs to 2, ultrafilters and atoms agree",
                        sp.enumerations_agree,
                        format!("{} points", sp.points.len()),
                    );
                    match emit {
                        Emit::Dot => Outcome {
                            text: sp.space.to_dot("Spec"),
                            passed: r.passed(),
                        },
                        Emit::Text => {
                            let mut o = Outcome::report(&r);
                            o.text.push_str(&sp.space.to_text());
                            o
                        }
                    }
                }
                StoneCmd::Roundtrip { .. } => Outcome::report(&stone_round_trip(b).to_report(b)),
            };
            with_digest(&[file], emit, out)
        }
        Command::Heyting(HeytingCmd::Eval { algebra, formula, assign }) => {
            let h = io::read_heyting(algebra).map_err(input(algebra))?;
            let f = parse_prop(formula).map_err(|e| Failure::Input(format!("formula: {e}")))?;
            let mut values = BTreeMap::new();
            for a in assign {
                let (v, x) = a
                    .split_once('=')
                    .ok_or_else(|| Failure::Input(format!("--assign {a:?}: expected var=element")))?;
                let x = h
                    .index_of(x.trim())
                    .ok_or_else(|| Failure::Input(format!("--assign {a:?}: no element {x:?}")))?;
                values.insert(v.trim().to_string(), x);
            }
            let vars = f.variables();
            let out = if !values.is_empty() {
                if let Some(v) = vars.iter().find(|v| !values.contains_key(*v)) {
                    return Err(Failure::Input(format!("no value assigned to {v}")));
                }
                let x = f.eval_in(&h, &|name: &str| values[name]);
                Outcome::ok(format!("{f} = {}\n", h.name(x)))
            } else {
                match heyting_validity(&f, &h) {
                    Validity::Valid => Outcome::ok(format!("valid: {f} is top under all {} valuations\n", h.len().pow(vars.len() as u32))),
                    Validity::Counter { valuation, value } => {
                        let v: Vec<String> = valuation.iter().map(|(k, x)| format!("{k}={}", h.name(*x))).collect();
                        Outcome {
                            text: format!("not valid: {f} = {} at {}\n", h.name(value), v.join(" ")),
                            passed: false,
                        }
                    }
                }
            };
            with_digest(&[algebra], emit, out)
        }
        Command::Fol(c) => fol(c, emit),
        Command::Corpus(CorpusCmd::RunAll { seed, verbose }) => {
            let mut text = String::new();
            let mut passed = true;
            for id in suite::CRITERIA.iter().map(|c| c.0) {
                let c = suite::run(id, *seed).expect("listed criterion");
                if *verbose {
                    text.push_str(&c.report.render());
                }
                writeln!(text, "{}", c.summary()).unwrap();
                passed &= c.passed();
            }
            Ok(Outcome { text, passed })
        }
    }
}

fn distributive(l: &Lattice) -> Result<DistLattice, String> {
    if let Distributivity::Violated { x, y, z } = check_distributive(l) {
        return Err(format!(
            "not distributive: {x} ^ ({y} v {z}) != ({x} ^ {y}) v ({x} ^ {z})",
            x = l.name(x),
            y = l.name(y),
            z = l.name(z)
        ));
    }
    DistLattice::new(l.clone()).map_err(|e| e.to_string())
}

fn equalizer_report(l: &Lattice) -> Report {
    let mut r = Report::new(format!("slice equalizers: {}", describe_lattice(l)));
    for p in l.elements() {
        for q in l.elements() {
            let e = check_slice_equalizer(l, p, q);
            r.check(
                format!("p={} q={}", l.name(p), l.name(q)),
                e.holds(),
                format!("{} elements below p v q, {} matching pairs", e.domain, e.matched_pairs),
            );
        }
    }
    r
}

fn budget() -> Result<Budget, Failure> {
    Budget::from_env().map_err(Failure::Input)
}

fn theory(path: &Path) -> Result<FoTheory, Failure> {
    parse_fo(&read(path)?).map_err(input(path))
}

fn fol(c: &FolCmd, emit: Emit) -> Result<Outcome, Failure> {
    match c {
        FolCmd::Enumerate(a) => {
            let t = theory(&a.file)?;
            let ms = enumerate_models(&t, a.max_size as usize, budget()?).map_err(input(&a.file))?;
            let mut s = format!(
                "{} models up to size {}, {} isomorphism classes\n",
                ms.len(),
                a.max_size,
                ms.representatives.len()
            );
            for (i, m) in ms.models.iter().enumerate() {
                let flag = if ms.is_representative(i) { " *" } else { "" };
                writeln!(s, "M{i} class {}{flag}: {}", ms.class_of[i], m.to_text()).unwrap();
            }
            with_digest(&[&a.file], emit, Outcome::ok(s))
        }
        FolCmd::Groupoid { g, depth } => {
            let file = &g.fol.file;
            let t = theory(file)?;
            let gr = groupoid(&t, g.fol.max_size as usize, g.labels as usize, g.convention(), budget()?).map_err(input(file))?;
            let mut r = Report::new("model groupoid");
            r.info(format!("{} objects, {} morphisms", gr.objects.len(), gr.morphisms.len()));
            let laws = gr.check_laws();
            r.check("groupoid laws", laws.is_ok(), laws.err().unwrap_or_default());
            if let Some(d) = depth {
                let defs = Definables::new(&t.signature, &gr.models.models, g.labels as usize + 1, *d as usize, 1 << 24)
                    .map_err(input(file))?;
                let inv = iso_invariance(&gr, &defs);
                r.check(
                    format!("definable sets to depth {d} are isomorphism invariant"),
                    inv.failure.is_none(),
                    match &inv.failure {
                        None => format!("{} classes, {} isomorphisms", inv.classes, inv.isomorphisms),
                        Some((f, a, b, map, tuple)) => format!("{f}: M{a} -> M{b} via {map:?} at {tuple:?}"),
                    },
                );
                let st = morphism_stability(&gr, &defs);
                r.check(
                    "basic opens are stable under morphisms",
                    st.is_ok(),
                    match &st {
                        Ok(k) => format!("{k} opens"),
                        Err((f, k)) => format!("V({f}) is left by morphism {k}"),
                    },
                );
            }
            let out = match emit {
                Emit::Dot => Outcome {
                    text: gr.to_dot("groupoid"),
                    passed: r.passed(),
                },
                Emit::Text => {
                    let mut o = Outcome::report(&r);
                    o.text.push_str(&gr.to_text(&[]));
                    o
                }
            };
            with_digest(&[file], emit, out)
        }
        FolCmd::Open { g, formula, with } => {
            let file = &g.fol.file;
            let t = theory(file)?;
            let f = t.parse_formula(formula).map_err(|e| Failure::Input(format!("formula: {e}")))?;
            let gr = groupoid(&t, g.fol.max_size as usize, g.labels as usize, g.convention(), budget()?).map_err(input(file))?;
            let v = gr.basic_open_of(&f).map_err(|e| Failure::Input(format!("formula: {e}")))?;
            let mut r = Report::new(format!("basic open V({f})"));
            for o in &v {
                r.info(format!("  {}", gr.object_name(*o)));
            }
            let bad = gr.instability(&v);
            r.check(
                "stable under morphisms",
                bad.is_none(),
                match bad {
                    None => format!("{} of {} objects", v.len(), gr.objects.len()),
                    Some(m) => format!("{} -> {} via {:?}", gr.object_name(m.source), gr.object_name(m.target), m.map),
                },
            );
            if let Some(w) = with {
                let h = t.parse_formula(w).map_err(|e| Failure::Input(format!("--with: {e}")))?;
                let id = basic_open_algebra_check(&gr, &f, &h).map_err(|e| Failure::Input(e.to_string()))?;
                r.extend(id);
            }
            let out = match emit {
                Emit::Dot => Outcome {
                    text: gr.to_dot("groupoid"),
                    passed: r.passed(),
                },
                Emit::Text => Outcome::report(&r),
            };
            with_digest(&[file], emit, out)
        }
        FolCmd::Stalk { g, formula } => {
            let file = &g.fol.file;
            let t = theory(file)?;
            let f = t.parse_formula(formula).map_err(|e| Failure::Input(format!("formula: {e}")))?;
            let vars: Vec<String> = {
                let free: BTreeSet<String> = f.free_vars().into_iter().collect();
                dualis::fol::groupoid::sorted_labels(&free.into_iter().collect::<Vec<_>>())
            };
            let gr = groupoid(&t, g.fol.max_size as usize, g.labels as usize, g.convention(), budget()?).map_err(input(file))?;
            let sh = definable_sheaf(&gr, &f, &vars).map_err(|e| Failure::Input(format!("formula: {e}")))?;
            let mut r = Report::new(format!("definable sheaf of ({}) {f}", vars.join(",")));
            for (i, (m, set)) in gr.models.models.iter().zip(&sh.sets).enumerate() {
                let tuples: Vec<String> = set
                    .iter()
                    .map(|t| format!("({})", t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                r.info(format!("M{i} [{}]: {{{}}}", m.to_text(), tuples.join(" ")));
            }
            r.check(
                "equivariant under every morphism",
                sh.equivariant(),
                match &sh.violation {
                    None => format!("{} morphisms", sh.morphisms_checked),
                    Some((k, tuple)) => {
                        let m = &gr.morphisms[*k];
                        format!("{} -> {} moves {tuple:?} across the set", gr.object_name(m.source), gr.object_name(m.target))
                    }
                },
            );
            with_digest(&[file], emit, Outcome::report(&r))
        }
        FolCmd::Consequence { fol: a, formula } => {
            let t = theory(&a.file)?;
            let f = t.parse_formula(formula).map_err(|e| Failure::Input(format!("formula: {e}")))?;
            let v = semantic_consequence(&t, &f, a.max_size as usize, budget()?).map_err(|e| Failure::Input(e.to_string()))?;
            let passed = matches!(v, Verdict::ValidUpToBound { .. });
            with_digest(&[&a.file], emit, Outcome { text: format!("{v}\n"), passed })
        }
    }
}
