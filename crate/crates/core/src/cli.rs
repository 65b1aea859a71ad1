//! Command-line front end. `run` returns the process exit status:
//! 0 success, 1 bad input, 2 internal failure, 3 a negative answer.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::decompose::{decompose, relative_decompose, DecomposeConfig, DecomposeError, Decomposition};
use crate::gersten::{detect_visible, gersten_representative, is_primitive, ConjClassSequence, GerstenConfig, GerstenError};
use crate::gog::{GogError, GraphOfGroups};
use crate::presentation::{abelianization, presentation};
use crate::stallings::{stallings_representative, GraphError, LabeledGraph};
use crate::word::{Basis, Word, WordError};

#[derive(Parser, Debug)]
#[command(name = "grushko", version, about = "Grushko decompositions of graphs of free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a graph-of-groups document.
    Validate {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Free rank and freely indecomposable factors.
    Decompose {
        input: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Exit 0 and print the rank when the fundamental group is free, else exit 3.
    IsFree {
        input: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Decomposition relative to a valence-one vertex group.
    Relative {
        input: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        edge: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Folded graphs of subgroups given by generators.
    Stallings {
        #[command(flatten)]
        gens: GenFlags,
        #[arg(long)]
        json: bool,
    },
    /// Minimal automorphic representative of conjugacy classes of subgroups.
    Gersten {
        #[command(flatten)]
        gens: GenFlags,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = GerstenConfig::default().max_rank)]
        max_rank: usize,
    },
    /// Whitehead's test for primitivity; exit 3 when not primitive.
    Primitive {
        #[arg(long)]
        basis: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = GerstenConfig::default().max_rank)]
        max_rank: usize,
    },
}

#[derive(Args, Debug)]
struct RunFlags {
    #[arg(long)]
    json: bool,
    /// Print one line per applied move.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = DecomposeConfig::default().max_moves)]
    max_moves: usize,
    #[arg(long, default_value_t = GerstenConfig::default().max_rank)]
    max_rank: usize,
    /// Express factor vertex bases in the input bases.
    #[arg(long)]
    original_basis_trace: bool,
}

impl RunFlags {
    fn config(&self) -> DecomposeConfig {
        DecomposeConfig { max_moves: self.max_moves, gersten: GerstenConfig { max_rank: self.max_rank } }
    }
}

#[derive(Args, Debug)]
struct GenFlags {
    /// Comma-separated basis symbols.
    #[arg(long)]
    basis: String,
    /// Subgroups separated by `;`, generators within one by `,`.
    #[arg(long)]
    gens: String,
}

/// A failure with its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        let code = match &e {
            DecomposeError::InvalidInput(_) | DecomposeError::RelativePreconditionFailed(_) => 1,
            DecomposeError::Gog(g) => gog_code(g),
            DecomposeError::MeasureViolation { .. }
            | DecomposeError::MoveCap(_)
            | DecomposeError::UnabsorbedFreeFactor(_) => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn gog_code(e: &GogError) -> i32 {
    match e {
        GogError::Format(_) | GogError::Word(_) | GogError::Gersten(GerstenError::RankTooLarge { .. }) => 1,
        _ => 2,
    }
}

impl From<GerstenError> for Failure {
    fn from(e: GerstenError) -> Self {
        let code = match e {
            GerstenError::RankTooLarge { .. } | GerstenError::Word(_) | GerstenError::IdentityWord => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<WordError> for Failure {
    fn from(e: WordError) -> Self {
        Failure::input(e)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: format!("write failed: {e}") }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<GraphOfGroups, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    GraphOfGroups::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { input, json } => {
            let g = load(&input)?;
            let violations = g.validate();
            if json {
                writeln!(out, "{}", json!({ "valid": violations.is_empty(), "violations": violations }))?;
            } else if violations.is_empty() {
                writeln!(out, "valid")?;
            } else {
                for v in &violations {
                    writeln!(out, "{v}")?;
                }
            }
            Ok(if violations.is_empty() { 0 } else { 1 })
        }
        Command::Decompose { input, run } => {
            let g = load(&input)?;
            let d = decompose(&g, &run.config())?;
            report(&d, &run, None, out, err)?;
            Ok(0)
        }
        Command::IsFree { input, run } => {
            let g = load(&input)?;
            let d = decompose(&g, &run.config())?;
            trace(&d, &run, out, err)?;
            if run.json {
                let rank = d.is_free().then_some(d.free_rank);
                writeln!(out, "{}", json!({ "free": d.is_free(), "rank": rank }))?;
            } else if d.is_free() {
                writeln!(out, "free of rank {}", d.free_rank)?;
            } else {
                writeln!(out, "not free")?;
            }
            Ok(if d.is_free() { 0 } else { 3 })
        }
        Command::Relative { input, vertex, edge, run } => {
            let g = load(&input)?;
            let d = relative_decompose(&g, &vertex, &edge, &run.config())?;
            report(&d, &run, Some(&vertex), out, err)?;
            Ok(0)
        }
        Command::Stallings { gens, json } => {
            let (basis, groups) = parse_gens(&gens)?;
            let seq = stallings_representative(&groups, &basis)?;
            if json {
                let graphs: Vec<_> = seq.components.iter().map(graph_value).collect();
                writeln!(out, "{}", json!({ "basis": basis, "graphs": graphs }))?;
            } else {
                for (i, c) in seq.components.iter().enumerate() {
                    writeln!(out, "subgroup {i}: rank {}", c.rank())?;
                    write!(out, "{}", c.dump(true))?;
                }
            }
            Ok(0)
        }
        Command::Gersten { gens, json, max_rank } => {
            let (basis, groups) = parse_gens(&gens)?;
            let tags = (0..groups.len()).map(|i| i.to_string()).collect();
            let seq = ConjClassSequence::from_generators(&groups, &basis, tags)?;
            let config = GerstenConfig { max_rank };
            let rep = gersten_representative(&seq, &config)?;
            let visible = detect_visible(&rep.sequence, &Default::default(), &config)?;
            let s = &rep.sequence;
            if json {
                let cores: Vec<_> = s.components().iter().map(graph_value).collect();
                let value = json!({
                    "complexity": s.complexity(),
                    "lexity": s.lexity(),
                    "minlex": s.minlex(),
                    "automorphism": rep.automorphism,
                    "cores": cores,
                    "visible": visible,
                });
                writeln!(out, "{value}")?;
            } else {
                writeln!(out, "complexity {} lexity {:?} minlex {}", s.complexity(), s.lexity().0, s.minlex())?;
                write!(out, "automorphism\n{}", rep.automorphism)?;
                write!(out, "{}", s.dump())?;
                match &visible {
                    Some(v) => writeln!(out, "visible: {v}")?,
                    None => writeln!(out, "visible: none")?,
                }
            }
            Ok(0)
        }
        Command::Primitive { basis, word, json, max_rank } => {
            let basis = Basis::parse(&basis)?;
            let w = Word::parse(&word)?;
            let yes = is_primitive(&w, &basis, &GerstenConfig { max_rank })?;
            if json {
                writeln!(out, "{}", json!({ "primitive": yes }))?;
            } else {
                writeln!(out, "{}", if yes { "primitive" } else { "not primitive" })?;
            }
            Ok(if yes { 0 } else { 3 })
        }
    }
}

fn parse_gens(flags: &GenFlags) -> Result<(Basis, Vec<Vec<Word>>), Failure> {
    let basis = Basis::parse(&flags.basis)?;
    let mut groups = Vec::new();
    for group in flags.gens.split(';') {
        let words = group
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(Word::parse)
            .collect::<Result<Vec<_>, _>>()?;
        for w in &words {
            basis.check_word(w)?;
        }
        groups.push(words);
    }
    Ok((basis, groups))
}

fn graph_value(g: &LabeledGraph) -> serde_json::Value {
    let c = g.canonical(g.basepoint().is_some());
    let edges: Vec<_> = c
        .edges()
        .iter()
        .map(|e| json!([e.origin, e.terminus, g.ambient().symbol(e.symbol)]))
        .collect();
    json!({ "vertices": c.vertex_count(), "basepoint": c.basepoint(), "edges": edges })
}

fn trace(d: &Decomposition, run: &RunFlags, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if run.trace {
        // Keep stdout parseable in JSON mode.
        let sink: &mut dyn Write = if run.json { err } else { out };
        for entry in &d.log {
            writeln!(sink, "{entry}")?;
        }
    }
    Ok(())
}

fn report(
    d: &Decomposition,
    run: &RunFlags,
    flagged_vertex: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    trace(d, run, out, err)?;
    if run.json {
        let mut value = d.to_value();
        if run.original_basis_trace {
            value["original_basis"] = serde_json::to_value(&d.origins).expect("origins serialize");
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json value"))?;
        return Ok(());
    }
    writeln!(out, "free rank {}", d.free_rank)?;
    writeln!(out, "{} indecomposable factor(s)", d.factors.len())?;
    for (i, f) in d.factors.iter().enumerate() {
        let ab = abelianization(&presentation(&f.graph));
        let mark = match (f.flagged, flagged_vertex) {
            (true, Some(v)) => format!(", contains {v}"),
            _ => String::new(),
        };
        writeln!(out, "factor {}: abelianization {ab}{mark}", i + 1)?;
        for (v, b) in f.graph.vertices() {
            writeln!(out, "  vertex {v} {b}")?;
            if run.original_basis_trace {
                if let Some(o) = d.origins.get(v) {
                    let images: Vec<String> = o.images.iter().map(|(s, w)| format!("{s} = {w}")).collect();
                    writeln!(out, "    in {}: {}", o.source, images.join(", "))?;
                }
            }
        }
        for e in f.graph.edges() {
            let bonds: Vec<String> = e
                .basis
                .symbols()
                .iter()
                .zip(e.forward.iter().zip(&e.backward))
                .map(|(s, (x, y))| format!("{s}: {x} | {y}"))
                .collect();
            writeln!(out, "  edge {} {} -> {} {} {}", e.id, e.origin, e.terminus, e.basis, bonds.join("; "))?;
        }
    }
    Ok(())
}
