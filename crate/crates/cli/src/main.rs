use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wythoff::decoration::{decoration_from_s, is_degenerate, stabilizer_generators, valid_s_sets};
use wythoff::group::DEFAULT_BUDGET;
use wythoff::lattice::euler_holds;
use wythoff::regular::{classify, compare_with_oracle, Witness, DEFAULT_KMAX};
use wythoff::{
    f_vector_formula, is_regular_ruled, realize, wythoff_point, DecoratedDiagram, Decoration012, DecorationError,
    DiagramError, FaceLattice, GeometryError, Group, GroupError, LatticeError, Realization, RegularError,
};

/// Wythoff's construction from decorated Coxeter diagrams.
///
/// Diagrams are given inline (`x4o3o`: x = ringed, o = crossed, digits are
/// edge labels) or as `@path` to a JSON document with `nodes` and `edges`.
#[derive(Parser)]
#[command(name = "wythoff", version)]
struct Cli {
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and classify a diagram.
    Validate { diagram: String },
    /// Order of the reflection group.
    Order { diagram: String },
    /// Face decorations of one rank, with stabilizer orders and face counts.
    Faces {
        diagram: String,
        #[arg(long)]
        rank: usize,
    },
    /// Face counts per rank.
    Fvector {
        diagram: String,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
    },
    /// Write the face lattice as JSON.
    Lattice {
        diagram: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertex coordinates.
    Vertices { diagram: String },
    /// Export the realization as an OFF mesh or JSON.
    Export {
        diagram: String,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural and geometric checks; exits 1 on any violation.
    Check { diagram: String },
    /// Decide regularity.
    IsRegular {
        diagram: String,
        /// Also run the flag-transitivity oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Regular polytopes of one dimension.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=64))]
        dim: u64,
        #[arg(long, default_value_t = DEFAULT_KMAX, value_parser = clap::value_parser!(u32).range(3..))]
        kmax: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Enum,
    Formula,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Off,
    Json,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain { module: &'static str, message: String },
}

fn domain(module: &'static str, message: impl Display) -> Failure {
    Failure::Domain { module, message: message.to_string() }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        domain("diagram", e)
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        domain("reflection_group", e)
    }
}

impl From<DecorationError> for Failure {
    fn from(e: DecorationError) -> Self {
        domain("decoration", e)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        domain("face_lattice", e)
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        domain("geometry", e)
    }
}

impl From<RegularError> for Failure {
    fn from(e: RegularError) -> Self {
        match e {
            RegularError::Group(e) => e.into(),
            RegularError::Lattice(e) => e.into(),
            RegularError::Geometry(e) => e.into(),
            other => domain("regular", other),
        }
    }
}

/// Text lines and the JSON result of one command.
struct Output {
    lines: Vec<String>,
    result: Value,
    ok: bool,
}

impl Output {
    fn new(lines: Vec<String>, result: Value) -> Self {
        Self { lines, result, ok: true }
    }
}

fn load(arg: &str) -> Result<DecoratedDiagram, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| domain("diagram", format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    Ok(DecoratedDiagram::parse(&text)?)
}

fn budget() -> Result<usize, Failure> {
    match std::env::var("WYTHOFF_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("WYTHOFF_BUDGET must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn non_degenerate(d: &DecoratedDiagram) -> Result<Decoration012, Failure> {
    let f0 = Decoration012::initial(d);
    if is_degenerate(d, &f0) {
        return Err(LatticeError::Degenerate.into());
    }
    Ok(f0)
}

fn build(d: &DecoratedDiagram) -> Result<(Group, FaceLattice), Failure> {
    non_degenerate(d)?;
    let g = Group::of_with_budget(d, budget()?)?;
    let l = FaceLattice::build(d, &g)?;
    Ok((g, l))
}

fn realization(d: &DecoratedDiagram) -> Result<(Group, FaceLattice, Realization), Failure> {
    let (g, l) = build(d)?;
    let x = wythoff_point(g.normals(), &Decoration012::initial(d))?;
    let r = realize(&l, &g, &x)?;
    Ok((g, l, r))
}

fn node_names(d: &DecoratedDiagram, set: u64) -> Vec<String> {
    (0..d.len()).filter(|&v| set & (1 << v) != 0).map(|v| d.ids()[v].clone()).collect()
}

fn join<T: Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn number(x: &num_bigint::BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn write_or_print(out: &Option<PathBuf>, text: &str, what: &str) -> Result<(Vec<String>, Value), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| domain("io", format!("{}: {e}", path.display())))?;
            Ok((vec![format!("wrote {what} to {}", path.display())], json!({ "path": path.display().to_string() })))
        }
        None => Ok((vec![text.trim_end().to_string()], Value::Null)),
    }
}

fn run(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Validate { diagram } => {
            let d = load(diagram)?;
            let families: Vec<String> = d.family_tags().iter().map(|t| t.to_string()).collect();
            let degenerate = is_degenerate(&d, &Decoration012::initial(&d));
            let ringed = node_names(&d, d.ringed());
            Ok(Output::new(
                vec![
                    format!("families: {}", families.join(" + ")),
                    format!("nodes: {}", d.len()),
                    format!("ringed: {}", if ringed.is_empty() { "none".into() } else { ringed.join(", ") }),
                    format!("degenerate: {}", if degenerate { "yes" } else { "no" }),
                ],
                json!({ "families": families, "nodes": d.len(), "ringed": ringed, "degenerate": degenerate }),
            ))
        }
        Command::Order { diagram } => {
            let d = load(diagram)?;
            let order = d.group_order();
            Ok(Output::new(vec![order.to_string()], json!({ "order": number(&order) })))
        }
        Command::Faces { diagram, rank } => {
            let d = load(diagram)?;
            let f0 = non_degenerate(&d)?;
            if *rank > d.len() {
                return Err(Failure::Usage(format!("rank {rank} exceeds the diagram rank {}", d.len())));
            }
            let order = d.group_order();
            let mut lines = Vec::new();
            let mut faces = Vec::new();
            for s in valid_s_sets(&d, &f0, *rank) {
                let f = decoration_from_s(&d, &f0, s)?;
                let stabilizer = d.parabolic_order(stabilizer_generators(&f));
                let count = &order / &stabilizer;
                let circled = node_names(&d, s);
                lines.push(format!(
                    "{f}  S = {{{}}}  stabilizer {stabilizer}  count {count}",
                    circled.join(", ")
                ));
                faces.push(json!({
                    "decoration": f.values(),
                    "s_set": circled,
                    "stabilizer_order": number(&stabilizer),
                    "count": number(&count),
                }));
            }
            Ok(Output::new(lines, json!({ "rank": rank, "faces": faces })))
        }
        Command::Fvector { diagram, method } => {
            let d = load(diagram)?;
            let formula = || -> Result<Vec<Value>, Failure> { Ok(f_vector_formula(&d)?.iter().map(number).collect()) };
            let enumerated = || -> Result<Vec<Value>, Failure> {
                let (_, l) = build(&d)?;
                Ok(l.f_vector().into_iter().map(|x| json!(x)).collect())
            };
            let counts = match method {
                Method::Formula => formula()?,
                Method::Enum => enumerated()?,
                Method::Both => {
                    let (a, b) = (enumerated()?, formula()?);
                    if a != b {
                        return Err(domain(
                            "face_lattice",
                            format!("enumerated ({}) and formula ({}) counts differ", join(&a, " "), join(&b, " ")),
                        ));
                    }
                    a
                }
            };
            Ok(Output::new(vec![join(&counts, " ")], json!({ "f_vector": counts })))
        }
        Command::Lattice { diagram, out } => {
            let d = load(diagram)?;
            let (_, l) = build(&d)?;
            let doc = serde_json::to_string_pretty(&l.document(&d)).expect("serializable");
            let (lines, result) = write_or_print(out, &doc, &format!("{} faces", l.len()))?;
            let result = if result.is_null() { serde_json::from_str(&doc).expect("valid") } else { result };
            Ok(Output::new(lines, result))
        }
        Command::Vertices { diagram } => {
            let d = load(diagram)?;
            let (_, _, r) = realization(&d)?;
            let doc = r.document();
            let lines = doc.vertices.iter().map(|v| join(v.iter().map(|x| format!("{x:.9}")), " ")).collect();
            Ok(Output::new(lines, json!({ "dimension": doc.dimension, "vertices": doc.vertices })))
        }
        Command::Export { diagram, format, out } => {
            let d = load(diagram)?;
            let (_, _, r) = realization(&d)?;
            let (text, what) = match format {
                Format::Off => (r.export_off()?, "OFF mesh"),
                Format::Json => (serde_json::to_string_pretty(&r.document()).expect("serializable"), "JSON realization"),
            };
            let (lines, result) = write_or_print(out, &text, what)?;
            let result = match (result.is_null(), format) {
                (false, _) => result,
                (true, Format::Json) => serde_json::from_str(&text).expect("valid"),
                (true, Format::Off) => json!({ "off": text }),
            };
            Ok(Output::new(lines, result))
        }
        Command::Check { diagram } => {
            let d = load(diagram)?;
            let (_, l, r) = realization(&d)?;
            let f = l.f_vector();
            let diamond = l.check_diamond();
            let flags = l.check_flag_connected();
            let euler = euler_holds(&f);
            let edges = r.check_uniform_edges();
            let dims = r.check_face_dimensions();
            let containment = r.check_cover_containment(&l);
            let formula_ok = f_vector_formula(&d)?.iter().zip(&f).all(|(a, &b)| *a == b.into());
            let checks = [
                ("diamond", diamond.violations.is_empty(), format!("{} pairs, {} violations", diamond.pairs_checked, diamond.violations.len())),
                ("flags", flags.ok(), format!("{} flags, {} components, {} with wrong degree", flags.flags, flags.components, flags.wrong_degree)),
                ("euler", euler, format!("f = {}", join(&f, " "))),
                ("counting", formula_ok, "enumerated counts match orbit-stabilizer counts".to_string()),
                ("edges", edges.relative_spread <= 1e-9, format!("{} edges, relative spread {:.1e}", edges.edges, edges.relative_spread)),
                ("dimensions", dims.is_empty(), format!("{} faces with wrong affine dimension", dims.len())),
                ("containment", containment.is_empty(), format!("{} cover pairs not nested", containment.len())),
            ];
            let ok = checks.iter().all(|c| c.1);
            let lines = checks.iter().map(|(name, pass, detail)| format!("{name}: {} ({detail})", if *pass { "ok" } else { "FAIL" })).collect();
            let result = json!({
                "ok": ok,
                "checks": checks.iter().map(|(name, pass, detail)| json!({ "name": name, "ok": pass, "detail": detail })).collect::<Vec<_>>(),
            });
            Ok(Output { lines, result, ok })
        }
        Command::IsRegular { diagram, oracle } => {
            let d = load(diagram)?;
            non_degenerate(&d)?;
            let verdict = is_regular_ruled(&d)?;
            let mut lines = vec![verdict.to_string()];
            if let Witness::Counterexample { first, second } = &verdict.witness {
                for w in [first, second] {
                    lines.push(format!(
                        "  {}: S = {{{}}}, reached by circling {}",
                        w.description,
                        w.s_set.join(", "),
                        w.sequence.join(", ")
                    ));
                }
            }
            let mut result = serde_json::to_value(&verdict).expect("serializable");
            let mut ok = true;
            if *oracle {
                let c = compare_with_oracle(&d, budget()?)?;
                lines.push(format!(
                    "oracle: one flag orbit of {} out of {} flags under the Wythoff group",
                    c.group.orbit, c.group.flags
                ));
                if let Some(full) = c.full_symmetry {
                    lines.push(format!(
                        "oracle: one flag orbit of {} out of {} flags with ridge reflections added",
                        full.orbit, full.flags
                    ));
                }
                lines.push(format!("oracle: {}", if c.agrees() { "agrees" } else { "DISAGREES" }));
                ok = c.agrees();
                result["oracle"] = serde_json::to_value(&c).expect("serializable");
                result["oracle"]["agrees"] = json!(ok);
            }
            Ok(Output { lines, result, ok })
        }
        Command::Classify { dim, kmax } => {
            let entries = classify(*dim as usize, *kmax);
            let lines = entries
                .iter()
                .map(|e| {
                    let more = e.constructions.len() - 1;
                    format!(
                        "{}: f = {}; {}{}",
                        e.display_name(),
                        join(&e.f_vector, " "),
                        e.constructions[0],
                        if more > 0 { format!(" (+{more} more)") } else { String::new() }
                    )
                })
                .collect();
            let ok = entries.iter().all(|e| e.formula_checked && e.verified.unwrap_or(true));
            Ok(Output { lines, result: json!({ "dimension": dim, "kmax": kmax, "entries": entries }), ok })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Order { .. } => "order",
        Command::Faces { .. } => "faces",
        Command::Fvector { .. } => "fvector",
        Command::Lattice { .. } => "lattice",
        Command::Vertices { .. } => "vertices",
        Command::Export { .. } => "export",
        Command::Check { .. } => "check",
        Command::IsRegular { .. } => "is-regular",
        Command::Classify { .. } => "classify",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match budget().and_then(|_| run(&cli.command)) {
        Ok(out) => {
            let text = if cli.json {
                let doc = json!({ "command": command_name(&cli.command), "ok": out.ok, "result": out.result });
                serde_json::to_string_pretty(&doc).expect("serializable")
            } else {
                out.lines.join("\n")
            };
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Domain { module, message }) => {
            if cli.json {
                let doc = json!({ "command": command_name(&cli.command), "ok": false, "error": { "module": module, "message": message } });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            }
            eprintln!("error ({module}): {message}");
            ExitCode::from(1)
        }
    }
}
