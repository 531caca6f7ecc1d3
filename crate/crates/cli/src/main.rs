//! Command-line front end for the `stringar` library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stringar::artheory::{ar_sequence, knit, tau_oracle, matches_string_module, tau_orbit, ArContext, Side};
use stringar::configurations::{audit_theorems, detect_local_patterns, find_tau_arrows, find_three_cycles, path_class, pattern_candidates};
use stringar::families::{make_family, witness, Family};
use stringar::modules::{hom_basis, realize};
use stringar::radical::{cg_quiver, iota, theta, CgSide, DegreeSide, DegreeValue, Method, Radical};
use stringar::strings::{canonicalize, enumerate_strings, find_bands, string_flags};
use stringar::{parse_presentation, AlgebraPresentation, Error, Field, Fp, Rational, StringWord};

/// Environment variable naming the directory for relative `--output` paths.
const OUTPUT_DIR_VAR: &str = "STRINGAR_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "stringar", version, about = "Auslander-Reiten theory of string algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Field characteristic; 0 means exact rationals.
    #[arg(long = "char", global = true, default_value_t = 0)]
    characteristic: u64,
    /// Write the result to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Built-in family instead of a presentation file.
    #[arg(long, global = true)]
    family: Option<FamilyArg>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    #[value(name = "W", alias = "w")]
    W,
    #[value(name = "U", alias = "u")]
    U,
    #[value(name = "V", alias = "v")]
    V,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::W => Family::W,
            FamilyArg::U => Family::U,
            FamilyArg::V => Family::V,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CgSideArg {
    Ending,
    Starting,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Recursion,
    PathSpan,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the string algebra conditions.
    Validate { input: Option<PathBuf> },
    /// List the canonical strings.
    Strings {
        input: Option<PathBuf>,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// List bands up to a length.
    Bands {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Show the string module of a word.
    Module {
        input: Option<PathBuf>,
        #[arg(long)]
        word: String,
    },
    /// AR translate of a string module, checked against DTr.
    Tau {
        input: Option<PathBuf>,
        #[arg(long)]
        word: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Iterate τ.
    TauOrbit {
        input: Option<PathBuf>,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Knit the AR quiver.
    Knit {
        input: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
    },
    /// Dimension and basis of Hom(X, Y).
    Hom {
        input: Option<PathBuf>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Radical layer dimensions.
    RadicalProfile {
        input: Option<PathBuf>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Recursion)]
        method: MethodArg,
    },
    /// Radical depth of the composite along a path of Γ.
    Depth {
        input: Option<PathBuf>,
        /// Node words, in order along the path.
        #[arg(long = "node", required = true, num_args = 1)]
        nodes: Vec<String>,
    },
    /// Left or right degree of an irreducible morphism.
    Degree {
        input: Option<PathBuf>,
        /// Use ι_u (right) or θ_u (left) at this vertex.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Counting quiver of strings at a vertex.
    CgQuiver {
        input: Option<PathBuf>,
        #[arg(long)]
        vertex: String,
        #[arg(long, value_enum)]
        side: CgSideArg,
    },
    /// Local patterns, 3-cycles and arrows M -> τM.
    Detect { input: Option<PathBuf> },
    /// Sampled theorem audits.
    Audit {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the presentation of a family member.
    Family,
    /// Verified witness chain of a family member.
    Witness,
}

impl Command {
    fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::Validate { input }
            | Command::Strings { input, .. }
            | Command::Bands { input, .. }
            | Command::Module { input, .. }
            | Command::Tau { input, .. }
            | Command::TauOrbit { input, .. }
            | Command::Knit { input, .. }
            | Command::Hom { input, .. }
            | Command::RadicalProfile { input, .. }
            | Command::Depth { input, .. }
            | Command::Degree { input, .. }
            | Command::CgQuiver { input, .. }
            | Command::Detect { input }
            | Command::Audit { input, .. } => input.as_ref(),
            Command::Family | Command::Witness => None,
        }
    }
}

enum Failure {
    Domain(Error),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

struct Report {
    text: String,
    json: Value,
    dot: Option<String>,
    exit: u8,
}

impl Report {
    fn new(text: String, json: Value) -> Self {
        Report { text, json, dot: None, exit: 0 }
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn load(cli: &Cli) -> std::result::Result<AlgebraPresentation, Failure> {
    let o = &cli.opts;
    match (cli.command.input(), o.family) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either a presentation file or --family, not both".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(parse_presentation(&text)?)
        }
        (None, Some(f)) => Ok(family_spec(o, f)?.presentation),
        (None, None) => Err(Failure::Usage("missing input: a presentation file or --family".into())),
    }
}

fn family_spec(o: &Opts, f: FamilyArg) -> std::result::Result<stringar::families::FamilySpec, Failure> {
    let n = o.n.ok_or_else(|| Failure::Usage("--family needs --n".into()))?;
    let m = match f {
        FamilyArg::W => o.m.unwrap_or(0),
        _ => o.m.ok_or_else(|| Failure::Usage("--family U/V needs --m".into()))?,
    };
    Ok(make_family(f.into(), m, n)?)
}

fn word(p: &AlgebraPresentation, text: &str) -> Result<StringWord, Error> {
    Ok(canonicalize(p.quiver(), &StringWord::parse(p, text)?))
}

fn vertex(p: &AlgebraPresentation, name: &str) -> Result<usize, Error> {
    p.quiver().vertex(name)
}

fn run<F: Field>(cli: &Cli) -> Outcome {
    if let Command::Family | Command::Witness = cli.command {
        let f = cli.opts.family.ok_or_else(|| Failure::Usage("this subcommand needs --family".into()))?;
        let spec = family_spec(&cli.opts, f)?;
        return Ok(match cli.command {
            Command::Family => {
                let src = spec.source();
                Report::new(src.clone(), json!({ "family": spec.family.to_string(), "m": spec.m, "n": spec.n, "source": src }))
            }
            _ => {
                let w = witness::<F>(&spec)?;
                let g = &w.gamma;
                let mut text = format!(
                    "{}: composite depth {} (expected {}), prefix {}, suffix {}\n",
                    spec.presentation.name(),
                    w.composite_depth,
                    w.expected_depth,
                    w.prefix_depth,
                    w.suffix_depth
                );
                for (i, pair) in w.nodes.windows(2).enumerate() {
                    text.push_str(&format!("h{}: {} -> {}\n", i + 1, g.label(pair[0]), g.label(pair[1])));
                }
                Report::new(text, w.to_json())
            }
        });
    }
    let p = load(cli)?;
    let q = p.quiver();
    let report = match &cli.command {
        Command::Validate { .. } => {
            let r = p.validate_string_algebra();
            let mut text = String::new();
            for c in &r.conditions {
                text.push_str(&format!("{}: {}", c.condition, if c.passed { "ok" } else { "FAILED" }));
                if !c.offenders.is_empty() {
                    text.push_str(&format!(" ({})", c.offenders.join(", ")));
                }
                text.push('\n');
            }
            text.push_str(&format!("string algebra: {}\n", r.is_string_algebra));
            Report::new(text, serde_json::to_value(r).expect("report serializes"))
        }
        Command::Strings { max_len, .. } => {
            let ws: Vec<String> = enumerate_strings(&p, *max_len)?.iter().map(|w| w.format(q)).collect();
            Report::new(lines(&ws), json!({ "count": ws.len(), "strings": ws }))
        }
        Command::Bands { max_len, .. } => {
            let bs: Vec<String> = find_bands(&p, *max_len).iter().map(|b| b.format(q)).collect();
            Report::new(lines(&bs), json!({ "maxLen": max_len, "count": bs.len(), "bands": bs }))
        }
        Command::Module { word: text, .. } => {
            let w = word(&p, text)?;
            let m = realize::<F>(&p, &w)?;
            let fl = string_flags(&p, &w);
            let ctx = ArContext::new(&p)?;
            let text = format!(
                "M({}): dims {:?}, total {}{}{}\n",
                w.format(q),
                m.rep().dims(),
                m.rep().total_dim(),
                if ctx.is_projective(&w) { ", projective" } else { "" },
                if ctx.is_injective(&w) { ", injective" } else { "" }
            );
            Report::new(
                text,
                json!({
                    "word": w.format(q),
                    "representation": m.rep().to_json(&p),
                    "projective": ctx.is_projective(&w),
                    "injective": ctx.is_injective(&w),
                    "startsOnPeak": fl.starts_on_peak,
                    "startsInDeep": fl.starts_in_deep,
                    "endsOnPeak": fl.ends_on_peak,
                    "endsInDeep": fl.ends_in_deep,
                }),
            )
        }
        Command::Tau { word: text, inverse, .. } => {
            let w = word(&p, text)?;
            let ctx = ArContext::new(&p)?;
            let (image, seq) = if *inverse {
                (ctx.tau_inverse_word(&w)?, ar_sequence::<F>(&p, &w, Side::StartingAt)?)
            } else {
                (ctx.tau_word(&w)?, ar_sequence::<F>(&p, &w, Side::EndingAt)?)
            };
            let oracle = if *inverse {
                None
            } else {
                let m = realize::<F>(&p, &w)?;
                let dtr = tau_oracle(&p, m.rep())?;
                Some(matches_string_module(&p, &dtr, &realize::<F>(&p, &image)?))
            };
            let middle: Vec<String> = seq.middle.iter().map(|m| m.word().format(q)).collect();
            let text = format!(
                "{}{}({}) = {}\nsequence: {} -> [{}] -> {}\n{}",
                "τ",
                if *inverse { "⁻¹" } else { "" },
                w.format(q),
                image.format(q),
                seq.left.word().format(q),
                middle.join(", "),
                seq.right.word().format(q),
                match oracle {
                    Some(true) => "DTr agrees\n",
                    Some(false) => "DTr DISAGREES\n",
                    None => "",
                }
            );
            Report::new(
                text,
                json!({
                    "word": w.format(q),
                    "inverse": inverse,
                    "image": image.format(q),
                    "sequence": { "left": seq.left.word().format(q), "middle": middle, "right": seq.right.word().format(q) },
                    "oracleAgrees": oracle,
                }),
            )
        }
        Command::TauOrbit { word: text, steps, .. } => {
            let m = realize::<F>(&p, &word(&p, text)?)?;
            let orbit = tau_orbit(&p, &m, *steps)?;
            let ws: Vec<String> = orbit.modules.iter().map(|m| m.word().format(q)).collect();
            let mut text = lines(&ws);
            if orbit.reached_projective {
                text.push_str("(projective reached)\n");
            }
            Report::new(text, json!({ "orbit": ws, "reachedProjective": orbit.reached_projective }))
        }
        Command::Knit { dot, .. } => {
            let g = knit::<F>(&p)?;
            let mut text = format!("{} nodes, {} arrows\n", g.nodes().len(), g.arrows().len());
            for a in g.arrows() {
                text.push_str(&format!("{} -> {}\n", g.label(a.source), g.label(a.target)));
            }
            let mut r = Report::new(text, g.to_json());
            if *dot {
                r.dot = Some(g.to_dot());
            }
            r
        }
        Command::Hom { from, to, .. } => {
            let (x, y) = (word(&p, from)?, word(&p, to)?);
            let mx = realize::<F>(&p, &x)?;
            let my = realize::<F>(&p, &y)?;
            let h = hom_basis(&p, mx.rep(), my.rep());
            Report::new(
                format!("dim Hom({}, {}) = {}\n", x.format(q), y.format(q), h.dimension()),
                json!({
                    "from": x.format(q),
                    "to": y.format(q),
                    "dimension": h.dimension(),
                    "basis": h.basis().iter().map(|f| f.to_json(&p)).collect::<Vec<_>>(),
                }),
            )
        }
        Command::RadicalProfile { from, to, method, .. } => {
            let g = knit::<F>(&p)?;
            let method = match method {
                MethodArg::Recursion => Method::Recursion,
                MethodArg::PathSpan => Method::PathSpan,
            };
            let rad = Radical::with_method(&g, method);
            let pick = |t: &Option<String>| -> Result<Vec<usize>, Error> {
                match t {
                    Some(t) => Ok(vec![g.find_text(t)?]),
                    None => Ok((0..g.nodes().len()).collect()),
                }
            };
            let (xs, ys) = (pick(from)?, pick(to)?);
            let mut text = String::new();
            let mut rows = Vec::new();
            for &x in &xs {
                for &y in &ys {
                    let prof = rad.profile(x, y)?;
                    if xs.len() * ys.len() > 1 && prof.dims().first() == Some(&0) {
                        continue;
                    }
                    text.push_str(&format!("({}, {}): {:?}\n", g.label(x), g.label(y), prof.dims()));
                    rows.push(rad.profile_json(x, y)?);
                }
            }
            Report::new(text, json!({ "nilpotencyIndex": rad.nilpotency_index(), "profiles": rows }))
        }
        Command::Depth { nodes, .. } => {
            let g = knit::<F>(&p)?;
            let path: Vec<usize> = nodes.iter().map(|t| g.find_text(t)).collect::<Result<_, _>>()?;
            let class = path_class(&g, &path)?;
            let maps: Vec<_> = path.windows(2).map(|w| g.arrows()[g.arrows_between(w[0], w[1])[0]].map.clone()).collect();
            let rad = Radical::new(&g);
            let (x, y) = (path[0], *path.last().unwrap());
            let f = if maps.is_empty() {
                stringar::modules::Morphism::identity(g.node(x).module.rep().dims())
            } else {
                stringar::modules::compose_chain(&maps)?
            };
            let d = rad.depth(x, y, &f)?;
            Report::new(
                format!("depth {d}{}\n", if class.sectional { " (sectional path)" } else { "" }),
                json!({ "path": path.iter().map(|&k| g.label(k)).collect::<Vec<_>>(), "depth": d.to_json(), "sectional": class.sectional }),
            )
        }
        Command::Degree { vertex: v, from, to, side, bound, .. } => {
            let g = knit::<F>(&p)?;
            let side = match side {
                SideArg::Left => DegreeSide::Left,
                SideArg::Right => DegreeSide::Right,
            };
            let k = match (v, from, to) {
                (Some(v), None, None) => {
                    let u = vertex(&p, v)?;
                    match side {
                        DegreeSide::Right => iota(&g, u)?,
                        DegreeSide::Left => theta(&g, u)?,
                    }
                }
                (None, Some(a), Some(b)) => {
                    let (x, y) = (g.find_text(a)?, g.find_text(b)?);
                    *g.arrows_between(x, y).first().ok_or_else(|| Error::NotAPath(format!("no arrow {a} -> {b}")))?
                }
                _ => return Err(Failure::Usage("degree needs either --vertex or both --from and --to".into())),
            };
            let a = &g.arrows()[k];
            let rad = Radical::new(&g);
            let d = rad.degree(a.source, a.target, &a.map, side, *bound)?;
            let value = match d.value {
                DegreeValue::Finite(n) => json!(n),
                DegreeValue::Infinite => json!("infinite"),
                DegreeValue::Undetermined(b) => json!({ "undeterminedUpTo": b }),
            };
            let witness = d.witness.as_ref().map(|(z, _)| g.label(*z));
            Report::new(
                format!("{} -> {}: degree {}\n", g.label(a.source), g.label(a.target), value),
                json!({ "source": g.label(a.source), "target": g.label(a.target), "degree": value, "witness": witness }),
            )
        }
        Command::CgQuiver { vertex: v, side, .. } => {
            let side = match side {
                CgSideArg::Ending => CgSide::Ending,
                CgSideArg::Starting => CgSide::Starting,
            };
            let cg = cg_quiver(&p, vertex(&p, v)?, side)?;
            let ws: Vec<String> = cg.strings.iter().map(|w| w.format(q)).collect();
            Report::new(format!("card {}, degree {}\n{}", cg.card(), cg.degree(), lines(&ws)), cg.to_json(&p))
        }
        Command::Detect { .. } => {
            let matches = detect_local_patterns(&p);
            let candidates = pattern_candidates(&p, &matches)?;
            let mut text = String::new();
            for m in &matches {
                let m_text = m.m.map(|k| format!(" m={k}")).unwrap_or_default();
                text.push_str(&format!("{}{m_text} {:?}\n", m.pattern.name(), m.binding));
            }
            let mut out = json!({
                "patterns": matches.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
                "candidates": candidates.iter().map(|w| w.format(q)).collect::<Vec<_>>(),
            });
            match knit::<F>(&p) {
                Ok(g) => {
                    let cycles: Vec<Vec<String>> = find_three_cycles(&g).iter().map(|c| c.iter().map(|&k| g.label(k)).collect()).collect();
                    let tau_arrows: Vec<[String; 2]> = find_tau_arrows(&g).iter().map(|&(x, y)| [g.label(x), g.label(y)]).collect();
                    text.push_str(&format!("{} three-cycles, {} arrows M -> τM\n", cycles.len(), tau_arrows.len()));
                    out["threeCycles"] = json!(cycles);
                    out["tauArrows"] = json!(tau_arrows);
                }
                Err(Error::BandFound(b)) => {
                    text.push_str(&format!("representation-infinite (band {b})\n"));
                    out["band"] = json!(b);
                }
                Err(e) => return Err(e.into()),
            }
            Report::new(text, out)
        }
        Command::Audit { samples, seed, .. } => {
            let r = audit_theorems::<F>(&p, *samples, *seed)?;
            let mut text = String::new();
            for a in &r.audits {
                text.push_str(&format!("{}: {}\n", a.name, if a.passed { "passed" } else { "FAILED" }));
            }
            let mut rep = Report::new(text, r.to_json());
            if !r.passed() {
                rep.exit = 2;
            }
            rep
        }
        Command::Family | Command::Witness => unreachable!("handled above"),
    };
    Ok(report)
}

fn lines(items: &[String]) -> String {
    items.iter().map(|s| format!("{s}\n")).collect()
}

macro_rules! dispatch {
    ($cli:expr, $ch:expr, [$($p:literal),*]) => {
        match $ch {
            0 => run::<Rational>($cli),
            $($p => run::<Fp<$p>>($cli),)*
            other => Err(Failure::Usage(format!("unsupported characteristic {other}"))),
        }
    };
}

fn emit(cli: &Cli, r: &Report) -> std::result::Result<(), Failure> {
    let body = match (&r.dot, cli.opts.json) {
        (Some(dot), _) => dot.clone(),
        (None, true) => format!("{}\n", serde_json::to_string_pretty(&r.json).expect("json serializes")),
        (None, false) => r.text.clone(),
    };
    match &cli.opts.output {
        Some(path) => {
            let path = match std::env::var_os(OUTPUT_DIR_VAR) {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path.clone(),
            };
            std::fs::write(&path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Command::Knit { dot: true, .. } = cli.command {
        if cli.opts.json {
            eprintln!("error[usage]: --dot and --json are exclusive");
            return ExitCode::from(3);
        }
    }
    let result = dispatch!(&cli, cli.opts.characteristic, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 1009, 10007, 32003, 65521]);
    let failure = match result {
        Ok(r) => match emit(&cli, &r) {
            Ok(()) => return ExitCode::from(r.exit),
            Err(f) => f,
        },
        Err(f) => f,
    };
    let (code, message, exit) = match failure {
        Failure::Domain(e) => (e.code().to_string(), e.to_string(), 1),
        Failure::Usage(m) => ("usage".to_string(), m, 3),
        Failure::Io(m) => ("io".to_string(), m, 1),
    };
    if cli.opts.json {
        println!("{}", json!({ "error": { "code": code, "message": message } }));
    } else {
        eprintln!("error[{code}]: {message}");
    }
    ExitCode::from(exit)
}
