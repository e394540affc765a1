use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use khopos::cables::{cable_braid, cable_condition_report, CableParams};
use khopos::catalog::{catalog_entries, catalog_lookup, Presentation};
use khopos::config::{JobConfig, OutputFormat};
use khopos::cube::{khovanov_full_with, khovanov_window_with, ComputeBudget};
use khopos::diagram::{BraidWord, LinkDiagram};
use khopos::homfly::{braid_positivity_obstruction, homfly, ito_normalize, BraidPositivity};
use khopos::linalg::CoefficientRing;
use khopos::obstruct::{
    fiberedness_crosscheck, positive_pattern_check, positivity_or_negativity_check,
    skein_les_verify, Verdict,
};
use khopos::seifert::{euler_char, is_fibered, p1, seifert_graph};
use khopos::table::{KhTable, Window};
use khopos::{Error, Result};

#[derive(Parser)]
#[command(
    name = "kh",
    about = "Khovanov homology tables, cables and positivity obstructions",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the full homology table of a link diagram
    Compute {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: ComputeOpts,
    },
    /// Compute homology on a homological-degree window
    Window {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: ComputeOpts,
        /// Lowest homological grading to certify
        #[arg(long, allow_hyphen_values = true)]
        imin: i64,
        /// Highest homological grading to certify
        #[arg(long, allow_hyphen_values = true)]
        imax: i64,
    },
    /// Dump the Seifert graph of the oriented resolution
    Graph {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run the positive-link pattern check on a homology table
    Obstruct {
        /// Table JSON produced by compute/window
        #[arg(long, conflicts_with_all = ["braid", "pd", "name"])]
        table: Option<PathBuf>,
        /// Mirror-diagram table JSON for the two-sided check
        #[arg(long)]
        with_mirror: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        /// Also compute the mirror table from the diagram source
        #[arg(long, conflicts_with = "table")]
        mirror: bool,
        /// Cross-check fiberedness and cycle count (positive diagrams)
        #[arg(long, conflicts_with_all = ["table", "with_mirror", "mirror"])]
        crosscheck: bool,
        #[command(flatten)]
        opts: ComputeOpts,
    },
    /// Build the cable of a braid closure and report its framing data
    Cable {
        #[command(flatten)]
        source: Source,
        /// Number of parallel strands
        #[arg(long)]
        p: u32,
        /// Framing parameter of the cable
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        /// Extra negative half twists
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Companion Seifert genus, enables the condition report
        #[arg(long)]
        genus: Option<i64>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Compute the skein polynomial, optionally normalized
    Homfly {
        #[command(flatten)]
        source: Source,
        /// Also emit the normalized polynomial in (a, z)
        #[arg(long)]
        normalize: bool,
        /// Euler characteristic for the normalization (default: sharpest fit)
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
        /// Screen the normalized coefficients for braid positivity
        #[arg(long)]
        positivity: bool,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// List built-in link presentations, or show one entry
    Catalog {
        name: Option<String>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Check the long exact sequence split at a negative crossing
    LesVerify {
        #[command(flatten)]
        source: Source,
        /// Index of the negative crossing to split at
        #[arg(long)]
        crossing: usize,
        /// Field to take dimensions over
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long, allow_hyphen_values = true, requires = "imax")]
        imin: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "imin")]
        imax: Option<i64>,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

#[derive(Args)]
struct Source {
    /// Braid word such as "2: 1 1 1"
    #[arg(long, conflicts_with_all = ["pd", "name"])]
    braid: Option<String>,
    /// PD code such as "X(1,4,2,3) X(3,2,4,1)"
    #[arg(long, conflicts_with = "name")]
    pd: Option<String>,
    /// Name of a catalog entry such as "T(2,3)"
    #[arg(long)]
    name: Option<String>,
}

impl Source {
    fn diagram(&self) -> Result<LinkDiagram> {
        match (&self.braid, &self.pd, &self.name) {
            (Some(text), None, None) => Ok(LinkDiagram::from_braid(&BraidWord::parse(text)?)),
            (None, Some(text), None) => LinkDiagram::parse_pd(text),
            (None, None, Some(name)) => catalog_lookup(name)?.diagram(),
            _ => Err(Error::Precondition(
                "give the diagram as exactly one of --braid, --pd or --name".into(),
            )),
        }
    }

    fn braid_word(&self) -> Result<BraidWord> {
        match (&self.braid, &self.pd, &self.name) {
            (Some(text), None, None) => BraidWord::parse(text),
            (None, None, Some(name)) => match catalog_lookup(name)?.presentation() {
                Presentation::Braid(text) => BraidWord::parse(text),
                Presentation::Pd(_) => Err(Error::Precondition(format!(
                    "catalog entry {name} is a PD code, but this command needs a braid word"
                ))),
            },
            _ => Err(Error::Precondition(
                "give the companion as --braid or --name (a braid-word entry)".into(),
            )),
        }
    }
}

#[derive(Args)]
struct ComputeOpts {
    /// Coefficient ring: Z, Q or Z<p>
    #[arg(long, default_value = "Z")]
    ring: String,
    /// Output format: json, table or csv
    #[arg(long, default_value = "json")]
    format: String,
    /// Worker threads (default: KHOPOS_WORKERS, then all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Cap on cube states per homological level
    #[arg(long, default_value_t = ComputeBudget::default().max_states_per_level)]
    max_states: usize,
    /// Cap on total differential entries
    #[arg(long, default_value_t = ComputeBudget::default().max_matrix_nonzeros)]
    max_nonzeros: usize,
}

impl ComputeOpts {
    fn config(&self, window: Window) -> Result<JobConfig> {
        let config = JobConfig {
            ring: CoefficientRing::parse(&self.ring)?,
            window,
            budget: ComputeBudget {
                max_states_per_level: self.max_states,
                max_matrix_nonzeros: self.max_nonzeros,
            },
            workers: self.workers,
            format: OutputFormat::parse(&self.format)?,
        };
        config.install_workers()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Compute { source, opts } => {
            let config = opts.config(Window::Full)?;
            let d = source.diagram()?;
            let t = khovanov_full_with(&d, config.ring, &config.budget)?;
            print!("{}", render_table(&t, config.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Window {
            source,
            opts,
            imin,
            imax,
        } => {
            let config = opts.config(Window::Range(imin, imax))?;
            let d = source.diagram()?;
            let t = khovanov_window_with(&d, imin, imax, config.ring, &config.budget)?;
            print!("{}", render_table(&t, config.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Graph { source, format } => {
            let format = OutputFormat::parse(&format)?;
            let d = source.diagram()?;
            run_graph(&d, format)
        }
        Cmd::Obstruct {
            table,
            with_mirror,
            source,
            mirror,
            crosscheck,
            opts,
        } => {
            let config = opts.config(Window::Full)?;
            if crosscheck {
                let d = source.diagram()?;
                let report = fiberedness_crosscheck(&d, config.ring)?;
                return finish_obstruction(&report, config.format);
            }
            let (t, tm) = match table {
                Some(path) => {
                    let t = KhTable::from_json_text(&std::fs::read_to_string(path)?)?;
                    let tm = match with_mirror {
                        Some(path) => {
                            Some(KhTable::from_json_text(&std::fs::read_to_string(path)?)?)
                        }
                        None => None,
                    };
                    (t, tm)
                }
                None => {
                    let d = source.diagram()?;
                    let t = khovanov_full_with(&d, config.ring, &config.budget)?;
                    let tm = if mirror {
                        Some(khovanov_full_with(
                            &d.mirror(),
                            config.ring,
                            &config.budget,
                        )?)
                    } else if let Some(path) = with_mirror {
                        Some(KhTable::from_json_text(&std::fs::read_to_string(path)?)?)
                    } else {
                        None
                    };
                    (t, tm)
                }
            };
            let report = match &tm {
                Some(tm) => positivity_or_negativity_check(&t, tm),
                None => positive_pattern_check(&t),
            };
            finish_obstruction(&report, config.format)
        }
        Cmd::Cable {
            source,
            p,
            q,
            m,
            genus,
            format,
        } => {
            let format = OutputFormat::parse(&format)?;
            run_cable(&source, p, q, m, genus, format)
        }
        Cmd::Homfly {
            source,
            normalize,
            chi,
            positivity,
            format,
        } => {
            let format = OutputFormat::parse(&format)?;
            run_homfly(&source, normalize || positivity, chi, positivity, format)
        }
        Cmd::Catalog { name, format } => {
            let format = OutputFormat::parse(&format)?;
            run_catalog(name.as_deref(), format)
        }
        Cmd::LesVerify {
            source,
            crossing,
            ring,
            imin,
            imax,
            format,
        } => {
            let format = OutputFormat::parse(&format)?;
            let ring = CoefficientRing::parse(&ring)?;
            let d = source.diagram()?;
            let window = imin.zip(imax);
            let report = skein_les_verify(&d, crossing, ring, window)?;
            match format {
                OutputFormat::Json => println!("{}", report.to_json()),
                OutputFormat::Table => println!("{}", report.to_text()),
                OutputFormat::Csv => return Err(csv_unsupported()),
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn csv_unsupported() -> Error {
    Error::Precondition("csv output applies to homology tables only".into())
}

fn render_table(t: &KhTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut text = t.to_json_text();
            text.push('\n');
            text
        }
        OutputFormat::Table => t.to_grid_text(),
        OutputFormat::Csv => t.to_csv(),
    }
}

fn finish_obstruction(
    report: &khopos::obstruct::ObstructionReport,
    format: OutputFormat,
) -> Result<ExitCode> {
    match format {
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Table => println!("{}", report.to_text()),
        OutputFormat::Csv => return Err(csv_unsupported()),
    }
    Ok(if report.verdict() == Verdict::Obstructed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_graph(d: &LinkDiagram, format: OutputFormat) -> Result<ExitCode> {
    let g = seifert_graph(d);
    let reduced = g.reduce();
    match format {
        OutputFormat::Json => {
            let mut out = json!({
                "seifert": g.to_json(),
                "reduced": reduced.to_json(),
                "positive": d.is_positive(),
            });
            if d.is_positive() && !d.is_empty() {
                if let (Ok(cycles), Ok(fibered)) = (p1(d), is_fibered(d)) {
                    out["p1"] = json!(cycles);
                    out["fibered"] = json!(fibered);
                }
                if let Ok(chi) = euler_char(d) {
                    out["eulerChar"] = json!(chi);
                }
            }
            println!("{out}");
        }
        OutputFormat::Table => {
            println!("seifert graph: {}", g.to_text());
            println!("reduced:       {}", reduced.to_text());
            if d.is_positive() && !d.is_empty() {
                if let (Ok(cycles), Ok(fibered)) = (p1(d), is_fibered(d)) {
                    println!("p1 = {cycles}, fibered = {fibered}");
                }
                if let Ok(chi) = euler_char(d) {
                    println!("euler characteristic = {chi}");
                }
            }
        }
        OutputFormat::Csv => return Err(csv_unsupported()),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_cable(
    source: &Source,
    p: u32,
    q: i64,
    m: u32,
    genus: Option<i64>,
    format: OutputFormat,
) -> Result<ExitCode> {
    let companion = source.braid_word()?;
    let params = CableParams::new(p, q, m)?;
    let word = cable_braid(&companion, params)?;
    let w = companion.exponent_sum();
    let twists = params.twist_count(w);
    let conditions = genus.map(|g| cable_condition_report(g, w, p, q));
    match format {
        OutputFormat::Json => {
            let mut out = json!({
                "companion": companion.to_text(),
                "companionWrithe": w,
                "p": p,
                "q": q,
                "m": m,
                "twists": twists,
                "cable": word.to_text(),
                "strands": word.strands(),
                "letters": word.letters().len(),
                "writhe": word.exponent_sum(),
            });
            if let Some(ref c) = conditions {
                out["conditions"] = serde_json::to_value(c)?;
            }
            println!("{out}");
        }
        OutputFormat::Table => {
            println!("companion  {}  (writhe {w})", companion.to_text());
            println!(
                "cable      {}  ({} letters, writhe {})",
                word.to_text(),
                word.letters().len(),
                word.exponent_sum()
            );
            println!("framing    p = {p}, q = {q}, m = {m}, twists = {twists}");
            if let Some(c) = conditions {
                println!(
                    "conditions l-space: {}, positive: {}, kh-pattern: {}",
                    c.lspace_compatible, c.positivity_guaranteed, c.thin_columns_apply
                );
            }
        }
        OutputFormat::Csv => return Err(csv_unsupported()),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_homfly(
    source: &Source,
    normalize: bool,
    chi: Option<i64>,
    positivity: bool,
    format: OutputFormat,
) -> Result<ExitCode> {
    let d = source.diagram()?;
    let poly = homfly(&d)?;
    let mut normalized = None;
    let mut chi_used = None;
    if normalize {
        let chi = match chi {
            Some(chi) => chi,
            None => {
                let min_v = poly.terms().map(|((e1, _), _)| e1).min().ok_or_else(|| {
                    Error::Contract("skein polynomial of a nonempty link is nonzero".into())
                })?;
                1 - min_v
            }
        };
        chi_used = Some(chi);
        normalized = Some(ito_normalize(&poly, chi, d.component_count())?);
    }
    let verdict = normalized
        .as_ref()
        .filter(|_| positivity)
        .map(braid_positivity_obstruction);
    match format {
        OutputFormat::Json => {
            let mut out = json!({"homfly": poly.to_json()});
            if let Some(ref h) = normalized {
                out["normalized"] = h.to_json();
                out["chiUsed"] = json!(chi_used);
            }
            if let Some(v) = verdict {
                out["positivity"] = json!(v.label());
            }
            println!("{out}");
        }
        OutputFormat::Table => {
            println!("P = {}", poly.to_text());
            if let Some(ref h) = normalized {
                println!(
                    "H = {}  (chi = {})",
                    h.to_text(),
                    chi_used.unwrap_or_default()
                );
            }
            if let Some(v) = verdict {
                println!("positivity: {}", v.label());
            }
        }
        OutputFormat::Csv => return Err(csv_unsupported()),
    }
    Ok(if verdict == Some(BraidPositivity::Obstructed) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_catalog(name: Option<&str>, format: OutputFormat) -> Result<ExitCode> {
    match name {
        Some(name) => {
            let entry = catalog_lookup(name)?;
            match format {
                OutputFormat::Json => {
                    let kind = match entry.presentation() {
                        Presentation::Braid(_) => "braid",
                        Presentation::Pd(_) => "pd",
                    };
                    println!(
                        "{}",
                        json!({
                            "name": entry.name(),
                            "kind": kind,
                            "presentation": entry.presentation_text(),
                            "writhe": entry.writhe(),
                            "note": entry.note(),
                        })
                    );
                }
                OutputFormat::Table => {
                    println!("{}: {}", entry.name(), entry.presentation_text());
                    println!("writhe {}; {}", entry.writhe(), entry.note());
                }
                OutputFormat::Csv => return Err(csv_unsupported()),
            }
        }
        None => match format {
            OutputFormat::Json => {
                let list: Vec<Value> = catalog_entries()
                    .iter()
                    .map(|e| {
                        json!({
                            "name": e.name(),
                            "presentation": e.presentation_text(),
                            "note": e.note(),
                        })
                    })
                    .collect();
                println!("{}", Value::Array(list));
            }
            OutputFormat::Table => {
                for e in catalog_entries() {
                    println!("{:16} {}", e.name(), e.note());
                }
            }
            OutputFormat::Csv => return Err(csv_unsupported()),
        },
    }
    Ok(ExitCode::SUCCESS)
}
