use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rademacher::bounds::McParams;
use rademacher::harness::{
    chaos_rows, parse_key_values, run_bound, run_rate, run_verify, statistic_from_map, to_json, write_rows_csv,
    RateStudyConfig, RunMode, TriplePolicy,
};
use rademacher::{Error, Result};

#[derive(Parser)]
#[command(name = "rademacher", version, about = "Normal approximation bounds for functionals of Rademacher sequences")]
struct Cli {
    /// Base seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// key=value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Default)]
struct StatisticArgs {
    /// triangles, degree, subgraph or tree.
    #[arg(long)]
    statistic: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Fixed edge (or retention) probability.
    #[arg(long)]
    p: Option<String>,
    /// Target degree.
    #[arg(long)]
    d: Option<String>,
    /// Pattern edges such as `0-1,1-2`.
    #[arg(long)]
    pattern: Option<String>,
    /// `regular:<D>` or `file:<path>`.
    #[arg(long)]
    tree: Option<String>,
    /// Hölder exponents `r,s,t`, or `auto`.
    #[arg(long)]
    triple: Option<String>,
}

impl StatisticArgs {
    fn apply(&self, map: &mut BTreeMap<String, String>) {
        let pairs = [
            ("statistic", &self.statistic),
            ("alpha", &self.alpha),
            ("theta", &self.theta),
            ("p", &self.p),
            ("d", &self.d),
            ("pattern", &self.pattern),
            ("tree", &self.tree),
            ("triple", &self.triple),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        if self.p.is_some() && self.statistic.as_deref() != Some("tree") {
            map.remove("alpha");
            map.remove("theta");
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite on randomized small instances.
    Verify {
        /// Largest number of coordinates in the random instances.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        /// Number of consecutive seeds to run.
        #[arg(long, default_value_t = 1)]
        repeats: u64,
    },
    /// Bound terms for one statistic at one size.
    Bound {
        #[command(flatten)]
        stat: StatisticArgs,
        /// Vertex count, or depth for regular trees.
        #[arg(long)]
        n: usize,
        /// exact or mc.
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Bound totals across sizes with log-log slope fits.
    Rate {
        #[command(flatten)]
        stat: StatisticArgs,
        /// Comma-separated sizes.
        #[arg(long)]
        sizes: Option<String>,
        /// One sample count, or one per size.
        #[arg(long)]
        samples: Option<String>,
        /// exact or mc.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Chaos coefficients of a small statistic.
    Decompose {
        #[command(flatten)]
        stat: StatisticArgs,
        #[arg(long)]
        n: usize,
        /// Coefficients of at most this magnitude are omitted.
        #[arg(long, default_value_t = 1e-12)]
        threshold: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_map(cli: &Cli) -> Result<BTreeMap<String, String>> {
    match &cli.config {
        Some(path) => parse_key_values(&std::fs::read_to_string(path)?),
        None => Ok(BTreeMap::new()),
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let mut map = load_map(&cli)?;
    if let Some(seed) = cli.seed {
        map.insert("seed".into(), seed.to_string());
    }
    let seed: u64 = map.get("seed").map(|s| s.parse()).transpose().map_err(|e| Error::Invalid(format!("seed: {e}")))?.unwrap_or(0);

    match &cli.command {
        Command::Verify { cap, repeats } => {
            let mut ok = true;
            let mut reports = Vec::new();
            for s in seed..seed + repeats.max(&1) {
                let r = run_verify(*cap, s)?;
                ok &= r.passed;
                reports.push(r);
            }
            let text = match cli.format {
                Format::Json => to_json(&reports)? + "\n",
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        seed: u64,
                        name: &'a str,
                        residual: f64,
                        tolerance: f64,
                        passed: bool,
                    }
                    let rows: Vec<Row> = reports
                        .iter()
                        .flat_map(|r| {
                            r.checks.iter().map(move |c| Row {
                                seed: r.seed,
                                name: &c.name,
                                residual: c.residual,
                                tolerance: c.tolerance,
                                passed: c.passed,
                            })
                        })
                        .collect();
                    csv_string(&rows)?
                }
            };
            emit(&text, None)?;
            Ok(ok)
        }
        Command::Bound { stat, n, mode, samples } => {
            stat.apply(&mut map);
            let spec = statistic_from_map(&map)?;
            let triple = triple_policy(&map)?;
            let mode: RunMode = mode.parse()?;
            let report = run_bound(&spec, *n, mode, triple, McParams::new(*samples, seed))?;
            let text = match cli.format {
                Format::Json => to_json(&report)? + "\n",
                Format::Csv => {
                    let mut out = String::from("statistic,n,p,term_A1,term_A2,term_A3,term_A4,term_A5,term_A6,term_A7,total,dK_exact,dK_emp,dK_stderr\n");
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    let terms: Vec<String> = report.bound.terms.iter().map(|t| t.to_string()).collect();
                    out += &format!(
                        "{},{},{},{},{},{},{},{}\n",
                        report.statistic,
                        report.n,
                        report.p,
                        terms.join(","),
                        report.bound.total,
                        opt(report.exact_dk),
                        opt(report.empirical_dk.map(|e| e.value)),
                        opt(report.empirical_dk.map(|e| e.stderr)),
                    );
                    out
                }
            };
            emit(&text, None)?;
            Ok(true)
        }
        Command::Rate { stat, sizes, samples, mode, output } => {
            stat.apply(&mut map);
            for (k, v) in [("sizes", sizes), ("samples", samples), ("mode", mode)] {
                if let Some(v) = v {
                    map.insert(k.into(), v.clone());
                }
            }
            if let Some(o) = output {
                map.insert("output".into(), o.display().to_string());
            }
            let config = RateStudyConfig::from_map(&map)?;
            let report = run_rate(&config)?;
            let text = match cli.format {
                Format::Json => to_json(&report)? + "\n",
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_rows_csv(&report.rows, &mut buf)?;
                    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))?
                }
            };
            emit(&text, config.output.as_ref())?;
            let theory = report.theoretical_exponent.map(|t| format!("{t:.3}")).unwrap_or_else(|| "n/a".into());
            let dk = report.dk_fit.as_ref().map(|f| format!("{:.3}", f.slope)).unwrap_or_else(|| "n/a".into());
            eprintln!(
                "bound slope {:.3} (R² {:.4}), empirical d_K slope {dk}, theoretical exponent {theory}",
                report.bound_fit.slope, report.bound_fit.r_squared
            );
            Ok(true)
        }
        Command::Decompose { stat, n, threshold } => {
            stat.apply(&mut map);
            let spec = statistic_from_map(&map)?;
            let inst = spec.instance(*n)?;
            let rows = chaos_rows(&inst.space, inst.functional.as_ref(), *threshold)?;
            let text = match cli.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Entry<'a> {
                        order: usize,
                        indices: &'a [usize],
                        value: f64,
                    }
                    let entries: Vec<Entry> =
                        rows.iter().map(|(o, i, v)| Entry { order: *o, indices: i, value: *v }).collect();
                    to_json(&entries)? + "\n"
                }
                Format::Csv => {
                    let mut out = String::from("order,indices,value\n");
                    for (o, idx, v) in &rows {
                        let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                        out += &format!("{o},{},{v}\n", idx.join(" "));
                    }
                    out
                }
            };
            emit(&text, None)?;
            Ok(true)
        }
    }
}

fn triple_policy(map: &BTreeMap<String, String>) -> Result<TriplePolicy> {
    match map.get("triple").map(String::as_str) {
        None | Some("auto") => Ok(TriplePolicy::Auto),
        Some(s) => {
            let v = s
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Invalid(format!("triple: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != 3 {
                return Err(Error::Invalid("triple needs three values r,s,t".into()));
            }
            Ok(TriplePolicy::Explicit(rademacher::bounds::HolderTriple::new(v[0], v[1], v[2])?))
        }
    }
}
