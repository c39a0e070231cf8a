//! Experiment orchestration: statistic specifications, single bound runs,
//! rate studies with log-log slope fits, config files and report
//! serialization.

mod verify;

pub use verify::{
    run_verify, run_verify_with, triangle_gradient_laws, GradientFn, IdentityCheck, VerifyReport, IDENTITY_TOLERANCE,
};

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    exact_kolmogorov, exact_moments, holder_select, malliavin_stein_bound, second_order_bound, BoundBreakdown,
    BoundMode, HolderTriple, KolmogorovEstimate, MalliavinSteinBound, McParams,
};
use crate::error::{Error, Result};
use crate::functional::{Functional, Normalized};
use crate::montecarlo::DEFAULT_BATCHES;
use crate::space::RademacherSpace;
use crate::stats::{
    degree_statistic, percolation_statistic, subgraph_statistic, theoretical_rate, triangle_statistic,
    ErdosRenyiModel, StatisticKind, SubgraphPattern, TreeModel,
};

/// Edge probability `p = θ n^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeProbability {
    pub alpha: f64,
    pub theta: f64,
}

impl EdgeProbability {
    pub fn fixed(p: f64) -> Self {
        Self { alpha: 0.0, theta: p }
    }

    fn model(&self, n: usize) -> Result<ErdosRenyiModel> {
        ErdosRenyiModel::new(n, self.alpha, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeSpec {
    /// `D`-regular tree; the size parameter is the depth.
    Regular(usize),
    /// Parent/child list; the size parameter is ignored.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatisticSpec {
    Triangles { edge: EdgeProbability },
    Degree { d: usize, edge: EdgeProbability },
    Subgraph { pattern: String, edge: EdgeProbability },
    Tree { tree: TreeSpec, p: f64 },
}

/// A statistic built at one size.
pub struct Instance {
    pub label: String,
    pub size: usize,
    pub p: f64,
    pub space: RademacherSpace,
    pub functional: Box<dyn Functional>,
    /// Abscissa of the rate fit: `n` for graphs, the edge count for trees.
    pub rate_size: f64,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("label", &self.label)
            .field("size", &self.size)
            .field("p", &self.p)
            .field("indices", &self.space.len())
            .finish()
    }
}

impl StatisticSpec {
    pub fn label(&self) -> String {
        match self {
            Self::Triangles { .. } => "triangles".into(),
            Self::Degree { d, .. } => format!("degree{d}"),
            Self::Subgraph { pattern, .. } => format!("subgraph[{pattern}]"),
            Self::Tree { tree: TreeSpec::Regular(d), .. } => format!("tree{d}"),
            Self::Tree { tree: TreeSpec::File(path), .. } => format!("tree[{}]", path.display()),
        }
    }

    pub fn kind(&self) -> StatisticKind {
        match self {
            Self::Triangles { .. } => StatisticKind::Triangles,
            Self::Degree { d, .. } => StatisticKind::Degree(*d),
            Self::Subgraph { .. } => StatisticKind::Subgraph,
            Self::Tree { .. } => StatisticKind::TreePercolation,
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Self::Triangles { edge } | Self::Degree { edge, .. } | Self::Subgraph { edge, .. } => edge.alpha,
            Self::Tree { .. } => 0.0,
        }
    }

    /// Exponent of the known rate, when the parameters fall in a proven regime.
    pub fn theoretical_exponent(&self) -> Option<f64> {
        theoretical_rate(self.kind(), self.alpha()).ok()
    }

    /// Hölder exponents chosen from `α` for graph counts and `(2, 4, 4)`
    /// otherwise.
    pub fn auto_triple(&self) -> Result<HolderTriple> {
        match self {
            Self::Triangles { edge } | Self::Subgraph { edge, .. } if edge.alpha < 1.0 => holder_select(edge.alpha),
            _ => Ok(HolderTriple::standard()),
        }
    }

    pub fn instance(&self, size: usize) -> Result<Instance> {
        let label = self.label();
        let graph = |model: &ErdosRenyiModel, functional: Box<dyn Functional>| Instance {
            label: label.clone(),
            size,
            p: model.p(),
            space: model.space(),
            functional,
            rate_size: size as f64,
        };
        match self {
            Self::Triangles { edge } => {
                let model = edge.model(size)?;
                Ok(graph(&model, Box::new(triangle_statistic(&model)?)))
            }
            Self::Degree { d, edge } => {
                let model = edge.model(size)?;
                Ok(graph(&model, Box::new(degree_statistic(&model, *d)?)))
            }
            Self::Subgraph { pattern, edge } => {
                let model = edge.model(size)?;
                let pattern = SubgraphPattern::parse(pattern)?;
                Ok(graph(&model, Box::new(subgraph_statistic(&model, &pattern)?)))
            }
            Self::Tree { tree, p } => {
                let model = match tree {
                    TreeSpec::Regular(d) => TreeModel::regular(*d, size)?,
                    TreeSpec::File(path) => TreeModel::parse(&std::fs::read_to_string(path)?)?,
                };
                let stat = percolation_statistic(&model, *p)?;
                Ok(Instance {
                    label: label.clone(),
                    size,
                    p: *p,
                    space: stat.space(),
                    rate_size: model.edge_count() as f64,
                    functional: Box::new(stat),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriplePolicy {
    Auto,
    Explicit(HolderTriple),
}

impl TriplePolicy {
    pub fn resolve(&self, spec: &StatisticSpec) -> Result<HolderTriple> {
        match self {
            Self::Auto => spec.auto_triple(),
            Self::Explicit(t) => HolderTriple::new(t.r, t.s, t.t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Exact,
    MonteCarlo,
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "mc" | "monte_carlo" | "montecarlo" => Ok(Self::MonteCarlo),
            _ => Err(Error::Invalid(format!("unknown mode `{s}` (expected exact or mc)"))),
        }
    }
}

/// Result of one bound computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub statistic: String,
    pub n: usize,
    pub p: f64,
    pub indices: usize,
    pub bound: BoundBreakdown,
    /// Four-term bound, exact mode only.
    pub malliavin_stein: Option<MalliavinSteinBound>,
    pub exact_dk: Option<f64>,
    pub empirical_dk: Option<KolmogorovEstimate>,
}

/// Bound terms for one statistic at one size. Exact mode normalizes by
/// enumeration and adds the four-term bound and the exact Kolmogorov
/// distance.
pub fn run_bound(
    spec: &StatisticSpec,
    size: usize,
    mode: RunMode,
    triple: TriplePolicy,
    params: McParams,
) -> Result<BoundReport> {
    let inst = spec.instance(size)?;
    let triple = triple.resolve(spec)?;
    let f = inst.functional.as_ref();
    let (bound, malliavin_stein, exact_dk) = match mode {
        RunMode::Exact => {
            let (mean, var) = exact_moments(&inst.space, f)?;
            let nf = Normalized::new(f, mean, var)?;
            let mut b = second_order_bound(&inst.space, &nf, triple, BoundMode::Exact)?;
            b.normalization = Some(crate::bounds::Normalization {
                mean,
                variance: var,
                source: crate::bounds::NormalizationSource::Enumeration,
            });
            let ms = malliavin_stein_bound(&inst.space, &nf)?;
            let dk = exact_kolmogorov(&inst.space, &nf)?;
            (b, Some(ms), Some(dk))
        }
        RunMode::MonteCarlo => (second_order_bound(&inst.space, f, triple, BoundMode::MonteCarlo(params))?, None, None),
    };
    Ok(BoundReport {
        statistic: inst.label,
        n: size,
        p: inst.p,
        indices: inst.space.len(),
        empirical_dk: bound.empirical_dk,
        bound,
        malliavin_stein,
        exact_dk,
    })
}

/// Parameters of a rate study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStudyConfig {
    pub statistic: StatisticSpec,
    pub sizes: Vec<usize>,
    /// One count for every size, or one per size.
    pub samples: Vec<usize>,
    pub triple: TriplePolicy,
    pub seed: u64,
    pub mode: RunMode,
    pub batches: usize,
    pub pilot_factor: usize,
    pub output: Option<PathBuf>,
}

impl RateStudyConfig {
    pub fn new(statistic: StatisticSpec, sizes: Vec<usize>, samples: usize, seed: u64) -> Self {
        Self {
            statistic,
            sizes,
            samples: vec![samples],
            triple: TriplePolicy::Auto,
            seed,
            mode: RunMode::MonteCarlo,
            batches: DEFAULT_BATCHES,
            pilot_factor: 10,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.len() < 3 {
            return Err(Error::Invalid(format!("slope fitting needs at least 3 sizes, got {}", self.sizes.len())));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("sizes must be strictly increasing".into()));
        }
        if self.samples.is_empty() || (self.samples.len() != 1 && self.samples.len() != self.sizes.len()) {
            return Err(Error::Invalid("give one sample count or one per size".into()));
        }
        Ok(())
    }

    pub fn samples_for(&self, i: usize) -> usize {
        if self.samples.len() == 1 {
            self.samples[0]
        } else {
            self.samples[i]
        }
    }

    fn params(&self, i: usize) -> McParams {
        McParams {
            samples: self.samples_for(i),
            seed: self.seed,
            batches: self.batches.min(self.samples_for(i).max(1)),
            pilot_factor: self.pilot_factor,
        }
    }

    /// Parses a line-oriented `key = value` file. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&parse_key_values(text)?)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        const KNOWN: &[&str] = &[
            "statistic", "alpha", "theta", "p", "d", "pattern", "tree", "sizes", "samples", "triple", "seed",
            "mode", "batches", "pilot_factor", "output",
        ];
        if let Some(k) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Invalid(format!("unknown key `{k}`")));
        }
        let statistic = statistic_from_map(map)?;
        let get = |k: &str| map.get(k).map(String::as_str);
        let sizes = match get("sizes") {
            Some(s) => parse_list(s, "sizes")?,
            None => return Err(Error::Invalid("missing key `sizes`".into())),
        };
        let samples = match get("samples") {
            Some(s) => parse_list(s, "samples")?,
            None => vec![100_000],
        };
        let triple = match get("triple") {
            None | Some("auto") => TriplePolicy::Auto,
            Some(s) => {
                let v: Vec<f64> = parse_list(s, "triple")?;
                if v.len() != 3 {
                    return Err(Error::Invalid("triple needs three values r,s,t".into()));
                }
                TriplePolicy::Explicit(HolderTriple::new(v[0], v[1], v[2])?)
            }
        };
        let config = Self {
            statistic,
            sizes,
            samples,
            triple,
            seed: parse_value(get("seed").unwrap_or("0"), "seed")?,
            mode: get("mode").unwrap_or("mc").parse()?,
            batches: parse_value(get("batches").unwrap_or("100"), "batches")?,
            pilot_factor: parse_value(get("pilot_factor").unwrap_or("10"), "pilot_factor")?,
            output: get("output").map(PathBuf::from),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Key/value pairs of a config file.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, message: format!("expected key=value, got `{line}`") })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: FromStr>(s: &str, key: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.trim().parse().map_err(|e| Error::Invalid(format!("bad value `{s}` for `{key}`: {e}")))
}

fn parse_list<T: FromStr>(s: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_value(t, key)).collect()
}

/// Builds the statistic from `statistic`, `alpha`/`theta` or `p`, `d`,
/// `pattern` and `tree` keys.
pub fn statistic_from_map(map: &BTreeMap<String, String>) -> Result<StatisticSpec> {
    let get = |k: &str| map.get(k).map(String::as_str);
    let edge = || -> Result<EdgeProbability> {
        match (get("p"), get("alpha"), get("theta")) {
            (Some(p), None, None) => Ok(EdgeProbability::fixed(parse_value(p, "p")?)),
            (Some(_), _, _) => Err(Error::Invalid("give either p or alpha/theta".into())),
            (None, alpha, theta) => Ok(EdgeProbability {
                alpha: parse_value(alpha.unwrap_or("0"), "alpha")?,
                theta: parse_value(theta.unwrap_or("0.3"), "theta")?,
            }),
        }
    };
    match get("statistic").ok_or_else(|| Error::Invalid("missing key `statistic`".into()))? {
        "triangles" => Ok(StatisticSpec::Triangles { edge: edge()? }),
        "degree" => Ok(StatisticSpec::Degree { d: parse_value(get("d").unwrap_or("0"), "d")?, edge: edge()? }),
        "subgraph" => {
            let pattern = get("pattern").ok_or_else(|| Error::Invalid("subgraph needs `pattern`".into()))?;
            SubgraphPattern::parse(pattern)?;
            Ok(StatisticSpec::Subgraph { pattern: pattern.to_string(), edge: edge()? })
        }
        "tree" => {
            let tree = match get("tree").unwrap_or("regular:2").split_once(':') {
                Some(("regular", d)) => TreeSpec::Regular(parse_value(d, "tree")?),
                Some(("file", path)) => TreeSpec::File(PathBuf::from(path)),
                _ => return Err(Error::Invalid("tree must be regular:<D> or file:<path>".into())),
            };
            Ok(StatisticSpec::Tree { tree, p: parse_value(get("p").unwrap_or("0.5"), "p")? })
        }
        other => Err(Error::Invalid(format!("unknown statistic `{other}`"))),
    }
}

/// One row of a rate study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub statistic: String,
    pub n: usize,
    pub p: f64,
    #[serde(rename = "term_A1")]
    pub term_a1: f64,
    #[serde(rename = "term_A2")]
    pub term_a2: f64,
    #[serde(rename = "term_A3")]
    pub term_a3: f64,
    #[serde(rename = "term_A4")]
    pub term_a4: f64,
    #[serde(rename = "term_A5")]
    pub term_a5: f64,
    #[serde(rename = "term_A6")]
    pub term_a6: f64,
    #[serde(rename = "term_A7")]
    pub term_a7: f64,
    pub total: f64,
    #[serde(rename = "dK_emp")]
    pub dk_emp: f64,
    #[serde(rename = "dK_stderr")]
    pub dk_stderr: f64,
    pub mode: String,
    pub seed: u64,
}

impl RateRow {
    pub fn terms(&self) -> [f64; 7] {
        [self.term_a1, self.term_a2, self.term_a3, self.term_a4, self.term_a5, self.term_a6, self.term_a7]
    }

    fn from_report(r: &BoundReport, mode: RunMode, seed: u64) -> Self {
        let t = r.bound.terms;
        let (dk_emp, dk_stderr) = match (r.empirical_dk, r.exact_dk) {
            (Some(e), _) => (e.value, e.stderr),
            (None, Some(d)) => (d, 0.0),
            (None, None) => (f64::NAN, f64::NAN),
        };
        Self {
            statistic: r.statistic.clone(),
            n: r.n,
            p: r.p,
            term_a1: t[0],
            term_a2: t[1],
            term_a3: t[2],
            term_a4: t[3],
            term_a5: t[4],
            term_a6: t[5],
            term_a7: t[6],
            total: r.bound.total,
            dk_emp,
            dk_stderr,
            mode: match mode {
                RunMode::Exact => "exact".into(),
                RunMode::MonteCarlo => "mc".into(),
            },
            seed,
        }
    }
}

/// Least-squares line through `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::Invalid("a line fit needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r_squared, residuals })
}

/// Log-log fits of bound totals and empirical distances across sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub statistic: String,
    pub rows: Vec<RateRow>,
    /// `n` for graphs, the edge count for trees.
    pub rate_sizes: Vec<f64>,
    pub bound_fit: LinearFit,
    pub dk_fit: Option<LinearFit>,
    pub theoretical_exponent: Option<f64>,
    /// `total[i+1] / total[i]`.
    pub successive_ratios: Vec<f64>,
    /// Number of sizes at which the bound total failed to decrease.
    pub monotonicity_violations: usize,
}

pub fn run_rate(config: &RateStudyConfig) -> Result<RateReport> {
    config.validate()?;
    let triple = config.triple;
    let mut rows = Vec::with_capacity(config.sizes.len());
    let mut rate_sizes = Vec::with_capacity(config.sizes.len());
    for (i, &size) in config.sizes.iter().enumerate() {
        let report = run_bound(&config.statistic, size, config.mode, triple, config.params(i))?;
        rate_sizes.push(config.statistic.instance(size)?.rate_size);
        rows.push(RateRow::from_report(&report, config.mode, config.seed));
    }
    let lx: Vec<f64> = rate_sizes.iter().map(|s| s.ln()).collect();
    let totals: Vec<f64> = rows.iter().map(|r| r.total).collect();
    let bound_fit = fit_line(&lx, &totals.iter().map(|t| t.ln()).collect::<Vec<_>>())?;
    let dks: Vec<f64> = rows.iter().map(|r| r.dk_emp).collect();
    let dk_fit = if dks.iter().all(|d| d.is_finite() && *d > 0.0) {
        Some(fit_line(&lx, &dks.iter().map(|d| d.ln()).collect::<Vec<_>>())?)
    } else {
        None
    };
    let successive_ratios: Vec<f64> = totals.windows(2).map(|w| w[1] / w[0]).collect();
    let monotonicity_violations = totals.windows(2).filter(|w| w[1] >= w[0]).count();
    Ok(RateReport {
        statistic: config.statistic.label(),
        rows,
        rate_sizes,
        bound_fit,
        dk_fit,
        theoretical_exponent: config.statistic.theoretical_exponent(),
        successive_ratios,
        monotonicity_violations,
    })
}

pub fn write_rows_csv<W: Write>(rows: &[RateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: Read>(input: R) -> Result<Vec<RateRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Io(e.to_string())))
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
}

/// Chaos coefficients as `(order, indices, kernel value)` rows, skipping
/// entries with magnitude at most `threshold`.
pub fn chaos_rows(space: &RademacherSpace, f: &dyn Functional, threshold: f64) -> Result<Vec<(usize, Vec<usize>, f64)>> {
    let decomp = crate::chaos::stroock_decompose(space, f)?;
    let mut rows = vec![(0, Vec::new(), decomp.mean())];
    for n in 1..=space.len() {
        for (tuple, value) in decomp.kernel_with_threshold(n, threshold).entries() {
            rows.push((n, tuple.to_vec(), value));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangles(p: f64) -> StatisticSpec {
        StatisticSpec::Triangles { edge: EdgeProbability::fixed(p) }
    }

    #[test]
    fn exact_bound_runs_dominate_the_distance() {
        let params = McParams::new(1000, 0);
        for spec in [triangles(0.3), StatisticSpec::Degree { d: 0, edge: EdgeProbability::fixed(0.3) }] {
            let r = run_bound(&spec, 5, RunMode::Exact, TriplePolicy::Auto, params).unwrap();
            let dk = r.exact_dk.unwrap();
            assert!(r.bound.total >= dk && r.malliavin_stein.as_ref().unwrap().total >= dk, "{r:?}");
        }
    }

    #[test]
    fn line_fit_recovers_exact_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14 && (fit.intercept - 2.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
        assert!(fit_line(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn config_parsing() {
        let text = "# triangles\nstatistic = triangles\nalpha = 0.6\ntheta = 1\nsizes = 16, 24, 32\nsamples = 2000\nseed = 9\ntriple = auto\n";
        let c = RateStudyConfig::parse(text).unwrap();
        assert_eq!(c.sizes, vec![16, 24, 32]);
        assert_eq!(c.seed, 9);
        assert_eq!(c.statistic, StatisticSpec::Triangles { edge: EdgeProbability { alpha: 0.6, theta: 1.0 } });
        assert_eq!(c.triple.resolve(&c.statistic).unwrap().r, 2.0);
        assert!(RateStudyConfig::parse("statistic = triangles\nsizes = 16, 24\n").is_err());
        assert!(RateStudyConfig::parse("statistic = triangles\nsizes = 16, 32, 24\n").is_err());
        assert!(RateStudyConfig::parse("statistic = triangles\nsizes = 4,5,6\nbogus = 1\n").is_err());
        assert!(matches!(parse_key_values("statistic triangles"), Err(Error::Parse { line: 1, .. })));
        let c = RateStudyConfig::parse("statistic = tree\ntree = regular:3\np = 0.5\nsizes = 2,3,4\ntriple = 2,4,4\n")
            .unwrap();
        assert_eq!(c.statistic, StatisticSpec::Tree { tree: TreeSpec::Regular(3), p: 0.5 });
        let c = RateStudyConfig::parse("statistic = subgraph\npattern = 0-1,1-2\np = 0.3\nsizes = 5,6,7\n").unwrap();
        assert_eq!(c.statistic.label(), "subgraph[0-1,1-2]");
    }

    #[test]
    fn reports_round_trip() {
        let mut config = RateStudyConfig::new(triangles(0.3), vec![6, 8, 10], 2000, 4);
        config.batches = 20;
        let report = run_rate(&config).unwrap();
        let mut buf = Vec::new();
        write_rows_csv(&report.rows, &mut buf).unwrap();
        let header = String::from_utf8(buf.clone()).unwrap();
        assert!(header.starts_with(
            "statistic,n,p,term_A1,term_A2,term_A3,term_A4,term_A5,term_A6,term_A7,total,dK_emp,dK_stderr,mode,seed"
        ));
        assert_eq!(read_rows_csv(buf.as_slice()).unwrap(), report.rows);
        let json = to_json(&report).unwrap();
        assert_eq!(from_json::<RateReport>(&json).unwrap(), report);
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.theoretical_exponent, Some(-1.0));
    }

    #[test]
    fn chaos_rows_of_a_product() {
        let space = RademacherSpace::symmetric(2).unwrap();
        let f = crate::functional::CoordinateProduct::new(&space, &[0, 1]).unwrap();
        let rows = chaos_rows(&space, &f, 1e-12).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].0, 2);
        assert_eq!(rows[1].1, vec![0, 1]);
        assert!((rows[1].2 - 0.5).abs() < 1e-15);
    }
}
