//! Study orchestration: configuration, the distribution x scheme x
//! estimator matrix, and result tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::distributions::{horizon_true_risk, DistributionSpec, OracleConfig, TrueRisk, DEFAULT_ORACLE_K};
use crate::error::{Result, RiskError};
use crate::estimators::{EstimatorId, LEstimatorSpec, RiskEstimator};
use crate::metrics::{run_shared, CellEstimator, Metric, MetricReport};
use crate::sampling::SchemeKind;

pub const MIN_STUDY_K: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(RiskError::Parse(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub alpha: f64,
    pub n: usize,
    /// Replications per cell.
    pub k: usize,
    pub seed: u64,
    /// Draws for Monte Carlo true-risk oracles.
    pub oracle_k: usize,
    pub distributions: Vec<DistributionSpec>,
    pub estimators: Vec<EstimatorId>,
    pub schemes: Vec<SchemeKind>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let mut estimators = vec![EstimatorId::VarInterp1pct];
        estimators.extend(EstimatorId::ES_ALL);
        Self {
            alpha: 0.025,
            n: 250,
            k: 100_000,
            seed: 42,
            oracle_k: DEFAULT_ORACLE_K,
            distributions: DistributionSpec::reference_set(),
            estimators,
            schemes: vec![SchemeKind::Iid, SchemeKind::Overlapping { h: 10 }],
            output: None,
            format: OutputFormat::Csv,
            threads: None,
        }
    }
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: BenchConfig = serde_json::from_str(text).map_err(|e| RiskError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RiskError::Config(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0,1), got {}", self.alpha));
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.k < MIN_STUDY_K {
            return bad(format!("K must be at least {MIN_STUDY_K}, got {}", self.k));
        }
        if self.distributions.is_empty() {
            return bad("distributions must not be empty".into());
        }
        if self.estimators.is_empty() {
            return bad("estimators must not be empty".into());
        }
        if self.schemes.is_empty() {
            return bad("schemes must not be empty".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        for d in &self.distributions {
            d.validated().map_err(|e| RiskError::Config(e.to_string()))?;
        }
        for s in &self.schemes {
            s.with_n(self.n).map_err(|e| RiskError::Config(e.to_string()))?;
        }
        self.build_estimators().map_err(|e| RiskError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn build_estimators(&self) -> Result<Vec<LEstimatorSpec>> {
        self.estimators
            .iter()
            .map(|&id| LEstimatorSpec::build(id, self.alpha, self.n))
            .collect()
    }
}

/// Short column label: `VaR1%`, `#1` ... `#6`.
pub fn estimator_label(id: EstimatorId) -> String {
    match id {
        EstimatorId::VarInterp1pct => "VaR1%".into(),
        EstimatorId::VarEmp => "VaR".into(),
        EstimatorId::Es1 => "#1".into(),
        EstimatorId::Es2 => "#2".into(),
        EstimatorId::Es3 => "#3".into(),
        EstimatorId::Es4 => "#4".into(),
        EstimatorId::Es5 => "#5".into(),
        EstimatorId::Es6 => "#6".into(),
        other => other.as_str().into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub distribution: DistributionSpec,
    pub scheme: SchemeKind,
    pub estimator: EstimatorId,
    pub alpha: f64,
    pub n: usize,
    pub k: usize,
    pub metric: Metric,
    pub value: f64,
    pub mc_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub config: BenchConfig,
    pub build_id: String,
    pub wall_time_secs: f64,
    /// True risk per (distribution, scheme, level).
    pub true_risk: Vec<TrueRiskEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueRiskEntry {
    pub distribution: DistributionSpec,
    pub scheme: SchemeKind,
    pub risk: TrueRisk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub metadata: TableMetadata,
}

pub const CSV_HEADER: &str = "distribution,scheme,estimator,alpha,n,K,metric,value,mc_stderr";

impl ResultTable {
    pub fn get(&self, dist: &DistributionSpec, scheme: SchemeKind, est: EstimatorId, metric: Metric) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| &r.distribution == dist && r.scheme == scheme && r.estimator == est && r.metric == metric)
    }

    pub fn value(&self, dist: &DistributionSpec, scheme: SchemeKind, est: EstimatorId, metric: Metric) -> Option<f64> {
        self.get(dist, scheme, est, metric).map(|r| r.value)
    }

    /// One row per (cell, metric); values at full precision. Contains no
    /// timing data, so equal seeds give equal bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let se = r.mc_stderr.map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.distribution, r.scheme, r.estimator, r.alpha, r.n, r.k, r.metric, r.value, se
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result tables serialize")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Runs every (distribution, scheme) block: true risk once per block and
/// target level, then all estimators on shared replications.
pub fn run_study(config: &BenchConfig) -> Result<ResultTable> {
    config.validate()?;
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| RiskError::Config(e.to_string()))?
            .install(|| run_study_inner(config)),
        None => run_study_inner(config),
    }
}

fn run_study_inner(config: &BenchConfig) -> Result<ResultTable> {
    let start = Instant::now();
    let specs = config.build_estimators()?;
    let oracle = OracleConfig { k: config.oracle_k, seed: config.seed };
    let mut rows = Vec::with_capacity(config.distributions.len() * config.schemes.len() * specs.len() * 5);
    let mut truths = Vec::new();

    for dist in &config.distributions {
        for &kind in &config.schemes {
            let scheme = kind.with_n(config.n)?;
            let cell_err = |e: RiskError| RiskError::Cell { cell: format!("{dist} / {kind}"), reason: e.to_string() };
            let mut by_level: BTreeMap<u64, TrueRisk> = BTreeMap::new();
            for s in &specs {
                let a = s.target().alpha();
                if let std::collections::btree_map::Entry::Vacant(v) = by_level.entry(a.to_bits()) {
                    let r = horizon_true_risk(dist, scheme.horizon(), a, &oracle).map_err(cell_err)?;
                    truths.push(TrueRiskEntry { distribution: *dist, scheme: kind, risk: r });
                    v.insert(r);
                }
            }
            let cells: Vec<CellEstimator<'_>> = specs
                .iter()
                .map(|s| CellEstimator {
                    estimator: s as &dyn RiskEstimator,
                    target: s.target(),
                    true_value: by_level[&s.target().alpha().to_bits()].value(s.target()),
                })
                .collect();
            let reports = run_shared(dist, &scheme, &cells, config.k, config.seed).map_err(cell_err)?;
            for (s, rep) in specs.iter().zip(&reports) {
                push_rows(&mut rows, dist, kind, s, config, rep);
            }
        }
    }

    Ok(ResultTable {
        rows,
        metadata: TableMetadata {
            config: config.clone(),
            build_id: format!("riskbench-{}", env!("CARGO_PKG_VERSION")),
            wall_time_secs: start.elapsed().as_secs_f64(),
            true_risk: truths,
        },
    })
}

fn push_rows(
    rows: &mut Vec<ResultRow>,
    dist: &DistributionSpec,
    scheme: SchemeKind,
    spec: &LEstimatorSpec,
    config: &BenchConfig,
    rep: &MetricReport,
) {
    for m in Metric::ALL {
        rows.push(ResultRow {
            distribution: *dist,
            scheme,
            estimator: spec.id,
            alpha: spec.target().alpha(),
            n: config.n,
            k: config.k,
            metric: m,
            value: rep.value(m),
            mc_stderr: rep.stderr(m),
        });
    }
}

/// Renders one block per scheme: rows = distribution x metric, columns =
/// estimators, values in percent with one decimal.
pub fn format_percent_table(table: &ResultTable) -> Result<String> {
    let mut dists: Vec<DistributionSpec> = Vec::new();
    let mut schemes: Vec<SchemeKind> = Vec::new();
    let mut ests: Vec<EstimatorId> = Vec::new();
    for r in &table.rows {
        if !dists.contains(&r.distribution) {
            dists.push(r.distribution);
        }
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
        if !ests.contains(&r.estimator) {
            ests.push(r.estimator);
        }
    }
    if table.rows.is_empty() {
        return Err(RiskError::IncompleteTable("no rows".into()));
    }
    let dist_w = dists.iter().map(|d| d.label().len()).max().unwrap_or(0).max("distribution".len());
    let mut out = String::new();
    for (bi, &scheme) in schemes.iter().enumerate() {
        if bi > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[{scheme}]");
        let _ = write!(out, "{:<dist_w$}  {:<6}", "distribution", "metric");
        for &e in &ests {
            let _ = write!(out, " {:>7}", estimator_label(e));
        }
        out.push('\n');
        for d in &dists {
            for m in Metric::ALL {
                let _ = write!(out, "{:<dist_w$}  {:<6}", d.label(), m.as_str());
                for &e in &ests {
                    let v = table.value(d, scheme, e, m).ok_or_else(|| {
                        RiskError::IncompleteTable(format!("missing {d} / {scheme} / {e} / {m}"))
                    })?;
                    let _ = write!(out, " {:>7.1}", 100.0 * v);
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// One cell of a rendered table, value in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCell {
    pub scheme: String,
    pub distribution: String,
    pub metric: Metric,
    pub estimator: String,
    pub percent: f64,
}

/// Inverse of [`format_percent_table`] up to the displayed precision.
pub fn parse_percent_table(text: &str) -> Result<Vec<ParsedCell>> {
    let mut cells = Vec::new();
    let mut scheme: Option<String> = None;
    let mut columns: Vec<String> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(s) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            scheme = Some(s.to_string());
            columns.clear();
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.first() == Some(&"distribution") {
            columns = parts[2..].iter().map(|s| s.to_string()).collect();
            continue;
        }
        let scheme = scheme.clone().ok_or_else(|| RiskError::Parse("row before a scheme header".into()))?;
        if parts.len() != columns.len() + 2 {
            return Err(RiskError::Parse(format!("row has {} fields, expected {}", parts.len(), columns.len() + 2)));
        }
        let metric: Metric = parts[1].parse()?;
        for (c, v) in columns.iter().zip(&parts[2..]) {
            cells.push(ParsedCell {
                scheme: scheme.clone(),
                distribution: parts[0].to_string(),
                metric,
                estimator: c.clone(),
                percent: v.parse().map_err(|e| RiskError::Parse(format!("'{v}': {e}")))?,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> BenchConfig {
        BenchConfig {
            k: 400,
            oracle_k: 200_000,
            distributions: vec![DistributionSpec::normal(0.0, 1.0).unwrap()],
            estimators: vec![EstimatorId::Es1],
            schemes: vec![SchemeKind::Iid],
            ..BenchConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(BenchConfig::default().validate().is_ok());
        let mut c = small_config();
        c.distributions.clear();
        assert!(matches!(c.validate(), Err(RiskError::Config(_))));
        let mut c = small_config();
        c.k = 39;
        assert!(c.validate().is_err());
        assert!(BenchConfig::from_json(r#"{"k": 1000, "bogus": 1}"#).is_err());
        let c = BenchConfig::from_json(
            r#"{"k": 1000, "distributions": ["t:5"], "estimators": ["ES3"], "schemes": ["overlapping:10"]}"#,
        )
        .unwrap();
        assert_eq!(c.schemes, vec![SchemeKind::Overlapping { h: 10 }]);
        assert_eq!(c.alpha, 0.025);
    }

    #[test]
    fn single_cell_table() {
        let t = run_study(&small_config()).unwrap();
        assert_eq!(t.rows.len(), 5);
        assert!(t.to_csv().starts_with(CSV_HEADER));
        assert_eq!(t.to_csv().lines().count(), 6);
        let text = format_percent_table(&t).unwrap();
        let cells = parse_percent_table(&text).unwrap();
        assert_eq!(cells.len(), 5);
        for c in &cells {
            let v = t.value(&DistributionSpec::normal(0.0, 1.0).unwrap(), SchemeKind::Iid, EstimatorId::Es1, c.metric).unwrap();
            assert!((c.percent - 100.0 * v).abs() <= 0.05 + 1e-9);
        }
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let mut t = run_study(&small_config()).unwrap();
        let mut extra = t.rows[0].clone();
        extra.estimator = EstimatorId::Es2;
        t.rows.push(extra);
        assert!(matches!(format_percent_table(&t), Err(RiskError::IncompleteTable(_))));
    }
}
