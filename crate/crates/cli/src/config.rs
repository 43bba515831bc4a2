//! Run configuration: a TOML file with top-level keys, shared `[metric]`,
//! `[body]` and `[tolerances]` sections, and one section named after the task.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use convexlab::convex::BodyParams;
use convexlab::jets::format::{parse as parse_jet, JetFile};
use convexlab::manifold::{catalog_metric, CatalogParams, Chart, MetricField};
use convexlab::Tolerances;

pub const TASKS: [&str; 8] = [
    "transport-convergence",
    "jet-check",
    "exceptional-scan",
    "geodesic-scan",
    "jet-survey",
    "hull-iterate",
    "key-lemma-audit",
    "strict-convexity-audit",
];

/// Configuration problems; the driver exits with status 2 on any of these.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub task: String,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default)]
    pub body: Option<BodySpec>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    pub transport_convergence: Option<TransportSpec>,
    pub jet_check: Option<JetCheckSpec>,
    pub exceptional_scan: Option<ExceptionalScanSpec>,
    pub geodesic_scan: Option<GeodesicScanSpec>,
    pub jet_survey: Option<JetSurveySpec>,
    pub hull_iterate: Option<HullSpec>,
    pub key_lemma_audit: Option<KeyLemmaSpec>,
    pub strict_convexity_audit: Option<StrictConvexitySpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MetricSpec {
    pub name: String,
    pub dim: usize,
    pub curvature: Option<f64>,
    /// `stereographic` or `normal`
    pub chart: Option<String>,
    pub half_width: Option<f64>,
    pub profile: Option<f64>,
    /// jet file, relative to the config file
    pub jet_file: Option<PathBuf>,
    pub base: Option<String>,
    pub amplitude: Option<f64>,
    pub seed: Option<u64>,
    pub radius: Option<f64>,
    pub center: Option<Vec<f64>>,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec {
            name: "euclidean".into(),
            dim: 3,
            curvature: None,
            chart: None,
            half_width: None,
            profile: None,
            jet_file: None,
            base: None,
            amplitude: None,
            seed: None,
            radius: None,
            center: None,
        }
    }
}

impl MetricSpec {
    pub fn params(&self, base_dir: &Path) -> Result<CatalogParams, UsageError> {
        let mut p = CatalogParams::dim(self.dim);
        p.curvature = self.curvature;
        p.chart = match self.chart.as_deref() {
            None | Some("stereographic") => Chart::Stereographic,
            Some("normal") => Chart::Normal,
            Some(other) => return usage(format!("[metric] chart: unknown chart `{other}` (stereographic, normal)")),
        };
        p.half_width = self.half_width;
        if let Some(v) = self.profile {
            p.profile = v;
        }
        if let Some(b) = &self.base {
            p.base = b.clone();
        }
        if let Some(a) = self.amplitude {
            p.amplitude = a;
        }
        if self.name == "perturbed" && self.seed.is_none() {
            return usage("[metric] seed is required for the perturbed metric");
        }
        p.seed = self.seed.unwrap_or(0);
        p.radius = self.radius;
        p.center = self.center.clone();
        if let Some(file) = &self.jet_file {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            match parse_jet(&text) {
                Ok(JetFile::Metric(j)) => p.jet = Some(j),
                Ok(JetFile::Curvature(r)) => {
                    p.jet = Some(convexlab::jets::inverse_rho(&r).map_err(|e| UsageError(format!("{}: {e}", path.display())))?)
                }
                Err(e) => return usage(format!("{}: {e}", path.display())),
            }
        }
        Ok(p)
    }

    pub fn build(&self, base_dir: &Path) -> Result<MetricField, UsageError> {
        catalog_metric(&self.name, &self.params(base_dir)?).map_err(|e| UsageError(format!("[metric] {e}")))
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ToleranceSpec {
    pub sym: Option<f64>,
    pub curv: Option<f64>,
    pub hom: Option<f64>,
    pub cross: Option<f64>,
    pub geo: Option<f64>,
    pub jac: Option<f64>,
    pub conj: Option<f64>,
    pub margin: Option<f64>,
    pub inv: Option<f64>,
    pub tie: Option<f64>,
}

impl ToleranceSpec {
    pub fn resolve(&self) -> Result<Tolerances, UsageError> {
        let mut t = Tolerances::default();
        let fields: [(&str, Option<f64>, &mut f64); 10] = [
            ("sym", self.sym, &mut t.sym),
            ("curv", self.curv, &mut t.curv),
            ("hom", self.hom, &mut t.hom),
            ("cross", self.cross, &mut t.cross),
            ("geo", self.geo, &mut t.geo),
            ("jac", self.jac, &mut t.jac),
            ("conj", self.conj, &mut t.conj),
            ("margin", self.margin, &mut t.margin),
            ("inv", self.inv, &mut t.inv),
            ("tie", self.tie, &mut t.tie),
        ];
        for (name, v, slot) in fields {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return usage(format!("[tolerances] {name} must be positive"));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

pub fn tolerance_pairs(t: &Tolerances) -> Vec<(&'static str, f64)> {
    vec![
        ("sym", t.sym),
        ("curv", t.curv),
        ("hom", t.hom),
        ("cross", t.cross),
        ("geo", t.geo),
        ("jac", t.jac),
        ("conj", t.conj),
        ("margin", t.margin),
        ("inv", t.inv),
        ("tie", t.tie),
    ]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BodySpec {
    pub name: String,
    pub dim: Option<usize>,
    pub radius: Option<f64>,
    pub delta: Option<f64>,
}

impl BodySpec {
    /// Catalog parameters; the geodesic ball takes its base metric from `[metric]`.
    pub fn params(&self, metric: &MetricSpec, base_dir: &Path, seed: u64) -> Result<BodyParams, UsageError> {
        let mut p = BodyParams::dim(self.dim.unwrap_or(metric.dim));
        if let Some(r) = self.radius {
            p.radius = r;
        }
        if let Some(d) = self.delta {
            p.delta = d;
        }
        p.metric = metric.name.clone();
        p.metric_params = metric.params(base_dir)?;
        p.seed = metric.seed.unwrap_or(seed);
        Ok(p)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TransportCaseSpec {
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    pub length: f64,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TransportSpec {
    pub ks: Option<Vec<usize>>,
    #[serde(default)]
    pub cases: Vec<TransportCaseSpec>,
    /// `[k_lo, k_hi]`: require `e(k_hi) <= e(k_lo) / reduction`
    pub compare: Option<[usize; 2]>,
    pub reduction: Option<f64>,
    pub max_final_error: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct JetCheckSpec {
    pub dim: Option<usize>,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub spread: Option<i64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExceptionalScanSpec {
    pub point: Option<Vec<f64>>,
    pub order: Option<usize>,
    pub grid: Option<usize>,
    /// `exceptional`, `not-exceptional` or `inconclusive`
    pub expect: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GeodesicSpec {
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    pub length: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GeodesicScanSpec {
    #[serde(default)]
    pub geodesics: Vec<GeodesicSpec>,
    /// additional seeded random unit-speed geodesics through the chart
    pub random: Option<usize>,
    pub length: Option<f64>,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub expect: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct JetSurveySpec {
    pub dim: Option<usize>,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub min_generic_fraction: Option<f64>,
    pub max_generic_fraction: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HullSpec {
    pub points: Vec<Vec<f64>>,
    pub rounds: Option<usize>,
    pub h: Option<f64>,
    pub density: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct KeyLemmaSpec {
    pub point: Option<Vec<f64>>,
    pub length: Option<f64>,
    pub samples: Option<usize>,
    pub directions: Option<usize>,
    pub t0: Option<f64>,
    pub expect_refusal: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct StrictConvexitySpec {
    pub samples: Option<usize>,
    pub directions: Option<usize>,
    pub t0: Option<f64>,
    pub expect_flagged: Option<bool>,
}

impl RunConfig {
    /// Parses and checks task-level invariants. Errors carry line numbers
    /// when the TOML itself is malformed.
    pub fn parse(text: &str) -> Result<RunConfig, UsageError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| UsageError(format_toml_error(text, &e)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text).map_err(|e| UsageError(format!("{}: {}", path.display(), e.0)))
    }

    fn sections(&self) -> [(&'static str, bool); 8] {
        [
            ("transport-convergence", self.transport_convergence.is_some()),
            ("jet-check", self.jet_check.is_some()),
            ("exceptional-scan", self.exceptional_scan.is_some()),
            ("geodesic-scan", self.geodesic_scan.is_some()),
            ("jet-survey", self.jet_survey.is_some()),
            ("hull-iterate", self.hull_iterate.is_some()),
            ("key-lemma-audit", self.key_lemma_audit.is_some()),
            ("strict-convexity-audit", self.strict_convexity_audit.is_some()),
        ]
    }

    fn validate(&self) -> Result<(), UsageError> {
        if !TASKS.contains(&self.task.as_str()) {
            return usage(format!("unknown task `{}`; known tasks: {}", self.task, TASKS.join(", ")));
        }
        for (name, present) in self.sections() {
            if present && name != self.task {
                return usage(format!("section [{name}] does not belong to task `{}`", self.task));
            }
        }
        if self.randomized() && self.seed.is_none() {
            return usage(format!("task `{}` is randomized and needs a top-level `seed`", self.task));
        }
        let needs_body = matches!(self.task.as_str(), "key-lemma-audit" | "strict-convexity-audit");
        if needs_body && self.body.is_none() {
            return usage(format!("task `{}` needs a [body] section", self.task));
        }
        if !needs_body && self.body.is_some() {
            return usage(format!("task `{}` takes no [body] section", self.task));
        }
        if self.task == "hull-iterate" && self.hull_iterate.is_none() {
            return usage("task `hull-iterate` needs a [hull-iterate] section with `points`");
        }
        Ok(())
    }

    /// Tasks whose results depend on a random stream.
    pub fn randomized(&self) -> bool {
        match self.task.as_str() {
            "jet-check" | "jet-survey" | "hull-iterate" | "strict-convexity-audit" => true,
            "geodesic-scan" => self.geodesic_scan.as_ref().and_then(|g| g.random).unwrap_or(0) > 0,
            _ => false,
        }
    }
}

fn format_toml_error(text: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", e.message())
        }
        None => e.message().to_string(),
    }
}
