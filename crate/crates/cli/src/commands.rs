use std::path::Path;

use hcstab_core::{
    admissibility_harness, axiom_harness, cl_counterexample, cl_counterexample_top, gh_bounds, gh_exact,
    gh_upper_from, instability_scan, prop_bridge_space, random_ultrametric, read_matrix, semistability_probe,
    FiniteMetricSpace, GhResult, Linkage, MethodSpec, PathSpec, Ultrametric, Validation,
};
use serde::Serialize;

use crate::config::{Format, HarnessKind, PathChoice, ProbeSource, RunConfig, ScanSource};
use crate::error::CliError;

/// What a command produced: the main report, an optional trace for a
/// side file, and a reason to exit 4 after writing when the run demanded
/// an exact answer it could not deliver.
pub struct Rendered {
    pub body: String,
    pub trace: Option<String>,
    pub inexact: Option<String>,
}

impl Rendered {
    fn body(body: String) -> Self {
        Self {
            body,
            trace: None,
            inexact: None,
        }
    }
}

#[derive(Serialize)]
struct WithConfig<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

fn json<T: Serialize>(cfg: &RunConfig, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&WithConfig { config: cfg, body }).expect("reports serialize");
    s.push('\n');
    s
}

fn csv(cfg: &RunConfig, table: &str) -> String {
    format!("# config: {}\n{table}", cfg.to_json())
}

fn unsupported(cfg: &RunConfig) -> CliError {
    CliError::UnsupportedFormat {
        command: cfg.command(),
        format: cfg.format().name(),
    }
}

fn load(path: &str, tol: f64, pseudometric: bool) -> Result<FiniteMetricSpace, CliError> {
    let v = Validation {
        tolerance: tol,
        allow_pseudometric: pseudometric,
    };
    Ok(read_matrix(Path::new(path), &v)?)
}

pub fn execute(cfg: &RunConfig) -> Result<Rendered, CliError> {
    match cfg {
        RunConfig::Validate {
            input,
            tol,
            pseudometric,
            format,
        } => validate(cfg, load(input, *tol, *pseudometric)?, *format),
        RunConfig::Cluster {
            input,
            method,
            tol,
            pseudometric,
            format,
        } => cluster(cfg, &load(input, *tol, *pseudometric)?, method, *format),
        RunConfig::Gh {
            input,
            input2,
            budget,
            require_exact,
            bounds_only,
            tol,
            format,
        } => {
            let x = load(input, *tol, false)?;
            let y = load(input2, *tol, false)?;
            gh(cfg, &x, &y, *budget, *require_exact, *bounds_only, *format)
        }
        RunConfig::PathScan {
            source,
            method,
            tol,
            budget,
            format,
        } => path_scan(cfg, source, method, *tol, *budget, *format),
        RunConfig::Counterexample {
            k_min,
            k_max,
            budget,
            format,
        } => counterexample(cfg, *k_min, *k_max, *budget, *format),
        RunConfig::Probe {
            source,
            method,
            levels,
            trials,
            seed,
            budget,
            format,
        } => {
            let u = match source {
                ProbeSource::File { input } => Ultrametric::new(load(input, 0.0, false)?)?,
                ProbeSource::Random { n, depth, seed } => {
                    if *n == 0 {
                        return Err(CliError::InvalidArgument("--random-n must be positive".into()));
                    }
                    random_ultrametric(*n, *depth, *seed)
                }
            };
            let report = semistability_probe(&u, method, levels, *trials, *seed, *budget)?;
            match format {
                Format::Json => Ok(Rendered::body(json(cfg, &report))),
                Format::Csv => Ok(Rendered::body(csv(cfg, &report.to_csv()))),
                _ => Err(unsupported(cfg)),
            }
        }
        RunConfig::Harness {
            kind,
            method,
            trials,
            seed,
            format,
        } => harness(cfg, *kind, method, *trials, *seed, *format),
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    points: usize,
    labels: Vec<String>,
    diameter: f64,
    ultrametric: bool,
    min_gap: Option<f64>,
    /// Labels merged into another at distance zero in pseudometric mode.
    aliases: Vec<(String, String)>,
}

fn validate(cfg: &RunConfig, space: FiniteMetricSpace, format: Format) -> Result<Rendered, CliError> {
    let report = ValidateReport {
        valid: true,
        points: space.len(),
        labels: space.labels().to_vec(),
        diameter: space.diameter(),
        ultrametric: space.is_ultrametric(),
        min_gap: space.distance_set().min_gap(),
        aliases: space.aliases().to_vec(),
    };
    match format {
        Format::Json => Ok(Rendered::body(json(cfg, &report))),
        Format::Csv => {
            let gap = report.min_gap.map(|g| g.to_string()).unwrap_or_default();
            let table = format!(
                "valid,points,diameter,ultrametric,min_gap\ntrue,{},{},{},{gap}\n",
                report.points, report.diameter, report.ultrametric
            );
            Ok(Rendered::body(csv(cfg, &table)))
        }
        _ => Err(unsupported(cfg)),
    }
}

fn cluster(cfg: &RunConfig, space: &FiniteMetricSpace, method: &MethodSpec, format: Format) -> Result<Rendered, CliError> {
    let (d, trace) = method.run(space)?;
    let trace_json = trace.to_json();
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                dendrogram: hcstab_core::DendrogramJson,
                merge_table: hcstab_core::MergeTable,
                trace: &'a hcstab_core::TraceJson,
            }
            let report = Report {
                dendrogram: d.to_json(),
                merge_table: d.to_merge_table(),
                trace: &trace_json,
            };
            return Ok(Rendered::body(json(cfg, &report)));
        }
        Format::Csv => csv(cfg, &d.to_csv()),
        Format::MergeTable => csv(cfg, &d.to_merge_table().to_csv()),
        Format::Newick => format!("{}{}\n", cfg.to_newick_comment(), d.to_newick()),
    };
    let mut trace_text = serde_json::to_string_pretty(&trace_json).expect("traces serialize");
    trace_text.push('\n');
    Ok(Rendered {
        body,
        trace: Some(trace_text),
        inexact: None,
    })
}

fn gh(
    cfg: &RunConfig,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    budget: u64,
    require_exact: bool,
    bounds_only: bool,
    format: Format,
) -> Result<Rendered, CliError> {
    let result = if bounds_only {
        let (lower, upper) = gh_bounds(x, y);
        GhResult {
            value: upper,
            exact: lower == upper,
            lower,
            upper,
            witness: Vec::new(),
            nodes: 0,
        }
    } else {
        gh_exact(x, y, budget)
    };
    let body = match format {
        Format::Json => json(cfg, &result),
        Format::Csv => csv(
            cfg,
            &format!(
                "value,exact,lower,upper,nodes\n{},{},{},{},{}\n",
                result.value, result.exact, result.lower, result.upper, result.nodes
            ),
        ),
        _ => return Err(unsupported(cfg)),
    };
    let inexact = (require_exact && !result.exact).then(|| {
        format!(
            "BudgetExhausted: search stopped after {} nodes with the distance in [{}, {}]",
            result.nodes, result.lower, result.upper
        )
    });
    Ok(Rendered {
        body,
        trace: None,
        inexact,
    })
}

fn path_scan(
    cfg: &RunConfig,
    source: &ScanSource,
    method: &MethodSpec,
    tol: f64,
    budget: u64,
    format: Format,
) -> Result<Rendered, CliError> {
    let path = match source {
        ScanSource::PropBridge { alpha, gap } => {
            let (space, b1, b2) = prop_bridge_space(*alpha, *gap)?;
            PathSpec::bridge(space, b1, b2)?
        }
        ScanSource::File { input, block1, path, r } => {
            let space = load(input, 0.0, false)?;
            let b1 = space.indices_of(block1)?;
            let b2: Vec<usize> = (0..space.len()).filter(|i| !b1.contains(i)).collect();
            match path {
                PathChoice::Bridge => PathSpec::bridge(space, b1, b2)?,
                PathChoice::Gamma => {
                    let r = match r {
                        Some(r) => *r,
                        None if b1.is_empty() || b2.is_empty() => {
                            return Err(hcstab_core::LabError::TrivialPartition.into())
                        }
                        None => method.linkage().evaluate(&b1, &b2, &space),
                    };
                    PathSpec::gamma(space, b1, b2, r)?
                }
            }
        }
    };
    let w = instability_scan(method, &path, tol, budget)?;
    let body = match format {
        Format::Json => json(cfg, &w),
        Format::Csv => csv(
            cfg,
            &format!(
                "method,r,delta,s1,s2,steps,merged_s1,merged_s2,input_gap,input_gap_bound,output_gap,output_gap_exact,exceeds_half_delta\n\
                 {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                w.method,
                w.r,
                w.delta,
                w.s1,
                w.s2,
                w.steps,
                w.merged_at_r[0],
                w.merged_at_r[1],
                w.input_gap,
                w.input_gap_bound,
                w.output_gap,
                w.output_gap_exact,
                w.exceeds_half_delta
            ),
        ),
        _ => return Err(unsupported(cfg)),
    };
    Ok(Rendered::body(body))
}

#[derive(Serialize)]
struct CounterexampleRow {
    k: usize,
    delta: f64,
    /// Half the distortion of the label correspondence between `X_k` and `U_k`.
    input_upper: f64,
    output_lower: f64,
    output_upper: f64,
    output_exact: bool,
    cl_height: f64,
    cl_height_closed_form: f64,
}

fn counterexample(cfg: &RunConfig, k_min: usize, k_max: usize, budget: u64, format: Format) -> Result<Rendered, CliError> {
    if k_min > k_max {
        return Err(CliError::InvalidArgument(format!("--k-min {k_min} exceeds --k-max {k_max}")));
    }
    let mut rows = Vec::new();
    for k in k_min..=k_max {
        let c = cl_counterexample(k)?;
        let (d, _) = MethodSpec::Standard(hcstab_core::BuiltinLinkage::Cl).run(&c.x)?;
        let out = d.eta();
        let a = c.x.index_of("a-2")?;
        let b = c.x.index_of("b-2")?;
        let g = gh_exact(out.space(), c.u.space(), budget);
        rows.push(CounterexampleRow {
            k,
            delta: c.delta,
            input_upper: gh_upper_from(&c.tau, &c.x, c.u.space()),
            output_lower: g.lower,
            output_upper: g.upper,
            output_exact: g.exact,
            cl_height: out.space().d(a, b),
            cl_height_closed_form: cl_counterexample_top(k),
        });
    }
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Rows<'a> {
                rows: &'a [CounterexampleRow],
            }
            json(cfg, &Rows { rows: &rows })
        }
        Format::Csv => {
            let mut t = String::from(
                "k,delta,input_upper,output_lower,output_upper,output_exact,cl_height,cl_height_closed_form\n",
            );
            for r in &rows {
                t.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.k,
                    r.delta,
                    r.input_upper,
                    r.output_lower,
                    r.output_upper,
                    r.output_exact,
                    r.cl_height,
                    r.cl_height_closed_form
                ));
            }
            csv(cfg, &t)
        }
        _ => return Err(unsupported(cfg)),
    };
    Ok(Rendered::body(body))
}

fn harness(
    cfg: &RunConfig,
    kind: HarnessKind,
    method: &MethodSpec,
    trials: usize,
    seed: u64,
    format: Format,
) -> Result<Rendered, CliError> {
    // (check, passed, checked) rows for CSV.
    let (body_json, rows): (String, Vec<(&str, bool, String)>) = match kind {
        HarnessKind::Axioms => {
            let r = axiom_harness(&method.linkage(), trials, seed);
            let rows = vec![
                ("representation_independence", r.representation_independence.passed, r.representation_independence.checked.to_string()),
                ("monotonicity", r.monotonicity.passed, r.monotonicity.checked.to_string()),
                ("scale_preservation", r.scale_preservation.passed, r.scale_preservation.checked.to_string()),
            ];
            (json(cfg, &r), rows)
        }
        HarnessKind::Admissibility => {
            let r = admissibility_harness(method, trials, seed)?;
            let t = trials.to_string();
            let rows = vec![
                ("gamma_regular", r.gamma_regular, t.clone()),
                ("scale_preserving", r.scale_preserving.passed, r.scale_preserving.checked.to_string()),
                ("nontrivial", r.nontrivial, "1".into()),
                ("fixes_two_points", r.fixes_two_points, "1".into()),
                ("ordinary", r.ordinary, "1".into()),
                ("admissible", r.admissible, t),
            ];
            (json(cfg, &r), rows)
        }
    };
    match format {
        Format::Json => Ok(Rendered::body(body_json)),
        Format::Csv => {
            let mut t = String::from("check,passed,checked\n");
            for (name, passed, checked) in rows {
                t.push_str(&format!("{name},{passed},{checked}\n"));
            }
            Ok(Rendered::body(csv(cfg, &t)))
        }
        _ => Err(unsupported(cfg)),
    }
}
