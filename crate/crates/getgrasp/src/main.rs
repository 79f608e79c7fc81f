use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use getgrasp::analysis::{run_scenario, ReportRow, SiteSpec};
use getgrasp::close_jaws;
use getgrasp::geometry::Arrangement;
use getgrasp::render::{cross_section_svg, envelope_chart_svg};
use getgrasp::scenario::{load_file, LoadedSuite};

const EXIT_OK: u8 = 0;
const EXIT_SCHEMA: u8 = 2;
const EXIT_ROW_FAILURES: u8 = 3;

#[derive(Parser)]
#[command(
    name = "getgrasp",
    version,
    about = "Grasp mechanics analysis for parallel-jaw finger designs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every scenario in a file and write machine- and human-readable
    /// reports.
    Analyze {
        /// Scenario file (TOML).
        file: PathBuf,
        /// Output directory for report files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: Format,
        /// Exit with status 3 if any row fails.
        #[arg(long)]
        strict: bool,
        /// Also emit the SVG renders.
        #[arg(long)]
        render: bool,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the friction-cone discretization.
        #[arg(long = "cone-edges")]
        cone_edges: Option<usize>,
    },
    /// Emit per-scenario cross-section SVGs and an envelope bar chart.
    Render {
        file: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sweep one parameter over a value list and print envelope rows as CSV.
    Sweep {
        file: PathBuf,
        /// One of: w, L, mu, f_max, v_half_angle, site_s.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values.
        #[arg(long)]
        range: String,
        /// Scenario to sweep (default: the first one).
        #[arg(long = "scenario")]
        scenario_name: Option<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn log_enabled() -> bool {
    std::env::var("GETGRASP_LOG").map(|v| !v.is_empty() && v != "off").unwrap_or(false)
}

macro_rules! log {
    ($($arg:tt)*) => {
        if log_enabled() {
            eprintln!("[getgrasp] {}", format!($($arg)*));
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Analyze { file, out, format, strict, render, seed, cone_edges } => {
            cmd_analyze(&file, &out, format, strict, render, seed, cone_edges)
        }
        Cmd::Render { file, out } => cmd_render(&file, &out),
        Cmd::Sweep { file, parameter, range, scenario_name, out } => {
            cmd_sweep(&file, &parameter, &range, scenario_name.as_deref(), out.as_deref())
        }
    };
    ExitCode::from(code)
}

fn load_or_exit(file: &Path) -> Result<LoadedSuite, u8> {
    match load_file(file) {
        Ok(suite) => Ok(suite),
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_SCHEMA)
        }
    }
}

/// Write atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

fn report_csv(rows: &[ReportRow]) -> String {
    let mut s = String::from(
        "scenario,gripper,object,status,site,f_max,threshold,mu,contacts,force_closure,epsilon,tau_x,tau_y,tau_z,f_min,weight_hold,secure,hash\n",
    );
    for r in rows {
        let env = r.envelope.as_ref();
        let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.6}"));
        let fmt_bool = |v: Option<bool>| v.map_or(String::new(), |v| v.to_string());
        s.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.scenario),
            csv_field(&r.gripper),
            csv_field(&r.object),
            csv_field(&r.status),
            fmt_opt(r.site),
            r.f_max,
            r.threshold,
            r.mu,
            r.contacts.len(),
            fmt_bool(r.force_closure),
            fmt_opt(r.epsilon),
            fmt_opt(env.map(|e| e.tau_x)),
            fmt_opt(env.map(|e| e.tau_y)),
            fmt_opt(env.map(|e| e.tau_z)),
            fmt_opt(env.map(|e| e.f_min)),
            fmt_bool(r.weight_hold),
            fmt_bool(r.secure),
            r.scenario_hash,
        ));
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_analyze(
    file: &Path,
    out: &Path,
    format: Format,
    strict: bool,
    render: bool,
    seed: Option<u64>,
    cone_edges: Option<usize>,
) -> u8 {
    let mut suite = match load_or_exit(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Some(seed) = seed {
        suite.config.seed = seed;
    }
    if let Some(m) = cone_edges {
        suite.config.cone_edges = m;
    }
    if suite.scenarios.is_empty() {
        eprintln!("error: scenario file has no scenarios");
        return EXIT_SCHEMA;
    }
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return EXIT_SCHEMA;
    }

    let rows: Vec<ReportRow> =
        suite.scenarios.iter().map(|s| run_scenario(s, &suite.config)).collect();
    for r in &rows {
        log!("{}: {}", r.scenario, r.status);
    }

    if format != Format::Csv {
        let mut jsonl = String::new();
        for r in &rows {
            jsonl.push_str(&serde_json::to_string(r).expect("row serializes"));
            jsonl.push('\n');
        }
        if let Err(e) = write_atomic(&out.join("report.jsonl"), &jsonl) {
            eprintln!("error: writing report.jsonl: {e}");
            return EXIT_SCHEMA;
        }
    }
    if format != Format::Json {
        if let Err(e) = write_atomic(&out.join("report.csv"), &report_csv(&rows)) {
            eprintln!("error: writing report.csv: {e}");
            return EXIT_SCHEMA;
        }
    }
    if render {
        if let Err(code) = render_suite(&suite, &rows, out) {
            return code;
        }
    }

    let failures = rows.iter().filter(|r| !r.ok()).count();
    if failures > 0 {
        eprintln!("{failures} of {} rows failed", rows.len());
        if strict {
            return EXIT_ROW_FAILURES;
        }
    }
    EXIT_OK
}

fn render_suite(suite: &LoadedSuite, rows: &[ReportRow], out: &Path) -> Result<(), u8> {
    let dir = out.join("render");
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return Err(EXIT_SCHEMA);
    }
    for s in &suite.scenarios {
        let site = match getgrasp::analysis::resolve_site(&s.gripper, &s.object, s.site) {
            Ok(site) => site,
            Err(e) => {
                eprintln!("render {}: skipped ({e})", s.name);
                continue;
            }
        };
        let mut gripper = s.gripper.clone();
        gripper.f_max = s.f_max.unwrap_or(gripper.f_max);
        match close_jaws(&gripper, &s.object, site, &suite.config.contact_config()) {
            Ok(set) => {
                let svg = cross_section_svg(&gripper, &s.object, &set, s.object.mu, &s.name);
                let path = dir.join(format!("{}.svg", sanitize(&s.name)));
                if let Err(e) = write_atomic(&path, &svg) {
                    eprintln!("render {}: write failed ({e})", s.name);
                }
            }
            Err(e) => eprintln!("render {}: skipped ({e})", s.name),
        }
    }
    let refs: Vec<&ReportRow> = rows.iter().collect();
    let chart = envelope_chart_svg(&refs, "disturbance envelopes");
    if let Err(e) = write_atomic(&dir.join("envelopes.svg"), &chart) {
        eprintln!("render chart: write failed ({e})");
    }
    Ok(())
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn cmd_render(file: &Path, out: &Path) -> u8 {
    let suite = match load_or_exit(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let rows: Vec<ReportRow> =
        suite.scenarios.iter().map(|s| run_scenario(s, &suite.config)).collect();
    match render_suite(&suite, &rows, out) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

fn cmd_sweep(
    file: &Path,
    parameter: &str,
    range: &str,
    scenario_name: Option<&str>,
    out: Option<&Path>,
) -> u8 {
    let suite = match load_or_exit(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let values: Vec<f64> = match range
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) if !v.is_empty() => v,
        Ok(_) => {
            eprintln!("error: empty sweep range");
            return EXIT_SCHEMA;
        }
        Err(e) => {
            eprintln!("error: bad sweep range: {e}");
            return EXIT_SCHEMA;
        }
    };
    const PARAMS: [&str; 6] = ["w", "L", "mu", "f_max", "v_half_angle", "site_s"];
    if !PARAMS.contains(&parameter) {
        eprintln!("error: unknown sweep parameter {parameter:?} (expected one of {PARAMS:?})");
        return EXIT_SCHEMA;
    }
    let base = match scenario_name {
        Some(name) => match suite.scenarios.iter().find(|s| s.name == name) {
            Some(s) => s.clone(),
            None => {
                eprintln!("error: no scenario named {name:?}");
                return EXIT_SCHEMA;
            }
        },
        None => match suite.scenarios.first() {
            Some(s) => s.clone(),
            None => {
                eprintln!("error: scenario file has no scenarios");
                return EXIT_SCHEMA;
            }
        },
    };

    let mut csv = String::from("parameter,value,status,tau_x,tau_y,tau_z,f_min,epsilon,secure\n");
    for &v in &values {
        let mut s = base.clone();
        let applied = apply_sweep(&mut s, parameter, v);
        let row = match applied {
            Ok(()) => run_scenario(&s, &suite.config),
            Err(msg) => {
                csv.push_str(&format!("{parameter},{v},{},,,,,,\n", csv_field(&msg)));
                continue;
            }
        };
        let env = row.envelope.as_ref();
        let fmt = |x: Option<f64>| x.map_or(String::new(), |x| format!("{x:.9}"));
        csv.push_str(&format!(
            "{parameter},{v},{},{},{},{},{},{},{}\n",
            csv_field(&row.status),
            fmt(env.map(|e| e.tau_x)),
            fmt(env.map(|e| e.tau_y)),
            fmt(env.map(|e| e.tau_z)),
            fmt(env.map(|e| e.f_min)),
            fmt(row.epsilon),
            row.secure.map_or(String::new(), |b| b.to_string()),
        ));
    }
    match out {
        Some(path) => {
            if let Err(e) = write_atomic(path, &csv) {
                eprintln!("error: writing {}: {e}", path.display());
                return EXIT_SCHEMA;
            }
        }
        None => print!("{csv}"),
    }
    EXIT_OK
}

fn apply_sweep(s: &mut getgrasp::analysis::Scenario, parameter: &str, v: f64) -> Result<(), String> {
    match parameter {
        "w" => {
            for f in &mut s.gripper.fingers {
                f.width_base = v;
                f.width_tip = v;
            }
        }
        "L" => {
            if s.gripper.arrangement != Arrangement::VPairPlusSingle {
                return Err("L sweep needs a converging-pair gripper".into());
            }
            let site = match s.site {
                SiteSpec::At(site) => site,
                SiteSpec::Auto => {
                    return Err("L sweep needs an explicit site".into());
                }
            };
            let tan_v = s.gripper.v_half_angle_deg.to_radians().tan();
            s.gripper.base_separation = v + 2.0 * site * tan_v;
        }
        "mu" => s.object.mu = v,
        "f_max" => {
            s.gripper.f_max = v;
            s.f_max = None;
        }
        "v_half_angle" => s.gripper.v_half_angle_deg = v,
        "site_s" => s.site = SiteSpec::At(v),
        _ => return Err(format!("unknown parameter {parameter}")),
    }
    s.gripper.validate().map_err(|e| e.to_string())?;
    s.name = format!("{}[{}={v}]", s.name, parameter);
    Ok(())
}
