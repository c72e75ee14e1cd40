//! `erosion`: analyze a multi-version dependency history, trace antipattern
//! lineage, export the layered scene and serve it.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use erosion_core::analysis::VersionAnalysis;
use erosion_core::evolution::{lineage_csv, timeline_csv};
use erosion_core::ingest::{load_manifest, LoadedProject};
use erosion_core::pipeline::{self, PipelineError};
use erosion_core::scene::{parse_scene, project_versions, scene_to_bytes, validate_scene};
use erosion_core::{IngestError, InternalError, PipelineParams};
use erosion_serve::{router, ServeOptions, ServiceState};
use serde::Serialize;
use thiserror::Error;

/// Invalid input or I/O failure.
const EXIT_INPUT: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
/// Command-line usage error (sysexits EX_USAGE).
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "erosion",
    version,
    about = "Antipattern erosion analysis across software versions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect cycles and subtype-knowledge instances; write per-version instances and metrics.
    Analyze(StageArgs),
    /// Link instances across versions; write lineage and timeline as JSON and CSV.
    Trace(StageArgs),
    /// Run the full pipeline; write scene.json and the report files.
    Scene(SceneArgs),
    /// Serve scenes over HTTP for the viewer.
    Serve(ServeArgs),
    /// Check a manifest (and its graphs) or a scene file without writing anything.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct StageArgs {
    /// Project manifest listing the versions in release order.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// JSON file with layout, bundling and color parameters.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LayoutFlags {
    /// Distance between version layers along z.
    #[arg(long)]
    layer_gap: Option<f64>,
    /// Disk area for the least central type.
    #[arg(long)]
    area_min: Option<f64>,
    /// Disk area for the most central type.
    #[arg(long)]
    area_max: Option<f64>,
    /// Connector thickness for the least important edge.
    #[arg(long)]
    thickness_min: Option<f64>,
    /// Connector thickness for the most important edge.
    #[arg(long)]
    thickness_max: Option<f64>,
    /// Number of edge-bundling cycles.
    #[arg(long)]
    fdeb_cycles: Option<usize>,
}

#[derive(Debug, Args)]
struct SceneArgs {
    #[command(flatten)]
    stage: StageArgs,
    /// Comma-separated version ids to keep in the scene.
    #[arg(long, value_delimiter = ',')]
    versions: Option<Vec<String>>,
    #[command(flatten)]
    layout: LayoutFlags,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Build the scene from this manifest at startup.
    #[arg(long, conflicts_with = "scene", required_unless_present = "scene")]
    manifest: Option<PathBuf>,
    /// Serve prebuilt scene files; repeat for several projects.
    #[arg(long)]
    scene: Vec<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Allowed CORS origin, or `*` for any.
    #[arg(long)]
    cors: Option<String>,
    /// Directory with the viewer's static files.
    #[arg(long)]
    assets: Option<PathBuf>,
    #[command(flatten)]
    layout: LayoutFlags,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, conflicts_with = "scene", required_unless_present = "scene")]
    manifest: Option<PathBuf>,
    #[arg(long)]
    scene: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<InternalError> for CliError {
    fn from(e: InternalError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read_params(config: Option<&Path>, flags: Option<&LayoutFlags>) -> Result<PipelineParams, CliError> {
    let mut params = match config {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
            serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => PipelineParams::default(),
    };
    if let Some(f) = flags {
        let l = &mut params.layout;
        l.layer_gap = f.layer_gap.unwrap_or(l.layer_gap);
        l.area_min = f.area_min.unwrap_or(l.area_min);
        l.area_max = f.area_max.unwrap_or(l.area_max);
        l.thickness_min = f.thickness_min.unwrap_or(l.thickness_min);
        l.thickness_max = f.thickness_max.unwrap_or(l.thickness_max);
        l.fdeb.cycles = f.fdeb_cycles.unwrap_or(l.fdeb.cycles);
    }
    let problems = params.problems();
    if !problems.is_empty() {
        return Err(CliError::Input(format!("invalid parameters: {}", problems.join("; "))));
    }
    Ok(params)
}

fn load(manifest: &Path) -> Result<LoadedProject, CliError> {
    let loaded = load_manifest(manifest)?;
    for d in &loaded.diagnostics {
        if d.stats.dropped_self_edges + d.stats.duplicate_edges > 0 {
            log::warn!(
                "version {}: dropped {} self edges, merged {} duplicate edges",
                d.version_id,
                d.stats.dropped_self_edges,
                d.stats.duplicate_edges
            );
        }
    }
    Ok(loaded)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    bytes.push(b'\n');
    write(dir, name, &bytes)
}

fn prepare_out(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| io_error(out, e))
}

#[derive(Serialize)]
struct InstanceFile<'a> {
    version: &'a str,
    ordinal: usize,
    cycles: &'a [erosion_core::AntipatternInstance],
    stk: &'a [erosion_core::AntipatternInstance],
    stk_witnesses: &'a [(String, erosion_core::analysis::StkWitness)],
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    version: &'a str,
    ordinal: usize,
    types: usize,
    edges: usize,
    betweenness: &'a std::collections::BTreeMap<String, f64>,
    normalized: &'a std::collections::BTreeMap<String, f64>,
}

fn cmd_analyze(args: &StageArgs) -> Result<(), CliError> {
    read_params(args.config.as_deref(), None)?;
    let loaded = load(&args.manifest)?;
    let analyses = pipeline::analyze(&loaded.history)?;
    prepare_out(&args.out)?;
    for (a, g) in analyses.iter().zip(loaded.history.versions()) {
        write_instances(&args.out, a)?;
        write_json(
            &args.out,
            &format!("metrics-{:03}.json", a.ordinal),
            &MetricsFile {
                version: &a.version_id,
                ordinal: a.ordinal,
                types: g.nodes().len(),
                edges: g.edges().len(),
                betweenness: &a.centrality.raw,
                normalized: &a.centrality.normalized,
            },
        )?;
    }
    write_json(&args.out, "diagnostics.json", &loaded.diagnostics)?;
    let total: usize = analyses.iter().map(|a| a.cycles.len() + a.stk.len()).sum();
    println!("{} versions, {total} antipattern instances", analyses.len());
    Ok(())
}

fn write_instances(out: &Path, a: &VersionAnalysis) -> Result<(), CliError> {
    write_json(
        out,
        &format!("instances-{:03}.json", a.ordinal),
        &InstanceFile {
            version: &a.version_id,
            ordinal: a.ordinal,
            cycles: &a.cycles,
            stk: &a.stk,
            stk_witnesses: &a.stk_witnesses,
        },
    )
}

fn cmd_trace(args: &StageArgs) -> Result<(), CliError> {
    read_params(args.config.as_deref(), None)?;
    let loaded = load(&args.manifest)?;
    let analyses = pipeline::analyze(&loaded.history)?;
    let (lineage, timeline) = pipeline::trace(&loaded.history, &analyses);
    prepare_out(&args.out)?;
    write_json(&args.out, "lineage.json", &lineage)?;
    write(&args.out, "lineage.csv", lineage_csv(&lineage).as_bytes())?;
    write_json(&args.out, "timeline.json", &timeline)?;
    write(&args.out, "timeline.csv", timeline_csv(&timeline).as_bytes())?;
    println!("{} lineage edges over {} versions", lineage.edges.len(), analyses.len());
    Ok(())
}

fn version_filter(versions: Option<&[String]>) -> Result<Option<Vec<String>>, CliError> {
    match versions {
        None => Ok(None),
        Some(list) => {
            let list: Vec<String> = list
                .iter()
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if list.is_empty() {
                Err(CliError::Usage("--versions needs at least one version id".into()))
            } else {
                Ok(Some(list))
            }
        }
    }
}

/// Full pipeline; returns the scene bytes, projected onto `versions` if given.
fn build_scene(
    loaded: &LoadedProject,
    params: &PipelineParams,
    versions: Option<&[String]>,
) -> Result<(Vec<u8>, pipeline::PipelineOutput), CliError> {
    let history = &loaded.history;
    let out = pipeline::run(history, params)?;
    let doc = out.scene(history, params).map_err(PipelineError::from)?;
    let doc = match versions {
        None => doc,
        Some(v) => project_versions(&doc, v).map_err(|e| {
            CliError::Input(format!(
                "unknown version(s) {}; valid: {}",
                e.unknown.join(", "),
                e.valid.join(", ")
            ))
        })?,
    };
    let bytes = scene_to_bytes(&doc).map_err(PipelineError::from)?;
    Ok((bytes, out))
}

fn cmd_scene(args: &SceneArgs) -> Result<(), CliError> {
    let versions = version_filter(args.versions.as_deref())?;
    let params = read_params(args.stage.config.as_deref(), Some(&args.layout))?;
    let loaded = load(&args.stage.manifest)?;
    let (bytes, out) = build_scene(&loaded, &params, versions.as_deref())?;
    let report = out.report(&loaded.history);
    prepare_out(&args.stage.out)?;
    write(&args.stage.out, "scene.json", &bytes)?;
    write(&args.stage.out, "report.txt", report.text.as_bytes())?;
    write(&args.stage.out, "report-versions.csv", report.versions_csv.as_bytes())?;
    write(&args.stage.out, "report-instances.csv", report.instances_csv.as_bytes())?;
    println!("scene written to {}", args.stage.out.join("scene.json").display());
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    if let Some(manifest) = &args.manifest {
        let loaded = load(manifest)?;
        for d in &loaded.diagnostics {
            let g = loaded
                .history
                .version(&d.version_id)
                .expect("diagnostics follow versions");
            println!(
                "{}: {} types, {} edges, {} self edges dropped, {} duplicates merged",
                d.version_id,
                g.nodes().len(),
                g.edges().len(),
                d.stats.dropped_self_edges,
                d.stats.duplicate_edges
            );
        }
        println!("manifest ok: {} versions", loaded.history.versions().len());
        return Ok(());
    }
    let path = args.scene.as_ref().expect("clap requires --manifest or --scene");
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    let doc = parse_scene(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let problems = validate_scene(&doc);
    if !problems.is_empty() {
        return Err(CliError::Input(format!(
            "{}: {} problem(s):\n  {}",
            path.display(),
            problems.len(),
            problems.join("\n  ")
        )));
    }
    println!(
        "scene ok: {} layers, {} instances",
        doc.layers.len(),
        doc.antipatterns.len()
    );
    Ok(())
}

fn cmd_serve(args: &ServeArgs) -> Result<(), CliError> {
    let mut scenes: Vec<(String, Vec<u8>)> = Vec::new();
    if let Some(manifest) = &args.manifest {
        let params = read_params(args.config.as_deref(), Some(&args.layout))?;
        let loaded = load(manifest)?;
        let (bytes, _) = build_scene(&loaded, &params, None)?;
        scenes.push((manifest.display().to_string(), bytes));
    }
    for path in &args.scene {
        let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
        scenes.push((path.display().to_string(), bytes));
    }
    let state = ServiceState::from_scenes(scenes).map_err(|e| CliError::Input(e.to_string()))?;
    let options = ServeOptions {
        cors_origin: args.cors.clone(),
        assets: args.assets.clone(),
    };
    let app = router(state, &options).map_err(|e| CliError::Usage(e.to_string()))?;

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| CliError::Input(format!("cannot listen on {addr}: {e}")))?;
        let bound = listener.local_addr().map_err(|e| CliError::Internal(e.to_string()))?;
        println!("serving on http://{bound}");
        let _ = io::stdout().flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        erosion_serve::serve(listener, app, shutdown)
            .await
            .map_err(|e| CliError::Internal(e.to_string()))
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Scene(a) => cmd_scene(a),
        Command::Serve(a) => cmd_serve(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EROSION_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
