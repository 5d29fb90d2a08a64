//! Batch commands behind the `shrinker-spectra` binary.
//!
//! Exit codes: 0 pass, 2 theorem check failed, 3 eigensolver failure, 4 I/O,
//! parse, or parameter error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::geometry::{rigidity_roots, CatalogShape, ShapeFamily};
use crate::identities::{self, IdentityReport, MeanZeroMode, MeshSummary};
use crate::linalg::{dot, norm_sq};
use crate::mesh::{read_mesh_file, sample_shape, Mesh, Resolution, VertexField};
use crate::obstruction::{
    ball_product_verdict, gauss_image_spread, hyperplane_separation_scan, scan_collection, scan_directions,
    soliton_containment, t_grid, BallTest, Classification, ContainmentVerdict, GaussImageSpread, ScanReport,
    SeparationReport, SolitonTest,
};
use crate::operator::assemble;
use crate::report::write_json;
use crate::spectral::{
    check_shrinker_spectrum, format_g6, lowest_eigenpairs, MultiplicityGroup, ShrinkerSpectrumCheck, Spectrum,
    DEFAULT_TOL, SHRINKER_VALUE_TOL,
};
use crate::{AmbientSoliton, Error, Result, DEFAULT_SEED, DEFAULT_TRUNCATION};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_THEOREM_FAIL: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SHRINKER_SPECTRA_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Identities,
    Obstructions,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Identities => "identities",
            Command::Obstructions => "obstructions",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual at which eigenpairs count as converged.
    pub solver: f64,
    /// Distance from 0 and ½ within which eigenvalues count as found.
    pub spectrum: f64,
}

/// Everything a command depends on. Equal configs give byte-identical JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<CatalogShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    /// Vertex count (curves, spheres), ring count (discs), or circumferential
    /// count (cylinders). Defaults per shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axial: Option<usize>,
    pub truncation: f64,
    pub eigen_count: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub directions: usize,
    pub t_max: f64,
    pub t_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            shape: None,
            mesh: None,
            resolution: None,
            axial: None,
            truncation: DEFAULT_TRUNCATION,
            eigen_count: 8,
            tolerances: Tolerances {
                solver: DEFAULT_TOL,
                spectrum: SHRINKER_VALUE_TOL,
            },
            seed: DEFAULT_SEED,
            directions: 100,
            t_max: 8.0,
            t_step: 0.5,
            output: None,
            format: OutputFormat::Tsv,
        }
    }

    pub fn for_shape(command: Command, shape: CatalogShape) -> Self {
        Self {
            shape: Some(shape),
            ..Self::new(command)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{what} must be positive")));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.shape.is_some() == self.mesh.is_some() {
            return Err(Error::InvalidParameter("exactly one of shape and mesh is required".into()));
        }
        if self.resolution == Some(0) {
            return bad("resolution");
        }
        if self.axial == Some(0) {
            return bad("axial resolution");
        }
        if !positive(self.truncation) {
            return bad("truncation");
        }
        if self.eigen_count == 0 {
            return bad("eigenvalue count");
        }
        if !positive(self.tolerances.solver) || !positive(self.tolerances.spectrum) {
            return bad("tolerances");
        }
        if self.directions == 0 {
            return bad("direction count");
        }
        if !positive(self.t_max) || !positive(self.t_step) {
            return bad("t grid bounds");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Samples the shape or reads the mesh file.
    pub fn load_mesh(&self) -> Result<Mesh> {
        match (&self.shape, &self.mesh) {
            (Some(shape), _) => {
                let count = self.resolution.unwrap_or_else(|| default_resolution(shape));
                let res = Resolution {
                    count,
                    axial: self.axial,
                };
                let truncation = (!shape.is_compact()).then_some(self.truncation);
                sample_shape(shape, res, truncation)
            }
            (None, Some(path)) => read_mesh_file(path),
            (None, None) => Err(Error::InvalidParameter("no shape or mesh given".into())),
        }
    }

    /// The config as embedded in reports; the output path does not affect results.
    fn reported(&self) -> Self {
        Self {
            output: None,
            ..self.clone()
        }
    }
}

/// Resolution giving `h ≲ 0.1` on the default window.
pub fn default_resolution(shape: &CatalogShape) -> usize {
    let meshed = match shape {
        CatalogShape::SolitonSphereProduct { n, k, .. } | CatalogShape::SolitonHyperplaneProduct { n, k, .. } => n - k,
        other => other.n(),
    };
    let spherical = matches!(
        shape,
        CatalogShape::RoundSphere { .. } | CatalogShape::SolitonSphereProduct { .. }
    ) || matches!(shape, CatalogShape::SphereCylinder { n, k, .. } if n == k);
    match (meshed, spherical, shape) {
        (1, true, _) => 512,
        (1, false, _) => 2048,
        (_, true, _) => 10242,
        (_, false, CatalogShape::SphereCylinder { .. }) => 64,
        _ => 128,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "shrinker-spectra",
    version,
    about = "Weighted Laplacian spectra, identity checks, and obstruction scans on self-shrinkers"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List catalog shapes and the parameters at which they are self-shrinkers.
    Catalog {
        #[arg(long)]
        json: bool,
        /// Largest hypersurface dimension listed.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Lowest eigenvalues of the drifted Laplacian; passes iff 0 and ½ are found.
    Spectrum(RunArgs),
    /// Weighted identity checks on coordinate functions.
    Identities(RunArgs),
    /// Intersection scans and containment tests.
    Obstructions(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShapeKind {
    Sphere,
    Circle,
    CircleNonshrinker,
    Cylinder,
    Hyperplane,
    SolitonProduct,
    SolitonHyperplane,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, conflicts_with_all = ["mesh", "config"])]
    shape: Option<ShapeKind>,
    /// OFF triangle mesh or JSON polyline.
    #[arg(long, conflicts_with = "config")]
    mesh: Option<PathBuf>,
    /// RunConfig JSON; replaces the shape and numeric flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hypersurface dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Sphere-factor dimension (cylinders, soliton products).
    #[arg(long)]
    k: Option<usize>,
    /// Defaults to the self-shrinker radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Comma-separated center of the sphere factor.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    center: Option<Vec<f64>>,
    /// Comma-separated unit normal of a hyperplane.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    normal: Option<Vec<f64>>,
    /// Vertex count (curves, spheres), around-count (cylinders) or window/h (planes).
    #[arg(long)]
    resolution: Option<usize>,
    /// Axial count for cylinders, as window/h.
    #[arg(long)]
    axial: Option<usize>,
    /// Truncation radius for noncompact shapes.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: f64,
    /// Number of eigenvalues.
    #[arg(short = 'm', long = "count", default_value_t = 8)]
    eigen_count: usize,
    /// Relative eigenpair residual.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    solver_tol: f64,
    /// Distance from 0 and ½ that counts as a match.
    #[arg(long, default_value_t = SHRINKER_VALUE_TOL)]
    spectrum_tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Scan directions for obstruction tests.
    #[arg(long, default_value_t = 100)]
    directions: usize,
    #[arg(long, default_value_t = 8.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.5)]
    t_step: f64,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Shorthand for `--format json`.
    #[arg(long)]
    json: bool,
    /// Print the resolved RunConfig as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

fn unit(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[dim - 1] = 1.0;
    v
}

fn build_shape(kind: ShapeKind, a: &RunArgs) -> Result<CatalogShape> {
    let fixed_n = |n: usize| match a.n {
        Some(m) if m != n => Err(Error::InvalidParameter(format!("{kind:?} has n = {n}, got --n {m}"))),
        _ => Ok(n),
    };
    let center = |len: usize| a.center.clone().unwrap_or_else(|| vec![0.0; len]);
    match kind {
        ShapeKind::Sphere => {
            let n = a.n.unwrap_or(2);
            let r = a.radius.unwrap_or((2.0 * n as f64).sqrt());
            CatalogShape::round_sphere(n, center(n + 1), r)
        }
        ShapeKind::Circle | ShapeKind::CircleNonshrinker => {
            let n = fixed_n(1)?;
            let default = if kind == ShapeKind::Circle { 2f64.sqrt() } else { 1.0 };
            CatalogShape::round_sphere(n, center(2), a.radius.unwrap_or(default))
        }
        ShapeKind::Cylinder => {
            let n = a.n.unwrap_or(2);
            let k = a.k.unwrap_or(1);
            let r = a.radius.unwrap_or((2.0 * k as f64).sqrt());
            CatalogShape::sphere_cylinder(n, k, center(k + 1), r)
        }
        ShapeKind::Hyperplane => {
            let n = a.n.unwrap_or(2);
            CatalogShape::hyperplane(n, a.normal.clone().unwrap_or_else(|| unit(n + 1)))
        }
        ShapeKind::SolitonProduct => {
            let n = a.n.unwrap_or(3);
            let k = a.k.unwrap_or(2);
            let r = a.radius.unwrap_or((2.0 * n.saturating_sub(k) as f64).sqrt());
            CatalogShape::soliton_sphere_product(n, k, r)
        }
        ShapeKind::SolitonHyperplane => {
            let n = a.n.unwrap_or(3);
            let k = a.k.unwrap_or(2);
            let normal = a.normal.clone().unwrap_or_else(|| unit((n + 1).saturating_sub(k).max(1)));
            CatalogShape::soliton_hyperplane_product(n, k, normal)
        }
    }
}

fn resolve_config(command: Command, a: &RunArgs) -> Result<RunConfig> {
    let mut config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let mut c: RunConfig = serde_json::from_str(&text)?;
            c.command = command;
            c
        }
        None => {
            let mut c = RunConfig::new(command);
            c.shape = a.shape.map(|kind| build_shape(kind, a)).transpose()?;
            c.mesh = a.mesh.clone();
            c.resolution = a.resolution;
            c.axial = a.axial;
            c.truncation = a.truncation;
            c.eigen_count = a.eigen_count;
            c.tolerances = Tolerances {
                solver: a.solver_tol,
                spectrum: a.spectrum_tol,
            };
            c.seed = a.seed;
            c.directions = a.directions;
            c.t_max = a.t_max;
            c.t_step = a.t_step;
            c
        }
    };
    if a.output.is_some() {
        config.output = a.output.clone();
    }
    if a.json {
        config.format = OutputFormat::Json;
    } else if let Some(f) = a.format {
        config.format = f;
    }
    if config.shape.is_none() && config.mesh.is_none() {
        return Err(Error::InvalidParameter("one of --shape, --mesh, or --config is required".into()));
    }
    config.validate()?;
    Ok(config)
}

/// Maps a library error to the exit-code contract.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } | Error::NotPositiveDefinite { .. } => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

/// Caps the global thread pool from `SHRINKER_SPECTRA_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Parse(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Parses `args` (program name first) and runs the command. Reports go to
/// `stdout` unless the config names an output file.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    let result = match cli.command {
        Cmd::Catalog { json, max_n } => cmd_catalog(max_n, json, stdout),
        Cmd::Spectrum(a) => with_config(Command::Spectrum, &a, stdout, stderr),
        Cmd::Identities(a) => with_config(Command::Identities, &a, stdout, stderr),
        Cmd::Obstructions(a) => with_config(Command::Obstructions, &a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn with_config(command: Command, a: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let config = resolve_config(command, a)?;
    if a.print_config {
        writeln!(stdout, "{}", config.to_json()?)?;
        return Ok(EXIT_PASS);
    }
    match &config.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let code = run_config(&config, &mut w, stderr)?;
            w.flush()?;
            Ok(code)
        }
        None => run_config(&config, stdout, stderr),
    }
}

/// Runs a resolved config, writing the report to `out`; returns the exit code.
pub fn run_config(config: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<i32> {
    config.validate()?;
    match config.command {
        Command::Spectrum => cmd_spectrum(config, out, log),
        Command::Identities => cmd_identities(config, out, log),
        Command::Obstructions => cmd_obstructions(config, out, log),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub variant: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub condition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_radius: Option<f64>,
}

impl CatalogEntry {
    fn line(&self) -> String {
        match self.k {
            Some(k) => format!("{} n={} k={}: {}", self.variant, self.n, k, self.condition),
            None => format!("{} n={}: {}", self.variant, self.n, self.condition),
        }
    }
}

#[derive(Serialize)]
struct CatalogBody {
    entries: Vec<CatalogEntry>,
}

fn root_radius(family: &ShapeFamily) -> Result<Option<f64>> {
    Ok(rigidity_roots(family)?.first().map(|shape| match shape {
        CatalogShape::SphereCylinder { radius, .. } | CatalogShape::SolitonSphereProduct { radius, .. } => *radius,
        _ => unreachable!("sphere families have radius roots"),
    }))
}

/// Catalog variants with their self-shrinker parameters, found by
/// [`rigidity_roots`] where the family has a radius parameter.
pub fn catalog_entries(max_n: usize) -> Result<Vec<CatalogEntry>> {
    let mut entries = Vec::new();
    for n in 1..=max_n {
        let family = ShapeFamily::SphereCylinder {
            n,
            k: n,
            center: None,
            radius: None,
        };
        let r = root_radius(&family)?;
        entries.push(CatalogEntry {
            variant: "RoundSphere".into(),
            n,
            k: None,
            condition: format!("self-shrinker iff v=0, r={:?}", r.unwrap_or(f64::NAN)),
            root_radius: r,
        });
        for k in 1..n {
            let family = ShapeFamily::SphereCylinder {
                n,
                k,
                center: None,
                radius: None,
            };
            let r = root_radius(&family)?;
            entries.push(CatalogEntry {
                variant: "SphereCylinder".into(),
                n,
                k: Some(k),
                condition: format!("self-shrinker iff v=0, r=√(2k)={:?}", r.unwrap_or(f64::NAN)),
                root_radius: r,
            });
        }
        entries.push(CatalogEntry {
            variant: "Hyperplane".into(),
            n,
            k: None,
            condition: "self-shrinker iff it passes through the origin".into(),
            root_radius: None,
        });
    }
    for n in 3..=max_n {
        for k in 2..n {
            let r = root_radius(&ShapeFamily::SolitonSphereProduct { n, k, radius: None })?;
            entries.push(CatalogEntry {
                variant: "SolitonSphereProduct".into(),
                n,
                k: Some(k),
                condition: format!(
                    "f-minimal in R^{}×S^{} iff r=√(2(n−k))={:?}",
                    n + 1 - k,
                    k,
                    r.unwrap_or(f64::NAN)
                ),
                root_radius: r,
            });
            entries.push(CatalogEntry {
                variant: "SolitonHyperplaneProduct".into(),
                n,
                k: Some(k),
                condition: format!("f-minimal in R^{}×S^{} iff the hyperplane passes through the origin", n + 1 - k, k),
                root_radius: None,
            });
        }
    }
    Ok(entries)
}

pub fn cmd_catalog(max_n: usize, json: bool, out: &mut dyn Write) -> Result<i32> {
    let entries = catalog_entries(max_n)?;
    if json {
        write_json(out, "catalog", &CatalogBody { entries })?;
    } else {
        for e in &entries {
            writeln!(out, "{}", e.line())?;
        }
    }
    Ok(EXIT_PASS)
}

/// Ambient coordinates that are not constant on the mesh.
fn nonconstant_coordinates(mesh: &Mesh) -> usize {
    let scale = 1.0 + (0..mesh.num_vertices()).map(|i| norm_sq(mesh.vertex(i))).fold(0.0, f64::max).sqrt();
    (0..mesh.stride())
        .filter(|&c| {
            let (lo, hi) = (0..mesh.num_vertices())
                .map(|i| mesh.vertex(i)[c])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            hi - lo > 1e-9 * scale
        })
        .count()
}

#[derive(Serialize)]
struct SpectrumBody {
    config: RunConfig,
    mesh: MeshSummary,
    converged: bool,
    max_residual: Option<f64>,
    eigenvalues: Vec<f64>,
    residuals: Option<Vec<f64>>,
    groups: Vec<MultiplicityGroup>,
    cluster_tol: f64,
    provenance: &'static str,
    check: ShrinkerSpectrumCheck,
    passed: bool,
}

pub fn cmd_spectrum(config: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<i32> {
    let mesh = config.load_mesh()?;
    let forms = assemble(&mesh)?;
    let (spectrum, converged, failure): (Spectrum, bool, Option<Error>) =
        match lowest_eigenpairs(&forms, config.eigen_count, config.tolerances.solver) {
            Ok(s) => (s, true, None),
            Err(Error::NotConverged { max_residual, partial }) => {
                let s = (*partial).clone();
                (s, false, Some(Error::NotConverged { max_residual, partial }))
            }
            Err(e) => return Err(e),
        };
    let check = check_shrinker_spectrum(&spectrum, nonconstant_coordinates(&mesh), config.tolerances.spectrum);
    let passed = converged && check.passed;
    match config.format {
        OutputFormat::Json => write_json(
            &mut *out,
            "spectrum",
            &SpectrumBody {
                config: config.reported(),
                mesh: MeshSummary::of(&mesh),
                converged,
                max_residual: spectrum.max_residual(),
                eigenvalues: spectrum.eigenvalues().to_vec(),
                residuals: spectrum.residuals().map(<[f64]>::to_vec),
                groups: spectrum.groups().to_vec(),
                cluster_tol: spectrum.cluster_tol(),
                provenance: spectrum.provenance().as_str(),
                check: check.clone(),
                passed,
            },
        )?,
        OutputFormat::Tsv => spectrum.write_tsv(&mut *out)?,
    }
    if let Some(e) = failure {
        writeln!(log, "error: {e}; partial spectrum reported")?;
        return Ok(EXIT_SOLVER);
    }
    writeln!(
        log,
        "0 found {}x, 1/2 found {}x (expected >= {}): {}",
        check.zero_multiplicity,
        check.half_multiplicity,
        check.expected_half_multiplicity,
        if passed { "pass" } else { "fail" }
    )?;
    Ok(if passed { EXIT_PASS } else { EXIT_THEOREM_FAIL })
}

/// Every identity check applicable to `mesh`.
pub fn identity_battery(mesh: &Mesh) -> Result<Vec<IdentityReport>> {
    let forms = assemble(mesh)?;
    let p = mesh.stride();
    let basis: Vec<Vec<f64>> = (0..p)
        .map(|c| {
            let mut e = vec![0.0; p];
            e[c] = 1.0;
            e
        })
        .collect();
    let mut reports = Vec::new();
    for e in &basis {
        reports.push(identities::check_coordinate_identity_with(mesh, &forms, e)?);
    }
    reports.extend(identities::check_xsq_identities_with(mesh, &forms, p)?);
    for j in 1..p {
        reports.push(identities::check_xsq_identities_with(mesh, &forms, j)?.pop().expect("two reports"));
    }
    let two_n = 2.0 * mesh.dim() as f64;
    let radial = VertexField::from_fn(mesh, |x| two_n - norm_sq(x));
    reports.push(identities::check_mean_zero_with(mesh, &forms, &radial, MeanZeroMode::SignDefinite)?);
    for e in &basis {
        let u = VertexField::from_fn(mesh, |x| dot(x, e));
        reports.push(identities::check_mean_zero_with(mesh, &forms, &u, MeanZeroMode::L1)?);
        reports.push(identities::check_orthogonality(mesh, &radial, &u, 1.0, 0.5)?);
    }
    if let Some(shape) = mesh.shape() {
        for e in &basis {
            reports.push(identities::check_stability_equation_with(shape, mesh, &forms, e)?);
        }
    }
    reports.push(identities::check_fminimal(mesh)?);
    Ok(reports)
}

#[derive(Serialize)]
struct IdentitiesBody {
    config: RunConfig,
    mesh: MeshSummary,
    reports: Vec<IdentityReport>,
    passed: bool,
}

fn opt_g6(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), format_g6)
}

pub fn cmd_identities(config: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<i32> {
    let mesh = config.load_mesh()?;
    let reports = identity_battery(&mesh)?;
    let passed = reports.iter().all(|r| r.pass || r.skipped);
    match config.format {
        OutputFormat::Json => write_json(
            &mut *out,
            "identities",
            &IdentitiesBody {
                config: config.reported(),
                mesh: MeshSummary::of(&mesh),
                reports: reports.clone(),
                passed,
            },
        )?,
        OutputFormat::Tsv => {
            writeln!(out, "id\tlhs\trhs\tresidual\ttol\tpass")?;
            for r in &reports {
                let status = if r.skipped { "skipped" } else if r.pass { "pass" } else { "fail" };
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{status}",
                    r.id,
                    opt_g6(r.lhs),
                    opt_g6(r.rhs),
                    format_g6(r.residual),
                    format_g6(r.tol)
                )?;
            }
        }
    }
    for r in reports.iter().filter(|r| !r.pass && !r.skipped) {
        writeln!(log, "{} failed: residual {:e} > tol {:e}", r.id, r.residual, r.tol)?;
    }
    Ok(if passed { EXIT_PASS } else { EXIT_THEOREM_FAIL })
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedVerdict {
    pub test: String,
    /// Center `v` of a ball test or normal of a halfspace test.
    pub parameter: Vec<f64>,
    pub verdict: String,
    pub detail: ContainmentVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionSummary {
    pub fminimal: IdentityReport,
    pub self_shrinker: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_image: Option<GaussImageSpread>,
    pub containment: Vec<NamedVerdict>,
    /// Predictions for self-shrinkers that the mesh contradicts.
    pub violations: Vec<String>,
    pub verdict: String,
    pub passed: bool,
}

fn named(test: &str, parameter: Vec<f64>, detail: ContainmentVerdict) -> NamedVerdict {
    NamedVerdict {
        test: test.to_string(),
        parameter,
        verdict: detail.describe().to_string(),
        detail,
    }
}

/// Ball factor dimension and center for the containment tests.
fn ball_parameters(mesh: &Mesh) -> (usize, Vec<f64>) {
    match mesh.shape() {
        Some(CatalogShape::RoundSphere { n, center, .. }) => (*n, center.clone()),
        Some(CatalogShape::SphereCylinder { k, center, .. }) => (*k, center.clone()),
        _ => {
            let n = mesh.dim();
            let nv = mesh.num_vertices() as f64;
            let centroid = (0..=n)
                .map(|c| (0..mesh.num_vertices()).map(|i| mesh.vertex(i)[c]).sum::<f64>() / nv)
                .map(|x| if x.abs() < 1e-12 { 0.0 } else { x })
                .collect();
            (n, centroid)
        }
    }
}

/// Lying in a closed region bounded by `g = 0` without being `g ≡ 0`.
fn contained_not_equal(v: &ContainmentVerdict, nv: usize) -> bool {
    !v.sign_change && v.contacts < nv
}

pub fn obstruction_battery(mesh: &Mesh, config: &RunConfig) -> Result<ObstructionSummary> {
    let fminimal = identities::check_fminimal(mesh)?;
    let self_shrinker = fminimal.pass;
    let nv = mesh.num_vertices();
    let mut violations = Vec::new();
    let mut containment = Vec::new();
    let (mut scan, mut separation, mut gauss_image) = (None, None, None);
    match mesh.ambient() {
        AmbientSoliton::Gaussian { .. } => {
            let s = scan_collection(mesh, config.directions, &t_grid(config.t_max, config.t_step), config.seed)?;
            if !s.passed {
                violations.push(format!("{} members of the sphere collection are missed", s.misses.len()));
            }
            scan = Some(s);

            let (k, v) = ball_parameters(mesh);
            let inside = ball_product_verdict(mesh, k, &v, BallTest::Inside)?;
            let is_product = inside.contacts == nv && norm_sq(&v) < 1e-18;
            if !inside.sign_change && inside.max <= 1e-10 && !is_product {
                violations.push("lies inside the closed ball product without being the sphere product".into());
            }
            containment.push(named("ball-inside", v.clone(), inside));
            let outside = ball_product_verdict(mesh, k, &v, BallTest::Outside)?;
            if outside.classification == Classification::Outside {
                violations.push("lies outside the closed ball product".into());
            }
            containment.push(named("ball-outside", v, outside));

            let sep = hyperplane_separation_scan(mesh, config.directions, config.seed)?;
            if !sep.passed {
                violations.push(format!("{} hyperplanes separate the ball pattern", sep.realizing.len()));
            }
            separation = Some(sep);

            let g = gauss_image_spread(mesh)?;
            if g.in_semisphere && g.angular_radius > 1e-8 {
                violations.push("Gauss image lies in a closed semisphere but the mesh is not flat".into());
            }
            gauss_image = Some(g);
        }
        AmbientSoliton::CylinderSoliton { .. } => {
            let inside = soliton_containment(mesh, &SolitonTest::InsideBall)?;
            if !inside.sign_change && inside.max <= 1e-10 && inside.contacts < nv {
                violations.push("lies inside the closed ball product without being the sphere product".into());
            }
            containment.push(named("soliton-inside-ball", vec![], inside));
            let outside = soliton_containment(mesh, &SolitonTest::OutsideBall)?;
            if outside.classification == Classification::Outside {
                violations.push("lies outside the closed ball product".into());
            }
            containment.push(named("soliton-outside-ball", vec![], outside));
            let mut normals = scan_directions(mesh.stride(), config.directions, config.seed)?;
            if let Some(CatalogShape::SolitonHyperplaneProduct { normal, .. }) = mesh.shape() {
                normals.insert(0, normal.clone());
            }
            let mut bad = 0;
            for (i, v) in normals.into_iter().enumerate() {
                let h = soliton_containment(mesh, &SolitonTest::Halfspace { v: v.clone() })?;
                if contained_not_equal(&h, nv) {
                    bad += 1;
                }
                if i == 0 {
                    containment.push(named("soliton-halfspace", v, h));
                }
            }
            if bad > 0 {
                violations.push(format!("lies in {bad} closed halfspace products without being the hyperplane"));
            }
        }
    }
    let verdict = if !self_shrinker {
        "not a self-shrinker"
    } else if violations.is_empty() {
        "consistent with all obstructions"
    } else {
        "obstruction violated"
    };
    Ok(ObstructionSummary {
        passed: self_shrinker && violations.is_empty(),
        verdict: verdict.to_string(),
        fminimal,
        self_shrinker,
        scan,
        separation,
        gauss_image,
        containment,
        violations,
    })
}

#[derive(Serialize)]
struct ObstructionsBody {
    config: RunConfig,
    mesh: MeshSummary,
    #[serde(flatten)]
    summary: ObstructionSummary,
}

pub fn cmd_obstructions(config: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<i32> {
    let mesh = config.load_mesh()?;
    let summary = obstruction_battery(&mesh, config)?;
    match config.format {
        OutputFormat::Json => write_json(
            &mut *out,
            "obstructions",
            &ObstructionsBody {
                config: config.reported(),
                mesh: MeshSummary::of(&mesh),
                summary: summary.clone(),
            },
        )?,
        OutputFormat::Tsv => {
            match &summary.scan {
                Some(scan) => scan.write_tsv(&mut *out)?,
                None => writeln!(out, "member\tp\tt\tverdict\tmargin")?,
            }
            for c in &summary.containment {
                let p: Vec<String> = c.parameter.iter().map(|&x| format_g6(x)).collect();
                writeln!(out, "{}\t{}\t-\t{}\t{}", c.test, p.join(","), c.verdict, format_g6(c.detail.margin))?;
            }
        }
    }
    writeln!(
        log,
        "f-minimal residual {:e} (tol {:e}); verdict: {}",
        summary.fminimal.residual, summary.fminimal.tol, summary.verdict
    )?;
    for v in &summary.violations {
        writeln!(log, "violation: {v}")?;
    }
    Ok(if summary.passed { EXIT_PASS } else { EXIT_THEOREM_FAIL })
}
