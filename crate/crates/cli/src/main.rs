//! `s2r`: ball volumes, distances, Frobenius classes, orbits, packing
//! optimization and mesh export for S²×ℝ.
//!
//! Exit codes: 0 success, 1 reproduction mismatch, 2 domain or numerical
//! error, 3 I/O error.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use s2r_core::geometry::{distance, distance_by_shooting};
use s2r_core::mesh::{geodesic_sphere, orbit_spheres, write_meshes};
use s2r_core::packing::{
    density, optimize_multiply_transitive, optimize_simply_transitive, PackingConfig,
    PackingResult, SearchOptions,
};
use s2r_core::symmetry::{frobenius_solve, orbit, SpaceGroup, Word};
use s2r_core::volume::{ball_volume_estimate, ball_volume_slab_estimate};
use s2r_core::{BallSpec, Error, FiberedPoint, QuadratureConfig};

/// Largest delta accepted by `reproduce`.
const REPRODUCE_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "s2r",
    version,
    about = "Geodesic balls and ball packings in S²×ℝ"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the run manifest as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Volume of the geodesic ball of radius RHO by both quadrature routes.
    Volume {
        #[arg(long)]
        rho: f64,
    },
    /// Distance between two points; give each of --phi, --theta, --t twice.
    Distance {
        #[arg(long, num_args = 1, required = true)]
        phi: Vec<f64>,
        #[arg(long, num_args = 1, required = true)]
        theta: Vec<f64>,
        #[arg(long, num_args = 1, required = true)]
        t: Vec<f64>,
    },
    /// Translation-part solutions of the (2, 2, q) reflection group.
    Frobenius {
        #[arg(long)]
        q: u32,
    },
    /// Orbit of a kernel point under 4q.I.2 within a fibre window.
    Orbit {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        tau: f64,
        /// Half-width of the fibre window; defaults to the lattice period 2·tau.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Densest simply and multiply transitive packings for 4q.I.2.
    Optimize {
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Coarse grid resolution per axis.
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Recompute the published q = 2 result table and compare.
    Reproduce {
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Write a triangulated geodesic sphere (or a whole packing orbit) as a text mesh.
    ExportSphere {
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Sphere radius; defaults to the packing radius with --orbit.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 24)]
        resolution: usize,
        /// Group word such as g1g3 applied to the sphere; needs --q and --tau.
        #[arg(long)]
        word: Option<String>,
        /// Export one sphere per orbit point of the kernel (phi, theta, 0); needs --q and --tau.
        #[arg(long)]
        orbit: bool,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        tau: Option<f64>,
        /// Half-width of the fibre window for --orbit; defaults to 2·tau.
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Volume { .. } => "volume",
            Command::Distance { .. } => "distance",
            Command::Frobenius { .. } => "frobenius",
            Command::Orbit { .. } => "orbit",
            Command::Optimize { .. } => "optimize",
            Command::Reproduce { .. } => "reproduce",
            Command::ExportSphere { .. } => "export-sphere",
        }
    }
}

enum Failure {
    Domain(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// What a command produced: structured results, the same numbers as text,
/// and whether the run matched its reference values.
struct Report {
    parameters: Value,
    results: Value,
    text: String,
    mismatch: bool,
}

#[derive(Serialize)]
struct Tolerances {
    quadrature_abs: f64,
    quadrature_rel: f64,
    quadrature_max_depth: u32,
    /// Slack for treating an orbit distance as equal to the ball diameter.
    contact: f64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    parameters: &'a Value,
    tolerances: Tolerances,
    tool_version: &'static str,
    wall_clock_seconds: f64,
    results: &'a Value,
}

fn parse_args() -> Cli {
    // coordinates such as `--phi -0.5` are values, not flags
    let cmd = Cli::command().mut_subcommands(|s| s.allow_negative_numbers(true));
    let matches = cmd.get_matches();
    Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit())
}

fn main() -> ExitCode {
    let cli = parse_args();
    let name = cli.command.name();
    let start = Instant::now();
    let quad = match quadrature(&cli) {
        Ok(q) => q,
        Err(e) => return fail(Failure::from(e)),
    };
    let report = match run(&cli.command, &quad) {
        Ok(r) => r,
        Err(f) => return fail(f),
    };
    let manifest = RunManifest {
        command: name,
        parameters: &report.parameters,
        tolerances: Tolerances {
            quadrature_abs: quad.abs_tol,
            quadrature_rel: quad.rel_tol,
            quadrature_max_depth: quad.max_depth,
            contact: 1e-9,
        },
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        results: &report.results,
    };
    let output = if cli.json {
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"
    } else {
        report.text
    };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(output.as_bytes());
    if report.mismatch {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Domain(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Failure::Io(msg) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn quadrature(cli: &Cli) -> Result<QuadratureConfig, Error> {
    let d = QuadratureConfig::default();
    QuadratureConfig::new(
        cli.tol_abs.unwrap_or(d.abs_tol),
        cli.tol_rel.unwrap_or(d.rel_tol),
        d.max_depth,
    )
}

fn run(cmd: &Command, quad: &QuadratureConfig) -> Result<Report, Failure> {
    match cmd {
        Command::Volume { rho } => cmd_volume(*rho, quad),
        Command::Distance { phi, theta, t } => cmd_distance(phi, theta, t),
        Command::Frobenius { q } => cmd_frobenius(*q),
        Command::Orbit {
            q,
            phi,
            theta,
            tau,
            window,
        } => cmd_orbit(*q, FiberedPoint::new(*phi, *theta, 0.0), *tau, *window),
        Command::Optimize { q, grid } => cmd_optimize(*q, *grid, quad),
        Command::Reproduce { grid } => cmd_reproduce(*grid, quad),
        Command::ExportSphere {
            phi,
            theta,
            t,
            rho,
            resolution,
            word,
            orbit,
            q,
            tau,
            window,
            out,
        } => cmd_export(
            &ExportArgs {
                center: FiberedPoint::new(*phi, *theta, *t),
                rho: *rho,
                resolution: *resolution,
                word: word.as_deref(),
                orbit: *orbit,
                q: *q,
                tau: *tau,
                window: *window,
                out,
            },
            quad,
        ),
    }
}

fn cmd_volume(rho: f64, quad: &QuadratureConfig) -> Result<Report, Failure> {
    let ball = BallSpec::new(rho)?;
    let polar = ball_volume_estimate(ball, quad)?;
    let slab = ball_volume_slab_estimate(ball, quad)?;
    let delta = (polar.value - slab.value).abs();
    let text = format!(
        "ball radius          {rho}\nvolume (polar)       {} ± {:e}\nvolume (fibre slabs) {} ± {:e}\nroute difference     {delta:e}\n",
        polar.value, polar.abs_error, slab.value, slab.abs_error
    );
    Ok(Report {
        parameters: json!({ "rho": rho }),
        results: json!({
            "volume": polar.value,
            "volume_error_estimate": polar.abs_error,
            "volume_slab": slab.value,
            "volume_slab_error_estimate": slab.abs_error,
            "route_difference": delta,
        }),
        text,
        mismatch: false,
    })
}

fn cmd_distance(phi: &[f64], theta: &[f64], t: &[f64]) -> Result<Report, Failure> {
    if phi.len() != 2 || theta.len() != 2 || t.len() != 2 {
        return Err(Failure::Domain(
            "distance needs exactly two values for each of --phi, --theta and --t".into(),
        ));
    }
    let a = FiberedPoint::new(phi[0], theta[0], t[0]);
    let b = FiberedPoint::new(phi[1], theta[1], t[1]);
    let closed = distance(&a, &b);
    let shot = distance_by_shooting(&a, &b)?;
    let text = format!(
        "distance (closed form) {closed}\ndistance (shooting)    {shot}\ndifference             {:e}\n",
        (closed - shot).abs()
    );
    Ok(Report {
        parameters: json!({ "a": a, "b": b }),
        results: json!({ "distance": closed, "distance_shooting": shot, "difference": (closed - shot).abs() }),
        text,
        mismatch: false,
    })
}

fn cmd_frobenius(q: u32) -> Result<Report, Failure> {
    let report = frobenius_solve(q)?;
    let fmt_parts =
        |p: &[s2r_core::symmetry::Fraction; 3]| format!("({}, {}, {})", p[0], p[1], p[2]);
    let mut text = format!(
        "q = {q}: {} raw solutions in {} classes\n",
        report.raw_solutions.len(),
        report.classes.len()
    );
    for c in &report.classes {
        let members: Vec<String> = c.members.iter().map(fmt_parts).collect();
        let _ = writeln!(
            text,
            "  {}{}  members: {}",
            fmt_parts(&c.representative),
            if c.is_4q_i_2 { "  [4q.I.2]" } else { "" },
            members.join(" ")
        );
    }
    Ok(Report {
        parameters: json!({ "q": q }),
        results: serde_json::to_value(&report).expect("report serializes"),
        text,
        mismatch: false,
    })
}

fn cmd_orbit(
    q: u32,
    kernel: FiberedPoint,
    tau: f64,
    window: Option<f64>,
) -> Result<Report, Failure> {
    let group = SpaceGroup::family_4q_i_2(q, tau)?;
    let window = window.unwrap_or(group.fiber_period());
    let pts = orbit(&group, &kernel, window)?;
    let mut text = format!("{} orbit points with |t| <= {window}\n", pts.len());
    let mut rows = Vec::new();
    for p in &pts {
        let d = distance(&kernel, &p.point);
        let _ = writeln!(
            text,
            "  {:<10} phi {} theta {} t {} distance {d}",
            p.label(),
            p.point.phi,
            p.point.theta,
            p.point.t
        );
        rows.push(json!({ "label": p.label(), "point": p.point, "distance": d }));
    }
    Ok(Report {
        parameters: json!({ "q": q, "kernel": kernel, "tau": tau, "window": window }),
        results: json!({ "points": rows }),
        text,
        mismatch: false,
    })
}

fn options(grid: usize, quad: &QuadratureConfig) -> SearchOptions {
    SearchOptions {
        grid,
        quadrature: *quad,
        ..Default::default()
    }
}

fn result_line(name: &str, r: &PackingResult) -> String {
    format!(
        "  {name:<18} phi {} theta {} R {} tau {} |Γ_K| {} Vol {} δ {} touching {}\n",
        r.kernel.phi,
        r.kernel.theta,
        r.radius,
        r.tau,
        r.stabilizer_order,
        r.ball_volume,
        r.density,
        r.touching_number
    )
}

fn cmd_optimize(q: u32, grid: usize, quad: &QuadratureConfig) -> Result<Report, Failure> {
    let opts = options(grid, quad);
    let st = optimize_simply_transitive(q, &opts)?;
    let mt = optimize_multiply_transitive(q, &opts)?;
    let mut text = format!("group 4q.I.2 with q = {q}\nsimply transitive optimum:\n");
    text += &result_line("interior", &st.result);
    text += "multiply transitive optima by stratum:\n";
    for s in &mt.strata {
        text += &result_line(&s.name, &s.result);
        if s.search.at_embedding_limit {
            text += "      supremum approached as R → π, not attained\n";
        }
        for m in &s.search.local_maxima {
            let _ = writeln!(
                text,
                "      local maximum in tau: tau {} R {} δ {}",
                m.tau, m.radius, m.density
            );
        }
    }
    let _ = writeln!(text, "densest stratum: {}", mt.best().name);
    Ok(Report {
        parameters: json!({ "q": q, "grid": grid }),
        results: json!({ "simply_transitive": st, "multiply_transitive": mt }),
        text,
        mismatch: false,
    })
}

#[derive(Serialize)]
struct ReproRow {
    name: &'static str,
    reference: [f64; 5],
    computed: [f64; 5],
    /// Absolute deltas of (phi, theta, R, Vol, δ); the longitude is not
    /// compared at a pole, where every longitude names the same point.
    deltas: [Option<f64>; 5],
    matches: bool,
}

fn repro_row(name: &'static str, reference: [f64; 5], r: &PackingResult) -> ReproRow {
    let computed = [
        r.kernel.phi,
        r.kernel.theta,
        r.radius,
        r.ball_volume,
        r.density,
    ];
    let at_pole = (r.kernel.theta.abs() - FRAC_PI_2).abs() <= 1e-12;
    let deltas: [Option<f64>; 5] =
        std::array::from_fn(|i| (!(i == 0 && at_pole)).then(|| (computed[i] - reference[i]).abs()));
    let matches = deltas.iter().flatten().all(|d| *d <= REPRODUCE_TOL);
    ReproRow {
        name,
        reference,
        computed,
        deltas,
        matches,
    }
}

fn cmd_reproduce(grid: usize, quad: &QuadratureConfig) -> Result<Report, Failure> {
    let opts = options(grid, quad);
    let st = optimize_simply_transitive(2, &opts)?;
    let mt = optimize_multiply_transitive(2, &opts)?;
    let midpoint = density(
        &PackingConfig::new(2, FiberedPoint::new(FRAC_PI_4, 0.0, 0.0), FRAC_PI_2)?
            .with_quadrature(*quad),
    )?;
    let edge = mt
        .stratum("edge-A2A3")
        .ok_or_else(|| Failure::Domain("edge stratum A2A3 missing".into()))?;
    let vertex = mt
        .stratum("vertex-A3")
        .ok_or_else(|| Failure::Domain("vertex stratum A3 missing".into()))?;
    let local = vertex
        .search
        .local_maxima
        .first()
        .ok_or_else(|| Failure::Domain("no local maximum at the vertex A3".into()))?;
    let local_result =
        density(&PackingConfig::new(2, vertex.result.kernel, local.tau)?.with_quadrature(*quad))?;

    let vertex_reference = [FRAC_PI_4, FRAC_PI_2, 1.81379936, 20.00238509, 0.87757183];
    let rows = [
        repro_row(
            "simply-transitive-opt",
            [FRAC_PI_4, 0.55737781, 0.64360446, 1.08624788, 0.53722971],
            &st.result,
        ),
        repro_row(
            "equator-midpoint",
            [FRAC_PI_4, 0.0, FRAC_PI_4, 1.94735865, 0.39461737],
            &midpoint,
        ),
        repro_row(
            "edge-endpoint-A2",
            [FRAC_PI_2, 0.0, FRAC_PI_2, 13.74539472, 0.69634983],
            &edge.result,
        ),
        repro_row("vertex-A3", vertex_reference, &vertex.result),
        repro_row("vertex-A3-local", vertex_reference, &local_result),
    ];

    let mut text = String::from("reproduction of the q = 2 result table, tolerance 1e-6\n");
    let _ = writeln!(
        text,
        "{:<22} {:>5} {:>20} {:>20} {:>22}  status",
        "row", "field", "reference", "computed", "|delta|"
    );
    for row in &rows {
        for (i, field) in ["phi", "theta", "R", "Vol", "delta"].iter().enumerate() {
            let delta = row.deltas[i].map_or("n/a".to_string(), |d| format!("{d:e}"));
            let status = if i == 0 {
                if row.matches {
                    "match"
                } else {
                    "MISMATCH"
                }
            } else {
                ""
            };
            let label = if i == 0 { row.name } else { "" };
            let _ = writeln!(
                text,
                "{label:<22} {field:>5} {:>20} {:>20} {delta:>22}  {status}",
                row.reference[i], row.computed[i]
            );
        }
    }
    let mut notes = vec![
        "The abstract quotes the vertex density as 0.87499429; the result block and the theorem give 0.87757183, which is the value recomputed here.".to_string(),
    ];
    if vertex.search.at_embedding_limit {
        notes.push(format!(
            "At the vertex A3 the density is not maximal at tau = π/√3: it has a local maximum there (row vertex-A3-local) but grows again for larger tau, approaching {} as the radius tends to π (tau → {}). That supremum is not attained by an embedded ball.",
            vertex.result.density, vertex.result.tau
        ));
    }
    for n in &notes {
        let _ = writeln!(text, "note: {n}");
    }
    let mismatch = rows.iter().any(|r| !r.matches);
    let _ = writeln!(
        text,
        "{}",
        if mismatch {
            "result: MISMATCH"
        } else {
            "result: all rows match"
        }
    );
    Ok(Report {
        parameters: json!({ "q": 2, "grid": grid, "tolerance": REPRODUCE_TOL }),
        results: json!({ "rows": rows, "notes": notes, "all_match": !mismatch }),
        text,
        mismatch,
    })
}

struct ExportArgs<'a> {
    center: FiberedPoint,
    rho: Option<f64>,
    resolution: usize,
    word: Option<&'a str>,
    orbit: bool,
    q: Option<u32>,
    tau: Option<f64>,
    window: Option<f64>,
    out: &'a PathBuf,
}

fn cmd_export(a: &ExportArgs, quad: &QuadratureConfig) -> Result<Report, Failure> {
    let need_group = |what: &str| -> Result<(u32, f64), Failure> {
        match (a.q, a.tau) {
            (Some(q), Some(tau)) => Ok((q, tau)),
            _ => Err(Failure::Domain(format!("{what} needs both --q and --tau"))),
        }
    };
    let meshes = if a.orbit {
        let (q, tau) = need_group("--orbit")?;
        let cfg = PackingConfig::new(q, FiberedPoint::new(a.center.phi, a.center.theta, 0.0), tau)?
            .with_quadrature(*quad);
        let rho = match a.rho {
            Some(r) => r,
            None => density(&cfg)?.radius,
        };
        let window = a.window.unwrap_or(2.0 * tau);
        orbit_spheres(&cfg, BallSpec::new(rho)?, a.resolution, window)?
    } else {
        let rho = a.rho.ok_or_else(|| {
            Failure::Domain("export-sphere needs --rho unless --orbit is given".into())
        })?;
        let transform = match a.word {
            Some(w) => {
                let (q, tau) = need_group("--word")?;
                let word: Word = w.parse()?;
                Some(SpaceGroup::family_4q_i_2(q, tau)?.word_isometry(&word))
            }
            None => None,
        };
        let mut m = geodesic_sphere(
            &a.center,
            BallSpec::new(rho)?,
            a.resolution,
            transform.as_ref(),
        )?;
        m.name = a.word.unwrap_or("e").to_string();
        vec![m]
    };
    let mut w = BufWriter::new(File::create(a.out)?);
    write_meshes(&meshes, &mut w)?;
    w.flush()?;
    let vertices: usize = meshes.iter().map(|m| m.vertices.len()).sum();
    let faces: usize = meshes.iter().map(|m| m.faces.len()).sum();
    let names: Vec<&str> = meshes.iter().map(|m| m.name.as_str()).collect();
    let text = format!(
        "wrote {} sphere(s), {vertices} vertices, {faces} faces to {}\n  spheres: {}\n",
        meshes.len(),
        a.out.display(),
        names.join(" ")
    );
    Ok(Report {
        parameters: json!({
            "center": a.center,
            "rho": a.rho,
            "resolution": a.resolution,
            "word": a.word,
            "orbit": a.orbit,
            "q": a.q,
            "tau": a.tau,
            "window": a.window,
            "out": a.out,
        }),
        results: json!({ "spheres": names, "vertices": vertices, "faces": faces }),
        text,
        mismatch: false,
    })
}
