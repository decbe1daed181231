use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use lagrange_optics::closedform::{
    circle_radii, generator_radii, helix_omegas, sphere_circle_families, Family,
};
use lagrange_optics::config::{OutputFormat, RunConfig};
use lagrange_optics::connection::{cartan_closed_form, nonlinear_connection, semispray};
use lagrange_optics::curvature::{curvatures, metricity_residuals, torsions};
use lagrange_optics::dynamics::{integrate, read_csv, Trajectory};
use lagrange_optics::metric::{fundamental_tensor, inverse_fundamental_tensor};
use lagrange_optics::plot::{render_svg, Projection};
use lagrange_optics::verify::{self, Suite};
use lagrange_optics::{PhasePoint, RefractiveProfile};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_EMPTY: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "lagrange-optics",
    version,
    about = "Lagrange geometry of light rays in inhomogeneous media"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print geometric objects at one phase point as JSON.
    Tensors {
        #[arg(long)]
        config: PathBuf,
        /// x1,x2,x3,y1,y2,y3
        #[arg(long, value_parser = parse_six, allow_hyphen_values = true)]
        at: [f64; 6],
        /// Any of g,ginv,G,N,L,C,torsions,curvatures,metricity.
        #[arg(long, value_delimiter = ',', default_value = "g,ginv,G,N")]
        what: Vec<What>,
    },
    /// Integrate the equations of motion and write the trajectory.
    Geodesic {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output.path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form geodesic families.
    Solve {
        kind: SolveKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, alias = "r")]
        rho: Option<f64>,
        #[arg(long, value_parser = parse_pair, default_value = "0.1,10")]
        bracket: (f64, f64),
    },
    /// Run the seeded invariant suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Optional run configuration whose integrator settings are used.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render a trajectory CSV as an SVG projection.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = "xy")]
        proj: Projection,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    #[value(name = "g")]
    Metric,
    #[value(name = "ginv")]
    Inverse,
    #[value(name = "G")]
    Semispray,
    #[value(name = "N")]
    Nonlinear,
    #[value(name = "L")]
    CartanH,
    #[value(name = "C")]
    CartanV,
    Torsions,
    Curvatures,
    Metricity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveKind {
    Helix,
    Circle,
    Generator,
    SphereCircles,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl ToString) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }

    fn numerical(message: impl ToString) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.to_string(),
        }
    }
}

impl From<lagrange_optics::Error> for Failure {
    fn from(e: lagrange_optics::Error) -> Self {
        use lagrange_optics::Error as E;
        match e {
            E::InvalidParameter(_) | E::UnsupportedProfile(_) => Failure::config(e),
            other => Failure::numerical(other),
        }
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        })
        .collect()
}

fn parse_six(s: &str) -> Result<[f64; 6], String> {
    parse_reals(s)?
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 numbers, got {}", v.len()))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_reals(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        other => Err(format!("expected lo,hi, got {} numbers", other.len())),
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::load(path).map_err(Failure::config)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_tensors(config: &Path, at: [f64; 6], what: &[What]) -> Result<(), Failure> {
    let cfg = load(config)?;
    let profile = cfg.profile();
    let p = PhasePoint::from_slice(&at);
    let mut out = Map::new();
    out.insert("point".into(), to_value(&p));
    for w in what {
        let (key, value) = match w {
            What::Metric => ("g", to_value(&fundamental_tensor(&profile, &p)?)),
            What::Inverse => ("ginv", to_value(&inverse_fundamental_tensor(&profile, &p)?)),
            What::Semispray => ("G", to_value(&semispray(&profile, &p)?)),
            What::Nonlinear => ("N", to_value(&nonlinear_connection(&profile, &p)?.n)),
            What::CartanH => ("L", to_value(&cartan_closed_form(&profile, &p)?.l)),
            What::CartanV => ("C", to_value(&cartan_closed_form(&profile, &p)?.c)),
            What::Torsions => {
                let t = torsions(&profile, &p)?;
                ("torsions", json!({"R": t.r, "P": t.p, "C": t.c}))
            }
            What::Curvatures => {
                let k = curvatures(&profile, &p)?;
                ("curvatures", json!({"R": k.r, "P": k.p, "S": k.s}))
            }
            What::Metricity => {
                let m = metricity_residuals(&profile, &p)?;
                (
                    "metricity",
                    json!({
                        "horizontal": m.horizontal,
                        "vertical": m.vertical,
                        "horizontal_max": lagrange_optics::tensor::Components::max_abs(&m.horizontal),
                        "vertical_max": lagrange_optics::tensor::Components::max_abs(&m.vertical),
                    }),
                )
            }
        };
        out.insert(key.into(), value);
    }
    print_json(&Value::Object(out));
    Ok(())
}

fn write_trajectory(traj: &Trajectory, format: OutputFormat, path: &Path) -> Result<(), Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let res = match format {
        OutputFormat::Csv => traj.write_csv(&mut w).map_err(|e| e.to_string()),
        OutputFormat::Json => serde_json::to_writer_pretty(&mut w, traj).map_err(|e| e.to_string()),
    };
    res.and_then(|_| w.flush().map_err(|e| e.to_string()))
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn cmd_geodesic(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load(config)?;
    let init = cfg
        .initial
        .ok_or_else(|| Failure::config("geodesic runs need an `initial` state"))?;
    let profile = cfg.profile();
    let path = out.unwrap_or_else(|| cfg.output_path());
    let (traj, error) = match integrate(&profile, init.x, init.v, &cfg.effective_integrator()) {
        Ok(t) => (t, None),
        Err(f) => (*f.partial, Some(f.error)),
    };
    write_trajectory(&traj, cfg.output.format, &path)?;
    let last = traj.last();
    print_json(&json!({
        "path": path,
        "samples": traj.samples.len(),
        "energy_drift": traj.energy_drift(),
        "accepted_steps": traj.meta.accepted_steps,
        "rejected_steps": traj.meta.rejected_steps,
        "truncated": traj.meta.truncated,
        "final": last,
    }));
    match error {
        None => Ok(()),
        Some(e) => Err(Failure::numerical(e)),
    }
}

fn cmd_solve(
    kind: SolveKind,
    config: &Path,
    rho: Option<f64>,
    bracket: (f64, f64),
) -> Result<(), Failure> {
    let cfg = load(config)?;
    let profile: RefractiveProfile = cfg.profile();
    let families: Vec<Family> = match kind {
        SolveKind::Helix => {
            let rho = rho.ok_or_else(|| Failure::config("helix needs --rho"))?;
            helix_omegas(&profile, rho)?
                .into_iter()
                .map(Family::from)
                .collect()
        }
        SolveKind::Circle => circle_radii(&profile, bracket)?
            .into_iter()
            .map(Family::from)
            .collect(),
        SolveKind::Generator => generator_radii(&profile, bracket)?
            .into_iter()
            .map(Family::from)
            .collect(),
        SolveKind::SphereCircles => sphere_circle_families(&profile, bracket)?
            .into_iter()
            .map(Family::from)
            .collect(),
    };
    print_json(&to_value(&families));
    if families.is_empty() {
        return Err(Failure {
            code: EXIT_EMPTY,
            message: "no solutions".into(),
        });
    }
    Ok(())
}

fn cmd_verify(suite: Suite, seed: u64, config: Option<PathBuf>) -> Result<(), Failure> {
    let integrator = match config {
        Some(path) => load(&path)?.integrator,
        None => Default::default(),
    };
    let report = verify::run_with(suite, seed, &integrator);
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: "invariant check failed".into(),
        })
    }
}

fn cmd_plot(csv: &Path, proj: Projection, out: Option<PathBuf>) -> Result<(), Failure> {
    let file = File::open(csv)
        .map_err(|e| Failure::config(format!("cannot open {}: {e}", csv.display())))?;
    let samples = read_csv(file).map_err(Failure::config)?;
    let svg = render_svg(&samples, proj).map_err(Failure::config)?;
    match out {
        Some(path) => std::fs::write(&path, svg)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{svg}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Tensors { config, at, what } => cmd_tensors(&config, at, &what),
        Command::Geodesic { config, out } => cmd_geodesic(&config, out),
        Command::Solve {
            kind,
            config,
            rho,
            bracket,
        } => cmd_solve(kind, &config, rho, bracket),
        Command::Verify {
            suite,
            seed,
            config,
        } => cmd_verify(suite, seed, config),
        Command::Plot { csv, proj, out } => cmd_plot(&csv, proj, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
