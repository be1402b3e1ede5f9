use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Value};

use socdc::applications::{ball_deletion_hull, concentric_ellipsoid_hull, paraboloid_hull, trs_solve, TrsProblem};
use socdc::conditions::Cond6Verdict;
use socdc::cutgen::{build_cut, ConeInstance};
use socdc::disjunction::{
    build_homogeneous, build_nonhomogeneous, build_section_disjunction, weaken_case_c, DisjCase, Disjunction,
    DisjunctionBuild, GPlusSet,
};
use socdc::hullcert::{certify_hull, sample_set, SampleSet};
use socdc::io::{self, InstanceFile};
use socdc::{Error, Options, SymMatrix};

#[derive(Parser)]
#[command(name = "socdc", version, about = "SOC cuts for two-quadratic sets")]
struct Cli {
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, env = "SOCDC_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the condition checks on an instance file.
    Check { path: PathBuf },
    /// Compute the cut for an instance file.
    Cut { path: PathBuf },
    /// Cut for `c1ᵀx ≥ d1 ∨ c2ᵀx ≥ d2` on the SOC, or on its section by `hᵀx = 1`.
    Disjunction {
        #[arg(long)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        d1: f64,
        #[arg(long)]
        c2: String,
        #[arg(long, allow_hyphen_values = true)]
        d2: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        h: Option<String>,
    },
    /// Trust-region subproblem `min yᵀQy + 2gᵀy` over the unit ball.
    Trs {
        #[arg(long = "Q")]
        q: String,
        #[arg(long)]
        g: String,
    },
    /// Unit ball minus the open ball with center `c` and radius `r`.
    HullBall {
        #[arg(long)]
        c: String,
        #[arg(long)]
        r: f64,
    },
    /// Unit ball minus `{xᵀEx < r²}`.
    HullEllipsoid {
        #[arg(long = "E")]
        e: String,
        #[arg(long)]
        r: f64,
    },
    /// Paraboloid `ỹᵀỹ ≤ y_n` intersected with `ỹᵀQỹ + 2gᵀy + f ≤ 0`.
    HullParaboloid {
        #[arg(long = "Q")]
        q: String,
        #[arg(long)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        f: f64,
    },
    /// Sample points of one of the sets attached to an instance.
    Sample {
        path: PathBuf,
        #[arg(long, default_value = "F0FsH1")]
        set: String,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Certify hull exactness on sampled points.
    Certify {
        path: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

struct Outcome {
    out: Output,
    code: i32,
}

fn ok(v: Value, code: i32) -> Outcome {
    Outcome {
        out: Output::Json(v),
        code,
    }
}

fn failure(e: &Error) -> Outcome {
    ok(io::error_value(e), io::exit_code_error(e))
}

fn parse_vec(s: &str, what: &str) -> Result<DVector<f64>, Error> {
    let v: Vec<f64> = serde_json::from_str(s).map_err(|e| Error::Input(format!("--{what}: {e}")))?;
    Ok(DVector::from_vec(v))
}

fn parse_mat(s: &str, what: &str) -> Result<SymMatrix, Error> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(s).map_err(|e| Error::Input(format!("--{what}: {e}")))?;
    SymMatrix::from_rows(&rows)
}

impl Cli {
    fn options(&self, base: Options) -> Options {
        let mut o = base;
        if let Some(t) = self.tol {
            o.tol = t;
        }
        if let Some(s) = self.seed {
            o.seed = s;
        }
        if let Some(b) = self.budget {
            o.budget = b;
        }
        o
    }

    fn load(&self, path: &Path) -> Result<ConeInstance, Error> {
        let f = InstanceFile::read(path)?;
        f.to_instance(self.options(f.options))
    }
}

fn cmd_check(cli: &Cli, path: &Path) -> Result<Outcome, Error> {
    let inst = cli.load(path)?;
    Ok(match build_cut(&inst) {
        Ok(cut) => {
            let o = cut.report.overall();
            ok(io::report_value(&cut.report), io::exit_code_overall(o))
        }
        Err(e @ Error::Gate { .. }) => failure(&e),
        Err(e) => return Err(e),
    })
}

fn cmd_cut(cli: &Cli, path: &Path) -> Result<Outcome, Error> {
    let inst = cli.load(path)?;
    let cut = build_cut(&inst)?;
    let code = io::exit_code_overall(cut.report.overall());
    Ok(ok(io::cut_value(&cut, inst.opts.tol), code))
}

fn disjunction_cut(inst: &ConeInstance, cond6: &Cond6Verdict, disj: Option<&Disjunction>) -> Result<Outcome, Error> {
    let mut cut = build_cut(inst)?;
    cut.report.cond6 = Some(cond6.clone());
    let tol = inst.opts.tol;
    let mut v = io::cut_value(&cut, tol);
    if let (Cond6Verdict::Fails { .. }, Some(d)) = (cond6, disj) {
        let g = GPlusSet {
            c1: d.c1.clone(),
            c2: d.c2.clone(),
            d1: d.d1,
            d2: d.d2,
            s: cut.s,
            b_s: cut.cone().map(|c| c.b().clone()),
        };
        v = json!({
            "gplus": io::gplus_value(&g),
            "report": io::report_value(&cut.report),
            "warnings": ["the pieces overlap; emitting the G_s+ relaxation instead of the SOC cut"],
        });
    }
    Ok(ok(v, io::exit_code_overall(cut.report.overall())))
}

fn trivial_value(t: &socdc::disjunction::TrivialHull) -> Value {
    json!({ "trivial": t })
}

#[allow(clippy::too_many_arguments)]
fn cmd_disjunction(
    cli: &Cli,
    c1: &str,
    d1: f64,
    c2: &str,
    d2: f64,
    n: Option<usize>,
    h: Option<&str>,
) -> Result<Outcome, Error> {
    let opts = cli.options(Options::default());
    let c1 = parse_vec(c1, "c1")?;
    let c2 = parse_vec(c2, "c2")?;
    if let Some(n) = n {
        if c1.len() != n || c2.len() != n {
            return Err(Error::Dimension(format!("--n {n} disagrees with the vector lengths")));
        }
    }
    if let Some(h) = h {
        let h = parse_vec(h, "h")?;
        let sb = build_section_disjunction(&h, &c1, d1, &c2, d2, opts)?;
        return match sb.build {
            DisjunctionBuild::Trivial(t) => Ok(ok(trivial_value(&t), 0)),
            DisjunctionBuild::Instance(inst) => {
                let mut o = disjunction_cut(&inst, &sb.cond7, None)?;
                if let Output::Json(v) = &mut o.out {
                    v["section"] = json!(sb.kind);
                }
                Ok(o)
            }
        };
    }
    let mut disj = Disjunction::new(c1, d1, c2, d2)?;
    let mut warnings = Vec::new();
    if disj.case == DisjCase::C && disj.d1 * disj.d2 == 0.0 {
        disj = weaken_case_c(&disj)?;
        warnings.push("d1·d2 = 0: using the weakened disjunction (a relaxation)");
    }
    let cond6 = disj.check_cond6(&opts)?;
    let build = if disj.case == DisjCase::A {
        build_homogeneous(&disj.c1, &disj.c2, opts)?
    } else {
        build_nonhomogeneous(&disj, opts)?
    };
    let mut o = match build {
        DisjunctionBuild::Trivial(t) => ok(trivial_value(&t), 0),
        DisjunctionBuild::Instance(inst) => disjunction_cut(&inst, &cond6, Some(&disj))?,
    };
    if let Output::Json(v) = &mut o.out {
        v["normalized"] = json!({
            "c1": io::vec_value(&disj.c1), "d1": disj.d1,
            "c2": io::vec_value(&disj.c2), "d2": disj.d2,
            "case": format!("{:?}", disj.case), "swapped": disj.swapped,
        });
        if !warnings.is_empty() {
            v["notes"] = json!(warnings);
        }
    }
    Ok(o)
}

fn cmd_sample(cli: &Cli, path: &Path, set: &str, n: usize, format: Format) -> Result<Outcome, Error> {
    let inst = cli.load(path)?;
    let which: SampleSet = set.parse()?;
    let cut = match which {
        SampleSet::F0F1 | SampleSet::F0F1H1 => None,
        _ => Some(build_cut(&inst)?),
    };
    let pts = sample_set(&inst, cut.as_ref(), which, n, inst.opts.seed)?;
    let dim = inst.dim();
    Ok(match format {
        Format::Csv => {
            let mut s = (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
            s.push('\n');
            for p in &pts {
                s.push_str(&p.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            Outcome {
                out: Output::Text(s),
                code: 0,
            }
        }
        Format::Json => ok(
            json!({"set": set, "points": pts.iter().map(io::vec_value).collect::<Vec<_>>()}),
            0,
        ),
    })
}

fn cmd_certify(cli: &Cli, path: &Path, n: Option<usize>) -> Result<Outcome, Error> {
    let inst = cli.load(path)?;
    let cut = build_cut(&inst)?;
    let n = n.unwrap_or(inst.opts.samples);
    let rep = certify_hull(&inst, &cut, n, inst.opts.seed)?;
    let code = if rep.n_failed == 0 { 0 } else { 2 };
    let mut v = io::cert_value(&rep);
    v["certifiable"] = json!(rep.n_failed == 0);
    Ok(ok(v, code))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let opts = cli.options(Options::default());
    match &cli.cmd {
        Cmd::Check { path } => cmd_check(cli, path),
        Cmd::Cut { path } => cmd_cut(cli, path),
        Cmd::Disjunction { c1, d1, c2, d2, n, h } => cmd_disjunction(cli, c1, *d1, c2, *d2, *n, h.as_deref()),
        Cmd::Trs { q, g } => {
            let p = TrsProblem::new(parse_mat(q, "Q")?, parse_vec(g, "g")?)?;
            Ok(ok(io::trs_value(&trs_solve(&p, opts)?), 0))
        }
        Cmd::HullBall { c, r } => {
            let h = ball_deletion_hull(&parse_vec(c, "c")?, *r, opts)?;
            let code = h.cut().map_or(0, |c| io::exit_code_overall(c.cut.report.overall()));
            Ok(ok(io::hull_value(&h, opts.tol), code))
        }
        Cmd::HullEllipsoid { e, r } => {
            let h = concentric_ellipsoid_hull(&parse_mat(e, "E")?, *r, opts)?;
            let code = h.cut().map_or(0, |c| io::exit_code_overall(c.cut.report.overall()));
            Ok(ok(io::hull_value(&h, opts.tol), code))
        }
        Cmd::HullParaboloid { q, g, f } => {
            let h = paraboloid_hull(&parse_mat(q, "Q")?, &parse_vec(g, "g")?, *f, opts)?;
            let code = h.cut().map_or(0, |c| io::exit_code_overall(c.cut.report.overall()));
            Ok(ok(io::hull_value(&h, opts.tol), code))
        }
        Cmd::Sample { path, set, n, format } => cmd_sample(cli, path, set, *n, *format),
        Cmd::Certify { path, n } => cmd_certify(cli, path, *n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli).unwrap_or_else(|e| failure(&e));
    let text = match outcome.out {
        Output::Json(v) => {
            let mut s = io::to_json_string(&v);
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("socdc: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.code as u8)
}
