use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use spinstat_core::coupling::{exclusion_report_with, perpendicular_to};
use spinstat_core::frames::{bisecting_frames_with_hint, limit_frames, pair_geometry, parallel_frames, relating_rotor};
use spinstat_core::sweep::{sweep, SweepConfig};
use spinstat_core::verify::run_all;
use spinstat_core::{enumerate_order_free, Error, HalfSpin, QuantumNumbers, Rotor, Vec3};

#[derive(Parser, Debug)]
#[command(name = "spinstat", version, about = "Exchange phases, frame geometry and exclusion rules for spin states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exchange-phase deviations over random geometries, per spin.
    Phases(PhasesArgs),
    /// Coupled-state norms for two identical particles, per total spin.
    Exclusion(ExclusionArgs),
    /// Pair geometry, bisecting and parallel frames and relating rotors.
    Frames(FramesArgs),
    /// Number of unordered collections of entities over states.
    Orderfree(OrderFreeArgs),
    /// Runs every invariant check; exits 1 if any fails.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Tsv,
}

#[derive(Args, Debug)]
struct OutputArg {
    #[arg(long, value_enum, default_value = "tsv")]
    output: Output,
}

#[derive(Args, Debug)]
struct PhasesArgs {
    /// Comma-separated spins, e.g. `0,1/2,3/2`.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_spin)]
    spins: Vec<HalfSpin>,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative rotor sign; random per trial when omitted.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
    sign: Option<i8>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct ExclusionArgs {
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_spin)]
    spins: Vec<HalfSpin>,
    /// Shared momentum.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vector, default_value = "0,0,1")]
    p: Vec3,
    /// Limiting direction of p̂1 × p̂2; a unit vector perpendicular to p.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
    hint: Option<Vec3>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign, default_value = "1")]
    sign: i8,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct FramesArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
    va: Vec3,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
    vb: Vec3,
    /// Azimuth for coincident vectors.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
    hint: Option<Vec3>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct OrderFreeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    entities: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    states: u32,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArg,
}

fn parse_spin(text: &str) -> Result<HalfSpin, String> {
    let s: HalfSpin = text.parse().map_err(|e: Error| e.to_string())?;
    HalfSpin::spin(s.twice()).map_err(|e| e.to_string())
}

fn parse_sign(text: &str) -> Result<i8, String> {
    match text {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("sign must be +1 or -1, got {text:?}")),
    }
}

fn parse_vector(text: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected three finite comma-separated numbers, got {text:?}")),
    }
}

fn unit(v: &Vec3, what: &str) -> Result<Vec3, Error> {
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::Domain(format!("{what} is the zero vector")));
    }
    Ok(v / n)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn fmt_vec(v: &Vec3) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}

fn fmt_rotor(r: &Rotor) -> String {
    let [w, x, y, z] = r.components();
    format!("{w},{x},{y},{z}")
}

fn phases(args: &PhasesArgs) -> Result<String, Error> {
    let config = SweepConfig { spins: args.spins.clone(), trials: args.trials, seed: args.seed, sign: args.sign };
    let rows = sweep(&config);
    Ok(match args.out.output {
        Output::Json => to_json(&json!({ "seed": args.seed, "trials": args.trials, "sign": args.sign, "rows": rows })),
        Output::Tsv => {
            let mut s = String::from(
                "spin\texpected_phase\ttrials\tlabeled_mean_dev\tlabeled_max_dev\tsymmetric_mean_dev\tsymmetric_max_dev\tratio_max_dev\tpermutation_exact\tfailures\n",
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}\t{}\t{}",
                    r.spin,
                    r.expected_phase,
                    r.trials,
                    r.labeled_mean_dev,
                    r.labeled_max_dev,
                    r.symmetric_mean_dev,
                    r.symmetric_max_dev,
                    r.ratio_max_dev,
                    r.permutation_exact,
                    r.failures
                );
            }
            s
        }
    })
}

#[derive(Serialize)]
struct ExclusionLine {
    spin: HalfSpin,
    total: HalfSpin,
    norm: f64,
    min_norm: f64,
    status: &'static str,
}

fn exclusion(args: &ExclusionArgs) -> Result<String, Error> {
    let hint = match &args.hint {
        Some(h) => unit(h, "hint")?,
        None => perpendicular_to(&args.p)?,
    };
    let mut lines = Vec::new();
    for &s in &args.spins {
        for row in exclusion_report_with(&QuantumNumbers::none(), &args.p, s, &Rotor::IDENTITY, args.sign, &hint)? {
            lines.push(ExclusionLine {
                spin: s,
                total: row.total,
                norm: row.norm,
                min_norm: row.min_norm,
                status: if row.allowed { "allowed" } else { "excluded" },
            });
        }
    }
    Ok(match args.out.output {
        Output::Json => to_json(&json!({ "p": args.p, "hint": hint, "sign": args.sign, "rows": lines })),
        Output::Tsv => {
            let mut s = String::from("spin\ttotal\tnorm\tmin_norm\tstatus\n");
            for l in &lines {
                let _ = writeln!(s, "{}\t{}\t{:.12}\t{:.12}\t{}", l.spin, l.total, l.norm, l.min_norm, l.status);
            }
            s
        }
    })
}

fn frames(args: &FramesArgs) -> Result<String, Error> {
    let va = unit(&args.va, "va")?;
    let vb = unit(&args.vb, "vb")?;
    let hint = args.hint.as_ref().map(|h| unit(h, "hint")).transpose()?;
    let g = pair_geometry(&va, &vb)?;
    let (ba, bb) = bisecting_frames_with_hint(&va, &vb, hint.as_ref())?;
    let (pa, pb) = match (parallel_frames(&va, &vb), &hint) {
        (Ok(f), _) => f,
        // Coincident vectors: parallel and bisecting frames agree in the limit.
        (Err(Error::DegenerateGeometry(_)), Some(h)) => limit_frames(&g.k, h)?,
        (Err(e), _) => return Err(e),
    };
    let plus = relating_rotor(&g, 1)?;
    let minus = relating_rotor(&g, -1)?;
    let two_pi = plus.compose(&plus);
    Ok(match args.out.output {
        Output::Json => to_json(&json!({
            "geometry": g,
            "bisecting": { "a": ba, "b": bb },
            "parallel": { "a": pa, "b": pb },
            "lifts": { "a": ba.lift(), "b": bb.lift() },
            "relating": { "plus": plus, "minus": minus },
            "plus_twice": two_pi,
        })),
        Output::Tsv => {
            let mut s = String::from("item\tvalue\n");
            let _ = writeln!(s, "v_a\t{}", fmt_vec(&g.v_a));
            let _ = writeln!(s, "v_b\t{}", fmt_vec(&g.v_b));
            let _ = writeln!(s, "k\t{}", fmt_vec(&g.k));
            let _ = writeln!(s, "theta\t{}", g.theta);
            for (name, f) in [("bisecting_a", ba), ("bisecting_b", bb), ("parallel_a", pa), ("parallel_b", pb)] {
                let _ = writeln!(s, "{name}.x\t{}", fmt_vec(&f.x));
                let _ = writeln!(s, "{name}.y\t{}", fmt_vec(&f.y));
                let _ = writeln!(s, "{name}.z\t{}", fmt_vec(&f.z));
            }
            let _ = writeln!(s, "lift_a\t{}", fmt_rotor(&ba.lift()));
            let _ = writeln!(s, "lift_b\t{}", fmt_rotor(&bb.lift()));
            let _ = writeln!(s, "relating_plus\t{}", fmt_rotor(&plus));
            let _ = writeln!(s, "relating_minus\t{}", fmt_rotor(&minus));
            let _ = writeln!(s, "plus_twice\t{}", fmt_rotor(&two_pi));
            s
        }
    })
}

fn orderfree(args: &OrderFreeArgs) -> Result<String, Error> {
    let r = enumerate_order_free(args.entities, args.states)?;
    Ok(match args.out.output {
        Output::Json => to_json(&json!({
            "entities": args.entities,
            "states": args.states,
            "count": r.count,
            "multisets": r.multisets,
        })),
        Output::Tsv => {
            let mut s = format!("count\t{}\n", r.count);
            for m in &r.multisets {
                let occ: Vec<String> = m.iter().map(u32::to_string).collect();
                let _ = writeln!(s, "multiset\t{}", occ.join(","));
            }
            s
        }
    })
}

fn verify(args: &VerifyArgs) -> (String, bool) {
    let checks = run_all(args.seed);
    let ok = checks.iter().all(|c| c.passed);
    let text = match args.out.output {
        Output::Json => to_json(&json!({ "seed": args.seed, "passed": ok, "checks": checks })),
        Output::Tsv => {
            let mut s = String::from("check\tstatus\tmax_error\ttolerance\tsamples\n");
            for c in &checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                let _ = writeln!(s, "{}\t{status}\t{:.3e}\t{:.3e}\t{}", c.name, c.max_error, c.tolerance, c.samples);
                if let Some(d) = &c.detail {
                    let _ = writeln!(s, "#\t{d}");
                }
            }
            s
        }
    };
    (text, ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Phases(a) => phases(a),
        Command::Exclusion(a) => exclusion(a),
        Command::Frames(a) => frames(a),
        Command::Orderfree(a) => orderfree(a),
        Command::Verify(a) => {
            let (text, ok) = verify(a);
            print!("{text}");
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
