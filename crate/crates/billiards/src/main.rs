//! Command-line front end for the billiards library: orbit construction,
//! spectrum tables, verification suites, numerical eigenvalue comparison, and
//! figure generation.
//!
//! Exit codes: 0 success / all checks pass, 1 runtime error, 2 usage error
//! (from argument parsing), 3 verification or oracle failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use billiards::domains::{self, DomainId, RationalAngle};
use billiards::error::Error;
use billiards::helmholtz;
use billiards::orbits;
use billiards::raytrace::{self, Classification};
use billiards::render;
use billiards::spectra::{self, BoundaryCondition, CheckReport};

#[derive(Parser)]
#[command(
    name = "billiards",
    version,
    about = "Periodic orbits and exact spectra of the integrable billiard domains",
    after_help = "Domains: square, right-isosceles, equilateral, hemi-equilateral, \
                  cube, k-tetra, k2-tetra, k4-tetra.\n\
                  Set BILLIARDS_OUT_DIR to choose where relative output paths land."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BcArg {
    Dirichlet,
    Neumann,
}

impl From<BcArg> for BoundaryCondition {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Dirichlet => BoundaryCondition::Dirichlet,
            BcArg::Neumann => BoundaryCondition::Neumann,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct one periodic orbit family from its integer label.
    Orbit(OrbitArgs),
    /// List quantum energy levels generated by the domain's bilinear form.
    Spectrum(SpectrumArgs),
    /// Group orbit labels by amplitude-squared and flag accidental clashes.
    Degeneracies(DegeneraciesArgs),
    /// Run the oracle-agreement, correspondence, subset-reduction, and
    /// isospectrality suites; exit 3 if any check fails.
    Verify(VerifyArgs),
    /// Classify a rational polygon by the genus of its invariant surface.
    Genus(GenusArgs),
    /// Solve the Helmholtz eigenproblem numerically and compare with the
    /// closed-form spectrum.
    Solve(SolveArgs),
    /// Emit figures: SVG for planar scenes, OBJ-style ASCII for solids.
    Render(RenderArgs),
}

#[derive(Args)]
struct OrbitArgs {
    /// Catalog domain name (e.g. square, equilateral, k-tetra).
    #[arg(long)]
    domain: String,
    /// Integer label, comma-separated (e.g. 3,2 or 1,1,2).
    #[arg(long)]
    label: String,
    /// Launch point override, comma-separated floats or fractions.
    #[arg(long)]
    start: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_enum, default_value = "dirichlet")]
    bc: BcArg,
    /// Number of levels, counted with multiplicity.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Print flat values in the published-table convention (K/4 quadrupled).
    #[arg(long)]
    table5: bool,
    /// Prepend the Neumann constant mode at energy zero.
    #[arg(long)]
    include_zero_mode: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct DegeneraciesArgs {
    #[arg(long)]
    domain: String,
    /// Largest amplitude-squared to include.
    #[arg(long)]
    max: i64,
    /// Only show groups not explained by the label symmetry.
    #[arg(long)]
    accidental_only: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Upper energy bound for the correspondence suite.
    #[arg(long, default_value_t = 200)]
    max: i64,
    /// Upper value bound for the reduction and isospectrality suites.
    #[arg(long, default_value_t = 500)]
    reduction_max: i64,
    /// Number of random 2-D labels for the oracle-agreement suite.
    #[arg(long, default_value_t = 100)]
    samples_2d: usize,
    /// Number of random 3-D labels for the oracle-agreement suite.
    #[arg(long, default_value_t = 50)]
    samples_3d: usize,
    /// Seed for the random label sampler (fixed default for reproducibility).
    #[arg(long, default_value_t = 20250825)]
    seed: u64,
}

#[derive(Args)]
struct GenusArgs {
    /// Interior angles as fractions of pi, comma-separated (e.g. 1/3,2/3,1/3,2/3).
    #[arg(long)]
    angles: String,
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_enum, default_value = "dirichlet")]
    bc: BcArg,
    /// Number of eigenvalue levels to compare.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Uniform refinement levels of the base mesh (default: 6).
    #[arg(long, default_value_t = 6)]
    levels: u32,
    /// Write the refined mesh to this file (v/s ASCII lines) before solving.
    #[arg(long)]
    dump_mesh: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    domain: String,
    /// Orbit label for folded-unfolded (2-D) or orbit (3-D) views.
    #[arg(long)]
    label: Option<String>,
    /// Several labels separated by semicolons (overlay and pair views).
    #[arg(long)]
    labels: Option<String>,
    /// View kind: folded-unfolded | overlay | pair | box.
    #[arg(long, default_value = "folded-unfolded")]
    view: String,
    /// Launch point override for the folded-unfolded view.
    #[arg(long)]
    start: Option<String>,
    /// Output file (.svg for 2-D, .obj for 3-D); relative paths land in
    /// BILLIARDS_OUT_DIR when that is set.
    #[arg(long)]
    out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> billiards::Result<ExitCode> {
    match cmd {
        Cmd::Orbit(a) => cmd_orbit(a),
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::Degeneracies(a) => cmd_degeneracies(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Genus(a) => cmd_genus(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Render(a) => cmd_render(a),
    }
}

// ---------------------------------------------------------------------------
// Shared parsing and output helpers
// ---------------------------------------------------------------------------

fn parse_domain(s: &str) -> billiards::Result<DomainId> {
    DomainId::parse(s)
}

fn parse_label(s: &str) -> billiards::Result<Vec<i64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("bad label component '{p}'")))
        })
        .collect()
}

/// Accepts "0.25" and "1/4" alike, so launch points can be given exactly.
fn parse_coord(p: &str) -> billiards::Result<f64> {
    let p = p.trim();
    if let Some((num, den)) = p.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad fraction '{p}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad fraction '{p}'")))?;
        if d == 0.0 {
            return Err(Error::InvalidInput(format!("zero denominator in '{p}'")));
        }
        Ok(n / d)
    } else {
        p.parse()
            .map_err(|_| Error::InvalidInput(format!("bad coordinate '{p}'")))
    }
}

fn parse_point(s: &str) -> billiards::Result<Vec<f64>> {
    s.split(',').map(parse_coord).collect()
}

/// Resolves an output path against BILLIARDS_OUT_DIR for relative paths.
fn resolve_out(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    if p.is_absolute() {
        return p;
    }
    match std::env::var_os("BILLIARDS_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(p),
        _ => p,
    }
}

fn emit(text: String, out: &Option<String>) -> billiards::Result<()> {
    match out {
        Some(path) => {
            let full = resolve_out(path);
            if let Some(parent) = full.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| Error::InvalidInput(format!("cannot create {parent:?}: {e}")))?;
                }
            }
            std::fs::write(&full, text)
                .map_err(|e| Error::InvalidInput(format!("cannot write {full:?}: {e}")))?;
            println!("{}", full.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_string(rows: Vec<Vec<String>>) -> billiards::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

fn fmt_label(label: &[i64]) -> String {
    let parts: Vec<String> = label.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

// ---------------------------------------------------------------------------
// orbit
// ---------------------------------------------------------------------------

fn cmd_orbit(a: OrbitArgs) -> billiards::Result<ExitCode> {
    let id = parse_domain(&a.domain)?;
    let label = parse_label(&a.label)?;
    let start = a.start.as_deref().map(parse_point).transpose()?;
    let v = orbits::orbit_vector(id, &label)?;
    let amp2 = orbits::amplitude_squared(id, &label)?;
    let traj = orbits::fold_trajectory(id, &label, start.as_deref())?;
    let collisions = orbits::collision_count(id, &label).ok();
    let pairs = if id == DomainId::Equilateral {
        orbits::shooting_angles(&label).ok()
    } else {
        None
    };

    match a.format {
        OutFormat::Json => {
            let doc = json!({
                "domain": id.name(),
                "label": label,
                "orbit_vector": v.to_f64(),
                "amplitude_squared": amp2,
                "amplitude": (amp2 as f64).sqrt(),
                "collision_count": collisions,
                "shooting_pairs": pairs.map(|p| p.to_vec()),
                "trajectory": {
                    "start": traj.start,
                    "points": traj.points,
                    "total_length": traj.total_length,
                    "bounces": traj.bounce_count(),
                    "closed": traj.closed,
                },
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        OutFormat::Csv => {
            let mut rows = vec![vec![
                "domain".into(),
                "label".into(),
                "amplitude_squared".into(),
                "collision_count".into(),
                "bounces".into(),
                "length".into(),
                "closed".into(),
            ]];
            rows.push(vec![
                id.name().into(),
                fmt_label(&label),
                amp2.to_string(),
                collisions.map_or(String::new(), |c| c.to_string()),
                traj.bounce_count().to_string(),
                format!("{:.9}", traj.total_length),
                traj.closed.to_string(),
            ]);
            print!("{}", csv_string(rows)?);
        }
        OutFormat::Table => {
            println!("domain             {}", id.name());
            println!("label              {}", fmt_label(&label));
            println!("orbit vector       {:?}", v.to_f64());
            println!("amplitude^2        {amp2}");
            println!("amplitude          {:.9}", (amp2 as f64).sqrt());
            if let Some(c) = collisions {
                println!("collision count    {c}");
            }
            if let Some(p) = pairs {
                let s: Vec<String> = p.iter().map(|(a, b)| format!("({a},{b})")).collect();
                println!("shooting pairs     {}", s.join(" "));
            }
            println!("fold bounces       {}", traj.bounce_count());
            println!("fold length        {:.9}", traj.total_length);
            println!("fold closed        {}", traj.closed);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

fn cmd_spectrum(a: SpectrumArgs) -> billiards::Result<ExitCode> {
    let id = parse_domain(&a.domain)?;
    let bc: BoundaryCondition = a.bc.into();
    let entries = spectra::spectrum_with_options(id, bc, a.count, a.include_zero_mode)?;
    let factor = if a.table5 {
        if id.dimension() != 3 || id == DomainId::Cube {
            return Err(Error::InvalidInput(
                "--table5 applies to the three tetrahedral domains".into(),
            ));
        }
        if id == DomainId::K4Tetra {
            4
        } else {
            1
        }
    } else {
        1
    };
    let flat: Vec<i64> = spectra::flat_values(&entries, a.count)
        .into_iter()
        .map(|v| v * factor)
        .collect();

    let text = match a.format {
        OutFormat::Json => {
            let doc = json!({
                "domain": id.name(),
                "bc": bc.name(),
                "count": a.count,
                "table5_convention": a.table5,
                "entries": entries.iter().map(|e| json!({
                    "energy": e.energy * factor,
                    "multiplicity": e.multiplicity,
                    "labels": e.labels,
                })).collect::<Vec<_>>(),
                "flat": flat,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        OutFormat::Csv => {
            let mut rows = vec![vec!["sl_no".to_string(), "value".to_string()]];
            for (i, v) in flat.iter().enumerate() {
                rows.push(vec![(i + 1).to_string(), v.to_string()]);
            }
            csv_string(rows)?
        }
        OutFormat::Table => {
            let mut s = format!("# {} {} first {} levels\n", id.name(), bc.name(), a.count);
            if a.table5 {
                let vals: Vec<String> = flat.iter().map(|v| v.to_string()).collect();
                s.push_str(&vals.join(" "));
                s.push('\n');
            } else {
                s.push_str("energy  mult  labels\n");
                for e in &entries {
                    let labels: Vec<String> = e.labels.iter().map(|l| fmt_label(l)).collect();
                    s.push_str(&format!(
                        "{:<7} {:<5} {}\n",
                        e.energy * factor,
                        e.multiplicity,
                        labels.join(" ")
                    ));
                }
            }
            s
        }
    };
    emit(text, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// degeneracies
// ---------------------------------------------------------------------------

fn cmd_degeneracies(a: DegeneraciesArgs) -> billiards::Result<ExitCode> {
    let id = parse_domain(&a.domain)?;
    let groups = orbits::enumerate_orbits(id, a.max)?;
    let shown: Vec<_> = groups
        .into_iter()
        .filter(|g| !a.accidental_only || g.accidental)
        .collect();
    match a.format {
        OutFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&shown).unwrap());
        }
        OutFormat::Csv => {
            let mut rows =
                vec![vec!["amplitude_squared".to_string(), "labels".to_string(), "accidental".to_string()]];
            for g in &shown {
                let labels: Vec<String> = g.labels.iter().map(|l| fmt_label(l)).collect();
                rows.push(vec![
                    g.amplitude_squared.to_string(),
                    labels.join(" "),
                    g.accidental.to_string(),
                ]);
            }
            print!("{}", csv_string(rows)?);
        }
        OutFormat::Table => {
            println!("# {} orbit families with amplitude^2 <= {}", id.name(), a.max);
            for g in &shown {
                let labels: Vec<String> = g.labels.iter().map(|l| fmt_label(l)).collect();
                println!(
                    "{:<6} {}{}",
                    g.amplitude_squared,
                    labels.join(" "),
                    if g.accidental { "   [accidental]" } else { "" }
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn oracle_agreement_suite(a: &VerifyArgs) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut cases = 0usize;
    let mut failures = Vec::new();
    let twod: Vec<DomainId> = domains::catalog()
        .iter()
        .filter(|s| s.dimension == 2)
        .map(|s| s.id)
        .collect();
    let threed: Vec<DomainId> = domains::catalog()
        .iter()
        .filter(|s| s.dimension == 3)
        .map(|s| s.id)
        .collect();
    let mut check = |id: DomainId, label: &[i64], failures: &mut Vec<String>| {
        cases += 1;
        let amp2 = match orbits::amplitude_squared(id, label) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{} {}: {e}", id.name(), fmt_label(label)));
                return;
            }
        };
        let vlen = 2.0 * (amp2 as f64).sqrt();
        match raytrace::verify_label(id, label, None) {
            Ok(report) => {
                let periodic = matches!(report.classification, Classification::Periodic { .. });
                if !periodic {
                    failures.push(format!(
                        "{} {}: not periodic ({:?})",
                        id.name(),
                        fmt_label(label),
                        report.classification
                    ));
                    return;
                }
                if report.closure_error >= 1e-9 * vlen {
                    failures.push(format!(
                        "{} {}: closure error {:.3e} exceeds 1e-9|V|",
                        id.name(),
                        fmt_label(label),
                        report.closure_error
                    ));
                }
                if (report.path_length - vlen).abs() >= 1e-9 * vlen {
                    failures.push(format!(
                        "{} {}: path length {:.12} vs |V| {:.12}",
                        id.name(),
                        fmt_label(label),
                        report.path_length,
                        vlen
                    ));
                }
                if id.dimension() == 2 {
                    let formula = orbits::collision_count(id, label).unwrap_or(-1);
                    if report.collisions as i64 != formula {
                        failures.push(format!(
                            "{} {}: traced {} collisions, formula {}",
                            id.name(),
                            fmt_label(label),
                            report.collisions,
                            formula
                        ));
                    }
                }
            }
            Err(e) => failures.push(format!("{} {}: {e}", id.name(), fmt_label(label))),
        }
    };
    for i in 0..a.samples_2d {
        let id = twod[i % twod.len()];
        let label: Vec<i64> = (0..2).map(|_| rng.gen_range(1..=8)).collect();
        check(id, &label, &mut failures);
    }
    for i in 0..a.samples_3d {
        let id = threed[i % threed.len()];
        let label: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=6)).collect();
        check(id, &label, &mut failures);
    }
    CheckReport { name: "oracle-agreement".into(), pass: failures.is_empty(), cases, failures }
}

fn merge_reports(name: &str, parts: Vec<CheckReport>) -> CheckReport {
    CheckReport {
        name: name.into(),
        pass: parts.iter().all(|p| p.pass),
        cases: parts.iter().map(|p| p.cases).sum(),
        failures: parts.into_iter().flat_map(|p| p.failures).collect(),
    }
}

fn cmd_verify(a: VerifyArgs) -> billiards::Result<ExitCode> {
    let mut reports = Vec::new();

    reports.push(oracle_agreement_suite(&a));

    let corr: Vec<CheckReport> = domains::catalog()
        .iter()
        .map(|s| spectra::correspondence_check(s.id, a.max))
        .collect();
    reports.push(merge_reports("correspondence", corr));

    let reductions = [
        (DomainId::Square, DomainId::RightIsosceles),
        (DomainId::Equilateral, DomainId::HemiEquilateral),
        (DomainId::KTetra, DomainId::K2Tetra),
        (DomainId::K2Tetra, DomainId::K4Tetra),
        (DomainId::Cube, DomainId::K4Tetra),
    ];
    let mut red_parts = Vec::new();
    for (parent, child) in reductions {
        red_parts.push(spectra::subset_reduction_check(parent, child, a.reduction_max)?);
    }
    reports.push(merge_reports("subset-reduction", red_parts));

    let iso_parts: billiards::Result<Vec<CheckReport>> = domains::catalog()
        .iter()
        .filter(|s| s.dimension == 2)
        .map(|s| spectra::reciprocal_isospectrality(s.id, a.reduction_max))
        .collect();
    reports.push(merge_reports("isospectrality", iso_parts?));

    let mut all_pass = true;
    for r in &reports {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!("{:<18} {} ({} cases)", r.name, verdict, r.cases);
        for f in r.failures.iter().take(12) {
            println!("    {f}");
        }
        if r.failures.len() > 12 {
            println!("    ... and {} more", r.failures.len() - 12);
        }
        all_pass &= r.pass;
    }
    let summary = json!({
        "pass": all_pass,
        "checks": reports.iter().map(|r| json!({
            "name": r.name,
            "pass": r.pass,
            "cases": r.cases,
            "failures": r.failures,
        })).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string(&summary).unwrap());
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

// ---------------------------------------------------------------------------
// genus
// ---------------------------------------------------------------------------

fn cmd_genus(a: GenusArgs) -> billiards::Result<ExitCode> {
    let angles: billiards::Result<Vec<RationalAngle>> = a
        .angles
        .split(',')
        .map(|s| RationalAngle::parse(s.trim()))
        .collect();
    let angles = angles?;
    let g = domains::genus(&angles)?;
    let integrable = g == 1;
    match a.format {
        OutFormat::Json => {
            let doc = json!({
                "angles": a.angles,
                "genus": g,
                "integrable": integrable,
            });
            println!("{}", serde_json::to_string(&doc).unwrap());
        }
        _ => {
            println!("{g}");
            if integrable {
                println!("integrable (genus 1)");
            } else {
                println!("not integrable (genus {g})");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(a: SolveArgs) -> billiards::Result<ExitCode> {
    let id = parse_domain(&a.domain)?;
    let bc: BoundaryCondition = a.bc.into();
    if let Some(path) = &a.dump_mesh {
        let mut mesh = helmholtz::base_mesh(id);
        for _ in 0..a.levels {
            mesh = mesh.refine();
        }
        let full = resolve_out(path);
        std::fs::write(&full, mesh.to_text())
            .map_err(|e| Error::InvalidInput(format!("cannot write {full:?}: {e}")))?;
        println!("{}", full.display());
    }
    let rows = helmholtz::compare(id, bc, a.count, a.levels)?;
    let text = match a.format {
        OutFormat::Json => {
            let doc = json!({
                "domain": id.name(),
                "bc": bc.name(),
                "levels": a.levels,
                "rows": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        OutFormat::Csv => {
            let mut out = vec![vec![
                "sl_no".to_string(),
                "analytic".to_string(),
                "numeric".to_string(),
                "relative_error".to_string(),
            ]];
            for r in &rows {
                out.push(vec![
                    r.index.to_string(),
                    format!("{}", r.analytic),
                    format!("{:.9}", r.numeric),
                    format!("{:.3e}", r.relative_error),
                ]);
            }
            csv_string(out)?
        }
        OutFormat::Table => {
            let mut s = format!(
                "# {} {} numeric vs closed form, {} refinement levels\n",
                id.name(),
                bc.name(),
                a.levels
            );
            s.push_str("sl_no  analytic  numeric        rel_error\n");
            for r in &rows {
                s.push_str(&format!(
                    "{:<6} {:<9} {:<14.6} {:.3e}\n",
                    r.index, r.analytic, r.numeric, r.relative_error
                ));
            }
            s
        }
    };
    emit(text, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

fn parse_labels_list(s: &str) -> billiards::Result<Vec<Vec<i64>>> {
    s.split(';').map(parse_label).collect()
}

fn cmd_render(a: RenderArgs) -> billiards::Result<ExitCode> {
    let id = parse_domain(&a.domain)?;
    let out = resolve_out(&a.out);
    let text = if id.dimension() == 2 {
        let scene = match a.view.as_str() {
            "folded-unfolded" => {
                let label = parse_label(a.label.as_deref().ok_or_else(|| {
                    Error::InvalidInput("folded-unfolded view needs --label".into())
                })?)?;
                let start = a.start.as_deref().map(parse_point).transpose()?;
                render::folded_unfolded_scene(id, &label, start.as_deref())?
            }
            "overlay" => {
                let labels = parse_labels_list(a.labels.as_deref().ok_or_else(|| {
                    Error::InvalidInput("overlay view needs --labels (semicolon-separated)".into())
                })?)?;
                render::overlay_scene(id, &labels)?
            }
            "pair" => {
                let labels = parse_labels_list(a.labels.as_deref().ok_or_else(|| {
                    Error::InvalidInput("pair view needs --labels (two, semicolon-separated)".into())
                })?)?;
                if labels.len() != 2 {
                    return Err(Error::InvalidInput("pair view needs exactly two labels".into()));
                }
                render::degenerate_pair_scene(id, &labels[0], &labels[1])?
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown 2-D view '{other}' (folded-unfolded | overlay | pair)"
                )))
            }
        };
        render::render_2d(&scene)?
    } else {
        let scene = match a.view.as_str() {
            "box" => render::scene_with_bounding_box(id)?,
            _ => {
                let label = parse_label(
                    a.label
                        .as_deref()
                        .ok_or_else(|| Error::InvalidInput("3-D orbit view needs --label".into()))?,
                )?;
                render::orbit_scene_3d(id, &label)?
            }
        };
        render::export_3d(&scene)?
    };
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::InvalidInput(format!("cannot create {parent:?}: {e}")))?;
        }
    }
    std::fs::write(&out, text)
        .map_err(|e| Error::InvalidInput(format!("cannot write {out:?}: {e}")))?;
    println!("{}", out.display());
    Ok(ExitCode::SUCCESS)
}
