//! Command-line front end: build covers, verify them exactly or by sampling,
//! print bound tables, extract Ky Fan certificates, search and render.
//!
//! Exit codes: 0 when every claim holds, 1 when a violation is found,
//! 2 for usage, input or regime errors.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spherecover::constructions::{
    bar_cover, belt_auto_params_report, belt_cover, bounds_table, circle_cover, gale_cover, nm_cover_upper,
    BeltParams, BoundsTable,
};
use spherecover::document::{from_json, to_json};
use spherecover::exact::{arc_sweep, multiplicity_extrema, verify_claims};
use spherecover::kyfan::{deep_point, verify_certificate};
use spherecover::render::{render_svg, View};
use spherecover::sampling::{verify_sampled, Requirements, SamplePlan};
use spherecover::search::{search, SearchConfig};
use spherecover::{Claims, Cover, Region};

use output::Run;

#[derive(Parser)]
#[command(name = "spherecover", version, about = "Antipodal multiple covers of spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a cover and write it as JSON.
    Construct(ConstructArgs),
    /// Check a cover's claims exactly or by sampling.
    Verify(VerifyArgs),
    /// Known bounds on f, f-bar and Q.
    Bounds(BoundsArgs),
    /// Ky Fan chain certificate and deep point of a hemisphere cover.
    Kyfan(KyfanArgs),
    /// Annealing search for hemisphere covers with low maximum multiplicity.
    Search(SearchArgs),
    /// SVG picture of a cover of S^1 or S^2.
    Render(RenderArgs),
    /// Restrict a hemisphere cover to its equator.
    Restrict(RestrictArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionType {
    Gale,
    Bar,
    #[value(name = "nm_upper", alias = "nm-upper")]
    NmUpper,
    Circle,
    #[value(alias = "theorem4")]
    Belt,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long = "type", value_enum)]
    kind: ConstructionType,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Belt parameters as JSON; computed automatically when absent.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Sphere,
    #[value(alias = "open_north")]
    OpenNorth,
    #[value(alias = "closed_north")]
    ClosedNorth,
    Equator,
    OpenSouth,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Region {
        match r {
            RegionArg::Sphere => Region::Sphere,
            RegionArg::OpenNorth => Region::OpenNorth,
            RegionArg::ClosedNorth => Region::ClosedNorth,
            RegionArg::Equator => Region::Equator,
            RegionArg::OpenSouth => Region::OpenSouth,
        }
    }
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("regime").required(true).args(["exact", "samples"])))]
struct VerifyArgs {
    cover: PathBuf,
    #[arg(long)]
    exact: bool,
    /// Number of seeded samples (each also evaluated at its antipode).
    #[arg(long)]
    samples: Option<usize>,
    /// Also report the multiplicity range over this region.
    #[arg(long, value_enum)]
    region: Option<RegionArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the claimed global fold.
    #[arg(long)]
    claim_n: Option<u32>,
    /// Override the claimed northern fold.
    #[arg(long)]
    claim_m: Option<u32>,
    /// With --claim-m: the claim is over the closed northern hemisphere.
    #[arg(long, requires = "claim_m")]
    closed_north: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    /// Print JSON instead of the text table.
    #[arg(long)]
    json: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KyfanArgs {
    cover: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    /// Number of hemispheres.
    #[arg(long = "poles", short = 'N')]
    poles: usize,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Objective trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Equator,
    North,
    South,
}

#[derive(Args)]
struct RenderArgs {
    cover: PathBuf,
    #[arg(long, value_enum, default_value = "north")]
    view: ViewArg,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RestrictArgs {
    cover: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

/// A finished command either passed or found a violation.
enum Outcome {
    Pass,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::Kyfan(a) => kyfan(a),
        Command::Search(a) => run_search(a),
        Command::Render(a) => render(a),
        Command::Restrict(a) => restrict(a),
    }
}

fn need(v: Option<usize>, flag: &str, kind: &str) -> Result<usize> {
    v.with_context(|| format!("--{flag} is required for --type {kind}"))
}

fn load_cover(run: &mut Run, path: &Path) -> Result<Cover> {
    let text = run.read_input(path)?;
    from_json(&text).with_context(|| format!("parsing cover {}", path.display()))
}

fn write_json(run: &mut Run, path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    run.write(path, text.as_bytes())
}

fn construct(a: ConstructArgs) -> Result<Outcome> {
    let mut run = Run::new("construct");
    let cover = match a.kind {
        ConstructionType::Gale => gale_cover(need(a.d, "d", "gale")?, need(a.n, "n", "gale")?)?,
        ConstructionType::Bar => bar_cover(need(a.d, "d", "bar")?, need(a.n, "n", "bar")?, need(a.m, "m", "bar")?)?,
        ConstructionType::NmUpper => {
            nm_cover_upper(need(a.d, "d", "nm-upper")?, need(a.n, "n", "nm-upper")?, need(a.m, "m", "nm-upper")?)?
        }
        ConstructionType::Circle => circle_cover(need(a.m, "m", "circle")?)?,
        ConstructionType::Belt => {
            let d = need(a.d, "d", "belt")?;
            let params = match &a.params {
                Some(p) => {
                    let text = run.read_input(p)?;
                    serde_json::from_str::<BeltParams>(&text).context("parsing belt parameters")?
                }
                None => {
                    let report = belt_auto_params_report(d)?;
                    eprintln!(
                        "auto parameters: eta = {:.4} rad, eps2 = {:.4}, eps1 = {:.5}, {} shrinking rounds",
                        report.eta, report.params.eps2, report.params.eps1, report.rounds
                    );
                    report.params
                }
            };
            belt_cover(d, params)?
        }
    };
    let mut text = to_json(&cover);
    text.push('\n');
    run.write(&a.output, text.as_bytes())?;
    run.finish()?;
    println!("wrote {} ({} sets on S^{})", a.output.display(), cover.len(), cover.dim());
    Ok(Outcome::Pass)
}

fn is_arc_cover(cover: &Cover) -> bool {
    cover.dim() == 1 && !cover.is_hemisphere_cover()
}

fn has_belt_sets(cover: &Cover) -> bool {
    !cover.is_hemisphere_cover() && !is_arc_cover(cover)
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let mut run = Run::new("verify");
    let mut cover = load_cover(&mut run, &a.cover)?;
    if a.claim_n.is_some() || a.claim_m.is_some() {
        let n = a.claim_n.unwrap_or(cover.claims().n);
        let claims = match a.claim_m {
            Some(m) if a.closed_north => Claims::closed_north(n, m),
            Some(m) => Claims::open_north(n, m),
            None => Claims::fold(n),
        };
        cover = cover.with_claims(claims)?;
    }
    let (passed, report) = if a.exact {
        if has_belt_sets(&cover) {
            bail!("--exact needs a hemisphere or arc cover; this cover has predicate sets, use --samples");
        }
        verify_exact(&cover, a.region.map(Region::from))?
    } else {
        let m = a.samples.expect("clap enforces the group");
        run.seed(a.seed);
        let plan = SamplePlan::for_cover(&cover, a.seed, m);
        let req = Requirements::from_claims(&cover);
        let r = verify_sampled(&cover, &plan, &req)?;
        for s in &r.regions {
            println!("{:<13} samples {:>9}  min {:>3}  max {:>3}", s.region, s.samples, opt(s.min), opt(s.max));
        }
        println!(
            "antipodal violations {}, boundary-ambiguous {} ({:.4}%)",
            r.antipodal_violations,
            r.boundary_ambiguous,
            100.0 * r.ambiguous_fraction()
        );
        for v in r.violations.iter().take(5) {
            println!("violation: {} at sample {}: {}", v.kind, v.index, v.detail);
        }
        let mut value = serde_json::to_value(&r)?;
        if let Some(region) = a.region {
            value["requested_region"] = json!(Region::from(region).name());
        }
        (r.passed(), value)
    };
    println!("{}", if passed { "PASS" } else { "FAIL" });
    if let Some(out) = &a.output {
        write_json(&mut run, out, &report)?;
    }
    run.finish()?;
    Ok(if passed { Outcome::Pass } else { Outcome::Violation })
}

fn opt(v: Option<usize>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

fn verify_exact(cover: &Cover, region: Option<Region>) -> Result<(bool, serde_json::Value)> {
    let mut claims_json = Vec::new();
    let mut passed = true;
    let mut extra = None;
    if is_arc_cover(cover) {
        let c = cover.claims();
        let mut checks = vec![(Region::Sphere, c.n)];
        checks.extend(c.north_region());
        for (r, need) in checks {
            let s = arc_sweep(cover, r)?;
            let ok = s.min >= need as usize;
            passed &= ok;
            println!("{need}-fold over {}: min {} -> {}", r.name(), s.min, if ok { "PASS" } else { "FAIL" });
            claims_json.push(json!({"claim": format!("{need}-fold over {}", r.name()), "pass": ok, "sweep": s}));
        }
        let s = arc_sweep(cover, Region::Sphere)?;
        let ok = s.antipodal_violations.is_empty();
        passed &= ok;
        println!("antipodal-free: {}", if ok { "PASS" } else { "FAIL" });
        claims_json.push(json!({"claim": "antipodal-free", "pass": ok, "sets": s.antipodal_violations}));
        if let Some(r) = region {
            extra = Some(serde_json::to_value(arc_sweep(cover, r)?)?);
        }
    } else {
        for v in verify_claims(cover, cover.claims())? {
            passed &= v.pass;
            println!("{}: {} -> {}", v.claim, v.reason, if v.pass { "PASS" } else { "FAIL" });
            claims_json.push(serde_json::to_value(&v)?);
        }
        if let Some(r) = region {
            let rep = multiplicity_extrema(cover, r)?;
            println!("{}: min {} max {}", r.name(), rep.min, rep.max);
            extra = Some(rep.to_json_value());
        }
    }
    let report = json!({
        "exact": true,
        "cover_kind": cover.kind(),
        "claims": claims_json,
        "region_report": extra,
        "verdict": if passed { "PASS" } else { "FAIL" },
    });
    Ok((passed, report))
}

fn fmt_opt(v: Option<usize>) -> String {
    v.map_or("?".into(), |x| x.to_string())
}

fn bounds_text(t: &BoundsTable) -> String {
    let mut s = format!("d = {}, n = {}", t.d, t.n);
    if let Some(m) = t.m {
        s.push_str(&format!(", m = {m}"));
    }
    s.push('\n');
    if t.m.is_some() {
        match t.f_exact {
            Some(f) => s.push_str(&format!("f      = {f} (exact)\n")),
            None => s.push_str(&format!("f      in [{}, {}]\n", fmt_opt(t.f_lower), fmt_opt(t.f_upper))),
        }
        s.push_str(&format!("f-bar  = {}\n", fmt_opt(t.fbar_exact)));
    }
    match t.q_exact {
        Some(q) => s.push_str(&format!("Q      = {q} (exact)\n")),
        None => s.push_str(&format!("Q      in [{}, {}]\n", t.q_lower, t.q_upper)),
    }
    s
}

fn bounds(a: BoundsArgs) -> Result<Outcome> {
    let mut run = Run::new("bounds");
    let t = bounds_table(a.d, a.n, a.m)?;
    let value = serde_json::to_value(&t)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        print!("{}", bounds_text(&t));
    }
    if let Some(out) = &a.output {
        write_json(&mut run, out, &value)?;
    }
    run.finish()?;
    Ok(Outcome::Pass)
}

fn kyfan(a: KyfanArgs) -> Result<Outcome> {
    let mut run = Run::new("kyfan");
    let cover = load_cover(&mut run, &a.cover)?;
    let cert = match deep_point(&cover, a.n) {
        Ok(c) => c,
        Err(spherecover::Error::Precondition(msg)) => {
            println!("FAIL: {msg}");
            return Ok(Outcome::Violation);
        }
        Err(e) => return Err(e.into()),
    };
    let verified = verify_certificate(&cover, &cert)?;
    println!(
        "chain {:?}, deep point covered {} times (lower bound {}), certificate {}",
        cert.chain_sets,
        cert.count,
        cover.dim().div_ceil(2) + a.n,
        if verified { "verified" } else { "REJECTED" }
    );
    if !cert.first_coordinates_distinct {
        println!("warning: first coordinates along the chain are not pairwise distinct");
    }
    if let Some(out) = &a.output {
        let mut v = cert.to_json_value();
        v["verified"] = json!(verified);
        write_json(&mut run, out, &v)?;
    }
    run.finish()?;
    Ok(if verified { Outcome::Pass } else { Outcome::Violation })
}

fn run_search(a: SearchArgs) -> Result<Outcome> {
    let mut run = Run::new("search");
    run.seed(a.seed);
    let mut config = SearchConfig::new(a.d, a.n, a.poles);
    config.iterations = a.iterations;
    config.restarts = a.restarts;
    config.seed = a.seed;
    let r = search(&config)?;
    println!(
        "{} states, best max {} (min {}), lowest feasible max {}, target d+n = {}: {}",
        r.states_evaluated,
        r.best_max,
        r.best_min,
        r.lowest_feasible_max,
        a.d + a.n,
        serde_json::to_value(&r.verdict)?.as_str().unwrap_or_default()
    );
    if let Some(out) = &a.output {
        let mut v = serde_json::to_value(&r)?;
        v["best_report"] = multiplicity_extrema(&r.cover()?, Region::Sphere)?.to_json_value();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("trace");
        }
        write_json(&mut run, out, &v)?;
    }
    if let Some(t) = &a.trace {
        run.write(t, r.trace_csv().as_bytes())?;
    }
    run.finish()?;
    Ok(Outcome::Pass)
}

fn render(a: RenderArgs) -> Result<Outcome> {
    let mut run = Run::new("render");
    let cover = load_cover(&mut run, &a.cover)?;
    let view = match a.view {
        ViewArg::Equator => View::Equator,
        ViewArg::North => View::North,
        ViewArg::South => View::South,
    };
    let svg = render_svg(&cover, view)?;
    run.write(&a.output, svg.as_bytes())?;
    run.finish()?;
    println!("wrote {}", a.output.display());
    Ok(Outcome::Pass)
}

fn restrict(a: RestrictArgs) -> Result<Outcome> {
    let mut run = Run::new("restrict");
    let cover = load_cover(&mut run, &a.cover)?;
    let eq = cover.restrict_to_equator()?;
    let dropped = cover.len() - eq.len();
    let mut text = to_json(&eq);
    text.push('\n');
    run.write(&a.output, text.as_bytes())?;
    run.finish()?;
    println!("wrote {} ({} sets on S^{}, {dropped} vertical hemispheres dropped)", a.output.display(), eq.len(), eq.dim());
    Ok(Outcome::Pass)
}
