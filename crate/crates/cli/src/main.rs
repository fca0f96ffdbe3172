//! Command-line front end: region computation and plotting, bit-level
//! simulation, equilibrium checks, and the worked-channel verification
//! harness. All rationals cross this boundary as "num/den" strings; given
//! the same inputs and seed the outputs are byte-identical.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ldic_core::bits::Bits;
use ldic_core::channel::{simulate, ChannelParams, User};
use ldic_core::equilibrium::{
    default_epsilon, deviation_ceiling, is_ne_rate_pair, ne_split_search,
    restricted_deviation_oracle, DeviationClass, GameOutcome, OracleOutcome, RateSplit,
};
use ldic_core::polytope::region2::vertices_csv;
use ldic_core::polytope::Region2;
use ldic_core::rat::{fmt_rat, parse_rat, rat, Rat};
use ldic_core::regions::{
    box_region, capacity_region, inclusion_chain_check, nash_bounds, ne_region, theta, NashBounds,
    RatePair,
};
use ldic_core::schemes::{self, run_and_verify, Scheme, Verdict};

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "ldic",
    about = "Rate regions and equilibria of the two-user linear deterministic interference channel with output feedback",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ChannelArgs {
    /// Direct bit pipes of pair 1.
    #[arg(long)]
    n11: u32,
    /// Direct bit pipes of pair 2.
    #[arg(long)]
    n22: u32,
    /// Cross pipes into receiver 1.
    #[arg(long)]
    n12: u32,
    /// Cross pipes into receiver 2.
    #[arg(long)]
    n21: u32,
    /// Feedback pipes to transmitter 1.
    #[arg(long, default_value_t = 0)]
    fb11: u32,
    /// Feedback pipes to transmitter 2.
    #[arg(long, default_value_t = 0)]
    fb22: u32,
}

impl ChannelArgs {
    fn params(&self) -> ChannelParams {
        ChannelParams::new(self.n11, self.n22, self.n12, self.n21, self.fb11, self.fb22)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the achievable region, the bound box, and their intersection.
    Region {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Equilibrium slack, a positive rational like "1/100".
        #[arg(long)]
        eta: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Output path; stdout when omitted. CSV output derives one
        /// sibling file per region from this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the bound box alone.
    #[command(name = "box")]
    BoxRegion {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        eta: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the equilibrium region alone.
    Ne {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        eta: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test a rate pair for equilibrium membership and produce a witness.
    NeCheck {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        eta: String,
        #[arg(long)]
        r1: String,
        #[arg(long)]
        r2: String,
        /// Also run the restricted deviation search against this fixed
        /// scheme (path or builtin name); the opposing user deviates.
        #[arg(long)]
        oracle_against: Option<String>,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an equilibrium rate split witnessing a rate pair.
    NeSplit {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        eta: String,
        #[arg(long)]
        r1: String,
        #[arg(long)]
        r2: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a scheme pair and report rates and the error verdict.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// User 1 scheme: a JSON file path or one of floor, zero, pair34,
        /// pair54.
        #[arg(long)]
        scheme1: String,
        /// User 2 scheme, same forms.
        #[arg(long)]
        scheme2: String,
        #[arg(long, default_value_t = 64)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Force exhaustive enumeration of messages and randomness.
        #[arg(long)]
        exhaustive: bool,
        /// Blocks for builtin schemes.
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        /// Write the resolved schemes as JSON files into this directory.
        #[arg(long)]
        emit_schemes: Option<PathBuf>,
        /// Write a full trace of one seeded transmission to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the no-feedback / given / perfect-feedback inclusion chain.
    CheckInclusions {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        eta: String,
        /// Sweep all parameter tuples in {0..max}^6 instead of one channel.
        #[arg(long)]
        sweep: Option<u32>,
    },
    /// Reproduce the worked-channel panels: region collapse below the
    /// feedback threshold, strict growth above it, the two named
    /// equilibrium points, and the bound table; optionally one SVG per
    /// panel.
    VerifyFigure2 {
        #[arg(long)]
        eta: String,
        /// Directory for the panel SVGs; no files when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Region {
            channel,
            eta,
            format,
            out,
        } => cmd_region(channel, eta, format, out),
        Command::BoxRegion {
            channel,
            eta,
            format,
            out,
        } => cmd_single_region(channel, eta, format, out, RegionChoice::Box),
        Command::Ne {
            channel,
            eta,
            format,
            out,
        } => cmd_single_region(channel, eta, format, out, RegionChoice::Ne),
        Command::NeCheck {
            channel,
            eta,
            r1,
            r2,
            oracle_against,
            trials,
            seed,
            out,
        } => cmd_ne_check(channel, eta, r1, r2, oracle_against, trials, seed, out),
        Command::NeSplit {
            channel,
            eta,
            r1,
            r2,
            out,
        } => cmd_ne_split(channel, eta, r1, r2, out),
        Command::Simulate {
            channel,
            scheme1,
            scheme2,
            trials,
            seed,
            exhaustive,
            blocks,
            emit_schemes,
            trace,
            out,
        } => cmd_simulate(SimulateArgs {
            channel,
            scheme1,
            scheme2,
            trials,
            seed,
            exhaustive,
            blocks,
            emit_schemes,
            trace,
            out,
        }),
        Command::CheckInclusions {
            channel,
            eta,
            sweep,
        } => cmd_check_inclusions(channel, eta, sweep),
        Command::VerifyFigure2 { eta, out } => cmd_verify_figure(eta, out),
    }
}

fn positive_eta(text: &str) -> Result<Rat> {
    let eta = parse_rat(text).map_err(|e| anyhow!("bad eta {text:?}: {e}"))?;
    if eta <= Rat::zero() {
        bail!("eta must be positive");
    }
    Ok(eta)
}

fn nonnegative_rate(text: &str, what: &str) -> Result<Rat> {
    let r = parse_rat(text).map_err(|e| anyhow!("bad {what} {text:?}: {e}"))?;
    if r.is_negative() {
        bail!("{what} must be nonnegative");
    }
    Ok(r)
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {path:?}")),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Sibling path "stem.suffix.ext" next to the requested output path.
fn sibling(base: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "regions".into());
    base.with_file_name(format!("{stem}.{suffix}.{ext}"))
}

fn plot_extent(p: &ChannelParams) -> (i64, i64) {
    let x = theta(p, User::One).get(2).max(1);
    let y = theta(p, User::Two).get(2).max(1);
    (x + 1, y + 1)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct RegionBundle<'a> {
    params: &'a ChannelParams,
    eta: String,
    bounds: &'a NashBounds,
    capacity: &'a Region2,
    #[serde(rename = "box")]
    box_region: &'a Region2,
    ne: &'a Region2,
}

fn cmd_region(
    channel: ChannelArgs,
    eta: String,
    format: Format,
    out: Option<PathBuf>,
) -> Result<i32> {
    let p = channel.params();
    let eta = positive_eta(&eta)?;
    let c = capacity_region(&p);
    let b = box_region(&p, &eta)?;
    let n = c.intersect(&b);
    let bounds = nash_bounds(&p, &eta)?;
    match format {
        Format::Json => {
            let bundle = RegionBundle {
                params: &p,
                eta: fmt_rat(&eta),
                bounds: &bounds,
                capacity: &c,
                box_region: &b,
                ne: &n,
            };
            emit(out.as_deref(), &to_json(&bundle)?)?;
        }
        Format::Csv => match out {
            Some(path) => {
                fs::write(sibling(&path, "capacity", "csv"), vertices_csv(&c))?;
                fs::write(sibling(&path, "box", "csv"), vertices_csv(&b))?;
                fs::write(sibling(&path, "ne", "csv"), vertices_csv(&n))?;
            }
            None => print!(
                "# capacity\n{}# box\n{}# ne\n{}",
                vertices_csv(&c),
                vertices_csv(&b),
                vertices_csv(&n)
            ),
        },
        Format::Svg => {
            let (xu, yu) = plot_extent(&p);
            let title = format!(
                "achievable and equilibrium regions, channel ({},{},{},{},{},{}), eta {}",
                p.n11,
                p.n22,
                p.n12,
                p.n21,
                p.fb11,
                p.fb22,
                fmt_rat(&eta)
            );
            emit(out.as_deref(), &svg::region_overlay(&c, &n, xu, yu, &title))?;
        }
    }
    Ok(0)
}

#[derive(Clone, Copy)]
enum RegionChoice {
    Box,
    Ne,
}

fn cmd_single_region(
    channel: ChannelArgs,
    eta: String,
    format: Format,
    out: Option<PathBuf>,
    which: RegionChoice,
) -> Result<i32> {
    let p = channel.params();
    let eta = positive_eta(&eta)?;
    let (region, name) = match which {
        RegionChoice::Box => (box_region(&p, &eta)?, "box"),
        RegionChoice::Ne => (ne_region(&p, &eta)?, "ne"),
    };
    match format {
        Format::Json => emit(out.as_deref(), &to_json(&region)?)?,
        Format::Csv => emit(out.as_deref(), &vertices_csv(&region))?,
        Format::Svg => {
            let (xu, yu) = plot_extent(&p);
            let outer = capacity_region(&p);
            let title = format!("{name} region, eta {}", fmt_rat(&eta));
            emit(
                out.as_deref(),
                &svg::region_overlay(&outer, &region, xu, yu, &title),
            )?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct BoundsJson {
    #[serde(rename = "L")]
    lower: [String; 2],
    #[serde(rename = "U")]
    upper: [String; 2],
}

#[derive(Serialize)]
struct OracleJson {
    class: String,
    fixed_scheme: String,
    deviating_user: usize,
    best_rate: String,
    ceiling: String,
    candidates: u64,
}

#[derive(Serialize)]
struct NeCheckReport {
    rate_pair: RatePair,
    in_ne_region: bool,
    bounds: BoundsJson,
    witness_split: Option<RateSplit>,
    oracle: Option<OracleJson>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_ne_check(
    channel: ChannelArgs,
    eta: String,
    r1: String,
    r2: String,
    oracle_against: Option<String>,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<i32> {
    let p = channel.params();
    let eta = positive_eta(&eta)?;
    let r = RatePair::new(nonnegative_rate(&r1, "r1")?, nonnegative_rate(&r2, "r2")?);
    let member = is_ne_rate_pair(&p, &eta, &r)?;
    let witness = ne_split_search(&p, &eta, &r)?;
    let bounds = nash_bounds(&p, &eta)?;
    let oracle = match oracle_against {
        Some(spec) => {
            let fixed = resolve_scheme_any_user(&spec, &p, 3)?;
            let deviator = fixed.user_id().other();
            let class = DeviationClass::default();
            let outcome: OracleOutcome =
                restricted_deviation_oracle(&p, &fixed, &class, trials, seed)?;
            let (rc, rr) = fixed.common_rate_pair(&p);
            let ceiling = deviation_ceiling(&p, deviator, &rc, &rr, &eta)?;
            Some(OracleJson {
                class: format!(
                    "patterns of at most {} uses, relays {}",
                    class.max_pattern_len,
                    if class.allow_relay { "allowed" } else { "off" }
                ),
                fixed_scheme: spec,
                deviating_user: deviator.index(),
                best_rate: fmt_rat(&outcome.best_rate),
                ceiling: fmt_rat(&ceiling),
                candidates: outcome.candidates,
            })
        }
        None => None,
    };
    let report = NeCheckReport {
        rate_pair: r,
        in_ne_region: member,
        bounds: BoundsJson {
            lower: [fmt_rat(&bounds.l1), fmt_rat(&bounds.l2)],
            upper: [fmt_rat(&bounds.u1), fmt_rat(&bounds.u2)],
        },
        witness_split: witness,
        oracle,
    };
    emit(out.as_deref(), &to_json(&report)?)?;
    Ok(0)
}

fn cmd_ne_split(
    channel: ChannelArgs,
    eta: String,
    r1: String,
    r2: String,
    out: Option<PathBuf>,
) -> Result<i32> {
    let p = channel.params();
    let eta = positive_eta(&eta)?;
    let r = RatePair::new(nonnegative_rate(&r1, "r1")?, nonnegative_rate(&r2, "r2")?);
    let witness = ne_split_search(&p, &eta, &r)?;
    emit(out.as_deref(), &to_json(&witness)?)?;
    Ok(0)
}

fn resolve_scheme(spec: &str, p: &ChannelParams, user: User, blocks: usize) -> Result<Scheme> {
    let scheme = match spec {
        "floor" => schemes::floor_scheme_with_blocks(p, user, blocks),
        "zero" => schemes::zero_scheme(p, user, blocks),
        "pair34" => {
            let (s1, s2) = schemes::builtin::pair_3_4(blocks);
            match user {
                User::One => s1,
                User::Two => s2,
            }
        }
        "pair54" => {
            let (s1, s2) = schemes::builtin::pair_5_4(blocks);
            match user {
                User::One => s1,
                User::Two => s2,
            }
        }
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing scheme {path}"))?
        }
    };
    if scheme.user != user.index() {
        bail!(
            "scheme {spec} is for user {}, expected user {}",
            scheme.user,
            user.index()
        );
    }
    let diag = scheme.validate(p);
    if !diag.is_clean() {
        bail!("scheme {spec} invalid: {}", diag.0.join("; "));
    }
    Ok(scheme)
}

fn resolve_scheme_any_user(spec: &str, p: &ChannelParams, blocks: usize) -> Result<Scheme> {
    match resolve_scheme(spec, p, User::One, blocks) {
        Ok(s) => Ok(s),
        Err(first) => resolve_scheme(spec, p, User::Two, blocks).map_err(|_| first),
    }
}

#[derive(Serialize)]
struct SimulateReportJson {
    params: ChannelParams,
    rates: [String; 2],
    error_probs: [String; 2],
    trials: usize,
    exhaustive: bool,
    verdict: String,
    utilities: GameOutcome,
}

struct SimulateArgs {
    channel: ChannelArgs,
    scheme1: String,
    scheme2: String,
    trials: usize,
    seed: u64,
    exhaustive: bool,
    blocks: usize,
    emit_schemes: Option<PathBuf>,
    trace: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let p = args.channel.params();
    let s1 = resolve_scheme(&args.scheme1, &p, User::One, args.blocks)?;
    let s2 = resolve_scheme(&args.scheme2, &p, User::Two, args.blocks)?;
    if let Some(dir) = &args.emit_schemes {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("scheme-user1.json"), to_json(&s1)?)?;
        fs::write(dir.join("scheme-user2.json"), to_json(&s2)?)?;
    }
    let report = run_and_verify(&p, &s1, &s2, args.trials, args.exhaustive, args.seed)?;
    if let Some(path) = &args.trace {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let w1 = Bits::random(s1.message_len(), &mut rng);
        let w2 = Bits::random(s2.message_len(), &mut rng);
        let o1 = Bits::random(s1.randomness_len(), &mut rng);
        let o2 = Bits::random(s2.randomness_len(), &mut rng);
        let t = simulate(&p, &s1, &s2, &w1, &w2, &o1, &o2)?;
        fs::write(path, t.to_json()).with_context(|| format!("writing {path:?}"))?;
    }
    let epsilon = default_epsilon();
    let utilities = GameOutcome::from_report(&args.scheme1, &args.scheme2, &report, &epsilon)?;
    let json = SimulateReportJson {
        params: p,
        rates: [fmt_rat(&report.rates.0), fmt_rat(&report.rates.1)],
        error_probs: [
            fmt_rat(&report.error_probs.0),
            fmt_rat(&report.error_probs.1),
        ],
        trials: report.trials,
        exhaustive: report.exhaustive,
        verdict: match &report.verdict {
            Verdict::ZeroError => "zero-error".into(),
            Verdict::Failed(_) => "failed".into(),
        },
        utilities,
    };
    emit(args.out.as_deref(), &to_json(&json)?)?;
    Ok(if report.is_zero_error() { 0 } else { 1 })
}

fn cmd_check_inclusions(channel: ChannelArgs, eta: String, sweep: Option<u32>) -> Result<i32> {
    let eta = positive_eta(&eta)?;
    match sweep {
        None => {
            let p = channel.params();
            let ok = inclusion_chain_check(&p, &eta)?;
            let lo = ne_region(&p.without_feedback(), &eta)?;
            let mid = ne_region(&p, &eta)?;
            let hi = ne_region(&p.with_perfect_feedback(), &eta)?;
            println!(
                "vertices: no-feedback {}, given {}, perfect-feedback {}",
                lo.vertices().len(),
                mid.vertices().len(),
                hi.vertices().len()
            );
            println!("inclusion chain: {}", if ok { "holds" } else { "VIOLATED" });
            Ok(if ok { 0 } else { 1 })
        }
        Some(max) => {
            let mut checked = 0u64;
            for n11 in 0..=max {
                for n22 in 0..=max {
                    for n12 in 0..=max {
                        for n21 in 0..=max {
                            for fb11 in 0..=max {
                                for fb22 in 0..=max {
                                    let p = ChannelParams::new(n11, n22, n12, n21, fb11, fb22);
                                    if !inclusion_chain_check(&p, &eta)? {
                                        println!("inclusion chain VIOLATED at {p:?}");
                                        return Ok(1);
                                    }
                                    checked += 1;
                                }
                            }
                        }
                    }
                }
            }
            println!("inclusion chain holds on all {checked} tuples");
            Ok(0)
        }
    }
}

fn cmd_verify_figure(eta: String, out: Option<PathBuf>) -> Result<i32> {
    let eta = positive_eta(&eta)?;
    let fig = |fb11, fb22| ChannelParams::new(7, 6, 4, 4, fb11, fb22);
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    let base = ne_region(&fig(0, 0), &eta)?;
    let mut collapse = true;
    for fb11 in 0..=4 {
        for fb22 in 0..=4 {
            collapse &= ne_region(&fig(fb11, fb22), &eta)?.equals(&base);
        }
    }
    check(
        "equilibrium region unchanged for feedback below threshold",
        collapse,
    );

    let mut enlargement = true;
    for fb11 in 5..=7 {
        for fb22 in 0..=4 {
            enlargement &= ne_region(&fig(fb11, fb22), &eta)?.strictly_contains(&base);
        }
    }
    check(
        "equilibrium region strictly larger above threshold",
        enlargement,
    );

    let n50 = ne_region(&fig(5, 0), &eta)?;
    check(
        "equilibrium points (3,4) and (5,4) on the feedback-5 channel",
        n50.contains_point(&rat(3), &rat(4)) && n50.contains_point(&rat(5), &rat(4)),
    );

    let mut table = true;
    for (fb22, expect) in [(0u32, 5i64), (5, 6), (6, 7)] {
        table &= nash_bounds(&fig(0, fb22), &eta)?.u1 == rat(expect) + &eta;
    }
    for (fb11, expect) in [(0u32, 3i64), (5, 4), (6, 5), (7, 6)] {
        table &= nash_bounds(&fig(fb11, 0), &eta)?.u2 == rat(expect) + &eta;
    }
    check("upper-bound table across feedback settings", table);

    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        for (fb11, fb22) in [(0, 0), (5, 0), (6, 0), (7, 0), (7, 5), (7, 6)] {
            let p = fig(fb11, fb22);
            let c = capacity_region(&p);
            let n = ne_region(&p, &eta)?;
            let (xu, yu) = plot_extent(&p);
            let title = format!("channel (7,6,4,4,{fb11},{fb22}), eta {}", fmt_rat(&eta));
            let svg = svg::region_overlay(&c, &n, xu, yu, &title);
            fs::write(dir.join(format!("region-fb{fb11}-{fb22}.svg")), svg)?;
        }
    }

    Ok(if failures == 0 { 0 } else { 1 })
}
