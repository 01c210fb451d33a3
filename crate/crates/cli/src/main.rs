//! Batch front end over the `movestruct` library: build balanced move
//! structures from run-length-encoded BWTs, emit LCP and irreducible PLCP
//! arrays, verify serialized structures, and report instrumentation.
//!
//! Exit codes are stable for scripting: 0 success, 1 usage error, 2
//! malformed or unreadable input, 3 verification failure, 4 internal
//! invariant violation (a bug in the library, never bad input).

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Cursor, Write};
use std::path::{Path, PathBuf};
use std::process;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use movestruct::{
    balance, irreducible_plcp, lcp, lcp_array, move_structure, read_lcp_binary, rlbwt,
    write_lcp_binary, Error, IntervalMap, MoveStructure, Result, Rlbwt, DEFAULT_ALPHA,
};

#[derive(Parser)]
#[command(
    name = "movestruct",
    version,
    about = "Balanced move structures and LCP arrays over run-length-encoded BWTs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a balanced move structure from an RLBWT file.
    Build {
        /// Permutation the structure represents.
        #[arg(long, value_enum, default_value_t = Perm::Lf)]
        perm: Perm,
        /// Balancing parameter; query scans stay below 2*alpha steps.
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: u64,
        /// Input RLBWT, text or binary (detected by content).
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output move-structure file ("-" for standard output).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Print key=value instrumentation to standard output.
        #[arg(long)]
        stats: bool,
    },
    /// Compute the LCP array of the text behind an RLBWT.
    Lcp {
        /// Input RLBWT, text or binary (detected by content).
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file ("-" for standard output).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Output encoding: one value per line, or the binary array format.
        #[arg(long, value_enum, default_value_t = Encoding::Text)]
        format: Encoding,
    },
    /// Compute the irreducible PLCP entries of the text behind an RLBWT.
    Plcp {
        /// Input RLBWT, text or binary (detected by content).
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file ("-" for standard output); "position value" per line.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Check a serialized move structure.
    Verify {
        /// Move-structure file to verify.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Source RLBWT to rebuild from and compare against (with --full).
        #[arg(long, value_name = "FILE")]
        rlbwt: Option<PathBuf>,
        /// Permutation the structure was built from (used by --full).
        #[arg(long, value_enum, default_value_t = Perm::Lf)]
        perm: Perm,
        /// Rebuild from --rlbwt and compare query answers on sampled
        /// positions in addition to the structural checks.
        #[arg(long, requires = "rlbwt")]
        full: bool,
    },
    /// Print key=value facts about any artifact file.
    Stats {
        /// A move-structure, RLBWT (text or binary), or LCP array file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
}

/// Permutation selector for `build` and `verify --full`.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Perm {
    /// Last-to-first column mapping of the BWT.
    Lf,
    /// First-to-last column mapping (inverse of lf).
    Fl,
    /// Suffix-array successor permutation phi.
    Phi,
    /// Inverse of phi.
    PhiInv,
}

/// Output encoding for the `lcp` subcommand.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Encoding {
    /// One decimal value per line.
    Text,
    /// The binary LCP array format.
    Binary,
}

fn main() {
    process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outcomes; everything else is
            // a usage error and must exit 1, not clap's default 2.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Build {
            perm,
            alpha,
            input,
            out,
            stats,
        } => cmd_build(perm, alpha, &input, &out, stats),
        Cmd::Lcp { input, out, format } => cmd_lcp(&input, &out, format),
        Cmd::Plcp { input, out } => cmd_plcp(&input, &out),
        Cmd::Verify {
            input,
            rlbwt,
            perm,
            full,
        } => cmd_verify(&input, rlbwt.as_deref(), perm, full),
        Cmd::Stats { input } => cmd_stats(&input),
    }
}

/// Maps each error class to its documented exit code.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter { .. } => 1,
        Error::Validation { .. }
        | Error::Format { .. }
        | Error::Parse { .. }
        | Error::Sink { .. }
        | Error::Io(_) => 2,
        Error::Range { .. } | Error::Internal { .. } => 4,
    }
}

fn cmd_build(perm: Perm, alpha: u64, input: &Path, out: &Path, stats: bool) -> Result<i32> {
    // Reject a bad alpha before touching any file.
    if alpha < 2 {
        return Err(Error::Parameter {
            what: format!("alpha = {alpha} is below the minimum of 2"),
        });
    }
    let started = Instant::now();
    let source = read_rlbwt(input)?;
    let map = permutation_map(&source, perm)?;
    let pair = balance(&map, alpha)?;
    let structure = pair.extract_forward();
    let mut w = create_out(out)?;
    structure.write_to(&mut w)?;
    w.flush()?;
    if stats {
        let s = pair.stats();
        println!("n={}", source.n());
        println!("r={}", s.r);
        println!("r_prime={}", s.r_prime);
        println!("alpha={alpha}");
        println!("insertions={}", s.insertions);
        println!("wall_time_s={:.6}", started.elapsed().as_secs_f64());
        if let Some(kb) = peak_rss_kb() {
            println!("peak_rss_kb={kb}");
        }
    }
    Ok(0)
}

fn cmd_lcp(input: &Path, out: &Path, format: Encoding) -> Result<i32> {
    let source = read_rlbwt(input)?;
    let values = lcp_array(&source)?;
    let mut w = create_out(out)?;
    match format {
        Encoding::Text => {
            for v in &values {
                writeln!(w, "{v}")?;
            }
        }
        Encoding::Binary => write_lcp_binary(&mut w, &values)?,
    }
    w.flush()?;
    Ok(0)
}

fn cmd_plcp(input: &Path, out: &Path) -> Result<i32> {
    let source = read_rlbwt(input)?;
    let plcp = irreducible_plcp(&source)?;
    let mut w = create_out(out)?;
    for (pos, val) in plcp.positions().iter().zip(plcp.values()) {
        writeln!(w, "{pos} {val}")?;
    }
    w.flush()?;
    Ok(0)
}

fn cmd_verify(input: &Path, source: Option<&Path>, perm: Perm, full: bool) -> Result<i32> {
    // Any rejection of the structure file itself is the verification
    // verdict; only problems with the comparison source are input errors.
    let structure = match read_move(input) {
        Ok(ms) => ms,
        Err(e) => {
            eprintln!("verification failed: {e}");
            return Ok(3);
        }
    };
    let bound = 2 * structure.alpha();
    let (out_w, in_w) = structure.gap_weights();
    if out_w >= bound || in_w >= bound {
        eprintln!(
            "verification failed: a gap holds {} opposite-side starts, \
             the balance bound is {bound}",
            out_w.max(in_w)
        );
        return Ok(3);
    }
    if full {
        let rlbwt = read_rlbwt(source.expect("clap enforces --rlbwt with --full"))?;
        let map = permutation_map(&rlbwt, perm)?;
        if map.n() != structure.n() {
            eprintln!(
                "verification failed: the structure covers [0, {}) but the \
                 source text has length {}",
                structure.n(),
                map.n()
            );
            return Ok(3);
        }
        let rebuilt = MoveStructure::build(&map, structure.alpha())?;
        let n = structure.n();
        let step = (n / 4096).max(1);
        let mut mismatches = 0u64;
        let mut i = 0;
        while i < n {
            if structure.apply(i)? != rebuilt.apply(i)? {
                mismatches += 1;
            }
            i += step;
        }
        if mismatches > 0 {
            eprintln!(
                "verification failed: {mismatches} sampled positions \
                 disagree with a rebuild from the source"
            );
            return Ok(3);
        }
    }
    println!("ok");
    Ok(0)
}

fn cmd_stats(input: &Path) -> Result<i32> {
    let bytes = fs::read(input).map_err(|e| annotate(input, e))?;
    if bytes.starts_with(move_structure::MAGIC) {
        let ms = MoveStructure::read_from(Cursor::new(&bytes))?;
        let (out_w, in_w) = ms.gap_weights();
        println!("kind=move");
        println!("n={}", ms.n());
        println!("r={}", ms.r());
        println!("alpha={}", ms.alpha());
        println!("max_output_gap_weight={out_w}");
        println!("max_input_gap_weight={in_w}");
    } else if bytes.starts_with(rlbwt::MAGIC) {
        let rb = Rlbwt::read_binary(Cursor::new(&bytes))?;
        print_rlbwt_stats(&rb, "binary");
    } else if bytes.starts_with(lcp::MAGIC) {
        let values = read_lcp_binary(Cursor::new(&bytes))?;
        println!("kind=lcp");
        println!("n={}", values.len());
        println!("max={}", values.iter().max().copied().unwrap_or(0));
    } else {
        let rb = Rlbwt::read_text(Cursor::new(&bytes))?;
        print_rlbwt_stats(&rb, "text");
    }
    Ok(0)
}

fn print_rlbwt_stats(rb: &Rlbwt, encoding: &str) {
    println!("kind=rlbwt");
    println!("encoding={encoding}");
    println!("n={}", rb.n());
    println!("r={}", rb.r());
    println!("distinct_symbols={}", rb.distinct_symbols());
}

/// Builds the interval form of the selected permutation.
fn permutation_map(source: &Rlbwt, perm: Perm) -> Result<IntervalMap> {
    Ok(match perm {
        Perm::Lf => source.lf_intervals(),
        Perm::Fl => source.fl_intervals(),
        Perm::Phi => source.phi_intervals()?,
        Perm::PhiInv => source.phi_intervals()?.inverse(),
    })
}

/// Reads an RLBWT in either encoding, sniffing the binary magic.
fn read_rlbwt(path: &Path) -> Result<Rlbwt> {
    let file = File::open(path).map_err(|e| annotate(path, e))?;
    let mut reader = BufReader::new(file);
    let is_binary = reader.fill_buf()?.starts_with(rlbwt::MAGIC);
    if is_binary {
        Rlbwt::read_binary(reader)
    } else {
        Rlbwt::read_text(reader)
    }
}

fn read_move(path: &Path) -> Result<MoveStructure> {
    let file = File::open(path).map_err(|e| annotate(path, e))?;
    MoveStructure::read_from(BufReader::new(file))
}

/// Opens the output path, with "-" standing for standard output.
fn create_out(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout().lock()));
    }
    let file = File::create(path).map_err(|e| annotate(path, e))?;
    Ok(Box::new(BufWriter::new(file)))
}

/// Prefixes an I/O error with the path it concerns.
fn annotate(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

/// Peak resident set size in kilobytes, when the host exposes it.
fn peak_rss_kb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}
