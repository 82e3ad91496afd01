//! `minkowski`: decide, iterate, simulate, generate and convert
//! Minkowski games from the command line.
//!
//! Machine-readable JSON goes to stdout, human summaries to stderr.
//! Exit codes: 0 Player A, 1 Player B, 2 error, 3 unknown, 4 piece
//! ceiling exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use minkowski_core::boundedness::{decide_bruteforce, decide_findwinner, DivergenceCertificate};
use minkowski_core::error::Error;
use minkowski_core::model::{
    parse_game, parse_polytope, serialize_game, serialize_polytope_h, serialize_polytope_v,
    MinkowskiGame, Winner,
};
use minkowski_core::rational::{format_rational, parse_rational, Vector};
use minkowski_core::reductions::{
    cm2_to_safety_reach, threesat_to_boundedness, threesat_to_structural, Cnf3, TwoCounterMachine,
};
use minkowski_core::regions::DEFAULT_PIECE_CEILING;
use minkowski_core::safety::{
    decide_structural, safety_iterate, safety_reach_iterate, SafetyVerdict,
};
use minkowski_core::strategies::{
    simulate, CertificateStrategy, GeneralStrategy, PlayerAStrategy, PlayerBStrategy,
    RandomStrategy,
};

const EXIT_PLAYER_A: u8 = 0;
const EXIT_PLAYER_B: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_CEILING: u8 = 4;

#[derive(Parser)]
#[command(name = "minkowski", version, about = "Exact solver and toolbox for Minkowski games")]
struct Cli {
    /// Piece-count ceiling for region operations (overrides the
    /// MINKOWSKI_PIECE_CEILING environment variable; default 10000).
    #[arg(long, global = true)]
    ceiling: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Findwinner,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Repr {
    V,
    H,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a boundedness game.
    Decide {
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Write the divergence certificate (Player B wins only) here.
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Iterate the safety fixed point.
    Safety {
        game: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Write the final region here.
        #[arg(long)]
        emit_region: Option<PathBuf>,
    },
    /// Iterate the safety-reachability fixed point.
    SafetyReach {
        game: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        #[arg(long)]
        emit_region: Option<PathBuf>,
    },
    /// Decide a structural safety game exactly.
    Structural {
        game: PathBuf,
        /// Write the losing witness position (Player B wins only) here.
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
    /// Play two strategies against each other.
    Simulate {
        game: PathBuf,
        /// Player A: "auto" (synthesized winning strategy), "random",
        /// or a file with a JSON array of move indices played in a loop.
        #[arg(long, default_value = "auto")]
        a: String,
        /// Player B: "auto" (strategy from a fresh divergence
        /// certificate), "random", or a certificate JSON file.
        #[arg(long, default_value = "auto")]
        b: String,
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        /// Infinity-norm threshold to watch for.
        #[arg(long)]
        threshold: Option<String>,
        /// Write the position trace here, one JSON array per line.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Produce labeled game instances from CNF formulas or counter machines.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Convert a polytope file between V and H representations.
    Convert {
        poly: PathBuf,
        #[arg(long, value_enum)]
        to: Repr,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a game file.
    Validate { game: PathBuf },
}

#[derive(Args)]
struct CnfArgs {
    /// DIMACS CNF input.
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    /// 3-CNF to one-sided boundedness game (Player B wins iff satisfiable).
    #[command(name = "3sat-bounded")]
    ThreeSatBounded(CnfArgs),
    /// 3-CNF to one-sided structural safety game (Player B wins iff satisfiable).
    #[command(name = "3sat-structural")]
    ThreeSatStructural(CnfArgs),
    /// Two-counter machine to safety-reachability game (Player A wins
    /// iff the machine runs forever).
    #[command(name = "2cm")]
    TwoCm {
        /// Machine description (JSON; see README for the schema).
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ceiling = cli
        .ceiling
        .or_else(|| {
            std::env::var("MINKOWSKI_PIECE_CEILING")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_PIECE_CEILING);
    match run(cli.cmd, ceiling) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceCeiling { .. } => ExitCode::from(EXIT_CEILING),
                _ => ExitCode::from(EXIT_ERROR),
            }
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<MinkowskiGame, Error> {
    parse_game(&read(path)?)
}

fn emit(value: &serde_json::Value) {
    println!("{value}");
}

fn winner_exit(w: Winner) -> u8 {
    match w {
        Winner::PlayerA => EXIT_PLAYER_A,
        Winner::PlayerB => EXIT_PLAYER_B,
        Winner::Unknown => EXIT_UNKNOWN,
    }
}

fn rationals(v: &Vector) -> Vec<String> {
    v.0.iter().map(format_rational).collect()
}

fn run(cmd: Cmd, ceiling: usize) -> Result<u8, Error> {
    match cmd {
        Cmd::Decide {
            game,
            method,
            emit_certificate,
        } => {
            let g = load_game(&game)?;
            let outcome = match method {
                Method::Brute => decide_bruteforce(&g)?,
                Method::Findwinner => decide_findwinner(&g)?,
                Method::Both => {
                    let brute = decide_bruteforce(&g)?;
                    let fast = decide_findwinner(&g)?;
                    if brute.winner != fast.winner {
                        return Err(Error::Usage(format!(
                            "deciders disagree: brute says {:?}, findwinner says {:?}",
                            brute.winner, fast.winner
                        )));
                    }
                    brute
                }
            };
            let cert_json = outcome
                .certificate
                .as_ref()
                .map(|c| serde_json::to_value(c).map_err(|e| Error::Parse(e.to_string())))
                .transpose()?;
            if let Some(path) = emit_certificate {
                match &cert_json {
                    Some(c) => write(&path, format!("{c:#}\n").as_bytes())?,
                    None => eprintln!("no certificate: Player A wins"),
                }
            }
            emit(&json!({
                "winner": outcome.winner,
                "certificate": cert_json,
            }));
            eprintln!("winner: {:?}", outcome.winner);
            Ok(winner_exit(outcome.winner))
        }
        Cmd::Safety {
            game,
            max_iters,
            emit_region,
        } => {
            let g = load_game(&game)?;
            let verdict = safety_iterate(&g, max_iters, ceiling)?;
            report_safety(verdict, emit_region)
        }
        Cmd::SafetyReach {
            game,
            max_iters,
            emit_region,
        } => {
            let g = load_game(&game)?;
            let verdict = safety_reach_iterate(&g, max_iters, ceiling)?;
            report_safety(verdict, emit_region)
        }
        Cmd::Structural { game, emit_witness } => {
            let g = load_game(&game)?;
            let (winner, witness) = decide_structural(&g, ceiling)?;
            let witness_json = witness.as_ref().map(rationals);
            if let Some(path) = emit_witness {
                match &witness_json {
                    Some(w) => {
                        let v = serde_json::to_value(w).map_err(|e| Error::Parse(e.to_string()))?;
                        write(&path, format!("{v:#}\n").as_bytes())?;
                    }
                    None => eprintln!("no witness: Player A wins"),
                }
            }
            emit(&json!({ "winner": winner, "witness": witness_json }));
            eprintln!("winner: {winner:?}");
            Ok(winner_exit(winner))
        }
        Cmd::Simulate {
            game,
            a,
            b,
            rounds,
            threshold,
            trace,
            seed,
        } => {
            let g = load_game(&game)?;
            let threshold = threshold.as_deref().map(parse_rational).transpose()?;
            let mut strat_a = make_player_a(&a, &g, seed)?;
            let mut strat_b = make_player_b(&b, &g, seed.wrapping_add(1))?;
            let sim = simulate(
                &g,
                strat_a.as_mut(),
                strat_b.as_mut(),
                rounds,
                threshold.as_ref(),
            )?;
            if let Some(path) = trace {
                let mut lines = String::new();
                for p in &sim.trace {
                    let v =
                        serde_json::to_value(rationals(p)).map_err(|e| Error::Parse(e.to_string()))?;
                    lines.push_str(&v.to_string());
                    lines.push('\n');
                }
                write(&path, lines.as_bytes())?;
            }
            emit(&json!({
                "rounds": rounds,
                "max_norm": format_rational(&sim.max_norm),
                "exceeded_at": sim.exceeded_at,
                "final": rationals(sim.trace.last().expect("trace has start")),
            }));
            eprintln!(
                "{} rounds, max |position| = {}",
                rounds,
                format_rational(&sim.max_norm)
            );
            Ok(EXIT_PLAYER_A)
        }
        Cmd::Generate { kind } => {
            let (g, out) = match kind {
                GenKind::ThreeSatBounded(args) => {
                    let cnf = read_cnf(&args.cnf)?;
                    (threesat_to_boundedness(&cnf)?, args.out)
                }
                GenKind::ThreeSatStructural(args) => {
                    let cnf = read_cnf(&args.cnf)?;
                    (threesat_to_structural(&cnf)?, args.out)
                }
                GenKind::TwoCm { machine, out } => {
                    let m = TwoCounterMachine::parse(&read(&machine)?)?;
                    (cm2_to_safety_reach(&m)?, out)
                }
            };
            write(&out, &serialize_game(&g)?)?;
            emit(&json!({
                "dimension": g.dimension,
                "objective": g.objective,
                "moves_a": g.moves_a.len(),
                "out": out.display().to_string(),
            }));
            eprintln!("wrote {}", out.display());
            Ok(EXIT_PLAYER_A)
        }
        Cmd::Convert { poly, to, out } => {
            let m = parse_polytope(&read(&poly)?)?;
            let bytes = match to {
                Repr::V => serialize_polytope_v(&m)?,
                Repr::H => serialize_polytope_h(&m.halfspaces()?)?,
            };
            match out {
                Some(path) => write(&path, &bytes)?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
            Ok(EXIT_PLAYER_A)
        }
        Cmd::Validate { game } => {
            let g = load_game(&game)?;
            emit(&json!({
                "valid": true,
                "dimension": g.dimension,
                "objective": g.objective,
                "moves_a": g.moves_a.len(),
                "moves_b": g.moves_b.len(),
            }));
            eprintln!("ok");
            Ok(EXIT_PLAYER_A)
        }
    }
}

fn read_cnf(path: &Path) -> Result<Cnf3, Error> {
    let bytes = read(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
    Cnf3::parse_dimacs(text)
}

fn report_safety(verdict: SafetyVerdict, emit_region: Option<PathBuf>) -> Result<u8, Error> {
    let (json_out, region, exit) = match &verdict {
        SafetyVerdict::PlayerB { iteration } => (
            json!({ "winner": Winner::PlayerB, "iterations": iteration }),
            None,
            EXIT_PLAYER_B,
        ),
        SafetyVerdict::PlayerA { region } => (
            json!({ "winner": Winner::PlayerA, "region_pieces": region.pieces.len() }),
            Some(region),
            EXIT_PLAYER_A,
        ),
        SafetyVerdict::Unknown { iterations, last } => (
            json!({ "winner": Winner::Unknown, "iterations": iterations }),
            Some(last),
            EXIT_UNKNOWN,
        ),
    };
    if let Some(path) = emit_region {
        match region {
            Some(r) => {
                let v = serde_json::to_value(r).map_err(|e| Error::Parse(e.to_string()))?;
                write(&path, format!("{v:#}\n").as_bytes())?;
            }
            None => eprintln!("no region to emit for a Player B verdict"),
        }
    }
    emit(&json_out);
    eprintln!("{}", json_out["winner"].as_str().unwrap_or("?"));
    Ok(exit)
}

/// Fixed cyclic move script for Player A; resolves B's moves to their
/// first vertex.
struct ScriptedA {
    script: Vec<usize>,
    at: usize,
}

impl PlayerAStrategy for ScriptedA {
    fn choose_move(&mut self, _g: &MinkowskiGame) -> Result<usize, Error> {
        let idx = self.script[self.at % self.script.len()];
        self.at += 1;
        Ok(idx)
    }

    fn observe_resolution(
        &mut self,
        _g: &MinkowskiGame,
        _a_idx: usize,
        _point: &Vector,
    ) -> Result<(), Error> {
        Ok(())
    }

    fn resolve_b(&mut self, g: &MinkowskiGame, b_idx: usize) -> Result<Vector, Error> {
        Ok(g.moves_b[b_idx].vertices()[0].clone())
    }
}

fn make_player_a(
    spec: &str,
    g: &MinkowskiGame,
    seed: u64,
) -> Result<Box<dyn PlayerAStrategy>, Error> {
    match spec {
        "auto" => Ok(Box::new(GeneralStrategy::new(g)?)),
        "random" => Ok(Box::new(RandomStrategy::seeded(seed))),
        path => {
            let script: Vec<usize> = serde_json::from_slice(&read(Path::new(path))?)
                .map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            if script.is_empty() || script.iter().any(|&i| i >= g.moves_a.len()) {
                return Err(Error::Usage(format!(
                    "{path}: script must be nonempty move indices below {}",
                    g.moves_a.len()
                )));
            }
            Ok(Box::new(ScriptedA { script, at: 0 }))
        }
    }
}

fn make_player_b(
    spec: &str,
    g: &MinkowskiGame,
    seed: u64,
) -> Result<Box<dyn PlayerBStrategy>, Error> {
    match spec {
        "auto" => {
            let outcome = decide_bruteforce(g)?;
            match outcome.certificate {
                Some(cert) => Ok(Box::new(CertificateStrategy::new(g, cert)?)),
                None => Err(Error::Usage(
                    "Player A wins this game; use --b random for an aimless opponent".into(),
                )),
            }
        }
        "random" => Ok(Box::new(RandomStrategy::seeded(seed))),
        path => {
            let cert: DivergenceCertificate = serde_json::from_slice(&read(Path::new(path))?)
                .map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            Ok(Box::new(CertificateStrategy::new(g, cert)?))
        }
    }
}
