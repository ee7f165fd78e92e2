//! Command-line front door for the exact Holant / matchgate / matching
//! toolkit: batch evaluation, reduction emission, and pipeline
//! verification. Exit codes: 0 ok, 1 usage, 2 format, 3 budget,
//! 4 verification failed.

mod formats;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use formats::{GraphFile, GridTilingFile, MatrixFile, PlaneModelFile, PsubFile, ScalarDto};
use holkit_core::bits::bits_of;
use holkit_core::error::Error as CoreError;
use holkit_core::gate::gate_signature;
use holkit_core::gridtiling::{balance, count_tilings, parity_tilings, BalanceDirection};
use holkit_core::matchgates::{
    build_act_gate, build_dummy_gate, build_pass_matchgate, build_pre_matchgate,
    verify_matchgate, NamedMatchgate,
};
use holkit_core::matrix::permanent;
use holkit_core::modring::ModScalar;
use holkit_core::psub::{clique_to_psub, count_psub, psub_to_gridtiling};
use holkit_core::scalar::Scalar;
use holkit_core::sig_graph::{holant_plain, holant_with, EvalBudget};

#[derive(Parser)]
#[command(name = "holkit", version, about = "Exact Holant, matchgate and perfect-matching toolkit")]
struct Cli {
    /// Worker threads for branch-parallel pipeline evaluation.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Render results with labels instead of bare values.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Holant evaluation of signature graphs.
    Holant {
        #[command(subcommand)]
        cmd: HolantCmd,
    },
    /// Gate signature extraction.
    Gate {
        #[command(subcommand)]
        cmd: GateCmd,
    },
    /// The shipped matchgates and their exhaustive verification.
    Matchgate {
        #[command(subcommand)]
        cmd: MatchgateCmd,
    },
    /// Perfect matching counters.
    Pm {
        #[command(subcommand)]
        cmd: PmCmd,
    },
    /// Exact permanent of a matrix file, optionally reduced mod 2^k.
    Perm {
        file: PathBuf,
        /// Reduce the result modulo 2^K.
        #[arg(long)]
        mod_log: Option<u32>,
    },
    /// The genus expansion.
    Genus {
        #[command(subcommand)]
        cmd: GenusCmd,
    },
    /// Grid-tiling instances: counting, parity, balance preprocessing.
    Gridtiling {
        #[command(subcommand)]
        cmd: GridtilingCmd,
    },
    /// The reduction chain: cliques -> partitioned subgraphs -> tilings.
    Reduce {
        #[command(subcommand)]
        cmd: ReduceCmd,
    },
    /// The apex and mod-2^k permanent pipelines.
    Pipeline {
        #[command(subcommand)]
        cmd: PipelineCmd,
    },
    /// Arithmetic in Z/2^m.
    Modring {
        #[command(subcommand)]
        cmd: ModringCmd,
    },
    /// Write the bundled demo files (graphs, plane models, instances).
    Fixtures { dir: PathBuf },
}

#[derive(Subcommand)]
enum HolantCmd {
    /// Evaluate the Holant of a closed signature graph.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Use the plain 2^E enumeration instead of the pruned search.
        #[arg(long)]
        plain: bool,
    },
}

#[derive(Subcommand)]
enum GateCmd {
    /// Print the signature table of a gate file.
    Sig {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum MatchgateCmd {
    /// Verify a named matchgate (GAMMA_PASS, GAMMA_PRE, GAMMA_ACT, DUMMY)
    /// or a gate file carrying a "target" table.
    Verify {
        name_or_file: String,
        /// Print the full comparison table.
        #[arg(long)]
        table: bool,
    },
    /// Export a named matchgate as a gate file.
    Export {
        name: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PmCmd {
    /// Brute-force weighted perfect matching sum.
    Brute { file: PathBuf },
    /// FKT via a Pfaffian orientation; the file must carry an embedding.
    Fkt { file: PathBuf },
    /// Apex-aware evaluation: apices matched by brute force, FKT on the
    /// planar rest.
    Apex { file: PathBuf },
}

#[derive(Subcommand)]
enum GenusCmd {
    /// PerfMatch of a plane model through the cap expansions.
    Pm { file: PathBuf },
}

#[derive(Subcommand)]
enum GridtilingCmd {
    Count { file: PathBuf },
    Parity { file: PathBuf },
    /// Balance the instance along rows or columns.
    Balance {
        file: PathBuf,
        #[arg(long, value_parser = ["horizontal", "vertical"])]
        direction: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Clique counting to partitioned subgraphs (blow-up, multiplier k!).
    Clique {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Partitioned subgraphs to grid tilings (parsimonious).
    Psub {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// The full chain from a plain graph to a grid-tiling instance.
    Gridtiling {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PipelineCmd {
    /// The combined grid-tiling equation over 2^|C| branch graphs.
    Apex {
        file: PathBuf,
        /// Check the combination against the tiling count; exit 4 on
        /// mismatch.
        #[arg(long)]
        verify: bool,
        /// Write every branch graph into this directory.
        #[arg(long)]
        emit_branches: Option<PathBuf>,
        /// Evaluate branch Holants on the unflattened signature graphs
        /// instead of PerfMatch on the flattened ones.
        #[arg(long)]
        r#abstract: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// The modulo combination over 3^|C| branch graphs in Z/2M.
    Mod2k {
        file: PathBuf,
        /// Ring exponent; defaults to 2|C|+1 so the ring is Z/2M.
        #[arg(long)]
        modulus_log: Option<u32>,
        #[arg(long)]
        emit_branches: Option<PathBuf>,
        /// Write the full branch transcript as JSON.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ModringCmd {
    /// Print a+b and a*b in Z/2^m.
    Demo { a: u64, b: u64, m: u32 },
}

#[derive(Args)]
struct BudgetArgs {
    /// Edge cap for plain 2^E enumeration.
    #[arg(long, default_value_t = 28)]
    edge_budget: usize,
    /// Node cap for the pruned search.
    #[arg(long, default_value_t = 200_000_000)]
    node_budget: u64,
}

impl BudgetArgs {
    fn to_budget(&self) -> EvalBudget {
        EvalBudget { plain_edges: self.edge_budget, search_nodes: self.node_budget }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify_error(&e))
        }
    }
}

/// Maps failures to the documented exit codes: budget refusals 3,
/// verification failures 4, anything malformed 2.
fn classify_error(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return match core {
            CoreError::Budget(_) => 3,
            CoreError::InvariantViolation(_) => 4,
            _ => 2,
        };
    }
    2
}

fn core_err(e: CoreError) -> anyhow::Error {
    anyhow::Error::new(e)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn print_scalar(pretty: bool, label: &str, s: &Scalar) {
    if pretty {
        println!("{label} = {s}");
    } else {
        println!("{s}");
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Holant { cmd } => match cmd {
            HolantCmd::Eval { file, budget, plain } => {
                let sg = GraphFile::parse(&read(&file)?)?.to_signature_graph()?;
                let b = budget.to_budget();
                let value = if plain {
                    holant_plain(&sg, &b).map_err(core_err)?
                } else {
                    holant_with(&sg, &b).map_err(core_err)?
                };
                print_scalar(pretty, "Holant", &value);
            }
        },
        Command::Gate { cmd } => match cmd {
            GateCmd::Sig { file, budget } => {
                let gate = GraphFile::parse(&read(&file)?)?.to_gate()?;
                let sig = gate_signature(&gate, &budget.to_budget()).map_err(core_err)?;
                print_table(&sig.to_table(), gate.arity(), pretty);
            }
        },
        Command::Matchgate { cmd } => match cmd {
            MatchgateCmd::Verify { name_or_file, table } => {
                let m = named_or_file(&name_or_file)?;
                let report = verify_matchgate(&m).map_err(core_err)?;
                if table {
                    let sig = gate_signature(&m.gate, &EvalBudget::default()).map_err(core_err)?;
                    let got = sig.to_table();
                    let want = m.target.to_table();
                    for idx in 0..got.len() {
                        let bits: String = bits_of(idx, report.arity)
                            .iter()
                            .map(|&b| if b { '1' } else { '0' })
                            .collect();
                        let mark = if got[idx] == want[idx] { "ok" } else { "MISMATCH" };
                        println!("{bits}  got {:>6}  want {:>6}  {mark}", got[idx], want[idx]);
                    }
                }
                let matched = report.inputs - report.mismatches.len();
                println!("{matched}/{} inputs match", report.inputs);
                if !report.passed() {
                    return Ok(ExitCode::from(4));
                }
            }
            MatchgateCmd::Export { name, out } => {
                let m = named_matchgate(&name)?;
                let mut file = GraphFile::from_signature_graph(&m.gate.graph, None);
                file.dangling = Some(m.gate.dangling.clone());
                file.target =
                    Some(m.target.to_table().iter().map(ScalarDto::from_scalar).collect());
                write_out(out.as_ref(), &formats::to_json_pretty(&file)?)?;
            }
        },
        Command::Pm { cmd } => match cmd {
            PmCmd::Brute { file } => {
                let (g, _, _) = GraphFile::parse(&read(&file)?)?.to_weighted()?;
                print_scalar(pretty, "PerfMatch", &holkit_core::matching::perfmatch_bruteforce(&g));
            }
            PmCmd::Fkt { file } => {
                let (g, _, rot) = GraphFile::parse(&read(&file)?)?.to_weighted()?;
                let rot = rot.ok_or_else(|| anyhow!("FKT needs an embedding block"))?;
                let eg = holkit_core::embedding::EmbeddedGraph::new(g, rot).map_err(core_err)?;
                let v = holkit_core::fkt::perfmatch_fkt(&eg).map_err(core_err)?;
                print_scalar(pretty, "PerfMatch", &v);
            }
            PmCmd::Apex { file } => {
                let (g, apices, rot) = GraphFile::parse(&read(&file)?)?.to_weighted()?;
                let rot = rot.ok_or_else(|| anyhow!("apex evaluation needs an embedding block"))?;
                let v = holkit_core::fkt::perfmatch_apex(&g, &apices, &rot).map_err(core_err)?;
                print_scalar(pretty, "PerfMatch", &v);
            }
        },
        Command::Perm { file, mod_log } => {
            let m = MatrixFile::parse(&read(&file)?)?;
            let p = permanent(&m).map_err(core_err)?;
            match mod_log {
                None => print_scalar(pretty, "permanent", &p),
                Some(k) => {
                    let int = p
                        .to_integer()
                        .ok_or_else(|| anyhow!("permanent is not an integer"))?;
                    let r = ModScalar::from_bigint(&int, k);
                    if pretty {
                        println!("permanent = {r}");
                    } else {
                        println!("{}", r.value());
                    }
                }
            }
        }
        Command::Genus { cmd } => match cmd {
            GenusCmd::Pm { file } => {
                let model = PlaneModelFile::parse(&read(&file)?)?;
                let (v, count) = holkit_core::genus::genus_perfmatch(&model).map_err(core_err)?;
                if pretty {
                    println!("PerfMatch = {v} ({count} planar constituents)");
                } else {
                    println!("{v}");
                    println!("constituents={count}");
                }
            }
        },
        Command::Gridtiling { cmd } => match cmd {
            GridtilingCmd::Count { file } => {
                let t = GridTilingFile::parse(&read(&file)?)?;
                let c = count_tilings(&t).map_err(core_err)?;
                if pretty {
                    println!("tilings = {c}");
                } else {
                    println!("{c}");
                }
            }
            GridtilingCmd::Parity { file } => {
                let t = GridTilingFile::parse(&read(&file)?)?;
                let p = parity_tilings(&t).map_err(core_err)?;
                println!("{}", u8::from(p));
            }
            GridtilingCmd::Balance { file, direction, out } => {
                let t = GridTilingFile::parse(&read(&file)?)?;
                let dir = if direction == "horizontal" {
                    BalanceDirection::Horizontal
                } else {
                    BalanceDirection::Vertical
                };
                let (balanced, cap) = balance(&t, dir).map_err(core_err)?;
                eprintln!("T = {cap}, n' = {}", balanced.n);
                let text = formats::to_json_pretty(&GridTilingFile::from_instance(&balanced))?;
                write_out(out.as_ref(), &text)?;
            }
        },
        Command::Reduce { cmd } => match cmd {
            ReduceCmd::Clique { file, k, out } => {
                let plain: formats::PlainGraphFile = serde_json::from_str(&read(&file)?)?;
                let edges: BTreeSet<(usize, usize)> =
                    plain.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
                let (p, mult) = clique_to_psub(plain.n, &edges, k).map_err(core_err)?;
                eprintln!("copies = {mult} * cliques (multiplier {mult})");
                write_out(out.as_ref(), &formats::to_json_pretty(&PsubFile::from_instance(&p))?)?;
            }
            ReduceCmd::Psub { file, out } => {
                let p = PsubFile::parse(&read(&file)?)?;
                let t = psub_to_gridtiling(&p).map_err(core_err)?;
                eprintln!("copies = {}", count_psub(&p).map_err(core_err)?);
                write_out(
                    out.as_ref(),
                    &formats::to_json_pretty(&GridTilingFile::from_instance(&t))?,
                )?;
            }
            ReduceCmd::Gridtiling { file, k, out } => {
                let plain: formats::PlainGraphFile = serde_json::from_str(&read(&file)?)?;
                let edges: BTreeSet<(usize, usize)> =
                    plain.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
                let (p, mult) = clique_to_psub(plain.n, &edges, k).map_err(core_err)?;
                let t = psub_to_gridtiling(&p).map_err(core_err)?;
                eprintln!("tilings = {mult} * cliques (multiplier {mult})");
                write_out(
                    out.as_ref(),
                    &formats::to_json_pretty(&GridTilingFile::from_instance(&t))?,
                )?;
            }
        },
        Command::Pipeline { cmd } => match cmd {
            PipelineCmd::Apex { file, verify, emit_branches, r#abstract, budget } => {
                let t = GridTilingFile::parse(&read(&file)?)?;
                if r#abstract {
                    let h = holkit_core::apex::apex_branch_holants(&t, &budget.to_budget())
                        .map_err(core_err)?;
                    print_scalar(pretty, "combination", &h);
                    if verify {
                        let want = Scalar::from_int(count_tilings(&t).map_err(core_err)? as i64);
                        if h != want {
                            eprintln!("verification FAILED: combination {h} != tilings {want}");
                            return Ok(ExitCode::from(4));
                        }
                        println!("verified: combination = tilings = {want}");
                    }
                    return Ok(ExitCode::SUCCESS);
                }
                let branches = holkit_core::apex::apex_branch_graphs(&t).map_err(core_err)?;
                if let Some(dir) = &emit_branches {
                    fs::create_dir_all(dir)?;
                    for (i, b) in branches.iter().enumerate() {
                        let f = GraphFile::from_weighted(&b.graph, &b.apices, Some(&b.rotations));
                        let path = dir.join(format!("branch_{i:03}.graph.json"));
                        fs::write(&path, formats::to_json_pretty(&f)?)?;
                    }
                    eprintln!("wrote {} branch graphs", branches.len());
                }
                let values = parallel_map(cli.jobs, &branches, |b| {
                    holkit_core::fkt::perfmatch_apex(&b.graph, &b.apices, &b.rotations)
                })?;
                let mut acc = Scalar::zero();
                for (b, v) in branches.iter().zip(&values) {
                    acc = &acc + &(&b.coefficient * v);
                }
                print_scalar(pretty, "combination", &acc);
                if verify {
                    let want = Scalar::from_int(count_tilings(&t).map_err(core_err)? as i64);
                    if acc != want {
                        eprintln!("verification FAILED: combination {acc} != tilings {want}");
                        return Ok(ExitCode::from(4));
                    }
                    println!("verified: combination = tilings = {want}");
                }
            }
            PipelineCmd::Mod2k { file, modulus_log, emit_branches, transcript } => {
                let t = GridTilingFile::parse(&read(&file)?)?;
                let (t_balance, branches) =
                    holkit_core::mod2k::mod_branch_graphs(&t).map_err(core_err)?;
                if let Some(dir) = &emit_branches {
                    fs::create_dir_all(dir)?;
                    for (i, b) in branches.iter().enumerate() {
                        let f = GraphFile::from_weighted(&b.graph, &b.apices, Some(&b.rotations));
                        let path = dir.join(format!("branch_{i:03}.graph.json"));
                        fs::write(&path, formats::to_json_pretty(&f)?)?;
                    }
                    eprintln!("wrote {} branch graphs", branches.len());
                }
                let values = parallel_map(cli.jobs, &branches, |b| {
                    holkit_core::fkt::perfmatch_apex(&b.graph, &b.apices, &b.rotations)
                })?;
                let result = holkit_core::mod2k::fold_transcript(&t, t_balance, &branches, values)
                    .map_err(core_err)?;
                if let Some(k) = modulus_log {
                    if k != result.modulus_log {
                        eprintln!(
                            "note: ring is Z/2^{} by |C|; --modulus-log {k} ignored",
                            result.modulus_log
                        );
                    }
                }
                if let Some(path) = &transcript {
                    fs::write(path, transcript_json(&result)?)?;
                }
                let m_desc = if result.parity { "sum = M mod 2M" } else { "sum = 0 mod 2M" };
                println!("parity={} ({m_desc})", u8::from(result.parity));
            }
        },
        Command::Modring { cmd } => match cmd {
            ModringCmd::Demo { a, b, m } => {
                let (s, p) = holkit_core::mod2k::mod_ring_demo(a, b, m);
                println!("{a} + {b} = {} (mod 2^{m})", s.value());
                println!("{a} * {b} = {} (mod 2^{m})", p.value());
            }
        },
        Command::Fixtures { dir } => {
            emit_fixtures(&dir)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Writes the demo files used by the README walkthrough.
fn emit_fixtures(dir: &Path) -> Result<()> {
    use holkit_core::genus::fixtures as gf;
    fs::create_dir_all(dir)?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
        Ok(())
    };
    // K4 as an embedded graph.
    let k4 = gf::k4_trivial();
    write(
        "k4.graph.json",
        formats::to_json_pretty(&GraphFile::from_weighted(&k4.graph, &[], Some(&k4.rotations)))?,
    )?;
    // Plane models.
    for (name, model) in [
        ("k33_torus.model.json", gf::k33_torus()),
        ("k33_projective.model.json", gf::k33_projective()),
        ("c4_klein.model.json", gf::c4_klein()),
        (
            "torus_3x3.model.json",
            gf::toroidal_grid(3, 3, |_, _, _, _| Some(Scalar::one())),
        ),
    ] {
        write(name, formats::to_json_pretty(&PlaneModelFile::from_model(&model))?)?;
    }
    // Grid-tiling fixtures: an even one and an odd one, both balanced in
    // both directions.
    let even = holkit_core::gridtiling::GridTilingInstance::new(
        2,
        1,
        [((1, 1), [(1, 1), (2, 2)].into_iter().collect())].into_iter().collect(),
    )
    .map_err(core_err)?;
    write("fixture_even.gt.json", formats::to_json_pretty(&GridTilingFile::from_instance(&even))?)?;
    // Odd count (3 tilings), balanced in both directions with T = 1.
    let odd = holkit_core::gridtiling::GridTilingInstance::new(
        3,
        1,
        [((1, 1), [(1, 1), (2, 2), (3, 3)].into_iter().collect())]
            .into_iter()
            .collect(),
    )
    .map_err(core_err)?;
    write("fixture_odd.gt.json", formats::to_json_pretty(&GridTilingFile::from_instance(&odd))?)?;
    // A 2x2 instance with one constraint cell.
    let two = holkit_core::gridtiling::GridTilingInstance::new(
        2,
        2,
        [((1, 2), [(1, 1), (2, 2)].into_iter().collect())].into_iter().collect(),
    )
    .map_err(core_err)?;
    write("fixture_k2.gt.json", formats::to_json_pretty(&GridTilingFile::from_instance(&two))?)?;
    // A matrix demo.
    write(
        "perm_demo.matrix.json",
        formats::to_json_pretty(&serde_json::json!({
            "rows": [[{"re": "1"}, {"re": "2"}], [{"re": "3"}, {"re": "4"}]]
        }))?,
    )?;
    // A triangle for the clique reduction.
    write(
        "k4.plain.json",
        formats::to_json_pretty(&formats::PlainGraphFile {
            n: 4,
            edges: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        })?,
    )?;
    Ok(())
}

fn named_matchgate(name: &str) -> Result<NamedMatchgate> {
    Ok(match name.to_ascii_uppercase().as_str() {
        "GAMMA_PASS" => build_pass_matchgate(),
        "GAMMA_PRE" => build_pre_matchgate(),
        "GAMMA_ACT" => build_act_gate(),
        "DUMMY" => build_dummy_gate(),
        other => bail!("unknown matchgate {other:?}; use GAMMA_PASS, GAMMA_PRE, GAMMA_ACT or DUMMY"),
    })
}

fn named_or_file(name_or_file: &str) -> Result<NamedMatchgate> {
    if let Ok(m) = named_matchgate(name_or_file) {
        return Ok(m);
    }
    let file = GraphFile::parse(&read(Path::new(name_or_file))?)?;
    let gate = file.to_gate()?;
    let target = match &file.target {
        Some(t) => {
            let table = t.iter().map(ScalarDto::to_scalar).collect::<Result<Vec<_>>>()?;
            holkit_core::signature::Signature::dense(gate.arity(), table).map_err(core_err)?
        }
        None => bail!("gate file needs a \"target\" table for verification"),
    };
    Ok(NamedMatchgate {
        name: holkit_core::matchgates::MatchgateName::GammaPass,
        gate,
        target,
        apex_dangling: vec![],
    })
}

fn print_table(table: &[Scalar], arity: usize, pretty: bool) {
    for (idx, v) in table.iter().enumerate() {
        if pretty && v.is_zero() {
            continue;
        }
        let bits: String = bits_of(idx, arity)
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        println!("{bits} {v}");
    }
}

fn transcript_json(t: &holkit_core::mod2k::ModTranscript) -> Result<String> {
    use serde_json::json;
    let branches: Vec<serde_json::Value> = t
        .branches
        .iter()
        .map(|b| {
            json!({
                "omega": b.omega,
                "d": b.d,
                "e": b.e,
                "coefficient": b.coefficient.value().to_string(),
                "perfmatch": b.perfmatch.to_display_string(),
                "perfmatch_mod": b.perfmatch_mod.value().to_string(),
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&json!({
        "modulus_log": t.modulus_log,
        "m": t.m_value.value().to_string(),
        "sum": t.sum.value().to_string(),
        "parity": t.parity,
        "branches": branches,
    }))?)
}

/// Order-preserving map over branches, optionally across scoped threads.
fn parallel_map<T: Sync, U: Send>(
    jobs: usize,
    items: &[T],
    f: impl Fn(&T) -> holkit_core::Result<U> + Sync,
) -> Result<Vec<U>> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(|i| f(i).map_err(core_err)).collect();
    }
    let results: Vec<_> = std::thread::scope(|scope| {
        let chunk = items.len().div_ceil(jobs);
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|slice| scope.spawn(|| slice.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    results.into_iter().map(|r| r.map_err(core_err)).collect()
}
