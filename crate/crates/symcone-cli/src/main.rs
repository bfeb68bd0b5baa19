//! Batch front door: subcommands wiring the library into reproducible
//! verification runs with machine-readable reports.
//!
//! Output is JSON-lines (one record per row) in a canonical order, so runs
//! with the same flags and seed are byte-identical. Exit code 0 means every
//! check passed, 1 means some check failed, 2 is a usage error.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symcone::combinat::{LabelConvention, Multipartition, Partition};
use symcone::coneverify::{
    check_identity_signsum, check_psi_binomial, check_ratio_identity, run_verify_on, VerifyConfig,
};
use symcone::exactalg::rat::{binomial, rat_i, rat_u, Rat};
use symcone::exactalg::AlphaRat;
use symcone::ifunction::{i_restricted, Caps, IOpts};
use symcone::sectors::{enumerate_edges, FixedSector, RcVariant};
use symcone::symgroup::{ClassList, PermTable};
use symcone::trees::DecoratedTree;

#[derive(Parser)]
#[command(
    name = "symcone",
    version,
    about = "Exact fixed-point verification for symmetric products of projective space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Nonneg,
    Pos,
}

impl From<ConventionArg> for LabelConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Nonneg => LabelConvention::NonNeg,
            ConventionArg::Pos => LabelConvention::Pos,
        }
    }
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = 2)]
    beta_cap: u32,
    #[arg(long, default_value_t = 0)]
    x_cap: u32,
    #[arg(long, default_value_t = 0)]
    t_cap: u32,
    #[arg(long, value_enum, default_value = "nonneg")]
    convention: ConventionArg,
    /// Multiply by the truncated divisor exponential.
    #[arg(long)]
    include_exp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List the torus-fixed sectors of the inertia stack.
    Sectors {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
    },
    /// List one-edge decorated trees based at a sector.
    Edges {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        /// Sector as JSON: {"mu": [..], "sigma": [[..], ..]}
        #[arg(long)]
        sector: String,
        #[arg(long, default_value = "2")]
        beta_cap: String,
    },
    /// Print the restricted series coefficients.
    Ifun {
        #[command(flatten)]
        series: SeriesArgs,
        /// Restrict to one sector (JSON), default all.
        #[arg(long)]
        sector: Option<String>,
        /// Summary table instead of JSON-lines.
        #[arg(long)]
        csv: bool,
    },
    /// Verify the pole and recursion conditions.
    Verify {
        #[command(flatten)]
        series: SeriesArgs,
        /// Run the normalization probe on recursion failures.
        #[arg(long)]
        probe: bool,
        /// Per-factor monodromy power in the recursion coefficient
        /// (0 = as printed).
        #[arg(long, default_value_t = 0)]
        rc_rescale: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exact rational specializations per passing report.
        #[arg(long, default_value_t = 5)]
        spot_checks: u32,
        /// Summary lines instead of full JSON reports.
        #[arg(long)]
        csv: bool,
    },
    /// Check the closed-form identity families.
    Identities {
        #[arg(long, default_value_t = 8)]
        max_k: u32,
        #[arg(long, default_value_t = 4)]
        max_sigma: u32,
        #[arg(long, default_value_t = 6)]
        ratio_d: u32,
        #[arg(long, default_value_t = 2)]
        ratio_beta_cap: u32,
        #[arg(long, default_value_t = 3)]
        wrc_d: u32,
        #[arg(long, default_value_t = 2)]
        wrc_beta_cap: u32,
    },
    /// Count factorizations of the identity with prescribed classes.
    Hurwitz {
        #[arg(long)]
        d: u32,
        /// Classes as JSON: [[2,1],[3]]
        #[arg(long)]
        classes: String,
    },
    /// Decorated-tree operations on a JSON tree file.
    Trees {
        #[command(subcommand)]
        action: TreeAction,
    },
}

#[derive(Subcommand)]
enum TreeAction {
    /// Validate the five conditions and tree shape.
    Validate {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
    },
    /// Combine one combinable pair of edges.
    Combine {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
        #[arg(long, num_args = 2, value_names = ["E1", "E2"])]
        pair: Vec<usize>,
    },
    /// Combine every pair until none remains.
    Minimal {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
    },
}

fn worker_count() -> usize {
    std::env::var("SYMCONE_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get().min(8))
                .unwrap_or(1)
        })
}

/// Order-preserving parallel map over independent units.
fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let workers = worker_count().min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results = std::sync::Mutex::new(Vec::<(usize, U)>::with_capacity(items.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let value = f(&items[i]);
                results.lock().unwrap().push((i, value));
            });
        }
    });
    let mut collected = results.into_inner().unwrap();
    collected.sort_by_key(|(i, _)| *i);
    collected.into_iter().map(|(_, v)| v).collect()
}

fn emit<T: Serialize>(record: &T) {
    println!("{}", serde_json::to_string(record).expect("serializable record"));
}

#[derive(serde::Deserialize)]
struct SectorInput {
    mu: Vec<u32>,
    sigma: Vec<Vec<u32>>,
}

fn parse_sector(raw: &str) -> Result<FixedSector, String> {
    let input: SectorInput = serde_json::from_str(raw).map_err(|e| e.to_string())?;
    let sigma = Multipartition::new(
        input
            .sigma
            .iter()
            .map(|c| Partition::new(c))
            .collect::<Result<_, _>>()
            .map_err(|e: symcone::combinat::CombinatError| e.to_string())?,
    );
    FixedSector::new(
        symcone::combinat::OrderedZeroPartition::new(input.mu),
        sigma,
    )
    .map_err(|e| e.to_string())
}

fn parse_rat(raw: &str) -> Result<Rat, String> {
    symcone::exactalg::rat::parse_rat_string(raw)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Sectors { d, r } => {
            #[derive(Serialize)]
            struct Row {
                sector: FixedSector,
                monodromy_order: u64,
                euler_class: String,
            }
            for sector in FixedSector::enumerate(d, r) {
                emit(&Row {
                    monodromy_order: sector.monodromy_order(),
                    euler_class: sector.euler_class().to_string(),
                    sector,
                });
            }
            Ok(true)
        }
        Command::Edges {
            d,
            r,
            sector,
            beta_cap,
        } => {
            let sector = parse_sector(&sector)?;
            if sector.degree() != d || sector.num_coords() != (r + 1) as usize {
                return Err("sector does not match --d/--r".into());
            }
            let cap = parse_rat(&beta_cap)?;
            #[derive(Serialize)]
            struct Row {
                from_coord: usize,
                to_coord: usize,
                moving: Partition,
                q: String,
                beta: u64,
                wbar: String,
                target: FixedSector,
            }
            for e in enumerate_edges(&sector, &cap) {
                emit(&Row {
                    from_coord: e.from_coord,
                    to_coord: e.to_coord,
                    moving: e.moving.clone(),
                    q: e.q.to_string(),
                    beta: e.beta(),
                    wbar: e.scaled_weight().to_string(),
                    target: e.target(),
                });
            }
            Ok(true)
        }
        Command::Ifun {
            series,
            sector,
            csv,
        } => {
            let table = PermTable::new(series.d).map_err(|e| e.to_string())?;
            let caps = Caps {
                beta: series.beta_cap,
                x_total: series.x_cap,
                t_total: series.t_cap,
            };
            let opts = IOpts {
                convention: series.convention.into(),
                include_exp_factor: series.include_exp,
            };
            let sectors = match sector {
                Some(raw) => vec![parse_sector(&raw)?],
                None => FixedSector::enumerate(series.d, series.r),
            };
            let computed = parallel_map(sectors, |s| {
                i_restricted(s, &table, caps, opts).map(|out| (s.clone(), out))
            });
            #[derive(Serialize)]
            struct Row<'a> {
                sector: &'a FixedSector,
                index: &'a symcone::ifunction::SeriesIndex,
                coeff: String,
            }
            for item in computed {
                let (sector, restricted) = item.map_err(|e| e.to_string())?;
                for (index, coeff) in &restricted.coeffs {
                    if csv {
                        println!("{sector}\t{index}\t{coeff}");
                    } else {
                        emit(&Row {
                            sector: &sector,
                            index,
                            coeff: coeff.to_string(),
                        });
                    }
                }
            }
            Ok(true)
        }
        Command::Verify {
            series,
            probe,
            rc_rescale,
            seed,
            spot_checks,
            csv,
        } => {
            let config = VerifyConfig {
                d: series.d,
                r: series.r,
                beta_cap: series.beta_cap,
                x_cap: series.x_cap,
                t_cap: series.t_cap,
                convention: series.convention.into(),
                include_exp_factor: series.include_exp,
                rc_variant: RcVariant::rescaled(rc_rescale),
                probe,
                seed,
                specialization_checks: spot_checks,
            };
            let table = PermTable::new(config.d).map_err(|e| e.to_string())?;
            let caps = Caps {
                beta: config.beta_cap,
                x_total: config.x_cap,
                t_total: config.t_cap,
            };
            let opts = IOpts {
                convention: config.convention,
                include_exp_factor: config.include_exp_factor,
            };
            let sectors = FixedSector::enumerate(config.d, config.r);
            let computed = parallel_map(sectors, |s| {
                i_restricted(s, &table, caps, opts).map(|out| (s.clone(), out))
            });
            let mut all_series = BTreeMap::new();
            for item in computed {
                let (sector, restricted) = item.map_err(|e| e.to_string())?;
                all_series.insert(sector, restricted);
            }
            let run = run_verify_on(&all_series, &config).map_err(|e| e.to_string())?;
            if csv {
                for rep in &run.pole_reports {
                    println!(
                        "pole\t{}\t{}\t{}",
                        rep.sector,
                        rep.index,
                        if rep.pass { "PASS" } else { "FAIL" }
                    );
                }
                for rep in &run.recursion_reports {
                    println!(
                        "recursion\t{}\t{}\ta={}\t{}",
                        rep.sector,
                        rep.wbar,
                        rep.a,
                        if rep.pass { "PASS" } else { "FAIL" }
                    );
                }
                println!(
                    "summary\tcondI={}\tcondII={}\tfitted_factor_power={:?}\tspecialized={}\tall={}",
                    run.condition_i_pass,
                    run.condition_ii_pass,
                    run.fitted_factor_power,
                    run.specialization_pass,
                    run.all_pass
                );
            } else {
                for rep in &run.pole_reports {
                    emit(rep);
                }
                for rep in &run.recursion_reports {
                    emit(rep);
                }
                for out in &run.probe_outcomes {
                    emit(out);
                }
                #[derive(Serialize)]
                struct Summary<'a> {
                    config: &'a VerifyConfig,
                    condition_i_pass: bool,
                    condition_ii_pass: bool,
                    fitted_factor_power: Option<i64>,
                    specialization_pass: bool,
                    all_pass: bool,
                }
                emit(&Summary {
                    config: &run.config,
                    condition_i_pass: run.condition_i_pass,
                    condition_ii_pass: run.condition_ii_pass,
                    fitted_factor_power: run.fitted_factor_power,
                    specialization_pass: run.specialization_pass,
                    all_pass: run.all_pass,
                });
            }
            Ok(run.all_pass)
        }
        Command::Identities {
            max_k,
            max_sigma,
            ratio_d,
            ratio_beta_cap,
            wrc_d,
            wrc_beta_cap,
        } => {
            let mut all_pass = true;
            #[derive(Serialize)]
            struct Row {
                family: &'static str,
                checked: u64,
                pass: bool,
            }
            // Cotangent-integral binomial identity.
            let mut pass = true;
            for k in 1..=max_k {
                pass &= check_psi_binomial(k);
            }
            emit(&Row {
                family: "psi-binomial",
                checked: max_k as u64,
                pass,
            });
            all_pass &= pass;
            // Sign-sum identity, exhaustive over shapes and patterns.
            let mut pass = true;
            let mut checked = 0u64;
            for n in 1..=(4 * max_sigma) {
                for shape in Partition::all_of(n) {
                    if shape.len() > max_sigma as usize
                        || shape.parts().iter().any(|&v| v > max_sigma)
                    {
                        continue;
                    }
                    let len = shape.len();
                    for a in 1..=len as u32 {
                        let budget = len - a as usize;
                        for in_mask in 0u32..(1 << len) {
                            for out_mask in 0u32..(1 << len) {
                                if in_mask & out_mask != 0 {
                                    continue;
                                }
                                if (in_mask.count_ones() + out_mask.count_ones()) as usize > budget
                                {
                                    continue;
                                }
                                let fin: BTreeSet<usize> =
                                    (0..len).filter(|i| in_mask & (1 << i) != 0).collect();
                                let fout: BTreeSet<usize> =
                                    (0..len).filter(|i| out_mask & (1 << i) != 0).collect();
                                pass &= check_identity_signsum(&shape, &fin, &fout, a).pass;
                                checked += 1;
                            }
                        }
                    }
                }
            }
            emit(&Row {
                family: "sign-sum",
                checked,
                pass,
            });
            all_pass &= pass;
            // Centralizer ratio identity over all edges.
            let mut pass = true;
            let mut checked = 0u64;
            for d in 1..=ratio_d {
                for sector in FixedSector::enumerate(d, 1) {
                    for edge in enumerate_edges(&sector, &rat_u(ratio_beta_cap as u64)) {
                        pass &= check_ratio_identity(&edge);
                        checked += 1;
                    }
                }
            }
            emit(&Row {
                family: "centralizer-ratio",
                checked,
                pass,
            });
            all_pass &= pass;
            // RC * W against the combinatorial prefactor.
            let mut pass = true;
            let mut checked = 0u64;
            for d in 1..=wrc_d {
                for sector in FixedSector::enumerate(d, 1) {
                    let n = sector.num_coords();
                    for edge in enumerate_edges(&sector, &rat_u(wrc_beta_cap as u64)) {
                        let w = edge.moving_weight_product();
                        for a in 1..=edge.mov_count() {
                            let rc = edge
                                .recursion_coefficient(a, RcVariant::PRINTED)
                                .map_err(|e| e.to_string())?;
                            let mov = edge.mov_count();
                            let sign = if (mov - a) % 2 == 0 { 1i64 } else { -1 };
                            let mut expect = rat_i(sign)
                                * rat_u(
                                    sector
                                        .sigma
                                        .component(edge.from_coord)
                                        .multiset_binomial(&edge.moving),
                                )
                                * rat_u(binomial((mov - 1) as u64, (a - 1) as u64));
                            for _ in 0..mov {
                                expect /= edge.q.clone();
                            }
                            pass &= rc.mul(&w) == AlphaRat::constant(n, expect);
                            checked += 1;
                        }
                    }
                }
            }
            emit(&Row {
                family: "weight-product-vs-rc",
                checked,
                pass,
            });
            all_pass &= pass;
            Ok(all_pass)
        }
        Command::Hurwitz { d, classes } => {
            let raw: Vec<Vec<u32>> = serde_json::from_str(&classes).map_err(|e| e.to_string())?;
            let classes = raw
                .iter()
                .map(|c| Partition::new(c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e: symcone::combinat::CombinatError| e.to_string())?;
            let list = ClassList::new(d, classes).map_err(|e| e.to_string())?;
            let table = PermTable::new(d).map_err(|e| e.to_string())?;
            let count = table.factorization_count(&list).map_err(|e| e.to_string())?;
            #[derive(Serialize)]
            struct Out {
                count: u64,
                backend: &'static str,
            }
            emit(&Out {
                count,
                backend: "brute-force",
            });
            Ok(true)
        }
        Command::Trees { action } => {
            let load = |path: &str| -> Result<DecoratedTree, String> {
                let raw = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                serde_json::from_str(&raw).map_err(|e| e.to_string())
            };
            match action {
                TreeAction::Validate { input } => {
                    let tree = load(&input)?;
                    let verdict = tree.validate();
                    let pass = verdict.pass();
                    emit(&verdict);
                    Ok(pass)
                }
                TreeAction::Combine { input, pair } => {
                    let tree = load(&input)?;
                    let (merged, edge_map) =
                        tree.combine(pair[0], pair[1]).map_err(|e| e.to_string())?;
                    #[derive(Serialize)]
                    struct Out {
                        tree: DecoratedTree,
                        edge_map: Vec<usize>,
                    }
                    emit(&Out {
                        tree: merged,
                        edge_map,
                    });
                    Ok(true)
                }
                TreeAction::Minimal { input } => {
                    let tree = load(&input)?;
                    let minimal = tree.minimal_form().map_err(|e| e.to_string())?;
                    emit(&minimal);
                    Ok(true)
                }
            }
        }
    }
}
