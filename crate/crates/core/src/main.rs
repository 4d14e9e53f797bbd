use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use genuslab::campaign::{self, CampaignConfig, Row};
use genuslab::enumerate::{cc_table, Variant};
use genuslab::geometry::{self, Metrics};
use genuslab::sampler::{Method, Sampler, SamplerSpec};
use genuslab::verify::{self, Level, Options};
use genuslab::{codec, oracle, Error};

#[derive(Parser)]
#[command(name = "genuslab", version, about = "Random bipartite quadrangulations of high genus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Quadrangulation,
    Unicellular,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate Q(n,g) by recurrence.
    Enumerate {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        g_max: usize,
        #[arg(long, default_value = "corrected")]
        variant: Variant,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw rooted quadrangulations.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        #[arg(long, default_value = "exact")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chain length for the mcmc method.
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every rooted map of a given size.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, value_enum, default_value = "quadrangulation")]
        kind: OracleKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure maps read from NDJSON.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "pr,systole,two-cycles,ct,diameter")]
        metrics: String,
        #[arg(long, default_value_t = geometry::DEFAULT_SEARCH_CAP)]
        search_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sampling and measurement campaign from a JSON config.
    Campaign {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
        /// Run only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long, default_value = "corrected")]
        variant: Variant,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool, Error> {
    let workers = campaign::workers_from_env()?;
    let pool = campaign::pool(workers)?;
    match cli.command {
        Command::Enumerate { n_max, g_max, variant, out } => {
            let t = cc_table(n_max, g_max, variant)?;
            let mut w = output(&out)?;
            serde_json::to_writer_pretty(&mut w, &t.to_json()).map_err(|e| Error::Io(e.into()))?;
            writeln!(w)?;
        }
        Command::Sample { n, g, method, count, seed, steps, out } => {
            let mut spec = SamplerSpec::new(n, g, method, seed);
            spec.mcmc_steps = steps;
            let sampler = Sampler::new(spec)?;
            let maps = pool.install(|| {
                (0..count as u32)
                    .into_par_iter()
                    .map(|i| sampler.draw(0, i))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            codec::write_ndjson(output(&out)?, &maps)?;
        }
        Command::Oracle { n, g, kind, out } => {
            let list = match kind {
                OracleKind::Quadrangulation => oracle::quadrangulations(n)?,
                OracleKind::Unicellular => oracle::unicellular(n)?,
            };
            let maps: Vec<_> = match g {
                Some(g) => list.genus(g).to_vec(),
                None => list.all().cloned().collect(),
            };
            codec::write_ndjson(output(&out)?, &maps)?;
        }
        Command::Analyze { input, metrics, search_cap, out } => {
            let metrics = Metrics::parse(&metrics).map_err(Error::Invalid)?;
            let maps = codec::read_ndjson(BufReader::new(File::open(&input)?))?;
            let rows: Vec<Row> = pool.install(|| {
                maps.par_iter()
                    .enumerate()
                    .map(|(i, m)| Row {
                        map_index: i,
                        pair: 0,
                        n: m.face_count(),
                        g: m.genus(),
                        report: geometry::analyze(m, metrics, search_cap),
                    })
                    .collect()
            });
            campaign::write_csv(output(&out)?, &rows)?;
        }
        Command::Campaign { config } => {
            let text = std::fs::read_to_string(&config)?;
            let config = CampaignConfig::from_json(&text)?;
            let rec = campaign::run_and_write(&config, workers)?;
            if config.out_summary.is_none() {
                campaign::write_summary(std::io::stdout().lock(), &rec)?;
            }
            for p in &rec.pairs {
                if let Some(e) = &p.error {
                    eprintln!("pair ({}, {}): {e}", p.n, p.g);
                }
            }
        }
        Command::Verify { level, only, variant } => {
            let mut opts = Options::new(level);
            opts.variant = variant;
            let ids = if only.is_empty() { (1..=11).collect() } else { only };
            let mut ok = true;
            for id in ids {
                let r = pool.install(|| verify::run_criterion(id, &opts));
                println!("{r}");
                ok &= r.passed;
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
