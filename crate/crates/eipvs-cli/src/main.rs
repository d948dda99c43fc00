//! Command-line surface over the elastic inner-product library: pairwise
//! products and distances, index build/query, nearest-neighbor
//! classification with stiffness selection, Gram-matrix export,
//! orthogonalization, sequence similarity, timing curves and synthetic data.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use eipvs::elastic::{eip, eip_distance, ElasticParams, TimeKernel};
use eipvs::eval::{
    self, BenchDistance, HarnessDistance, NuSelection, DEFAULT_NU_GRID,
};
use eipvs::index::{ElasticIndex, Grid};
use eipvs::io::{
    format_family_csv, format_ucr, load_corpus, load_ucr, load_values, timing_rows_to_csv,
    timing_rows_to_json, KnnRunReport, OutputFormat, UcrOptions,
};
use eipvs::kernels::{check_psd, gram_matrix, write_gram_csv, write_gram_libsvm, KernelSpec};
use eipvs::ortho::{gram_schmidt, make_sincos_basis, make_spike_basis};
use eipvs::seq::{compute_idf, ecos, SymbolSequence, Weighting};
use eipvs::series::Split;

#[derive(Parser)]
#[command(name = "eipvs", version, about = "Elastic inner-product tools for time series and sequences")]
struct Cli {
    /// Stiffness of the time kernel. Omit on `knn` to select it by
    /// leave-one-out on the training set.
    #[arg(long, global = true)]
    nu: Option<f64>,

    /// Time kernel: gaussian or laplace.
    #[arg(long, global = true, default_value = "gaussian")]
    kernel: String,

    /// Replacement for exact-zero sample values (default 2^-52).
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Seed for anything randomized.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for batch computations (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "json")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Elastic inner product and distance of two single-series value files.
    Eip {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Build or query a precomputed elastic index.
    Index {
        #[command(subcommand)]
        action: IndexAction,
    },
    /// Nearest-neighbor classification with train/test files.
    Knn {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// eip, ed or dtw.
        #[arg(long, default_value = "eip")]
        distance: String,
        /// Comma-separated stiffness grid for selection (eip only).
        #[arg(long)]
        nu_grid: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Accept rows of differing lengths (recursive evaluation only).
        #[arg(long)]
        variable_length: bool,
    },
    /// Export a kernel Gram matrix over a dataset.
    Gram {
        #[arg(long)]
        input: PathBuf,
        /// gaussian-eip, gaussian-euclid, polynomial-eip, exp-eip,
        /// exp-neg-distance.
        #[arg(long, default_value = "gaussian-eip")]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        /// Emit the LIBSVM precomputed-kernel layout instead of CSV.
        #[arg(long)]
        libsvm: bool,
        /// Also run the eigenvalue PSD check and report it on stderr.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orthogonalize a family of series and emit it as CSV.
    Ortho {
        /// Use the spike basis with this many members.
        #[arg(long)]
        spike: Option<usize>,
        /// Use the sine-cosine basis with this many wavenumber pairs.
        #[arg(long)]
        sincos_pairs: Option<usize>,
        /// Length of the sine-cosine waves.
        #[arg(long, default_value_t = 128)]
        length: usize,
        /// Family file: one series per line, values only.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Map input timestamps affinely onto [0, 1].
        #[arg(long)]
        normalize_time: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elastic cosine similarity for symbolic sequences.
    Ecos {
        /// First sequence (whitespace-separated tokens).
        #[arg(long)]
        a: Option<String>,
        /// Second sequence.
        #[arg(long)]
        b: Option<String>,
        /// Score this sequence against every corpus line instead.
        #[arg(long)]
        query: Option<String>,
        /// Corpus file (needed for idf weighting and query mode).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// indicator or idf.
        #[arg(long, default_value = "indicator")]
        weighting: String,
    },
    /// Wall-clock timing curves for the distance implementations.
    Bench {
        #[arg(long, default_value = "10,100,1000")]
        lengths: String,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Comma-separated subset of ed, eip, ieip, dtw.
        #[arg(long, default_value = "ed,eip,ieip,dtw")]
        distances: String,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic cylinder-bell-funnel dataset.
    Cbf {
        #[arg(long)]
        per_class: usize,
        #[arg(long, default_value_t = 128)]
        length: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum IndexAction {
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use the uniform grid 1..=n instead of the union of timestamps.
        #[arg(long)]
        grid_points: Option<usize>,
    },
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Single-series value file.
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let kernel = match cli.kernel.as_str() {
        "gaussian" => TimeKernel::Gaussian,
        "laplace" => TimeKernel::Laplace,
        other => bail!("unknown time kernel {other:?} (expected gaussian or laplace)"),
    };
    let format: OutputFormat = cli.format.parse::<OutputFormat>().map_err(|e| anyhow!("{e}"))?;
    let epsilon = cli.epsilon.unwrap_or(f64::EPSILON);
    let nu = cli.nu;
    let seed = cli.seed;

    match cli.command {
        Command::Eip { a, b } => {
            let params = ElasticParams::eip_with_kernel(nu.unwrap_or(0.1), kernel);
            let sa = load_values(&a, epsilon)?;
            let sb = load_values(&b, epsilon)?;
            let product = eip(&sa, &sb, &params)?;
            let distance = eip_distance(&sa, &sb, &params)?;
            match format {
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::json!({ "nu": params.nu, "eip": product, "distance": distance })
                ),
                OutputFormat::Csv => {
                    println!("nu,eip,distance");
                    println!("{},{},{}", params.nu, product, distance);
                }
            }
        }
        Command::Index { action } => run_index(action, nu, kernel, epsilon, format)?,
        Command::Knn { train, test, distance, nu_grid, k, variable_length } => {
            let opts = |name: &str, split| UcrOptions {
                epsilon,
                variable_length,
                name: name.into(),
                split,
            };
            let train_report = load_ucr(&train, &opts(&train.display().to_string(), Split::Train))
                .with_context(|| format!("loading {}", train.display()))?;
            let test_report = load_ucr(&test, &opts(&test.display().to_string(), Split::Test))
                .with_context(|| format!("loading {}", test.display()))?;
            if train_report.zero_repairs + test_report.zero_repairs > 0 {
                eprintln!(
                    "note: replaced {} zero values by epsilon",
                    train_report.zero_repairs + test_report.zero_repairs
                );
            }
            let (dist, selection): (HarnessDistance, Option<NuSelection>) =
                match distance.as_str() {
                    "ed" => (HarnessDistance::Euclidean, None),
                    "dtw" => (HarnessDistance::Dtw, None),
                    "eip" => {
                        let params_for = |nu| ElasticParams::eip_with_kernel(nu, kernel);
                        match nu {
                            Some(nu) => (HarnessDistance::Eip(params_for(nu)), None),
                            None => {
                                let grid = match &nu_grid {
                                    Some(text) => parse_f64_list(text)?,
                                    None => DEFAULT_NU_GRID.to_vec(),
                                };
                                let sel = eval::select_nu(&train_report.dataset, &grid)?;
                                (HarnessDistance::Eip(params_for(sel.nu)), Some(sel))
                            }
                        }
                    }
                    other => bail!("unknown distance {other:?} (expected eip, ed or dtw)"),
                };
            let report = eval::test_error(&train_report.dataset, &test_report.dataset, k, &dist)?;
            let run_report = KnnRunReport {
                dataset: train_report.dataset.name.clone(),
                distance: distance.clone(),
                selection,
                test_error: report.error_rate,
                confusion: report.confusion,
            };
            match format {
                OutputFormat::Json => println!("{}", run_report.to_json()),
                OutputFormat::Csv => print!("{}", run_report.to_csv()),
            }
        }
        Command::Gram { input, kind, sigma, degree, rate, exponent, libsvm, check, out } => {
            let report = load_ucr(&input, &UcrOptions { epsilon, ..Default::default() })?;
            let params = ElasticParams::eip_with_kernel(nu.unwrap_or(0.1), kernel);
            let spec = match kind.as_str() {
                "gaussian-eip" => KernelSpec::GaussianEip { params, sigma },
                "gaussian-euclid" => KernelSpec::GaussianEuclid { sigma },
                "polynomial-eip" => KernelSpec::PolynomialEip { params, degree },
                "exp-eip" => KernelSpec::ExpEip { params },
                "exp-neg-distance" => KernelSpec::ExpNegDistance { params, rate, exponent },
                other => bail!("unknown kernel kind {other:?}"),
            };
            let items: Vec<_> = report.dataset.iter().map(|(s, _)| s.clone()).collect();
            let gram = gram_matrix(&spec, &items)?;
            let mut buf = Vec::new();
            if libsvm {
                let labels: Vec<String> =
                    report.dataset.iter().map(|(_, l)| l.clone()).collect();
                write_gram_libsvm(&mut buf, &labels, &gram)?;
            } else {
                let ids: Vec<String> =
                    (0..report.dataset.len()).map(|i| format!("item{i}")).collect();
                write_gram_csv(&mut buf, &ids, &gram)?;
            }
            write_output(out.as_deref(), &buf)?;
            if check {
                let psd = check_psd(&gram, 1e-8)?;
                eprintln!(
                    "psd check: min eigenvalue {}, max eigenvalue {}, psd = {}",
                    psd.min_eigenvalue, psd.max_eigenvalue, psd.is_psd
                );
            }
        }
        Command::Ortho { spike, sincos_pairs, length, input, normalize_time, out } => {
            let family = match (spike, sincos_pairs, input) {
                (Some(count), None, None) => make_spike_basis(count, epsilon)?,
                (None, Some(pairs), None) => make_sincos_basis(pairs, length, epsilon)?,
                (None, None, Some(path)) => {
                    let text = fs::read_to_string(&path)?;
                    let mut family = Vec::new();
                    for line in text.lines().filter(|l| !l.trim().is_empty()) {
                        let values: Vec<f64> = line
                            .split(|c: char| c == ',' || c.is_whitespace())
                            .filter(|f| !f.is_empty())
                            .map(|f| f.parse::<f64>().map_err(|e| anyhow!("{e}")))
                            .collect::<Result<_>>()?;
                        let values =
                            values.into_iter().map(|v| if v == 0.0 { epsilon } else { v }).collect();
                        let series = eipvs::TimeSeries::univariate(values)?;
                        family.push(if normalize_time { series.normalize_timestamps() } else { series });
                    }
                    family
                }
                _ => bail!("choose exactly one of --spike, --sincos-pairs or --input"),
            };
            let params = ElasticParams::eip_with_kernel(nu.unwrap_or(0.01), kernel);
            let basis = gram_schmidt(&family, &params)?;
            write_output(out.as_deref(), format_family_csv(&basis).as_bytes())?;
        }
        Command::Ecos { a, b, query, corpus, weighting } => {
            let nu = nu.unwrap_or(0.1);
            let corpus_data = corpus
                .map(|path| load_corpus(&path))
                .transpose()
                .context("loading corpus")?;
            let weighting = match weighting.as_str() {
                "indicator" => Weighting::Indicator,
                "idf" => {
                    let data = corpus_data
                        .as_ref()
                        .ok_or_else(|| anyhow!("idf weighting needs --corpus"))?;
                    let docs: Vec<SymbolSequence> =
                        data.iter().map(|(s, _)| s.clone()).collect();
                    Weighting::Idf(compute_idf(&docs)?)
                }
                other => bail!("unknown weighting {other:?} (expected indicator or idf)"),
            };
            match (a, b, query) {
                (Some(a), Some(b), None) => {
                    let sa = SymbolSequence::parse(&a)?;
                    let sb = SymbolSequence::parse(&b)?;
                    let value = ecos(&sa, &sb, nu, &weighting)?;
                    match format {
                        OutputFormat::Json => {
                            println!("{}", serde_json::json!({ "nu": nu, "ecos": value }))
                        }
                        OutputFormat::Csv => {
                            println!("nu,ecos");
                            println!("{nu},{value}");
                        }
                    }
                }
                (None, None, Some(query)) => {
                    let data =
                        corpus_data.ok_or_else(|| anyhow!("query mode needs --corpus"))?;
                    let q = SymbolSequence::parse(&query)?;
                    let mut scored: Vec<(usize, &str, f64)> = Vec::new();
                    for (i, (seq, label)) in data.iter().enumerate() {
                        scored.push((i, label, ecos(&q, seq, nu, &weighting)?));
                    }
                    scored.sort_by(|x, y| y.2.partial_cmp(&x.2).unwrap().then(x.0.cmp(&y.0)));
                    match format {
                        OutputFormat::Json => {
                            let rows: Vec<serde_json::Value> = scored
                                .iter()
                                .map(|(i, label, s)| {
                                    serde_json::json!({ "line": i, "label": label, "ecos": s })
                                })
                                .collect();
                            println!("{}", serde_json::to_string_pretty(&rows)?);
                        }
                        OutputFormat::Csv => {
                            println!("line,label,ecos");
                            for (i, label, s) in scored {
                                println!("{i},{label},{s}");
                            }
                        }
                    }
                }
                _ => bail!("use either --a with --b, or --query with --corpus"),
            }
        }
        Command::Bench { lengths, pairs, distances, repeats, out } => {
            let lengths: Vec<usize> = lengths
                .split(',')
                .map(|f| f.trim().parse::<usize>().map_err(|e| anyhow!("{e}")))
                .collect::<Result<_>>()?;
            let nu = nu.unwrap_or(0.1);
            let distances: Vec<BenchDistance> = distances
                .split(',')
                .map(|name| match name.trim() {
                    "ed" => Ok(BenchDistance::Euclidean),
                    "eip" => Ok(BenchDistance::RecursiveEip { nu }),
                    "ieip" => Ok(BenchDistance::IndexedEip { nu }),
                    "dtw" => Ok(BenchDistance::Dtw),
                    other => bail!("unknown bench distance {other:?}"),
                })
                .collect::<Result<_>>()?;
            let rows = eval::timing_bench(&lengths, pairs, &distances, repeats, seed)?;
            let text = match format {
                OutputFormat::Csv => timing_rows_to_csv(&rows),
                OutputFormat::Json => timing_rows_to_json(&rows) + "\n",
            };
            write_output(out.as_deref(), text.as_bytes())?;
        }
        Command::Cbf { per_class, length, out } => {
            let dataset = eval::cbf_generate(per_class, length, seed)?;
            write_output(out.as_deref(), format_ucr(&dataset).as_bytes())?;
        }
    }
    Ok(())
}

fn run_index(
    action: IndexAction,
    nu: Option<f64>,
    kernel: TimeKernel,
    epsilon: f64,
    format: OutputFormat,
) -> Result<()> {
    match action {
        IndexAction::Build { input, out, grid_points } => {
            let report = load_ucr(&input, &UcrOptions { epsilon, ..Default::default() })?;
            if report.zero_repairs > 0 {
                eprintln!("note: replaced {} zero values by epsilon", report.zero_repairs);
            }
            let grid = match grid_points {
                Some(n) => Grid::Explicit((1..=n).map(|i| i as f64).collect()),
                None => Grid::Auto,
            };
            let index = ElasticIndex::build(&report.dataset, grid, nu.unwrap_or(0.1), kernel)?;
            index.save(&out)?;
            eprintln!(
                "indexed {} items over {} grid points into {}",
                index.len(),
                index.matrix().n(),
                out.display()
            );
        }
        IndexAction::Query { index, query, k } => {
            let idx = ElasticIndex::load(&index)?;
            let q = load_values(&query, f64::EPSILON)?;
            let hits = idx.query_knn(&q, k)?;
            match format {
                OutputFormat::Json => {
                    let rows: Vec<serde_json::Value> = hits
                        .iter()
                        .map(|h| {
                            serde_json::json!({
                                "id": h.id, "label": h.label, "distance": h.distance
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
                OutputFormat::Csv => {
                    println!("id,label,distance");
                    for h in hits {
                        println!("{},{},{}", h.id, h.label, h.distance);
                    }
                }
            }
        }
    }
    Ok(())
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|f| f.trim().parse::<f64>().map_err(|e| anyhow!("bad number {f:?}: {e}")))
        .collect()
}

fn write_output(path: Option<&std::path::Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}
