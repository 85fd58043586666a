use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use emd_ser::classifiers::{persist, ModelKind};
use emd_ser::emd::{count_zero_crossings, decompose, find_extrema, SiftConfig};
use emd_ser::features::SourceMode;
use emd_ser::harness::pipeline::{manifest_text, read_manifest_test_paths, split_rows, train_on_rows};
use emd_ser::harness::{
    evaluate, extract_corpus, ingest, read_feature_csv, run_pipeline, synth, write_feature_csv,
    CorpusTag, PipelineConfig, PipelineOptions,
};
use emd_ser::signal_io::load_wav;
use emd_ser::{Error, Result};

#[derive(Parser)]
#[command(name = "emd-ser", version, about = "EMD-based speech emotion recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Crema,
    Tess,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one WAV file into IMFs
    Decompose {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        sd: f64,
        #[arg(long, default_value_t = 10)]
        max_imfs: usize,
    },
    /// Extract utterance features for a corpus directory
    Extract {
        dir: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        /// raw, emd-detrend or imf-sum:N
        #[arg(long)]
        source: Option<SourceMode>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Split feature tables, train one learner, write the model and split manifest
    Train {
        #[arg(long, num_args = 1.., required = true)]
        features: Vec<PathBuf>,
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        split: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Defaults to `<out>.manifest.tsv`
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Score a model on a feature table and print the confusion matrix
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Restrict to rows marked `test` in this split manifest
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Defaults to `<model>.confusion.csv`
        #[arg(long)]
        confusion: Option<PathBuf>,
    },
    /// End to end: ingest, split, extract, train, evaluate
    Pipeline {
        #[arg(long)]
        crema: Option<PathBuf>,
        #[arg(long)]
        tess: Option<PathBuf>,
        /// Generate the bundled synthetic mini-corpus and use it as TESS input
        #[arg(long, conflicts_with_all = ["crema", "tess"])]
        synthetic: bool,
        /// svm, mlp, knn, forest, or all
        #[arg(long, default_value = "svm")]
        model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        split: Option<f64>,
        #[arg(long, default_value = "emd-ser-out")]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the synthetic mini-corpus
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = synth::DEFAULT_PER_CLASS)]
        per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the default JSON configuration
    Config,
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    path.map_or_else(|| Ok(PipelineConfig::default()), PipelineConfig::load)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose { input, out, sd, max_imfs } => {
            let sift = SiftConfig { sd_threshold: sd, max_imfs, ..SiftConfig::default() };
            let audio = load_wav(&input)?;
            sift.validate()?;
            let d = decompose(&audio, &sift);
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

            let mut csv = (1..=d.num_imfs()).map(|i| format!("imf_{i}")).collect::<Vec<_>>();
            csv.push("residual".into());
            let mut text = csv.join(",") + "\n";
            for k in 0..d.original_len {
                let row: Vec<String> = d.imfs.iter().map(|m| m[k].to_string()).chain([d.residual[k].to_string()]).collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            write_text(&out.join("imfs.csv"), &text)?;

            let mut stats = String::from("component,rms,extrema,zero_crossings\n");
            let comps = d.imfs.iter().enumerate().map(|(i, m)| (format!("imf_{}", i + 1), m)).chain([("residual".to_string(), &d.residual)]);
            for (name, sig) in comps {
                let rms = (sig.iter().map(|x| x * x).sum::<f64>() / sig.len().max(1) as f64).sqrt();
                let ext = find_extrema(sig);
                let n_ext = ext.maxima.len() + ext.minima.len();
                let zc = count_zero_crossings(sig);
                stats.push_str(&format!("{name},{rms},{n_ext},{zc}\n"));
                println!("{name:>9}  rms {rms:.6}  extrema {n_ext:>6}  zero crossings {zc:>6}");
            }
            write_text(&out.join("stats.csv"), &stats)?;
        }
        Command::Extract { dir, format, out, source, config } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = source {
                cfg.features.source_mode = s;
            }
            cfg.validate()?;
            let tag = match format {
                Format::Crema => CorpusTag::Crema,
                Format::Tess => CorpusTag::Tess,
            };
            let corpus = ingest(&dir, tag)?;
            for p in &corpus.skipped {
                eprintln!("skipped (unrecognised name): {}", p.display());
            }
            let report = extract_corpus(&corpus, &cfg.features, &cfg.sift)?;
            for (p, why) in &report.failed {
                eprintln!("skipped (undecodable): {}: {why}", p.display());
            }
            write_feature_csv(&out, &report.rows)?;
            println!("wrote {} rows to {}", report.rows.len(), out.display());
        }
        Command::Train { features, model, out, seed, split, config, manifest } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.split.seed = seed;
            if let Some(f) = split {
                cfg.split.train_fraction = f;
            }
            cfg.validate()?;
            let mut rows = Vec::new();
            for f in &features {
                rows.extend(read_feature_csv(f)?);
            }
            let distinct: BTreeSet<&str> = rows.iter().map(|r| r.source_path.as_str()).collect();
            if distinct.len() != rows.len() {
                return Err(Error::InvalidParameter("feature tables contain duplicate paths".into()));
            }
            let (train, test) = split_rows(&rows, &cfg)?;
            let trained = train_on_rows(model, &train, &cfg, seed)?;
            persist::write_model(&out, &trained)?;
            let manifest = manifest.unwrap_or_else(|| with_suffix(&out, ".manifest.tsv"));
            write_text(&manifest, &manifest_text(&train, &test))?;
            let acc = evaluate(&trained, &train)?.accuracy();
            println!("trained {} on {} rows ({} held out); training accuracy {acc:.4}", model.name(), train.len(), test.len());
            println!("model: {}\nmanifest: {}", out.display(), manifest.display());
        }
        Command::Evaluate { model, features, manifest, confusion } => {
            let trained = persist::read_model(&model)?;
            let mut rows = read_feature_csv(&features)?;
            if let Some(m) = &manifest {
                let keep = read_manifest_test_paths(m)?;
                rows.retain(|r| keep.contains(&r.source_path));
            }
            let cm = evaluate(&trained, &rows)?;
            print!("{}", cm.to_text());
            let path = confusion.unwrap_or_else(|| with_suffix(&model, ".confusion.csv"));
            cm.write_csv(&path)?;
            println!("confusion matrix: {}", path.display());
        }
        Command::Pipeline { crema, tess, synthetic, model, seed, split, out, config } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(f) = split {
                cfg.split.train_fraction = f;
            }
            let models = if model.eq_ignore_ascii_case("all") {
                ModelKind::ALL.to_vec()
            } else {
                model.split(',').map(str::parse).collect::<Result<Vec<ModelKind>>>()?
            };
            let tess = if synthetic {
                let dir = out.join("synthetic_corpus");
                synth::write_mini_corpus(&dir, synth::DEFAULT_PER_CLASS, seed)?;
                Some(dir)
            } else {
                tess
            };
            if crema.is_none() && tess.is_none() {
                return Err(Error::InvalidParameter("give --crema, --tess, or --synthetic".into()));
            }
            let report = run_pipeline(&PipelineOptions { crema, tess, models, seed, out_dir: out, config: cfg })?;
            for p in &report.skipped_names {
                eprintln!("skipped (unrecognised name): {}", p.display());
            }
            for (p, why) in &report.failed_files {
                eprintln!("skipped (undecodable): {}: {why}", p.display());
            }
            println!("{} training / {} test utterances", report.n_train, report.n_test);
            for m in &report.models {
                println!("\n== {} ==", m.kind.name());
                println!("train accuracy {:.4}", m.train.accuracy());
                println!("test accuracy  {:.4}", m.test.accuracy());
                print!("{}", m.test.to_text());
            }
            println!("\nfeatures: {}", report.features_path.display());
            println!("manifest: {}", report.manifest_path.display());
        }
        Command::Synth { out, per_class, seed } => {
            let paths = synth::write_mini_corpus(&out, per_class, seed)?;
            println!("wrote {} files to {}", paths.len(), out.display());
        }
        Command::Config => println!("{}", PipelineConfig::default().to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
