use std::fmt::Write as _;
use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use cjl_core::rng::SeedStream;
use cjl_core::{embed_naive, FastEmbedder, SampledTransform, TransformSpec};
use clap::Args;

use crate::error::{io_error, CliError};
use crate::{DistArg, StructureArg};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Ambient dimensions to time, comma separated and ascending.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d_list: Vec<usize>,
    /// Target dimension; capped at d for smaller entries of --d-list.
    #[arg(long)]
    pub k: usize,
    /// Repetitions per timing; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    pub trials: u32,
    /// Skip direct summation above this dimension.
    #[arg(long, default_value_t = 1 << 16)]
    pub naive_max_d: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: DistArg,
    #[arg(long, value_enum, default_value = "circulant")]
    pub structure: StructureArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn fastest_ns(trials: u32, mut f: impl FnMut()) -> u128 {
    (0..trials)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_nanos()
        })
        .min()
        .unwrap_or(0)
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    if args.k == 0 || args.trials == 0 {
        return Err(CliError::Usage(
            "--k and --trials must be at least 1".into(),
        ));
    }
    if args.d_list.contains(&0) {
        return Err(CliError::Usage(
            "--d-list entries must be at least 1".into(),
        ));
    }
    if args.d_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "--d-list must be strictly ascending".into(),
        ));
    }

    let mut csv = String::from("d,k,t_fast_ns,t_naive_ns\n");
    for &d in &args.d_list {
        let k = args.k.min(d);
        let spec = TransformSpec::new(d, k, args.dist.into(), args.structure.into(), args.seed)?;
        let embedder = FastEmbedder::new(SampledTransform::sample(spec));
        let x = SeedStream::new(args.seed ^ d as u64).unit_sphere(d);

        let t_fast = fastest_ns(args.trials, || {
            black_box(embedder.embed(black_box(&x)).expect("dimension checked"));
        });
        let t_naive = (d <= args.naive_max_d).then(|| {
            fastest_ns(args.trials, || {
                black_box(
                    embed_naive(embedder.transform(), black_box(&x)).expect("dimension checked"),
                );
            })
        });
        let naive = t_naive.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{d},{k},{t_fast},{naive}");
    }

    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| io_error(path, e)),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}
