use std::path::{Path, PathBuf};

use cjl_core::{FastEmbedder, SampledTransform, TransformSpec};
use clap::Args;

use crate::csvio::{read_points, write_points};
use crate::error::{io_error, CliError};
use crate::{DistArg, StructureArg};

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Input CSV, one point per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Output CSV of embedded points.
    #[arg(long)]
    pub output: PathBuf,
    /// Expected input dimension; inferred from the first row when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    /// Target dimension.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: DistArg,
    #[arg(long, value_enum, default_value = "circulant")]
    pub structure: StructureArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// The input has a header row to skip.
    #[arg(long)]
    pub header: bool,
    /// Where to write the transform description [default: <output>.transform.json].
    #[arg(long)]
    pub transform_out: Option<PathBuf>,
    /// Store the sampled coefficients and signs in the transform file.
    #[arg(long)]
    pub include_arrays: bool,
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".transform.json");
    PathBuf::from(name)
}

pub fn run(args: &EmbedArgs) -> Result<(), CliError> {
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if args.d == Some(0) {
        return Err(CliError::Usage("--d must be at least 1".into()));
    }
    let points = read_points(&args.input, args.header, args.d)?;
    let spec = TransformSpec::new(
        points.d(),
        args.k,
        args.dist.into(),
        args.structure.into(),
        args.seed,
    )?;
    let embedder = FastEmbedder::new(SampledTransform::sample(spec));
    let embedded = embedder.embed_points(&points)?;
    write_points(&args.output, &embedded)?;

    let sidecar = args
        .transform_out
        .clone()
        .unwrap_or_else(|| sidecar_path(&args.output));
    let record = embedder.transform().to_record(args.include_arrays);
    let json = serde_json::to_string_pretty(&record).map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::write(&sidecar, json + "\n").map_err(|e| io_error(&sidecar, e))
}
