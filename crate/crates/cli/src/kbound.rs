use cjl_core::analysis::{pairwise_union_bound, BoundConstants};
use cjl_core::target_dimension;
use clap::Args;

use crate::error::CliError;

#[derive(Args, Debug)]
pub struct KboundArgs {
    /// Number of points.
    #[arg(long)]
    pub n: usize,
    /// Distortion, in (0, 1/2].
    #[arg(long)]
    pub eps: f64,
    /// Leading constant in k = C (ln n)^3 / eps^2.
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    /// Diagonal-term tail constant [default: 5/2 - sqrt(6)].
    #[arg(long)]
    pub c_diag: Option<f64>,
    /// Off-diagonal tail constant.
    #[arg(long, default_value_t = 1.0)]
    pub c_offdiag: f64,
}

pub fn run(args: &KboundArgs) -> Result<(), CliError> {
    let k = target_dimension(args.n, args.eps, args.c)?;
    let constants = BoundConstants::new(
        args.c_diag.unwrap_or_else(BoundConstants::default_c_diag),
        args.c_offdiag,
    )?;
    let bound = pairwise_union_bound(args.n, k, args.eps, &constants);
    println!("k = {k}");
    println!(
        "union_bound = {bound:e} (up to the unspecified off-diagonal constant; c_diag = {}, c_offdiag = {})",
        constants.c_diag, constants.c_offdiag
    );
    Ok(())
}
