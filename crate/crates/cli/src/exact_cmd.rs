use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use peg_core::exact::{
    distance_to_connectedness, enumerate_completions, exact_exp_chi, exact_report, inventory_witnesses,
    min_components, ExactLimits,
};
use peg_core::rational::format_rational;
use peg_core::Rational;
use serde_json::json;

use crate::output::{read_graph, to_json, write_text};
use crate::{rational_arg, Status};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum What {
    /// Distance to connectedness, `(min components − 1)/m`.
    DistanceConn,
    /// Fewest components over all completions.
    MinComponents,
    /// Every completion's edge set.
    Completions,
    /// Plain and generalized witness inventory.
    Witnesses,
    /// Exact expected credit of one estimator sample; needs `--dhat`.
    ExpChi,
    /// All of the above in one JSON report.
    Report,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub what: What,
    /// Crude estimate for `exp-chi`.
    #[arg(long, value_parser = rational_arg)]
    pub dhat: Option<Rational>,
    #[arg(long, value_parser = rational_arg, default_value = "1/4")]
    pub eps: Rational,
    #[arg(long, default_value_t = ExactLimits::default().max_erased_slots)]
    pub max_erased: usize,
    #[arg(long, default_value_t = ExactLimits::default().completion_cap)]
    pub completion_cap: usize,
    /// Scalars print bare in `text`; structured answers are always JSON.
    #[arg(long, value_enum, default_value_t = ExactFormat::Text)]
    pub format: ExactFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_exact(a: &ExactArgs) -> Result<Status> {
    let g = read_graph(&a.input)?;
    let limits = ExactLimits {
        max_erased_slots: a.max_erased,
        completion_cap: a.completion_cap,
    };
    let scalar = |key: &str, value: String| -> Result<String> {
        Ok(match a.format {
            ExactFormat::Text => format!("{value}\n"),
            ExactFormat::Json => to_json(&json!({ key: value }))?,
        })
    };
    let text = match a.what {
        What::DistanceConn => scalar("distance", format_rational(&distance_to_connectedness(&g, &limits)?))?,
        What::MinComponents => scalar("min_components", min_components(&g, &limits)?.to_string())?,
        What::ExpChi => {
            let Some(dhat) = a.dhat else { bail!("--what exp-chi needs --dhat") };
            scalar("exp_chi", format_rational(&exact_exp_chi(&g, dhat, a.eps)))?
        }
        What::Completions => {
            let set = enumerate_completions(&g, &limits)?;
            let edges = set
                .completions
                .iter()
                .map(|c| c.edges(&g).map(|e| e.into_iter().collect::<Vec<_>>()))
                .collect::<Result<Vec<_>, _>>()?;
            to_json(&json!({ "count": edges.len(), "partial": set.partial, "completions": edges }))?
        }
        What::Witnesses => to_json(&inventory_witnesses(&g))?,
        What::Report => to_json(&exact_report(&g, &limits, a.dhat.map(|d| (d, a.eps)))?)?,
    };
    write_text(a.out.as_deref(), &text)?;
    Ok(Status::Ok)
}
