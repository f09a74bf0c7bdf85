use casimir_core::force::{force_imag_axis, force_real_axis, ideal_force, lifshitz_force};
use casimir_core::{ForceError, ForceResult, PathTag};
use rayon::prelude::*;

use crate::config::{PathChoice, RunConfig};
use crate::table::{Row, Status, Table};

fn paths(choice: PathChoice) -> &'static [PathTag] {
    match choice {
        PathChoice::ImaginaryAxis => &[PathTag::ImaginaryAxis],
        PathChoice::RealAxis => &[PathTag::RealAxis],
        PathChoice::Lifshitz => &[PathTag::Lifshitz],
        PathChoice::All => &[PathTag::ImaginaryAxis, PathTag::RealAxis, PathTag::Lifshitz],
    }
}

fn evaluate(cfg: &RunConfig, separation: f64, path: PathTag) -> Result<ForceResult, ForceError> {
    let (s1, s2) = (&cfg.slab1, &cfg.slab2);
    match path {
        PathTag::ImaginaryAxis => force_imag_axis(&s1.reflection, &s2.reflection, separation, &cfg.quadrature),
        PathTag::RealAxis => force_real_axis(&s1.reflection, &s2.reflection, separation, &cfg.quadrature),
        PathTag::Lifshitz => match (&s1.bulk, &s2.bulk) {
            (Some(e1), Some(e2)) => lifshitz_force(e1, e2, &cfg.gap, separation, &cfg.quadrature),
            _ => Err(ForceError::Unsupported(
                "the lifshitz path needs both slabs as `model = \"fresnel\"`".into(),
            )),
        },
        PathTag::Ideal => ideal_force(separation),
    }
}

fn row(separation: f64, path: PathTag, outcome: Result<ForceResult, ForceError>) -> (Row, Option<String>) {
    match outcome {
        Ok(r) => (Row::from_result(&r, Status::Ok), None),
        Err(ForceError::NotConverged { partial, detail }) => {
            let mut partial = *partial;
            partial.path = path;
            let msg = format!("L = {separation:e} m, {path}: not converged ({detail})");
            (Row::from_result(&partial, Status::NotConverged), Some(msg))
        }
        Err(e) => {
            let msg = format!("L = {separation:e} m, {path}: {e}");
            (
                Row {
                    separation,
                    pressure: f64::NAN,
                    error: f64::NAN,
                    reduction: f64::NAN,
                    path: path.as_str().to_string(),
                    evals: 0,
                    status: Status::Failed,
                },
                Some(msg),
            )
        }
    }
}

/// Evaluate every (separation, path) pair in parallel. Rows come back
/// ordered by separation, then path, whatever the completion order.
pub fn run_sweep(cfg: &RunConfig) -> (Table, Vec<String>) {
    let tasks: Vec<(f64, PathTag)> = cfg
        .separations
        .iter()
        .flat_map(|&l| paths(cfg.path).iter().map(move |&p| (l, p)))
        .collect();
    let results: Vec<(Row, Option<String>)> = tasks
        .par_iter()
        .map(|&(l, p)| row(l, p, evaluate(cfg, l, p)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut problems = Vec::new();
    for (r, msg) in results {
        rows.push(r);
        problems.extend(msg);
    }
    (Table { rows }, problems)
}
