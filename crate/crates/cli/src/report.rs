//! Text report for `optimal`.

use std::fmt::Write as _;
use std::path::Path;

use persuade_core::optimal::{optimal_scheme_binary, optimal_scheme_general};
use persuade_core::{Instance, SignalingScheme};

use crate::config::InstanceFile;
use crate::error::CliError;

fn scheme_lines(out: &mut String, scheme: &SignalingScheme) {
    for w in 0..scheme.states() {
        let row: Vec<String> = scheme.row(w).iter().map(|p| format!("{p:?}")).collect();
        let _ = writeln!(out, "  pi(.|{w}) = [{}]", row.join(", "));
    }
}

/// U*, the LP-optimal scheme, the knapsack scheme for binary actions, and G, D.
pub fn optimal_report(instance: &Instance) -> Result<String, CliError> {
    let margins = instance.margins()?;
    let (_, u_star) = instance.optimum()?;
    let (general, lp_value) = optimal_scheme_general(&instance.prior, instance.u(), instance.v())?;
    let mut out = String::new();
    let _ = writeln!(out, "states = {}, actions = {}, p0 = {:?}", instance.states(), instance.actions(), instance.p0());
    let _ = writeln!(out, "U* = {u_star:?}");
    let _ = writeln!(out, "general LP scheme (value {lp_value:?}), rows are states, columns recommended actions:");
    scheme_lines(&mut out, &general);
    if instance.actions() == 2 {
        match optimal_scheme_binary(&instance.prior, instance.u(), instance.v()) {
            Ok(opt) => {
                let _ = writeln!(out, "knapsack scheme (value {:?}):", opt.value);
                let _ = writeln!(out, "  order = {:?}, n_minus = {}", opt.ordering.order, opt.ordering.n_minus);
                let _ = writeln!(out, "  threshold state = {}", opt.threshold_state());
                let _ = writeln!(out, "  M* = {:?}", opt.m_star);
                scheme_lines(&mut out, &opt.scheme);
                for w in 0..instance.states() {
                    let _ = writeln!(out, "  pi(1|{w}) = {:?}", opt.scheme.prob(w, 1));
                }
            }
            Err(e) => {
                let _ = writeln!(out, "knapsack scheme: not applicable ({e})");
            }
        }
    }
    let _ = writeln!(out, "G = {:?}", margins.g);
    let _ = writeln!(out, "D = {:?}", margins.d);
    let _ = writeln!(out, "receiver-optimal action per state = {:?}", margins.optimal_action);
    match margins.distinguishable_pair {
        Some((i, j)) => {
            let _ = writeln!(out, "distinguishable pair = ({i}, {j})");
        }
        None => {
            let _ = writeln!(out, "distinguishable pair = none");
        }
    }
    Ok(out)
}

/// `optimal`: reads an instance document (or a full experiment config) and reports.
pub fn cmd_optimal(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = InstanceFile::parse(&text)?;
    optimal_report(&file.instance.build()?)
}
