//! Executes a validated configuration.

use bivar_core::approx::{audit_point, ApproximationResult, Variants};
use bivar_core::bivariation::VariationEstimate;
use bivar_core::bounds::{
    ac_linf_coeff, ac_lp_coeff, linf_norm, lp_norm, remainder_variation, variation_global_coeff,
    variation_pointwise_coeff,
};
use bivar_core::sampling::NormEstimate;
use bivar_core::{DerivativeField, Error, EvalPoint, MixedOrder};
use rayon::prelude::*;

use crate::config::{Plan, RunConfig};
use crate::report::{MidpointRow, Report, Row, RowStatus, Summary};
use crate::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Point-independent estimates for one `n`.
struct Norms {
    variation: Result<VariationEstimate, Error>,
    linf: Result<NormEstimate, Error>,
    lp: Result<NormEstimate, Error>,
}

fn norms_for(field: &DerivativeField, n: u32, cfg: &RunConfig, plan: &Plan) -> Norms {
    let upper = MixedOrder::diagonal(n + 1);
    Norms {
        variation: remainder_variation(field, n, &plan.rect, cfg.tol),
        linf: upper.clone().and_then(|o| linf_norm(field, o, &plan.rect)),
        lp: upper.and_then(|o| lp_norm(field, o, &plan.rect, cfg.p, cfg.tol)),
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn classify(e: &Error) -> RowStatus {
    match e {
        Error::Eval(_) => RowStatus::DomainError,
        _ => RowStatus::Failed,
    }
}

fn build_row(
    point: EvalPoint,
    n: u32,
    audit: Result<ApproximationResult, Error>,
    norms: &Norms,
    cfg: &RunConfig,
    plan: &Plan,
) -> Row {
    let mut first_error: Option<Error> = None;
    let mut note = |e: &Error| {
        if first_error.is_none() {
            first_error = Some(e.clone());
        }
    };
    let audit = audit.map_err(|e| note(&e)).ok();
    let variation = norms.variation.as_ref().map_err(&mut note).ok();
    let linf = norms.linf.as_ref().map_err(&mut note).ok();
    let lp = norms.lp.as_ref().map_err(&mut note).ok();

    let coeff = |c: Result<f64, Error>| c.ok();
    let pt_c = coeff(variation_pointwise_coeff(n, point, &plan.rect));
    let gl_c = variation_global_coeff(n, &plan.rect);
    let linf_c = coeff(ac_linf_coeff(n, point, &plan.rect));
    let lp_c = coeff(ac_lp_coeff(n, point, &plan.rect, cfg.p));

    let v = variation.map(|v| v.value);
    let product = |c: Option<f64>, x: Option<f64>| c.zip(x).and_then(|(c, x)| finite(c * x));

    let midpoint = audit.as_ref().and_then(|a| a.midpoint.as_ref()).map(|m| MidpointRow {
        e_m: finite(m.e_value),
        f_m: finite(m.f_remainder.value()),
        f_m_est_error: finite(m.f_remainder.estimate.est_error),
        f_m_converged: m.f_remainder.estimate.converged,
        residual: finite(m.residual),
    });

    let b_converged = audit.as_ref().is_some_and(|a| a.b.estimate.converged);
    let variation_converged = variation.is_some_and(|v| v.converged);
    let linf_norm_converged = linf.is_some_and(|l| l.converged);
    let lp_norm_converged = lp.is_some_and(|l| l.converged);
    let midpoint_converged = midpoint.as_ref().is_none_or(|m| m.f_m_converged);
    let converged = first_error.is_none()
        && b_converged
        && variation_converged
        && linf_norm_converged
        && lp_norm_converged
        && midpoint_converged;
    let status = match &first_error {
        Some(e) => classify(e),
        None if !converged => RowStatus::NotConverged,
        None => RowStatus::Ok,
    };

    Row {
        x: point.x,
        y: point.y,
        n,
        status,
        error: first_error.map(|e| e.to_string()),
        f: audit.as_ref().and_then(|a| finite(a.f_value)),
        a_n: audit.as_ref().and_then(|a| finite(a.a_value)),
        b_n: audit.as_ref().and_then(|a| finite(a.b.value())),
        b_est_error: audit.as_ref().and_then(|a| finite(a.b.estimate.est_error)),
        b_levels: audit
            .as_ref()
            .map(|a| a.b.estimate.levels.iter().copied().filter(|v| v.is_finite()).collect())
            .unwrap_or_default(),
        b_converged,
        residual: audit.as_ref().and_then(|a| finite(a.residual)),
        midpoint,
        var_bound_pt: product(pt_c, v),
        var_bound_global: product(Some(gl_c), v),
        linf_bound: product(linf_c, linf.map(|l| l.value)),
        lp_bound: product(lp_c, lp.map(|l| l.value)),
        variation: v.and_then(finite),
        variation_converged,
        linf_norm: linf.and_then(|l| finite(l.value)),
        linf_norm_converged,
        lp_norm: lp.and_then(|l| finite(l.value)),
        lp_norm_converged,
        advisory: !(variation_converged && linf_norm_converged && lp_norm_converged),
        converged,
    }
}

fn exit_code(rows: &[Row]) -> i32 {
    let has = |s: RowStatus| rows.iter().any(|r| r.status == s);
    if has(RowStatus::DomainError) {
        EXIT_DOMAIN
    } else if has(RowStatus::Failed) {
        EXIT_CONFIG
    } else if has(RowStatus::NotConverged) {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_OK
    }
}

/// Validates `cfg` and computes every (point, n) row.
///
/// Rows are ordered by point (input order), then by ascending `n`,
/// whatever the number of worker threads.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let plan = cfg.validate()?;
    let field = DerivativeField::parse(&cfg.function).map_err(|error| CliError::Function {
        source_text: cfg.function.clone(),
        error,
    })?;
    for &n in &plan.n_values {
        for j in 0..=n {
            field.partial(MixedOrder::new(n - j, j)?);
        }
        field.partial(MixedOrder::diagonal(n + 1)?);
    }
    let variants = Variants {
        sign_variant: cfg.variants.sign_variant,
        midpoint_variant: cfg.variants.midpoint_variant,
        mode: cfg.variants.remainder_mode,
    };

    let norms: Vec<Norms> = plan
        .n_values
        .par_iter()
        .map(|&n| norms_for(&field, n, cfg, &plan))
        .collect();

    let cells: Vec<(EvalPoint, usize)> = plan
        .points
        .iter()
        .flat_map(|&p| (0..plan.n_values.len()).map(move |k| (p, k)))
        .collect();
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(point, k)| {
            let n = plan.n_values[k];
            let audit = audit_point(&field, n, point, &plan.rect, cfg.tol, variants);
            build_row(point, n, audit, &norms[k], cfg, &plan)
        })
        .collect();

    let count = |s: RowStatus| rows.iter().filter(|r| r.status == s).count();
    let summary = Summary {
        rows: rows.len(),
        not_converged: count(RowStatus::NotConverged),
        domain_errors: count(RowStatus::DomainError),
        failed: count(RowStatus::Failed),
        exit_code: exit_code(&rows),
    };
    Ok(Report {
        config: cfg.clone(),
        q: cfg.p / (cfg.p - 1.0),
        sign_variant: cfg.variants.sign_variant.label().into(),
        midpoint_variant: cfg.variants.midpoint_variant.label().into(),
        remainder_mode: match cfg.variants.remainder_mode {
            bivar_core::approx::RemainderMode::Rs => "rs".into(),
            bivar_core::approx::RemainderMode::Lebesgue => "lebesgue".into(),
        },
        rows,
        summary,
    })
}
