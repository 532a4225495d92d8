use std::fmt::Write as _;

use rbfsmooth_core::study::{DensityFit, RhoSearch, StudyReport};

fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

/// `N,h,err_max,rho,Je,slope_partial`, one row per size. Failed rows and
/// undefined slopes leave their cells empty.
pub fn study_csv(report: &StudyReport) -> String {
    let mut out = String::from("N,h,err_max,rho,Je,slope_partial\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            cell(r.h),
            cell(r.err_max),
            cell(r.rho),
            cell(r.je),
            r.slope_partial.map_or_else(String::new, cell)
        );
    }
    out
}

/// `N,h` rows of a density-law run.
pub fn density_csv(fit: &DensityFit) -> String {
    let mut out = String::from("N,h\n");
    for &(n, h) in &fit.rows {
        let _ = writeln!(out, "{n},{}", cell(h));
    }
    out
}

/// `rho,error` for every evaluation of a search, in order.
pub fn search_csv(search: &RhoSearch) -> String {
    let mut out = String::from("rho,error\n");
    for &(rho, e) in &search.trace {
        let _ = writeln!(out, "{},{}", cell(rho), cell(e));
    }
    out
}
