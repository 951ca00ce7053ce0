//! Generated plotting script; the Rust side has no graphics dependency.

const TEMPLATE: &str = include_str!("templates/plot.py");

pub fn script(label: &str, figure: Option<&str>) -> String {
    let what = figure.map_or_else(|| format!("run `{label}`"), |f| format!("figure {f} (run `{label}`)"));
    format!("#!/usr/bin/env python3\n# Generated by qshhg for {what}. Usage: python3 plot.py\n{TEMPLATE}")
}
