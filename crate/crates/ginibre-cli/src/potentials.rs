//! Potential selection: built-in names with parameters, or a custom
//! potential assembled from config-file expressions.

use crate::expr;
use ginibre::planar::{builtin_potential, BuiltinPotential, RadialPotential};
use std::collections::HashMap;
use std::sync::Arc;

/// Parse `name` or `name(p1,p2,...)` into a potential. `custom` pulls the
/// expressions `custom_g`, `custom_g1`, `custom_g2` (and optionally
/// `custom_cutoff`) from the config map.
pub fn parse_potential(spec: &str, config: &HashMap<String, String>) -> Result<RadialPotential, String> {
    let spec = spec.trim();
    let (name, args) = match spec.find('(') {
        Some(open) => {
            if !spec.ends_with(')') {
                return Err(format!("malformed potential '{spec}': missing ')'"));
            }
            let inner = &spec[open + 1..spec.len() - 1];
            let args: Vec<f64> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad parameter '{s}': {e}")))
                    .collect::<Result<_, _>>()?
            };
            (&spec[..open], args)
        }
        None => (spec, Vec::new()),
    };
    let expect = |n: usize, args: &[f64]| -> Result<(), String> {
        if args.len() != n {
            Err(format!("potential '{name}' takes {n} parameter(s), got {}", args.len()))
        } else {
            Ok(())
        }
    };
    let built = match name {
        "ginse_gaussian" => {
            expect(0, &args)?;
            builtin_potential(BuiltinPotential::GinseGaussian)
        }
        "ginue_gaussian" => {
            expect(0, &args)?;
            builtin_potential(BuiltinPotential::GinueGaussian)
        }
        "mittag_leffler" => {
            expect(3, &args)?;
            builtin_potential(BuiltinPotential::MittagLeffler {
                alpha: args[0],
                b: args[1],
                c: args[2],
            })
        }
        "truncated_unitary" => {
            expect(1, &args)?;
            builtin_potential(BuiltinPotential::TruncatedUnitary { c: args[0] })
        }
        "custom" => {
            expect(0, &args)?;
            return custom_from_config(config);
        }
        other => return Err(format!("unknown potential '{other}'")),
    };
    built.map_err(|e| e.to_string())
}

fn custom_from_config(config: &HashMap<String, String>) -> Result<RadialPotential, String> {
    let get = |key: &str| {
        config
            .get(key)
            .ok_or_else(|| format!("custom potential needs '{key}=<expression in r>' in the config file"))
    };
    let g = Arc::new(expr::parse(get("custom_g")?)?);
    let g1 = Arc::new(expr::parse(get("custom_g1")?)?);
    let g2 = Arc::new(expr::parse(get("custom_g2")?)?);
    let label = config
        .get("custom_label")
        .cloned()
        .unwrap_or_else(|| "custom".to_string());
    let (ga, gb, gc) = (g.clone(), g1.clone(), g2.clone());
    let mut pot = RadialPotential::from_fns(
        label,
        move |r| ga.eval(r),
        move |r| gb.eval(r),
        move |r| gc.eval(r),
    );
    if let Some(cut) = config.get("custom_cutoff") {
        pot.support_cutoff = cut
            .parse::<f64>()
            .map_err(|e| format!("bad custom_cutoff: {e}"))?;
    }
    Ok(pot)
}
