use std::path::Path;

use fqgraph::count::PolySystem;
use fqgraph::graph::corpus::named_families;
use fqgraph::poly::parse_poly;
use fqgraph::{Error, Multigraph, Result};

/// A graph from a file, a named family or a `Cn`/`Kn`/`Wn`/`Bn` pattern,
/// together with a display name.
pub fn graph(spec: &str) -> Result<(String, Multigraph)> {
    let path = Path::new(spec);
    if path.is_file() {
        let name = path
            .file_stem()
            .map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((name, Multigraph::parse(&std::fs::read_to_string(path)?)?));
    }
    if let Some((name, g)) = named_families().into_iter().find(|(name, _)| name == spec) {
        return Ok((name, g));
    }
    let pattern = spec
        .split_at_checked(1)
        .and_then(|(kind, n)| Some((kind, n.parse::<u32>().ok()?)));
    let g = match pattern {
        Some(("C", n)) if n >= 1 => Multigraph::cycle(n),
        Some(("K", n)) if n >= 2 => Multigraph::complete(n),
        Some(("W", n)) if n >= 3 => Multigraph::wheel(n),
        Some(("B", k)) if k >= 1 => Multigraph::banana(k),
        _ => {
            return Err(Error::InvalidInput(format!(
                "'{spec}' is neither a graph file nor a named graph"
            )))
        }
    };
    Ok((spec.to_string(), g))
}

/// A polynomial system file: JSON, or one polynomial per line with optional
/// directives `affine`, `projective` and `vars x1 x2 ...`. Systems are
/// projective over the variables that occur unless a directive says otherwise.
pub fn system(path: &Path) -> Result<PolySystem> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let system: PolySystem = serde_json::from_str(&text)?;
        return match system.ambient {
            fqgraph::count::Ambient::Projective => PolySystem::projective(system.polynomials, system.variables),
            fqgraph::count::Ambient::Affine => PolySystem::affine(system.polynomials, system.variables),
        };
    }
    let mut affine = false;
    let mut variables = None;
    let mut polynomials = Vec::new();
    for line in text.lines().map(|l| l.split('#').next().unwrap_or("").trim()) {
        match line.split_whitespace().next() {
            None => {}
            Some("affine") => affine = true,
            Some("projective") => affine = false,
            Some("vars") => {
                let vars = line
                    .split_whitespace()
                    .skip(1)
                    .map(|name| {
                        fqgraph::poly::variable_id(name)
                            .ok_or_else(|| Error::InvalidInput(format!("'{name}' is not a variable")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                variables = Some(vars);
            }
            Some(_) => polynomials.push(parse_poly(line)?),
        }
    }
    if polynomials.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} contains no polynomial",
            path.display()
        )));
    }
    let variables = variables.unwrap_or_else(|| fqgraph::count::support(&polynomials));
    if affine {
        PolySystem::affine(polynomials, variables)
    } else {
        PolySystem::projective(polynomials, variables)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Parses `i/N`.
pub fn shard(spec: &str) -> Result<fqgraph::count::Shard> {
    let bad = || Error::InvalidInput(format!("shard must look like i/N, got '{spec}'"));
    let (i, n) = spec.split_once('/').ok_or_else(bad)?;
    let index = i.trim().parse().map_err(|_| bad())?;
    let total = n.trim().parse().map_err(|_| bad())?;
    if total == 0 || index >= total {
        return Err(bad());
    }
    Ok(fqgraph::count::Shard { index, total })
}
