use std::fmt::Write as _;
use std::path::PathBuf;

use pda_workbench::bound::{
    bipartite_ordering, brute_force_bound, eval_ordering, exact_bound, greedy_bound,
    grouping_ordering, partition_ordering, search_min_max, ExactLimits, SearchLimits, SearchMode,
};
use pda_workbench::closed_forms::{ratio_report, RATIO_CSV_HEADER};
use pda_workbench::construct::{
    binomial, bipartite_pda, grouping_pda, mn_pda, partition_pda, BipartiteSpec, PartitionSpec,
};
use pda_workbench::filler::{fill_exact, fill_greedy, FillLimits, VertexOrder};
use pda_workbench::pda::text::{parse_any_placement, parse_pda, write_pda, write_placement};
use pda_workbench::sim::{self, DemandSampler, DemandVector, FileLibrary};
use pda_workbench::{report, self_check, BoundCertificate, PdaGrid, StarPattern, UserOrdering};
use serde_json::Value;

use crate::{
    read_input, write_file, Command, Failure, Family, FillMethod, FillOrder, Format, RunConfig,
    SearchModeArg,
};

type Outcome = Result<(), Failure>;

fn json_line(out: &mut String, v: &Value) {
    out.push_str(&serde_json::to_string_pretty(v).expect("JSON values serialise"));
    out.push('\n');
}

fn need(name: &str, v: Option<usize>) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{name}")))
}

fn reject_format(format: Format, allowed: &[Format]) -> Outcome {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--format {format:?} is not supported here").to_lowercase()))
    }
}

pub fn run(cfg: &RunConfig, command: Command, out: &mut String) -> Outcome {
    match command {
        Command::Construct {
            family,
            q,
            m,
            a,
            b,
            h,
            k,
            t,
            output,
        } => construct(cfg, family, [q, m, a, b, h, k, t], output, out),
        Command::Verify { input } => verify(cfg, input, out),
        Command::Bound {
            input,
            method,
            order,
            max_users,
        } => bound(cfg, input, &method, order.as_deref(), max_users, out),
        Command::Search {
            k,
            f,
            z,
            mode,
            budget,
            output,
        } => search(cfg, [k, f, z], mode, budget, output, out),
        Command::Simulate {
            input,
            files,
            demand,
            sweep,
            sample,
            packet_len,
            transcript,
        } => simulate(
            cfg,
            input,
            files,
            Demands {
                fixed: demand,
                sweep,
                sample,
            },
            packet_len,
            transcript,
            out,
        ),
        Command::Fill {
            input,
            method,
            order,
            budget,
            output,
        } => fill(cfg, input, method, order, budget, output, out),
        Command::Table {
            family,
            q_list,
            m_min,
            m_max,
            exact_cap,
        } => table(cfg, &family, &q_list, m_min, m_max, exact_cap, out),
        Command::Formulas => formulas(cfg, out),
    }
}

fn construct(
    cfg: &RunConfig,
    family: Family,
    [q, m, a, b, h, k, t]: [Option<usize>; 7],
    output: Option<PathBuf>,
    out: &mut String,
) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let grid = match family {
        Family::Partition => partition_pda(PartitionSpec::new(need("q", q)?, need("m", m)?)?)?,
        Family::Bipartite => {
            bipartite_pda(BipartiteSpec::new(need("m", m)?, need("a", a)?, need("b", b)?, 1)?)?
        }
        Family::Mn => mn_pda(need("k", k)?, need("t", t)?)?,
        Family::Grouping => grouping_pda(BipartiteSpec::new(
            need("m", m)?,
            need("a", a)?,
            need("b", b)?,
            need("h", h)?,
        )?)?,
    };
    let params = grid.params()?;
    let text = write_pda(&grid);
    match format {
        Format::Json => json_line(
            out,
            &serde_json::json!({
                "schema": report::SCHEMA,
                "params": report::params(&params),
                "pda": text,
            }),
        ),
        _ => match &output {
            Some(path) => {
                write_file(path, &text)?;
                let _ = writeln!(out, "wrote {} {}", path.display(), params);
            }
            None => {
                out.push_str(&text);
                eprintln!("params (K,F,Z,S) = {params}");
            }
        },
    }
    if let (Format::Json, Some(path)) = (format, &output) {
        write_file(path, &text)?;
    }
    Ok(())
}

fn load_pda(input: Option<PathBuf>) -> Result<PdaGrid, Failure> {
    Ok(parse_pda(&read_input(input.as_deref())?)?)
}

fn verify(cfg: &RunConfig, input: Option<PathBuf>, out: &mut String) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let grid = load_pda(input)?;
    let result = grid.verify();
    let params = grid.params().ok();
    if format == Format::Json {
        json_line(out, &report::verification(&result, params.as_ref()));
    } else if result.valid() {
        let p = params.expect("a valid PDA has parameters");
        let _ = writeln!(out, "valid PDA (K,F,Z,S) = {p}");
    } else {
        for v in result.violations() {
            let _ = writeln!(out, "{v}");
        }
        let _ = writeln!(out, "invalid: {} violation(s)", result.violations().len());
    }
    if result.valid() {
        Ok(())
    } else {
        Err(Failure::Check("PDA verification failed".into()))
    }
}

/// Finds the family parameters whose generated placement equals `pattern`.
fn family_ordering(family: &str, pattern: &StarPattern) -> Result<UserOrdering, Failure> {
    let (k, f) = (pattern.users(), pattern.rows());
    let mismatch = || Failure::Check(format!("placement is not a {family} placement"));
    match family {
        "partition" => {
            for q in 2..=k {
                if !k.is_multiple_of(q) || k / q < 2 {
                    continue;
                }
                let m = k / q - 1;
                let Ok(spec) = PartitionSpec::new(q, m) else { continue };
                if spec.rows().ok() != Some(f) {
                    continue;
                }
                if partition_pda(spec)?.star_pattern() == *pattern {
                    return Ok(partition_ordering(q, m)?);
                }
            }
            Err(mismatch())
        }
        "bipartite" | "grouping" => {
            for m in 3..=63usize {
                for a in 1..m {
                    let Some(ca) = binomial(m as u64, a as u64) else { continue };
                    if ca == 0 || !(k as u128).is_multiple_of(ca) {
                        continue;
                    }
                    let h = (k as u128 / ca) as usize;
                    if family == "bipartite" && h != 1 {
                        continue;
                    }
                    for b in 1..m - a {
                        if binomial(m as u64, b as u64) != Some(f as u128) {
                            continue;
                        }
                        let spec = BipartiteSpec::new(m, a, b, h)?;
                        if grouping_pda(spec)?.star_pattern() != *pattern {
                            continue;
                        }
                        return Ok(if family == "bipartite" {
                            bipartite_ordering(m, a, b)?
                        } else {
                            grouping_ordering(m, a, b, h)?
                        });
                    }
                }
                if m > k {
                    break;
                }
            }
            Err(mismatch())
        }
        other => Err(Failure::Usage(format!("unknown family `{other}`"))),
    }
}

fn write_certificate(
    out: &mut String,
    format: Format,
    cert: &BoundCertificate,
    pda_symbols: Option<usize>,
) {
    let meets = pda_symbols.map(|s| cert.value == s as u64);
    if format == Format::Json {
        let mut v = report::certificate(cert);
        v["pda_symbols"] = pda_symbols.into();
        v["optimality_certified"] = meets.into();
        json_line(out, &v);
        return;
    }
    let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    let witness: Vec<u64> = cert.witness.one_based().into_iter().map(|u| u as u64).collect();
    let _ = writeln!(out, "value: {}", cert.value);
    let _ = writeln!(out, "rate_bound: {}", cert.rate_bound());
    let _ = writeln!(out, "witness: {}", join(&witness));
    let _ = writeln!(out, "step_sizes: {}", join(&cert.step_sizes));
    let _ = writeln!(out, "method: {}", cert.method);
    let _ = writeln!(out, "exact: {}", cert.exact);
    if let (Some(s), Some(true)) = (pda_symbols, meets) {
        let _ = writeln!(out, "optimality certified: bound meets S = {s}");
    }
}

fn bound(
    cfg: &RunConfig,
    input: Option<PathBuf>,
    method: &str,
    order: Option<&str>,
    max_users: usize,
    out: &mut String,
) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let text = read_input(input.as_deref())?;
    let pattern = parse_any_placement(&text)?;
    let pda_symbols = text
        .trim_start()
        .starts_with("PDA")
        .then(|| parse_pda(&text).ok())
        .flatten()
        .filter(|g| g.verify().valid())
        .map(|g| g.distinct_symbols());
    let limits = ExactLimits {
        max_users,
        node_budget: cfg.node_budget,
    };
    let cert = if let Some(list) = order {
        let users = list
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::Usage(format!("bad ordering `{list}`")))?;
        eval_ordering(&pattern, &UserOrdering::from_one_based(&users, pattern.users())?)?
    } else {
        match method {
            "exact" => exact_bound(&pattern, limits),
            "greedy" => greedy_bound(&pattern),
            "brute" => brute_force_bound(&pattern)?,
            m if m.starts_with("ordered:") => {
                let ord = family_ordering(&m["ordered:".len()..], &pattern)?;
                eval_ordering(&pattern, &ord)?
            }
            other => return Err(Failure::Usage(format!("unknown method `{other}`"))),
        }
    };
    write_certificate(out, format, &cert, pda_symbols);
    if method == "exact" && order.is_none() && !cert.exact {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn search(
    cfg: &RunConfig,
    [k, f, z]: [usize; 3],
    mode: SearchModeArg,
    budget: u64,
    output: Option<PathBuf>,
    out: &mut String,
) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let mode = match mode {
        SearchModeArg::Canonical => SearchMode::Canonical,
        SearchModeArg::Exhaustive => SearchMode::Exhaustive,
    };
    let limits = SearchLimits {
        placement_budget: budget,
        exact: ExactLimits {
            node_budget: cfg.node_budget,
            ..Default::default()
        },
    };
    let r = search_min_max(k, f, z, mode, limits)?;
    if let Some(path) = &output {
        write_file(path, &write_placement(&r.best_pattern))?;
    }
    if format == Format::Json {
        json_line(out, &report::search(&r));
    } else {
        let _ = writeln!(out, "(K,F,Z) = ({k},{f},{z})");
        let _ = writeln!(out, "best_value: {}", r.best_value);
        let _ = writeln!(out, "rate_bound: {}", r.rate_bound());
        let _ = writeln!(out, "placements: {}", r.nodes_explored);
        let _ = writeln!(out, "dedup_hits: {}", r.dedup_hits);
        let _ = writeln!(out, "exhaustive: {}", r.exhaustive);
        out.push_str("witness:\n");
        out.push_str(&write_placement(&r.best_pattern));
    }
    if r.exhaustive {
        Ok(())
    } else {
        Err(Failure::Budget)
    }
}

struct Demands {
    fixed: Option<String>,
    sweep: bool,
    sample: Option<usize>,
}

fn simulate(
    cfg: &RunConfig,
    input: Option<PathBuf>,
    files: Option<usize>,
    demands: Demands,
    packet_len: usize,
    transcript_path: Option<PathBuf>,
    out: &mut String,
) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let grid = load_pda(input)?;
    let check = grid.verify();
    if !check.valid() {
        return Err(Failure::Check(format!(
            "not a valid PDA: {}",
            check.violations()[0]
        )));
    }
    let k = grid.cols();
    let n = files.unwrap_or(k);
    let lib = FileLibrary::generate(n, grid.rows(), packet_len, cfg.seed)?;
    let single = match (&demands.fixed, demands.sweep, demands.sample) {
        (Some(d), _, _) => Some(DemandVector::parse(d, n)?),
        (None, false, None) => {
            // Distinct files when the library allows it, else wrap around.
            Some(DemandVector::new((0..k).map(|u| u % n).collect(), n)?)
        }
        _ => None,
    };
    let sampler = match (&single, demands.sweep, demands.sample) {
        (Some(d), _, _) => DemandSampler::Fixed(vec![d.clone()]),
        (None, true, _) => DemandSampler::All,
        (None, false, Some(count)) => DemandSampler::Random {
            count,
            seed: cfg.seed,
        },
        (None, false, None) => unreachable!("single demand chosen above"),
    };
    let measured = sim::measure_rate(&grid, &lib, &sampler)?;
    let transcript = match &single {
        Some(d) => Some(sim::deliver(&grid, &lib, d)?),
        None => None,
    };
    if let (Some(path), Some(t)) = (&transcript_path, &transcript) {
        let body = serde_json::to_string_pretty(&report::transcript(t)).expect("serialisable");
        write_file(path, &(body + "\n"))?;
    } else if transcript_path.is_some() {
        return Err(Failure::Usage("--transcript needs a single demand".into()));
    }
    if format == Format::Json {
        let mut v = report::rate(&measured);
        if let Some(t) = &transcript {
            v["transcript"] = report::transcript(t);
        }
        json_line(out, &v);
    } else {
        let _ = writeln!(out, "params (K,F,Z,S) = {}", grid.params()?);
        if let Some(t) = &transcript {
            let d = t.demand.as_slice();
            for s in &t.signals {
                let terms: Vec<String> = s
                    .terms
                    .iter()
                    .map(|x| format!("W[{},{}]", d[x.user] + 1, x.row + 1))
                    .collect();
                let _ = writeln!(out, "signal {}: {}", s.id, terms.join(" ^ "));
            }
        }
        let _ = writeln!(out, "demands checked: {}", measured.demands_checked);
        let _ = writeln!(out, "signals: {}", measured.max_signals);
        let _ = writeln!(out, "rate: {}", measured.rate);
        let _ = writeln!(
            out,
            "decoded: {}",
            if measured.all_decoded { "all users, byte-exact" } else { "MISMATCH" }
        );
    }
    if measured.all_decoded {
        Ok(())
    } else {
        Err(Failure::Check("decoded files differ from the library".into()))
    }
}

fn fill(
    cfg: &RunConfig,
    input: Option<PathBuf>,
    method: FillMethod,
    order: FillOrder,
    budget: u64,
    output: Option<PathBuf>,
    out: &mut String,
) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let pattern = parse_any_placement(&read_input(input.as_deref())?)?;
    let (grid, optimal, json) = match method {
        FillMethod::Greedy => {
            let order = match order {
                FillOrder::RowMajor => VertexOrder::RowMajor,
                FillOrder::DegreeDesc => VertexOrder::DegreeDesc,
            };
            let g = fill_greedy(&pattern, order)?;
            let v = serde_json::json!({
                "schema": report::SCHEMA,
                "symbols": g.distinct_symbols(),
                "pda": write_pda(&g),
            });
            (g, true, v)
        }
        FillMethod::Exact => {
            let limits = FillLimits {
                node_budget: budget,
                exact: ExactLimits {
                    node_budget: cfg.node_budget,
                    ..Default::default()
                },
            };
            let o = fill_exact(&pattern, limits)?;
            let v = report::fill(&o);
            (o.grid, o.optimal, v)
        }
    };
    let text = write_pda(&grid);
    if let Some(path) = &output {
        write_file(path, &text)?;
    }
    if format == Format::Json {
        json_line(out, &json);
    } else if output.is_none() {
        out.push_str(&text);
    }
    eprintln!("filled with S = {}", grid.distinct_symbols());
    if optimal {
        Ok(())
    } else {
        Err(Failure::Budget)
    }
}

fn table(
    cfg: &RunConfig,
    family: &str,
    q_list: &[usize],
    m_min: usize,
    m_max: usize,
    exact_cap: usize,
    out: &mut String,
) -> Outcome {
    if family != "partition" {
        return Err(Failure::Usage(format!("table supports only the partition family, got `{family}`")));
    }
    let format = cfg.format.unwrap_or(Format::Csv);
    reject_format(format, &[Format::Csv, Format::Json])?;
    let limits = ExactLimits {
        max_users: exact_cap,
        node_budget: cfg.node_budget,
    };
    let mut rows = Vec::new();
    for &q in q_list {
        for m in m_min..=m_max {
            rows.push(ratio_report(q, m, Some(limits))?);
        }
    }
    if format == Format::Json {
        json_line(out, &report::ratio_rows(&rows));
    } else {
        let _ = writeln!(out, "{RATIO_CSV_HEADER}");
        for r in &rows {
            let _ = writeln!(out, "{}", r.csv_row());
        }
    }
    Ok(())
}

fn formulas(cfg: &RunConfig, out: &mut String) -> Outcome {
    let format = cfg.format.unwrap_or(Format::Text);
    reject_format(format, &[Format::Text, Format::Json])?;
    let results = self_check::run_all();
    if format == Format::Json {
        let checks: Vec<Value> = results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "cases": r.cases,
                    "passed": r.passed(),
                    "failures": r.failures,
                })
            })
            .collect();
        json_line(out, &serde_json::json!({ "schema": report::SCHEMA, "checks": checks }));
    } else {
        for r in &results {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {} ({} cases)", r.name, r.cases);
            for f in r.failures.iter().take(5) {
                let _ = writeln!(out, "    {f}");
            }
        }
    }
    if results.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::Check("closed-form check failed".into()))
    }
}
