//! `vglab`: validate instances, enumerate V-group structures, build split
//! extensions and run the law suites.
//!
//! Exit status: 0 when everything checked holds, 1 on a validation or suite
//! failure, 2 on usage and parse errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vglab::group::GroupSpec;
use vglab::io::{
    parse_descriptor, Descriptor, HomDesc, IoError, SplitInput, VCategoryDesc, VGroupDesc,
};
use vglab::laws::{self, LawConfig, LawError};
use vglab::quantale::{check_quantale_laws, QuantaleSpec};
use vglab::vgroup::{
    enumerate_split_structures, enumerate_vgroup_structures, epi_mono_report, is_symmetric_vgroup,
    semidirect_lex, semidirect_tensor, strongly_unital_check, vgroup_validate_matrix,
    SplitExtensionStructure, VGroupError, STRUCTURE_SEARCH_BOUND,
};
use vglab::vrel::is_vcategory;
use vglab::{par, FiniteGroup};

/// `println!` that exits quietly once stdout is closed, e.g. when piped into `head`.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser, Debug)]
#[command(
    name = "vglab",
    version,
    about = "Exact checks for quantale-enriched categories and groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Cap on enumerated candidates.
    #[arg(long, global = true)]
    bound: Option<u128>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Quantale used when a descriptor does not name one, e.g. `chain:3`,
    /// `lukasiewicz_chain:3`, `pplus` or a JSON descriptor.
    #[arg(long, global = true)]
    quantale: Option<QuantaleSpec>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate quantale, V-category, V-group, hom or split-extension files.
    Check {
        files: Vec<PathBuf>,
        /// Check a V-category file as a structure on this group.
        #[arg(long)]
        group: Option<GroupSpec>,
    },
    /// List every V-group structure on a group over a finite quantale.
    Enumerate {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Build split-extension structures on X ⋊ Y from a split-extension file.
    Semidirect {
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
    },
    /// Run law suites (`all` or suite ids).
    Verify {
        #[arg(default_value = "all")]
        suites: Vec<String>,
        /// Groups carrying the tested structures (repeatable).
        #[arg(long = "group")]
        groups: Vec<GroupSpec>,
        /// Mark a suite as failed, as a negative control.
        #[arg(long, hide = true)]
        force_fail: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Tensor,
    Lex,
    All,
}

/// A failure to run at all (exit 2), as opposed to a negative verdict.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Out {
    format: Format,
    ok: bool,
}

impl Out {
    fn emit(&mut self, ok: bool, text: String, json: serde_json::Value) {
        self.ok &= ok;
        match self.format {
            Format::Text => say!("{text}"),
            Format::Json => say!("{json}"),
        }
    }
}

fn seed() -> Result<u64, UsageError> {
    match std::env::var("VGLAB_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("VGLAB_SEED must be an integer, got `{s}`"))),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let result = par::with_jobs(jobs, || run(cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    let mut out = Out {
        format: cli.format,
        ok: true,
    };
    let q = cli.quantale.as_ref();
    match &cli.command {
        Command::Check { files, group } => {
            for f in files {
                check_file(&mut out, f, q, group.as_ref())?;
            }
        }
        Command::Enumerate { group } => enumerate(&mut out, group, q, cli.bound)?,
        Command::Semidirect { files, mode } => {
            for f in files {
                semidirect(&mut out, f, q, *mode, cli.bound)?;
            }
        }
        Command::Verify {
            suites,
            groups,
            force_fail,
        } => verify(&mut out, suites, groups, q, cli.bound, force_fail.clone())?,
    }
    Ok(out.ok)
}

fn read(path: &PathBuf) -> Result<Descriptor, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_descriptor(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Splits build errors into verdicts (the instance violates a law) and usage
/// errors (the file does not describe an instance).
fn verdict<T>(r: Result<T, IoError>) -> Result<Result<T, String>, UsageError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e @ (IoError::VGroup(_) | IoError::VRel(_) | IoError::Group(_))) => {
            Ok(Err(e.to_string()))
        }
        Err(e) => Err(UsageError(e.to_string())),
    }
}

fn symmetry_word(sym: bool) -> &'static str {
    if sym {
        "symmetric"
    } else {
        "non-symmetric"
    }
}

fn check_file(
    out: &mut Out,
    path: &PathBuf,
    default: Option<&QuantaleSpec>,
    group: Option<&GroupSpec>,
) -> Result<(), UsageError> {
    let name = path.display().to_string();
    let desc = read(path)?;
    let kind = desc.kind();
    let invalid = |out: &mut Out, why: String| -> Result<(), UsageError> {
        out.emit(
            false,
            format!("{name}: invalid {kind}: {why}"),
            json!({"file": name, "kind": kind, "valid": false, "reason": why}),
        );
        Ok(())
    };
    match &desc {
        Descriptor::Quantale(spec) => {
            let q = spec.build()?;
            let samples = q
                .elements()
                .unwrap_or_else(|| q.sample(200, seed().unwrap_or(0)));
            let r = check_quantale_laws(&q, &samples);
            let text = match &r.witness {
                None => format!(
                    "{name}: valid quantale {} ({} triples checked)",
                    q.name(),
                    r.attempted
                ),
                Some(w) => format!("{name}: invalid quantale: {w}\n  violated: {}", r.claim),
            };
            out.emit(
                r.is_pass(),
                text,
                json!({"file": name, "kind": kind, "valid": r.is_pass(), "report": r}),
            );
        }
        Descriptor::VCategory(d) => {
            let rel = match verdict(d.build(default))? {
                Ok(r) => r,
                Err(why) => return invalid(out, why),
            };
            let echo = serde_json::to_value(VCategoryDesc::from_rel(&rel)).expect("serializes");
            if let Some(g) = group {
                let g = g.build()?;
                let v = vgroup_validate_matrix(&g, &rel).map_err(UsageError::from)?;
                if !v.valid {
                    return invalid(out, v.describe(&g, &rel));
                }
                let sym = v
                    .delta
                    .as_ref()
                    .is_some_and(|d| (0..g.order()).all(|x| d[x] == d[g.neg(x)]));
                out.emit(
                    true,
                    format!("{name}: valid V-group structure on {}, {}", g.name(), symmetry_word(sym)),
                    json!({"file": name, "kind": kind, "valid": true, "symmetric": sym, "descriptor": echo}),
                );
            } else {
                let c = is_vcategory(&rel);
                if !c.is_vcategory() {
                    return invalid(out, c.describe(&rel));
                }
                let sym = rel.leq(&rel.opposite()) && rel.opposite().leq(&rel);
                out.emit(
                    true,
                    format!("{name}: valid V-category, {}", symmetry_word(sym)),
                    json!({"file": name, "kind": kind, "valid": true, "symmetric": sym, "descriptor": echo}),
                );
            }
        }
        Descriptor::VGroup(d) => {
            let x = match verdict(d.build(None, default))? {
                Ok(x) => x,
                Err(why) => return invalid(out, why),
            };
            let sym = is_symmetric_vgroup(&x);
            let su = strongly_unital_check(&x).map_err(UsageError::from)?;
            let mut text = format!(
                "{name}: valid, {} ({} over {}, δ = {})",
                symmetry_word(sym),
                x.group().name(),
                x.quantale().name(),
                x.quantale().format_all(x.delta())
            );
            if let Some((y, lhs, rhs)) = &su.failure {
                let q = x.quantale();
                text.push_str(&format!(
                    "\n  not strongly unital: b(0,y) = b(y,0) ⊗ b(0,y) fails at y = {}: {} vs {}",
                    x.group().label(*y),
                    q.format(lhs),
                    q.format(rhs)
                ));
            }
            out.emit(
                true,
                text,
                json!({
                    "file": name, "kind": kind, "valid": true, "symmetric": sym,
                    "strongly_unital_condition": su.necessary_condition,
                    "descriptor": VGroupDesc::from_vgroup(&x),
                }),
            );
        }
        Descriptor::Hom(d) => {
            let f = match verdict(d.build(default))? {
                Ok(f) => f,
                Err(why) => return invalid(out, why),
            };
            let r = epi_mono_report(&f);
            out.emit(
                true,
                format!(
                    "{name}: valid V-homomorphism {} → {}; mono {}, epi {}, regular mono {}, regular epi {}, proper {}, open {}",
                    f.source.group().name(),
                    f.target.group().name(),
                    r.mono,
                    r.epi,
                    r.regular_mono,
                    r.regular_epi,
                    r.proper,
                    r.open
                ),
                json!({
                    "file": name, "kind": kind, "valid": true,
                    "mono": r.mono, "epi": r.epi, "regular_mono": r.regular_mono,
                    "regular_epi": r.regular_epi, "proper": r.proper, "open": r.open,
                    "descriptor": HomDesc::from_hom(&f),
                }),
            );
        }
        Descriptor::Split(d) => {
            let s = match verdict(d.build(default))? {
                Ok(s) => s,
                Err(why) => return invalid(out, why),
            };
            for mode in [Mode::Tensor, Mode::Lex] {
                report_split(out, &name, &s, mode)?;
            }
        }
    }
    Ok(())
}

fn enumerate(
    out: &mut Out,
    group: &GroupSpec,
    q: Option<&QuantaleSpec>,
    bound: Option<u128>,
) -> Result<(), UsageError> {
    let q = q
        .ok_or_else(|| UsageError("enumerate needs --quantale".into()))?
        .build()?;
    if !q.is_finite() {
        return Err(UsageError(format!(
            "{} is infinite; enumeration needs a finite quantale",
            q.name()
        )));
    }
    let g = Arc::new(group.build()?);
    let all = enumerate_vgroup_structures(&g, &q, bound.unwrap_or(STRUCTURE_SEARCH_BOUND))?;
    let sym: Vec<bool> = all.iter().map(is_symmetric_vgroup).collect();
    let n_sym = sym.iter().filter(|s| **s).count();
    match out.format {
        Format::Text => {
            say!(
                "{} over {}: {} profiles ({} symmetric, {} asymmetric)",
                g.name(),
                q.name(),
                all.len(),
                n_sym,
                all.len() - n_sym
            );
            say!("  labels {:?}", g.labels());
            for (x, s) in all.iter().zip(&sym) {
                say!("  δ = {}  {}", q.format_all(x.delta()), symmetry_word(*s));
            }
        }
        Format::Json => say!(
            "{}",
            json!({
                "group": vglab::io::group_spec(&g), "quantale": q.spec(),
                "count": all.len(), "symmetric": n_sym, "asymmetric": all.len() - n_sym,
                "profiles": all.iter().map(VGroupDesc::from_vgroup).collect::<Vec<_>>(),
            })
        ),
    }
    Ok(())
}

fn structure_json(s: &SplitExtensionStructure) -> serde_json::Value {
    let q = s.structure.quantale();
    json!({
        "delta": q.format_all(&s.delta()),
        "valid": s.direct_valid,
        "is_tensor": s.is_tensor,
        "is_lex": s.is_lex,
        "witness": s.witness,
        "vgroup": s.vgroup().as_ref().map(VGroupDesc::from_vgroup),
    })
}

fn describe_structure(s: &SplitExtensionStructure) -> String {
    let entries: Vec<String> = (0..s.structure.cols())
        .map(|i| format!("{} ↦ {}", s.format_pair(i), s.structure.format_entry(0, i)))
        .collect();
    let mut tags = Vec::new();
    if s.is_tensor {
        tags.push("= a⊗b");
    }
    if s.is_lex {
        tags.push("= lex");
    }
    let tags = if tags.is_empty() {
        String::new()
    } else {
        format!("  [{}]", tags.join(", "))
    };
    format!("c((0,0), ·): {}{tags}", entries.join(", "))
}

fn report_split(out: &mut Out, name: &str, s: &SplitInput, mode: Mode) -> Result<(), UsageError> {
    let (label, built) = match mode {
        Mode::Tensor => (
            "a ⊗ b",
            semidirect_tensor(&s.action, &s.kernel, &s.quotient),
        ),
        Mode::Lex => ("lex", semidirect_lex(&s.action, &s.kernel, &s.quotient)),
        Mode::All => unreachable!("handled by the caller"),
    };
    let built = match built {
        Ok(b) => b,
        Err(e @ VGroupError::ActionNotFunctorial { .. }) => {
            out.emit(
                false,
                format!("{name}: invalid action: {e}"),
                json!({"file": name, "structure": label, "valid": false, "reason": e.to_string()}),
            );
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let law = match mode {
        Mode::Tensor => {
            "a ⊗ b is a split extension iff (x, y) ↦ (φ_y(x), y) is a V-functor of a ⊗ b"
        }
        _ => "lex is a split extension iff b(y,0) ⊗ b(0,y) ≤ a(x,0) for all x and all y ≠ 0",
    };
    let text = if built.valid {
        format!(
            "{name}: {label} is a split extension structure\n  {}",
            describe_structure(&built)
        )
    } else {
        format!(
            "{name}: {label} is not a split extension structure: {}\n  violated: {law}",
            built.witness.clone().unwrap_or_default()
        )
    };
    let mut j = structure_json(&built);
    j["file"] = json!(name);
    j["structure"] = json!(label);
    out.emit(built.valid, text, j);
    Ok(())
}

fn semidirect(
    out: &mut Out,
    path: &PathBuf,
    default: Option<&QuantaleSpec>,
    mode: Mode,
    bound: Option<u128>,
) -> Result<(), UsageError> {
    let name = path.display().to_string();
    let Descriptor::Split(d) = read(path)? else {
        return Err(UsageError(format!(
            "{name}: expected a split-extension descriptor"
        )));
    };
    let s = match verdict(d.build(default))? {
        Ok(s) => s,
        Err(why) => {
            out.emit(
                false,
                format!("{name}: invalid input: {why}"),
                json!({"file": name, "valid": false, "reason": why}),
            );
            return Ok(());
        }
    };
    if mode != Mode::All {
        return report_split(out, &name, &s, mode);
    }
    let found = match enumerate_split_structures(
        &s.action,
        &s.kernel,
        &s.quotient,
        bound.unwrap_or(100_000),
    ) {
        Ok(f) => f,
        Err(e @ VGroupError::ActionNotFunctorial { .. }) => {
            out.emit(
                false,
                format!("{name}: invalid action: {e}"),
                json!({"file": name, "valid": false, "reason": e.to_string()}),
            );
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let within = found
        .iter()
        .all(|c| c.tensor_bound().leq(&c.structure) && c.structure.leq(&c.lex_bound()));
    match out.format {
        Format::Text => {
            say!(
                "{name}: {} split extension structure{} on {}; all within [a⊗b, lex]: {within}",
                found.len(),
                if found.len() == 1 { "" } else { "s" },
                found.first().map_or_else(
                    || "X ⋊ Y".to_string(),
                    |c| c.semidirect.group.name().to_string()
                )
            );
            for c in &found {
                say!("  {}", describe_structure(c));
            }
        }
        Format::Json => say!(
            "{}",
            json!({
                "file": name,
                "input": vglab::io::SplitDesc::from_parts(&s.action, &s.kernel, &s.quotient),
                "count": found.len(), "within_bounds": within,
                "structures": found.iter().map(structure_json).collect::<Vec<_>>(),
            })
        ),
    }
    out.ok &= within;
    Ok(())
}

fn verify(
    out: &mut Out,
    suites: &[String],
    groups: &[GroupSpec],
    q: Option<&QuantaleSpec>,
    bound: Option<u128>,
    force_fail: Option<String>,
) -> Result<(), UsageError> {
    let mut cfg = LawConfig {
        seed: seed()?,
        force_fail,
        ..LawConfig::default()
    };
    if let Some(q) = q {
        cfg.quantale = q.clone();
    }
    if let Some(b) = bound {
        cfg.max_candidates = b;
    }
    if !groups.is_empty() {
        cfg.groups = groups
            .iter()
            .map(|g| g.build().map(Arc::new))
            .collect::<Result<Vec<Arc<FiniteGroup>>, _>>()?;
    }
    let ids: Option<Vec<String>> = (!suites.iter().any(|s| s == "all")).then(|| suites.to_vec());
    let reports = match laws::run_all(&cfg, ids.as_deref()) {
        Ok(r) => r,
        Err(e @ LawError::UnknownSuite { .. }) => return Err(e.into()),
        Err(e) => return Err(UsageError(format!("suite could not run: {e}"))),
    };
    for r in &reports {
        let status = if r.is_fail() {
            "FAIL"
        } else if r.is_pass() {
            "pass"
        } else {
            "skip"
        };
        let mut text = format!(
            "{status} {:<26} {}/{} instances, {} ms",
            r.suite, r.passed, r.attempted, r.duration_ms
        );
        for d in &r.details {
            text.push_str(&format!("\n     {d}"));
        }
        if let Some(w) = &r.witness {
            text.push_str(&format!("\n     violated: {}\n     witness: {w}", r.claim));
        }
        out.emit(
            !r.is_fail(),
            text,
            serde_json::from_str(&r.to_json_line()).expect("report is JSON"),
        );
    }
    Ok(())
}
