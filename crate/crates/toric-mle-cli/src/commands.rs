use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use num_traits::One;

use toric_mle::families::{
    binomial_scroll_scaling, hierarchical_model, hypersurface_sigma_test, scroll_mldegree,
    scroll_model, segre_model, ver2_sigma_test, veronese_exponents, veronese_model,
    veronese_rank1_scaling, ScrollSpec,
};
use toric_mle::homotopy::{ScalingHomotopy, TrackerConfig};
use toric_mle::io::{self, ModelFile, ScalingEntry};
use toric_mle::ips::{ips_solve, IpsConfig};
use toric_mle::model::{birch_residual, ToricModel};

use crate::{BenchArgs, Family, GenArgs, MldegreeArgs, MleArgs, SigmaArgs, SigmaMode, Solver};

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .with_context(|| format!("bad {what} entry `{part}`"))
        })
        .collect()
}

fn parse_inclusive_range(text: &str) -> Result<Vec<usize>> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("expected a range like 4..13, got `{text}`"))?;
    let lo: usize = lo.trim().parse().context("range start")?;
    let hi: usize = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .context("range end")?;
    if hi < lo {
        bail!("empty range {lo}..{hi}");
    }
    Ok((lo..=hi).collect())
}

/// `ones`, `binomial`, or a path to a JSON array of scaling entries.
enum ScalingChoice {
    Ones,
    Binomial,
    File(Vec<ScalingEntry>),
}

impl ScalingChoice {
    fn parse(text: &str) -> Result<Self> {
        match text {
            "ones" => Ok(Self::Ones),
            "binomial" => Ok(Self::Binomial),
            path => {
                let raw = std::fs::read_to_string(path)
                    .with_context(|| format!("reading scaling file {path}"))?;
                let entries: Vec<ScalingEntry> =
                    serde_json::from_str(&raw).context("scaling file must be a JSON array")?;
                Ok(Self::File(entries))
            }
        }
    }

    fn exact(&self, n: usize, binomial: Option<Vec<BigRational>>) -> Result<Vec<BigRational>> {
        match self {
            Self::Ones => Ok(vec![BigRational::one(); n]),
            Self::Binomial => {
                binomial.ok_or_else(|| anyhow!("this family has no binomial scaling"))
            }
            Self::File(entries) => {
                if entries.len() != n {
                    bail!("scaling has {} entries, model needs {n}", entries.len());
                }
                entries
                    .iter()
                    .map(|e| {
                        e.to_exact().ok_or_else(|| {
                            anyhow!("exact computation needs integer or `p/q` scaling entries")
                        })
                    })
                    .collect()
            }
        }
    }
}

fn exact_model(a: Vec<Vec<i64>>, c: Vec<BigRational>) -> Result<ToricModel> {
    Ok(ToricModel::with_exact_scaling(a, c)?)
}

fn strip_ones_row(model: &ToricModel) -> Vec<Vec<i64>> {
    model.a_bar()[..model.d() - 1].to_vec()
}

pub fn model_gen(args: GenArgs) -> Result<()> {
    let scaling = ScalingChoice::parse(&args.scaling)?;
    let model = match args.family {
        Family::Scroll => {
            let n_list = parse_usize_list(
                args.n
                    .as_deref()
                    .ok_or_else(|| anyhow!("--family scroll needs --n"))?,
                "--n",
            )?;
            let spec = ScrollSpec::new(n_list)?;
            let shape = scroll_model(&spec, vec![1.0; spec.states()])?;
            let c = scaling.exact(spec.states(), Some(binomial_scroll_scaling(&spec)))?;
            exact_model(strip_ones_row(&shape), c)?
        }
        Family::Veronese => {
            let m = args
                .dim
                .ok_or_else(|| anyhow!("--family veronese needs --dim"))?;
            let k = args
                .deg
                .ok_or_else(|| anyhow!("--family veronese needs --deg"))?;
            let n = veronese_exponents(m, k).len();
            let shape = veronese_model(m, k, vec![1.0; n])?;
            let multinomial = veronese_rank1_scaling(m, k, &vec![BigRational::one(); m + 1]).ok();
            let c = scaling.exact(n, multinomial)?;
            exact_model(strip_ones_row(&shape), c)?
        }
        Family::Segre => {
            let shape_text = args
                .shape
                .as_deref()
                .ok_or_else(|| anyhow!("--family segre needs --shape, e.g. 3x3"))?;
            let (m, n) = shape_text
                .split_once(['x', 'X'])
                .ok_or_else(|| anyhow!("bad --shape `{shape_text}`"))?;
            let m: usize = m.trim().parse().context("--shape rows")?;
            let n: usize = n.trim().parse().context("--shape cols")?;
            let shape = segre_model(m, n, vec![1.0; m * n])?;
            let c = scaling.exact(m * n, None)?;
            exact_model(strip_ones_row(&shape), c)?
        }
        Family::Hierarchical => {
            let facets_text = args
                .facets
                .as_deref()
                .ok_or_else(|| anyhow!("--family hierarchical needs --facets"))?;
            let levels_text = args
                .levels
                .as_deref()
                .ok_or_else(|| anyhow!("--family hierarchical needs --levels"))?;
            let (facets, variables) = parse_facets(facets_text)?;
            let levels = parse_usize_list(levels_text, "--levels")?;
            if levels.len() != variables.len() {
                bail!(
                    "--levels lists {} variables but --facets mentions {} ({})",
                    levels.len(),
                    variables.len(),
                    variables.iter().collect::<String>()
                );
            }
            let shape = hierarchical_model(&facets, &levels)?;
            let c = scaling.exact(shape.n(), None)?;
            exact_model(strip_ones_row(&shape), c)?
        }
    };
    let model = match args.name {
        Some(name) => model.named(name),
        None => model,
    };
    let file = ModelFile::from_model(&model);
    let json = serde_json::to_string_pretty(&file)?;
    emit(args.out.as_deref(), &json)
}

/// Facet words like `SB,BH,HL,LS`; variables are indexed by first
/// appearance, which also fixes the `--levels` order.
fn parse_facets(text: &str) -> Result<(Vec<Vec<usize>>, Vec<char>)> {
    let mut variables: Vec<char> = Vec::new();
    let mut facets = Vec::new();
    for word in text.split(',') {
        let word = word.trim();
        if word.is_empty() {
            bail!("empty facet in `{text}`");
        }
        let mut facet = Vec::new();
        for ch in word.chars() {
            let idx = match variables.iter().position(|&v| v == ch) {
                Some(i) => i,
                None => {
                    variables.push(ch);
                    variables.len() - 1
                }
            };
            if facet.contains(&idx) {
                bail!("facet `{word}` repeats variable `{ch}`");
            }
            facet.push(idx);
        }
        facets.push(facet);
    }
    Ok((facets, variables))
}

pub fn mle(args: MleArgs) -> Result<()> {
    let model = io::read_model(&args.model)?;
    let data = io::read_data(&args.data)?;
    let cfg = IpsConfig {
        epsilon: args.eps,
        max_iterations: args.max_iter,
    };
    let (label, result, trace) = match args.solver {
        Solver::Ips => ("ips", ips_solve(&model, &data, &cfg)?, None),
        Solver::Homotopy => {
            let easy_path = args.easy_scaling.as_ref().expect("enforced by clap");
            let easy = read_easy_model(easy_path, &model)?;
            let start = ips_solve(&easy, &data, &cfg)?
                .theta_hat
                .ok_or_else(|| anyhow!("could not recover a start point at the easy scaling"))?;
            let homotopy = ScalingHomotopy::new(&easy, &model, &data)?;
            let (result, trace) = homotopy.track(&start, &TrackerConfig::default())?;
            ("homotopy", result, Some(trace))
        }
    };
    // Re-verify before printing; a violation is a bug or an unconverged run.
    let check = birch_residual(&model, &data, &result.p_hat)?;
    if check > args.eps {
        bail!(
            "result fails verification: birch residual {check} > {}",
            args.eps
        );
    }
    if let (Some(trace), Some(path)) = (&trace, &args.trace) {
        let mut out =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        io::write_trace(trace, model.d(), &mut out)?;
    }
    let output = io::MleOutput::new(label, &result);
    let json = if args.pretty {
        serde_json::to_string_pretty(&output)?
    } else {
        serde_json::to_string(&output)?
    };
    println!("{json}");
    Ok(())
}

/// The easy endpoint: either a bare JSON scaling array or a full model file
/// (whose exponent matrix must match).
fn read_easy_model(path: &Path, stat: &ToricModel) -> Result<ToricModel> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading easy scaling {}", path.display()))?;
    if let Ok(entries) = serde_json::from_str::<Vec<ScalingEntry>>(&raw) {
        let c: Vec<f64> = entries.iter().map(ScalingEntry::to_f64).collect();
        return Ok(stat.with_scaling(c)?);
    }
    let file: ModelFile =
        serde_json::from_str(&raw).context("easy scaling must be a JSON array or model file")?;
    let easy = file.to_model()?;
    if easy.a_bar() != stat.a_bar() {
        bail!("easy model has a different exponent matrix");
    }
    Ok(easy)
}

pub fn mldegree(args: MldegreeArgs) -> Result<()> {
    if args.family != "scroll" {
        bail!("closed-form ML degrees are implemented for --family scroll only");
    }
    let spec = ScrollSpec::new(parse_usize_list(&args.n, "--n")?)?;
    let scaling = ScalingChoice::parse(&args.scaling)?;
    let c = scaling.exact(spec.states(), Some(binomial_scroll_scaling(&spec)))?;
    println!("{}", scroll_mldegree(&spec, &c)?);
    Ok(())
}

pub fn sigma_test(args: SigmaArgs) -> Result<()> {
    let model = io::read_model(&args.model)?;
    match args.mode {
        SigmaMode::Hypersurface => {
            let result = hypersurface_sigma_test(&model)?;
            if args.pretty {
                let detail = serde_json::json!({
                    "in_sigma": result.in_sigma,
                    "discriminant": result.discriminant.to_string(),
                    "kernel": result.kernel.w().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&detail)?);
            } else {
                println!("{}", result.in_sigma);
            }
        }
        SigmaMode::Ver2 => {
            let m = model.d() - 1;
            let expected = veronese_model(m, 2, vec![1.0; veronese_exponents(m, 2).len()])?;
            if expected.a_bar() != model.a_bar() {
                bail!("model is not Ver({m}, 2) in canonical column order; generate it with `model gen --family veronese --dim {m} --deg 2`");
            }
            let c = model.exact_scaling().ok_or_else(|| {
                anyhow!("sigma-test needs an exact scaling (integers or `p/q` strings)")
            })?;
            let result = ver2_sigma_test(m, c)?;
            if args.pretty {
                let faces: Vec<_> = result
                    .faces
                    .iter()
                    .map(|f| {
                        serde_json::json!({
                            "vertices": f.vertices,
                            "minor": f.value.to_string(),
                            "vanishes": f.vanishes(),
                        })
                    })
                    .collect();
                let detail = serde_json::json!({ "in_sigma": result.in_sigma, "faces": faces });
                println!("{}", serde_json::to_string_pretty(&detail)?);
            } else {
                println!("{}", result.in_sigma);
            }
        }
    }
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let spec = toric_mle::bench::BenchSpec {
        d_minus_1: parse_usize_list(&args.d_values, "--d-values")?,
        k_values: parse_inclusive_range(&args.k_range)?,
        trials: args.trials,
        seed: args.seed,
        epsilon: args.eps,
    };
    let rows = toric_mle::bench::run_bench(&spec)?;
    let mut buf = Vec::new();
    toric_mle::bench::write_csv(&rows, &mut buf)?;
    emit(args.out.as_deref(), std::str::from_utf8(&buf)?)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut f =
                std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}
