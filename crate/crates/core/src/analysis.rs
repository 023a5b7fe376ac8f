//! Degree-distribution extraction, discrete power-law fitting, and the
//! corpus summary table.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::allocate::CorpusStats;
use crate::context::{ContextBuilder, FormalContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeSource {
    LatticeHasse,
    ContextBipartiteObjects,
    ContextBipartiteAttributes,
}

/// A multiset of positive degrees. Zero-degree nodes are excluded up front
/// and counted in `excluded_zero`.
#[derive(Debug, Clone)]
pub struct DegreeSample {
    pub degrees: Vec<u64>,
    pub source: DegreeSource,
    pub excluded_zero: usize,
}

impl DegreeSample {
    pub fn from_degrees(
        raw: impl IntoIterator<Item = u64>,
        source: DegreeSource,
    ) -> DegreeSample {
        let mut degrees = Vec::new();
        let mut excluded_zero = 0;
        for d in raw {
            if d == 0 {
                excluded_zero += 1;
            } else {
                degrees.push(d);
            }
        }
        DegreeSample {
            degrees,
            source,
            excluded_zero,
        }
    }

    /// Row cardinalities: how many synsets (attributes) each object carries.
    pub fn from_context_objects(ctx: &FormalContext) -> Result<DegreeSample> {
        if ctx.object_count() == 0 {
            return Err(Error::EmptyContext("object"));
        }
        Ok(Self::from_degrees(
            (0..ctx.object_count()).map(|o| ctx.row(o).len() as u64),
            DegreeSource::ContextBipartiteObjects,
        ))
    }

    /// Column cardinalities: the membership size of each attribute.
    pub fn from_context_attributes(ctx: &FormalContext) -> Result<DegreeSample> {
        if ctx.attribute_count() == 0 {
            return Err(Error::EmptyContext("attribute"));
        }
        Ok(Self::from_degrees(
            (0..ctx.attribute_count()).map(|a| ctx.col(a).len() as u64),
            DegreeSource::ContextBipartiteAttributes,
        ))
    }

    /// Undirected Hasse degree: cover edges incident to each concept.
    pub fn from_hasse(
        concept_count: usize,
        covers: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<DegreeSample> {
        if concept_count == 0 {
            return Err(Error::EmptyContext("concept"));
        }
        let mut degrees = vec![0u64; concept_count];
        for (child, parent) in covers {
            degrees[child as usize] += 1;
            degrees[parent as usize] += 1;
        }
        Ok(Self::from_degrees(degrees, DegreeSource::LatticeHasse))
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// One integer per line, for external plotting.
    pub fn write_degrees<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in &self.degrees {
            writeln!(out, "{d}")?;
        }
        Ok(())
    }
}

/// A fitted discrete power law over the tail `degrees >= xmin`.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u64,
    pub ks_distance: f64,
    pub n_tail: usize,
}

/// Fewest tail degrees accepted by the fitters.
pub const MIN_TAIL: usize = 50;

fn tail(sample: &DegreeSample, xmin: u64) -> Result<Vec<u64>> {
    if xmin == 0 {
        return Err(Error::Structural {
            path: "<fit>".into(),
            message: "xmin must be a positive integer".into(),
        });
    }
    let tail: Vec<u64> = sample.degrees.iter().copied().filter(|&d| d >= xmin).collect();
    if tail.len() < MIN_TAIL {
        return Err(Error::InsufficientSample {
            needed: MIN_TAIL,
            got: tail.len(),
        });
    }
    Ok(tail)
}

/// Maximum-likelihood exponent via the continuous approximation
/// `1 + n / sum(ln(d / (xmin - 1/2)))`, plus the Kolmogorov-Smirnov distance
/// between the empirical tail and the fitted discrete power law. The
/// approximation is accurate for xmin of roughly 5 and above; at xmin = 1 it
/// is biased low (see the exact fitter for a cross-check).
pub fn fit_power_law(sample: &DegreeSample, xmin: u64) -> Result<PowerLawFit> {
    let tail = tail(sample, xmin)?;
    let denom: f64 = tail
        .iter()
        .map(|&d| (d as f64 / (xmin as f64 - 0.5)).ln())
        .sum();
    let alpha = 1.0 + tail.len() as f64 / denom;
    let ks_distance = ks_discrete_power_law(&tail, alpha, xmin);
    Ok(PowerLawFit {
        alpha,
        xmin,
        ks_distance,
        n_tail: tail.len(),
    })
}

/// Exact discrete MLE: solves `-zeta'(a, xmin)/zeta(a, xmin) = mean(ln d)` by
/// bisection. Slower, but unbiased down to xmin = 1.
pub fn fit_power_law_exact(sample: &DegreeSample, xmin: u64) -> Result<PowerLawFit> {
    let tail = tail(sample, xmin)?;
    let target: f64 = tail.iter().map(|&d| (d as f64).ln()).sum::<f64>() / tail.len() as f64;
    let a = xmin as f64;
    let mean_log = |alpha: f64| hurwitz_zeta_log_moment(alpha, a) / hurwitz_zeta(alpha, a);
    let (mut lo, mut hi) = (1.000001, 64.0);
    // mean_log decreases in alpha; clamp at the bracket if the sample is
    // degenerate (all degrees equal to xmin)
    if mean_log(hi) > target {
        lo = hi;
    } else if mean_log(lo) < target {
        hi = lo;
    } else {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mean_log(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let alpha = 0.5 * (lo + hi);
    let ks_distance = ks_discrete_power_law(&tail, alpha, xmin);
    Ok(PowerLawFit {
        alpha,
        xmin,
        ks_distance,
        n_tail: tail.len(),
    })
}

/// Clauset-style xmin selection: fit every candidate xmin and keep the one
/// with the smallest KS distance (ties break toward the smaller xmin).
pub fn scan_xmin(sample: &DegreeSample, max_xmin: Option<u64>) -> Result<PowerLawFit> {
    let mut candidates: Vec<u64> = sample.degrees.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    if let Some(max) = max_xmin {
        candidates.retain(|&d| d <= max);
    }
    let mut best: Option<PowerLawFit> = None;
    for xmin in candidates {
        match fit_power_law(sample, xmin) {
            Ok(fit) => {
                if best.is_none_or(|b| fit.ks_distance < b.ks_distance) {
                    best = Some(fit);
                }
            }
            Err(Error::InsufficientSample { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::InsufficientSample {
        needed: MIN_TAIL,
        got: sample.len(),
    })
}

/// Sup distance between the empirical tail CDF and the discrete power-law
/// CDF `F(d) = 1 - zeta(alpha, d+1)/zeta(alpha, xmin)`, evaluated at every
/// observed step and the flat just before it.
fn ks_discrete_power_law(tail: &[u64], alpha: f64, xmin: u64) -> f64 {
    let mut sorted = tail.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let norm = hurwitz_zeta(alpha, xmin as f64);
    let model_cdf = |d: u64| 1.0 - hurwitz_zeta(alpha, d as f64 + 1.0) / norm;
    let mut ks: f64 = 0.0;
    let mut seen = 0usize;
    let mut i = 0usize;
    while i < sorted.len() {
        let d = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == d {
            j += 1;
        }
        // flat segment just below this step
        if d > xmin {
            let below = seen as f64 / n;
            ks = ks.max((below - model_cdf(d - 1)).abs());
        }
        seen = j;
        let here = seen as f64 / n;
        ks = ks.max((here - model_cdf(d)).abs());
        i = j;
    }
    ks
}

/// Hurwitz zeta via Euler-Maclaurin; accurate to ~1e-12 for s in (1, 64].
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const N: usize = 24;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64).powf(-s);
    }
    let b = a + N as f64;
    sum += b.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * b.powf(-s);
    sum += s * b.powf(-s - 1.0) / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * b.powf(-s - 3.0) / 720.0;
    sum
}

/// `-zeta'(s, a)` = sum of `ln(a+k) (a+k)^-s`; same Euler-Maclaurin scheme.
fn hurwitz_zeta_log_moment(s: f64, a: f64) -> f64 {
    const N: usize = 48;
    let mut sum = 0.0;
    for k in 0..N {
        let x = a + k as f64;
        sum += x.ln() * x.powf(-s);
    }
    let b = a + N as f64;
    let lb = b.ln();
    // integral of ln(x) x^-s from b to infinity
    sum += b.powf(1.0 - s) * (lb / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
    sum += 0.5 * lb * b.powf(-s);
    // f'(x) = x^(-s-1)(1 - s ln x)
    sum -= b.powf(-s - 1.0) * (1.0 - s * lb) / 12.0;
    sum
}

/// One lexicon row of the Fig.-2-style summary. Refuses to represent a run
/// that violates the class partition.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SummaryRow {
    pub lexicon: String,
    pub words: u64,
    pub tagged: u64,
    pub ambiguous: u64,
    pub specific: u64,
    pub new: u64,
    pub specific_rate: f64,
    pub new_rate: f64,
    pub ambiguous_rate: f64,
}

pub fn summary_row(lexicon: &str, words: u64, stats: &CorpusStats) -> Result<SummaryRow> {
    if !stats.partition_holds() {
        return Err(Error::PartitionViolation {
            tagged: stats.tagged,
            specific: stats.specific,
            new: stats.new,
            ambiguous: stats.ambiguous,
        });
    }
    let rate = |part: u64| {
        if stats.tagged == 0 {
            0.0
        } else {
            part as f64 / stats.tagged as f64
        }
    };
    Ok(SummaryRow {
        lexicon: lexicon.to_string(),
        words,
        tagged: stats.tagged,
        ambiguous: stats.ambiguous,
        specific: stats.specific,
        new: stats.new,
        specific_rate: rate(stats.specific),
        new_rate: rate(stats.new),
        ambiguous_rate: rate(stats.ambiguous),
    })
}

/// Fixed-width text table with the Fig.-2 columns plus rates.
pub fn render_summary_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>8} {:>8} {:>10} {:>9} {:>6} {:>7} {:>7} {:>7}\n",
        "Sentiment lexicon", "Words", "Tagged", "Ambiguous", "Specific", "New", "spec%", "new%",
        "ambig%"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<28} {:>8} {:>8} {:>10} {:>9} {:>6} {:>7.1} {:>7.1} {:>7.1}\n",
            row.lexicon,
            row.words,
            row.tagged,
            row.ambiguous,
            row.specific,
            row.new,
            100.0 * row.specific_rate,
            100.0 * row.new_rate,
            100.0 * row.ambiguous_rate,
        ));
    }
    out
}

/// Deterministic random subcontext: keeps `n_objects` sampled objects and the
/// attributes still incident to at least one of them.
pub fn sample_object_subcontext(
    ctx: &FormalContext,
    n_objects: usize,
    seed: u64,
) -> Result<FormalContext> {
    if ctx.object_count() == 0 {
        return Err(Error::EmptyContext("object"));
    }
    let n = n_objects.min(ctx.object_count());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..ctx.object_count()).collect();
    indices.shuffle(&mut rng);
    indices.truncate(n);
    indices.sort_unstable();
    let mut builder = ContextBuilder::new();
    for &o in &indices {
        builder.add_object(&ctx.objects()[o])?;
        for &a in ctx.row(o) {
            builder.add_incidence(&ctx.objects()[o], &ctx.attributes()[a as usize])?;
        }
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::fish_fixture;
    use crate::lattice::build_lattice;

    #[test]
    fn diamond_lattice_degrees_are_all_two() {
        let ctx = FormalContext::from_rows(&["o0", "o1"], &["a0", "a1"], &[&[0], &[1]]).unwrap();
        let lattice = build_lattice(&ctx).unwrap();
        let sample =
            DegreeSample::from_hasse(lattice.len(), lattice.covers().iter().copied()).unwrap();
        assert_eq!(sample.degrees, vec![2, 2, 2, 2]);
        assert_eq!(sample.excluded_zero, 0);
    }

    #[test]
    fn single_concept_lattice_excludes_its_zero_degree() {
        let sample = DegreeSample::from_hasse(1, std::iter::empty()).unwrap();
        assert!(sample.degrees.is_empty());
        assert_eq!(sample.excluded_zero, 1);
        assert!(matches!(
            fit_power_law(&sample, 1),
            Err(Error::InsufficientSample { .. })
        ));
    }

    #[test]
    fn fish_object_degrees_include_eel_three() {
        let ctx = fish_fixture();
        let sample = DegreeSample::from_context_objects(&ctx).unwrap();
        let eel = ctx.object_id("eel").unwrap();
        assert_eq!(sample.degrees[eel], 3);
    }

    #[test]
    fn empty_structures_are_rejected() {
        let ctx = FormalContext::from_rows(&[], &[], &[]).unwrap();
        assert!(DegreeSample::from_context_objects(&ctx).is_err());
        assert!(DegreeSample::from_hasse(0, std::iter::empty()).is_err());
    }

    #[test]
    fn hurwitz_zeta_matches_reference_values() {
        // zeta(2) = pi^2/6, zeta(3) = Apery's constant
        assert!((hurwitz_zeta(2.0, 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.2020569031595943).abs() < 1e-10);
        // direct-summation oracle for a shifted case
        let direct: f64 = (0..2_000_000).map(|k| (10.0 + k as f64).powf(-2.5)).sum();
        assert!((hurwitz_zeta(2.5, 10.0) - direct).abs() < 1e-9);
    }

    #[test]
    fn zero_xmin_is_rejected() {
        let sample = DegreeSample::from_degrees(vec![1; 100], DegreeSource::LatticeHasse);
        assert!(fit_power_law(&sample, 0).is_err());
    }

    #[test]
    fn degenerate_all_equal_sample_has_near_unit_ks() {
        // no spread carries no power-law signal; the fit succeeds numerically
        // but the KS distance exposes it
        let sample = DegreeSample::from_degrees(vec![3; 200], DegreeSource::LatticeHasse);
        let fit = fit_power_law(&sample, 3).unwrap();
        assert!(fit.alpha > 1.0);
        assert!(fit.ks_distance > 0.3, "ks = {}", fit.ks_distance);
    }

    #[test]
    fn ks_distance_is_invariant_under_sample_duplication() {
        let degrees: Vec<u64> = (1..=60).flat_map(|d| std::iter::repeat(d).take(61 - d as usize)).collect();
        let once = DegreeSample::from_degrees(degrees.clone(), DegreeSource::LatticeHasse);
        let twice = DegreeSample::from_degrees(
            degrees.iter().chain(&degrees).copied().collect::<Vec<_>>(),
            DegreeSource::LatticeHasse,
        );
        let f1 = fit_power_law(&once, 1).unwrap();
        let f2 = fit_power_law(&twice, 1).unwrap();
        assert!((f1.ks_distance - f2.ks_distance).abs() < 1e-12);
        assert!((f1.alpha - f2.alpha).abs() < 1e-12);
    }

    #[test]
    fn insufficient_tail_is_refused_not_fitted() {
        let sample = DegreeSample::from_degrees(vec![5; 49], DegreeSource::LatticeHasse);
        assert!(matches!(
            fit_power_law(&sample, 1),
            Err(Error::InsufficientSample { needed: 50, got: 49 })
        ));
    }

    #[test]
    fn summary_row_refuses_partition_violation() {
        let bad = CorpusStats {
            total: 10,
            tagged: 9,
            not_polarized: 1,
            specific: 5,
            new: 1,
            ambiguous: 1,
        };
        assert!(matches!(
            summary_row("x", 100, &bad),
            Err(Error::PartitionViolation { .. })
        ));
    }

    #[test]
    fn figure_two_liu_row_renders_in_format() {
        let stats = CorpusStats {
            total: 11_500,
            tagged: 2_950,
            not_polarized: 8_550,
            specific: 2_000,
            new: 150,
            ambiguous: 800,
        };
        let row = summary_row("Bing Liu's Opinion Lexicon", 6_800, &stats).unwrap();
        let table = render_summary_table(&[row]);
        let line = table.lines().nth(1).unwrap();
        for field in ["Bing Liu's Opinion Lexicon", "6800", "2950", "800", "2000", "150"] {
            assert!(line.contains(field), "missing {field} in {line:?}");
        }
    }

    #[test]
    fn empty_run_renders_zero_row() {
        let row = summary_row("empty", 0, &CorpusStats::default()).unwrap();
        assert_eq!(row.tagged, 0);
        assert_eq!(row.specific_rate, 0.0);
        let table = render_summary_table(&[row]);
        assert_eq!(table.lines().count(), 2);
    }

    #[test]
    fn subcontext_sampling_is_deterministic_and_incident() {
        let ctx = fish_fixture();
        let a = sample_object_subcontext(&ctx, 3, 99).unwrap();
        let b = sample_object_subcontext(&ctx, 3, 99).unwrap();
        assert_eq!(a.objects(), b.objects());
        assert_eq!(a.object_count(), 3);
        for attr in 0..a.attribute_count() {
            assert!(!a.col(attr).is_empty());
        }
        let c = sample_object_subcontext(&ctx, 3, 100).unwrap();
        assert_eq!(c.object_count(), 3);
    }
}
