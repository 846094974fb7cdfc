use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    adoption_dominance, adoption_entropy, average_exposures, early_stage, usage_dominance, usage_entropy,
    ExposureMode,
};
use crate::cascade::{run_ensemble, CascadeParams, EnsembleConfig, EnsembleSummary, M1Mode, MemeTrace, Model};
use crate::community::{CommunityId, Partition};
use crate::error::{Error, Result};
use crate::graph::SocialNetwork;

/// Concentration and reinforcement measures of one (windowed) trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMetrics {
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "U")]
    pub u: usize,
    pub r: f64,
    pub g: f64,
    #[serde(rename = "Ht")]
    pub ht: f64,
    #[serde(rename = "Hu")]
    pub hu: f64,
    #[serde(rename = "Nt")]
    pub nt: f64,
    #[serde(rename = "Nu")]
    pub nu: f64,
    pub usage_dominant: CommunityId,
    pub adoption_dominant: CommunityId,
    pub usage_tie: bool,
    pub adoption_tie: bool,
    pub communities_touched: usize,
}

/// Measures of `trace` as given; callers window it first.
pub fn raw_metrics(trace: &MemeTrace, net: &SocialNetwork, part: &Partition) -> Result<RawMetrics> {
    let usage = usage_dominance(trace, part)?;
    let adoption = adoption_dominance(trace, part)?;
    let touched = trace.community_tweet_counts(part)?.iter().filter(|&&c| c > 0).count();
    Ok(RawMetrics {
        t: trace.len(),
        u: trace.adopters().len(),
        r: usage.value,
        g: adoption.value,
        ht: usage_entropy(trace, part)?,
        hu: adoption_entropy(trace, part)?,
        nt: average_exposures(trace, net, ExposureMode::Tweets)?,
        nu: average_exposures(trace, net, ExposureMode::Users)?,
        usage_dominant: usage.community,
        adoption_dominant: adoption.community,
        usage_tie: usage.tie,
        adoption_tie: adoption.tie,
        communities_touched: touched,
    })
}

/// M1 reference ensembles for one meme: tweet-based measures (r, Ht, Nt)
/// are compared with M1 sampling `T` tweets, user-based measures (g, Hu, Nu)
/// with M1 sampling `U` users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M1Baseline {
    pub usage: EnsembleSummary,
    pub adoption: EnsembleSummary,
}

impl M1Baseline {
    pub fn build(
        net: &SocialNetwork,
        part: &Partition,
        tweets: usize,
        users: usize,
        params: &CascadeParams,
        config: &EnsembleConfig,
    ) -> Result<Self> {
        let with_target = |target| CascadeParams {
            target_tweets: target,
            ..params.clone()
        };
        let usage = run_ensemble(net, Some(part), Model::M1(M1Mode::Tweets), &with_target(tweets), config)?.summary;
        let adoption = run_ensemble(net, Some(part), Model::M1(M1Mode::Users), &with_target(users), config)?.summary;
        Ok(Self { usage, adoption })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub meme_id: String,
    #[serde(flatten)]
    pub raw: RawMetrics,
    pub r_rel: Option<f64>,
    pub g_rel: Option<f64>,
    #[serde(rename = "Ht_rel")]
    pub ht_rel: Option<f64>,
    #[serde(rename = "Hu_rel")]
    pub hu_rel: Option<f64>,
    #[serde(rename = "Nt_rel")]
    pub nt_rel: Option<f64>,
    #[serde(rename = "Nu_rel")]
    pub nu_rel: Option<f64>,
}

/// Raw measures on the first `early_n` tweets, each also divided by the
/// matching M1 ensemble mean. A zero or undefined denominator leaves the
/// ratio missing.
pub fn relative_report(
    trace: &MemeTrace,
    net: &SocialNetwork,
    part: &Partition,
    baseline: &M1Baseline,
    early_n: usize,
) -> Result<ConcentrationReport> {
    let window = early_stage(trace, early_n);
    let raw = raw_metrics(&window, net, part)?;
    if baseline.usage.target_tweets != raw.t || baseline.adoption.target_tweets != raw.u {
        return Err(Error::InvalidParameter(format!(
            "meme `{}`: baseline targets (T={}, U={}) do not match trace (T={}, U={})",
            trace.meme_id, baseline.usage.target_tweets, baseline.adoption.target_tweets, raw.t, raw.u
        )));
    }
    let ratio = |x: f64, denom: Option<f64>| match denom {
        Some(d) if d != 0.0 && d.is_finite() => Some(x / d),
        _ => None,
    };
    let (us, ad) = (&baseline.usage, &baseline.adoption);
    Ok(ConcentrationReport {
        meme_id: trace.meme_id.clone(),
        r_rel: ratio(raw.r, us.r.mean),
        ht_rel: ratio(raw.ht, us.ht.mean),
        nt_rel: ratio(raw.nt, us.nt.mean),
        g_rel: ratio(raw.g, ad.g.mean),
        hu_rel: ratio(raw.hu, ad.hu.mean),
        nu_rel: ratio(raw.nu, ad.nu.mean),
        raw,
    })
}

pub const REPORT_HEADER: &str = "meme_id,T,U,r,g,Ht,Hu,Nt,Nu,r_rel,g_rel,Ht_rel,Hu_rel,Nt_rel,Nu_rel,\
usage_dominant,adoption_dominant,usage_tie,adoption_tie,communities_touched";

/// One row per meme; missing ratios are empty cells.
pub fn write_reports_csv<W: Write>(reports: &[ConcentrationReport], mut out: W) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for rep in reports {
        let r = &rep.raw;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&rep.meme_id),
            r.t,
            r.u,
            r.r,
            r.g,
            r.ht,
            r.hu,
            r.nt,
            r.nu,
            opt(rep.r_rel),
            opt(rep.g_rel),
            opt(rep.ht_rel),
            opt(rep.hu_rel),
            opt(rep.nt_rel),
            opt(rep.nu_rel),
            r.usage_dominant,
            r.adoption_dominant,
            r.usage_tie,
            r.adoption_tie,
            r.communities_touched
        )?;
    }
    Ok(())
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::MetricSummary;

    fn summary(target: usize, r: f64) -> EnsembleSummary {
        let m = |v: f64| MetricSummary {
            mean: Some(v),
            stderr: 0.0,
            n: 10,
        };
        EnsembleSummary {
            model: "M1".into(),
            target_tweets: target,
            n_traces: 10,
            empty_dropped: 0,
            r: m(r),
            g: m(0.5),
            ht: m(1.0),
            hu: m(1.0),
            nt: m(0.0),
            nu: m(0.0),
        }
    }

    #[test]
    fn concentrated_trace_ratios() {
        let net = SocialNetwork::from_edges(10, &[(0, 1), (1, 2)]).unwrap();
        let part = Partition::from_labels(&[0, 0, 0, 1, 1, 2, 2, 3, 3, 4]).unwrap();
        let trace = MemeTrace::from_users("h", [0, 1, 2, 0]);
        let baseline = M1Baseline {
            usage: summary(4, 0.2),
            adoption: summary(3, 0.2),
        };
        let rep = relative_report(&trace, &net, &part, &baseline, 50).unwrap();
        assert_eq!(rep.raw.r, 1.0);
        assert!((rep.r_rel.unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(rep.ht_rel, Some(0.0));
        // zero M1 exposure mean leaves the ratio missing
        assert_eq!(rep.nt_rel, None);

        let mut buf = Vec::new();
        write_reports_csv(&[rep], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), REPORT_HEADER.split(',').count());
    }

    #[test]
    fn mismatched_targets_rejected() {
        let net = SocialNetwork::from_edges(3, &[(0, 1)]).unwrap();
        let part = Partition::single_community(3).unwrap();
        let trace = MemeTrace::from_users("h", [0, 1]);
        let baseline = M1Baseline {
            usage: summary(50, 0.2),
            adoption: summary(2, 0.2),
        };
        assert!(relative_report(&trace, &net, &part, &baseline, 50).is_err());
    }
}
