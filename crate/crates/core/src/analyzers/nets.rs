use crate::config::Tolerances;
use crate::derivation::KernelFamily;
use crate::report::{AnalysisReport, Evidence, Verdict};
use crate::spaces::ON_GRID;
use crate::Result;

/// Greedy ε-net of a sampled family.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonNet {
    pub epsilon: f64,
    /// Indices of the chosen members.
    pub centers: Vec<usize>,
    /// Largest distance from any member to its nearest center.
    pub radius: f64,
}

impl EpsilonNet {
    pub fn size(&self) -> usize {
        self.centers.len()
    }
}

/// Farthest-point selection starting from member 0, stopping once every
/// member is within `eps` of a center.
pub fn greedy_epsilon_net(fam: &KernelFamily, eps: f64) -> EpsilonNet {
    let n = fam.len();
    if n == 0 {
        return EpsilonNet {
            epsilon: eps,
            centers: Vec::new(),
            radius: 0.0,
        };
    }
    let mut centers = vec![0];
    let mut nearest: Vec<f64> = (0..n).map(|k| fam.distance(0, k)).collect();
    loop {
        let (far, &radius) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty family");
        if radius <= eps {
            return EpsilonNet {
                epsilon: eps,
                centers,
                radius,
            };
        }
        centers.push(far);
        for (k, d) in nearest.iter_mut().enumerate() {
            *d = d.min(fam.distance(far, k));
        }
    }
}

/// Net sizes at the base sampling, with halved parameter step, and with a
/// doubled window; holds when neither change grows the net by more than
/// `tol.net_growth` centers.
pub fn family_total_boundedness(fam: &KernelFamily, eps: f64, tol: &Tolerances) -> AnalysisReport {
    let spec = fam.spec();
    let report = AnalysisReport::new("family_total_boundedness")
        .param("kind", format!("{:?}", fam.kind()))
        .param("epsilon", eps)
        .param("net_growth", tol.net_growth)
        .param("member_t_max", spec.member_t_max)
        .param("param_max", spec.param_max)
        .caveat(ON_GRID)
        .caveat("net-size stability under refinement is a proxy for total boundedness");
    let base = greedy_epsilon_net(fam, eps);
    let rebuilt: Result<(KernelFamily, KernelFamily)> =
        fam.rebuild(spec.refined()).and_then(|r| Ok((r, fam.rebuild(spec.extended())?)));
    let (refined, extended) = match rebuilt {
        Ok(pair) => pair,
        Err(e) => {
            return report
                .summarize("net_size", base.size() as f64)
                .caveat(format!("family could not be resampled: {e}"))
                .conclude(Verdict::Inconclusive)
        }
    };
    let sizes = [
        base.size(),
        greedy_epsilon_net(&refined, eps).size(),
        greedy_epsilon_net(&extended, eps).size(),
    ];
    let grow_refine = sizes[1] as f64 - sizes[0] as f64;
    let grow_extend = sizes[2] as f64 - sizes[0] as f64;
    let report = report
        .summarize("net_size", sizes[0] as f64)
        .summarize("net_size_refined", sizes[1] as f64)
        .summarize("net_size_extended", sizes[2] as f64)
        .summarize("radius", base.radius)
        .with_evidence(Evidence::new(
            "net_size",
            sizes.iter().enumerate().map(|(k, &s)| (k as f64, s as f64)).collect(),
        ));
    if grow_refine <= tol.net_growth && grow_extend <= tol.net_growth {
        report.conclude(Verdict::Holds)
    } else {
        report.conclude(Verdict::Fails)
    }
}
