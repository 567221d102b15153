//! Alice/Bob gravitational which-path thought experiment in Planck units.
//!
//! Alice holds a superposed mass with effective quadrupole `Q_A` and recombines
//! it in time `T_A`; Bob, at distance `D`, probes its field for time `T_B`.
//! Every "∼" relation uses constant 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CRR_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GedankenParams {
    pub q_a: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub d: f64,
}

impl GedankenParams {
    pub fn new(q_a: f64, t_a: f64, t_b: f64, d: f64) -> Result<Self> {
        let p = GedankenParams { q_a, t_a, t_b, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("q_a", self.q_a), ("t_a", self.t_a), ("t_b", self.t_b), ("d", self.d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Bob resolves the which-path field: `Q_A T_B² > D⁴`.
    pub fn mlr(&self) -> bool {
        self.q_a * self.t_b * self.t_b > self.d.powi(4)
    }

    /// Alice emits less than one quantum: `Q_A < T_A²`.
    pub fn qrr(&self) -> bool {
        self.q_a < self.t_a * self.t_a
    }

    /// `Q_A ≪ T_A^{5/2}`, with "≪" meaning a factor `margin`.
    pub fn crr(&self, margin: f64) -> bool {
        self.q_a * margin < self.t_a.powf(2.5)
    }

    pub fn spacelike(&self) -> bool {
        self.t_a < self.d && self.t_b < self.d
    }

    pub fn n_quanta(&self) -> f64 {
        (self.q_a / (self.t_a * self.t_a)).powi(2)
    }

    pub fn displacement(&self) -> f64 {
        self.q_a * self.t_b * self.t_b / self.d.powi(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "AliceCoherent_BobBlind")]
    AliceCoherentBobBlind,
    #[serde(rename = "AliceDecohered_BobMayResolve")]
    AliceDecoheredBobMayResolve,
    Other,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::AliceCoherentBobBlind => "AliceCoherent_BobBlind",
            CaseLabel::AliceDecoheredBobMayResolve => "AliceDecohered_BobMayResolve",
            CaseLabel::Other => "Other",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub mlr: bool,
    pub qrr: bool,
    pub crr: bool,
    pub n_quanta: f64,
    pub displacement: f64,
    pub spacelike: bool,
    pub case_label: CaseLabel,
}

fn case_label(p: &GedankenParams) -> CaseLabel {
    let ta2 = p.t_a * p.t_a;
    match (p.spacelike(), p.q_a < ta2, p.q_a > ta2) {
        (true, true, _) => CaseLabel::AliceCoherentBobBlind,
        (true, _, true) => CaseLabel::AliceDecoheredBobMayResolve,
        _ => CaseLabel::Other,
    }
}

fn report(p: &GedankenParams, crr_margin: f64) -> RegimeReport {
    RegimeReport {
        mlr: p.mlr(),
        qrr: p.qrr(),
        crr: p.crr(crr_margin),
        n_quanta: p.n_quanta(),
        displacement: p.displacement(),
        spacelike: p.spacelike(),
        case_label: case_label(p),
    }
}

pub fn evaluate(p: &GedankenParams, crr_margin: f64) -> Result<RegimeReport> {
    p.validate()?;
    if !(crr_margin > 1.0 && crr_margin.is_finite()) {
        return Err(Error::param("crr_margin", "must be finite and greater than 1"));
    }
    Ok(report(p, crr_margin))
}

/// Log-spaced grid, identical on all four axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points_per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            min: 1e-2,
            max: 1e4,
            points_per_axis: 32,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.max > self.min && self.max.is_finite()) {
            return Err(Error::param("grid", "need 0 < min < max"));
        }
        if self.points_per_axis < 2 {
            return Err(Error::param("grid", "need at least 2 points per axis"));
        }
        Ok(())
    }

    pub fn axis(&self) -> Vec<f64> {
        let (lo, hi) = (self.min.log10(), self.max.log10());
        let n = self.points_per_axis;
        (0..n)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        self.points_per_axis == 0
    }

    /// Every grid point, ordered `(Q_A, T_A, T_B, D)` with `D` fastest.
    pub fn points(&self) -> impl Iterator<Item = GedankenParams> + '_ {
        let axis = self.axis();
        let n = axis.len();
        (0..n.pow(4)).map(move |i| GedankenParams {
            q_a: axis[i / (n * n * n)],
            t_a: axis[(i / (n * n)) % n],
            t_b: axis[(i / n) % n],
            d: axis[i % n],
        })
    }
}

pub const WITNESS_CHAIN: &str = "Q_A*T_B^2 < T_A^2*T_B^2 < D^4";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCertificate {
    pub points_scanned: usize,
    /// Points with MLR ∧ QRR ∧ spacelike.
    pub violations: usize,
    /// Points where MLR ∧ T_B < D but Q_A ≤ D².
    pub feasibility_violations: usize,
    /// MLR ∧ QRR outside the spacelike region (allowed, reported only).
    pub non_spacelike_coexistence: usize,
    /// Largest displacement among QRR ∧ spacelike points.
    pub max_displacement_qrr_spacelike: f64,
    pub witness_chain: &'static str,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    points: usize,
    violations: usize,
    feasibility: usize,
    coexist: usize,
    max_disp: f64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            points: self.points + o.points,
            violations: self.violations + o.violations,
            feasibility: self.feasibility + o.feasibility,
            coexist: self.coexist + o.coexist,
            max_disp: self.max_disp.max(o.max_disp),
        }
    }
}

pub fn no_paradox_scan(grid: &GridSpec) -> Result<ScanCertificate> {
    grid.validate()?;
    let axis = grid.axis();
    let tally = axis
        .par_iter()
        .map(|&q_a| {
            let mut t = Tally::default();
            for &t_a in &axis {
                for &t_b in &axis {
                    for &d in &axis {
                        let p = GedankenParams { q_a, t_a, t_b, d };
                        let (mlr, qrr, space) = (p.mlr(), p.qrr(), p.spacelike());
                        t.points += 1;
                        if mlr && qrr {
                            if space {
                                t.violations += 1;
                            } else {
                                t.coexist += 1;
                            }
                        }
                        if qrr && space {
                            t.max_disp = t.max_disp.max(p.displacement());
                        }
                        if !mlr_feasibility(&p).consistent {
                            t.feasibility += 1;
                        }
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(ScanCertificate {
        points_scanned: tally.points,
        violations: tally.violations,
        feasibility_violations: tally.feasibility,
        non_spacelike_coexistence: tally.coexist,
        max_displacement_qrr_spacelike: tally.max_disp,
        witness_chain: WITNESS_CHAIN,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    /// `Q_A > D²`
    pub feasible: bool,
    /// `D²`
    pub bound: f64,
    /// `MLR ∧ T_B < D ⇒ Q_A > D²` holds at this point.
    pub consistent: bool,
}

pub fn mlr_feasibility(p: &GedankenParams) -> Feasibility {
    let bound = p.d * p.d;
    let feasible = p.q_a > bound;
    Feasibility {
        feasible,
        bound,
        consistent: !(p.mlr() && p.t_b < p.d) || feasible,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TighterBound {
    Qrr,
    Crr,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComparison {
    pub t_a: f64,
    /// `T_A²`
    pub qrr_bound: f64,
    /// `T_A^{5/2}`
    pub crr_bound: f64,
    pub tighter: TighterBound,
    /// `T_A < 1`: a `Q_A` between the bounds obeys QRR yet breaks CRR.
    pub crr_fails_while_qrr_holds: bool,
}

pub fn crr_qrr_comparison(t_a: &[f64]) -> Result<Vec<BoundComparison>> {
    t_a.iter()
        .map(|&t| {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::param("t_a", format!("must be positive, got {t}")));
            }
            let (q, c) = (t * t, t.powf(2.5));
            let tighter = if q < c {
                TighterBound::Qrr
            } else if c < q {
                TighterBound::Crr
            } else {
                TighterBound::Equal
            };
            Ok(BoundComparison {
                t_a: t,
                qrr_bound: q,
                crr_bound: c,
                tighter,
                crr_fails_while_qrr_holds: c < q,
            })
        })
        .collect()
}

/// Counts MLR-true points with `T_A^{5/2} < Q_A < T_A²` over spacelike
/// `(T_B, D)` drawn from `grid`. Zero whenever the window is nonempty.
pub fn crr_window_mlr_count(t_a: f64, q_samples: usize, grid: &GridSpec) -> Result<usize> {
    grid.validate()?;
    let (lo, hi) = (t_a.powf(2.5), t_a * t_a);
    if !(lo < hi) {
        return Err(Error::param("t_a", "window T_A^{5/2} < Q_A < T_A^2 is empty (need T_A < 1)"));
    }
    let axis = grid.axis();
    let mut count = 0;
    for k in 1..=q_samples {
        let q_a = lo + (hi - lo) * k as f64 / (q_samples + 1) as f64;
        for &t_b in &axis {
            for &d in axis.iter().filter(|&&d| d > t_a && d > t_b) {
                if (GedankenParams { q_a, t_a, t_b, d }).mlr() {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(q: f64, ta: f64, tb: f64, d: f64) -> RegimeReport {
        evaluate(&GedankenParams::new(q, ta, tb, d).unwrap(), DEFAULT_CRR_MARGIN).unwrap()
    }

    #[test]
    fn coherent_case() {
        let r = eval(3.0, 2.0, 2.0, 3.0);
        assert!(r.qrr);
        assert!(!r.mlr);
        assert!(r.spacelike);
        assert_eq!(r.case_label, CaseLabel::AliceCoherentBobBlind);
        assert!((r.displacement - 12.0 / 81.0).abs() < 1e-15);
    }

    #[test]
    fn decohered_case() {
        let r = eval(100.0, 2.0, 2.0, 3.0);
        assert!(!r.qrr);
        assert!(r.mlr);
        assert_eq!(r.n_quanta, 625.0);
        assert_eq!(r.case_label, CaseLabel::AliceDecoheredBobMayResolve);
    }

    #[test]
    fn quanta_count() {
        assert_eq!(eval(8.0, 2.0, 1.0, 1.0).n_quanta, 4.0);
    }

    #[test]
    fn timelike_points_are_other() {
        assert_eq!(eval(3.0, 2.0, 4.0, 2.0).case_label, CaseLabel::Other);
        // boundary Q_A = T_A² belongs to neither case
        assert_eq!(eval(4.0, 2.0, 1.0, 3.0).case_label, CaseLabel::Other);
    }

    #[test]
    fn crr_uses_margin() {
        let p = GedankenParams::new(1.0, 4.0, 1.0, 1.0).unwrap(); // T_A^{5/2} = 32
        assert!(evaluate(&p, 10.0).unwrap().crr);
        assert!(!evaluate(&p, 40.0).unwrap().crr);
        assert!(evaluate(&p, 1.0).is_err());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(GedankenParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(GedankenParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(GedankenParams::new(1.0, 1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn small_scan_is_clean() {
        let grid = GridSpec {
            points_per_axis: 12,
            ..GridSpec::default()
        };
        let cert = no_paradox_scan(&grid).unwrap();
        assert_eq!(cert.points_scanned, 12usize.pow(4));
        assert_eq!(cert.violations, 0);
        assert_eq!(cert.feasibility_violations, 0);
        assert!(cert.max_displacement_qrr_spacelike < 1.0);
        assert!(cert.non_spacelike_coexistence > 0);
        assert_eq!(grid.points().count(), grid.len());
    }

    #[test]
    fn scan_counts_match_brute_force() {
        let grid = GridSpec {
            min: 0.1,
            max: 10.0,
            points_per_axis: 7,
        };
        let cert = no_paradox_scan(&grid).unwrap();
        let coexist = grid.points().filter(|p| p.mlr() && p.qrr() && !p.spacelike()).count();
        assert_eq!(cert.non_spacelike_coexistence, coexist);
    }

    #[test]
    fn timelike_counterexample_exists() {
        let p = GedankenParams::new(3.0, 2.0, 4.0, 2.0).unwrap();
        assert!(p.mlr() && p.qrr() && !p.spacelike());
    }

    #[test]
    fn feasibility_examples() {
        let boundary = GedankenParams::new(9.0, 1.0, 1.0, 3.0).unwrap();
        assert!(!mlr_feasibility(&boundary).feasible);
        let f = mlr_feasibility(&GedankenParams::new(100.0, 2.0, 2.0, 3.0).unwrap());
        assert!(f.feasible && f.consistent);
        assert_eq!(f.bound, 9.0);
    }

    #[test]
    fn feasibility_implication_on_random_spacelike_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut mlr_seen = 0;
        for _ in 0..10_000 {
            let d = 10f64.powf(rng.random_range(-2.0..4.0));
            let ta = d * rng.random_range(0.01..1.0);
            let tb = d * rng.random_range(0.01..1.0);
            let q = 10f64.powf(rng.random_range(-2.0..10.0));
            let p = GedankenParams::new(q, ta, tb, d).unwrap();
            assert!(mlr_feasibility(&p).consistent);
            if p.mlr() {
                mlr_seen += 1;
                assert!(p.q_a > d * d);
            }
        }
        assert!(mlr_seen > 100);
    }

    #[test]
    fn comparison_table() {
        let rows = crr_qrr_comparison(&[0.25, 1.0, 4.0]).unwrap();
        assert_eq!(rows[1].tighter, TighterBound::Equal);
        assert_eq!(rows[1].qrr_bound, rows[1].crr_bound);
        assert_eq!(rows[2].tighter, TighterBound::Qrr);
        assert_eq!((rows[2].qrr_bound, rows[2].crr_bound), (16.0, 32.0));
        assert!(rows[0].crr_fails_while_qrr_holds);
        assert!(!rows[2].crr_fails_while_qrr_holds);
        assert!(crr_qrr_comparison(&[0.0]).is_err());
    }

    #[test]
    fn crr_window_never_meets_mlr() {
        assert_eq!(crr_window_mlr_count(0.25, 20, &GridSpec::default()).unwrap(), 0);
        assert!(crr_window_mlr_count(2.0, 20, &GridSpec::default()).is_err());
    }

    proptest! {
        #[test]
        fn no_clash_pointwise(
            q in -2.0f64..8.0, ta in 0.0f64..1.0, tb in 0.0f64..1.0, d in -2.0f64..4.0
        ) {
            let d = 10f64.powf(d);
            let p = GedankenParams::new(10f64.powf(q), ta * d + 1e-300, tb * d + 1e-300, d).unwrap();
            prop_assume!(p.spacelike());
            prop_assert!(!(p.qrr() && p.mlr()));
        }

        #[test]
        fn predicate_monotonicity(
            q in 0.01f64..100.0, ta in 0.01f64..100.0, tb in 0.01f64..100.0,
            d in 0.01f64..100.0, k in 1.0f64..10.0
        ) {
            let p = GedankenParams::new(q, ta, tb, d).unwrap();
            let imp = |a: bool, b: bool| !a || b;
            let more_q = GedankenParams { q_a: q * k, ..p };
            let more_tb = GedankenParams { t_b: tb * k, ..p };
            let less_d = GedankenParams { d: d / k, ..p };
            let less_q = GedankenParams { q_a: q / k, ..p };
            let more_ta = GedankenParams { t_a: ta * k, ..p };
            prop_assert!(imp(p.mlr(), more_q.mlr()));
            prop_assert!(imp(p.mlr(), more_tb.mlr()));
            prop_assert!(imp(p.mlr(), less_d.mlr()));
            prop_assert!(imp(p.qrr(), less_q.qrr()));
            prop_assert!(imp(p.qrr(), more_ta.qrr()));
        }

        #[test]
        fn few_quanta_iff_qrr(q in 0.01f64..100.0, ta in 0.01f64..100.0) {
            let p = GedankenParams::new(q, ta, 1.0, 1.0).unwrap();
            prop_assume!((q / (ta * ta) - 1.0).abs() > 1e-9);
            prop_assert_eq!(p.n_quanta() < 1.0, p.qrr());
        }
    }
}
