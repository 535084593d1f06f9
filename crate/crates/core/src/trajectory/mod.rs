//! Trajectory extraction: splitting raw tracks at breaks and turns, resampling
//! onto a uniform time grid and cutting fixed-length sequences.

mod ingest;
mod projection;

pub use ingest::{ingest_records, write_records, IngestOptions, IngestOutput, IngestReport, Reject};
pub use projection::UtmZone;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nominal sampling interval after resampling.
pub const DEFAULT_STEP_SECONDS: i64 = 60;

/// A single timestamped vessel position in a projected plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub vessel_id: String,
    /// Seconds since the Unix epoch.
    pub timestamp: i64,
    pub easting: f64,
    pub northing: f64,
    /// Metres per second.
    pub speed_over_ground: Option<f64>,
    /// Degrees clockwise from north in `[0, 360)`.
    pub course_over_ground: Option<f64>,
}

impl TrackPoint {
    pub fn new(vessel_id: impl Into<String>, timestamp: i64, easting: f64, northing: f64) -> Self {
        Self {
            vessel_id: vessel_id.into(),
            timestamp,
            easting,
            northing,
            speed_over_ground: None,
            course_over_ground: None,
        }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.easting, self.northing]
    }
}

/// Time-ordered positions of one vessel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub vessel_id: String,
    pub points: Vec<TrackPoint>,
    pub step_seconds: i64,
}

impl Trajectory {
    /// Builds a trajectory, checking that timestamps are strictly increasing
    /// and coordinates finite.
    pub fn new(vessel_id: impl Into<String>, points: Vec<TrackPoint>, step_seconds: i64) -> Result<Self> {
        if points.windows(2).any(|w| w[1].timestamp <= w[0].timestamp) {
            return Err(Error::InvalidInput("trajectory timestamps must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.easting.is_finite() || !p.northing.is_finite()) {
            return Err(Error::InvalidInput("trajectory coordinates must be finite".into()));
        }
        Ok(Self { vessel_id: vessel_id.into(), points, step_seconds })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start_time(&self) -> Option<i64> {
        self.points.first().map(|p| p.timestamp)
    }

    pub fn end_time(&self) -> Option<i64> {
        self.points.last().map(|p| p.timestamp)
    }

    /// Position at time `t` by linear interpolation, `None` outside the span.
    pub fn position_at(&self, t: f64) -> Option<[f64; 2]> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if t < first.timestamp as f64 || t > last.timestamp as f64 {
            return None;
        }
        let idx = self.points.partition_point(|p| (p.timestamp as f64) < t);
        let hi = &self.points[idx];
        if hi.timestamp as f64 == t || idx == 0 {
            return Some(hi.position());
        }
        let lo = &self.points[idx - 1];
        Some(lerp(lo, hi, t))
    }

    /// Net displacement from the first to the last point.
    pub fn net_displacement(&self) -> [f64; 2] {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => [b.easting - a.easting, b.northing - a.northing],
            _ => [0.0, 0.0],
        }
    }

    /// Portion of the trajectory relevant to `[t_lo, t_hi]`: every point
    /// inside the span plus the bracketing points just outside it, so that
    /// interpolation covers the span edges. `None` if there is no overlap.
    pub fn clip(&self, t_lo: i64, t_hi: i64) -> Option<Trajectory> {
        let (start, end) = (self.start_time()?, self.end_time()?);
        if end < t_lo || start > t_hi {
            return None;
        }
        let first_in = self.points.partition_point(|p| p.timestamp < t_lo);
        let past_end = self.points.partition_point(|p| p.timestamp <= t_hi);
        let lo = first_in.saturating_sub(1);
        let hi = (past_end + 1).min(self.points.len());
        Some(Trajectory {
            vessel_id: self.vessel_id.clone(),
            points: self.points[lo..hi].to_vec(),
            step_seconds: self.step_seconds,
        })
    }
}

fn lerp(lo: &TrackPoint, hi: &TrackPoint, t: f64) -> [f64; 2] {
    let frac = (t - lo.timestamp as f64) / (hi.timestamp - lo.timestamp) as f64;
    [lo.easting + (hi.easting - lo.easting) * frac, lo.northing + (hi.northing - lo.northing) * frac]
}

/// Direction of upstream travel in the projected plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct RiverAxis {
    x: f64,
    y: f64,
}

impl RiverAxis {
    /// Accepts a vector that is already of unit length (within 1e-9).
    pub fn unit(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("river axis ({x}, {y}) is not a unit vector")));
        }
        Ok(Self { x, y })
    }

    /// Normalises any non-zero direction.
    pub fn from_direction(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput("river axis must be a non-zero finite vector".into()));
        }
        if (norm - 1.0).abs() <= 1e-9 {
            return Ok(Self { x, y });
        }
        Ok(Self { x: x / norm, y: y / norm })
    }

    pub fn components(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Dot product of a position with the axis.
    pub fn along(&self, p: [f64; 2]) -> f64 {
        p[0] * self.x + p[1] * self.y
    }

    /// Signed offset to the left of the axis.
    pub fn lateral(&self, p: [f64; 2]) -> f64 {
        -p[0] * self.y + p[1] * self.x
    }
}

impl Default for RiverAxis {
    fn default() -> Self {
        Self { x: 1.0, y: 0.0 }
    }
}

impl TryFrom<[f64; 2]> for RiverAxis {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::from_direction(v[0], v[1])
    }
}

impl From<RiverAxis> for [f64; 2] {
    fn from(a: RiverAxis) -> Self {
        [a.x, a.y]
    }
}

/// Whether the trajectory's net displacement points upstream.
pub fn is_upstream(trajectory: &Trajectory, axis: &RiverAxis) -> bool {
    axis.along(trajectory.net_displacement()) > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    /// A time gap larger than this starts a new trajectory.
    pub gap_seconds: i64,
    /// A heading change larger than this (degrees) within one step starts a
    /// new trajectory.
    pub turn_degrees: f64,
    /// Trajectories with fewer resampled points are discarded.
    pub min_points: usize,
    pub step_seconds: i64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { gap_seconds: 600, turn_degrees: 150.0, min_points: 10, step_seconds: DEFAULT_STEP_SECONDS }
    }
}

/// Heading of the leg `a -> b` in degrees clockwise from north; `None` when
/// the two positions coincide.
pub fn heading_degrees(a: &TrackPoint, b: &TrackPoint) -> Option<f64> {
    let de = b.easting - a.easting;
    let dn = b.northing - a.northing;
    if de == 0.0 && dn == 0.0 {
        return None;
    }
    Some(de.atan2(dn).to_degrees().rem_euclid(360.0))
}

/// Smallest absolute difference between two headings, in `[0, 180]`.
pub fn heading_change(h0: f64, h1: f64) -> f64 {
    let d = (h1 - h0).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Number of points `resample` will produce for a span.
fn resampled_len(first: i64, last: i64, step: i64) -> usize {
    let span = last - first;
    if span < step {
        0
    } else {
        (span / step) as usize + 1
    }
}

/// Splits one vessel's time-sorted points at breaks and turns.
///
/// A turn at vertex `k` (the heading of the leg leaving `k` differs from the
/// leg entering it by more than the threshold) starts a new trajectory at
/// `k`. Segments too short to yield `min_points` resampled points are
/// dropped; retained segments never share points.
pub fn split_tracks(points: &[TrackPoint], opts: &SplitOptions) -> Vec<Trajectory> {
    if points.len() < 2 {
        return Vec::new();
    }
    let mut segments: Vec<Vec<TrackPoint>> = Vec::new();
    let mut current = vec![points[0].clone()];
    let mut last_heading: Option<f64> = None;

    for pair in points.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if cur.timestamp - prev.timestamp > opts.gap_seconds {
            segments.push(std::mem::replace(&mut current, vec![cur.clone()]));
            last_heading = None;
            continue;
        }
        let heading = heading_degrees(prev, cur);
        if let (Some(h0), Some(h1)) = (last_heading, heading) {
            if heading_change(h0, h1) > opts.turn_degrees {
                let vertex = current.pop().expect("segment holds the previous point");
                segments.push(std::mem::replace(&mut current, vec![vertex]));
            }
        }
        if heading.is_some() {
            last_heading = heading;
        }
        current.push(cur.clone());
    }
    segments.push(current);

    segments
        .into_iter()
        .filter(|seg| {
            seg.len() >= 2
                && resampled_len(seg[0].timestamp, seg[seg.len() - 1].timestamp, opts.step_seconds) >= opts.min_points
        })
        .map(|seg| Trajectory { vessel_id: seg[0].vessel_id.clone(), points: seg, step_seconds: 0 })
        .collect()
}

/// Linearly interpolates a trajectory onto `t0, t0 + step, ... <= t_end`.
///
/// Grid times that coincide with an original sample copy that sample's
/// position bit for bit. Speed and course are recomputed from consecutive
/// resampled positions. Returns `None` when the span is shorter than one
/// step.
pub fn resample(trajectory: &Trajectory, step_seconds: i64) -> Option<Trajectory> {
    let pts = &trajectory.points;
    if pts.len() < 2 || step_seconds <= 0 {
        return None;
    }
    let t0 = pts[0].timestamp;
    let count = resampled_len(t0, pts[pts.len() - 1].timestamp, step_seconds);
    if count == 0 {
        return None;
    }

    let mut out: Vec<TrackPoint> = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let t = t0 + k as i64 * step_seconds;
        while j + 1 < pts.len() && pts[j + 1].timestamp <= t {
            j += 1;
        }
        let [easting, northing] =
            if pts[j].timestamp == t { pts[j].position() } else { lerp(&pts[j], &pts[j + 1], t as f64) };
        out.push(TrackPoint::new(trajectory.vessel_id.clone(), t, easting, northing));
    }

    let derived: Vec<(f64, Option<f64>)> = (0..out.len())
        .map(|i| {
            // count >= 2 here, so the first point can use the forward leg.
            let (a, b) = if i == 0 { (&out[0], &out[1]) } else { (&out[i - 1], &out[i]) };
            let dist = (b.easting - a.easting).hypot(b.northing - a.northing);
            (dist / step_seconds as f64, heading_degrees(a, b))
        })
        .collect();
    for (p, (sog, cog)) in out.iter_mut().zip(derived) {
        p.speed_over_ground = Some(sog);
        p.course_over_ground = cog;
    }

    Some(Trajectory { vessel_id: trajectory.vessel_id.clone(), points: out, step_seconds })
}

/// Splits and resamples every vessel's points. Output is ordered by vessel id
/// and then start time.
pub fn prepare_trajectories<'a, I>(tracks: I, opts: &SplitOptions) -> Vec<Trajectory>
where
    I: IntoIterator<Item = &'a Vec<TrackPoint>>,
{
    let mut out: Vec<Trajectory> = tracks
        .into_iter()
        .flat_map(|pts| split_tracks(pts, opts))
        .filter_map(|t| resample(&t, opts.step_seconds))
        .filter(|t| t.len() >= opts.min_points)
        .collect();
    out.sort_by(|a, b| a.vessel_id.cmp(&b.vessel_id).then(a.start_time().cmp(&b.start_time())));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window: usize,
    pub input_length: usize,
}

impl WindowConfig {
    pub fn output_length(&self) -> usize {
        self.window - self.input_length
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { window: 10, input_length: 5 }
    }
}

/// One evaluation window of an ego trajectory with its co-temporal traffic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub sample_id: String,
    pub ego: Trajectory,
    pub input_length: usize,
    pub output_length: usize,
    pub neighbors: Vec<Trajectory>,
}

impl SequenceSample {
    pub fn input(&self) -> &[TrackPoint] {
        &self.ego.points[..self.input_length]
    }

    pub fn output(&self) -> &[TrackPoint] {
        &self.ego.points[self.input_length..]
    }

    /// Last observed position, the origin of the prediction horizon.
    pub fn anchor(&self) -> &TrackPoint {
        &self.ego.points[self.input_length - 1]
    }

    /// Time span of the prediction horizon, from the anchor to the last
    /// forecast step.
    pub fn prediction_span(&self) -> (i64, i64) {
        (self.anchor().timestamp, self.ego.points[self.ego.len() - 1].timestamp)
    }
}

/// Cuts a resampled trajectory into disjoint windows of `cfg.window` points.
/// A trailing remainder shorter than a window is dropped. Every other
/// trajectory in `scene` that overlaps a window's time span is attached as a
/// neighbour.
pub fn window_sequences(ego: &Trajectory, scene: &[Trajectory], cfg: &WindowConfig) -> Vec<SequenceSample> {
    if cfg.window == 0 || cfg.input_length == 0 || cfg.input_length >= cfg.window {
        return Vec::new();
    }
    ego.points
        .chunks_exact(cfg.window)
        .map(|chunk| {
            let t_lo = chunk[0].timestamp;
            let t_hi = chunk[chunk.len() - 1].timestamp;
            let neighbors =
                scene.iter().filter(|t| t.vessel_id != ego.vessel_id).filter_map(|t| t.clip(t_lo, t_hi)).collect();
            SequenceSample {
                sample_id: format!("{}:{}", ego.vessel_id, t_lo),
                ego: Trajectory {
                    vessel_id: ego.vessel_id.clone(),
                    points: chunk.to_vec(),
                    step_seconds: ego.step_seconds,
                },
                input_length: cfg.input_length,
                output_length: cfg.output_length(),
                neighbors,
            }
        })
        .collect()
}

/// Windows every upstream trajectory against the rest of the scene.
pub fn build_samples(trajectories: &[Trajectory], axis: &RiverAxis, cfg: &WindowConfig) -> Vec<SequenceSample> {
    trajectories
        .iter()
        .filter(|t| is_upstream(t, axis))
        .flat_map(|ego| window_sequences(ego, trajectories, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(id: &str, n: usize, dt: i64, vx: f64) -> Vec<TrackPoint> {
        (0..n).map(|i| TrackPoint::new(id, 1000 + i as i64 * dt, vx * i as f64, 0.0)).collect()
    }

    fn traj(pts: Vec<TrackPoint>) -> Trajectory {
        Trajectory::new(pts[0].vessel_id.clone(), pts, 60).unwrap()
    }

    #[test]
    fn straight_line_stays_whole() {
        let out = split_tracks(&line("a", 20, 60, 5.0), &SplitOptions::default());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 20);
    }

    #[test]
    fn gap_splits_track() {
        let mut pts = line("a", 20, 60, 5.0);
        for p in pts.iter_mut().skip(10) {
            p.timestamp += 20 * 60;
        }
        let out = split_tracks(&pts, &SplitOptions { gap_seconds: 600, ..Default::default() });
        assert_eq!(out.iter().map(Trajectory::len).collect::<Vec<_>>(), vec![10, 10]);
    }

    #[test]
    fn u_turn_splits_at_vertex() {
        // East for points 0..=12, then back west.
        let pts: Vec<TrackPoint> = (0..24)
            .map(|i| {
                let x = if i <= 12 { i as f64 * 100.0 } else { 1200.0 - (i - 12) as f64 * 100.0 };
                TrackPoint::new("u", i as i64 * 60, x, if i > 12 { 20.0 } else { 0.0 })
            })
            .collect();
        // Brute-force scan for vertices whose in/out legs differ by > 150 deg.
        let turns: Vec<usize> = (1..pts.len() - 1)
            .filter(|&k| {
                let hin = heading_degrees(&pts[k - 1], &pts[k]).unwrap();
                let hout = heading_degrees(&pts[k], &pts[k + 1]).unwrap();
                heading_change(hin, hout) > 150.0
            })
            .collect();
        assert_eq!(turns, vec![12]);

        let out = split_tracks(&pts, &SplitOptions { turn_degrees: 150.0, ..Default::default() });
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].points.last().unwrap().timestamp, 11 * 60);
        assert_eq!(out[1].points[0].timestamp, 12 * 60);
    }

    #[test]
    fn fewer_than_two_points_is_empty() {
        assert!(split_tracks(&line("a", 1, 60, 1.0), &SplitOptions::default()).is_empty());
        assert!(split_tracks(&[], &SplitOptions::default()).is_empty());
    }

    #[test]
    fn short_segments_are_dropped() {
        let out = split_tracks(&line("a", 9, 60, 5.0), &SplitOptions::default());
        assert!(out.is_empty());
    }

    #[test]
    fn resample_on_grid_is_identity() {
        let t = traj(line("a", 12, 60, 3.7));
        let r = resample(&t, 60).unwrap();
        assert_eq!(r.len(), 12);
        for (a, b) in t.points.iter().zip(&r.points) {
            assert_eq!(a.position(), b.position());
            assert_eq!(a.timestamp, b.timestamp);
        }
    }

    #[test]
    fn resample_midpoint() {
        let t = traj(vec![TrackPoint::new("a", 0, 0.0, 0.0), TrackPoint::new("a", 120, 120.0, 0.0)]);
        let r = resample(&t, 60).unwrap();
        assert_eq!(r.points[1].timestamp, 60);
        assert_eq!(r.points[1].position(), [60.0, 0.0]);
        assert_eq!(r.points[1].speed_over_ground, Some(1.0));
        assert_eq!(r.points[1].course_over_ground, Some(90.0));
    }

    #[test]
    fn resample_short_span_is_empty() {
        let t = traj(vec![TrackPoint::new("a", 0, 0.0, 0.0), TrackPoint::new("a", 59, 1.0, 0.0)]);
        assert!(resample(&t, 60).is_none());
    }

    #[test]
    fn resample_irregular_matches_piecewise_linear_oracle() {
        let raw = [
            (0, 0.0, 0.0),
            (45, 30.0, 10.0),
            (120, 80.0, -5.0),
            (165, 100.0, 40.0),
            (240, 200.0, 41.0),
            (300, 260.0, 0.0),
        ];
        let pts: Vec<TrackPoint> = raw.iter().map(|&(t, x, y)| TrackPoint::new("a", t, x, y)).collect();
        let r = resample(&traj(pts), 60).unwrap();
        let oracle = |t: f64| -> [f64; 2] {
            for w in raw.windows(2) {
                let (t0, x0, y0) = w[0];
                let (t1, x1, y1) = w[1];
                if t >= t0 as f64 && t <= t1 as f64 {
                    let s = (t - t0 as f64) / (t1 - t0) as f64;
                    return [x0 * (1.0 - s) + x1 * s, y0 * (1.0 - s) + y1 * s];
                }
            }
            unreachable!()
        };
        assert_eq!(r.len(), 6);
        for p in &r.points {
            let o = oracle(p.timestamp as f64);
            assert!((p.easting - o[0]).abs() < 1e-9 && (p.northing - o[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn window_counts() {
        let cfg = WindowConfig::default();
        assert_eq!(window_sequences(&traj(line("a", 30, 60, 1.0)), &[], &cfg).len(), 3);
        assert_eq!(window_sequences(&traj(line("a", 29, 60, 1.0)), &[], &cfg).len(), 2);
        assert!(window_sequences(&traj(line("a", 9, 60, 1.0)), &[], &cfg).is_empty());
    }

    #[test]
    fn neighbours_attached_by_overlap() {
        let ego = traj(line("ego", 30, 60, 1.0));
        // Spans 1000..=1300, inside window one (1000..=1540) only.
        let nb = traj(line("nb", 6, 60, -1.0));
        let samples = window_sequences(&ego, &[ego.clone(), nb.clone()], &WindowConfig::default());
        // Interval-overlap oracle.
        let overlaps: Vec<bool> = samples
            .iter()
            .map(|s| {
                let (lo, hi) = (s.ego.start_time().unwrap(), s.ego.end_time().unwrap());
                nb.start_time().unwrap() <= hi && nb.end_time().unwrap() >= lo
            })
            .collect();
        assert_eq!(overlaps, vec![true, false, false]);
        let attached: Vec<usize> = samples.iter().map(|s| s.neighbors.len()).collect();
        assert_eq!(attached, vec![1, 0, 0]);
        assert_eq!(samples[0].neighbors[0].vessel_id, "nb");
    }

    #[test]
    fn upstream_filter() {
        let axis = RiverAxis::unit(1.0, 0.0).unwrap();
        let up = traj(line("u", 20, 60, 2.0));
        let down = traj(line("d", 20, 60, -2.0));
        assert!(is_upstream(&up, &axis));
        assert!(!is_upstream(&down, &axis));
        let samples = build_samples(&[up, down], &axis, &WindowConfig::default());
        assert_eq!(samples.len(), 2);
        assert!(samples.iter().all(|s| s.ego.vessel_id == "u" && s.neighbors.len() == 1));
    }

    #[test]
    fn clip_keeps_brackets() {
        let t = traj(line("a", 10, 60, 1.0));
        let c = t.clip(1090, 1200).unwrap();
        let ts: Vec<i64> = c.points.iter().map(|p| p.timestamp).collect();
        assert_eq!(ts, vec![1060, 1120, 1180, 1240]);
        assert!(t.clip(2000, 3000).is_none());
    }

    fn arb_track() -> impl Strategy<Value = Vec<TrackPoint>> {
        prop::collection::vec((1i64..150, -500.0f64..500.0, -500.0f64..500.0), 2..40).prop_map(|steps| {
            let mut t = 0;
            steps
                .into_iter()
                .map(|(dt, x, y)| {
                    t += dt;
                    TrackPoint::new("p", t, x, y)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn resample_idempotent(pts in arb_track()) {
            let t = traj(pts);
            if let Some(r1) = resample(&t, 60) {
                let r2 = resample(&r1, 60).unwrap();
                prop_assert_eq!(r1, r2);
            }
        }

        #[test]
        fn resample_reproduces_on_grid_samples(pts in arb_track()) {
            let t = traj(pts);
            if let Some(r) = resample(&t, 60) {
                for w in r.points.windows(2) {
                    prop_assert_eq!(w[1].timestamp - w[0].timestamp, 60);
                }
                for p in &t.points {
                    if let Some(q) = r.points.iter().find(|q| q.timestamp == p.timestamp) {
                        prop_assert!((q.easting - p.easting).abs() <= 1e-9);
                        prop_assert!((q.northing - p.northing).abs() <= 1e-9);
                    }
                }
            }
        }

        #[test]
        fn split_partitions_retained_points(pts in arb_track(), gap in 60i64..300, turn in 30.0f64..179.0) {
            let opts = SplitOptions { gap_seconds: gap, turn_degrees: turn, min_points: 2, step_seconds: 60 };
            let out = split_tracks(&pts, &opts);
            let mut seen: Vec<i64> = out.iter().flat_map(|t| t.points.iter().map(|p| p.timestamp)).collect();
            let n = seen.len();
            seen.dedup();
            prop_assert_eq!(seen.len(), n);
            prop_assert!(seen.windows(2).all(|w| w[0] < w[1]));
            for t in &out {
                prop_assert!(t.points.iter().all(|p| pts.contains(p)));
            }
        }
    }
}
