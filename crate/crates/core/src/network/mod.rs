//! Directed road network: loading, validation, travel-time routing and the
//! rectangular zone grid used by the trajectory generator.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! N <vertex-id> <x> <y>
//! E <segment-id> <from-id> <to-id> <length> <speed>
//! ```
//!
//! Travel time of a segment is `length / speed`. Coordinates are planar and
//! unitless.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod synthetic;

pub type VertexId = u64;
pub type SegmentId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: SegmentId,
    pub from: VertexId,
    pub to: VertexId,
    /// Meters.
    pub length: f64,
    /// km/h.
    pub speed: f64,
}

impl Segment {
    pub fn travel_time(&self) -> f64 {
        self.length / self.speed
    }
}

/// A validated, immutable road network.
#[derive(Clone, Debug)]
pub struct RoadNetwork {
    vertices: Vec<Vertex>,
    segments: Vec<Segment>,
    vertex_index: HashMap<VertexId, usize>,
    segment_index: HashMap<SegmentId, usize>,
    /// Outgoing segment indices per vertex index, sorted by segment id.
    outgoing: Vec<Vec<usize>>,
}

/// A shortest route: segment ids in travel order and the total travel time.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub segments: Vec<SegmentId>,
    pub travel_time: f64,
}

impl RoadNetwork {
    pub fn new(vertices: Vec<Vertex>, segments: Vec<Segment>) -> Result<Self> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.id, i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "vertex",
                    id: v.id,
                });
            }
        }
        let mut segment_index = HashMap::with_capacity(segments.len());
        let mut outgoing = vec![Vec::new(); vertices.len()];
        for (i, s) in segments.iter().enumerate() {
            if segment_index.insert(s.id, i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "segment",
                    id: s.id,
                });
            }
            for endpoint in [s.from, s.to] {
                if !vertex_index.contains_key(&endpoint) {
                    return Err(Error::DanglingEndpoint {
                        segment: s.id,
                        vertex: endpoint,
                    });
                }
            }
            // NaN fails both comparisons and is rejected here too.
            if !(s.length > 0.0) || !s.length.is_finite() {
                return Err(Error::NonPositive {
                    segment: s.id,
                    field: "length",
                    value: s.length,
                });
            }
            if !(s.speed > 0.0) || !s.speed.is_finite() {
                return Err(Error::NonPositive {
                    segment: s.id,
                    field: "speed",
                    value: s.speed,
                });
            }
            outgoing[vertex_index[&s.from]].push(i);
        }
        for out in &mut outgoing {
            out.sort_by_key(|&i| segments[i].id);
        }
        Ok(RoadNetwork {
            vertices,
            segments,
            vertex_index,
            segment_index,
            outgoing,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses the network text format. `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut segments = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let id = |i: usize| -> Result<u64> {
                fields[i]
                    .parse::<u64>()
                    .map_err(|_| Error::parse(origin, lineno, format!("bad id {:?}", fields[i])))
            };
            let num = |i: usize| -> Result<f64> {
                fields[i]
                    .parse::<f64>()
                    .map_err(|_| Error::parse(origin, lineno, format!("bad number {:?}", fields[i])))
            };
            match fields[0] {
                "N" if fields.len() == 4 => vertices.push(Vertex {
                    id: id(1)?,
                    x: num(2)?,
                    y: num(3)?,
                }),
                "E" if fields.len() == 6 => segments.push(Segment {
                    id: id(1)?,
                    from: id(2)?,
                    to: id(3)?,
                    length: num(4)?,
                    speed: num(5)?,
                }),
                "N" | "E" => {
                    return Err(Error::parse(
                        origin,
                        lineno,
                        format!("wrong field count for {} record", fields[0]),
                    ))
                }
                other => {
                    return Err(Error::parse(
                        origin,
                        lineno,
                        format!("unknown record type {other:?}"),
                    ))
                }
            }
        }
        Self::new(vertices, segments)
    }

    /// Serializes to the text format; `parse(to_text())` reproduces the network.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "N {} {} {}", v.id, v.x, v.y);
        }
        for s in &self.segments {
            let _ = writeln!(
                out,
                "E {} {} {} {} {}",
                s.id, s.from, s.to, s.length, s.speed
            );
        }
        out
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertex_index.get(&id).map(|&i| &self.vertices[i])
    }

    pub fn segment(&self, id: SegmentId) -> Option<&Segment> {
        self.segment_index.get(&id).map(|&i| &self.segments[i])
    }

    pub fn contains_segment(&self, id: SegmentId) -> bool {
        self.segment_index.contains_key(&id)
    }

    /// Total travel time along `path`, or an error naming the first unknown segment.
    pub fn path_cost(&self, path: &[SegmentId]) -> Result<f64> {
        path.iter().try_fold(0.0, |acc, &id| {
            self.segment(id)
                .map(|s| acc + s.travel_time())
                .ok_or(Error::UnknownSegment(id))
        })
    }

    /// True when consecutive segments are head-to-tail connected.
    pub fn is_connected_path(&self, path: &[SegmentId]) -> bool {
        let segs: Option<Vec<&Segment>> = path.iter().map(|&id| self.segment(id)).collect();
        match segs {
            Some(segs) => segs.windows(2).all(|w| w[0].to == w[1].from),
            None => false,
        }
    }

    /// Minimum travel-time route from `from` to `to`.
    ///
    /// Among routes of exactly equal travel time the lexicographically
    /// smallest segment-id sequence is returned. `Ok(None)` means `to` is
    /// unreachable.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Result<Option<Route>> {
        let src = *self
            .vertex_index
            .get(&from)
            .ok_or(Error::UnknownVertex(from))?;
        let dst = *self.vertex_index.get(&to).ok_or(Error::UnknownVertex(to))?;
        if src == dst {
            return Ok(Some(Route {
                segments: Vec::new(),
                travel_time: 0.0,
            }));
        }

        let n = self.vertices.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Reverse((Time(0.0), src)));
        while let Some(Reverse((Time(d), u))) = heap.pop() {
            if settled[u] {
                continue;
            }
            settled[u] = true;
            if u == dst {
                break;
            }
            for &si in &self.outgoing[u] {
                let seg = &self.segments[si];
                let v = self.vertex_index[&seg.to];
                let nd = d + seg.travel_time();
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((Time(nd), v)));
                }
            }
        }
        if !settled[dst] {
            return Ok(None);
        }

        // Tight edges (dist[u] + t == dist[v]) form a DAG of all optimal
        // routes. Mark vertices that reach dst inside that DAG, then walk
        // forward taking the smallest segment id that stays on it.
        let tight = |si: usize| -> Option<usize> {
            let seg = &self.segments[si];
            let u = self.vertex_index[&seg.from];
            let v = self.vertex_index[&seg.to];
            (settled[u] && settled[v] && dist[u] + seg.travel_time() == dist[v]).then_some(v)
        };
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (si, seg) in self.segments.iter().enumerate() {
            if tight(si).is_some() {
                incoming[self.vertex_index[&seg.to]].push(si);
            }
        }
        let mut reaches = vec![false; n];
        reaches[dst] = true;
        let mut stack = vec![dst];
        while let Some(v) = stack.pop() {
            for &si in &incoming[v] {
                let u = self.vertex_index[&self.segments[si].from];
                if !reaches[u] {
                    reaches[u] = true;
                    stack.push(u);
                }
            }
        }

        let mut segments = Vec::new();
        let mut cur = src;
        while cur != dst {
            let (si, next) = self.outgoing[cur]
                .iter()
                .find_map(|&si| tight(si).filter(|&v| reaches[v]).map(|v| (si, v)))
                .expect("tight DAG path to destination");
            segments.push(self.segments[si].id);
            cur = next;
        }
        Ok(Some(Route {
            segments,
            travel_time: dist[dst],
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Time(f64);

impl Eq for Time {}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Equal-size rectangular zones over the network's bounding box.
///
/// Cells are indexed `row * cols + col`, row 0 at minimum y. A vertex lying
/// exactly on an interior border belongs to the lower-index cell.
#[derive(Clone, Debug, Serialize)]
pub struct ZoneGrid {
    pub rows: usize,
    pub cols: usize,
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
    cells: Vec<Vec<VertexId>>,
}

impl ZoneGrid {
    pub fn build(net: &RoadNetwork, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config(format!("grid must be at least 1x1, got {rows}x{cols}")));
        }
        if net.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
        let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in net.vertices() {
            min_x = min_x.min(v.x);
            min_y = min_y.min(v.y);
            max_x = max_x.max(v.x);
            max_y = max_y.max(v.y);
        }
        let mut grid = ZoneGrid {
            rows,
            cols,
            min_x,
            min_y,
            max_x,
            max_y,
            cells: vec![Vec::new(); rows * cols],
        };
        for v in net.vertices() {
            let cell = grid.cell_of(v.x, v.y);
            grid.cells[cell].push(v.id);
        }
        Ok(grid)
    }

    /// Cell index of a point inside the bounding box.
    pub fn cell_of(&self, x: f64, y: f64) -> usize {
        let row = band(y, self.min_y, self.max_y, self.rows);
        let col = band(x, self.min_x, self.max_x, self.cols);
        row * self.cols + col
    }

    pub fn cells(&self) -> &[Vec<VertexId>] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &[VertexId] {
        &self.cells[index]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

// Interval k covers (lo + k*w, lo + (k+1)*w]; the first one also takes lo.
fn band(v: f64, lo: f64, hi: f64, count: usize) -> usize {
    let span = hi - lo;
    if span <= 0.0 {
        return 0;
    }
    let t = (v - lo) * count as f64 / span;
    let k = t.ceil() as i64 - 1;
    k.clamp(0, count as i64 - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(id: u64, from: u64, to: u64, length: f64, speed: f64) -> Segment {
        Segment {
            id,
            from,
            to,
            length,
            speed,
        }
    }

    fn vtx(id: u64, x: f64, y: f64) -> Vertex {
        Vertex { id, x, y }
    }

    #[test]
    fn parses_comments_and_records() {
        let text = "# tiny\nN 0 0 0\nN 1 1.5 0  # east\n\nE 7 0 1 150 50\n";
        let net = RoadNetwork::parse(text, "mem").unwrap();
        assert_eq!(net.vertices().len(), 2);
        assert_eq!(net.segments().len(), 1);
        assert_eq!(net.segment(7).unwrap().to, 1);
    }

    #[test]
    fn zero_segments_is_valid() {
        let net = RoadNetwork::parse("N 1 0 0\nN 2 1 1\n", "mem").unwrap();
        assert!(net.segments().is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = RoadNetwork::parse("N 0 0 0\nN 1 x 0\n", "f.net").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = RoadNetwork::parse("N 0 0 0\nQ 1\n", "f.net").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = RoadNetwork::parse("E 0 0 1 1\n", "f.net").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_invalid_networks() {
        let err = RoadNetwork::parse("N 0 0 0\nE 1 0 9 10 10\n", "m").unwrap_err();
        assert!(matches!(err, Error::DanglingEndpoint { segment: 1, vertex: 9 }));
        let err = RoadNetwork::parse("N 0 0 0\nN 0 1 1\n", "m").unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "vertex", id: 0 }));
        let err =
            RoadNetwork::parse("N 0 0 0\nN 1 0 0\nE 3 0 1 1 1\nE 3 1 0 1 1\n", "m").unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "segment", id: 3 }));
        let err = RoadNetwork::parse("N 0 0 0\nN 1 0 0\nE 3 0 1 0 1\n", "m").unwrap_err();
        assert!(matches!(err, Error::NonPositive { field: "length", .. }));
        let err = RoadNetwork::parse("N 0 0 0\nN 1 0 0\nE 3 0 1 5 -2\n", "m").unwrap_err();
        assert!(matches!(err, Error::NonPositive { field: "speed", .. }));
    }

    #[test]
    fn text_round_trip() {
        let net = RoadNetwork::new(
            vec![vtx(0, 0.25, -1.0), vtx(5, 3.0, 1e-3)],
            vec![seg(2, 0, 5, 12.5, 30.0), seg(1, 5, 0, 0.1, 90.0)],
        )
        .unwrap();
        let back = RoadNetwork::parse(&net.to_text(), "rt").unwrap();
        assert_eq!(back.vertices(), net.vertices());
        assert_eq!(back.segments(), net.segments());
    }

    #[test]
    fn identity_route_is_empty() {
        let net = RoadNetwork::new(vec![vtx(0, 0.0, 0.0)], vec![]).unwrap();
        let r = net.shortest_path(0, 0).unwrap().unwrap();
        assert!(r.segments.is_empty());
        assert_eq!(r.travel_time, 0.0);
    }

    #[test]
    fn diamond_prefers_faster_arm() {
        // 0 -> 1 -> 3 is short but slow, 0 -> 2 -> 3 long but fast.
        let net = RoadNetwork::new(
            vec![
                vtx(0, 0.0, 0.0),
                vtx(1, 1.0, 1.0),
                vtx(2, 1.0, -1.0),
                vtx(3, 2.0, 0.0),
            ],
            vec![
                seg(10, 0, 1, 100.0, 10.0),
                seg(11, 1, 3, 100.0, 10.0),
                seg(20, 0, 2, 300.0, 90.0),
                seg(21, 2, 3, 300.0, 90.0),
            ],
        )
        .unwrap();
        let r = net.shortest_path(0, 3).unwrap().unwrap();
        assert_eq!(r.segments, vec![20, 21]);
        assert!((r.travel_time - 600.0 / 90.0).abs() < 1e-12);
    }

    #[test]
    fn equal_cost_routes_pick_smallest_ids() {
        let net = RoadNetwork::new(
            vec![vtx(0, 0.0, 0.0), vtx(1, 1.0, 1.0), vtx(2, 1.0, -1.0), vtx(3, 2.0, 0.0)],
            vec![
                seg(5, 0, 1, 10.0, 10.0),
                seg(9, 1, 3, 10.0, 10.0),
                seg(6, 0, 2, 10.0, 10.0),
                seg(1, 2, 3, 10.0, 10.0),
            ],
        )
        .unwrap();
        assert_eq!(net.shortest_path(0, 3).unwrap().unwrap().segments, vec![5, 9]);
    }

    #[test]
    fn disconnected_is_unreachable() {
        let net = RoadNetwork::new(
            vec![vtx(0, 0.0, 0.0), vtx(1, 1.0, 0.0), vtx(2, 5.0, 0.0), vtx(3, 6.0, 0.0)],
            vec![seg(0, 0, 1, 1.0, 1.0), seg(1, 2, 3, 1.0, 1.0)],
        )
        .unwrap();
        assert_eq!(net.shortest_path(0, 3).unwrap(), None);
        // Direction matters.
        assert_eq!(net.shortest_path(1, 0).unwrap(), None);
        assert!(matches!(net.shortest_path(0, 42), Err(Error::UnknownVertex(42))));
    }

    #[test]
    fn grid_single_cell_holds_everything() {
        let net = RoadNetwork::new(
            vec![vtx(0, 0.0, 0.0), vtx(1, 3.0, 7.0), vtx(2, -1.0, 2.0)],
            vec![],
        )
        .unwrap();
        let g = ZoneGrid::build(&net, 1, 1).unwrap();
        assert_eq!(g.cells()[0].len(), 3);
        assert_eq!((g.min_x, g.max_x, g.min_y, g.max_y), (-1.0, 3.0, 0.0, 7.0));
    }

    #[test]
    fn grid_corners_one_per_cell() {
        let net = RoadNetwork::new(
            vec![vtx(0, 0.0, 0.0), vtx(1, 4.0, 0.0), vtx(2, 0.0, 2.0), vtx(3, 4.0, 2.0)],
            vec![],
        )
        .unwrap();
        let g = ZoneGrid::build(&net, 2, 2).unwrap();
        assert_eq!(g.cells(), &[vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn grid_border_goes_to_lower_cell() {
        let net = RoadNetwork::new(
            vec![vtx(0, 0.0, 0.0), vtx(1, 4.0, 4.0), vtx(2, 2.0, 2.0)],
            vec![],
        )
        .unwrap();
        let g = ZoneGrid::build(&net, 2, 2).unwrap();
        assert_eq!(g.cell_of(2.0, 2.0), 0);
        assert_eq!(g.cells().iter().map(Vec::len).sum::<usize>(), 3);
        assert_eq!(g.cells()[0], vec![0, 2]);
    }

    #[test]
    fn grid_errors() {
        let empty = RoadNetwork::new(vec![], vec![]).unwrap();
        assert!(matches!(ZoneGrid::build(&empty, 2, 2), Err(Error::EmptyNetwork)));
        let one = RoadNetwork::new(vec![vtx(0, 0.0, 0.0)], vec![]).unwrap();
        assert!(matches!(ZoneGrid::build(&one, 0, 2), Err(Error::Config(_))));
    }
}
