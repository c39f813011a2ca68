//! MovingAI `.map` grids.
//!
//! Passable cells (`.` and `G`) become vertices numbered row-major; edges join
//! 4-connected passable cells.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("row {row}: expected {expected} cells, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}, col {col}: unknown terrain {ch:?}")]
    Terrain { row: usize, col: usize, ch: char },
    #[error("map has no passable cell")]
    NoPassable,
    #[error("map graph rejected: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    height: usize,
    width: usize,
    passable: Vec<bool>,
    vertex_of: Vec<Option<VertexId>>,
}

impl GridMap {
    pub fn from_cells(height: usize, width: usize, passable: Vec<bool>) -> Self {
        assert_eq!(passable.len(), height * width);
        let mut next = 0;
        let vertex_of = passable
            .iter()
            .map(|&p| {
                p.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        GridMap {
            height,
            width,
            passable,
            vertex_of,
        }
    }

    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut height = None;
        let mut width = None;
        for (idx, raw) in lines.by_ref() {
            let line = raw.trim();
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let header = |msg: &str| MapError::Header {
                line: idx + 1,
                msg: msg.to_string(),
            };
            match key {
                "type" => {}
                "height" | "width" => {
                    let value: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| header("expected a non-negative integer"))?;
                    if key == "height" {
                        height = Some(value);
                    } else {
                        width = Some(value);
                    }
                }
                "map" => break,
                _ => return Err(header("unexpected header line")),
            }
        }
        let (height, width) = match (height, width) {
            (Some(h), Some(w)) => (h, w),
            _ => {
                return Err(MapError::Header {
                    line: 0,
                    msg: "missing height or width".into(),
                })
            }
        };
        let mut passable = Vec::with_capacity(height * width);
        let mut rows = 0;
        for (_, raw) in lines {
            let row = raw.trim_end_matches(['\r', '\n']);
            if rows == height {
                return Err(MapError::RowCount {
                    expected: height,
                    found: rows + 1,
                });
            }
            let cells: Vec<char> = row.chars().collect();
            if cells.len() != width {
                return Err(MapError::RowWidth {
                    row: rows,
                    expected: width,
                    found: cells.len(),
                });
            }
            for (col, ch) in cells.into_iter().enumerate() {
                passable.push(match ch {
                    '.' | 'G' => true,
                    '@' | 'O' | 'T' | 'W' => false,
                    _ => return Err(MapError::Terrain { row: rows, col, ch }),
                });
            }
            rows += 1;
        }
        if rows != height {
            return Err(MapError::RowCount {
                expected: height,
                found: rows,
            });
        }
        Ok(Self::from_cells(height, width, passable))
    }

    pub fn to_map_string(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        for row in self.passable.chunks(self.width) {
            out.extend(row.iter().map(|&p| if p { '.' } else { '@' }));
            out.push('\n');
        }
        out
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_passable(&self, row: usize, col: usize) -> bool {
        row < self.height && col < self.width && self.passable[row * self.width + col]
    }

    pub fn vertex_at(&self, row: usize, col: usize) -> Option<VertexId> {
        if row < self.height && col < self.width {
            self.vertex_of[row * self.width + col]
        } else {
            None
        }
    }

    pub fn passable_count(&self) -> usize {
        self.passable.iter().filter(|&&p| p).count()
    }

    /// The 4-connected graph over passable cells. Disconnected maps are
    /// rejected; see [`GridMap::largest_component`].
    pub fn to_graph(&self) -> Result<Graph, MapError> {
        let mut edges = Vec::new();
        let mut coords = Vec::new();
        for r in 0..self.height {
            for c in 0..self.width {
                let Some(v) = self.vertex_at(r, c) else { continue };
                coords.push((r, c));
                if let Some(w) = self.vertex_at(r, c + 1) {
                    edges.push((v, w));
                }
                if let Some(w) = self.vertex_at(r + 1, c) {
                    edges.push((v, w));
                }
            }
        }
        if coords.is_empty() {
            return Err(MapError::NoPassable);
        }
        Ok(Graph::from_edges(coords.len(), edges)?.with_coords(coords)?)
    }

    /// Copy of the map with every passable cell outside the largest
    /// 4-connected component turned into an obstacle (ties: the component
    /// containing the first cell in row-major order).
    pub fn largest_component(&self) -> GridMap {
        let cells = self.height * self.width;
        let mut comp = vec![usize::MAX; cells];
        let mut sizes = Vec::new();
        for start in 0..cells {
            if !self.passable[start] || comp[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut size = 0;
            while let Some(cell) = stack.pop() {
                size += 1;
                let (r, c) = (cell / self.width, cell % self.width);
                let mut push = |rr: usize, cc: usize| {
                    let n = rr * self.width + cc;
                    if self.passable[n] && comp[n] == usize::MAX {
                        comp[n] = id;
                        stack.push(n);
                    }
                };
                if r > 0 {
                    push(r - 1, c);
                }
                if r + 1 < self.height {
                    push(r + 1, c);
                }
                if c > 0 {
                    push(r, c - 1);
                }
                if c + 1 < self.width {
                    push(r, c + 1);
                }
            }
            sizes.push(size);
        }
        let best = (0..sizes.len()).rev().max_by_key(|&i| sizes[i]);
        let passable = (0..cells).map(|i| Some(comp[i]) == best && self.passable[i]).collect();
        GridMap::from_cells(self.height, self.width, passable)
    }

    /// Map with `round(ratio * h * w)` obstacle cells placed uniformly at
    /// random (seeded), restricted to its largest component.
    pub fn random_obstacles(height: usize, width: usize, ratio: f64, seed: u64) -> GridMap {
        let cells = height * width;
        let blocked = (ratio * cells as f64).round() as usize;
        let mut order: Vec<usize> = (0..cells).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut passable = vec![true; cells];
        for &i in &order[..blocked.min(cells)] {
            passable[i] = false;
        }
        GridMap::from_cells(height, width, passable).largest_component()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "type octile\nheight 3\nwidth 4\nmap\n..@.\nG...\n@T..\n";

    #[test]
    fn parses_and_numbers_row_major() {
        let m = GridMap::parse(SMALL).unwrap();
        assert_eq!((m.height(), m.width()), (3, 4));
        assert_eq!(m.passable_count(), 9);
        assert_eq!(m.vertex_at(0, 0), Some(0));
        assert_eq!(m.vertex_at(0, 2), None);
        assert_eq!(m.vertex_at(0, 3), Some(2));
        assert_eq!(m.vertex_at(1, 0), Some(3));
        let g = m.to_graph().unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.coords(3), Some((1, 0)));
        // (0,3) connects only downwards to (1,3)
        assert_eq!(g.neighbors(2), &[6]);
    }

    #[test]
    fn rejects_disconnected_map() {
        let text = "type octile\nheight 1\nwidth 3\nmap\n.@.\n";
        let m = GridMap::parse(text).unwrap();
        assert!(matches!(
            m.to_graph(),
            Err(MapError::Graph(GraphError::Disconnected { components: 2 }))
        ));
        assert_eq!(m.largest_component().passable_count(), 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            GridMap::parse("type octile\nheight 1\nwidth 2\nmap\n.x\n"),
            Err(MapError::Terrain { ch: 'x', .. })
        ));
        assert!(matches!(
            GridMap::parse("type octile\nheight 2\nwidth 2\nmap\n..\n"),
            Err(MapError::RowCount { .. })
        ));
        assert!(matches!(
            GridMap::parse("type octile\nheight 1\nwidth 2\nmap\n...\n"),
            Err(MapError::RowWidth { .. })
        ));
        assert!(GridMap::parse("height 1\nmap\n.\n").is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let m = GridMap::random_obstacles(16, 16, 0.2, 3);
        let again = GridMap::parse(&m.to_map_string()).unwrap();
        assert_eq!(m, again);
        assert!(again.to_graph().is_ok());
    }
}
