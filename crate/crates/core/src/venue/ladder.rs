//! Resting-depth ladder and the piecewise-linear execution model.
//!
//! Depth sits in offset buckets away from the mid. Sweeping a bucket of depth
//! d spread over width w moves the price by w*x/d after x contracts and costs
//! a premium of x*(o + w*x/(2d)) over the mid, where o is the bucket's start
//! offset — the discrete form of linear impact (cost to move a distance m at
//! density eta is eta*m^2/2). Near the probability boundary every bucket's
//! depth is multiplied by `boundary_depth_ratio`, so pushes of equal size cost
//! proportionally more there.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LadderError {
    #[error("ladder needs at least one bucket")]
    Empty,
    #[error("bucket {0} has zero width")]
    ZeroWidth(usize),
    #[error("bucket {0} has negative or non-finite depth")]
    BadDepth(usize),
    #[error("ladder has no resting depth at all")]
    NoDepth,
    #[error("boundary depth ratio {0} must be positive and finite")]
    BadBoundaryRatio(f64),
    #[error("boundary band {0} outside [0, 0.5]")]
    BadBoundaryBand(f64),
}

/// One offset bucket: `width_bps` of price distance holding `depth` contracts,
/// uniformly spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthBucket {
    pub width_bps: u32,
    pub depth: f64,
}

/// Symmetric per-side resting depth, buckets ordered outward from the mid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthLadder {
    buckets: Vec<DepthBucket>,
    boundary_depth_ratio: f64,
    boundary_band: f64,
}

/// What a ladder walk is asked to do.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Demand {
    /// Fill this many contracts.
    Quantity(f64),
    /// Move the price by this much (index units).
    TargetMove(f64),
    /// Spend up to this premium budget.
    Budget(f64),
}

/// Result of walking the ladder from the mid outward.
///
/// `premium` is the cost paid beyond the mid (same sign convention for both
/// directions); `end_offset` is how far from the mid the walk stopped, which
/// equals `move_abs` unless a zero-depth gap was crossed for free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderFill {
    pub qty: f64,
    pub move_abs: f64,
    pub premium: f64,
    pub end_offset: f64,
    /// Demand outlived the resting depth (or, for Budget, the full span was
    /// swept with budget left over).
    pub exhausted: bool,
}

impl DepthLadder {
    pub fn new(
        buckets: Vec<DepthBucket>,
        boundary_depth_ratio: f64,
        boundary_band: f64,
    ) -> Result<Self, LadderError> {
        if buckets.is_empty() {
            return Err(LadderError::Empty);
        }
        for (i, b) in buckets.iter().enumerate() {
            if b.width_bps == 0 {
                return Err(LadderError::ZeroWidth(i));
            }
            if !b.depth.is_finite() || b.depth < 0.0 {
                return Err(LadderError::BadDepth(i));
            }
        }
        if !buckets.iter().any(|b| b.depth > 0.0) {
            return Err(LadderError::NoDepth);
        }
        if !boundary_depth_ratio.is_finite() || boundary_depth_ratio <= 0.0 {
            return Err(LadderError::BadBoundaryRatio(boundary_depth_ratio));
        }
        if !(0.0..=0.5).contains(&boundary_band) || !boundary_band.is_finite() {
            return Err(LadderError::BadBoundaryBand(boundary_band));
        }
        Ok(Self {
            buckets,
            boundary_depth_ratio,
            boundary_band,
        })
    }

    /// Default book: thin close to the mid, bulk of the depth further out.
    pub fn default_book() -> Self {
        Self::new(
            vec![
                DepthBucket { width_bps: 50, depth: 100.0 },
                DepthBucket { width_bps: 150, depth: 500.0 },
                DepthBucket { width_bps: 300, depth: 5000.0 },
            ],
            1.7,
            0.1,
        )
        .expect("default book is valid")
    }

    pub fn boundary_depth_ratio(&self) -> f64 {
        self.boundary_depth_ratio
    }

    pub fn boundary_band(&self) -> f64 {
        self.boundary_band
    }

    /// Depth multiplier in force at a given mid. Evaluated once per walk at
    /// the pre-trade mid.
    pub fn depth_multiplier(&self, mid: f64) -> f64 {
        if mid <= self.boundary_band || mid >= 1.0 - self.boundary_band {
            self.boundary_depth_ratio
        } else {
            1.0
        }
    }

    /// Total one-side depth at a given mid.
    pub fn side_depth(&self, mid: f64) -> f64 {
        let m = self.depth_multiplier(mid);
        self.buckets.iter().map(|b| b.depth * m).sum()
    }

    /// Full price span of the ladder (index units).
    pub fn span(&self) -> f64 {
        self.buckets
            .iter()
            .map(|b| b.width_bps as f64 * 1e-4)
            .sum()
    }

    /// Walks the book outward from `mid` until the demand is satisfied or the
    /// span ends. Direction-agnostic: the caller applies the sign.
    pub fn walk(&self, mid: f64, demand: Demand) -> LadderFill {
        let mult = self.depth_multiplier(mid);
        let total = match demand {
            Demand::Quantity(q) => q,
            Demand::TargetMove(m) => m,
            Demand::Budget(b) => b,
        };
        let mut qty = 0.0;
        let mut move_abs = 0.0;
        let mut premium = 0.0;
        let mut offset = 0.0;
        let mut rem = total;

        for b in &self.buckets {
            if rem <= 0.0 {
                break;
            }
            let w = b.width_bps as f64 * 1e-4;
            let d = b.depth * mult;
            if d == 0.0 {
                // Gap: price crosses for free, nothing fills.
                let dm = match demand {
                    Demand::TargetMove(_) => {
                        let dm = rem.min(w);
                        rem -= dm;
                        dm
                    }
                    _ => w,
                };
                move_abs += dm;
                offset += dm;
                continue;
            }
            let (dx, dm, dp) = match demand {
                Demand::Quantity(_) => {
                    let dx = rem.min(d);
                    let dm = w * dx / d;
                    (dx, dm, dx * (offset + w * dx / (2.0 * d)))
                }
                Demand::TargetMove(_) => {
                    let dm = rem.min(w);
                    let dx = d * dm / w;
                    (dx, dm, dx * (offset + dm / 2.0))
                }
                Demand::Budget(_) => {
                    let full = d * (offset + w / 2.0);
                    if rem >= full {
                        (d, w, full)
                    } else {
                        // (d/w)*(dm^2/2 + offset*dm) = rem, positive root.
                        let dm = (-offset
                            + (offset * offset + 2.0 * rem * w / d).sqrt())
                        .min(w);
                        (d * dm / w, dm, rem)
                    }
                }
            };
            qty += dx;
            move_abs += dm;
            premium += dp;
            offset += dm;
            rem -= match demand {
                Demand::Quantity(_) => dx,
                Demand::TargetMove(_) => dm,
                Demand::Budget(_) => dp,
            };
        }

        LadderFill {
            qty,
            move_abs,
            premium,
            end_offset: offset,
            exhausted: rem > 1e-9 * total.abs().max(1.0),
        }
    }
}
