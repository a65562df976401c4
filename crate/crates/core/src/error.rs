use crate::model::ItemId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate hull: {0}")]
    DegenerateHull(&'static str),
    #[error("non-positive dimension {value} on item {id}")]
    NonPositiveDimension { id: ItemId, value: f64 },
    #[error("item {id} has width {width} wider than the strip ({strip})")]
    ItemTooWide { id: ItemId, width: f64, strip: f64 },
    #[error("item {id} does not fit the {width} x {depth} base")]
    BoxExceedsBase { id: ItemId, width: f64, depth: f64 },
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("unknown item {0}")]
    UnknownItem(ItemId),
    #[error("instance has no items")]
    EmptyInstance,
    #[error("brute force supports at most 3 items, got {0}")]
    TooManyItems(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad range: {0}")]
    BadRange(String),
    #[error("no candidate base produced a packing")]
    NoFeasibleCandidate,
}
