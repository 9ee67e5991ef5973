"""Python bindings for capenc.

Typical use::

    import capenc
    db = capenc.aggregate_max(capenc.load_db("results.csv"))
    space = capenc.fit(capenc.normalize(db), capenc.Geometry("euclidean", 5))
    space.predict("SkySense Swin-H", "Potsdam@100%/mF1")
"""

from ._capenc import (
    CapencError,
    DeltaMatrix,
    EmbeddingSpace,
    FitConfig,
    Geometry,
    ModelKey,
    ParseError,
    ResultsDb,
    SplitPlan,
    TaskKey,
    TaskStats,
    aggregate_max,
    centrality,
    dataset_quality,
    denormalize,
    evaluate,
    filter_min_degree,
    fit,
    load_db,
    load_embedding,
    normalize,
    place,
    read_csv,
    read_json,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
