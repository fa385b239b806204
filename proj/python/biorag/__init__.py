"""Taxonomy-filtered hybrid retrieval with a self-evaluated agent loop."""

from ._core import (
    CleanDocument,
    Engine,
    MeshFilter,
    MeshVocabulary,
    SearchHit,
    VectorIndex,
    build_filter,
    clean_text,
    cosine_similarity,
    evaluate_files,
    ingest_file,
    list_manuals,
    normalize_answer,
    predict_mesh_lexical,
    prompt_text,
    reference_embed,
    render_prompt,
    score_example,
)

__all__ = [
    "CleanDocument",
    "Engine",
    "MeshFilter",
    "MeshVocabulary",
    "SearchHit",
    "VectorIndex",
    "build_filter",
    "clean_text",
    "cosine_similarity",
    "evaluate_files",
    "ingest_file",
    "list_manuals",
    "normalize_answer",
    "predict_mesh_lexical",
    "prompt_text",
    "reference_embed",
    "render_prompt",
    "score_example",
]

__version__ = "0.1.0"
