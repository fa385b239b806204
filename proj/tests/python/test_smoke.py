"""Smoke tests for the python bindings."""

import json
import math
import os

import pytest

import biorag

FIXTURES = os.environ.get("BIORAG_FIXTURES", "tests/fixtures")


def fixture(name: str) -> str:
    return os.path.join(FIXTURES, name)


def test_clean_text_is_idempotent():
    raw = "<table><tr>junk</tr></table>Visit https://example.org now\tplease"
    once = biorag.clean_text(raw)
    assert once == "Visit now please"
    assert biorag.clean_text(once) == once


def test_reference_embed_unit_norm():
    vec = biorag.reference_embed("adaptive immunity in animals")
    assert len(vec) == 256
    assert math.isclose(math.sqrt(sum(v * v for v in vec)), 1.0, abs_tol=1e-6)
    assert biorag.reference_embed("gene protein") == biorag.reference_embed("protein gene")


def test_cosine_similarity_bounds():
    a = biorag.reference_embed("innate immunity")
    assert math.isclose(biorag.cosine_similarity(a, a), 1.0, abs_tol=1e-6)
    with pytest.raises(ValueError):
        biorag.reference_embed("   ")


def test_index_search_matches_brute_force():
    docs = [
        biorag.CleanDocument(id=f"d{i}", title=t, abstract=a, mesh=m)
        for i, (t, a, m) in enumerate([
            ("alpha", "alpha alpha", ["B"]),
            ("alpha", "beta", ["B"]),
            ("beta", "beta beta", ["C"]),
            ("gamma", "gamma gamma", ["B"]),
        ])
    ]
    index = biorag.VectorIndex.build(docs)
    assert len(index) == 4

    hits = index.search_text("alpha beta", ["B"], k=2)
    query = biorag.reference_embed("alpha beta")
    scored = []
    for doc in docs:
        if "B" not in doc.mesh:
            continue
        vec = biorag.reference_embed(doc.title + " " + doc.abstract)
        scored.append((doc.id, sum(q * v for q, v in zip(query, vec))))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    assert [h.doc_id for h in hits] == [doc_id for doc_id, _ in scored[:2]]
    assert hits[0].rank == 1 and not hits[0].fallback_used


def test_mesh_filter_roundtrip():
    vocab = biorag.MeshVocabulary.load_file(fixture("mesh_vocab.tsv"))
    assert "Adaptive Immunity" in vocab
    labels = biorag.predict_mesh_lexical(
        "What are the differences between innate immunity and adaptive immunity?", vocab)
    assert labels[0] == "Adaptive Immunity"

    f = biorag.build_filter(labels)
    assert f.mode == "any-of"
    doc = biorag.CleanDocument(id="x", mesh=["Adaptive Immunity"])
    assert f.matches(doc)
    assert biorag.build_filter([]).mode == "match-all"


def test_manuals_and_prompts():
    manuals = biorag.list_manuals()
    assert len(manuals) == 6
    assert manuals[0]["name"] == "Gene"
    assert "the input must be a specific gene name" in manuals[0]["manual_text"]
    assert "select the RETRIEVAL METHODS you consider" in biorag.prompt_text("P1")
    rendered = biorag.render_prompt("P4", {"Results": "r", "Question": "q"})
    assert "If they do not support it, output" in rendered
    assert "{Results}" not in rendered


def test_scoring():
    assert biorag.normalize_answer("yes", "ProteinCodingBoolean") == "TRUE"
    assert biorag.normalize_answer("No.", "ProteinCodingBoolean") == "NA"
    assert biorag.score_example(["G1", "G2", "X"], ["G1", "G2", "G3", "G4"],
                                "GeneDiseaseRecall") == 0.5
    report = biorag.evaluate_files(fixture("datasets/exact_match.jsonl"), "ExactMatch",
                                   fixture("datasets/exact_match_predictions.jsonl"))
    assert report["n"] == 20
    assert report["per_task"]["ExactMatch"] == pytest.approx(0.7)


def test_engine_scripted_session(tmp_path):
    corpus_index = tmp_path / "small.idx"
    biorag.VectorIndex.build_from_corpus(fixture("corpus_small.jsonl")).save_file(
        str(corpus_index))

    question = "What are the differences between innate immunity and adaptive immunity?"
    config = {
        "index_path": str(corpus_index),
        "mesh_vocab_path": fixture("mesh_vocab.tsv"),
        "mesh_predictor": {"kind": "scripted", "fixture": fixture("mesh_scripted.jsonl")},
        "retrievers": {
            "mode": "replay",
            "entity_cassette": fixture("cassettes/entity.jsonl"),
            "web_cassette": fixture("cassettes/web.jsonl"),
        },
        "backend": {
            "kind": "scripted",
            "script": [
                "Web Search", "innate vs adaptive immunity overview", "NO",
                "PubMed local vector database", question, "YES",
                "Adaptive immunity is antigen-specific.",
            ],
        },
    }
    engine = biorag.Engine(json.dumps(config))
    assert engine.ready()
    result = engine.ask(question)
    assert result["answer"] == "Adaptive immunity is antigen-specific."
    assert result["iterations"] == 2
    assert not result["exhausted"]
    phases = [step.split(":")[1] for step in result["trace"]]
    assert phases == ["Select", "Rewrite", "Execute", "Evaluate"] * 2 + ["Generate"]
