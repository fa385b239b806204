#!/usr/bin/env python3
"""Regenerates the committed test fixtures and golden files.

Everything here is deterministic (fixed seed). The golden index is written by
an independent byte-level implementation of the index format and the
reference embedder, so the C++ round-trip test cross-checks both.
"""

import json
import math
import random
import struct
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN = ROOT / "tests" / "golden"
DATA = ROOT / "data"

rng = random.Random(20240811)

# ---------------------------------------------------------------------------
# Prompt templates and manuals (golden transcriptions)

PROMPTS = {
    "P1": (
        "To provide the most helpful and accurate response to the following Question: "
        "{Question}. You have been given descriptions of several RETRIEVAL METHODS: "
        "{Retrieval}. Please select the RETRIEVAL METHODS you consider the most appropriate "
        "for addressing this question."
    ),
    "P2": (
        "Based on the RETRIEVAL METHODS you selected: {Retrieval}, and considering the "
        "Question: {Question} and the Input Requirements of the retrieval method, please "
        "REWRITE the search query accordingly."
    ),
    "P3": (
        "Now, using the rewritten QUERY: {Query} and the retrieval FILTER methods: "
        "{Retrieval}, perform a logical combination to execute the search effectively."
    ),
    "P4": (
        "Based on the RETRIEVAL RESULTS from the above steps: {Results}, please evaluate "
        "whether the RESULTS support answering the original Question: {Question}. If they do "
        'not support it, output "NO". If they do support it, output "YES".'
    ),
    "P5": (
        "Based on the RETRIEVAL RESULTS: {Results}, perform a comprehensive reasoning and "
        "provide an answer to the Question: {Question}."
    ),
}

MANUALS = {
    "gene": (
        "The Gene database search engine is a valuable tool for retrieving comprehensive "
        "information about genes, including gene structure, function, and related genetic "
        "events. It is particularly useful for answering detailed questions regarding "
        "gene-related research and findings.  To utilize this search engine effectively, the "
        "input must be a specific gene name."
    ),
    "dbsnp": (
        "The dbSNP database search engine is an essential tool for retrieving detailed "
        "information about single nucleotide polymorphisms (SNPs) and other genetic "
        "variations. It is particularly useful for answering questions related to genetic "
        "diversity, allele frequency, and related genetic studies. To utilize this search "
        "engine effectively, the input must be a specific SNP identifier or genetic variant "
        "name."
    ),
    "genome": (
        "The Genome database search engine is an indispensable tool for accessing "
        "comprehensive information about entire genomes, including their sequences, "
        "annotations, and functional elements. It is particularly useful for answering "
        "complex questions about genomic structures, variations, and comparative genomics. "
        "To use this search engine effectively, the input must be a specific genome name or "
        "identifier."
    ),
    "protein": (
        "The Protein database search engine is a crucial resource for obtaining detailed "
        "information about proteins, including their sequences, structures, functions, and "
        "interactions. It is particularly useful for answering questions related to protein "
        "biology, biochemical properties, and molecular function. To use this search engine "
        "effectively, the input must be a specific protein name or identifier."
    ),
    "web_search": (
        "The Web Search Engine is a powerful tool designed to help you find information "
        "about current events quickly and efficiently. It is especially useful for obtaining "
        "the latest news, updates, and developments on a wide range of topics. To use this "
        "search engine effectively, simply enter a relevant search query."
    ),
    "pubmed": (
        "The PubMed local vector database search engine is an advanced tool designed for "
        "retrieving biomedical literature and research articles using vector-based search "
        "techniques. It is particularly useful for answering detailed questions about "
        "medical research, clinical studies, and scientific discoveries. To utilize this "
        "search engine effectively, the input should be a specific query or topic of "
        "interest."
    ),
}


def write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def write_text(path: Path, text: str) -> None:
    write_bytes(path, text.encode("utf-8"))


def write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Independent reference-embedder + index-format implementation


def fnv1a64(data: bytes) -> int:
    h = 14695981039346656037
    for c in data:
        h ^= c
        h = (h * 1099511628211) % (1 << 64)
    return h


def reference_embed(text: str):
    counts = [0] * 256
    token = []
    any_token = False
    trimmed = text.strip()
    for ch in trimmed + "\0":
        if ch.isascii() and ch.isalnum():
            token.append(ch.lower())
            continue
        if token:
            counts[fnv1a64("".join(token).encode()) % 256] += 1
            any_token = True
            token = []
    if not any_token:
        counts[fnv1a64(trimmed.encode()) % 256] = 1
    norm = math.sqrt(sum(c * c for c in counts))
    return [struct.unpack("<f", struct.pack("<f", c / norm))[0] for c in counts]


def write_index(path: Path, docs) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        def u32(v):
            f.write(struct.pack("<I", v))

        def s(v):
            b = v.encode("utf-8")
            u32(len(b))
            f.write(b)

        f.write(b"BIORAG-IDX v1\n")
        s("ref256")
        s("1")
        u32(256)
        f.write(struct.pack("<Q", len(docs)))
        for doc in docs:
            s(doc["id"])
            s(doc["title"])
            s(doc["abstract"])
            u32(len(doc["mesh"]))
            for term in doc["mesh"]:
                s(term)
            f.write(struct.pack("<i", doc["year"]))
            for value in reference_embed(doc["title"] + " " + doc["abstract"]):
                f.write(struct.pack("<f", value))


# ---------------------------------------------------------------------------
# MeSH vocabulary and predictor fixtures

VOCAB = [
    ("Adaptive Immunity", ["D23.101.100"]),
    ("Immunity, Innate", ["D23.101.110"]),
    ("Immunity", ["D23.101"]),
    ("Animals", ["B01.050"]),
    ("Humans", ["B01.050.150"]),
    ("Mice", ["B01.050.199"]),
    ("Neoplasms", ["C04"]),
    ("Lung Neoplasms", ["C04.588.894"]),
    ("Breast Neoplasms", ["C04.588.180"]),
    ("DNA", ["D13.444.308"]),
    ("RNA", ["D13.444.735"]),
    ("Proteins", ["D12.776"]),
    ("Genes", ["G05.360.340"]),
    ("Mutation", ["G05.365.590"]),
    ("Polymorphism, Single Nucleotide", ["G05.365.590.175"]),
    ("Genome", ["G05.360.337"]),
    ("Genomics", ["H01.158.273.343"]),
    ("Gene Expression", ["G05.297"]),
    ("Signal Transduction", ["G04.835"]),
    ("Apoptosis", ["G04.146.160"]),
    ("Inflammation", ["C23.550.470"]),
    ("Antibodies", ["D12.776.124.486"]),
    ("Vaccines", ["D20.215.894"]),
    ("T-Lymphocytes", ["A11.118.637.555.567.569"]),
    ("B-Lymphocytes", ["A11.118.637.555.567.562"]),
]

IMMUNITY_QUESTION = "What are the differences between innate immunity and adaptive immunity?"

SCRIPTED_MESH = [
    {"question": IMMUNITY_QUESTION,
     "mesh": ["Adaptive Immunity", "Animals", "Immunity, Innate"]},
    {"question": "Which gene is associated with B-cell immunodeficiency?",
     "mesh": ["B-Lymphocytes", "Genes", "Humans"]},
    {"question": "How do tumor suppressor mutations drive lung cancer?",
     "mesh": ["Lung Neoplasms", "Mutation"]},
]

# ---------------------------------------------------------------------------
# Small cleaned corpus for index and orchestration tests

CORPUS_SMALL = [
    {
        "id": "PMID1001",
        "title": "Adaptive immunity and lymphocyte memory",
        "abstract": "Adaptive immunity relies on clonal selection of lymphocytes bearing "
                    "antigen-specific receptors. Memory T cells and B cells persist after the "
                    "primary response and confer faster secondary responses.",
        "mesh": ["Adaptive Immunity", "Animals", "T-Lymphocytes"],
        "year": 2018,
    },
    {
        "id": "PMID1002",
        "title": "Innate immune sensing of pathogens",
        "abstract": "Innate immunity provides the first line of defense through pattern "
                    "recognition receptors that detect conserved microbial structures and "
                    "trigger inflammatory signaling within hours of infection.",
        "mesh": ["Immunity, Innate", "Animals", "Inflammation"],
        "year": 2019,
    },
    {
        "id": "PMID1003",
        "title": "Comparing innate and adaptive immune responses",
        "abstract": "The innate and adaptive arms of the immune system differ in speed, "
                    "specificity and memory. Innate responses are immediate and broad while "
                    "adaptive immunity is slower, antigen-specific and long-lived.",
        "mesh": ["Adaptive Immunity", "Immunity, Innate", "Humans"],
        "year": 2021,
    },
    {
        "id": "PMID1004",
        "title": "Driver mutations in lung adenocarcinoma",
        "abstract": "Sequencing of lung adenocarcinomas identified recurrent driver mutations "
                    "in oncogenes and tumor suppressors, informing targeted therapy selection "
                    "and revealing clonal evolution under treatment pressure.",
        "mesh": ["Lung Neoplasms", "Mutation", "Humans"],
        "year": 2020,
    },
    {
        "id": "PMID1005",
        "title": "Single nucleotide polymorphisms in disease risk",
        "abstract": "Genome-wide association studies link single nucleotide polymorphisms to "
                    "complex disease risk, although most associated variants lie in noncoding "
                    "regions and exert modest effect sizes.",
        "mesh": ["Polymorphism, Single Nucleotide", "Genome", "Humans"],
        "year": 2017,
    },
    {
        "id": "PMID1006",
        "title": "Apoptosis pathways in development",
        "abstract": "Programmed cell death sculpts developing tissues. Intrinsic and extrinsic "
                    "apoptosis pathways converge on caspase activation, and their failure "
                    "contributes to malignancy and autoimmunity.",
        "mesh": ["Apoptosis", "Signal Transduction", "Animals"],
        "year": 2015,
    },
    {
        "id": "PMID1007",
        "title": "Vaccine-induced antibody responses",
        "abstract": "Vaccination elicits protective antibody titers through germinal center "
                    "reactions. Adjuvants shape the magnitude and durability of the humoral "
                    "response across age groups.",
        "mesh": ["Vaccines", "Antibodies", "Humans"],
        "year": 2022,
    },
    {
        "id": "PMID1008",
        "title": "B cell development and immunodeficiency",
        "abstract": "Defects in B cell development cause primary immunodeficiencies marked by "
                    "low antibody levels. Mutations affecting the pre-B cell receptor "
                    "checkpoint block maturation in the bone marrow.",
        "mesh": ["B-Lymphocytes", "Genes", "Humans"],
        "year": 2016,
    },
]

# ---------------------------------------------------------------------------
# Raw ingest fixture: 100 records, 30 planted rejects

SENTENCES = [
    "The study examined gene expression changes across developmental stages in model organisms.",
    "Results indicate a significant association between the variant and disease progression.",
    "We performed longitudinal sampling of patients enrolled in the multicenter cohort.",
    "Protein abundance was quantified by mass spectrometry under three growth conditions.",
    "The signaling cascade integrates metabolic cues with transcriptional regulation.",
    "Comparative analysis across species revealed conserved regulatory elements.",
    "Immune cell populations were profiled using single cell sequencing approaches.",
    "These findings suggest a mechanistic link between inflammation and tissue repair.",
    "Structural modeling predicts a binding interface stabilized by hydrophobic contacts.",
    "Follow-up experiments confirmed the phenotype in two independent cell lines.",
]


def make_prose(n_sentences: int) -> str:
    return " ".join(rng.choice(SENTENCES) for _ in range(n_sentences))


def gen_raw_records():
    vocab_labels = [label for label, _ in VOCAB]
    records = []
    good_ids = []
    counts = {"good": 0, "EMPTY": 0, "TOO_SHORT": 0, "NON_ALPHA": 0, "DUP_ID": 0}

    # 70 good, 8 empty, 8 short, 7 non-alpha, 7 duplicate ids
    plan = (["good"] * 70 + ["EMPTY"] * 8 + ["TOO_SHORT"] * 8 + ["NON_ALPHA"] * 7 +
            ["DUP_ID"] * 7)
    rng.shuffle(plan)
    # duplicates need an earlier good record; force the first slot to be good
    plan.remove("good")
    plan.insert(0, "good")

    for i, kind in enumerate(plan):
        rec_id = f"R{i + 1:03d}"
        title = f"Fixture record {i + 1}"
        mesh = rng.sample(vocab_labels, rng.randint(1, 3))
        year = rng.randint(1990, 2023)
        if kind == "good":
            abstract = make_prose(rng.randint(4, 7))
            if rng.random() < 0.2:
                abstract += " See https://example.org/supplement for extended tables."
            if rng.random() < 0.2:
                abstract = "<p>" + abstract + "</p>"
            good_ids.append(rec_id)
        elif kind == "EMPTY":
            abstract = rng.choice(["", "   ", "<table><tr><td>only markup</td></tr></table>"])
        elif kind == "TOO_SHORT":
            abstract = make_prose(1)[: rng.randint(60, 150)]
        elif kind == "NON_ALPHA":
            digits = "".join(rng.choice("0123456789-+/();,. ") for _ in range(210))
            abstract = ("Table " + digits + " end of data listing values only")[:300]
        else:  # DUP_ID
            abstract = make_prose(5)
            rec_id = rng.choice(good_ids)
        counts[kind] += 1
        records.append(
            {"id": rec_id, "title": title, "abstract": abstract, "mesh": mesh, "year": year})
    return records, counts


# ---------------------------------------------------------------------------
# Cassettes

ENTITY_CASSETTE = [
    {
        "key": "gene|tp53|10",
        "items": [
            {"source": "Gene", "title": "TP53",
             "snippet": "TP53 - tumor protein p53 [Homo sapiens (human)]. Acts as a tumor "
                        "suppressor and responds to diverse cellular stresses to regulate "
                        "target genes that induce cell cycle arrest or apoptosis.",
             "locator": "gene:7157"},
            {"source": "Gene", "title": "TP63",
             "snippet": "TP63 - tumor protein p63 [Homo sapiens (human)]. Member of the p53 "
                        "family of transcription factors involved in epithelial development.",
             "locator": "gene:8626"},
            {"source": "Gene", "title": "TP73",
             "snippet": "TP73 - tumor protein p73 [Homo sapiens (human)]. Participates in "
                        "apoptotic responses and developmental neurobiology.",
             "locator": "gene:7161"},
        ],
    },
    {
        "key": "gene|official symbol of gene lmp10|10",
        "items": [
            {"source": "Gene", "title": "PSMB10",
             "snippet": "PSMB10 - proteasome 20S subunit beta 10 [Homo sapiens (human)]. Also "
                        "known as LMP10 and MECL1; encodes an immunoproteasome subunit.",
             "locator": "gene:5699"},
        ],
    },
    {
        "key": "dbsnp|rs1217074595|10",
        "items": [
            {"source": "DbSnp", "title": "rs1217074595",
             "snippet": "rs1217074595 is a single nucleotide variant located on chromosome 9 "
                        "with minor allele frequency below 0.01 in sampled populations.",
             "locator": "snp:1217074595"},
        ],
    },
]

WEB_CASSETTE = [
    {
        "key": "websearch|" + IMMUNITY_QUESTION.lower() + "|10",
        "items": [
            {"source": "WebSearch", "title": "Innate vs adaptive immunity",
             "snippet": "Overview of the two arms of the immune system and how they differ in "
                        "speed and specificity.",
             "locator": "https://example.org/immunity-overview"},
            {"source": "WebSearch", "title": "Immune system basics",
             "snippet": "Introductory material on barriers, innate effectors and lymphocyte "
                        "responses.",
             "locator": "https://example.org/immune-basics"},
        ],
    },
    {
        "key": "websearch|innate vs adaptive immunity overview|10",
        "items": [
            {"source": "WebSearch", "title": "Adaptive immunity explainer",
             "snippet": "General discussion of antigen specificity without primary sources.",
             "locator": "https://example.org/adaptive-explainer"},
        ],
    },
    {
        "key": "websearch|crispr base editing safety|1",
        "items": [
            {"source": "WebSearch", "title": "Base editing safety review",
             "snippet": "Survey of off-target profiles reported for base editors.",
             "locator": "https://example.org/base-editing-safety"},
            {"source": "WebSearch", "title": "CRISPR news roundup",
             "snippet": "Weekly digest of genome editing developments.",
             "locator": "https://example.org/crispr-news"},
            {"source": "WebSearch", "title": "Regulatory perspectives",
             "snippet": "Policy commentary on therapeutic genome editing.",
             "locator": "https://example.org/editing-policy"},
        ],
    },
]

# ---------------------------------------------------------------------------
# QA datasets (20 hand-scored examples per task)


def gen_exact_match():
    # 14 correct (some only after trim/punctuation normalization), 6 wrong -> mean 0.7
    rows, preds = [], []
    golds = [f"chr{n}" for n in list(range(1, 21))]
    correct = set(range(1, 15))
    for i, gold in enumerate(golds, start=1):
        rows.append({"id": f"EM{i:02d}", "question": f"Which chromosome hosts locus L{i}?",
                     "gold": [gold]})
        if i in correct:
            variants = [gold, gold + ".", " " + gold + " ", gold + "!"]
            preds.append({"id": f"EM{i:02d}", "predicted": variants[i % 4]})
        elif i == 15:
            preds.append({"id": f"EM{i:02d}", "predicted": gold.removeprefix("chr")})
        else:
            preds.append({"id": f"EM{i:02d}", "predicted": f"chr{(i % 22) + 1}X"})
    return rows, preds, 0.7


def gen_recall():
    # 10 examples at 2/4, 5 at 4/4, 5 at 0/4 -> mean 0.5
    rows, preds = [], []
    for i in range(1, 21):
        gold = [f"G{i}A", f"G{i}B", f"G{i}C", f"G{i}D"]
        rows.append({"id": f"GD{i:02d}",
                     "question": f"Which genes are associated with disease D{i}?",
                     "gold": gold})
        if i <= 10:
            predicted = [gold[0], gold[1], f"X{i}"]
        elif i <= 15:
            predicted = list(gold)
        else:
            predicted = [f"X{i}A", f"X{i}B"]
        preds.append({"id": f"GD{i:02d}", "predicted": predicted})
    return rows, preds, 0.5


def gen_protein_coding():
    # 16 correct, 4 wrong -> mean 0.8; exercises yes/no -> TRUE/NA and species mapping
    spec = [
        ("TRUE", "yes", True),
        ("TRUE", "Yes.", True),
        ("TRUE", "YES", True),
        ("TRUE", "yes", True),
        ("TRUE", "Yes", True),
        ("TRUE", "yes.", True),
        ("TRUE", "yes!", True),
        ("TRUE", "YES.", True),
        ("NA", "no", True),
        ("NA", "No.", True),
        ("NA", "NO", True),
        ("NA", "no", True),
        ("NA", "No", True),
        ("NA", "no.", True),
        ("human", "Homo sapiens", True),
        ("mouse", "Mus musculus.", True),
        ("TRUE", "no", False),
        ("TRUE", "maybe", False),
        ("NA", "yes", False),
        ("NA", "unknown", False),
    ]
    rows, preds = [], []
    correct_count = 0
    for i, (gold, predicted, correct) in enumerate(spec, start=1):
        rows.append({"id": f"PC{i:02d}", "question": f"Is gene Q{i} a protein-coding gene?",
                     "gold": [gold]})
        preds.append({"id": f"PC{i:02d}", "predicted": predicted})
        correct_count += int(correct)
    return rows, preds, correct_count / 20.0


def gen_multiple_choice():
    # 12 correct, 8 wrong -> mean 0.6
    rows, preds = [], []
    for i in range(1, 21):
        gold = "yes" if i % 2 == 0 else "no"
        rows.append({"id": f"MC{i:02d}", "question": f"Statement S{i}: is it true?",
                     "gold": [gold]})
        if i <= 12:
            preds.append({"id": f"MC{i:02d}", "predicted": gold + "."})
        else:
            preds.append({"id": f"MC{i:02d}",
                          "predicted": "no" if gold == "yes" else "yes"})
    return rows, preds, 0.6


SPECIES_TABLE = [
    ("Homo sapiens", "human"),
    ("Mus musculus", "mouse"),
    ("Rattus norvegicus", "rat"),
    ("Danio rerio", "zebrafish"),
    ("Drosophila melanogaster", "fruit fly"),
    ("Caenorhabditis elegans", "roundworm"),
    ("Saccharomyces cerevisiae", "yeast"),
    ("Arabidopsis thaliana", "thale cress"),
    ("Gallus gallus", "chicken"),
    ("Bos taurus", "cattle"),
    ("Sus scrofa", "pig"),
    ("Canis lupus familiaris", "dog"),
    ("Felis catus", "cat"),
    ("Macaca mulatta", "rhesus macaque"),
    ("Pan troglodytes", "chimpanzee"),
    ("Xenopus laevis", "african clawed frog"),
    ("Oryza sativa", "rice"),
    ("Zea mays", "maize"),
    ("Escherichia coli", "e. coli"),
]


def main() -> None:
    for pid, text in PROMPTS.items():
        write_text(GOLDEN / "prompts" / f"{pid}.txt", text)
    for name, text in MANUALS.items():
        write_text(GOLDEN / "manuals" / f"{name}.txt", text)

    write_index(GOLDEN / "index_v1.bin", [
        {"id": "G1", "title": "alpha", "abstract": "beta gamma", "mesh": ["Animals"],
         "year": 2020},
        {"id": "G2", "title": "delta", "abstract": "epsilon zeta", "mesh": [], "year": 0},
    ])

    write_text(FIXTURES / "mesh_vocab.tsv",
               "".join(f"{label}\t{';'.join(trees)}\n" for label, trees in VOCAB))
    write_jsonl(FIXTURES / "mesh_scripted.jsonl", SCRIPTED_MESH)
    write_jsonl(FIXTURES / "corpus_small.jsonl", CORPUS_SMALL)

    records, counts = gen_raw_records()
    write_jsonl(FIXTURES / "raw_records.jsonl", records)
    print("raw_records plan:", counts)

    write_jsonl(FIXTURES / "cassettes" / "entity.jsonl", ENTITY_CASSETTE)
    write_jsonl(FIXTURES / "cassettes" / "web.jsonl", WEB_CASSETTE)

    datasets = {
        "exact_match": gen_exact_match(),
        "gene_disease_recall": gen_recall(),
        "protein_coding": gen_protein_coding(),
        "multiple_choice": gen_multiple_choice(),
    }
    for name, (rows, preds, mean) in datasets.items():
        write_jsonl(FIXTURES / "datasets" / f"{name}.jsonl", rows)
        write_jsonl(FIXTURES / "datasets" / f"{name}_predictions.jsonl", preds)
        print(f"{name}: expected mean {mean}")

    write_text(DATA / "species_informal.tsv",
               "".join(f"{latin}\t{informal}\n" for latin, informal in SPECIES_TABLE))


if __name__ == "__main__":
    main()
