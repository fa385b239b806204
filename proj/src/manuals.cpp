#include "biorag/retrievers.hpp"

namespace biorag {

// Tool manuals, byte-exact. Tests compare these against the golden files
// under tests/golden/manuals/.

namespace {

const char* kGeneManual =
    "The Gene database search engine is a valuable tool for retrieving comprehensive "
    "information about genes, including gene structure, function, and related genetic events. "
    "It is particularly useful for answering detailed questions regarding gene-related "
    "research and findings.  To utilize this search engine effectively, the input must be a "
    "specific gene name.";

const char* kDbSnpManual =
    "The dbSNP database search engine is an essential tool for retrieving detailed "
    "information about single nucleotide polymorphisms (SNPs) and other genetic variations. "
    "It is particularly useful for answering questions related to genetic diversity, allele "
    "frequency, and related genetic studies. To utilize this search engine effectively, the "
    "input must be a specific SNP identifier or genetic variant name.";

const char* kGenomeManual =
    "The Genome database search engine is an indispensable tool for accessing comprehensive "
    "information about entire genomes, including their sequences, annotations, and functional "
    "elements. It is particularly useful for answering complex questions about genomic "
    "structures, variations, and comparative genomics. To use this search engine effectively, "
    "the input must be a specific genome name or identifier.";

const char* kProteinManual =
    "The Protein database search engine is a crucial resource for obtaining detailed "
    "information about proteins, including their sequences, structures, functions, and "
    "interactions. It is particularly useful for answering questions related to protein "
    "biology, biochemical properties, and molecular function. To use this search engine "
    "effectively, the input must be a specific protein name or identifier.";

const char* kWebSearchManual =
    "The Web Search Engine is a powerful tool designed to help you find information about "
    "current events quickly and efficiently. It is especially useful for obtaining the "
    "latest news, updates, and developments on a wide range of topics. To use this search "
    "engine effectively, simply enter a relevant search query.";

const char* kPubMedManual =
    "The PubMed local vector database search engine is an advanced tool designed for "
    "retrieving biomedical literature and research articles using vector-based search "
    "techniques. It is particularly useful for answering detailed questions about medical "
    "research, clinical studies, and scientific discoveries. To utilize this search engine "
    "effectively, the input should be a specific query or topic of interest.";

const char* kGeneInput =
    "To utilize this search engine effectively, the input must be a specific gene name.";
const char* kDbSnpInput =
    "To utilize this search engine effectively, the input must be a specific SNP identifier "
    "or genetic variant name.";
const char* kGenomeInput =
    "To use this search engine effectively, the input must be a specific genome name or "
    "identifier.";
const char* kProteinInput =
    "To use this search engine effectively, the input must be a specific protein name or "
    "identifier.";
const char* kWebSearchInput =
    "To use this search engine effectively, simply enter a relevant search query.";
const char* kPubMedInput =
    "To utilize this search engine effectively, the input should be a specific query or "
    "topic of interest.";

}  // namespace

const std::vector<RetrieverManual>& list_manuals() {
    static const std::vector<RetrieverManual> manuals = {
        {RetrieverId::Gene, kGeneManual, kGeneInput},
        {RetrieverId::DbSnp, kDbSnpManual, kDbSnpInput},
        {RetrieverId::Genome, kGenomeManual, kGenomeInput},
        {RetrieverId::Protein, kProteinManual, kProteinInput},
        {RetrieverId::WebSearch, kWebSearchManual, kWebSearchInput},
        {RetrieverId::PubMedLocal, kPubMedManual, kPubMedInput},
    };
    return manuals;
}

const RetrieverManual& manual_for(RetrieverId id) {
    for (const RetrieverManual& manual : list_manuals()) {
        if (manual.id == id) return manual;
    }
    throw Error("no manual for retriever");  // unreachable: closed enumeration
}

}  // namespace biorag
