#include "biorag/prompts.hpp"

#include <array>
#include <cctype>

#include "biorag/errors.hpp"

namespace biorag {

// The five pipeline prompts, byte-exact. Tests compare these against the
// golden files under tests/golden/prompts/.

namespace {

const char* kP1 =
    "To provide the most helpful and accurate response to the following Question: {Question}. "
    "You have been given descriptions of several RETRIEVAL METHODS: {Retrieval}. Please select "
    "the RETRIEVAL METHODS you consider the most appropriate for addressing this question.";

const char* kP2 =
    "Based on the RETRIEVAL METHODS you selected: {Retrieval}, and considering the Question: "
    "{Question} and the Input Requirements of the retrieval method, please REWRITE the search "
    "query accordingly.";

const char* kP3 =
    "Now, using the rewritten QUERY: {Query} and the retrieval FILTER methods: {Retrieval}, "
    "perform a logical combination to execute the search effectively.";

const char* kP4 =
    "Based on the RETRIEVAL RESULTS from the above steps: {Results}, please evaluate whether "
    "the RESULTS support answering the original Question: {Question}. If they do not support "
    "it, output \"NO\". If they do support it, output \"YES\".";

const char* kP5 =
    "Based on the RETRIEVAL RESULTS: {Results}, perform a comprehensive reasoning and provide "
    "an answer to the Question: {Question}.";

}  // namespace

const char* prompt_id_name(PromptId id) {
    switch (id) {
        case PromptId::P1: return "P1";
        case PromptId::P2: return "P2";
        case PromptId::P3: return "P3";
        case PromptId::P4: return "P4";
        case PromptId::P5: return "P5";
    }
    return "?";
}

const PromptTemplate& prompt_template(PromptId id) {
    static const std::array<PromptTemplate, 5> templates = {{
        {PromptId::P1, kP1},
        {PromptId::P2, kP2},
        {PromptId::P3, kP3},
        {PromptId::P4, kP4},
        {PromptId::P5, kP5},
    }};
    return templates[static_cast<size_t>(id)];
}

std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& slots) {
    const std::string& text = tmpl.template_text;
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        size_t close = text.find('}', i + 1);
        bool slot_like = close != std::string::npos && close > i + 1;
        if (slot_like) {
            for (size_t j = i + 1; j < close && slot_like; ++j) {
                if (!std::isalpha(static_cast<unsigned char>(text[j]))) slot_like = false;
            }
        }
        if (!slot_like) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::string name = text.substr(i + 1, close - i - 1);
        auto it = slots.find(name);
        if (it == slots.end()) throw MissingSlotError(name);
        out += it->second;
        i = close + 1;
    }
    return out;
}

}  // namespace biorag
