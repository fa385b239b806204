#pragma once

#include <map>
#include <string>

namespace biorag {

enum class PromptId { P1, P2, P3, P4, P5 };
const char* prompt_id_name(PromptId id);

// Slots use {Name} syntax; the slot vocabulary across the five templates is
// {Question}, {Retrieval}, {Results}, {Query}.
struct PromptTemplate {
    PromptId id;
    std::string template_text;  // byte-equal to tests/golden/prompts/<id>.txt
};

const PromptTemplate& prompt_template(PromptId id);

// Single-pass substitution: every {Name} slot in the template must be present
// in slots (MissingSlotError otherwise); extra slots are ignored; substituted
// values are not rescanned.
std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& slots);

}  // namespace biorag
