#include "doctest.h"

#include "biorag/errors.hpp"
#include "biorag/prompts.hpp"
#include "biorag/retrievers.hpp"
#include "test_util.hpp"

using namespace biorag;

TEST_SUITE("prompts") {

TEST_CASE("templates byte-match their golden files") {
    for (PromptId id : {PromptId::P1, PromptId::P2, PromptId::P3, PromptId::P4, PromptId::P5}) {
        const PromptTemplate& tmpl = prompt_template(id);
        std::string golden = testutil::read_file(
            testutil::golden_path(std::string("prompts/") + prompt_id_name(id) + ".txt"));
        CHECK(tmpl.template_text == golden);
    }
}

TEST_CASE("manuals byte-match their golden files") {
    const char* files[] = {"gene", "dbsnp", "genome", "protein", "web_search", "pubmed"};
    const auto& manuals = list_manuals();
    REQUIRE(manuals.size() == 6);
    for (size_t i = 0; i < 6; ++i) {
        std::string golden =
            testutil::read_file(testutil::golden_path(std::string("manuals/") + files[i] + ".txt"));
        CHECK(manuals[i].manual_text == golden);
    }
}

TEST_CASE("manuals are in fixed order with the documented anchors") {
    const auto& manuals = list_manuals();
    CHECK(manuals[0].id == RetrieverId::Gene);
    CHECK(manuals[1].id == RetrieverId::DbSnp);
    CHECK(manuals[2].id == RetrieverId::Genome);
    CHECK(manuals[3].id == RetrieverId::Protein);
    CHECK(manuals[4].id == RetrieverId::WebSearch);
    CHECK(manuals[5].id == RetrieverId::PubMedLocal);

    CHECK(manuals[0].manual_text.find("the input must be a specific gene name") !=
          std::string::npos);
    CHECK(manuals[5].manual_text.find("retrieving biomedical literature and research articles") !=
          std::string::npos);
}

TEST_CASE("render substitutes every slot deterministically") {
    std::string rendered = render_prompt(prompt_template(PromptId::P4),
                                         {{"Results", "R"}, {"Question", "Q"}});
    CHECK(rendered.find("If they do not support it, output") != std::string::npos);
    CHECK(rendered.find("{Results}") == std::string::npos);
    CHECK(rendered.find("{Question}") == std::string::npos);
    CHECK(rendered.find(": R,") != std::string::npos);

    std::string again = render_prompt(prompt_template(PromptId::P4),
                                      {{"Results", "R"}, {"Question", "Q"}});
    CHECK(rendered == again);
}

TEST_CASE("render embeds manual text verbatim in P1") {
    std::string manuals_block;
    for (const RetrieverManual& manual : list_manuals()) {
        manuals_block += manual.manual_text + "\n";
    }
    std::string rendered = render_prompt(prompt_template(PromptId::P1),
                                         {{"Question", "q"}, {"Retrieval", manuals_block}});
    CHECK(rendered.find("select the RETRIEVAL METHODS you consider") != std::string::npos);
    CHECK(rendered.find("the input must be a specific gene name") != std::string::npos);
}

TEST_CASE("missing slot raises MissingSlot with the slot name") {
    try {
        render_prompt(prompt_template(PromptId::P1), {{"Question", "q"}});
        FAIL("expected MissingSlotError");
    } catch (const MissingSlotError& e) {
        CHECK(e.slot == "Retrieval");
    }
}

TEST_CASE("extra slots are ignored and values are not rescanned") {
    std::string rendered = render_prompt(
        prompt_template(PromptId::P5),
        {{"Results", "{Question}"}, {"Question", "Q"}, {"Unused", "zzz"}});
    // The injected "{Question}" stays literal: single-pass substitution.
    CHECK(rendered.find("{Question}") != std::string::npos);
    CHECK(rendered.find("zzz") == std::string::npos);
}

TEST_CASE("non-slot braces pass through") {
    PromptTemplate tmpl{PromptId::P1, "math {x+1} and {Question}"};
    std::string rendered = render_prompt(tmpl, {{"Question", "ok"}});
    CHECK(rendered == "math {x+1} and ok");
}

}  // TEST_SUITE
