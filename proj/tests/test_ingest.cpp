#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "metaweave/ingest.hpp"

using namespace metaweave;
using namespace metaweave::ingest;

namespace {

ColumnMapping basic_mapping() {
    ColumnMapping m;
    m.study_id = "study";
    m.effect_id = "effect";
    m.yi = "yi";
    m.vi = "vi";
    m.moderators = {"biome", "taxon"};
    m.species = "species";
    m.year = "year";
    m.doi = "doi";
    return m;
}

} // namespace

TEST_CASE("normalize_doi lowercases and strips known prefixes") {
    CHECK(normalize_doi("10.1234/AbC") == "10.1234/abc");
    CHECK(normalize_doi("doi:10.1234/abc") == "10.1234/abc");
    CHECK(normalize_doi("https://doi.org/10.1234/abc") == "10.1234/abc");
    CHECK(normalize_doi("DOI: 10.1234/ABC ") == "10.1234/abc");
    CHECK(normalize_doi("doi:https://doi.org/10.1/x") == "10.1/x");
}

TEST_CASE("column mapping comes from the [columns] TOML table") {
    const std::string config =
        "[columns]\n"
        "study_id = \"study\"\n"
        "effect_id = \"effect\"\n"
        "yi = \"yi\"\n"
        "vi = \"vi\"\n"
        "moderators = [\"biome\", \"taxon\"]\n"
        "species = \"species\"\n"
        "year = \"year\"\n"
        "doi = \"doi\"\n";
    const ColumnMapping m = ColumnMapping::from_toml(config);
    CHECK(m.study_id == "study");
    CHECK(m.effect_id == "effect");
    CHECK(m.moderators == std::vector<std::string>{"biome", "taxon"});
    CHECK(m.is_moderator("biome"));
    CHECK_FALSE(m.is_moderator("study"));
}

TEST_CASE("column mapping validation rejects bad shapes") {
    CHECK_THROWS_AS(ColumnMapping::from_toml("[columns]\nyi = \"y\"\nvi = \"v\"\n"),
                    MissingColumn);
    ColumnMapping m;
    m.study_id = "s";
    m.yi = "x";
    m.vi = "x";
    CHECK_THROWS_AS(m.validate(), InputError);
    m.vi = "v";
    m.moderators = {"a", "a"};
    CHECK_THROWS_AS(m.validate(), InputError);
}

TEST_CASE("parse_dataset builds one record per row with moderators attached") {
    const std::string text =
        "study,effect,yi,vi,biome,taxon,species,year,doi\n"
        "s1,e1,0.1,0.04,forest,bird,Parus major,2001,10.1/A\n"
        "s1,e2,0.3,0.04,forest,,Parus major,2001,10.1/A\n"
        "s2,e3,0.5,0.04,,mammal,,,\n";
    const std::vector<EffectRecord> recs = parse_dataset(text, basic_mapping());
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].yi == 0.1);
    CHECK(recs[1].yi == 0.3);
    CHECK(recs[2].yi == 0.5);
    for (const auto& r : recs) CHECK(r.vi == 0.04);
    CHECK(recs[0].moderators.at("biome") == "forest");
    CHECK(recs[0].moderators.at("taxon") == "bird");
    CHECK(recs[1].moderators.count("taxon") == 0); // empty cell means missing
    CHECK(recs[2].moderators.count("biome") == 0);
    CHECK(recs[0].species == "Parus major");
    CHECK_FALSE(recs[2].species.has_value());
    CHECK(recs[0].year == 2001);
    CHECK_FALSE(recs[2].year.has_value());
    CHECK(recs[0].doi == "10.1/a");
    CHECK_FALSE(recs[2].doi.has_value());
}

TEST_CASE("parse_dataset of a header-only file is empty") {
    CHECK(parse_dataset("study,effect,yi,vi,biome,taxon,species,year,doi\n", basic_mapping())
              .empty());
}

TEST_CASE("parse_dataset rejects bad rows with their file row numbers") {
    ColumnMapping m;
    m.study_id = "study";
    m.yi = "yi";
    m.vi = "vi";

    try {
        parse_dataset("study,yi,vi\ns1,0.1,0\n", m);
        FAIL("expected NonPositiveVariance");
    } catch (const NonPositiveVariance& e) {
        CHECK(e.row == 2);
    }
    try {
        parse_dataset("study,yi,vi\ns1,0.1,0.04\ns2,abc,0.04\n", m);
        FAIL("expected BadNumeric");
    } catch (const BadNumeric& e) {
        CHECK(e.row == 3);
        CHECK(e.column == "yi");
    }
    try {
        parse_dataset("study,yi\ns1,0.1\n", m);
        FAIL("expected MissingColumn");
    } catch (const MissingColumn& e) {
        CHECK(e.name == "vi");
    }
}

TEST_CASE("parse_dataset generates row-numbered keys and rejects duplicates") {
    ColumnMapping m;
    m.study_id = "study";
    m.yi = "yi";
    m.vi = "vi";
    const auto recs = parse_dataset("study,yi,vi\ns1,0.1,0.04\ns1,0.2,0.04\n", m);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].effect_key == "r2");
    CHECK(recs[1].effect_key == "r3");

    ColumnMapping m2 = basic_mapping();
    CHECK_THROWS_AS(
        parse_dataset("study,effect,yi,vi,biome,taxon,species,year,doi\n"
                      "s1,e1,0.1,0.04,,,,,\n"
                      "s1,e1,0.2,0.04,,,,,\n",
                      m2),
        DuplicateEffectKey);
}

TEST_CASE("dataset round-trips through write_dataset") {
    const std::string text =
        "study,effect,yi,vi,biome,taxon,species,year,doi\n"
        "s1,e1,0.1,0.04,forest,bird,Parus major,2001,10.1/a\n"
        "s1,e2,-0.25,0.0625,\"grass,land\",,Apis mellifera,1999,\n"
        "s2,e3,0.5,0.04,,mammal,,,\n";
    const ColumnMapping m = basic_mapping();
    const auto recs = parse_dataset(text, m);
    const std::string out = write_dataset(recs, m);
    const auto back = parse_dataset(out, m);
    CHECK(back == recs);
}

TEST_CASE("parse_bibtex splits authors and strips braces") {
    const std::string text =
        "@article{smith2020,\n"
        "  author = {Smith, A. and Lee, B.},\n"
        "  title = {{Big} effects in {small} ponds},\n"
        "  journal = {J. Ecol.},\n"
        "  year = {2020},\n"
        "  doi = {10.1234/ABc},\n"
        "}\n";
    const auto recs = parse_bibtex(text);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].key == "smith2020");
    CHECK(recs[0].authors == std::vector<std::string>{"Smith, A.", "Lee, B."});
    CHECK(recs[0].title == "Big effects in small ponds");
    CHECK(recs[0].journal == "J. Ecol.");
    CHECK(recs[0].year == 2020);
    CHECK(recs[0].doi == "10.1234/abc");
}

TEST_CASE("parse_bibtex of an empty string is an empty list") {
    CHECK(parse_bibtex("").empty());
    CHECK(parse_bibtex("  % not bibtex at all\n").empty());
}

TEST_CASE("parse_bibtex skips string/preamble/comment groups") {
    const std::string text =
        "@string{jx = {Journal of X}}\n"
        "@comment{ignore me {even nested} }\n"
        "@preamble{\"\\newcommand{\\x}{y}\"}\n"
        "@misc{only1, author = {Solo, A.}, title = {T}}\n";
    const auto recs = parse_bibtex(text);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].key == "only1");
}

TEST_CASE("parse_bibtex reports unbalanced braces") {
    CHECK_THROWS_AS(parse_bibtex("@article{k, title = {unclosed }"), UnbalancedBraces);
}

TEST_CASE("parse_bibtex rejects entries without authors") {
    CHECK_THROWS_AS(parse_bibtex("@article{k, title = {T}}"), EmptyEntry);
    CHECK_THROWS_AS(parse_bibtex("@article{k,}"), EmptyEntry);
}

TEST_CASE("parse_bibtex reads countries funder language and references") {
    const std::string text =
        "@article{a1,\n"
        "  author = {Ng, C.},\n"
        "  title = {T},\n"
        "  affiliation = {Univ. Oxford, Oxford, England; CNRS, Paris, France},\n"
        "  funding = {Wellcome Trust},\n"
        "  language = {English},\n"
        "  cited-references = {Doe J, 2001, J ECOL, DOI 10.1/ref.1; Roe R, 1999, OIKOS; Doe J, 2001, J ECOL, DOI 10.1/ref.1},\n"
        "}\n";
    const auto recs = parse_bibtex(text);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].countries == std::vector<std::string>{"United Kingdom", "France"});
    CHECK(recs[0].funder == "Wellcome Trust");
    CHECK(recs[0].language == "English");
    REQUIRE(recs[0].references.size() == 2); // deduplicated within the record
    CHECK(recs[0].references[0] == "10.1/ref.1");
    CHECK(recs[0].references[1] == "roe r|1999|oikos");
}

TEST_CASE("parse_bibtex honors a custom references field name") {
    BibtexOptions opts;
    opts.references_field = "refs";
    const auto recs = parse_bibtex(
        "@article{k, author = {A, B.}, refs = {X Y, 2000, SOME TITLE}}", opts);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].references == std::vector<std::string>{"x y|2000|sometitle"});
}

TEST_CASE("parse_ris reads tagged records") {
    const std::string text =
        "TY  - JOUR\n"
        "AU  - Smith, A.\n"
        "AU  - Lee, B.\n"
        "TI  - First paper\n"
        "JO  - J. Ecol.\n"
        "PY  - 2020\n"
        "DO  - 10.1234/abc\n"
        "ER  - \n"
        "TY  - JOUR\n"
        "AU  - Solo, C.\n"
        "T1  - Second paper\n"
        "PY  - 1999/07/21\n"
        "ER  - \n";
    const auto recs = parse_ris(text);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].key == "ris1");
    CHECK(recs[0].authors.size() == 2);
    CHECK(recs[0].title == "First paper");
    CHECK(recs[0].journal == "J. Ecol.");
    CHECK(recs[0].year == 2020);
    CHECK(recs[0].doi == "10.1234/abc");
    CHECK(recs[1].key == "ris2");
    CHECK(recs[1].authors.size() == 1);
    CHECK(recs[1].title == "Second paper");
    CHECK(recs[1].year == 1999);
}

TEST_CASE("parse_ris of whitespace is an empty list") {
    CHECK(parse_ris("").empty());
    CHECK(parse_ris("  \n\n \t\n").empty());
}

TEST_CASE("parse_ris rejects an unterminated record") {
    try {
        parse_ris("TY  - JOUR\nAU  - Smith, A.\n");
        FAIL("expected RecordWithoutTerminator");
    } catch (const RecordWithoutTerminator& e) {
        CHECK(e.index == 1);
    }
}

TEST_CASE("bibtex and ris forms of the same reference agree after normalization") {
    const auto bib = parse_bibtex(
        "@article{x, author = {Smith, A. and Lee, B.}, title = {First paper},\n"
        " journal = {J. Ecol.}, year = {2020}, doi = {10.1234/abc}}");
    const auto ris = parse_ris(
        "TY  - JOUR\nAU  - Smith, A.\nAU  - Lee, B.\nTI  - First paper\n"
        "JO  - J. Ecol.\nPY  - 2020\nDO  - 10.1234/ABC\nER  - \n");
    REQUIRE(bib.size() == 1);
    REQUIRE(ris.size() == 1);
    CHECK(bib[0].authors == ris[0].authors);
    CHECK(bib[0].title == ris[0].title);
    CHECK(bib[0].journal == ris[0].journal);
    CHECK(bib[0].year == ris[0].year);
    CHECK(bib[0].doi == ris[0].doi);
}

TEST_CASE("extract_countries keeps first-appearance order and maps synonyms") {
    const auto c = extract_countries(
        "Univ. A, Boston, MA, USA; Univ. B, Cambridge, U.K.; Inst. C, Beijing, Peoples R China; "
        "Univ. D, New York, United States of America");
    CHECK(c == std::vector<std::string>{"United States", "United Kingdom", "China"});
    CHECK(extract_countries("Lone Institute") == std::vector<std::string>{"Lone Institute"});
    CHECK(extract_countries("").empty());
}

TEST_CASE("reference_key prefers an embedded DOI") {
    CHECK(reference_key("Doe J, 2001, J ECOL, V89, P1, DOI 10.1111/J.1.X.") == "10.1111/j.1.x");
    CHECK(reference_key("Roe R, 1999, Some Long Title Here Indeed") ==
          "roe r|1999|somelongtitlehereindeed");
    CHECK(reference_key("NoYear Entry, Title Only") == "noyear entry||titleonly");
}

TEST_CASE("link_records joins by DOI first then by study key") {
    std::vector<EffectRecord> effects(4);
    effects[0].study_key = "smith2020";
    effects[0].effect_key = "e1";
    effects[0].doi = "10.1/a";
    effects[1].study_key = "smith2020";
    effects[1].effect_key = "e2";
    effects[1].doi = "10.1/a";
    effects[2].study_key = "lee1999";
    effects[2].effect_key = "e3"; // no DOI: falls back to the citation key
    effects[3].study_key = "nobody";
    effects[3].effect_key = "e4";

    std::vector<BibRecord> bib(3);
    bib[0].key = "smith2020";
    bib[0].doi = "10.1/a";
    bib[0].authors = {"Smith, A."};
    bib[1].key = "lee1999";
    bib[1].authors = {"Lee, B."};
    bib[2].key = "idle2001";
    bib[2].authors = {"Idle, C."};

    const LinkedCorpus corpus = link_records(effects, bib);
    CHECK(corpus.links.at("e1") == 0);
    CHECK(corpus.links.at("e2") == 0);
    CHECK(corpus.links.at("e3") == 1);
    CHECK(corpus.links.count("e4") == 0);
    CHECK(corpus.unmatched_effects == std::vector<std::string>{"e4"});
    CHECK(corpus.unmatched_bib == std::vector<std::string>{"idle2001"});

    // Permuting inputs never changes the match set.
    std::vector<BibRecord> shuffled = {bib[2], bib[0], bib[1]};
    const LinkedCorpus again = link_records({effects[3], effects[1], effects[2], effects[0]},
                                            shuffled);
    CHECK(again.links.size() == corpus.links.size());
    CHECK(again.bib_records[again.links.at("e1")].key == "smith2020");
    CHECK(again.bib_records[again.links.at("e3")].key == "lee1999");
    CHECK(again.unmatched_effects == corpus.unmatched_effects);
    CHECK(again.unmatched_bib == corpus.unmatched_bib);
}

TEST_CASE("link_records rejects ambiguous joins") {
    std::vector<BibRecord> dup(2);
    dup[0].key = "a";
    dup[0].doi = "10.1/same";
    dup[0].authors = {"A"};
    dup[1].key = "b";
    dup[1].doi = "10.1/same";
    dup[1].authors = {"B"};
    CHECK_THROWS_AS(link_records({}, dup), AmbiguousMatch);

    std::vector<BibRecord> dupkey(2);
    dupkey[0].key = "same";
    dupkey[0].authors = {"A"};
    dupkey[1].key = "same";
    dupkey[1].authors = {"B"};
    EffectRecord e;
    e.study_key = "same";
    e.effect_key = "e1";
    CHECK_THROWS_AS(link_records({e}, dupkey), AmbiguousMatch);
}
