#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metaweave/errors.hpp"

namespace metaweave::ingest {

// --- errors ----------------------------------------------------------

struct MissingColumn : InputError {
    explicit MissingColumn(const std::string& name)
        : InputError("missing column '" + name + "'"), name(name) {}
    std::string name;
};
struct BadNumeric : InputError {
    BadNumeric(std::size_t row, const std::string& column)
        : InputError("row " + std::to_string(row) + ": cannot parse numeric column '" +
                     column + "'"),
          row(row), column(column) {}
    std::size_t row;
    std::string column;
};
struct NonPositiveVariance : InputError {
    explicit NonPositiveVariance(std::size_t row)
        : InputError("row " + std::to_string(row) + ": sampling variance must be positive"),
          row(row) {}
    std::size_t row;
};
struct DuplicateEffectKey : InputError {
    explicit DuplicateEffectKey(const std::string& key)
        : InputError("duplicate effect key '" + key + "'"), key(key) {}
    std::string key;
};
struct UnbalancedBraces : InputError {
    explicit UnbalancedBraces(std::size_t offset)
        : InputError("unbalanced braces at offset " + std::to_string(offset)), offset(offset) {}
    std::size_t offset;
};
struct EmptyEntry : InputError {
    explicit EmptyEntry(const std::string& key)
        : InputError("entry '" + key + "' has no usable fields"), key(key) {}
    std::string key;
};
struct RecordWithoutTerminator : InputError {
    explicit RecordWithoutTerminator(std::size_t index)
        : InputError("RIS record " + std::to_string(index) + " is not terminated by ER"),
          index(index) {}
    std::size_t index;
};
struct AmbiguousMatch : InputError {
    explicit AmbiguousMatch(const std::string& key)
        : InputError("'" + key + "' matches more than one bibliographic record"), key(key) {}
    std::string key;
};

// --- domain types ----------------------------------------------------

struct ColumnMapping {
    std::string study_id;
    std::optional<std::string> effect_id;
    std::string yi;
    std::string vi;
    std::vector<std::string> moderators;
    std::optional<std::string> species;
    std::optional<std::string> year;
    std::optional<std::string> doi;

    void validate() const;
    bool is_moderator(const std::string& column) const;

    /// Reads the `[columns]` table of a TOML config.
    static ColumnMapping from_toml(const std::string& text);
};

struct EffectRecord {
    std::string study_key;
    std::string effect_key;
    double yi = 0.0;
    double vi = 0.0;
    std::map<std::string, std::string> moderators; // absent key = missing value
    std::optional<std::string> species;
    std::optional<int> year;
    std::optional<std::string> doi; // normalized

    bool operator==(const EffectRecord&) const = default;
};

struct BibRecord {
    std::string key; // citation key
    std::optional<std::string> doi; // normalized
    std::string title;
    std::vector<std::string> authors;
    std::vector<std::string> countries;  // deduplicated, first-appearance order
    std::vector<std::string> references; // deduplicated reference keys
    std::optional<std::string> journal;
    std::optional<std::string> funder;
    std::optional<std::string> language;
    std::optional<int> year;

    bool operator==(const BibRecord&) const = default;
};

struct LinkedCorpus {
    std::vector<EffectRecord> effects;
    std::vector<BibRecord> bib_records;
    std::map<std::string, std::size_t> links;   // effect_key -> index into bib_records
    std::vector<std::string> unmatched_effects; // sorted effect keys
    std::vector<std::string> unmatched_bib;     // sorted citation keys
};

// --- operations ------------------------------------------------------

/// Lowercase and strip the "doi:" / "https://doi.org/" prefixes.
std::string normalize_doi(std::string doi);

std::vector<EffectRecord> parse_dataset(const std::string& csv_text, const ColumnMapping& mapping);

/// Inverse of parse_dataset over the same mapping (round-trip support).
std::string write_dataset(const std::vector<EffectRecord>& effects, const ColumnMapping& mapping);

struct BibtexOptions {
    // No standard field carries cited references; exporters differ.
    std::string references_field = "cited-references";
};

std::vector<BibRecord> parse_bibtex(const std::string& text, const BibtexOptions& options = {});

std::vector<BibRecord> parse_ris(const std::string& text);

/// DOI match first, exact study-key / citation-key match second.
LinkedCorpus link_records(std::vector<EffectRecord> effects, std::vector<BibRecord> bib_records);

/// Country names from a semicolon-separated affiliation field: last
/// comma token of each affiliation, synonym-mapped and title-cased.
std::vector<std::string> extract_countries(const std::string& affiliations);

/// Key for one raw cited-reference string: its DOI when one is present,
/// otherwise first-author + year + a normalized title prefix.
std::string reference_key(const std::string& raw);

} // namespace metaweave::ingest
