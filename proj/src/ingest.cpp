#include "metaweave/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "metaweave/csv.hpp"
#include "metaweave/toml.hpp"

namespace metaweave::ingest {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string collapse_ws(const std::string& s) {
    std::string out;
    bool in_ws = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            in_ws = !out.empty();
        } else {
            if (in_ws) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

bool parse_int(const std::string& s, int& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

// --- column mapping --------------------------------------------------

void ColumnMapping::validate() const {
    if (study_id.empty()) throw MissingColumn("study_id");
    if (yi.empty()) throw MissingColumn("yi");
    if (vi.empty()) throw MissingColumn("vi");
    if (yi == vi) throw InputError("yi and vi must map to distinct columns");
    std::set<std::string> seen;
    for (const auto& m : moderators) {
        if (m.empty()) throw InputError("moderator column name may not be empty");
        if (m == yi || m == vi || m == study_id)
            throw InputError("moderator '" + m + "' collides with a core column");
        if (!seen.insert(m).second)
            throw InputError("duplicate moderator column '" + m + "'");
    }
    for (const auto* opt : {&effect_id, &species, &year, &doi}) {
        if (opt->has_value() && (*opt)->empty())
            throw InputError("optional column names may not be empty");
    }
}

bool ColumnMapping::is_moderator(const std::string& column) const {
    return std::find(moderators.begin(), moderators.end(), column) != moderators.end();
}

ColumnMapping ColumnMapping::from_toml(const std::string& text) {
    const toml::Document doc = toml::parse(text);
    const auto it = doc.tables.find("columns");
    if (it == doc.tables.end()) throw InputError("config has no [columns] table");
    const toml::TableData& table = it->second;

    auto required = [&](const std::string& key) -> std::string {
        auto f = table.find(key);
        if (f == table.end()) throw MissingColumn(key);
        return f->second.as_string();
    };
    auto optional = [&](const std::string& key) -> std::optional<std::string> {
        auto f = table.find(key);
        if (f == table.end()) return std::nullopt;
        return f->second.as_string();
    };

    ColumnMapping mapping;
    mapping.study_id = required("study_id");
    mapping.yi = required("yi");
    mapping.vi = required("vi");
    mapping.effect_id = optional("effect_id");
    mapping.species = optional("species");
    mapping.year = optional("year");
    mapping.doi = optional("doi");
    if (auto f = table.find("moderators"); f != table.end())
        mapping.moderators = f->second.as_string_array();
    mapping.validate();
    return mapping;
}

// --- DOI normalization ------------------------------------------------

std::string normalize_doi(std::string doi) {
    doi = lower(trim(doi));
    for (bool stripped = true; stripped;) {
        stripped = false;
        for (const std::string& prefix : {std::string("doi:"), std::string("https://doi.org/")}) {
            if (doi.rfind(prefix, 0) == 0) {
                doi = trim(doi.substr(prefix.size()));
                stripped = true;
            }
        }
    }
    return doi;
}

// --- dataset ----------------------------------------------------------

std::vector<EffectRecord> parse_dataset(const std::string& csv_text,
                                        const ColumnMapping& mapping) {
    mapping.validate();
    const csv::Table table = csv::parse(csv_text);
    if (table.header.empty()) throw InputError("dataset has no header row");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        index.emplace(table.header[i], i); // first occurrence wins

    auto column = [&](const std::string& name) -> std::size_t {
        auto it = index.find(name);
        if (it == index.end()) throw MissingColumn(name);
        return it->second;
    };

    const std::size_t study_col = column(mapping.study_id);
    const std::size_t yi_col = column(mapping.yi);
    const std::size_t vi_col = column(mapping.vi);
    std::optional<std::size_t> effect_col, species_col, year_col, doi_col;
    if (mapping.effect_id) effect_col = column(*mapping.effect_id);
    if (mapping.species) species_col = column(*mapping.species);
    if (mapping.year) year_col = column(*mapping.year);
    if (mapping.doi) doi_col = column(*mapping.doi);
    std::vector<std::size_t> moderator_cols;
    for (const auto& m : mapping.moderators) moderator_cols.push_back(column(m));

    std::vector<EffectRecord> effects;
    effects.reserve(table.rows.size());
    std::unordered_set<std::string> seen_keys;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::vector<std::string>& row = table.rows[r];
        const std::size_t file_row = r + 2; // header is file row 1
        auto cell = [&](std::size_t c) -> std::string {
            return c < row.size() ? row[c] : std::string();
        };

        EffectRecord rec;
        rec.study_key = trim(cell(study_col));

        if (!parse_double(cell(yi_col), rec.yi) || !std::isfinite(rec.yi))
            throw BadNumeric(file_row, mapping.yi);
        if (!parse_double(cell(vi_col), rec.vi) || !std::isfinite(rec.vi))
            throw BadNumeric(file_row, mapping.vi);
        if (!(rec.vi > 0.0)) throw NonPositiveVariance(file_row);

        std::string key;
        if (effect_col) key = trim(cell(*effect_col));
        if (key.empty()) key = "r" + std::to_string(file_row);
        if (!seen_keys.insert(key).second) throw DuplicateEffectKey(key);
        rec.effect_key = key;

        for (std::size_t m = 0; m < moderator_cols.size(); ++m) {
            const std::string value = trim(cell(moderator_cols[m]));
            if (!value.empty()) rec.moderators[mapping.moderators[m]] = value;
        }
        if (species_col) {
            const std::string value = trim(cell(*species_col));
            if (!value.empty()) rec.species = value;
        }
        if (year_col) {
            const std::string value = trim(cell(*year_col));
            if (!value.empty()) {
                int y = 0;
                if (!parse_int(value, y)) throw BadNumeric(file_row, *mapping.year);
                rec.year = y;
            }
        }
        if (doi_col) {
            const std::string value = trim(cell(*doi_col));
            if (!value.empty()) rec.doi = normalize_doi(value);
        }
        effects.push_back(std::move(rec));
    }
    return effects;
}

std::string write_dataset(const std::vector<EffectRecord>& effects,
                          const ColumnMapping& mapping) {
    mapping.validate();
    csv::Table table;
    table.header.push_back(mapping.study_id);
    if (mapping.effect_id) table.header.push_back(*mapping.effect_id);
    table.header.push_back(mapping.yi);
    table.header.push_back(mapping.vi);
    for (const auto& m : mapping.moderators) table.header.push_back(m);
    if (mapping.species) table.header.push_back(*mapping.species);
    if (mapping.year) table.header.push_back(*mapping.year);
    if (mapping.doi) table.header.push_back(*mapping.doi);

    for (const EffectRecord& rec : effects) {
        std::vector<std::string> row;
        row.push_back(rec.study_key);
        if (mapping.effect_id) row.push_back(rec.effect_key);
        row.push_back(format_double(rec.yi));
        row.push_back(format_double(rec.vi));
        for (const auto& m : mapping.moderators) {
            auto it = rec.moderators.find(m);
            row.push_back(it == rec.moderators.end() ? std::string() : it->second);
        }
        if (mapping.species) row.push_back(rec.species.value_or(""));
        if (mapping.year) row.push_back(rec.year ? std::to_string(*rec.year) : std::string());
        if (mapping.doi) row.push_back(rec.doi.value_or(""));
        table.rows.push_back(std::move(row));
    }
    return csv::write(table);
}

// --- country extraction ------------------------------------------------

namespace {

// Canonical lookup is on the uppercased token with periods removed.
const std::unordered_map<std::string, std::string>& country_synonyms() {
    static const std::unordered_map<std::string, std::string> table = {
        {"USA", "United States"},
        {"US", "United States"},
        {"UNITED STATES", "United States"},
        {"UNITED STATES OF AMERICA", "United States"},
        {"UK", "United Kingdom"},
        {"UNITED KINGDOM", "United Kingdom"},
        {"GREAT BRITAIN", "United Kingdom"},
        {"ENGLAND", "United Kingdom"},
        {"SCOTLAND", "United Kingdom"},
        {"WALES", "United Kingdom"},
        {"NORTHERN IRELAND", "United Kingdom"},
        {"PEOPLES R CHINA", "China"},
        {"PR CHINA", "China"},
        {"P R CHINA", "China"},
        {"RUSSIAN FEDERATION", "Russia"},
        {"REPUBLIC OF KOREA", "South Korea"},
        {"KOREA", "South Korea"},
        {"THE NETHERLANDS", "Netherlands"},
        {"UAE", "United Arab Emirates"},
        {"VIET NAM", "Vietnam"},
    };
    return table;
}

std::string title_case(const std::string& s) {
    std::string out = lower(s);
    bool start = true;
    for (char& c : out) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            if (start) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            start = false;
        } else {
            start = true;
        }
    }
    return out;
}

std::string canonical_country(const std::string& token) {
    std::string key;
    for (char c : token) {
        if (c == '.') continue;
        key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    key = collapse_ws(trim(key));
    if (key.empty()) return "";
    auto it = country_synonyms().find(key);
    if (it != country_synonyms().end()) return it->second;
    return title_case(key);
}

} // namespace

std::vector<std::string> extract_countries(const std::string& affiliations) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= affiliations.size()) {
        std::size_t end = affiliations.find(';', pos);
        if (end == std::string::npos) end = affiliations.size();
        std::string affiliation = trim(affiliations.substr(pos, end - pos));
        pos = end + 1;
        if (affiliation.empty()) continue;
        std::size_t comma = affiliation.rfind(',');
        std::string token = comma == std::string::npos ? affiliation
                                                       : affiliation.substr(comma + 1);
        const std::string country = canonical_country(trim(token));
        if (country.empty()) continue;
        if (std::find(out.begin(), out.end(), country) == out.end()) out.push_back(country);
    }
    return out;
}

// --- reference keys -----------------------------------------------------

std::string reference_key(const std::string& raw) {
    // Prefer an embedded DOI: "10." up to whitespace, needing a '/'.
    for (std::size_t i = 0; i + 3 < raw.size(); ++i) {
        if (raw.compare(i, 3, "10.") != 0) continue;
        std::size_t end = i;
        while (end < raw.size() && !std::isspace(static_cast<unsigned char>(raw[end])) &&
               raw[end] != ';' && raw[end] != ',')
            ++end;
        std::string candidate = raw.substr(i, end - i);
        while (!candidate.empty() &&
               (candidate.back() == '.' || candidate.back() == ')' || candidate.back() == ']'))
            candidate.pop_back();
        if (candidate.find('/') != std::string::npos) return normalize_doi(candidate);
    }

    // Fallback: first author, year, and a short normalized title prefix.
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t end = raw.find(',', pos);
        if (end == std::string::npos) end = raw.size();
        parts.push_back(trim(raw.substr(pos, end - pos)));
        pos = end + 1;
    }
    std::string author = parts.empty() ? "" : collapse_ws(lower(parts[0]));

    std::string year;
    std::size_t year_part = parts.size();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (p.size() == 4 && std::all_of(p.begin(), p.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            })) {
            year = p;
            year_part = i;
            break;
        }
    }

    std::string title;
    for (std::size_t i = (year_part < parts.size() ? year_part + 1 : 1); i < parts.size(); ++i) {
        for (char c : parts[i]) {
            if (std::isalnum(static_cast<unsigned char>(c)))
                title.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            if (title.size() == 24) break;
        }
        if (title.size() == 24) break;
    }
    return author + "|" + year + "|" + title;
}

// --- BibTeX ---------------------------------------------------------------

namespace {

struct BibCursor {
    const std::string& text;
    std::size_t pos = 0;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
};

// Reads a {...} group starting at the opening brace; returns the inner text.
std::string read_braced(BibCursor& cur) {
    const std::size_t open = cur.pos;
    ++cur.pos;
    int depth = 1;
    std::string value;
    while (!cur.eof()) {
        char c = cur.text[cur.pos++];
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return value;
        } else {
            value.push_back(c);
            continue;
        }
        if (depth > 0) value.push_back(c);
    }
    throw UnbalancedBraces(open);
}

std::string strip_braces(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != '{' && c != '}') out.push_back(c);
    return out;
}

std::vector<std::string> split_authors(const std::string& field) {
    std::vector<std::string> authors;
    std::size_t pos = 0;
    const std::string sep = " and ";
    while (true) {
        std::size_t end = field.find(sep, pos);
        std::string part = trim(end == std::string::npos ? field.substr(pos)
                                                         : field.substr(pos, end - pos));
        if (!part.empty()) authors.push_back(part);
        if (end == std::string::npos) break;
        pos = end + sep.size();
    }
    return authors;
}

std::vector<std::string> split_references(const std::string& field) {
    std::vector<std::string> keys;
    std::set<std::string> seen;
    std::size_t pos = 0;
    while (pos <= field.size()) {
        std::size_t end = field.find(';', pos);
        if (end == std::string::npos) end = field.size();
        const std::string raw = trim(field.substr(pos, end - pos));
        pos = end + 1;
        if (raw.empty()) continue;
        const std::string key = reference_key(raw);
        if (seen.insert(key).second) keys.push_back(key);
    }
    return keys;
}

BibRecord finish_bib_record(const std::string& key,
                            const std::map<std::string, std::string>& fields,
                            const BibtexOptions& options) {
    if (fields.empty()) throw EmptyEntry(key);

    auto get = [&](const std::string& name) -> std::optional<std::string> {
        auto it = fields.find(name);
        if (it == fields.end()) return std::nullopt;
        return it->second;
    };

    BibRecord rec;
    rec.key = key;
    if (auto author = get("author")) rec.authors = split_authors(strip_braces(*author));
    if (rec.authors.empty()) throw EmptyEntry(key);
    if (auto title = get("title")) rec.title = strip_braces(*title);
    if (auto doi = get("doi")) {
        const std::string normalized = normalize_doi(strip_braces(*doi));
        if (!normalized.empty()) rec.doi = normalized;
    }
    if (auto year = get("year")) {
        int y = 0;
        if (parse_int(strip_braces(*year), y)) rec.year = y;
    }
    if (auto journal = get("journal")) rec.journal = strip_braces(*journal);
    if (auto funding = get("funding")) rec.funder = strip_braces(*funding);
    if (auto language = get("language")) rec.language = strip_braces(*language);
    std::optional<std::string> affiliation = get("affiliation");
    if (!affiliation) affiliation = get("address");
    if (affiliation) rec.countries = extract_countries(strip_braces(*affiliation));
    if (auto refs = get(lower(options.references_field)))
        rec.references = split_references(strip_braces(*refs));
    return rec;
}

} // namespace

std::vector<BibRecord> parse_bibtex(const std::string& text, const BibtexOptions& options) {
    std::vector<BibRecord> records;
    BibCursor cur{text};

    while (true) {
        while (!cur.eof() && cur.peek() != '@') ++cur.pos;
        if (cur.eof()) break;
        ++cur.pos; // consume '@'

        std::string type;
        while (!cur.eof() && cur.peek() != '{' && cur.peek() != '(' &&
               !std::isspace(static_cast<unsigned char>(cur.peek())))
            type.push_back(text[cur.pos++]);
        cur.skip_ws();
        if (cur.eof() || cur.peek() != '{') continue;
        type = lower(type);

        if (type == "string" || type == "preamble" || type == "comment") {
            read_braced(cur); // skip the whole group
            continue;
        }

        const std::size_t entry_open = cur.pos;
        ++cur.pos; // consume '{'
        cur.skip_ws();
        std::string key;
        while (!cur.eof() && cur.peek() != ',' && cur.peek() != '}' &&
               !std::isspace(static_cast<unsigned char>(cur.peek())))
            key.push_back(text[cur.pos++]);
        cur.skip_ws();
        if (!cur.eof() && cur.peek() == ',') ++cur.pos;

        std::map<std::string, std::string> fields;
        bool closed = false;
        while (!closed) {
            cur.skip_ws();
            if (cur.eof()) throw UnbalancedBraces(entry_open);
            if (cur.peek() == '}') {
                ++cur.pos;
                closed = true;
                break;
            }
            if (cur.peek() == ',') {
                ++cur.pos;
                continue;
            }
            std::string name;
            while (!cur.eof() && cur.peek() != '=' &&
                   !std::isspace(static_cast<unsigned char>(cur.peek())))
                name.push_back(text[cur.pos++]);
            cur.skip_ws();
            if (cur.eof() || cur.peek() != '=') throw UnbalancedBraces(entry_open);
            ++cur.pos;
            cur.skip_ws();
            if (cur.eof()) throw UnbalancedBraces(entry_open);

            std::string value;
            if (cur.peek() == '{') {
                value = read_braced(cur);
            } else if (cur.peek() == '"') {
                ++cur.pos;
                const std::size_t open = cur.pos - 1;
                while (true) {
                    if (cur.eof()) throw UnbalancedBraces(open);
                    char c = text[cur.pos++];
                    if (c == '"') break;
                    value.push_back(c);
                }
            } else {
                while (!cur.eof() && cur.peek() != ',' && cur.peek() != '}')
                    value.push_back(text[cur.pos++]);
            }
            fields[lower(trim(name))] = collapse_ws(value);
        }
        records.push_back(finish_bib_record(trim(key), fields, options));
    }
    return records;
}

// --- RIS -------------------------------------------------------------------

std::vector<BibRecord> parse_ris(const std::string& text) {
    std::vector<BibRecord> records;

    struct Partial {
        std::vector<std::string> authors;
        std::optional<std::string> doi;
        std::optional<int> year;
        std::string title;
        std::optional<std::string> journal;
        bool any = false;
    } current;

    auto finish = [&]() {
        const std::size_t n = records.size() + 1;
        const std::string key = "ris" + std::to_string(n);
        if (current.authors.empty()) throw EmptyEntry(key);
        BibRecord rec;
        rec.key = key;
        rec.authors = current.authors;
        rec.doi = current.doi;
        rec.year = current.year;
        rec.title = current.title;
        rec.journal = current.journal;
        records.push_back(std::move(rec));
        current = Partial{};
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            if (pos > text.size()) break;
            continue;
        }

        std::string tag, value;
        if (line.size() >= 5 && line.compare(2, 3, "  -") == 0) {
            tag = line.substr(0, 2);
            value = trim(line.size() > 5 ? line.substr(5) : std::string());
        }

        if (tag == "ER") {
            finish();
        } else if (tag.empty()) {
            current.any = true; // continuation or malformed content still belongs to a record
        } else {
            current.any = true;
            if (tag == "AU") {
                if (!value.empty()) current.authors.push_back(value);
            } else if (tag == "DO") {
                const std::string normalized = normalize_doi(value);
                if (!normalized.empty()) current.doi = normalized;
            } else if (tag == "PY") {
                std::size_t digits = 0;
                while (digits < value.size() &&
                       std::isdigit(static_cast<unsigned char>(value[digits])))
                    ++digits;
                int y = 0;
                if (digits > 0 && parse_int(value.substr(0, digits), y)) current.year = y;
            } else if (tag == "TI" || tag == "T1") {
                if (current.title.empty()) current.title = value;
            } else if (tag == "JO" || tag == "JF") {
                if (!current.journal) current.journal = value;
            }
        }
        if (pos > text.size()) break;
    }

    if (current.any) throw RecordWithoutTerminator(records.size() + 1);
    return records;
}

// --- linking -----------------------------------------------------------------

LinkedCorpus link_records(std::vector<EffectRecord> effects,
                          std::vector<BibRecord> bib_records) {
    std::unordered_map<std::string, std::size_t> by_doi;
    for (std::size_t i = 0; i < bib_records.size(); ++i) {
        if (!bib_records[i].doi) continue;
        if (!by_doi.emplace(*bib_records[i].doi, i).second)
            throw AmbiguousMatch(*bib_records[i].doi);
    }
    std::unordered_map<std::string, std::vector<std::size_t>> by_key;
    for (std::size_t i = 0; i < bib_records.size(); ++i)
        by_key[bib_records[i].key].push_back(i);

    LinkedCorpus corpus;
    corpus.effects = std::move(effects);
    corpus.bib_records = std::move(bib_records);

    std::vector<bool> bib_used(corpus.bib_records.size(), false);
    std::set<std::string> unmatched;
    for (const EffectRecord& effect : corpus.effects) {
        std::optional<std::size_t> target;
        if (effect.doi) {
            auto it = by_doi.find(*effect.doi);
            if (it != by_doi.end()) target = it->second;
        }
        if (!target) {
            auto it = by_key.find(effect.study_key);
            if (it != by_key.end()) {
                if (it->second.size() > 1) throw AmbiguousMatch(effect.study_key);
                target = it->second.front();
            }
        }
        if (target) {
            corpus.links[effect.effect_key] = *target;
            bib_used[*target] = true;
        } else {
            unmatched.insert(effect.effect_key);
        }
    }
    corpus.unmatched_effects.assign(unmatched.begin(), unmatched.end());

    std::set<std::string> unused_bib;
    for (std::size_t i = 0; i < corpus.bib_records.size(); ++i)
        if (!bib_used[i]) unused_bib.insert(corpus.bib_records[i].key);
    corpus.unmatched_bib.assign(unused_bib.begin(), unused_bib.end());
    return corpus;
}

} // namespace metaweave::ingest
