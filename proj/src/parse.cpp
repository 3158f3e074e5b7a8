#include "radcap/parse.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "radcap/errors.hpp"

namespace radcap {

namespace {

bool is_word(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Greedy longest-first phrase matcher over lowercase text, dispatching on
// the first character so a 1 MB scan stays linear.
class PhraseScanner {
public:
    struct Entry {
        std::string phrase;
        int id;
    };

    explicit PhraseScanner(std::vector<Entry> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.phrase.size() != b.phrase.size()) return a.phrase.size() > b.phrase.size();
            return a.phrase < b.phrase;
        });
        for (size_t i = 0; i < entries_.size(); ++i) {
            unsigned char c = static_cast<unsigned char>(entries_[i].phrase.front());
            by_first_[c].push_back(i);
        }
    }

    // Longest entry matching at position i with word boundaries on both
    // sides; an optional trailing plural 's' is consumed when allowed.
    struct Match {
        size_t end;
        int id;
    };
    std::optional<Match> match_at(std::string_view lower, size_t i, bool allow_plural) const {
        if (i > 0 && is_word(lower[i - 1])) return std::nullopt;
        const unsigned char c = static_cast<unsigned char>(lower[i]);
        for (size_t idx : by_first_[c]) {
            const std::string& p = entries_[idx].phrase;
            if (i + p.size() > lower.size() || lower.compare(i, p.size(), p) != 0) continue;
            size_t end = i + p.size();
            if (allow_plural && end < lower.size() && lower[end] == 's' &&
                (end + 1 == lower.size() || !is_word(lower[end + 1])))
                ++end;
            if (end < lower.size() && is_word(lower[end])) continue;
            return Match{end, entries_[idx].id};
        }
        return std::nullopt;
    }

private:
    std::vector<Entry> entries_;
    std::array<std::vector<size_t>, 256> by_first_{};
};

PhraseScanner build_class_scanner(const ClassVocabulary& vocab) {
    std::vector<PhraseScanner::Entry> entries;
    int id = 0;
    for (const auto& s : vocab.surface_forms()) entries.push_back({s, id++});
    return PhraseScanner(std::move(entries));
}

const PhraseScanner& bearing_scanner() {
    static const PhraseScanner scanner = [] {
        std::vector<PhraseScanner::Entry> entries;
        for (int i = 0; i < kBearingSectorCount; ++i)
            entries.push_back({std::string(bearing_phrase(static_cast<BearingSector>(i))), i});
        // common paraphrases
        entries.push_back({"ahead", static_cast<int>(BearingSector::Ahead)});
        entries.push_back({"on the left", static_cast<int>(BearingSector::Left)});
        entries.push_back({"on the right", static_cast<int>(BearingSector::Right)});
        entries.push_back({"to your left", static_cast<int>(BearingSector::Left)});
        entries.push_back({"to your right", static_cast<int>(BearingSector::Right)});
        return PhraseScanner(std::move(entries));
    }();
    return scanner;
}

std::optional<double> parse_number(std::string_view s, size_t& pos) {
    size_t i = pos;
    while (i < s.size() && is_space(s[i])) ++i;
    size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    size_t digits_begin = i;
    while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) ++i;
    if (i == digits_begin) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data() + start, s.data() + i, v);
    if (ec != std::errc{}) return std::nullopt;
    pos = static_cast<size_t>(p - s.data());
    return v;
}

bool is_unit_word(std::string_view lower, size_t i, size_t& end) {
    for (std::string_view u : {"meters", "metres", "meter", "metre", "m"}) {
        if (i + u.size() <= lower.size() && lower.compare(i, u.size(), u) == 0 &&
            (i + u.size() == lower.size() || !is_word(lower[i + u.size()]))) {
            end = i + u.size();
            return true;
        }
    }
    return false;
}

// First "at <number> m" in [begin, end); returns the number.
std::optional<double> find_range(std::string_view lower, size_t begin, size_t end) {
    for (size_t i = begin; i + 2 < end; ++i) {
        if (lower[i] != 'a' || lower[i + 1] != 't') continue;
        if (i > 0 && is_word(lower[i - 1])) continue;
        if (is_word(lower[i + 2])) continue;
        size_t pos = i + 2;
        auto num = parse_number(lower.substr(0, end), pos);
        if (!num) continue;
        while (pos < end && is_space(lower[pos])) ++pos;
        size_t unit_end = 0;
        if (pos < end && is_unit_word(lower, pos, unit_end)) return num;
    }
    return std::nullopt;
}

// Clause end: first sentence punctuation after begin, decimal points exempt.
size_t clause_end(std::string_view lower, size_t begin, size_t limit) {
    for (size_t i = begin; i < limit; ++i) {
        const char c = lower[i];
        if (c == '!' || c == '?' || c == ';' || c == '\n') return i;
        if (c == '.') {
            const bool decimal = i > 0 && i + 1 < lower.size() && is_digit(lower[i - 1]) &&
                                 is_digit(lower[i + 1]);
            if (!decimal) return i;
        }
    }
    return limit;
}

std::optional<BearingSector> find_sector(std::string_view lower, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
        auto m = bearing_scanner().match_at(lower.substr(0, end), i, false);
        if (m) return static_cast<BearingSector>(m->id);
    }
    return std::nullopt;
}

bool lit_at(std::string_view s, size_t pos, std::string_view lit) {
    return pos + lit.size() <= s.size() && s.compare(pos, lit.size(), lit) == 0;
}

bool word_at(std::string_view s, size_t pos, std::string_view lit) {
    return lit_at(s, pos, lit) && (pos + lit.size() == s.size() || !is_word(s[pos + lit.size()]));
}

// Leading count sentence: "There are <N> objects", "There is 1 object",
// "There are no objects". Only the first occurrence before any mention counts.
std::optional<int64_t> find_declared_count(std::string_view lower, size_t limit) {
    for (size_t i = 0; i < limit; ++i) {
        if (lower[i] != 't' || !word_at(lower, i, "there")) continue;
        if (i > 0 && is_word(lower[i - 1])) continue;
        size_t pos = i + 5;
        while (pos < lower.size() && is_space(lower[pos])) ++pos;
        if (word_at(lower, pos, "are"))
            pos += 3;
        else if (word_at(lower, pos, "is"))
            pos += 2;
        else
            continue;
        while (pos < lower.size() && is_space(lower[pos])) ++pos;
        int64_t count = 0;
        if (word_at(lower, pos, "no")) {
            pos += 2;
        } else {
            size_t numpos = pos;
            auto num = parse_number(lower, numpos);
            if (!num || *num < 0 || *num > 1e9 || *num != std::floor(*num)) continue;
            count = static_cast<int64_t>(*num);
            pos = numpos;
        }
        while (pos < lower.size() && is_space(lower[pos])) ++pos;
        if (lit_at(lower, pos, "object")) return count;
    }
    return std::nullopt;
}

}  // namespace

std::string_view status_token(ParseStatus s) {
    switch (s) {
        case ParseStatus::Ok: return "ok";
        case ParseStatus::Partial: return "partial";
        case ParseStatus::Unparsed: return "unparsed";
    }
    return "unparsed";
}

ParsedPrediction parse_prose(std::string_view text, const ClassVocabulary& vocab) {
    ParsedPrediction out;
    out.raw_length = text.size();
    if (text.empty()) return out;

    const std::string lower = lower_ascii(text);
    const PhraseScanner classes = build_class_scanner(vocab);

    struct Mention {
        size_t begin, end;
        const std::string* canonical;
    };
    std::vector<Mention> mentions;
    for (size_t i = 0; i < lower.size();) {
        auto m = classes.match_at(lower, i, true);
        if (m) {
            mentions.push_back(
                {i, m->end,
                 vocab.canonical_of_surface(vocab.surface_forms()[static_cast<size_t>(m->id)])});
            i = m->end;
        } else {
            ++i;
        }
    }

    out.declared_count =
        find_declared_count(lower, mentions.empty() ? lower.size() : mentions.front().begin);

    bool all_spatial = true;
    for (size_t j = 0; j < mentions.size(); ++j) {
        const size_t begin = mentions[j].end;
        const size_t limit = j + 1 < mentions.size() ? mentions[j + 1].begin : lower.size();

        PredObject obj;
        obj.class_name = *mentions[j].canonical;
        obj.range_m = find_range(lower, begin, limit);
        if (auto sec = find_sector(lower, begin, clause_end(lower, begin, limit))) obj.sector = sec;
        all_spatial = all_spatial && obj.has_spatial();
        out.objects.push_back(std::move(obj));
    }

    if (!out.objects.empty())
        out.status = all_spatial ? ParseStatus::Ok : ParseStatus::Partial;
    else if (out.declared_count)
        out.status = ParseStatus::Ok;
    else
        out.status = ParseStatus::Unparsed;
    return out;
}

// ---------------------------------------------------------------------------
// Lenient structured parsing
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
    std::string_view s;   // original text
    size_t pos = 0;
    size_t end = 0;

    bool done() const { return pos >= end; }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && is_space(s[pos])) ++pos;
    }
};

// JSON-ish string starting at the opening quote; tolerates a missing closing
// quote (consumes to end). Decodes the usual escapes.
std::optional<std::string> take_string(Cursor& c, bool* closed = nullptr) {
    if (c.done() || c.peek() != '"') return std::nullopt;
    ++c.pos;
    std::string out;
    bool is_closed = false;
    while (!c.done()) {
        char ch = c.s[c.pos];
        if (ch == '"') {
            ++c.pos;
            is_closed = true;
            break;
        }
        if (ch == '\\' && c.pos + 1 < c.end) {
            char e = c.s[c.pos + 1];
            c.pos += 2;
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case 'u': {
                    unsigned code = 0;
                    int got = 0;
                    while (got < 4 && c.pos < c.end) {
                        char h = c.s[c.pos];
                        unsigned v;
                        if (h >= '0' && h <= '9') v = static_cast<unsigned>(h - '0');
                        else if (h >= 'a' && h <= 'f') v = static_cast<unsigned>(h - 'a' + 10);
                        else if (h >= 'A' && h <= 'F') v = static_cast<unsigned>(h - 'A' + 10);
                        else break;
                        code = code * 16 + v;
                        ++c.pos;
                        ++got;
                    }
                    if (got == 4 && code < 0x80) out += static_cast<char>(code);
                    else if (got == 4 && code < 0x800) {
                        out += static_cast<char>(0xC0 | (code >> 6));
                        out += static_cast<char>(0x80 | (code & 0x3F));
                    } else if (got == 4) {
                        out += static_cast<char>(0xE0 | (code >> 12));
                        out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                        out += static_cast<char>(0x80 | (code & 0x3F));
                    }
                    break;
                }
                default: out += e; break;
            }
            continue;
        }
        out += ch;
        ++c.pos;
    }
    if (closed) *closed = is_closed;
    return out;
}

// Skips one balanced {...} or [...] value, string-aware.
void skip_balanced(Cursor& c) {
    int depth = 0;
    while (!c.done()) {
        char ch = c.s[c.pos];
        if (ch == '"') {
            take_string(c);
            continue;
        }
        if (ch == '{' || ch == '[') ++depth;
        if (ch == '}' || ch == ']') {
            --depth;
            if (depth <= 0) {
                ++c.pos;
                return;
            }
        }
        ++c.pos;
    }
}

std::optional<double> numeric_value(std::string_view s) {
    size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    size_t j = s.size();
    while (j > i && is_space(s[j - 1])) --j;
    if (i >= j) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data() + i, s.data() + j, v);
    if (ec != std::errc{}) return std::nullopt;
    // tolerate a trailing unit
    std::string_view rest(p, static_cast<size_t>(s.data() + j - p));
    while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
    if (!rest.empty() && rest != "m" && rest != "meters" && rest != "metres" && rest != "meter" &&
        rest != "metre" && rest != "deg" && rest != "degree" && rest != "degrees" &&
        rest != "\xc2\xb0")
        return std::nullopt;
    return v;
}

struct RawObject {
    std::optional<std::string> class_surface;
    std::optional<double> azimuth;
    std::optional<double> range;
    bool complete = false;   // saw the closing brace
};

std::string fold_key(std::string_view key) {
    std::string k = lower_ascii(key);
    std::erase_if(k, [](char c) { return c == ' ' || c == '_' || c == '-'; });
    return k;
}

// Parses one object starting at '{'; never consumes past the matching brace.
RawObject take_object(Cursor& c) {
    RawObject obj;
    ++c.pos;   // '{'
    while (true) {
        c.skip_ws();
        if (c.done()) return obj;
        char ch = c.peek();
        if (ch == ',') {
            ++c.pos;
            continue;
        }
        if (ch == '}') {
            ++c.pos;
            obj.complete = true;
            return obj;
        }
        if (ch == ']') return obj;   // unbalanced close, hand back to the array loop
        if (ch != '"') {
            // stray token inside the object; resynchronize
            if (ch == '{' || ch == '[') {
                skip_balanced(c);
                continue;
            }
            ++c.pos;
            continue;
        }
        bool key_closed = false;
        auto key = take_string(c, &key_closed);
        if (!key || !key_closed) return obj;   // truncated mid-key
        c.skip_ws();
        if (c.done()) return obj;
        if (c.peek() != ':') continue;   // lone string, not a pair
        ++c.pos;
        c.skip_ws();
        if (c.done()) return obj;

        const std::string k = fold_key(*key);
        ch = c.peek();
        if (ch == '"') {
            bool val_closed = false;
            auto sval = take_string(c, &val_closed);
            if (!sval) return obj;
            if (k == "class" || k == "category" || k == "type" || k == "label") {
                if (val_closed) obj.class_surface = *sval;
            } else if (k == "azimuthdeg" || k == "azdeg" || k == "azimuth" || k == "az") {
                if (auto v = numeric_value(*sval)) obj.azimuth = v;
            } else if (k == "rangem" || k == "range" || k == "rng" || k == "distancem" ||
                       k == "distance" || k == "dist") {
                if (auto v = numeric_value(*sval)) obj.range = v;
            }
            if (!val_closed) return obj;   // truncated mid-value
        } else if (ch == '{' || ch == '[') {
            skip_balanced(c);
        } else {
            size_t start = c.pos;
            while (!c.done() && c.peek() != ',' && c.peek() != '}' && c.peek() != ']') ++c.pos;
            std::string_view token = c.s.substr(start, c.pos - start);
            if (auto v = numeric_value(token)) {
                if (k == "azimuthdeg" || k == "azdeg" || k == "azimuth" || k == "az")
                    obj.azimuth = v;
                else if (k == "rangem" || k == "range" || k == "rng" || k == "distancem" ||
                         k == "distance" || k == "dist")
                    obj.range = v;
            }
        }
    }
}

}  // namespace

ParsedPrediction parse_structured(std::string_view text, const ClassVocabulary& vocab) {
    ParsedPrediction out;
    out.raw_length = text.size();

    const size_t brace = text.find('{');
    if (brace == std::string_view::npos) return out;

    // First balanced-brace region; an unclosed region extends to the end.
    size_t region_end = text.size();
    {
        Cursor scan{text, brace, text.size()};
        skip_balanced(scan);
        region_end = scan.pos;
    }

    const std::string lower = lower_ascii(text.substr(brace, region_end - brace));
    size_t key_pos = std::string::npos;
    for (size_t i = lower.find("\"objects\""); i != std::string::npos;
         i = lower.find("\"objects\"", i + 1)) {
        size_t after = i + 9;
        while (after < lower.size() && is_space(lower[after])) ++after;
        if (after < lower.size() && lower[after] == ':') {
            key_pos = brace + after + 1;
            break;
        }
    }
    if (key_pos == std::string::npos) return out;

    Cursor c{text, key_pos, region_end};
    c.skip_ws();
    if (c.done() || c.peek() != '[') return out;
    ++c.pos;

    bool array_closed = false;
    bool degraded = false;   // truncation, dropped content, stray tokens
    bool all_spatial = true;
    while (true) {
        c.skip_ws();
        if (c.done()) break;
        const char ch = c.peek();
        if (ch == ',') {
            ++c.pos;
            continue;
        }
        if (ch == ']') {
            array_closed = true;
            break;
        }
        if (ch == '{') {
            RawObject raw = take_object(c);
            if (!raw.complete && c.done()) {
                // truncated trailing object: keep only complete prefix objects
                degraded = true;
                break;
            }
            if (!raw.complete) degraded = true;
            if (!raw.class_surface) {
                degraded = true;
                continue;
            }
            auto canon = vocab.normalize(*raw.class_surface);
            if (!canon) {
                ++out.oov_count;
                continue;
            }
            PredObject obj;
            obj.class_name = *canon;
            obj.range_m = raw.range;
            obj.azimuth_deg = raw.azimuth;
            all_spatial = all_spatial && obj.has_spatial();
            out.objects.push_back(std::move(obj));
            continue;
        }
        if (ch == '"') {
            take_string(c);
            degraded = true;
            continue;
        }
        if (ch == '[') {
            skip_balanced(c);
            degraded = true;
            continue;
        }
        ++c.pos;
    }

    const bool clean = array_closed && !degraded && out.oov_count == 0 && all_spatial;
    out.status = clean ? ParseStatus::Ok : ParseStatus::Partial;
    return out;
}

ParsedPrediction parse_caption(const CaptionRecord& record, const ClassVocabulary& vocab) {
    ParsedPrediction out = record.format == CaptionFormat::Prose
                               ? parse_prose(record.text, vocab)
                               : parse_structured(record.text, vocab);
    out.frame_key = record.frame_key;
    return out;
}

void write_predictions(const std::filesystem::path& path,
                       std::span<const ParsedPrediction> predictions) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    for (const auto& p : predictions) {
        nlohmann::ordered_json root;
        if (p.declared_count) root["declared_count"] = *p.declared_count;
        root["oov"] = p.oov_count;
        root["objects"] = nlohmann::ordered_json::array();
        for (const auto& o : p.objects) {
            nlohmann::ordered_json j;
            j["class"] = o.class_name;
            if (o.range_m) j["range_m"] = *o.range_m;
            if (o.azimuth_deg) j["azimuth_deg"] = *o.azimuth_deg;
            if (o.sector) j["sector"] = std::string(sector_token(*o.sector));
            root["objects"].push_back(std::move(j));
        }
        out << p.frame_key << '\t' << status_token(p.status) << '\t' << root.dump() << '\n';
    }
}

}  // namespace radcap
