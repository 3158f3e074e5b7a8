#include "radcap/vocabulary.hpp"

#include <algorithm>
#include <fstream>

#include "radcap/errors.hpp"

namespace radcap {

std::string fold_surface(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
    return out;
}

namespace {

std::string_view strip_article(std::string_view s) {
    for (std::string_view art : {"a ", "an ", "the "})
        if (s.size() > art.size() && s.substr(0, art.size()) == art) return s.substr(art.size());
    return s;
}

}  // namespace

void ClassVocabulary::add_class(const std::string& canonical,
                                const std::vector<std::string>& synonyms) {
    const std::string canon = fold_surface(canonical);
    if (canon.empty()) throw MalformedInput("empty canonical class name");
    canonical_.push_back(canon);
    lookup_.emplace(canon, canon);
    for (const auto& syn : synonyms) {
        const std::string s = fold_surface(syn);
        if (!s.empty()) lookup_.emplace(s, canon);
    }
}

void ClassVocabulary::finalize() {
    surfaces_.clear();
    surfaces_.reserve(lookup_.size());
    for (const auto& [surface, canon] : lookup_) surfaces_.push_back(surface);
    std::sort(surfaces_.begin(), surfaces_.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
}

const ClassVocabulary& ClassVocabulary::defaults() {
    static const ClassVocabulary vocab = [] {
        ClassVocabulary v;
        v.add_class("sedan", {"car", "sedans", "cars", "automobile", "vehicle"});
        v.add_class("bus or truck",
                    {"truck", "bus", "trucks", "buses", "lorry", "van", "bus/truck"});
        v.add_class("motorcycle", {"motorbike", "motorcycles", "moped"});
        v.add_class("bicycle", {"bike", "bicycles", "bikes", "cyclist"});
        v.add_class("pedestrian", {"person", "pedestrians", "human"});
        v.add_class("pedestrian group", {"people", "crowd", "group of pedestrians"});
        v.add_class("bicycle group", {"group of bicycles", "group of cyclists"});
        v.finalize();
        return v;
    }();
    return vocab;
}

ClassVocabulary ClassVocabulary::from_lines(const std::vector<std::string>& lines,
                                            const std::string& source) {
    ClassVocabulary v;
    size_t line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        std::string_view line(raw);
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string> parts;
        size_t start = 0;
        while (true) {
            size_t pos = line.find('|', start);
            parts.emplace_back(line.substr(start, pos == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : pos - start));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        if (fold_surface(parts[0]).empty())
            throw MalformedInput(source + ":" + std::to_string(line_no) +
                                 ": empty canonical class name");
        v.add_class(parts[0], {parts.begin() + 1, parts.end()});
    }
    if (v.canonical_.empty()) throw MalformedInput(source + ": vocabulary has no classes");
    v.finalize();
    return v;
}

ClassVocabulary ClassVocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open vocabulary: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines, path.string());
}

const std::string* ClassVocabulary::canonical_of_surface(std::string_view lowercase_surface) const {
    auto it = lookup_.find(std::string(lowercase_surface));
    return it == lookup_.end() ? nullptr : &it->second;
}

std::optional<std::string> ClassVocabulary::normalize(std::string_view surface) const {
    std::string folded = fold_surface(surface);
    if (folded.empty()) return std::nullopt;

    auto probe = [&](std::string_view s) -> const std::string* {
        return canonical_of_surface(s);
    };

    if (const std::string* c = probe(folded)) return *c;

    std::string_view s = strip_article(folded);
    if (const std::string* c = probe(s)) return *c;

    if (s.size() > 1 && s.back() == 's') {
        if (const std::string* c = probe(s.substr(0, s.size() - 1))) return *c;
    }
    return std::nullopt;
}

}  // namespace radcap
