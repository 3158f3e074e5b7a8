#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace radcap {

// Canonical object classes plus the surface forms that map onto them.
// Canonical names are lowercase; the synonym map is closed over them.
class ClassVocabulary {
public:
    static const ClassVocabulary& defaults();

    // One class per line: canonical name, then optional '|'-separated
    // synonyms. '#' starts a comment.
    static ClassVocabulary load(const std::filesystem::path& path);
    static ClassVocabulary from_lines(const std::vector<std::string>& lines,
                                      const std::string& source = "<string>");

    const std::vector<std::string>& classes() const { return canonical_; }

    // Case-insensitive lookup with article stripping, whitespace collapsing
    // and a trailing plural 's' fallback. nullopt marks out-of-vocabulary.
    std::optional<std::string> normalize(std::string_view surface) const;

    // Every accepted surface form (lowercase, synonyms included), sorted
    // longest first for greedy text scanning.
    const std::vector<std::string>& surface_forms() const { return surfaces_; }
    const std::string* canonical_of_surface(std::string_view lowercase_surface) const;

private:
    void add_class(const std::string& canonical, const std::vector<std::string>& synonyms);
    void finalize();

    std::vector<std::string> canonical_;
    std::vector<std::string> surfaces_;
    std::unordered_map<std::string, std::string> lookup_;
};

// Lowercases ASCII, collapses runs of whitespace to single spaces, trims.
std::string fold_surface(std::string_view s);

}  // namespace radcap
