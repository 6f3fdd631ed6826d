#include "mmf/lexicon.hpp"

#include <array>
#include <sstream>
#include <unordered_set>

namespace mmf {

namespace {

// Splits a surface form like "mobile phone" into its words.
std::vector<std::string> words_of(const std::string& surface) {
    std::vector<std::string> out;
    std::istringstream in(surface);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// Does tokens[pos..] start with the given surface words?
bool matches_at(std::span<const std::string> tokens, size_t pos,
                const std::vector<std::string>& words) {
    if (pos + words.size() > tokens.size()) return false;
    for (size_t i = 0; i < words.size(); ++i)
        if (tokens[pos + i] != words[i]) return false;
    return true;
}

const std::unordered_set<std::string>& count_words() {
    static const std::unordered_set<std::string> set{
        "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "2", "3", "4", "5", "6", "7", "8", "9", "10", "all", "these", "both",
    };
    return set;
}

} // namespace

bool Lexicon::is_count_word(std::string_view token) {
    return count_words().count(std::string(token)) > 0;
}

const Lexicon& Lexicon::builtin() {
    static const Lexicon instance = [] {
        struct Raw {
            const char* canonical;
            std::vector<std::string> surfaces;
            std::vector<std::string> plurals;
        };
        // Surfaces are disjoint across classes so lookup never needs scoring.
        const std::array<Raw, 10> raw{{
            {"laptop", {"laptop", "notebook"}, {"laptops", "notebooks"}},
            {"keyboard", {"keyboard"}, {"keyboards"}},
            {"mouse", {"mouse"}, {"mice"}},
            {"monitor", {"monitor", "screen", "display"}, {"monitors", "screens", "displays"}},
            {"mobile phone",
             {"mobile phone", "smart phone", "smartphone", "phone", "cellphone", "mobile"},
             {"mobile phones", "smart phones", "smartphones", "phones", "cellphones", "mobiles"}},
            {"bottle", {"bottle"}, {"bottles"}},
            {"cup", {"cup", "mug"}, {"cups", "mugs"}},
            {"pen", {"pen"}, {"pens"}},
            {"book", {"book"}, {"books"}},
            {"hand", {"hand"}, {"hands"}},
        }};

        Lexicon lex;
        for (size_t i = 0; i < raw.size(); ++i) {
            LexiconEntry e;
            e.class_id = static_cast<int>(i);
            e.canonical = raw[i].canonical;
            e.surfaces = raw[i].surfaces;
            e.plural_surfaces = raw[i].plurals;
            lex.entries_.push_back(std::move(e));
        }
        return lex;
    }();
    return instance;
}

std::optional<LexiconHit> Lexicon::lookup(std::span<const std::string> tokens) const {
    for (size_t pos = 0; pos < tokens.size(); ++pos) {
        // longest surface first so "mobile phone" wins over "mobile"
        const LexiconEntry* best_entry = nullptr;
        size_t best_len = 0;
        bool best_plural = false;
        for (const auto& entry : entries_) {
            for (const auto& s : entry.surfaces) {
                auto words = words_of(s);
                if (words.size() > best_len && matches_at(tokens, pos, words)) {
                    best_entry = &entry;
                    best_len = words.size();
                    best_plural = false;
                }
            }
            for (const auto& s : entry.plural_surfaces) {
                auto words = words_of(s);
                if (words.size() > best_len && matches_at(tokens, pos, words)) {
                    best_entry = &entry;
                    best_len = words.size();
                    best_plural = true;
                }
            }
        }
        if (best_entry) {
            LexiconHit hit;
            hit.class_id = best_entry->class_id;
            bool counted = pos > 0 && is_count_word(tokens[pos - 1]);
            hit.multiplicity = (best_plural || counted) ? Multiplicity::plural
                                                        : Multiplicity::singular;
            return hit;
        }
    }
    return std::nullopt;
}

const LexiconEntry& Lexicon::entry(int class_id) const {
    if (class_id < 0 || class_id >= size())
        throw Error(Errc::invalid_arg, "lexicon: class id out of range");
    return entries_[static_cast<size_t>(class_id)];
}

std::optional<int> Lexicon::class_of(std::string_view canonical) const {
    for (const auto& e : entries_)
        if (e.canonical == canonical) return e.class_id;
    return std::nullopt;
}

const std::string& Lexicon::name_of(int class_id) const { return entry(class_id).canonical; }

} // namespace mmf
