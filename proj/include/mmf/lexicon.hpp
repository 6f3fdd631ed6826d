#ifndef MMF_LEXICON_HPP
#define MMF_LEXICON_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmf/types.hpp"

namespace mmf {

// Object vocabulary: ten interactable classes. "hand" exists as a detector
// class (it anchors deictic resolution) but is not a command target.
struct LexiconEntry {
    int class_id = -1;
    std::string canonical;                 // display name, e.g. "mobile phone"
    std::vector<std::string> surfaces;     // singular surface forms (may be multi-word)
    std::vector<std::string> plural_surfaces;
};

struct LexiconHit {
    int class_id = -1;
    Multiplicity multiplicity = Multiplicity::singular;
};

class Lexicon {
public:
    static const Lexicon& builtin();

    // Scans a lowercase token sequence for the first known object mention,
    // longest surface first at each position. Multi-word surfaces may be
    // split across adjacent tokens ("smart", "phone"). Plurality comes from
    // a plural surface form or a count word ("two", "all", ...) directly
    // before the mention. Returns nullopt when no object word is present.
    std::optional<LexiconHit> lookup(std::span<const std::string> tokens) const;

    const LexiconEntry& entry(int class_id) const;
    std::optional<int> class_of(std::string_view canonical) const;
    const std::string& name_of(int class_id) const;
    int size() const { return static_cast<int>(entries_.size()); }

    static bool is_count_word(std::string_view token);

    static constexpr int hand_class = 9; // last entry, detector-only

private:
    std::vector<LexiconEntry> entries_;
};

} // namespace mmf

#endif
