#ifndef SEMGUIDE_PROMPT_SCHEMA_HPP
#define SEMGUIDE_PROMPT_SCHEMA_HPP

#include <set>
#include <string>
#include <vector>

#include "semguide/tokenizer.hpp"

namespace semguide {

// A generation task's prompts plus the word-level role annotations.
//
// Role words may carry an occurrence ordinal ("dog#2" = second occurrence of
// "dog"); without one the word must occur exactly once in its prompt.
struct PromptSpec {
    std::string target_prompt;
    std::string surrogate_prompt;
    std::vector<std::string> non_conflicting_words; // surrogate words shared with the target
    std::vector<std::string> conflicting_words;     // surrogate words the target contradicts
    std::vector<std::string> target_words;          // target words the condition contradicts

    // Word-level checks: role lists disjoint, every role word present in its
    // prompt. Throws on violation.
    void validate(const Tokenizer& tok) const;
};

// Token-index view of a PromptSpec under a concrete tokenizer. All indices
// point into the full token sequences, delimiters included.
struct TokenRoleMap {
    std::vector<int64_t> surrogate_token_ids;
    std::vector<int64_t> target_token_ids;
    std::set<int> non_conflicting_indices; // positions in surrogate tokens
    std::set<int> conflicting_indices;     // positions in surrogate tokens
    std::set<int> target_indices;          // positions in target tokens
    std::set<int> special_indices_surrogate;
    std::set<int> special_indices_target;

    int non_conflicting_count() const { return static_cast<int>(non_conflicting_indices.size()); }
    int conflicting_count() const { return static_cast<int>(conflicting_indices.size()); }
    int target_count() const { return static_cast<int>(target_indices.size()); }
};

// Expands every role word to the positions of all its subword tokens.
// Deterministic for a fixed spec + tokenizer.
//
// Errors: RoleWordNotFound, AmbiguousRoleWord (multiple occurrences, no
// ordinal), RoleOverlap (an index claimed by two roles), EmptyTokenSet (no
// non-conflicting tokens), NonPositiveNTar (conflicting tokens present but no
// target tokens).
TokenRoleMap resolve_token_roles(const PromptSpec& spec, const Tokenizer& tokenizer);

// Default word list for surrogate-token selection: articles, copulas,
// prepositions, conjunctions. Overridable via job configuration.
const std::set<std::string>& builtin_stopwords();

// Convenience defaulting path for non-conflicting words: surrogate words
// minus stopwords, minus unrelated words, minus conflicting words,
// order-preserving. Throws EmptyResult when nothing survives.
std::vector<std::string> derive_non_conflicting_words(const std::string& surrogate_prompt,
                                                      const std::set<std::string>& stopwords,
                                                      const std::vector<std::string>& conflicting_words,
                                                      const std::vector<std::string>& unrelated_words,
                                                      const Tokenizer& tok);

} // namespace semguide

#endif
