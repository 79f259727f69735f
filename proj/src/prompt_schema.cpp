#include "semguide/prompt_schema.hpp"

#include <algorithm>
#include <optional>

#include "semguide/errors.hpp"

namespace semguide {

namespace {

struct RoleWord {
    std::string word;             // normalized
    std::optional<int> ordinal;   // 1-based occurrence, absent when unspecified
};

RoleWord parse_role_word(const Tokenizer& tok, const std::string& raw) {
    RoleWord rw;
    auto hash_pos = raw.rfind('#');
    if (hash_pos != std::string::npos && hash_pos + 1 < raw.size()) {
        const std::string suffix = raw.substr(hash_pos + 1);
        if (std::all_of(suffix.begin(), suffix.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            rw.ordinal = std::stoi(suffix);
            rw.word = tok.normalize_word(raw.substr(0, hash_pos));
            return rw;
        }
    }
    rw.word = tok.normalize_word(raw);
    return rw;
}

// Resolves one role word to the token positions of its chosen occurrence.
std::vector<int> word_token_positions(const Tokenizer& tok, const TokenizedPrompt& prompt,
                                      const std::string& raw, const char* prompt_name) {
    RoleWord rw = parse_role_word(tok, raw);
    if (rw.word.empty())
        throw Error(ErrorCode::RoleWordNotFound, "empty role word for " + std::string(prompt_name));

    std::vector<const WordSpan*> occurrences;
    for (const auto& span : prompt.words)
        if (span.text == rw.word) occurrences.push_back(&span);

    if (occurrences.empty())
        throw Error(ErrorCode::RoleWordNotFound,
                    "'" + rw.word + "' does not occur in the " + prompt_name + " prompt");
    const WordSpan* chosen = nullptr;
    if (rw.ordinal) {
        int k = *rw.ordinal;
        if (k < 1 || k > static_cast<int>(occurrences.size()))
            throw Error(ErrorCode::RoleWordNotFound,
                        "'" + rw.word + "' has no occurrence #" + std::to_string(k));
        chosen = occurrences[static_cast<size_t>(k - 1)];
    } else if (occurrences.size() == 1) {
        chosen = occurrences.front();
    } else {
        throw Error(ErrorCode::AmbiguousRoleWord,
                    "'" + rw.word + "' occurs " + std::to_string(occurrences.size()) +
                        " times in the " + prompt_name + " prompt; use '" + rw.word + "#k'");
    }

    std::vector<int> positions;
    for (int i = 0; i < chosen->piece_count; ++i) positions.push_back(chosen->first_piece + i);
    return positions;
}

void insert_role(std::set<int>& dst, const std::vector<int>& positions, const std::set<int>& taken,
                 const std::string& role_name) {
    for (int p : positions) {
        if (taken.count(p) || dst.count(p))
            throw Error(ErrorCode::RoleOverlap,
                        "token position " + std::to_string(p) + " claimed twice (" + role_name + ")");
        dst.insert(p);
    }
}

} // namespace

void PromptSpec::validate(const Tokenizer& tok) const {
    auto surr_words = split_normalized_words(tok, surrogate_prompt);
    auto tgt_words = split_normalized_words(tok, target_prompt);
    auto occurs = [&tok](const std::vector<std::string>& words, const std::string& raw) {
        const std::string w = parse_role_word(tok, raw).word;
        return std::find(words.begin(), words.end(), w) != words.end();
    };

    for (const auto& w : non_conflicting_words)
        if (!occurs(surr_words, w))
            throw Error(ErrorCode::RoleWordNotFound, "non-conflicting word '" + w + "' not in surrogate prompt");
    for (const auto& w : conflicting_words) {
        if (!occurs(surr_words, w))
            throw Error(ErrorCode::RoleWordNotFound, "conflicting word '" + w + "' not in surrogate prompt");
        const std::string norm = parse_role_word(tok, w).word;
        for (const auto& nc : non_conflicting_words)
            if (parse_role_word(tok, nc).word == norm)
                throw Error(ErrorCode::RoleOverlap, "'" + norm + "' listed as both conflicting and non-conflicting");
    }
    for (const auto& w : target_words)
        if (!occurs(tgt_words, w))
            throw Error(ErrorCode::RoleWordNotFound, "target word '" + w + "' not in target prompt");
}

TokenRoleMap resolve_token_roles(const PromptSpec& spec, const Tokenizer& tokenizer) {
    spec.validate(tokenizer);

    TokenizedPrompt surr = tokenizer.tokenize(spec.surrogate_prompt);
    TokenizedPrompt tgt = tokenizer.tokenize(spec.target_prompt);

    TokenRoleMap map;
    map.surrogate_token_ids = surr.ids;
    map.target_token_ids = tgt.ids;
    map.special_indices_surrogate.insert(surr.special_indices.begin(), surr.special_indices.end());
    map.special_indices_target.insert(tgt.special_indices.begin(), tgt.special_indices.end());

    for (const auto& w : spec.non_conflicting_words)
        insert_role(map.non_conflicting_indices, word_token_positions(tokenizer, surr, w, "surrogate"),
                    map.conflicting_indices, "non-conflicting");
    for (const auto& w : spec.conflicting_words)
        insert_role(map.conflicting_indices, word_token_positions(tokenizer, surr, w, "surrogate"),
                    map.non_conflicting_indices, "conflicting");
    for (const auto& w : spec.target_words)
        insert_role(map.target_indices, word_token_positions(tokenizer, tgt, w, "target"), {}, "target");

    if (map.non_conflicting_indices.empty())
        throw Error(ErrorCode::EmptyTokenSet, "at least one non-conflicting token is required");
    if (!map.conflicting_indices.empty() && map.target_indices.empty())
        throw Error(ErrorCode::NonPositiveNTar,
                    "conflicting tokens given but no target tokens to receive the bias");

    return map;
}

const std::set<std::string>& builtin_stopwords() {
    static const std::set<std::string> words = {
        "a",  "an",  "the",  "is",   "are", "was",  "were", "be",   "being", "been",
        "am", "of",  "in",   "on",   "at",  "to",   "with", "by",   "for",   "from",
        "and", "or", "this", "that", "it",  "its",  "as",   "into", "over",  "under",
    };
    return words;
}

std::vector<std::string> derive_non_conflicting_words(const std::string& surrogate_prompt,
                                                      const std::set<std::string>& stopwords,
                                                      const std::vector<std::string>& conflicting_words,
                                                      const std::vector<std::string>& unrelated_words,
                                                      const Tokenizer& tok) {
    std::set<std::string> drop;
    for (const auto& w : stopwords) drop.insert(tok.normalize_word(w));
    for (const auto& w : conflicting_words) drop.insert(parse_role_word(tok, w).word);
    for (const auto& w : unrelated_words) drop.insert(tok.normalize_word(w));

    std::vector<std::string> kept;
    for (const auto& w : split_normalized_words(tok, surrogate_prompt))
        if (!drop.count(w)) kept.push_back(w);

    if (kept.empty())
        throw Error(ErrorCode::EmptyResult, "no non-conflicting words remain after filtering");
    return kept;
}

} // namespace semguide
