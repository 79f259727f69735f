#ifndef SEMGUIDE_TOKENIZER_HPP
#define SEMGUIDE_TOKENIZER_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace semguide {

// One source word inside a tokenized prompt: the normalized text and the
// half-open range of piece positions it produced.
struct WordSpan {
    std::string text;
    int first_piece = 0;
    int piece_count = 0;
};

struct TokenizedPrompt {
    std::vector<std::string> pieces; // includes <sot> / <eot>
    std::vector<int64_t> ids;
    std::vector<int> special_indices; // positions of <sot> / <eot>
    std::vector<WordSpan> words;      // delimiters excluded

    int token_count() const { return static_cast<int>(pieces.size()); }
};

// Interface so backbones can expose whatever tokenizer they wrap.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual TokenizedPrompt tokenize(const std::string& text) const = 0;
    virtual std::string normalize_word(const std::string& word) const = 0;
};

// Deterministic whitespace + fixed-width subword tokenizer.
//
// Words are lowercased, punctuation-stripped, then split into chunks of at
// most `chunk` characters ("plushie" -> "plus","hie"). Sequences are framed
// by <sot> and <eot>, which land in special_indices. Ids are stable content
// hashes of the piece text, so the vocabulary is open.
class ToyTokenizer : public Tokenizer {
public:
    explicit ToyTokenizer(int chunk = 4) : chunk_(chunk) {}

    TokenizedPrompt tokenize(const std::string& text) const override;
    std::string normalize_word(const std::string& word) const override;
    std::vector<std::string> word_pieces(const std::string& word) const;

    static constexpr const char* kStartToken = "<sot>";
    static constexpr const char* kEndToken = "<eot>";

private:
    int chunk_;
};

// Splits text on whitespace and normalizes each word; empty results dropped.
std::vector<std::string> split_normalized_words(const Tokenizer& tok, const std::string& text);

} // namespace semguide

#endif
